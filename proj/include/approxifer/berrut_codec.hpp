#pragma once

#include <cstddef>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "approxifer/chebyshev.hpp"
#include "approxifer/row_block.hpp"

namespace approxifer {

using PredictionVector = std::vector<double>;

// K queries per batch, S stragglers and E Byzantine workers tolerated. N + 1
// workers are used; `quorum` is how many coded predictions the decoder waits
// for.
struct CodingConfig {
  std::size_t k = 0;
  std::size_t s = 0;
  std::size_t e = 0;
  std::size_t n = 0;
  std::size_t quorum = 0;

  std::size_t workers() const { return n + 1; }
  double overhead() const { return static_cast<double>(n + 1) / static_cast<double>(k); }
  // Survivors the decoder needs once the located Byzantine workers are removed.
  std::size_t min_decode_set() const { return e == 0 ? k : 2 * k + e; }

  bool operator==(const CodingConfig&) const = default;
};

// E = 0: N = K + S - 1, quorum K. E > 0: N = 2(K + E) + S - 1, quorum 2(K + E).
// Rejects K = 0 and triples that leave N < 1.
CodingConfig make_config(std::size_t k, std::size_t s, std::size_t e);

// K queries of a common dimension d, one per row.
using QueryBatch = RowBlock;
// N + 1 coded queries, row i goes to worker i.
using CodedQuerySet = RowBlock;

// Raised when too few usable coded predictions are available to decode.
class InsufficientResults : public std::runtime_error {
 public:
  InsufficientResults(std::size_t have, std::size_t need)
      : std::runtime_error("insufficient results: have " + std::to_string(have) + ", need " + std::to_string(need)),
        have_(have),
        need_(need) {}
  std::size_t have() const { return have_; }
  std::size_t need() const { return need_; }

 private:
  std::size_t have_;
  std::size_t need_;
};

// Encoder/decoder bound to one configuration. Holds the node set and the
// (N+1) x K encoding matrix; immutable after construction.
class BerrutCodec {
 public:
  explicit BerrutCodec(CodingConfig config);

  const CodingConfig& config() const { return config_; }
  const chebyshev::NodeSet& nodes() const { return nodes_; }

  // coded[i] = sum_j l_j(beta_i) X_j, componentwise over the d columns.
  CodedQuerySet encode(const QueryBatch& batch) const;

  // Y_hat_j = r(alpha_j) where r is the Berrut interpolant through the returned
  // predictions minus `excluded`, each keeping the sign of its worker index.
  // Every surviving result is used, not just a quorum-sized prefix.
  std::vector<PredictionVector> decode(const std::map<std::size_t, PredictionVector>& returned,
                                       const std::set<std::size_t>& excluded = {}) const;

  // r(z) over the same survivor set; decode() is this at each alpha_j.
  PredictionVector interpolate_at(const std::map<std::size_t, PredictionVector>& returned,
                                  const std::set<std::size_t>& excluded, double z) const;

 private:
  struct Survivors {
    std::vector<std::size_t> index;
    std::vector<double> point;
    RowBlock values;
  };
  Survivors gather(const std::map<std::size_t, PredictionVector>& returned,
                   const std::set<std::size_t>& excluded) const;
  PredictionVector evaluate(const Survivors& survivors, double z) const;

  CodingConfig config_;
  chebyshev::NodeSet nodes_;
  RowBlock encode_weights_;  // (N+1) x K
};

// Free-function forms of the codec for one-shot use.
CodedQuerySet encode(const QueryBatch& batch, const CodingConfig& config);
std::vector<PredictionVector> decode(const std::map<std::size_t, PredictionVector>& returned,
                                     const CodingConfig& config, const std::set<std::size_t>& excluded = {});

}  // namespace approxifer
