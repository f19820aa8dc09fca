#include "approxifer/pipeline.hpp"

#include <set>

namespace approxifer {

DecodeOutcome locate_and_decode(const BerrutCodec& codec, const std::map<std::size_t, PredictionVector>& returned) {
  DecodeOutcome out;
  const CodingConfig& config = codec.config();
  if (returned.size() < config.quorum) throw InsufficientResults(returned.size(), config.quorum);
  if (config.e > 0) {
    const std::size_t classes = returned.begin()->second.size();
    out.report = locator::locate_errors_majority(returned, codec.nodes().beta, config.k, config.e, classes);
    out.excluded = out.report.located;
  }
  const std::set<std::size_t> excluded(out.excluded.begin(), out.excluded.end());
  out.decoded = codec.decode(returned, excluded);
  return out;
}

}  // namespace approxifer
