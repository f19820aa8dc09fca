#pragma once

#include <cstddef>
#include <map>
#include <vector>

#include "approxifer/berrut_codec.hpp"
#include "approxifer/error_locator.hpp"

namespace approxifer {

// Decoder-side half of a round, shared by the simulator and the network
// dispatcher so both produce the same numbers from the same inputs.
struct DecodeOutcome {
  std::vector<PredictionVector> decoded;
  std::vector<std::size_t> excluded;
  locator::LocatorReport report;
};

// With E > 0, majority-locates E workers over the returned coded predictions and
// excludes them; then decodes from everything that remains.
DecodeOutcome locate_and_decode(const BerrutCodec& codec, const std::map<std::size_t, PredictionVector>& returned);

}  // namespace approxifer
