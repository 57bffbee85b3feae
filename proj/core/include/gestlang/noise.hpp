#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "gestlang/codec.hpp"

namespace gestlang {

// Token-level corruption applied after classification. Each frame is
// independently dropped (absent detection) with dropout_rate, otherwise
// replaced with a uniformly random *different* mapped pair with
// substitution_rate.
struct NoiseModel {
  double substitution_rate = 0.0;
  double dropout_rate = 0.0;
  std::uint64_t seed = 0;
};

// Throws Error(kInvalidArgument) for rates outside [0,1].
std::vector<PairObservation> perturb_stream(const VocabularyConfig& cfg,
                                            std::span<const PairObservation> stream,
                                            const NoiseModel& noise);

}  // namespace gestlang
