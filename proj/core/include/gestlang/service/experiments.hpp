#pragma once

#include <cstdint>
#include <vector>

#include "gestlang/noise.hpp"
#include "gestlang/script.hpp"
#include "gestlang/service/pipeline.hpp"

namespace gestlang::service {

struct NoiseTrialOptions {
  int trials = 200;
  int dwell_frames = 30;
  int gap_frames = 5;
  double substitution_rate = 0.055;
  double dropout_rate = 0.0;
  std::uint64_t seed = 0;
};

struct NoiseTrial {
  Instruction expected;
  std::vector<Instruction> emitted;
};

struct NoiseTrialResult {
  std::vector<NoiseTrial> trials;
  MetricsReport report;  // summed over trials
};

// Each trial scripts one random instruction, holds every token for
// dwell_frames with absent-detection gaps between tokens, corrupts the stream
// with the noise model and runs it through a fresh token session.
NoiseTrialResult run_noise_trials(PipelineService& service, const VocabularyConfig& cfg,
                                  const NoiseTrialOptions& options);

}  // namespace gestlang::service
