#include "gestlang/service/experiments.hpp"

#include <random>

#include "gestlang/errors.hpp"

namespace gestlang::service {

NoiseTrialResult run_noise_trials(PipelineService& service, const VocabularyConfig& cfg,
                                  const NoiseTrialOptions& options) {
  if (options.trials < 0 || options.dwell_frames <= 0 || options.gap_frames < 0) {
    throw Error(ErrorKind::kInvalidArgument, "bad trial options");
  }
  std::mt19937_64 rng(options.seed);
  NoiseTrialResult result;
  long attempted = 0, decoded = 0, unintended = 0, gestures = 0, correct = 0;
  for (int t = 0; t < options.trials; ++t) {
    NoiseTrial trial{random_instruction(cfg, rng), {}};
    StreamLayout layout;
    layout.dwell_frames = options.dwell_frames;
    layout.gap_frames = options.gap_frames;
    layout.random_gaps = false;
    const auto clean = build_stream(cfg, tokens_for(trial.expected), layout, rng());
    const auto noisy =
        perturb_stream(cfg, clean.frames, NoiseModel{options.substitution_rate, options.dropout_rate, rng()});

    std::vector<TokenInput> inputs;
    inputs.reserve(noisy.size());
    for (std::size_t i = 0; i < noisy.size(); ++i) {
      inputs.push_back({to_token_observation(cfg, noisy[i]), clean.truth[i]});
    }
    const auto id = *service.create_session(cfg, ClassifierChoice::kContour).session_id;
    service.ingest_tokens(id, inputs);
    trial.emitted = service.emitted_instructions(id);
    const auto r = service.metrics_report(id, std::vector<Instruction>{trial.expected});
    service.close_session(id);

    attempted += *r.total_instructions_attempted;
    decoded += *r.successfully_decoded;
    unintended += *r.unintended_instructions;
    gestures += r.total_gestures;
    correct += r.correctly_recognized_gestures;
    result.trials.push_back(std::move(trial));
  }
  result.report = make_report(attempted, decoded, gestures, correct);
  result.report.unintended_instructions = unintended;
  return result;
}

}  // namespace gestlang::service
