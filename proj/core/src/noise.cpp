#include "gestlang/noise.hpp"

#include <algorithm>
#include <random>

#include "gestlang/errors.hpp"

namespace gestlang {

std::vector<PairObservation> perturb_stream(const VocabularyConfig& cfg,
                                            std::span<const PairObservation> stream,
                                            const NoiseModel& noise) {
  auto in_unit = [](double r) { return r >= 0.0 && r <= 1.0; };
  if (!in_unit(noise.substitution_rate) || !in_unit(noise.dropout_rate)) {
    throw Error(ErrorKind::kInvalidArgument, "noise rates must lie in [0,1]");
  }

  std::vector<GesturePair> mapped;
  for (const auto& [pair, _] : cfg.pair_to_token) mapped.push_back(pair);

  std::mt19937_64 rng(noise.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<PairObservation> out(stream.begin(), stream.end());
  for (auto& obs : out) {
    // All three draws happen every frame so a given seed corrupts the same frames
    // regardless of the rates' interplay.
    const double u_drop = unit(rng);
    const double u_sub = unit(rng);
    const double u_pick = unit(rng);
    if (u_drop < noise.dropout_rate) {
      obs.pair.reset();
      continue;
    }
    if (u_sub < noise.substitution_rate) {
      std::vector<GesturePair> choices;
      for (const auto& p : mapped) {
        if (!obs.pair || p != *obs.pair) choices.push_back(p);
      }
      if (choices.empty()) continue;
      auto idx = std::min(choices.size() - 1, static_cast<std::size_t>(u_pick * choices.size()));
      obs.pair = choices[idx];
    }
  }
  return out;
}

}  // namespace gestlang
