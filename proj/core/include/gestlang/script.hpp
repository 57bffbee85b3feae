#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

#include "gestlang/codec.hpp"

namespace gestlang {

// Canonical token spelling of an instruction, sentinels included:
// TaskSwitch{hover, 50 s} -> STOP HOVER DIGIT(5) GO.
std::vector<LanguageToken> tokens_for(const Instruction& ins);

// "STOP, HOVER, DIGIT(5), GO" -> tokens. Throws Error(kFormat) on bad spellings.
std::vector<LanguageToken> parse_script(std::string_view text);
std::string format_script(std::span<const LanguageToken> tokens);

struct StreamLayout {
  int dwell_frames = 20;  // frames each token is held
  int gap_frames = 5;     // frames between tokens
  bool random_gaps = true;  // gap frames carry random mapped pairs; otherwise absent
  FrameIndex first_frame = 0;
};

struct ScriptedStream {
  std::vector<PairObservation> frames;
  // Intended token per frame (absent during gaps).
  std::vector<std::optional<LanguageToken>> truth;
};

// Throws Error(kInvalidArgument) if a token has no pair in `cfg`.
ScriptedStream build_stream(const VocabularyConfig& cfg, std::span<const LanguageToken> tokens,
                            const StreamLayout& layout, std::uint64_t seed);

// Uniformly random instruction whose ids exist in `cfg`.
Instruction random_instruction(const VocabularyConfig& cfg, std::mt19937_64& rng);

// The four instruction scripts used in the interaction study.
struct StudyScript {
  std::string_view name;
  std::string_view tokens;
  Instruction expected;
};
std::span<const StudyScript> study_scripts();

}  // namespace gestlang
