#pragma once

// JSON encodings shared by the token-stream and instruction-log files, the
// mission log, and the service protocol.

#include <filesystem>
#include <optional>
#include <vector>

#include <nlohmann/json.hpp>

#include "gestlang/decoder.hpp"

namespace gestlang {

// One line of a token stream file: the classified gesture pair for a frame,
// or no pair when detection failed.
struct PairObservation {
  FrameIndex frame_index = 0;
  std::optional<GesturePair> pair;
  double confidence = 1.0;

  friend bool operator==(const PairObservation&, const PairObservation&) = default;
};

TokenObservation to_token_observation(const VocabularyConfig& cfg, const PairObservation& obs);
std::vector<TokenObservation> to_token_observations(const VocabularyConfig& cfg,
                                                    std::span<const PairObservation> stream);

nlohmann::json to_json(const PairObservation& obs);
PairObservation pair_observation_from_json(const nlohmann::json& j);

nlohmann::json to_json(const Instruction& ins);
Instruction instruction_from_json(const nlohmann::json& j);

nlohmann::json to_json(const FsmState& s);
nlohmann::json to_json(const DecodeEvent& ev);

// JSON-lines helpers. Blank lines are skipped on read. Errors carry the
// 1-based line number.
std::vector<PairObservation> read_token_stream(const std::filesystem::path& path);
void write_token_stream(const std::filesystem::path& path, std::span<const PairObservation> stream);

struct LoggedInstruction {
  FrameIndex frame_index = 0;
  Instruction instruction;
  friend bool operator==(const LoggedInstruction&, const LoggedInstruction&) = default;
};

std::vector<LoggedInstruction> read_instruction_log(const std::filesystem::path& path);
void write_instruction_log(const std::filesystem::path& path, std::span<const LoggedInstruction> log);
std::vector<LoggedInstruction> instruction_log(std::span<const DecodeEvent> events);

std::vector<nlohmann::json> read_json_lines(const std::filesystem::path& path);
void write_json_lines(const std::filesystem::path& path, std::span<const nlohmann::json> lines);

}  // namespace gestlang
