#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "gestlang/vocabulary.hpp"

namespace gestlang {

using FrameIndex = std::int64_t;

struct TokenObservation {
  FrameIndex frame_index = 0;
  std::optional<LanguageToken> token;  // absent when no valid pair was detected
  double confidence = 1.0;

  friend bool operator==(const TokenObservation&, const TokenObservation&) = default;
};

// ---------------------------------------------------------------------------
// Instructions

enum class Direction : std::uint8_t { kIncrease, kDecrease };
std::string_view to_string(Direction d);

struct TaskSwitch {
  Task task = Task::kHover;
  std::optional<double> duration_s;  // absent = indefinite
  friend bool operator==(const TaskSwitch&, const TaskSwitch&) = default;
};

struct ExecuteProgram {
  int program_id = 0;
  friend bool operator==(const ExecuteProgram&, const ExecuteProgram&) = default;
};

struct ParamUpdate {
  int param_id = 0;
  Direction direction = Direction::kIncrease;
  friend bool operator==(const ParamUpdate&, const ParamUpdate&) = default;
};

struct Snapshot {
  std::optional<double> duration_s;
  friend bool operator==(const Snapshot&, const Snapshot&) = default;
};

using Instruction = std::variant<TaskSwitch, ExecuteProgram, ParamUpdate, Snapshot>;

std::string to_string(const Instruction& ins);

// DIGIT(d) as a duration: 10*d seconds, d == 0 meaning "indefinite".
std::optional<double> digit_duration(int digit);

// ---------------------------------------------------------------------------
// FSM states. Payload fields live only on the states that need them.

namespace fsm {
struct Idle { friend bool operator==(const Idle&, const Idle&) = default; };
struct GotStop { friend bool operator==(const GotStop&, const GotStop&) = default; };
struct GotContd { friend bool operator==(const GotContd&, const GotContd&) = default; };
struct TaskPending {
  Task task;
  friend bool operator==(const TaskPending&, const TaskPending&) = default;
};
struct ExecPending { friend bool operator==(const ExecPending&, const ExecPending&) = default; };
struct ExecReady {
  int program_id;
  friend bool operator==(const ExecReady&, const ExecReady&) = default;
};
struct UpdatePending { friend bool operator==(const UpdatePending&, const UpdatePending&) = default; };
struct UpdateDir {
  int param_id;
  friend bool operator==(const UpdateDir&, const UpdateDir&) = default;
};
struct UpdateReady {
  int param_id;
  Direction direction;
  friend bool operator==(const UpdateReady&, const UpdateReady&) = default;
};
struct SnapPending { friend bool operator==(const SnapPending&, const SnapPending&) = default; };
struct TaskTimed {
  Task task;
  std::optional<double> duration_s;
  friend bool operator==(const TaskTimed&, const TaskTimed&) = default;
};
struct SnapTimed {
  std::optional<double> duration_s;
  friend bool operator==(const SnapTimed&, const SnapTimed&) = default;
};
}  // namespace fsm

using FsmState = std::variant<fsm::Idle, fsm::GotStop, fsm::GotContd, fsm::TaskPending,
                              fsm::ExecPending, fsm::ExecReady, fsm::UpdatePending,
                              fsm::UpdateDir, fsm::UpdateReady, fsm::SnapPending,
                              fsm::TaskTimed, fsm::SnapTimed>;

// "IDLE", "TASK_PENDING", ... (no payload)
std::string_view state_name(const FsmState& s);
// Name plus payload, e.g. "TASK_TIMED(hover, 50s)".
std::string to_string(const FsmState& s);

struct FsmResult {
  FsmState state;
  std::optional<Instruction> instruction;
};

// Total over (state, token): tokens without a rule leave the state unchanged.
FsmResult fsm_step(const FsmState& state, const LanguageToken& committed);

// ---------------------------------------------------------------------------
// Debounce

struct DebounceFilter {
  std::optional<LanguageToken> candidate;
  int run_length = 0;
  int threshold = 15;
  std::optional<LanguageToken> last_committed;
  bool armed = true;
  std::optional<FrameIndex> last_frame;

  static DebounceFilter with_threshold(int threshold);
  friend bool operator==(const DebounceFilter&, const DebounceFilter&) = default;
};

struct DebounceResult {
  DebounceFilter filter;
  std::optional<LanguageToken> committed;
};

// Throws Error(kStreamOrder) if obs.frame_index does not exceed the last one.
DebounceResult debounce_step(const DebounceFilter& filter, const TokenObservation& obs);

// ---------------------------------------------------------------------------
// Streaming decoder

struct TokenCommitted {
  LanguageToken token;
  friend bool operator==(const TokenCommitted&, const TokenCommitted&) = default;
};
struct InstructionEmitted {
  Instruction instruction;
  friend bool operator==(const InstructionEmitted&, const InstructionEmitted&) = default;
};
struct StateChanged {
  FsmState from;
  FsmState to;
  friend bool operator==(const StateChanged&, const StateChanged&) = default;
};

struct DecodeEvent {
  FrameIndex frame_index = 0;
  std::variant<TokenCommitted, InstructionEmitted, StateChanged> body;
  friend bool operator==(const DecodeEvent&, const DecodeEvent&) = default;
};

struct DecoderState {
  DebounceFilter filter;
  FsmState fsm = fsm::Idle{};
  friend bool operator==(const DecoderState&, const DecoderState&) = default;
};

class Decoder {
 public:
  explicit Decoder(int debounce_frames = 15);
  explicit Decoder(const VocabularyConfig& cfg) : Decoder(cfg.debounce_frames) {}

  // Events fired by this observation, in order: commit, state change, emission.
  std::vector<DecodeEvent> step(const TokenObservation& obs);

  const DecoderState& state() const { return state_; }

 private:
  DecoderState state_;
};

struct DecodeResult {
  std::vector<Instruction> instructions;
  std::vector<DecodeEvent> events;
};

DecodeResult decode_stream(const VocabularyConfig& cfg, std::span<const TokenObservation> stream);

}  // namespace gestlang
