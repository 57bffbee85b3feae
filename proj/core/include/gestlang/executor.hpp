#pragma once

#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "gestlang/decoder.hpp"
#include "gestlang/vocabulary.hpp"

namespace gestlang {

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
  friend bool operator==(const Vec3&, const Vec3&) = default;
};

struct ExecutingProgram {
  int program_id = 0;
  friend bool operator==(const ExecutingProgram&, const ExecutingProgram&) = default;
};

struct AtomicTask {
  Task task = Task::kHover;
  std::optional<double> deadline;       // mission time; absent = until told otherwise
  std::optional<int> resume_program;    // program restored when the deadline passes
  friend bool operator==(const AtomicTask&, const AtomicTask&) = default;
};

using RobotMode = std::variant<ExecutingProgram, AtomicTask>;

struct RobotState {
  RobotMode mode = ExecutingProgram{0};
  std::map<int, std::string> programs;
  std::map<int, ParameterSpec> parameters;

  std::optional<double> snapshot_until;     // absent with next_due set = indefinite window
  std::optional<double> snapshot_next_due;  // absent = no window
  double snapshot_window_start = 0.0;
  int snapshots_in_window = 0;
  int snapshots_total = 0;
  double snapshot_period_s = 1.0;

  double mission_time_s = 0.0;
  Vec3 position;
  double move_speed_mps = 0.5;

  friend bool operator==(const RobotState&, const RobotState&) = default;
};

RobotState initial_robot_state(const VocabularyConfig& cfg, int program_id = 0);

// Throws Error(kUnknownId) for program/parameter ids missing from the state.
RobotState apply_instruction(const RobotState& state, const Instruction& ins);

struct SnapshotFired {
  double time = 0.0;
  int sequence = 0;
  std::string image_path;
  friend bool operator==(const SnapshotFired&, const SnapshotFired&) = default;
};

struct TaskExpired {
  double time = 0.0;
  Task task = Task::kHover;
  std::optional<int> resumed_program;
  friend bool operator==(const TaskExpired&, const TaskExpired&) = default;
};

using Effect = std::variant<SnapshotFired, TaskExpired>;

struct TickResult {
  RobotState state;
  std::vector<Effect> effects;  // chronological
};

// Requires dt > 0 (Error(kInvalidArgument) otherwise).
TickResult tick(const RobotState& state, double dt);

// Shots still to be taken in a timed window; nullopt for an indefinite window.
std::optional<int> remaining_snapshots(const RobotState& state);
std::string snapshot_schedule_report(const RobotState& state);

nlohmann::json to_json(const RobotState& state);
nlohmann::json to_json(const Effect& effect);

// ---------------------------------------------------------------------------

struct InstructionApplied {
  Instruction instruction;
  friend bool operator==(const InstructionApplied&, const InstructionApplied&) = default;
};

struct ParameterChanged {
  int param_id = 0;
  std::size_t old_index = 0;
  std::size_t new_index = 0;
  friend bool operator==(const ParameterChanged&, const ParameterChanged&) = default;
};

struct MissionRecord {
  double time = 0.0;
  std::variant<InstructionApplied, SnapshotFired, TaskExpired, ParameterChanged> body;
  friend bool operator==(const MissionRecord&, const MissionRecord&) = default;
};

nlohmann::json to_json(const MissionRecord& rec);

// Owns a RobotState and an append-only log of everything applied to it.
class Mission {
 public:
  explicit Mission(RobotState initial) : state_(std::move(initial)) {}

  void apply(const Instruction& ins);
  std::vector<Effect> tick(double dt);

  const RobotState& state() const { return state_; }
  const std::vector<MissionRecord>& log() const { return log_; }

  // JSON-lines export.
  void write_log(const std::filesystem::path& path) const;

 private:
  RobotState state_;
  std::vector<MissionRecord> log_;
};

}  // namespace gestlang
