#include "gestlang/executor.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "gestlang/codec.hpp"
#include "gestlang/errors.hpp"

namespace gestlang {
namespace {

using nlohmann::json;

// Mission times are sums of frame periods; compare with a little slack.
constexpr double kTimeEps = 1e-9;

std::optional<int> current_program(const RobotMode& mode) {
  if (auto* p = std::get_if<ExecutingProgram>(&mode)) return p->program_id;
  return std::get<AtomicTask>(mode).resume_program;
}

Vec3 velocity(Task task, double speed) {
  switch (task) {
    case Task::kMoveLeft: return {-speed, 0.0, 0.0};
    case Task::kMoveRight: return {speed, 0.0, 0.0};
    case Task::kMoveUp: return {0.0, 0.0, speed};
    case Task::kMoveDown: return {0.0, 0.0, -speed};
    case Task::kHover:
    case Task::kFollow: return {};
  }
  return {};
}

std::string snapshot_path(int sequence) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "snapshots/shot_%06d.png", sequence);
  return buf;
}

json optional_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }
json optional_json(const std::optional<int>& v) { return v ? json(*v) : json(nullptr); }

}  // namespace

RobotState initial_robot_state(const VocabularyConfig& cfg, int program_id) {
  RobotState s;
  s.programs = cfg.programs;
  s.parameters = cfg.parameters;
  s.snapshot_period_s = cfg.snapshot_period_s;
  if (!s.programs.contains(program_id)) {
    throw Error(ErrorKind::kUnknownId, "unknown program id " + std::to_string(program_id));
  }
  s.mode = ExecutingProgram{program_id};
  return s;
}

RobotState apply_instruction(const RobotState& state, const Instruction& ins) {
  RobotState s = state;
  const double now = s.mission_time_s;
  std::visit(
      [&](const auto& v) {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, TaskSwitch>) {
          AtomicTask task{v.task, std::nullopt, current_program(s.mode)};
          if (v.duration_s) task.deadline = now + *v.duration_s;
          s.mode = task;
        } else if constexpr (std::is_same_v<T, ExecuteProgram>) {
          if (!s.programs.contains(v.program_id)) {
            throw Error(ErrorKind::kUnknownId, "unknown program id " + std::to_string(v.program_id));
          }
          s.mode = ExecutingProgram{v.program_id};
        } else if constexpr (std::is_same_v<T, ParamUpdate>) {
          auto it = s.parameters.find(v.param_id);
          if (it == s.parameters.end()) {
            throw Error(ErrorKind::kUnknownId, "unknown parameter id " + std::to_string(v.param_id));
          }
          auto& p = it->second;
          if (v.direction == Direction::kIncrease) {
            if (p.index + 1 < p.values.size()) ++p.index;
          } else if (p.index > 0) {
            --p.index;
          }
        } else {
          s.snapshot_window_start = now;
          s.snapshot_next_due = now;
          s.snapshots_in_window = 0;
          s.snapshot_until.reset();
          if (v.duration_s) s.snapshot_until = now + *v.duration_s;
        }
      },
      ins);
  return s;
}

TickResult tick(const RobotState& state, double dt) {
  if (!(dt > 0.0)) throw Error(ErrorKind::kInvalidArgument, "tick requires dt > 0");
  TickResult r{state, {}};
  auto& s = r.state;
  const double t0 = s.mission_time_s;
  const double t1 = t0 + dt;
  std::vector<std::pair<double, Effect>> timed;

  if (auto* task = std::get_if<AtomicTask>(&s.mode)) {
    const double end = task->deadline ? std::clamp(*task->deadline, t0, t1) : t1;
    const Vec3 v = velocity(task->task, s.move_speed_mps);
    s.position.x += v.x * (end - t0);
    s.position.y += v.y * (end - t0);
    s.position.z += v.z * (end - t0);
    if (task->deadline && *task->deadline <= t1 + kTimeEps) {
      TaskExpired ev{*task->deadline, task->task, task->resume_program};
      if (task->resume_program) {
        s.mode = ExecutingProgram{*task->resume_program};
      } else {
        s.mode = AtomicTask{Task::kHover, std::nullopt, std::nullopt};
      }
      timed.emplace_back(ev.time, ev);
    }
  }

  // A shot is taken at the start of every full period inside the window.
  const double period = s.snapshot_period_s;
  auto window_has_room = [&] {
    return !s.snapshot_until || *s.snapshot_next_due + period <= *s.snapshot_until + kTimeEps;
  };
  while (s.snapshot_next_due && *s.snapshot_next_due <= t1 + kTimeEps && window_has_room()) {
    ++s.snapshots_in_window;
    ++s.snapshots_total;
    SnapshotFired shot{*s.snapshot_next_due, s.snapshots_total, snapshot_path(s.snapshots_total)};
    timed.emplace_back(shot.time, shot);
    s.snapshot_next_due = s.snapshot_window_start + s.snapshots_in_window * period;
  }
  if (s.snapshot_next_due && !window_has_room()) {
    s.snapshot_next_due.reset();
    s.snapshot_until.reset();
  }

  s.mission_time_s = t1;
  std::stable_sort(timed.begin(), timed.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  for (auto& [_, e] : timed) r.effects.push_back(std::move(e));
  return r;
}

std::optional<int> remaining_snapshots(const RobotState& s) {
  if (!s.snapshot_next_due) return 0;
  if (!s.snapshot_until) return std::nullopt;
  const double span = *s.snapshot_until - s.snapshot_window_start;
  const int total = static_cast<int>(std::floor(span / s.snapshot_period_s + kTimeEps));
  return std::max(0, total - s.snapshots_in_window);
}

std::string snapshot_schedule_report(const RobotState& s) {
  if (!s.snapshot_next_due) return "no snapshots scheduled";
  std::ostringstream os;
  os << "snapshots every " << s.snapshot_period_s << " s";
  if (!s.snapshot_until) {
    os << " until further notice";
  } else {
    os << " until t=" << *s.snapshot_until << " s, " << *remaining_snapshots(s) << " remaining";
  }
  os << " (next at t=" << *s.snapshot_next_due << " s)";
  return os.str();
}

json to_json(const RobotState& s) {
  json j;
  if (auto* p = std::get_if<ExecutingProgram>(&s.mode)) {
    j["mode"] = {{"type", "executing_program"}, {"program_id", p->program_id}};
    if (auto it = s.programs.find(p->program_id); it != s.programs.end()) j["mode"]["program"] = it->second;
  } else {
    const auto& a = std::get<AtomicTask>(s.mode);
    j["mode"] = {{"type", "atomic_task"},
                 {"task", std::string(to_string(a.task))},
                 {"deadline", optional_json(a.deadline)},
                 {"resume_program", optional_json(a.resume_program)}};
  }
  json params = json::object();
  for (const auto& [id, p] : s.parameters) {
    params[std::to_string(id)] = {{"name", p.name}, {"index", p.index}, {"value", p.values.at(p.index)}};
  }
  j["parameters"] = params;
  auto remaining = remaining_snapshots(s);
  j["snapshot"] = {{"active", s.snapshot_next_due.has_value()},
                   {"until", optional_json(s.snapshot_until)},
                   {"next_due", optional_json(s.snapshot_next_due)},
                   {"period_s", s.snapshot_period_s},
                   {"remaining", optional_json(remaining)},
                   {"taken", s.snapshots_total}};
  j["mission_time_s"] = s.mission_time_s;
  j["position"] = {s.position.x, s.position.y, s.position.z};
  return j;
}

json to_json(const Effect& effect) {
  if (auto* shot = std::get_if<SnapshotFired>(&effect)) {
    return {{"effect", "snapshot_fired"}, {"time", shot->time}, {"sequence", shot->sequence},
            {"image_path", shot->image_path}};
  }
  const auto& ex = std::get<TaskExpired>(effect);
  return {{"effect", "task_expired"}, {"time", ex.time}, {"task", std::string(to_string(ex.task))},
          {"resumed_program", optional_json(ex.resumed_program)}};
}

json to_json(const MissionRecord& rec) {
  json j{{"time", rec.time}};
  std::visit(
      [&](const auto& b) {
        using T = std::decay_t<decltype(b)>;
        if constexpr (std::is_same_v<T, InstructionApplied>) {
          j["record"] = "instruction_applied";
          j["instruction"] = to_json(b.instruction);
        } else if constexpr (std::is_same_v<T, SnapshotFired>) {
          j["record"] = "snapshot_fired";
          j["sequence"] = b.sequence;
          j["image_path"] = b.image_path;
        } else if constexpr (std::is_same_v<T, TaskExpired>) {
          j["record"] = "task_expired";
          j["task"] = std::string(to_string(b.task));
          j["resumed_program"] = optional_json(b.resumed_program);
        } else {
          j["record"] = "parameter_changed";
          j["param_id"] = b.param_id;
          j["old_index"] = b.old_index;
          j["new_index"] = b.new_index;
        }
      },
      rec.body);
  return j;
}

void Mission::apply(const Instruction& ins) {
  RobotState next = apply_instruction(state_, ins);
  const double now = state_.mission_time_s;
  log_.push_back({now, InstructionApplied{ins}});
  if (auto* upd = std::get_if<ParamUpdate>(&ins)) {
    log_.push_back({now, ParameterChanged{upd->param_id, state_.parameters.at(upd->param_id).index,
                                          next.parameters.at(upd->param_id).index}});
  }
  state_ = std::move(next);
}

std::vector<Effect> Mission::tick(double dt) {
  auto [next, effects] = gestlang::tick(state_, dt);
  state_ = std::move(next);
  for (const auto& e : effects) {
    std::visit([&](const auto& v) { log_.push_back({v.time, v}); }, e);
  }
  return effects;
}

void Mission::write_log(const std::filesystem::path& path) const {
  std::vector<json> lines;
  lines.reserve(log_.size());
  for (const auto& r : log_) lines.push_back(to_json(r));
  write_json_lines(path, lines);
}

}  // namespace gestlang
