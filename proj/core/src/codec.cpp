#include "gestlang/codec.hpp"

#include <fstream>

#include "gestlang/errors.hpp"

namespace gestlang {
namespace {

using nlohmann::json;

[[noreturn]] void format_error(const std::string& what) { throw Error(ErrorKind::kFormat, what); }

GestureClass gesture_field(const json& j, const char* key) {
  if (!j.at(key).is_string()) format_error(std::string(key) + " must be a gesture name or null");
  auto g = parse_gesture(j.at(key).get<std::string>());
  if (!g) format_error("unknown gesture '" + j.at(key).get<std::string>() + "'");
  return *g;
}

json duration_json(const std::optional<double>& d) { return d ? json(*d) : json(nullptr); }

std::optional<double> duration_field(const json& j) {
  if (!j.contains("duration_s") || j["duration_s"].is_null()) return std::nullopt;
  if (!j["duration_s"].is_number()) format_error("duration_s must be a number or null");
  return j["duration_s"].get<double>();
}

}  // namespace

TokenObservation to_token_observation(const VocabularyConfig& cfg, const PairObservation& obs) {
  TokenObservation t{obs.frame_index, std::nullopt, obs.confidence};
  if (obs.pair) t.token = map_pair(cfg, *obs.pair);
  return t;
}

std::vector<TokenObservation> to_token_observations(const VocabularyConfig& cfg,
                                                    std::span<const PairObservation> stream) {
  std::vector<TokenObservation> out;
  out.reserve(stream.size());
  for (const auto& o : stream) out.push_back(to_token_observation(cfg, o));
  return out;
}

json to_json(const PairObservation& obs) {
  json j;
  j["frame_index"] = obs.frame_index;
  j["left_gesture"] = obs.pair ? json(std::string(to_string(obs.pair->left))) : json(nullptr);
  j["right_gesture"] = obs.pair ? json(std::string(to_string(obs.pair->right))) : json(nullptr);
  j["confidence"] = obs.confidence;
  return j;
}

PairObservation pair_observation_from_json(const json& j) {
  try {
    PairObservation o;
    o.frame_index = j.at("frame_index").get<FrameIndex>();
    const bool left_null = j.at("left_gesture").is_null();
    const bool right_null = j.at("right_gesture").is_null();
    if (left_null != right_null) format_error("left_gesture and right_gesture must both be null or both set");
    if (!left_null) o.pair = GesturePair{gesture_field(j, "left_gesture"), gesture_field(j, "right_gesture")};
    o.confidence = j.value("confidence", 1.0);
    if (!(o.confidence >= 0.0 && o.confidence <= 1.0)) format_error("confidence must lie in [0,1]");
    return o;
  } catch (const json::exception& e) {
    format_error(std::string("bad token observation: ") + e.what());
  }
}

json to_json(const Instruction& ins) {
  return std::visit(
      [](const auto& v) -> json {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, TaskSwitch>) {
          return {{"type", "task_switch"}, {"task", std::string(to_string(v.task))},
                  {"duration_s", duration_json(v.duration_s)}};
        } else if constexpr (std::is_same_v<T, ExecuteProgram>) {
          return {{"type", "execute_program"}, {"program_id", v.program_id}};
        } else if constexpr (std::is_same_v<T, ParamUpdate>) {
          return {{"type", "param_update"}, {"param_id", v.param_id},
                  {"direction", std::string(to_string(v.direction))}};
        } else {
          return {{"type", "snapshot"}, {"duration_s", duration_json(v.duration_s)}};
        }
      },
      ins);
}

Instruction instruction_from_json(const json& j) {
  try {
    const auto type = j.at("type").get<std::string>();
    if (type == "task_switch") {
      auto task = parse_task(j.at("task").get<std::string>());
      if (!task) format_error("unknown task '" + j.at("task").get<std::string>() + "'");
      return TaskSwitch{*task, duration_field(j)};
    }
    if (type == "execute_program") return ExecuteProgram{j.at("program_id").get<int>()};
    if (type == "param_update") {
      const auto dir = j.at("direction").get<std::string>();
      if (dir != "increase" && dir != "decrease") format_error("unknown direction '" + dir + "'");
      return ParamUpdate{j.at("param_id").get<int>(),
                         dir == "increase" ? Direction::kIncrease : Direction::kDecrease};
    }
    if (type == "snapshot") return Snapshot{duration_field(j)};
    format_error("unknown instruction type '" + type + "'");
  } catch (const json::exception& e) {
    format_error(std::string("bad instruction: ") + e.what());
  }
}

json to_json(const FsmState& s) {
  json j{{"name", std::string(state_name(s))}};
  std::visit(
      [&](const auto& v) {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, fsm::TaskPending>) {
          j["task"] = std::string(to_string(v.task));
        } else if constexpr (std::is_same_v<T, fsm::TaskTimed>) {
          j["task"] = std::string(to_string(v.task));
          j["duration_s"] = duration_json(v.duration_s);
        } else if constexpr (std::is_same_v<T, fsm::SnapTimed>) {
          j["duration_s"] = duration_json(v.duration_s);
        } else if constexpr (std::is_same_v<T, fsm::ExecReady>) {
          j["program_id"] = v.program_id;
        } else if constexpr (std::is_same_v<T, fsm::UpdateDir>) {
          j["param_id"] = v.param_id;
        } else if constexpr (std::is_same_v<T, fsm::UpdateReady>) {
          j["param_id"] = v.param_id;
          j["direction"] = std::string(to_string(v.direction));
        }
      },
      s);
  return j;
}

json to_json(const DecodeEvent& ev) {
  json j{{"frame_index", ev.frame_index}};
  std::visit(
      [&](const auto& b) {
        using T = std::decay_t<decltype(b)>;
        if constexpr (std::is_same_v<T, TokenCommitted>) {
          j["event"] = "token_committed";
          j["token"] = to_string(b.token);
        } else if constexpr (std::is_same_v<T, InstructionEmitted>) {
          j["event"] = "instruction_emitted";
          j["instruction"] = to_json(b.instruction);
        } else {
          j["event"] = "state_changed";
          j["from"] = to_json(b.from);
          j["to"] = to_json(b.to);
        }
      },
      ev.body);
  return j;
}

namespace {

// Calls fn(json, line_number) for each non-blank line. Failures from fn are
// rethrown as format errors naming the line.
template <typename Fn>
void for_each_json_line(const std::filesystem::path& path, Fn&& fn) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kIo, "cannot open " + path.string());
  std::string line;
  for (int lineno = 1; std::getline(in, line); ++lineno) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      fn(json::parse(line));
    } catch (const json::exception& e) {
      format_error(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
    } catch (const Error& e) {
      format_error(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
}

}  // namespace

std::vector<json> read_json_lines(const std::filesystem::path& path) {
  std::vector<json> out;
  for_each_json_line(path, [&](json j) { out.push_back(std::move(j)); });
  return out;
}

void write_json_lines(const std::filesystem::path& path, std::span<const json> lines) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::kIo, "cannot write " + path.string());
  for (const auto& j : lines) out << j.dump() << '\n';
  if (!out) throw Error(ErrorKind::kIo, "write failed for " + path.string());
}

std::vector<PairObservation> read_token_stream(const std::filesystem::path& path) {
  std::vector<PairObservation> out;
  for_each_json_line(path, [&](const json& j) { out.push_back(pair_observation_from_json(j)); });
  return out;
}

void write_token_stream(const std::filesystem::path& path, std::span<const PairObservation> stream) {
  std::vector<json> lines;
  lines.reserve(stream.size());
  for (const auto& o : stream) lines.push_back(to_json(o));
  write_json_lines(path, lines);
}

std::vector<LoggedInstruction> read_instruction_log(const std::filesystem::path& path) {
  std::vector<LoggedInstruction> out;
  for_each_json_line(path, [&](const json& j) {
    out.push_back({j.at("frame_index").get<FrameIndex>(), instruction_from_json(j.at("instruction"))});
  });
  return out;
}

void write_instruction_log(const std::filesystem::path& path, std::span<const LoggedInstruction> log) {
  std::vector<json> lines;
  for (const auto& l : log) {
    lines.push_back({{"frame_index", l.frame_index}, {"instruction", to_json(l.instruction)}});
  }
  write_json_lines(path, lines);
}

std::vector<LoggedInstruction> instruction_log(std::span<const DecodeEvent> events) {
  std::vector<LoggedInstruction> out;
  for (const auto& ev : events) {
    if (auto* e = std::get_if<InstructionEmitted>(&ev.body)) out.push_back({ev.frame_index, e->instruction});
  }
  return out;
}

}  // namespace gestlang
