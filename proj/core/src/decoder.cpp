#include "gestlang/decoder.hpp"

#include <sstream>

#include "gestlang/errors.hpp"

namespace gestlang {
namespace {

template <class... Fs>
struct Overloaded : Fs... {
  using Fs::operator()...;
};
template <class... Fs>
Overloaded(Fs...) -> Overloaded<Fs...>;

std::string duration_text(const std::optional<double>& d) {
  if (!d) return "indefinite";
  std::ostringstream os;
  os << *d << "s";
  return os.str();
}

}  // namespace

std::string_view to_string(Direction d) {
  return d == Direction::kIncrease ? "increase" : "decrease";
}

std::optional<double> digit_duration(int digit) {
  if (digit <= 0) return std::nullopt;
  return 10.0 * digit;
}

std::string to_string(const Instruction& ins) {
  return std::visit(
      Overloaded{
          [](const TaskSwitch& t) {
            return "TaskSwitch{" + std::string(to_string(t.task)) + ", " + duration_text(t.duration_s) + "}";
          },
          [](const ExecuteProgram& e) { return "ExecuteProgram{" + std::to_string(e.program_id) + "}"; },
          [](const ParamUpdate& p) {
            return "ParamUpdate{" + std::to_string(p.param_id) + ", " + std::string(to_string(p.direction)) + "}";
          },
          [](const Snapshot& s) { return "Snapshot{" + duration_text(s.duration_s) + "}"; },
      },
      ins);
}

std::string_view state_name(const FsmState& s) {
  static constexpr std::string_view kNames[] = {
      "IDLE",         "GOT_STOP",   "GOT_CONTD",      "TASK_PENDING",
      "EXEC_PENDING", "EXEC_READY", "UPDATE_PENDING", "UPDATE_DIR",
      "UPDATE_READY", "SNAP_PENDING", "TASK_TIMED",   "SNAP_TIMED"};
  static_assert(std::size(kNames) == std::variant_size_v<FsmState>);
  return kNames[s.index()];
}

std::string to_string(const FsmState& s) {
  std::string name(state_name(s));
  auto payload = std::visit(
      Overloaded{
          [](const fsm::TaskPending& p) { return std::string(to_string(p.task)); },
          [](const fsm::ExecReady& p) { return std::to_string(p.program_id); },
          [](const fsm::UpdateDir& p) { return std::to_string(p.param_id); },
          [](const fsm::UpdateReady& p) {
            return std::to_string(p.param_id) + ", " + std::string(to_string(p.direction));
          },
          [](const fsm::TaskTimed& p) {
            return std::string(to_string(p.task)) + ", " + duration_text(p.duration_s);
          },
          [](const fsm::SnapTimed& p) { return duration_text(p.duration_s); },
          [](const auto&) { return std::string{}; },
      },
      s);
  return payload.empty() ? name : name + "(" + payload + ")";
}

FsmResult fsm_step(const FsmState& state, const LanguageToken& tok) {
  // Start sentinels restart assembly from any state.
  if (tok.kind == TokenKind::kStop) return {fsm::GotStop{}, std::nullopt};
  if (tok.kind == TokenKind::kContd) return {fsm::GotContd{}, std::nullopt};

  const bool go = tok.kind == TokenKind::kGo;
  FsmResult stay{state, std::nullopt};

  return std::visit(
      Overloaded{
          [&](const fsm::Idle&) { return stay; },
          [&](const fsm::GotStop&) -> FsmResult {
            if (auto task = task_for(tok.kind)) return {fsm::TaskPending{*task}, std::nullopt};
            if (tok.kind == TokenKind::kExecute) return {fsm::ExecPending{}, std::nullopt};
            return stay;
          },
          [&](const fsm::GotContd&) -> FsmResult {
            if (tok.kind == TokenKind::kUpdate) return {fsm::UpdatePending{}, std::nullopt};
            if (tok.kind == TokenKind::kSnapshot) return {fsm::SnapPending{}, std::nullopt};
            return stay;
          },
          [&](const fsm::TaskPending& s) -> FsmResult {
            if (tok.is_digit()) return {fsm::TaskTimed{s.task, digit_duration(tok.digit)}, std::nullopt};
            if (go) return {fsm::Idle{}, TaskSwitch{s.task, std::nullopt}};
            return stay;
          },
          [&](const fsm::TaskTimed& s) -> FsmResult {
            if (go) return {fsm::Idle{}, TaskSwitch{s.task, s.duration_s}};
            return stay;
          },
          [&](const fsm::ExecPending&) -> FsmResult {
            if (tok.is_digit()) return {fsm::ExecReady{tok.digit}, std::nullopt};
            return stay;
          },
          [&](const fsm::ExecReady& s) -> FsmResult {
            if (go) return {fsm::Idle{}, ExecuteProgram{s.program_id}};
            return stay;
          },
          [&](const fsm::UpdatePending&) -> FsmResult {
            if (tok.is_digit()) return {fsm::UpdateDir{tok.digit}, std::nullopt};
            return stay;
          },
          [&](const fsm::UpdateDir& s) -> FsmResult {
            if (tok.kind == TokenKind::kIncrease) {
              return {fsm::UpdateReady{s.param_id, Direction::kIncrease}, std::nullopt};
            }
            if (tok.kind == TokenKind::kDecrease) {
              return {fsm::UpdateReady{s.param_id, Direction::kDecrease}, std::nullopt};
            }
            return stay;
          },
          [&](const fsm::UpdateReady& s) -> FsmResult {
            if (go) return {fsm::Idle{}, ParamUpdate{s.param_id, s.direction}};
            return stay;
          },
          [&](const fsm::SnapPending&) -> FsmResult {
            if (tok.is_digit()) return {fsm::SnapTimed{digit_duration(tok.digit)}, std::nullopt};
            if (go) return {fsm::Idle{}, Snapshot{std::nullopt}};
            return stay;
          },
          [&](const fsm::SnapTimed& s) -> FsmResult {
            if (go) return {fsm::Idle{}, Snapshot{s.duration_s}};
            return stay;
          },
      },
      state);
}

DebounceFilter DebounceFilter::with_threshold(int threshold) {
  if (threshold <= 0) throw Error(ErrorKind::kInvalidArgument, "debounce threshold must be positive");
  DebounceFilter f;
  f.threshold = threshold;
  return f;
}

DebounceResult debounce_step(const DebounceFilter& filter, const TokenObservation& obs) {
  if (filter.last_frame && obs.frame_index <= *filter.last_frame) {
    throw Error(ErrorKind::kStreamOrder, "frame " + std::to_string(obs.frame_index) +
                                             " does not follow frame " + std::to_string(*filter.last_frame));
  }
  DebounceResult r{filter, std::nullopt};
  auto& f = r.filter;
  f.last_frame = obs.frame_index;

  if (!obs.token) {
    f.candidate.reset();
    f.run_length = 0;
    f.armed = true;
    return r;
  }
  if (obs.token != f.last_committed) f.armed = true;

  if (obs.token == f.candidate) {
    if (f.run_length < f.threshold) ++f.run_length;
  } else {
    f.candidate = obs.token;
    f.run_length = 1;
  }

  if (f.armed && f.run_length == f.threshold) {
    r.committed = f.candidate;
    f.last_committed = f.candidate;
    f.armed = false;
  }
  return r;
}

Decoder::Decoder(int debounce_frames) {
  state_.filter = DebounceFilter::with_threshold(debounce_frames);
}

std::vector<DecodeEvent> Decoder::step(const TokenObservation& obs) {
  std::vector<DecodeEvent> events;
  auto [filter, committed] = debounce_step(state_.filter, obs);
  state_.filter = std::move(filter);
  if (!committed) return events;

  events.push_back({obs.frame_index, TokenCommitted{*committed}});
  auto [next, instruction] = fsm_step(state_.fsm, *committed);
  if (next != state_.fsm) {
    events.push_back({obs.frame_index, StateChanged{state_.fsm, next}});
    state_.fsm = std::move(next);
  }
  if (instruction) events.push_back({obs.frame_index, InstructionEmitted{*instruction}});
  return events;
}

DecodeResult decode_stream(const VocabularyConfig& cfg, std::span<const TokenObservation> stream) {
  DecodeResult out;
  Decoder decoder(cfg);
  for (const auto& obs : stream) {
    for (auto& ev : decoder.step(obs)) {
      if (auto* e = std::get_if<InstructionEmitted>(&ev.body)) out.instructions.push_back(e->instruction);
      out.events.push_back(std::move(ev));
    }
  }
  return out;
}

}  // namespace gestlang
