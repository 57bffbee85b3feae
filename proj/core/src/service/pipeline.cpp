#include "gestlang/service/pipeline.hpp"

#include "gestlang/errors.hpp"
#include "gestlang/vision/synthetic.hpp"

namespace gestlang::service {

std::string_view to_string(ClassifierChoice c) { return c == ClassifierChoice::kCnn ? "cnn" : "contour"; }

std::optional<ClassifierChoice> parse_classifier(std::string_view s) {
  if (s == "cnn") return ClassifierChoice::kCnn;
  if (s == "contour") return ClassifierChoice::kContour;
  return std::nullopt;
}

ServiceResources default_resources() {
  ServiceResources r;
  r.bank = std::make_shared<const vision::ContourBank>(vision::build_contour_bank(r.region));
  return r;
}

nlohmann::json to_json(const ServiceMessage& m) {
  return {{"type", m.type},
          {"session_id", m.session_id},
          {"frame_index", m.frame_index ? nlohmann::json(*m.frame_index) : nlohmann::json(nullptr)},
          {"payload", m.payload}};
}

struct PipelineService::Session {
  std::string id;
  VocabularyConfig config;
  ClassifierChoice choice;
  std::chrono::system_clock::time_point created_at;
  Decoder decoder;
  Mission mission;
  std::optional<classify::FrameRecognizer> recognizer;
  std::optional<FrameIndex> last_frame;
  std::vector<Instruction> emitted;
  long gestures = 0;
  long gestures_correct = 0;
  std::mutex mutex;

  Session(std::string id_, VocabularyConfig cfg, ClassifierChoice c)
      : id(std::move(id_)),
        config(std::move(cfg)),
        choice(c),
        created_at(std::chrono::system_clock::now()),
        decoder(config),
        mission(initial_robot_state(config)) {}

  void check_order(FrameIndex f) const {
    if (last_frame && f <= *last_frame) {
      throw Error(ErrorKind::kStreamOrder, "frame " + std::to_string(f) + " does not follow frame " +
                                               std::to_string(*last_frame));
    }
  }

  // Decode one observation, apply any instruction, then advance mission time
  // by one frame period.
  void process(const TokenObservation& obs, const std::optional<std::optional<LanguageToken>>& truth,
               std::vector<ServiceMessage>& out) {
    auto msg = [&](std::string type, nlohmann::json payload) {
      out.push_back({std::move(type), id, obs.frame_index, std::move(payload)});
    };
    if (truth) {
      ++gestures;
      if (*truth == obs.token) ++gestures_correct;
    }
    const auto events = decoder.step(obs);
    last_frame = obs.frame_index;

    std::optional<Instruction> emitted_now;
    for (const auto& ev : events) {
      if (const auto* c = std::get_if<TokenCommitted>(&ev.body)) {
        msg("token_committed", {{"token", to_string(c->token)}});
      } else if (const auto* e = std::get_if<InstructionEmitted>(&ev.body)) {
        emitted_now = e->instruction;
      }
    }

    const auto& st = decoder.state();
    nlohmann::json update{{"fsm_state", gestlang::to_json(st.fsm)},
                          {"observed", obs.token ? nlohmann::json(to_string(*obs.token)) : nlohmann::json(nullptr)},
                          {"candidate", st.filter.candidate ? nlohmann::json(to_string(*st.filter.candidate))
                                                            : nlohmann::json(nullptr)},
                          {"run_length", st.filter.run_length},
                          {"threshold", st.filter.threshold},
                          {"confidence", obs.confidence}};
    msg("state_update", std::move(update));

    bool applied = false;
    if (emitted_now) {
      emitted.push_back(*emitted_now);
      msg("instruction_emitted", {{"instruction", to_json(*emitted_now)}});
      try {
        mission.apply(*emitted_now);
        applied = true;
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::kUnknownId) throw;
        msg("error", {{"kind", std::string(gestlang::to_string(e.kind()))}, {"message", e.what()}});
      }
    }
    const auto effects = mission.tick(config.frame_period_s);
    if (applied || !effects.empty()) {
      nlohmann::json fx = nlohmann::json::array();
      for (const auto& e : effects) fx.push_back(to_json(e));
      nlohmann::json payload{{"state", to_json(mission.state())},
                             {"effects", std::move(fx)},
                             {"snapshot_schedule", snapshot_schedule_report(mission.state())}};
      if (applied) payload["instruction"] = to_json(*emitted_now);
      msg("robot_state", std::move(payload));
    }
  }
};

PipelineService::PipelineService(ServiceResources resources) : resources_(std::move(resources)) {
  if (!resources_.bank || resources_.bank->empty()) {
    throw Error(ErrorKind::kInvalidArgument, "service needs a contour bank");
  }
}

PipelineService::~PipelineService() = default;

CreateSessionResult PipelineService::create_session(const VocabularyConfig& config, ClassifierChoice classifier) {
  CreateSessionResult result;
  result.violations = validate_config(config);
  if (!result.violations.empty()) return result;
  if (classifier == ClassifierChoice::kCnn && !resources_.cnn) {
    throw Error(ErrorKind::kModelConfig, "no CNN weights loaded; use the contour classifier");
  }

  std::shared_ptr<const classify::GestureClassifier> clf;
  if (classifier == ClassifierChoice::kCnn) {
    clf = std::make_shared<classify::CnnClassifier>(resources_.cnn);
  } else {
    clf = std::make_shared<classify::ContourClassifier>();
  }

  std::lock_guard lock(mutex_);
  const std::string id = "s" + std::to_string(next_id_++);
  auto session = std::make_shared<Session>(id, config, classifier);
  session->recognizer.emplace(clf, resources_.bank, resources_.region);
  sessions_.emplace(id, session);
  result.session_id = id;
  return result;
}

bool PipelineService::close_session(const std::string& id) {
  std::lock_guard lock(mutex_);
  return sessions_.erase(id) > 0;
}

std::vector<std::string> PipelineService::session_ids() const {
  std::lock_guard lock(mutex_);
  std::vector<std::string> out;
  for (const auto& [id, s] : sessions_) out.push_back(id);
  return out;
}

std::shared_ptr<PipelineService::Session> PipelineService::find(const std::string& id) const {
  std::lock_guard lock(mutex_);
  auto it = sessions_.find(id);
  if (it == sessions_.end()) throw Error(ErrorKind::kUnknownSession, "unknown session " + id);
  return it->second;
}

std::vector<ServiceMessage> PipelineService::ingest_tokens(const std::string& id,
                                                           std::span<const TokenInput> inputs) {
  auto s = find(id);
  std::lock_guard lock(s->mutex);
  // Validate the whole batch first so a bad index rejects it without side effects.
  std::optional<FrameIndex> prev = s->last_frame;
  for (const auto& in : inputs) {
    if (prev && in.observation.frame_index <= *prev) {
      throw Error(ErrorKind::kStreamOrder, "frame " + std::to_string(in.observation.frame_index) +
                                               " does not follow frame " + std::to_string(*prev));
    }
    prev = in.observation.frame_index;
  }
  std::vector<ServiceMessage> out;
  for (const auto& in : inputs) s->process(in.observation, in.truth, out);
  return out;
}

std::vector<ServiceMessage> PipelineService::ingest_frame(const std::string& id, FrameIndex frame_index,
                                                          const vision::FrameRaster& frame,
                                                          std::optional<std::optional<LanguageToken>> truth) {
  auto s = find(id);
  std::lock_guard lock(s->mutex);
  s->check_order(frame_index);
  const auto seen = s->recognizer->observe(frame_index, frame);
  const auto obs = to_token_observation(s->config, seen.observation);
  std::vector<ServiceMessage> out;
  s->process(obs, truth, out);
  // Region boxes ride on the state update so clients can draw them.
  for (auto& m : out) {
    if (m.type != "state_update") continue;
    auto box = [](const std::optional<vision::RegionBox>& b) {
      if (!b) return nlohmann::json(nullptr);
      return nlohmann::json{{"x", b->box.x}, {"y", b->box.y}, {"w", b->box.w}, {"h", b->box.h}, {"score", b->score}};
    };
    m.payload["left_box"] = box(seen.left_box);
    m.payload["right_box"] = box(seen.right_box);
    m.payload["pair"] = to_json(seen.observation);
  }
  return out;
}

MetricsReport PipelineService::metrics_report(const std::string& id,
                                              const std::optional<std::vector<Instruction>>& expected) const {
  auto s = find(id);
  std::lock_guard lock(s->mutex);
  return evaluate_session(expected, s->emitted, s->gestures, s->gestures_correct);
}

std::vector<Instruction> PipelineService::emitted_instructions(const std::string& id) const {
  auto s = find(id);
  std::lock_guard lock(s->mutex);
  return s->emitted;
}

RobotState PipelineService::robot_state(const std::string& id) const {
  auto s = find(id);
  std::lock_guard lock(s->mutex);
  return s->mission.state();
}

FsmState PipelineService::fsm_state(const std::string& id) const {
  auto s = find(id);
  std::lock_guard lock(s->mutex);
  return s->decoder.state().fsm;
}

VocabularyConfig PipelineService::config(const std::string& id) const { return find(id)->config; }

ClassifierChoice PipelineService::classifier(const std::string& id) const { return find(id)->choice; }

}  // namespace gestlang::service
