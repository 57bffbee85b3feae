#pragma once

#include <chrono>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "gestlang/classify/classifier.hpp"
#include "gestlang/codec.hpp"
#include "gestlang/decoder.hpp"
#include "gestlang/executor.hpp"
#include "gestlang/service/metrics.hpp"

namespace gestlang::service {

enum class ClassifierChoice { kCnn, kContour };

std::string_view to_string(ClassifierChoice c);
std::optional<ClassifierChoice> parse_classifier(std::string_view s);

// Read-only state shared by every session.
struct ServiceResources {
  std::shared_ptr<const vision::ContourBank> bank;
  std::shared_ptr<const classify::CnnModel> cnn;  // may be null; CNN sessions are then refused
  vision::RegionOptions region;
};

// Bank built from the default region options, no CNN.
ServiceResources default_resources();

// One outbound message. Types: token_committed, state_update,
// instruction_emitted, robot_state, error.
struct ServiceMessage {
  std::string type;
  std::string session_id;
  std::optional<FrameIndex> frame_index;
  nlohmann::json payload;

  friend bool operator==(const ServiceMessage&, const ServiceMessage&) = default;
};

nlohmann::json to_json(const ServiceMessage& m);

// A pre-classified frame. `truth` is set when the ground-truth token for the
// frame is known (an engaged empty optional means "no hands").
struct TokenInput {
  TokenObservation observation;
  std::optional<std::optional<LanguageToken>> truth;
};

struct CreateSessionResult {
  std::optional<std::string> session_id;
  std::vector<Violation> violations;  // non-empty when the config was rejected
};

class PipelineService {
 public:
  explicit PipelineService(ServiceResources resources);
  ~PipelineService();

  CreateSessionResult create_session(const VocabularyConfig& config, ClassifierChoice classifier);
  bool close_session(const std::string& id);
  std::vector<std::string> session_ids() const;

  // Throw Error(kUnknownSession) or Error(kStreamOrder); a rejected input
  // leaves the session untouched.
  std::vector<ServiceMessage> ingest_tokens(const std::string& id, std::span<const TokenInput> inputs);
  std::vector<ServiceMessage> ingest_frame(const std::string& id, FrameIndex frame_index,
                                           const vision::FrameRaster& frame,
                                           std::optional<std::optional<LanguageToken>> truth = std::nullopt);

  MetricsReport metrics_report(const std::string& id,
                               const std::optional<std::vector<Instruction>>& expected) const;

  std::vector<Instruction> emitted_instructions(const std::string& id) const;
  RobotState robot_state(const std::string& id) const;
  FsmState fsm_state(const std::string& id) const;
  VocabularyConfig config(const std::string& id) const;
  ClassifierChoice classifier(const std::string& id) const;

 private:
  struct Session;
  std::shared_ptr<Session> find(const std::string& id) const;

  ServiceResources resources_;
  mutable std::mutex mutex_;
  std::map<std::string, std::shared_ptr<Session>> sessions_;
  std::uint64_t next_id_ = 1;
};

}  // namespace gestlang::service
