#include "gestlang/service/protocol.hpp"

#include <algorithm>

#include "gestlang/config_io.hpp"
#include "gestlang/errors.hpp"
#include "gestlang/vision/image_io.hpp"

namespace gestlang::service {
namespace {

using nlohmann::json;

json envelope_value(const json& request, const char* key) {
  if (request.is_object() && request.contains(key)) return request[key];
  return nullptr;
}

std::optional<LanguageToken> token_field(const json& v) {
  if (v.is_null()) return std::nullopt;
  auto t = parse_token(v.get<std::string>());
  if (!t) throw Error(ErrorKind::kProtocol, "unknown token " + v.get<std::string>());
  return t;
}

TokenInput token_input(const VocabularyConfig& cfg, const json& o, std::optional<FrameIndex> fallback_frame) {
  TokenInput in;
  if (o.contains("frame_index")) {
    in.observation.frame_index = o.at("frame_index").get<FrameIndex>();
  } else if (fallback_frame) {
    in.observation.frame_index = *fallback_frame;
  } else {
    throw Error(ErrorKind::kProtocol, "observation without frame_index");
  }
  if (o.contains("left_gesture") || o.contains("right_gesture")) {
    json p = o;
    p["frame_index"] = in.observation.frame_index;
    in.observation = to_token_observation(cfg, pair_observation_from_json(p));
  } else if (o.contains("token")) {
    in.observation.token = token_field(o.at("token"));
    in.observation.confidence = o.value("confidence", 1.0);
  } else {
    throw Error(ErrorKind::kProtocol, "observation needs token or left_gesture/right_gesture");
  }
  if (o.contains("truth")) in.truth = token_field(o.at("truth"));
  return in;
}

std::vector<json> dispatch(PipelineService& service, const json& request) {
  if (!request.is_object()) throw Error(ErrorKind::kProtocol, "message must be a JSON object");
  if (!request.contains("type") || !request["type"].is_string()) {
    throw Error(ErrorKind::kProtocol, "message has no type");
  }
  const std::string type = request["type"];
  const json payload = request.contains("payload") && !request["payload"].is_null() ? request["payload"] : json::object();
  if (!payload.is_object()) throw Error(ErrorKind::kProtocol, "payload must be an object");
  auto session_id = [&]() -> std::string {
    const auto v = envelope_value(request, "session_id");
    if (!v.is_string()) throw Error(ErrorKind::kProtocol, type + " needs a session_id");
    return v.get<std::string>();
  };
  auto frame_index = [&]() -> std::optional<FrameIndex> {
    const auto v = envelope_value(request, "frame_index");
    if (v.is_null()) return std::nullopt;
    return v.get<FrameIndex>();
  };
  auto messages = [](const std::vector<ServiceMessage>& ms) {
    std::vector<json> out;
    for (const auto& m : ms) out.push_back(to_json(m));
    return out;
  };

  if (type == "hello") return {hello_message()};

  if (type == "create_session") {
    VocabularyConfig cfg = default_vocabulary();
    if (payload.contains("config") && !payload["config"].is_null()) {
      auto loaded = config_from_json(payload["config"]);
      if (!loaded.ok()) return {error_message("invalid-config", "config rejected", request, loaded.violations)};
      cfg = loaded.config;
    }
    const auto name = payload.value("classifier", std::string("contour"));
    const auto choice = parse_classifier(name);
    if (!choice) throw Error(ErrorKind::kProtocol, "unknown classifier " + name);
    auto created = service.create_session(cfg, *choice);
    if (!created.session_id) return {error_message("invalid-config", "config rejected", request, created.violations)};
    return {json{{"type", "create_session"},
                 {"session_id", *created.session_id},
                 {"frame_index", nullptr},
                 {"payload",
                  {{"classifier", to_string(*choice)},
                   {"fsm_state", gestlang::to_json(service.fsm_state(*created.session_id))},
                   {"threshold", cfg.debounce_frames},
                   {"frame_period_s", cfg.frame_period_s}}}}};
  }

  if (type == "ingest_tokens") {
    const auto id = session_id();
    const auto cfg = service.config(id);
    std::vector<TokenInput> inputs;
    if (payload.contains("observations")) {
      for (const auto& o : payload.at("observations")) inputs.push_back(token_input(cfg, o, std::nullopt));
    } else {
      inputs.push_back(token_input(cfg, payload, frame_index()));
    }
    return messages(service.ingest_tokens(id, inputs));
  }

  if (type == "ingest_frame") {
    const auto id = session_id();
    const auto f = frame_index();
    if (!f) throw Error(ErrorKind::kProtocol, "ingest_frame needs a frame_index");
    const auto bytes = vision::base64_decode(payload.at("png").get<std::string>());
    const auto frame = vision::decode_png(bytes);
    std::optional<std::optional<LanguageToken>> truth;
    if (payload.contains("truth")) truth = token_field(payload["truth"]);
    return messages(service.ingest_frame(id, *f, frame, truth));
  }

  if (type == "metrics") {
    const auto id = session_id();
    std::optional<std::vector<Instruction>> expected;
    if (payload.contains("expected") && !payload["expected"].is_null()) {
      expected.emplace();
      for (const auto& e : payload["expected"]) expected->push_back(instruction_from_json(e));
    }
    return {json{{"type", "metrics"},
                 {"session_id", id},
                 {"frame_index", nullptr},
                 {"payload", to_json(service.metrics_report(id, expected))}}};
  }

  if (std::find(std::begin(kServerTypes), std::end(kServerTypes), type) != std::end(kServerTypes)) {
    throw Error(ErrorKind::kProtocol, type + " is sent by the server only");
  }
  throw Error(ErrorKind::kProtocol, "unknown message type " + type);
}

}  // namespace

nlohmann::json hello_message() {
  return {{"type", "hello"},
          {"session_id", nullptr},
          {"frame_index", nullptr},
          {"payload",
           {{"protocol_version", kProtocolVersion},
            {"server", "gestlang"},
            {"client_types", kClientTypes},
            {"server_types", kServerTypes}}}};
}

nlohmann::json error_message(std::string_view kind, const std::string& message, const nlohmann::json& request,
                             const std::vector<Violation>& violations) {
  json payload{{"kind", kind}, {"message", message}};
  if (request.is_object() && request.contains("type") && request["type"].is_string()) {
    payload["request_type"] = request["type"];
  }
  if (!violations.empty()) {
    json vs = json::array();
    for (const auto& v : violations) vs.push_back({{"code", v.code}, {"key", v.key}, {"text", v.to_string()}});
    payload["violations"] = std::move(vs);
  }
  json sid = envelope_value(request, "session_id");
  json fi = envelope_value(request, "frame_index");
  return {{"type", "error"},
          {"session_id", sid.is_string() ? sid : json(nullptr)},
          {"frame_index", fi.is_number_integer() ? fi : json(nullptr)},
          {"payload", std::move(payload)}};
}

std::vector<nlohmann::json> handle_message(PipelineService& service, const nlohmann::json& request) {
  try {
    return dispatch(service, request);
  } catch (const Error& e) {
    return {error_message(to_string(e.kind()), e.what(), request)};
  } catch (const nlohmann::json::exception& e) {
    return {error_message("protocol", std::string("malformed message: ") + e.what(), request)};
  }
}

std::vector<nlohmann::json> handle_line(PipelineService& service, const std::string& line) {
  json request;
  try {
    request = json::parse(line);
  } catch (const json::parse_error& e) {
    return {error_message("protocol", std::string("invalid JSON: ") + e.what(), nullptr)};
  }
  return handle_message(service, request);
}

}  // namespace gestlang::service
