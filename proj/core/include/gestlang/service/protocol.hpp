#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "gestlang/service/pipeline.hpp"

namespace gestlang::service {

// Newline-delimited JSON; every message is
//   {"type": ..., "session_id": ..., "frame_index": ..., "payload": {...}}
inline constexpr int kProtocolVersion = 1;

// Types a client may send.
inline constexpr const char* kClientTypes[] = {"hello", "create_session", "ingest_tokens", "ingest_frame",
                                               "metrics"};
// Types only the server sends.
inline constexpr const char* kServerTypes[] = {"state_update", "token_committed", "instruction_emitted",
                                               "robot_state", "error"};

nlohmann::json hello_message();

nlohmann::json error_message(std::string_view kind, const std::string& message, const nlohmann::json& request,
                             const std::vector<Violation>& violations = {});

// Replies to one inbound message, in order. Never throws for bad input:
// unknown types, malformed payloads and service errors all become error
// messages.
std::vector<nlohmann::json> handle_message(PipelineService& service, const nlohmann::json& request);

// Same, from one line of text.
std::vector<nlohmann::json> handle_line(PipelineService& service, const std::string& line);

}  // namespace gestlang::service
