#include "gestlang/service/metrics.hpp"

#include <cmath>
#include <cstdio>

namespace gestlang::service {

std::optional<double> percent_one_decimal(long num, long den) {
  if (den == 0) return std::nullopt;
  return std::round(1000.0 * static_cast<double>(num) / static_cast<double>(den)) / 10.0;
}

std::size_t count_decoded_in_order(std::span<const Instruction> expected, std::span<const Instruction> emitted) {
  std::vector<std::size_t> prev(emitted.size() + 1, 0), cur(emitted.size() + 1, 0);
  for (const auto& e : expected) {
    for (std::size_t j = 1; j <= emitted.size(); ++j) {
      cur[j] = e == emitted[j - 1] ? prev[j - 1] + 1 : std::max(prev[j], cur[j - 1]);
    }
    std::swap(prev, cur);
  }
  return prev[emitted.size()];
}

MetricsReport make_report(long attempted, long decoded, long gestures, long gestures_correct) {
  MetricsReport r;
  r.total_instructions_attempted = attempted;
  r.successfully_decoded = decoded;
  r.instruction_accuracy_pct = percent_one_decimal(decoded, attempted);
  r.total_gestures = gestures;
  r.correctly_recognized_gestures = gestures_correct;
  r.gesture_accuracy_pct = percent_one_decimal(gestures_correct, gestures);
  return r;
}

MetricsReport evaluate_session(const std::optional<std::vector<Instruction>>& expected,
                               std::span<const Instruction> emitted, long gestures, long gestures_correct) {
  MetricsReport r;
  if (expected) {
    const auto decoded = static_cast<long>(count_decoded_in_order(*expected, emitted));
    r = make_report(static_cast<long>(expected->size()), decoded, gestures, gestures_correct);
    r.unintended_instructions = static_cast<long>(emitted.size()) - decoded;
  } else {
    r.total_gestures = gestures;
    r.correctly_recognized_gestures = gestures_correct;
    r.gesture_accuracy_pct = percent_one_decimal(gestures_correct, gestures);
  }
  return r;
}

nlohmann::json to_json(const MetricsReport& r) {
  auto pct = [](const std::optional<double>& v) { return v ? nlohmann::json(*v) : nlohmann::json("n/a"); };
  nlohmann::json j;
  if (r.total_instructions_attempted) {
    j["total_instructions_attempted"] = *r.total_instructions_attempted;
    j["successfully_decoded"] = *r.successfully_decoded;
    j["instruction_accuracy_pct"] = pct(r.instruction_accuracy_pct);
    j["unintended_instructions"] = r.unintended_instructions.value_or(0);
  }
  j["total_gestures"] = r.total_gestures;
  j["correctly_recognized_gestures"] = r.correctly_recognized_gestures;
  j["gesture_accuracy_pct"] = pct(r.gesture_accuracy_pct);
  return j;
}

std::string format_report(const MetricsReport& r) {
  auto pct = [](const std::optional<double>& v) {
    if (!v) return std::string("n/a");
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.1f", *v);
    return std::string(buf);
  };
  std::string out;
  if (r.total_instructions_attempted) {
    out += "instructions attempted   " + std::to_string(*r.total_instructions_attempted) + "\n";
    out += "successfully decoded     " + std::to_string(*r.successfully_decoded) + "\n";
    out += "instruction accuracy %   " + pct(r.instruction_accuracy_pct) + "\n";
    out += "unintended instructions  " + std::to_string(r.unintended_instructions.value_or(0)) + "\n";
  }
  out += "gestures                 " + std::to_string(r.total_gestures) + "\n";
  out += "correctly recognized     " + std::to_string(r.correctly_recognized_gestures) + "\n";
  out += "gesture accuracy %       " + pct(r.gesture_accuracy_pct) + "\n";
  return out;
}

}  // namespace gestlang::service
