#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "gestlang/decoder.hpp"

namespace gestlang::service {

// 100 * num / den rounded to one decimal; nullopt when den is zero.
std::optional<double> percent_one_decimal(long num, long den);

// Length of the longest common subsequence of expected and emitted, i.e. how
// many expected instructions appear in the emitted sequence in order.
std::size_t count_decoded_in_order(std::span<const Instruction> expected, std::span<const Instruction> emitted);

struct MetricsReport {
  // Instruction fields are absent when no ground truth was supplied.
  std::optional<long> total_instructions_attempted;
  std::optional<long> successfully_decoded;
  std::optional<double> instruction_accuracy_pct;  // absent also for zero attempted
  std::optional<long> unintended_instructions;
  long total_gestures = 0;  // frames carrying a ground-truth token
  long correctly_recognized_gestures = 0;
  std::optional<double> gesture_accuracy_pct;

  friend bool operator==(const MetricsReport&, const MetricsReport&) = default;
};

MetricsReport make_report(long attempted, long decoded, long gestures, long gestures_correct);

MetricsReport evaluate_session(const std::optional<std::vector<Instruction>>& expected,
                               std::span<const Instruction> emitted, long gestures, long gestures_correct);

// Undefined percentages serialize as "n/a"; omitted fields are left out.
nlohmann::json to_json(const MetricsReport& r);
std::string format_report(const MetricsReport& r);

}  // namespace gestlang::service
