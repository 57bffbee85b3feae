#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace gestlang {

// The ten hand gestures. The enumerator value is the CNN output index.
enum class GestureClass : std::uint8_t {
  kDigit0 = 0,
  kDigit1 = 1,
  kDigit2 = 2,
  kDigit3 = 3,
  kDigit4 = 4,
  kDigit5 = 5,
  kLeft = 6,
  kRight = 7,
  kPic = 8,
  kOk = 9,
};

inline constexpr int kGestureClassCount = 10;

inline constexpr std::array<GestureClass, kGestureClassCount> kAllGestures = {
    GestureClass::kDigit0, GestureClass::kDigit1, GestureClass::kDigit2,
    GestureClass::kDigit3, GestureClass::kDigit4, GestureClass::kDigit5,
    GestureClass::kLeft,   GestureClass::kRight,  GestureClass::kPic,
    GestureClass::kOk};

constexpr int class_id(GestureClass g) { return static_cast<int>(g); }
std::optional<GestureClass> gesture_from_id(int id);
std::string_view to_string(GestureClass g);
std::optional<GestureClass> parse_gesture(std::string_view name);

// Simultaneous (left-hand, right-hand) classification. "Left" is the hand
// whose region lies in the left half of the image.
struct GesturePair {
  GestureClass left;
  GestureClass right;

  friend auto operator<=>(const GesturePair&, const GesturePair&) = default;
};

enum class TokenKind : std::uint8_t {
  kStop,
  kContd,
  kGo,
  kHover,
  kFollow,
  kMoveLeft,
  kMoveRight,
  kMoveUp,
  kMoveDown,
  kExecute,
  kUpdate,
  kSnapshot,
  kDigit,
  kIncrease,
  kDecrease,
};

inline constexpr int kTokenKindCount = 15;
inline constexpr int kMaxDigit = 5;

struct LanguageToken {
  TokenKind kind = TokenKind::kStop;
  // Payload for kDigit only; always 0 otherwise so defaulted comparison works.
  std::uint8_t digit = 0;

  static constexpr LanguageToken of(TokenKind k) { return {k, 0}; }
  static constexpr LanguageToken digit_token(int d) {
    return {TokenKind::kDigit, static_cast<std::uint8_t>(d)};
  }

  bool is_digit() const { return kind == TokenKind::kDigit; }
  bool is_start_sentinel() const {
    return kind == TokenKind::kStop || kind == TokenKind::kContd;
  }
  bool is_end_sentinel() const { return kind == TokenKind::kGo; }

  friend auto operator<=>(const LanguageToken&, const LanguageToken&) = default;
};

// "STOP", "MOVE_LEFT", "DIGIT(3)", ...
std::string to_string(const LanguageToken& t);
std::string_view kind_name(TokenKind k);
std::optional<LanguageToken> parse_token(std::string_view spelling);

// Every concrete token: the 14 payload-free kinds plus DIGIT(0..5).
std::vector<LanguageToken> all_tokens();

// Atomic behaviours a task-switch instruction can select.
enum class Task : std::uint8_t {
  kHover,
  kFollow,
  kMoveLeft,
  kMoveRight,
  kMoveUp,
  kMoveDown,
};

std::string_view to_string(Task t);
std::optional<Task> parse_task(std::string_view name);
std::optional<Task> task_for(TokenKind k);

struct ParameterSpec {
  std::string name;
  std::vector<double> values;
  std::size_t index = 0;

  friend bool operator==(const ParameterSpec&, const ParameterSpec&) = default;
};

struct VocabularyConfig {
  std::map<GesturePair, LanguageToken> pair_to_token;
  std::map<int, std::string> programs;
  std::map<int, ParameterSpec> parameters;
  int debounce_frames = 15;
  double snapshot_period_s = 1.0;
  // Mission time advanced per ingested frame by the pipeline service.
  double frame_period_s = 1.0 / 15.0;

  friend bool operator==(const VocabularyConfig&, const VocabularyConfig&) = default;
};

struct Violation {
  std::string code;  // "missing-token", "duplicate-token", "unknown-key", ...
  std::string key;   // offending key, e.g. "GO" or "decoder.debounce_frames"

  std::string to_string() const { return code + ": " + key; }
  friend bool operator==(const Violation&, const Violation&) = default;
};

VocabularyConfig default_vocabulary();

std::optional<LanguageToken> map_pair(const VocabularyConfig& cfg, const GesturePair& pair);

// First pair (in map order) producing `token`; used to render scripted input.
std::optional<GesturePair> pair_for(const VocabularyConfig& cfg, const LanguageToken& token);

std::vector<Violation> validate_config(const VocabularyConfig& cfg);

}  // namespace gestlang
