#include "gestlang/vocabulary.hpp"

#include <charconv>

namespace gestlang {
namespace {

constexpr std::array<std::string_view, kGestureClassCount> kGestureNames = {
    "DIGIT_0", "DIGIT_1", "DIGIT_2", "DIGIT_3", "DIGIT_4",
    "DIGIT_5", "LEFT",    "RIGHT",   "PIC",     "OK"};

constexpr std::array<std::string_view, kTokenKindCount> kTokenNames = {
    "STOP",      "CONTD",   "GO",     "HOVER",    "FOLLOW",
    "MOVE_LEFT", "MOVE_RIGHT", "MOVE_UP", "MOVE_DOWN", "EXECUTE",
    "UPDATE",    "SNAPSHOT", "DIGIT", "INCREASE", "DECREASE"};

constexpr std::array<std::string_view, 6> kTaskNames = {
    "hover", "follow", "move_left", "move_right", "move_up", "move_down"};

}  // namespace

std::optional<GestureClass> gesture_from_id(int id) {
  if (id < 0 || id >= kGestureClassCount) return std::nullopt;
  return static_cast<GestureClass>(id);
}

std::string_view to_string(GestureClass g) { return kGestureNames[class_id(g)]; }

std::optional<GestureClass> parse_gesture(std::string_view name) {
  for (int i = 0; i < kGestureClassCount; ++i) {
    if (kGestureNames[i] == name) return static_cast<GestureClass>(i);
  }
  return std::nullopt;
}

std::string_view kind_name(TokenKind k) { return kTokenNames[static_cast<int>(k)]; }

std::string to_string(const LanguageToken& t) {
  if (t.is_digit()) return "DIGIT(" + std::to_string(t.digit) + ")";
  return std::string(kind_name(t.kind));
}

std::optional<LanguageToken> parse_token(std::string_view s) {
  constexpr std::string_view kDigitPrefix = "DIGIT(";
  if (s.starts_with(kDigitPrefix) && s.ends_with(')')) {
    auto body = s.substr(kDigitPrefix.size(), s.size() - kDigitPrefix.size() - 1);
    int d = -1;
    auto [ptr, ec] = std::from_chars(body.data(), body.data() + body.size(), d);
    if (ec != std::errc{} || ptr != body.data() + body.size() || d < 0 || d > kMaxDigit) {
      return std::nullopt;
    }
    return LanguageToken::digit_token(d);
  }
  for (int i = 0; i < kTokenKindCount; ++i) {
    auto k = static_cast<TokenKind>(i);
    if (k != TokenKind::kDigit && kTokenNames[i] == s) return LanguageToken::of(k);
  }
  return std::nullopt;
}

std::vector<LanguageToken> all_tokens() {
  std::vector<LanguageToken> out;
  for (int i = 0; i < kTokenKindCount; ++i) {
    auto k = static_cast<TokenKind>(i);
    if (k == TokenKind::kDigit) {
      for (int d = 0; d <= kMaxDigit; ++d) out.push_back(LanguageToken::digit_token(d));
    } else {
      out.push_back(LanguageToken::of(k));
    }
  }
  return out;
}

std::string_view to_string(Task t) { return kTaskNames[static_cast<int>(t)]; }

std::optional<Task> parse_task(std::string_view name) {
  for (std::size_t i = 0; i < kTaskNames.size(); ++i) {
    if (kTaskNames[i] == name) return static_cast<Task>(i);
  }
  return std::nullopt;
}

std::optional<Task> task_for(TokenKind k) {
  switch (k) {
    case TokenKind::kHover: return Task::kHover;
    case TokenKind::kFollow: return Task::kFollow;
    case TokenKind::kMoveLeft: return Task::kMoveLeft;
    case TokenKind::kMoveRight: return Task::kMoveRight;
    case TokenKind::kMoveUp: return Task::kMoveUp;
    case TokenKind::kMoveDown: return Task::kMoveDown;
    default: return std::nullopt;
  }
}

VocabularyConfig default_vocabulary() {
  using G = GestureClass;
  using K = TokenKind;
  VocabularyConfig cfg;
  auto put = [&](G l, G r, LanguageToken t) { cfg.pair_to_token[{l, r}] = t; };

  put(G::kDigit0, G::kDigit0, LanguageToken::of(K::kStop));
  put(G::kOk, G::kOk, LanguageToken::of(K::kContd));
  put(G::kDigit5, G::kDigit5, LanguageToken::of(K::kGo));
  put(G::kDigit5, G::kDigit0, LanguageToken::of(K::kHover));
  put(G::kDigit5, G::kDigit1, LanguageToken::of(K::kFollow));
  put(G::kLeft, G::kLeft, LanguageToken::of(K::kMoveLeft));
  put(G::kRight, G::kRight, LanguageToken::of(K::kMoveRight));
  put(G::kLeft, G::kRight, LanguageToken::of(K::kMoveUp));
  put(G::kRight, G::kLeft, LanguageToken::of(K::kMoveDown));
  put(G::kDigit1, G::kDigit0, LanguageToken::of(K::kExecute));
  put(G::kDigit2, G::kDigit2, LanguageToken::of(K::kUpdate));
  put(G::kPic, G::kPic, LanguageToken::of(K::kSnapshot));
  for (int d = 0; d <= kMaxDigit; ++d) {
    put(G::kOk, static_cast<G>(d), LanguageToken::digit_token(d));
  }
  put(G::kOk, G::kLeft, LanguageToken::of(K::kDecrease));
  put(G::kOk, G::kRight, LanguageToken::of(K::kIncrease));

  cfg.programs = {{0, "lawnmower-survey"}, {1, "reef-transect"},  {2, "perimeter-loop"},
                  {3, "depth-profile"},    {4, "return-to-boat"}, {5, "spiral-search"}};
  cfg.parameters = {
      {0, {"cruise-speed-mps", {0.2, 0.4, 0.6, 0.8, 1.0}, 2}},
      {1, {"depth-m", {2.0, 4.0, 6.0, 8.0, 10.0}, 1}},
      {2, {"camera-exposure-ms", {2.0, 4.0, 8.0, 16.0}, 1}},
      {3, {"transect-spacing-m", {1.0, 2.0, 3.0, 4.0, 5.0}, 2}},
      {4, {"light-level", {0.0, 0.25, 0.5, 0.75, 1.0}, 2}},
      {5, {"heading-offset-deg", {-30.0, -15.0, 0.0, 15.0, 30.0}, 2}},
  };
  return cfg;
}

std::optional<LanguageToken> map_pair(const VocabularyConfig& cfg, const GesturePair& pair) {
  auto it = cfg.pair_to_token.find(pair);
  if (it == cfg.pair_to_token.end()) return std::nullopt;
  return it->second;
}

std::optional<GesturePair> pair_for(const VocabularyConfig& cfg, const LanguageToken& token) {
  for (const auto& [pair, t] : cfg.pair_to_token) {
    if (t == token) return pair;
  }
  return std::nullopt;
}

std::vector<Violation> validate_config(const VocabularyConfig& cfg) {
  std::vector<Violation> out;

  std::map<LanguageToken, int> uses;
  for (const auto& [pair, token] : cfg.pair_to_token) {
    if (token.is_digit() ? token.digit > kMaxDigit : token.digit != 0) {
      out.push_back({"invalid-token", to_string(token)});
      continue;
    }
    ++uses[token];
  }
  for (const auto& token : all_tokens()) {
    auto it = uses.find(token);
    if (it == uses.end()) {
      out.push_back({"missing-token", to_string(token)});
    } else if (token.is_digit() && it->second > 1) {
      out.push_back({"duplicate-token", to_string(token)});
    }
  }

  for (const auto& [id, name] : cfg.programs) {
    if (id < 0 || id > kMaxDigit) out.push_back({"invalid-id", "programs." + std::to_string(id)});
    if (name.empty()) out.push_back({"invalid-value", "programs." + std::to_string(id)});
  }
  for (const auto& [id, p] : cfg.parameters) {
    const std::string key = "parameters." + std::to_string(id);
    if (id < 0 || id > kMaxDigit) out.push_back({"invalid-id", key});
    if (p.values.empty()) {
      out.push_back({"empty-values", key});
    } else if (p.index >= p.values.size()) {
      out.push_back({"index-out-of-range", key + ".index"});
    }
  }

  if (cfg.debounce_frames <= 0) out.push_back({"invalid-value", "decoder.debounce_frames"});
  if (!(cfg.snapshot_period_s > 0.0)) out.push_back({"invalid-value", "decoder.snapshot_period_s"});
  if (!(cfg.frame_period_s > 0.0)) out.push_back({"invalid-value", "decoder.frame_period_s"});
  return out;
}

}  // namespace gestlang
