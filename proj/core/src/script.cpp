#include "gestlang/script.hpp"

#include <array>
#include <cmath>
#include <sstream>

#include "gestlang/errors.hpp"

namespace gestlang {
namespace {

LanguageToken duration_digit(double seconds) {
  return LanguageToken::digit_token(static_cast<int>(std::lround(seconds / 10.0)));
}

std::string_view trim(std::string_view s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

const std::array<StudyScript, 4> kStudyScripts = {{
    {"hover-50", "STOP, HOVER, DIGIT(5), GO", TaskSwitch{Task::kHover, 50.0}},
    {"snapshots-20", "CONTD, SNAPSHOT, DIGIT(2), GO", Snapshot{20.0}},
    {"param-3-decrease", "CONTD, UPDATE, DIGIT(3), DECREASE, GO", ParamUpdate{3, Direction::kDecrease}},
    {"execute-1", "STOP, EXECUTE, DIGIT(1), GO", ExecuteProgram{1}},
}};

}  // namespace

std::vector<LanguageToken> tokens_for(const Instruction& ins) {
  using K = TokenKind;
  auto tok = LanguageToken::of;
  return std::visit(
      [&](const auto& v) -> std::vector<LanguageToken> {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, TaskSwitch>) {
          static constexpr std::array kTaskTokens = {K::kHover,     K::kFollow,  K::kMoveLeft,
                                                     K::kMoveRight, K::kMoveUp, K::kMoveDown};
          std::vector<LanguageToken> out{tok(K::kStop), tok(kTaskTokens[static_cast<int>(v.task)])};
          if (v.duration_s) out.push_back(duration_digit(*v.duration_s));
          out.push_back(tok(K::kGo));
          return out;
        } else if constexpr (std::is_same_v<T, ExecuteProgram>) {
          return {tok(K::kStop), tok(K::kExecute), LanguageToken::digit_token(v.program_id), tok(K::kGo)};
        } else if constexpr (std::is_same_v<T, ParamUpdate>) {
          return {tok(K::kContd), tok(K::kUpdate), LanguageToken::digit_token(v.param_id),
                  tok(v.direction == Direction::kIncrease ? K::kIncrease : K::kDecrease), tok(K::kGo)};
        } else {
          std::vector<LanguageToken> out{tok(K::kContd), tok(K::kSnapshot)};
          if (v.duration_s) out.push_back(duration_digit(*v.duration_s));
          out.push_back(tok(K::kGo));
          return out;
        }
      },
      ins);
}

std::vector<LanguageToken> parse_script(std::string_view text) {
  std::vector<LanguageToken> out;
  while (!text.empty()) {
    auto comma = text.find(',');
    auto item = trim(text.substr(0, comma));
    text = comma == std::string_view::npos ? std::string_view{} : text.substr(comma + 1);
    if (item.empty()) continue;
    auto t = parse_token(item);
    if (!t) throw Error(ErrorKind::kFormat, "unknown token '" + std::string(item) + "' in script");
    out.push_back(*t);
  }
  return out;
}

std::string format_script(std::span<const LanguageToken> tokens) {
  std::string out;
  for (const auto& t : tokens) {
    if (!out.empty()) out += ", ";
    out += to_string(t);
  }
  return out;
}

ScriptedStream build_stream(const VocabularyConfig& cfg, std::span<const LanguageToken> tokens,
                            const StreamLayout& layout, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<GesturePair> mapped;
  for (const auto& [pair, _] : cfg.pair_to_token) mapped.push_back(pair);
  std::uniform_int_distribution<std::size_t> pick(0, mapped.empty() ? 0 : mapped.size() - 1);

  ScriptedStream s;
  FrameIndex frame = layout.first_frame;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    auto pair = pair_for(cfg, tokens[i]);
    if (!pair) throw Error(ErrorKind::kInvalidArgument, "no gesture pair maps to " + to_string(tokens[i]));
    if (i > 0) {
      for (int g = 0; g < layout.gap_frames; ++g) {
        PairObservation o{frame++, std::nullopt, 1.0};
        if (layout.random_gaps && !mapped.empty()) o.pair = mapped[pick(rng)];
        s.frames.push_back(o);
        s.truth.push_back(std::nullopt);
      }
    }
    for (int d = 0; d < layout.dwell_frames; ++d) {
      s.frames.push_back({frame++, *pair, 1.0});
      s.truth.push_back(tokens[i]);
    }
  }
  return s;
}

Instruction random_instruction(const VocabularyConfig& cfg, std::mt19937_64& rng) {
  auto pick_key = [&](const auto& map) {
    std::uniform_int_distribution<std::size_t> d(0, map.size() - 1);
    return std::next(map.begin(), static_cast<std::ptrdiff_t>(d(rng)))->first;
  };
  auto duration = [&]() -> std::optional<double> {
    std::uniform_int_distribution<int> d(0, kMaxDigit);
    return digit_duration(d(rng));
  };
  std::uniform_int_distribution<int> kind(0, 3);
  switch (kind(rng)) {
    case 0: {
      std::uniform_int_distribution<int> t(0, 5);
      Task task = static_cast<Task>(t(rng));
      return TaskSwitch{task, duration()};
    }
    case 1:
      if (cfg.programs.empty()) break;
      return ExecuteProgram{pick_key(cfg.programs)};
    case 2: {
      if (cfg.parameters.empty()) break;
      int id = pick_key(cfg.parameters);
      std::bernoulli_distribution inc(0.5);
      return ParamUpdate{id, inc(rng) ? Direction::kIncrease : Direction::kDecrease};
    }
    default: break;
  }
  return Snapshot{duration()};
}

std::span<const StudyScript> study_scripts() { return kStudyScripts; }

}  // namespace gestlang
