#include <gtest/gtest.h>

#include <algorithm>
#include <set>

#include "gestlang/vocabulary.hpp"

namespace gestlang {
namespace {

using G = GestureClass;
using K = TokenKind;

LanguageToken T(K k) { return LanguageToken::of(k); }

TEST(Vocabulary, TenClassesWithDistinctIds) {
  std::set<int> ids;
  for (auto g : kAllGestures) {
    ids.insert(class_id(g));
    EXPECT_EQ(gesture_from_id(class_id(g)), g);
    EXPECT_EQ(parse_gesture(to_string(g)), g);
  }
  EXPECT_EQ(ids.size(), 10u);
  EXPECT_EQ(*ids.begin(), 0);
  EXPECT_EQ(*ids.rbegin(), 9);
  EXPECT_FALSE(gesture_from_id(10).has_value());
  EXPECT_FALSE(gesture_from_id(-1).has_value());
}

TEST(Vocabulary, TokenSpellingsRoundTrip) {
  const auto all = all_tokens();
  EXPECT_EQ(all.size(), 20u);
  for (const auto& t : all) EXPECT_EQ(parse_token(to_string(t)), t) << to_string(t);
  EXPECT_EQ(to_string(LanguageToken::digit_token(3)), "DIGIT(3)");
  EXPECT_FALSE(parse_token("DIGIT(6)").has_value());
  EXPECT_FALSE(parse_token("DIGIT").has_value());
  EXPECT_FALSE(parse_token("stop").has_value());
}

TEST(Vocabulary, SentinelsAreStopContdAndGo) {
  for (const auto& t : all_tokens()) {
    EXPECT_EQ(t.is_start_sentinel(), t.kind == K::kStop || t.kind == K::kContd);
    EXPECT_EQ(t.is_end_sentinel(), t.kind == K::kGo);
  }
}

TEST(Vocabulary, DefaultTable) {
  const auto cfg = default_vocabulary();
  EXPECT_EQ(cfg.debounce_frames, 15);
  EXPECT_EQ(map_pair(cfg, {G::kDigit0, G::kDigit0}), T(K::kStop));
  EXPECT_EQ(map_pair(cfg, {G::kOk, G::kOk}), T(K::kContd));
  EXPECT_EQ(map_pair(cfg, {G::kDigit5, G::kDigit5}), T(K::kGo));
  EXPECT_EQ(map_pair(cfg, {G::kDigit5, G::kDigit0}), T(K::kHover));
  EXPECT_EQ(map_pair(cfg, {G::kDigit5, G::kDigit1}), T(K::kFollow));
  EXPECT_EQ(map_pair(cfg, {G::kLeft, G::kLeft}), T(K::kMoveLeft));
  EXPECT_EQ(map_pair(cfg, {G::kRight, G::kRight}), T(K::kMoveRight));
  EXPECT_EQ(map_pair(cfg, {G::kLeft, G::kRight}), T(K::kMoveUp));
  EXPECT_EQ(map_pair(cfg, {G::kRight, G::kLeft}), T(K::kMoveDown));
  EXPECT_EQ(map_pair(cfg, {G::kDigit1, G::kDigit0}), T(K::kExecute));
  EXPECT_EQ(map_pair(cfg, {G::kDigit2, G::kDigit2}), T(K::kUpdate));
  EXPECT_EQ(map_pair(cfg, {G::kPic, G::kPic}), T(K::kSnapshot));
  EXPECT_EQ(map_pair(cfg, {G::kOk, G::kLeft}), T(K::kDecrease));
  EXPECT_EQ(map_pair(cfg, {G::kOk, G::kRight}), T(K::kIncrease));
  for (int d = 0; d <= 5; ++d) {
    EXPECT_EQ(map_pair(cfg, {G::kOk, *gesture_from_id(d)}), LanguageToken::digit_token(d));
  }
  EXPECT_EQ(cfg.pair_to_token.size(), 20u);
}

TEST(Vocabulary, UnmappedPairHasNoToken) {
  const auto cfg = default_vocabulary();
  EXPECT_FALSE(map_pair(cfg, {G::kDigit3, G::kDigit4}).has_value());
  // Order matters.
  EXPECT_FALSE(map_pair(cfg, {G::kDigit0, G::kDigit1}).has_value());
}

TEST(Vocabulary, MapPairIsTotalAndPure) {
  const auto cfg = default_vocabulary();
  for (auto a : kAllGestures) {
    for (auto b : kAllGestures) EXPECT_EQ(map_pair(cfg, {a, b}), map_pair(cfg, {a, b}));
  }
}

TEST(Vocabulary, PairForInvertsTheTable) {
  const auto cfg = default_vocabulary();
  for (const auto& t : all_tokens()) {
    auto p = pair_for(cfg, t);
    ASSERT_TRUE(p.has_value()) << to_string(t);
    EXPECT_EQ(map_pair(cfg, *p), t);
  }
}

TEST(Vocabulary, DefaultValidates) { EXPECT_TRUE(validate_config(default_vocabulary()).empty()); }

TEST(Vocabulary, MissingGo) {
  auto cfg = default_vocabulary();
  cfg.pair_to_token.erase({G::kDigit5, G::kDigit5});
  const auto v = validate_config(cfg);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v[0].to_string(), "missing-token: GO");
}

TEST(Vocabulary, DuplicatedDigit) {
  auto cfg = default_vocabulary();
  cfg.pair_to_token[{G::kDigit3, G::kDigit3}] = LanguageToken::digit_token(3);
  const auto v = validate_config(cfg);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v[0].to_string(), "duplicate-token: DIGIT(3)");
}

TEST(Vocabulary, NonDigitTokensMayHaveSeveralPairs) {
  auto cfg = default_vocabulary();
  cfg.pair_to_token[{G::kDigit3, G::kDigit3}] = T(K::kHover);
  EXPECT_TRUE(validate_config(cfg).empty());
}

TEST(Vocabulary, BadDecoderSettings) {
  auto cfg = default_vocabulary();
  cfg.debounce_frames = 0;
  cfg.snapshot_period_s = -1.0;
  const auto v = validate_config(cfg);
  ASSERT_EQ(v.size(), 2u);
  EXPECT_EQ(v[0].code, "invalid-value");
}

TEST(Vocabulary, ProgramAndParameterIdsInRange) {
  auto cfg = default_vocabulary();
  cfg.programs[6] = "too-far";
  cfg.parameters[0].index = 99;
  const auto v = validate_config(cfg);
  ASSERT_EQ(v.size(), 2u);
  EXPECT_NE(std::find_if(v.begin(), v.end(), [](const Violation& x) { return x.code == "invalid-id"; }), v.end());
  EXPECT_NE(std::find_if(v.begin(), v.end(), [](const Violation& x) { return x.code == "index-out-of-range"; }),
            v.end());
}

TEST(Vocabulary, TaskForCoversTaskTokens) {
  EXPECT_EQ(task_for(K::kHover), Task::kHover);
  EXPECT_EQ(task_for(K::kMoveDown), Task::kMoveDown);
  EXPECT_FALSE(task_for(K::kGo).has_value());
  EXPECT_FALSE(task_for(K::kExecute).has_value());
}

}  // namespace
}  // namespace gestlang
