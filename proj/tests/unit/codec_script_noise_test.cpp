#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <set>

#include "gestlang/codec.hpp"
#include "gestlang/errors.hpp"
#include "gestlang/noise.hpp"
#include "gestlang/script.hpp"

namespace gestlang {
namespace {

using nlohmann::json;

std::filesystem::path temp_file(const std::string& name) { return std::filesystem::temp_directory_path() / name; }

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorKind::kIo;
}

// --- codec ----------------------------------------------------------------

TEST(Codec, PairObservationRoundTrip) {
  const PairObservation a{7, GesturePair{GestureClass::kOk, GestureClass::kPic}, 0.75};
  const auto j = to_json(a);
  EXPECT_EQ(j["left_gesture"], "OK");
  EXPECT_EQ(j["right_gesture"], "PIC");
  EXPECT_EQ(pair_observation_from_json(j), a);
  const PairObservation none{8, std::nullopt, 0.0};
  EXPECT_TRUE(to_json(none)["left_gesture"].is_null());
  EXPECT_EQ(pair_observation_from_json(to_json(none)), none);
}

TEST(Codec, PairObservationRejectsBadInput) {
  EXPECT_EQ(kind_of([] {
              pair_observation_from_json(json{{"frame_index", 0}, {"left_gesture", "OK"}, {"right_gesture", nullptr}});
            }),
            ErrorKind::kFormat);
  EXPECT_EQ(kind_of([] {
              pair_observation_from_json(json{{"frame_index", 0}, {"left_gesture", "THUMB"}, {"right_gesture", "OK"}});
            }),
            ErrorKind::kFormat);
  EXPECT_EQ(kind_of([] {
              pair_observation_from_json(
                  json{{"frame_index", 0}, {"left_gesture", "OK"}, {"right_gesture", "OK"}, {"confidence", 1.5}});
            }),
            ErrorKind::kFormat);
  EXPECT_EQ(kind_of([] { pair_observation_from_json(json{{"left_gesture", nullptr}}); }), ErrorKind::kFormat);
}

TEST(Codec, InstructionRoundTripEveryKind) {
  const std::vector<Instruction> all = {TaskSwitch{Task::kMoveDown, 30.0}, TaskSwitch{Task::kFollow, std::nullopt},
                                        ExecuteProgram{4}, ParamUpdate{2, Direction::kIncrease},
                                        ParamUpdate{0, Direction::kDecrease}, Snapshot{10.0},
                                        Snapshot{std::nullopt}};
  for (const auto& ins : all) EXPECT_EQ(instruction_from_json(to_json(ins)), ins) << to_string(ins);
  EXPECT_EQ(to_json(Instruction(TaskSwitch{Task::kHover, 50.0})),
            (json{{"type", "task_switch"}, {"task", "hover"}, {"duration_s", 50.0}}));
  EXPECT_EQ(kind_of([] { instruction_from_json(json{{"type", "teleport"}}); }), ErrorKind::kFormat);
  EXPECT_EQ(kind_of([] {
              instruction_from_json(json{{"type", "param_update"}, {"param_id", 1}, {"direction", "up"}});
            }),
            ErrorKind::kFormat);
}

TEST(Codec, UnmappedPairBecomesAbsentToken) {
  const auto cfg = default_vocabulary();
  GesturePair unmapped{GestureClass::kDigit0, GestureClass::kDigit0};
  while (map_pair(cfg, unmapped)) unmapped.right = static_cast<GestureClass>(class_id(unmapped.right) + 1);
  EXPECT_FALSE(to_token_observation(cfg, {3, unmapped, 1.0}).token.has_value());
  const auto go = *pair_for(cfg, LanguageToken::of(TokenKind::kGo));
  EXPECT_EQ(to_token_observation(cfg, {3, go, 0.5}), (TokenObservation{3, LanguageToken::of(TokenKind::kGo), 0.5}));
}

TEST(Codec, TokenStreamFileRoundTripAndLineNumbers) {
  const auto path = temp_file("gestlang_tokens.jsonl");
  std::vector<PairObservation> s = {{0, GesturePair{GestureClass::kLeft, GestureClass::kRight}, 1.0},
                                    {1, std::nullopt, 0.0}};
  write_token_stream(path, s);
  EXPECT_EQ(read_token_stream(path), s);

  std::ofstream(path) << to_json(s[0]).dump() << "\n\n{\"frame_index\": 2, \"left_gesture\": 5}\n";
  try {
    read_token_stream(path);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kFormat);
    EXPECT_NE(std::string(e.what()).find(":3:"), std::string::npos) << e.what();
  }
  std::filesystem::remove(path);
  EXPECT_EQ(kind_of([&] { read_token_stream(path); }), ErrorKind::kIo);
}

TEST(Codec, InstructionLogFromEvents) {
  const auto cfg = default_vocabulary();
  const auto stream = build_stream(cfg, parse_script("STOP, EXECUTE, DIGIT(1), GO"), {15, 2, false, 0}, 0);
  const auto r = decode_stream(cfg, to_token_observations(cfg, stream.frames));
  const auto log = instruction_log(r.events);
  ASSERT_EQ(log.size(), 1u);
  EXPECT_EQ(log[0].frame_index, 3 * 17 + 14);
  const auto path = temp_file("gestlang_log.jsonl");
  write_instruction_log(path, log);
  EXPECT_EQ(read_instruction_log(path), log);
  std::filesystem::remove(path);
}

TEST(Codec, EventJson) {
  const DecodeEvent ev{4, StateChanged{fsm::Idle{}, fsm::TaskTimed{Task::kHover, 50.0}}};
  const auto j = to_json(ev);
  EXPECT_EQ(j["event"], "state_changed");
  EXPECT_EQ(j["from"]["name"], "IDLE");
  EXPECT_EQ(j["to"]["name"], "TASK_TIMED");
  EXPECT_EQ(j["to"]["duration_s"], 50.0);
}

// --- script ---------------------------------------------------------------

TEST(Script, ParseAndFormat) {
  const auto t = parse_script(" STOP,HOVER , DIGIT(5),GO ");
  ASSERT_EQ(t.size(), 4u);
  EXPECT_EQ(t[2], LanguageToken::digit_token(5));
  EXPECT_EQ(format_script(t), "STOP, HOVER, DIGIT(5), GO");
  EXPECT_EQ(kind_of([] { parse_script("STOP, FLY, GO"); }), ErrorKind::kFormat);
  EXPECT_EQ(kind_of([] { parse_script("DIGIT(6)"); }), ErrorKind::kFormat);
}

TEST(Script, TokensForEveryInstructionDecodeBack) {
  const auto cfg = default_vocabulary();
  std::mt19937_64 rng(1);
  for (int i = 0; i < 300; ++i) {
    const auto ins = random_instruction(cfg, rng);
    const auto toks = tokens_for(ins);
    FsmResult r{fsm::Idle{}, std::nullopt};
    for (const auto& t : toks) r = fsm_step(r.state, t);
    EXPECT_EQ(r.instruction, ins) << format_script(toks);
  }
}

TEST(Script, StudyScriptsMatchTheirInstruction) {
  ASSERT_EQ(study_scripts().size(), 4u);
  for (const auto& s : study_scripts()) {
    EXPECT_EQ(parse_script(s.tokens), tokens_for(s.expected)) << s.name;
  }
}

TEST(Script, StreamLayout) {
  const auto cfg = default_vocabulary();
  const auto toks = parse_script("CONTD, SNAPSHOT, GO");
  const auto s = build_stream(cfg, toks, {10, 4, false, 100}, 0);
  ASSERT_EQ(s.frames.size(), 3u * 10 + 2 * 4);
  EXPECT_EQ(s.frames.front().frame_index, 100);
  EXPECT_EQ(s.frames.back().frame_index, 137);
  EXPECT_FALSE(s.frames[10].pair.has_value());
  EXPECT_FALSE(s.truth[10].has_value());
  EXPECT_EQ(s.truth[14], toks[1]);
  const auto noisy = build_stream(cfg, toks, {10, 4, true, 0}, 0);
  EXPECT_TRUE(noisy.frames[10].pair.has_value());
  EXPECT_EQ(build_stream(cfg, toks, {10, 4, true, 0}, 0).frames, noisy.frames);
}

TEST(Script, RandomInstructionUsesConfiguredIds) {
  auto cfg = default_vocabulary();
  cfg.programs = {{2, "only"}};
  cfg.parameters = {{4, {"p", {1.0}, 0}}};
  std::mt19937_64 rng(9);
  std::set<int> kinds;
  for (int i = 0; i < 500; ++i) {
    const auto ins = random_instruction(cfg, rng);
    kinds.insert(static_cast<int>(ins.index()));
    if (auto* e = std::get_if<ExecuteProgram>(&ins)) {
      EXPECT_EQ(e->program_id, 2);
    }
    if (auto* p = std::get_if<ParamUpdate>(&ins)) {
      EXPECT_EQ(p->param_id, 4);
    }
  }
  EXPECT_EQ(kinds.size(), 4u);
}

// --- noise ----------------------------------------------------------------

std::vector<PairObservation> constant_stream(const VocabularyConfig& cfg, int n) {
  const auto go = *pair_for(cfg, LanguageToken::of(TokenKind::kGo));
  std::vector<PairObservation> s;
  for (int i = 0; i < n; ++i) s.push_back({i, go, 1.0});
  return s;
}

TEST(Noise, ZeroRatesAreIdentity) {
  const auto cfg = default_vocabulary();
  const auto s = constant_stream(cfg, 100);
  EXPECT_EQ(perturb_stream(cfg, s, {0.0, 0.0, 3}), s);
}

TEST(Noise, SubstitutionAlwaysChangesTheFrame) {
  const auto cfg = default_vocabulary();
  const auto s = constant_stream(cfg, 200);
  const auto out = perturb_stream(cfg, s, {1.0, 0.0, 3});
  for (std::size_t i = 0; i < s.size(); ++i) {
    ASSERT_TRUE(out[i].pair.has_value());
    EXPECT_NE(*out[i].pair, *s[i].pair);
    EXPECT_TRUE(map_pair(cfg, *out[i].pair).has_value());
    EXPECT_EQ(out[i].frame_index, s[i].frame_index);
  }
}

TEST(Noise, EmpiricalRatesMatch) {
  const auto cfg = default_vocabulary();
  const int n = 40000;
  const auto s = constant_stream(cfg, n);
  const auto out = perturb_stream(cfg, s, {0.1, 0.2, 11});
  int dropped = 0, changed = 0;
  for (int i = 0; i < n; ++i) {
    if (!out[i].pair) ++dropped;
    else if (*out[i].pair != *s[i].pair) ++changed;
  }
  // Expected drop 0.2, substitution 0.8 * 0.1 = 0.08; 5 sigma bounds.
  EXPECT_NEAR(dropped / double(n), 0.2, 5 * std::sqrt(0.2 * 0.8 / n));
  EXPECT_NEAR(changed / double(n), 0.08, 5 * std::sqrt(0.08 * 0.92 / n));
}

TEST(Noise, SeedDeterminesOutputAndRatesAreValidated) {
  const auto cfg = default_vocabulary();
  const auto s = constant_stream(cfg, 500);
  EXPECT_EQ(perturb_stream(cfg, s, {0.3, 0.1, 5}), perturb_stream(cfg, s, {0.3, 0.1, 5}));
  EXPECT_NE(perturb_stream(cfg, s, {0.3, 0.1, 5}), perturb_stream(cfg, s, {0.3, 0.1, 6}));
  EXPECT_EQ(kind_of([&] { perturb_stream(cfg, s, {1.5, 0.0, 0}); }), ErrorKind::kInvalidArgument);
  EXPECT_EQ(kind_of([&] { perturb_stream(cfg, s, {0.0, -0.1, 0}); }), ErrorKind::kInvalidArgument);
}

}  // namespace
}  // namespace gestlang
