#include <gtest/gtest.h>

#include <boost/asio.hpp>
#include <random>
#include <thread>

#include "gestlang/errors.hpp"
#include "gestlang/script.hpp"
#include "gestlang/service/experiments.hpp"
#include "gestlang/service/metrics.hpp"
#include "gestlang/service/pipeline.hpp"
#include "gestlang/service/protocol.hpp"
#include "gestlang/service/server.hpp"
#include "gestlang/vision/image_io.hpp"
#include "gestlang/vision/synthetic.hpp"

namespace gestlang::service {
namespace {

using nlohmann::json;

const ServiceResources& resources() {
  static const ServiceResources r = default_resources();
  return r;
}

std::vector<TokenInput> token_inputs(const VocabularyConfig& cfg, const ScriptedStream& s, bool with_truth) {
  std::vector<TokenInput> out;
  for (std::size_t i = 0; i < s.frames.size(); ++i) {
    TokenInput in{to_token_observation(cfg, s.frames[i]), std::nullopt};
    if (with_truth) in.truth = s.truth[i];
    out.push_back(in);
  }
  return out;
}

std::vector<std::string> types_of(const std::vector<ServiceMessage>& ms) {
  std::vector<std::string> t;
  for (const auto& m : ms) t.push_back(m.type);
  return t;
}

// --- metrics --------------------------------------------------------------

// Brute force: the largest subset of `expected` (kept in order) that is a
// subsequence of `emitted`.
std::size_t brute_in_order(const std::vector<Instruction>& expected, const std::vector<Instruction>& emitted) {
  std::size_t best = 0;
  const std::size_t n = expected.size();
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    std::size_t j = 0, matched = 0;
    bool ok = true;
    for (std::size_t i = 0; i < n && ok; ++i) {
      if (!(mask >> i & 1)) continue;
      while (j < emitted.size() && emitted[j] != expected[i]) ++j;
      if (j == emitted.size()) ok = false;
      else ++j, ++matched;
    }
    if (ok) best = std::max(best, matched);
  }
  return best;
}

TEST(Metrics, PercentRounding) {
  EXPECT_EQ(percent_one_decimal(1, 3), 33.3);
  EXPECT_EQ(percent_one_decimal(2, 3), 66.7);
  EXPECT_EQ(percent_one_decimal(128, 162), 79.0);
  EXPECT_EQ(percent_one_decimal(121, 132), 91.7);
  EXPECT_EQ(percent_one_decimal(5, 5), 100.0);
  EXPECT_EQ(percent_one_decimal(0, 0), std::nullopt);
}

TEST(Metrics, InOrderCountMatchesBruteForce) {
  const std::vector<Instruction> pool = {ExecuteProgram{1}, ExecuteProgram{2}, Snapshot{10.0},
                                         ParamUpdate{0, Direction::kIncrease}};
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 400; ++trial) {
    std::vector<Instruction> a(rng() % 8), b(rng() % 8);
    for (auto& x : a) x = pool[rng() % pool.size()];
    for (auto& x : b) x = pool[rng() % pool.size()];
    EXPECT_EQ(count_decoded_in_order(a, b), brute_in_order(a, b));
  }
}

TEST(Metrics, ReportFields) {
  const auto r = make_report(30, 24, 162, 128);
  EXPECT_EQ(r.instruction_accuracy_pct, 80.0);
  EXPECT_EQ(r.gesture_accuracy_pct, 79.0);
  const std::vector<Instruction> expected = {ExecuteProgram{1}, Snapshot{20.0}};
  const std::vector<Instruction> emitted = {Snapshot{20.0}, ExecuteProgram{1}, ExecuteProgram{3}};
  const auto s = evaluate_session(expected, emitted, 10, 7);
  EXPECT_EQ(s.total_instructions_attempted, 2);
  EXPECT_EQ(s.successfully_decoded, 1);
  EXPECT_EQ(s.unintended_instructions, 2);
  EXPECT_EQ(s.instruction_accuracy_pct, 50.0);
  EXPECT_EQ(s.gesture_accuracy_pct, 70.0);
}

TEST(Metrics, UndefinedValuesSerializeAsNa) {
  const auto none = evaluate_session(std::nullopt, {}, 0, 0);
  const auto j = to_json(none);
  EXPECT_FALSE(j.contains("instruction_accuracy_pct"));
  EXPECT_EQ(j["gesture_accuracy_pct"], "n/a");
  const auto empty = to_json(evaluate_session(std::vector<Instruction>{}, {}, 4, 4));
  EXPECT_EQ(empty["instruction_accuracy_pct"], "n/a");
  EXPECT_EQ(empty["gesture_accuracy_pct"], 100.0);
  EXPECT_NE(format_report(none).find("n/a"), std::string::npos);
}

// --- pipeline -------------------------------------------------------------

TEST(Pipeline, CreateRejectsInvalidConfigAndCnnWithoutModel) {
  PipelineService svc(resources());
  auto cfg = default_vocabulary();
  cfg.debounce_frames = 0;
  const auto r = svc.create_session(cfg, ClassifierChoice::kContour);
  EXPECT_FALSE(r.session_id.has_value());
  ASSERT_EQ(r.violations.size(), 1u);
  EXPECT_EQ(r.violations[0].to_string(), "invalid-value: decoder.debounce_frames");
  EXPECT_THROW(svc.create_session(default_vocabulary(), ClassifierChoice::kCnn), Error);
  EXPECT_TRUE(svc.session_ids().empty());
}

TEST(Pipeline, MessageOrderPerFrame) {
  PipelineService svc(resources());
  const auto cfg = default_vocabulary();
  const auto id = *svc.create_session(cfg, ClassifierChoice::kContour).session_id;
  const auto stream = build_stream(cfg, parse_script("STOP, EXECUTE, DIGIT(1), GO"), {15, 0, false, 0}, 0);
  const auto msgs = svc.ingest_tokens(id, token_inputs(cfg, stream, false));
  // 60 state updates, 4 commits, one emission and one robot_state.
  std::vector<ServiceMessage> last_frame;
  for (const auto& m : msgs)
    if (m.frame_index == 59) last_frame.push_back(m);
  EXPECT_EQ(types_of(last_frame),
            (std::vector<std::string>{"token_committed", "state_update", "instruction_emitted", "robot_state"}));
  EXPECT_EQ(last_frame[3].payload["state"]["mode"]["program_id"], 1);
  long updates = 0;
  for (const auto& m : msgs) updates += m.type == "state_update";
  EXPECT_EQ(updates, 60);
  EXPECT_EQ(svc.emitted_instructions(id), std::vector<Instruction>{ExecuteProgram{1}});
  EXPECT_EQ(svc.robot_state(id).mode, RobotMode(ExecutingProgram{1}));
}

TEST(Pipeline, IngestMatchesOfflineDecode) {
  PipelineService svc(resources());
  const auto cfg = default_vocabulary();
  std::mt19937_64 rng(8);
  std::vector<LanguageToken> tokens;
  for (int i = 0; i < 6; ++i) {
    const auto t = tokens_for(random_instruction(cfg, rng));
    tokens.insert(tokens.end(), t.begin(), t.end());
  }
  const auto clean = build_stream(cfg, tokens, {18, 4, true, 0}, 1);
  const auto noisy = perturb_stream(cfg, clean.frames, {0.05, 0.02, 2});
  const auto offline = decode_stream(cfg, to_token_observations(cfg, noisy));
  const auto id = *svc.create_session(cfg, ClassifierChoice::kContour).session_id;
  // Ingest in uneven batches.
  std::vector<TokenInput> all;
  for (const auto& f : noisy) all.push_back({to_token_observation(cfg, f), std::nullopt});
  for (std::size_t i = 0; i < all.size(); i += 37) {
    svc.ingest_tokens(id, std::span(all).subspan(i, std::min<std::size_t>(37, all.size() - i)));
  }
  EXPECT_EQ(svc.emitted_instructions(id), offline.instructions);
}

TEST(Pipeline, SessionsAreIsolated) {
  PipelineService svc(resources());
  const auto cfg = default_vocabulary();
  const auto a = *svc.create_session(cfg, ClassifierChoice::kContour).session_id;
  const auto b = *svc.create_session(cfg, ClassifierChoice::kContour).session_id;
  EXPECT_EQ(a, "s1");
  EXPECT_EQ(b, "s2");
  const auto sa = build_stream(cfg, parse_script("STOP, HOVER, DIGIT(5), GO"), {15, 2, false, 0}, 0);
  const auto sb = build_stream(cfg, parse_script("CONTD, SNAPSHOT, DIGIT(2), GO"), {15, 2, false, 0}, 0);
  const auto ia = token_inputs(cfg, sa, true), ib = token_inputs(cfg, sb, true);
  // Interleave frame by frame.
  for (std::size_t i = 0; i < ia.size(); ++i) {
    svc.ingest_tokens(a, std::span(ia).subspan(i, 1));
    svc.ingest_tokens(b, std::span(ib).subspan(i, 1));
  }
  EXPECT_EQ(svc.emitted_instructions(a), (std::vector<Instruction>{TaskSwitch{Task::kHover, 50.0}}));
  EXPECT_EQ(svc.emitted_instructions(b), std::vector<Instruction>{Snapshot{20.0}});
  const auto ra = svc.metrics_report(a, std::vector<Instruction>{Instruction(TaskSwitch{Task::kHover, 50.0})});
  EXPECT_EQ(ra.instruction_accuracy_pct, 100.0);
  EXPECT_EQ(ra.total_gestures, static_cast<long>(ia.size()));
  EXPECT_EQ(ra.gesture_accuracy_pct, 100.0);
  EXPECT_TRUE(svc.close_session(a));
  EXPECT_FALSE(svc.close_session(a));
  EXPECT_THROW(svc.emitted_instructions(a), Error);
  EXPECT_EQ(svc.emitted_instructions(b).size(), 1u);
}

TEST(Pipeline, OutOfOrderBatchIsRejectedWithoutSideEffects) {
  PipelineService svc(resources());
  const auto cfg = default_vocabulary();
  const auto id = *svc.create_session(cfg, ClassifierChoice::kContour).session_id;
  const auto go = LanguageToken::of(TokenKind::kGo);
  std::vector<TokenInput> batch = {{{0, go, 1.0}, std::nullopt}, {{1, go, 1.0}, std::nullopt}};
  svc.ingest_tokens(id, batch);
  std::vector<TokenInput> bad = {{{2, go, 1.0}, std::nullopt}, {{2, go, 1.0}, std::nullopt}};
  try {
    svc.ingest_tokens(id, bad);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kStreamOrder);
  }
  // Frame 2 was not consumed.
  std::vector<TokenInput> next = {{{2, go, 1.0}, std::nullopt}};
  const auto msgs = svc.ingest_tokens(id, next);
  ASSERT_EQ(msgs.size(), 1u);
  EXPECT_EQ(msgs[0].payload["run_length"], 3);
}

TEST(Pipeline, UnknownProgramReportsErrorAndContinues) {
  PipelineService svc(resources());
  auto cfg = default_vocabulary();
  cfg.programs.erase(4);
  const auto id = *svc.create_session(cfg, ClassifierChoice::kContour).session_id;
  const auto s = build_stream(cfg, parse_script("STOP, EXECUTE, DIGIT(4), GO, STOP, EXECUTE, DIGIT(2), GO"),
                              {15, 2, false, 0}, 0);
  const auto msgs = svc.ingest_tokens(id, token_inputs(cfg, s, false));
  long errors = 0;
  for (const auto& m : msgs)
    if (m.type == "error") {
      ++errors;
      EXPECT_EQ(m.payload["kind"], "unknown-id");
    }
  EXPECT_EQ(errors, 1);
  EXPECT_EQ(svc.robot_state(id).mode, RobotMode(ExecutingProgram{2}));
}

TEST(Pipeline, FramesThroughContourClassifier) {
  PipelineService svc(resources());
  const auto cfg = default_vocabulary();
  const auto id = *svc.create_session(cfg, ClassifierChoice::kContour).session_id;
  const auto pair = *pair_for(cfg, LanguageToken::of(TokenKind::kStop));
  std::vector<ServiceMessage> msgs;
  for (int f = 0; f < 15; ++f) {
    const auto frame = vision::render_synthetic_frame(vision::scene_for_pair(pair, {}, f)).frame;
    auto m = svc.ingest_frame(id, f, frame, LanguageToken::of(TokenKind::kStop));
    msgs.insert(msgs.end(), m.begin(), m.end());
  }
  EXPECT_EQ(msgs.back().type, "state_update");
  EXPECT_EQ(msgs.back().payload["fsm_state"]["name"], "GOT_STOP");
  EXPECT_TRUE(msgs.back().payload["left_box"].is_object());
  EXPECT_EQ(svc.metrics_report(id, std::nullopt).gesture_accuracy_pct, 100.0);
  EXPECT_THROW(svc.ingest_frame(id, 3, vision::FrameRaster(64, 64)), Error);
}

TEST(Experiments, NoiseFreeTrialsAllDecode) {
  PipelineService svc(resources());
  NoiseTrialOptions o;
  o.trials = 20;
  o.substitution_rate = 0.0;
  const auto r = run_noise_trials(svc, default_vocabulary(), o);
  EXPECT_EQ(r.trials.size(), 20u);
  EXPECT_EQ(r.report.instruction_accuracy_pct, 100.0);
  EXPECT_EQ(r.report.unintended_instructions, 0);
  EXPECT_EQ(r.report.gesture_accuracy_pct, 100.0);
}

// --- protocol -------------------------------------------------------------

json request(const std::string& type, json payload = json::object(), json session = nullptr, json frame = nullptr) {
  return {{"type", type}, {"session_id", session}, {"frame_index", frame}, {"payload", payload}};
}

TEST(Protocol, HelloListsTypes) {
  PipelineService svc(resources());
  const auto r = handle_message(svc, request("hello"));
  ASSERT_EQ(r.size(), 1u);
  EXPECT_EQ(r[0]["payload"]["protocol_version"], kProtocolVersion);
  EXPECT_EQ(r[0]["payload"]["server_types"].size(), 5u);
}

TEST(Protocol, SessionLifecycle) {
  PipelineService svc(resources());
  auto r = handle_message(svc, request("create_session"));
  ASSERT_EQ(r.size(), 1u);
  EXPECT_EQ(r[0]["type"], "create_session");
  EXPECT_EQ(r[0]["payload"]["classifier"], "contour");
  EXPECT_EQ(r[0]["payload"]["threshold"], 15);
  const std::string sid = r[0]["session_id"];

  json obs = json::array();
  for (const auto& [tok, n0] : std::vector<std::pair<std::string, int>>{{"STOP", 0}, {"HOVER", 15}, {"GO", 30}})
    for (int i = 0; i < 15; ++i) obs.push_back({{"frame_index", n0 + i}, {"token", tok}, {"truth", tok}});
  r = handle_message(svc, request("ingest_tokens", {{"observations", obs}}, sid));
  EXPECT_EQ(r.back()["type"], "robot_state");
  EXPECT_EQ(r.back()["payload"]["instruction"]["type"], "task_switch");

  // Single observation with the frame index on the envelope.
  r = handle_message(svc, request("ingest_tokens", {{"left_gesture", nullptr}, {"right_gesture", nullptr}}, sid, 45));
  ASSERT_EQ(r.size(), 1u);
  EXPECT_EQ(r[0]["frame_index"], 45);
  EXPECT_TRUE(r[0]["payload"]["observed"].is_null());

  json expected = json::array({to_json(Instruction(TaskSwitch{Task::kHover, std::nullopt}))});
  r = handle_message(svc, request("metrics", {{"expected", expected}}, sid));
  EXPECT_EQ(r[0]["payload"]["instruction_accuracy_pct"], 100.0);
  EXPECT_EQ(r[0]["payload"]["total_gestures"], 45);
}

TEST(Protocol, IngestFrameCarriesPng) {
  PipelineService svc(resources());
  const std::string sid = handle_message(svc, request("create_session"))[0]["session_id"];
  const auto scene = vision::render_synthetic_frame(
      vision::scene_for_pair(GesturePair{GestureClass::kOk, GestureClass::kOk}, {}, 0));
  const auto png = vision::base64_encode(vision::encode_png(scene.frame));
  const auto r = handle_message(svc, request("ingest_frame", {{"png", png}}, sid, 0));
  ASSERT_EQ(r.size(), 1u);
  EXPECT_EQ(r[0]["payload"]["pair"]["left_gesture"], "OK");
  const auto missing = handle_message(svc, request("ingest_frame", {{"png", png}}, sid));
  EXPECT_EQ(missing[0]["payload"]["kind"], "protocol");
}

TEST(Protocol, ErrorsNeverThrow) {
  PipelineService svc(resources());
  auto kind = [&](const json& req) { return handle_message(svc, req).at(0)["payload"]["kind"]; };
  EXPECT_EQ(kind(request("teleport")), "protocol");
  EXPECT_EQ(kind(request("state_update")), "protocol");
  EXPECT_EQ(kind(json::array()), "protocol");
  EXPECT_EQ(kind(request("ingest_tokens", {{"token", "GO"}}, "s99", 1)), "unknown-session");
  EXPECT_EQ(kind(request("create_session", {{"classifier", "cnn"}})), "model-config");
  EXPECT_EQ(kind(request("create_session", {{"classifier", "svm"}})), "protocol");
  EXPECT_EQ(handle_line(svc, "{not json")[0]["payload"]["kind"], "protocol");

  const auto bad = handle_message(svc, request("create_session", {{"config", {{"decoder", {{"timeout", 3}}}}}}));
  ASSERT_EQ(bad.size(), 1u);
  EXPECT_EQ(bad[0]["payload"]["kind"], "invalid-config");
  bool found = false;
  for (const auto& v : bad[0]["payload"]["violations"]) found |= v["text"] == "unknown-key: decoder.timeout";
  EXPECT_TRUE(found) << bad[0].dump();

  const std::string sid = handle_message(svc, request("create_session"))[0]["session_id"];
  handle_message(svc, request("ingest_tokens", {{"token", "GO"}}, sid, 5));
  const auto order = handle_message(svc, request("ingest_tokens", {{"token", "GO"}}, sid, 5));
  EXPECT_EQ(order[0]["payload"]["kind"], "stream-order");
  EXPECT_EQ(order[0]["session_id"], sid);
  EXPECT_EQ(order[0]["frame_index"], 5);
  // The session keeps working.
  EXPECT_EQ(handle_message(svc, request("ingest_tokens", {{"token", "GO"}}, sid, 6))[0]["type"], "state_update");
}

// --- server ---------------------------------------------------------------

TEST(Server, LineProtocolOverTcp) {
  PipelineService svc(resources());
  Server server(svc, 0);
  std::thread t([&] { server.run(); });
  {
    boost::asio::io_context io;
    boost::asio::ip::tcp::socket sock(io);
    sock.connect({boost::asio::ip::make_address("127.0.0.1"), server.port()});
    boost::asio::streambuf buf;
    auto read_line = [&] {
      boost::asio::read_until(sock, buf, '\n');
      std::istream is(&buf);
      std::string line;
      std::getline(is, line);
      return json::parse(line);
    };
    EXPECT_EQ(read_line()["type"], "hello");
    auto send = [&](const json& j) { boost::asio::write(sock, boost::asio::buffer(j.dump() + "\n")); };
    send(request("create_session"));
    const auto created = read_line();
    EXPECT_EQ(created["type"], "create_session");
    send(request("ingest_tokens", {{"token", "STOP"}}, created["session_id"], 0));
    const auto update = read_line();
    EXPECT_EQ(update["type"], "state_update");
    EXPECT_EQ(update["payload"]["run_length"], 1);
    boost::asio::write(sock, boost::asio::buffer(std::string("garbage\n")));
    EXPECT_EQ(read_line()["type"], "error");
  }
  server.stop();
  t.join();
}

}  // namespace
}  // namespace gestlang::service
