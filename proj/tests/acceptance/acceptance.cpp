// Acceptance run: one PASS/FAIL line per criterion. Thresholds and runtime
// budgets are pinned below; nothing here is tuned to make a criterion pass.
//
//   gestlang_acceptance                 all criteria
//   gestlang_acceptance --criterion 4   one criterion

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>

#include "gestlang/classify/cnn.hpp"
#include "gestlang/classify/dataset.hpp"
#include "gestlang/classify/training.hpp"
#include "gestlang/executor.hpp"
#include "gestlang/noise.hpp"
#include "gestlang/script.hpp"
#include "gestlang/service/experiments.hpp"
#include "gestlang/service/metrics.hpp"
#include "gestlang/service/pipeline.hpp"
#include "gestlang/vision/synthetic.hpp"
#include "reference_decoder.hpp"

namespace {

using namespace gestlang;
using Clock = std::chrono::steady_clock;

// Pinned thresholds.
constexpr int kDebounceFrames = 15;
constexpr double kC1BudgetS = 1.0;
constexpr double kC2BudgetS = 120.0;
constexpr int kC2Dwell = 20;
constexpr int kC2Gap = 5;
constexpr int kC2TrainPerClass = 100;
constexpr int kC2Epochs = 8;
constexpr double kC3BudgetS = 300.0;
constexpr int kC3Trials = 200;
constexpr double kC3Substitution = 0.055;
constexpr int kC3Dwell = 30;
constexpr double kC3MinAccuracyPct = 99.5;
constexpr int kC3SpuriousTrials = 10000;
constexpr double kC3SpuriousP = 0.2;
constexpr int kC3SpuriousFrames = 100;
constexpr int kC4Streams = 10000;
constexpr int kC4MaxLength = 300;
constexpr double kC5BudgetS = 60.0;
constexpr double kC5RelTol = 1e-4;
constexpr double kC5AbsFloor = 1e-9;
constexpr double kC5Step = 1e-4;
constexpr double kC6BudgetS = 600.0;
constexpr double kC6MinTrain = 0.99;
constexpr double kC6MinTest = 0.95;
constexpr double kC6LossTol = 1e-6;
constexpr int kC7Seeds = 200;
constexpr double kC7MinIou = 0.8;
constexpr double kC7MinFraction = 0.95;

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

// --- 1 --------------------------------------------------------------------

Outcome criterion1() {
  const auto t0 = Clock::now();
  const auto cfg = default_vocabulary();
  const auto stop = LanguageToken::of(TokenKind::kStop);
  auto commits = [&](int n) {
    std::vector<TokenObservation> s;
    for (int i = 0; i < n; ++i) s.push_back({i, stop, 1.0});
    s.push_back({n, std::nullopt, 0.0});
    int c = 0;
    for (const auto& e : decode_stream(cfg, s).events) c += std::holds_alternative<TokenCommitted>(e.body);
    return c;
  };
  const int at15 = commits(kDebounceFrames), at14 = commits(kDebounceFrames - 1);
  const double secs = seconds_since(t0);
  return {cfg.debounce_frames == kDebounceFrames && at15 == 1 && at14 == 0 && secs < kC1BudgetS,
          fmt("15 frames -> %d commit, 14 frames -> %d commits, %.3f s (budget %.0f s)", at15, at14, secs,
              kC1BudgetS)};
}

// --- 2 --------------------------------------------------------------------

std::vector<Instruction> decode_script_video(service::PipelineService& svc, service::ClassifierChoice choice,
                                             const VocabularyConfig& cfg, const std::vector<LanguageToken>& tokens,
                                             std::uint64_t seed) {
  const auto stream = build_stream(cfg, tokens, {kC2Dwell, kC2Gap, false, 0}, seed);
  const auto id = *svc.create_session(cfg, choice).session_id;
  for (const auto& f : stream.frames) {
    const auto scene = vision::scene_for_pair(f.pair, {}, seed * 100003 + static_cast<std::uint64_t>(f.frame_index));
    svc.ingest_frame(id, f.frame_index, vision::render_synthetic_frame(scene).frame);
  }
  auto out = svc.emitted_instructions(id);
  svc.close_session(id);
  return out;
}

Outcome criterion2() {
  const auto t0 = Clock::now();
  const auto cfg = default_vocabulary();

  // A short CNN training run so the CNN path can be exercised within budget.
  const auto data = classify::generate_synthetic_dataset({kC2TrainPerClass, 0, 0}, 2);
  classify::TrainConfig tc;
  tc.epochs = kC2Epochs;
  auto trained = classify::train(classify::CnnModel::initialized({}, 2), data, tc);
  auto res = service::default_resources();
  res.cnn = std::make_shared<const classify::CnnModel>(std::move(trained.model));
  service::PipelineService svc(res);

  int clean_ok = 0, contour_ok = 0, cnn_ok = 0;
  std::string misses;
  std::uint64_t seed = 1;
  for (const auto& script : study_scripts()) {
    const auto tokens = parse_script(script.tokens);
    const std::vector<Instruction> want{script.expected};
    const auto clean = build_stream(cfg, tokens, {kC2Dwell, kC2Gap, true, 0}, seed);
    const bool c = decode_stream(cfg, to_token_observations(cfg, clean.frames)).instructions == want;
    const bool k = decode_script_video(svc, service::ClassifierChoice::kContour, cfg, tokens, seed) == want;
    const bool n = decode_script_video(svc, service::ClassifierChoice::kCnn, cfg, tokens, seed) == want;
    clean_ok += c;
    contour_ok += k;
    cnn_ok += n;
    if (!(c && k && n)) misses += std::string(" ") + std::string(script.name);
    ++seed;
  }
  const double secs = seconds_since(t0);
  return {clean_ok == 4 && contour_ok == 4 && cnn_ok == 4 && secs < kC2BudgetS,
          fmt("clean tokens %d/4, frames+contour %d/4, frames+cnn %d/4, %.1f s (budget %.0f s)%s%s", clean_ok,
              contour_ok, cnn_ok, secs, kC2BudgetS, misses.empty() ? "" : "; missed:", misses.c_str())};
}

// --- 3 --------------------------------------------------------------------

Outcome criterion3() {
  const auto t0 = Clock::now();
  const auto cfg = default_vocabulary();
  service::PipelineService svc(service::default_resources());
  service::NoiseTrialOptions o;
  o.trials = kC3Trials;
  o.dwell_frames = kC3Dwell;
  o.substitution_rate = kC3Substitution;
  o.seed = 3;
  const auto r = service::run_noise_trials(svc, cfg, o).report;
  const double acc = r.instruction_accuracy_pct.value_or(0.0);
  const bool part_a = acc >= kC3MinAccuracyPct && r.unintended_instructions == 0;

  // Noise alone must never commit a wrong token.
  const auto tokens = all_tokens();
  long spurious = 0;
  for (int t = 0; t < kC3SpuriousTrials; ++t) {
    const auto truth = tokens[static_cast<std::size_t>(t) % tokens.size()];
    const auto pair = *pair_for(cfg, truth);
    std::vector<PairObservation> s;
    for (int i = 0; i < kC3SpuriousFrames; ++i) s.push_back({i, pair, 1.0});
    const auto noisy = perturb_stream(cfg, s, {kC3SpuriousP, 0.0, static_cast<std::uint64_t>(t)});
    for (const auto& e : decode_stream(cfg, to_token_observations(cfg, noisy)).events) {
      if (auto* c = std::get_if<TokenCommitted>(&e.body)) spurious += c->token != truth;
    }
  }
  const double secs = seconds_since(t0);
  return {part_a && spurious == 0 && secs < kC3BudgetS,
          fmt("p=%.3f dwell %d: %ld/%ld decoded (%.1f%%, need >= %.1f%%), %ld unintended; p=%.1f: %ld spurious "
              "commits in %d trials; %.1f s (budget %.0f s)",
              kC3Substitution, kC3Dwell, *r.successfully_decoded, *r.total_instructions_attempted, acc,
              kC3MinAccuracyPct, *r.unintended_instructions, kC3SpuriousP, spurious, kC3SpuriousTrials, secs,
              kC3BudgetS)};
}

// --- 4 --------------------------------------------------------------------

Outcome criterion4() {
  std::mt19937_64 rng(4);
  const auto toks = all_tokens();
  int mismatches = 0, total_emissions = 0;
  for (int trial = 0; trial < kC4Streams; ++trial) {
    auto cfg = default_vocabulary();
    // Mostly the real threshold, sometimes small ones so long sentences fit.
    cfg.debounce_frames = trial % 2 == 0 ? kDebounceFrames : 1 + static_cast<int>(rng() % 6);
    const int len = static_cast<int>(rng() % (kC4MaxLength + 1));
    std::vector<TokenObservation> s;
    FrameIndex f = static_cast<FrameIndex>(rng() % 50);
    std::optional<LanguageToken> tok;
    while (static_cast<int>(s.size()) < len) {
      if (rng() % 5 == 0) tok.reset();
      else tok = toks[rng() % toks.size()];
      const int hold = 1 + static_cast<int>(rng() % (2 * cfg.debounce_frames + 1));
      for (int k = 0; k < hold && static_cast<int>(s.size()) < len; ++k) {
        s.push_back({f, tok, 1.0});
        f += 1 + static_cast<FrameIndex>(rng() % 2);
      }
    }
    const auto got = decode_stream(cfg, s);
    const auto ref = testing::reference_decode(s, cfg.debounce_frames);
    std::vector<testing::RefCommit> commits;
    std::vector<testing::RefEmission> emissions;
    for (const auto& e : got.events) {
      if (auto* c = std::get_if<TokenCommitted>(&e.body)) commits.push_back({e.frame_index, c->token});
      if (auto* i = std::get_if<InstructionEmitted>(&e.body)) emissions.push_back({e.frame_index, i->instruction});
    }
    mismatches += commits != ref.commits || emissions != ref.emissions;
    total_emissions += static_cast<int>(ref.emissions.size());
  }
  return {mismatches == 0, fmt("%d/%d streams differ from the reference (%d instructions compared)", mismatches,
                               kC4Streams, total_emissions)};
}

// --- 5 --------------------------------------------------------------------

Outcome criterion5() {
  const auto t0 = Clock::now();
  using Model = classify::BasicCnn<double>;
  const classify::CnnSpec spec{8, 2, 3, 3, 3, 6, 3};
  auto model = Model::initialized(spec, 5);
  std::mt19937_64 rng(5);
  std::normal_distribution<double> n(0.0, 0.3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (auto& t : model.parameters()) {
    if (t.name.ends_with("bias") || t.name.ends_with("shift")) for (auto& v : t.data) v = n(rng);
    if (t.name.ends_with("scale")) for (auto& v : t.data) v = 1.0 + n(rng);
  }
  std::vector<std::vector<double>> inputs(3, std::vector<double>(spec.input_values()));
  for (auto& x : inputs) for (auto& v : x) v = u(rng);
  const std::vector<int> labels = {0, 1, 2};
  std::vector<classify::Sample<double>> batch;
  for (std::size_t i = 0; i < inputs.size(); ++i) batch.push_back({inputs[i], labels[i]});
  const auto lg = classify::loss_and_gradients<double>(model, batch);
  auto loss = [&] {
    double l = 0;
    for (std::size_t i = 0; i < inputs.size(); ++i) l -= std::log(model.forward(inputs[i])[labels[i]]);
    return l / inputs.size();
  };
  std::size_t checked = 0, bad = 0;
  double worst = 0.0;
  for (std::size_t p = 0; p < model.parameters().size(); ++p) {
    auto& d = model.parameters()[p].data;
    for (std::size_t i = 0; i < d.size(); ++i) {
      const double orig = d[i];
      d[i] = orig + kC5Step;
      const double up = loss();
      d[i] = orig - kC5Step;
      const double down = loss();
      d[i] = orig;
      const double num = (up - down) / (2 * kC5Step), ana = lg.gradients[p].data[i];
      const double scale = std::max(std::abs(num), std::abs(ana));
      const double err = std::abs(num - ana);
      if (err > std::max(kC5RelTol * scale, kC5AbsFloor)) ++bad;
      if (scale > kC5AbsFloor) worst = std::max(worst, err / scale);
      ++checked;
    }
  }
  const double secs = seconds_since(t0);
  return {bad == 0 && checked == model.parameter_count() && secs < kC5BudgetS,
          fmt("%zu/%zu parameters outside tolerance, worst relative error %.2e, %.2f s (budget %.0f s)", bad, checked,
              worst, secs, kC5BudgetS)};
}

// --- 6 --------------------------------------------------------------------

Outcome criterion6() {
  const auto t0 = Clock::now();
  const classify::CnnModel zero;
  const std::vector<classify::LabeledPatch> one = {{vision::Patch{}, 0}};
  const double zero_loss = classify::loss_and_gradients(zero, one).loss;
  const bool loss_ok = std::abs(zero_loss - std::log(10.0)) <= kC6LossTol;

  const auto data = classify::generate_synthetic_dataset({200, 20, 40}, 6);
  const classify::TrainConfig cfg;  // defaults
  const auto result = classify::train(classify::CnnModel::initialized({}, 6), data, cfg);
  const double train_acc = classify::evaluate(result.model, data.train).accuracy;
  const double test_acc = classify::evaluate(result.model, data.test).accuracy;
  const double secs = seconds_since(t0);
  return {loss_ok && train_acc >= kC6MinTrain && test_acc >= kC6MinTest && secs < kC6BudgetS,
          fmt("zero-weight loss %.9f (ln 10 = %.9f), %d epochs: train %.4f (>= %.2f), test %.4f (>= %.2f), %.1f s "
              "(budget %.0f s)",
              zero_loss, std::log(10.0), cfg.epochs, train_acc, kC6MinTrain, test_acc, kC6MinTest, secs,
              kC6BudgetS)};
}

// --- 7 --------------------------------------------------------------------

Outcome criterion7() {
  const auto bank = vision::build_contour_bank();
  int clean_ok = 0, cached_ok = 0, uncached_ok = 0;
  for (int seed = 0; seed < kC7Seeds; ++seed) {
    std::mt19937_64 rng(static_cast<std::uint64_t>(seed));
    const GesturePair pair{kAllGestures[rng() % 10], kAllGestures[rng() % 10]};
    const auto first = vision::render_synthetic_frame(vision::scene_for_pair(pair, {}, 2 * seed));
    const auto sel = vision::select_regions(first.frame, {}, bank);
    auto hit = [](const vision::SelectedBoxes& b, const vision::RenderedScene& s) {
      return b.left && b.right && vision::iou(b.left->box, *s.left_box) >= kC7MinIou &&
             vision::iou(b.right->box, *s.right_box) >= kC7MinIou;
    };
    clean_ok += hit(sel, first);

    // Next frame: same hands plus a bystander hand away from both.
    auto spec = vision::scene_for_pair(pair, {}, 2 * seed + 1);
    vision::Distractor d;
    d.center_x = spec.width / 2.0;
    d.center_y = 90.0;
    d.glyph = kAllGestures[rng() % 10];
    d.glyph_scale = 0.9;
    spec.distractors.push_back(d);
    const auto second = vision::render_synthetic_frame(spec);
    cached_ok += hit(vision::select_regions(second.frame, sel.cache, bank), second);
    uncached_ok += hit(vision::select_regions(second.frame, {}, bank), second);
  }
  const double frac = static_cast<double>(clean_ok) / kC7Seeds;
  return {frac >= kC7MinFraction && cached_ok > uncached_ok,
          fmt("clean IoU >= %.1f on %d/%d seeds (need %.0f%%); with distractor: cache %d/%d vs no cache %d/%d",
              kC7MinIou, clean_ok, kC7Seeds, 100 * kC7MinFraction, cached_ok, kC7Seeds, uncached_ok, kC7Seeds)};
}

// --- 8 --------------------------------------------------------------------

Outcome criterion8() {
  const auto cfg = default_vocabulary();
  std::vector<std::string> failed;

  // Timed task resumes the interrupted program at its deadline.
  {
    Mission m(initial_robot_state(cfg, 3));
    m.apply(TaskSwitch{Task::kHover, 50.0});
    bool resumed = false;
    for (int i = 0; i < 15 * 60; ++i) {
      for (const auto& e : m.tick(1.0 / 15.0)) {
        if (auto* x = std::get_if<TaskExpired>(&e)) resumed = x->resumed_program == 3 && std::abs(x->time - 50.0) < 1e-6;
      }
    }
    if (!resumed || m.state().mode != RobotMode(ExecutingProgram{3})) failed.push_back("resume");
  }
  // Parameters clamp at both ends.
  {
    auto s = initial_robot_state(cfg);
    bool ok = true;
    for (const auto& [id, p] : cfg.parameters) {
      for (std::size_t i = 0; i < p.values.size() + 3; ++i) s = apply_instruction(s, ParamUpdate{id, Direction::kIncrease});
      ok &= s.parameters.at(id).index == p.values.size() - 1;
      for (std::size_t i = 0; i < p.values.size() + 3; ++i) s = apply_instruction(s, ParamUpdate{id, Direction::kDecrease});
      ok &= s.parameters.at(id).index == 0;
    }
    if (!ok) failed.push_back("clamp");
  }
  // Exactly floor(T / period) shots per window.
  int windows = 0;
  for (double period : {1.0, 0.5, 0.7, 2.0, 3.0}) {
    for (int d = 1; d <= kMaxDigit; ++d) {
      const double T = *digit_duration(d);
      auto c = cfg;
      c.snapshot_period_s = period;
      Mission m(initial_robot_state(c));
      m.tick(0.4);
      m.apply(Snapshot{T});
      int shots = 0;
      for (int i = 0; i < static_cast<int>((T + 20.0) * 15); ++i)
        for (const auto& e : m.tick(1.0 / 15.0)) shots += std::holds_alternative<SnapshotFired>(e);
      const int want = static_cast<int>(std::floor(T / period + 1e-9));
      if (shots != want) failed.push_back(fmt("snapshots T=%.0f p=%.1f got %d want %d", T, period, shots, want));
      ++windows;
    }
  }
  // Replaying the mission log reproduces the final state, twice over.
  {
    std::mt19937_64 rng(8);
    Mission m(initial_robot_state(cfg));
    for (int i = 0; i < 40; ++i) {
      m.tick(0.5 + (rng() % 40) / 10.0);
      m.apply(random_instruction(cfg, rng));
    }
    m.tick(30.0);
    auto replay = [&] {
      RobotState s = initial_robot_state(cfg);
      for (const auto& rec : m.log()) {
        if (auto* a = std::get_if<InstructionApplied>(&rec.body)) {
          if (rec.time > s.mission_time_s) s = tick(s, rec.time - s.mission_time_s).state;
          s = apply_instruction(s, a->instruction);
        }
      }
      return tick(s, m.state().mission_time_s - s.mission_time_s).state;
    };
    const auto a = replay(), b = replay();
    const bool same = a == b && a.mode == m.state().mode && a.parameters == m.state().parameters &&
                      a.snapshots_total == m.state().snapshots_total;
    if (!same) failed.push_back("log replay");
  }
  std::string detail = fmt("resume, clamp, %d snapshot windows, log replay", windows);
  for (const auto& f : failed) detail += "; FAILED " + f;
  return {failed.empty(), detail};
}

// --- 9 --------------------------------------------------------------------

Outcome criterion9() {
  // Published field-trial figures: underwater instructions 24/30 -> 80, underwater
  // gestures 128/162 -> 78, terrestrial gestures 121/132 printed as 94.5.
  const auto underwater = service::make_report(30, 24, 162, 128);
  const auto terrestrial = service::make_report(20, 20, 132, 121);
  const double ins = *underwater.instruction_accuracy_pct;
  const double ges = *underwater.gesture_accuracy_pct;
  const double ter = *terrestrial.gesture_accuracy_pct;
  const bool ins_ok = ins == 80.0;
  const bool ges_ok = ges == 78.0;
  const bool ter_documented = ter == 91.7 && ter != 94.5;
  return {ins_ok && ges_ok && ter_documented,
          fmt("24/30 -> %.1f%% (want 80.0), 128/162 -> %.1f%% (want 78.0), 121/132 -> %.1f%% (printed 94.5, "
              "computed 91.7 expected)",
              ins, ges, ter)};
}

const std::map<int, std::function<Outcome()>> kCriteria = {
    {1, criterion1}, {2, criterion2}, {3, criterion3}, {4, criterion4}, {5, criterion5},
    {6, criterion6}, {7, criterion7}, {8, criterion8}, {9, criterion9}};

}  // namespace

int main(int argc, char** argv) {
  std::vector<int> which;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--criterion") == 0 && i + 1 < argc) {
      which.push_back(std::atoi(argv[++i]));
    } else {
      std::fprintf(stderr, "usage: %s [--criterion N]...\n", argv[0]);
      return 2;
    }
  }
  if (which.empty()) for (const auto& [n, _] : kCriteria) which.push_back(n);

  int failures = 0;
  for (int n : which) {
    auto it = kCriteria.find(n);
    if (it == kCriteria.end()) {
      std::fprintf(stderr, "no criterion %d\n", n);
      return 2;
    }
    Outcome o;
    try {
      o = it->second();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    std::printf("criterion %d: %s  %s\n", n, o.pass ? "PASS" : "FAIL", o.detail.c_str());
    std::fflush(stdout);
    failures += !o.pass;
  }
  return failures == 0 ? 0 : 1;
}
