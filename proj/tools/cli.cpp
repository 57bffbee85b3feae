#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <thread>

#include "gestlang/classify/training.hpp"
#include "gestlang/classify/weights_io.hpp"
#include "gestlang/config_io.hpp"
#include "gestlang/errors.hpp"
#include "gestlang/noise.hpp"
#include "gestlang/script.hpp"
#include "gestlang/service/experiments.hpp"
#include "gestlang/service/protocol.hpp"
#include "gestlang/service/server.hpp"
#include "gestlang/vision/image_io.hpp"
#include "gestlang/vision/synthetic.hpp"

namespace gestlang::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct Common {
  std::string config_path;
  std::uint64_t seed = 0;
  std::string out_dir;
};

VocabularyConfig load_vocabulary(const Common& c) {
  if (c.config_path.empty()) return default_vocabulary();
  auto loaded = load_config(c.config_path);
  if (!loaded.ok()) {
    std::string msg = c.config_path + ": ";
    for (std::size_t i = 0; i < loaded.violations.size(); ++i) {
      if (i) msg += "; ";
      msg += loaded.violations[i].to_string();
    }
    throw Error(ErrorKind::kConfigParse, msg);
  }
  return loaded.config;
}

fs::path out_dir(const Common& c) {
  fs::path p = c.out_dir;
  std::error_code ec;
  fs::create_directories(p, ec);
  if (ec) throw Error(ErrorKind::kIo, "cannot create " + p.string() + ": " + ec.message());
  return p;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream f(path);
  if (!f) throw Error(ErrorKind::kIo, "cannot write " + path.string());
  f << text;
  if (!f) throw Error(ErrorKind::kIo, "write failed for " + path.string());
}

void write_jsonl(std::ostream& os, const std::vector<json>& lines) {
  for (const auto& l : lines) os << l.dump() << "\n";
}

// Token file to TokenInputs, keeping an optional per-line "truth" token.
std::vector<service::TokenInput> read_token_inputs(const VocabularyConfig& cfg, const fs::path& path) {
  std::vector<service::TokenInput> out;
  const auto lines = read_json_lines(path);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    try {
      service::TokenInput in;
      in.observation = to_token_observation(cfg, pair_observation_from_json(lines[i]));
      if (lines[i].contains("truth")) {
        const auto& t = lines[i]["truth"];
        if (t.is_null()) {
          in.truth = std::optional<LanguageToken>{};
        } else {
          auto tok = parse_token(t.get<std::string>());
          if (!tok) throw Error(ErrorKind::kFormat, "unknown truth token " + t.get<std::string>());
          in.truth = tok;
        }
      }
      out.push_back(in);
    } catch (const json::exception& e) {
      throw Error(ErrorKind::kFormat, path.string() + ": record " + std::to_string(i + 1) + ": " + e.what());
    }
  }
  return out;
}

std::vector<Instruction> read_expected(const fs::path& path) {
  std::vector<Instruction> out;
  for (const auto& line : read_json_lines(path)) {
    out.push_back(instruction_from_json(line.contains("instruction") ? line["instruction"] : line));
  }
  return out;
}

// Instructions a clean rendition of the token script decodes to.
std::vector<Instruction> expected_from_script(const VocabularyConfig& cfg, const std::vector<LanguageToken>& tokens) {
  StreamLayout layout;
  layout.random_gaps = false;
  const auto stream = build_stream(cfg, tokens, layout, 0);
  const auto obs = to_token_observations(cfg, stream.frames);
  return decode_stream(cfg, obs).instructions;
}

json evaluation_json(const classify::Evaluation& ev) {
  json names = json::array();
  for (auto g : kAllGestures) names.push_back(std::string(to_string(g)));
  return {{"accuracy", ev.accuracy}, {"total", ev.total}, {"classes", names}, {"confusion", ev.confusion}};
}

std::string confusion_csv(const classify::Evaluation& ev) {
  std::string s = "true\\predicted";
  for (auto g : kAllGestures) s += "," + std::string(to_string(g));
  s += "\n";
  for (std::size_t i = 0; i < ev.confusion.size(); ++i) {
    s += std::string(to_string(kAllGestures[i]));
    for (int v : ev.confusion[i]) s += "," + std::to_string(v);
    s += "\n";
  }
  return s;
}

classify::LabeledDataset dataset_or_generate(const std::string& dir, std::uint64_t seed) {
  if (!dir.empty()) return classify::load_dataset(dir);
  return classify::generate_synthetic_dataset({}, seed);
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"gestlang: gesture-token instruction pipeline tools", "gestlang"};
  app.require_subcommand(1);
  app.fallthrough();
  Common common;
  app.add_option("--config", common.config_path, "Vocabulary config (JSON)")->check(CLI::ExistingFile);
  app.add_option("--seed", common.seed, "Seed for every random choice");

  auto add_out = [&](CLI::App* sub, bool required) {
    auto* o = sub->add_option("--out", common.out_dir, "Output directory");
    if (required) o->required();
  };

  // gen-dataset
  classify::DatasetSizes sizes;
  auto* gen = app.add_subcommand("gen-dataset", "Write synthetic glyph patches as <out>/<split>/<CLASS>/<n>.png");
  gen->add_option("--train", sizes.train_per_class, "Training patches per class")->check(CLI::NonNegativeNumber);
  gen->add_option("--validation", sizes.validation_per_class, "Validation patches per class")
      ->check(CLI::NonNegativeNumber);
  gen->add_option("--test", sizes.test_per_class, "Test patches per class")->check(CLI::NonNegativeNumber);
  add_out(gen, true);

  // train
  classify::TrainConfig tcfg;
  std::string data_dir;
  auto* tr = app.add_subcommand("train", "Train the CNN; writes <out>/weights.bin and <out>/history.json");
  tr->add_option("--data", data_dir, "Dataset directory (default: generate from --seed)")->check(CLI::ExistingDirectory);
  tr->add_option("--epochs", tcfg.epochs)->check(CLI::PositiveNumber);
  tr->add_option("--lr", tcfg.learning_rate)->check(CLI::NonNegativeNumber);
  tr->add_option("--batch", tcfg.batch_size)->check(CLI::PositiveNumber);
  bool quiet = false;
  tr->add_flag("--quiet", quiet, "No per-epoch progress lines");
  add_out(tr, true);

  // eval
  std::string weights_path, split_name = "test";
  auto* ev = app.add_subcommand("eval", "Evaluate weights; writes <out>/evaluation.json and <out>/confusion.csv");
  ev->add_option("--weights", weights_path, "Weight file")->required()->check(CLI::ExistingFile);
  ev->add_option("--data", data_dir, "Dataset directory (default: generate from --seed)")->check(CLI::ExistingDirectory);
  ev->add_option("--split", split_name)->check(CLI::IsMember({"train", "validation", "test"}));
  add_out(ev, false);

  // decode
  std::string input_path;
  auto* dec = app.add_subcommand("decode", "Decode a token stream to an instruction log");
  dec->add_option("--input", input_path, "Token stream (JSON lines)")->required()->check(CLI::ExistingFile);
  add_out(dec, false);

  // perturb
  double p = 0.0, dropout = 0.0;
  auto* per = app.add_subcommand("perturb", "Corrupt a clean token stream");
  per->add_option("--input", input_path, "Token stream (JSON lines)")->required()->check(CLI::ExistingFile);
  per->add_option("--p", p, "Per-frame substitution rate")->check(CLI::Range(0.0, 1.0));
  per->add_option("--dropout", dropout, "Per-frame dropout rate")->check(CLI::Range(0.0, 1.0));
  add_out(per, false);

  // synth-tokens / synth-video
  std::string script_text;
  StreamLayout layout;
  auto* st = app.add_subcommand("synth-tokens", "Token stream for a scripted gesture program");
  st->add_option("--script", script_text, "e.g. \"STOP, HOVER, DIGIT(5), GO\"")->required();
  st->add_option("--dwell", layout.dwell_frames)->check(CLI::PositiveNumber);
  st->add_option("--gap", layout.gap_frames)->check(CLI::NonNegativeNumber);
  add_out(st, false);

  vision::VideoOptions video;
  auto* sv = app.add_subcommand("synth-video", "Rendered frames for a scripted gesture program");
  sv->add_option("--script", script_text, "e.g. \"STOP, HOVER, DIGIT(5), GO\"")->required();
  sv->add_option("--dwell", layout.dwell_frames)->check(CLI::PositiveNumber);
  sv->add_option("--gap", layout.gap_frames)->check(CLI::NonNegativeNumber);
  sv->add_option("--noise", video.noise_sigma)->check(CLI::Range(0.0, 1.0));
  sv->add_option("--width", video.width)->check(CLI::Range(64, 4096));
  sv->add_option("--height", video.height)->check(CLI::Range(64, 4096));
  sv->add_flag("--clutter", video.clutter);
  add_out(sv, true);

  // replay
  std::string frames_dir, expected_path, classifier_name = "contour";
  service::NoiseTrialOptions trials;
  int random_trials = 0;
  auto* rp = app.add_subcommand("replay", "Run tokens or frames through a local pipeline and report metrics");
  auto* rp_tokens = rp->add_option("--tokens", input_path, "Token stream (JSON lines)")->check(CLI::ExistingFile);
  auto* rp_frames = rp->add_option("--frames", frames_dir, "Frame directory written by synth-video")
                        ->check(CLI::ExistingDirectory);
  auto* rp_random = rp->add_option("--random", random_trials, "Random scripted instructions under token noise")
                        ->check(CLI::PositiveNumber);
  rp_tokens->excludes(rp_frames)->excludes(rp_random);
  rp_frames->excludes(rp_random);
  rp->add_option("--expected", expected_path, "Expected instructions (JSON lines)")->check(CLI::ExistingFile);
  rp->add_option("--script", script_text, "Expected instruction as a token script");
  rp->add_option("--classifier", classifier_name)->check(CLI::IsMember({"contour", "cnn"}));
  rp->add_option("--weights", weights_path, "CNN weights for --classifier cnn")->check(CLI::ExistingFile);
  rp->add_option("--p", trials.substitution_rate, "Substitution rate for --random")->check(CLI::Range(0.0, 1.0));
  rp->add_option("--dropout", trials.dropout_rate, "Dropout rate for --random")->check(CLI::Range(0.0, 1.0));
  rp->add_option("--dwell", trials.dwell_frames, "Frames per token for --random")->check(CLI::PositiveNumber);
  rp->add_option("--gap", trials.gap_frames, "Absent frames between tokens for --random")
      ->check(CLI::NonNegativeNumber);
  add_out(rp, false);

  // render-scene
  std::string scene_path;
  auto* rs = app.add_subcommand("render-scene", "Render a scene description; writes <out>/frame.png and boxes.json");
  rs->add_option("--scene", scene_path, "Scene description (JSON)")->required()->check(CLI::ExistingFile);
  add_out(rs, true);

  // serve
  std::uint16_t port = 7878;
  std::string address = "127.0.0.1";
  auto* sr = app.add_subcommand("serve", "Serve the line-delimited JSON protocol over TCP");
  sr->add_option("--port", port, "TCP port (0 picks one)");
  sr->add_option("--address", address, "Listen address");
  sr->add_option("--weights", weights_path, "CNN weights enabling cnn sessions")->check(CLI::ExistingFile);

  auto fail = [&](std::string_view kind, const std::string& message, int code) {
    err << json{{"error", {{"kind", kind}, {"message", message}}}}.dump() << "\n";
    return code;
  };

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    return fail("usage", e.what(), kExitUsage);
  }

  try {
    const VocabularyConfig cfg = load_vocabulary(common);

    if (*gen) {
      const auto data = classify::generate_synthetic_dataset(sizes, common.seed);
      const auto dir = out_dir(common);
      classify::save_dataset(data, dir);
      const json manifest{{"seed", common.seed},
                          {"train", data.train.size()},
                          {"validation", data.validation.size()},
                          {"test", data.test.size()}};
      write_text(dir / "manifest.json", manifest.dump(2) + "\n");
      out << manifest.dump() << "\n";
      return kExitOk;
    }

    if (*tr) {
      tcfg.seed = common.seed;
      const auto data = dataset_or_generate(data_dir, common.seed);
      const auto dir = out_dir(common);
      auto model = classify::CnnModel::initialized({}, common.seed);
      auto result = classify::train(std::move(model), data, tcfg, [&](const classify::EpochStats& s) {
        if (quiet) return;
        char buf[160];
        std::snprintf(buf, sizeof buf, "epoch %3d  loss %.5f  train_acc %.4f  val_acc %s\n", s.epoch, s.train_loss,
                      s.train_accuracy,
                      s.validation_accuracy ? std::to_string(*s.validation_accuracy).c_str() : "n/a");
        out << buf << std::flush;
      });
      classify::save_weights(result.model, dir / "weights.bin");
      json hist = json::array();
      for (const auto& s : result.history) {
        hist.push_back({{"epoch", s.epoch},
                        {"train_loss", s.train_loss},
                        {"train_accuracy", s.train_accuracy},
                        {"validation_accuracy",
                         s.validation_accuracy ? json(*s.validation_accuracy) : json(nullptr)}});
      }
      const json summary{{"learning_rate", tcfg.learning_rate}, {"batch_size", tcfg.batch_size},
                         {"epochs", tcfg.epochs},           {"seed", tcfg.seed},
                         {"parameters", result.model.parameter_count()}, {"history", hist}};
      write_text(dir / "history.json", summary.dump(2) + "\n");
      return kExitOk;
    }

    if (*ev) {
      const auto model = classify::load_weights(weights_path);
      const auto data = dataset_or_generate(data_dir, common.seed);
      const auto split = split_name == "train" ? classify::Split::kTrain
                         : split_name == "validation" ? classify::Split::kValidation
                                                      : classify::Split::kTest;
      const auto e = classify::evaluate(model, data.split(split));
      auto j = evaluation_json(e);
      j["split"] = split_name;
      if (!common.out_dir.empty()) {
        const auto dir = out_dir(common);
        write_text(dir / "evaluation.json", j.dump(2) + "\n");
        write_text(dir / "confusion.csv", confusion_csv(e));
      }
      out << json{{"split", split_name}, {"accuracy", e.accuracy}, {"total", e.total}}.dump() << "\n";
      return kExitOk;
    }

    if (*dec) {
      const auto stream = read_token_stream(input_path);
      const auto result = decode_stream(cfg, to_token_observations(cfg, stream));
      const auto log = instruction_log(result.events);
      if (common.out_dir.empty()) {
        for (const auto& l : log) {
          out << json{{"frame_index", l.frame_index}, {"instruction", to_json(l.instruction)}}.dump() << "\n";
        }
      } else {
        write_instruction_log(out_dir(common) / "instructions.jsonl", log);
      }
      return kExitOk;
    }

    if (*per) {
      auto lines = read_json_lines(input_path);
      std::vector<PairObservation> stream;
      for (const auto& l : lines) stream.push_back(pair_observation_from_json(l));
      const auto noisy = perturb_stream(cfg, stream, NoiseModel{p, dropout, common.seed});
      // Rewrite only the gesture fields so extra keys such as "truth" survive.
      for (std::size_t i = 0; i < lines.size(); ++i) {
        const auto j = to_json(noisy[i]);
        lines[i]["left_gesture"] = j["left_gesture"];
        lines[i]["right_gesture"] = j["right_gesture"];
      }
      if (common.out_dir.empty()) {
        write_jsonl(out, lines);
      } else {
        write_json_lines(out_dir(common) / "tokens.jsonl", lines);
      }
      return kExitOk;
    }

    if (*st || *sv) {
      const auto tokens = parse_script(script_text);
      const auto stream = build_stream(cfg, tokens, layout, common.seed);
      std::vector<json> lines;
      for (std::size_t i = 0; i < stream.frames.size(); ++i) {
        auto j = to_json(stream.frames[i]);
        j["truth"] = stream.truth[i] ? json(to_string(*stream.truth[i])) : json(nullptr);
        lines.push_back(std::move(j));
      }
      std::vector<json> expected;
      for (const auto& ins : expected_from_script(cfg, tokens)) expected.push_back(to_json(ins));

      if (*st) {
        if (common.out_dir.empty()) {
          write_jsonl(out, lines);
        } else {
          const auto dir = out_dir(common);
          write_json_lines(dir / "tokens.jsonl", lines);
          write_json_lines(dir / "expected.jsonl", expected);
        }
        return kExitOk;
      }

      const auto dir = out_dir(common);
      std::mt19937_64 rng(common.seed);
      for (std::size_t i = 0; i < stream.frames.size(); ++i) {
        const auto scene = vision::scene_for_pair(stream.frames[i].pair, video, rng());
        const auto r = vision::render_synthetic_frame(scene);
        char name[32];
        std::snprintf(name, sizeof name, "frame_%06lld.png", static_cast<long long>(stream.frames[i].frame_index));
        vision::write_png(dir / name, r.frame);
        lines[i]["file"] = name;
      }
      write_json_lines(dir / "frames.jsonl", lines);
      write_json_lines(dir / "expected.jsonl", expected);
      out << json{{"frames", stream.frames.size()}, {"out", dir.string()}}.dump() << "\n";
      return kExitOk;
    }

    if (*rp) {
      auto resources = service::default_resources();
      const auto choice = *service::parse_classifier(classifier_name);
      if (choice == service::ClassifierChoice::kCnn) {
        if (weights_path.empty()) return fail("usage", "--classifier cnn needs --weights", kExitUsage);
        resources.cnn = std::make_shared<const classify::CnnModel>(classify::load_weights(weights_path));
      }
      service::PipelineService svc(resources);

      if (random_trials > 0) {
        trials.trials = random_trials;
        trials.seed = common.seed;
        const auto result = service::run_noise_trials(svc, cfg, trials);
        const auto j = service::to_json(result.report);
        if (!common.out_dir.empty()) write_text(out_dir(common) / "metrics.json", j.dump(2) + "\n");
        out << service::format_report(result.report);
        return kExitOk;
      }
      if (input_path.empty() && frames_dir.empty()) {
        return fail("usage", "replay needs --tokens, --frames or --random", kExitUsage);
      }

      std::optional<std::vector<Instruction>> expected;
      if (!expected_path.empty()) {
        expected = read_expected(expected_path);
      } else if (!script_text.empty()) {
        expected = expected_from_script(cfg, parse_script(script_text));
      } else if (!frames_dir.empty() && fs::exists(fs::path(frames_dir) / "expected.jsonl")) {
        expected = read_expected(fs::path(frames_dir) / "expected.jsonl");
      }

      const auto id = *svc.create_session(cfg, choice).session_id;
      std::vector<service::ServiceMessage> messages;
      if (!input_path.empty()) {
        const auto inputs = read_token_inputs(cfg, input_path);
        messages = svc.ingest_tokens(id, inputs);
      } else {
        const fs::path dir = frames_dir;
        if (!fs::exists(dir / "frames.jsonl")) throw Error(ErrorKind::kIo, "no frames.jsonl in " + dir.string());
        for (const auto& line : read_json_lines(dir / "frames.jsonl")) {
          const auto frame = vision::read_png(dir / line.at("file").get<std::string>());
          std::optional<std::optional<LanguageToken>> truth;
          if (line.contains("truth")) {
            truth = line["truth"].is_null() ? std::optional<LanguageToken>{}
                                            : parse_token(line["truth"].get<std::string>());
          }
          auto ms = svc.ingest_frame(id, line.at("frame_index").get<FrameIndex>(), frame, truth);
          messages.insert(messages.end(), ms.begin(), ms.end());
        }
      }
      const auto report = svc.metrics_report(id, expected);
      if (!common.out_dir.empty()) {
        const auto dir = out_dir(common);
        std::vector<json> lines;
        for (const auto& m : messages) lines.push_back(service::to_json(m));
        write_json_lines(dir / "messages.jsonl", lines);
        write_text(dir / "metrics.json", service::to_json(report).dump(2) + "\n");
      }
      for (const auto& ins : svc.emitted_instructions(id)) out << to_string(ins) << "\n";
      out << service::format_report(report);
      return kExitOk;
    }

    if (*rs) {
      std::ifstream f(scene_path);
      json j;
      try {
        j = json::parse(f);
      } catch (const json::parse_error& e) {
        throw Error(ErrorKind::kFormat, scene_path + ": " + e.what());
      }
      const auto scene = vision::render_synthetic_frame(vision::scene_from_json(j));
      const auto dir = out_dir(common);
      vision::write_png(dir / "frame.png", scene.frame);
      auto box = [](const std::optional<vision::Box>& b) {
        return b ? json{{"x", b->x}, {"y", b->y}, {"w", b->w}, {"h", b->h}} : json(nullptr);
      };
      write_text(dir / "boxes.json", json{{"left", box(scene.left_box)}, {"right", box(scene.right_box)}}.dump(2) + "\n");
      return kExitOk;
    }

    if (*sr) {
      auto resources = service::default_resources();
      if (!weights_path.empty()) {
        resources.cnn = std::make_shared<const classify::CnnModel>(classify::load_weights(weights_path));
      }
      service::PipelineService svc(resources);
      service::Server server(svc, port, address);
      out << json{{"listening", address}, {"port", server.port()}}.dump() << std::endl;
      server.run();
      return kExitOk;
    }
  } catch (const Error& e) {
    return fail(to_string(e.kind()), e.what(), kExitFailure);
  } catch (const json::exception& e) {
    return fail("format", e.what(), kExitFailure);
  } catch (const std::exception& e) {
    return fail("internal", e.what(), kExitFailure);
  }
  return fail("usage", "no subcommand", kExitUsage);
}

}  // namespace gestlang::cli
