#include "gestlang/config_io.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <set>

#include "gestlang/errors.hpp"

namespace gestlang {
namespace {

using nlohmann::json;

void reject_unknown_keys(const json& obj, const std::set<std::string>& allowed,
                         const std::string& prefix, std::vector<Violation>& out) {
  for (const auto& [key, _] : obj.items()) {
    if (!allowed.contains(key)) out.push_back({"unknown-key", prefix + key});
  }
}

std::optional<int> parse_id(const std::string& s) {
  int v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

}  // namespace

json config_to_json(const VocabularyConfig& cfg) {
  json doc;
  doc["schema_version"] = kConfigSchemaVersion;

  json gestures = json::array();
  for (auto g : kAllGestures) gestures.push_back(std::string(to_string(g)));
  doc["gestures"] = gestures;

  json tokens = json::array();
  for (const auto& [pair, token] : cfg.pair_to_token) {
    tokens.push_back({{"left", std::string(to_string(pair.left))},
                      {"right", std::string(to_string(pair.right))},
                      {"token", to_string(token)}});
  }
  doc["tokens"] = tokens;

  json programs = json::object();
  for (const auto& [id, name] : cfg.programs) programs[std::to_string(id)] = name;
  doc["programs"] = programs;

  json params = json::object();
  for (const auto& [id, p] : cfg.parameters) {
    params[std::to_string(id)] = {{"name", p.name}, {"values", p.values}, {"index", p.index}};
  }
  doc["parameters"] = params;

  doc["decoder"] = {{"debounce_frames", cfg.debounce_frames},
                    {"snapshot_period_s", cfg.snapshot_period_s},
                    {"frame_period_s", cfg.frame_period_s}};
  return doc;
}

ConfigLoadResult config_from_json(const json& doc) {
  ConfigLoadResult r;
  auto& cfg = r.config;
  auto& out = r.violations;

  if (!doc.is_object()) {
    out.push_back({"invalid-value", "<root>"});
    return r;
  }
  reject_unknown_keys(doc, {"schema_version", "gestures", "tokens", "programs", "parameters", "decoder"},
                      "", out);

  if (!doc.contains("schema_version")) {
    out.push_back({"missing-key", "schema_version"});
  } else if (!doc["schema_version"].is_number_integer() ||
             doc["schema_version"].get<int>() != kConfigSchemaVersion) {
    out.push_back({"unsupported-schema-version", "schema_version"});
  }

  if (doc.contains("gestures")) {
    const auto& g = doc["gestures"];
    bool ok = g.is_array() && g.size() == kGestureClassCount;
    for (std::size_t i = 0; ok && i < g.size(); ++i) {
      ok = g[i].is_string() && g[i].get<std::string>() == to_string(kAllGestures[i]);
    }
    // The gesture list documents the recognizer's output order; it is fixed.
    if (!ok) out.push_back({"invalid-value", "gestures"});
  }

  if (doc.contains("tokens")) {
    const auto& toks = doc["tokens"];
    if (!toks.is_array()) {
      out.push_back({"invalid-value", "tokens"});
    } else {
      for (std::size_t i = 0; i < toks.size(); ++i) {
        const auto& e = toks[i];
        const std::string key = "tokens[" + std::to_string(i) + "]";
        if (!e.is_object()) {
          out.push_back({"invalid-value", key});
          continue;
        }
        reject_unknown_keys(e, {"left", "right", "token"}, key + ".", out);
        auto str = [&](const char* k) -> std::string {
          return e.contains(k) && e[k].is_string() ? e[k].get<std::string>() : std::string{};
        };
        auto left = parse_gesture(str("left"));
        auto right = parse_gesture(str("right"));
        auto token = parse_token(str("token"));
        if (!left) out.push_back({"unknown-gesture", key + ".left"});
        if (!right) out.push_back({"unknown-gesture", key + ".right"});
        if (!token) out.push_back({"unknown-token", key + ".token"});
        if (!left || !right || !token) continue;
        GesturePair pair{*left, *right};
        if (cfg.pair_to_token.contains(pair)) {
          out.push_back({"duplicate-pair", key});
          continue;
        }
        cfg.pair_to_token[pair] = *token;
      }
    }
  }

  if (doc.contains("programs")) {
    const auto& progs = doc["programs"];
    if (!progs.is_object()) {
      out.push_back({"invalid-value", "programs"});
    } else {
      for (const auto& [k, v] : progs.items()) {
        auto id = parse_id(k);
        if (!id || !v.is_string()) {
          out.push_back({"invalid-value", "programs." + k});
          continue;
        }
        cfg.programs[*id] = v.get<std::string>();
      }
    }
  }

  if (doc.contains("parameters")) {
    const auto& params = doc["parameters"];
    if (!params.is_object()) {
      out.push_back({"invalid-value", "parameters"});
    } else {
      for (const auto& [k, v] : params.items()) {
        const std::string key = "parameters." + k;
        auto id = parse_id(k);
        if (!id || !v.is_object()) {
          out.push_back({"invalid-value", key});
          continue;
        }
        reject_unknown_keys(v, {"name", "values", "index"}, key + ".", out);
        ParameterSpec p;
        if (v.contains("name") && v["name"].is_string()) p.name = v["name"].get<std::string>();
        if (!v.contains("values") || !v["values"].is_array()) {
          out.push_back({"invalid-value", key + ".values"});
        } else {
          for (const auto& x : v["values"]) {
            if (!x.is_number()) {
              out.push_back({"invalid-value", key + ".values"});
              break;
            }
            p.values.push_back(x.get<double>());
          }
        }
        if (v.contains("index")) {
          if (!v["index"].is_number_unsigned()) {
            out.push_back({"invalid-value", key + ".index"});
          } else {
            p.index = v["index"].get<std::size_t>();
          }
        }
        cfg.parameters[*id] = std::move(p);
      }
    }
  }

  if (doc.contains("decoder")) {
    const auto& dec = doc["decoder"];
    if (!dec.is_object()) {
      out.push_back({"invalid-value", "decoder"});
    } else {
      reject_unknown_keys(dec, {"debounce_frames", "snapshot_period_s", "frame_period_s"}, "decoder.", out);
      if (dec.contains("debounce_frames")) {
        if (dec["debounce_frames"].is_number_integer()) {
          cfg.debounce_frames = dec["debounce_frames"].get<int>();
        } else {
          out.push_back({"invalid-value", "decoder.debounce_frames"});
        }
      }
      for (auto [name, field] : {std::pair{"snapshot_period_s", &cfg.snapshot_period_s},
                                 std::pair{"frame_period_s", &cfg.frame_period_s}}) {
        if (!dec.contains(name)) continue;
        if (dec[name].is_number()) {
          *field = dec[name].get<double>();
        } else {
          out.push_back({"invalid-value", std::string("decoder.") + name});
        }
      }
    }
  }

  for (auto& v : validate_config(cfg)) {
    if (std::find(out.begin(), out.end(), v) == out.end()) out.push_back(std::move(v));
  }
  return r;
}

ConfigLoadResult load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kIo, "cannot open config file " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::kConfigParse, path.string() + ": " + e.what());
  }
  return config_from_json(doc);
}

void save_config(const std::filesystem::path& path, const VocabularyConfig& cfg) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::kIo, "cannot write config file " + path.string());
  out << config_to_json(cfg).dump(2) << '\n';
}

}  // namespace gestlang
