#pragma once

#include <filesystem>
#include <vector>

#include <nlohmann/json.hpp>

#include "gestlang/vocabulary.hpp"

namespace gestlang {

inline constexpr int kConfigSchemaVersion = 1;

struct ConfigLoadResult {
  VocabularyConfig config;
  // Parse-level problems (unknown keys, bad spellings) followed by
  // validate_config() findings.
  std::vector<Violation> violations;

  bool ok() const { return violations.empty(); }
};

nlohmann::json config_to_json(const VocabularyConfig& cfg);
ConfigLoadResult config_from_json(const nlohmann::json& doc);

// Throws Error(kIo) if the file cannot be read and Error(kConfigParse) if it
// is not JSON. Schema problems come back as violations.
ConfigLoadResult load_config(const std::filesystem::path& path);
void save_config(const std::filesystem::path& path, const VocabularyConfig& cfg);

}  // namespace gestlang
