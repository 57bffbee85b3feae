#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string_view>
#include <vector>

#include "gestlang/classify/cnn.hpp"

namespace gestlang::classify {

enum class Split { kTrain, kValidation, kTest };

std::string_view to_string(Split s);

struct LabeledDataset {
  std::vector<LabeledPatch> train;
  std::vector<LabeledPatch> validation;
  std::vector<LabeledPatch> test;

  std::vector<LabeledPatch>& split(Split s);
  const std::vector<LabeledPatch>& split(Split s) const;
};

// Throws Error(kInvalidArgument) on a label outside [0, classes) or a
// non-finite or out-of-range patch value.
void validate_dataset(const LabeledDataset& data, int classes = 10);

struct DatasetSizes {
  int train_per_class = 200;
  int validation_per_class = 20;
  int test_per_class = 40;
};

// Augmented synthetic glyph patches. Every sample has its own seed derived
// from (seed, split, class, index), so splits never share a sample.
LabeledDataset generate_synthetic_dataset(const DatasetSizes& sizes, std::uint64_t seed);

// <root>/<split>/<CLASS_NAME>/<n>.png
void save_dataset(const LabeledDataset& data, const std::filesystem::path& root);
LabeledDataset load_dataset(const std::filesystem::path& root);

}  // namespace gestlang::classify
