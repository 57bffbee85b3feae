#include "gestlang/classify/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "gestlang/errors.hpp"
#include "gestlang/vision/image_io.hpp"
#include "gestlang/vision/synthetic.hpp"

namespace gestlang::classify {
namespace {

constexpr Split kSplits[] = {Split::kTrain, Split::kValidation, Split::kTest};

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

}  // namespace

std::string_view to_string(Split s) {
  switch (s) {
    case Split::kTrain: return "train";
    case Split::kValidation: return "validation";
    case Split::kTest: return "test";
  }
  return "train";
}

std::vector<LabeledPatch>& LabeledDataset::split(Split s) {
  return s == Split::kTrain ? train : s == Split::kValidation ? validation : test;
}

const std::vector<LabeledPatch>& LabeledDataset::split(Split s) const {
  return s == Split::kTrain ? train : s == Split::kValidation ? validation : test;
}

void validate_dataset(const LabeledDataset& data, int classes) {
  for (Split s : kSplits) {
    for (const auto& lp : data.split(s)) {
      if (lp.label < 0 || lp.label >= classes) {
        throw Error(ErrorKind::kInvalidArgument, "label " + std::to_string(lp.label) + " out of range");
      }
      for (float v : lp.patch.values) {
        if (!std::isfinite(v) || v < 0.0f || v > 1.0f) {
          throw Error(ErrorKind::kInvalidArgument, "patch value outside [0,1]");
        }
      }
    }
  }
}

LabeledDataset generate_synthetic_dataset(const DatasetSizes& sizes, std::uint64_t seed) {
  LabeledDataset out;
  const int counts[] = {sizes.train_per_class, sizes.validation_per_class, sizes.test_per_class};
  for (int si = 0; si < 3; ++si) {
    auto& dst = out.split(kSplits[si]);
    for (int i = 0; i < counts[si]; ++i) {
      for (auto g : kAllGestures) {
        const std::uint64_t sample_seed =
            splitmix(splitmix(splitmix(seed) ^ static_cast<std::uint64_t>(si)) ^
                     (static_cast<std::uint64_t>(class_id(g)) << 32 | static_cast<std::uint32_t>(i)));
        auto patch = vision::render_training_patch(g, sample_seed);
        // Stored at 8-bit precision so the PNG directory form loads back identically.
        for (auto& v : patch.values) v = static_cast<float>(std::lround(v * 255.0f)) / 255.0f;
        dst.push_back({patch, class_id(g)});
      }
    }
  }
  return out;
}

void save_dataset(const LabeledDataset& data, const std::filesystem::path& root) {
  namespace fs = std::filesystem;
  for (Split s : kSplits) {
    std::map<int, int> next;
    for (auto g : kAllGestures) fs::create_directories(root / std::string(to_string(s)) / std::string(to_string(g)));
    for (const auto& lp : data.split(s)) {
      auto g = gesture_from_id(lp.label);
      if (!g) throw Error(ErrorKind::kInvalidArgument, "label out of range");
      const int n = next[lp.label]++;
      vision::write_patch_png(root / std::string(to_string(s)) / std::string(to_string(*g)) /
                                  (std::to_string(n) + ".png"),
                              lp.patch);
    }
  }
}

LabeledDataset load_dataset(const std::filesystem::path& root) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(root)) throw Error(ErrorKind::kIo, "dataset directory not found: " + root.string());
  LabeledDataset out;
  for (Split s : kSplits) {
    const fs::path dir = root / std::string(to_string(s));
    if (!fs::is_directory(dir)) continue;
    for (auto g : kAllGestures) {
      const fs::path cls = dir / std::string(to_string(g));
      if (!fs::is_directory(cls)) continue;
      std::vector<std::pair<int, fs::path>> files;
      for (const auto& e : fs::directory_iterator(cls)) {
        if (e.path().extension() != ".png") continue;
        const std::string stem = e.path().stem().string();
        const bool numeric = !stem.empty() && std::all_of(stem.begin(), stem.end(), ::isdigit);
        files.push_back({numeric ? std::stoi(stem) : -1, e.path()});
      }
      // Numeric order so a save/load round trip preserves sample order.
      std::sort(files.begin(), files.end());
      for (const auto& [n, path] : files) out.split(s).push_back({vision::read_patch_png(path), class_id(g)});
    }
  }
  return out;
}

}  // namespace gestlang::classify
