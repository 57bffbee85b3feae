#pragma once

#include <memory>
#include <optional>
#include <string>

#include "gestlang/classify/cnn.hpp"
#include "gestlang/codec.hpp"
#include "gestlang/vision/region_selection.hpp"

namespace gestlang::classify {

struct Classification {
  GestureClass gesture = GestureClass::kDigit0;
  double confidence = 0.0;  // in [0,1]
};

// One hand region of one frame to one gesture class.
class GestureClassifier {
 public:
  virtual ~GestureClassifier() = default;
  virtual std::string name() const = 0;
  virtual Classification classify(const vision::FrameRaster& frame, const vision::HandRegion& region) const = 0;
};

// Crops the padded hand box and runs the CNN.
class CnnClassifier final : public GestureClassifier {
 public:
  explicit CnnClassifier(std::shared_ptr<const CnnModel> model);
  std::string name() const override { return "cnn"; }
  Classification classify(const vision::FrameRaster& frame, const vision::HandRegion& region) const override;

 private:
  std::shared_ptr<const CnnModel> model_;
};

// Takes the nearest contour-bank entry that region selection already found.
class ContourClassifier final : public GestureClassifier {
 public:
  std::string name() const override { return "contour"; }
  Classification classify(const vision::FrameRaster& frame, const vision::HandRegion& region) const override;
};

struct FrameObservation {
  PairObservation observation;
  std::optional<vision::RegionBox> left_box;
  std::optional<vision::RegionBox> right_box;
};

// Region selection plus per-hand classification with a cache carried across
// frames. A frame yields a pair only when both hands are found.
class FrameRecognizer {
 public:
  FrameRecognizer(std::shared_ptr<const GestureClassifier> classifier,
                  std::shared_ptr<const vision::ContourBank> bank, vision::RegionOptions options = {});

  FrameObservation observe(FrameIndex frame_index, const vision::FrameRaster& frame);
  const vision::RegionCache& cache() const { return cache_; }
  const GestureClassifier& classifier() const { return *classifier_; }

 private:
  std::shared_ptr<const GestureClassifier> classifier_;
  std::shared_ptr<const vision::ContourBank> bank_;
  vision::RegionOptions options_;
  vision::RegionCache cache_;
};

}  // namespace gestlang::classify
