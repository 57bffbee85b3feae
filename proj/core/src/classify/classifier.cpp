#include "gestlang/classify/classifier.hpp"

#include <algorithm>

#include "gestlang/errors.hpp"
#include "gestlang/vision/synthetic.hpp"

namespace gestlang::classify {

CnnClassifier::CnnClassifier(std::shared_ptr<const CnnModel> model) : model_(std::move(model)) {
  if (!model_) throw Error(ErrorKind::kModelConfig, "no model");
  if (model_->spec().classes != kGestureClassCount || model_->spec().input_size != vision::Patch::kSize ||
      model_->spec().in_channels != vision::Patch::kChannels) {
    throw Error(ErrorKind::kModelConfig, "model is not a 10-class 32x32x3 recognizer");
  }
}

Classification CnnClassifier::classify(const vision::FrameRaster& frame, const vision::HandRegion& region) const {
  const auto box = vision::pad_box(region.region.box, vision::kPatchPadding, frame.width(), frame.height());
  const auto probs = forward(*model_, vision::crop_patch(frame, box));
  const auto best = std::max_element(probs.begin(), probs.end());
  return {*gesture_from_id(static_cast<int>(best - probs.begin())), static_cast<double>(*best)};
}

Classification ContourClassifier::classify(const vision::FrameRaster&, const vision::HandRegion& region) const {
  return {region.closest, 1.0 / (1.0 + region.region.score)};
}

FrameRecognizer::FrameRecognizer(std::shared_ptr<const GestureClassifier> classifier,
                                 std::shared_ptr<const vision::ContourBank> bank, vision::RegionOptions options)
    : classifier_(std::move(classifier)), bank_(std::move(bank)), options_(options) {
  if (!classifier_) throw Error(ErrorKind::kInvalidArgument, "no classifier");
  if (!bank_ || bank_->empty()) throw Error(ErrorKind::kInvalidArgument, "empty contour bank");
}

FrameObservation FrameRecognizer::observe(FrameIndex frame_index, const vision::FrameRaster& frame) {
  auto sel = vision::select_hand_regions(frame, cache_, *bank_, options_);
  cache_ = sel.cache;
  FrameObservation out;
  out.observation.frame_index = frame_index;
  out.observation.confidence = 0.0;
  if (sel.left) out.left_box = sel.left->region;
  if (sel.right) out.right_box = sel.right->region;
  if (sel.left && sel.right) {
    const auto l = classifier_->classify(frame, *sel.left);
    const auto r = classifier_->classify(frame, *sel.right);
    out.observation.pair = GesturePair{l.gesture, r.gesture};
    out.observation.confidence = std::min(l.confidence, r.confidence);
  }
  return out;
}

}  // namespace gestlang::classify
