#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "gestlang/vision/raster.hpp"

namespace gestlang::classify {

// Layer widths. The defaults are the 10-class gesture recognizer; tests use
// reduced variants.
struct CnnSpec {
  int input_size = 32;  // square input side, divisible by 4
  int in_channels = 3;
  int conv1_channels = 16;
  int conv2_channels = 16;
  int kernel = 5;  // odd, same padding
  int hidden = 64;
  int classes = 10;

  int flat_size() const { return (input_size / 4) * (input_size / 4) * conv2_channels; }
  int input_values() const { return input_size * input_size * in_channels; }
  friend bool operator==(const CnnSpec&, const CnnSpec&) = default;
};

// Throws Error(kModelConfig) on non-positive widths, an even kernel or an
// input side not divisible by 4.
void validate_spec(const CnnSpec& spec);

template <class T>
struct Tensor {
  std::string name;
  std::vector<int> shape;
  std::vector<T> data;

  friend bool operator==(const Tensor&, const Tensor&) = default;
};

inline constexpr double kNormEpsilon = 1e-5;

// conv -> relu -> maxpool -> norm -> conv -> relu -> maxpool -> norm -> fc ->
// relu -> fc -> softmax. Activations are height x width x channel. Conv
// weights are [ky][kx][in][out], fc weights [in][out]. The norm layers
// standardize each channel over the spatial extent of one sample and apply a
// learned scale and shift.
template <class T>
class BasicCnn {
 public:
  // All parameters zero, including the norm scales.
  explicit BasicCnn(const CnnSpec& spec = {});
  // He-normal conv/fc weights, unit norm scales, zero biases and shifts.
  static BasicCnn initialized(const CnnSpec& spec, std::uint64_t seed);

  const CnnSpec& spec() const { return spec_; }
  std::vector<Tensor<T>>& parameters() { return params_; }
  const std::vector<Tensor<T>>& parameters() const { return params_; }
  const Tensor<T>& parameter(const std::string& name) const;
  std::size_t parameter_count() const;

  // Class probabilities. Throws Error(kModelConfig) when the input length or
  // parameter shapes disagree with the CnnSpec.
  std::vector<T> forward(std::span<const T> input) const;

  template <class U>
  BasicCnn<U> cast() const {
    BasicCnn<U> out(spec_);
    for (std::size_t i = 0; i < params_.size(); ++i) {
      out.parameters()[i].data.assign(params_[i].data.begin(), params_[i].data.end());
    }
    return out;
  }

  // Throws Error(kModelConfig) if any tensor shape differs from the CnnSpec.
  void check_shapes() const;

  friend bool operator==(const BasicCnn&, const BasicCnn&) = default;

 private:
  CnnSpec spec_;
  std::vector<Tensor<T>> params_;
};

using CnnModel = BasicCnn<float>;

// Parameter order is fixed; these index into parameters().
enum ParamIndex : std::size_t {
  kConv1W, kConv1B, kNorm1Gamma, kNorm1Beta,
  kConv2W, kConv2B, kNorm2Gamma, kNorm2Beta,
  kFc1W, kFc1B, kFc2W, kFc2B,
  kParamCount
};

template <class T>
struct Sample {
  std::span<const T> input;
  int label = 0;
};

template <class T>
struct LossAndGradients {
  double loss = 0.0;  // mean cross-entropy
  std::vector<Tensor<T>> gradients;  // same order and shapes as parameters()
  std::size_t correct = 0;           // argmax hits in the batch
};

// Throws Error(kInvalidArgument) on an empty batch or a label out of range.
template <class T>
LossAndGradients<T> loss_and_gradients(const BasicCnn<T>& model, std::span<const Sample<T>> batch);

// Patch convenience wrappers for the 32x32x3 model.
std::vector<float> forward(const CnnModel& model, const vision::Patch& patch);
int predict(const CnnModel& model, const vision::Patch& patch);

struct LabeledPatch {
  vision::Patch patch;
  int label = 0;
};

LossAndGradients<float> loss_and_gradients(const CnnModel& model, std::span<const LabeledPatch> batch);

}  // namespace gestlang::classify
