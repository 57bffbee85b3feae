#include "gestlang/classify/cnn.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "gestlang/errors.hpp"

namespace gestlang::classify {

void validate_spec(const CnnSpec& s) {
  if (s.input_size <= 0 || s.in_channels <= 0 || s.conv1_channels <= 0 || s.conv2_channels <= 0 ||
      s.kernel <= 0 || s.hidden <= 0 || s.classes <= 0) {
    throw Error(ErrorKind::kModelConfig, "layer widths must be positive");
  }
  if (s.kernel % 2 == 0) throw Error(ErrorKind::kModelConfig, "kernel size must be odd");
  if (s.input_size % 4 != 0) throw Error(ErrorKind::kModelConfig, "input size must be divisible by 4");
}

namespace {

std::vector<std::vector<int>> expected_shapes(const CnnSpec& s) {
  const int k = s.kernel;
  return {{k, k, s.in_channels, s.conv1_channels}, {s.conv1_channels}, {s.conv1_channels}, {s.conv1_channels},
          {k, k, s.conv1_channels, s.conv2_channels}, {s.conv2_channels}, {s.conv2_channels}, {s.conv2_channels},
          {s.flat_size(), s.hidden}, {s.hidden}, {s.hidden, s.classes}, {s.classes}};
}

constexpr const char* kNames[kParamCount] = {"conv1.weight", "conv1.bias", "norm1.scale", "norm1.shift",
                                             "conv2.weight", "conv2.bias", "norm2.scale", "norm2.shift",
                                             "fc1.weight",   "fc1.bias",   "fc2.weight",  "fc2.bias"};

std::size_t volume(const std::vector<int>& shape) {
  std::size_t n = 1;
  for (int d : shape) n *= static_cast<std::size_t>(d);
  return n;
}

template <class T>
std::vector<Tensor<T>> zero_tensors(const CnnSpec& s) {
  std::vector<Tensor<T>> out;
  auto shapes = expected_shapes(s);
  for (std::size_t i = 0; i < kParamCount; ++i) {
    out.push_back({kNames[i], shapes[i], std::vector<T>(volume(shapes[i]), T(0))});
  }
  return out;
}

// Same-padded convolution, HWC in and out.
template <class T>
void conv_forward(const T* in, int size, int ci, const T* w, const T* b, int co, int k, T* out) {
  const int pad = k / 2;
  for (int y = 0; y < size; ++y) {
    for (int x = 0; x < size; ++x) {
      T* o = out + (static_cast<std::size_t>(y) * size + x) * co;
      std::copy(b, b + co, o);
      for (int ky = 0; ky < k; ++ky) {
        const int iy = y + ky - pad;
        if (iy < 0 || iy >= size) continue;
        for (int kx = 0; kx < k; ++kx) {
          const int ix = x + kx - pad;
          if (ix < 0 || ix >= size) continue;
          const T* src = in + (static_cast<std::size_t>(iy) * size + ix) * ci;
          const T* wk = w + static_cast<std::size_t>(ky * k + kx) * ci * co;
          for (int c = 0; c < ci; ++c) {
            const T v = src[c];
            const T* wc = wk + static_cast<std::size_t>(c) * co;
            for (int j = 0; j < co; ++j) o[j] += v * wc[j];
          }
        }
      }
    }
  }
}

// Accumulates weight and bias gradients; the input gradient too when `din`
// is non-null (`wt` is the weight tensor transposed to [ky][kx][out][in]).
template <class T>
void conv_backward(const T* in, int size, int ci, const T* wt, int co, int k, const T* dout, T* dw, T* db,
                   T* din) {
  const int pad = k / 2;
  for (int y = 0; y < size; ++y) {
    for (int x = 0; x < size; ++x) {
      const T* g = dout + (static_cast<std::size_t>(y) * size + x) * co;
      for (int j = 0; j < co; ++j) db[j] += g[j];
      for (int ky = 0; ky < k; ++ky) {
        const int iy = y + ky - pad;
        if (iy < 0 || iy >= size) continue;
        for (int kx = 0; kx < k; ++kx) {
          const int ix = x + kx - pad;
          if (ix < 0 || ix >= size) continue;
          const std::size_t off = (static_cast<std::size_t>(iy) * size + ix) * ci;
          const std::size_t kk = static_cast<std::size_t>(ky * k + kx) * ci * co;
          const T* src = in + off;
          T* dwk = dw + kk;
          for (int c = 0; c < ci; ++c) {
            const T v = src[c];
            T* dwc = dwk + static_cast<std::size_t>(c) * co;
            for (int j = 0; j < co; ++j) dwc[j] += v * g[j];
          }
          if (din != nullptr) {
            T* d = din + off;
            const T* wk = wt + kk;
            for (int j = 0; j < co; ++j) {
              const T gj = g[j];
              const T* wj = wk + static_cast<std::size_t>(j) * ci;
              for (int c = 0; c < ci; ++c) d[c] += gj * wj[c];
            }
          }
        }
      }
    }
  }
}

template <class T>
void relu_inplace(std::vector<T>& v) {
  for (auto& x : v) x = x > T(0) ? x : T(0);
}

// 2x2 max pool; `arg` records the flat input index of each output's source.
template <class T>
void pool_forward(const T* in, int size, int c, T* out, std::uint32_t* arg) {
  const int half = size / 2;
  for (int y = 0; y < half; ++y) {
    for (int x = 0; x < half; ++x) {
      for (int ch = 0; ch < c; ++ch) {
        std::uint32_t best = static_cast<std::uint32_t>(((2 * y) * size + 2 * x) * c + ch);
        for (int dy = 0; dy < 2; ++dy) {
          for (int dx = 0; dx < 2; ++dx) {
            const auto idx = static_cast<std::uint32_t>(((2 * y + dy) * size + 2 * x + dx) * c + ch);
            if (in[idx] > in[best]) best = idx;
          }
        }
        const std::size_t o = (static_cast<std::size_t>(y) * half + x) * c + ch;
        out[o] = in[best];
        arg[o] = best;
      }
    }
  }
}

template <class T>
struct NormCache {
  std::vector<T> xhat;
  std::vector<T> inv_std;
};

template <class T>
void norm_forward(const T* in, int n, int c, const T* gamma, const T* beta, T* out, NormCache<T>& cache) {
  cache.xhat.resize(static_cast<std::size_t>(n) * c);
  cache.inv_std.resize(c);
  std::vector<T> mean(c, T(0)), var(c, T(0));
  for (int i = 0; i < n; ++i)
    for (int ch = 0; ch < c; ++ch) mean[ch] += in[i * c + ch];
  for (int ch = 0; ch < c; ++ch) mean[ch] /= T(n);
  for (int i = 0; i < n; ++i)
    for (int ch = 0; ch < c; ++ch) {
      const T d = in[i * c + ch] - mean[ch];
      var[ch] += d * d;
    }
  for (int ch = 0; ch < c; ++ch) cache.inv_std[ch] = T(1) / std::sqrt(var[ch] / T(n) + T(kNormEpsilon));
  for (int i = 0; i < n; ++i)
    for (int ch = 0; ch < c; ++ch) {
      const T xh = (in[i * c + ch] - mean[ch]) * cache.inv_std[ch];
      cache.xhat[i * c + ch] = xh;
      out[i * c + ch] = gamma[ch] * xh + beta[ch];
    }
}

template <class T>
void norm_backward(const T* dout, int n, int c, const T* gamma, const NormCache<T>& cache, T* dgamma, T* dbeta,
                   T* din) {
  std::vector<T> sum_dx(c, T(0)), sum_dx_xhat(c, T(0));
  for (int i = 0; i < n; ++i)
    for (int ch = 0; ch < c; ++ch) {
      const T g = dout[i * c + ch];
      const T xh = cache.xhat[i * c + ch];
      dgamma[ch] += g * xh;
      dbeta[ch] += g;
      const T dxh = g * gamma[ch];
      sum_dx[ch] += dxh;
      sum_dx_xhat[ch] += dxh * xh;
    }
  for (int i = 0; i < n; ++i)
    for (int ch = 0; ch < c; ++ch) {
      const T dxh = dout[i * c + ch] * gamma[ch];
      din[i * c + ch] =
          cache.inv_std[ch] / T(n) * (T(n) * dxh - sum_dx[ch] - cache.xhat[i * c + ch] * sum_dx_xhat[ch]);
    }
}

template <class T>
void fc_forward(const T* in, int ni, const T* w, const T* b, int no, T* out) {
  std::copy(b, b + no, out);
  for (int i = 0; i < ni; ++i) {
    const T v = in[i];
    const T* wi = w + static_cast<std::size_t>(i) * no;
    for (int j = 0; j < no; ++j) out[j] += v * wi[j];
  }
}

template <class T>
void fc_backward(const T* in, int ni, const T* w, int no, const T* dout, T* dw, T* db, T* din) {
  for (int j = 0; j < no; ++j) db[j] += dout[j];
  for (int i = 0; i < ni; ++i) {
    const T v = in[i];
    T* dwi = dw + static_cast<std::size_t>(i) * no;
    const T* wi = w + static_cast<std::size_t>(i) * no;
    T acc = T(0);
    for (int j = 0; j < no; ++j) {
      dwi[j] += v * dout[j];
      acc += wi[j] * dout[j];
    }
    if (din != nullptr) din[i] = acc;
  }
}

// Per-sample activations, reused across samples of a batch.
template <class T>
struct Workspace {
  std::vector<T> a1, p1, n1, a2, p2, n2, h, logits;
  std::vector<std::uint32_t> arg1, arg2;
  NormCache<T> norm1, norm2;

  explicit Workspace(const CnnSpec& s) {
    const std::size_t s1 = static_cast<std::size_t>(s.input_size) * s.input_size;
    a1.resize(s1 * s.conv1_channels);
    p1.resize(s1 / 4 * s.conv1_channels);
    arg1.resize(p1.size());
    n1.resize(p1.size());
    a2.resize(s1 / 4 * s.conv2_channels);
    p2.resize(s1 / 16 * s.conv2_channels);
    arg2.resize(p2.size());
    n2.resize(p2.size());
    h.resize(s.hidden);
    logits.resize(s.classes);
  }
};

template <class T>
void run_forward(const std::vector<Tensor<T>>& p, const CnnSpec& s, const T* input, Workspace<T>& ws) {
  const int s1 = s.input_size, s2 = s1 / 2, s3 = s1 / 4;
  conv_forward(input, s1, s.in_channels, p[kConv1W].data.data(), p[kConv1B].data.data(), s.conv1_channels,
               s.kernel, ws.a1.data());
  relu_inplace(ws.a1);
  pool_forward(ws.a1.data(), s1, s.conv1_channels, ws.p1.data(), ws.arg1.data());
  norm_forward(ws.p1.data(), s2 * s2, s.conv1_channels, p[kNorm1Gamma].data.data(), p[kNorm1Beta].data.data(),
               ws.n1.data(), ws.norm1);
  conv_forward(ws.n1.data(), s2, s.conv1_channels, p[kConv2W].data.data(), p[kConv2B].data.data(),
               s.conv2_channels, s.kernel, ws.a2.data());
  relu_inplace(ws.a2);
  pool_forward(ws.a2.data(), s2, s.conv2_channels, ws.p2.data(), ws.arg2.data());
  norm_forward(ws.p2.data(), s3 * s3, s.conv2_channels, p[kNorm2Gamma].data.data(), p[kNorm2Beta].data.data(),
               ws.n2.data(), ws.norm2);
  fc_forward(ws.n2.data(), s.flat_size(), p[kFc1W].data.data(), p[kFc1B].data.data(), s.hidden, ws.h.data());
  relu_inplace(ws.h);
  fc_forward(ws.h.data(), s.hidden, p[kFc2W].data.data(), p[kFc2B].data.data(), s.classes, ws.logits.data());
}

template <class T>
std::vector<T> softmax(const std::vector<T>& logits) {
  const T m = *std::max_element(logits.begin(), logits.end());
  std::vector<T> out(logits.size());
  T sum = T(0);
  for (std::size_t i = 0; i < logits.size(); ++i) {
    out[i] = std::exp(logits[i] - m);
    sum += out[i];
  }
  for (auto& v : out) v /= sum;
  return out;
}

}  // namespace

template <class T>
BasicCnn<T>::BasicCnn(const CnnSpec& spec) : spec_(spec) {
  validate_spec(spec);
  params_ = zero_tensors<T>(spec);
}

template <class T>
BasicCnn<T> BasicCnn<T>::initialized(const CnnSpec& spec, std::uint64_t seed) {
  BasicCnn model(spec);
  std::mt19937_64 rng(seed);
  auto he = [&](Tensor<T>& t, int fan_in) {
    std::normal_distribution<double> n(0.0, std::sqrt(2.0 / fan_in));
    for (auto& v : t.data) v = static_cast<T>(n(rng));
  };
  auto& p = model.params_;
  he(p[kConv1W], spec.kernel * spec.kernel * spec.in_channels);
  he(p[kConv2W], spec.kernel * spec.kernel * spec.conv1_channels);
  he(p[kFc1W], spec.flat_size());
  he(p[kFc2W], spec.hidden);
  std::fill(p[kNorm1Gamma].data.begin(), p[kNorm1Gamma].data.end(), T(1));
  std::fill(p[kNorm2Gamma].data.begin(), p[kNorm2Gamma].data.end(), T(1));
  return model;
}

template <class T>
const Tensor<T>& BasicCnn<T>::parameter(const std::string& name) const {
  for (const auto& t : params_) {
    if (t.name == name) return t;
  }
  throw Error(ErrorKind::kModelConfig, "no parameter named " + name);
}

template <class T>
std::size_t BasicCnn<T>::parameter_count() const {
  std::size_t n = 0;
  for (const auto& t : params_) n += t.data.size();
  return n;
}

template <class T>
void BasicCnn<T>::check_shapes() const {
  auto shapes = expected_shapes(spec_);
  if (params_.size() != shapes.size()) throw Error(ErrorKind::kModelConfig, "wrong number of parameter tensors");
  for (std::size_t i = 0; i < shapes.size(); ++i) {
    if (params_[i].shape != shapes[i] || params_[i].data.size() != volume(shapes[i])) {
      throw Error(ErrorKind::kModelConfig, "parameter " + params_[i].name + " has the wrong shape");
    }
  }
}

template <class T>
std::vector<T> BasicCnn<T>::forward(std::span<const T> input) const {
  check_shapes();
  if (input.size() != static_cast<std::size_t>(spec_.input_values())) {
    throw Error(ErrorKind::kModelConfig, "input length does not match the model");
  }
  Workspace<T> ws(spec_);
  run_forward(params_, spec_, input.data(), ws);
  return softmax(ws.logits);
}

template <class T>
LossAndGradients<T> loss_and_gradients(const BasicCnn<T>& model, std::span<const Sample<T>> batch) {
  if (batch.empty()) throw Error(ErrorKind::kInvalidArgument, "empty batch");
  model.check_shapes();
  const CnnSpec& s = model.spec();
  const auto& p = model.parameters();
  for (const auto& smp : batch) {
    if (smp.label < 0 || smp.label >= s.classes) throw Error(ErrorKind::kInvalidArgument, "label out of range");
    if (smp.input.size() != static_cast<std::size_t>(s.input_values())) {
      throw Error(ErrorKind::kModelConfig, "input length does not match the model");
    }
  }

  const int s1 = s.input_size, s2 = s1 / 2, s3 = s1 / 4;
  const int c1 = s.conv1_channels, c2 = s.conv2_channels, k = s.kernel;

  // conv2 weights as [ky][kx][out][in] for the input-gradient pass.
  std::vector<T> w2t(p[kConv2W].data.size());
  for (int kk = 0; kk < k * k; ++kk)
    for (int i = 0; i < c1; ++i)
      for (int o = 0; o < c2; ++o)
        w2t[(static_cast<std::size_t>(kk) * c2 + o) * c1 + i] = p[kConv2W].data[(static_cast<std::size_t>(kk) * c1 + i) * c2 + o];

  LossAndGradients<T> out;
  out.gradients = zero_tensors<T>(s);
  auto sample_grads = zero_tensors<T>(s);
  Workspace<T> ws(s);
  std::vector<T> dlogits(s.classes), dh(s.hidden), dn2(ws.n2.size()), dp2(ws.p2.size()), da2(ws.a2.size()),
      dn1(ws.n1.size()), dp1(ws.p1.size()), da1(ws.a1.size());
  double loss_sum = 0.0;

  for (const auto& smp : batch) {
    for (auto& g : sample_grads) std::fill(g.data.begin(), g.data.end(), T(0));
    auto& g = sample_grads;
    run_forward(p, s, smp.input.data(), ws);

    const T m = *std::max_element(ws.logits.begin(), ws.logits.end());
    T z = T(0);
    for (T v : ws.logits) z += std::exp(v - m);
    const T log_z = m + std::log(z);
    loss_sum += static_cast<double>(log_z - ws.logits[smp.label]);
    if (std::max_element(ws.logits.begin(), ws.logits.end()) - ws.logits.begin() == smp.label) ++out.correct;
    for (int j = 0; j < s.classes; ++j) dlogits[j] = std::exp(ws.logits[j] - log_z) - (j == smp.label ? T(1) : T(0));

    fc_backward(ws.h.data(), s.hidden, p[kFc2W].data.data(), s.classes, dlogits.data(), g[kFc2W].data.data(),
                g[kFc2B].data.data(), dh.data());
    for (int j = 0; j < s.hidden; ++j)
      if (ws.h[j] <= T(0)) dh[j] = T(0);
    fc_backward(ws.n2.data(), s.flat_size(), p[kFc1W].data.data(), s.hidden, dh.data(), g[kFc1W].data.data(),
                g[kFc1B].data.data(), dn2.data());
    norm_backward(dn2.data(), s3 * s3, c2, p[kNorm2Gamma].data.data(), ws.norm2, g[kNorm2Gamma].data.data(),
                  g[kNorm2Beta].data.data(), dp2.data());
    std::fill(da2.begin(), da2.end(), T(0));
    for (std::size_t i = 0; i < dp2.size(); ++i) da2[ws.arg2[i]] += dp2[i];
    // a2 holds post-relu values; a zero there means the unit was inactive.
    for (std::size_t i = 0; i < da2.size(); ++i)
      if (ws.a2[i] <= T(0)) da2[i] = T(0);
    std::fill(dn1.begin(), dn1.end(), T(0));
    conv_backward(ws.n1.data(), s2, c1, w2t.data(), c2, k, da2.data(), g[kConv2W].data.data(),
                  g[kConv2B].data.data(), dn1.data());
    norm_backward(dn1.data(), s2 * s2, c1, p[kNorm1Gamma].data.data(), ws.norm1, g[kNorm1Gamma].data.data(),
                  g[kNorm1Beta].data.data(), dp1.data());
    std::fill(da1.begin(), da1.end(), T(0));
    for (std::size_t i = 0; i < dp1.size(); ++i) da1[ws.arg1[i]] += dp1[i];
    for (std::size_t i = 0; i < da1.size(); ++i)
      if (ws.a1[i] <= T(0)) da1[i] = T(0);
    conv_backward<T>(smp.input.data(), s1, s.in_channels, nullptr, c1, k, da1.data(), g[kConv1W].data.data(),
                     g[kConv1B].data.data(), nullptr);

    for (std::size_t t = 0; t < kParamCount; ++t) {
      auto& acc = out.gradients[t].data;
      const auto& src = g[t].data;
      for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += src[i];
    }
  }

  const T n = static_cast<T>(batch.size());
  for (auto& t : out.gradients)
    for (auto& v : t.data) v /= n;
  out.loss = loss_sum / static_cast<double>(batch.size());
  return out;
}

template class BasicCnn<float>;
template class BasicCnn<double>;
template LossAndGradients<float> loss_and_gradients(const BasicCnn<float>&, std::span<const Sample<float>>);
template LossAndGradients<double> loss_and_gradients(const BasicCnn<double>&, std::span<const Sample<double>>);

namespace {
void require_patch_model(const CnnModel& model) {
  const auto& s = model.spec();
  if (s.input_size != vision::Patch::kSize || s.in_channels != vision::Patch::kChannels) {
    throw Error(ErrorKind::kModelConfig, "model input is not a 32x32x3 patch");
  }
}
}  // namespace

std::vector<float> forward(const CnnModel& model, const vision::Patch& patch) {
  require_patch_model(model);
  return model.forward(patch.values);
}

int predict(const CnnModel& model, const vision::Patch& patch) {
  auto probs = forward(model, patch);
  return static_cast<int>(std::max_element(probs.begin(), probs.end()) - probs.begin());
}

LossAndGradients<float> loss_and_gradients(const CnnModel& model, std::span<const LabeledPatch> batch) {
  require_patch_model(model);
  std::vector<Sample<float>> samples;
  samples.reserve(batch.size());
  for (const auto& lp : batch) samples.push_back({lp.patch.values, lp.label});
  return loss_and_gradients<float>(model, std::span<const Sample<float>>(samples));
}

}  // namespace gestlang::classify
