#pragma once

#include <Eigen/Core>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "ikc/rng.hpp"
#include "ikc/tensor.hpp"

// Minimal CNN building blocks with hand-written backward passes. Layers own
// their parameters and accumulated gradients; forward passes cache what the
// matching backward needs when `train` is set. Convolutions are stride-1,
// zero-padded 'same', lowered to a single GEMM via im2col.
namespace ikc::nn {

template <typename T>
using MatRM = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename T>
using MapM = Eigen::Map<MatRM<T>>;
template <typename T>
using CMapM = Eigen::Map<const MatRM<T>>;

template <typename T>
struct ParamRef {
  std::string name;
  TensorT<T>* value;
  TensorT<T>* grad;
};
template <typename T>
using ParamList = std::vector<ParamRef<T>>;

// He-style normal initialization with the LeakyReLU(0.1) gain.
template <typename T>
void he_init(TensorT<T>& w, int fan_in, Rng& rng, double scale = 1.0) {
  const double stddev = scale * std::sqrt(2.0 / (1.01 * double(fan_in)));
  for (auto& v : w.data) v = T(stddev * rng.normal());
}

template <typename T>
class Conv2d {
 public:
  Conv2d() = default;
  Conv2d(int in_ch, int out_ch, int ksize, std::string name)
      : in_(in_ch), out_(out_ch), k_(ksize), name_(std::move(name)) {
    w_ = TensorT<T>({out_, in_, k_, k_});
    b_ = TensorT<T>({out_});
    gw_ = TensorT<T>({out_, in_, k_, k_});
    gb_ = TensorT<T>({out_});
  }

  void init(Rng& rng, double scale = 1.0) { he_init(w_, in_ * k_ * k_, rng, scale); }

  TensorT<T> forward(const TensorT<T>& x, bool train) {
    h_ = x.height();
    w_in_ = x.width();
    const int hw = h_ * w_in_;
    im2col(x);
    TensorT<T> y({out_, h_, w_in_});
    MapM<T> ym(y.data.data(), out_, hw);
    CMapM<T> wm(w_.data.data(), out_, in_ * k_ * k_);
    CMapM<T> cm(col_.data(), in_ * k_ * k_, hw);
    ym.noalias() = wm * cm;
    for (int o = 0; o < out_; ++o) ym.row(o).array() += b_.data[size_t(o)];
    if (!train) std::vector<T>().swap(col_);
    return y;
  }

  // Accumulates parameter gradients, returns the input gradient.
  TensorT<T> backward(const TensorT<T>& gy) {
    const int hw = h_ * w_in_;
    CMapM<T> gym(gy.data.data(), out_, hw);
    CMapM<T> cm(col_.data(), in_ * k_ * k_, hw);
    MapM<T> gwm(gw_.data.data(), out_, in_ * k_ * k_);
    gwm.noalias() += gym * cm.transpose();
    for (int o = 0; o < out_; ++o) gb_.data[size_t(o)] += gym.row(o).sum();

    gcol_.resize(size_t(in_ * k_ * k_) * size_t(hw));
    MapM<T> gcm(gcol_.data(), in_ * k_ * k_, hw);
    CMapM<T> wm(w_.data.data(), out_, in_ * k_ * k_);
    gcm.noalias() = wm.transpose() * gym;
    return col2im();
  }

  void params(ParamList<T>& out) {
    out.push_back({name_ + ".w", &w_, &gw_});
    out.push_back({name_ + ".b", &b_, &gb_});
  }

  TensorT<T>& weight() { return w_; }
  TensorT<T>& bias() { return b_; }
  int out_channels() const { return out_; }

 private:
  void im2col(const TensorT<T>& x) {
    const int pad = (k_ - 1) / 2, hw = h_ * w_in_;
    col_.resize(size_t(in_ * k_ * k_) * size_t(hw));
    size_t row = 0;
    for (int c = 0; c < in_; ++c)
      for (int ky = 0; ky < k_; ++ky)
        for (int kx = 0; kx < k_; ++kx, ++row) {
          T* dst = col_.data() + row * size_t(hw);
          for (int y = 0; y < h_; ++y) {
            const int sy = y + ky - pad;
            if (sy < 0 || sy >= h_) {
              std::fill(dst + size_t(y) * w_in_, dst + size_t(y + 1) * w_in_, T(0));
              continue;
            }
            const T* src = &x.at(c, sy, 0);
            for (int xx = 0; xx < w_in_; ++xx) {
              const int sx = xx + kx - pad;
              dst[size_t(y) * w_in_ + size_t(xx)] = (sx < 0 || sx >= w_in_) ? T(0) : src[sx];
            }
          }
        }
  }

  TensorT<T> col2im() {
    const int pad = (k_ - 1) / 2, hw = h_ * w_in_;
    TensorT<T> gx({in_, h_, w_in_});
    size_t row = 0;
    for (int c = 0; c < in_; ++c)
      for (int ky = 0; ky < k_; ++ky)
        for (int kx = 0; kx < k_; ++kx, ++row) {
          const T* src = gcol_.data() + row * size_t(hw);
          for (int y = 0; y < h_; ++y) {
            const int sy = y + ky - pad;
            if (sy < 0 || sy >= h_) continue;
            T* dst = &gx.at(c, sy, 0);
            for (int xx = 0; xx < w_in_; ++xx) {
              const int sx = xx + kx - pad;
              if (sx >= 0 && sx < w_in_) dst[sx] += src[size_t(y) * w_in_ + size_t(xx)];
            }
          }
        }
    return gx;
  }

  int in_ = 0, out_ = 0, k_ = 0;
  int h_ = 0, w_in_ = 0;
  std::string name_;
  TensorT<T> w_, b_, gw_, gb_;
  std::vector<T> col_, gcol_;
};

template <typename T>
class Linear {
 public:
  Linear() = default;
  Linear(int in, int out, std::string name) : in_(in), out_(out), name_(std::move(name)) {
    w_ = TensorT<T>({out_, in_});
    b_ = TensorT<T>({out_});
    gw_ = TensorT<T>({out_, in_});
    gb_ = TensorT<T>({out_});
  }

  void init(Rng& rng, double scale = 1.0) { he_init(w_, in_, rng, scale); }

  TensorT<T> forward(const TensorT<T>& x, bool train) {
    if (train) x_ = x;
    TensorT<T> y({out_});
    for (int o = 0; o < out_; ++o) {
      T acc = b_.data[size_t(o)];
      const T* wr = &w_.data[size_t(o) * size_t(in_)];
      for (int i = 0; i < in_; ++i) acc += wr[i] * x.data[size_t(i)];
      y.data[size_t(o)] = acc;
    }
    return y;
  }

  TensorT<T> backward(const TensorT<T>& gy) {
    TensorT<T> gx({in_});
    for (int o = 0; o < out_; ++o) {
      const T g = gy.data[size_t(o)];
      gb_.data[size_t(o)] += g;
      T* gwr = &gw_.data[size_t(o) * size_t(in_)];
      const T* wr = &w_.data[size_t(o) * size_t(in_)];
      for (int i = 0; i < in_; ++i) {
        gwr[i] += g * x_.data[size_t(i)];
        gx.data[size_t(i)] += g * wr[i];
      }
    }
    return gx;
  }

  void params(ParamList<T>& out) {
    out.push_back({name_ + ".w", &w_, &gw_});
    out.push_back({name_ + ".b", &b_, &gb_});
  }

  TensorT<T>& weight() { return w_; }
  TensorT<T>& bias() { return b_; }

 private:
  int in_ = 0, out_ = 0;
  std::string name_;
  TensorT<T> w_, b_, gw_, gb_, x_;
};

// LeakyReLU with the project-wide negative slope 0.1.
template <typename T>
class LeakyReLU {
 public:
  static constexpr T kSlope = T(0.1);

  TensorT<T> forward(const TensorT<T>& x, bool train) {
    TensorT<T> y = x;
    for (auto& v : y.data) v = v > T(0) ? v : kSlope * v;
    if (train) mask_ = x;
    return y;
  }

  TensorT<T> backward(const TensorT<T>& gy) {
    TensorT<T> gx = gy;
    for (size_t i = 0; i < gx.data.size(); ++i)
      if (mask_.data[i] <= T(0)) gx.data[i] *= kSlope;
    return gx;
  }

 private:
  TensorT<T> mask_;
};

// {C*r^2, H, W} -> {C, rH, rW}; input channel c*r^2 + dy*r + dx feeds output
// pixel (y*r+dy, x*r+dx) of channel c. A pure rearrangement.
template <typename T>
class PixelShuffle {
 public:
  explicit PixelShuffle(int r = 2) : r_(r) {}

  TensorT<T> forward(const TensorT<T>& x, bool /*train*/) {
    const int cr2 = x.channels(), h = x.height(), w = x.width();
    const int c_out = cr2 / (r_ * r_);
    c_ = c_out;
    h_ = h;
    w_ = w;
    TensorT<T> y({c_out, h * r_, w * r_});
    for (int c = 0; c < c_out; ++c)
      for (int dy = 0; dy < r_; ++dy)
        for (int dx = 0; dx < r_; ++dx) {
          const int ci = c * r_ * r_ + dy * r_ + dx;
          for (int y0 = 0; y0 < h; ++y0)
            for (int x0 = 0; x0 < w; ++x0) y.at(c, y0 * r_ + dy, x0 * r_ + dx) = x.at(ci, y0, x0);
        }
    return y;
  }

  TensorT<T> backward(const TensorT<T>& gy) {
    TensorT<T> gx({c_ * r_ * r_, h_, w_});
    for (int c = 0; c < c_; ++c)
      for (int dy = 0; dy < r_; ++dy)
        for (int dx = 0; dx < r_; ++dx) {
          const int ci = c * r_ * r_ + dy * r_ + dx;
          for (int y0 = 0; y0 < h_; ++y0)
            for (int x0 = 0; x0 < w_; ++x0)
              gx.at(ci, y0, x0) = gy.at(c, y0 * r_ + dy, x0 * r_ + dx);
        }
    return gx;
  }

 private:
  int r_ = 2, c_ = 0, h_ = 0, w_ = 0;
};

// {C, H, W} -> {C}: spatial mean per channel.
template <typename T>
class GlobalAvgPool {
 public:
  TensorT<T> forward(const TensorT<T>& x, bool /*train*/) {
    c_ = x.channels();
    h_ = x.height();
    w_ = x.width();
    TensorT<T> y({c_});
    const T inv = T(1) / T(h_ * w_);
    for (int c = 0; c < c_; ++c) {
      T acc = T(0);
      const T* p = &x.at(c, 0, 0);
      for (int i = 0; i < h_ * w_; ++i) acc += p[i];
      y.data[size_t(c)] = acc * inv;
    }
    return y;
  }

  TensorT<T> backward(const TensorT<T>& gy) {
    TensorT<T> gx({c_, h_, w_});
    const T inv = T(1) / T(h_ * w_);
    for (int c = 0; c < c_; ++c) {
      const T g = gy.data[size_t(c)] * inv;
      T* p = &gx.at(c, 0, 0);
      for (int i = 0; i < h_ * w_; ++i) p[i] = g;
    }
    return gx;
  }

 private:
  int c_ = 0, h_ = 0, w_ = 0;
};

// Replicates a code vector into spatially constant maps {b, H, W}.
template <typename T>
TensorT<T> stretch(const TensorT<T>& code, int height, int width) {
  TensorT<T> maps({int(code.numel()), height, width});
  for (int c = 0; c < int(code.numel()); ++c) {
    T* p = &maps.at(c, 0, 0);
    std::fill(p, p + size_t(height) * size_t(width), code.data[size_t(c)]);
  }
  return maps;
}

// Gradient of stretch: spatial sum per channel.
template <typename T>
TensorT<T> stretch_backward(const TensorT<T>& gmaps) {
  TensorT<T> g({gmaps.channels()});
  for (int c = 0; c < gmaps.channels(); ++c) {
    T acc = T(0);
    const T* p = &gmaps.at(c, 0, 0);
    for (int i = 0; i < gmaps.height() * gmaps.width(); ++i) acc += p[i];
    g.data[size_t(c)] = acc;
  }
  return g;
}

template <typename T>
TensorT<T> concat_channels(const TensorT<T>& a, const TensorT<T>& b) {
  TensorT<T> out({a.channels() + b.channels(), a.height(), a.width()});
  std::copy(a.data.begin(), a.data.end(), out.data.begin());
  std::copy(b.data.begin(), b.data.end(), out.data.begin() + long(a.data.size()));
  return out;
}

template <typename T>
std::pair<TensorT<T>, TensorT<T>> split_channels(const TensorT<T>& x, int first) {
  TensorT<T> a({first, x.height(), x.width()});
  TensorT<T> b({x.channels() - first, x.height(), x.width()});
  std::copy(x.data.begin(), x.data.begin() + long(a.data.size()), a.data.begin());
  std::copy(x.data.begin() + long(a.data.size()), x.data.end(), b.data.begin());
  return {std::move(a), std::move(b)};
}

// Feature-wise affine conditioning: a two-conv condition net over the
// concatenated features and kernel maps emits per-pixel (gamma, beta), and
// the layer returns gamma (.) F + beta.
template <typename T>
class SftLayer {
 public:
  SftLayer() = default;
  SftLayer(int feat_ch, int code_dim, std::string name)
      : cf_(feat_ch),
        conv1_(feat_ch + code_dim, feat_ch, 3, name + ".cond1"),
        conv2_(feat_ch, 2 * feat_ch, 3, name + ".cond2") {}

  void init(Rng& rng) {
    conv1_.init(rng);
    // Small weights plus a unit gamma bias start the layer near identity.
    conv2_.init(rng, 0.1);
    for (int c = 0; c < cf_; ++c) conv2_.bias().data[size_t(c)] = T(1);
  }

  TensorT<T> forward(const TensorT<T>& features, const TensorT<T>& maps, bool train) {
    TensorT<T> t = concat_channels(features, maps);
    t = act_.forward(conv1_.forward(t, train), train);
    TensorT<T> gb = conv2_.forward(t, train);
    auto [gamma, beta] = split_channels(gb, cf_);
    TensorT<T> y({cf_, features.height(), features.width()});
    for (size_t i = 0; i < y.data.size(); ++i)
      y.data[i] = gamma.data[i] * features.data[i] + beta.data[i];
    if (train) {
      features_ = features;
      gamma_ = std::move(gamma);
    }
    return y;
  }

  // Returns {grad wrt features, grad wrt maps}.
  std::pair<TensorT<T>, TensorT<T>> backward(const TensorT<T>& gy) {
    TensorT<T> ggb({2 * cf_, gy.height(), gy.width()});
    for (size_t i = 0; i < gy.data.size(); ++i) {
      ggb.data[i] = gy.data[i] * features_.data[i];          // d/d gamma
      ggb.data[i + gy.data.size()] = gy.data[i];             // d/d beta
    }
    TensorT<T> gt = conv1_.backward(act_.backward(conv2_.backward(ggb)));
    auto [gf_cond, gmaps] = split_channels(gt, cf_);
    for (size_t i = 0; i < gf_cond.data.size(); ++i)
      gf_cond.data[i] += gy.data[i] * gamma_.data[i];
    return {std::move(gf_cond), std::move(gmaps)};
  }

  void params(ParamList<T>& out) {
    conv1_.params(out);
    conv2_.params(out);
  }

  Conv2d<T>& cond1() { return conv1_; }
  Conv2d<T>& cond2() { return conv2_; }

 private:
  int cf_ = 0;
  Conv2d<T> conv1_, conv2_;
  LeakyReLU<T> act_;
  TensorT<T> features_, gamma_;
};

}  // namespace ikc::nn
