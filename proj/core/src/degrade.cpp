#include "ikc/degrade.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

namespace ikc {

namespace {

// Reflect index into [0, n) without repeating the edge sample
// (symmetric padding: -1 -> 0, -2 -> 1, n -> n-1, ...).
inline int reflect(int i, int n) {
  while (i < 0 || i >= n) {
    if (i < 0) i = -i - 1;
    if (i >= n) i = 2 * n - 1 - i;
  }
  return i;
}

void check_blur_kernel(const BlurKernel& k) {
  double sum = 0.0;
  for (double v : k.values.data) {
    if (v < 0.0) throw Error::invalid_parameter("blur: kernel has negative entries");
    sum += v;
  }
  if (std::abs(sum - 1.0) > 1e-8) throw Error::invalid_parameter("blur: kernel sum is not 1");
}

// Rank-1 factorization of a separable kernel, if it is one to near machine
// precision. Gaussian kernels built here always are.
bool separable_factors(const BlurKernel& k, std::vector<double>& u, std::vector<double>& v) {
  const int l = k.size_l;
  Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> m(
      k.values.data.data(), l, l);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (svd.singularValues()(0) <= 0.0) return false;
  if (l > 1 && svd.singularValues()(1) > 1e-14 * svd.singularValues()(0)) return false;
  const double s = std::sqrt(svd.singularValues()(0));
  u.resize(size_t(l));
  v.resize(size_t(l));
  for (int i = 0; i < l; ++i) {
    u[size_t(i)] = s * svd.matrixU()(i, 0);
    v[size_t(i)] = s * svd.matrixV()(i, 0);
  }
  // Keep the factors nonnegative (the product is sign-invariant).
  if (u[size_t(l / 2)] < 0.0)
    for (int i = 0; i < l; ++i) {
      u[size_t(i)] = -u[size_t(i)];
      v[size_t(i)] = -v[size_t(i)];
    }
  return true;
}

Image blur_separable(const Image& img, const std::vector<double>& col_taps,
                     const std::vector<double>& row_taps) {
  const int ch = img.channels(), h = img.height(), w = img.width();
  const int l = int(col_taps.size());
  const int r = (l - 1) / 2;
  Image tmp({ch, h, w}), out({ch, h, w});
  // horizontal pass (row_taps runs along x)
  for (int c = 0; c < ch; ++c)
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x) {
        double acc = 0.0;
        for (int t = 0; t < l; ++t) acc += row_taps[size_t(t)] * img.at(c, y, reflect(x + t - r, w));
        tmp.at(c, y, x) = acc;
      }
  // vertical pass
  for (int c = 0; c < ch; ++c)
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x) {
        double acc = 0.0;
        for (int t = 0; t < l; ++t) acc += col_taps[size_t(t)] * tmp.at(c, reflect(y + t - r, h), x);
        out.at(c, y, x) = acc;
      }
  return out;
}

// Keys cubic, a = -0.5.
inline double cubic(double x) {
  x = std::abs(x);
  if (x < 1.0) return 1.5 * x * x * x - 2.5 * x * x + 1.0;
  if (x < 2.0) return -0.5 * x * x * x + 2.5 * x * x - 4.0 * x + 2.0;
  return 0.0;
}

struct ResampleTap {
  int first;                   // first source index (pre-reflection)
  std::vector<double> weight;  // normalized contribution of consecutive sources
};

// Weights for resampling a length-n signal to length m. Output sample i is
// centered at (i + 0.5) / scale - 0.5 in source coordinates; when
// downscaling the kernel is stretched by 1/scale (anti-aliasing) and the
// weights are renormalized to unit sum.
std::vector<ResampleTap> resample_taps(int n, int m, double scale) {
  const double kscale = scale < 1.0 ? scale : 1.0;
  const double support = 2.0 / kscale;
  std::vector<ResampleTap> taps(size_t(m));
  for (int i = 0; i < m; ++i) {
    const double center = (double(i) + 0.5) / scale - 0.5;
    const int first = int(std::floor(center - support)) + 1;
    const int last = int(std::floor(center + support));
    ResampleTap tap;
    tap.first = first;
    tap.weight.resize(size_t(last - first + 1));
    double sum = 0.0;
    for (int j = first; j <= last; ++j) {
      const double wgt = cubic((center - double(j)) * kscale);
      tap.weight[size_t(j - first)] = wgt;
      sum += wgt;
    }
    if (sum != 0.0)
      for (auto& wgt : tap.weight) wgt /= sum;
    taps[size_t(i)] = std::move(tap);
  }
  return taps;
}

}  // namespace

Image blur(const Image& img, const BlurKernel& k) {
  check_blur_kernel(k);
  const int ch = img.channels(), h = img.height(), w = img.width();
  if (k.size_l > 2 * h || k.size_l > 2 * w)
    throw Error::invalid_parameter("blur: kernel larger than the reflected image support");

  std::vector<double> u, v;
  if (separable_factors(k, u, v)) return blur_separable(img, u, v);

  const int l = k.size_l, r = (l - 1) / 2;
  Image out({ch, h, w});
  for (int c = 0; c < ch; ++c)
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x) {
        double acc = 0.0;
        for (int ky = 0; ky < l; ++ky) {
          const int sy = reflect(y + ky - r, h);
          for (int kx = 0; kx < l; ++kx)
            acc += k.at(ky, kx) * img.at(c, sy, reflect(x + kx - r, w));
        }
        out.at(c, y, x) = acc;
      }
  return out;
}

Image bicubic_resize_to(const Image& img, int out_h, int out_w) {
  if (out_h < 1 || out_w < 1) throw Error::invalid_parameter("bicubic_resize: degenerate output");
  const int ch = img.channels(), h = img.height(), w = img.width();
  const auto ytaps = resample_taps(h, out_h, double(out_h) / double(h));
  const auto xtaps = resample_taps(w, out_w, double(out_w) / double(w));

  // vertical pass then horizontal pass
  Image tmp({ch, out_h, w});
  for (int c = 0; c < ch; ++c)
    for (int y = 0; y < out_h; ++y) {
      const auto& t = ytaps[size_t(y)];
      for (int x = 0; x < w; ++x) {
        double acc = 0.0;
        for (size_t j = 0; j < t.weight.size(); ++j)
          acc += t.weight[j] * img.at(c, reflect(t.first + int(j), h), x);
        tmp.at(c, y, x) = acc;
      }
    }
  Image out({ch, out_h, out_w});
  for (int c = 0; c < ch; ++c)
    for (int y = 0; y < out_h; ++y)
      for (int x = 0; x < out_w; ++x) {
        const auto& t = xtaps[size_t(x)];
        double acc = 0.0;
        for (size_t j = 0; j < t.weight.size(); ++j)
          acc += t.weight[j] * tmp.at(c, y, reflect(t.first + int(j), w));
        out.at(c, y, x) = clamp01(acc);
      }
  return out;
}

Image bicubic_resize(const Image& img, double scale) {
  if (!(scale > 0.0)) throw Error::invalid_parameter("bicubic_resize: scale must be > 0");
  const int out_h = std::max(1, int(std::lround(double(img.height()) * scale)));
  const int out_w = std::max(1, int(std::lround(double(img.width()) * scale)));
  return bicubic_resize_to(img, out_h, out_w);
}

Image direct_downsample(const Image& img, int s) {
  if (s < 2) throw Error::invalid_parameter("direct_downsample: s must be >= 2");
  const int out_h = img.height() / s, out_w = img.width() / s;
  if (out_h < 1 || out_w < 1) throw Error::invalid_parameter("direct_downsample: image too small");
  Image out({img.channels(), out_h, out_w});
  for (int c = 0; c < img.channels(); ++c)
    for (int y = 0; y < out_h; ++y)
      for (int x = 0; x < out_w; ++x) out.at(c, y, x) = img.at(c, y * s, x * s);
  return out;
}

Image degrade(const Image& hr, const DegradationSpec& spec, uint64_t rng_seed) {
  if (spec.scale < 2 || spec.scale > 4)
    throw Error::invalid_parameter("degrade: scale must be in {2,3,4}");
  if (hr.height() % spec.scale != 0 || hr.width() % spec.scale != 0)
    throw Error::invalid_parameter("degrade: HR dimensions must be divisible by the scale");
  if (spec.noise_sigma_255 < 0.0)
    throw Error::invalid_parameter("degrade: negative noise level");

  const Image blurred = blur(hr, spec.kernel);
  Image lr = spec.downsampler == Downsampler::bicubic
                 ? bicubic_resize_to(blurred, hr.height() / spec.scale, hr.width() / spec.scale)
                 : direct_downsample(blurred, spec.scale);

  if (spec.noise_sigma_255 > 0.0) {
    Rng rng = Rng::derive(rng_seed, 0x6e6f6973u);
    const double sigma = spec.noise_sigma_255 / 255.0;
    for (auto& v : lr.data) v += sigma * rng.normal();
  }
  return clamp_image(lr);
}

std::vector<Image> load_image_dir(const std::filesystem::path& dir) {
  std::vector<std::filesystem::path> files;
  if (std::filesystem::is_directory(dir)) {
    for (const auto& e : std::filesystem::directory_iterator(dir))
      if (e.is_regular_file() && e.path().extension() == ".png") files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) throw Error::no_data("no PNG images under " + dir.string());
  std::vector<Image> pool;
  pool.reserve(files.size());
  for (const auto& f : files) pool.push_back(load_png(f));
  return pool;
}

PairSampler::PairSampler(std::vector<Image> hr_pool, const PcaCodec* codec, SynthConfig cfg)
    : pool_(std::move(hr_pool)), codec_(codec), cfg_(cfg) {
  // Blur margin rounded up to a multiple of the scale, so the padded patch
  // stays divisible by it and the HR/LR crops land on aligned grids.
  const int half = (cfg_.kernel_size - 1) / 2;
  margin_ = ((half + cfg_.scale - 1) / cfg_.scale) * cfg_.scale;
  if (pool_.empty()) throw Error::no_data("PairSampler: empty HR pool");
  if (cfg_.hr_patch % cfg_.scale != 0)
    throw Error::invalid_parameter("PairSampler: hr_patch must be divisible by the scale");
  if (cfg_.representation == CodeRepresentation::pca) {
    if (!codec_) throw Error::invalid_configuration("PairSampler: PCA mode needs a codec");
    if (cfg_.width_min < codec_->width_min - 1e-9 || cfg_.width_max > codec_->width_max + 1e-9)
      throw Error::invalid_parameter("PairSampler: width range outside the codec's fitted range");
  }
  // Every image must admit at least one patch with blur margin.
  size_t usable = 0;
  for (const auto& im : pool_)
    if (im.height() >= cfg_.hr_patch + 2 * margin_ && im.width() >= cfg_.hr_patch + 2 * margin_)
      ++usable;
  if (usable == 0)
    throw Error::no_data("PairSampler: no HR image is large enough for the patch plus margin");
}

TrainingPair PairSampler::make(uint64_t index) const {
  Rng rng = Rng::derive(cfg_.seed, 0x70616972u, index);

  const double sigma = rng.uniform(cfg_.width_min, cfg_.width_max);

  // pick an image large enough for patch + blur margin
  const int need = cfg_.hr_patch + 2 * margin_;
  int img_idx = 0;
  for (int tries = 0; tries < 256; ++tries) {
    img_idx = int(rng.below(pool_.size()));
    if (pool_[size_t(img_idx)].height() >= need && pool_[size_t(img_idx)].width() >= need) break;
  }
  const Image& src = pool_[size_t(img_idx)];

  const int y0 = int(rng.below(uint64_t(src.height() - need + 1)));
  const int x0 = int(rng.below(uint64_t(src.width() - need + 1)));
  Image patch = crop(src, y0, x0, need, need);

  if (cfg_.augment) {
    if (rng.uniform() < 0.5) patch = flip_horizontal(patch);
    patch = rotate90(patch, int(rng.below(4)));
  }

  TrainingPair pair;
  pair.sigma = sigma;
  pair.spec.scale = cfg_.scale;
  pair.spec.kernel = gaussian_kernel(sigma, cfg_.kernel_size);
  pair.spec.downsampler = cfg_.downsampler;
  pair.spec.noise_sigma_255 = cfg_.noise_sigma_255;

  // Degrade with margin so patch borders see real image content, then cut
  // the aligned central windows.
  const uint64_t noise_seed = rng.next_u64();
  const Image lr_full = degrade(patch, pair.spec, noise_seed);
  const int s = cfg_.scale;
  pair.lr = crop(lr_full, margin_ / s, margin_ / s, cfg_.hr_patch / s, cfg_.hr_patch / s);
  pair.hr = crop(patch, margin_, margin_, cfg_.hr_patch, cfg_.hr_patch);

  if (cfg_.representation == CodeRepresentation::pca) {
    pair.code = encode(*codec_, pair.spec.kernel);
  } else {
    pair.code.representation = CodeRepresentation::width_scalar;
    pair.code.values = {sigma};
  }
  return pair;
}

}  // namespace ikc
