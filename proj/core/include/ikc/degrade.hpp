#pragma once

#include <functional>
#include <optional>

#include "ikc/image.hpp"
#include "ikc/kernels.hpp"
#include "ikc/rng.hpp"

namespace ikc {

enum class Downsampler { bicubic, direct };

// The degradation applied to an HR image: blur, downsample by `scale`,
// add Gaussian noise with the given standard deviation on the 0-255 scale.
struct DegradationSpec {
  int scale = 4;
  BlurKernel kernel;
  Downsampler downsampler = Downsampler::bicubic;
  double noise_sigma_255 = 0.0;
};

// Per-channel 2-D convolution, same spatial size, symmetric (reflect)
// boundary. Separable kernels take a fast two-pass path.
Image blur(const Image& img, const BlurKernel& k);

// Separable cubic resampling (Keys kernel, a = -0.5), kernel widened by the
// inverse scale when downscaling. Output clamped to [0,1].
Image bicubic_resize(const Image& img, double scale);
Image bicubic_resize_to(const Image& img, int out_h, int out_w);

// Stride-s subsampling keeping the top-left pixel of every s x s block.
Image direct_downsample(const Image& img, int s);

// clamp(downsample(blur(hr)) + noise), deterministic in the seed.
// HR dimensions must be divisible by the scale.
Image degrade(const Image& hr, const DegradationSpec& spec, uint64_t rng_seed);

struct TrainingPair {
  Image lr;
  Image hr;
  KernelCode code;
  double sigma = 0.0;
  DegradationSpec spec;
};

struct SynthConfig {
  int scale = 4;
  double width_min = 0.2;
  double width_max = 4.0;
  int kernel_size = 21;
  int hr_patch = 144;         // HR patch side, must be divisible by scale
  double noise_sigma_255 = 0.0;
  Downsampler downsampler = Downsampler::bicubic;
  bool augment = true;        // random horizontal flips and quarter turns
  uint64_t seed = 0;
  CodeRepresentation representation = CodeRepresentation::pca;
};

// Streams training pairs out of an in-memory HR pool. Pair i is a pure
// function of (seed, i): serial and parallel generation agree. The codec is
// borrowed and must outlive the sampler (null is allowed in width-scalar
// mode).
class PairSampler {
 public:
  PairSampler(std::vector<Image> hr_pool, const PcaCodec* codec, SynthConfig cfg);

  TrainingPair make(uint64_t index) const;

  const SynthConfig& config() const { return cfg_; }
  const std::vector<Image>& pool() const { return pool_; }

 private:
  std::vector<Image> pool_;
  const PcaCodec* codec_;
  SynthConfig cfg_;
  int margin_;
};

// Loads every PNG under dir (sorted by filename) into an HR pool.
std::vector<Image> load_image_dir(const std::filesystem::path& dir);

}  // namespace ikc
