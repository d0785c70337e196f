#pragma once

#include <memory>
#include <optional>
#include <string>

#include "ikc/kernels.hpp"
#include "ikc/nn.hpp"
#include "ikc/optimizer.hpp"

namespace ikc {

enum class Conditioning { sft, direct_concat, first_layer_concat };

std::string to_string(Conditioning c);
Conditioning conditioning_from_string(const std::string& s);

struct SftmdConfig {
  int feature_channels = 64;
  int num_res_blocks = 16;
  int scale = 4;
  int code_dim = 10;
  Conditioning conditioning = Conditioning::sft;

  void validate() const;
};

// Kernel-conditioned SR network: SRResNet-style trunk where every residual
// convolution and the global residual connection are followed by a
// conditioning site (an affine feature transform by default; the two
// concatenation baselines replace or drop those sites).
class SftmdNet {
 public:
  explicit SftmdNet(const SftmdConfig& cfg);

  void init(Rng& rng);

  // lr: {3,H,W} in [0,1]; code length = code_dim. Output {3,sH,sW},
  // unclamped (training target space); clamp at inference.
  TensorT<float> forward(const TensorT<float>& lr, const TensorT<float>& code, bool train);
  void backward(const TensorT<float>& gy);

  nn::ParamList<float> params();
  const SftmdConfig& config() const { return cfg_; }

 private:
  struct CondSite {
    Conditioning mode = Conditioning::sft;
    nn::SftLayer<float> sft;
    nn::Conv2d<float> fuse;
    int feat_ch = 0;

    TensorT<float> forward(const TensorT<float>& f, const TensorT<float>& maps, bool train);
    TensorT<float> backward(const TensorT<float>& gy);
    void params(nn::ParamList<float>& out);
    void init(Rng& rng);
  };

  struct ResBlock {
    nn::Conv2d<float> conv1, conv2;
    CondSite site1, site2;
    nn::LeakyReLU<float> act;

    TensorT<float> forward(const TensorT<float>& x, const TensorT<float>& maps, bool train);
    TensorT<float> backward(const TensorT<float>& gy);
    void params(nn::ParamList<float>& out);
    void init(Rng& rng);
  };

  struct UpStage {
    nn::Conv2d<float> conv;
    nn::PixelShuffle<float> shuffle;
    nn::LeakyReLU<float> act;
  };

  SftmdConfig cfg_;
  nn::Conv2d<float> head_;
  std::vector<ResBlock> blocks_;
  nn::Conv2d<float> mid_;
  CondSite global_site_;
  std::vector<UpStage> up_;
  nn::Conv2d<float> tail1_, tail2_;
  nn::LeakyReLU<float> tail_act_;
};

// Estimates the kernel code from the LR image: four convolutions with
// LeakyReLU produce per-pixel estimation maps, global average pooling takes
// the spatial mean.
class PredictorNet {
 public:
  PredictorNet(int code_dim, int base_channels = 64);

  void init(Rng& rng);
  TensorT<float> forward(const TensorT<float>& lr, bool train);
  void backward(const TensorT<float>& gcode);
  nn::ParamList<float> params();
  int code_dim() const { return code_dim_; }
  int base_channels() const { return base_; }

 private:
  int code_dim_, base_;
  nn::Conv2d<float> c1_, c2_, c3_, c4_;
  nn::LeakyReLU<float> a1_, a2_, a3_, a4_;
  nn::GlobalAvgPool<float> pool_;
};

// Estimates a code update from the current SR image and the current code:
// five convolutions extract artifact features from the SR image, two
// fully-connected layers embed the code, the stretched embedding is fused
// with the image features by 1x1 convolutions and pooled globally.
class CorrectorNet {
 public:
  CorrectorNet(int code_dim, int base_channels = 64);

  void init(Rng& rng);
  TensorT<float> forward(const TensorT<float>& sr, const TensorT<float>& code, bool train);
  void backward(const TensorT<float>& gdelta);
  nn::ParamList<float> params();
  int code_dim() const { return code_dim_; }
  int base_channels() const { return base_; }

 private:
  int code_dim_, base_;
  nn::Conv2d<float> s1_, s2_, s3_, s4_, s5_;
  nn::LeakyReLU<float> sa1_, sa2_, sa3_, sa4_, sa5_;
  nn::Linear<float> f1_, f2_;
  nn::LeakyReLU<float> fa1_, fa2_;
  nn::Conv2d<float> m1_, m2_, m3_;
  nn::LeakyReLU<float> ma1_, ma2_, ma3_;
  nn::GlobalAvgPool<float> pool_;
  int sr_h_ = 0, sr_w_ = 0;
};

// ---- checkpoints -----------------------------------------------------------
// Container: "IKCC" magic, format version, a JSON header (kind, architecture
// config, code representation, codec fingerprint, step count, parameter
// manifest), then raw little-endian f32 parameter data and optional Adam
// state. Save/load round-trips bit-identically.

struct CheckpointInfo {
  std::string kind;  // "sftmd" | "predictor" | "corrector"
  uint64_t step = 0;
  std::string codec_fingerprint;
  CodeRepresentation representation = CodeRepresentation::pca;
  double width_min = 0.0, width_max = 0.0;  // clamp range in width-scalar mode
};

void save_checkpoint(const std::filesystem::path& path, SftmdNet& net, const CheckpointInfo& info,
                     Adam* adam = nullptr);
void save_checkpoint(const std::filesystem::path& path, PredictorNet& net,
                     const CheckpointInfo& info, Adam* adam = nullptr);
void save_checkpoint(const std::filesystem::path& path, CorrectorNet& net,
                     const CheckpointInfo& info, Adam* adam = nullptr);

struct LoadedSftmd {
  std::unique_ptr<SftmdNet> net;
  CheckpointInfo info;
  SftmdConfig config;
};
struct LoadedPredictor {
  std::unique_ptr<PredictorNet> net;
  CheckpointInfo info;
};
struct LoadedCorrector {
  std::unique_ptr<CorrectorNet> net;
  CheckpointInfo info;
};

// `expected_codec_fingerprint`: empty string skips the check; a mismatch
// throws invalid_configuration.
LoadedSftmd load_sftmd(const std::filesystem::path& path,
                       const std::string& expected_codec_fingerprint = "",
                       Adam* adam_to_restore = nullptr);
LoadedPredictor load_predictor(const std::filesystem::path& path,
                               const std::string& expected_codec_fingerprint = "",
                               Adam* adam_to_restore = nullptr);
LoadedCorrector load_corrector(const std::filesystem::path& path,
                               const std::string& expected_codec_fingerprint = "",
                               Adam* adam_to_restore = nullptr);

// Peek at the header without materializing the network.
CheckpointInfo checkpoint_info(const std::filesystem::path& path);

// FNV-1a over a parameter list's current values; cheap freeze detector.
uint64_t params_fingerprint(const nn::ParamList<float>& params);

}  // namespace ikc
