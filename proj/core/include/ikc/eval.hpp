#pragma once

#include <map>

#include "ikc/ikc.hpp"
#include "ikc/metrics.hpp"

namespace ikc {

enum class Pipeline { bicubic, p_plus_sftmd, sftmd_gt_kernel, ikc };

std::string to_string(Pipeline p);
Pipeline pipeline_from_string(const std::string& s);

struct ScoreRecord {
  std::string image;
  double sigma = 0.0;
  double psnr_db = 0.0;
  double ssim_value = 0.0;
};

struct BenchmarkReport {
  std::vector<ScoreRecord> records;
  double mean_psnr = 0.0;
  double mean_ssim = 0.0;
  std::map<std::string, std::string> metadata;

  // Aggregates recompute exactly from the per-image records.
  void finalize();
};

struct EvalModels {
  SftmdNet* sr = nullptr;
  PredictorNet* predictor = nullptr;
  CorrectorNet* corrector = nullptr;
  const PcaCodec* codec = nullptr;
};

// Super-resolve one LR image with the chosen pipeline. `gt_kernel` is needed
// by the oracle-kernel pipeline only.
Image run_pipeline(const Image& lr, int out_h, int out_w, Pipeline pipeline, int t,
                   const EvalModels& models, const BlurKernel* gt_kernel);

// The eight-kernel benchmark: every HR image is degraded (noise-free) with
// each benchmark kernel, super-resolved, and scored against the original.
BenchmarkReport run_gaussian8(const std::vector<Image>& hr_images,
                              const std::vector<std::string>& names, int scale, Pipeline pipeline,
                              int t, const EvalModels& models, int kernel_size = 21);

struct SensitivityGrid {
  std::vector<double> sigma_lr;  // rows
  std::vector<double> sigma_sr;  // columns
  std::vector<std::vector<double>> psnr_db;
  std::vector<std::vector<double>> sharpness;  // mean squared Laplacian of the SR output
  std::vector<std::vector<Image>> panels;
};

// Degrade with each row width, super-resolve with the code of each column
// width, record PSNR and the sharpness proxy.
SensitivityGrid sensitivity_grid(const Image& hr, int scale, const std::vector<double>& sigma_lr,
                                 const std::vector<double>& sigma_sr, SftmdNet& net,
                                 const PcaCodec& codec, int kernel_size = 21,
                                 bool keep_panels = true);

struct IterationCurve {
  std::vector<double> mean_psnr;  // index = iteration 0..t
  std::vector<double> mean_ssim;
  std::vector<double> mean_code_error;
  std::vector<double> mean_delta_norm;  // raw corrector outputs, index 0 = 0
};

// Mean metrics per IKC iteration over a test set of (HR image, width).
IterationCurve iteration_curve(const std::vector<Image>& hr_images,
                               const std::vector<double>& sigmas, int scale, int t,
                               const EvalModels& models, int kernel_size = 21);

// Mean PSNR per kernel width per pipeline on a shared test set.
struct WidthCurve {
  std::vector<double> widths;
  std::vector<Pipeline> pipelines;
  std::vector<std::vector<double>> mean_psnr;  // [pipeline][width]
};

WidthCurve psnr_vs_width(const std::vector<Image>& hr_images, int scale,
                         const std::vector<Pipeline>& pipelines,
                         const std::vector<double>& widths, int t, const EvalModels& models,
                         int kernel_size = 21);

}  // namespace ikc
