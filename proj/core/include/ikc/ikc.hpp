#pragma once

#include <optional>

#include "ikc/degrade.hpp"
#include "ikc/models.hpp"

namespace ikc {

// Axis-aligned clamp box for code estimates. Empty vectors disable clamping.
struct CodeBounds {
  std::vector<double> lo, hi;

  bool active() const { return !lo.empty(); }
  std::vector<double> clamp(const std::vector<double>& h) const;
};

CodeBounds bounds_from_codec(const PcaCodec& codec);
CodeBounds bounds_from_width_range(double width_min, double width_max);

struct IkcIteration {
  int index = 0;
  std::vector<double> code;
  std::vector<double> delta_applied;  // code[i] - code[i-1]; empty at index 0
  std::optional<Image> sr;            // clamped SR result, kept when requested
  std::optional<double> psnr_db;
  std::optional<double> ssim_value;
  std::optional<double> code_error;   // ||code - gt_code||_2
  double delta_norm = 0.0;            // ||raw corrector output||_2 (0 at index 0)
};

struct IkcTrace {
  std::vector<IkcIteration> iterations;
};

struct IkcModels {
  SftmdNet* sr = nullptr;
  PredictorNet* predictor = nullptr;
  CorrectorNet* corrector = nullptr;
};

struct IkcOptions {
  double stop_delta = 0.0;  // halt when ||delta h|| drops below; 0 = fixed iterations
  bool keep_images = false;
  const Image* ground_truth = nullptr;           // enables per-iteration PSNR/SSIM
  const std::vector<double>* gt_code = nullptr;  // enables per-iteration code error
};

struct IkcResult {
  Image sr;
  IkcTrace trace;
};

// Predict-and-correct super-resolution: the predictor initializes the code
// from the LR image, then t rounds of corrector update + SR re-synthesis.
// Updated codes are clamped to `bounds`; the initial prediction is not.
// t = 0 reduces to predictor + SR model.
IkcResult ikc_run(const Image& lr, int t, const IkcModels& models, const CodeBounds& bounds,
                  const IkcOptions& opts = {});

// Width-parameterized ablation: identical loop over 1-dimensional codes that
// hold the Gaussian width directly.
IkcResult ikc_run_width(const Image& lr, int t, const IkcModels& models, double width_min,
                        double width_max, const IkcOptions& opts = {});

// One trace record per line: iteration index, code values, applied delta,
// metrics when available.
void write_trace_jsonl(const std::filesystem::path& path, const IkcTrace& trace);

}  // namespace ikc
