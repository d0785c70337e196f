#include "ikc/eval.hpp"

namespace ikc {

std::string to_string(Pipeline p) {
  switch (p) {
    case Pipeline::bicubic: return "bicubic";
    case Pipeline::p_plus_sftmd: return "p-plus-sftmd";
    case Pipeline::sftmd_gt_kernel: return "sftmd-gt-kernel";
    case Pipeline::ikc: return "ikc";
  }
  return "bicubic";
}

Pipeline pipeline_from_string(const std::string& s) {
  if (s == "bicubic") return Pipeline::bicubic;
  if (s == "p-plus-sftmd") return Pipeline::p_plus_sftmd;
  if (s == "sftmd-gt-kernel") return Pipeline::sftmd_gt_kernel;
  if (s == "ikc") return Pipeline::ikc;
  throw Error::invalid_parameter("unknown pipeline: " + s);
}

void BenchmarkReport::finalize() {
  mean_psnr = 0.0;
  mean_ssim = 0.0;
  if (records.empty()) return;
  for (const auto& r : records) {
    mean_psnr += r.psnr_db;
    mean_ssim += r.ssim_value;
  }
  mean_psnr /= double(records.size());
  mean_ssim /= double(records.size());
}

namespace {

void require_learned_models(Pipeline p, const EvalModels& m) {
  const bool needs_sr = p != Pipeline::bicubic;
  const bool needs_predictor = p == Pipeline::p_plus_sftmd || p == Pipeline::ikc;
  const bool needs_corrector = p == Pipeline::ikc;
  if (needs_sr && !m.sr)
    throw Error::invalid_configuration(to_string(p) + " pipeline needs an SR checkpoint");
  if (needs_predictor && !m.predictor)
    throw Error::invalid_configuration(to_string(p) + " pipeline needs a predictor checkpoint");
  if (needs_corrector && !m.corrector)
    throw Error::invalid_configuration(to_string(p) + " pipeline needs a corrector checkpoint");
  if (needs_sr && m.sr->config().code_dim > 1 && !m.codec)
    throw Error::invalid_configuration(to_string(p) + " pipeline needs the kernel codec");
}

TensorT<float> code_tensor_for_kernel(const EvalModels& models, const BlurKernel& kernel,
                                      double sigma) {
  const int b = models.sr->config().code_dim;
  TensorT<float> code({b});
  if (b == 1 && !models.codec) {
    code.data[0] = float(sigma);
  } else {
    const KernelCode h = encode(*models.codec, kernel);
    for (int i = 0; i < b; ++i) code.data[size_t(i)] = float(h.values[size_t(i)]);
  }
  return code;
}

}  // namespace

Image run_pipeline(const Image& lr, int out_h, int out_w, Pipeline pipeline, int t,
                   const EvalModels& models, const BlurKernel* gt_kernel) {
  require_learned_models(pipeline, models);
  switch (pipeline) {
    case Pipeline::bicubic:
      return bicubic_resize_to(lr, out_h, out_w);
    case Pipeline::sftmd_gt_kernel: {
      if (!gt_kernel)
        throw Error::invalid_configuration("sftmd-gt-kernel pipeline needs the true kernel");
      const TensorT<float> code = code_tensor_for_kernel(models, *gt_kernel, 0.0);
      return clamp_image(to_image(models.sr->forward(to_float(lr), code, false)));
    }
    case Pipeline::p_plus_sftmd: {
      IkcModels m{models.sr, models.predictor, nullptr};
      return ikc_run(lr, 0, m, CodeBounds{}).sr;
    }
    case Pipeline::ikc: {
      IkcModels m{models.sr, models.predictor, models.corrector};
      const CodeBounds bounds = models.codec ? bounds_from_codec(*models.codec) : CodeBounds{};
      return ikc_run(lr, t, m, bounds).sr;
    }
  }
  throw Error::invalid_parameter("run_pipeline: unknown pipeline");
}

BenchmarkReport run_gaussian8(const std::vector<Image>& hr_images,
                              const std::vector<std::string>& names, int scale, Pipeline pipeline,
                              int t, const EvalModels& models, int kernel_size) {
  if (hr_images.size() != names.size())
    throw Error::invalid_parameter("run_gaussian8: image/name count mismatch");
  require_learned_models(pipeline, models);

  const std::vector<double> widths = gaussian8_widths(scale);
  BenchmarkReport report;
  report.metadata["scale"] = std::to_string(scale);
  report.metadata["pipeline"] = to_string(pipeline);
  report.metadata["iterations"] = std::to_string(pipeline == Pipeline::ikc ? t : 0);

  for (double sigma : widths) {
    const BlurKernel kernel = gaussian_kernel(sigma, kernel_size);
    DegradationSpec spec;
    spec.scale = scale;
    spec.kernel = kernel;
    spec.downsampler = Downsampler::bicubic;
    spec.noise_sigma_255 = 0.0;
    for (size_t i = 0; i < hr_images.size(); ++i) {
      const Image hr = center_crop_to_multiple(hr_images[i], scale);
      const Image lr = degrade(hr, spec, 0);
      const Image sr = run_pipeline(lr, hr.height(), hr.width(), pipeline, t, models, &kernel);
      ScoreRecord rec;
      rec.image = names[i];
      rec.sigma = sigma;
      rec.psnr_db = psnr(sr, hr);
      rec.ssim_value = ssim(sr, hr);
      report.records.push_back(rec);
    }
  }
  report.finalize();
  return report;
}

SensitivityGrid sensitivity_grid(const Image& hr_in, int scale, const std::vector<double>& sigma_lr,
                                 const std::vector<double>& sigma_sr, SftmdNet& net,
                                 const PcaCodec& codec, int kernel_size, bool keep_panels) {
  if (sigma_lr.empty() || sigma_sr.empty())
    throw Error::invalid_parameter("sensitivity_grid: empty width lists");

  const Image hr = center_crop_to_multiple(hr_in, scale);
  SensitivityGrid grid;
  grid.sigma_lr = sigma_lr;
  grid.sigma_sr = sigma_sr;

  EvalModels models;
  models.sr = &net;
  models.codec = &codec;

  for (double s_lr : sigma_lr) {
    DegradationSpec spec;
    spec.scale = scale;
    spec.kernel = gaussian_kernel(s_lr, kernel_size);
    spec.downsampler = Downsampler::bicubic;
    const Image lr = degrade(hr, spec, 0);

    std::vector<double> psnr_row, sharp_row;
    std::vector<Image> panel_row;
    for (double s_sr : sigma_sr) {
      const BlurKernel k_sr = gaussian_kernel(s_sr, kernel_size);
      const TensorT<float> code = code_tensor_for_kernel(models, k_sr, s_sr);
      const Image sr = clamp_image(to_image(net.forward(to_float(lr), code, false)));
      psnr_row.push_back(psnr(sr, hr));
      sharp_row.push_back(mean_squared_laplacian(sr));
      if (keep_panels) panel_row.push_back(sr);
    }
    grid.psnr_db.push_back(std::move(psnr_row));
    grid.sharpness.push_back(std::move(sharp_row));
    if (keep_panels) grid.panels.push_back(std::move(panel_row));
  }
  return grid;
}

IterationCurve iteration_curve(const std::vector<Image>& hr_images,
                               const std::vector<double>& sigmas, int scale, int t,
                               const EvalModels& models, int kernel_size) {
  if (hr_images.size() != sigmas.size())
    throw Error::invalid_parameter("iteration_curve: image/width count mismatch");
  require_learned_models(Pipeline::ikc, models);

  IterationCurve curve;
  curve.mean_psnr.assign(size_t(t) + 1, 0.0);
  curve.mean_ssim.assign(size_t(t) + 1, 0.0);
  curve.mean_code_error.assign(size_t(t) + 1, 0.0);
  curve.mean_delta_norm.assign(size_t(t) + 1, 0.0);

  IkcModels m{models.sr, models.predictor, models.corrector};
  const CodeBounds bounds = models.codec ? bounds_from_codec(*models.codec) : CodeBounds{};

  for (size_t i = 0; i < hr_images.size(); ++i) {
    const Image hr = center_crop_to_multiple(hr_images[i], scale);
    const BlurKernel kernel = gaussian_kernel(sigmas[i], kernel_size);
    DegradationSpec spec;
    spec.scale = scale;
    spec.kernel = kernel;
    const Image lr = degrade(hr, spec, 0);

    std::vector<double> gt_code;
    if (models.codec) {
      gt_code = encode(*models.codec, kernel).values;
    } else {
      gt_code = {sigmas[i]};
    }

    IkcOptions opts;
    opts.ground_truth = &hr;
    opts.gt_code = &gt_code;
    const IkcResult result = ikc_run(lr, t, m, bounds, opts);
    for (const auto& rec : result.trace.iterations) {
      const size_t j = size_t(rec.index);
      curve.mean_psnr[j] += *rec.psnr_db / double(hr_images.size());
      curve.mean_ssim[j] += *rec.ssim_value / double(hr_images.size());
      curve.mean_code_error[j] += *rec.code_error / double(hr_images.size());
      curve.mean_delta_norm[j] += rec.delta_norm / double(hr_images.size());
    }
  }
  return curve;
}

WidthCurve psnr_vs_width(const std::vector<Image>& hr_images, int scale,
                         const std::vector<Pipeline>& pipelines,
                         const std::vector<double>& widths, int t, const EvalModels& models,
                         int kernel_size) {
  WidthCurve out;
  out.widths = widths;
  out.pipelines = pipelines;
  for (Pipeline p : pipelines) {
    require_learned_models(p, models);
    std::vector<double> row;
    for (double sigma : widths) {
      const BlurKernel kernel = gaussian_kernel(sigma, kernel_size);
      DegradationSpec spec;
      spec.scale = scale;
      spec.kernel = kernel;
      double acc = 0.0;
      for (const Image& hr_in : hr_images) {
        const Image hr = center_crop_to_multiple(hr_in, scale);
        const Image lr = degrade(hr, spec, 0);
        const Image sr = run_pipeline(lr, hr.height(), hr.width(), p, t, models, &kernel);
        acc += psnr(sr, hr);
      }
      row.push_back(acc / double(hr_images.size()));
    }
    out.mean_psnr.push_back(std::move(row));
  }
  return out;
}

}  // namespace ikc
