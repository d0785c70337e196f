#include "ikc/ikc.hpp"

#include <cmath>
#include <fstream>

#include <nlohmann/json.hpp>

#include "ikc/metrics.hpp"

namespace ikc {

using nlohmann::json;

std::vector<double> CodeBounds::clamp(const std::vector<double>& h) const {
  if (!active()) return h;
  if (h.size() != lo.size())
    throw Error::invalid_parameter("CodeBounds: code length does not match bounds");
  std::vector<double> out = h;
  for (size_t i = 0; i < out.size(); ++i)
    out[i] = std::min(std::max(out[i], lo[i]), hi[i]);
  return out;
}

CodeBounds bounds_from_codec(const PcaCodec& codec) {
  CodeBounds b;
  b.lo.assign(codec.code_lo.data(), codec.code_lo.data() + codec.code_lo.size());
  b.hi.assign(codec.code_hi.data(), codec.code_hi.data() + codec.code_hi.size());
  return b;
}

CodeBounds bounds_from_width_range(double width_min, double width_max) {
  return {{width_min}, {width_max}};
}

namespace {

TensorT<float> to_code_tensor(const std::vector<double>& h) {
  TensorT<float> t({int(h.size())});
  for (size_t i = 0; i < h.size(); ++i) t.data[i] = float(h[i]);
  return t;
}

std::vector<double> to_code_vector(const TensorT<float>& t) {
  std::vector<double> h(t.numel());
  for (size_t i = 0; i < h.size(); ++i) h[i] = double(t.data[i]);
  return h;
}

double norm2(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

void fill_metrics(IkcIteration& rec, const Image& sr, const IkcOptions& opts) {
  if (opts.ground_truth) {
    rec.psnr_db = psnr(sr, *opts.ground_truth);
    if (sr.height() >= 11 && sr.width() >= 11) rec.ssim_value = ssim(sr, *opts.ground_truth);
  }
  if (opts.gt_code) {
    double s = 0.0;
    for (size_t i = 0; i < rec.code.size(); ++i) {
      const double d = rec.code[i] - (*opts.gt_code)[i];
      s += d * d;
    }
    rec.code_error = std::sqrt(s);
  }
}

}  // namespace

IkcResult ikc_run(const Image& lr, int t, const IkcModels& models, const CodeBounds& bounds,
                  const IkcOptions& opts) {
  if (!models.sr || !models.predictor) throw Error::invalid_configuration("ikc_run: missing models");
  if (t > 0 && !models.corrector)
    throw Error::invalid_configuration("ikc_run: corrector required for t > 0");
  if (t < 0) throw Error::invalid_parameter("ikc_run: t must be >= 0");
  const int b = models.sr->config().code_dim;
  if (models.predictor->code_dim() != b || (models.corrector && models.corrector->code_dim() != b))
    throw Error::invalid_configuration("ikc_run: models disagree on the code dimension");
  if (bounds.active() && int(bounds.lo.size()) != b)
    throw Error::invalid_configuration("ikc_run: bounds dimension does not match the code");

  const TensorT<float> lr_f = to_float(lr);

  std::vector<double> h = to_code_vector(models.predictor->forward(lr_f, false));
  Image sr = to_image(models.sr->forward(lr_f, to_code_tensor(h), false));
  sr = clamp_image(sr);

  IkcResult result;
  IkcIteration rec0;
  rec0.index = 0;
  rec0.code = h;
  if (opts.keep_images) rec0.sr = sr;
  fill_metrics(rec0, sr, opts);
  result.trace.iterations.push_back(std::move(rec0));

  for (int i = 1; i <= t; ++i) {
    const TensorT<float> delta_f =
        models.corrector->forward(to_float(sr), to_code_tensor(h), false);
    const std::vector<double> delta = to_code_vector(delta_f);

    std::vector<double> h_next(h.size());
    for (size_t j = 0; j < h.size(); ++j) h_next[j] = h[j] + delta[j];
    h_next = bounds.clamp(h_next);

    IkcIteration rec;
    rec.index = i;
    rec.delta_norm = norm2(delta);
    rec.delta_applied.resize(h.size());
    for (size_t j = 0; j < h.size(); ++j) rec.delta_applied[j] = h_next[j] - h[j];
    h = std::move(h_next);

    sr = clamp_image(to_image(models.sr->forward(lr_f, to_code_tensor(h), false)));
    rec.code = h;
    if (opts.keep_images) rec.sr = sr;
    fill_metrics(rec, sr, opts);
    result.trace.iterations.push_back(std::move(rec));

    if (opts.stop_delta > 0.0 && norm2(delta) < opts.stop_delta) break;
  }

  result.sr = std::move(sr);
  return result;
}

IkcResult ikc_run_width(const Image& lr, int t, const IkcModels& models, double width_min,
                        double width_max, const IkcOptions& opts) {
  if (models.sr && models.sr->config().code_dim != 1)
    throw Error::invalid_configuration("ikc_run_width: models must use 1-dimensional codes");
  return ikc_run(lr, t, models, bounds_from_width_range(width_min, width_max), opts);
}

void write_trace_jsonl(const std::filesystem::path& path, const IkcTrace& trace) {
  std::ofstream os(path);
  if (!os) throw Error::io("cannot open trace file for writing: " + path.string());
  for (const auto& it : trace.iterations) {
    json j;
    j["iteration"] = it.index;
    j["code"] = it.code;
    if (!it.delta_applied.empty()) j["delta_applied"] = it.delta_applied;
    j["delta_norm"] = it.delta_norm;
    if (it.psnr_db) j["psnr"] = *it.psnr_db;
    if (it.ssim_value) j["ssim"] = *it.ssim_value;
    if (it.code_error) j["code_error"] = *it.code_error;
    os << j.dump() << "\n";
  }
  if (!os) throw Error::io("trace write failed: " + path.string());
}

}  // namespace ikc
