#include "ikc/train.hpp"

#include <chrono>
#include <cmath>

namespace ikc {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

void check_finite(double loss, const char* what, uint64_t step, uint64_t seed) {
  if (!std::isfinite(loss))
    throw Error::nan_loss(std::string(what) + " loss is not finite at step " +
                          std::to_string(step) + " (data seed " + std::to_string(seed) + ")");
}

TensorT<float> code_to_tensor(const KernelCode& code) {
  TensorT<float> t({code.dim()});
  for (int i = 0; i < code.dim(); ++i) t.data[size_t(i)] = float(code.values[size_t(i)]);
  return t;
}

void clamp01_inplace(TensorT<float>& t) {
  for (auto& v : t.data) v = clamp01(v);
}

std::vector<double> tensor_to_vec(const TensorT<float>& t) {
  std::vector<double> v(t.numel());
  for (size_t i = 0; i < v.size(); ++i) v[i] = double(t.data[i]);
  return v;
}

TensorT<float> vec_to_tensor(const std::vector<double>& v) {
  TensorT<float> t({int(v.size())});
  for (size_t i = 0; i < v.size(); ++i) t.data[i] = float(v[i]);
  return t;
}

}  // namespace

void TrainConfig::validate() const {
  if (lr_rate <= 0.0 || adam_beta1 <= 0.0 || adam_beta2 <= 0.0)
    throw Error::invalid_parameter("TrainConfig: rates must be positive");
  if (batch_size < 1 || steps < 0) throw Error::invalid_parameter("TrainConfig: bad batch/steps");
  if (unroll_t < 1) throw Error::invalid_parameter("TrainConfig: unroll_t must be >= 1");
}

double loss_sftmd(const TensorT<float>& sr_pred, const TensorT<float>& hr) {
  if (!sr_pred.same_shape(hr)) throw Error::invalid_parameter("loss_sftmd: shape mismatch");
  double acc = 0.0;
  for (size_t i = 0; i < sr_pred.numel(); ++i) {
    const double d = double(sr_pred.data[i]) - double(hr.data[i]);
    acc += d * d;
  }
  return acc / double(sr_pred.numel());
}

double loss_predictor(const TensorT<float>& h_pred, const TensorT<float>& h_gt) {
  if (!h_pred.same_shape(h_gt)) throw Error::invalid_parameter("loss_predictor: shape mismatch");
  double acc = 0.0;
  for (size_t i = 0; i < h_pred.numel(); ++i) {
    const double d = double(h_gt.data[i]) - double(h_pred.data[i]);
    acc += d * d;
  }
  return acc;
}

double loss_corrector(const TensorT<float>& h_prev, const TensorT<float>& delta_h,
                      const TensorT<float>& h_gt) {
  if (!h_prev.same_shape(delta_h) || !h_prev.same_shape(h_gt))
    throw Error::invalid_parameter("loss_corrector: shape mismatch");
  double acc = 0.0;
  for (size_t i = 0; i < h_prev.numel(); ++i) {
    const double d = double(h_gt.data[i]) - (double(h_prev.data[i]) + double(delta_h.data[i]));
    acc += d * d;
  }
  return acc;
}

PretrainStats pretrain_sftmd(const PairSampler& data, SftmdNet& net, Adam& opt,
                             const TrainConfig& cfg, const LogSink& sink, uint64_t start_step) {
  cfg.validate();
  const auto t0 = Clock::now();
  PretrainStats stats;
  double window_acc = 0.0;
  int window_n = 0;

  for (uint64_t step = start_step; step < uint64_t(cfg.steps); ++step) {
    opt.zero_grad();
    double batch_loss = 0.0;
    for (int i = 0; i < cfg.batch_size; ++i) {
      const uint64_t pair_index = step * uint64_t(cfg.batch_size) + uint64_t(i);
      const TrainingPair pair = data.make(pair_index);
      const TensorT<float> lr = to_float(pair.lr);
      const TensorT<float> hr = to_float(pair.hr);
      const TensorT<float> code = code_to_tensor(pair.code);

      const TensorT<float> sr = net.forward(lr, code, true);
      batch_loss += loss_sftmd(sr, hr) / double(cfg.batch_size);

      TensorT<float> gy = sr;
      const float scale = 2.0f / float(sr.numel() * size_t(cfg.batch_size));
      for (size_t j = 0; j < gy.numel(); ++j) gy.data[j] = scale * (sr.data[j] - hr.data[j]);
      net.backward(gy);
    }
    check_finite(batch_loss, "sftmd", step, data.config().seed);
    opt.step();

    if (step == start_step) stats.initial_loss = batch_loss;
    window_acc += batch_loss;
    ++window_n;
    if (sink && ((step + 1) % uint64_t(cfg.log_every) == 0 || step + 1 == uint64_t(cfg.steps))) {
      sink({step + 1, window_acc / window_n, seconds_since(t0)});
      stats.final_smoothed_loss = window_acc / window_n;
      window_acc = 0.0;
      window_n = 0;
    } else if (step + 1 == uint64_t(cfg.steps) && window_n > 0) {
      stats.final_smoothed_loss = window_acc / window_n;
    }
    stats.steps_done = step + 1;
  }
  return stats;
}

IkcTrainStats train_predictor_corrector(const PairSampler& data, SftmdNet& frozen_sr,
                                        PredictorNet& predictor, CorrectorNet& corrector,
                                        Adam& p_opt, Adam& c_opt, const TrainConfig& cfg,
                                        const CodeBounds& bounds, const LogSink& p_sink,
                                        const LogSink& c_sink, uint64_t start_step) {
  cfg.validate();
  if (frozen_sr.config().code_dim != predictor.code_dim() ||
      frozen_sr.config().code_dim != corrector.code_dim())
    throw Error::invalid_configuration("train_predictor_corrector: code dimension mismatch");
  const auto t0 = Clock::now();
  IkcTrainStats stats;

  for (uint64_t step = start_step; step < uint64_t(cfg.steps); ++step) {
    // minibatch, shared by the predictor update and the unrolled correction
    std::vector<TrainingPair> batch;
    batch.reserve(size_t(cfg.batch_size));
    for (int i = 0; i < cfg.batch_size; ++i)
      batch.push_back(data.make(step * uint64_t(cfg.batch_size) + uint64_t(i)));

    // predictor step
    p_opt.zero_grad();
    double p_loss = 0.0;
    std::vector<std::vector<double>> h(batch.size());
    for (size_t i = 0; i < batch.size(); ++i) {
      const TensorT<float> lr = to_float(batch[i].lr);
      const TensorT<float> h_gt = code_to_tensor(batch[i].code);
      const TensorT<float> h_pred = predictor.forward(lr, true);
      p_loss += loss_predictor(h_pred, h_gt) / double(cfg.batch_size);
      TensorT<float> g({h_pred.dim(0)});
      for (size_t j = 0; j < g.numel(); ++j)
        g.data[j] = 2.0f * (h_pred.data[j] - h_gt.data[j]) / float(cfg.batch_size);
      predictor.backward(g);
      h[i] = tensor_to_vec(h_pred);  // initial estimate for the unroll, detached
    }
    check_finite(p_loss, "predictor", step, data.config().seed);
    p_opt.step();

    // corrector: unroll with the frozen SR network, one optimizer step per
    // unroll iteration
    double c_loss_mean = 0.0;
    for (int it = 1; it <= cfg.unroll_t; ++it) {
      c_opt.zero_grad();
      double c_loss = 0.0;
      for (size_t i = 0; i < batch.size(); ++i) {
        const TensorT<float> lr = to_float(batch[i].lr);
        const TensorT<float> h_gt = code_to_tensor(batch[i].code);
        const TensorT<float> h_cur = vec_to_tensor(h[i]);

        TensorT<float> sr = frozen_sr.forward(lr, h_cur, false);
        clamp01_inplace(sr);

        const TensorT<float> delta = corrector.forward(sr, h_cur, true);
        c_loss += loss_corrector(h_cur, delta, h_gt) / double(cfg.batch_size);
        TensorT<float> g({delta.dim(0)});
        for (size_t j = 0; j < g.numel(); ++j)
          g.data[j] =
              2.0f * ((h_cur.data[j] + delta.data[j]) - h_gt.data[j]) / float(cfg.batch_size);
        corrector.backward(g);

        std::vector<double> h_next(h[i].size());
        for (size_t j = 0; j < h_next.size(); ++j) h_next[j] = h[i][j] + double(delta.data[j]);
        h[i] = bounds.clamp(h_next);
      }
      check_finite(c_loss, "corrector", step, data.config().seed);
      c_opt.step();
      c_loss_mean += c_loss / double(cfg.unroll_t);
    }

    stats.final_predictor_loss = p_loss;
    stats.final_corrector_loss = c_loss_mean;
    stats.steps_done = step + 1;
    if ((step + 1) % uint64_t(cfg.log_every) == 0 || step + 1 == uint64_t(cfg.steps)) {
      if (p_sink) p_sink({step + 1, p_loss, seconds_since(t0)});
      if (c_sink) c_sink({step + 1, c_loss_mean, seconds_since(t0)});
    }
  }
  return stats;
}

}  // namespace ikc
