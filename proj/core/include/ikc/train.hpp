#pragma once

#include <functional>

#include "ikc/degrade.hpp"
#include "ikc/ikc.hpp"
#include "ikc/models.hpp"
#include "ikc/optimizer.hpp"

namespace ikc {

struct TrainConfig {
  double lr_rate = 1e-4;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  int batch_size = 16;
  int steps = 20000;
  int unroll_t = 7;
  uint64_t seed = 0;
  int log_every = 100;

  void validate() const;
};

// ---- losses ----------------------------------------------------------------

// Mean squared pixel difference over all channels and pixels.
double loss_sftmd(const TensorT<float>& sr_pred, const TensorT<float>& hr);

// Squared Euclidean distance between code vectors.
double loss_predictor(const TensorT<float>& h_pred, const TensorT<float>& h_gt);

// Squared distance between the corrected code and the ground truth.
double loss_corrector(const TensorT<float>& h_prev, const TensorT<float>& delta_h,
                      const TensorT<float>& h_gt);

// ---- training --------------------------------------------------------------

struct StepLog {
  uint64_t step = 0;
  double loss = 0.0;
  double wall_seconds = 0.0;
};
using LogSink = std::function<void(const StepLog&)>;

struct PretrainStats {
  uint64_t steps_done = 0;
  double initial_loss = 0.0;
  double final_smoothed_loss = 0.0;  // mean of the last log window
};

// MSE pretraining of the SR network on synthesized pairs with ground-truth
// codes. Pair indices advance with the global step so resumed runs see fresh
// data. A non-finite loss aborts with the offending batch's seed context.
PretrainStats pretrain_sftmd(const PairSampler& data, SftmdNet& net, Adam& opt,
                             const TrainConfig& cfg, const LogSink& sink = {},
                             uint64_t start_step = 0);

struct IkcTrainStats {
  uint64_t steps_done = 0;
  double final_predictor_loss = 0.0;
  double final_corrector_loss = 0.0;
};

// Alternating predictor/corrector training against a frozen SR network: per
// batch the predictor takes one supervised step, then the loop is unrolled
// `unroll_t` times and the corrector takes one step per unroll iteration. SR
// images entering the corrector are synthesized with the frozen network and
// treated as data (no gradient flows through it).
IkcTrainStats train_predictor_corrector(const PairSampler& data, SftmdNet& frozen_sr,
                                        PredictorNet& predictor, CorrectorNet& corrector,
                                        Adam& p_opt, Adam& c_opt, const TrainConfig& cfg,
                                        const CodeBounds& bounds, const LogSink& p_sink = {},
                                        const LogSink& c_sink = {}, uint64_t start_step = 0);

}  // namespace ikc
