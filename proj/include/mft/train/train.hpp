#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mft/eval/metrics.hpp"
#include "mft/model/mft.hpp"

namespace mft {

struct TrainConfig {
    double learning_rate = 5e-7;  // paper setting for JAAD; PIE uses 2e-5
    size_t epochs = 60;
    size_t batch_size = 2;
    uint64_t seed = 1;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double adam_eps = 1e-8;
    enum class ClassWeighting { ratio, none };
    ClassWeighting class_weighting = ClassWeighting::ratio;
    double grad_clip = 0.0;  // global-norm clip, 0 disables

    void validate() const;
};

// Per-parameter first/second moment estimates.
template <typename T>
struct AdamStateT {
    struct Slot {
        std::vector<T> m, v;
    };
    std::vector<Slot> slots;  // aligned with MFTParameters::named
    int64_t step = 0;

    explicit AdamStateT(const MFTParameters<T>& params);
};

// Bias-corrected Adam update in place from the accumulated gradients.
// Throws ContractError if any parameter is missing its gradient.
template <typename T>
void adam_step(MFTParameters<T>& params, AdamStateT<T>& state, const TrainConfig& cfg);

// Positive-class weight n_neg/n_pos over the training split (1 when the
// weighting mode is none or the split has no positives).
double positive_class_weight(const std::vector<ClipSample>& train_clips,
                             TrainConfig::ClassWeighting mode);

// Batch-mean weighted binary cross-entropy over per-clip probabilities:
//   -(w_pos * y * log p + (1-y) * log(1-p)), log arguments clamped at 1e-12.
template <typename T>
TensorT<T> weighted_bce(const std::vector<TensorT<T>>& probs, const std::vector<int>& labels,
                        T w_pos);

// Plain value version for scoring without a tape.
double weighted_bce_value(double prob, int label, double w_pos);

struct EpochRecord {
    size_t epoch = 0;
    double train_loss = 0.0;
    MetricsReport val;
    bool has_val = false;
};

struct TrainResult {
    MFTParameters<float> final_params;
    MFTParameters<float> best_params;  // best validation accuracy epoch
    size_t best_epoch = 0;
    std::vector<EpochRecord> history;
    double w_pos = 1.0;
};

// Epoch loop over seed-shuffled batches. Per-epoch train loss and validation
// metrics are recorded; both the final parameters and the best-validation
// parameters are returned. Aborts with NumericError naming epoch/batch if
// the loss goes non-finite.
TrainResult train(const MFTConfig& model_cfg, const std::vector<ClipSample>& train_clips,
                  const std::vector<ClipSample>& val_clips, const TrainConfig& cfg);

// Scores clips in eval mode (no dropout, no tape).
std::vector<double> score_clips(const MFTModelT<float>& model,
                                const std::vector<ClipSample>& clips);
std::vector<int> clip_labels(const std::vector<ClipSample>& clips);

std::string history_to_json(const TrainResult& result);

}  // namespace mft
