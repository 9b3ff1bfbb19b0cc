#pragma once

#include <string>
#include <vector>

#include "mft/train/train.hpp"

namespace mft {

struct AblationRow {
    std::string variant;
    MetricsReport metrics;  // on the test split, best-validation parameters
    size_t params = 0;
};

// Trains each variant from the same seed and data and scores the test split.
// Variant names: full, v1 (no E), v2 (no P), v3 (no P/E), v4 (mean pool CCR),
// v5 (modality attention CCR).
std::vector<AblationRow> ablation_run(const MFTConfig& base,
                                      const std::vector<std::string>& variants,
                                      const std::vector<ClipSample>& train_clips,
                                      const std::vector<ClipSample>& val_clips,
                                      const std::vector<ClipSample>& test_clips,
                                      const TrainConfig& train_cfg);

// CSV in Table-3/4 column order: Variant, Acc, AUC, F1, Precision, Recall.
std::string ablation_csv(const std::vector<AblationRow>& rows);
std::string ablation_json(const std::vector<AblationRow>& rows);

}  // namespace mft
