#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace mft {

struct MetricsReport {
    double acc = 0.0;
    double auc = 0.0;
    double f1 = 0.0;
    double precision = 0.0;
    double recall = 0.0;
    size_t tp = 0, fp = 0, tn = 0, fn = 0;
    double threshold = 0.5;
    // AUC needs both classes present; when they are not, auc is reported as
    // 0.5 with auc_defined=false instead of failing a whole evaluation run.
    bool auc_defined = true;
};

// Hard predictions at the threshold (score > threshold). Zero-denominator
// precision/recall/f1 are defined as 0. Throws ContractError on empty or
// mismatched inputs, DataError on labels outside {0,1}.
MetricsReport compute_metrics(const std::vector<double>& scores, const std::vector<int>& labels,
                              double threshold = 0.5);

// Mann-Whitney U with average-rank tie handling; equals the trapezoidal ROC
// area. Throws ContractError unless both classes are present.
double roc_auc(const std::vector<double>& scores, const std::vector<int>& labels);

std::string metrics_to_json(const MetricsReport& report);

}  // namespace mft
