#include "mft/eval/metrics.hpp"

#include <algorithm>
#include <numeric>

#include "json.hpp"
#include "mft/core/errors.hpp"

namespace mft {

MetricsReport compute_metrics(const std::vector<double>& scores, const std::vector<int>& labels,
                              double threshold) {
    if (scores.empty()) throw ContractError("compute_metrics: empty input");
    if (scores.size() != labels.size())
        throw ContractError("compute_metrics: " + std::to_string(scores.size()) + " scores vs " +
                            std::to_string(labels.size()) + " labels");

    MetricsReport r;
    r.threshold = threshold;
    for (size_t i = 0; i < scores.size(); ++i) {
        if (labels[i] != 0 && labels[i] != 1)
            throw DataError("compute_metrics: label must be 0 or 1");
        const bool pred = scores[i] > threshold;
        if (pred && labels[i] == 1) ++r.tp;
        else if (pred && labels[i] == 0) ++r.fp;
        else if (!pred && labels[i] == 0) ++r.tn;
        else ++r.fn;
    }
    const double total = static_cast<double>(scores.size());
    r.acc = static_cast<double>(r.tp + r.tn) / total;
    r.precision = (r.tp + r.fp) == 0 ? 0.0
                                     : static_cast<double>(r.tp) / static_cast<double>(r.tp + r.fp);
    r.recall = (r.tp + r.fn) == 0 ? 0.0
                                  : static_cast<double>(r.tp) / static_cast<double>(r.tp + r.fn);
    r.f1 = (r.precision + r.recall) == 0.0 ? 0.0
                                           : 2.0 * r.precision * r.recall /
                                                 (r.precision + r.recall);
    const size_t n_pos = r.tp + r.fn, n_neg = r.fp + r.tn;
    if (n_pos > 0 && n_neg > 0) {
        r.auc = roc_auc(scores, labels);
        r.auc_defined = true;
    } else {
        r.auc = 0.5;
        r.auc_defined = false;
    }
    return r;
}

double roc_auc(const std::vector<double>& scores, const std::vector<int>& labels) {
    if (scores.empty() || scores.size() != labels.size())
        throw ContractError("roc_auc: invalid input sizes");
    size_t n_pos = 0;
    for (int y : labels) {
        if (y != 0 && y != 1) throw DataError("roc_auc: label must be 0 or 1");
        n_pos += static_cast<size_t>(y);
    }
    const size_t n = scores.size();
    const size_t n_neg = n - n_pos;
    if (n_pos == 0 || n_neg == 0)
        throw ContractError("roc_auc: undefined for single-class input");

    std::vector<size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](size_t a, size_t b) { return scores[a] < scores[b]; });

    // average ranks across tie groups, ranks are 1-based
    double rank_sum_pos = 0.0;
    size_t i = 0;
    while (i < n) {
        size_t j = i;
        while (j + 1 < n && scores[order[j + 1]] == scores[order[i]]) ++j;
        const double avg_rank = 0.5 * static_cast<double>(i + 1 + j + 1);
        for (size_t k = i; k <= j; ++k)
            if (labels[order[k]] == 1) rank_sum_pos += avg_rank;
        i = j + 1;
    }
    const double u = rank_sum_pos -
                     static_cast<double>(n_pos) * (static_cast<double>(n_pos) + 1.0) / 2.0;
    return u / (static_cast<double>(n_pos) * static_cast<double>(n_neg));
}

std::string metrics_to_json(const MetricsReport& r) {
    nlohmann::json j;
    j["acc"] = r.acc;
    j["auc"] = r.auc;
    j["auc_defined"] = r.auc_defined;
    j["f1"] = r.f1;
    j["precision"] = r.precision;
    j["recall"] = r.recall;
    j["tp"] = r.tp;
    j["fp"] = r.fp;
    j["tn"] = r.tn;
    j["fn"] = r.fn;
    j["threshold"] = r.threshold;
    return j.dump(2);
}

}  // namespace mft
