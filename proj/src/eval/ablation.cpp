#include "mft/eval/ablation.hpp"

#include <sstream>

#include "json.hpp"

namespace mft {

std::vector<AblationRow> ablation_run(const MFTConfig& base,
                                      const std::vector<std::string>& variants,
                                      const std::vector<ClipSample>& train_clips,
                                      const std::vector<ClipSample>& val_clips,
                                      const std::vector<ClipSample>& test_clips,
                                      const TrainConfig& train_cfg) {
    std::vector<AblationRow> rows;
    for (const auto& name : variants) {
        const MFTConfig cfg = apply_variant(base, name);
        TrainResult result = train(cfg, train_clips, val_clips, train_cfg);
        MFTModelT<float> best(cfg, std::move(result.best_params));
        AblationRow row;
        row.variant = name;
        row.metrics = compute_metrics(score_clips(best, test_clips), clip_labels(test_clips));
        row.params = best.param_count();
        rows.push_back(std::move(row));
    }
    return rows;
}

std::string ablation_csv(const std::vector<AblationRow>& rows) {
    std::ostringstream out;
    out << "Variant,Acc,AUC,F1,Precision,Recall\n";
    out.setf(std::ios::fixed);
    out.precision(4);
    for (const auto& row : rows) {
        out << row.variant << "," << row.metrics.acc << "," << row.metrics.auc << ","
            << row.metrics.f1 << "," << row.metrics.precision << "," << row.metrics.recall
            << "\n";
    }
    return out.str();
}

std::string ablation_json(const std::vector<AblationRow>& rows) {
    nlohmann::json j = nlohmann::json::array();
    for (const auto& row : rows) {
        nlohmann::json r;
        r["variant"] = row.variant;
        r["params"] = row.params;
        r["metrics"] = nlohmann::json::parse(metrics_to_json(row.metrics));
        j.push_back(r);
    }
    return j.dump(2);
}

}  // namespace mft
