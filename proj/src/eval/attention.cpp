#include "mft/eval/attention.hpp"

#include "json.hpp"

namespace mft {

namespace {

void accumulate(std::vector<AlphaMat>& into, const std::vector<AlphaMat>& from) {
    if (into.empty()) {
        into = from;
        return;
    }
    for (size_t h = 0; h < into.size(); ++h)
        for (size_t i = 0; i < into[h].w.size(); ++i) into[h].w[i] += from[h].w[i];
}

void divide(std::vector<AlphaMat>& mats, double n) {
    for (auto& m : mats)
        for (auto& x : m.w) x /= n;
}

AlphaMat head_mean(const std::vector<AlphaMat>& mats) {
    AlphaMat mean;
    if (mats.empty()) return mean;
    mean.rows = mats[0].rows;
    mean.cols = mats[0].cols;
    mean.w.assign(mats[0].w.size(), 0.0);
    for (const auto& m : mats)
        for (size_t i = 0; i < m.w.size(); ++i) mean.w[i] += m.w[i];
    for (auto& x : mean.w) x /= static_cast<double>(mats.size());
    return mean;
}

nlohmann::json alpha_to_json(const AlphaMat& m) {
    nlohmann::json rows = nlohmann::json::array();
    for (size_t r = 0; r < m.rows; ++r) {
        nlohmann::json row = nlohmann::json::array();
        for (size_t c = 0; c < m.cols; ++c) row.push_back(m.at(r, c));
        rows.push_back(row);
    }
    return rows;
}

}  // namespace

AttentionSummary attention_summary(const MFTModelT<float>& model,
                                   const std::vector<ClipSample>& clips) {
    if (clips.empty()) throw ContractError("attention_summary: empty clip set");

    AttentionSummary summary;
    summary.token_labels.push_back("global");
    for (ContextId id : model.config().enabled_contexts())
        summary.token_labels.push_back(to_string(id));

    for (const auto& clip : clips) {
        auto fwd = model.forward(clip, /*training=*/false, nullptr, /*want_trace=*/true);
        accumulate(summary.mc, fwd.trace.mc);
        accumulate(summary.gc, fwd.trace.gc);
    }
    const double n = static_cast<double>(clips.size());
    divide(summary.mc, n);
    divide(summary.gc, n);
    summary.mc_head_mean = head_mean(summary.mc);
    summary.gc_head_mean = head_mean(summary.gc);
    summary.n_clips = clips.size();
    return summary;
}

std::string attention_summary_to_json(const AttentionSummary& summary) {
    nlohmann::json j;
    j["token_labels"] = summary.token_labels;
    j["n_clips"] = summary.n_clips;
    nlohmann::json mc = nlohmann::json::array();
    for (const auto& m : summary.mc) mc.push_back(alpha_to_json(m));
    nlohmann::json gc = nlohmann::json::array();
    for (const auto& m : summary.gc) gc.push_back(alpha_to_json(m));
    j["mc_per_head"] = mc;
    j["gc_per_head"] = gc;
    j["mc_head_mean"] = alpha_to_json(summary.mc_head_mean);
    j["gc_head_mean"] = alpha_to_json(summary.gc_head_mean);
    return j.dump(2);
}

}  // namespace mft
