#include "mft/train/train.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "json.hpp"
#include "mft/train/grad_check.hpp"

namespace mft {

namespace {
constexpr uint64_t kTagInit = 0x696e6974u;
constexpr uint64_t kTagShuffle = 0x73687566u;
constexpr uint64_t kTagDropout = 0x64726f70u;
}  // namespace

void TrainConfig::validate() const {
    if (!(learning_rate > 0.0)) throw ConfigError("train: learning_rate must be > 0");
    if (batch_size < 1) throw ConfigError("train: batch_size must be >= 1");
    if (epochs < 1) throw ConfigError("train: epochs must be >= 1");
    if (beta1 < 0.0 || beta1 >= 1.0 || beta2 < 0.0 || beta2 >= 1.0)
        throw ConfigError("train: betas must be in [0,1)");
    if (!(adam_eps > 0.0)) throw ConfigError("train: adam_eps must be > 0");
    if (grad_clip < 0.0) throw ConfigError("train: grad_clip must be >= 0");
}

template <typename T>
AdamStateT<T>::AdamStateT(const MFTParameters<T>& params) {
    slots.reserve(params.named.size());
    for (const auto& [name, t] : params.named) {
        Slot slot;
        slot.m.assign(t.size(), T(0));
        slot.v.assign(t.size(), T(0));
        slots.push_back(std::move(slot));
    }
}

template <typename T>
void adam_step(MFTParameters<T>& params, AdamStateT<T>& state, const TrainConfig& cfg) {
    if (state.slots.size() != params.named.size())
        throw ContractError("adam_step: state does not match parameter set");
    ++state.step;
    const double b1 = cfg.beta1, b2 = cfg.beta2;
    const double bc1 = 1.0 - std::pow(b1, static_cast<double>(state.step));
    const double bc2 = 1.0 - std::pow(b2, static_cast<double>(state.step));
    for (size_t p = 0; p < params.named.size(); ++p) {
        auto& [name, t] = params.named[p];
        if (!t.has_grad())
            throw ContractError("adam_step: missing gradient for '" + name + "'");
        auto& slot = state.slots[p];
        const std::vector<T>& g = t.grad();
        T* w = t.data();
        for (size_t i = 0; i < g.size(); ++i) {
            const double gi = static_cast<double>(g[i]);
            const double m = b1 * static_cast<double>(slot.m[i]) + (1.0 - b1) * gi;
            const double v = b2 * static_cast<double>(slot.v[i]) + (1.0 - b2) * gi * gi;
            slot.m[i] = static_cast<T>(m);
            slot.v[i] = static_cast<T>(v);
            const double mhat = m / bc1;
            const double vhat = v / bc2;
            w[i] = static_cast<T>(static_cast<double>(w[i]) -
                                  cfg.learning_rate * mhat / (std::sqrt(vhat) + cfg.adam_eps));
        }
    }
}

double positive_class_weight(const std::vector<ClipSample>& train_clips,
                             TrainConfig::ClassWeighting mode) {
    if (mode == TrainConfig::ClassWeighting::none) return 1.0;
    size_t n_pos = 0, n_neg = 0;
    for (const auto& clip : train_clips) (clip.label == 1 ? n_pos : n_neg) += 1;
    // the ratio is meaningless on a single-class split; a literal 0 would
    // silently zero the loss
    if (n_pos == 0 || n_neg == 0) return 1.0;
    return static_cast<double>(n_neg) / static_cast<double>(n_pos);
}

template <typename T>
TensorT<T> weighted_bce(const std::vector<TensorT<T>>& probs, const std::vector<int>& labels,
                        T w_pos) {
    if (probs.empty() || probs.size() != labels.size())
        throw ContractError("weighted_bce: invalid batch");
    const T floor = T(1e-12);
    TensorT<T> total;
    for (size_t i = 0; i < probs.size(); ++i) {
        if (probs[i].size() != 1)
            throw ContractError("weighted_bce: probabilities must be scalar");
        TensorT<T> term;
        if (labels[i] == 1)
            term = scale(log_clamped(probs[i], floor), -w_pos);
        else if (labels[i] == 0)
            term = scale(log_clamped(one_minus(probs[i]), floor), T(-1));
        else
            throw DataError("weighted_bce: label must be 0 or 1");
        total = i == 0 ? term : add(total, term);
    }
    return scale(total, T(1) / static_cast<T>(probs.size()));
}

double weighted_bce_value(double prob, int label, double w_pos) {
    const double floor = 1e-12;
    if (label == 1) return -w_pos * std::log(std::max(prob, floor));
    if (label == 0) return -std::log(std::max(1.0 - prob, floor));
    throw DataError("weighted_bce: label must be 0 or 1");
}

std::vector<double> score_clips(const MFTModelT<float>& model,
                                const std::vector<ClipSample>& clips) {
    std::vector<double> scores;
    scores.reserve(clips.size());
    for (const auto& clip : clips)
        scores.push_back(static_cast<double>(
            model.forward(clip, /*training=*/false, nullptr).prob.item()));
    return scores;
}

std::vector<int> clip_labels(const std::vector<ClipSample>& clips) {
    std::vector<int> labels;
    labels.reserve(clips.size());
    for (const auto& clip : clips) labels.push_back(clip.label);
    return labels;
}

namespace {

void clip_gradients(MFTParameters<float>& params, double max_norm) {
    double sq = 0.0;
    for (const auto& [name, t] : params.named)
        for (float g : t.grad()) sq += static_cast<double>(g) * static_cast<double>(g);
    const double norm = std::sqrt(sq);
    if (norm <= max_norm || norm == 0.0) return;
    const float factor = static_cast<float>(max_norm / norm);
    for (auto& [name, t] : params.named) {
        auto node = t.node();
        for (auto& g : node->g) g *= factor;
    }
}

}  // namespace

TrainResult train(const MFTConfig& model_cfg, const std::vector<ClipSample>& train_clips,
                  const std::vector<ClipSample>& val_clips, const TrainConfig& cfg) {
    cfg.validate();
    model_cfg.validate();
    if (train_clips.empty()) throw ContractError("train: empty training split");

    Rng root(cfg.seed);
    MFTModelT<float> model(model_cfg, root.fork(kTagInit).next_u64());
    AdamStateT<float> adam(model.params());
    const double w_pos = positive_class_weight(train_clips, cfg.class_weighting);

    TrainResult result;
    result.w_pos = w_pos;
    double best_acc = -1.0;

    std::vector<size_t> order(train_clips.size());
    std::iota(order.begin(), order.end(), 0);

    for (size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        Rng shuffle = root.fork(kTagShuffle).fork(epoch);
        for (size_t i = order.size() - 1; i > 0; --i)
            std::swap(order[i], order[shuffle.below(i + 1)]);

        double loss_sum = 0.0;
        size_t batches = 0;
        for (size_t start = 0; start < order.size(); start += cfg.batch_size) {
            const size_t end = std::min(order.size(), start + cfg.batch_size);
            Tape tape;
            TapeScope scope(tape);
            std::vector<Tensor> probs;
            std::vector<int> labels;
            probs.reserve(end - start);
            for (size_t bi = start; bi < end; ++bi) {
                Rng drop =
                    root.fork(kTagDropout).fork(epoch).fork(batches).fork(bi - start);
                probs.push_back(
                    model.forward(train_clips[order[bi]], /*training=*/true, &drop).prob);
                labels.push_back(train_clips[order[bi]].label);
            }
            Tensor loss = weighted_bce(probs, labels, static_cast<float>(w_pos));
            const double loss_value = static_cast<double>(loss.item());
            if (!std::isfinite(loss_value))
                throw NumericError("train: non-finite loss at epoch " + std::to_string(epoch) +
                                   " batch " + std::to_string(batches));
            backward(loss);
            if (cfg.grad_clip > 0.0) clip_gradients(model.params(), cfg.grad_clip);
            adam_step(model.params(), adam, cfg);
            model.zero_grad();
            loss_sum += loss_value;
            ++batches;
        }

        EpochRecord rec;
        rec.epoch = epoch;
        rec.train_loss = loss_sum / static_cast<double>(batches);
        if (!val_clips.empty()) {
            rec.val = compute_metrics(score_clips(model, val_clips), clip_labels(val_clips));
            rec.has_val = true;
            if (rec.val.acc > best_acc) {
                best_acc = rec.val.acc;
                result.best_epoch = epoch;
                result.best_params = clone_parameters(model_cfg, model.params());
            }
        }
        result.history.push_back(rec);
    }

    result.final_params = clone_parameters(model_cfg, model.params());
    if (best_acc < 0.0) {
        result.best_params = clone_parameters(model_cfg, model.params());
        result.best_epoch = cfg.epochs - 1;
    }
    return result;
}

std::string history_to_json(const TrainResult& result) {
    nlohmann::json j;
    j["w_pos"] = result.w_pos;
    j["best_epoch"] = result.best_epoch;
    nlohmann::json epochs = nlohmann::json::array();
    for (const auto& rec : result.history) {
        nlohmann::json e;
        e["epoch"] = rec.epoch;
        e["train_loss"] = rec.train_loss;
        if (rec.has_val) {
            e["val"] = nlohmann::json::parse(metrics_to_json(rec.val));
        }
        epochs.push_back(e);
    }
    j["epochs"] = epochs;
    return j.dump(2);
}

// ------------------------------------------------------------- grad check ---

namespace {

ClipSample random_clip(const MFTConfig& cfg, Rng rng, int label) {
    ClipSample clip;
    clip.n_frames = cfg.n_frames;
    clip.flavor = cfg.flavor;
    clip.label = label;
    clip.tte_frames = 30;
    auto fill = [&](std::vector<double>& m, size_t width) {
        m.resize(cfg.n_frames * width);
        for (auto& x : m) x = rng.uniform(-1.5, 1.5);
    };
    fill(clip.p, p_width(cfg.flavor));
    fill(clip.l, l_width());
    fill(clip.v, v_width());
    fill(clip.e, e_width(cfg.flavor));
    return clip;
}

}  // namespace

GradCheckReport grad_check(const MFTConfig& cfg, uint64_t seed, double tolerance, double step,
                           const std::string& fault_param) {
    cfg.validate();
    GradCheckReport report;
    report.tolerance = tolerance;
    report.step = step;

    Rng root(seed);
    MFTModelT<double> model(cfg, root.fork(1).next_u64());

    std::vector<ClipSample> clips;
    clips.push_back(random_clip(cfg, root.fork(2), 1));
    clips.push_back(random_clip(cfg, root.fork(3), 0));
    std::vector<int> labels = clip_labels(clips);
    const double w_pos = 1.5;

    auto loss_value = [&]() {
        std::vector<TensorT<double>> probs;
        probs.reserve(clips.size());
        for (const auto& clip : clips)
            probs.push_back(model.forward(clip, /*training=*/false, nullptr).prob);
        return weighted_bce(probs, labels, w_pos).item();
    };

    // tape gradients
    std::vector<std::vector<double>> ad_grads;
    {
        TapeT<double> tape;
        TapeScopeT<double> scope(tape);
        std::vector<TensorT<double>> probs;
        for (const auto& clip : clips)
            probs.push_back(model.forward(clip, /*training=*/false, nullptr).prob);
        TensorT<double> loss = weighted_bce(probs, labels, w_pos);
        backward(loss);
        bool fault_found = fault_param.empty();
        for (auto& [name, t] : model.params().named) {
            std::vector<double> g = t.has_grad() ? t.grad() : std::vector<double>(t.size(), 0.0);
            if (name == fault_param) {
                for (auto& x : g) x *= 1.01;
                fault_found = true;
            }
            ad_grads.push_back(std::move(g));
        }
        if (!fault_found)
            throw UsageError("grad_check: unknown parameter '" + fault_param + "'");
        model.zero_grad();
    }

    // central finite differences, every element of every parameter
    bool all_pass = true;
    size_t pi = 0;
    for (auto& [name, t] : model.params().named) {
        GradCheckEntry entry;
        entry.name = name;
        double* w = t.data();
        for (size_t i = 0; i < t.size(); ++i) {
            const double saved = w[i];
            w[i] = saved + step;
            const double up = loss_value();
            w[i] = saved - step;
            const double down = loss_value();
            w[i] = saved;
            const double fd = (up - down) / (2.0 * step);
            const double ad = ad_grads[pi][i];
            const double rel =
                std::abs(ad - fd) / std::max({std::abs(ad), std::abs(fd), 1e-3});
            if (rel > entry.max_rel_err) {
                entry.max_rel_err = rel;
                entry.worst_index = i;
                entry.ad = ad;
                entry.fd = fd;
            }
            ++report.params_checked;
        }
        entry.pass = entry.max_rel_err < tolerance;
        all_pass = all_pass && entry.pass;
        report.entries.push_back(std::move(entry));
        ++pi;
    }
    report.pass = all_pass;
    return report;
}

template struct AdamStateT<float>;
template struct AdamStateT<double>;
template void adam_step(MFTParameters<float>&, AdamStateT<float>&, const TrainConfig&);
template void adam_step(MFTParameters<double>&, AdamStateT<double>&, const TrainConfig&);
template TensorT<float> weighted_bce(const std::vector<TensorT<float>>&, const std::vector<int>&,
                                     float);
template TensorT<double> weighted_bce(const std::vector<TensorT<double>>&,
                                      const std::vector<int>&, double);

}  // namespace mft
