#include "mft/model/mft.hpp"

#include <cmath>
#include <numeric>

namespace mft {

// ----------------------------------------------------------------- config ---

std::string to_string(ContextId id) {
    switch (id) {
        case ContextId::P: return "P";
        case ContextId::L: return "L";
        case ContextId::V: return "V";
        case ContextId::E: return "E";
    }
    return "?";
}

CcrMode ccr_mode_from_string(const std::string& s) {
    if (s == "gc_attn") return CcrMode::gc_attn;
    if (s == "mean_pool") return CcrMode::mean_pool;
    if (s == "modality_attn") return CcrMode::modality_attn;
    throw ConfigError("unknown ccr_mode '" + s + "'");
}

std::string to_string(CcrMode mode) {
    switch (mode) {
        case CcrMode::gc_attn: return "gc_attn";
        case CcrMode::mean_pool: return "mean_pool";
        case CcrMode::modality_attn: return "modality_attn";
    }
    return "?";
}

void MFTConfig::validate() const {
    if (n_frames < 2) throw ConfigError("config: n_frames must be >= 2");
    if (model_dim == 0 || heads == 0 || model_dim % heads != 0)
        throw ConfigError("config: model_dim must be divisible by heads");
    if (ffn_hidden == 0 || mlp_hidden == 0)
        throw ConfigError("config: ffn_hidden and mlp_hidden must be positive");
    if (dropout_p < 0.0 || dropout_p >= 1.0)
        throw ConfigError("config: dropout must be in [0,1)");
    if (enabled_contexts().size() < 2)
        throw ConfigError("config: at least two contexts must be enabled");
}

size_t MFTConfig::context_width(ContextId id) const {
    switch (id) {
        case ContextId::P: return p_width(flavor);
        case ContextId::L: return l_width();
        case ContextId::V: return v_width();
        case ContextId::E: return e_width(flavor);
    }
    return 0;
}

std::vector<ContextId> MFTConfig::enabled_contexts() const {
    std::vector<ContextId> out;
    if (use_p) out.push_back(ContextId::P);
    out.push_back(ContextId::L);
    out.push_back(ContextId::V);
    if (use_e) out.push_back(ContextId::E);
    return out;
}

MFTConfig toy_config() {
    MFTConfig cfg;
    cfg.n_frames = 4;
    cfg.model_dim = 8;
    cfg.heads = 2;
    cfg.ffn_hidden = 16;
    cfg.mlp_hidden = 4;
    cfg.dropout_p = 0.0;
    return cfg;
}

MFTConfig apply_variant(MFTConfig base, const std::string& variant) {
    if (variant == "full") return base;
    if (variant == "v1") {
        base.use_e = false;
    } else if (variant == "v2") {
        base.use_p = false;
    } else if (variant == "v3") {
        base.use_p = false;
        base.use_e = false;
    } else if (variant == "v4") {
        base.ccr_mode = CcrMode::mean_pool;
    } else if (variant == "v5") {
        base.ccr_mode = CcrMode::modality_attn;
    } else {
        throw UsageError("unknown ablation variant '" + variant + "' (full, v1..v5)");
    }
    return base;
}

const std::vector<std::string>& all_variants() {
    static const std::vector<std::string> v = {"full", "v1", "v2", "v3", "v4", "v5"};
    return v;
}

// ------------------------------------------------------------ param shapes ---

void for_each_param_shape(
    const MFTConfig& cfg,
    const std::function<void(const std::string&, size_t, size_t, ParamKind)>& fn) {
    const size_t d = cfg.model_dim;
    const size_t dh = cfg.head_dim();

    auto attn_block = [&](const std::string& prefix) {
        for (size_t h = 0; h < cfg.heads; ++h) {
            const std::string hp = prefix + ".h" + std::to_string(h);
            fn(hp + ".wq", d, dh, ParamKind::projection);
            fn(hp + ".wk", d, dh, ParamKind::projection);
            fn(hp + ".wv", d, dh, ParamKind::projection);
        }
        fn(prefix + ".out.w", d, d, ParamKind::projection);
        fn(prefix + ".out.b", 1, d, ParamKind::bias);
    };
    auto norm = [&](const std::string& prefix) {
        fn(prefix + ".gain", 1, d, ParamKind::gain);
        fn(prefix + ".bias", 1, d, ParamKind::bias);
    };

    for (ContextId id : cfg.enabled_contexts()) {
        const std::string p = "ctx." + to_string(id);
        fn(p + ".embed.w", cfg.context_width(id), d, ParamKind::projection);
        fn(p + ".embed.b", 1, d, ParamKind::bias);
        fn(p + ".cls", 1, d, ParamKind::token);
        attn_block(p + ".mi");
        norm(p + ".icf_norm");
        fn(p + ".ffn.w1", d, cfg.ffn_hidden, ParamKind::projection);
        fn(p + ".ffn.b1", 1, cfg.ffn_hidden, ParamKind::bias);
        fn(p + ".ffn.w2", cfg.ffn_hidden, d, ParamKind::projection);
        fn(p + ".ffn.b2", 1, d, ParamKind::bias);
        norm(p + ".ffn_norm");
        attn_block(p + ".gi");
    }
    fn("global.cls", 1, d, ParamKind::token);
    attn_block("mc");
    norm("ccf_norm");
    if (cfg.ccr_mode == CcrMode::gc_attn) {
        attn_block("gc");
    } else if (cfg.ccr_mode == CcrMode::modality_attn) {
        fn("modality.u", 1, d, ParamKind::projection);
    }
    fn("mlp.w1", d, cfg.mlp_hidden, ParamKind::projection);
    fn("mlp.b1", 1, cfg.mlp_hidden, ParamKind::bias);
    fn("mlp.w2", cfg.mlp_hidden, 1, ParamKind::projection);
    fn("mlp.b2", 1, 1, ParamKind::bias);
}

size_t param_count(const MFTConfig& cfg) {
    size_t count = 0;
    for_each_param_shape(cfg, [&](const std::string&, size_t r, size_t c, ParamKind) {
        count += r * c;
    });
    return count;
}

double positional_encoding(size_t pos, size_t col, size_t model_dim) {
    const size_t pair = col / 2;
    const double exponent =
        2.0 * static_cast<double>(pair) / static_cast<double>(model_dim);
    const double angle = static_cast<double>(pos) / std::pow(10000.0, exponent);
    return col % 2 == 0 ? std::sin(angle) : std::cos(angle);
}

// ---------------------------------------------------------------- builder ---

namespace {

template <typename T>
TensorT<T> init_param(size_t rows, size_t cols, ParamKind kind, Rng& rng) {
    TensorT<T> t = TensorT<T>::zeros(rows, cols, /*requires_grad=*/true);
    switch (kind) {
        case ParamKind::projection: {
            const double bound = 1.0 / std::sqrt(static_cast<double>(rows));
            for (auto& x : t.values()) x = static_cast<T>(rng.uniform(-bound, bound));
            break;
        }
        case ParamKind::token:
            for (auto& x : t.values()) x = static_cast<T>(rng.normal() * 0.02);
            break;
        case ParamKind::gain:
            for (auto& x : t.values()) x = T(1);
            break;
        case ParamKind::bias:
            break;  // zeros
    }
    return t;
}

// Builds the parameter structure and the canonical named list in one walk.
// Must visit tensors in exactly the order of for_each_param_shape (guarded
// by a unit test).
template <typename T>
MFTParameters<T> build_params(const MFTConfig& cfg, Rng rng) {
    MFTParameters<T> ps;
    auto make = [&](const std::string& name, size_t r, size_t c, ParamKind kind) {
        TensorT<T> t = init_param<T>(r, c, kind, rng);
        ps.named.emplace_back(name, t);
        return t;
    };
    const size_t d = cfg.model_dim;
    const size_t dh = cfg.head_dim();
    auto make_attn = [&](const std::string& prefix) {
        AttnBlockParams<T> blk;
        for (size_t h = 0; h < cfg.heads; ++h) {
            const std::string hp = prefix + ".h" + std::to_string(h);
            AttnHeadParams<T> head;
            head.wq = make(hp + ".wq", d, dh, ParamKind::projection);
            head.wk = make(hp + ".wk", d, dh, ParamKind::projection);
            head.wv = make(hp + ".wv", d, dh, ParamKind::projection);
            blk.heads.push_back(std::move(head));
        }
        blk.wo = make(prefix + ".out.w", d, d, ParamKind::projection);
        blk.bo = make(prefix + ".out.b", 1, d, ParamKind::bias);
        return blk;
    };
    auto make_norm = [&](const std::string& prefix) {
        NormParams<T> n;
        n.gain = make(prefix + ".gain", 1, d, ParamKind::gain);
        n.bias = make(prefix + ".bias", 1, d, ParamKind::bias);
        return n;
    };

    for (ContextId id : cfg.enabled_contexts()) {
        const std::string p = "ctx." + to_string(id);
        ContextParams<T> ctx;
        ctx.id = id;
        ctx.embed_w = make(p + ".embed.w", cfg.context_width(id), d, ParamKind::projection);
        ctx.embed_b = make(p + ".embed.b", 1, d, ParamKind::bias);
        ctx.cls = make(p + ".cls", 1, d, ParamKind::token);
        ctx.mi = make_attn(p + ".mi");
        ctx.icf_norm = make_norm(p + ".icf_norm");
        ctx.ffn_w1 = make(p + ".ffn.w1", d, cfg.ffn_hidden, ParamKind::projection);
        ctx.ffn_b1 = make(p + ".ffn.b1", 1, cfg.ffn_hidden, ParamKind::bias);
        ctx.ffn_w2 = make(p + ".ffn.w2", cfg.ffn_hidden, d, ParamKind::projection);
        ctx.ffn_b2 = make(p + ".ffn.b2", 1, d, ParamKind::bias);
        ctx.ffn_norm = make_norm(p + ".ffn_norm");
        ctx.gi = make_attn(p + ".gi");
        ps.contexts.push_back(std::move(ctx));
    }
    ps.global_cls = make("global.cls", 1, d, ParamKind::token);
    ps.mc = make_attn("mc");
    ps.ccf_norm = make_norm("ccf_norm");
    if (cfg.ccr_mode == CcrMode::gc_attn) {
        ps.gc = make_attn("gc");
    } else if (cfg.ccr_mode == CcrMode::modality_attn) {
        ps.modality_u = make("modality.u", 1, d, ParamKind::projection);
    }
    ps.mlp_w1 = make("mlp.w1", d, cfg.mlp_hidden, ParamKind::projection);
    ps.mlp_b1 = make("mlp.b1", 1, cfg.mlp_hidden, ParamKind::bias);
    ps.mlp_w2 = make("mlp.w2", cfg.mlp_hidden, 1, ParamKind::projection);
    ps.mlp_b2 = make("mlp.b2", 1, 1, ParamKind::bias);
    return ps;
}

template <typename T>
AlphaMat to_alpha(const TensorT<T>& t) {
    AlphaMat a;
    a.rows = t.rows();
    a.cols = t.cols();
    a.w.resize(t.size());
    for (size_t i = 0; i < t.size(); ++i) a.w[i] = static_cast<double>(t.data()[i]);
    return a;
}

// Multi-head scaled dot-product attention; query and key/value sources may
// differ (guided attention passes a single-row query).
template <typename T>
TensorT<T> run_mha(const AttnBlockParams<T>& blk, const TensorT<T>& q_src,
                   const TensorT<T>& kv_src, T scale_factor, std::vector<AlphaMat>* trace) {
    std::vector<TensorT<T>> head_outs;
    head_outs.reserve(blk.heads.size());
    for (const auto& head : blk.heads) {
        TensorT<T> q = matmul(q_src, head.wq);
        TensorT<T> k = matmul(kv_src, head.wk);
        TensorT<T> v = matmul(kv_src, head.wv);
        TensorT<T> alpha = softmax(scale(matmul_nt(q, k), scale_factor), 1);
        if (trace) trace->push_back(to_alpha(alpha));
        head_outs.push_back(matmul(alpha, v));
    }
    TensorT<T> cat = head_outs.size() == 1 ? head_outs[0] : concat(head_outs, 1);
    return add_bias(matmul(cat, blk.wo), blk.bo);
}

template <typename T>
TensorT<T> clip_matrix(const std::vector<double>& raw, size_t n, size_t w) {
    std::vector<T> vals(raw.size());
    for (size_t i = 0; i < raw.size(); ++i) vals[i] = static_cast<T>(raw[i]);
    return TensorT<T>::from(n, w, std::move(vals));
}

}  // namespace

// ------------------------------------------------------------------ model ---

template <typename T>
MFTModelT<T>::MFTModelT(const MFTConfig& cfg, uint64_t init_seed) : cfg_(cfg) {
    cfg_.validate();
    params_ = build_params<T>(cfg_, Rng(init_seed));
    const size_t rows = cfg_.n_frames + 1;
    pe_ = TensorT<T>::zeros(rows, cfg_.model_dim);
    for (size_t r = 0; r < rows; ++r)
        for (size_t c = 0; c < cfg_.model_dim; ++c)
            pe_.at(r, c) = static_cast<T>(positional_encoding(r, c, cfg_.model_dim));
    token_order_.resize(cfg_.enabled_contexts().size());
    std::iota(token_order_.begin(), token_order_.end(), 0);
}

template <typename T>
MFTModelT<T>::MFTModelT(const MFTConfig& cfg, MFTParameters<T> params)
    : MFTModelT(cfg, uint64_t{0}) {
    if (params.named.size() != params_.named.size())
        throw ConfigError("parameter set does not match config (tensor count " +
                          std::to_string(params.named.size()) + " vs " +
                          std::to_string(params_.named.size()) + ")");
    for (size_t i = 0; i < params.named.size(); ++i) {
        const auto& [name, t] = params.named[i];
        const auto& [expect_name, expect_t] = params_.named[i];
        if (name != expect_name || t.rows() != expect_t.rows() || t.cols() != expect_t.cols())
            throw ConfigError("parameter '" + name + "' does not match config (expected '" +
                              expect_name + "' " + expect_t.shape_str() + ")");
    }
    params_ = std::move(params);
}

template <typename T>
void MFTModelT<T>::set_token_order(std::vector<size_t> order) {
    if (order.size() != token_order_.size())
        throw ConfigError("token order size mismatch");
    token_order_ = std::move(order);
}

template <typename T>
size_t MFTModelT<T>::param_count() const {
    size_t count = 0;
    for (const auto& [name, t] : params_.named) count += t.size();
    return count;
}

template <typename T>
void MFTModelT<T>::zero_grad() {
    for (auto& [name, t] : params_.named) t.zero_grad();
}

template <typename T>
typename MFTModelT<T>::Forward MFTModelT<T>::forward(const ClipSample& clip, bool training,
                                                     Rng* dropout_rng, bool want_trace) const {
    if (clip.flavor != cfg_.flavor)
        throw ConfigError("forward: clip flavor " + to_string(clip.flavor) +
                          " does not match model flavor " + to_string(cfg_.flavor));
    if (clip.n_frames != cfg_.n_frames)
        throw ConfigError("forward: clip has " + std::to_string(clip.n_frames) +
                          " frames, model expects " + std::to_string(cfg_.n_frames));

    const auto ctxs = cfg_.enabled_contexts();
    const size_t n = cfg_.n_frames;
    const T scale_factor = T(1) / std::sqrt(static_cast<T>(cfg_.head_dim()));

    Forward out;
    if (want_trace) {
        out.trace.mi.resize(ctxs.size());
        out.trace.gi.resize(ctxs.size());
    }

    // ICF: embed, prepend context token, add PE, mutual intra-context attention
    std::vector<TensorT<T>> icf_seq(ctxs.size());
    std::vector<TensorT<T>> tokens(ctxs.size());
    for (size_t i = 0; i < ctxs.size(); ++i) {
        const ContextParams<T>& cp = params_.contexts[i];
        const std::vector<double>* raw = nullptr;
        switch (ctxs[i]) {
            case ContextId::P: raw = &clip.p; break;
            case ContextId::L: raw = &clip.l; break;
            case ContextId::V: raw = &clip.v; break;
            case ContextId::E: raw = &clip.e; break;
        }
        const size_t width = cfg_.context_width(ctxs[i]);
        if (raw->size() != n * width)
            throw ConfigError("forward: context " + to_string(ctxs[i]) + " has " +
                              std::to_string(raw->size()) + " values, expected " +
                              std::to_string(n * width));
        TensorT<T> x = clip_matrix<T>(*raw, n, width);
        TensorT<T> embedded = add_bias(matmul(x, cp.embed_w), cp.embed_b);
        TensorT<T> fp = add(concat<T>({cp.cls, embedded}, 0), pe_);
        TensorT<T> attn =
            run_mha(cp.mi, fp, fp, scale_factor, want_trace ? &out.trace.mi[i] : nullptr);
        TensorT<T> ft = layer_norm(add(attn, fp), cp.icf_norm.gain, cp.icf_norm.bias);
        icf_seq[i] = ft;
        tokens[i] = slice(ft, 0, 0, 1);
    }

    // CCF: token set [global, contexts...] through mutual cross-context attention
    std::vector<size_t> slot_of_ctx(ctxs.size());
    std::vector<TensorT<T>> token_list;
    token_list.reserve(ctxs.size() + 1);
    token_list.push_back(params_.global_cls);
    for (size_t slot = 0; slot < token_order_.size(); ++slot) {
        token_list.push_back(tokens[token_order_[slot]]);
        slot_of_ctx[token_order_[slot]] = slot + 1;
    }
    TensorT<T> fc = concat(token_list, 0);
    TensorT<T> mc_out =
        run_mha(params_.mc, fc, fc, scale_factor, want_trace ? &out.trace.mc : nullptr);
    TensorT<T> fc2 = layer_norm(add(mc_out, fc), params_.ccf_norm.gain, params_.ccf_norm.bias);
    TensorT<T> g_token = slice(fc2, 0, 0, 1);

    // ICR: CCF-updated token replaces the cls row, row-wise FFN with residual
    // and norm, then guided intra-context attention from the token row
    std::vector<TensorT<T>> refined(ctxs.size());
    for (size_t i = 0; i < ctxs.size(); ++i) {
        const ContextParams<T>& cp = params_.contexts[i];
        TensorT<T> updated = slice(fc2, 0, slot_of_ctx[i], slot_of_ctx[i] + 1);
        TensorT<T> b = concat<T>({updated, slice(icf_seq[i], 0, 1, n + 1)}, 0);
        TensorT<T> hidden = relu(add_bias(matmul(b, cp.ffn_w1), cp.ffn_b1));
        TensorT<T> ffn = add_bias(matmul(hidden, cp.ffn_w2), cp.ffn_b2);
        TensorT<T> fbar = layer_norm(add(b, ffn), cp.ffn_norm.gain, cp.ffn_norm.bias);
        TensorT<T> query = slice(fbar, 0, 0, 1);
        refined[i] =
            run_mha(cp.gi, query, fbar, scale_factor, want_trace ? &out.trace.gi[i] : nullptr);
    }

    // CCR: guided cross-context refinement of the global token
    std::vector<TensorT<T>> final_list;
    final_list.reserve(ctxs.size() + 1);
    final_list.push_back(g_token);
    for (size_t slot = 0; slot < token_order_.size(); ++slot)
        final_list.push_back(refined[token_order_[slot]]);
    TensorT<T> fhat = concat(final_list, 0);

    TensorT<T> g_final;
    const size_t k = fhat.rows();
    switch (cfg_.ccr_mode) {
        case CcrMode::gc_attn: {
            g_final = run_mha(params_.gc, g_token, fhat, scale_factor,
                              want_trace ? &out.trace.gc : nullptr);
            break;
        }
        case CcrMode::mean_pool: {
            TensorT<T> ones = TensorT<T>::full(1, k, T(1) / static_cast<T>(k));
            g_final = matmul(ones, fhat);
            if (want_trace) out.trace.gc.push_back(to_alpha(ones));
            break;
        }
        case CcrMode::modality_attn: {
            TensorT<T> scores = matmul_nt(params_.modality_u, fhat);
            TensorT<T> alpha = softmax(scores, 1);
            if (want_trace) out.trace.gc.push_back(to_alpha(alpha));
            g_final = matmul(alpha, fhat);
            break;
        }
    }

    // MLP head
    TensorT<T> hidden = relu(add_bias(matmul(g_final, params_.mlp_w1), params_.mlp_b1));
    hidden = dropout(hidden, cfg_.dropout_p, training, dropout_rng);
    TensorT<T> logit = add_bias(matmul(hidden, params_.mlp_w2), params_.mlp_b2);
    out.prob = sigmoid(logit);
    return out;
}

template <typename T>
MFTParameters<T> clone_parameters(const MFTConfig& cfg, const MFTParameters<T>& src) {
    MFTParameters<T> dst = build_params<T>(cfg, Rng(0));
    if (dst.named.size() != src.named.size())
        throw ConfigError("clone_parameters: parameter set does not match config");
    for (size_t i = 0; i < src.named.size(); ++i) {
        if (dst.named[i].first != src.named[i].first)
            throw ConfigError("clone_parameters: parameter order mismatch at '" +
                              src.named[i].first + "'");
        dst.named[i].second.values() = src.named[i].second.values();
    }
    return dst;
}

template class MFTModelT<float>;
template class MFTModelT<double>;
template MFTParameters<float> clone_parameters(const MFTConfig&, const MFTParameters<float>&);
template MFTParameters<double> clone_parameters(const MFTConfig&, const MFTParameters<double>&);

}  // namespace mft
