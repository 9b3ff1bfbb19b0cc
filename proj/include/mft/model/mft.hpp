#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "mft/core/tensor.hpp"
#include "mft/data/encode.hpp"
#include "mft/model/config.hpp"

namespace mft {

// One attention matrix captured during a forward pass.
struct AlphaMat {
    size_t rows = 0;
    size_t cols = 0;
    std::vector<double> w;  // row-major

    double at(size_t r, size_t c) const { return w[r * cols + c]; }
};

// Per-mechanism, per-head attention matrices of one forward pass.
// mi/gi are indexed [enabled context][head]; mc/gc are [head]. For
// mean_pool and modality_attn CCR modes gc holds a single pseudo-head.
struct AttentionTrace {
    std::vector<std::vector<AlphaMat>> mi;  // (N+1) x (N+1)
    std::vector<AlphaMat> mc;               // k x k, k = token count
    std::vector<std::vector<AlphaMat>> gi;  // 1 x (N+1)
    std::vector<AlphaMat> gc;               // 1 x k
};

template <typename T>
struct AttnHeadParams {
    TensorT<T> wq, wk, wv;  // model_dim x head_dim
};

template <typename T>
struct AttnBlockParams {
    std::vector<AttnHeadParams<T>> heads;
    TensorT<T> wo;  // model_dim x model_dim
    TensorT<T> bo;  // 1 x model_dim
};

template <typename T>
struct NormParams {
    TensorT<T> gain, bias;  // 1 x model_dim
};

template <typename T>
struct ContextParams {
    ContextId id{};
    TensorT<T> embed_w;  // width x model_dim
    TensorT<T> embed_b;  // 1 x model_dim
    TensorT<T> cls;      // 1 x model_dim
    AttnBlockParams<T> mi;
    NormParams<T> icf_norm;
    TensorT<T> ffn_w1, ffn_b1, ffn_w2, ffn_b2;
    NormParams<T> ffn_norm;
    AttnBlockParams<T> gi;
};

template <typename T>
struct MFTParameters {
    std::vector<ContextParams<T>> contexts;  // enabled contexts, canonical order
    TensorT<T> global_cls;
    AttnBlockParams<T> mc;
    NormParams<T> ccf_norm;
    AttnBlockParams<T> gc;   // ccr_mode == gc_attn
    TensorT<T> modality_u;   // ccr_mode == modality_attn
    TensorT<T> mlp_w1, mlp_b1, mlp_w2, mlp_b2;

    // Canonical (name, tensor) list in checkpoint order.
    std::vector<std::pair<std::string, TensorT<T>>> named;
};

enum class ParamKind { projection, bias, gain, token };

// Walks every learnable tensor shape of a config in canonical order.
void for_each_param_shape(
    const MFTConfig& cfg,
    const std::function<void(const std::string& name, size_t rows, size_t cols, ParamKind kind)>&
        fn);

// Exact learnable scalar count, a pure function of the config.
size_t param_count(const MFTConfig& cfg);

template <typename T>
class MFTModelT {
public:
    // Fresh parameters: projections ~ U(-1/sqrt(fan_in), +1/sqrt(fan_in)),
    // tokens ~ N(0, 0.02), norm gains 1, biases 0.
    MFTModelT(const MFTConfig& cfg, uint64_t init_seed);
    // Adopt existing parameters (e.g. loaded from a checkpoint).
    MFTModelT(const MFTConfig& cfg, MFTParameters<T> params);

    const MFTConfig& config() const { return cfg_; }
    MFTParameters<T>& params() { return params_; }
    const MFTParameters<T>& params() const { return params_; }

    struct Forward {
        TensorT<T> prob;  // 1x1, strictly in (0,1)
        AttentionTrace trace;
    };

    // Full pipeline: embed -> PE -> ICF -> CCF -> ICR -> CCR -> MLP head.
    // dropout_rng is only consulted when training with dropout_p > 0.
    Forward forward(const ClipSample& clip, bool training, Rng* dropout_rng,
                    bool want_trace = false) const;

    size_t param_count() const;
    void zero_grad();

    // Test hook: assembly order of the context tokens in the CCF/CCR token
    // set (indices into the enabled-context list; global stays at slot 0).
    void set_token_order(std::vector<size_t> order);

private:
    MFTConfig cfg_;
    MFTParameters<T> params_;
    TensorT<T> pe_;  // (n_frames+1) x model_dim, constant
    std::vector<size_t> token_order_;
};

// Sinusoidal positional encoding value, Eq.-style: even columns sin, odd
// columns cos of pos / 10000^(2k/d) with k the column pair index.
double positional_encoding(size_t pos, size_t col, size_t model_dim);

// Deep copy: fresh tensor storage with identical values, same names/order.
template <typename T>
MFTParameters<T> clone_parameters(const MFTConfig& cfg, const MFTParameters<T>& src);

using MFTModel = MFTModelT<float>;

}  // namespace mft
