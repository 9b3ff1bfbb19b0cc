#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mft/data/schema.hpp"

namespace mft {

enum class ContextId { P, L, V, E };

std::string to_string(ContextId id);

enum class CcrMode { gc_attn, mean_pool, modality_attn };

CcrMode ccr_mode_from_string(const std::string& s);
std::string to_string(CcrMode mode);

struct MFTConfig {
    size_t n_frames = 16;
    size_t model_dim = 128;
    size_t heads = 4;
    size_t ffn_hidden = 256;
    size_t mlp_hidden = 64;
    double dropout_p = 0.2;
    Flavor flavor = Flavor::jaad;

    // ablation switches
    bool use_p = true;
    bool use_e = true;
    CcrMode ccr_mode = CcrMode::gc_attn;

    void validate() const;

    size_t head_dim() const { return model_dim / heads; }
    size_t context_width(ContextId id) const;
    // Enabled contexts in canonical order P, L, V, E.
    std::vector<ContextId> enabled_contexts() const;
    // Token-set size of the cross-context stages (global + enabled contexts).
    size_t token_count() const { return enabled_contexts().size() + 1; }
};

// Small configuration used by the gradient-check harness and hand-audited
// parameter ledgers.
MFTConfig toy_config();

// Maps the ablation variant names to configuration deltas:
// v1: use_e=false, v2: use_p=false, v3: both false,
// v4: ccr_mode=mean_pool, v5: ccr_mode=modality_attn, full: no change.
MFTConfig apply_variant(MFTConfig base, const std::string& variant);
const std::vector<std::string>& all_variants();  // full, v1..v5

}  // namespace mft
