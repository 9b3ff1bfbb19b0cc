#pragma once

#include <string>
#include <vector>

#include "mft/model/mft.hpp"

namespace mft {

// Per-head MC-Attn / GC-Attn matrices averaged elementwise over a clip set,
// plus the across-head mean (the paper is ambiguous on which average is
// reported, so both are emitted). Rows remain row-stochastic since they are
// means of row-stochastic rows.
struct AttentionSummary {
    std::vector<std::string> token_labels;  // [global, P, L, V, E] (enabled subset)
    std::vector<AlphaMat> mc;               // per head, k x k
    std::vector<AlphaMat> gc;               // per head, 1 x k
    AlphaMat mc_head_mean;
    AlphaMat gc_head_mean;
    size_t n_clips = 0;
};

// Forward passes every clip in eval mode and averages the traces.
// Throws ContractError on an empty clip set.
AttentionSummary attention_summary(const MFTModelT<float>& model,
                                   const std::vector<ClipSample>& clips);

std::string attention_summary_to_json(const AttentionSummary& summary);

}  // namespace mft
