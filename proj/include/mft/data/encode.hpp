#pragma once

#include <vector>

#include "mft/data/sampler.hpp"
#include "mft/data/schema.hpp"

namespace mft {

// One encoded observation window: the four context matrices the model
// consumes. Matrices are row-major n_frames x width, widths per flavor
// (P: 5/4, L: 4, V: 1, E: 8/7). Categorical codes are cast to reals,
// continuous features are z-scored by the schema's training statistics.
struct ClipSample {
    size_t n_frames = 0;
    Flavor flavor = Flavor::jaad;
    std::vector<double> p, l, v, e;
    int label = 0;
    int64_t tte_frames = 0;
};

// Fits per-feature mean/std (population) for the continuous features
// (bbox corners, speed) over all frames of all training clips. Throws
// ContractError on an empty training set.
EncodingSchema fit_normalizer(const std::vector<RawClip>& training_clips, Flavor flavor);

ClipSample encode_clip(const RawClip& clip, const EncodingSchema& schema);
std::vector<ClipSample> encode_clips(const std::vector<RawClip>& clips,
                                     const EncodingSchema& schema);

}  // namespace mft
