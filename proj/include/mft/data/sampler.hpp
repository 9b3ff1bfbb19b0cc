#pragma once

#include <cstdint>
#include <vector>

#include "mft/data/annotations.hpp"

namespace mft {

// One observation window: n_frames consecutive annotated frames whose last
// frame t satisfies tte_min <= event_frame - t <= tte_max.
struct RawClip {
    std::vector<FrameAnnotation> frames;
    int label = 0;
    int64_t tte_frames = 0;
    std::string pedestrian_id;
    int frame_w = 0;
    int frame_h = 0;
};

struct SamplerConfig {
    size_t n_frames = 16;
    double overlap = 0.8;
    int64_t tte_min = 30;
    int64_t tte_max = 60;
};

// max(1, round(n_frames * (1 - overlap))); 3 for the defaults.
int64_t sampler_stride(size_t n_frames, double overlap);

// Enumerates windows on the stride lattice anchored at the earliest
// admissible end frame. Windows must be gap-free (consecutive frame
// indices); lattice points falling on gaps or outside the TTE range are
// skipped. A track too short to host any window yields an empty list.
std::vector<RawClip> sample_clips(const PedestrianTrack& track, const SamplerConfig& cfg = {});

std::vector<RawClip> sample_clips(const std::vector<PedestrianTrack>& tracks,
                                  const SamplerConfig& cfg = {});

}  // namespace mft
