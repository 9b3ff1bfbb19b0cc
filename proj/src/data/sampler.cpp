#include "mft/data/sampler.hpp"

#include <cmath>

namespace mft {

int64_t sampler_stride(size_t n_frames, double overlap) {
    auto stride = static_cast<int64_t>(
        std::llround(static_cast<double>(n_frames) * (1.0 - overlap)));
    return stride < 1 ? 1 : stride;
}

std::vector<RawClip> sample_clips(const PedestrianTrack& track, const SamplerConfig& cfg) {
    if (cfg.n_frames < 1) throw ConfigError("sampler: n_frames must be >= 1");
    if (cfg.overlap < 0.0 || cfg.overlap >= 1.0)
        throw ConfigError("sampler: overlap must be in [0,1)");
    if (cfg.tte_min < 0 || cfg.tte_max < cfg.tte_min)
        throw ConfigError("sampler: need 0 <= tte_min <= tte_max");

    std::vector<RawClip> clips;
    const auto& frames = track.frames;
    const size_t n = cfg.n_frames;
    if (frames.size() < n) return clips;

    const int64_t stride = sampler_stride(cfg.n_frames, cfg.overlap);
    bool have_anchor = false;
    int64_t anchor = 0;
    for (size_t end = n - 1; end < frames.size(); ++end) {
        const size_t start = end - (n - 1);
        const int64_t t = frames[end].frame_index;
        // gap-free window: n consecutive frame indices
        if (frames[end].frame_index - frames[start].frame_index != static_cast<int64_t>(n - 1))
            continue;
        const int64_t tte = track.event_frame - t;
        if (tte < cfg.tte_min || tte > cfg.tte_max) continue;
        if (!have_anchor) {
            anchor = t;
            have_anchor = true;
        }
        if ((t - anchor) % stride != 0) continue;
        RawClip clip;
        clip.frames.assign(frames.begin() + static_cast<ptrdiff_t>(start),
                           frames.begin() + static_cast<ptrdiff_t>(end + 1));
        clip.label = track.label;
        clip.tte_frames = tte;
        clip.pedestrian_id = track.pedestrian_id;
        clip.frame_w = track.frame_w;
        clip.frame_h = track.frame_h;
        clips.push_back(std::move(clip));
    }
    return clips;
}

std::vector<RawClip> sample_clips(const std::vector<PedestrianTrack>& tracks,
                                  const SamplerConfig& cfg) {
    std::vector<RawClip> clips;
    for (const auto& track : tracks) {
        auto part = sample_clips(track, cfg);
        clips.insert(clips.end(), std::make_move_iterator(part.begin()),
                     std::make_move_iterator(part.end()));
    }
    return clips;
}

}  // namespace mft
