#include "mft/data/encode.hpp"

#include <cmath>

namespace mft {

EncodingSchema fit_normalizer(const std::vector<RawClip>& training_clips, Flavor flavor) {
    if (training_clips.empty())
        throw ContractError("fit_normalizer: empty training set");

    EncodingSchema schema;
    schema.flavor = flavor;

    std::array<double, kContinuousFeatures> sum{};
    std::array<double, kContinuousFeatures> sumsq{};
    size_t count = 0;
    for (const auto& clip : training_clips) {
        for (const auto& fa : clip.frames) {
            for (size_t i = 0; i < 4; ++i) {
                sum[i] += fa.bbox[i];
                sumsq[i] += fa.bbox[i] * fa.bbox[i];
            }
            sum[4] += fa.vehicle_speed;
            sumsq[4] += fa.vehicle_speed * fa.vehicle_speed;
            ++count;
        }
    }
    for (size_t i = 0; i < kContinuousFeatures; ++i) {
        double mean = sum[i] / static_cast<double>(count);
        double var = sumsq[i] / static_cast<double>(count) - mean * mean;
        if (var < 0.0) var = 0.0;
        double stddev = std::sqrt(var);
        schema.continuous[i].mean = mean;
        if (stddev > 0.0) {
            schema.continuous[i].stddev = stddev;
            schema.continuous[i].constant = false;
        } else {
            schema.continuous[i].stddev = 1.0;
            schema.continuous[i].constant = true;
        }
    }
    schema.fitted = true;
    return schema;
}

ClipSample encode_clip(const RawClip& clip, const EncodingSchema& schema) {
    if (!schema.fitted) throw ContractError("encode_clip: schema not fitted");
    const Flavor flavor = schema.flavor;
    const size_t n = clip.frames.size();
    const size_t pw = p_width(flavor);
    const size_t ew = e_width(flavor);

    ClipSample out;
    out.n_frames = n;
    out.flavor = flavor;
    out.label = clip.label;
    out.tte_frames = clip.tte_frames;
    out.p.resize(n * pw);
    out.l.resize(n * l_width());
    out.v.resize(n * v_width());
    out.e.resize(n * ew);

    auto check_code = [](int code, const CodeTable& table) {
        if (code < 0 || static_cast<size_t>(code) >= table.values.size())
            throw DataError("encode_clip: code " + std::to_string(code) +
                            " outside table for " + table.attribute);
        return static_cast<double>(code);
    };

    for (size_t i = 0; i < n; ++i) {
        const FrameAnnotation& fa = clip.frames[i];
        double* prow = out.p.data() + i * pw;
        size_t c = 0;
        prow[c++] = check_code(fa.motion_state, code_table(flavor, "motion_state"));
        prow[c++] = check_code(fa.gaze_state, code_table(flavor, "gaze_state"));
        if (flavor == Flavor::jaad)
            prow[c++] = check_code(fa.head_nod, code_table(flavor, "head_nod"));
        prow[c++] = check_code(fa.hand_gesture, code_table(flavor, "hand_gesture"));
        prow[c++] = check_code(fa.motion_direction, code_table(flavor, "motion_direction"));

        double* lrow = out.l.data() + i * l_width();
        for (size_t j = 0; j < 4; ++j) lrow[j] = schema.continuous[j].normalize(fa.bbox[j]);

        out.v[i] = schema.continuous[4].normalize(fa.vehicle_speed);

        double* erow = out.e.data() + i * ew;
        c = 0;
        erow[c++] = static_cast<double>(fa.lane_count);
        erow[c++] = fa.intersection ? 1.0 : 0.0;
        erow[c++] = fa.crosswalk ? 1.0 : 0.0;
        erow[c++] = check_code(fa.traffic_light, code_table(flavor, "traffic_light"));
        erow[c++] = check_code(fa.traffic_direction, code_table(flavor, "traffic_direction"));
        if (flavor == Flavor::jaad)
            erow[c++] = check_code(fa.road_type, code_table(flavor, "road_type"));
        erow[c++] = fa.stop_sign ? 1.0 : 0.0;
        erow[c++] = check_code(fa.signage_type, code_table(flavor, "signage_type"));
    }
    return out;
}

std::vector<ClipSample> encode_clips(const std::vector<RawClip>& clips,
                                     const EncodingSchema& schema) {
    std::vector<ClipSample> out;
    out.reserve(clips.size());
    for (const auto& clip : clips) out.push_back(encode_clip(clip, schema));
    return out;
}

}  // namespace mft
