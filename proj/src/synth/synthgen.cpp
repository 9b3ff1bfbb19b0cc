#include "mft/synth/synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numeric>

namespace mft {

namespace {

// fork tags
constexpr uint64_t kTagTrack = 0x7261636bu;
constexpr uint64_t kTagSplit = 0x73706c74u;
constexpr uint64_t kTagFlip = 0x666c6970u;

double mix_into(uint64_t& h, double v) {
    uint64_t bits;
    static_assert(sizeof(bits) == sizeof(v));
    std::memcpy(&bits, &v, sizeof(bits));
    h ^= bits + 0x9E3779B97F4A7C15ull + (h << 6) + (h >> 2);
    return v;
}

}  // namespace

ScenarioRule ScenarioRule::default_rule(Flavor flavor, double noise) {
    ScenarioRule rule;
    // weights: crosswalk, looking fraction, walking fraction, decel rate, lateral rate
    rule.weights = {2.4, 3.2, 2.6, 24.0, 1.1};
    rule.bias = -7.65;  // 66.7th percentile of the score, for a 1:2 class balance
    rule.noise = noise;
    rule.flavor = flavor;
    return rule;
}

ScenarioRule ScenarioRule::e_only_rule(Flavor flavor, double noise) {
    ScenarioRule rule;
    rule.weights = {4.0, 0.0, 0.0, 0.0, 0.0};
    rule.bias = -2.0;
    rule.noise = noise;
    rule.flavor = flavor;
    return rule;
}

ScenarioRule ScenarioRule::named(const std::string& name, Flavor flavor, double noise) {
    if (name == "default") return default_rule(flavor, noise);
    if (name == "e_only") return e_only_rule(flavor, noise);
    throw ConfigError("unknown scenario rule '" + name + "' (expected default or e_only)");
}

uint64_t ScenarioRule::fingerprint() const {
    uint64_t h = 0x6d66745f73796eull;
    for (double w : weights) mix_into(h, w);
    mix_into(h, bias);
    mix_into(h, noise);
    h ^= flavor == Flavor::jaad ? 0x4a41414433ull : 0x5049455f33ull;
    return h;
}

std::vector<const PedestrianTrack*> GeneratedDataset::all_tracks() const {
    std::vector<const PedestrianTrack*> out;
    out.reserve(train.size() + val.size() + test.size());
    for (const auto& t : train) out.push_back(&t);
    for (const auto& t : val) out.push_back(&t);
    for (const auto& t : test) out.push_back(&t);
    return out;
}

std::array<double, 5> rule_features(const PedestrianTrack& track) {
    const auto& frames = track.frames;
    const double n = static_cast<double>(frames.size());
    double looking = 0.0, walking = 0.0;
    for (const auto& fa : frames) {
        if (fa.gaze_state == 0) looking += 1.0;   // code 0 = looking
        if (fa.motion_state == 1) walking += 1.0;  // code 1 = walking
    }
    const double span = std::max(1.0, n - 1.0);
    const double decel_rate =
        (frames.front().vehicle_speed - frames.back().vehicle_speed) / span;
    const double cx_first = 0.5 * (frames.front().bbox[0] + frames.front().bbox[2]);
    const double cx_last = 0.5 * (frames.back().bbox[0] + frames.back().bbox[2]);
    const double lateral_rate = std::abs(cx_last - cx_first) / span;
    return {frames.front().crosswalk ? 1.0 : 0.0, looking / n, walking / n, decel_rate,
            lateral_rate};
}

double rule_score(const ScenarioRule& rule, const std::array<double, 5>& features) {
    double z = rule.bias;
    for (size_t i = 0; i < features.size(); ++i) z += rule.weights[i] * features[i];
    return z;
}

namespace {

PedestrianTrack generate_track(size_t index, const ScenarioRule& rule, Rng rng) {
    const Flavor flavor = rule.flavor;
    PedestrianTrack track;
    track.pedestrian_id = "synth_" + std::to_string(index);
    track.frame_w = 1920;
    track.frame_h = 1080;

    const size_t length = 60 + static_cast<size_t>(rng.below(61));  // 60..120 frames

    // track-level latents
    const bool crosswalk = rng.bernoulli(0.5);
    const double gaze_p = rng.bernoulli(0.5) ? 0.85 : 0.15;    // looking probability
    const double walk_p = rng.bernoulli(0.5) ? 0.85 : 0.15;    // walking probability
    const bool decelerating = rng.bernoulli(0.5);
    const double slope1 = decelerating ? -rng.uniform(0.05, 0.10) : rng.uniform(-0.005, 0.02);
    const double slope2 = slope1 * rng.uniform(0.8, 1.2);
    const double v0 = rng.uniform(6.0, 14.0);
    const bool fast_lateral = rng.bernoulli(0.5);
    const double drift = (rng.bernoulli(0.5) ? 1.0 : -1.0) *
                         (fast_lateral ? rng.uniform(2.0, 3.5) : rng.uniform(0.0, 0.5));

    const bool intersection = rng.bernoulli(0.3);
    const int lane_count = 1 + static_cast<int>(rng.below(4));
    const int traffic_light = static_cast<int>(rng.below(3));
    const int traffic_direction = static_cast<int>(rng.below(2));
    const int road_type = static_cast<int>(rng.below(3));
    const int signage_type = static_cast<int>(rng.below(6));
    const bool stop_sign_jaad = rng.bernoulli(0.2);

    const double box_w = rng.uniform(40.0, 90.0);
    const double box_h = 2.2 * box_w;
    double cx = rng.uniform(300.0, 1620.0);
    double cy = rng.uniform(400.0, 800.0);

    const double knee = static_cast<double>(length) / 2.0;
    track.frames.reserve(length);
    for (size_t f = 0; f < length; ++f) {
        FrameAnnotation fa;
        fa.frame_index = static_cast<int64_t>(f);
        fa.motion_state = rng.bernoulli(walk_p) ? 1 : 0;
        fa.gaze_state = rng.bernoulli(gaze_p) ? 0 : 1;
        if (flavor == Flavor::jaad) {
            fa.head_nod = rng.bernoulli(0.1) ? 0 : 1;
            fa.hand_gesture = static_cast<int>(rng.below(4));
        } else {
            fa.hand_gesture = static_cast<int>(rng.below(5));
        }
        fa.motion_direction = static_cast<int>(rng.below(3));

        const double t = static_cast<double>(f);
        double speed = v0 + (t <= knee ? slope1 * t : slope1 * knee + slope2 * (t - knee));
        speed += rng.normal() * 0.05;
        fa.vehicle_speed = std::max(0.0, speed);

        cx += drift + rng.normal() * 0.4;
        cy += rng.normal() * 0.2;
        cx = std::clamp(cx, box_w / 2 + 1.0, 1920.0 - box_w / 2 - 1.0);
        cy = std::clamp(cy, box_h / 2 + 1.0, 1080.0 - box_h / 2 - 1.0);
        fa.bbox = {cx - box_w / 2, cy - box_h / 2, cx + box_w / 2, cy + box_h / 2};

        fa.lane_count = lane_count;
        fa.intersection = intersection;
        fa.crosswalk = crosswalk;
        fa.traffic_light = traffic_light;
        fa.traffic_direction = traffic_direction;
        if (flavor == Flavor::jaad) {
            fa.road_type = road_type;
            fa.stop_sign = stop_sign_jaad;
        } else {
            fa.stop_sign = signage_type == 1;  // "stop"
        }
        fa.signage_type = signage_type;
        track.frames.push_back(fa);
    }
    track.event_frame = static_cast<int64_t>(length - 1);

    const double z = rule_score(rule, rule_features(track));
    int label = z > 0.0 ? 1 : 0;
    Rng flip = rng.fork(kTagFlip);
    if (flip.bernoulli(rule.noise)) label = 1 - label;
    track.label = label;
    return track;
}

}  // namespace

GeneratedDataset generate_dataset(size_t n_tracks, const ScenarioRule& rule, uint64_t seed) {
    if (n_tracks < 10) throw ConfigError("generate_dataset: n_tracks must be >= 10");
    if (rule.noise < 0.0 || rule.noise >= 0.5)
        throw ConfigError("generate_dataset: noise must be in [0, 0.5)");

    Rng rng(seed);
    std::vector<PedestrianTrack> tracks;
    tracks.reserve(n_tracks);
    for (size_t i = 0; i < n_tracks; ++i)
        tracks.push_back(generate_track(i, rule, rng.fork(kTagTrack).fork(i)));

    // 70/10/20 split by track, deterministic shuffle
    std::vector<size_t> order(n_tracks);
    std::iota(order.begin(), order.end(), 0);
    Rng shuffle = rng.fork(kTagSplit);
    for (size_t i = n_tracks - 1; i > 0; --i)
        std::swap(order[i], order[shuffle.below(i + 1)]);

    const size_t n_train = static_cast<size_t>(0.7 * static_cast<double>(n_tracks));
    const size_t n_val = static_cast<size_t>(0.1 * static_cast<double>(n_tracks));

    GeneratedDataset ds;
    ds.rule = rule;
    ds.rule_fingerprint = rule.fingerprint();
    ds.seed = seed;
    for (size_t i = 0; i < n_tracks; ++i) {
        auto& dst = i < n_train ? ds.train : (i < n_train + n_val ? ds.val : ds.test);
        dst.push_back(std::move(tracks[order[i]]));
    }
    return ds;
}

double bayes_accuracy(const ScenarioRule& rule, const GeneratedDataset& dataset) {
    if (dataset.rule_fingerprint != rule.fingerprint())
        throw ContractError("bayes_accuracy: dataset was not generated under this rule");
    size_t hits = 0, total = 0;
    for (const auto* track : dataset.all_tracks()) {
        const int pred = rule_score(rule, rule_features(*track)) > 0.0 ? 1 : 0;
        hits += pred == track->label ? 1 : 0;
        ++total;
    }
    return static_cast<double>(hits) / static_cast<double>(total);
}

double restricted_bayes_accuracy(const ScenarioRule& rule,
                                 const std::vector<const PedestrianTrack*>& tracks, bool use_p,
                                 bool use_e) {
    if (tracks.empty()) throw ContractError("restricted_bayes_accuracy: empty dataset");
    std::vector<std::pair<double, int>> scored;
    scored.reserve(tracks.size());
    for (const auto* track : tracks) {
        auto f = rule_features(*track);
        double z = 0.0;
        if (use_e) z += rule.weights[0] * f[0];
        if (use_p) z += rule.weights[1] * f[1] + rule.weights[2] * f[2];
        z += rule.weights[3] * f[3] + rule.weights[4] * f[4];
        scored.emplace_back(z, track->label);
    }
    std::sort(scored.begin(), scored.end());
    // scan all thresholds: predict 1 for score > cut, plus the two constant classifiers
    size_t total_pos = 0;
    for (const auto& [z, y] : scored) total_pos += static_cast<size_t>(y);
    const size_t n = scored.size();
    // cut below everything: predict all 1
    size_t best = total_pos;
    size_t pos_below = 0;  // positives at or below the cut
    for (size_t i = 0; i < n; ++i) {
        pos_below += static_cast<size_t>(scored[i].second);
        if (i + 1 < n && scored[i + 1].first == scored[i].first) continue;
        // predict 1 strictly above scored[i].first
        const size_t hits = (i + 1 - pos_below)            // negatives below -> predicted 0
                            + (total_pos - pos_below);      // positives above -> predicted 1
        if (hits > best) best = hits;
    }
    return static_cast<double>(best) / static_cast<double>(n);
}

}  // namespace mft
