#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "mft/core/rng.hpp"
#include "mft/data/annotations.hpp"

namespace mft {

// Planted decision rule for synthetic tracks. The label is a deterministic
// threshold on a logistic score over five observable track features,
// flipped with probability `noise`, so the Bayes-optimal accuracy is
// 1 - noise by construction.
//
// Feature order: crosswalk flag (E), looking fraction (P), walking fraction
// (P), ego deceleration rate (V), absolute lateral bbox drift rate (L).
struct ScenarioRule {
    std::array<double, 5> weights{};
    double bias = 0.0;
    double noise = 0.0;  // label flip probability, [0, 0.5)
    Flavor flavor = Flavor::jaad;

    // Signal spread over all four contexts; magnitudes chosen so no single
    // context saturates accuracy and removing P+E costs double-digit
    // accuracy points.
    static ScenarioRule default_rule(Flavor flavor, double noise);
    // Only the crosswalk flag (context E) carries label signal.
    static ScenarioRule e_only_rule(Flavor flavor, double noise);
    static ScenarioRule named(const std::string& name, Flavor flavor, double noise);

    uint64_t fingerprint() const;
};

struct GeneratedDataset {
    std::vector<PedestrianTrack> train, val, test;
    ScenarioRule rule;
    uint64_t rule_fingerprint = 0;
    uint64_t seed = 0;

    std::vector<const PedestrianTrack*> all_tracks() const;
};

// Generates n_tracks tracks of 60-120 frames with smooth bbox walks, piecewise
// linear speed profiles and per-frame categorical draws, labels them by the
// rule, and splits 70/10/20 by track. Deterministic under (seed, rule).
GeneratedDataset generate_dataset(size_t n_tracks, const ScenarioRule& rule, uint64_t seed);

// The five observable rule features of a track, recomputed from its frames.
std::array<double, 5> rule_features(const PedestrianTrack& track);
double rule_score(const ScenarioRule& rule, const std::array<double, 5>& features);

// Accuracy of the Bayes classifier (threshold the rule score at 0) scored
// exhaustively against the realized labels of every track in the dataset.
// Throws ContractError if the dataset was not generated under `rule`.
double bayes_accuracy(const ScenarioRule& rule, const GeneratedDataset& dataset);

// Best achievable accuracy when only a subset of the rule features is
// observable (use_p/use_e mask out the P/E features): exhaustive threshold
// scan over the restricted score. Used to size the ablation margin.
double restricted_bayes_accuracy(const ScenarioRule& rule,
                                 const std::vector<const PedestrianTrack*>& tracks, bool use_p,
                                 bool use_e);

}  // namespace mft
