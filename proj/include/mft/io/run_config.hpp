#pragma once

#include <cstdint>
#include <string>

#include "json.hpp"
#include "mft/data/sampler.hpp"
#include "mft/model/config.hpp"
#include "mft/train/train.hpp"

namespace mft {

struct SynthSettings {
    size_t n_tracks = 200;
    double noise = 0.05;
    std::string rule = "default";  // default | e_only
};

// Union of model/train/sampler/synth settings plus data paths, loaded from a
// JSON config file with command-line overrides. Unknown keys are rejected.
struct RunConfig {
    Flavor flavor = Flavor::jaad;
    MFTConfig model;        // model.n_frames is kept in sync with sampler.n_frames
    TrainConfig train;
    SamplerConfig sampler;
    SynthSettings synth;
    std::string data_train, data_val, data_test;
    std::string out_dir = "out";
    uint64_t seed = 1;
};

RunConfig load_run_config(const std::string& path);
RunConfig parse_run_config(const nlohmann::json& j);

// JSON (de)serialization for the pieces stored in checkpoints.
nlohmann::json model_config_to_json(const MFTConfig& cfg);
MFTConfig model_config_from_json(const nlohmann::json& j);
nlohmann::json schema_to_json(const EncodingSchema& schema);
EncodingSchema schema_from_json(const nlohmann::json& j);

}  // namespace mft
