#include "mft/io/run_config.hpp"

#include <fstream>

namespace mft {

namespace {

using nlohmann::json;

void reject_unknown(const json& obj, const std::vector<std::string>& allowed,
                    const std::string& where) {
    for (const auto& [key, _] : obj.items()) {
        bool known = false;
        for (const auto& a : allowed)
            if (key == a) known = true;
        if (!known)
            throw ConfigError("config: unknown key '" + key + "' in " + where);
    }
}

template <typename T>
void read_into(const json& obj, const char* key, T& out) {
    auto it = obj.find(key);
    if (it == obj.end()) return;
    try {
        out = it->get<T>();
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: bad value for '") + key + "': " + e.what());
    }
}

}  // namespace

nlohmann::json model_config_to_json(const MFTConfig& cfg) {
    json j;
    j["n_frames"] = cfg.n_frames;
    j["model_dim"] = cfg.model_dim;
    j["heads"] = cfg.heads;
    j["ffn_hidden"] = cfg.ffn_hidden;
    j["mlp_hidden"] = cfg.mlp_hidden;
    j["dropout"] = cfg.dropout_p;
    j["flavor"] = to_string(cfg.flavor);
    j["use_p"] = cfg.use_p;
    j["use_e"] = cfg.use_e;
    j["ccr_mode"] = to_string(cfg.ccr_mode);
    return j;
}

MFTConfig model_config_from_json(const nlohmann::json& j) {
    reject_unknown(j,
                   {"n_frames", "model_dim", "heads", "ffn_hidden", "mlp_hidden", "dropout",
                    "flavor", "use_p", "use_e", "ccr_mode"},
                   "model");
    MFTConfig cfg;
    read_into(j, "n_frames", cfg.n_frames);
    read_into(j, "model_dim", cfg.model_dim);
    read_into(j, "heads", cfg.heads);
    read_into(j, "ffn_hidden", cfg.ffn_hidden);
    read_into(j, "mlp_hidden", cfg.mlp_hidden);
    read_into(j, "dropout", cfg.dropout_p);
    if (j.contains("flavor")) cfg.flavor = flavor_from_string(j["flavor"].get<std::string>());
    read_into(j, "use_p", cfg.use_p);
    read_into(j, "use_e", cfg.use_e);
    if (j.contains("ccr_mode"))
        cfg.ccr_mode = ccr_mode_from_string(j["ccr_mode"].get<std::string>());
    return cfg;
}

nlohmann::json schema_to_json(const EncodingSchema& schema) {
    json j;
    j["flavor"] = to_string(schema.flavor);
    j["fitted"] = schema.fitted;
    json stats = json::array();
    static const char* names[kContinuousFeatures] = {"x1", "y1", "x2", "y2", "speed"};
    for (size_t i = 0; i < kContinuousFeatures; ++i) {
        json s;
        s["feature"] = names[i];
        s["mean"] = schema.continuous[i].mean;
        s["std"] = schema.continuous[i].stddev;
        s["constant"] = schema.continuous[i].constant;
        stats.push_back(s);
    }
    j["continuous"] = stats;
    json tables = json::array();
    for (const auto& table : all_code_tables(schema.flavor)) {
        json t;
        t["attribute"] = table.attribute;
        t["values"] = table.values;
        tables.push_back(t);
    }
    j["code_tables"] = tables;
    return j;
}

EncodingSchema schema_from_json(const nlohmann::json& j) {
    EncodingSchema schema;
    schema.flavor = flavor_from_string(j.at("flavor").get<std::string>());
    schema.fitted = j.at("fitted").get<bool>();
    const auto& stats = j.at("continuous");
    if (!stats.is_array() || stats.size() != kContinuousFeatures)
        throw ConfigError("schema: continuous stats must have " +
                          std::to_string(kContinuousFeatures) + " entries");
    for (size_t i = 0; i < kContinuousFeatures; ++i) {
        schema.continuous[i].mean = stats[i].at("mean").get<double>();
        schema.continuous[i].stddev = stats[i].at("std").get<double>();
        schema.continuous[i].constant = stats[i].at("constant").get<bool>();
    }
    // code tables are fixed per flavor; verify the stored ones match
    if (j.contains("code_tables")) {
        const auto& tables = j["code_tables"];
        const auto& expected = all_code_tables(schema.flavor);
        if (tables.size() != expected.size())
            throw ConfigError("schema: stored code tables do not match this build");
        for (size_t i = 0; i < expected.size(); ++i) {
            if (tables[i].at("attribute").get<std::string>() != expected[i].attribute ||
                tables[i].at("values").get<std::vector<std::string>>() != expected[i].values)
                throw ConfigError("schema: stored code table '" + expected[i].attribute +
                                  "' does not match this build");
        }
    }
    return schema;
}

RunConfig parse_run_config(const nlohmann::json& j) {
    reject_unknown(
        j, {"flavor", "model", "train", "sampler", "synth", "data", "out_dir", "seed"}, "root");
    RunConfig cfg;
    if (j.contains("flavor")) cfg.flavor = flavor_from_string(j["flavor"].get<std::string>());
    if (j.contains("model")) {
        cfg.model = model_config_from_json(j["model"]);
        if (j["model"].contains("flavor") &&
            j["model"]["flavor"].get<std::string>() != to_string(cfg.flavor))
            throw ConfigError("config: model.flavor conflicts with top-level flavor");
    }
    cfg.model.flavor = cfg.flavor;

    if (j.contains("train")) {
        const json& t = j["train"];
        reject_unknown(t,
                       {"learning_rate", "epochs", "batch_size", "beta1", "beta2", "adam_eps",
                        "class_weighting", "grad_clip"},
                       "train");
        read_into(t, "learning_rate", cfg.train.learning_rate);
        read_into(t, "epochs", cfg.train.epochs);
        read_into(t, "batch_size", cfg.train.batch_size);
        read_into(t, "beta1", cfg.train.beta1);
        read_into(t, "beta2", cfg.train.beta2);
        read_into(t, "adam_eps", cfg.train.adam_eps);
        read_into(t, "grad_clip", cfg.train.grad_clip);
        if (t.contains("class_weighting")) {
            const std::string mode = t["class_weighting"].get<std::string>();
            if (mode == "ratio")
                cfg.train.class_weighting = TrainConfig::ClassWeighting::ratio;
            else if (mode == "none")
                cfg.train.class_weighting = TrainConfig::ClassWeighting::none;
            else
                throw ConfigError("config: class_weighting must be ratio or none");
        }
    }

    if (j.contains("sampler")) {
        const json& s = j["sampler"];
        reject_unknown(s, {"n_frames", "overlap", "tte_min", "tte_max"}, "sampler");
        read_into(s, "n_frames", cfg.sampler.n_frames);
        read_into(s, "overlap", cfg.sampler.overlap);
        read_into(s, "tte_min", cfg.sampler.tte_min);
        read_into(s, "tte_max", cfg.sampler.tte_max);
    }
    cfg.model.n_frames = cfg.sampler.n_frames;

    if (j.contains("synth")) {
        const json& s = j["synth"];
        reject_unknown(s, {"n_tracks", "noise", "rule"}, "synth");
        read_into(s, "n_tracks", cfg.synth.n_tracks);
        read_into(s, "noise", cfg.synth.noise);
        read_into(s, "rule", cfg.synth.rule);
    }

    if (j.contains("data")) {
        const json& d = j["data"];
        reject_unknown(d, {"train", "val", "test"}, "data");
        read_into(d, "train", cfg.data_train);
        read_into(d, "val", cfg.data_val);
        read_into(d, "test", cfg.data_test);
    }
    read_into(j, "out_dir", cfg.out_dir);
    read_into(j, "seed", cfg.seed);
    cfg.train.seed = cfg.seed;
    return cfg;
}

RunConfig load_run_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("config file '" + path + "': " + e.what());
    }
    if (!j.is_object()) throw ConfigError("config file must hold a JSON object");
    return parse_run_config(j);
}

}  // namespace mft
