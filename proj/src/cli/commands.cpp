#include "mft/cli/commands.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>

#include "json.hpp"
#include "mft/eval/ablation.hpp"
#include "mft/eval/attention.hpp"
#include "mft/io/checkpoint.hpp"
#include "mft/synth/synthgen.hpp"
#include "mft/train/grad_check.hpp"

namespace mft::cli {

namespace fs = std::filesystem;

namespace {

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write '" + path + "'");
    out << content;
}

struct EncodedSplits {
    std::vector<ClipSample> train, val, test;
    EncodingSchema schema;
};

EncodedSplits load_and_encode(const RunConfig& cfg) {
    if (cfg.data_train.empty() || cfg.data_val.empty())
        throw UsageError("config must provide data.train and data.val paths");
    auto train_tracks = parse_annotations_file(cfg.data_train, cfg.flavor);
    auto val_tracks = parse_annotations_file(cfg.data_val, cfg.flavor);
    auto train_raw = sample_clips(train_tracks, cfg.sampler);
    auto val_raw = sample_clips(val_tracks, cfg.sampler);
    EncodedSplits out;
    out.schema = fit_normalizer(train_raw, cfg.flavor);
    out.train = encode_clips(train_raw, out.schema);
    out.val = encode_clips(val_raw, out.schema);
    if (!cfg.data_test.empty()) {
        auto test_tracks = parse_annotations_file(cfg.data_test, cfg.flavor);
        out.test = encode_clips(sample_clips(test_tracks, cfg.sampler), out.schema);
    }
    return out;
}

}  // namespace

RunConfig resolve_config(const std::string& config_path, const Overrides& ov) {
    RunConfig cfg = config_path.empty() ? RunConfig{} : load_run_config(config_path);
    if (ov.seed) {
        cfg.seed = *ov.seed;
        cfg.train.seed = *ov.seed;
    }
    if (ov.flavor) {
        cfg.flavor = flavor_from_string(*ov.flavor);
        cfg.model.flavor = cfg.flavor;
    }
    if (ov.tte_min) cfg.sampler.tte_min = *ov.tte_min;
    if (ov.tte_max) cfg.sampler.tte_max = *ov.tte_max;
    if (ov.out_dir) cfg.out_dir = *ov.out_dir;
    return cfg;
}

int cmd_synth_gen(const RunConfig& cfg) {
    const ScenarioRule rule = ScenarioRule::named(cfg.synth.rule, cfg.flavor, cfg.synth.noise);
    const GeneratedDataset ds = generate_dataset(cfg.synth.n_tracks, rule, cfg.seed);

    fs::create_directories(cfg.out_dir);
    write_annotations_file(cfg.out_dir + "/train.jsonl", ds.train, cfg.flavor);
    write_annotations_file(cfg.out_dir + "/val.jsonl", ds.val, cfg.flavor);
    write_annotations_file(cfg.out_dir + "/test.jsonl", ds.test, cfg.flavor);

    nlohmann::json manifest;
    manifest["seed"] = cfg.seed;
    manifest["flavor"] = to_string(cfg.flavor);
    manifest["rule"] = {{"name", cfg.synth.rule},
                        {"weights", rule.weights},
                        {"bias", rule.bias},
                        {"noise", rule.noise}};
    manifest["rule_fingerprint"] = ds.rule_fingerprint;
    manifest["tracks"] = {{"train", ds.train.size()},
                          {"val", ds.val.size()},
                          {"test", ds.test.size()}};
    manifest["bayes_accuracy"] = bayes_accuracy(rule, ds);
    write_file(cfg.out_dir + "/manifest.json", manifest.dump(2) + "\n");

    std::cout << "wrote " << ds.train.size() << "/" << ds.val.size() << "/" << ds.test.size()
              << " train/val/test tracks to " << cfg.out_dir << "\n";
    return 0;
}

int cmd_train(const RunConfig& cfg) {
    cfg.model.validate();
    std::cout << "parameters: " << param_count(cfg.model) << "\n";

    EncodedSplits data = load_and_encode(cfg);
    std::cout << "clips: train " << data.train.size() << ", val " << data.val.size() << "\n";

    TrainResult result = train(cfg.model, data.train, data.val, cfg.train);

    fs::create_directories(cfg.out_dir);
    save_checkpoint(cfg.out_dir + "/checkpoint_best.bin", cfg.model, result.best_params,
                    data.schema);
    save_checkpoint(cfg.out_dir + "/checkpoint_final.bin", cfg.model, result.final_params,
                    data.schema);
    write_file(cfg.out_dir + "/history.json", history_to_json(result) + "\n");

    const auto& last = result.history.back();
    std::cout << "final train loss " << last.train_loss;
    if (last.has_val) std::cout << ", val acc " << last.val.acc;
    std::cout << ", best epoch " << result.best_epoch << "\n";
    return 0;
}

namespace {

std::vector<ClipSample> encode_for_checkpoint(const Checkpoint& ck, const std::string& data_path,
                                              const SamplerConfig& sampler) {
    SamplerConfig s = sampler;
    s.n_frames = ck.config.n_frames;
    auto tracks = parse_annotations_file(data_path, ck.config.flavor);
    return encode_clips(sample_clips(tracks, s), ck.schema);
}

}  // namespace

int cmd_eval(const std::string& checkpoint_path, const std::string& data_path,
             const std::string& out_path, const SamplerConfig& sampler,
             const std::optional<std::string>& expect_flavor) {
    Checkpoint ck = load_checkpoint(checkpoint_path);
    if (expect_flavor && flavor_from_string(*expect_flavor) != ck.config.flavor)
        throw ConfigError("flavor mismatch: checkpoint is " + to_string(ck.config.flavor) +
                          ", requested " + *expect_flavor);
    auto clips = encode_for_checkpoint(ck, data_path, sampler);
    if (clips.empty()) throw DataError("no clips sampled from '" + data_path + "'");

    MFTModelT<float> model(ck.config, std::move(ck.params));
    MetricsReport report = compute_metrics(score_clips(model, clips), clip_labels(clips));
    const std::string json = metrics_to_json(report);
    std::cout << json << "\n";
    if (!out_path.empty()) write_file(out_path, json + "\n");
    return 0;
}

int cmd_ablate(const RunConfig& cfg, std::vector<std::string> variants) {
    if (variants.empty()) variants = all_variants();
    for (const auto& v : variants) apply_variant(cfg.model, v);  // validate names up front

    EncodedSplits data = load_and_encode(cfg);
    if (data.test.empty()) throw UsageError("ablate requires data.test");

    auto rows = ablation_run(cfg.model, variants, data.train, data.val, data.test, cfg.train);

    fs::create_directories(cfg.out_dir);
    const std::string csv = ablation_csv(rows);
    write_file(cfg.out_dir + "/ablation.csv", csv);
    write_file(cfg.out_dir + "/ablation.json", ablation_json(rows) + "\n");
    std::cout << csv;
    return 0;
}

int cmd_export_attention(const std::string& checkpoint_path, const std::string& data_path,
                         const std::string& out_path, const SamplerConfig& sampler) {
    Checkpoint ck = load_checkpoint(checkpoint_path);
    auto clips = encode_for_checkpoint(ck, data_path, sampler);
    MFTModelT<float> model(ck.config, std::move(ck.params));
    AttentionSummary summary = attention_summary(model, clips);
    const std::string json = attention_summary_to_json(summary);
    std::cout << json << "\n";
    if (!out_path.empty()) write_file(out_path, json + "\n");
    return 0;
}

int cmd_grad_check(const std::string& config_path, uint64_t seed,
                   const std::string& fault_param) {
    MFTConfig cfg = toy_config();
    if (!config_path.empty()) cfg = load_run_config(config_path).model;

    GradCheckReport report = grad_check(cfg, seed, 1e-4, 1e-5, fault_param);
    std::cout << "grad-check precision=" << report.precision << " tol=" << report.tolerance
              << " h=" << report.step << " elements=" << report.params_checked << "\n";
    for (const auto& entry : report.entries) {
        if (!entry.pass)
            std::cout << "FAIL " << entry.name << " max_rel_err=" << entry.max_rel_err
                      << " (ad=" << entry.ad << ", fd=" << entry.fd << ", index "
                      << entry.worst_index << ")\n";
    }
    std::cout << (report.pass ? "PASS" : "FAIL") << ": " << report.entries.size()
              << " parameter tensors checked\n";
    return report.pass ? 0 : 4;
}

}  // namespace mft::cli
