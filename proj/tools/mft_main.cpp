#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "mft/cli/commands.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Multi-context fusion transformer for pedestrian crossing-intention prediction"};
    app.require_subcommand(1);

    std::string config_path;
    mft::cli::Overrides ov;
    std::optional<uint64_t> seed;
    std::optional<std::string> flavor;
    std::optional<int64_t> tte_min, tte_max;
    std::optional<std::string> out_dir;
    app.add_option("--config", config_path, "JSON config file")->configurable(false);
    app.add_option("--seed", seed, "override the run seed");
    app.add_option("--flavor", flavor, "dataset flavor (jaad|pie)");
    app.add_option("--tte-min", tte_min, "minimum time-to-event in frames");
    app.add_option("--tte-max", tte_max, "maximum time-to-event in frames");
    app.add_option("--out", out_dir, "output directory");

    auto* synth = app.add_subcommand("synth-gen", "generate a synthetic JSONL dataset");
    auto* train_cmd = app.add_subcommand("train", "train a model and write checkpoints");

    auto* eval_cmd = app.add_subcommand("eval", "score a dataset with a checkpoint");
    std::string checkpoint_path, data_path, out_file;
    eval_cmd->add_option("--checkpoint", checkpoint_path, "checkpoint file")->required();
    eval_cmd->add_option("--data", data_path, "JSONL dataset")->required();
    eval_cmd->add_option("--out-file", out_file, "write metrics JSON here");

    auto* ablate = app.add_subcommand("ablate", "train and score the ablation grid");
    std::vector<std::string> variants;
    ablate->add_option("--variant", variants, "variant names (default: full v1..v5)");

    auto* export_attn = app.add_subcommand("export-attention", "export averaged attention maps");
    std::string ea_checkpoint, ea_data, ea_out;
    export_attn->add_option("--checkpoint", ea_checkpoint, "checkpoint file")->required();
    export_attn->add_option("--data", ea_data, "JSONL dataset")->required();
    export_attn->add_option("--out-file", ea_out, "write summary JSON here");

    auto* gradcheck = app.add_subcommand("grad-check", "finite-difference gradient check");
    std::string fault_param;
    gradcheck->add_option("--inject-fault", fault_param,
                          "corrupt this parameter's gradient (verifies the check fails)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    ov.seed = seed;
    ov.flavor = flavor;
    ov.tte_min = tte_min;
    ov.tte_max = tte_max;
    ov.out_dir = out_dir;

    try {
        if (synth->parsed()) return mft::cli::cmd_synth_gen(mft::cli::resolve_config(config_path, ov));
        if (train_cmd->parsed())
            return mft::cli::cmd_train(mft::cli::resolve_config(config_path, ov));
        if (eval_cmd->parsed()) {
            auto cfg = mft::cli::resolve_config(config_path, ov);
            return mft::cli::cmd_eval(checkpoint_path, data_path, out_file, cfg.sampler, flavor);
        }
        if (ablate->parsed())
            return mft::cli::cmd_ablate(mft::cli::resolve_config(config_path, ov), variants);
        if (export_attn->parsed()) {
            auto cfg = mft::cli::resolve_config(config_path, ov);
            return mft::cli::cmd_export_attention(ea_checkpoint, ea_data, ea_out, cfg.sampler);
        }
        if (gradcheck->parsed())
            return mft::cli::cmd_grad_check(config_path, seed.value_or(7), fault_param);
    } catch (const mft::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return e.exit_code();
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
