#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mft/io/run_config.hpp"

namespace mft::cli {

struct Overrides {
    std::optional<uint64_t> seed;
    std::optional<std::string> flavor;
    std::optional<int64_t> tte_min, tte_max;
    std::optional<std::string> out_dir;
};

// Loads the config file (or defaults when empty) and applies flag overrides.
RunConfig resolve_config(const std::string& config_path, const Overrides& ov);

// Each command returns a process exit code (0 on success); failures inside
// the library surface as mft::Error and are mapped by the caller.
int cmd_synth_gen(const RunConfig& cfg);
int cmd_train(const RunConfig& cfg);
int cmd_eval(const std::string& checkpoint_path, const std::string& data_path,
             const std::string& out_path, const SamplerConfig& sampler,
             const std::optional<std::string>& expect_flavor);
int cmd_ablate(const RunConfig& cfg, std::vector<std::string> variants);
int cmd_export_attention(const std::string& checkpoint_path, const std::string& data_path,
                         const std::string& out_path, const SamplerConfig& sampler);
int cmd_grad_check(const std::string& config_path, uint64_t seed,
                   const std::string& fault_param);

}  // namespace mft::cli
