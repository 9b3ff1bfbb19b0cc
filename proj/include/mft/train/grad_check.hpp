#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mft/model/config.hpp"

namespace mft {

struct GradCheckEntry {
    std::string name;
    double max_rel_err = 0.0;
    size_t worst_index = 0;
    double ad = 0.0;  // tape gradient at the worst element
    double fd = 0.0;  // central finite difference at the worst element
    bool pass = true;
};

struct GradCheckReport {
    std::vector<GradCheckEntry> entries;
    bool pass = false;
    double tolerance = 1e-4;
    double step = 1e-5;
    size_t params_checked = 0;
    std::string precision = "float64";
};

// Central finite-difference check of every parameter gradient of the full
// model loss (weighted BCE over a few random clips), always in 64-bit.
// Relative error uses max(|ad|, |fd|, 1e-3) in the denominator.
//
// fault_param, when set, multiplies that parameter's tape gradient by 1.01
// before comparing - a fault-injection hook to prove the check catches a
// corrupted backward rule and names the parameter.
GradCheckReport grad_check(const MFTConfig& cfg, uint64_t seed, double tolerance = 1e-4,
                           double step = 1e-5, const std::string& fault_param = {});

}  // namespace mft
