#pragma once

#include <array>
#include <string>
#include <vector>

#include "mft/core/errors.hpp"

namespace mft {

// Dataset schema variant. The flavor fixes which categorical attributes
// exist and therefore the per-context input widths.
enum class Flavor { jaad, pie };

Flavor flavor_from_string(const std::string& s);
std::string to_string(Flavor flavor);

// Fixed categorical code table: value strings in listing order, codes are
// 0-based positions. Tables are part of the published schema, not fitted.
struct CodeTable {
    std::string attribute;
    std::vector<std::string> values;

    int encode(const std::string& value) const;          // DataError on unknown value
    const std::string& decode(int code) const;           // DataError on unknown code
    bool contains(const std::string& value) const;
};

// Behavior attribute names in P column order for a flavor.
const std::vector<std::string>& behavior_attributes(Flavor flavor);
// Environment attribute names in E column order for a flavor.
const std::vector<std::string>& environment_attributes(Flavor flavor);

// Code table for a categorical attribute ("motion_state", "traffic_light",
// ...). Throws SchemaError if the attribute is not categorical or not part
// of the flavor.
const CodeTable& code_table(Flavor flavor, const std::string& attribute);
// All categorical tables of a flavor (for checkpoint headers and docs).
const std::vector<CodeTable>& all_code_tables(Flavor flavor);

size_t p_width(Flavor flavor);  // 5 (JAAD) / 4 (PIE)
size_t l_width();               // 4
size_t v_width();               // 1
size_t e_width(Flavor flavor);  // 8 (JAAD) / 7 (PIE)

// Normalization statistics for one continuous feature, fitted on the
// training split. A constant feature is flagged and passed through raw.
struct FeatureStat {
    double mean = 0.0;
    double stddev = 1.0;
    bool constant = false;

    double normalize(double x) const { return constant ? x : (x - mean) / stddev; }
};

// Continuous feature order used throughout: x1, y1, x2, y2, speed.
constexpr size_t kContinuousFeatures = 5;

struct EncodingSchema {
    Flavor flavor = Flavor::jaad;
    std::array<FeatureStat, kContinuousFeatures> continuous{};
    bool fitted = false;
};

}  // namespace mft
