#include "mft/data/schema.hpp"

#include <algorithm>

namespace mft {

Flavor flavor_from_string(const std::string& s) {
    if (s == "jaad") return Flavor::jaad;
    if (s == "pie") return Flavor::pie;
    throw ConfigError("unknown flavor '" + s + "' (expected jaad or pie)");
}

std::string to_string(Flavor flavor) { return flavor == Flavor::jaad ? "jaad" : "pie"; }

int CodeTable::encode(const std::string& value) const {
    auto it = std::find(values.begin(), values.end(), value);
    if (it == values.end())
        throw DataError("unknown " + attribute + " value '" + value + "'");
    return static_cast<int>(it - values.begin());
}

const std::string& CodeTable::decode(int code) const {
    if (code < 0 || static_cast<size_t>(code) >= values.size())
        throw DataError("code " + std::to_string(code) + " out of range for " + attribute);
    return values[static_cast<size_t>(code)];
}

bool CodeTable::contains(const std::string& value) const {
    return std::find(values.begin(), values.end(), value) != values.end();
}

namespace {

// Value order fixes the integer codes (first listed = 0); it is published in
// docs/annotation_schema.md and stored in checkpoint headers.
const std::vector<CodeTable>& jaad_tables() {
    static const std::vector<CodeTable> tables = {
        {"motion_state", {"standing", "walking"}},
        {"gaze_state", {"looking", "not_looking"}},
        {"head_nod", {"nodding", "other"}},
        {"hand_gesture", {"greeting", "yielding", "right_of_way", "other"}},
        {"motion_direction", {"lateral", "longitudinal", "other"}},
        {"traffic_light", {"red", "green", "other"}},
        {"traffic_direction", {"one_way", "two_way"}},
        {"road_type", {"street", "parking_lot", "garage"}},
        {"signage_type", {"none", "stop", "yield", "crossing", "speed", "other"}},
    };
    return tables;
}

// PIE folds head_nod into hand_gesture (extra "nodding" code appended) and
// drops road_type; stop_sign is derived from signage_type == "stop".
const std::vector<CodeTable>& pie_tables() {
    static const std::vector<CodeTable> tables = {
        {"motion_state", {"standing", "walking"}},
        {"gaze_state", {"looking", "not_looking"}},
        {"hand_gesture", {"greeting", "yielding", "right_of_way", "other", "nodding"}},
        {"motion_direction", {"lateral", "longitudinal", "other"}},
        {"traffic_light", {"red", "green", "other"}},
        {"traffic_direction", {"one_way", "two_way"}},
        {"signage_type", {"none", "stop", "yield", "crossing", "speed", "other"}},
    };
    return tables;
}

}  // namespace

const std::vector<CodeTable>& all_code_tables(Flavor flavor) {
    return flavor == Flavor::jaad ? jaad_tables() : pie_tables();
}

const CodeTable& code_table(Flavor flavor, const std::string& attribute) {
    for (const auto& table : all_code_tables(flavor))
        if (table.attribute == attribute) return table;
    throw SchemaError("attribute '" + attribute + "' is not categorical in flavor " +
                      to_string(flavor));
}

const std::vector<std::string>& behavior_attributes(Flavor flavor) {
    static const std::vector<std::string> jaad = {"motion_state", "gaze_state", "head_nod",
                                                  "hand_gesture", "motion_direction"};
    static const std::vector<std::string> pie = {"motion_state", "gaze_state", "hand_gesture",
                                                 "motion_direction"};
    return flavor == Flavor::jaad ? jaad : pie;
}

const std::vector<std::string>& environment_attributes(Flavor flavor) {
    static const std::vector<std::string> jaad = {
        "lane_count",        "intersection", "crosswalk", "traffic_light",
        "traffic_direction", "road_type",    "stop_sign", "signage_type"};
    static const std::vector<std::string> pie = {
        "lane_count",        "intersection", "crosswalk", "traffic_light",
        "traffic_direction", "stop_sign",    "signage_type"};
    return flavor == Flavor::jaad ? jaad : pie;
}

size_t p_width(Flavor flavor) { return behavior_attributes(flavor).size(); }
size_t l_width() { return 4; }
size_t v_width() { return 1; }
size_t e_width(Flavor flavor) { return environment_attributes(flavor).size(); }

}  // namespace mft
