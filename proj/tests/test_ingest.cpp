#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <sstream>

#include "doctest.h"
#include "json.hpp"
#include "mft/data/annotations.hpp"
#include "mft/data/encode.hpp"
#include "mft/synth/synthgen.hpp"

using namespace mft;
using nlohmann::json;

namespace {

json base_record(Flavor flavor, const std::string& ped, int64_t frame) {
    json beh = {{"motion_state", "walking"},
                {"gaze_state", "looking"},
                {"hand_gesture", "other"},
                {"motion_direction", "lateral"}};
    if (flavor == Flavor::jaad) beh["head_nod"] = "other";
    json env = {{"lane_count", 2},          {"intersection", false},
                {"crosswalk", true},        {"traffic_light", "red"},
                {"traffic_direction", "two_way"}, {"signage_type", "none"}};
    if (flavor == Flavor::jaad) {
        env["road_type"] = "street";
        env["stop_sign"] = false;
    }
    return json{{"ped_id", ped},
                {"frame", frame},
                {"bbox", {100.0 + frame, 200.0, 150.0 + frame, 320.0}},
                {"speed", 7.5},
                {"behavior", beh},
                {"environment", env},
                {"event_frame", 99},
                {"label", 1},
                {"frame_w", 1920},
                {"frame_h", 1080}};
}

std::vector<PedestrianTrack> parse_str(const std::string& text, Flavor flavor) {
    std::istringstream in(text);
    return parse_annotations(in, flavor);
}

}  // namespace

TEST_CASE("two pedestrians times forty frames parse into two forty-frame tracks") {
    std::ostringstream out;
    for (int f = 0; f < 40; ++f) out << base_record(Flavor::jaad, "a", f).dump() << "\n";
    for (int f = 0; f < 40; ++f) out << base_record(Flavor::jaad, "b", f).dump() << "\n";
    auto tracks = parse_str(out.str(), Flavor::jaad);
    REQUIRE(tracks.size() == 2);
    CHECK(tracks[0].pedestrian_id == "a");
    CHECK(tracks[0].frames.size() == 40);
    CHECK(tracks[1].frames.size() == 40);
    CHECK(tracks[0].label == 1);
    CHECK(tracks[0].event_frame == 99);
}

TEST_CASE("inverted bbox is a data error naming pedestrian and frame") {
    json rec = base_record(Flavor::jaad, "ped_7", 12);
    rec["bbox"] = {300.0, 200.0, 250.0, 320.0};  // x1 > x2
    try {
        parse_str(rec.dump() + "\n", Flavor::jaad);
        FAIL("expected DataError");
    } catch (const DataError& e) {
        std::string msg = e.what();
        CHECK(msg.find("ped_7") != std::string::npos);
        CHECK(msg.find("12") != std::string::npos);
    }
}

TEST_CASE("PIE record containing road_type is a schema error") {
    json rec = base_record(Flavor::pie, "a", 0);
    rec["environment"]["road_type"] = "street";
    CHECK_THROWS_AS(parse_str(rec.dump() + "\n", Flavor::pie), SchemaError);
}

TEST_CASE("PIE rejects supplied stop_sign and head_nod") {
    json rec = base_record(Flavor::pie, "a", 0);
    rec["environment"]["stop_sign"] = true;
    CHECK_THROWS_AS(parse_str(rec.dump() + "\n", Flavor::pie), SchemaError);

    json rec2 = base_record(Flavor::pie, "a", 0);
    rec2["behavior"]["head_nod"] = "other";
    CHECK_THROWS_AS(parse_str(rec2.dump() + "\n", Flavor::pie), SchemaError);
}

TEST_CASE("PIE stop_sign derives from signage_type") {
    json rec = base_record(Flavor::pie, "a", 0);
    rec["environment"]["signage_type"] = "stop";
    auto tracks = parse_str(rec.dump() + "\n", Flavor::pie);
    CHECK(tracks[0].frames[0].stop_sign);

    json rec2 = base_record(Flavor::pie, "b", 0);
    rec2["environment"]["signage_type"] = "yield";
    auto tracks2 = parse_str(rec2.dump() + "\n", Flavor::pie);
    CHECK(!tracks2[0].frames[0].stop_sign);
}

TEST_CASE("malformed line reports a parse error with its line number") {
    std::string text = base_record(Flavor::jaad, "a", 0).dump() + "\n{not json\n";
    try {
        parse_str(text, Flavor::jaad);
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(std::string(e.what()).find("line 2") != std::string::npos);
    }
}

TEST_CASE("missing mandatory field is a schema error") {
    json rec = base_record(Flavor::jaad, "a", 0);
    rec.erase("speed");
    CHECK_THROWS_AS(parse_str(rec.dump() + "\n", Flavor::jaad), SchemaError);

    json rec2 = base_record(Flavor::jaad, "a", 0);
    rec2["behavior"].erase("gaze_state");
    CHECK_THROWS_AS(parse_str(rec2.dump() + "\n", Flavor::jaad), SchemaError);
}

TEST_CASE("unknown keys and unknown categorical strings are rejected") {
    json rec = base_record(Flavor::jaad, "a", 0);
    rec["extra_field"] = 1;
    CHECK_THROWS_AS(parse_str(rec.dump() + "\n", Flavor::jaad), SchemaError);

    json rec2 = base_record(Flavor::jaad, "a", 0);
    rec2["behavior"]["motion_state"] = "moonwalking";
    CHECK_THROWS_AS(parse_str(rec2.dump() + "\n", Flavor::jaad), DataError);
}

TEST_CASE("non-monotone frames are a data error") {
    std::string text = base_record(Flavor::jaad, "a", 5).dump() + "\n" +
                       base_record(Flavor::jaad, "a", 5).dump() + "\n";
    CHECK_THROWS_AS(parse_str(text, Flavor::jaad), DataError);

    std::string text2 = base_record(Flavor::jaad, "a", 5).dump() + "\n" +
                        base_record(Flavor::jaad, "a", 3).dump() + "\n";
    CHECK_THROWS_AS(parse_str(text2, Flavor::jaad), DataError);
}

TEST_CASE("lane_count below one is a data error") {
    json rec = base_record(Flavor::jaad, "a", 0);
    rec["environment"]["lane_count"] = 0;
    CHECK_THROWS_AS(parse_str(rec.dump() + "\n", Flavor::jaad), DataError);
}

TEST_CASE("writer output round-trips through the parser for both flavors") {
    for (Flavor flavor : {Flavor::jaad, Flavor::pie}) {
        auto ds = generate_dataset(12, ScenarioRule::default_rule(flavor, 0.1), 5);
        std::ostringstream out;
        write_annotations(out, ds.train, flavor);
        auto parsed = parse_str(out.str(), flavor);
        REQUIRE(parsed.size() == ds.train.size());
        for (size_t i = 0; i < parsed.size(); ++i) {
            CHECK(parsed[i].pedestrian_id == ds.train[i].pedestrian_id);
            CHECK(parsed[i].label == ds.train[i].label);
            CHECK(parsed[i].event_frame == ds.train[i].event_frame);
            REQUIRE(parsed[i].frames.size() == ds.train[i].frames.size());
            for (size_t f = 0; f < parsed[i].frames.size(); ++f) {
                const auto& got = parsed[i].frames[f];
                const auto& want = ds.train[i].frames[f];
                CHECK(got.motion_state == want.motion_state);
                CHECK(got.gaze_state == want.gaze_state);
                CHECK(got.hand_gesture == want.hand_gesture);
                CHECK(got.bbox == want.bbox);
                CHECK(got.vehicle_speed == want.vehicle_speed);
                CHECK(got.stop_sign == want.stop_sign);
                CHECK(got.signage_type == want.signage_type);
            }
        }
    }
}

TEST_CASE("code tables round-trip and follow the first-listed-is-zero convention") {
    const auto& ms = code_table(Flavor::jaad, "motion_state");
    CHECK(ms.encode("standing") == 0);
    CHECK(ms.encode("walking") == 1);
    for (Flavor flavor : {Flavor::jaad, Flavor::pie}) {
        for (const auto& table : all_code_tables(flavor)) {
            for (size_t i = 0; i < table.values.size(); ++i) {
                CHECK(table.encode(table.values[i]) == static_cast<int>(i));
                CHECK(table.decode(static_cast<int>(i)) == table.values[i]);
            }
        }
    }
}

TEST_CASE("every attribute appears in exactly one context with the paper's widths") {
    CHECK(p_width(Flavor::jaad) == 5);
    CHECK(p_width(Flavor::pie) == 4);
    CHECK(l_width() == 4);
    CHECK(v_width() == 1);
    CHECK(e_width(Flavor::jaad) == 8);
    CHECK(e_width(Flavor::pie) == 7);
    for (Flavor flavor : {Flavor::jaad, Flavor::pie}) {
        auto p = behavior_attributes(flavor);
        auto e = environment_attributes(flavor);
        for (const auto& attr : p)
            CHECK(std::find(e.begin(), e.end(), attr) == e.end());
    }
}

// ---- fit_normalizer / encode_clip ----

namespace {
RawClip clip_with_speeds(const std::vector<double>& speeds) {
    RawClip clip;
    clip.label = 0;
    clip.tte_frames = 30;
    for (size_t i = 0; i < speeds.size(); ++i) {
        FrameAnnotation fa;
        fa.frame_index = static_cast<int64_t>(i);
        fa.bbox = {100 + double(i), 200, 150 + double(i), 300};
        fa.vehicle_speed = speeds[i];
        fa.head_nod = 1;
        fa.road_type = 0;
        clip.frames.push_back(fa);
    }
    return clip;
}
}  // namespace

TEST_CASE("fit_normalizer flags constants and uses population std") {
    auto constant = fit_normalizer({clip_with_speeds({5, 5, 5, 5})}, Flavor::jaad);
    CHECK(constant.continuous[4].mean == doctest::Approx(5.0));
    CHECK(constant.continuous[4].constant);

    auto split = fit_normalizer({clip_with_speeds({0, 10, 0, 10})}, Flavor::jaad);
    CHECK(split.continuous[4].mean == doctest::Approx(5.0));
    CHECK(split.continuous[4].stddev == doctest::Approx(5.0));
    CHECK(!split.continuous[4].constant);

    CHECK_THROWS_AS(fit_normalizer({}, Flavor::jaad), ContractError);
}

TEST_CASE("encode produces flavor shapes and no clamping outside three sigma") {
    auto ds = generate_dataset(10, ScenarioRule::default_rule(Flavor::jaad, 0.0), 3);
    SamplerConfig sc;
    auto raw = sample_clips(ds.train, sc);
    REQUIRE(!raw.empty());
    auto schema = fit_normalizer(raw, Flavor::jaad);
    auto clip = encode_clip(raw[0], schema);
    CHECK(clip.p.size() == 16 * 5);
    CHECK(clip.l.size() == 16 * 4);
    CHECK(clip.v.size() == 16 * 1);
    CHECK(clip.e.size() == 16 * 8);

    // test features normalized with train stats may fall outside [-3,3]
    RawClip outlier = raw[0];
    for (auto& fa : outlier.frames) fa.vehicle_speed = 1e4;
    auto extreme = encode_clip(outlier, schema);
    CHECK(extreme.v[0] > 3.0);
}

TEST_CASE("PIE encode widths") {
    auto ds = generate_dataset(10, ScenarioRule::default_rule(Flavor::pie, 0.0), 4);
    auto raw = sample_clips(ds.train, SamplerConfig{});
    REQUIRE(!raw.empty());
    auto schema = fit_normalizer(raw, Flavor::pie);
    auto clip = encode_clip(raw[0], schema);
    CHECK(clip.p.size() == 16 * 4);
    CHECK(clip.e.size() == 16 * 7);
}

TEST_CASE("categorical codes pass through as reals, standing is zero walking is one") {
    RawClip clip = clip_with_speeds({1, 2});
    clip.frames[0].motion_state = 0;  // standing
    clip.frames[1].motion_state = 1;  // walking
    auto schema = fit_normalizer({clip}, Flavor::jaad);
    auto enc = encode_clip(clip, schema);
    CHECK(enc.p[0 * 5 + 0] == 0.0);
    CHECK(enc.p[1 * 5 + 0] == 1.0);
}
