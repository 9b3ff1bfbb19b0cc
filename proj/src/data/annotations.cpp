#include "mft/data/annotations.hpp"

#include <fstream>
#include <map>
#include <sstream>

#include "json.hpp"

namespace mft {

namespace {

using nlohmann::json;

void expect_keys(const json& obj, const std::vector<std::string>& allowed,
                 const std::string& where, size_t line_no) {
    for (const auto& [key, _] : obj.items()) {
        bool known = false;
        for (const auto& a : allowed)
            if (key == a) known = true;
        if (!known)
            throw SchemaError("line " + std::to_string(line_no) + ": unexpected field '" + key +
                              "' in " + where);
    }
}

const json& require(const json& obj, const std::string& key, const std::string& where,
                    size_t line_no) {
    auto it = obj.find(key);
    if (it == obj.end())
        throw SchemaError("line " + std::to_string(line_no) + ": missing field '" + key +
                          "' in " + where);
    return *it;
}

int encode_field(Flavor flavor, const json& obj, const std::string& key,
                 const std::string& where, const std::string& ped, int64_t frame,
                 size_t line_no) {
    const json& v = require(obj, key, where, line_no);
    if (!v.is_string())
        throw SchemaError("line " + std::to_string(line_no) + ": field '" + key +
                          "' must be a string");
    try {
        return code_table(flavor, key).encode(v.get<std::string>());
    } catch (const DataError& e) {
        throw DataError("line " + std::to_string(line_no) + " (pedestrian " + ped + ", frame " +
                        std::to_string(frame) + "): " + e.what());
    }
}

FrameAnnotation parse_record(const json& rec, Flavor flavor, std::string& ped_id,
                             int64_t& event_frame, int& label, int& frame_w, int& frame_h,
                             size_t line_no) {
    expect_keys(rec,
                {"ped_id", "frame", "bbox", "speed", "behavior", "environment", "event_frame",
                 "label", "frame_w", "frame_h"},
                "record", line_no);

    ped_id = require(rec, "ped_id", "record", line_no).get<std::string>();
    FrameAnnotation fa;
    fa.frame_index = require(rec, "frame", "record", line_no).get<int64_t>();
    event_frame = require(rec, "event_frame", "record", line_no).get<int64_t>();
    label = require(rec, "label", "record", line_no).get<int>();
    if (label != 0 && label != 1)
        throw DataError("line " + std::to_string(line_no) + ": label must be 0 or 1");
    frame_w = require(rec, "frame_w", "record", line_no).get<int>();
    frame_h = require(rec, "frame_h", "record", line_no).get<int>();

    const json& bbox = require(rec, "bbox", "record", line_no);
    if (!bbox.is_array() || bbox.size() != 4)
        throw SchemaError("line " + std::to_string(line_no) + ": bbox must be [x1,y1,x2,y2]");
    for (size_t i = 0; i < 4; ++i) fa.bbox[i] = bbox[i].get<double>();
    if (!(fa.bbox[0] < fa.bbox[2]) || !(fa.bbox[1] < fa.bbox[3]))
        throw DataError("line " + std::to_string(line_no) + " (pedestrian " + ped_id +
                        ", frame " + std::to_string(fa.frame_index) +
                        "): bbox requires x1 < x2 and y1 < y2");
    fa.vehicle_speed = require(rec, "speed", "record", line_no).get<double>();

    const json& beh = require(rec, "behavior", "record", line_no);
    {
        std::vector<std::string> allowed = behavior_attributes(flavor);
        expect_keys(beh, allowed, "behavior", line_no);
        fa.motion_state =
            encode_field(flavor, beh, "motion_state", "behavior", ped_id, fa.frame_index, line_no);
        fa.gaze_state =
            encode_field(flavor, beh, "gaze_state", "behavior", ped_id, fa.frame_index, line_no);
        if (flavor == Flavor::jaad)
            fa.head_nod =
                encode_field(flavor, beh, "head_nod", "behavior", ped_id, fa.frame_index, line_no);
        fa.hand_gesture = encode_field(flavor, beh, "hand_gesture", "behavior", ped_id,
                                       fa.frame_index, line_no);
        fa.motion_direction = encode_field(flavor, beh, "motion_direction", "behavior", ped_id,
                                           fa.frame_index, line_no);
    }

    const json& env = require(rec, "environment", "record", line_no);
    {
        std::vector<std::string> allowed = environment_attributes(flavor);
        if (flavor == Flavor::pie) {
            // stop_sign is derived for PIE, never supplied
            allowed.erase(std::find(allowed.begin(), allowed.end(), "stop_sign"));
        }
        expect_keys(env, allowed, "environment", line_no);
        fa.lane_count = require(env, "lane_count", "environment", line_no).get<int>();
        if (fa.lane_count < 1)
            throw DataError("line " + std::to_string(line_no) + " (pedestrian " + ped_id +
                            ", frame " + std::to_string(fa.frame_index) +
                            "): lane_count must be >= 1");
        fa.intersection = require(env, "intersection", "environment", line_no).get<bool>();
        fa.crosswalk = require(env, "crosswalk", "environment", line_no).get<bool>();
        fa.traffic_light = encode_field(flavor, env, "traffic_light", "environment", ped_id,
                                        fa.frame_index, line_no);
        fa.traffic_direction = encode_field(flavor, env, "traffic_direction", "environment",
                                            ped_id, fa.frame_index, line_no);
        fa.signage_type = encode_field(flavor, env, "signage_type", "environment", ped_id,
                                       fa.frame_index, line_no);
        if (flavor == Flavor::jaad) {
            fa.road_type = encode_field(flavor, env, "road_type", "environment", ped_id,
                                        fa.frame_index, line_no);
            fa.stop_sign = require(env, "stop_sign", "environment", line_no).get<bool>();
        } else {
            fa.stop_sign =
                fa.signage_type == code_table(flavor, "signage_type").encode("stop");
        }
    }
    return fa;
}

}  // namespace

std::vector<PedestrianTrack> parse_annotations(std::istream& in, Flavor flavor) {
    std::vector<PedestrianTrack> tracks;
    std::map<std::string, size_t> index_by_id;

    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        json rec;
        try {
            rec = json::parse(line);
        } catch (const json::exception& e) {
            throw ParseError("line " + std::to_string(line_no) + ": " + e.what());
        }
        if (!rec.is_object())
            throw ParseError("line " + std::to_string(line_no) + ": record must be a JSON object");

        std::string ped_id;
        int64_t event_frame = 0;
        int label = 0, frame_w = 0, frame_h = 0;
        FrameAnnotation fa;
        try {
            fa = parse_record(rec, flavor, ped_id, event_frame, label, frame_w, frame_h, line_no);
        } catch (const json::exception& e) {
            throw SchemaError("line " + std::to_string(line_no) + ": " + e.what());
        }

        auto [it, inserted] = index_by_id.try_emplace(ped_id, tracks.size());
        if (inserted) {
            PedestrianTrack track;
            track.pedestrian_id = ped_id;
            track.event_frame = event_frame;
            track.label = label;
            track.frame_w = frame_w;
            track.frame_h = frame_h;
            tracks.push_back(std::move(track));
        }
        PedestrianTrack& track = tracks[it->second];
        if (track.event_frame != event_frame || track.label != label ||
            track.frame_w != frame_w || track.frame_h != frame_h)
            throw DataError("line " + std::to_string(line_no) + ": pedestrian " + ped_id +
                            " has inconsistent track-level fields");
        if (!track.frames.empty() && fa.frame_index <= track.frames.back().frame_index)
            throw DataError("line " + std::to_string(line_no) + ": pedestrian " + ped_id +
                            " frames not strictly increasing (" +
                            std::to_string(track.frames.back().frame_index) + " then " +
                            std::to_string(fa.frame_index) + ")");
        track.frames.push_back(fa);
    }
    return tracks;
}

std::vector<PedestrianTrack> parse_annotations_file(const std::string& path, Flavor flavor) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open annotation file '" + path + "'");
    return parse_annotations(in, flavor);
}

void write_annotations(std::ostream& out, const std::vector<PedestrianTrack>& tracks,
                       Flavor flavor) {
    for (const auto& track : tracks) {
        for (const auto& fa : track.frames) {
            json beh;
            beh["motion_state"] = code_table(flavor, "motion_state").decode(fa.motion_state);
            beh["gaze_state"] = code_table(flavor, "gaze_state").decode(fa.gaze_state);
            if (flavor == Flavor::jaad)
                beh["head_nod"] = code_table(flavor, "head_nod").decode(fa.head_nod);
            beh["hand_gesture"] = code_table(flavor, "hand_gesture").decode(fa.hand_gesture);
            beh["motion_direction"] =
                code_table(flavor, "motion_direction").decode(fa.motion_direction);

            json env;
            env["lane_count"] = fa.lane_count;
            env["intersection"] = fa.intersection;
            env["crosswalk"] = fa.crosswalk;
            env["traffic_light"] = code_table(flavor, "traffic_light").decode(fa.traffic_light);
            env["traffic_direction"] =
                code_table(flavor, "traffic_direction").decode(fa.traffic_direction);
            env["signage_type"] = code_table(flavor, "signage_type").decode(fa.signage_type);
            if (flavor == Flavor::jaad) {
                env["road_type"] = code_table(flavor, "road_type").decode(fa.road_type);
                env["stop_sign"] = fa.stop_sign;
            }

            json rec;
            rec["ped_id"] = track.pedestrian_id;
            rec["frame"] = fa.frame_index;
            rec["bbox"] = fa.bbox;
            rec["speed"] = fa.vehicle_speed;
            rec["behavior"] = beh;
            rec["environment"] = env;
            rec["event_frame"] = track.event_frame;
            rec["label"] = track.label;
            rec["frame_w"] = track.frame_w;
            rec["frame_h"] = track.frame_h;
            out << rec.dump() << "\n";
        }
    }
}

void write_annotations_file(const std::string& path, const std::vector<PedestrianTrack>& tracks,
                            Flavor flavor) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write annotation file '" + path + "'");
    write_annotations(out, tracks, flavor);
}

}  // namespace mft
