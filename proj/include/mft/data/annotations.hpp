#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "mft/data/schema.hpp"

namespace mft {

// One annotated frame of one pedestrian. Categorical attributes are stored
// as integer codes resolved against the flavor's code tables at parse time;
// attributes a flavor does not define are -1.
struct FrameAnnotation {
    int64_t frame_index = 0;

    // behavior
    int motion_state = 0;
    int gaze_state = 0;
    int head_nod = -1;  // JAAD only
    int hand_gesture = 0;
    int motion_direction = 0;

    std::array<double, 4> bbox{};  // x1, y1, x2, y2 in pixels
    double vehicle_speed = 0.0;

    // environment
    int lane_count = 1;
    bool intersection = false;
    bool crosswalk = false;
    int traffic_light = 0;
    int traffic_direction = 0;
    int road_type = -1;  // JAAD only
    bool stop_sign = false;
    int signage_type = 0;
};

struct PedestrianTrack {
    std::string pedestrian_id;
    std::vector<FrameAnnotation> frames;  // strictly increasing frame_index
    int64_t event_frame = 0;              // crossing initiation / last observable frame
    int label = 0;                        // crossing behavior, 0 or 1
    int frame_w = 0;
    int frame_h = 0;
};

// Parses line-delimited JSON annotation records (one frame per line, schema
// in docs/annotation_schema.md) into per-pedestrian tracks. Tracks come out
// in first-seen order with frames in input order, which must be strictly
// increasing per pedestrian.
//
// Throws ParseError (malformed JSON, with line number), SchemaError (missing
// or flavor-inappropriate fields, unknown keys) or DataError (invariant
// violations, unknown categorical values), all carrying line context.
std::vector<PedestrianTrack> parse_annotations(std::istream& in, Flavor flavor);
std::vector<PedestrianTrack> parse_annotations_file(const std::string& path, Flavor flavor);

// Serializes tracks to the same JSONL schema the parser consumes.
void write_annotations(std::ostream& out, const std::vector<PedestrianTrack>& tracks,
                       Flavor flavor);
void write_annotations_file(const std::string& path, const std::vector<PedestrianTrack>& tracks,
                            Flavor flavor);

}  // namespace mft
