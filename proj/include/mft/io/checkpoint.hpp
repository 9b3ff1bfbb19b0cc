#pragma once

#include <string>

#include "mft/model/mft.hpp"

namespace mft {

// Binary checkpoint: 8-byte magic "MFTCKPT1", u32 little-endian header
// length, JSON header (format version, model config, encoding schema with
// normalization stats and code tables, named-tensor table of
// name/shape/offset), then the payload of row-major 32-bit little-endian
// values concatenated in table order. Round-trips are bitwise exact.
struct Checkpoint {
    MFTConfig config;
    EncodingSchema schema;
    MFTParameters<float> params;
};

void save_checkpoint(const std::string& path, const MFTConfig& cfg,
                     const MFTParameters<float>& params, const EncodingSchema& schema);

Checkpoint load_checkpoint(const std::string& path);

// Loads parameter values into an existing model; the stored config must
// match the model's config exactly or this throws ConfigError.
void load_parameters_into(const std::string& path, MFTModelT<float>& model);

}  // namespace mft
