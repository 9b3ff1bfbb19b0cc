#include "mft/io/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>

#include "json.hpp"
#include "mft/io/run_config.hpp"

namespace mft {

namespace {

static_assert(std::endian::native == std::endian::little,
              "checkpoint payload is little-endian; big-endian hosts need byte swaps");

constexpr char kMagic[8] = {'M', 'F', 'T', 'C', 'K', 'P', 'T', '1'};
constexpr uint32_t kFormatVersion = 1;

}  // namespace

void save_checkpoint(const std::string& path, const MFTConfig& cfg,
                     const MFTParameters<float>& params, const EncodingSchema& schema) {
    nlohmann::json header;
    header["format_version"] = kFormatVersion;
    header["config"] = model_config_to_json(cfg);
    header["schema"] = schema_to_json(schema);
    nlohmann::json tensors = nlohmann::json::array();
    size_t offset = 0;
    for (const auto& [name, t] : params.named) {
        nlohmann::json entry;
        entry["name"] = name;
        entry["rows"] = t.rows();
        entry["cols"] = t.cols();
        entry["offset"] = offset;
        tensors.push_back(entry);
        offset += t.size();
    }
    header["tensors"] = tensors;
    const std::string header_str = header.dump();

    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write checkpoint '" + path + "'");
    out.write(kMagic, sizeof(kMagic));
    const uint32_t header_len = static_cast<uint32_t>(header_str.size());
    out.write(reinterpret_cast<const char*>(&header_len), sizeof(header_len));
    out.write(header_str.data(), static_cast<std::streamsize>(header_str.size()));
    for (const auto& [name, t] : params.named)
        out.write(reinterpret_cast<const char*>(t.data()),
                  static_cast<std::streamsize>(t.size() * sizeof(float)));
    if (!out) throw DataError("failed writing checkpoint '" + path + "'");
}

Checkpoint load_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open checkpoint '" + path + "'");
    char magic[8];
    in.read(magic, sizeof(magic));
    if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
        throw DataError("'" + path + "' is not an MFT checkpoint");
    uint32_t header_len = 0;
    in.read(reinterpret_cast<char*>(&header_len), sizeof(header_len));
    std::string header_str(header_len, '\0');
    in.read(header_str.data(), header_len);
    if (!in) throw DataError("truncated checkpoint header in '" + path + "'");

    nlohmann::json header;
    try {
        header = nlohmann::json::parse(header_str);
    } catch (const nlohmann::json::exception& e) {
        throw DataError("corrupt checkpoint header: " + std::string(e.what()));
    }
    if (header.at("format_version").get<uint32_t>() != kFormatVersion)
        throw DataError("unsupported checkpoint format version");

    Checkpoint ck;
    ck.config = model_config_from_json(header.at("config"));
    ck.schema = schema_from_json(header.at("schema"));

    // rebuild the structured parameter set, then fill values from the payload
    MFTModelT<float> skeleton(ck.config, /*init_seed=*/0);
    ck.params = skeleton.params();
    const auto& tensors = header.at("tensors");
    if (tensors.size() != ck.params.named.size())
        throw DataError("checkpoint tensor table does not match config (" +
                        std::to_string(tensors.size()) + " vs " +
                        std::to_string(ck.params.named.size()) + " tensors)");
    for (size_t i = 0; i < tensors.size(); ++i) {
        auto& [name, t] = ck.params.named[i];
        const auto& entry = tensors[i];
        if (entry.at("name").get<std::string>() != name ||
            entry.at("rows").get<size_t>() != t.rows() ||
            entry.at("cols").get<size_t>() != t.cols())
            throw DataError("checkpoint tensor '" + entry.at("name").get<std::string>() +
                            "' does not match config layout");
        in.read(reinterpret_cast<char*>(t.data()),
                static_cast<std::streamsize>(t.size() * sizeof(float)));
        if (!in) throw DataError("truncated checkpoint payload in '" + path + "'");
    }
    return ck;
}

void load_parameters_into(const std::string& path, MFTModelT<float>& model) {
    Checkpoint ck = load_checkpoint(path);
    if (model_config_to_json(ck.config) != model_config_to_json(model.config()))
        throw ConfigError("checkpoint config does not match the loading model's config");
    for (size_t i = 0; i < ck.params.named.size(); ++i)
        model.params().named[i].second.values() = ck.params.named[i].second.values();
}

}  // namespace mft
