#include "ausn/container.hpp"

#include <nlohmann/json.hpp>

#include <cstring>
#include <fstream>

#include "ausn/packing.hpp"
#include "ausn/version.hpp"

namespace ausn {

namespace {

using nlohmann::json;

json metadata_for(const QuantizedTensor& qt) {
    json meta;
    meta["layout"] = {{"total_bits", qt.layout.total_bits},
                      {"b_basic", qt.layout.b_basic},
                      {"tier_bits", qt.layout.tier_bits}};
    meta["shape"] = qt.shape;
    meta["power_j"] = qt.power_j;
    meta["count"] = qt.codes.size();
    meta["mode"] = qt.mode == RoundingMode::floor ? "floor" : "nearest";
    meta["creator"] = std::string("ausn ") + kVersion;
    if (qt.origin_stats) {
        meta["origin_stats"] = {{"count", qt.origin_stats->count},
                                {"min", qt.origin_stats->min},
                                {"max", qt.origin_stats->max},
                                {"std", qt.origin_stats->std_dev}};
    }
    return meta;
}

}  // namespace

void save_container(const std::filesystem::path& path, const QuantizedTensor& qt) {
    const std::string meta = metadata_for(qt).dump();
    const std::vector<std::uint8_t> payload = pack(qt.codes, qt.layout);

    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot write " + path.string());
    }
    out.write(kContainerMagic, 4);
    out.put(static_cast<char>(kContainerVersion));
    const std::uint32_t len = static_cast<std::uint32_t>(meta.size());
    char len_bytes[4];
    for (int i = 0; i < 4; ++i) len_bytes[i] = static_cast<char>((len >> (8 * i)) & 0xff);
    out.write(len_bytes, 4);
    out.write(meta.data(), static_cast<std::streamsize>(meta.size()));
    out.write(reinterpret_cast<const char*>(payload.data()),
              static_cast<std::streamsize>(payload.size()));
}

QuantizedTensor load_container(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot open " + path.string());
    }
    std::vector<char> bytes((std::istreambuf_iterator<char>(in)),
                            std::istreambuf_iterator<char>());
    if (bytes.size() < 9 || std::memcmp(bytes.data(), kContainerMagic, 4) != 0) {
        throw std::runtime_error(path.string() + ": bad magic");
    }
    const std::uint8_t version = static_cast<std::uint8_t>(bytes[4]);
    if (version > kContainerVersion) {
        throw std::runtime_error(path.string() + ": unsupported container version " +
                                 std::to_string(version));
    }
    std::uint32_t meta_len = 0;
    for (int i = 0; i < 4; ++i) {
        meta_len |= static_cast<std::uint32_t>(static_cast<unsigned char>(bytes[5 + i]))
                    << (8 * i);
    }
    if (bytes.size() < 9 + static_cast<std::size_t>(meta_len)) {
        throw std::runtime_error(path.string() + ": truncated metadata");
    }

    json meta;
    try {
        meta = json::parse(bytes.begin() + 9, bytes.begin() + 9 + meta_len);
    } catch (const json::exception& e) {
        throw std::runtime_error(path.string() + ": metadata is not valid JSON: " + e.what());
    }

    QuantizedTensor qt;
    try {
        qt.layout = make_layout(meta.at("layout").at("total_bits").get<int>(),
                                meta.at("layout").at("b_basic").get<int>(),
                                meta.at("layout").at("tier_bits").get<std::vector<int>>(),
                                kMaxFieldCount - 1);
        qt.shape = meta.at("shape").get<std::vector<std::size_t>>();
        qt.power_j = meta.at("power_j").get<int>();
        qt.mode = meta.at("mode").get<std::string>() == "nearest" ? RoundingMode::nearest
                                                                  : RoundingMode::floor;
        if (meta.contains("origin_stats")) {
            TensorStats stats;
            stats.count = meta["origin_stats"].at("count").get<std::size_t>();
            stats.min = meta["origin_stats"].at("min").get<double>();
            stats.max = meta["origin_stats"].at("max").get<double>();
            stats.std_dev = meta["origin_stats"].at("std").get<double>();
            qt.origin_stats = stats;
        }
    } catch (const json::exception& e) {
        throw std::runtime_error(path.string() + ": metadata field error: " + e.what());
    }

    const std::size_t count = meta.at("count").get<std::size_t>();
    std::size_t expected = 1;
    for (std::size_t d : qt.shape) expected *= d;
    if (expected != count) {
        throw std::runtime_error(path.string() + ": element count disagrees with shape");
    }
    const std::size_t payload_bytes =
        (count * static_cast<std::size_t>(qt.layout.total_bits) + 7) / 8;
    if (bytes.size() - 9 - meta_len != payload_bytes) {
        throw std::runtime_error(path.string() + ": payload length disagrees with metadata");
    }

    const auto* payload = reinterpret_cast<const std::uint8_t*>(bytes.data()) + 9 + meta_len;
    qt.codes = unpack(std::span<const std::uint8_t>(payload, payload_bytes), count, qt.layout);
    return qt;
}

}  // namespace ausn
