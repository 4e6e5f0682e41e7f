#include "rollcall/nd/checkpoint.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "rollcall/util/io.hpp"

namespace rollcall::nd {

namespace {

void write_f64_le(std::ostream& os, double v) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, sizeof(bits));
    unsigned char buf[8];
    for (int i = 0; i < 8; ++i) buf[i] = static_cast<unsigned char>((bits >> (8 * i)) & 0xff);
    os.write(reinterpret_cast<const char*>(buf), 8);
}

double read_f64_le(std::istream& is) {
    unsigned char buf[8];
    is.read(reinterpret_cast<char*>(buf), 8);
    if (!is) throw std::runtime_error("checkpoint: truncated tensor data");
    std::uint64_t bits = 0;
    for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(buf[i]) << (8 * i);
    double v;
    std::memcpy(&v, &bits, sizeof(v));
    return v;
}

}  // namespace

void save_checkpoint(const ParamStore& params, const std::filesystem::path& prefix,
                     const nlohmann::json& meta) {
    const auto bin_path = std::filesystem::path(prefix.string() + ".bin");
    const auto json_path = std::filesystem::path(prefix.string() + ".json");

    nlohmann::json manifest;
    manifest["version"] = kCheckpointVersion;
    manifest["tensors"] = nlohmann::json::array();

    std::ostringstream blob(std::ios::binary);
    std::size_t offset = 0;
    for (const auto& [name, tensor] : params.tensors()) {
        nlohmann::json entry;
        entry["name"] = name;
        entry["shape"] = tensor.shape();
        entry["offset"] = offset;
        manifest["tensors"].push_back(entry);
        for (std::size_t i = 0; i < tensor.size(); ++i) write_f64_le(blob, tensor[i]);
        offset += tensor.size() * 8;
    }
    manifest["meta"] = meta;

    util::atomic_write(bin_path, blob.str());
    util::atomic_write(json_path, manifest.dump(2) + "\n");
}

ParamStore load_checkpoint(const std::filesystem::path& prefix, nlohmann::json* meta_out) {
    const auto bin_path = std::filesystem::path(prefix.string() + ".bin");
    const auto json_path = std::filesystem::path(prefix.string() + ".json");

    nlohmann::json manifest = util::load_json(json_path);
    if (manifest.value("version", "") != kCheckpointVersion) {
        throw std::runtime_error("checkpoint: unsupported version in " + json_path.string());
    }
    std::ifstream bin(bin_path, std::ios::binary);
    if (!bin) throw std::runtime_error("checkpoint: cannot open " + bin_path.string());

    ParamStore params;
    for (const auto& entry : manifest.at("tensors")) {
        const std::string name = entry.at("name");
        const std::vector<std::size_t> shape = entry.at("shape");
        const std::size_t offset = entry.at("offset");
        bin.seekg(static_cast<std::streamoff>(offset));
        Tensor t(shape);
        for (std::size_t i = 0; i < t.size(); ++i) t[i] = read_f64_le(bin);
        params.add(name, std::move(t));
    }
    if (meta_out) *meta_out = manifest.value("meta", nlohmann::json::object());
    return params;
}

}  // namespace rollcall::nd
