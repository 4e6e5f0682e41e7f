#pragma once

#include <filesystem>

#include "json.hpp"
#include "rollcall/nd/optim.hpp"

namespace rollcall::nd {

// Checkpoint = <prefix>.bin (tensors concatenated as little-endian float64 in
// name order) + <prefix>.json manifest: {version, tensors: [{name, shape,
// offset}], meta}. Offsets are byte positions into the .bin file.
inline constexpr const char* kCheckpointVersion = "rollcall.ckpt.v1";

void save_checkpoint(const ParamStore& params, const std::filesystem::path& prefix,
                     const nlohmann::json& meta);

// Loads tensors; masks are not persisted (callers re-derive them from the
// model configuration). `meta_out` may be nullptr.
ParamStore load_checkpoint(const std::filesystem::path& prefix, nlohmann::json* meta_out);

}  // namespace rollcall::nd
