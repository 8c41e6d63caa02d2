#pragma once

#include "nn/param_store.hpp"

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace flexmesh::nn {

using NamedArrays = std::vector<std::pair<std::string, Matrix>>;

/// Binary checkpoint layout (all integers and floats little-endian):
///   "FLXMCKPT" | u32 version | u32 count
///   count x { u32 name_len | name | u32 rank(=2) | u64 rows | u64 cols |
///             rows*cols f64, row-major }
inline constexpr std::uint32_t kCheckpointVersion = 1;

void save_checkpoint(const std::filesystem::path& path, const NamedArrays& arrays);
NamedArrays load_checkpoint(const std::filesystem::path& path);

const Matrix& find_array(const NamedArrays& arrays, const std::string& name);

} // namespace flexmesh::nn
