#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "repaint/tensor.hpp"

namespace repaint {

/// Tensor file layout, little-endian:
///   "RPTN" | u32 version = 1 | u64 rank | u64 shape[rank] | f64 data (row-major)
std::vector<std::uint8_t> encode_tensor(const Tensor& tensor);
Tensor decode_tensor(const std::vector<std::uint8_t>& bytes);

void save_tensor(const std::filesystem::path& path, const Tensor& tensor);
Tensor load_tensor(const std::filesystem::path& path);

}  // namespace repaint
