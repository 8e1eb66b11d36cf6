#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "repaint/tensor.hpp"

namespace repaint {

// Interleaved 8-bit pixels, channels 1 (gray) or 3 (RGB).
struct Image8 {
  std::size_t width = 0;
  std::size_t height = 0;
  std::size_t channels = 1;
  std::vector<std::uint8_t> pixels;
};

// bit_depth 1 is allowed for gray images whose pixels are 0 or 255.
// Encoder settings are fixed so identical images give identical bytes.
void write_png(const std::filesystem::path& path, const Image8& image, int bit_depth = 8);
// Expands to 8 bits per channel; drops alpha; palette images become RGB.
Image8 read_png(const std::filesystem::path& path);

/// Tile samples [n, c, h, w] (c = 1 or 3) or [n, h, w] into a grid PNG.
/// Values map linearly from [lo, hi] to [0, 255], clamped and rounded.
void save_image_grid(const Tensor& samples, const std::filesystem::path& path, double lo, double hi,
                     std::size_t columns = 0);

// The grid as 8-bit pixels, without writing.
Image8 render_image_grid(const Tensor& samples, double lo, double hi, std::size_t columns = 0);

}  // namespace repaint
