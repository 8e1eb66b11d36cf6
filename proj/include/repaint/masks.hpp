#pragma once

#include <cstdint>
#include <filesystem>
#include <string_view>
#include <vector>

#include "repaint/tensor.hpp"

namespace repaint {

enum class MaskFamily { Half, Expand, AlternatingLines, SuperResolution, Wide, Narrow };

std::string_view to_string(MaskFamily family);
MaskFamily parse_mask_family(std::string_view text);

struct MaskProvenance {
  MaskFamily family = MaskFamily::Half;
  std::uint64_t seed = 0;
  int parameter = 0;  // crop for Expand, stride for SuperResolution
  int attempts = 0;   // brush regenerations used
};

/// Binary known/unknown bitmap over an h x w grid; 1 = known. All channels
/// of an image share the bitmap.
class Mask {
 public:
  Mask(std::size_t height, std::size_t width, std::vector<std::uint8_t> bits, MaskProvenance provenance = {});

  std::size_t height() const { return height_; }
  std::size_t width() const { return width_; }
  bool known(std::size_t row, std::size_t col) const { return bits_[row * width_ + col] != 0; }
  const std::vector<std::uint8_t>& bits() const { return bits_; }
  const MaskProvenance& provenance() const { return provenance_; }

  std::size_t known_count() const;
  double known_fraction() const;
  double unknown_fraction() const { return 1.0 - known_fraction(); }

  // Shape [channels, h, w], entries 0.0 / 1.0.
  Tensor to_tensor(std::size_t channels = 1) const;

  // FNV-1a over (h, w, bits).
  std::uint64_t hash() const;

  friend bool operator==(const Mask& a, const Mask& b) {
    return a.height_ == b.height_ && a.width_ == b.width_ && a.bits_ == b.bits_;
  }

 private:
  std::size_t height_;
  std::size_t width_;
  std::vector<std::uint8_t> bits_;
  MaskProvenance provenance_;
};

// Columns [0, w/2) known.
Mask mask_half(std::size_t height, std::size_t width);
// Centered crop x crop known, offset floor((dim - crop) / 2).
Mask mask_expand(std::size_t height, std::size_t width, std::size_t crop);
// Even rows (0-based) known.
Mask mask_alternating_lines(std::size_t height, std::size_t width);
// Pixels (i*stride, j*stride) known.
Mask mask_super_resolution(std::size_t height, std::size_t width, std::size_t stride);

enum class BrushKind { Wide, Narrow };

/// Seeded polyline brush. Widths and segment lengths are fractions of the
/// shorter / longer image side. Coverage is the unknown fraction; a mask
/// outside [coverage_lo, coverage_hi] is redrawn, up to max_attempts times.
struct BrushParams {
  int min_strokes;
  int max_strokes;
  double min_width;
  double max_width;
  int min_vertices;
  int max_vertices;
  double max_segment;
  double coverage_lo;
  double coverage_hi;
  int max_attempts = 100;
};

BrushParams default_brush_params(BrushKind kind);

Mask mask_brush(std::size_t height, std::size_t width, BrushKind kind, std::uint64_t seed);
Mask mask_brush(std::size_t height, std::size_t width, BrushKind kind, std::uint64_t seed,
                const BrushParams& params);

/// 1-bit grayscale PNG: black = unknown, white = known.
void save_mask_png(const Mask& mask, const std::filesystem::path& path);
/// Accepts any grayscale PNG; pixels >= 128 are known.
Mask load_mask_png(const std::filesystem::path& path);

}  // namespace repaint
