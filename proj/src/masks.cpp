#include "repaint/masks.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "repaint/error.hpp"
#include "repaint/png_io.hpp"
#include "repaint/random.hpp"

namespace repaint {

std::string_view to_string(MaskFamily family) {
  switch (family) {
    case MaskFamily::Half:
      return "half";
    case MaskFamily::Expand:
      return "expand";
    case MaskFamily::AlternatingLines:
      return "alternating_lines";
    case MaskFamily::SuperResolution:
      return "super_resolution";
    case MaskFamily::Wide:
      return "wide";
    case MaskFamily::Narrow:
      return "narrow";
  }
  return "unknown";
}

MaskFamily parse_mask_family(std::string_view text) {
  for (auto f : {MaskFamily::Half, MaskFamily::Expand, MaskFamily::AlternatingLines, MaskFamily::SuperResolution,
                 MaskFamily::Wide, MaskFamily::Narrow}) {
    if (text == to_string(f)) return f;
  }
  throw ValueError("unknown mask family '" + std::string(text) + "'");
}

Mask::Mask(std::size_t height, std::size_t width, std::vector<std::uint8_t> bits, MaskProvenance provenance)
    : height_(height), width_(width), bits_(std::move(bits)), provenance_(provenance) {
  if (height_ == 0 || width_ == 0) throw ValueError("mask dimensions must be positive");
  if (bits_.size() != height_ * width_) throw ShapeError("mask bitmap size does not match dimensions");
  for (auto b : bits_) {
    if (b > 1) throw ValueError("mask bitmap must be binary");
  }
}

std::size_t Mask::known_count() const { return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), 1)); }

double Mask::known_fraction() const { return static_cast<double>(known_count()) / static_cast<double>(bits_.size()); }

Tensor Mask::to_tensor(std::size_t channels) const {
  Tensor out({channels, height_, width_});
  for (std::size_t c = 0; c < channels; ++c) {
    for (std::size_t i = 0; i < bits_.size(); ++i) out[c * bits_.size() + i] = bits_[i];
  }
  return out;
}

std::uint64_t Mask::hash() const {
  std::uint64_t h = 1469598103934665603ull;
  const auto mix = [&](std::uint64_t byte) {
    h ^= byte;
    h *= 1099511628211ull;
  };
  for (int i = 0; i < 8; ++i) mix((height_ >> (8 * i)) & 0xFF);
  for (int i = 0; i < 8; ++i) mix((width_ >> (8 * i)) & 0xFF);
  for (auto b : bits_) mix(b);
  return h;
}

namespace {

template <typename Known>
Mask make_mask(std::size_t height, std::size_t width, MaskProvenance provenance, Known known) {
  if (height == 0 || width == 0) throw ValueError("mask dimensions must be positive");
  std::vector<std::uint8_t> bits(height * width, 0);
  for (std::size_t r = 0; r < height; ++r) {
    for (std::size_t c = 0; c < width; ++c) bits[r * width + c] = known(r, c) ? 1 : 0;
  }
  return Mask(height, width, std::move(bits), provenance);
}

}  // namespace

Mask mask_half(std::size_t height, std::size_t width) {
  if (height < 1 || width < 2) throw ValueError("half mask needs h >= 1 and w >= 2");
  const std::size_t split = width / 2;
  return make_mask(height, width, {MaskFamily::Half}, [&](std::size_t, std::size_t c) { return c < split; });
}

Mask mask_expand(std::size_t height, std::size_t width, std::size_t crop) {
  if (crop == 0 || crop > std::min(height, width)) {
    throw ValueError("expand crop " + std::to_string(crop) + " must be in [1, min(h, w)]");
  }
  const std::size_t top = (height - crop) / 2;
  const std::size_t left = (width - crop) / 2;
  return make_mask(height, width, {MaskFamily::Expand, 0, static_cast<int>(crop)}, [&](std::size_t r, std::size_t c) {
    return r >= top && r < top + crop && c >= left && c < left + crop;
  });
}

Mask mask_alternating_lines(std::size_t height, std::size_t width) {
  if (height < 2 || width < 1) throw ValueError("alternating-lines mask needs h >= 2");
  return make_mask(height, width, {MaskFamily::AlternatingLines}, [](std::size_t r, std::size_t) { return r % 2 == 0; });
}

Mask mask_super_resolution(std::size_t height, std::size_t width, std::size_t stride) {
  if (stride < 2) throw ValueError("super-resolution stride must be >= 2");
  return make_mask(height, width, {MaskFamily::SuperResolution, 0, static_cast<int>(stride)},
                   [&](std::size_t r, std::size_t c) { return r % stride == 0 && c % stride == 0; });
}

BrushParams default_brush_params(BrushKind kind) {
  if (kind == BrushKind::Wide) {
    return {.min_strokes = 1,
            .max_strokes = 3,
            .min_width = 0.12,
            .max_width = 0.25,
            .min_vertices = 2,
            .max_vertices = 5,
            .max_segment = 0.4,
            .coverage_lo = 0.20,
            .coverage_hi = 0.50};
  }
  return {.min_strokes = 2,
          .max_strokes = 6,
          .min_width = 0.03,
          .max_width = 0.08,
          .min_vertices = 3,
          .max_vertices = 8,
          .max_segment = 0.3,
          .coverage_lo = 0.05,
          .coverage_hi = 0.20};
}

Mask mask_brush(std::size_t height, std::size_t width, BrushKind kind, std::uint64_t seed) {
  return mask_brush(height, width, kind, seed, default_brush_params(kind));
}

namespace {

// Mark every pixel within `radius` of segment (ax, ay)-(bx, by) as unknown.
void paint_segment(std::vector<std::uint8_t>& bits, std::size_t height, std::size_t width, double ax, double ay,
                   double bx, double by, double radius) {
  const double min_x = std::max(0.0, std::floor(std::min(ax, bx) - radius));
  const double max_x = std::min(static_cast<double>(width - 1), std::ceil(std::max(ax, bx) + radius));
  const double min_y = std::max(0.0, std::floor(std::min(ay, by) - radius));
  const double max_y = std::min(static_cast<double>(height - 1), std::ceil(std::max(ay, by) + radius));
  const double dx = bx - ax;
  const double dy = by - ay;
  const double len2 = dx * dx + dy * dy;
  for (auto y = static_cast<std::size_t>(min_y); y <= static_cast<std::size_t>(max_y); ++y) {
    for (auto x = static_cast<std::size_t>(min_x); x <= static_cast<std::size_t>(max_x); ++x) {
      const double px = static_cast<double>(x) - ax;
      const double py = static_cast<double>(y) - ay;
      const double s = len2 > 0.0 ? std::clamp((px * dx + py * dy) / len2, 0.0, 1.0) : 0.0;
      const double ex = px - s * dx;
      const double ey = py - s * dy;
      if (ex * ex + ey * ey <= radius * radius) bits[y * width + x] = 0;
    }
  }
}

}  // namespace

Mask mask_brush(std::size_t height, std::size_t width, BrushKind kind, std::uint64_t seed, const BrushParams& params) {
  if (height == 0 || width == 0) throw ValueError("mask dimensions must be positive");
  if (params.min_strokes < 1 || params.max_strokes < params.min_strokes || params.min_vertices < 2 ||
      params.max_vertices < params.min_vertices || !(params.min_width > 0.0) || params.max_width < params.min_width ||
      !(params.coverage_lo <= params.coverage_hi) || params.max_attempts < 1) {
    throw ValueError("invalid brush parameters");
  }
  const double short_side = static_cast<double>(std::min(height, width));
  const double long_side = static_cast<double>(std::max(height, width));
  const MaskFamily family = kind == BrushKind::Wide ? MaskFamily::Wide : MaskFamily::Narrow;

  Rng rng(seed);
  std::uniform_int_distribution<int> strokes_dist(params.min_strokes, params.max_strokes);
  std::uniform_int_distribution<int> vertex_dist(params.min_vertices, params.max_vertices);
  std::uniform_real_distribution<double> width_dist(params.min_width, params.max_width);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  for (int attempt = 1; attempt <= params.max_attempts; ++attempt) {
    std::vector<std::uint8_t> bits(height * width, 1);
    const int strokes = strokes_dist(rng);
    for (int s = 0; s < strokes; ++s) {
      const double radius = std::max(0.5, 0.5 * width_dist(rng) * short_side);
      double x = unit(rng) * static_cast<double>(width - 1);
      double y = unit(rng) * static_cast<double>(height - 1);
      const int vertices = vertex_dist(rng);
      for (int v = 1; v < vertices; ++v) {
        const double angle = 2.0 * std::numbers::pi * unit(rng);
        const double length = (0.1 + 0.9 * unit(rng)) * params.max_segment * long_side;
        const double nx = std::clamp(x + length * std::cos(angle), 0.0, static_cast<double>(width - 1));
        const double ny = std::clamp(y + length * std::sin(angle), 0.0, static_cast<double>(height - 1));
        paint_segment(bits, height, width, x, y, nx, ny, radius);
        x = nx;
        y = ny;
      }
    }
    Mask mask(height, width, std::move(bits), {family, seed, 0, attempt});
    const double coverage = mask.unknown_fraction();
    if (coverage >= params.coverage_lo && coverage <= params.coverage_hi) return mask;
  }
  throw ValueError("brush mask coverage band unreachable after " + std::to_string(params.max_attempts) +
                   " attempts");
}

void save_mask_png(const Mask& mask, const std::filesystem::path& path) {
  Image8 image;
  image.width = mask.width();
  image.height = mask.height();
  image.channels = 1;
  image.pixels.resize(mask.bits().size());
  std::transform(mask.bits().begin(), mask.bits().end(), image.pixels.begin(),
                 [](std::uint8_t b) { return static_cast<std::uint8_t>(b ? 255 : 0); });
  write_png(path, image, 1);
}

Mask load_mask_png(const std::filesystem::path& path) {
  const Image8 image = read_png(path);
  if (image.channels != 1) throw IoError("mask PNG must be grayscale: " + path.string());
  std::vector<std::uint8_t> bits(image.pixels.size());
  std::transform(image.pixels.begin(), image.pixels.end(), bits.begin(),
                 [](std::uint8_t p) { return static_cast<std::uint8_t>(p >= 128 ? 1 : 0); });
  return Mask(image.height, image.width, std::move(bits));
}

}  // namespace repaint
