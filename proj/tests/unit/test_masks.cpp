#include <filesystem>

#include "doctest.h"
#include "repaint/error.hpp"
#include "repaint/masks.hpp"
#include "repaint/png_io.hpp"

using namespace repaint;

namespace {

bool column_known(const Mask& m, std::size_t c) {
  for (std::size_t r = 0; r < m.height(); ++r) {
    if (!m.known(r, c)) return false;
  }
  return true;
}

bool column_unknown(const Mask& m, std::size_t c) {
  for (std::size_t r = 0; r < m.height(); ++r) {
    if (m.known(r, c)) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("half mask keeps the left floor(w/2) columns") {
  const auto a = mask_half(4, 4);
  CHECK(column_known(a, 0));
  CHECK(column_known(a, 1));
  CHECK(column_unknown(a, 2));
  CHECK(column_unknown(a, 3));

  const auto b = mask_half(4, 5);
  CHECK(b.known_count() == 8);
  CHECK(column_known(b, 1));
  CHECK(column_unknown(b, 2));

  const auto c = mask_half(1, 2);
  CHECK(c.known(0, 0));
  CHECK_FALSE(c.known(0, 1));
  CHECK_THROWS_AS(mask_half(3, 1), ValueError);
}

TEST_CASE("expand mask keeps a centered crop") {
  CHECK(mask_expand(256, 256, 64).known_fraction() == doctest::Approx(1.0 / 16));
  CHECK(mask_expand(4, 4, 4).known_count() == 16);
  const auto m = mask_expand(5, 5, 3);
  CHECK(m.known_count() == 9);
  CHECK_FALSE(m.known(0, 0));
  CHECK(m.known(1, 1));
  CHECK(m.known(3, 3));
  CHECK_FALSE(m.known(4, 4));
  CHECK_FALSE(m.known(1, 4));
  CHECK_THROWS_AS(mask_expand(4, 4, 5), ValueError);
  CHECK_THROWS_AS(mask_expand(4, 4, 0), ValueError);
}

TEST_CASE("alternating lines keep even rows") {
  const auto a = mask_alternating_lines(2, 2);
  CHECK(a.known(0, 0));
  CHECK(a.known(0, 1));
  CHECK_FALSE(a.known(1, 0));
  CHECK(mask_alternating_lines(256, 256).known_fraction() == 0.5);
  const auto b = mask_alternating_lines(3, 1);
  CHECK(b.known(0, 0));
  CHECK_FALSE(b.known(1, 0));
  CHECK(b.known(2, 0));
  CHECK_THROWS_AS(mask_alternating_lines(1, 4), ValueError);
}

TEST_CASE("super-resolution keeps a strided lattice") {
  CHECK(mask_super_resolution(4, 4, 2).known_count() == 4);
  CHECK(mask_super_resolution(256, 256, 2).known_fraction() == 0.25);
  const auto m = mask_super_resolution(5, 5, 2);
  CHECK(m.known_count() == 9);
  CHECK(m.known(4, 4));
  CHECK_FALSE(m.known(1, 0));
  CHECK_THROWS_AS(mask_super_resolution(4, 4, 1), ValueError);
}

TEST_CASE("brush masks are seeded and land in their coverage band") {
  const auto a = mask_brush(64, 64, BrushKind::Wide, 42);
  const auto b = mask_brush(64, 64, BrushKind::Wide, 42);
  CHECK(a == b);
  CHECK(a.hash() == b.hash());
  CHECK_FALSE(a == mask_brush(64, 64, BrushKind::Wide, 43));
  CHECK(a.provenance().family == MaskFamily::Wide);
  CHECK(a.provenance().seed == 42);

  // Pinned after the first run.
  CHECK(mask_brush(64, 64, BrushKind::Wide, 42).hash() == 15928478291919629618ULL);
  CHECK(mask_brush(64, 64, BrushKind::Narrow, 7).hash() == 6648018568911134103ULL);
}

TEST_CASE("brush coverage over 1000 seeds") {
  for (const BrushKind kind : {BrushKind::Wide, BrushKind::Narrow}) {
    const auto params = default_brush_params(kind);
    int inside = 0;
    for (std::uint64_t seed = 0; seed < 1000; ++seed) {
      const auto m = mask_brush(64, 64, kind, seed);
      const double cov = m.unknown_fraction();
      inside += cov >= params.coverage_lo && cov <= params.coverage_hi;
    }
    CHECK(inside >= 990);
  }
}

TEST_CASE("small narrow brush still paints something") {
  const auto m = mask_brush(8, 8, BrushKind::Narrow, 3);
  CHECK(m.known_count() < 64);
}

TEST_CASE("unreachable band is reported") {
  auto params = default_brush_params(BrushKind::Narrow);
  params.coverage_lo = 0.99;
  params.coverage_hi = 1.0;
  params.max_attempts = 5;
  CHECK_THROWS_AS(mask_brush(32, 32, BrushKind::Narrow, 1, params), ValueError);
}

TEST_CASE("all generators produce binary bitmaps of the requested shape") {
  const std::vector<Mask> masks{mask_half(7, 9), mask_expand(7, 9, 5), mask_alternating_lines(7, 9),
                                mask_super_resolution(7, 9, 3), mask_brush(7, 9, BrushKind::Wide, 1),
                                mask_brush(7, 9, BrushKind::Narrow, 1)};
  for (const auto& m : masks) {
    CHECK(m.height() == 7);
    CHECK(m.width() == 9);
    for (auto bit : m.bits()) CHECK(bit <= 1);
    const auto t = m.to_tensor(3);
    CHECK(t.shape() == Shape{3, 7, 9});
    for (std::size_t c = 0; c < 3; ++c) {
      for (std::size_t i = 0; i < 63; ++i) CHECK(t[c * 63 + i] == static_cast<double>(m.bits()[i]));
    }
  }
}

TEST_CASE("family names round trip") {
  for (auto f : {MaskFamily::Half, MaskFamily::Expand, MaskFamily::AlternatingLines, MaskFamily::SuperResolution,
                 MaskFamily::Wide, MaskFamily::Narrow}) {
    CHECK(parse_mask_family(to_string(f)) == f);
  }
  CHECK_THROWS_AS(parse_mask_family("circle"), ValueError);
}

TEST_CASE("mask PNG round trip is exact") {
  const auto dir = std::filesystem::temp_directory_path();
  for (const auto& m : {mask_brush(13, 21, BrushKind::Wide, 5), mask_super_resolution(9, 9, 2)}) {
    const auto path = dir / "repaint_unit_mask.png";
    save_mask_png(m, path);
    CHECK(load_mask_png(path) == m);
    const auto img = read_png(path);
    CHECK(img.channels == 1);
    for (std::size_t i = 0; i < img.pixels.size(); ++i) CHECK(img.pixels[i] == (m.bits()[i] ? 255 : 0));
    std::filesystem::remove(path);
  }
}
