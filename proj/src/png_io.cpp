#include "repaint/png_io.hpp"

#include <png.h>

#include <csetjmp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <memory>

#include "repaint/error.hpp"

namespace repaint {

namespace {

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f != nullptr) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

void png_warning_handler(png_structp, png_const_charp) {}

// libpng reports errors with longjmp, so the setjmp frames below hold only
// trivially destructible locals; they return false on a libpng error.
bool encode(png_structp png, png_infop info, std::FILE* file, png_uint_32 width, png_uint_32 height, int bit_depth,
            int color, png_bytepp rows) {
  if (setjmp(png_jmpbuf(png))) return false;
  png_init_io(png, file);
  png_set_compression_level(png, 9);
  png_set_filter(png, 0, PNG_FILTER_NONE);
  png_set_IHDR(png, info, width, height, bit_depth, color, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  png_write_image(png, rows);
  png_write_end(png, nullptr);
  return true;
}

struct PngHeader {
  png_uint_32 width = 0;
  png_uint_32 height = 0;
  png_byte channels = 0;
};

bool decode_header(png_structp png, png_infop info, std::FILE* file, PngHeader* header) {
  if (setjmp(png_jmpbuf(png))) return false;
  png_init_io(png, file);
  png_set_sig_bytes(png, 8);
  png_read_info(png, info);
  const auto color = png_get_color_type(png, info);
  const auto depth = png_get_bit_depth(png, info);
  if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (color == PNG_COLOR_TYPE_GRAY && depth < 8) png_set_expand_gray_1_2_4_to_8(png);
  if (depth == 16) png_set_strip_16(png);
  if (color & PNG_COLOR_MASK_ALPHA) png_set_strip_alpha(png);
  png_read_update_info(png, info);
  header->width = png_get_image_width(png, info);
  header->height = png_get_image_height(png, info);
  header->channels = png_get_channels(png, info);
  return true;
}

bool decode_rows(png_structp png, png_bytepp rows) {
  if (setjmp(png_jmpbuf(png))) return false;
  png_read_image(png, rows);
  png_read_end(png, nullptr);
  return true;
}

}  // namespace

void write_png(const std::filesystem::path& path, const Image8& image, int bit_depth) {
  if (image.channels != 1 && image.channels != 3) throw ValueError("PNG writer supports 1 or 3 channels");
  if (image.width == 0 || image.height == 0) throw ValueError("cannot write an empty image");
  if (image.pixels.size() != image.width * image.height * image.channels) throw ShapeError("pixel buffer size mismatch");
  if (bit_depth != 8 && !(bit_depth == 1 && image.channels == 1)) throw ValueError("unsupported PNG bit depth");

  const std::size_t stride = bit_depth == 1 ? (image.width + 7) / 8 : image.width * image.channels;
  std::vector<std::uint8_t> buffer(stride * image.height, 0);
  for (std::size_t r = 0; r < image.height; ++r) {
    const std::uint8_t* src = image.pixels.data() + r * image.width * image.channels;
    std::uint8_t* dst = buffer.data() + r * stride;
    if (bit_depth == 1) {
      for (std::size_t c = 0; c < image.width; ++c) {
        if (src[c] >= 128) dst[c / 8] |= static_cast<std::uint8_t>(0x80u >> (c % 8));
      }
    } else {
      std::copy(src, src + stride, dst);
    }
  }
  std::vector<png_bytep> rows(image.height);
  for (std::size_t r = 0; r < image.height; ++r) rows[r] = buffer.data() + r * stride;

  FilePtr file(std::fopen(path.string().c_str(), "wb"));
  if (!file) throw IoError("cannot open for writing: " + path.string());
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, png_warning_handler);
  if (png == nullptr) throw IoError("png_create_write_struct failed");
  png_infop info = png_create_info_struct(png);
  struct Guard {
    png_structp* png;
    png_infop* info;
    ~Guard() { png_destroy_write_struct(png, info); }
  } guard{&png, &info};
  if (info == nullptr) throw IoError("png_create_info_struct failed");

  const int color = image.channels == 1 ? PNG_COLOR_TYPE_GRAY : PNG_COLOR_TYPE_RGB;
  if (!encode(png, info, file.get(), static_cast<png_uint_32>(image.width), static_cast<png_uint_32>(image.height),
              bit_depth, color, rows.data())) {
    throw IoError("failed encoding PNG: " + path.string());
  }
  if (std::fflush(file.get()) != 0) throw IoError("failed writing " + path.string());
}

Image8 read_png(const std::filesystem::path& path) {
  FilePtr file(std::fopen(path.string().c_str(), "rb"));
  if (!file) throw IoError("cannot open: " + path.string());
  unsigned char sig[8];
  if (std::fread(sig, 1, 8, file.get()) != 8 || png_sig_cmp(sig, 0, 8) != 0) {
    throw IoError("not a PNG file: " + path.string());
  }
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, png_warning_handler);
  if (png == nullptr) throw IoError("png_create_read_struct failed");
  png_infop info = png_create_info_struct(png);
  struct Guard {
    png_structp* png;
    png_infop* info;
    ~Guard() { png_destroy_read_struct(png, info, nullptr); }
  } guard{&png, &info};
  if (info == nullptr) throw IoError("png_create_info_struct failed");

  PngHeader header;
  if (!decode_header(png, info, file.get(), &header)) throw IoError("failed decoding PNG header: " + path.string());
  Image8 image;
  image.width = header.width;
  image.height = header.height;
  image.channels = header.channels;
  if (image.channels != 1 && image.channels != 3) throw IoError("unsupported PNG channel layout");
  image.pixels.resize(image.width * image.height * image.channels);
  std::vector<png_bytep> rows(image.height);
  for (std::size_t r = 0; r < image.height; ++r) rows[r] = image.pixels.data() + r * image.width * image.channels;
  if (!decode_rows(png, rows.data())) throw IoError("failed decoding PNG: " + path.string());
  return image;
}

Image8 render_image_grid(const Tensor& samples, double lo, double hi, std::size_t columns) {
  if (!(hi > lo)) throw ValueError("image data range must satisfy lo < hi");
  std::size_t n = 0, channels = 1, height = 0, width = 0;
  if (samples.rank() == 4) {
    n = samples.dim(0);
    channels = samples.dim(1);
    height = samples.dim(2);
    width = samples.dim(3);
  } else if (samples.rank() == 3) {
    n = samples.dim(0);
    height = samples.dim(1);
    width = samples.dim(2);
  } else {
    throw ShapeError("image grid expects [n, c, h, w] or [n, h, w], got " + shape_string(samples.shape()));
  }
  if (channels != 1 && channels != 3) throw ShapeError("image grid supports 1 or 3 channels");
  if (n == 0 || height == 0 || width == 0) throw ShapeError("image grid needs at least one nonempty sample");
  if (columns == 0) columns = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(n))));
  columns = std::min(columns, n);
  const std::size_t grid_rows = (n + columns - 1) / columns;

  Image8 image;
  image.width = columns * width;
  image.height = grid_rows * height;
  image.channels = channels;
  image.pixels.assign(image.width * image.height * channels, 0);
  const double scale = 255.0 / (hi - lo);
  for (std::size_t s = 0; s < n; ++s) {
    const std::size_t top = (s / columns) * height;
    const std::size_t left = (s % columns) * width;
    const auto row = samples.row(s);
    for (std::size_t c = 0; c < channels; ++c) {
      for (std::size_t y = 0; y < height; ++y) {
        for (std::size_t x = 0; x < width; ++x) {
          const double v = std::clamp((row[(c * height + y) * width + x] - lo) * scale, 0.0, 255.0);
          image.pixels[((top + y) * image.width + left + x) * channels + c] = static_cast<std::uint8_t>(std::lround(v));
        }
      }
    }
  }
  return image;
}

void save_image_grid(const Tensor& samples, const std::filesystem::path& path, double lo, double hi,
                     std::size_t columns) {
  write_png(path, render_image_grid(samples, lo, hi, columns));
}

}  // namespace repaint
