#include "repaint/tensor_io.hpp"

#include <fstream>
#include <sstream>

#include "repaint/binary_io.hpp"

namespace repaint {

namespace {

constexpr char kMagic[] = "RPTN";
constexpr std::uint32_t kVersion = 1;
constexpr std::uint64_t kMaxRank = 32;

void write(std::ostream& out, const Tensor& tensor) {
  out.write(kMagic, 4);
  binary::write_u32(out, kVersion);
  binary::write_u64(out, tensor.rank());
  for (auto d : tensor.shape()) binary::write_u64(out, d);
  for (double v : tensor.values()) binary::write_f64(out, v);
}

Tensor read(std::istream& in) {
  binary::expect_magic(in, kMagic, 4, "tensor");
  const auto version = binary::read_u32(in, "tensor version");
  if (version != kVersion) throw IoError("unsupported tensor version " + std::to_string(version));
  const auto rank = binary::read_u64(in, "tensor rank");
  if (rank > kMaxRank) throw IoError("implausible tensor rank " + std::to_string(rank));
  Shape shape(rank);
  for (auto& d : shape) d = binary::read_u64(in, "tensor shape");
  const std::size_t count = shape_size(shape);
  std::vector<double> data;
  data.reserve(std::min<std::size_t>(count, 1u << 20));
  for (std::size_t i = 0; i < count; ++i) data.push_back(binary::read_f64(in, "tensor data"));
  return Tensor(std::move(shape), std::move(data));
}

}  // namespace

std::vector<std::uint8_t> encode_tensor(const Tensor& tensor) {
  std::ostringstream out(std::ios::binary);
  write(out, tensor);
  const std::string s = out.str();
  return {s.begin(), s.end()};
}

Tensor decode_tensor(const std::vector<std::uint8_t>& bytes) {
  std::istringstream in(std::string(bytes.begin(), bytes.end()), std::ios::binary);
  return read(in);
}

void save_tensor(const std::filesystem::path& path, const Tensor& tensor) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  write(out, tensor);
  if (!out) throw IoError("failed writing tensor: " + path.string());
}

Tensor load_tensor(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open tensor file: " + path.string());
  return read(in);
}

}  // namespace repaint
