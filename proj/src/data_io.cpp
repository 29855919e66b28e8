#include "irbm/data_io.hpp"

#include <algorithm>
#include <fstream>
#include <iterator>
#include <stdexcept>
#include <string>

namespace irbm {
namespace {

constexpr std::uint32_t kIdxImageMagic = 0x00000803;
constexpr char kPackedMagic[4] = {'G', 'B', 'Z', 'D'};

std::uint32_t read_be32(std::span<const std::uint8_t> bytes, std::size_t offset) {
  if (offset + 4 > bytes.size())
    throw std::runtime_error("idx: truncated header at byte " + std::to_string(offset) + ", needed " +
                             std::to_string(offset + 4 - bytes.size()) + " more bytes");
  return (std::uint32_t{bytes[offset]} << 24) | (std::uint32_t{bytes[offset + 1]} << 16) |
         (std::uint32_t{bytes[offset + 2]} << 8) | std::uint32_t{bytes[offset + 3]};
}

std::uint32_t read_le32(std::span<const std::uint8_t> bytes, std::size_t offset) {
  return std::uint32_t{bytes[offset]} | (std::uint32_t{bytes[offset + 1]} << 8) |
         (std::uint32_t{bytes[offset + 2]} << 16) | (std::uint32_t{bytes[offset + 3]} << 24);
}

void append_le32(std::vector<std::uint8_t>& out, std::uint32_t x) {
  for (int s = 0; s < 32; s += 8) out.push_back(static_cast<std::uint8_t>(x >> s));
}

}  // namespace

std::string_view to_string(Split s) {
  switch (s) {
    case Split::Train: return "train";
    case Split::Valid: return "valid";
    case Split::Test: return "test";
  }
  return "unknown";
}

Dataset::Dataset(std::size_t rows, std::size_t dim, std::vector<std::uint8_t> bits, Split split)
    : rows_(rows), dim_(dim), bits_(std::move(bits)), split_(split) {
  if (bits_.size() != rows_ * dim_) throw std::invalid_argument("dataset: bits do not match N x D");
  for (std::size_t i = 0; i < bits_.size(); ++i)
    if (bits_[i] > 1) throw std::invalid_argument("dataset: non-binary entry at index " + std::to_string(i));
}

BinaryVector Dataset::example(std::size_t i) const {
  const auto r = row(i);
  return {r.begin(), r.end()};
}

Dataset Dataset::slice(std::size_t begin, std::size_t end) const {
  if (begin > end || end > rows_) throw std::out_of_range("dataset slice out of range");
  std::vector<std::uint8_t> bits(bits_.begin() + begin * dim_, bits_.begin() + end * dim_);
  return Dataset(end - begin, dim_, std::move(bits), split_);
}

IntensityMatrix parse_idx_images(std::span<const std::uint8_t> bytes) {
  const std::uint32_t magic = read_be32(bytes, 0);
  if (magic != kIdxImageMagic) throw std::runtime_error("idx: bad magic at byte 0");
  IntensityMatrix out;
  out.rows = read_be32(bytes, 4);
  out.image_rows = read_be32(bytes, 8);
  out.image_cols = read_be32(bytes, 12);
  out.cols = out.image_rows * out.image_cols;
  const std::size_t payload = out.rows * out.cols;
  constexpr std::size_t header = 16;
  if (bytes.size() < header + payload)
    throw std::runtime_error("idx: truncated pixel data at byte " + std::to_string(bytes.size()) + ", missing " +
                             std::to_string(header + payload - bytes.size()) + " bytes");
  out.values.assign(bytes.begin() + header, bytes.begin() + header + payload);
  return out;
}

IntensityMatrix load_idx_images(const std::filesystem::path& path) {
  return parse_idx_images(read_file_bytes(path));
}

Dataset stochastic_binarize(const IntensityMatrix& intensities, RngStream& rng) {
  std::vector<std::uint8_t> bits(intensities.values.size());
  for (std::size_t i = 0; i < bits.size(); ++i) {
    const double p = intensities.values[i] / 255.0;
    bits[i] = rng.uniform() < p ? 1 : 0;
  }
  return Dataset(intensities.rows, intensities.cols, std::move(bits));
}

Dataset stochastic_binarize(const RealMatrix& intensities, RngStream& rng) {
  std::vector<std::uint8_t> bits(intensities.values().size());
  for (std::size_t i = 0; i < bits.size(); ++i) {
    const double x = intensities.values()[i];
    if (!(x >= 0.0 && x <= 255.0))
      throw std::invalid_argument("intensity out of range at index " + std::to_string(i));
    bits[i] = rng.uniform() < x / 255.0 ? 1 : 0;
  }
  return Dataset(intensities.rows(), intensities.cols(), std::move(bits));
}

Dataset synthetic_patterns(std::size_t dim, std::size_t num_patterns, double noise, std::size_t n,
                           std::uint64_t seed, std::uint64_t stream) {
  if (dim == 0 || num_patterns == 0) throw std::invalid_argument("synthetic_patterns: empty shape");
  if (dim < 64 && num_patterns > (std::uint64_t{1} << dim))
    throw std::invalid_argument("synthetic_patterns: more patterns than binary vectors");
  if (!(noise >= 0.0 && noise <= 1.0)) throw std::invalid_argument("synthetic_patterns: noise outside [0, 1]");

  RngStream proto_rng(seed, 0);
  std::vector<std::uint8_t> prototypes(num_patterns * dim);
  for (auto& b : prototypes) b = proto_rng.uniform() < 0.5 ? 1 : 0;

  RngStream rng(seed, stream + 1);
  std::vector<std::uint8_t> bits(n * dim);
  for (std::size_t r = 0; r < n; ++r) {
    const std::size_t p = rng.below(num_patterns);
    for (std::size_t j = 0; j < dim; ++j) {
      const std::uint8_t flip = rng.uniform() < noise ? 1 : 0;
      bits[r * dim + j] = prototypes[p * dim + j] ^ flip;
    }
  }
  return Dataset(n, dim, std::move(bits));
}

std::vector<std::uint8_t> encode_packed_dataset(const Dataset& data) {
  std::vector<std::uint8_t> out(kPackedMagic, kPackedMagic + 4);
  append_le32(out, static_cast<std::uint32_t>(data.size()));
  append_le32(out, static_cast<std::uint32_t>(data.dim()));
  const auto& bits = data.bits();
  std::vector<std::uint8_t> packed((bits.size() + 7) / 8, 0);
  for (std::size_t i = 0; i < bits.size(); ++i)
    if (bits[i]) packed[i / 8] |= static_cast<std::uint8_t>(0x80U >> (i % 8));
  out.insert(out.end(), packed.begin(), packed.end());
  return out;
}

Dataset decode_packed_dataset(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 12) throw std::runtime_error("packed dataset: truncated header at byte " +
                                                  std::to_string(bytes.size()));
  for (int i = 0; i < 4; ++i)
    if (bytes[i] != static_cast<std::uint8_t>(kPackedMagic[i]))
      throw std::runtime_error("packed dataset: bad magic at byte 0");
  const std::size_t n = read_le32(bytes, 4);
  const std::size_t d = read_le32(bytes, 8);
  const std::size_t total = n * d;
  const std::size_t need = 12 + (total + 7) / 8;
  if (bytes.size() < need)
    throw std::runtime_error("packed dataset: truncated payload, missing " + std::to_string(need - bytes.size()) +
                             " bytes");
  std::vector<std::uint8_t> bits(total);
  for (std::size_t i = 0; i < total; ++i) bits[i] = (bytes[12 + i / 8] >> (7 - i % 8)) & 1U;
  return Dataset(n, d, std::move(bits));
}

void write_packed_dataset(const std::filesystem::path& path, const Dataset& data) {
  write_file_bytes(path, encode_packed_dataset(data));
}

Dataset read_packed_dataset(const std::filesystem::path& path) {
  return decode_packed_dataset(read_file_bytes(path));
}

Dataset load_dataset(const std::filesystem::path& path, std::uint64_t binarize_seed) {
  const auto bytes = read_file_bytes(path);
  if (bytes.size() >= 4 && std::equal(bytes.begin(), bytes.begin() + 4, kPackedMagic))
    return decode_packed_dataset(bytes);
  RngStream rng(binarize_seed, 0);
  return stochastic_binarize(parse_idx_images(bytes), rng);
}

std::uint64_t dataset_hash(const Dataset& data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&h](std::uint64_t byte) {
    h ^= byte;
    h *= 0x100000001b3ULL;
  };
  for (int s = 0; s < 64; s += 8) mix((data.size() >> s) & 0xff);
  for (int s = 0; s < 64; s += 8) mix((data.dim() >> s) & 0xff);
  for (auto b : data.bits()) mix(b);
  return h;
}

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file_bytes(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

}  // namespace irbm
