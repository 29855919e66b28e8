#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string_view>
#include <vector>

#include "irbm/numeric.hpp"
#include "irbm/rng.hpp"

namespace irbm {

enum class Split { Train, Valid, Test };

std::string_view to_string(Split s);

/// Row-major N x D binary matrix. Every entry is 0 or 1.
class Dataset {
 public:
  Dataset() = default;
  Dataset(std::size_t rows, std::size_t dim, std::vector<std::uint8_t> bits, Split split = Split::Train);

  std::size_t size() const { return rows_; }
  std::size_t dim() const { return dim_; }
  Split split() const { return split_; }
  void set_split(Split s) { split_ = s; }

  std::span<const std::uint8_t> row(std::size_t i) const { return {bits_.data() + i * dim_, dim_}; }
  BinaryVector example(std::size_t i) const;
  const std::vector<std::uint8_t>& bits() const { return bits_; }

  /// Rows [begin, end) as a new dataset.
  Dataset slice(std::size_t begin, std::size_t end) const;

  bool operator==(const Dataset&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t dim_ = 0;
  std::vector<std::uint8_t> bits_;
  Split split_ = Split::Train;
};

/// Raw 8-bit images, one row per image.
struct IntensityMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::size_t image_rows = 0;
  std::size_t image_cols = 0;
  std::vector<std::uint8_t> values;
};

/// Parses an IDX3 image file (magic 0x00000803, big-endian header).
/// Throws std::runtime_error naming the byte offset on malformed input.
IntensityMatrix parse_idx_images(std::span<const std::uint8_t> bytes);
IntensityMatrix load_idx_images(const std::filesystem::path& path);

/// Pixel = 1 with probability intensity / 255.
Dataset stochastic_binarize(const IntensityMatrix& intensities, RngStream& rng);
/// Same for real-valued intensities; throws std::invalid_argument outside [0, 255].
Dataset stochastic_binarize(const RealMatrix& intensities, RngStream& rng);

/// N examples drawn uniformly from `num_patterns` random prototypes, each bit
/// flipped independently with probability `noise`. Prototypes depend only on
/// `seed`; `stream` selects an independent draw of examples, so a test split
/// can share the training prototypes.
Dataset synthetic_patterns(std::size_t dim, std::size_t num_patterns, double noise, std::size_t n,
                           std::uint64_t seed, std::uint64_t stream = 0);

/// Packed-bit file: "GBZD", u32 N, u32 D (little-endian), then ceil(N*D/8)
/// bytes, row-major, most significant bit first.
std::vector<std::uint8_t> encode_packed_dataset(const Dataset& data);
Dataset decode_packed_dataset(std::span<const std::uint8_t> bytes);
void write_packed_dataset(const std::filesystem::path& path, const Dataset& data);
Dataset read_packed_dataset(const std::filesystem::path& path);

/// Loads a packed-bit file, or an IDX image file binarized with `binarize_seed`.
Dataset load_dataset(const std::filesystem::path& path, std::uint64_t binarize_seed = 0);

/// FNV-1a over (N, D, bits).
std::uint64_t dataset_hash(const Dataset& data);

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path);
void write_file_bytes(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);

}  // namespace irbm
