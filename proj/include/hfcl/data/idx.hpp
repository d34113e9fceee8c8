#pragma once

// MNIST IDX files. All header integers are big-endian:
//   images: 0x00000803, count, rows, cols, then count*rows*cols ubytes
//   labels: 0x00000801, count, then count ubytes in 0..9
// Files may be gzip-compressed; plain files are read as-is.

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "hfcl/data/sample.hpp"

namespace hfcl::data {

inline constexpr std::uint32_t kIdxImagesMagic = 0x00000803;
inline constexpr std::uint32_t kIdxLabelsMagic = 0x00000801;
inline constexpr std::size_t kMnistClasses = 10;

struct IdxImages {
  std::uint32_t count = 0;
  std::uint32_t rows = 0;
  std::uint32_t cols = 0;
  std::vector<std::uint8_t> pixels;
};

// Throws IoError (missing/truncated), FormatError (bad magic).
IdxImages read_idx_images(const std::filesystem::path& path);
// Throws IoError, FormatError (bad magic or label > 9).
std::vector<std::uint8_t> read_idx_labels(const std::filesystem::path& path);

// Pixels scaled by 1/255, labels one-hot over 10 classes. Throws
// ConsistencyError when the two files disagree on the sample count.
std::vector<Sample> load_idx(const std::filesystem::path& image_path,
                             const std::filesystem::path& label_path);

// Uncompressed writers, used for fixtures.
void write_idx_images(const std::filesystem::path& path, std::uint32_t rows,
                      std::uint32_t cols, std::span<const std::uint8_t> pixels);
void write_idx_labels(const std::filesystem::path& path,
                      std::span<const std::uint8_t> labels);

// Writes a small valid image/label pair: `count` images of rows x cols with a
// deterministic pattern and labels i % 10. Returns the samples load_idx will
// produce for them.
std::vector<Sample> write_idx_fixture(const std::filesystem::path& image_path,
                                      const std::filesystem::path& label_path,
                                      std::uint32_t count, std::uint32_t rows,
                                      std::uint32_t cols);

}  // namespace hfcl::data
