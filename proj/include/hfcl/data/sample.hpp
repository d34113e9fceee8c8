#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace hfcl::data {

// One input/output pair. `input` is a rows x cols image, row-major, values in
// [0, 1]; `label` is a one-hot column of length `classes` (U_y = classes,
// V_y = 1).
struct Sample {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> input;
  std::vector<double> label;

  std::size_t input_size() const { return input.size(); }
  std::size_t label_size() const { return label.size(); }
  // Index of the largest label entry.
  std::size_t label_index() const;
  std::uint64_t symbols() const { return input.size() + label.size(); }

  friend bool operator==(const Sample&, const Sample&) = default;
  friend auto operator<=>(const Sample&, const Sample&) = default;
};

Sample make_sample(std::size_t rows, std::size_t cols,
                   std::vector<double> input, std::size_t label,
                   std::size_t classes = 10);

using SampleSpan = std::span<const Sample>;

}  // namespace hfcl::data
