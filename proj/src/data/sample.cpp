#include "hfcl/data/sample.hpp"

#include <algorithm>

#include "hfcl/error.hpp"

namespace hfcl::data {

std::size_t Sample::label_index() const {
  return static_cast<std::size_t>(
      std::max_element(label.begin(), label.end()) - label.begin());
}

Sample make_sample(std::size_t rows, std::size_t cols,
                   std::vector<double> input, std::size_t label,
                   std::size_t classes) {
  if (input.size() != rows * cols) {
    throw ShapeError("sample input has " + std::to_string(input.size()) +
                     " values, expected " + std::to_string(rows * cols));
  }
  if (label >= classes) {
    throw ShapeError("label " + std::to_string(label) + " outside " +
                     std::to_string(classes) + " classes");
  }
  Sample s;
  s.rows = rows;
  s.cols = cols;
  s.input = std::move(input);
  s.label.assign(classes, 0.0);
  s.label[label] = 1.0;
  return s;
}

}  // namespace hfcl::data
