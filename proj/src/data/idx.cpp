#include "hfcl/data/idx.hpp"

#include <zlib.h>

#include <array>
#include <fstream>
#include <memory>
#include <string>

#include "hfcl/error.hpp"

namespace hfcl::data {
namespace {

// gzread passes uncompressed files through unchanged.
class GzReader {
 public:
  explicit GzReader(const std::filesystem::path& path)
      : path_(path), file_(gzopen(path.c_str(), "rb"), &gzclose) {
    if (!file_) throw IoError("cannot open " + path.string());
  }

  void read(void* dst, std::size_t n, const char* what) {
    auto* out = static_cast<unsigned char*>(dst);
    while (n > 0) {
      const unsigned chunk = n > (1u << 30) ? (1u << 30) : static_cast<unsigned>(n);
      const int got = gzread(file_.get(), out, chunk);
      if (got <= 0) {
        throw IoError(path_.string() + ": truncated while reading " + what);
      }
      out += got;
      n -= static_cast<std::size_t>(got);
    }
  }

  std::uint32_t read_be32(const char* what) {
    std::array<unsigned char, 4> b{};
    read(b.data(), b.size(), what);
    return (std::uint32_t{b[0]} << 24) | (std::uint32_t{b[1]} << 16) |
           (std::uint32_t{b[2]} << 8) | std::uint32_t{b[3]};
  }

 private:
  std::filesystem::path path_;
  std::unique_ptr<std::remove_pointer_t<gzFile>, decltype(&gzclose)> file_;
};

void put_be32(std::ofstream& out, std::uint32_t v) {
  const char b[4] = {static_cast<char>(v >> 24), static_cast<char>(v >> 16),
                     static_cast<char>(v >> 8), static_cast<char>(v)};
  out.write(b, 4);
}

std::ofstream open_for_write(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  return out;
}

std::string hex(std::uint32_t v) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "0x%08x", v);
  return buf;
}

}  // namespace

IdxImages read_idx_images(const std::filesystem::path& path) {
  GzReader in(path);
  const std::uint32_t magic = in.read_be32("magic number");
  if (magic != kIdxImagesMagic) {
    throw FormatError(path.string() + ": image magic " + hex(magic) +
                      ", expected " + hex(kIdxImagesMagic));
  }
  IdxImages img;
  img.count = in.read_be32("image count");
  img.rows = in.read_be32("row count");
  img.cols = in.read_be32("column count");
  img.pixels.resize(std::size_t{img.count} * img.rows * img.cols);
  if (!img.pixels.empty()) in.read(img.pixels.data(), img.pixels.size(), "pixels");
  return img;
}

std::vector<std::uint8_t> read_idx_labels(const std::filesystem::path& path) {
  GzReader in(path);
  const std::uint32_t magic = in.read_be32("magic number");
  if (magic != kIdxLabelsMagic) {
    throw FormatError(path.string() + ": label magic " + hex(magic) +
                      ", expected " + hex(kIdxLabelsMagic));
  }
  std::vector<std::uint8_t> labels(in.read_be32("label count"));
  if (!labels.empty()) in.read(labels.data(), labels.size(), "labels");
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] >= kMnistClasses) {
      throw FormatError(path.string() + ": label " + std::to_string(labels[i]) +
                        " at index " + std::to_string(i) + " is outside 0-9");
    }
  }
  return labels;
}

std::vector<Sample> load_idx(const std::filesystem::path& image_path,
                             const std::filesystem::path& label_path) {
  // Read both headers before the bulk data so count mismatches surface first.
  {
    GzReader images(image_path);
    GzReader labels(label_path);
    const std::uint32_t im = images.read_be32("magic number");
    const std::uint32_t lm = labels.read_be32("magic number");
    if (im != kIdxImagesMagic) {
      throw FormatError(image_path.string() + ": image magic " + hex(im) +
                        ", expected " + hex(kIdxImagesMagic));
    }
    if (lm != kIdxLabelsMagic) {
      throw FormatError(label_path.string() + ": label magic " + hex(lm) +
                        ", expected " + hex(kIdxLabelsMagic));
    }
    const std::uint32_t ni = images.read_be32("image count");
    const std::uint32_t nl = labels.read_be32("label count");
    if (ni != nl) {
      throw ConsistencyError(image_path.string() + " holds " +
                             std::to_string(ni) + " images but " +
                             label_path.string() + " holds " +
                             std::to_string(nl) + " labels");
    }
  }
  const IdxImages img = read_idx_images(image_path);
  const std::vector<std::uint8_t> labels = read_idx_labels(label_path);

  const std::size_t pixels = std::size_t{img.rows} * img.cols;
  std::vector<Sample> out;
  out.reserve(img.count);
  for (std::size_t i = 0; i < img.count; ++i) {
    std::vector<double> x(pixels);
    const std::uint8_t* src = img.pixels.data() + i * pixels;
    for (std::size_t j = 0; j < pixels; ++j) x[j] = src[j] / 255.0;
    out.push_back(make_sample(img.rows, img.cols, std::move(x), labels[i],
                              kMnistClasses));
  }
  return out;
}

void write_idx_images(const std::filesystem::path& path, std::uint32_t rows,
                      std::uint32_t cols,
                      std::span<const std::uint8_t> pixels) {
  const std::size_t per = std::size_t{rows} * cols;
  if (per == 0 || pixels.size() % per != 0) {
    throw ShapeError("pixel buffer is not a whole number of images");
  }
  std::ofstream out = open_for_write(path);
  put_be32(out, kIdxImagesMagic);
  put_be32(out, static_cast<std::uint32_t>(pixels.size() / per));
  put_be32(out, rows);
  put_be32(out, cols);
  out.write(reinterpret_cast<const char*>(pixels.data()),
            static_cast<std::streamsize>(pixels.size()));
  if (!out) throw IoError("failed writing " + path.string());
}

void write_idx_labels(const std::filesystem::path& path,
                      std::span<const std::uint8_t> labels) {
  std::ofstream out = open_for_write(path);
  put_be32(out, kIdxLabelsMagic);
  put_be32(out, static_cast<std::uint32_t>(labels.size()));
  out.write(reinterpret_cast<const char*>(labels.data()),
            static_cast<std::streamsize>(labels.size()));
  if (!out) throw IoError("failed writing " + path.string());
}

std::vector<Sample> write_idx_fixture(const std::filesystem::path& image_path,
                                      const std::filesystem::path& label_path,
                                      std::uint32_t count, std::uint32_t rows,
                                      std::uint32_t cols) {
  const std::size_t per = std::size_t{rows} * cols;
  std::vector<std::uint8_t> pixels(count * per);
  std::vector<std::uint8_t> labels(count);
  for (std::size_t i = 0; i < count; ++i) {
    labels[i] = static_cast<std::uint8_t>(i % kMnistClasses);
    for (std::size_t j = 0; j < per; ++j) {
      pixels[i * per + j] = static_cast<std::uint8_t>((37 * i + 11 * j) % 256);
    }
  }
  write_idx_images(image_path, rows, cols, pixels);
  write_idx_labels(label_path, labels);

  std::vector<Sample> expected;
  for (std::size_t i = 0; i < count; ++i) {
    std::vector<double> x(per);
    for (std::size_t j = 0; j < per; ++j) x[j] = pixels[i * per + j] / 255.0;
    expected.push_back(make_sample(rows, cols, std::move(x), labels[i]));
  }
  return expected;
}

}  // namespace hfcl::data
