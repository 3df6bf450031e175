// Copyright 2026 The rdl Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "rdl/image_io.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <string>

#include "rdl/error.hpp"
#include "rdl/file_util.hpp"

namespace rdl {

Image::Image(std::size_t width, std::size_t height, std::vector<double> data)
    : width_(width), height_(height), data_(std::move(data)) {
  if (width_ == 0 || height_ == 0) {
    throw ContractViolation("Image: dimensions must be >= 1");
  }
  if (data_.size() != width_ * height_) {
    throw ContractViolation("Image: data length " + std::to_string(data_.size()) +
                            " != width*height " + std::to_string(width_ * height_));
  }
  for (double v : data_) {
    if (!(v >= 0.0 && v <= 1.0)) {
      throw ContractViolation("Image: sample outside [0,1]");
    }
  }
}

Image::Image(std::size_t width, std::size_t height, double value)
    : Image(width, height, std::vector<double>(width * height, value)) {}

void Image::set(std::size_t x, std::size_t y, double v) {
  data_[y * width_ + x] = std::clamp(v, 0.0, 1.0);
}

// ----------------------------------------------------------------------
// PGM
// ----------------------------------------------------------------------

namespace {

class HeaderReader {
 public:
  explicit HeaderReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  std::size_t pos() const { return pos_; }
  bool at_end() const { return pos_ >= bytes_.size(); }

  // Skips whitespace and '#' comments (which run to end of line).
  void skip_space() {
    while (pos_ < bytes_.size()) {
      const auto c = bytes_[pos_];
      if (c == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n' && bytes_[pos_] != '\r') ++pos_;
      } else if (std::isspace(c)) {
        ++pos_;
      } else {
        break;
      }
    }
  }

  // Reads a decimal integer. Returns false at end of stream.
  bool read_uint(unsigned long long& out, const char* what) {
    skip_space();
    if (at_end()) return false;
    const std::size_t start = pos_;
    unsigned long long v = 0;
    while (pos_ < bytes_.size() && std::isdigit(bytes_[pos_])) {
      v = v * 10 + (bytes_[pos_] - '0');
      if (v > std::numeric_limits<std::uint32_t>::max()) {
        throw ParseError(std::string("PGM: ") + what + " out of range", start);
      }
      ++pos_;
    }
    if (pos_ == start) {
      throw ParseError(std::string("PGM: expected ") + what, start);
    }
    if (pos_ < bytes_.size() && !std::isspace(bytes_[pos_]) && bytes_[pos_] != '#') {
      throw ParseError(std::string("PGM: malformed ") + what, pos_);
    }
    out = v;
    return true;
  }

  void advance(std::size_t n) { pos_ += n; }

 private:
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

Image read_pgm(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 2) {
    throw TruncationError("PGM: stream shorter than magic number");
  }
  if (bytes[0] != 'P' || (bytes[1] != '5' && bytes[1] != '2')) {
    throw ParseError("PGM: unsupported magic (expected P5 or P2)", 0);
  }
  const bool binary = bytes[1] == '5';
  HeaderReader hr(bytes);
  hr.advance(2);
  if (!hr.at_end() && !std::isspace(bytes[hr.pos()]) && bytes[hr.pos()] != '#') {
    throw ParseError("PGM: malformed magic", hr.pos());
  }

  unsigned long long width = 0, height = 0, maxval = 0;
  const char* fields[] = {"width", "height", "maxval"};
  unsigned long long* values[] = {&width, &height, &maxval};
  for (int i = 0; i < 3; ++i) {
    if (!hr.read_uint(*values[i], fields[i])) {
      throw TruncationError(std::string("PGM: header ends before ") + fields[i]);
    }
  }
  if (width == 0 || height == 0) {
    throw ParseError("PGM: zero image dimension", hr.pos());
  }
  if (maxval == 0 || maxval > 65535) {
    throw ParseError("PGM: maxval must be in 1..65535", hr.pos());
  }

  const std::size_t count = static_cast<std::size_t>(width * height);
  std::vector<double> data(count);
  const double denom = static_cast<double>(maxval);

  if (binary) {
    if (hr.at_end() || !std::isspace(bytes[hr.pos()])) {
      throw ParseError("PGM: expected single whitespace after maxval", hr.pos());
    }
    hr.advance(1);
    const std::size_t bps = maxval < 256 ? 1 : 2;
    const std::size_t start = hr.pos();
    if (bytes.size() - start < count * bps) {
      throw TruncationError("PGM: payload has " + std::to_string(bytes.size() - start) +
                            " bytes, expected " + std::to_string(count * bps));
    }
    for (std::size_t i = 0; i < count; ++i) {
      const std::size_t off = start + i * bps;
      unsigned v = bytes[off];
      if (bps == 2) v = (v << 8) | bytes[off + 1];
      if (v > maxval) throw ParseError("PGM: sample exceeds maxval", off);
      data[i] = v / denom;
    }
  } else {
    for (std::size_t i = 0; i < count; ++i) {
      unsigned long long v = 0;
      const std::size_t off = hr.pos();
      if (!hr.read_uint(v, "sample")) {
        throw TruncationError("PGM: ASCII payload ends after " + std::to_string(i) +
                              " of " + std::to_string(count) + " samples");
      }
      if (v > maxval) throw ParseError("PGM: sample exceeds maxval", off);
      data[i] = static_cast<double>(v) / denom;
    }
  }
  return Image(static_cast<std::size_t>(width), static_cast<std::size_t>(height), std::move(data));
}

std::vector<std::uint8_t> write_pgm(const Image& img, unsigned maxval) {
  if (maxval < 1 || maxval > 65535) {
    throw ContractViolation("write_pgm: maxval must be in 1..65535");
  }
  const std::string header = "P5\n" + std::to_string(img.width()) + " " +
                             std::to_string(img.height()) + "\n" + std::to_string(maxval) + "\n";
  const std::size_t bps = maxval < 256 ? 1 : 2;
  std::vector<std::uint8_t> out(header.begin(), header.end());
  out.reserve(header.size() + img.size() * bps);
  for (double v : img.data()) {
    const auto s = static_cast<unsigned>(std::round(std::clamp(v, 0.0, 1.0) * maxval));
    if (bps == 2) out.push_back(static_cast<std::uint8_t>(s >> 8));
    out.push_back(static_cast<std::uint8_t>(s & 0xff));
  }
  return out;
}

Image read_pgm_file(const std::string& path) {
  const auto bytes = read_file(path);
  return read_pgm(bytes);
}

// ----------------------------------------------------------------------
// Block tiling
// ----------------------------------------------------------------------

Patches to_patches(const Image& img, std::size_t block) {
  if (block == 0) throw ContractViolation("to_patches: block must be >= 1");
  if (img.empty()) throw ContractViolation("to_patches: empty image");

  PatchGrid grid;
  grid.block = block;
  grid.orig_width = img.width();
  grid.orig_height = img.height();
  grid.rows = (img.height() + block - 1) / block;
  grid.cols = (img.width() + block - 1) / block;

  PatchMatrix pm(grid.patch_dim(), grid.patch_count());
  const std::size_t max_x = img.width() - 1;
  const std::size_t max_y = img.height() - 1;
  for (std::size_t br = 0; br < grid.rows; ++br) {
    for (std::size_t bc = 0; bc < grid.cols; ++bc) {
      const auto j = static_cast<Eigen::Index>(br * grid.cols + bc);
      for (std::size_t py = 0; py < block; ++py) {
        const std::size_t y = std::min(br * block + py, max_y);
        for (std::size_t px = 0; px < block; ++px) {
          const std::size_t x = std::min(bc * block + px, max_x);
          pm(static_cast<Eigen::Index>(py * block + px), j) = img.at(x, y);
        }
      }
    }
  }
  return {std::move(pm), grid};
}

Image from_patches(const PatchMatrix& pm, const PatchGrid& grid) {
  if (grid.block == 0 || grid.orig_width == 0 || grid.orig_height == 0) {
    throw ContractViolation("from_patches: degenerate grid");
  }
  if (static_cast<std::size_t>(pm.rows()) != grid.patch_dim() ||
      static_cast<std::size_t>(pm.cols()) != grid.patch_count()) {
    throw ContractViolation("from_patches: patch matrix is " + std::to_string(pm.rows()) + "x" +
                            std::to_string(pm.cols()) + ", grid expects " +
                            std::to_string(grid.patch_dim()) + "x" +
                            std::to_string(grid.patch_count()));
  }
  if (grid.rows * grid.block < grid.orig_height || grid.cols * grid.block < grid.orig_width) {
    throw ContractViolation("from_patches: grid does not cover the original image");
  }
  const std::size_t b = grid.block;
  std::vector<double> data(grid.orig_width * grid.orig_height);
  for (std::size_t y = 0; y < grid.orig_height; ++y) {
    for (std::size_t x = 0; x < grid.orig_width; ++x) {
      const auto j = static_cast<Eigen::Index>((y / b) * grid.cols + x / b);
      const auto i = static_cast<Eigen::Index>((y % b) * b + x % b);
      const double v = pm(i, j);
      data[y * grid.orig_width + x] = std::isnan(v) ? 0.0 : std::clamp(v, 0.0, 1.0);
    }
  }
  return Image(grid.orig_width, grid.orig_height, std::move(data));
}

double psnr(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols() || a.size() == 0) {
    throw ContractViolation("psnr: shape mismatch");
  }
  const double mse = (a - b).squaredNorm() / static_cast<double>(a.size());
  if (mse == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(1.0 / mse);
}

double psnr(const Image& a, const Image& b) {
  if (a.width() != b.width() || a.height() != b.height()) {
    throw ContractViolation("psnr: image dimensions differ");
  }
  const Eigen::Map<const Eigen::VectorXd> va(a.data().data(), static_cast<Eigen::Index>(a.size()));
  const Eigen::Map<const Eigen::VectorXd> vb(b.data().data(), static_cast<Eigen::Index>(b.size()));
  return psnr(Eigen::MatrixXd(va), Eigen::MatrixXd(vb));
}

}  // namespace rdl
