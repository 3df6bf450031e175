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

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace rdl {

// Grayscale raster, samples in [0,1], row-major.
class Image {
 public:
  Image() = default;
  // Throws ContractViolation on zero dimensions, size mismatch or samples
  // outside [0,1].
  Image(std::size_t width, std::size_t height, std::vector<double> data);
  // Constant-valued image.
  Image(std::size_t width, std::size_t height, double value = 0.0);

  std::size_t width() const noexcept { return width_; }
  std::size_t height() const noexcept { return height_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  double at(std::size_t x, std::size_t y) const { return data_[y * width_ + x]; }
  std::span<const double> data() const noexcept { return data_; }

  // Mutable access for builders; values are clamped to [0,1] on write.
  void set(std::size_t x, std::size_t y, double v);

  friend bool operator==(const Image&, const Image&) = default;

 private:
  std::size_t width_ = 0;
  std::size_t height_ = 0;
  std::vector<double> data_;
};

// Block bookkeeping for a non-overlapping tiling. Blocks are scanned
// row-major over the image; pixels inside a block are flattened row-major.
struct PatchGrid {
  std::size_t block = 8;
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::size_t orig_width = 0;
  std::size_t orig_height = 0;

  std::size_t patch_dim() const noexcept { return block * block; }
  std::size_t patch_count() const noexcept { return rows * cols; }

  friend bool operator==(const PatchGrid&, const PatchGrid&) = default;
};

// n x N, column j is the vectorized block j of the companion grid.
using PatchMatrix = Eigen::MatrixXd;

struct Patches {
  PatchMatrix matrix;
  PatchGrid grid;
};

// P5 or P2 PGM; samples scaled by 1/maxval.
Image read_pgm(std::span<const std::uint8_t> bytes);
// P5 encoding. Samples are clamped to [0,1] and rounded half away from zero.
std::vector<std::uint8_t> write_pgm(const Image& img, unsigned maxval = 255);

Image read_pgm_file(const std::string& path);

// Edge-replicates up to a multiple of block, then tiles.
Patches to_patches(const Image& img, std::size_t block = 8);
// Inverse tiling; crops the padding and clamps samples to [0,1].
Image from_patches(const PatchMatrix& pm, const PatchGrid& grid);

// 10*log10(1/MSE) for [0,1]-valued data. Infinity for identical inputs.
double psnr(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);
double psnr(const Image& a, const Image& b);

}  // namespace rdl
