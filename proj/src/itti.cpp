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

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "rdl/error.hpp"
#include "rdl/pipeline.hpp"

namespace rdl {

namespace {

constexpr int kLevels = 6;
constexpr std::array<std::pair<int, int>, 4> kCenterSurround = {{{1, 3}, {1, 4}, {2, 4}, {2, 5}}};
// Maps whose peak is below this are treated as carrying no contrast.
constexpr double kFlatPeak = 1e-12;
// Local maxima under this fraction of the global peak are ignored.
constexpr double kLocalMaxFloor = 0.1;

using Mat = Eigen::MatrixXd;

Mat reduce(const Mat& in) {
  static constexpr double k[5] = {1.0 / 16, 4.0 / 16, 6.0 / 16, 4.0 / 16, 1.0 / 16};
  const Eigen::Index rows = in.rows();
  const Eigen::Index cols = in.cols();
  Mat h(rows, (cols + 1) / 2);
  for (Eigen::Index y = 0; y < rows; ++y) {
    for (Eigen::Index x = 0; x < h.cols(); ++x) {
      double acc = 0.0;
      for (int i = -2; i <= 2; ++i) {
        acc += k[i + 2] * in(y, std::clamp<Eigen::Index>(2 * x + i, 0, cols - 1));
      }
      h(y, x) = acc;
    }
  }
  Mat out((rows + 1) / 2, h.cols());
  for (Eigen::Index y = 0; y < out.rows(); ++y) {
    for (Eigen::Index x = 0; x < out.cols(); ++x) {
      double acc = 0.0;
      for (int i = -2; i <= 2; ++i) {
        acc += k[i + 2] * h(std::clamp<Eigen::Index>(2 * y + i, 0, rows - 1), x);
      }
      out(y, x) = acc;
    }
  }
  return out;
}

// Bilinear resampling with pixel-center alignment.
Mat resize(const Mat& in, Eigen::Index rows, Eigen::Index cols) {
  if (in.rows() == rows && in.cols() == cols) return in;
  Mat out(rows, cols);
  const double sy = static_cast<double>(in.rows()) / static_cast<double>(rows);
  const double sx = static_cast<double>(in.cols()) / static_cast<double>(cols);
  for (Eigen::Index y = 0; y < rows; ++y) {
    const double fy = std::clamp((y + 0.5) * sy - 0.5, 0.0, static_cast<double>(in.rows() - 1));
    const auto y0 = static_cast<Eigen::Index>(std::floor(fy));
    const Eigen::Index y1 = std::min(y0 + 1, in.rows() - 1);
    const double wy = fy - static_cast<double>(y0);
    for (Eigen::Index x = 0; x < cols; ++x) {
      const double fx = std::clamp((x + 0.5) * sx - 0.5, 0.0, static_cast<double>(in.cols() - 1));
      const auto x0 = static_cast<Eigen::Index>(std::floor(fx));
      const Eigen::Index x1 = std::min(x0 + 1, in.cols() - 1);
      const double wx = fx - static_cast<double>(x0);
      out(y, x) = (1 - wy) * ((1 - wx) * in(y0, x0) + wx * in(y0, x1)) +
                  wy * ((1 - wx) * in(y1, x0) + wx * in(y1, x1));
    }
  }
  return out;
}

// |derivative| along direction theta, central differences.
Mat oriented_gradient(const Mat& in, double theta) {
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  const Eigen::Index rows = in.rows();
  const Eigen::Index cols = in.cols();
  Mat out(rows, cols);
  for (Eigen::Index y = 0; y < rows; ++y) {
    const Eigen::Index yu = std::max<Eigen::Index>(y - 1, 0);
    const Eigen::Index yd = std::min(y + 1, rows - 1);
    for (Eigen::Index x = 0; x < cols; ++x) {
      const Eigen::Index xl = std::max<Eigen::Index>(x - 1, 0);
      const Eigen::Index xr = std::min(x + 1, cols - 1);
      const double gx = 0.5 * (in(y, xr) - in(y, xl));
      const double gy = 0.5 * (in(yd, x) - in(yu, x));
      out(y, x) = std::abs(c * gx + s * gy);
    }
  }
  return out;
}

// Scales the map to a [0,1] peak and weights it by (1 - mean of the other
// local maxima)^2, promoting maps with a single strong peak.
Mat normalize_peaks(const Mat& in) {
  const double peak = in.size() ? in.maxCoeff() : 0.0;
  if (!(peak > kFlatPeak)) return Mat::Zero(in.rows(), in.cols());
  const Mat m = in / peak;

  double sum = 0.0;
  std::size_t count = 0;
  bool skipped_global = false;
  for (Eigen::Index y = 0; y < m.rows(); ++y) {
    for (Eigen::Index x = 0; x < m.cols(); ++x) {
      const double v = m(y, x);
      if (v < kLocalMaxFloor) continue;
      bool is_max = true;
      for (Eigen::Index dy = -1; dy <= 1 && is_max; ++dy) {
        for (Eigen::Index dx = -1; dx <= 1; ++dx) {
          const Eigen::Index yy = y + dy;
          const Eigen::Index xx = x + dx;
          if ((dy || dx) && yy >= 0 && yy < m.rows() && xx >= 0 && xx < m.cols() && m(yy, xx) > v) {
            is_max = false;
            break;
          }
        }
      }
      if (!is_max) continue;
      if (!skipped_global && v == 1.0) {
        skipped_global = true;
        continue;
      }
      sum += v;
      ++count;
    }
  }
  const double mean = count ? sum / static_cast<double>(count) : 0.0;
  return m * ((1.0 - mean) * (1.0 - mean));
}

std::vector<Mat> pyramid(const Mat& base) {
  std::vector<Mat> levels{base};
  for (int l = 1; l < kLevels; ++l) levels.push_back(reduce(levels.back()));
  return levels;
}

// Sum of normalized center-surround maps, accumulated at input resolution.
Mat center_surround(const std::vector<Mat>& levels, Eigen::Index rows, Eigen::Index cols) {
  Mat acc = Mat::Zero(rows, cols);
  for (const auto& [c, s] : kCenterSurround) {
    const Mat& center = levels[static_cast<std::size_t>(c)];
    const Mat surround = resize(levels[static_cast<std::size_t>(s)], center.rows(), center.cols());
    const Mat diff = (center - surround).cwiseAbs();
    acc += resize(normalize_peaks(diff), rows, cols);
  }
  return acc;
}

}  // namespace

SaliencyMap itti_lite(const Image& img) {
  if (img.width() < 64 || img.height() < 64) {
    throw ContractViolation("itti_lite: image must be at least 64x64");
  }
  const Mat base = to_matrix(img);
  const Eigen::Index rows = base.rows();
  const Eigen::Index cols = base.cols();
  const std::vector<Mat> intensity = pyramid(base);

  const Mat intensity_map = normalize_peaks(center_surround(intensity, rows, cols));

  Mat orientation = Mat::Zero(rows, cols);
  for (int o = 0; o < 4; ++o) {
    const double theta = o * std::numbers::pi / 4.0;
    std::vector<Mat> levels;
    levels.reserve(intensity.size());
    for (const Mat& l : intensity) levels.push_back(oriented_gradient(l, theta));
    orientation += normalize_peaks(center_surround(levels, rows, cols));
  }
  const Mat orientation_map = normalize_peaks(orientation);

  const Mat combined = 0.5 * (intensity_map + orientation_map);
  if (!(combined.maxCoeff() > kFlatPeak)) return from_matrix(Mat::Zero(rows, cols));
  return from_matrix(normalize_min_max(combined));
}

}  // namespace rdl
