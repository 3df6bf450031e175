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

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "rdl/coder.hpp"

namespace rdl {

// Coefficients at or below this magnitude do not count as activations.
inline constexpr double kActivationThreshold = 1e-12;

// Per-atom activation statistics of a code matrix.
struct ActivationStats {
  std::vector<std::size_t> m;  // nonzero count in row i of X
  std::vector<double> mass;    // sum_j |X_ij|, accumulated in ascending column order
  std::size_t N = 0;
};

ActivationStats activation_stats(const SparseCodes& X);

enum class RarityKind { count_fraction, coeff_mass, neg_log_count, squared_count };

struct RarityMeasure {
  RarityKind kind = RarityKind::count_fraction;
  std::optional<double> S;  // scale constant; defaults to N
  double epsilon = 1e-12;   // smoothing for neg_log_count
};

std::string to_string(RarityKind kind);
RarityKind parse_rarity_kind(const std::string& s);

// Nonnegative, finite per-atom scores.
struct RarityVector {
  std::vector<double> values;
  std::size_t size() const noexcept { return values.size(); }
  friend bool operator==(const RarityVector&, const RarityVector&) = default;
};

//   count_fraction  m_i / S
//   coeff_mass      mass_i / S
//   neg_log_count   max(0, -log((m_i + eps*S) / S))
//   squared_count   (m_i / S)^2
RarityVector rarity(const ActivationStats& stats, const RarityMeasure& measure);

enum class TransformKind { identity, sigmoid, gamma, affine };

struct TransformSpec {
  TransformKind kind = TransformKind::sigmoid;
  double a = -50.0;  // sigmoid slope; negative favours rarely used atoms
  double b = 0.05;   // sigmoid center
  double g = 1.0;    // gamma exponent
  double scale = 1.0;
  double offset = 0.0;
};

std::string to_string(TransformKind kind);
TransformKind parse_transform_kind(const std::string& s);

RarityVector transform(const RarityVector& R, const TransformSpec& f);

// Column i of the result is weights[i] * d_i; no renormalization.
Eigen::MatrixXd reweight_dictionary(const Dictionary& D, const RarityVector& weights);

}  // namespace rdl
