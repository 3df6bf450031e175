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

#include "rdl/rarity.hpp"

#include <cmath>

#include "rdl/error.hpp"

namespace rdl {

ActivationStats activation_stats(const SparseCodes& X) {
  ActivationStats s;
  const auto K = static_cast<std::size_t>(X.K());
  s.m.assign(K, 0);
  s.mass.assign(K, 0.0);
  s.N = static_cast<std::size_t>(X.N());
  for (const auto& col : X.columns()) {
    for (const auto& e : col) {
      const double a = std::abs(e.value);
      if (a <= kActivationThreshold) continue;
      const auto i = static_cast<std::size_t>(e.atom);
      ++s.m[i];
      s.mass[i] += a;
    }
  }
  return s;
}

std::string to_string(RarityKind kind) {
  switch (kind) {
    case RarityKind::count_fraction: return "count_fraction";
    case RarityKind::coeff_mass: return "coeff_mass";
    case RarityKind::neg_log_count: return "neg_log_count";
    case RarityKind::squared_count: return "squared_count";
  }
  return "?";
}

RarityKind parse_rarity_kind(const std::string& s) {
  for (auto k : {RarityKind::count_fraction, RarityKind::coeff_mass, RarityKind::neg_log_count,
                 RarityKind::squared_count}) {
    if (to_string(k) == s) return k;
  }
  throw ContractViolation("unknown rarity measure '" + s + "'");
}

RarityVector rarity(const ActivationStats& stats, const RarityMeasure& measure) {
  const double S = measure.S.value_or(static_cast<double>(stats.N));
  if (!(S > 0.0) || !std::isfinite(S)) throw ContractViolation("rarity: S must be > 0");
  if (!(measure.epsilon >= 0.0)) throw ContractViolation("rarity: epsilon must be >= 0");
  if (stats.mass.size() != stats.m.size()) throw ContractViolation("rarity: inconsistent stats");

  RarityVector R;
  R.values.resize(stats.m.size());
  for (std::size_t i = 0; i < stats.m.size(); ++i) {
    const auto m = static_cast<double>(stats.m[i]);
    double r = 0.0;
    switch (measure.kind) {
      case RarityKind::count_fraction: r = m / S; break;
      case RarityKind::coeff_mass: r = stats.mass[i] / S; break;
      case RarityKind::neg_log_count:
        r = std::max(0.0, -std::log((m + measure.epsilon * S) / S));
        break;
      case RarityKind::squared_count: {
        const double f = m / S;
        r = f * f;
        break;
      }
    }
    R.values[i] = r;
  }
  return R;
}

std::string to_string(TransformKind kind) {
  switch (kind) {
    case TransformKind::identity: return "identity";
    case TransformKind::sigmoid: return "sigmoid";
    case TransformKind::gamma: return "gamma";
    case TransformKind::affine: return "affine";
  }
  return "?";
}

TransformKind parse_transform_kind(const std::string& s) {
  for (auto k : {TransformKind::identity, TransformKind::sigmoid, TransformKind::gamma,
                 TransformKind::affine}) {
    if (to_string(k) == s) return k;
  }
  throw ContractViolation("unknown transform '" + s + "'");
}

RarityVector transform(const RarityVector& R, const TransformSpec& f) {
  if (f.kind == TransformKind::identity) return R;
  if (f.kind == TransformKind::gamma && !(f.g > 0.0)) {
    throw ContractViolation("transform: gamma exponent must be > 0");
  }
  RarityVector out;
  out.values.resize(R.size());
  for (std::size_t i = 0; i < R.size(); ++i) {
    const double r = R.values[i];
    double v = 0.0;
    switch (f.kind) {
      case TransformKind::sigmoid: v = 1.0 / (1.0 + std::exp(-f.a * (r - f.b))); break;
      case TransformKind::gamma: v = std::pow(r, f.g); break;
      case TransformKind::affine: v = std::max(0.0, f.scale * r + f.offset); break;
      case TransformKind::identity: v = r; break;
    }
    if (!std::isfinite(v)) throw ContractViolation("transform: non-finite output");
    out.values[i] = v;
  }
  return out;
}

Eigen::MatrixXd reweight_dictionary(const Dictionary& D, const RarityVector& weights) {
  if (static_cast<Eigen::Index>(weights.size()) != D.K()) {
    throw ContractViolation("reweight_dictionary: " + std::to_string(weights.size()) +
                            " weights for " + std::to_string(D.K()) + " atoms");
  }
  Eigen::MatrixXd out = D.atoms();
  for (Eigen::Index k = 0; k < out.cols(); ++k) out.col(k) *= weights.values[static_cast<std::size_t>(k)];
  return out;
}

}  // namespace rdl
