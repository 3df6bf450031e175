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

#include "rdl/ksvd.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "rdl/error.hpp"

namespace rdl {

std::string to_string(InitMode mode) {
  return mode == InitMode::sample_patches ? "sample_patches" : "random_gaussian";
}

InitMode parse_init_mode(const std::string& s) {
  if (s == "sample_patches") return InitMode::sample_patches;
  if (s == "random_gaussian") return InitMode::random_gaussian;
  throw ContractViolation("unknown init mode '" + s + "'");
}

void LearnConfig::validate() const {
  if (K < 1) throw ContractViolation("LearnConfig: K must be >= 1");
  if (iters < 1) throw ContractViolation("LearnConfig: iters must be >= 1");
  coder.validate();
}

namespace {

Eigen::VectorXd gaussian_unit(Eigen::Index n, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::VectorXd v(n);
  do {
    for (Eigen::Index i = 0; i < n; ++i) v[i] = normal(rng);
  } while (v.norm() == 0.0);
  return v / v.norm();
}

}  // namespace

Dictionary init_dictionary(const PatchMatrix& Y, std::size_t K, std::uint64_t seed,
                           InitMode init) {
  if (Y.rows() == 0 || Y.cols() == 0) throw ContractViolation("init_dictionary: empty Y");
  if (K < 1) throw ContractViolation("init_dictionary: K must be >= 1");
  std::mt19937_64 rng(seed);
  const Eigen::Index n = Y.rows();
  const auto Kx = static_cast<Eigen::Index>(K);
  Eigen::MatrixXd atoms(n, Kx);

  if (init == InitMode::random_gaussian) {
    for (Eigen::Index k = 0; k < Kx; ++k) atoms.col(k) = gaussian_unit(n, rng);
    return Dictionary(std::move(atoms));
  }

  const auto N = static_cast<std::size_t>(Y.cols());
  std::vector<std::size_t> order(N);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::vector<std::size_t> picks;
  picks.reserve(K);
  // Partial Fisher-Yates: the first min(N, K) entries become a uniform
  // sample without replacement.
  const std::size_t distinct = std::min(N, K);
  for (std::size_t i = 0; i < distinct; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, N - 1);
    std::swap(order[i], order[pick(rng)]);
    picks.push_back(order[i]);
  }
  std::uniform_int_distribution<std::size_t> any(0, N - 1);
  while (picks.size() < K) picks.push_back(any(rng));

  for (Eigen::Index k = 0; k < Kx; ++k) {
    const auto col = Y.col(static_cast<Eigen::Index>(picks[static_cast<std::size_t>(k)]));
    const double norm = col.norm();
    if (norm > 0.0 && std::isfinite(norm)) {
      atoms.col(k) = col / norm;
    } else {
      atoms.col(k) = gaussian_unit(n, rng);
    }
  }
  return Dictionary(std::move(atoms));
}

UpdateResult ksvd_update(const Dictionary& D, const SparseCodes& X, const PatchMatrix& Y) {
  if (D.n() != Y.rows() || D.K() != X.K() || X.N() != Y.cols()) {
    throw ContractViolation("ksvd_update: inconsistent dimensions");
  }
  constexpr int kPowerIters = 100;
  constexpr double kPowerTol = 1e-10;

  Eigen::MatrixXd atoms = D.atoms();
  std::vector<SparseColumn> cols = X.columns();
  Eigen::MatrixXd R = Y - multiply(atoms, X);

  // For each atom, the (column, slot) positions where it is used.
  struct Use {
    Eigen::Index col;
    std::size_t slot;
  };
  std::vector<std::vector<Use>> uses(static_cast<std::size_t>(D.K()));
  for (Eigen::Index j = 0; j < X.N(); ++j) {
    const auto& c = cols[static_cast<std::size_t>(j)];
    for (std::size_t s = 0; s < c.size(); ++s) {
      if (c[s].value != 0.0) uses[static_cast<std::size_t>(c[s].atom)].push_back({j, s});
    }
  }

  const Eigen::Index n = D.n();
  for (Eigen::Index k = 0; k < D.K(); ++k) {
    const auto& omega = uses[static_cast<std::size_t>(k)];
    if (omega.empty()) continue;
    const auto m = static_cast<Eigen::Index>(omega.size());

    // Restricted residual with atom k's contribution added back.
    Eigen::MatrixXd E(n, m);
    for (Eigen::Index c = 0; c < m; ++c) {
      const Use& u = omega[static_cast<std::size_t>(c)];
      const double x = cols[static_cast<std::size_t>(u.col)][u.slot].value;
      E.col(c) = R.col(u.col) + x * atoms.col(k);
    }

    const Eigen::MatrixXd M = E * E.transpose();
    Eigen::VectorXd v = atoms.col(k);
    if ((M * v).norm() == 0.0) {
      Eigen::Index widest = 0;
      const double widest_norm = E.colwise().squaredNorm().maxCoeff(&widest);
      if (widest_norm == 0.0) {
        // Y restricted to omega is already explained without atom k.
        for (const Use& u : omega) cols[static_cast<std::size_t>(u.col)][u.slot].value = 0.0;
        continue;
      }
      v = E.col(widest).normalized();
    }
    for (int it = 0; it < kPowerIters; ++it) {
      Eigen::VectorXd w = M * v;
      const double wn = w.norm();
      if (wn == 0.0) break;
      w /= wn;
      const double delta = (w - v).norm();
      v = std::move(w);
      if (delta < kPowerTol) break;
    }
    v.normalize();

    for (Eigen::Index i = 0; i < n; ++i) {
      if (v[i] != 0.0) {
        if (v[i] < 0.0) v = -v;
        break;
      }
    }

    const Eigen::VectorXd coeffs = E.transpose() * v;
    atoms.col(k) = v;
    for (Eigen::Index c = 0; c < m; ++c) {
      const Use& u = omega[static_cast<std::size_t>(c)];
      cols[static_cast<std::size_t>(u.col)][u.slot].value = coeffs[c];
      R.col(u.col) = E.col(c) - coeffs[c] * v;
    }
  }

  for (auto& c : cols) {
    c.erase(std::remove_if(c.begin(), c.end(), [](const SparseEntry& e) { return e.value == 0.0; }),
            c.end());
  }
  return {Dictionary(std::move(atoms)), SparseCodes(X.K(), std::move(cols))};
}

std::size_t replace_unused_atoms(Dictionary& D, const SparseCodes& X, const PatchMatrix& Y,
                                 std::uint64_t seed) {
  if (D.K() != X.K() || X.N() != Y.cols() || D.n() != Y.rows()) {
    throw ContractViolation("replace_unused_atoms: inconsistent dimensions");
  }
  std::vector<char> used(static_cast<std::size_t>(D.K()), 0);
  for (const auto& c : X.columns()) {
    for (const auto& e : c) {
      if (e.value != 0.0) used[static_cast<std::size_t>(e.atom)] = 1;
    }
  }
  if (std::all_of(used.begin(), used.end(), [](char u) { return u != 0; })) return 0;

  const Eigen::MatrixXd R = Y - multiply(D.atoms(), X);
  const Eigen::VectorXd err = R.colwise().squaredNorm().transpose();
  std::vector<Eigen::Index> order(static_cast<std::size_t>(Y.cols()));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index a, Eigen::Index b) { return err[a] > err[b]; });

  std::mt19937_64 rng(seed);
  Eigen::MatrixXd atoms = D.atoms();
  std::size_t next = 0;
  std::size_t replaced = 0;
  for (Eigen::Index k = 0; k < D.K(); ++k) {
    if (used[static_cast<std::size_t>(k)]) continue;
    bool done = false;
    while (!done && next < order.size()) {
      const auto col = Y.col(order[next++]);
      const double norm = col.norm();
      if (norm > 0.0) {
        atoms.col(k) = col / norm;
        done = true;
      }
    }
    if (!done) atoms.col(k) = gaussian_unit(D.n(), rng);
    ++replaced;
  }
  D = Dictionary(std::move(atoms));
  return replaced;
}

LearnResult learn(const PatchMatrix& Y, const LearnConfig& cfg) {
  cfg.validate();
  if (Y.rows() < 1 || Y.cols() < 1) throw ContractViolation("learn: empty patch matrix");

  LearnResult out;
  Dictionary D = init_dictionary(Y, cfg.K, cfg.seed, cfg.init);
  SparseCodes X;
  for (std::size_t it = 0; it < cfg.iters; ++it) {
    X = encode_all(D, Y, cfg.coder);
    out.report.sweep_error_before.push_back((Y - multiply(D.atoms(), X)).squaredNorm());
    UpdateResult upd = ksvd_update(D, X, Y);
    D = std::move(upd.dictionary);
    X = std::move(upd.codes);
    out.report.sweep_error_after.push_back((Y - multiply(D.atoms(), X)).squaredNorm());
    out.report.atoms_replaced_per_iter.push_back(
        replace_unused_atoms(D, X, Y, cfg.seed ^ (0x9e3779b97f4a7c15ULL * (it + 1))));
    out.report.objective_per_iter.push_back(objective(D, Y, X, cfg.coder));
  }
  out.report.final_psnr = psnr(multiply(D.atoms(), X), Y);
  out.dictionary = std::move(D);
  out.codes = std::move(X);
  return out;
}

}  // namespace rdl
