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

#include "rdl/coder.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Dense>

#include "rdl/error.hpp"

namespace rdl {

// ----------------------------------------------------------------------
// Dictionary / SparseCodes
// ----------------------------------------------------------------------

Dictionary::Dictionary(Eigen::MatrixXd atoms) : atoms_(std::move(atoms)) {
  if (atoms_.rows() == 0 || atoms_.cols() == 0) {
    throw ContractViolation("Dictionary: empty atom matrix");
  }
  for (Eigen::Index k = 0; k < atoms_.cols(); ++k) {
    const double norm = atoms_.col(k).norm();
    if (!(norm > 1.0 - kAtomNormTol && norm <= 1.0 + kAtomNormTol)) {
      throw ContractViolation("Dictionary: atom " + std::to_string(k) +
                              " is not unit norm (norm = " + std::to_string(norm) + ")");
    }
  }
}

Dictionary Dictionary::normalized(Eigen::MatrixXd atoms) {
  for (Eigen::Index k = 0; k < atoms.cols(); ++k) {
    const double norm = atoms.col(k).norm();
    if (!(norm > 0.0) || !std::isfinite(norm)) {
      throw ContractViolation("Dictionary::normalized: atom " + std::to_string(k) +
                              " has zero or non-finite norm");
    }
    atoms.col(k) /= norm;
  }
  return Dictionary(std::move(atoms));
}

SparseCodes::SparseCodes(Eigen::Index K, std::vector<SparseColumn> columns)
    : K_(K), columns_(std::move(columns)) {
  if (K_ < 0) throw ContractViolation("SparseCodes: negative K");
  for (std::size_t j = 0; j < columns_.size(); ++j) {
    const auto& col = columns_[j];
    for (std::size_t e = 0; e < col.size(); ++e) {
      if (col[e].atom < 0 || col[e].atom >= K_) {
        throw ContractViolation("SparseCodes: atom index out of range in column " +
                                std::to_string(j));
      }
      if (e > 0 && col[e].atom <= col[e - 1].atom) {
        throw ContractViolation("SparseCodes: indices not strictly increasing in column " +
                                std::to_string(j));
      }
    }
  }
}

SparseCodes SparseCodes::from_dense(const Eigen::MatrixXd& X, double threshold) {
  std::vector<SparseColumn> cols(static_cast<std::size_t>(X.cols()));
  for (Eigen::Index j = 0; j < X.cols(); ++j) {
    for (Eigen::Index k = 0; k < X.rows(); ++k) {
      if (std::abs(X(k, j)) > threshold) cols[static_cast<std::size_t>(j)].push_back({k, X(k, j)});
    }
  }
  return SparseCodes(X.rows(), std::move(cols));
}

std::size_t SparseCodes::nnz() const {
  std::size_t total = 0;
  for (const auto& c : columns_) total += c.size();
  return total;
}

Eigen::MatrixXd SparseCodes::to_dense() const {
  Eigen::MatrixXd X = Eigen::MatrixXd::Zero(K_, N());
  for (Eigen::Index j = 0; j < N(); ++j) {
    for (const auto& e : column(j)) X(e.atom, j) = e.value;
  }
  return X;
}

double SparseCodes::l1_norm() const {
  double total = 0.0;
  for (const auto& c : columns_) {
    for (const auto& e : c) total += std::abs(e.value);
  }
  return total;
}

Eigen::MatrixXd multiply(const Eigen::MatrixXd& W, const SparseCodes& X) {
  if (W.cols() != X.K()) {
    throw ContractViolation("multiply: dictionary has " + std::to_string(W.cols()) +
                            " atoms, codes expect " + std::to_string(X.K()));
  }
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(W.rows(), X.N());
  for (Eigen::Index j = 0; j < X.N(); ++j) {
    for (const auto& e : X.column(j)) {
      for (Eigen::Index i = 0; i < W.rows(); ++i) out(i, j) += e.value * W(i, e.atom);
    }
  }
  return out;
}

// ----------------------------------------------------------------------
// Config
// ----------------------------------------------------------------------

void CoderConfig::validate() const {
  if (T < 1) throw ContractViolation("CoderConfig: T must be >= 1");
  if (!(residual_tol > 0.0)) throw ContractViolation("CoderConfig: residual_tol must be > 0");
  if (!(alpha >= 0.0)) throw ContractViolation("CoderConfig: alpha must be >= 0");
  if (max_iter < 1) throw ContractViolation("CoderConfig: max_iter must be >= 1");
  if (!(obj_tol > 0.0)) throw ContractViolation("CoderConfig: obj_tol must be > 0");
}

std::string to_string(CoderMode mode) { return mode == CoderMode::omp ? "omp" : "ista"; }

CoderMode parse_coder_mode(const std::string& s) {
  if (s == "omp") return CoderMode::omp;
  if (s == "ista") return CoderMode::ista;
  throw ContractViolation("unknown coder mode '" + s + "'");
}

// ----------------------------------------------------------------------
// OMP
// ----------------------------------------------------------------------

OmpCoder::OmpCoder(const Dictionary& D) : D_(&D), gram_(D.atoms().transpose() * D.atoms()) {}

SparseColumn OmpCoder::encode(const Eigen::VectorXd& y, std::size_t T, double residual_tol) const {
  const Eigen::MatrixXd& D = D_->atoms();
  if (y.size() != D.rows()) {
    throw ContractViolation("omp: signal length " + std::to_string(y.size()) +
                            " != dictionary dimension " + std::to_string(D.rows()));
  }
  if (T < 1 || T > static_cast<std::size_t>(std::min(D.rows(), D.cols()))) {
    throw ContractViolation("omp: T must be in [1, min(n, K)]");
  }

  double res_norm = y.norm();
  if (res_norm <= residual_tol) return {};

  const Eigen::VectorXd dty = D.transpose() * y;
  Eigen::VectorXd corr = dty;
  std::vector<Eigen::Index> support;
  std::vector<char> selected(static_cast<std::size_t>(D.cols()), 0);
  Eigen::VectorXd coef;

  while (support.size() < T) {
    Eigen::Index best = -1;
    double best_abs = 0.0;
    for (Eigen::Index k = 0; k < corr.size(); ++k) {
      if (selected[static_cast<std::size_t>(k)]) continue;
      const double a = std::abs(corr[k]);
      if (a > best_abs) {
        best_abs = a;
        best = k;
      }
    }
    // Residual is orthogonal to every remaining atom.
    if (best < 0 || best_abs <= 1e-14 * res_norm) break;

    support.push_back(best);
    const auto s = static_cast<Eigen::Index>(support.size());
    Eigen::MatrixXd g_ss(s, s);
    Eigen::VectorXd b(s);
    Eigen::MatrixXd d_s(D.rows(), s);
    for (Eigen::Index a = 0; a < s; ++a) {
      b[a] = dty[support[a]];
      d_s.col(a) = D.col(support[a]);
      for (Eigen::Index c = 0; c < s; ++c) g_ss(a, c) = gram_(support[a], support[c]);
    }
    // Minimum-norm solution of the normal equations; equals the pseudoinverse
    // fit when the selected atoms are linearly dependent.
    Eigen::VectorXd trial = g_ss.completeOrthogonalDecomposition().solve(b);
    const Eigen::VectorXd residual = y - d_s * trial;
    const double trial_norm = residual.norm();
    if (!(trial_norm < res_norm)) {
      support.pop_back();
      break;
    }
    selected[static_cast<std::size_t>(best)] = 1;
    coef = std::move(trial);
    res_norm = trial_norm;

    corr = dty;
    for (Eigen::Index a = 0; a < s; ++a) corr -= coef[a] * gram_.col(support[a]);
    if (res_norm <= residual_tol) break;
  }

  SparseColumn out;
  out.reserve(support.size());
  for (std::size_t a = 0; a < support.size(); ++a) {
    out.push_back({support[a], coef[static_cast<Eigen::Index>(a)]});
  }
  std::sort(out.begin(), out.end(),
            [](const SparseEntry& l, const SparseEntry& r) { return l.atom < r.atom; });
  return out;
}

SparseColumn omp(const Dictionary& D, const Eigen::VectorXd& y, std::size_t T,
                 double residual_tol) {
  return OmpCoder(D).encode(y, T, residual_tol);
}

// ----------------------------------------------------------------------
// ISTA
// ----------------------------------------------------------------------

double soft_threshold(double v, double t) {
  if (v > t) return v - t;
  if (v < -t) return v + t;
  return 0.0;
}

double spectral_norm_squared(const Eigen::MatrixXd& D, int iterations, double tol) {
  Eigen::VectorXd v = Eigen::VectorXd::Ones(D.cols()) / std::sqrt(static_cast<double>(D.cols()));
  double lambda = (D * v).squaredNorm();
  for (int it = 0; it < iterations; ++it) {
    Eigen::VectorXd w = D.transpose() * (D * v);
    const double wn = w.norm();
    if (wn == 0.0) break;
    v = w / wn;
    const double next = (D * v).squaredNorm();
    const bool converged = std::abs(next - lambda) <= tol * std::max(next, 1e-300);
    lambda = next;
    if (converged) break;
  }
  return lambda;
}

IstaCoder::IstaCoder(const Dictionary& D) : D_(&D), L_(spectral_norm_squared(D.atoms())) {}

IstaResult IstaCoder::encode(const Eigen::VectorXd& y, const CoderConfig& cfg) const {
  const Eigen::MatrixXd& D = D_->atoms();
  if (y.size() != D.rows()) {
    throw ContractViolation("ista: signal length mismatch");
  }
  if (!(cfg.alpha >= 0.0)) throw ContractViolation("ista: alpha must be >= 0");

  IstaResult result;
  result.x = Eigen::VectorXd::Zero(D.cols());
  Eigen::VectorXd r = -y;  // D x - y
  double obj = r.squaredNorm();
  result.objective.push_back(obj);
  if (obj == 0.0 || L_ <= 0.0) return result;

  const double step = 1.0 / (2.0 * L_);
  const double thresh = step * cfg.alpha;
  for (std::size_t it = 0; it < cfg.max_iter; ++it) {
    const Eigen::VectorXd grad = 2.0 * (D.transpose() * r);
    Eigen::VectorXd next(result.x.size());
    for (Eigen::Index k = 0; k < next.size(); ++k) {
      next[k] = soft_threshold(result.x[k] - step * grad[k], thresh);
    }
    Eigen::VectorXd next_r = D * next - y;
    const double next_obj = next_r.squaredNorm() + cfg.alpha * next.lpNorm<1>();
    // Guards against round-off when the iterate has stalled.
    if (next_obj > obj) break;
    result.x = std::move(next);
    r = std::move(next_r);
    const double change = obj - next_obj;
    obj = next_obj;
    result.objective.push_back(obj);
    if (obj == 0.0 || change <= cfg.obj_tol * obj) break;
  }
  return result;
}

IstaResult ista(const Dictionary& D, const Eigen::VectorXd& y, const CoderConfig& cfg) {
  return IstaCoder(D).encode(y, cfg);
}

// ----------------------------------------------------------------------
// Batch
// ----------------------------------------------------------------------

SparseCodes encode_all(const Dictionary& D, const PatchMatrix& Y, const CoderConfig& cfg) {
  cfg.validate();
  if (Y.rows() != D.n()) {
    throw ContractViolation("encode_all: patch dimension " + std::to_string(Y.rows()) +
                            " != dictionary dimension " + std::to_string(D.n()));
  }
  const Eigen::Index N = Y.cols();
  std::vector<SparseColumn> cols(static_cast<std::size_t>(N));

  if (cfg.mode == CoderMode::omp) {
    const OmpCoder coder(D);
    const std::size_t T = std::min<std::size_t>(cfg.T, static_cast<std::size_t>(std::min(D.n(), D.K())));
#pragma omp parallel for schedule(static)
    for (Eigen::Index j = 0; j < N; ++j) {
      const Eigen::VectorXd y = Y.col(j);
      cols[static_cast<std::size_t>(j)] = coder.encode(y, T, cfg.residual_tol);
    }
  } else {
    const IstaCoder coder(D);
#pragma omp parallel for schedule(static)
    for (Eigen::Index j = 0; j < N; ++j) {
      const Eigen::VectorXd y = Y.col(j);
      const IstaResult res = coder.encode(y, cfg);
      SparseColumn& col = cols[static_cast<std::size_t>(j)];
      for (Eigen::Index k = 0; k < res.x.size(); ++k) {
        if (res.x[k] != 0.0) col.push_back({k, res.x[k]});
      }
    }
  }
  return SparseCodes(D.K(), std::move(cols));
}

double objective(const Dictionary& D, const PatchMatrix& Y, const SparseCodes& X,
                 const CoderConfig& cfg) {
  const double fit = (Y - multiply(D.atoms(), X)).squaredNorm();
  return cfg.mode == CoderMode::ista ? fit + cfg.alpha * X.l1_norm() : fit;
}

}  // namespace rdl
