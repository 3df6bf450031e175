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
#include <string>
#include <vector>

#include <Eigen/Core>

#include "rdl/image_io.hpp"

namespace rdl {

// Tolerance on atom norms: every column must satisfy
// 1 - kAtomNormTol < ||d|| <= 1 + kAtomNormTol.
inline constexpr double kAtomNormTol = 1e-9;

// n x K matrix of unit-norm atoms.
class Dictionary {
 public:
  Dictionary() = default;
  // Validates the unit-norm invariant; throws ContractViolation otherwise.
  explicit Dictionary(Eigen::MatrixXd atoms);
  // Rescales every column to unit norm. Zero columns are a contract violation.
  static Dictionary normalized(Eigen::MatrixXd atoms);

  Eigen::Index n() const noexcept { return atoms_.rows(); }
  Eigen::Index K() const noexcept { return atoms_.cols(); }
  const Eigen::MatrixXd& atoms() const noexcept { return atoms_; }
  auto atom(Eigen::Index k) const { return atoms_.col(k); }

  friend bool operator==(const Dictionary& a, const Dictionary& b) {
    return a.atoms_.rows() == b.atoms_.rows() && a.atoms_.cols() == b.atoms_.cols() &&
           a.atoms_ == b.atoms_;
  }

 private:
  Eigen::MatrixXd atoms_;
};

struct SparseEntry {
  Eigen::Index atom = 0;
  double value = 0.0;
  friend bool operator==(const SparseEntry&, const SparseEntry&) = default;
};

// Entries sorted by strictly increasing atom index.
using SparseColumn = std::vector<SparseEntry>;

// K x N coefficient matrix stored column by column.
class SparseCodes {
 public:
  SparseCodes() = default;
  SparseCodes(Eigen::Index K, std::vector<SparseColumn> columns);
  // Keeps entries whose magnitude is strictly above threshold.
  static SparseCodes from_dense(const Eigen::MatrixXd& X, double threshold = 0.0);

  Eigen::Index K() const noexcept { return K_; }
  Eigen::Index N() const noexcept { return static_cast<Eigen::Index>(columns_.size()); }
  const SparseColumn& column(Eigen::Index j) const { return columns_[static_cast<std::size_t>(j)]; }
  const std::vector<SparseColumn>& columns() const noexcept { return columns_; }
  std::size_t nnz() const;
  Eigen::MatrixXd to_dense() const;
  // Sum of absolute coefficients.
  double l1_norm() const;

  friend bool operator==(const SparseCodes&, const SparseCodes&) = default;

 private:
  Eigen::Index K_ = 0;
  std::vector<SparseColumn> columns_;
};

// Computes W * X for any n x K matrix W (a dictionary or a reweighted one).
// Each output column accumulates its entries in ascending atom order.
Eigen::MatrixXd multiply(const Eigen::MatrixXd& W, const SparseCodes& X);

enum class CoderMode { omp, ista };

struct CoderConfig {
  CoderMode mode = CoderMode::omp;
  std::size_t T = 8;           // omp: max atoms per column
  double residual_tol = 1e-6;  // omp: stop when ||r||_2 <= residual_tol
  double alpha = 0.1;          // ista: l1 weight
  std::size_t max_iter = 200;  // ista
  double obj_tol = 1e-6;       // ista: relative objective change

  // Throws ContractViolation when a field is out of range.
  void validate() const;
};

std::string to_string(CoderMode mode);
CoderMode parse_coder_mode(const std::string& s);

// Greedy l0 coder. Holds the Gram matrix so many signals can share it.
class OmpCoder {
 public:
  explicit OmpCoder(const Dictionary& D);

  // Selects the atom with the largest |correlation| with the residual
  // (lowest index on ties), refits all selected coefficients by least
  // squares, and stops at T atoms or ||r|| <= residual_tol. A selection that
  // fails to reduce the residual (rank-deficient support) is dropped and the
  // loop ends.
  SparseColumn encode(const Eigen::VectorXd& y, std::size_t T, double residual_tol) const;

 private:
  const Dictionary* D_;
  Eigen::MatrixXd gram_;
};

SparseColumn omp(const Dictionary& D, const Eigen::VectorXd& y, std::size_t T,
                 double residual_tol = 1e-6);

// Largest eigenvalue of D^T D by power iteration.
double spectral_norm_squared(const Eigen::MatrixXd& D, int iterations = 30, double tol = 1e-8);

struct IstaResult {
  Eigen::VectorXd x;
  // objective[0] is the value at x = 0; one entry per iteration after that.
  std::vector<double> objective;
};

// Proximal gradient on ||y - Dx||^2 + alpha ||x||_1 with step 1/(2L).
class IstaCoder {
 public:
  explicit IstaCoder(const Dictionary& D);
  IstaResult encode(const Eigen::VectorXd& y, const CoderConfig& cfg) const;
  double lipschitz() const noexcept { return L_; }

 private:
  const Dictionary* D_;
  double L_;
};

IstaResult ista(const Dictionary& D, const Eigen::VectorXd& y, const CoderConfig& cfg);

double soft_threshold(double v, double t);

// Codes every column of Y independently. Output is bit-identical to calling
// the scalar coder column by column, whatever the thread count. In omp mode
// T is capped at min(n, K).
SparseCodes encode_all(const Dictionary& D, const PatchMatrix& Y, const CoderConfig& cfg);

// ||Y - DX||_F^2, plus alpha ||X||_1 in ista mode.
double objective(const Dictionary& D, const PatchMatrix& Y, const SparseCodes& X,
                 const CoderConfig& cfg);

}  // namespace rdl
