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

#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "rdl/coder.hpp"
#include "rdl/error.hpp"

using namespace rdl;

namespace {

Eigen::VectorXd dense(const SparseColumn& c, Eigen::Index K) {
  Eigen::VectorXd x = Eigen::VectorXd::Zero(K);
  for (const auto& e : c) x[e.atom] = e.value;
  return x;
}

Eigen::MatrixXd random_matrix(Eigen::Index r, Eigen::Index c, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  Eigen::MatrixXd m(r, c);
  for (Eigen::Index j = 0; j < c; ++j)
    for (Eigen::Index i = 0; i < r; ++i) m(i, j) = g(rng);
  return m;
}

}  // namespace

TEST_CASE("Dictionary enforces unit-norm atoms") {
  Eigen::MatrixXd m(2, 2);
  m << 1, 0, 0, 2;
  CHECK_THROWS_AS(Dictionary{m}, ContractViolation);
  const Dictionary d = Dictionary::normalized(m);
  CHECK(d.atom(1).norm() == doctest::Approx(1.0));
  Eigen::MatrixXd z = Eigen::MatrixXd::Zero(2, 1);
  CHECK_THROWS_AS(Dictionary::normalized(z), ContractViolation);
}

TEST_CASE("SparseCodes validates column ordering") {
  CHECK_THROWS_AS(SparseCodes(3, {{{1, 1.0}, {0, 1.0}}}), ContractViolation);
  CHECK_THROWS_AS(SparseCodes(3, {{{3, 1.0}}}), ContractViolation);
  Eigen::MatrixXd X(3, 2);
  X << 0, 1, 2, 0, 0, -3;
  const SparseCodes s = SparseCodes::from_dense(X);
  CHECK(s.nnz() == 3);
  CHECK(s.to_dense() == X);
  CHECK(s.l1_norm() == 6.0);
}

TEST_CASE("omp on the identity dictionary") {
  const Dictionary D(Eigen::MatrixXd::Identity(2, 2));
  Eigen::VectorXd y(2);
  y << 3, 0;
  const SparseColumn c = omp(D, y, 1);
  REQUIRE(c.size() == 1);
  CHECK(c[0].atom == 0);
  CHECK(c[0].value == 3.0);
}

TEST_CASE("omp matches exhaustive 1-sparse search") {
  Eigen::MatrixXd m(2, 3);
  const double h = 1.0 / std::sqrt(2.0);
  m << 1, 0, h, 0, 1, h;
  const Dictionary D(m);
  Eigen::VectorXd y(2);
  y << 1, 1;
  const auto best = oracle::best_one_sparse(m, y);
  const SparseColumn c = omp(D, y, 1);
  REQUIRE(c.size() == 1);
  CHECK(c[0].atom == best.support[0]);
  CHECK(c[0].atom == 2);
  CHECK(c[0].value == doctest::Approx(best.coef[0]).epsilon(1e-12));
  CHECK(c[0].value == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
  CHECK(best.residual < 1e-12);
}

TEST_CASE("omp recovers a planted two-atom signal") {
  const Eigen::MatrixXd m = oracle::incoherent_gaussian_dictionary(16, 32, 1.0 / 3.0, 99);
  const Dictionary D(m);
  const Eigen::VectorXd y = 1.5 * m.col(4) - 0.0 * m.col(0) + 1.25 * m.col(20);
  const auto best = oracle::best_two_sparse(m, y);
  const SparseColumn c = omp(D, y, 2, 0.0);
  REQUIRE(c.size() == 2);
  CHECK(c[0].atom == best.support[0]);
  CHECK(c[1].atom == best.support[1]);
  CHECK(c[0].value == doctest::Approx(1.5).epsilon(1e-10));
  CHECK(c[1].value == doctest::Approx(1.25).epsilon(1e-10));
}

TEST_CASE("omp rejects out-of-range T") {
  const Dictionary D(Eigen::MatrixXd::Identity(3, 3));
  const Eigen::VectorXd y = Eigen::VectorXd::Ones(3);
  CHECK_THROWS_AS(omp(D, y, 0), ContractViolation);
  CHECK_THROWS_AS(omp(D, y, 4), ContractViolation);
  CHECK_THROWS_AS(omp(D, Eigen::VectorXd::Ones(2), 1), ContractViolation);
}

TEST_CASE("omp properties on random dictionaries") {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 60; ++trial) {
    const Eigen::Index n = 4 + static_cast<Eigen::Index>(rng() % 13);
    const Eigen::Index K = n + static_cast<Eigen::Index>(rng() % 20);
    const Eigen::MatrixXd m = oracle::gaussian_dictionary(n, K, rng());
    const Dictionary D(m);
    const Eigen::VectorXd y = random_matrix(n, 1, rng).col(0);
    const std::size_t T = 1 + rng() % static_cast<std::size_t>(n);
    const SparseColumn c = omp(D, y, T, 0.0);
    CHECK(c.size() <= T);
    for (std::size_t i = 1; i < c.size(); ++i) CHECK(c[i - 1].atom < c[i].atom);

    const Eigen::VectorXd r = y - m * dense(c, K);
    // Least-squares refit: residual orthogonal to every selected atom.
    for (const auto& e : c) CHECK(std::abs(m.col(e.atom).dot(r)) < 1e-8);
    // Never worse than the best single atom once at least one atom is used.
    if (!c.empty()) CHECK(r.norm() <= oracle::best_one_sparse(m, y).residual + 1e-10);

    // Residual is nonincreasing in T.
    double prev = y.norm();
    for (std::size_t t = 1; t <= T; ++t) {
      const double rn = (y - m * dense(omp(D, y, t, 0.0), K)).norm();
      CHECK(rn <= prev + 1e-12);
      prev = rn;
    }
  }
}

TEST_CASE("omp stops at the residual tolerance") {
  const Dictionary D(Eigen::MatrixXd::Identity(4, 4));
  Eigen::VectorXd y(4);
  y << 5, 0, 0, 1e-9;
  const SparseColumn c = omp(D, y, 4, 1e-6);
  CHECK(c.size() == 1);
}

TEST_CASE("soft_threshold") {
  CHECK(soft_threshold(3.0, 1.0) == 2.0);
  CHECK(soft_threshold(-3.0, 1.0) == -2.0);
  CHECK(soft_threshold(0.5, 1.0) == 0.0);
}

TEST_CASE("ista closed forms") {
  const Dictionary D(Eigen::MatrixXd::Identity(1, 1));
  CoderConfig cfg;
  cfg.mode = CoderMode::ista;
  cfg.alpha = 1.0;
  cfg.max_iter = 2000;
  cfg.obj_tol = 0.0;
  Eigen::VectorXd y(1);
  y << 3.0;
  // argmin (3 - x)^2 + |x| = 2.5
  CHECK(ista(D, y, cfg).x[0] == doctest::Approx(2.5).epsilon(1e-9));
  y << 0.0;
  CHECK(ista(D, y, cfg).x[0] == 0.0);
}

TEST_CASE("ista agrees with coordinate descent") {
  std::mt19937_64 rng(8);
  for (double alpha : {0.1, 0.5}) {
    for (int trial = 0; trial < 10; ++trial) {
      const Eigen::MatrixXd m = oracle::gaussian_dictionary(8, 12, rng());
      const Dictionary D(m);
      const Eigen::VectorXd y = random_matrix(8, 1, rng).col(0);
      CoderConfig cfg;
      cfg.mode = CoderMode::ista;
      cfg.alpha = alpha;
      cfg.max_iter = 20000;
      cfg.obj_tol = 1e-14;
      const IstaResult res = ista(D, y, cfg);
      const Eigen::VectorXd ref = oracle::lasso_coordinate_descent(m, y, alpha);
      CHECK((res.x - ref).lpNorm<Eigen::Infinity>() < 1e-4);
      CHECK(oracle::lasso_objective(m, y, res.x, alpha) ==
            doctest::Approx(oracle::lasso_objective(m, y, ref, alpha)).epsilon(1e-8));
    }
  }
}

TEST_CASE("ista objective is monotone") {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 30; ++trial) {
    const Eigen::MatrixXd m = oracle::gaussian_dictionary(10, 20, rng());
    const Dictionary D(m);
    const Eigen::VectorXd y = random_matrix(10, 1, rng).col(0);
    CoderConfig cfg;
    cfg.mode = CoderMode::ista;
    cfg.alpha = 0.05 + 0.5 * static_cast<double>(rng() % 100) / 100.0;
    const IstaResult res = ista(D, y, cfg);
    REQUIRE(!res.objective.empty());
    CHECK(res.objective.front() == doctest::Approx(y.squaredNorm()));
    for (std::size_t i = 1; i < res.objective.size(); ++i) {
      CHECK(res.objective[i] <= res.objective[i - 1] * (1 + 1e-12));
    }
  }
}

TEST_CASE("spectral norm against a symmetric eigensolver bound") {
  Eigen::MatrixXd m(2, 2);
  m << 1, 0, 0, 1;
  CHECK(spectral_norm_squared(m) == doctest::Approx(1.0));
  const double h = 1.0 / std::sqrt(2.0);
  Eigen::MatrixXd c(2, 2);
  c << 1, h, 0, h;
  // Gram [[1,h],[h,1]] has top eigenvalue 1 + h.
  CHECK(spectral_norm_squared(c) == doctest::Approx(1.0 + h).epsilon(1e-6));
}

TEST_CASE("encode_all agrees with the scalar coders") {
  std::mt19937_64 rng(5);
  const Eigen::MatrixXd m = oracle::gaussian_dictionary(12, 20, 77);
  const Dictionary D(m);
  const Eigen::MatrixXd Y = random_matrix(12, 40, rng);

  CoderConfig omp_cfg;
  omp_cfg.T = 3;
  const SparseCodes X = encode_all(D, Y, omp_cfg);
  REQUIRE(X.N() == 40);
  for (Eigen::Index j = 0; j < Y.cols(); ++j) {
    CHECK(X.column(j) == omp(D, Y.col(j), 3, omp_cfg.residual_tol));
  }

  CoderConfig ista_cfg;
  ista_cfg.mode = CoderMode::ista;
  const SparseCodes Xi = encode_all(D, Y, ista_cfg);
  for (Eigen::Index j = 0; j < Y.cols(); ++j) {
    CHECK(Xi.column(j) == SparseCodes::from_dense(ista(D, Y.col(j), ista_cfg).x).column(0));
  }

  // Column permutation permutes the code columns.
  Eigen::MatrixXd Yr = Y.rowwise().reverse();
  const SparseCodes Xr = encode_all(D, Yr, omp_cfg);
  for (Eigen::Index j = 0; j < Y.cols(); ++j) CHECK(Xr.column(j) == X.column(Y.cols() - 1 - j));

  CHECK(encode_all(D, Y, omp_cfg) == X);
}

TEST_CASE("encode_all of the dictionary itself with T=1 is the identity") {
  const Eigen::MatrixXd m = oracle::gaussian_dictionary(8, 8, 3);
  const Dictionary D(m);
  CoderConfig cfg;
  cfg.T = 1;
  const SparseCodes X = encode_all(D, m, cfg);
  const Eigen::MatrixXd Xd = X.to_dense();
  CHECK((Xd - Eigen::MatrixXd::Identity(8, 8)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("encode_all caps T at min(n, K)") {
  const Dictionary D(Eigen::MatrixXd::Identity(3, 3));
  CoderConfig cfg;
  cfg.T = 8;
  const SparseCodes X = encode_all(D, Eigen::MatrixXd::Ones(3, 2), cfg);
  CHECK(X.column(0).size() == 3);
}

TEST_CASE("multiply and objective") {
  std::mt19937_64 rng(1);
  const Eigen::MatrixXd m = oracle::gaussian_dictionary(6, 9, 10);
  const Dictionary D(m);
  Eigen::MatrixXd Xd = Eigen::MatrixXd::Zero(9, 5);
  Xd(0, 0) = 1;
  Xd(3, 0) = -2;
  Xd(8, 4) = 0.5;
  const SparseCodes X = SparseCodes::from_dense(Xd);
  CHECK((multiply(m, X) - m * Xd).cwiseAbs().maxCoeff() < 1e-14);
  const Eigen::MatrixXd Y = random_matrix(6, 5, rng);
  CoderConfig cfg;
  CHECK(objective(D, Y, X, cfg) == doctest::Approx((Y - m * Xd).squaredNorm()));
  cfg.mode = CoderMode::ista;
  cfg.alpha = 0.3;
  CHECK(objective(D, Y, X, cfg) == doctest::Approx((Y - m * Xd).squaredNorm() + 0.3 * 3.5));
}

TEST_CASE("CoderConfig validation and parsing") {
  CoderConfig c;
  c.T = 0;
  CHECK_THROWS_AS(c.validate(), ContractViolation);
  c = {};
  c.alpha = -1;
  CHECK_THROWS_AS(c.validate(), ContractViolation);
  CHECK(parse_coder_mode("ista") == CoderMode::ista);
  CHECK(to_string(CoderMode::omp) == "omp");
  CHECK_THROWS(parse_coder_mode("lars"));
}
