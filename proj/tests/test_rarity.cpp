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
#include <algorithm>
#include <numeric>
#include <random>

#include "oracles.hpp"
#include "rdl/error.hpp"
#include "rdl/rarity.hpp"

using namespace rdl;

namespace {

SparseCodes random_codes(Eigen::Index K, Eigen::Index N, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  Eigen::MatrixXd X = Eigen::MatrixXd::Zero(K, N);
  for (Eigen::Index j = 0; j < N; ++j) {
    for (Eigen::Index i = 0; i < K; ++i) {
      // Skewed usage so some atoms are rare and some unused.
      if (rng() % static_cast<std::uint64_t>(2 + 3 * i) == 0) X(i, j) = u(rng);
    }
  }
  return SparseCodes::from_dense(X);
}

}  // namespace

TEST_CASE("activation statistics on a small example") {
  Eigen::MatrixXd X(3, 4);
  X << 1, 0, 2, 0,
       0, 0, 0, 0,
       -1, 1, 1, 1e-13;
  const ActivationStats s = activation_stats(SparseCodes::from_dense(X));
  CHECK(s.N == 4);
  CHECK(s.m == std::vector<std::size_t>{2, 0, 3});
  CHECK(s.mass[0] == 3.0);
  CHECK(s.mass[2] == doctest::Approx(3.0));

  const RarityVector cf = rarity(s, {RarityKind::count_fraction});
  CHECK(cf.values == std::vector<double>{0.5, 0.0, 0.75});
  const RarityVector sq = rarity(s, {RarityKind::squared_count});
  CHECK(sq.values[0] == 0.25);
  CHECK(sq.values[2] == 0.5625);
  const RarityVector cm = rarity(s, {RarityKind::coeff_mass});
  CHECK(cm.values[0] == 0.75);
  const RarityVector nl = rarity(s, {RarityKind::neg_log_count});
  CHECK(nl.values[0] == doctest::Approx(std::log(2.0)));
  CHECK(nl.values[1] == doctest::Approx(-std::log(1e-12)));
  CHECK(nl.values[2] == doctest::Approx(-std::log(0.75)));
  RarityMeasure scaled{RarityKind::count_fraction, 2.0};
  CHECK(rarity(s, scaled).values[2] == 1.5);
}

TEST_CASE("activation counts match a dense recount") {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 30; ++trial) {
    const Eigen::Index K = 1 + static_cast<Eigen::Index>(rng() % 20);
    const Eigen::Index N = 1 + static_cast<Eigen::Index>(rng() % 50);
    const SparseCodes X = random_codes(K, N, rng);
    const ActivationStats s = activation_stats(X);
    CHECK(s.m == oracle::dense_row_counts(X.to_dense(), kActivationThreshold));
    const Eigen::VectorXd mass = X.to_dense().cwiseAbs().rowwise().sum();
    for (Eigen::Index i = 0; i < K; ++i) CHECK(s.mass[static_cast<std::size_t>(i)] == doctest::Approx(mass[i]));
  }
}

TEST_CASE("rarity scores are nonnegative, finite and ordered by use") {
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 30; ++trial) {
    const SparseCodes X = random_codes(12, 40, rng);
    const ActivationStats s = activation_stats(X);
    for (RarityKind kind : {RarityKind::count_fraction, RarityKind::coeff_mass,
                            RarityKind::neg_log_count, RarityKind::squared_count}) {
      const RarityVector R = rarity(s, {kind});
      REQUIRE(R.size() == 12);
      for (double v : R.values) CHECK((std::isfinite(v) && v >= 0.0));
      if (kind == RarityKind::coeff_mass) continue;
      for (std::size_t a = 0; a < 12; ++a) {
        for (std::size_t b = 0; b < 12; ++b) {
          if (s.m[a] >= s.m[b]) continue;
          // count-based scores move monotonically with usage
          if (kind == RarityKind::neg_log_count) CHECK(R.values[a] >= R.values[b]);
          else CHECK(R.values[a] <= R.values[b]);
        }
      }
    }
  }
}

TEST_CASE("rarity is equivariant under atom relabelling") {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 20; ++trial) {
    const SparseCodes X = random_codes(10, 30, rng);
    std::vector<Eigen::Index> perm(10);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    const Eigen::MatrixXd Xd = X.to_dense();
    Eigen::MatrixXd Xp(10, 30);
    for (Eigen::Index i = 0; i < 10; ++i) Xp.row(i) = Xd.row(perm[static_cast<std::size_t>(i)]);
    for (RarityKind kind : {RarityKind::count_fraction, RarityKind::coeff_mass,
                            RarityKind::neg_log_count, RarityKind::squared_count}) {
      const RarityVector R = rarity(activation_stats(X), {kind});
      const RarityVector Rp = rarity(activation_stats(SparseCodes::from_dense(Xp)), {kind});
      for (std::size_t i = 0; i < 10; ++i) CHECK(Rp.values[i] == R.values[static_cast<std::size_t>(perm[i])]);
    }
  }
}

TEST_CASE("coeff_mass is linear in the codes") {
  std::mt19937_64 rng(10);
  const SparseCodes X = random_codes(8, 25, rng);
  const Eigen::MatrixXd Xd = X.to_dense();
  const RarityVector R = rarity(activation_stats(X), {RarityKind::coeff_mass});
  const RarityVector R3 = rarity(activation_stats(SparseCodes::from_dense(3.0 * Xd)), {RarityKind::coeff_mass});
  for (std::size_t i = 0; i < 8; ++i) CHECK(std::abs(R3.values[i] - 3.0 * R.values[i]) <= 1e-12);
}

TEST_CASE("transforms") {
  const RarityVector R{{0.0, 0.05, 0.5, 1.0}};

  SUBCASE("identity is exact") {
    CHECK(transform(R, {TransformKind::identity}) == R);
  }
  SUBCASE("sigmoid closed forms") {
    TransformSpec f;  // a=-50, b=0.05
    const RarityVector w = transform(R, f);
    CHECK(w.values[1] == 0.5);
    CHECK(w.values[0] == doctest::Approx(1.0 / (1.0 + std::exp(-2.5))));
    CHECK(w.values[3] == doctest::Approx(1.0 / (1.0 + std::exp(47.5))));
    for (std::size_t i = 1; i < 4; ++i) CHECK(w.values[i] < w.values[i - 1]);
  }
  SUBCASE("gamma") {
    TransformSpec f{TransformKind::gamma};
    f.g = 2.0;
    const RarityVector w = transform(R, f);
    CHECK(w.values[0] == 0.0);
    CHECK(w.values[1] == doctest::Approx(0.0025));
    CHECK(w.values[2] == 0.25);
    CHECK(w.values[3] == 1.0);
    f.g = 0.0;
    CHECK_THROWS_AS(transform(R, f), ContractViolation);
  }
  SUBCASE("affine clamps at zero") {
    TransformSpec f{TransformKind::affine};
    f.scale = -2.0;
    f.offset = 1.0;
    const RarityVector w = transform(R, f);
    CHECK(w.values[0] == 1.0);
    CHECK(w.values[2] == 0.0);
    CHECK(w.values[3] == 0.0);
  }
  SUBCASE("non-finite output is rejected") {
    TransformSpec f{TransformKind::affine};
    f.scale = std::numeric_limits<double>::infinity();
    CHECK_THROWS(transform(RarityVector{{1.0}}, f));
  }
}

TEST_CASE("reweight_dictionary scales columns") {
  const Eigen::MatrixXd m = oracle::gaussian_dictionary(5, 3, 2);
  const Dictionary D(m);
  const Eigen::MatrixXd W = reweight_dictionary(D, RarityVector{{2.0, 0.0, 1.0}});
  CHECK(W.col(0) == 2.0 * m.col(0));
  CHECK(W.col(1).isZero());
  CHECK(W.col(2) == m.col(2));
  CHECK_THROWS_AS(reweight_dictionary(D, RarityVector{{1.0}}), ContractViolation);
}

TEST_CASE("enum parsing") {
  CHECK(parse_rarity_kind("neg_log_count") == RarityKind::neg_log_count);
  CHECK(parse_transform_kind("affine") == TransformKind::affine);
  CHECK(to_string(TransformKind::sigmoid) == "sigmoid");
  CHECK_THROWS(parse_rarity_kind("nope"));
}
