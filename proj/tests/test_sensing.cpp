#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "cs/errors.hpp"
#include "cs/sensing.hpp"
#include "oracles.hpp"

using namespace cs;

namespace {

SeedVector seed_from(std::initializer_list<double> values) {
  SeedVector seed;
  seed.entries.resize(static_cast<int>(values.size()));
  int i = 0;
  for (double v : values) seed.entries[i++] = v;
  return seed;
}

}  // namespace

TEST_CASE("make_seed is deterministic and respects the distribution") {
  Rng rng_a(42);
  Rng rng_b(42);
  const SeedVector a = make_seed(rng_a, 4, SeedDist::gaussian);
  const SeedVector b = make_seed(rng_b, 4, SeedDist::gaussian);
  CHECK(a.entries == b.entries);

  Rng rng_c(42);
  const SeedVector c = make_seed(rng_c, 4, SeedDist::bernoulli);
  for (int i = 0; i < c.size(); ++i) {
    CHECK((c.entries[i] == 1.0 || c.entries[i] == -1.0));
  }
}

TEST_CASE("make_seed gaussian sample moments at n = 10^4") {
  Rng rng(42);
  const SeedVector seed = make_seed(rng, 10000, SeedDist::gaussian);
  const double mean = seed.entries.mean();
  const double var = (seed.entries.array() - mean).square().sum() / 10000.0;
  CHECK(std::abs(mean) <= 0.05);
  CHECK(std::abs(var - 1.0) <= 0.1);
}

TEST_CASE("make_seed rejects empty vectors") {
  Rng rng(1);
  CHECK_THROWS_AS(make_seed(rng, 0, SeedDist::gaussian), InvalidDimensionError);
}

TEST_CASE("square circulant reproduces the cyclic-shift pattern") {
  const SeedVector seed = seed_from({1.5, -2.25, 3.125, 0.5});
  const SensingOperator op = build_circulant(seed, 4, RowSelect::first_m, nullptr, 1.0);
  const Eigen::MatrixXd dense = to_dense(op);

  Eigen::MatrixXd expected(4, 4);
  expected << 1.5, -2.25, 3.125, 0.5,   //
      0.5, 1.5, -2.25, 3.125,           //
      3.125, 0.5, 1.5, -2.25,           //
      -2.25, 3.125, 0.5, 1.5;
  CHECK(dense == expected);
}

TEST_CASE("delta seed gives the identity") {
  const SeedVector seed = seed_from({1.0, 0.0, 0.0, 0.0});
  const SensingOperator op = build_circulant(seed, 4, RowSelect::first_m, nullptr, 1.0);
  CHECK(to_dense(op) == Eigen::MatrixXd::Identity(4, 4));
}

TEST_CASE("to_dense matches the index formula on random rows") {
  Rng rng(7);
  const SeedVector seed = make_seed(rng, 16, SeedDist::gaussian);
  Rng rows_rng(11);
  const SensingOperator op = build_circulant(seed, 8, RowSelect::random, &rows_rng);
  const Eigen::MatrixXd expected = cs::test::circulant_dense_oracle(
      seed.entries, op.circulant().row_indices, op.scale());
  CHECK(to_dense(op) == expected);

  Rng rng2(23);
  const SeedVector seed2 = make_seed(rng2, 8, SeedDist::gaussian);
  Rng rows2(5);
  const SensingOperator op2 = build_circulant(seed2, 5, RowSelect::random, &rows2);
  CHECK(to_dense(op2) ==
        cs::test::circulant_dense_oracle(seed2.entries, op2.circulant().row_indices,
                                         op2.scale()));
}

TEST_CASE("build_circulant validates dimensions and row selection") {
  Rng rng(1);
  const SeedVector seed = make_seed(rng, 4, SeedDist::gaussian);
  CHECK_THROWS_AS(build_circulant(seed, 5, RowSelect::first_m), InvalidDimensionError);
  CHECK_THROWS_AS(build_circulant(seed, 0, RowSelect::first_m), InvalidDimensionError);
  CHECK_THROWS_AS(build_circulant(seed, 2, RowSelect::random), InvalidParameterError);
}

TEST_CASE("default scale is 1/sqrt(m)") {
  Rng rng(3);
  const SeedVector seed = make_seed(rng, 8, SeedDist::gaussian);
  const SensingOperator op = build_circulant(seed, 4, RowSelect::first_m);
  CHECK(op.scale() == 1.0 / std::sqrt(4.0));
}

TEST_CASE("dense random operators are deterministic and scaled") {
  Rng rng_a(7);
  Rng rng_b(7);
  const SensingOperator a = build_dense_random(rng_a, 2, 4, SeedDist::gaussian);
  const SensingOperator b = build_dense_random(rng_b, 2, 4, SeedDist::gaussian);
  CHECK(a.dense().entries == b.dense().entries);

  Rng rng_c(7);
  const SensingOperator c = build_dense_random(rng_c, 2, 4, SeedDist::bernoulli);
  const Eigen::MatrixXd dense = to_dense(c);
  const double val = 1.0 / std::sqrt(2.0);
  for (int i = 0; i < dense.rows(); ++i) {
    for (int j = 0; j < dense.cols(); ++j) {
      CHECK((dense(i, j) == val || dense(i, j) == -val));
    }
  }

  Rng rng_d(1);
  CHECK_THROWS_AS(build_dense_random(rng_d, 3, 2, SeedDist::gaussian),
                  InvalidDimensionError);
}

TEST_CASE("dense gaussian column norms concentrate near 1 at m = n = 200") {
  Rng rng(99);
  const SensingOperator op = build_dense_random(rng, 200, 200, SeedDist::gaussian);
  const Eigen::MatrixXd dense = to_dense(op);
  for (int j = 0; j < dense.cols(); ++j) {
    const double norm = dense.col(j).norm();
    CHECK(norm >= 0.6);
    CHECK(norm <= 1.4);
  }
}

TEST_CASE("identity circulant applies as a pass-through") {
  const SeedVector seed = seed_from({1.0, 0.0, 0.0, 0.0, 0.0});
  const SensingOperator op = build_circulant(seed, 5, RowSelect::first_m, nullptr, 1.0);
  Eigen::VectorXd x(5);
  x << 0.5, -1.25, 3.0, 0.0, 2.0;
  CHECK(apply(op, x).isApprox(x, 1e-12));
  CHECK(adjoint_apply(op, x).isApprox(x, 1e-12));
}

TEST_CASE("linear maps send zero to zero") {
  Rng rng(5);
  const SeedVector seed = make_seed(rng, 12, SeedDist::gaussian);
  Rng rows(6);
  const SensingOperator op = build_circulant(seed, 6, RowSelect::random, &rows);
  CHECK(apply(op, Eigen::VectorXd::Zero(12)) == Eigen::VectorXd::Zero(6));
  CHECK(adjoint_apply(op, Eigen::VectorXd::Zero(6)) == Eigen::VectorXd::Zero(12));
}

TEST_CASE("fast apply agrees with the dense product") {
  Rng rng(31);
  const SeedVector seed = make_seed(rng, 64, SeedDist::gaussian);
  Rng rows(17);
  const SensingOperator op = build_circulant(seed, 32, RowSelect::random, &rows);
  const Eigen::MatrixXd dense = to_dense(op);
  Rng xr(41);
  for (int trial = 0; trial < 20; ++trial) {
    Eigen::VectorXd x(64);
    for (int i = 0; i < 64; ++i) x[i] = xr.gaussian();
    const Eigen::VectorXd fast = apply(op, x);
    const Eigen::VectorXd direct = dense * x;
    CHECK((fast - direct).norm() <= 1e-10 * direct.norm());
  }
}

TEST_CASE("fast-multiply equivalence across sizes and row counts") {
  Rng seeder(123);
  for (int n : {4, 8, 16, 64, 256}) {
    for (int m : {1, n / 2, n}) {
      if (m < 1) continue;
      Rng rng(seeder.next_u64());
      const SeedVector seed = make_seed(rng, n, SeedDist::gaussian);
      Rng rows(seeder.next_u64());
      const SensingOperator op = build_circulant(seed, m, RowSelect::random, &rows);
      const Eigen::MatrixXd dense = to_dense(op);
      Eigen::VectorXd x(n);
      for (int i = 0; i < n; ++i) x[i] = rng.gaussian();
      const Eigen::VectorXd fast = apply(op, x);
      const Eigen::VectorXd direct = dense * x;
      const double denom = direct.norm() > 0 ? direct.norm() : 1.0;
      CHECK((fast - direct).norm() <= 1e-10 * denom);
    }
  }
}

TEST_CASE("adjoint identity <Ax, y> = <x, A^T y>") {
  Rng rng(77);
  const SeedVector seed = make_seed(rng, 32, SeedDist::gaussian);
  Rng rows(78);
  const SensingOperator op = build_circulant(seed, 16, RowSelect::random, &rows);
  Rng vec_rng(79);
  for (int trial = 0; trial < 100; ++trial) {
    Eigen::VectorXd x(32), y(16);
    for (int i = 0; i < 32; ++i) x[i] = vec_rng.gaussian();
    for (int i = 0; i < 16; ++i) y[i] = vec_rng.gaussian();
    const double lhs = apply(op, x).dot(y);
    const double rhs = x.dot(adjoint_apply(op, y));
    CHECK(std::abs(lhs - rhs) <= 1e-10 * (1.0 + std::abs(lhs)));
  }
}

TEST_CASE("selected rows are cyclic shifts of each other") {
  Rng rng(13);
  const SeedVector seed = make_seed(rng, 24, SeedDist::gaussian);
  Rng rows(14);
  const SensingOperator op = build_circulant(seed, 9, RowSelect::random, &rows);
  const Eigen::MatrixXd dense = to_dense(op);
  const auto& indices = op.circulant().row_indices;
  const int n = op.cols();
  for (int r = 0; r < op.rows(); ++r) {
    for (int r2 = 0; r2 < op.rows(); ++r2) {
      const int shift = indices[r2] - indices[r];
      for (int j = 0; j < n; ++j) {
        CHECK(dense(r2, j) == dense(r, ((j - shift) % n + n) % n));
      }
    }
  }
}

TEST_CASE("dimension mismatches fail loudly") {
  Rng rng(2);
  const SeedVector seed = make_seed(rng, 8, SeedDist::gaussian);
  const SensingOperator op = build_circulant(seed, 4, RowSelect::first_m);
  CHECK_THROWS_AS(apply(op, Eigen::VectorXd::Zero(7)), InvalidDimensionError);
  CHECK_THROWS_AS(adjoint_apply(op, Eigen::VectorXd::Zero(5)), InvalidDimensionError);
}

TEST_CASE("to_dense enforces the materialization guard") {
  Rng rng(3);
  const SeedVector seed = make_seed(rng, 4000, SeedDist::gaussian);
  const SensingOperator op = build_circulant(seed, 3000, RowSelect::first_m);
  CHECK_THROWS_AS(to_dense(op), ResourceLimitError);
}

TEST_CASE("operators built from the same seed are bit-identical") {
  auto build = [] {
    Rng rng(2024);
    const SeedVector seed = make_seed(rng, 32, SeedDist::gaussian);
    Rng rows(2025);
    return build_circulant(seed, 12, RowSelect::random, &rows);
  };
  const SensingOperator a = build();
  const SensingOperator b = build();
  CHECK(a.circulant().seed.entries == b.circulant().seed.entries);
  CHECK(a.circulant().row_indices == b.circulant().row_indices);
  CHECK(a.scale() == b.scale());
}

TEST_CASE("partial circulant representation holds only seed and row indices") {
  Rng rng(8);
  const SeedVector seed = make_seed(rng, 512, SeedDist::gaussian);
  Rng rows(9);
  const SensingOperator op = build_circulant(seed, 256, RowSelect::random, &rows);
  CHECK(op.kind() == OperatorKind::partial_circulant);
  CHECK(op.circulant().seed.size() == 512);
  CHECK(static_cast<int>(op.circulant().row_indices.size()) == 256);
  CHECK_THROWS_AS(op.dense(), std::bad_variant_access);
}

TEST_CASE("extract_columns matches the dense columns") {
  Rng rng(15);
  const SeedVector seed = make_seed(rng, 20, SeedDist::gaussian);
  Rng rows(16);
  const SensingOperator op = build_circulant(seed, 10, RowSelect::random, &rows);
  const Eigen::MatrixXd dense = to_dense(op);
  const std::vector<int> cols = {0, 3, 7, 19};
  const Eigen::MatrixXd got = extract_columns(op, cols);
  for (int c = 0; c < static_cast<int>(cols.size()); ++c) {
    CHECK(got.col(c) == dense.col(cols[c]));
  }
}

TEST_CASE("json serialization round-trips both operator kinds") {
  Rng rng(55);
  const SeedVector seed = make_seed(rng, 10, SeedDist::bernoulli);
  Rng rows(56);
  SensingOperator circ = build_circulant(seed, 6, RowSelect::random, &rows);
  circ.rng_seed = 55;
  const SensingOperator circ2 = operator_from_json(operator_to_json(circ));
  CHECK(circ2.kind() == OperatorKind::partial_circulant);
  CHECK(to_dense(circ2) == to_dense(circ));
  CHECK(circ2.rng_seed == circ.rng_seed);
  CHECK(circ2.circulant().seed.dist == SeedDist::bernoulli);

  Rng rng2(57);
  const SensingOperator dense = build_dense_random(rng2, 3, 5, SeedDist::gaussian);
  const SensingOperator dense2 = operator_from_json(operator_to_json(dense));
  CHECK(dense2.kind() == OperatorKind::dense_random);
  CHECK(to_dense(dense2) == to_dense(dense));
}

TEST_CASE("single-element operator works") {
  const SeedVector seed = seed_from({2.0});
  const SensingOperator op = build_circulant(seed, 1, RowSelect::first_m, nullptr, 1.0);
  Eigen::VectorXd x(1);
  x << 3.0;
  CHECK(apply(op, x)[0] == doctest::Approx(6.0));
}
