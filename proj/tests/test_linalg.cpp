#include <catch2/catch_amalgamated.hpp>

#include "enn/linalg.hpp"
#include "enn/rng.hpp"
#include "support.hpp"

using enn::Matrix;
using enn::Vector;

namespace {

Matrix random_matrix(enn::Rng& rng, std::size_t rows, std::size_t cols) {
  Matrix m(rows, cols);
  for (double& v : m.data()) v = rng.uniform(-2.0, 2.0);
  return m;
}

}  // namespace

TEST_CASE("matmul identity and zero cases") {
  enn::Rng rng(11);
  const Matrix m = random_matrix(rng, 3, 3);
  const Matrix im = enn::matmul(Matrix::identity(3), m);
  REQUIRE(im.data() == m.data());

  const Matrix z = enn::matmul(Matrix(2, 3), random_matrix(rng, 3, 4));
  for (double v : z.data()) REQUIRE(v == 0.0);
  REQUIRE(z.rows() == 2);
  REQUIRE(z.cols() == 4);
}

TEST_CASE("matmul matches the naive triple loop") {
  enn::Rng rng(12);
  for (int rep = 0; rep < 20; ++rep) {
    const Matrix a = random_matrix(rng, 5, 5);
    const Matrix b = random_matrix(rng, 5, 5);
    const Matrix got = enn::matmul(a, b);
    const Matrix want = oracle::matmul_naive(a, b);
    for (std::size_t i = 0; i < got.data().size(); ++i)
      REQUIRE(oracle::rel_error(got.data()[i], want.data()[i]) < 1e-12);
  }
}

TEST_CASE("matmul rejects mismatched shapes") {
  REQUIRE_THROWS_AS(enn::matmul(Matrix(2, 3), Matrix(4, 2)), std::invalid_argument);
}

TEST_CASE("matmul is associative within tolerance") {
  enn::Rng rng(13);
  for (int rep = 0; rep < 10; ++rep) {
    const Matrix a = random_matrix(rng, 4, 3);
    const Matrix b = random_matrix(rng, 3, 5);
    const Matrix c = random_matrix(rng, 5, 2);
    const Matrix left = enn::matmul(enn::matmul(a, b), c);
    const Matrix right = enn::matmul(a, enn::matmul(b, c));
    for (std::size_t i = 0; i < left.data().size(); ++i)
      REQUIRE(oracle::rel_error(left.data()[i], right.data()[i]) < 1e-9);
  }
}

TEST_CASE("transpose_matvec identity, zeros, and dot-product oracle") {
  enn::Rng rng(14);
  Vector s{0.5, -1.5, 2.0};
  REQUIRE(enn::transpose_matvec(Matrix::identity(3), s) == s);

  const Vector z = enn::transpose_matvec(Matrix(3, 4), s);
  for (double v : z) REQUIRE(v == 0.0);

  const Matrix w = random_matrix(rng, 4, 3);
  const Vector s4 = oracle::random_input(rng, 4, -2.0, 2.0);
  const Vector got = enn::transpose_matvec(w, s4);
  for (std::size_t j = 0; j < 3; ++j) {
    double want = 0.0;
    for (std::size_t i = 0; i < 4; ++i) want += w(i, j) * s4[i];
    REQUIRE(oracle::rel_error(got[j], want) < 1e-12);
  }

  REQUIRE_THROWS_AS(enn::transpose_matvec(w, s), std::invalid_argument);
}

TEST_CASE("transpose_matvec agrees with matmul on the transposed matrix") {
  enn::Rng rng(15);
  for (int rep = 0; rep < 10; ++rep) {
    const Matrix w = random_matrix(rng, 5, 4);
    const Vector s = oracle::random_input(rng, 5, -2.0, 2.0);
    Matrix wt(4, 5);
    for (std::size_t i = 0; i < 5; ++i)
      for (std::size_t j = 0; j < 4; ++j) wt(j, i) = w(i, j);
    Matrix col(5, 1);
    for (std::size_t i = 0; i < 5; ++i) col(i, 0) = s[i];
    const Matrix want = enn::matmul(wt, col);
    const Vector got = enn::transpose_matvec(w, s);
    for (std::size_t j = 0; j < 4; ++j)
      REQUIRE(oracle::rel_error(got[j], want(j, 0)) < 1e-12);
  }
}

TEST_CASE("outer_accumulate basics and elementwise oracle") {
  Matrix acc(2, 3, 1.0);
  enn::outer_accumulate(acc, Vector{0.0, 0.0}, Vector{1.0, 2.0, 3.0});
  for (double v : acc.data()) REQUIRE(v == 1.0);

  Matrix basis(3, 3);
  enn::outer_accumulate(basis, Vector{1.0, 0.0, 0.0}, Vector{0.0, 1.0, 0.0});
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j)
      REQUIRE(basis(i, j) == ((i == 0 && j == 1) ? 1.0 : 0.0));

  enn::Rng rng(16);
  Matrix m(4, 5);
  for (double& v : m.data()) v = rng.uniform(-1.0, 1.0);
  const Matrix before = m;
  const Vector u = oracle::random_input(rng, 4);
  const Vector v = oracle::random_input(rng, 5);
  enn::outer_accumulate(m, u, v);
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 5; ++j)
      REQUIRE(m(i, j) == before(i, j) + u[i] * v[j]);

  REQUIRE_THROWS_AS(enn::outer_accumulate(m, u, Vector(3, 0.0)), std::invalid_argument);
}
