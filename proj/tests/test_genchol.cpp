#include <catch_amalgamated.hpp>

#include <cmath>
#include <sstream>

#include "gchol/densela.hpp"
#include "gchol/errors.hpp"
#include "gchol/genchol.hpp"
#include "gchol/harness.hpp"
#include "test_support.hpp"

using namespace gchol;
using Catch::Matchers::WithinRel;

namespace {

// L J L^T by explicit triple sum, independent of matmul.
Matrix dense_ljlt(const Matrix& l, const BlockSpec& spec) {
  const std::size_t p = l.rows();
  Matrix k(p, p);
  for (std::size_t i = 0; i < p; ++i) {
    for (std::size_t j = 0; j < p; ++j) {
      double s = 0.0;
      for (std::size_t t = 0; t < p; ++t) {
        const double sign = t < spec.m ? 1.0 : -1.0;
        s += (l(i, t) * sign) * l(j, t);
      }
      k(i, j) = s;
    }
  }
  return k;
}

GenCholFactor random_factor(std::size_t m, std::size_t n,
                            std::mt19937_64& rng) {
  const Matrix l = test::random_lower(m + n, rng);
  return GenCholFactor::from_dense(l, BlockSpec(m, n));
}

}  // namespace

TEST_CASE("block spec and signature", "[genchol]") {
  CHECK_THROWS_AS(BlockSpec(0, 1), Error);
  const BlockSpec s(2, 1);
  CHECK(s.order() == 3);
  CHECK(signature(s) == std::vector<double>{1, 1, -1});
}

TEST_CASE("assemble_k places blocks", "[genchol]") {
  const auto s1 = SaddleMatrix::from_blocks(Matrix::identity(2),
                                            Matrix{{1, 0}}, Matrix{{0}});
  CHECK(assemble_k(s1) == (Matrix{{1, 0, 1}, {0, 1, 0}, {1, 0, 0}}));
  const auto s2 =
      SaddleMatrix::from_blocks(Matrix{{4}}, Matrix{{2}}, Matrix{{1}});
  CHECK(assemble_k(s2) == (Matrix{{4, 2}, {2, -1}}));
}

TEST_CASE("saddle matrix validation", "[genchol]") {
  CHECK_THROWS_AS(
      SaddleMatrix::from_blocks(Matrix{{1, 2}, {0, 1}}, Matrix{{1, 0}},
                                Matrix{{0}}),
      Error);
  CHECK_THROWS_AS(
      SaddleMatrix::from_blocks(Matrix{{-1}}, Matrix{{1}}, Matrix{{0}}),
      NotPositiveDefinite);
  CHECK_THROWS_AS(
      SaddleMatrix::from_blocks(Matrix{{1}}, Matrix{{1}}, Matrix{{-1}}),
      Error);
  // B rank deficient.
  CHECK_THROWS_AS(
      SaddleMatrix::from_blocks(Matrix::identity(2), Matrix{{1, 1}, {1, 1}},
                                Matrix(2, 2)),
      Error);
  // n > m.
  CHECK_THROWS_AS(SaddleMatrix::from_blocks(Matrix{{1}}, Matrix{{1}, {1}},
                                            Matrix(2, 2)),
                  Error);
  CHECK_THROWS_AS(SaddleMatrix::from_blocks(Matrix{{1}}, Matrix{{1, 1}},
                                            Matrix{{0}}),
                  DimensionError);
}

TEST_CASE("factorize worked examples", "[genchol]") {
  const auto s =
      SaddleMatrix::from_blocks(Matrix{{4}}, Matrix{{2}}, Matrix{{1}});
  const GenCholFactor l = factorize(s);
  CHECK(l.l11() == Matrix{{2}});
  CHECK(l.l21() == Matrix{{1}});
  CHECK(l.l22() == Matrix{{std::sqrt(2.0)}});
  const Matrix r = subtract(reconstruct(l), assemble_k(s));
  CHECK(fro_norm(r) <= 2.0 * kUnitRoundoff * fro_norm(assemble_k(s)));

  const auto s1 = SaddleMatrix::from_blocks(Matrix::identity(2),
                                            Matrix{{1, 0}}, Matrix{{0}});
  const GenCholFactor l1 = factorize(s1);
  CHECK(l1.l11() == Matrix::identity(2));
  CHECK(l1.l21() == (Matrix{{1, 0}}));
  CHECK(l1.l22() == Matrix{{1}});
  CHECK(reconstruct(l1) == assemble_k(s1));
}

TEST_CASE("factorization breakdown reports the pivot", "[genchol]") {
  try {
    factorize_dense(Matrix{{-1, 1}, {1, 0}}, BlockSpec(1, 1));
    FAIL("expected breakdown");
  } catch (const FactorizationError& e) {
    CHECK(e.pivot() == 1);
    CHECK(e.block() == FactorBlock::leading);
  }
  // C + L21 L21^T = -1 + 0 < 0: breakdown in the Schur block.
  try {
    factorize_dense(Matrix{{1, 0}, {0, 1}}, BlockSpec(1, 1));
    FAIL("expected breakdown");
  } catch (const FactorizationError& e) {
    CHECK(e.pivot() == 2);
    CHECK(e.block() == FactorBlock::schur);
  }
  try {
    cholesky_lower(Matrix{{1, 2}, {2, 1}});
    FAIL("expected breakdown");
  } catch (const NotPositiveDefinite& e) {
    CHECK(e.pivot() == 2);
  }
}

TEST_CASE("n = 0 reduces to ordinary Cholesky", "[genchol]") {
  auto rng = test::make_rng(21);
  for (int t = 0; t < 20; ++t) {
    const Matrix a = gen_spd(5, 100.0, rng);
    const GenCholFactor l = factorize_dense(a, BlockSpec(5, 0));
    CHECK(factor_to_dense(l) == cholesky_lower(a));
  }
}

TEST_CASE("reconstruct matches the dense triple product", "[genchol]") {
  auto rng = test::make_rng(22);
  for (int t = 0; t < 50; ++t) {
    const std::size_t m = 1 + t % 5, n = t % 4;
    const GenCholFactor l = random_factor(m, n, rng);
    CHECK(reconstruct(l) == dense_ljlt(factor_to_dense(l), l.spec()));
  }
  const GenCholFactor id = GenCholFactor::from_dense(Matrix::identity(2),
                                                     BlockSpec(1, 1));
  CHECK(reconstruct(id) == (Matrix{{1, 0}, {0, -1}}));
}

TEST_CASE("factor blocks and dense embedding", "[genchol]") {
  const GenCholFactor l(BlockSpec(1, 1), Matrix{{2}}, Matrix{{3}},
                        Matrix{{4}});
  CHECK(factor_to_dense(l) == (Matrix{{2, 0}, {3, 4}}));
  CHECK_THROWS_AS(
      GenCholFactor(BlockSpec(1, 1), Matrix{{-2}}, Matrix{{3}}, Matrix{{4}}),
      Error);
  CHECK_THROWS_AS(GenCholFactor(BlockSpec(2, 0), Matrix{{1, 1}, {0, 1}},
                                Matrix(0, 2), Matrix(0, 0)),
                  Error);
  auto rng = test::make_rng(23);
  const Matrix d = test::random_lower(6, rng);
  CHECK(factor_to_dense(GenCholFactor::from_dense(d, BlockSpec(4, 2))) == d);
}

TEST_CASE("delta_factor", "[genchol]") {
  auto rng = test::make_rng(24);
  const GenCholFactor a = GenCholFactor::from_dense(
      Matrix{{2, 0, 0, 0, 0},
             {1, 3, 0, 0, 0},
             {0.5, 1, 1, 0, 0},
             {1, -1, 2, 1, 0},
             {0, 1, 1, 1, 2}},
      BlockSpec(3, 2));
  CHECK(delta_factor(a, a) == Matrix(5, 5));

  Matrix bumped = factor_to_dense(a);
  bumped(0, 0) += 1.0;
  const Matrix dl =
      delta_factor(GenCholFactor::from_dense(bumped, a.spec()), a);
  CHECK(fro_norm(dl) == 1.0);

  const GenCholFactor b = random_factor(3, 2, rng);
  CHECK(delta_factor(a, b) ==
        test::naive_diff(factor_to_dense(a), factor_to_dense(b)));
  const GenCholFactor c = random_factor(4, 1, rng);
  CHECK_THROWS_AS(delta_factor(a, c), DimensionError);
}

TEST_CASE("random round trip residual", "[genchol][property]") {
  auto rng = test::make_rng(25);
  for (int t = 0; t < 100; ++t) {
    std::uniform_int_distribution<std::size_t> md(1, 20);
    const std::size_t m = md(rng);
    std::uniform_int_distribution<std::size_t> nd(0, m);
    const std::size_t n = std::min<std::size_t>(nd(rng), 20);
    const GeneratedSaddle g = gen_saddle(m, n, 1e6, rng);
    const Matrix k = assemble_k(g.s);
    const GenCholFactor l = factorize(g.s);
    const double p = double(m + n);
    CHECK(fro_norm(subtract(reconstruct(l), k)) <=
          50.0 * p * kUnitRoundoff * fro_norm(k));
    for (std::size_t i = 0; i < m; ++i) CHECK(l.l11()(i, i) > 0.0);
    for (std::size_t i = 0; i < n; ++i) CHECK(l.l22()(i, i) > 0.0);
    if (n > 0) {
      const Matrix schur = add(g.s.c(), matmul(l.l21(), transpose(l.l21())));
      const Matrix r =
          subtract(matmul(l.l22(), transpose(l.l22())), schur);
      CHECK(fro_norm(r) <= 50.0 * n * kUnitRoundoff * fro_norm(schur));
    }
  }
}

TEST_CASE("factorize recovers a known factor", "[genchol][property]") {
  auto rng = test::make_rng(26);
  for (int t = 0; t < 50; ++t) {
    const std::size_t m = 1 + t % 6, n = t % (m + 1);
    const GenCholFactor l = random_factor(m, n, rng);
    const Matrix k = reconstruct(l);
    const GenCholFactor back = factorize_dense(k, l.spec());
    const Matrix a = factor_to_dense(l), b = factor_to_dense(back);
    const double p = double(m + n);
    // Entrywise relative agreement, measured against the row scale of L.
    for (std::size_t i = 0; i < a.rows(); ++i) {
      double row = 0.0;
      for (std::size_t j = 0; j <= i; ++j) row = std::max(row, std::abs(a(i, j)));
      for (std::size_t j = 0; j <= i; ++j) {
        CHECK(std::abs(a(i, j) - b(i, j)) <=
              100.0 * p * kUnitRoundoff * row * kappa2(a));
      }
    }
  }
}

TEST_CASE("saddle file format", "[genchol][io]") {
  auto rng = test::make_rng(27);
  const GeneratedSaddle g = gen_saddle(3, 2, 100.0, rng);
  std::stringstream ss;
  write_saddle(ss, g.s);
  const SaddleMatrix back = read_saddle(ss);
  CHECK(assemble_k(back) == assemble_k(g.s));

  std::istringstream bad("1 1\n4 2\n2.5 -1\n");
  CHECK_THROWS_AS(read_saddle_dense(bad), ParseError);
  std::istringstream ok("1 1\n4 2\n2 -1\n");
  const SaddleFile f = read_saddle_dense(ok);
  CHECK(f.spec == BlockSpec(1, 1));
  CHECK(f.k == (Matrix{{4, 2}, {2, -1}}));
  std::istringstream notpd("1 1\n-1 2\n2 -1\n");
  CHECK_THROWS_AS(read_saddle(notpd), NotPositiveDefinite);
}
