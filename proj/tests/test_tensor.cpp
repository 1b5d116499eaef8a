#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "tca/rng.hpp"
#include "tca/tensor.hpp"

using tca::Dense3Tensor;
using tca::Matrix;

namespace {

Dense3Tensor random_tensor(std::array<std::size_t, 3> dims, std::uint64_t seed,
                           bool nonneg = false) {
  tca::Rng rng(seed);
  std::vector<double> data(dims[0] * dims[1] * dims[2]);
  for (double& v : data) v = nonneg ? rng.uniform01() : rng.normal();
  return Dense3Tensor(dims, std::move(data));
}

}  // namespace

TEST_CASE("tensor construction and layout") {
  Dense3Tensor t({1, 1, 1}, {5.0});
  CHECK(t(0, 0, 0) == 5.0);

  std::vector<double> data(8);
  for (std::size_t n = 0; n < 8; ++n) data[n] = static_cast<double>(n);
  Dense3Tensor c({2, 2, 2}, data);
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j)
      for (std::size_t k = 0; k < 2; ++k)
        CHECK(c(i, j, k) == data[i * 4 + j * 2 + k]);
}

TEST_CASE("tensor construction rejects bad input") {
  CHECK_THROWS_WITH_AS(Dense3Tensor({2, 2, 2}, std::vector<double>(7, 1.0)),
                       doctest::Contains("LengthMismatch"), tca::Error);
  std::vector<double> bad(8, 1.0);
  bad[3] = std::nan("");
  try {
    Dense3Tensor t({2, 2, 2}, bad);
    FAIL("expected NonFiniteEntry");
  } catch (const tca::Error& e) {
    CHECK(e.code() == tca::errc::non_finite_entry);
    CHECK(std::string(e.what()).find("3") != std::string::npos);
  }

  std::array<tca::AxisLabels, 3> labels;
  labels[0] = std::vector<std::string>{"only-one"};
  CHECK_THROWS_AS(Dense3Tensor({2, 2, 2}, std::vector<double>(8, 0.0), labels), tca::Error);
}

TEST_CASE("unfold mode 0 matches the hand-enumerated map") {
  std::vector<double> data(8);
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j)
      for (std::size_t k = 0; k < 2; ++k) data[i * 4 + j * 2 + k] = 4.0 * i + 2.0 * j + k;
  Dense3Tensor t({2, 2, 2}, data);
  Matrix m = unfold(t, 0);
  REQUIRE(m.rows == 2);
  REQUIRE(m.cols == 4);
  // column j + J*k: derived by hand from the index map
  const double expected[2][4] = {{0, 2, 1, 3}, {4, 6, 5, 7}};
  for (std::size_t r = 0; r < 2; ++r)
    for (std::size_t c = 0; c < 4; ++c) CHECK(m(r, c) == expected[r][c]);
}

TEST_CASE("unfold rejects bad modes and degenerate axes work") {
  Dense3Tensor t({1, 3, 2}, std::vector<double>{1, 2, 3, 4, 5, 6});
  CHECK_THROWS_AS(unfold(t, 3), tca::Error);
  CHECK_THROWS_AS(unfold(t, -1), tca::Error);

  Matrix row = unfold(t, 0);
  CHECK(row.rows == 1);
  CHECK(row.cols == 6);
}

TEST_CASE("unfold then fold is bit-exact for all modes") {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    Dense3Tensor t = random_tensor({4, 3, 5}, seed);
    for (int mode = 0; mode < 3; ++mode) {
      Dense3Tensor back = fold(unfold(t, mode), mode, t.dims());
      CHECK(back.values() == t.values());
    }
  }
}

TEST_CASE("khatri_rao basics") {
  Matrix ones_a(2, 3, 1.0), ones_b(2, 3, 1.0);
  Matrix kr = khatri_rao(ones_a, ones_b);
  CHECK(kr.rows == 4);
  CHECK(kr.cols == 3);
  for (double v : kr.data) CHECK(v == 1.0);

  Matrix a = Matrix::from_data(2, 1, {1, 2});
  Matrix b = Matrix::from_data(2, 1, {3, 4});
  Matrix ab = khatri_rao(a, b);
  CHECK(ab.data == std::vector<double>{3, 4, 6, 8});

  CHECK_THROWS_AS(khatri_rao(Matrix(2, 2), Matrix(3, 3)), tca::Error);
}

TEST_CASE("khatri_rao row convention, exhaustive up to 5x5") {
  tca::Rng rng(99);
  for (std::size_t p = 1; p <= 5; ++p)
    for (std::size_t q = 1; q <= 5; ++q) {
      const std::size_t R = 3;
      Matrix a(p, R), b(q, R);
      for (double& v : a.data) v = rng.normal();
      for (double& v : b.data) v = rng.normal();
      Matrix kr = khatri_rao(a, b);
      for (std::size_t ra = 0; ra < p; ++ra)
        for (std::size_t rb = 0; rb < q; ++rb)
          for (std::size_t r = 0; r < R; ++r)
            CHECK(kr(ra * q + rb, r) == a(ra, r) * b(rb, r));
    }
}

TEST_CASE("frobenius norm") {
  CHECK(frobenius_norm(Dense3Tensor({2, 2, 2}, std::vector<double>(8, 0.0))) == 0.0);
  CHECK(frobenius_norm(Dense3Tensor({1, 1, 2}, {3.0, 4.0})) == doctest::Approx(5.0).epsilon(1e-15));

  Dense3Tensor t = random_tensor({5, 4, 3}, 17);
  double direct = 0.0;
  for (double v : t.values()) direct += v * v;
  CHECK(frobenius_norm(t) * frobenius_norm(t) ==
        doctest::Approx(direct).epsilon(1e-12));

  // Any unfolding carries the same entries.
  for (int mode = 0; mode < 3; ++mode) {
    Matrix m = unfold(t, mode);
    double acc = 0.0;
    for (double v : m.data) acc += v * v;
    CHECK(std::sqrt(acc) == doctest::Approx(frobenius_norm(t)).epsilon(1e-12));
  }
}

TEST_CASE("matmul, transpose and gram agree with direct sums") {
  tca::Rng rng(5);
  Matrix a(4, 3), b(3, 5);
  for (double& v : a.data) v = rng.normal();
  for (double& v : b.data) v = rng.normal();

  Matrix c = matmul(a, b);
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 5; ++j) {
      double acc = 0.0;
      for (std::size_t k = 0; k < 3; ++k) acc += a(i, k) * b(k, j);
      CHECK(c(i, j) == doctest::Approx(acc).epsilon(1e-14));
    }

  Matrix g = gram(a);
  Matrix gt = matmul(transpose(a), a);
  REQUIRE(g.data.size() == gt.data.size());
  for (std::size_t n = 0; n < g.data.size(); ++n)
    CHECK(g.data[n] == doctest::Approx(gt.data[n]).epsilon(1e-14));

  CHECK_THROWS_AS(matmul(Matrix(2, 3), Matrix(2, 3)), tca::Error);
}
