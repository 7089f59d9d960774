#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "ranjac/matrix.hpp"

using namespace ranjac;

namespace {

QMat random_mat(std::mt19937_64& rng, std::size_t r, std::size_t c) {
  std::uniform_int_distribution<int> num(-6, 6);
  std::uniform_int_distribution<int> den(1, 4);
  QMat m(r, c);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) m.at(i, j) = rat(num(rng), den(rng));
  return m;
}

} // namespace

TEST_CASE("rational parse and print") {
  CHECK(rat_str(parse_rat("2/4")) == "1/2");
  CHECK(rat_str(parse_rat("-6/3")) == "-2");
  CHECK(rat_str(rat(0)) == "0");
  CHECK_THROWS(parse_rat("1/0"));
  CHECK_THROWS(parse_rat("a"));
  CHECK_THROWS(parse_rat("1/2/3"));
}

TEST_CASE("mul matches serial reference") {
  std::mt19937_64 rng(7);
  for (int t = 0; t < 10; ++t) {
    QMat a = random_mat(rng, 5, 7), b = random_mat(rng, 7, 4);
    CHECK(a * b == refimpl::mul(a, b));
  }
}

TEST_CASE("rank: Bareiss agrees with rational elimination") {
  std::mt19937_64 rng(11);
  for (int t = 0; t < 25; ++t) {
    QMat a = random_mat(rng, 6, 5);
    CHECK(a.rank() == refimpl::rank(a));
  }
  // guaranteed rank deficiency
  QMat a = random_mat(rng, 4, 3);
  QMat b = a.hstack(a.cols_subset({0}) + a.cols_subset({1}));
  CHECK(b.rank() == a.rank());
  CHECK(b.rank() == refimpl::rank(b));
}

TEST_CASE("kernel and solve") {
  std::mt19937_64 rng(13);
  for (int t = 0; t < 15; ++t) {
    QMat a = random_mat(rng, 4, 6);
    QMat k = a.kernel();
    CHECK(k.cols() == 6 - a.rank());
    CHECK((a * k).is_zero());
    QMat x = random_mat(rng, 6, 2);
    QMat b = a * x;
    auto sol = a.solve(b);
    REQUIRE(sol.has_value());
    CHECK(a * *sol == b);
  }
  QMat a(2, 1);
  a.at(0, 0) = 1;
  QMat b(2, 1);
  b.at(1, 0) = 1;
  CHECK_FALSE(a.solve(b).has_value());
}

TEST_CASE("span helpers") {
  QMat a(3, 2);
  a.at(0, 0) = 1;
  a.at(1, 1) = 1;
  QMat v(3, 1);
  v.at(0, 0) = 2;
  v.at(1, 0) = -3;
  CHECK(in_span(a, v));
  QMat w(3, 1);
  w.at(2, 0) = 1;
  CHECK_FALSE(in_span(a, w));
  QMat ext = span_extend(a, w);
  CHECK(ext.cols() == 3);
  CHECK(span_equal(ext, QMat::identity(3)));
}

TEST_CASE("rref pivots deterministic") {
  QMat a(3, 4);
  a.at(0, 1) = 2;
  a.at(1, 1) = 4;
  a.at(2, 3) = 5;
  QMat c = a;
  auto piv = c.rref_inplace();
  REQUIRE(piv.size() == 2);
  CHECK(piv[0] == 1);
  CHECK(piv[1] == 3);
}
