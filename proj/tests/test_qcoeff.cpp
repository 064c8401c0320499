#include <doctest.h>

#include <random>

#include "qglevy/qcoeff.hpp"

using namespace qglevy;

namespace {

QCoeff random_coeff(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> ci(-6, 6);
  std::uniform_int_distribution<int> deg(0, 3);
  auto poly = [&](bool nonzero) {
    QPoly p;
    int d = deg(rng);
    for (int k = 0; k <= d; ++k)
      p = p + QPoly::monomial(CRat(Rat(ci(rng)), Rat(ci(rng))), k);
    if (nonzero && p.is_zero()) p = QPoly(CRat(1));
    return p;
  };
  return QCoeff(poly(false), poly(true));
}

}  // namespace

TEST_CASE("exact field arithmetic") {
  std::mt19937_64 rng(42);
  for (int t = 0; t < 200; ++t) {
    QCoeff a = random_coeff(rng), b = random_coeff(rng);
    CHECK((a + b) - b == a);
    CHECK(a * b == b * a);
    if (!b.is_zero()) CHECK((a / b) * b == a);
    CHECK((a * (b + QCoeff(1))) == a * b + a);
  }
}

TEST_CASE("laurent powers") {
  CHECK(QCoeff::q_power(3) * QCoeff::q_power(-3) == QCoeff(1));
  CHECK(QCoeff::q_power(-1) - QCoeff::q_power(1) ==
        QCoeff(QPoly(CRat(1)) - QPoly::monomial(CRat(1), 2), QPoly::monomial(CRat(1), 1)));
}

TEST_CASE("exact rational specialization") {
  // (1 - q^2)/q at q = 1/2 equals 3/2
  QCoeff c(QPoly(CRat(1)) - QPoly::monomial(CRat(1), 2), QPoly::monomial(CRat(1), 1));
  CRat v = c.eval(Rat(1, 2));
  CHECK(v.re == Rat(3, 2));
  CHECK(v.im == 0);
  // repeated squaring stays exact
  QCoeff x(Rat(1, 3));
  for (int t = 0; t < 6; ++t) x *= x;
  CHECK(x.eval(Rat(1, 2)).re == Rat(mpz_class(1), mpz_class("3433683820292512484657849089281")));
}

TEST_CASE("conjugation") {
  QCoeff iq = QCoeff::i_unit() * QCoeff::q_power(1);
  CHECK(iq.conj() == -iq);
  CHECK(QCoeff(Rat(2, 3)).conj() == QCoeff(Rat(2, 3)));
}

TEST_CASE("errors") {
  CHECK_THROWS_AS(QCoeff(QPoly(CRat(1)), QPoly()), QCoeffError);
  CHECK_THROWS_AS(QCoeff(1) / QCoeff(0), QCoeffError);
  // denominator vanishing at the specialization point
  QCoeff pole(QPoly(CRat(1)), QPoly(CRat(Rat(-1, 2))) + QPoly::monomial(CRat(1), 1));
  CHECK_THROWS_AS(pole.eval(Rat(1, 2)), QCoeffError);
}
