#include "qglevy/qcoeff.hpp"

#include <sstream>

namespace qglevy {

std::string CRat::str() const {
  auto rat_str = [](const Rat& r) {
    std::ostringstream os;
    os << r;
    return os.str();
  };
  if (im == 0) return rat_str(re);
  if (re == 0) {
    if (im == 1) return "i";
    if (im == -1) return "-i";
    return rat_str(im) + "*i";
  }
  std::string s = "(" + rat_str(re);
  if (im > 0)
    s += " + " + (im == 1 ? std::string("i") : rat_str(im) + "*i");
  else
    s += " - " + (im == -1 ? std::string("i") : rat_str(Rat(-im)) + "*i");
  return s + ")";
}

QPoly QPoly::monomial(const CRat& c, int deg) {
  QPoly p;
  if (c.is_zero()) return p;
  p.c_.assign(deg + 1, CRat());
  p.c_[deg] = c;
  return p;
}

const CRat& QPoly::coeff(int k) const {
  static const CRat zero;
  if (k < 0 || k >= static_cast<int>(c_.size())) return zero;
  return c_[k];
}

void QPoly::trim() {
  while (!c_.empty() && c_.back().is_zero()) c_.pop_back();
}

QPoly QPoly::operator-() const {
  QPoly r = *this;
  for (auto& c : r.c_) c = -c;
  return r;
}

QPoly operator+(const QPoly& a, const QPoly& b) {
  QPoly r;
  r.c_.resize(std::max(a.c_.size(), b.c_.size()));
  for (size_t k = 0; k < r.c_.size(); ++k) {
    if (k < a.c_.size()) r.c_[k] += a.c_[k];
    if (k < b.c_.size()) r.c_[k] += b.c_[k];
  }
  r.trim();
  return r;
}

QPoly operator-(const QPoly& a, const QPoly& b) { return a + (-b); }

QPoly operator*(const QPoly& a, const QPoly& b) {
  QPoly r;
  if (a.is_zero() || b.is_zero()) return r;
  r.c_.assign(a.c_.size() + b.c_.size() - 1, CRat());
  for (size_t j = 0; j < a.c_.size(); ++j) {
    if (a.c_[j].is_zero()) continue;
    for (size_t k = 0; k < b.c_.size(); ++k)
      r.c_[j + k] += a.c_[j] * b.c_[k];
  }
  r.trim();
  return r;
}

void QPoly::divrem(const QPoly& a, const QPoly& b, QPoly& quo, QPoly& rem) {
  if (b.is_zero()) throw QCoeffError("QPoly: division by zero polynomial");
  quo = QPoly();
  rem = a;
  const CRat lead_b = b.lead();
  while (!rem.is_zero() && rem.degree() >= b.degree()) {
    int d = rem.degree() - b.degree();
    CRat c = rem.lead() / lead_b;
    QPoly t = QPoly::monomial(c, d);
    quo = quo + t;
    rem = rem - t * b;
  }
}

QPoly QPoly::conj() const {
  QPoly r = *this;
  for (auto& c : r.c_) c = c.conj();
  return r;
}

CRat QPoly::eval(const Rat& q0) const {
  CRat acc;
  for (size_t k = c_.size(); k-- > 0;) acc = acc * CRat(q0) + c_[k];
  return acc;
}

std::string QPoly::str() const {
  if (is_zero()) return "0";
  std::string s;
  bool first = true;
  for (int k = 0; k <= degree(); ++k) {
    CRat c = coeff(k);
    if (c.is_zero()) continue;
    std::string cs = c.str();
    bool neg = !cs.empty() && cs[0] == '-';
    if (first) {
      if (neg) s += "-";
    } else {
      s += neg ? " - " : " + ";
    }
    if (neg) cs = cs.substr(1);
    first = false;
    if (k == 0) {
      s += cs;
    } else {
      std::string qs = (k == 1) ? "q" : "q^" + std::to_string(k);
      s += (cs == "1") ? qs : cs + "*" + qs;
    }
  }
  return s;
}

QPoly poly_gcd(QPoly a, QPoly b) {
  auto make_monic = [](QPoly& p) {
    if (p.is_zero()) return;
    CRat l = p.lead();
    QPoly q, r;
    QPoly::divrem(p, QPoly(l), q, r);
    p = q;
  };
  make_monic(a);
  make_monic(b);
  while (!b.is_zero()) {
    QPoly q, r;
    QPoly::divrem(a, b, q, r);
    a = b;
    b = r;
    make_monic(b);
  }
  if (a.is_zero()) return QPoly(CRat(1));
  return a;
}

QCoeff::QCoeff(QPoly num, QPoly den) : num_(std::move(num)), den_(std::move(den)) {
  if (den_.is_zero()) throw QCoeffError("QCoeff: zero denominator");
  normalize();
}

void QCoeff::normalize() {
  if (num_.is_zero()) {
    den_ = QPoly(CRat(1));
    return;
  }
  QPoly g = poly_gcd(num_, den_);
  if (!g.is_one()) {
    QPoly q, r;
    QPoly::divrem(num_, g, q, r);
    num_ = q;
    QPoly::divrem(den_, g, q, r);
    den_ = q;
  }
  CRat l = den_.lead();
  if (l != CRat(1)) {
    QPoly q, r;
    QPoly::divrem(num_, QPoly(l), q, r);
    num_ = q;
    QPoly::divrem(den_, QPoly(l), q, r);
    den_ = q;
  }
}

QCoeff QCoeff::q_power(long m) {
  if (m >= 0) return QCoeff(QPoly::monomial(CRat(1), static_cast<int>(m)), QPoly(CRat(1)));
  return QCoeff(QPoly(CRat(1)), QPoly::monomial(CRat(1), static_cast<int>(-m)));
}

QCoeff QCoeff::operator-() const {
  QCoeff r = *this;
  r.num_ = -r.num_;
  return r;
}

QCoeff QCoeff::conj() const {
  QCoeff r;
  r.num_ = num_.conj();
  r.den_ = den_.conj();
  r.normalize();
  return r;
}

QCoeff& QCoeff::operator+=(const QCoeff& o) {
  num_ = num_ * o.den_ + o.num_ * den_;
  den_ = den_ * o.den_;
  normalize();
  return *this;
}

QCoeff& QCoeff::operator-=(const QCoeff& o) { return *this += -o; }

QCoeff& QCoeff::operator*=(const QCoeff& o) {
  num_ = num_ * o.num_;
  den_ = den_ * o.den_;
  normalize();
  return *this;
}

QCoeff& QCoeff::operator/=(const QCoeff& o) {
  if (o.is_zero()) throw QCoeffError("QCoeff: division by zero");
  num_ = num_ * o.den_;
  den_ = den_ * o.num_;
  normalize();
  return *this;
}

CRat QCoeff::eval(const Rat& q0) const {
  CRat d = den_.eval(q0);
  if (d.is_zero()) throw QCoeffError("QCoeff: denominator vanishes at q0");
  return num_.eval(q0) / d;
}

std::string QCoeff::str() const {
  if (is_zero()) return "0";
  if (den_.is_one()) {
    // single-term numerators print without parentheses where unambiguous
    bool single = true;
    int nz = -1;
    for (int k = 0; k <= num_.degree(); ++k) {
      if (!num_.coeff(k).is_zero()) {
        if (nz >= 0) {
          single = false;
          break;
        }
        nz = k;
      }
    }
    if (single) {
      const CRat& c = num_.coeff(nz);
      std::string cs = c.str();
      if (nz == 0) return cs;
      std::string qs = (nz == 1) ? "q" : "q^" + std::to_string(nz);
      if (c == CRat(1)) return qs;
      if (c == CRat(-1)) return "-" + qs;
      return cs + "*" + qs;
    }
    return "(" + num_.str() + ")";
  }
  return "(" + num_.str() + ")/(" + den_.str() + ")";
}

Rat parse_rat(const std::string& s) {
  Rat r;
  if (r.set_str(s, 10) != 0) throw QCoeffError("bad rational literal: " + s);
  r.canonicalize();
  return r;
}

}  // namespace qglevy
