#include "qglevy/algebra.hpp"

#include <algorithm>
#include <cctype>
#include <deque>
#include <random>
#include <sstream>

namespace qglevy {

std::string variant_name(Variant v) {
  switch (v) {
    case Variant::Mq: return "Mq";
    case Variant::SUq: return "SUq";
    case Variant::Uq: return "Uq";
  }
  return "?";
}

GenSym GenSym::adjoint() const {
  switch (kind) {
    case Kind::U: return {Kind::Ustar, row, col};
    case Kind::Ustar: return {Kind::U, row, col};
    case Kind::Dinv: return {Kind::DinvStar, 0, 0};
    case Kind::DinvStar: return {Kind::Dinv, 0, 0};
  }
  return *this;
}

std::string GenSym::str() const {
  switch (kind) {
    case Kind::U: return "u[" + std::to_string(row) + "," + std::to_string(col) + "]";
    case Kind::Ustar: return "u*[" + std::to_string(row) + "," + std::to_string(col) + "]";
    case Kind::Dinv: return "Dinv";
    case Kind::DinvStar: return "Dinvstar";
  }
  return "?";
}

void AlgebraCtx::check_valid() const {
  if (N < 1) throw AlgebraError("context: N must be >= 1");
  if (q0) {
    if (*q0 <= 0 || *q0 >= 1) throw AlgebraError("context: q0 must lie in (0,1)");
  }
}

AlgebraCtx suq_ctx(int N, std::optional<Rat> q0) {
  AlgebraCtx c{N, Variant::SUq, std::move(q0)};
  c.check_valid();
  return c;
}
AlgebraCtx uq_ctx(int N, std::optional<Rat> q0) {
  AlgebraCtx c{N, Variant::Uq, std::move(q0)};
  c.check_valid();
  return c;
}
AlgebraCtx mq_ctx(int N, std::optional<Rat> q0) {
  AlgebraCtx c{N, Variant::Mq, std::move(q0)};
  c.check_valid();
  return c;
}

static void check_letter(const AlgebraCtx& ctx, const GenSym& g) {
  if (g.kind == GenSym::Kind::U || g.kind == GenSym::Kind::Ustar) {
    if (g.row < 1 || g.row > ctx.N || g.col < 1 || g.col > ctx.N)
      throw AlgebraError("generator index out of range for N=" + std::to_string(ctx.N));
  } else {
    if (ctx.variant == Variant::Mq)
      throw AlgebraError("Dinv is not a generator of M_q(N)");
  }
}

AlgElt::AlgElt(AlgebraCtx ctx, const QCoeff& scalar) : ctx_(std::move(ctx)) {
  if (!scalar.is_zero()) terms_[Word{}] = scalar;
}

AlgElt AlgElt::gen(const AlgebraCtx& ctx, const GenSym& g) {
  return word(ctx, Word{g});
}

AlgElt AlgElt::word(const AlgebraCtx& ctx, const Word& w, const QCoeff& c) {
  AlgElt e(ctx);
  if (c.is_zero()) return e;
  Word kept;
  kept.reserve(w.size());
  for (const GenSym& g : w) {
    check_letter(ctx, g);
    // In the SUq quotient D = 1, so D^{+-1} and its adjoint are the unit.
    if (ctx.variant == Variant::SUq &&
        (g.kind == GenSym::Kind::Dinv || g.kind == GenSym::Kind::DinvStar))
      continue;
    kept.push_back(g);
  }
  e.terms_[kept] = c;
  return e;
}

int AlgElt::degree() const {
  int d = -1;
  for (const auto& [w, c] : terms_) d = std::max<int>(d, static_cast<int>(w.size()));
  return d;
}

QCoeff AlgElt::coeff(const Word& w) const {
  auto it = terms_.find(w);
  return it == terms_.end() ? QCoeff() : it->second;
}

void AlgElt::add_term(const Word& w, const QCoeff& c) {
  if (c.is_zero()) return;
  auto it = terms_.find(w);
  if (it == terms_.end()) {
    terms_[w] = c;
  } else {
    it->second += c;
    if (it->second.is_zero()) terms_.erase(it);
  }
}

AlgElt AlgElt::operator-() const {
  AlgElt r(ctx_);
  for (const auto& [w, c] : terms_) r.terms_[w] = -c;
  return r;
}

static void check_ctx(const AlgElt& a, const AlgElt& b) {
  if (!(a.ctx() == b.ctx())) throw AlgebraError("context mismatch");
}

AlgElt operator+(const AlgElt& a, const AlgElt& b) {
  check_ctx(a, b);
  AlgElt r = a;
  for (const auto& [w, c] : b.terms()) r.add_term(w, c);
  return r;
}

AlgElt operator-(const AlgElt& a, const AlgElt& b) { return a + (-b); }

AlgElt operator*(const AlgElt& a, const AlgElt& b) {
  check_ctx(a, b);
  AlgElt r(a.ctx());
  for (const auto& [wa, ca] : a.terms()) {
    for (const auto& [wb, cb] : b.terms()) {
      Word w = wa;
      w.insert(w.end(), wb.begin(), wb.end());
      if (w.size() > 64) throw CapExceeded("word length cap exceeded in product");
      r.add_term(w, ca * cb);
    }
  }
  return r;
}

AlgElt operator*(const QCoeff& c, const AlgElt& a) {
  AlgElt r(a.ctx());
  for (const auto& [w, cw] : a.terms()) r.add_term(w, c * cw);
  return r;
}

AlgElt mul(const AlgElt& a, const AlgElt& b) { return a * b; }
AlgElt add(const AlgElt& a, const AlgElt& b) { return a + b; }

AlgElt adjoint(const AlgElt& a) {
  AlgElt r(a.ctx());
  for (const auto& [w, c] : a.terms()) {
    Word rw(w.rbegin(), w.rend());
    for (GenSym& g : rw) g = g.adjoint();
    r.add_term(rw, c.conj());
  }
  return r;
}

int inversion_count(const std::vector<int>& perm) {
  int inv = 0;
  for (size_t j = 0; j < perm.size(); ++j)
    for (size_t k = j + 1; k < perm.size(); ++k)
      if (perm[j] > perm[k]) ++inv;
  return inv;
}

std::vector<std::vector<int>> all_permutations(int n) {
  std::vector<int> p(n);
  for (int j = 0; j < n; ++j) p[j] = j + 1;
  std::vector<std::vector<int>> out;
  do {
    out.push_back(p);
  } while (std::next_permutation(p.begin(), p.end()));
  return out;
}

static QCoeff minus_q_pow(int k) {
  QCoeff c = QCoeff::q_power(k);
  return (k % 2 == 0) ? c : -c;
}

AlgElt quantum_determinant(const AlgebraCtx& ctx) {
  AlgElt d(ctx);
  for (const auto& sigma : all_permutations(ctx.N)) {
    Word w;
    for (int r = 1; r <= ctx.N; ++r) w.push_back(GenSym::u(r, sigma[r - 1]));
    d.add_term(w, minus_q_pow(inversion_count(sigma)));
  }
  return d;
}

AlgElt quantum_minor(const AlgebraCtx& ctx, int j, int k) {
  if (j < 1 || j > ctx.N || k < 1 || k > ctx.N)
    throw AlgebraError("quantum_minor: invalid indices");
  std::vector<int> rows, cols;
  for (int r = 1; r <= ctx.N; ++r)
    if (r != j) rows.push_back(r);
  for (int c = 1; c <= ctx.N; ++c)
    if (c != k) cols.push_back(c);
  AlgElt m(ctx);
  if (rows.empty()) return AlgElt::unit(ctx);  // 1x1 matrix: the empty minor is 1
  std::vector<int> idx(rows.size());
  for (size_t t = 0; t < idx.size(); ++t) idx[t] = static_cast<int>(t);
  do {
    Word w;
    std::vector<int> pattern;
    for (size_t t = 0; t < rows.size(); ++t) {
      w.push_back(GenSym::u(rows[t], cols[idx[t]]));
      pattern.push_back(idx[t]);
    }
    m.add_term(w, minus_q_pow(inversion_count(pattern)));
  } while (std::next_permutation(idx.begin(), idx.end()));
  return m;
}

AlgElt twisted_determinant(const AlgebraCtx& ctx, const std::vector<int>& tau) {
  if (static_cast<int>(tau.size()) != ctx.N) throw AlgebraError("twisted_determinant: bad permutation size");
  {
    std::vector<int> s = tau;
    std::sort(s.begin(), s.end());
    for (int r = 1; r <= ctx.N; ++r)
      if (s[r - 1] != r) throw AlgebraError("twisted_determinant: not a permutation");
  }
  AlgElt d(ctx);
  for (const auto& sigma : all_permutations(ctx.N)) {
    Word w;
    for (int r = 1; r <= ctx.N; ++r) w.push_back(GenSym::u(sigma[r - 1], tau[r - 1]));
    d.add_term(w, minus_q_pow(inversion_count(sigma)));
  }
  return d;
}

AlgElt adjoint_expand(const AlgElt& a) {
  const AlgebraCtx& ctx = a.ctx();
  if (ctx.variant == Variant::Mq)
    throw AlgebraError("adjoint_expand: M_q(N) carries no involution");
  AlgElt result(ctx);
  for (const auto& [w, c] : a.terms()) {
    AlgElt acc(ctx, c);
    for (const GenSym& g : w) {
      AlgElt factor(ctx);
      switch (g.kind) {
        case GenSym::Kind::U:
        case GenSym::Kind::Dinv:
          factor = AlgElt::gen(ctx, g);
          break;
        case GenSym::Kind::Ustar: {
          factor = minus_q_pow(g.col - g.row) * quantum_minor(ctx, g.row, g.col);
          if (ctx.variant == Variant::Uq)
            factor = factor * AlgElt::gen(ctx, GenSym::dinv());
          break;
        }
        case GenSym::Kind::DinvStar:
          // D^{-1*} = D, the determinant polynomial (unit in SUq).
          factor = (ctx.variant == Variant::Uq) ? quantum_determinant(ctx) : AlgElt::unit(ctx);
          break;
      }
      acc = acc * factor;
    }
    result = result + acc;
  }
  return result;
}

// ---------------------------------------------------------------------------
// Normal form

namespace {

struct SplitWord {
  int dinv = 0;
  Word u;  // pure U letters
};

SplitWord split_word(const AlgebraCtx& ctx, const Word& w) {
  SplitWord s;
  for (const GenSym& g : w) {
    switch (g.kind) {
      case GenSym::Kind::U:
        s.u.push_back(g);
        break;
      case GenSym::Kind::Dinv:
        if (ctx.variant != Variant::Uq)
          throw AlgebraError("normal_form: Dinv outside a Uq context");
        ++s.dinv;
        break;
      default:
        throw AlgebraError("normal_form: starred input; call adjoint_expand first");
    }
  }
  return s;
}

Word join_word(const SplitWord& s) {
  Word w;
  w.reserve(s.dinv + s.u.size());
  for (int t = 0; t < s.dinv; ++t) w.push_back(GenSym::dinv());
  w.insert(w.end(), s.u.begin(), s.u.end());
  return w;
}

inline bool out_of_order(const GenSym& x, const GenSym& y) {
  return x.row > y.row || (x.row == y.row && x.col > y.col);
}

// leftmost (or rightmost) out-of-order adjacent pair; -1 if sorted
int find_pair(const Word& u, bool leftmost) {
  if (u.size() < 2) return -1;
  if (leftmost) {
    for (size_t p = 0; p + 1 < u.size(); ++p)
      if (out_of_order(u[p], u[p + 1])) return static_cast<int>(p);
  } else {
    for (size_t p = u.size() - 1; p-- > 0;)
      if (out_of_order(u[p], u[p + 1])) return static_cast<int>(p);
  }
  return -1;
}

// leftmost (or rightmost) contiguous diagonal staircase u_11...u_NN
int find_staircase(const Word& u, int N, bool leftmost) {
  if (static_cast<int>(u.size()) < N) return -1;
  auto match = [&](size_t p) {
    for (int t = 0; t < N; ++t)
      if (u[p + t].row != t + 1 || u[p + t].col != t + 1) return false;
    return true;
  };
  size_t last = u.size() - N;
  if (leftmost) {
    for (size_t p = 0; p <= last; ++p)
      if (match(p)) return static_cast<int>(p);
  } else {
    for (size_t p = last + 1; p-- > 0;)
      if (match(p)) return static_cast<int>(p);
  }
  return -1;
}

struct Pending {
  SplitWord w;
  QCoeff c;
};

QCoeff q_commutator_coeff() {  // 1/q - q
  return QCoeff::q_power(-1) - QCoeff::q_power(1);
}

}  // namespace

static NormalFormResult normal_form_impl(const AlgElt& a, const NormalFormOptions& opts,
                                         bool leftmost) {
  const AlgebraCtx& ctx = a.ctx();
  if (opts.apply_det_rule && ctx.variant != Variant::SUq)
    throw AlgebraError("determinant rule applies only in SUq contexts");

  std::deque<Pending> work;
  for (const auto& [w, c] : a.terms()) work.push_back({split_word(ctx, w), c});

  AlgElt result(ctx);
  long steps = 0;
  bool complete = true;
  const QCoeff qc = q_commutator_coeff();
  const QCoeff qinv = QCoeff::q_power(-1);

  while (!work.empty()) {
    Pending t = std::move(work.front());
    work.pop_front();
    if (t.c.is_zero()) continue;
    if (t.w.u.size() > opts.word_len_cap) throw CapExceeded("word length cap exceeded");

    int p = find_pair(t.w.u, leftmost);
    if (p >= 0) {
      if (++steps > opts.step_cap) {
        complete = false;
        result.add_term(join_word(t.w), t.c);
        continue;
      }
      const GenSym x = t.w.u[p], y = t.w.u[p + 1];
      SplitWord swapped = t.w;
      std::swap(swapped.u[p], swapped.u[p + 1]);
      if (x.row == y.row || x.col == y.col) {
        // u_ij u_il (j>l) = q^{-1} u_il u_ij; same for a shared column
        work.push_back({std::move(swapped), t.c * qinv});
      } else if (x.col < y.col) {
        // rows i>k, cols j<l: plain transposition
        work.push_back({std::move(swapped), t.c});
      } else {
        // rows i>k, cols j>l: transposition plus the (1/q - q) correction
        SplitWord corr = t.w;
        corr.u[p] = GenSym::u(y.row, x.col);
        corr.u[p + 1] = GenSym::u(x.row, y.col);
        work.push_back({std::move(swapped), t.c});
        work.push_back({std::move(corr), t.c * qc});
      }
      continue;
    }

    if (opts.apply_det_rule) {
      int sp = find_staircase(t.w.u, ctx.N, leftmost);
      if (sp >= 0) {
        if (++steps > opts.step_cap) {
          complete = false;
          result.add_term(join_word(t.w), t.c);
          continue;
        }
        SplitWord reduced = t.w;
        reduced.u.erase(reduced.u.begin() + sp, reduced.u.begin() + sp + ctx.N);
        work.push_back({reduced, t.c});
        for (const auto& sigma : all_permutations(ctx.N)) {
          bool ident = true;
          for (int r = 1; r <= ctx.N; ++r)
            if (sigma[r - 1] != r) {
              ident = false;
              break;
            }
          if (ident) continue;
          SplitWord other = reduced;
          Word ins;
          for (int r = 1; r <= ctx.N; ++r) ins.push_back(GenSym::u(r, sigma[r - 1]));
          other.u.insert(other.u.begin() + sp, ins.begin(), ins.end());
          work.push_back({std::move(other), -(t.c * minus_q_pow(inversion_count(sigma)))});
        }
        continue;
      }
    }

    result.add_term(join_word(t.w), t.c);
  }

  return {std::move(result), complete, steps};
}

NormalFormResult normal_form_full(const AlgElt& a, const NormalFormOptions& opts) {
  return normal_form_impl(a, opts, /*leftmost=*/true);
}

AlgElt normal_form(const AlgElt& a, bool apply_det_rule) {
  NormalFormOptions opts;
  opts.apply_det_rule = apply_det_rule;
  NormalFormResult r = normal_form_full(a, opts);
  if (!r.complete) throw CapExceeded("normal_form: iteration cap exceeded");
  return r.value;
}

// ---------------------------------------------------------------------------
// Equality

std::string equality_name(Equality e) {
  switch (e) {
    case Equality::ProvedEqual: return "proved-equal";
    case Equality::ProvedDifferent: return "proved-different";
    case Equality::ProvedDifferentByEvaluation: return "proved-different-by-evaluation";
    case Equality::EvaluationEqual: return "evaluation-equal";
    case Equality::Undecided: return "undecided";
  }
  return "?";
}

// Clears D^{-1} from a Uq normal form by cross-multiplying with determinant
// powers; the result lives in M_q(N) and equality there is decided.
static AlgElt clear_dinv(const AlgElt& nf) {
  const AlgebraCtx& uctx = nf.ctx();
  AlgebraCtx mctx = mq_ctx(uctx.N, uctx.q0);
  int maxp = 0;
  for (const auto& [w, c] : nf.terms()) {
    int p = 0;
    for (const GenSym& g : w)
      if (g.kind == GenSym::Kind::Dinv) ++p;
    maxp = std::max(maxp, p);
  }
  AlgElt det = quantum_determinant(mctx);
  std::vector<AlgElt> det_pow;
  det_pow.push_back(AlgElt::unit(mctx));
  for (int p = 1; p <= maxp; ++p) det_pow.push_back(det_pow.back() * det);

  AlgElt out(mctx);
  for (const auto& [w, c] : nf.terms()) {
    Word uw;
    int p = 0;
    for (const GenSym& g : w) {
      if (g.kind == GenSym::Kind::Dinv)
        ++p;
      else
        uw.push_back(g);
    }
    out = out + det_pow[maxp - p] * AlgElt::word(mctx, uw, c);
  }
  return normal_form(out, false);
}

// Monomial order on normal-ordered words: degree first, then exponent-lex
// with u_11 most significant (on sorted words: the smaller letter at the
// first difference wins). Under this order the leading word of a PBW
// product is the exponent sum - the cross-commutation correction swaps a
// column pair downwards - and the leading word of D - 1 is the staircase.
static bool gl_less(const Word& a, const Word& b) {
  if (a.size() != b.size()) return a.size() < b.size();
  for (size_t i = 0; i < a.size(); ++i)
    if (!(a[i] == b[i])) return b[i] < a[i];
  return false;
}

static const Word* leading_word(const AlgElt& a) {
  const Word* best = nullptr;
  for (const auto& [w, c] : a.terms())
    if (best == nullptr || gl_less(*best, w)) best = &w;
  return best;
}

// multiset division of sorted words; empty optional when not divisible
static std::optional<Word> word_divide(const Word& w, const Word& lt) {
  Word rest;
  size_t i = 0;
  for (const GenSym& g : lt) {
    bool found = false;
    while (i < w.size()) {
      if (w[i] == g) {
        found = true;
        ++i;
        break;
      }
      rest.push_back(w[i]);
      ++i;
    }
    if (!found) return std::nullopt;
  }
  rest.insert(rest.end(), w.begin() + i, w.end());
  std::sort(rest.begin(), rest.end());
  return rest;
}

// Division of an M_q(N) normal form by the central element D - 1. Since
// M_q(N) is a domain whose PBW leading terms multiply like commutative
// monomials, the remainder is zero exactly for members of the ideal
// (D - 1), which decides equality in the SU_q quotient.
static bool reduces_by_det(AlgElt z) {
  const AlgebraCtx mctx = z.ctx();
  const AlgElt det = quantum_determinant(mctx);
  const AlgElt det_minus_one = det - AlgElt::unit(mctx);
  const Word lt = *leading_word(det);
  long guard = 0;
  while (!z.is_zero()) {
    if (++guard > 200000) throw CapExceeded("determinant division: step cap exceeded");
    const Word* w = leading_word(z);
    auto m = word_divide(*w, lt);
    if (!m) return false;
    AlgElt sub = normal_form(det_minus_one * AlgElt::word(mctx, *m), false);
    const Word* ws = leading_word(sub);
    if (ws == nullptr || !(*ws == *w))
      throw AlgebraError("determinant division: leading term mismatch");
    z = z - (z.coeff(*w) / sub.coeff(*ws)) * sub;
  }
  return true;
}

static AlgElt to_mq(const AlgElt& a) {
  AlgebraCtx mctx = mq_ctx(a.ctx().N, a.ctx().q0);
  AlgElt out(mctx);
  for (const auto& [w, c] : a.terms()) out.add_term(w, c);
  return out;
}

Equality equals_exact(const AlgElt& a, const AlgElt& b, const EvalOracle* oracle) {
  check_ctx(a, b);
  const Variant v = a.ctx().variant;

  auto star_free = [](const AlgElt& e) {
    for (const auto& [w, c] : e.terms())
      for (const GenSym& g : w)
        if (g.starred()) return false;
    return true;
  };

  if (v == Variant::Mq) {
    if (!star_free(a) || !star_free(b))
      throw AlgebraError("equals_exact: M_q(N) equality requires star-free input");
    return normal_form(a - b, false).is_zero() ? Equality::ProvedEqual
                                               : Equality::ProvedDifferent;
  }

  AlgElt diff = adjoint_expand(a - b);

  if (v == Variant::Uq) {
    AlgElt nf = normal_form(diff, false);
    return clear_dinv(nf).is_zero() ? Equality::ProvedEqual : Equality::ProvedDifferent;
  }

  // SUq: equality modulo the central ideal (D - 1), decided by PBW division
  // when the reductions stay within the caps
  try {
    AlgElt z = normal_form(to_mq(diff), false);
    return reduces_by_det(std::move(z)) ? Equality::ProvedEqual : Equality::ProvedDifferent;
  } catch (const CapExceeded&) {
    if (oracle != nullptr) {
      Eigen::MatrixXcd m = oracle->eval_matrix(a - b);
      if (m.norm() <= oracle->tolerance()) return Equality::EvaluationEqual;
      return Equality::ProvedDifferentByEvaluation;
    }
    return Equality::Undecided;
  }
}

// ---------------------------------------------------------------------------
// Relation catalog

std::vector<RelationEntry> relation_catalog(const AlgebraCtx& ctx) {
  std::vector<RelationEntry> cat;
  const int N = ctx.N;
  auto U = [&](int j, int k) { return AlgElt::gen(ctx, GenSym::u(j, k)); };
  auto Us = [&](int j, int k) { return AlgElt::gen(ctx, GenSym::ustar(j, k)); };
  auto one = AlgElt::unit(ctx);
  const QCoeff q = QCoeff::q_power(1);
  const QCoeff qinv = QCoeff::q_power(-1);
  const QCoeff qc = q_commutator_coeff();           // 1/q - q
  const QCoeff one_minus_q2 = QCoeff(1) - QCoeff::q_power(2);
  auto tag = [](const std::string& fam, std::initializer_list<int> idx) {
    std::string s = fam + "[";
    bool first = true;
    for (int v : idx) {
      if (!first) s += ",";
      first = false;
      s += std::to_string(v);
    }
    return s + "]";
  };

  // the four commutation relations
  for (int j = 1; j <= N; ++j)
    for (int i = 1; i <= N; ++i)
      for (int k = i + 1; k <= N; ++k)
        cat.push_back({tag("comm-col", {i, k, j}), U(i, j) * U(k, j) - q * (U(k, j) * U(i, j))});
  for (int i = 1; i <= N; ++i)
    for (int j = 1; j <= N; ++j)
      for (int l = j + 1; l <= N; ++l)
        cat.push_back({tag("comm-row", {i, j, l}), U(i, j) * U(i, l) - q * (U(i, l) * U(i, j))});
  for (int i = 1; i <= N; ++i)
    for (int k = i + 1; k <= N; ++k)
      for (int j = 1; j <= N; ++j)
        for (int l = 1; l < j; ++l)
          cat.push_back({tag("comm-cross", {i, j, k, l}), U(i, j) * U(k, l) - U(k, l) * U(i, j)});
  for (int i = 1; i <= N; ++i)
    for (int k = i + 1; k <= N; ++k)
      for (int j = 1; j <= N; ++j)
        for (int l = j + 1; l <= N; ++l)
          cat.push_back({tag("comm-q", {i, j, k, l}),
                         U(i, j) * U(k, l) - U(k, l) * U(i, j) + qc * (U(i, l) * U(k, j))});

  // determinant relations
  if (ctx.variant == Variant::SUq) {
    cat.push_back({"det", quantum_determinant(ctx) - one});
  } else if (ctx.variant == Variant::Uq) {
    AlgElt dinv = AlgElt::gen(ctx, GenSym::dinv());
    cat.push_back({"DinvD", dinv * quantum_determinant(ctx) - one});
  }

  // twisted determinants (scalar in SUq; proportional to D otherwise)
  if (N <= 4) {
    for (const auto& tau : all_permutations(N)) {
      AlgElt rhs = (ctx.variant == Variant::SUq)
                       ? minus_q_pow(inversion_count(tau)) * one
                       : minus_q_pow(inversion_count(tau)) * quantum_determinant(ctx);
      std::string lbl = "twist[";
      for (size_t t = 0; t < tau.size(); ++t)
        lbl += (t ? "," : "") + std::to_string(tau[t]);
      lbl += "]";
      cat.push_back({lbl, twisted_determinant(ctx, tau) - rhs});
    }
  }

  if (ctx.variant == Variant::Mq) return cat;  // no involution, star-free families only

  // unitarity
  for (int j = 1; j <= N; ++j)
    for (int k = 1; k <= N; ++k) {
      AlgElt rows(ctx), cols(ctx);
      for (int s = 1; s <= N; ++s) {
        rows = rows + U(j, s) * Us(k, s);
        cols = cols + Us(s, j) * U(s, k);
      }
      AlgElt delta = (j == k) ? one : AlgElt::zero(ctx);
      cat.push_back({tag("unit-row", {j, k}), rows - delta});
      cat.push_back({tag("unit-col", {j, k}), cols - delta});
    }

  // mixed commutation among generators and adjoints
  for (int i = 1; i <= N; ++i)
    for (int j = 1; j <= N; ++j)
      for (int k = 1; k <= N; ++k)
        for (int l = 1; l <= N; ++l) {
          if (i != k && j != l)
            cat.push_back({tag("star-far", {i, j, k, l}), U(i, j) * Us(k, l) - Us(k, l) * U(i, j)});
        }
  for (int i = 1; i <= N; ++i)
    for (int k = 1; k <= N; ++k) {
      if (i == k) continue;
      for (int j = 1; j <= N; ++j) {
        AlgElt sum(ctx);
        for (int p = 1; p < j; ++p) sum = sum + U(i, p) * Us(k, p);
        cat.push_back({tag("star-col", {i, j, k}),
                       U(i, j) * Us(k, j) - q * (Us(k, j) * U(i, j)) + one_minus_q2 * sum});
      }
    }
  for (int j = 1; j <= N; ++j)
    for (int l = 1; l <= N; ++l) {
      if (j == l) continue;
      for (int i = 1; i <= N; ++i) {
        AlgElt sum(ctx);
        for (int s = i + 1; s <= N; ++s) sum = sum + Us(s, l) * U(s, j);
        cat.push_back({tag("star-row", {i, j, l}),
                       U(i, j) * Us(i, l) - qinv * (Us(i, l) * U(i, j)) - qc * sum});
      }
    }
  for (int i = 1; i <= N; ++i)
    for (int j = 1; j <= N; ++j) {
      AlgElt s1(ctx), s2(ctx);
      for (int s = i + 1; s <= N; ++s) s1 = s1 + Us(s, j) * U(s, j);
      for (int p = 1; p < j; ++p) s2 = s2 + U(i, p) * Us(i, p);
      cat.push_back({tag("star-diag", {i, j}),
                     U(i, j) * Us(i, j) - Us(i, j) * U(i, j) - one_minus_q2 * s1 +
                         one_minus_q2 * s2});
    }

  // corner-index special cases of the commutation relations
  for (int j = 1; j < N; ++j) {
    cat.push_back({tag("corner-col", {j}), U(j, N) * U(N, N) - q * (U(N, N) * U(j, N))});
    cat.push_back({tag("corner-row", {j}), U(N, j) * U(N, N) - q * (U(N, N) * U(N, j))});
  }
  for (int j = 1; j < N; ++j)
    for (int k = 1; k < N; ++k) {
      cat.push_back({tag("corner-cross", {j, k}), U(j, N) * U(N, k) - U(N, k) * U(j, N)});
      cat.push_back({tag("corner-q", {j, k}),
                     U(j, k) * U(N, N) - U(N, N) * U(j, k) + qc * (U(j, N) * U(N, k))});
    }

  // corner-index mixed special cases
  for (int j = 1; j < N; ++j)
    for (int k = 1; k < N; ++k) {
      if (j == k) continue;
      cat.push_back({tag("corner-star-row", {j, k}), U(N, j) * Us(N, k) - qinv * (Us(N, k) * U(N, j))});
      cat.push_back({tag("corner-star-col", {j, k}), U(j, N) * Us(k, N) - qinv * (Us(k, N) * U(j, N))});
    }
  cat.push_back({"corner-star-diag",
                 Us(N, N) * U(N, N) - QCoeff::q_power(2) * (U(N, N) * Us(N, N)) -
                     one_minus_q2 * one});

  return cat;
}

// ---------------------------------------------------------------------------
// Confluence spot check

ConfluenceReport check_confluence(const AlgebraCtx& ctx, int max_degree, int trials,
                                  uint64_t seed, bool apply_det_rule) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> deg_dist(1, max_degree);
  std::uniform_int_distribution<int> idx_dist(1, ctx.N);
  std::uniform_int_distribution<int> coef_dist(-4, 4);
  std::uniform_int_distribution<int> nterms_dist(1, 3);

  ConfluenceReport rep;
  NormalFormOptions opts;
  opts.apply_det_rule = apply_det_rule;
  for (int t = 0; t < trials; ++t) {
    AlgElt e(ctx);
    int nterms = nterms_dist(rng);
    for (int m = 0; m < nterms; ++m) {
      int deg = deg_dist(rng);
      Word w;
      for (int d = 0; d < deg; ++d) w.push_back(GenSym::u(idx_dist(rng), idx_dist(rng)));
      int c = coef_dist(rng);
      if (c == 0) c = 1;
      e.add_term(w, QCoeff(c));
    }
    NormalFormResult left = normal_form_impl(e, opts, true);
    NormalFormResult right = normal_form_impl(e, opts, false);
    ++rep.trials;
    if (!left.complete || !right.complete || !(left.value == right.value)) {
      rep.confluent = false;
      ++rep.mismatches;
    }
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Parser / printer

namespace {

struct Lexer {
  std::string s;
  size_t pos = 0;

  void skip_ws() {
    while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
  }
  bool eof() {
    skip_ws();
    return pos >= s.size();
  }
  char peek() {
    skip_ws();
    return pos < s.size() ? s[pos] : '\0';
  }
  bool accept(char c) {
    skip_ws();
    if (pos < s.size() && s[pos] == c) {
      ++pos;
      return true;
    }
    return false;
  }
  void expect(char c) {
    if (!accept(c)) throw AlgebraError(std::string("parse error: expected '") + c + "' at position " + std::to_string(pos));
  }
  bool accept_word(const std::string& w) {
    skip_ws();
    if (s.compare(pos, w.size(), w) == 0) {
      pos += w.size();
      return true;
    }
    return false;
  }
  long parse_int() {
    skip_ws();
    size_t start = pos;
    if (pos < s.size() && (s[pos] == '-' || s[pos] == '+')) ++pos;
    while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
    if (pos == start || (pos == start + 1 && !std::isdigit(static_cast<unsigned char>(s[start]))))
      throw AlgebraError("parse error: integer expected at position " + std::to_string(start));
    return std::stol(s.substr(start, pos - start));
  }
};

class ElementParser {
 public:
  ElementParser(const std::string& text, const AlgebraCtx& ctx) : lex_{text}, ctx_(ctx) {}

  AlgElt parse() {
    AlgElt e = parse_sum();
    if (!lex_.eof()) throw AlgebraError("parse error: trailing input at position " + std::to_string(lex_.pos));
    return e;
  }

 private:
  AlgElt parse_sum() {
    bool neg = false;
    if (lex_.accept('-'))
      neg = true;
    else
      lex_.accept('+');
    AlgElt acc = parse_product();
    if (neg) acc = -acc;
    while (true) {
      if (lex_.accept('+'))
        acc = acc + parse_product();
      else if (lex_.accept('-'))
        acc = acc - parse_product();
      else
        break;
    }
    return acc;
  }

  AlgElt parse_product() {
    AlgElt acc = parse_power();
    while (true) {
      if (lex_.accept('*')) {
        acc = acc * parse_power();
      } else if (lex_.accept('/')) {
        AlgElt d = parse_power();
        acc = acc * inverse_scalar(d);
      } else {
        break;
      }
    }
    return acc;
  }

  AlgElt inverse_scalar(const AlgElt& d) {
    if (d.terms().size() != 1 || !d.terms().begin()->first.empty())
      throw AlgebraError("parse error: division only by scalars");
    QCoeff c = d.terms().begin()->second;
    return AlgElt(ctx_, QCoeff(1) / c);
  }

  AlgElt parse_power() {
    if (lex_.accept('-')) return -parse_power();
    AlgElt base = parse_atom();
    if (lex_.accept('^')) {
      long e = lex_.parse_int();
      if (e >= 0) {
        AlgElt acc = AlgElt::unit(ctx_);
        for (long t = 0; t < e; ++t) acc = acc * base;
        return acc;
      }
      AlgElt inv = inverse_scalar(base);
      AlgElt acc = AlgElt::unit(ctx_);
      for (long t = 0; t < -e; ++t) acc = acc * inv;
      return acc;
    }
    return base;
  }

  AlgElt parse_atom() {
    char c = lex_.peek();
    if (c == '(') {
      lex_.expect('(');
      AlgElt e = parse_sum();
      lex_.expect(')');
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      long v = lex_.parse_int();
      return AlgElt(ctx_, QCoeff(v));
    }
    if (lex_.accept_word("u*")) return parse_indexed(true);
    if (lex_.accept_word("Dinvstar")) return AlgElt::gen(ctx_, GenSym::dinv_star());
    if (lex_.accept_word("Dinv")) return AlgElt::gen(ctx_, GenSym::dinv());
    if (c == 'u') {
      lex_.expect('u');
      return parse_indexed(false);
    }
    if (lex_.accept_word("q")) return AlgElt(ctx_, QCoeff::q_power(1));
    if (lex_.accept_word("i")) return AlgElt(ctx_, QCoeff::i_unit());
    throw AlgebraError("parse error: unexpected input at position " + std::to_string(lex_.pos));
  }

  AlgElt parse_indexed(bool star) {
    lex_.expect('[');
    long j = lex_.parse_int();
    lex_.expect(',');
    long k = lex_.parse_int();
    lex_.expect(']');
    GenSym g = star ? GenSym::ustar(static_cast<int>(j), static_cast<int>(k))
                    : GenSym::u(static_cast<int>(j), static_cast<int>(k));
    return AlgElt::gen(ctx_, g);
  }

  Lexer lex_;
  AlgebraCtx ctx_;
};

}  // namespace

AlgElt parse_elt(const std::string& text, const AlgebraCtx& ctx) {
  return ElementParser(text, ctx).parse();
}

std::string print_elt(const AlgElt& a) {
  if (a.is_zero()) return "0";
  std::string out;
  bool first = true;
  for (const auto& [w, c] : a.terms()) {
    std::string cs = c.str();
    bool neg = !cs.empty() && cs[0] == '-';
    if (first) {
      if (neg) out += "-";
    } else {
      out += neg ? " - " : " + ";
    }
    if (neg) cs = cs.substr(1);
    first = false;
    std::string ws;
    for (size_t t = 0; t < w.size(); ++t) {
      if (t) ws += "*";
      ws += w[t].str();
    }
    if (w.empty()) {
      out += cs;
    } else if (cs == "1") {
      out += ws;
    } else {
      out += cs + "*" + ws;
    }
  }
  return out;
}

}  // namespace qglevy
