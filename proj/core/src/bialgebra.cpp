#include "qglevy/bialgebra.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>

namespace qglevy {

namespace {

// Counit of a single letter: delta_{jk} on u/u*, 1 on D^{+-1}.
int letter_counit(const GenSym& g) {
  if (g.kind == GenSym::Kind::Dinv || g.kind == GenSym::Kind::DinvStar) return 1;
  return g.row == g.col ? 1 : 0;
}

Rat q0_or_default(const AlgebraCtx& ctx, const QCoeff& c) {
  if (ctx.q0) return *ctx.q0;
  if (c.num().degree() <= 0 && c.den().degree() <= 0) return Rat(1, 2);
  throw PreconditionError("numeric evaluation needs a rational q0 in the context");
}

Cplx coeff_value(const AlgebraCtx& ctx, const QCoeff& c) {
  return c.eval_d(q0_or_default(ctx, c));
}

}  // namespace

QCoeff counit_exact(const AlgElt& a) {
  QCoeff acc;
  for (const auto& [w, c] : a.terms()) {
    bool keep = true;
    for (const GenSym& g : w)
      if (letter_counit(g) == 0) {
        keep = false;
        break;
      }
    if (keep) acc += c;
  }
  return acc;
}

Cplx counit(const AlgElt& a) { return coeff_value(a.ctx(), counit_exact(a)); }

std::vector<int> basis_extension_indices(const AlgebraCtx& ctx) {
  std::vector<int> idx;
  for (int j = 2; j <= ctx.N; ++j) idx.push_back(j);
  if (ctx.variant == Variant::Uq) idx.push_back(ctx.N + 1);
  return idx;
}

AlgElt basis_extension_elt(const AlgebraCtx& ctx, int kappa) {
  const QCoeff half_over_i(CRat(Rat(0), Rat(-1, 2)));  // 1/(2i)
  if (ctx.variant == Variant::Uq && kappa == ctx.N + 1) {
    AlgElt d = AlgElt::gen(ctx, GenSym::dinv()) - AlgElt::gen(ctx, GenSym::dinv_star());
    return half_over_i * d;
  }
  if (kappa < 2 || kappa > ctx.N) throw AlgebraError("basis extension index out of range");
  AlgElt d = AlgElt::gen(ctx, GenSym::u(kappa, kappa)) -
             AlgElt::gen(ctx, GenSym::ustar(kappa, kappa));
  return half_over_i * d;
}

bool diagonal_exponents(const AlgebraCtx& ctx, const Word& w, std::vector<long>& m) {
  if (ctx.variant == Variant::Mq)
    throw AlgebraError("character family is defined on SUq/Uq contexts only");
  std::vector<long> n(ctx.N, 0);
  for (const GenSym& g : w) {
    switch (g.kind) {
      case GenSym::Kind::U:
        if (g.row != g.col) return false;
        n[g.row - 1] += 1;
        break;
      case GenSym::Kind::Ustar:
        if (g.row != g.col) return false;
        n[g.row - 1] -= 1;
        break;
      case GenSym::Kind::Dinv:
        for (auto& v : n) v -= 1;
        break;
      case GenSym::Kind::DinvStar:
        for (auto& v : n) v += 1;
        break;
    }
  }
  // free coordinates dual to E1: theta_j (j=2..N) after eliminating theta_1;
  // for Uq additionally the D-slot coordinate with theta_1 = -sum - t_D
  m.assign(basis_extension_indices(ctx).size(), 0);
  for (int j = 2; j <= ctx.N; ++j) m[j - 2] = n[j - 1] - n[0];
  if (ctx.variant == Variant::Uq) m[ctx.N - 1] = -n[0];
  return true;
}

Cplx eps_theta(const AlgElt& a, const std::vector<double>& theta) {
  const AlgebraCtx& ctx = a.ctx();
  if (theta.size() != basis_extension_indices(ctx).size())
    throw PreconditionError("eps_theta: wrong number of angles");
  Cplx acc = 0;
  std::vector<long> m;
  for (const auto& [w, c] : a.terms()) {
    if (!diagonal_exponents(ctx, w, m)) continue;
    double phase = 0;
    for (size_t t = 0; t < m.size(); ++t) phase += static_cast<double>(m[t]) * theta[t];
    acc += coeff_value(ctx, c) * std::exp(Cplx(0, phase));
  }
  return acc;
}

static int kappa_slot(const AlgebraCtx& ctx, int kappa) {
  auto idx = basis_extension_indices(ctx);
  for (size_t t = 0; t < idx.size(); ++t)
    if (idx[t] == kappa) return static_cast<int>(t);
  throw AlgebraError("not an E1 slot: " + std::to_string(kappa));
}

QCoeff eps_prime_exact(const AlgElt& a, int kappa) {
  const AlgebraCtx& ctx = a.ctx();
  int slot = kappa_slot(ctx, kappa);
  QCoeff acc;
  std::vector<long> m;
  for (const auto& [w, c] : a.terms()) {
    if (!diagonal_exponents(ctx, w, m)) continue;
    if (m[slot] == 0) continue;
    acc += QCoeff(CRat(Rat(0), Rat(m[slot]))) * c;  // i * m
  }
  return acc;
}

QCoeff eps_second_exact(const AlgElt& a, int j, int k) {
  const AlgebraCtx& ctx = a.ctx();
  int sj = kappa_slot(ctx, j), sk = kappa_slot(ctx, k);
  QCoeff acc;
  std::vector<long> m;
  for (const auto& [w, c] : a.terms()) {
    if (!diagonal_exponents(ctx, w, m)) continue;
    long v = -m[sj] * m[sk];
    if (v == 0) continue;
    acc += QCoeff(Rat(v)) * c;
  }
  return acc;
}

Cplx eps_prime(const AlgElt& a, int kappa) {
  return coeff_value(a.ctx(), eps_prime_exact(a, kappa));
}
Cplx eps_second(const AlgElt& a, int j, int k) {
  return coeff_value(a.ctx(), eps_second_exact(a, j, k));
}

AlgElt center_elt(const AlgElt& a) {
  return a - counit_exact(a) * AlgElt::unit(a.ctx());
}

AlgElt projP(const AlgElt& a) {
  const AlgebraCtx& ctx = a.ctx();
  AlgElt r = center_elt(a);
  for (int kappa : basis_extension_indices(ctx)) {
    QCoeff v = eps_prime_exact(a, kappa);
    if (!v.is_zero()) r = r - v * basis_extension_elt(ctx, kappa);
  }
  return r;
}

// ---------------------------------------------------------------------------
// Coproduct

std::vector<std::pair<Word, Word>> delta_pairs(const AlgebraCtx& ctx, const Word& w) {
  std::vector<std::pair<Word, Word>> out;
  out.push_back({Word{}, Word{}});
  for (const GenSym& g : w) {
    std::vector<std::pair<GenSym, GenSym>> options;
    if (g.kind == GenSym::Kind::U) {
      for (int s = 1; s <= ctx.N; ++s)
        options.push_back({GenSym::u(g.row, s), GenSym::u(s, g.col)});
    } else if (g.kind == GenSym::Kind::Ustar) {
      for (int s = 1; s <= ctx.N; ++s)
        options.push_back({GenSym::ustar(g.row, s), GenSym::ustar(s, g.col)});
    } else {
      options.push_back({g, g});  // Delta(D^-1) = D^-1 (x) D^-1
    }
    std::vector<std::pair<Word, Word>> next;
    next.reserve(out.size() * options.size());
    for (const auto& [l, r] : out)
      for (const auto& [gl, gr] : options) {
        Word nl = l, nr = r;
        nl.push_back(gl);
        nr.push_back(gr);
        next.push_back({std::move(nl), std::move(nr)});
      }
    out = std::move(next);
  }
  return out;
}

std::vector<TensorTerm> coproduct_iter(const AlgElt& a, int n, size_t term_cap) {
  if (n < 2) throw PreconditionError("coproduct_iter: n >= 2 required");
  const AlgebraCtx& ctx = a.ctx();
  std::vector<TensorTerm> out;
  size_t total = 0;
  for (const auto& [w, c] : a.terms()) {
    std::vector<std::vector<Word>> legs_list;
    legs_list.push_back(std::vector<Word>(n));
    for (const GenSym& g : w) {
      std::vector<std::vector<GenSym>> paths;  // letter chains of length n
      if (g.kind == GenSym::Kind::Dinv || g.kind == GenSym::Kind::DinvStar) {
        paths.push_back(std::vector<GenSym>(n, g));
      } else {
        // enumerate index paths j -> s1 -> ... -> s_{n-1} -> k
        std::vector<std::vector<int>> mids;
        mids.push_back({});
        for (int t = 0; t < n - 1; ++t) {
          std::vector<std::vector<int>> nx;
          for (const auto& m : mids)
            for (int s = 1; s <= ctx.N; ++s) {
              auto mm = m;
              mm.push_back(s);
              nx.push_back(std::move(mm));
            }
          mids = std::move(nx);
        }
        for (const auto& m : mids) {
          std::vector<GenSym> chain;
          int prev = g.row;
          for (int t = 0; t < n; ++t) {
            int nxt = (t == n - 1) ? g.col : m[t];
            chain.push_back(g.kind == GenSym::Kind::U ? GenSym::u(prev, nxt)
                                                      : GenSym::ustar(prev, nxt));
            prev = nxt;
          }
          paths.push_back(std::move(chain));
        }
      }
      std::vector<std::vector<Word>> next;
      for (const auto& legs : legs_list)
        for (const auto& chain : paths) {
          auto nl = legs;
          for (int t = 0; t < n; ++t) nl[t].push_back(chain[t]);
          next.push_back(std::move(nl));
          if (next.size() + total > term_cap)
            throw CapExceeded("coproduct_iter: term cap exceeded");
        }
      legs_list = std::move(next);
    }
    for (auto& legs : legs_list) out.push_back({std::move(legs), c});
    total = out.size();
  }
  return out;
}

// ---------------------------------------------------------------------------
// Functionals

Functional counit_functional() {
  Functional f;
  f.eval = [](const AlgElt& a) { return counit(a); };
  f.hermitian = true;
  f.drift = false;
  f.description = "counit";
  return f;
}

Functional eps_prime_functional(int kappa) {
  Functional f;
  f.eval = [kappa](const AlgElt& a) { return eps_prime(a, kappa); };
  f.hermitian = true;
  f.zero_normalized = true;
  f.drift = true;
  f.generating_candidate = true;
  f.description = "eps'_" + std::to_string(kappa);
  return f;
}

Functional drift_functional(const AlgebraCtx& ctx, const std::vector<double>& coeffs) {
  auto idx = basis_extension_indices(ctx);
  if (coeffs.size() != idx.size()) throw PreconditionError("drift_functional: wrong length");
  Functional f;
  f.eval = [idx, coeffs](const AlgElt& a) {
    Cplx acc = 0;
    for (size_t t = 0; t < idx.size(); ++t)
      if (coeffs[t] != 0.0) acc += coeffs[t] * eps_prime(a, idx[t]);
    return acc;
  };
  f.hermitian = f.zero_normalized = f.drift = f.generating_candidate = true;
  f.description = "drift";
  return f;
}

Functional convolve(const Functional& phi, const Functional& psi, size_t term_cap) {
  Functional f;
  f.eval = [phi, psi, term_cap](const AlgElt& a) {
    const AlgebraCtx& ctx = a.ctx();
    Cplx acc = 0;
    size_t seen = 0;
    for (const auto& [w, c] : a.terms()) {
      auto pairs = delta_pairs(ctx, w);
      seen += pairs.size();
      if (seen > term_cap) throw CapExceeded("convolve: coproduct term cap exceeded");
      Cplx s = 0;
      for (const auto& [l, r] : pairs)
        s += phi(AlgElt::word(ctx, l)) * psi(AlgElt::word(ctx, r));
      acc += coeff_value(ctx, c) * s;
    }
    return acc;
  };
  f.description = "(" + phi.description + ") * (" + psi.description + ")";
  return f;
}

Cplx conv_exp(const Functional& psi, double t, const AlgElt& a, const ConvExpOptions& opts) {
  const AlgebraCtx& ctx = a.ctx();
  Cplx total = 0;
  std::map<Word, Cplx> psi_memo;
  auto psi_val = [&](const Word& w) {
    auto it = psi_memo.find(w);
    if (it != psi_memo.end()) return it->second;
    Cplx v = psi(AlgElt::word(ctx, w));
    psi_memo.emplace(w, v);
    return v;
  };

  for (const auto& [w, c] : a.terms()) {
    // closure of w under taking left coproduct legs: same rows, free columns
    std::vector<Word> closure;
    closure.push_back(Word{});
    for (const GenSym& g : w) {
      std::vector<GenSym> options;
      if (g.kind == GenSym::Kind::U)
        for (int s = 1; s <= ctx.N; ++s) options.push_back(GenSym::u(g.row, s));
      else if (g.kind == GenSym::Kind::Ustar)
        for (int s = 1; s <= ctx.N; ++s) options.push_back(GenSym::ustar(g.row, s));
      else
        options.push_back(g);
      std::vector<Word> next;
      next.reserve(closure.size() * options.size());
      for (const auto& base : closure)
        for (const GenSym& o : options) {
          Word nw = base;
          nw.push_back(o);
          next.push_back(std::move(nw));
        }
      closure = std::move(next);
      if (closure.size() > opts.term_cap) throw CapExceeded("conv_exp: term cap exceeded");
    }
    std::map<Word, int> index;
    for (size_t k = 0; k < closure.size(); ++k) index[closure[k]] = static_cast<int>(k);
    int target = index.at(w);

    // transitions: v_n[x] = sum over middle columns of v_{n-1}[left] psi(right)
    struct Tr {
      int left;
      Cplx weight;
    };
    std::vector<std::vector<Tr>> trans(closure.size());
    for (size_t k = 0; k < closure.size(); ++k) {
      auto pairs = delta_pairs(ctx, closure[k]);
      for (const auto& [l, r] : pairs) trans[k].push_back({index.at(l), psi_val(r)});
    }

    std::vector<Cplx> v(closure.size()), vn(closure.size());
    for (size_t k = 0; k < closure.size(); ++k)
      v[k] = counit_exact(AlgElt::word(ctx, closure[k])).eval_d(Rat(1, 2));

    Cplx series = v[target];
    double tn_fact = 1.0;
    bool converged = false;
    int small_streak = 0;
    for (int n = 1; n <= opts.order_cap; ++n) {
      for (size_t k = 0; k < closure.size(); ++k) {
        Cplx acc = 0;
        for (const Tr& tr : trans[k]) acc += v[tr.left] * tr.weight;
        vn[k] = acc;
      }
      std::swap(v, vn);
      tn_fact *= t / n;
      Cplx term = tn_fact * v[target];
      series += term;
      if (std::abs(term) < opts.tol * (1.0 + std::abs(series))) {
        if (++small_streak >= 2) {
          converged = true;
          break;
        }
      } else {
        small_streak = 0;
      }
    }
    if (!converged && t != 0.0)
      throw ConvergenceError("conv_exp: order cap exceeded without convergence");
    total += coeff_value(ctx, c) * series;
  }
  return total;
}

// ---------------------------------------------------------------------------
// Batteries

static std::vector<GenSym> default_generators(const AlgebraCtx& ctx, bool with_stars) {
  std::vector<GenSym> gens;
  for (int j = 1; j <= ctx.N; ++j)
    for (int k = 1; k <= ctx.N; ++k) gens.push_back(GenSym::u(j, k));
  if (with_stars)
    for (int j = 1; j <= ctx.N; ++j)
      for (int k = 1; k <= ctx.N; ++k) gens.push_back(GenSym::ustar(j, k));
  if (ctx.variant == Variant::Uq) {
    gens.push_back(GenSym::dinv());
    if (with_stars) gens.push_back(GenSym::dinv_star());
  }
  return gens;
}

static void enumerate_words(const std::vector<GenSym>& gens, int max_degree,
                            const std::function<bool(const Word&)>& sink) {
  std::vector<Word> level;
  level.push_back(Word{});
  for (int d = 1; d <= max_degree; ++d) {
    std::vector<Word> next;
    for (const auto& base : level)
      for (const GenSym& g : gens) {
        Word w = base;
        w.push_back(g);
        if (!sink(w)) return;
        next.push_back(std::move(w));
      }
    level = std::move(next);
  }
}

std::vector<AlgElt> k1_battery(const AlgebraCtx& ctx, const BatterySpec& spec) {
  std::vector<GenSym> gens =
      spec.generators.empty() ? default_generators(ctx, true) : spec.generators;
  std::vector<AlgElt> out;
  enumerate_words(gens, spec.max_degree, [&](const Word& w) {
    AlgElt e = center_elt(AlgElt::word(ctx, w));
    if (!e.is_zero()) out.push_back(std::move(e));
    return spec.count == 0 || static_cast<int>(out.size()) < spec.count;
  });
  if (spec.count > 0 && static_cast<int>(out.size()) > spec.count)
    out.erase(out.begin() + spec.count, out.end());
  // top up with seeded random rational combinations of enumerated elements
  if (spec.count > 0 && static_cast<int>(out.size()) < spec.count && !out.empty()) {
    std::mt19937_64 rng(spec.seed);
    std::uniform_int_distribution<int> pick(0, static_cast<int>(out.size()) - 1);
    std::uniform_int_distribution<int> num(-3, 3);
    std::uniform_int_distribution<int> den(1, 2);
    while (static_cast<int>(out.size()) < spec.count) {
      int c1 = num(rng), c2 = num(rng);
      if (c1 == 0) c1 = 1;
      if (c2 == 0) c2 = -1;
      Rat r1(c1, den(rng)), r2(c2, den(rng));
      r1.canonicalize();
      r2.canonicalize();
      AlgElt e = QCoeff(r1) * out[pick(rng)] + QCoeff(r2) * out[pick(rng)];
      if (!e.is_zero()) out.push_back(std::move(e));
    }
  }
  return out;
}

std::vector<AlgElt> word_battery(const AlgebraCtx& ctx, int max_degree, bool with_stars,
                                 int count, uint64_t seed) {
  std::vector<GenSym> gens = default_generators(ctx, with_stars);
  std::vector<AlgElt> out;
  out.push_back(AlgElt::unit(ctx));
  enumerate_words(gens, max_degree, [&](const Word& w) {
    out.push_back(AlgElt::word(ctx, w));
    return count == 0 || static_cast<int>(out.size()) < 4 * std::max(count, 16);
  });
  if (count > 0 && static_cast<int>(out.size()) > count) {
    std::mt19937_64 rng(seed);
    std::shuffle(out.begin() + 1, out.end(), rng);
    out.erase(out.begin() + count, out.end());
  }
  return out;
}

GeneratingReport is_generating(const Functional& psi, const std::vector<AlgElt>& battery) {
  GeneratingReport rep;
  if (battery.empty()) return rep;
  const AlgebraCtx& ctx = battery.front().ctx();
  rep.psi_one = psi(AlgElt::unit(ctx));

  const int n = static_cast<int>(battery.size());
  Eigen::MatrixXcd gram(n, n);
  for (int i = 0; i < n; ++i) {
    AlgElt ai_star = adjoint(battery[i]);
    rep.hermitian_defect = std::max(
        rep.hermitian_defect, std::abs(psi(ai_star) - std::conj(psi(battery[i]))));
    for (int j = 0; j < n; ++j) gram(i, j) = psi(ai_star * battery[j]);
  }
  rep.gram_asymmetry = (gram - gram.adjoint()).norm();
  Eigen::MatrixXcd herm = 0.5 * (gram + gram.adjoint());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(herm, Eigen::EigenvaluesOnly);
  rep.gram_min_eig = es.eigenvalues().minCoeff();
  return rep;
}

// ---------------------------------------------------------------------------
// Morphisms

Morphism::Morphism(std::string name, AlgebraCtx source, AlgebraCtx target,
                   std::map<GenSym, AlgElt> gen_images)
    : name_(std::move(name)),
      source_(std::move(source)),
      target_(std::move(target)),
      images_(std::move(gen_images)) {}

AlgElt Morphism::apply(const AlgElt& a) const {
  if (!(a.ctx() == source_)) throw AlgebraError("morphism_apply: context mismatch");
  AlgElt out(target_);
  for (const auto& [w, c] : a.terms()) {
    AlgElt acc(target_, c);
    for (const GenSym& g : w) {
      GenSym base = g.starred() ? g.adjoint() : g;
      auto it = images_.find(base);
      if (it == images_.end()) throw AlgebraError("morphism_apply: no image for " + base.str());
      acc = acc * (g.starred() ? adjoint(it->second) : it->second);
      if (acc.is_zero()) break;
    }
    out = out + acc;
  }
  return out;
}

Morphism Morphism::s_N(int N, std::optional<Rat> q0) {
  if (N < 2) throw AlgebraError("s_N needs N >= 2");
  AlgebraCtx src = suq_ctx(N, q0), dst = suq_ctx(N - 1, q0);
  std::map<GenSym, AlgElt> img;
  for (int j = 1; j <= N; ++j)
    for (int k = 1; k <= N; ++k) {
      if (j < N && k < N)
        img.insert_or_assign(GenSym::u(j, k), AlgElt::gen(dst, GenSym::u(j, k)));
      else if (j == N && k == N)
        img.insert_or_assign(GenSym::u(j, k), AlgElt::unit(dst));
      else
        img.insert_or_assign(GenSym::u(j, k), AlgElt::zero(dst));
    }
  return Morphism("s_" + std::to_string(N), src, dst, std::move(img));
}

Morphism Morphism::t_N(int N, std::optional<Rat> q0) {
  AlgebraCtx src = suq_ctx(N + 1, q0), dst = uq_ctx(N, q0);
  std::map<GenSym, AlgElt> img;
  for (int j = 1; j <= N + 1; ++j)
    for (int k = 1; k <= N + 1; ++k) {
      if (j <= N && k <= N)
        img.insert_or_assign(GenSym::u(j, k), AlgElt::gen(dst, GenSym::u(j, k)));
      else if (j == N + 1 && k == N + 1)
        img.insert_or_assign(GenSym::u(j, k), AlgElt::gen(dst, GenSym::dinv()));
      else
        img.insert_or_assign(GenSym::u(j, k), AlgElt::zero(dst));
    }
  return Morphism("t_" + std::to_string(N), src, dst, std::move(img));
}

Morphism Morphism::t_breve_N(int N, std::optional<Rat> q0) {
  AlgebraCtx src = uq_ctx(N, q0), dst = suq_ctx(N, q0);
  std::map<GenSym, AlgElt> img;
  for (int j = 1; j <= N; ++j)
    for (int k = 1; k <= N; ++k) img.insert_or_assign(GenSym::u(j, k), AlgElt::gen(dst, GenSym::u(j, k)));
  img.insert_or_assign(GenSym::dinv(), AlgElt::unit(dst));
  return Morphism("t~_" + std::to_string(N), src, dst, std::move(img));
}

Morphism Morphism::s_breve_N(int N, std::optional<Rat> q0) {
  if (N < 2) throw AlgebraError("s~_N needs N >= 2");
  AlgebraCtx src = uq_ctx(N, q0), dst = uq_ctx(N - 1, q0);
  std::map<GenSym, AlgElt> img;
  for (int j = 1; j <= N; ++j)
    for (int k = 1; k <= N; ++k) {
      if (j < N && k < N)
        img.insert_or_assign(GenSym::u(j, k), AlgElt::gen(dst, GenSym::u(j, k)));
      else if (j == N && k == N)
        img.insert_or_assign(GenSym::u(j, k), AlgElt::gen(dst, GenSym::dinv()));
      else
        img.insert_or_assign(GenSym::u(j, k), AlgElt::zero(dst));
    }
  img.insert_or_assign(GenSym::dinv(), AlgElt::unit(dst));
  return Morphism("s~_" + std::to_string(N), src, dst, std::move(img));
}

Morphism Morphism::compose(const Morphism& f, const Morphism& g) {
  if (!(f.source_ == g.target_)) throw AlgebraError("morphism compose: context mismatch");
  std::map<GenSym, AlgElt> img;
  for (const auto& [gen, mid] : g.images_) img.insert_or_assign(gen, f.apply(mid));
  return Morphism(f.name_ + "." + g.name_, g.source_, f.target_, std::move(img));
}

Morphism Morphism::s_nN(int n, int N, std::optional<Rat> q0) {
  if (!(1 <= n && n < N)) throw AlgebraError("s_nN needs 1 <= n < N");
  Morphism m = s_N(N, q0);
  for (int k = N - 1; k > n; --k) m = compose(s_N(k, q0), m);
  return m;
}

Morphism Morphism::s_breve_nN(int n, int N, std::optional<Rat> q0) {
  if (!(1 <= n && n < N)) throw AlgebraError("s~_nN needs 1 <= n < N");
  Morphism m = s_breve_N(N, q0);
  for (int k = N - 1; k > n; --k) m = compose(s_breve_N(k, q0), m);
  return m;
}

MorphismCheck verify_morphism(const Morphism& m) {
  MorphismCheck chk;
  // counits first
  std::vector<GenSym> gens;
  for (int j = 1; j <= m.source().N; ++j)
    for (int k = 1; k <= m.source().N; ++k) gens.push_back(GenSym::u(j, k));
  if (m.source().variant == Variant::Uq) gens.push_back(GenSym::dinv());
  for (const GenSym& g : gens) {
    AlgElt e = AlgElt::gen(m.source(), g);
    if (!(counit_exact(m.apply(e)) == counit_exact(e))) chk.counit_preserved = false;
  }
  for (const RelationEntry& r : relation_catalog(m.source())) {
    ++chk.relations_checked;
    Equality eq = equals_exact(m.apply(r.element), AlgElt::zero(m.target()));
    if (eq == Equality::ProvedEqual) continue;
    if (eq == Equality::Undecided)
      ++chk.undecided;
    else
      ++chk.relations_failed;
  }
  return chk;
}

std::vector<AlgElt> subgroup_kernel_generators(const Morphism& m) {
  std::vector<AlgElt> out;
  std::vector<GenSym> gens;
  for (int j = 1; j <= m.source().N; ++j)
    for (int k = 1; k <= m.source().N; ++k) gens.push_back(GenSym::u(j, k));
  if (m.source().variant == Variant::Uq) gens.push_back(GenSym::dinv());
  for (const GenSym& g : gens) {
    AlgElt centered = center_elt(AlgElt::gen(m.source(), g));
    if (m.apply(centered).is_zero() && !centered.is_zero()) out.push_back(std::move(centered));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Torus

TorusElt torus_apply(const AlgElt& a) {
  const AlgebraCtx& ctx = a.ctx();
  if (ctx.variant == Variant::Mq) throw AlgebraError("torus_apply: SUq/Uq contexts only");
  TorusElt out;
  out.N = ctx.N;
  for (const auto& [w, c] : a.terms()) {
    std::vector<long> n(ctx.N, 0);
    bool alive = true;
    for (const GenSym& g : w) {
      switch (g.kind) {
        case GenSym::Kind::U:
          if (g.row != g.col) alive = false;
          else n[g.row - 1] += 1;
          break;
        case GenSym::Kind::Ustar:
          if (g.row != g.col) alive = false;
          else n[g.row - 1] -= 1;
          break;
        case GenSym::Kind::Dinv:
          for (auto& v : n) v -= 1;
          break;
        case GenSym::Kind::DinvStar:
          for (auto& v : n) v += 1;
          break;
      }
      if (!alive) break;
    }
    if (!alive) continue;
    if (ctx.variant == Variant::SUq) {
      long base = n[0];
      for (auto& v : n) v -= base;  // u_1 ... u_N = 1
    }
    auto it = out.terms.find(n);
    if (it == out.terms.end())
      out.terms[n] = c;
    else {
      it->second += c;
      if (it->second.is_zero()) out.terms.erase(it);
    }
  }
  return out;
}

}  // namespace qglevy
