#include "qglevy/levy.hpp"

#include <algorithm>
#include <cmath>

namespace qglevy {

std::vector<double> PSchedule::values() const {
  std::vector<double> out;
  for (int m = m_min; m <= m_max; ++m) out.push_back(p_of(m));
  return out;
}

namespace {

int letter_counit(const GenSym& g) {
  if (g.kind == GenSym::Kind::Dinv || g.kind == GenSym::Kind::DinvStar) return 1;
  return g.row == g.col ? 1 : 0;
}

std::vector<GenSym> unstarred_letters(const AlgebraCtx& ctx) {
  std::vector<GenSym> out;
  for (int j = 1; j <= ctx.N; ++j)
    for (int k = 1; k <= ctx.N; ++k) out.push_back(GenSym::u(j, k));
  if (ctx.variant == Variant::Uq) out.push_back(GenSym::dinv());
  return out;
}

double sigma_min(const MatrixXcd& m) {
  Eigen::JacobiSVD<MatrixXcd> svd(m);
  const auto& sv = svd.singularValues();
  return sv.size() ? sv(sv.size() - 1) : 0.0;
}

}  // namespace

// ---------------------------------------------------------------------------
// Cocycle

Cocycle Cocycle::coboundary(std::shared_ptr<const MatRep> rep, VectorXcd f) {
  if (f.size() != rep->dim) throw PreconditionError("coboundary: vector size mismatch");
  Cocycle c(std::move(rep), Method::Coboundary);
  c.cob_vector_ = std::move(f);
  const MatRep& r = c.rep();
  for (const GenSym& g : unstarred_letters(r.ctx)) {
    VectorXcd v = r.op(g).apply(*c.cob_vector_);
    if (letter_counit(g)) v -= *c.cob_vector_;
    c.values_.emplace(g, std::move(v));
  }
  c.fill_starred_values();
  return c;
}

Cocycle Cocycle::from_corner_value(std::shared_ptr<const MatRep> rep, const VectorXcd& eta_nn,
                                   Method method, double tol, const PSchedule& sched) {
  const MatRep& r = *rep;
  if (r.ctx.variant != Variant::SUq)
    throw PreconditionError("from_corner_value: SUq representations only");
  if (eta_nn.size() != r.dim) throw PreconditionError("from_corner_value: vector size mismatch");
  const int N = r.ctx.N;
  const Eigen::Index d = r.dim;
  MatrixXcd A = r.op(GenSym::u(N, N)).to_dense();

  Cocycle c(rep, method);
  if (method == Method::Coboundary)
    throw PreconditionError("from_corner_value: use Cocycle::coboundary");

  if (method == Method::ClosedForm) {
    if (sigma_min(MatrixXcd::Identity(d, d) - A) < tol)
      throw PreconditionError("from_corner_value: I - pi(u_NN) not injective at tolerance");
    const double q = r.q();
    Eigen::PartialPivLU<MatrixXcd> res_q(MatrixXcd::Identity(d, d) - q * A);
    Eigen::PartialPivLU<MatrixXcd> res_q2(MatrixXcd::Identity(d, d) - q * q * A);
    c.values_.emplace(GenSym::u(N, N), eta_nn);
    for (int j = 1; j < N; ++j) {
      c.values_.emplace(GenSym::u(j, N),
                        -res_q.solve(r.op(GenSym::u(j, N)).to_dense() * eta_nn));
      c.values_.emplace(GenSym::u(N, j),
                        -res_q.solve(r.op(GenSym::u(N, j)).to_dense() * eta_nn));
    }
    if (N >= 2) {
      MatrixXcd AmI = A - MatrixXcd::Identity(d, d);
      Eigen::CompleteOrthogonalDecomposition<MatrixXcd> cod(AmI);
      const double qc = 1.0 / q - q;
      for (int j = 1; j < N; ++j)
        for (int k = 1; k < N; ++k) {
          VectorXcd rhs = r.op(GenSym::u(j, k)).to_dense() * eta_nn;
          if (j == k) rhs -= eta_nn;
          rhs -= qc * res_q2.solve(r.op(GenSym::u(j, N)).to_dense() *
                                   (r.op(GenSym::u(N, k)).to_dense() * eta_nn));
          VectorXcd x = cod.solve(rhs);
          if ((AmI * x - rhs).norm() > std::max(tol, 1e-9) * (1.0 + rhs.norm()))
            throw PreconditionError("from_corner_value: ill-conditioned inner-block solve");
          c.values_.emplace(GenSym::u(j, k), std::move(x));
        }
    }
    c.fill_starred_values();
    return c;
  }

  // PLimit: eta = lim_p pi((id - 1 eps) .) f_p with f_p = -(I - p A)^{-1} eta_nn
  std::vector<double> ps = sched.values();
  if (ps.size() < 3) throw PreconditionError("from_corner_value: schedule too short");
  std::vector<std::map<GenSym, VectorXcd>> vals(ps.size());
  for (size_t m = 0; m < ps.size(); ++m) {
    Eigen::PartialPivLU<MatrixXcd> lu(MatrixXcd::Identity(d, d) - ps[m] * A);
    VectorXcd fp = -lu.solve(eta_nn);
    for (const GenSym& g : unstarred_letters(r.ctx)) {
      VectorXcd v = r.op(g).apply(fp);
      if (letter_counit(g)) v -= fp;
      vals[m].emplace(g, std::move(v));
    }
  }
  for (const GenSym& g : unstarred_letters(r.ctx)) {
    // one-step Richardson in 1-p on the halving schedule
    std::vector<VectorXcd> extr;
    for (size_t m = 0; m + 1 < ps.size(); ++m)
      extr.push_back(2.0 * vals[m + 1].at(g) - vals[m].at(g));
    const VectorXcd& last = extr.back();
    const VectorXcd& prev = extr[extr.size() - 2];
    if ((last - prev).norm() > tol * (1.0 + last.norm()))
      throw ConvergenceError("from_corner_value: p-limit diverges at " + g.str());
    c.values_.emplace(g, last);
  }
  c.fill_starred_values();
  return c;
}

void Cocycle::fill_starred_values() {
  const AlgebraCtx& ctx = rep_->ctx;
  std::vector<GenSym> starred;
  for (int j = 1; j <= ctx.N; ++j)
    for (int k = 1; k <= ctx.N; ++k) starred.push_back(GenSym::ustar(j, k));
  if (ctx.variant == Variant::Uq) starred.push_back(GenSym::dinv_star());
  for (const GenSym& g : starred) {
    if (values_.count(g)) continue;
    values_.emplace(g, (*this)(adjoint_expand(AlgElt::gen(ctx, g))));
  }
}

const VectorXcd& Cocycle::gen_value(const GenSym& g) const {
  auto it = values_.find(g);
  if (it == values_.end()) throw PreconditionError("Cocycle: no value for " + g.str());
  return it->second;
}

VectorXcd Cocycle::operator()(const AlgElt& a) const {
  const MatRep& r = *rep_;
  if (!(a.ctx() == r.ctx)) throw PreconditionError("Cocycle: context mismatch");
  if (method_ == Method::Coboundary)
    return r.eval(center_elt(a)).apply(*cob_vector_);
  VectorXcd acc = VectorXcd::Zero(r.dim);
  for (const auto& [w, c] : a.terms()) {
    if (w.empty()) continue;  // eta(1) = 0
    // cocycle identity right-to-left: eta(g w') = pi(g) eta(w') + eta(g) eps(w')
    VectorXcd v = VectorXcd::Zero(r.dim);
    double eps_tail = 1.0;
    for (size_t i = w.size(); i-- > 0;) {
      const GenSym& g = w[i];
      VectorXcd nv = r.op(g).apply(v);
      if (eps_tail != 0.0) nv += eps_tail * gen_value(g);
      v = std::move(nv);
      eps_tail *= letter_counit(g);
    }
    acc += c.eval_d(r.q_exact()) * v;
  }
  return acc;
}

double cocycle_identity_defect(const Cocycle& eta,
                               const std::vector<std::pair<AlgElt, AlgElt>>& pairs) {
  double worst = 0;
  for (const auto& [a, b] : pairs) {
    VectorXcd lhs = eta(a * b);
    VectorXcd rhs = eta.rep().eval(a).apply(eta(b)) + counit(b) * eta(a);
    worst = std::max(worst, (lhs - rhs).norm());
  }
  return worst;
}

double cocycle_lives_on_residual(const Cocycle& eta, int n) {
  const AlgebraCtx& ctx = eta.rep().ctx;
  double worst = 0;
  for (int j = 1; j <= ctx.N; ++j)
    for (int k = 1; k <= ctx.N; ++k) {
      if (j <= n && k <= n) continue;
      worst = std::max(worst, eta.gen_value(GenSym::u(j, k)).norm());
    }
  return worst;
}

double cocycle_route_disagreement(const std::shared_ptr<const MatRep>& rep,
                                  const VectorXcd& eta_nn, double tol, const PSchedule& sched) {
  Cocycle closed = Cocycle::from_corner_value(rep, eta_nn, Cocycle::Method::ClosedForm, tol);
  Cocycle plim = Cocycle::from_corner_value(rep, eta_nn, Cocycle::Method::PLimit, tol, sched);
  double worst = 0;
  for (const auto& g : unstarred_letters(rep->ctx))
    worst = std::max(worst, (closed.gen_value(g) - plim.gen_value(g)).norm());
  return worst;
}

// ---------------------------------------------------------------------------
// psi by the p-limit route

PLimitValue psi_plimit(const MatRep& rep, const VectorXcd& eta_nn, const AlgElt& a,
                       const PSchedule& sched, double tol) {
  const int N = rep.ctx.N;
  const Eigen::Index d = rep.dim;
  MatrixXcd A = rep.op(GenSym::u(N, N)).to_dense();
  Kop pa = rep.eval(projP(a));

  auto quad_form = [](const VectorXcd& f, const VectorXcd& w) {
    // accumulate in extended precision; ||f_p|| may be large while the
    // combination stays small
    std::complex<long double> acc(0, 0);
    for (Eigen::Index i = 0; i < f.size(); ++i) {
      std::complex<long double> fi(f[i].real(), f[i].imag());
      std::complex<long double> wi(w[i].real(), w[i].imag());
      acc += std::conj(fi) * wi;
    }
    return Cplx(static_cast<double>(acc.real()), static_cast<double>(acc.imag()));
  };

  PLimitValue out;
  std::vector<double> ps = sched.values();
  std::vector<Cplx> vals;
  VectorXcd last_f;
  for (double p : ps) {
    Eigen::PartialPivLU<MatrixXcd> lu(MatrixXcd::Identity(d, d) - p * A);
    VectorXcd fp = -lu.solve(eta_nn);
    Cplx v = quad_form(fp, pa.apply(fp));
    vals.push_back(v);
    out.trace.push_back({p, v});
    last_f = fp;
  }
  std::vector<Cplx> extr;
  for (size_t m = 0; m + 1 < vals.size(); ++m) extr.push_back(2.0 * vals[m + 1] - vals[m]);
  out.value = extr.back();
  out.converged =
      std::abs(extr.back() - extr[extr.size() - 2]) <= tol * (1.0 + std::abs(extr.back()));

  // conditioning: the three P-terms at the last p against the result
  Cplx t1 = quad_form(last_f, rep.eval(a).apply(last_f));
  Cplx t2 = counit(a) * Cplx(last_f.squaredNorm(), 0);
  Cplx t3 = 0;
  for (int kappa : basis_extension_indices(rep.ctx)) {
    Cplx w = eps_prime(a, kappa);
    if (w != Cplx(0, 0))
      t3 += w * quad_form(last_f, rep.eval(basis_extension_elt(rep.ctx, kappa)).apply(last_f));
  }
  double num = std::max({std::abs(t1), std::abs(t2), std::abs(t3)});
  out.conditioning = num / std::max(std::abs(out.value), 1e-300);
  return out;
}

// ---------------------------------------------------------------------------
// Exact K2 splitting

namespace {

struct CenteredCollect {
  QCoeff scalar;
  std::map<GenSym, QCoeff> singles;
  std::vector<std::pair<AlgElt, AlgElt>> pairs;
};

AlgElt centered_letter(const AlgebraCtx& ctx, const GenSym& g) {
  AlgElt e = AlgElt::gen(ctx, g);
  if (letter_counit(g)) e = e - AlgElt::unit(ctx);
  return e;
}

// expand the word over (delta(g) + eps(g)) and file terms by the number of
// centered letters; off-diagonal letters are forced centered
void centered_expand(const AlgebraCtx& ctx, const Word& w, const QCoeff& coeff,
                     CenteredCollect& out) {
  std::vector<int> diag_pos;
  for (size_t i = 0; i < w.size(); ++i)
    if (letter_counit(w[i])) diag_pos.push_back(static_cast<int>(i));
  if (diag_pos.size() > 20) throw CapExceeded("split_K2: word too long");
  const size_t subsets = size_t{1} << diag_pos.size();
  for (size_t mask = 0; mask < subsets; ++mask) {
    std::vector<GenSym> centered;
    size_t bit = 0;
    for (size_t i = 0; i < w.size(); ++i) {
      if (letter_counit(w[i])) {
        if (mask & (size_t{1} << bit)) centered.push_back(w[i]);
        ++bit;
      } else {
        centered.push_back(w[i]);
      }
    }
    if (centered.empty()) {
      out.scalar += coeff;
    } else if (centered.size() == 1) {
      auto it = out.singles.find(centered[0]);
      if (it == out.singles.end())
        out.singles.emplace(centered[0], coeff);
      else
        it->second += coeff;
    } else {
      AlgElt left = coeff * centered_letter(ctx, centered[0]);
      AlgElt right = centered_letter(ctx, centered[1]);
      for (size_t t = 2; t < centered.size(); ++t)
        right = right * centered_letter(ctx, centered[t]);
      out.pairs.push_back({std::move(left), std::move(right)});
    }
  }
}

// explicit K1*K1 witnesses for d_1 + ... + d_N via the determinant
// staircase expansion
std::vector<std::pair<AlgElt, AlgElt>> dsum_pairs(const AlgebraCtx& ctx) {
  const int N = ctx.N;
  std::vector<std::pair<AlgElt, AlgElt>> epairs;  // for E := v_1 + ... + v_N

  // 1 - u_11...u_NN = sum_{sigma != id} (-q)^{i(sigma)} w_sigma, each w_sigma
  // carrying >= 2 off-diagonal letters
  for (const auto& sigma : all_permutations(N)) {
    bool ident = true;
    for (int r = 1; r <= N; ++r)
      if (sigma[r - 1] != r) ident = false;
    if (ident) continue;
    Word w;
    for (int r = 1; r <= N; ++r) w.push_back(GenSym::u(r, sigma[r - 1]));
    QCoeff coeff = QCoeff::q_power(inversion_count(sigma));
    if (inversion_count(sigma) % 2 == 0) coeff = -coeff;  // -(-q)^i
    CenteredCollect cc;
    centered_expand(ctx, w, coeff, cc);
    if (!cc.scalar.is_zero() || !cc.singles.empty())
      throw AlgebraError("dsum_pairs: unexpected low-order term");
    for (auto& p : cc.pairs) epairs.push_back(std::move(p));
  }
  // - sum over ordered products of >= 2 centered diagonal letters
  std::vector<AlgElt> v;
  for (int j = 1; j <= N; ++j)
    v.push_back(AlgElt::gen(ctx, GenSym::u(j, j)) - AlgElt::unit(ctx));
  for (size_t mask = 1; mask < (size_t{1} << N); ++mask) {
    std::vector<int> sel;
    for (int j = 0; j < N; ++j)
      if (mask & (size_t{1} << j)) sel.push_back(j);
    if (sel.size() < 2) continue;
    AlgElt left = -v[sel[0]];
    AlgElt right = v[sel[1]];
    for (size_t t = 2; t < sel.size(); ++t) right = right * v[sel[t]];
    epairs.push_back({std::move(left), std::move(right)});
  }

  // sum d_j = (E - E*) / 2i
  const QCoeff half_over_i(CRat(Rat(0), Rat(-1, 2)));
  std::vector<std::pair<AlgElt, AlgElt>> out;
  for (const auto& [a, b] : epairs) {
    out.push_back({half_over_i * a, b});
    out.push_back({(-half_over_i) * adjoint(b), adjoint(a)});
  }
  return out;
}

}  // namespace

std::vector<std::pair<AlgElt, AlgElt>> split_K2(const AlgElt& x) {
  const AlgebraCtx& ctx = x.ctx();
  if (ctx.variant != Variant::SUq)
    throw PreconditionError("split_K2: SUq contexts only");
  if (!counit_exact(x).is_zero()) throw PreconditionError("split_K2: eps(x) != 0");
  for (int kappa : basis_extension_indices(ctx))
    if (!eps_prime_exact(x, kappa).is_zero())
      throw PreconditionError("split_K2: eps'_" + std::to_string(kappa) + "(x) != 0");

  CenteredCollect cc;
  for (const auto& [w, c] : x.terms()) centered_expand(ctx, w, c, cc);
  if (!cc.scalar.is_zero()) throw AlgebraError("split_K2: scalar part survived");
  auto pairs = std::move(cc.pairs);

  const QCoeff q = QCoeff::q_power(1);
  const QCoeff inv_1mq = QCoeff(1) / (QCoeff(1) - q);
  std::map<int, QCoeff> cdiag, cdiag_star;

  for (const auto& [g, c] : cc.singles) {
    if (g.kind == GenSym::Kind::U && g.row != g.col) {
      int l = std::max(g.row, g.col);
      AlgElt vll = AlgElt::gen(ctx, GenSym::u(l, l)) - AlgElt::unit(ctx);
      AlgElt gelt = AlgElt::gen(ctx, g);
      pairs.push_back({(c * q * inv_1mq) * vll, gelt});
      pairs.push_back({(-(c * inv_1mq)) * gelt, vll});
    } else if (g.kind == GenSym::Kind::Ustar && g.row != g.col) {
      int l = std::max(g.row, g.col);
      AlgElt vll = AlgElt::gen(ctx, GenSym::ustar(l, l)) - AlgElt::unit(ctx);
      AlgElt gelt = AlgElt::gen(ctx, g);
      pairs.push_back({(c * q * inv_1mq) * gelt, vll});
      pairs.push_back({(-(c * inv_1mq)) * vll, gelt});
    } else if (g.kind == GenSym::Kind::U) {
      cdiag[g.row] += c;
    } else if (g.kind == GenSym::Kind::Ustar) {
      cdiag_star[g.row] += c;
    } else {
      throw AlgebraError("split_K2: unexpected letter " + g.str());
    }
  }

  // c_j delta(u_jj) + c'_j delta(u*_jj) = mu_j (v_j + v_j*) + lambda_j d_j
  const QCoeff half(Rat(1, 2));
  const QCoeff iu = QCoeff::i_unit();
  std::optional<QCoeff> lambda;
  for (int j = 1; j <= ctx.N; ++j) {
    QCoeff cj = cdiag.count(j) ? cdiag[j] : QCoeff();
    QCoeff cjs = cdiag_star.count(j) ? cdiag_star[j] : QCoeff();
    QCoeff mu = (cj + cjs) * half;
    QCoeff lam = iu * (cj - cjs);
    if (!lambda)
      lambda = lam;
    else if (!(*lambda == lam))
      throw PreconditionError("split_K2: residual d_k term contradicts the preconditions");
    if (!mu.is_zero()) {
      // v_j + v_j* = -sum_{p != j} u_jp u_jp* - v_j v_j*
      for (int p = 1; p <= ctx.N; ++p) {
        if (p == j) continue;
        pairs.push_back({(-mu) * AlgElt::gen(ctx, GenSym::u(j, p)),
                         AlgElt::gen(ctx, GenSym::ustar(j, p))});
      }
      AlgElt vj = AlgElt::gen(ctx, GenSym::u(j, j)) - AlgElt::unit(ctx);
      AlgElt vjs = AlgElt::gen(ctx, GenSym::ustar(j, j)) - AlgElt::unit(ctx);
      pairs.push_back({(-mu) * vj, vjs});
    }
  }
  if (lambda && !lambda->is_zero()) {
    for (auto& [a, b] : dsum_pairs(ctx)) pairs.push_back({*lambda * a, b});
  }
  return pairs;
}

Cplx psi_exact(const Cocycle& eta, const AlgElt& a) {
  auto pairs = split_K2(projP(a));
  Cplx acc = 0;
  for (const auto& [ai, bi] : pairs) {
    VectorXcd left = eta(adjoint(ai));
    VectorXcd right = eta(bi);
    acc += left.dot(right);
  }
  return acc;
}

TripleReport triple_check(const Cocycle& eta, const std::function<Cplx(const AlgElt&)>& psi,
                          const std::vector<AlgElt>& battery) {
  TripleReport rep;
  for (const AlgElt& a : battery)
    for (const AlgElt& b : battery) {
      AlgElt astar = adjoint(a);
      Cplx lhs = psi(astar * b) - psi(astar) * counit(b) - counit(astar) * psi(b);
      Cplx rhs = eta(a).dot(eta(b));
      rep.max_defect = std::max(rep.max_defect, std::abs(lhs - rhs));
      ++rep.pairs;
    }
  return rep;
}

double h_pi_norm(const MatRep& rep, const VectorXcd& f) {
  double acc = 0;
  for (int j = 1; j <= rep.ctx.N; ++j) {
    VectorXcd w = f - rep.op(GenSym::u(j, j)).apply(f);
    acc += w.squaredNorm();
  }
  return std::sqrt(acc);
}

// ---------------------------------------------------------------------------
// Hunt decomposition

Cplx HuntLevel::psi(const AlgElt& a) const {
  return psi_exact(eta_n, chain ? chain->apply(a) : a);
}

Cplx HuntDecomposition::psi_L(const AlgElt& a) const {
  Cplx acc = 0;
  for (const auto& l : levels) acc += l.psi(a);
  return acc;
}

Cplx HuntDecomposition::psi_total(const AlgElt& a) const { return psi_G(a) + psi_L(a); }

Functional HuntDecomposition::total_functional() const {
  Functional f;
  auto levels_copy = levels;
  auto gauss_f = psi_G;
  f.eval = [levels_copy, gauss_f](const AlgElt& a) {
    Cplx acc = gauss_f(a);
    for (const auto& l : levels_copy) acc += l.psi(a);
    return acc;
  };
  f.hermitian = f.zero_normalized = f.generating_candidate = true;
  f.description = "hunt-assembled";
  return f;
}

HuntDecomposition hunt_decompose(const MatRep& pi, const std::vector<LevelSpec>& level_specs,
                                 const GaussParams& gauss, double tol, const PSchedule& sched) {
  if (pi.ctx.variant != Variant::SUq)
    throw PreconditionError("hunt_decompose: SUq representations only");
  const int N = pi.ctx.N;
  DecompositionResult dec = decompose(pi, tol);

  HuntDecomposition out;
  out.ctx = pi.ctx;
  out.gauss = gauss;
  out.psi_G = gaussian_functional(pi.ctx, gauss);
  out.max_invariance_residual = dec.max_invariance_residual;
  out.max_livingon_residual = dec.max_livingon_residual;

  for (const LevelSpec& spec : level_specs) {
    const RepLevel& level = dec.level(spec.n);
    if (!level.compressed)
      throw PreconditionError("hunt_decompose: empty level " + std::to_string(spec.n));
    auto rep_n = std::make_shared<MatRep>(*level.compressed);
    if (spec.eta_nn.size() != rep_n->dim)
      throw PreconditionError("hunt_decompose: eta_nn dimension mismatch at level " +
                              std::to_string(spec.n));
    Cocycle eta = Cocycle::from_corner_value(rep_n, spec.eta_nn, spec.method, tol, sched);

    // big-space living-on residual of the level cocycle at the latest p
    double living = 0;
    {
      MatrixXcd Ann = rep_n->op(GenSym::u(spec.n, spec.n)).to_dense();
      double p = PSchedule::p_of(sched.m_max);
      Eigen::PartialPivLU<MatrixXcd> lu(
          MatrixXcd::Identity(rep_n->dim, rep_n->dim) - p * Ann);
      VectorXcd f_lvl = -lu.solve(spec.eta_nn);
      VectorXcd big = level.basis * f_lvl;
      double scale = std::max(1.0, big.norm());
      for (int m = spec.n + 1; m <= N; ++m) {
        VectorXcd r = pi.op(GenSym::u(m, m)).apply(big) - big;
        living = std::max(living, r.norm() / scale);
      }
    }

    HuntLevel hl{spec.n,
                 level.basis,
                 rep_n,
                 std::move(eta),
                 spec.n < N ? std::optional<Morphism>(Morphism::s_nN(spec.n, N, pi.ctx.q0))
                            : std::nullopt,
                 level.inj_sigma_min,
                 living};
    out.levels.push_back(std::move(hl));
  }
  return out;
}

// ---------------------------------------------------------------------------
// GNS reconstruction at finite degree

GnsData gns_build(const AlgebraCtx& ctx, const std::function<Cplx(const AlgElt&)>& psi,
                  int degree, double tol, std::vector<GenSym> generators) {
  GnsData out;
  BatterySpec spec;
  spec.max_degree = degree;
  spec.generators = generators;
  spec.count = 0;
  out.battery = k1_battery(ctx, spec);
  if (generators.empty())
    for (int j = 1; j <= ctx.N; ++j)
      for (int k = 1; k <= ctx.N; ++k) {
        generators.push_back(GenSym::u(j, k));
        generators.push_back(GenSym::ustar(j, k));
      }
  out.generators = generators;
  const auto n = static_cast<Eigen::Index>(out.battery.size());
  out.gram.resize(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    AlgElt ai_star = adjoint(out.battery[i]);
    for (Eigen::Index j = i; j < n; ++j) {
      out.gram(i, j) = psi(ai_star * out.battery[j]);
      if (j != i) out.gram(j, i) = std::conj(out.gram(i, j));
    }
  }
  MatrixXcd gh = 0.5 * (out.gram + out.gram.adjoint());
  double neg = Eigen::SelfAdjointEigenSolver<MatrixXcd>(gh, Eigen::EigenvaluesOnly)
                   .eigenvalues()
                   .minCoeff();
  if (neg < -1e-7 * std::max(1.0, gh.norm()))
    throw PreconditionError("gns_build: Gram matrix significantly non-PSD");

  // pivoted Cholesky on gh
  VectorXd resid = gh.diagonal().real();
  double scale = std::max(1.0, resid.maxCoeff());
  MatrixXcd L(n, 0);
  while (true) {
    Eigen::Index p;
    double best = resid.maxCoeff(&p);
    if (best <= tol * scale) break;
    VectorXcd col = gh.col(p);
    for (Eigen::Index t = 0; t < L.cols(); ++t) col -= L.col(t) * std::conj(L(p, t));
    col /= std::sqrt(best);
    L.conservativeResize(n, L.cols() + 1);
    L.col(L.cols() - 1) = col;
    out.pivots.push_back(p);
    resid -= col.cwiseAbs2();
    resid = resid.cwiseMax(0.0);
  }
  const auto r = static_cast<Eigen::Index>(out.pivots.size());
  out.chol.resize(r, r);
  for (Eigen::Index i = 0; i < r; ++i)
    for (Eigen::Index t = 0; t < r; ++t) out.chol(i, t) = L(out.pivots[i], t);

  if (r == 0) return out;

  // compressed generator action on the quotient basis classes
  MatrixXcd gpp(r, r);
  for (Eigen::Index i = 0; i < r; ++i)
    for (Eigen::Index j = 0; j < r; ++j) gpp(i, j) = gh(out.pivots[i], out.pivots[j]);
  Eigen::LDLT<MatrixXcd> ldlt(gpp);

  for (const GenSym& g : generators) {
    MatrixXcd act(r, r);
    for (Eigen::Index col = 0; col < r; ++col) {
      AlgElt ga = AlgElt::gen(ctx, g) * out.battery[out.pivots[col]];
      VectorXcd rhs(r);
      for (Eigen::Index i = 0; i < r; ++i) rhs(i) = psi(adjoint(out.battery[out.pivots[i]]) * ga);
      act.col(col) = ldlt.solve(rhs);
    }
    out.action.emplace(g, std::move(act));
  }
  return out;
}

// ---------------------------------------------------------------------------
// The N = 3 divergence witness

CounterexampleReport counterexample_n3(Eigen::Index M, const Rat& q0, const PSchedule& sched) {
  if (M < 16) throw PreconditionError("counterexample_n3: M >= 16 required");
  MatRep rho = suq2_irrep(M, q0);
  MatRep pi = conv_product(block_embed(rho, 3, 0), block_embed(rho, 3, 1), M * M);
  const double q = q0.get_d();

  // pi(u_33) = id (x) rho(alpha)*; the resolvent acts on the second factor
  MatrixXcd B = rho.op(GenSym::u(2, 2)).to_dense();
  auto eta_u11_norm_at = [&](double p, const VectorXcd& corner_block) {
    Eigen::PartialPivLU<MatrixXcd> lu(MatrixXcd::Identity(M, M) - p * B);
    VectorXcd block = -lu.solve(corner_block);
    VectorXcd f = VectorXcd::Zero(M * M);
    f.segment(0, M) = block;  // e_0 (x) block
    VectorXcd eta11 = pi.op(GenSym::u(1, 1)).apply(f) - f;
    return eta11.norm();
  };

  CounterexampleReport rep;
  VectorXcd e0 = VectorXcd::Zero(M);
  e0(0) = 1;

  for (double p : sched.values()) {
    rep.p_values.push_back(p);
    rep.eta_u11_norms.push_back(eta_u11_norm_at(p, e0));
  }

  // hand recursion x_0 = 1, x_k = sqrt(1 - q^{2k}) x_{k-1}
  std::vector<double> xsq(M);
  xsq[0] = 1.0;
  for (Eigen::Index k = 1; k < M; ++k)
    xsq[k] = xsq[k - 1] * (1.0 - std::pow(q, 2.0 * static_cast<double>(k)));
  rep.oracle_term_limit = xsq[M - 1];
  double acc = 0;
  for (Eigen::Index k = 0; k < M; ++k) {
    acc += xsq[k];
    rep.oracle_partial_sums.push_back(acc);
  }
  auto oracle_norm = [&](double p, Eigen::Index terms) {
    double s = 0, pw = 1.0;
    std::vector<double> xs_ext;
    double x = 1.0;
    for (Eigen::Index k = 0; k < terms; ++k) {
      double xk = (k < M) ? xsq[k] : x;
      if (k >= M) {
        // continue the recursion past the stored block
        x *= (1.0 - std::pow(q, 2.0 * static_cast<double>(k)));
        xk = x;
      }
      s += pw * xk;
      pw *= p * p;
    }
    return std::sqrt(s);
  };
  for (double p : sched.values()) rep.oracle_norms.push_back(oracle_norm(p, M));

  const double p6 = PSchedule::p_of(6), p12 = PSchedule::p_of(12);
  rep.growth_ratio = eta_u11_norm_at(p12, e0) / eta_u11_norm_at(p6, e0);
  rep.oracle_ratio = oracle_norm(p12, M) / oracle_norm(p6, M);
  {
    auto terms = static_cast<Eigen::Index>(40.0 / (1.0 - p12 * p12));
    rep.untruncated_oracle_ratio = oracle_norm(p12, terms) / oracle_norm(p6, terms);
  }

  rep.monotone = true;
  for (size_t t = 1; t < rep.eta_u11_norms.size(); ++t)
    if (rep.eta_u11_norms[t] <= rep.eta_u11_norms[t - 1]) rep.monotone = false;
  rep.divergent = rep.monotone && rep.growth_ratio >= rep.oracle_ratio * (1.0 - 1e-9);

  // control case: the corner value lies in the range of pi(u_33) - 1, so the
  // coboundary limit exists
  VectorXcd ctl = B * e0 - e0;  // block-0 part of (pi(u_33) - I)(e0 (x) e0)
  for (double p : sched.values()) rep.control_norms.push_back(eta_u11_norm_at(p, ctl));
  if (rep.control_norms.size() >= 2)
    rep.control_cauchy_defect = std::abs(rep.control_norms.back() -
                                         rep.control_norms[rep.control_norms.size() - 2]);
  return rep;
}

}  // namespace qglevy
