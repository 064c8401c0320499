#include "qglevy/repkit.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>

namespace qglevy {

Kop Kop::dense(MatrixXcd a) {
  Kop k;
  k.r1_ = a.rows();
  k.c1_ = a.cols();
  k.r2_ = k.c2_ = 1;
  if (a.norm() != 0) {
    MatrixXcd one = MatrixXcd::Identity(1, 1);
    k.terms_.push_back({std::move(a), std::move(one)});
  }
  return k;
}

Kop Kop::kron(MatrixXcd a, MatrixXcd b) {
  Kop k;
  k.r1_ = a.rows();
  k.c1_ = a.cols();
  k.r2_ = b.rows();
  k.c2_ = b.cols();
  if (a.norm() != 0 && b.norm() != 0) k.terms_.push_back({std::move(a), std::move(b)});
  return k;
}

Kop Kop::zero(Eigen::Index r1, Eigen::Index c1, Eigen::Index r2, Eigen::Index c2) {
  Kop k;
  k.r1_ = r1;
  k.c1_ = c1;
  k.r2_ = r2;
  k.c2_ = c2;
  return k;
}

Kop Kop::identity(Eigen::Index d1, Eigen::Index d2) {
  return Kop::kron(MatrixXcd::Identity(d1, d1), MatrixXcd::Identity(d2, d2));
}

void Kop::consolidate() {
  if (terms_.size() <= 48) return;
  if (r2_ == 1 && c2_ == 1) {
    MatrixXcd acc = MatrixXcd::Zero(r1_, c1_);
    for (auto& [a, b] : terms_) acc += b(0, 0) * a;
    terms_.clear();
    if (acc.norm() != 0) terms_.push_back({std::move(acc), MatrixXcd::Identity(1, 1)});
    return;
  }
  if (terms_.size() > 4096) throw CapExceeded("Kop: term count exceeded");
}

Kop Kop::operator*(const Kop& o) const {
  if (c1_ != o.r1_ || c2_ != o.r2_) throw PreconditionError("Kop: dimension mismatch in product");
  Kop k;
  k.r1_ = r1_;
  k.c1_ = o.c1_;
  k.r2_ = r2_;
  k.c2_ = o.c2_;
  for (const auto& [a, b] : terms_)
    for (const auto& [c, d] : o.terms_) k.terms_.push_back({a * c, b * d});
  k.consolidate();
  return k;
}

Kop Kop::operator+(const Kop& o) const {
  if (r1_ != o.r1_ || c1_ != o.c1_ || r2_ != o.r2_ || c2_ != o.c2_)
    throw PreconditionError("Kop: dimension mismatch in sum");
  Kop k = *this;
  k.terms_.insert(k.terms_.end(), o.terms_.begin(), o.terms_.end());
  k.consolidate();
  return k;
}

Kop Kop::operator-(const Kop& o) const { return *this + o.scaled(Cplx(-1, 0)); }

Kop Kop::scaled(const Cplx& s) const {
  Kop k = *this;
  if (s == Cplx(0, 0)) {
    k.terms_.clear();
    return k;
  }
  for (auto& [a, b] : k.terms_) a *= s;
  return k;
}

Kop Kop::adj() const {
  Kop k;
  k.r1_ = c1_;
  k.c1_ = r1_;
  k.r2_ = c2_;
  k.c2_ = r2_;
  for (const auto& [a, b] : terms_) k.terms_.push_back({a.adjoint(), b.adjoint()});
  return k;
}

VectorXcd Kop::apply(const VectorXcd& v) const {
  if (v.size() != cols()) throw PreconditionError("Kop: vector size mismatch");
  VectorXcd out = VectorXcd::Zero(rows());
  for (const auto& [a, b] : terms_) {
    Eigen::Map<const MatrixXcd> vm(v.data(), c2_, c1_);
    MatrixXcd rm = b * vm * a.transpose();
    out += Eigen::Map<const VectorXcd>(rm.data(), rows());
  }
  return out;
}

double Kop::norm_fro() const {
  // Blockwise accumulation: ||K||^2 = sum_{i1,j1} ||sum_t A_t(i1,j1) B_t||^2.
  // Residual scans cancel to ~1e-16 entrywise; a Gram-formula shortcut
  // would lose half the digits to cancellation between large term norms.
  if (terms_.empty()) return 0.0;
  if (terms_.size() == 1) return terms_[0].first.norm() * terms_[0].second.norm();
  double acc = 0;
  MatrixXcd block(r2_, c2_);
  for (Eigen::Index i = 0; i < r1_; ++i)
    for (Eigen::Index j = 0; j < c1_; ++j) {
      bool any = false;
      for (const auto& [a, b] : terms_)
        if (a(i, j) != Cplx(0, 0)) {
          any = true;
          break;
        }
      if (!any) continue;
      block.setZero();
      for (const auto& [a, b] : terms_)
        if (a(i, j) != Cplx(0, 0)) block += a(i, j) * b;
      acc += block.squaredNorm();
    }
  return std::sqrt(acc);
}

MatrixXcd Kop::to_dense(Eigen::Index cap) const {
  if (rows() > cap || cols() > cap) throw CapExceeded("Kop: dense conversion over cap");
  MatrixXcd out = MatrixXcd::Zero(rows(), cols());
  for (const auto& [a, b] : terms_)
    for (Eigen::Index i = 0; i < r1_; ++i)
      for (Eigen::Index j = 0; j < c1_; ++j) {
        if (a(i, j) == Cplx(0, 0)) continue;
        out.block(i * r2_, j * c2_, r2_, c2_) += a(i, j) * b;
      }
  return out;
}

Kop Kop::masked(const VectorXd& m1, const VectorXd& m2) const {
  if (m1.size() != r1_ || r1_ != c1_ || m2.size() != r2_ || r2_ != c2_)
    throw PreconditionError("Kop: mask size mismatch");
  Kop k = *this;
  for (auto& [a, b] : k.terms_) {
    a = m1.asDiagonal() * a * m1.asDiagonal();
    b = m2.asDiagonal() * b * m2.asDiagonal();
  }
  return k;
}

// ---------------------------------------------------------------------------
// MatRep

const Kop& MatRep::image(const GenSym& unstarred) const {
  auto it = images.find(unstarred);
  if (it == images.end()) throw PreconditionError("MatRep: no image for " + unstarred.str());
  return it->second;
}

Kop MatRep::op(const GenSym& g) const {
  if (!g.starred()) return image(g);
  return image(g.adjoint()).adj();
}

Kop MatRep::eval(const AlgElt& a) const {
  if (!(a.ctx() == ctx))
    throw PreconditionError("MatRep::eval: context mismatch");
  const Eigen::Index d1 = depth1.size(), d2 = std::max<Eigen::Index>(1, depth2.size());
  Kop acc = Kop::zero(d1, d1, d2, d2);
  for (const auto& [w, c] : a.terms()) {
    Kop prod = Kop::identity(d1, d2);
    for (const GenSym& g : w) prod = prod * op(g);
    acc = acc + prod.scaled(c.eval_d(q_exact()));
  }
  return acc;
}

Rat MatRep::q_exact() const {
  if (!ctx.q0) throw PreconditionError("MatRep: context carries no q0");
  return *ctx.q0;
}

double MatRep::q() const { return q_exact().get_d(); }

static VectorXd depth_mask(const VectorXi& depth, int margin) {
  VectorXd m(depth.size());
  for (Eigen::Index i = 0; i < depth.size(); ++i) m[i] = depth[i] >= margin ? 1.0 : 0.0;
  return m;
}

VectorXd MatRep::mask1(int margin) const { return depth_mask(depth1, margin); }
VectorXd MatRep::mask2(int margin) const {
  if (depth2.size() == 0) return VectorXd::Ones(1);
  return depth_mask(depth2, margin);
}

Eigen::Index MatRep::interior_dim() const {
  return static_cast<Eigen::Index>(mask1(1).sum() * mask2(1).sum());
}

// ---------------------------------------------------------------------------
// Constructors

MatRep suq2_irrep(Eigen::Index M, const Rat& q0) {
  if (M < 2) throw PreconditionError("suq2_irrep: M >= 2 required");
  MatRep rep;
  rep.ctx = suq_ctx(2, q0);
  rep.dim = M;
  rep.tag = "suq2";
  // exact powers of q0 specialize the weights; alpha is the weighted
  // down-shift, gamma = diag(q^k) (the paper's literal e_k q conflicts with
  // unitarity; see the relation tests for the verification)
  std::vector<double> qpow(2 * M + 2);
  Rat acc = 1;
  for (size_t k = 0; k < qpow.size(); ++k) {
    qpow[k] = acc.get_d();
    acc *= q0;
  }
  MatrixXcd alpha = MatrixXcd::Zero(M, M);
  for (Eigen::Index k = 1; k < M; ++k) alpha(k - 1, k) = std::sqrt(1.0 - qpow[2 * k]);
  MatrixXcd gamma = MatrixXcd::Zero(M, M);
  for (Eigen::Index k = 0; k < M; ++k) gamma(k, k) = qpow[k];
  double q = q0.get_d();
  rep.images.insert_or_assign(GenSym::u(1, 1), Kop::dense(alpha));
  rep.images.insert_or_assign(GenSym::u(1, 2), Kop::dense(-q * gamma.adjoint()));
  rep.images.insert_or_assign(GenSym::u(2, 1), Kop::dense(gamma));
  rep.images.insert_or_assign(GenSym::u(2, 2), Kop::dense(alpha.adjoint()));
  rep.depth1.resize(M);
  for (Eigen::Index i = 0; i < M; ++i) rep.depth1[i] = static_cast<int>(M - 1 - i);
  rep.depth2.resize(1);
  rep.depth2[0] = kExactDepth;
  return rep;
}

MatRep torus_char_rep(const AlgebraCtx& ctx, const std::vector<double>& theta) {
  const int N = ctx.N;
  std::vector<double> full(N, 0.0);
  if (ctx.variant == Variant::SUq) {
    if (static_cast<int>(theta.size()) != N - 1)
      throw PreconditionError("torus_char_rep: SUq needs N-1 angles");
    double sum = 0;
    for (int j = 2; j <= N; ++j) {
      full[j - 1] = theta[j - 2];
      sum += theta[j - 2];
    }
    full[0] = -sum;
  } else if (ctx.variant == Variant::Uq) {
    if (static_cast<int>(theta.size()) != N)
      throw PreconditionError("torus_char_rep: Uq needs N angles");
    full = theta;
  } else {
    throw PreconditionError("torus_char_rep: SUq/Uq contexts only");
  }
  MatRep rep;
  rep.ctx = ctx;
  rep.dim = 1;
  rep.tag = "torus";
  auto one_by_one = [](Cplx v) {
    MatrixXcd m(1, 1);
    m(0, 0) = v;
    return Kop::dense(m);
  };
  for (int j = 1; j <= N; ++j)
    for (int k = 1; k <= N; ++k)
      rep.images.insert_or_assign(
          GenSym::u(j, k),
          j == k ? one_by_one(std::exp(Cplx(0, full[j - 1]))) : one_by_one(Cplx(0, 0)));
  if (ctx.variant == Variant::Uq) {
    double s = 0;
    for (double t : full) s += t;
    rep.images.insert_or_assign(GenSym::dinv(), one_by_one(std::exp(Cplx(0, -s))));
  }
  rep.depth1 = VectorXi::Constant(1, kExactDepth);
  rep.depth2 = VectorXi::Constant(1, kExactDepth);
  return rep;
}

MatRep trivial_rep(const AlgebraCtx& ctx, Eigen::Index dim) {
  MatRep rep;
  rep.ctx = ctx;
  rep.dim = dim;
  rep.tag = "trivial";
  for (int j = 1; j <= ctx.N; ++j)
    for (int k = 1; k <= ctx.N; ++k)
      rep.images.insert_or_assign(GenSym::u(j, k), j == k
                                                       ? Kop::dense(MatrixXcd::Identity(dim, dim))
                                                       : Kop::zero(dim, dim));
  if (ctx.variant == Variant::Uq)
    rep.images.insert_or_assign(GenSym::dinv(), Kop::dense(MatrixXcd::Identity(dim, dim)));
  rep.depth1 = VectorXi::Constant(dim, kExactDepth);
  rep.depth2 = VectorXi::Constant(1, kExactDepth);
  return rep;
}

MatRep block_embed(const MatRep& inner, int N, int offset) {
  const int n = inner.ctx.N;
  if (inner.ctx.variant != Variant::SUq)
    throw PreconditionError("block_embed: inner representation must be SUq");
  if (offset < 0 || offset > N - n) throw PreconditionError("block_embed: offset out of range");
  MatRep rep;
  rep.ctx = suq_ctx(N, inner.ctx.q0);
  rep.dim = inner.dim;
  rep.tag = "block[" + std::to_string(offset + 1) + "," + std::to_string(offset + n) + "]";
  const Eigen::Index d1 = inner.depth1.size(), d2 = std::max<Eigen::Index>(1, inner.depth2.size());
  for (int j = 1; j <= N; ++j)
    for (int k = 1; k <= N; ++k) {
      bool j_in = j > offset && j <= offset + n;
      bool k_in = k > offset && k <= offset + n;
      Kop img = Kop::zero(d1, d1, d2, d2);
      if (j_in && k_in)
        img = inner.image(GenSym::u(j - offset, k - offset));
      else if (j == k)
        img = Kop::identity(d1, d2);
      rep.images.insert_or_assign(GenSym::u(j, k), std::move(img));
    }
  rep.depth1 = inner.depth1;
  rep.depth2 = inner.depth2;
  return rep;
}

MatRep conv_product(const MatRep& p1, const MatRep& p2, Eigen::Index tensor_cap) {
  if (!(p1.ctx == p2.ctx)) throw PreconditionError("conv_product: context mismatch");
  if (p1.depth2.size() > 1 || p2.depth2.size() > 1)
    throw PreconditionError("conv_product: factors must be single-layer representations");
  if (p1.dim * p2.dim > tensor_cap) throw CapExceeded("conv_product: tensor dimension cap");
  const AlgebraCtx& ctx = p1.ctx;
  MatRep rep;
  rep.ctx = ctx;
  rep.dim = p1.dim * p2.dim;
  rep.tag = "conv(" + p1.tag + "," + p2.tag + ")";
  for (int j = 1; j <= ctx.N; ++j)
    for (int k = 1; k <= ctx.N; ++k) {
      Kop acc = Kop::zero(p1.dim, p1.dim, p2.dim, p2.dim);
      for (int s = 1; s <= ctx.N; ++s) {
        MatrixXcd a = p1.image(GenSym::u(j, s)).to_dense();
        MatrixXcd b = p2.image(GenSym::u(s, k)).to_dense();
        if (a.norm() == 0 || b.norm() == 0) continue;
        acc = acc + Kop::kron(std::move(a), std::move(b));
      }
      rep.images.insert_or_assign(GenSym::u(j, k), std::move(acc));
    }
  if (ctx.variant == Variant::Uq)
    rep.images.insert_or_assign(
        GenSym::dinv(), Kop::kron(p1.image(GenSym::dinv()).to_dense(),
                                  p2.image(GenSym::dinv()).to_dense()));
  rep.depth1 = p1.depth1;
  rep.depth2 = p2.depth1;
  return rep;
}

static VectorXi flattened_depth(const MatRep& rep) {
  if (rep.depth2.size() <= 1) return rep.depth1;
  VectorXi out(rep.depth1.size() * rep.depth2.size());
  for (Eigen::Index i = 0; i < rep.depth1.size(); ++i)
    for (Eigen::Index j = 0; j < rep.depth2.size(); ++j)
      out[i * rep.depth2.size() + j] = std::min(rep.depth1[i], rep.depth2[j]);
  return out;
}

MatRep direct_sum(const std::vector<MatRep>& parts, Eigen::Index dense_cap) {
  if (parts.empty()) throw PreconditionError("direct_sum: empty list");
  const AlgebraCtx& ctx = parts.front().ctx;
  Eigen::Index total = 0;
  for (const auto& p : parts) {
    if (!(p.ctx == ctx)) throw PreconditionError("direct_sum: context mismatch");
    total += p.dim;
  }
  if (total > dense_cap) throw CapExceeded("direct_sum: dense dimension cap");
  MatRep rep;
  rep.ctx = ctx;
  rep.dim = total;
  rep.tag = "sum";
  std::vector<GenSym> gens;
  for (int j = 1; j <= ctx.N; ++j)
    for (int k = 1; k <= ctx.N; ++k) gens.push_back(GenSym::u(j, k));
  if (ctx.variant == Variant::Uq) gens.push_back(GenSym::dinv());
  for (const GenSym& g : gens) {
    MatrixXcd m = MatrixXcd::Zero(total, total);
    Eigen::Index at = 0;
    for (const auto& p : parts) {
      m.block(at, at, p.dim, p.dim) = p.image(g).to_dense();
      at += p.dim;
    }
    rep.images.insert_or_assign(g, Kop::dense(std::move(m)));
  }
  rep.depth1.resize(total);
  Eigen::Index at = 0;
  for (const auto& p : parts) {
    VectorXi d = flattened_depth(p);
    rep.depth1.segment(at, p.dim) = d;
    at += p.dim;
  }
  rep.depth2 = VectorXi::Constant(1, kExactDepth);
  return rep;
}

// ---------------------------------------------------------------------------
// Residuals

static double operator_norm_estimate(const Kop& k) {
  // power iteration on K*K with a fixed seed; enough digits for a
  // contraction check
  if (k.is_zero_structural()) return 0.0;
  Kop kk = k.adj() * k;
  VectorXcd v = VectorXcd::Ones(kk.cols());
  v.normalize();
  double lambda = 0;
  for (int it = 0; it < 80; ++it) {
    VectorXcd w = kk.apply(v);
    double n = w.norm();
    if (n == 0) return 0.0;
    lambda = n;
    v = w / n;
  }
  return std::sqrt(lambda);
}

ResidualReport relation_residuals(const MatRep& rep, bool keep_rows) {
  ResidualReport out;
  for (const RelationEntry& r : relation_catalog(rep.ctx)) {
    int deg = std::max(1, r.element.degree());
    int margin = std::max(1, deg - 1);
    Kop k = rep.eval(r.element);
    double interior = k.masked(rep.mask1(margin), rep.mask2(margin)).norm_fro();
    double full = k.norm_fro();
    out.max_interior = std::max(out.max_interior, interior);
    if (keep_rows) out.rows.push_back({r.label, deg, interior, full});
  }
  for (const auto& [g, img] : rep.images) {
    out.max_contraction_excess =
        std::max(out.max_contraction_excess, operator_norm_estimate(img) - 1.0);
  }
  out.max_contraction_excess = std::max(0.0, out.max_contraction_excess);
  out.unit_defect = (rep.eval(AlgElt::unit(rep.ctx)) -
                     Kop::identity(rep.depth1.size(), std::max<Eigen::Index>(1, rep.depth2.size())))
                        .norm_fro();
  return out;
}

MatrixXcd MatRepOracle::eval_matrix(const AlgElt& a) const {
  return rep_->eval(a).to_dense();
}

LivesOnReport rep_lives_on(const MatRep& rep, int n) {
  LivesOnReport out;
  out.n = n;
  const int N = rep.ctx.N;
  for (int j = 1; j <= N; ++j)
    for (int k = 1; k <= N; ++k) {
      if (j <= n && k <= n) continue;
      Kop img = rep.image(GenSym::u(j, k));
      double res = (j == k)
                       ? (img - Kop::identity(rep.depth1.size(),
                                              std::max<Eigen::Index>(1, rep.depth2.size())))
                             .norm_fro()
                       : img.norm_fro();
      out.max_residual = std::max(out.max_residual, res);
    }
  return out;
}

// ---------------------------------------------------------------------------
// Decomposition

// Orthonormal basis of the column space of proj_cols, aligned with the
// standard coordinates: pivoted Gram-Schmidt over the projected basis
// vectors. When the subspace is a coordinate block this returns that
// block's standard basis in order, which keeps level coordinates
// meaningful for scenario-authored vectors.
static MatrixXcd aligned_basis(const MatrixXcd& proj_cols) {
  const Eigen::Index d = proj_cols.rows();
  const Eigen::Index rank = proj_cols.cols();
  MatrixXcd residual = proj_cols * proj_cols.adjoint();  // columns P e_i
  MatrixXcd out(d, rank);
  for (Eigen::Index k = 0; k < rank; ++k) {
    Eigen::Index best = 0;
    double bn = -1;
    for (Eigen::Index i = 0; i < d; ++i) {
      double n = residual.col(i).norm();
      if (n > bn + 1e-12) {
        bn = n;
        best = i;
      }
    }
    VectorXcd v = residual.col(best) / bn;
    out.col(k) = v;
    residual -= v * (v.adjoint() * residual);
  }
  return out;
}

Eigen::Index DecompositionResult::level_dim(int n) const {
  for (const auto& l : levels)
    if (l.n == n) return l.basis.cols();
  return 0;
}

const RepLevel& DecompositionResult::level(int n) const {
  for (const auto& l : levels)
    if (l.n == n) return l;
  throw PreconditionError("no such level");
}

DecompositionResult decompose(const MatRep& rep, double tol) {
  if (rep.ctx.variant != Variant::SUq)
    throw PreconditionError("decompose: SUq representations only");
  const int N = rep.ctx.N;
  const Eigen::Index D = rep.dim;
  std::map<GenSym, MatrixXcd> dense;
  for (const auto& [g, img] : rep.images) dense.emplace(g, img.to_dense());

  DecompositionResult result;
  MatrixXcd cur = MatrixXcd::Identity(D, D);
  std::vector<RepLevel> tmp;

  for (int n = N; n >= 2; --n) {
    const Eigen::Index d = cur.cols();
    RepLevel level;
    level.n = n;
    if (d == 0) {
      level.basis = MatrixXcd::Zero(D, 0);
      tmp.push_back(std::move(level));
      continue;
    }
    MatrixXcd A = cur.adjoint() * dense.at(GenSym::u(n, n)) * cur;
    MatrixXcd B = MatrixXcd::Identity(d, d) - A;
    Eigen::JacobiSVD<MatrixXcd> svd(B, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    double scale = std::max(1.0, sv.size() ? sv(0) : 1.0);
    Eigen::Index rank = 0;
    while (rank < sv.size() && sv(rank) >= tol * scale) ++rank;
    MatrixXcd V = svd.matrixV();
    // I - pi(u_nn) injective on the level side, pi(u_nn) = id on the kernel
    MatrixXcd v_level = aligned_basis(V.leftCols(rank));
    MatrixXcd v_ker = aligned_basis(V.rightCols(sv.size() - rank));

    // invariance of the kernel (and, by star closure, of its complement)
    for (const auto& [g, m] : dense) {
      MatrixXcd mm = cur.adjoint() * m * cur;
      if (v_ker.cols() && v_level.cols()) {
        double r1 = (v_level.adjoint() * mm * v_ker).norm();
        double r2 = (v_ker.adjoint() * mm.adjoint() * v_level).norm();
        result.max_invariance_residual = std::max({result.max_invariance_residual, r1, r2});
      }
    }
    if (result.max_invariance_residual > 100 * tol * std::max(1.0, 1.0))
      throw PreconditionError("decompose: invariance residual exceeds tolerance");

    level.basis = cur * v_level;
    level.inj_sigma_min = rank > 0 ? sv(rank - 1) : 0.0;
    if (rank > 0) {
      MatRep comp;
      comp.ctx = suq_ctx(n, rep.ctx.q0);
      comp.dim = rank;
      comp.tag = "level" + std::to_string(n);
      for (int j = 1; j <= n; ++j)
        for (int k = 1; k <= n; ++k)
          comp.images.insert_or_assign(
              GenSym::u(j, k),
              Kop::dense(level.basis.adjoint() * dense.at(GenSym::u(j, k)) * level.basis));
      comp.depth1 = VectorXi::Constant(rank, kExactDepth);
      comp.depth2 = VectorXi::Constant(1, kExactDepth);
      // the level block must act as the identity on indices above n
      for (int m = n + 1; m <= N; ++m) {
        double res = (level.basis.adjoint() * dense.at(GenSym::u(m, m)) * level.basis -
                      MatrixXcd::Identity(rank, rank))
                         .norm();
        result.max_livingon_residual = std::max(result.max_livingon_residual, res);
      }
      for (int j = 1; j <= N; ++j)
        for (int k = 1; k <= N; ++k) {
          if (j == k || (j <= n && k <= n)) continue;
          double res = (level.basis.adjoint() * dense.at(GenSym::u(j, k)) * level.basis).norm();
          result.max_livingon_residual = std::max(result.max_livingon_residual, res);
        }
      level.compressed = std::move(comp);
    }
    tmp.push_back(std::move(level));
    cur = cur * v_ker;
  }

  // n = 1: the gaussian block; every generator acts as eps(g) id
  RepLevel g1;
  g1.n = 1;
  g1.basis = cur;
  g1.inj_sigma_min = 0.0;
  for (const auto& [g, m] : dense) {
    if (cur.cols() == 0) break;
    double e = (g.row == g.col) ? 1.0 : 0.0;
    double res = (cur.adjoint() * m * cur -
                  e * MatrixXcd::Identity(cur.cols(), cur.cols()))
                     .norm();
    result.max_livingon_residual = std::max(result.max_livingon_residual, res);
  }
  tmp.push_back(std::move(g1));

  std::sort(tmp.begin(), tmp.end(), [](const RepLevel& a, const RepLevel& b) { return a.n < b.n; });
  result.levels = std::move(tmp);
  return result;
}

MatrixXcd maximal_gaussian_subspace(const MatRep& rep, double tol) {
  const Eigen::Index D = rep.dim;
  MatrixXcd S = MatrixXcd::Zero(D, D);
  for (const auto& [g, img] : rep.images) {
    MatrixXcd m = img.to_dense();
    double e = 1.0;
    if (g.kind == GenSym::Kind::U && g.row != g.col) e = 0.0;
    MatrixXcd t = m - e * MatrixXcd::Identity(D, D);
    S += t.adjoint() * t + t * t.adjoint();
  }
  Eigen::SelfAdjointEigenSolver<MatrixXcd> es(S);
  const auto& ev = es.eigenvalues();
  double scale = std::max(1.0, ev(ev.size() - 1));
  Eigen::Index k = 0;
  while (k < ev.size() && ev(k) < tol * scale) ++k;
  return es.eigenvectors().leftCols(k);
}

KeyLemmaReport key_lemma_limit(const MatrixXcd& a, const std::vector<VectorXcd>& test_vectors,
                               const std::vector<VectorXcd>& range_ys,
                               const std::vector<double>& p_schedule) {
  const Eigen::Index d = a.rows();
  if (a.cols() != d) throw PreconditionError("key_lemma_limit: square matrix required");
  {
    Eigen::JacobiSVD<MatrixXcd> svd(a);
    if (svd.singularValues()(0) > 1.0 + 1e-10)
      throw PreconditionError("key_lemma_limit: input is not a contraction");
  }
  MatrixXcd B = MatrixXcd::Identity(d, d) - a;
  Eigen::JacobiSVD<MatrixXcd> svd(B, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  double scale = std::max(1.0, sv.size() ? sv(0) : 1.0);
  Eigen::Index rank = 0;
  while (rank < sv.size() && sv(rank) >= 1e-10 * scale) ++rank;
  MatrixXcd ker = svd.matrixV().rightCols(sv.size() - rank);
  MatrixXcd P1 = MatrixXcd::Identity(d, d) - ker * ker.adjoint();

  for (const auto& v : test_vectors)
    if (v.size() != d) throw PreconditionError("key_lemma_limit: test vector size mismatch");
  for (const auto& y : range_ys)
    if (y.size() != d) throw PreconditionError("key_lemma_limit: range vector size mismatch");

  KeyLemmaReport rep;
  rep.schedule = p_schedule;
  for (double p : p_schedule) {
    Eigen::PartialPivLU<MatrixXcd> lu(MatrixXcd::Identity(d, d) - p * a);
    double worst_test = 0, worst_range = 0, bound = 0;
    for (const auto& v : test_vectors)
      worst_test = std::max(worst_test, (B * lu.solve(v) - P1 * v).norm());
    for (const auto& y : range_ys) {
      VectorXcd v = B * y;
      worst_range = std::max(worst_range, (B * lu.solve(v) - P1 * v).norm());
      bound = std::max(bound, 2.0 * (1.0 - p) * y.norm());
    }
    rep.proj_defect.push_back(worst_test);
    rep.range_defect.push_back(worst_range);
    rep.range_bound.push_back(bound);
    if (worst_range > bound * (1.0 + 1e-9) + 1e-12) rep.bound_satisfied = false;
  }
  return rep;
}

void write_matrix_bin(const std::string& path, const MatrixXcd& m) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write " + path);
  int64_t dims[2] = {m.rows(), m.cols()};
  os.write(reinterpret_cast<const char*>(dims), sizeof(dims));
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      double pair[2] = {m(i, j).real(), m(i, j).imag()};
      os.write(reinterpret_cast<const char*>(pair), sizeof(pair));
    }
}

MatrixXcd read_matrix_bin(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot read " + path);
  int64_t dims[2];
  is.read(reinterpret_cast<char*>(dims), sizeof(dims));
  MatrixXcd m(dims[0], dims[1]);
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      double pair[2];
      is.read(reinterpret_cast<char*>(pair), sizeof(pair));
      m(i, j) = Cplx(pair[0], pair[1]);
    }
  if (!is) throw std::runtime_error("truncated matrix file " + path);
  return m;
}

void write_matrix_csv(const std::string& path, const MatrixXcd& m) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path);
  os << std::setprecision(17);
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) os << ",";
      os << m(i, j).real() << "," << m(i, j).imag();
    }
    os << "\n";
  }
}

double eigenvalue_one_symmetry_defect(const MatRep& rep, double tol) {
  double worst = 0;
  for (const auto& [g, img] : rep.images) {
    MatrixXcd m = img.to_dense();
    const Eigen::Index d = m.rows();
    auto kernel_proj = [&](const MatrixXcd& x) {
      MatrixXcd B = MatrixXcd::Identity(d, d) - x;
      Eigen::JacobiSVD<MatrixXcd> svd(B, Eigen::ComputeFullV);
      const auto& sv = svd.singularValues();
      double scale = std::max(1.0, sv.size() ? sv(0) : 1.0);
      Eigen::Index rank = 0;
      while (rank < sv.size() && sv(rank) >= tol * scale) ++rank;
      MatrixXcd ker = svd.matrixV().rightCols(sv.size() - rank);
      return MatrixXcd(ker * ker.adjoint());
    };
    worst = std::max(worst, (kernel_proj(m) - kernel_proj(m.adjoint())).norm());
  }
  return worst;
}

}  // namespace qglevy
