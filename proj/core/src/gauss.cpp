#include "qglevy/gauss.hpp"

namespace qglevy {

GaussParams GaussParams::zero(const AlgebraCtx& ctx) {
  auto n = static_cast<Eigen::Index>(basis_extension_indices(ctx).size());
  GaussParams p;
  p.drift = Eigen::VectorXd::Zero(n);
  p.diffusion = Eigen::MatrixXd::Zero(n, n);
  return p;
}

void GaussParams::validate(double tol) const {
  if (diffusion.rows() != diffusion.cols() || diffusion.rows() != drift.size())
    throw PreconditionError("GaussParams: dimension mismatch");
  double scale = std::max(1.0, diffusion.norm());
  if ((diffusion - diffusion.transpose()).norm() > tol * scale)
    throw PreconditionError("GaussParams: diffusion matrix not symmetric");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(diffusion, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -tol * scale)
    throw PreconditionError("GaussParams: diffusion matrix not PSD");
}

Functional gaussian_functional(const AlgebraCtx& ctx, const GaussParams& p) {
  auto idx = basis_extension_indices(ctx);
  if (static_cast<size_t>(p.drift.size()) != idx.size())
    throw PreconditionError("gaussian_functional: wrong parameter size");
  p.validate();
  Eigen::VectorXd r = p.drift;
  Eigen::MatrixXd R = p.diffusion;
  Functional f;
  f.eval = [ctx, idx, r, R](const AlgElt& a) {
    // both derivative families are closed-form in the diagonal exponents
    Cplx acc = 0;
    std::vector<long> m;
    for (const auto& [w, c] : a.terms()) {
      if (!diagonal_exponents(ctx, w, m)) continue;
      Cplx lin = 0;
      double quad = 0;
      for (size_t j = 0; j < idx.size(); ++j) {
        lin += Cplx(0, r[j] * static_cast<double>(m[j]));
        for (size_t k = 0; k < idx.size(); ++k)
          quad += R(j, k) * static_cast<double>(-m[j] * m[k]);
      }
      Rat q0 = ctx.q0 ? *ctx.q0 : Rat(1, 2);
      acc += c.eval_d(q0) * (lin + 0.5 * quad);
    }
    return acc;
  };
  f.hermitian = f.zero_normalized = f.gaussian = f.generating_candidate = true;
  f.description = "gaussian";
  return f;
}

GaussParams recover_params(const AlgebraCtx& ctx, const Functional& psi, double tol) {
  auto idx = basis_extension_indices(ctx);
  // gaussian means vanishing on K3: probe with triple products of centered letters
  {
    BatterySpec spec;
    spec.max_degree = 1;
    spec.count = 0;
    auto k1 = k1_battery(ctx, spec);
    double worst = 0;
    for (size_t a = 0; a < k1.size(); ++a)
      for (size_t b = a; b < std::min(k1.size(), a + 3); ++b)
        for (size_t c = b; c < std::min(k1.size(), b + 2); ++c)
          worst = std::max(worst, std::abs(psi(k1[a] * k1[b] * k1[c])));
    if (worst > tol)
      throw PreconditionError("recover_params: functional does not vanish on K3");
  }
  GaussParams p = GaussParams::zero(ctx);
  for (size_t j = 0; j < idx.size(); ++j) {
    AlgElt dj = basis_extension_elt(ctx, idx[j]);
    Cplx v = psi(dj);
    p.drift[static_cast<Eigen::Index>(j)] = v.real();
    for (size_t k = 0; k < idx.size(); ++k) {
      AlgElt dk = basis_extension_elt(ctx, idx[k]);
      p.diffusion(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k)) =
          psi(dj * dk).real();
    }
  }
  return p;
}

Eigen::VectorXcd GaussCocycle::operator()(const AlgElt& a) const {
  auto idx = basis_extension_indices(ctx);
  if (vectors.size() != idx.size()) throw PreconditionError("GaussCocycle: wrong family size");
  Eigen::Index dim = vectors.empty() ? 0 : vectors.front().size();
  Eigen::VectorXcd acc = Eigen::VectorXcd::Zero(dim);
  for (size_t j = 0; j < idx.size(); ++j) acc += eps_prime(a, idx[j]) * vectors[j];
  return acc;
}

Eigen::MatrixXcd GaussCocycle::gram() const {
  const auto n = static_cast<Eigen::Index>(vectors.size());
  Eigen::MatrixXcd g(n, n);
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index k = 0; k < n; ++k) g(j, k) = vectors[j].dot(vectors[k]);
  return g;
}

GaussCocycle gauss_cocycle_from_matrix(const AlgebraCtx& ctx, const Eigen::MatrixXd& R) {
  auto idx = basis_extension_indices(ctx);
  if (static_cast<size_t>(R.rows()) != idx.size() || R.rows() != R.cols())
    throw PreconditionError("gauss_cocycle_from_matrix: wrong matrix size");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(R);
  if (es.eigenvalues().minCoeff() < -1e-10 * std::max(1.0, R.norm()))
    throw PreconditionError("gauss_cocycle_from_matrix: matrix not PSD");
  Eigen::VectorXd clipped = es.eigenvalues().cwiseMax(0.0);
  Eigen::MatrixXd sqrtR =
      es.eigenvectors() * clipped.cwiseSqrt().asDiagonal() * es.eigenvectors().transpose();
  GaussCocycle c{ctx, {}};
  for (Eigen::Index j = 0; j < R.cols(); ++j)
    c.vectors.push_back(sqrtR.col(j).cast<Cplx>());
  return c;
}

HermiticityReport is_hermitian_gaussian(const GaussCocycle& c, double tol) {
  HermiticityReport rep;
  rep.gram = c.gram();
  rep.max_imag = rep.gram.imag().cwiseAbs().maxCoeff();
  rep.hermitian = rep.max_imag <= tol;
  if (rep.hermitian) {
    GaussParams p = GaussParams::zero(c.ctx);
    p.diffusion = rep.gram.real();
    // symmetrize away rounding before validation
    p.diffusion = 0.5 * (p.diffusion + p.diffusion.transpose());
    rep.completing_psi = gaussian_functional(c.ctx, p);
  }
  return rep;
}

}  // namespace qglevy
