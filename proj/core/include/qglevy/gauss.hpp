// Gaussian generating functionals and gaussian cocycles: construction from
// drift/diffusion parameters, hermiticity certificates, parameter recovery.

#pragma once

#include <Eigen/Dense>

#include "qglevy/bialgebra.hpp"

namespace qglevy {

// Drift vector and diffusion matrix over the E1 slots of the context
// (N-1 slots for SUq(N), N slots for Uq(N)).
struct GaussParams {
  Eigen::VectorXd drift;
  Eigen::MatrixXd diffusion;  // real symmetric PSD

  static GaussParams zero(const AlgebraCtx& ctx);
  void validate(double tol = 1e-10) const;  // symmetry and PSD
};

// psi = sum_j r_j eps'_j + 1/2 sum_jk R_jk eps''_jk
Functional gaussian_functional(const AlgebraCtx& ctx, const GaussParams& p);

// Inverse of the parametrization: r_j = psi(d_j), R_jk = psi(d_j d_k).
// Checks that psi vanishes on a degree-3 battery of K3 elements first.
GaussParams recover_params(const AlgebraCtx& ctx, const Functional& psi, double tol = 1e-8);

// Gaussian cocycle eta(a) = sum_kappa eta_kappa eps'_kappa(a).
struct GaussCocycle {
  AlgebraCtx ctx;
  std::vector<Eigen::VectorXcd> vectors;  // one per E1 slot

  Eigen::VectorXcd operator()(const AlgElt& a) const;
  Eigen::MatrixXcd gram() const;  // <eta_j, eta_k>
};

// eta_j read off the columns of the positive square root of R, so the Gram
// matrix reproduces R exactly.
GaussCocycle gauss_cocycle_from_matrix(const AlgebraCtx& ctx, const Eigen::MatrixXd& R);

struct HermiticityReport {
  bool hermitian = false;
  Eigen::MatrixXcd gram;
  double max_imag = 0;  // the certificate when not hermitian
  std::optional<Functional> completing_psi;
};

// A gaussian cocycle extends to a triple iff its Gram matrix is real; when
// it is, the completing functional is gaussian_functional(0, Re Gram).
HermiticityReport is_hermitian_gaussian(const GaussCocycle& c, double tol = 1e-10);

}  // namespace qglevy
