// Cocycles and their coboundary approximation, generating-functional
// evaluation by two independent routes (exact K2 splitting vs resolvent
// p-limit), the H^pi norm, assembly of the Levy-Khintchine/Hunt
// decomposition along the subgroup chain, degree-truncated GNS
// reconstruction, and the N=3 divergence witness.

#pragma once

#include <memory>

#include "qglevy/gauss.hpp"
#include "qglevy/repkit.hpp"

namespace qglevy {

struct PSchedule {
  int m_min = 4;
  int m_max = 20;
  std::vector<double> values() const;  // p_m = 1 - 2^-m
  static double p_of(int m) { return 1.0 - std::ldexp(1.0, -m); }
};

class Cocycle {
 public:
  enum class Method { Coboundary, ClosedForm, PLimit };

  // eta(a) = pi(a - eps(a) 1) f
  static Cocycle coboundary(std::shared_ptr<const MatRep> rep, VectorXcd f);
  // Reconstructs eta from eta(u_NN): off-corner row/column through the
  // always-invertible I - q pi(u_NN), the inner block by solving against
  // pi(u_NN) - 1 (ClosedForm), or as a pointwise limit of coboundaries
  // along the p-schedule (PLimit; throws ConvergenceError on divergence).
  static Cocycle from_corner_value(std::shared_ptr<const MatRep> rep, const VectorXcd& eta_nn,
                                   Method method, double tol, const PSchedule& sched = {});

  const MatRep& rep() const { return *rep_; }
  const std::shared_ptr<const MatRep>& rep_ptr() const { return rep_; }
  Method method() const { return method_; }
  Eigen::Index dim() const { return rep_->dim; }

  VectorXcd operator()(const AlgElt& a) const;
  const VectorXcd& gen_value(const GenSym& g) const;

 private:
  Cocycle(std::shared_ptr<const MatRep> rep, Method m) : rep_(std::move(rep)), method_(m) {}
  void fill_starred_values();
  std::shared_ptr<const MatRep> rep_;
  Method method_;
  std::optional<VectorXcd> cob_vector_;
  std::map<GenSym, VectorXcd> values_;
};

// max ||eta(ab) - pi(a) eta(b) - eta(a) eps(b)|| over the sampled pairs
double cocycle_identity_defect(const Cocycle& eta,
                               const std::vector<std::pair<AlgElt, AlgElt>>& pairs);
// max_{m>n} of ||eta(u_mm)|| and the off-block generator values
double cocycle_lives_on_residual(const Cocycle& eta, int n);
// closed-form vs p-limit disagreement, max over generators
double cocycle_route_disagreement(const std::shared_ptr<const MatRep>& rep,
                                  const VectorXcd& eta_nn, double tol,
                                  const PSchedule& sched = {});

struct PLimitValue {
  Cplx value{0, 0};
  bool converged = false;
  double conditioning = 0;  // max |P-term| / |value| at the last p
  std::vector<std::pair<double, Cplx>> trace;
};

// psi(a) = lim_p <f_p, pi(P a) f_p>, f_p = -(I - p pi(u_NN))^{-1} eta_NN,
// with one-step Richardson extrapolation in 1-p. The three P-terms are
// combined into a single p-independent operator before the quadratic form.
PLimitValue psi_plimit(const MatRep& rep, const VectorXcd& eta_nn, const AlgElt& a,
                       const PSchedule& sched = {}, double tol = 1e-8);

// Exact decomposition x = sum a_i b_i with a_i, b_i in K1, for x with
// eps(x) = 0 and eps'_kappa(x) = 0 (checked exactly). Off-diagonal letters
// split through the q-commutation identity, diagonal ones through the
// unitarity identity, and the leftover multiple of d_1+...+d_N through the
// determinant staircase expansion.
std::vector<std::pair<AlgElt, AlgElt>> split_K2(const AlgElt& x);

// psi(a) = sum_i <eta(a_i*), eta(b_i)> over split_K2(P a); psi o P = psi by
// construction.
Cplx psi_exact(const Cocycle& eta, const AlgElt& a);

struct TripleReport {
  double max_defect = 0;
  long pairs = 0;
};

// Defect of psi(a* b) - psi(a*) eps(b) - eps(a*) psi(b) = <eta(a), eta(b)>
// over battery pairs.
TripleReport triple_check(const Cocycle& eta, const std::function<Cplx(const AlgElt&)>& psi,
                          const std::vector<AlgElt>& battery);

// ||f||_pi = sqrt(sum_j ||pi(1 - u_jj) f||^2)
double h_pi_norm(const MatRep& rep, const VectorXcd& f);

struct LevelSpec {
  int n = 2;
  VectorXcd eta_nn;  // in level coordinates
  Cocycle::Method method = Cocycle::Method::ClosedForm;
};

struct HuntLevel {
  int n = 0;
  MatrixXcd basis;
  std::shared_ptr<const MatRep> rep_n;  // as SU_q(n) representation
  Cocycle eta_n;
  std::optional<Morphism> chain;  // s_{n,N}; absent when n == N
  double inj_sigma_min = 0;
  double living_residual = 0;  // big-space eta(u_mm) residuals, m > n

  Cplx psi(const AlgElt& a) const;  // psi~_n o s_{n,N}
};

struct HuntDecomposition {
  AlgebraCtx ctx;
  GaussParams gauss;
  Functional psi_G;
  std::vector<HuntLevel> levels;
  double max_invariance_residual = 0;
  double max_livingon_residual = 0;

  Cplx psi_L(const AlgElt& a) const;
  Cplx psi_total(const AlgElt& a) const;
  Functional total_functional() const;
};

// Decomposes pi along the subgroup chain, builds the per-level cocycles
// from their corner values, attaches the gaussian part, and returns the
// total evaluator psi = psi_G + sum_n psi_n.
HuntDecomposition hunt_decompose(const MatRep& pi, const std::vector<LevelSpec>& level_specs,
                                 const GaussParams& gauss, double tol = 1e-8,
                                 const PSchedule& sched = {});

struct GnsData {
  std::vector<AlgElt> battery;          // centered words of degree <= d
  std::vector<GenSym> generators;       // alphabet the battery ran over
  MatrixXcd gram;                       // [psi(a_i* a_j)]
  std::vector<Eigen::Index> pivots;     // pivoted-Cholesky quotient basis
  MatrixXcd chol;                       // gram(P,P) = L L*
  std::map<GenSym, MatrixXcd> action;   // compressed generator action
  Eigen::Index dim() const { return static_cast<Eigen::Index>(pivots.size()); }
};

// Degree-truncated GNS data for a conditionally positive (hermitian)
// functional; a cross-check only, never the primary psi route. The
// generator action is faithful on classes of words of degree < d (the
// image leaves the window on the top layer).
GnsData gns_build(const AlgebraCtx& ctx, const std::function<Cplx(const AlgElt&)>& psi,
                  int degree, double tol = 1e-9, std::vector<GenSym> generators = {});

struct CounterexampleReport {
  std::vector<double> p_values;
  std::vector<double> eta_u11_norms;   // main build
  std::vector<double> oracle_norms;    // hand recursion at the same truncation
  double growth_ratio = 0;             // p = 1-2^-12 vs 1-2^-6
  double oracle_ratio = 0;
  double untruncated_oracle_ratio = 0; // recursion at the p-saturation scale
  bool monotone = false;
  bool divergent = false;              // monotone and growth >= oracle prediction
  std::vector<double> control_norms;   // coboundary control case
  double control_cauchy_defect = 0;
  std::vector<double> oracle_partial_sums;  // sum_{k<K} x_k^2
  double oracle_term_limit = 0;             // lim x_k^2 > 0
};

// The convolution-product construction on SU_q(3) with corner value
// e_0 (x) e_0: the candidate coboundary values at u_11 grow without bound,
// so no cocycle attains that corner value; the range-vector control case
// converges.
CounterexampleReport counterexample_n3(Eigen::Index M, const Rat& q0,
                                       const PSchedule& sched = {4, 14});

}  // namespace qglevy
