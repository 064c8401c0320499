// Bialgebra structure maps and the functional calculus: counit, iterated
// coproduct, the diagonal character family and its derivatives, the basis
// extension E1 = {d_2,...,d_N} (plus d_D for U_q) with the projection P onto
// K_2, convolution and convolution exponentials, subgroup morphisms.

#pragma once

#include <complex>
#include <functional>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "qglevy/algebra.hpp"

namespace qglevy {

struct ConvergenceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct PreconditionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

using Cplx = std::complex<double>;

// --- counit and the diagonal character family ------------------------------

QCoeff counit_exact(const AlgElt& a);
Cplx counit(const AlgElt& a);

// E1 slots: j = 2..N labels d_j = (u_jj - u*_jj)/2i; for U_q the extra slot
// N+1 labels d_D = (D^-1 - D^-1*)/2i.
std::vector<int> basis_extension_indices(const AlgebraCtx& ctx);
AlgElt basis_extension_elt(const AlgebraCtx& ctx, int kappa);

// Exponent vector of a purely diagonal word in the free angle coordinates
// dual to E1; returns false when an off-diagonal letter occurs.
bool diagonal_exponents(const AlgebraCtx& ctx, const Word& w, std::vector<long>& m);

// Character evaluation and its exact pointwise derivatives at theta = 0.
Cplx eps_theta(const AlgElt& a, const std::vector<double>& theta);
QCoeff eps_prime_exact(const AlgElt& a, int kappa);
QCoeff eps_second_exact(const AlgElt& a, int j, int k);
Cplx eps_prime(const AlgElt& a, int kappa);
Cplx eps_second(const AlgElt& a, int j, int k);

// a - eps(a) 1
AlgElt center_elt(const AlgElt& a);
// P = id - 1 eps - sum_kappa d_kappa eps'_kappa : hermitian projection onto K2
AlgElt projP(const AlgElt& a);

// --- coproduct --------------------------------------------------------------

struct TensorTerm {
  std::vector<Word> legs;
  QCoeff c;
};

std::vector<TensorTerm> coproduct_iter(const AlgElt& a, int n, size_t term_cap = 1000000);

// All (left, right) index substitutions of Delta(w); each pair carries
// coefficient 1, the word's own coefficient multiplies outside.
std::vector<std::pair<Word, Word>> delta_pairs(const AlgebraCtx& ctx, const Word& w);

// --- functionals ------------------------------------------------------------

struct Functional {
  std::function<Cplx(const AlgElt&)> eval;
  bool hermitian = false;
  bool zero_normalized = false;
  bool drift = false;
  bool gaussian = false;
  bool generating_candidate = false;
  std::string description;

  Cplx operator()(const AlgElt& a) const { return eval(a); }
};

Functional counit_functional();
Functional eps_prime_functional(int kappa);
// real linear combination sum_kappa c_kappa eps'_kappa over E1 slots
Functional drift_functional(const AlgebraCtx& ctx, const std::vector<double>& coeffs);

Functional convolve(const Functional& phi, const Functional& psi, size_t term_cap = 1000000);

struct ConvExpOptions {
  int order_cap = 24;
  size_t term_cap = 1000000;
  double tol = 1e-12;
};

// e_*^{t psi}(a), summed adaptively; throws ConvergenceError past the cap.
Cplx conv_exp(const Functional& psi, double t, const AlgElt& a,
              const ConvExpOptions& opts = {});

// --- batteries and the generating-functional report -------------------------

struct BatterySpec {
  int max_degree = 2;
  std::vector<GenSym> generators;  // empty: all generators of the context
  int count = 0;                   // 0: all enumerated words
  uint64_t seed = 1;
};

std::vector<AlgElt> k1_battery(const AlgebraCtx& ctx, const BatterySpec& spec);
std::vector<AlgElt> word_battery(const AlgebraCtx& ctx, int max_degree, bool with_stars = true,
                                 int count = 0, uint64_t seed = 1);

struct GeneratingReport {
  Cplx psi_one;
  double hermitian_defect = 0;
  double gram_min_eig = 0;
  double gram_asymmetry = 0;
  bool conditionally_positive(double tol) const { return gram_min_eig >= -tol; }
  bool ok(double tol) const {
    return std::abs(psi_one) <= tol && hermitian_defect <= tol && gram_min_eig >= -tol;
  }
};

GeneratingReport is_generating(const Functional& psi, const std::vector<AlgElt>& battery);

// --- morphisms ---------------------------------------------------------------

class Morphism {
 public:
  Morphism(std::string name, AlgebraCtx source, AlgebraCtx target,
           std::map<GenSym, AlgElt> gen_images);

  const std::string& name() const { return name_; }
  const AlgebraCtx& source() const { return source_; }
  const AlgebraCtx& target() const { return target_; }
  AlgElt apply(const AlgElt& a) const;

  // s_N : SUq(N) -> SUq(N-1), corner to 1
  static Morphism s_N(int N, std::optional<Rat> q0 = std::nullopt);
  // t_N : SUq(N+1) -> Uq(N), corner to D^-1
  static Morphism t_N(int N, std::optional<Rat> q0 = std::nullopt);
  // t_breve_N : Uq(N) -> SUq(N), D^-1 to 1
  static Morphism t_breve_N(int N, std::optional<Rat> q0 = std::nullopt);
  // s_breve_N : Uq(N) -> Uq(N-1)
  static Morphism s_breve_N(int N, std::optional<Rat> q0 = std::nullopt);
  static Morphism s_nN(int n, int N, std::optional<Rat> q0 = std::nullopt);
  static Morphism s_breve_nN(int n, int N, std::optional<Rat> q0 = std::nullopt);
  static Morphism compose(const Morphism& f, const Morphism& g);  // a |-> f(g(a))

 private:
  std::string name_;
  AlgebraCtx source_, target_;
  std::map<GenSym, AlgElt> images_;
};

struct MorphismCheck {
  bool counit_preserved = true;
  int relations_checked = 0;
  int relations_failed = 0;
  int undecided = 0;
  bool ok() const { return counit_preserved && relations_failed == 0 && undecided == 0; }
};

// Substitution respects the source relation catalog and the counits.
MorphismCheck verify_morphism(const Morphism& m);

// Generators of ker s_{n,N} (resp. ker t_N): the centered letters that the
// morphism annihilates; used for living-on residual checks.
std::vector<AlgElt> subgroup_kernel_generators(const Morphism& m);

// --- the diagonal torus ------------------------------------------------------

// Image of tau_N : coordinates on the (N-1)- (SUq) or N-torus (Uq), words
// reduced to Laurent exponent vectors, SUq modulo (1,...,1).
struct TorusElt {
  int N = 0;
  std::map<std::vector<long>, QCoeff> terms;
  bool is_zero() const { return terms.empty(); }
};

TorusElt torus_apply(const AlgElt& a);

}  // namespace qglevy
