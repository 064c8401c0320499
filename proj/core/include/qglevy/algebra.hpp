// Exact symbolic layer for the coordinate algebras M_q(N), SU_q(N), U_q(N):
// free *-words over the generator alphabet, the quantum matrix commutation
// relations as a rewriting system, quantum determinants and minors, and
// exact or semi-decided equality.

#pragma once

#include <Eigen/Dense>

#include <compare>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qglevy/qcoeff.hpp"

namespace qglevy {

struct AlgebraError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct CapExceeded : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class Variant { Mq, SUq, Uq };

std::string variant_name(Variant v);

// One generator letter. Dinv / DinvStar carry row == col == 0.
struct GenSym {
  enum class Kind : uint8_t { U = 0, Ustar = 1, Dinv = 2, DinvStar = 3 };
  Kind kind{Kind::U};
  int row{0}, col{0};

  static GenSym u(int j, int k) { return {Kind::U, j, k}; }
  static GenSym ustar(int j, int k) { return {Kind::Ustar, j, k}; }
  static GenSym dinv() { return {Kind::Dinv, 0, 0}; }
  static GenSym dinv_star() { return {Kind::DinvStar, 0, 0}; }

  bool starred() const { return kind == Kind::Ustar || kind == Kind::DinvStar; }
  bool diagonal() const { return kind == Kind::Dinv || kind == Kind::DinvStar || row == col; }
  GenSym adjoint() const;

  auto operator<=>(const GenSym&) const = default;
  std::string str() const;
};

using Word = std::vector<GenSym>;

struct AlgebraCtx {
  int N{2};
  Variant variant{Variant::SUq};
  std::optional<Rat> q0;  // rational specialization, in (0,1) when present

  friend bool operator==(const AlgebraCtx& a, const AlgebraCtx& b) {
    return a.N == b.N && a.variant == b.variant && a.q0 == b.q0;
  }
  void check_valid() const;
};

AlgebraCtx suq_ctx(int N, std::optional<Rat> q0 = std::nullopt);
AlgebraCtx uq_ctx(int N, std::optional<Rat> q0 = std::nullopt);
AlgebraCtx mq_ctx(int N, std::optional<Rat> q0 = std::nullopt);

// Finite QCoeff-linear combination of words; the universal carrier for all
// symbolic computation. Immutable value type; operations are pure.
class AlgElt {
 public:
  explicit AlgElt(AlgebraCtx ctx) : ctx_(std::move(ctx)) {}
  AlgElt(AlgebraCtx ctx, const QCoeff& scalar);

  static AlgElt unit(const AlgebraCtx& ctx) { return AlgElt(ctx, QCoeff(1)); }
  static AlgElt zero(const AlgebraCtx& ctx) { return AlgElt(ctx); }
  // Single generator as an element. In SUq contexts Dinv/DinvStar collapse
  // to the unit (D = 1 in the quotient).
  static AlgElt gen(const AlgebraCtx& ctx, const GenSym& g);
  static AlgElt word(const AlgebraCtx& ctx, const Word& w, const QCoeff& c = QCoeff(1));

  const AlgebraCtx& ctx() const { return ctx_; }
  const std::map<Word, QCoeff>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  int degree() const;  // max word length, -1 for zero
  QCoeff coeff(const Word& w) const;

  void add_term(const Word& w, const QCoeff& c);  // builder; drops zeros

  AlgElt operator-() const;
  friend AlgElt operator+(const AlgElt& a, const AlgElt& b);
  friend AlgElt operator-(const AlgElt& a, const AlgElt& b);
  friend AlgElt operator*(const AlgElt& a, const AlgElt& b);
  friend AlgElt operator*(const QCoeff& c, const AlgElt& a);
  // Structural equality of the stored term maps (no relations applied).
  friend bool operator==(const AlgElt& a, const AlgElt& b) {
    return a.ctx_ == b.ctx_ && a.terms_ == b.terms_;
  }

 private:
  AlgebraCtx ctx_;
  std::map<Word, QCoeff> terms_;
};

AlgElt mul(const AlgElt& a, const AlgElt& b);
AlgElt add(const AlgElt& a, const AlgElt& b);
// Antilinear antihomomorphic involution; only flips star flags.
AlgElt adjoint(const AlgElt& a);
// Expands starred generators through the quantum-minor formula
// u*_{jk} -> (-q)^{k-j} D^{jk} [D^{-1}], so the result is star-free.
AlgElt adjoint_expand(const AlgElt& a);

AlgElt quantum_determinant(const AlgebraCtx& ctx);
AlgElt quantum_minor(const AlgebraCtx& ctx, int j, int k);
AlgElt twisted_determinant(const AlgebraCtx& ctx, const std::vector<int>& tau);

int inversion_count(const std::vector<int>& perm);
std::vector<std::vector<int>> all_permutations(int n);

struct NormalFormOptions {
  bool apply_det_rule = false;
  long step_cap = 500000;
  size_t word_len_cap = 64;
};

struct NormalFormResult {
  AlgElt value;
  bool complete = true;  // false when the step cap was hit
  long steps = 0;
};

// Rewrites to the PBW normal order (lexicographically nondecreasing
// row-major letter sequence) using the four commutation relations as
// left-to-right reductions; requires star-free input. With the
// determinant rule enabled (SUq), additionally rewrites each contiguous
// diagonal staircase u_11...u_NN to 1 minus the remaining determinant
// terms, to a fixed point or the step cap.
NormalFormResult normal_form_full(const AlgElt& a, const NormalFormOptions& opts = {});
AlgElt normal_form(const AlgElt& a, bool apply_det_rule = false);  // throws on cap

// Numeric evaluation interface used for the SUq equality fallback;
// implemented by repkit's truncated representations.
struct EvalOracle {
  virtual ~EvalOracle() = default;
  virtual Eigen::MatrixXcd eval_matrix(const AlgElt& a) const = 0;
  virtual double tolerance() const = 0;
};

enum class Equality {
  ProvedEqual,
  ProvedDifferent,
  ProvedDifferentByEvaluation,
  EvaluationEqual,
  Undecided,
};

std::string equality_name(Equality e);

// Mq/Uq: decided via normal forms (Uq after clearing D^{-1} by
// cross-multiplication with determinant powers). SUq: semi-decided; the
// optional oracle refines Undecided via numeric evaluation.
Equality equals_exact(const AlgElt& a, const AlgElt& b, const EvalOracle* oracle = nullptr);

struct RelationEntry {
  std::string label;
  AlgElt element;  // lhs - rhs; must vanish in the algebra
};

// The defining and derived relation families: the four commutation
// relations, determinant relations, unitarity, twisted determinants
// (SUq), the mixed u/u* commutation catalog and its corner special cases.
std::vector<RelationEntry> relation_catalog(const AlgebraCtx& ctx);

struct ConfluenceReport {
  bool confluent = true;
  long trials = 0;
  long mismatches = 0;
};

// Reduces random elements with two reduction strategies and compares the
// results; a desk-scale local-confluence check of the rewriting system.
ConfluenceReport check_confluence(const AlgebraCtx& ctx, int max_degree, int trials,
                                  uint64_t seed, bool apply_det_rule = false);

// Plain-text element syntax: u[j,k], u*[j,k], Dinv, Dinvstar, integers and
// rationals, q (with ^ powers), i, products with *, sums with + and -.
AlgElt parse_elt(const std::string& text, const AlgebraCtx& ctx);
std::string print_elt(const AlgElt& a);

}  // namespace qglevy
