// Numerical *-representations on truncated Hilbert spaces: constructors
// (the SU_q(2) weighted-shift irrep, characters, block embeddings,
// convolution products, direct sums), relation residual scans, the
// subgroup-chain decomposition, the maximal gaussian subspace, and the
// resolvent key-lemma numerics.

#pragma once

#include <Eigen/Dense>

#include "qglevy/bialgebra.hpp"

namespace qglevy {

using Eigen::MatrixXcd;
using Eigen::VectorXcd;
using Eigen::VectorXd;
using Eigen::VectorXi;

// Operator stored as a sum of Kronecker products A_i (x) B_i. Plain dense
// operators carry a 1x1 second factor, so the two cases share one code
// path; convolution-product representations stay factored, which keeps
// 64 (x) 64 residual scans cheap.
class Kop {
 public:
  Kop() = default;
  static Kop dense(MatrixXcd a);
  static Kop kron(MatrixXcd a, MatrixXcd b);
  static Kop zero(Eigen::Index r1, Eigen::Index c1, Eigen::Index r2 = 1, Eigen::Index c2 = 1);
  static Kop identity(Eigen::Index d1, Eigen::Index d2 = 1);

  Eigen::Index rows() const { return r1_ * r2_; }
  Eigen::Index cols() const { return c1_ * c2_; }
  bool single_factor() const { return r2_ == 1 && c2_ == 1; }
  size_t term_count() const { return terms_.size(); }
  bool is_zero_structural() const { return terms_.empty(); }

  Kop operator*(const Kop& o) const;
  Kop operator+(const Kop& o) const;
  Kop operator-(const Kop& o) const;
  Kop scaled(const Cplx& s) const;
  Kop adj() const;

  VectorXcd apply(const VectorXcd& v) const;
  double norm_fro() const;  // via <A,C>_F <B,D>_F, no large matrix formed
  MatrixXcd to_dense(Eigen::Index cap = 4096) const;
  // compress both sides by diagonal 0/1 masks, given per factor
  Kop masked(const VectorXd& m1, const VectorXd& m2) const;

 private:
  void consolidate();
  Eigen::Index r1_ = 0, c1_ = 0, r2_ = 1, c2_ = 1;
  std::vector<std::pair<MatrixXcd, MatrixXcd>> terms_;
};

// Assignment generator -> operator on a finite truncation. Starred
// generators map to adjoints of their partners. depth1/depth2 record the
// distance of each factor coordinate to the truncation boundary (exact
// coordinates carry a large depth); the interior mask with margin m keeps
// the coordinates at depth >= m.
struct MatRep {
  AlgebraCtx ctx;
  Eigen::Index dim = 0;
  std::map<GenSym, Kop> images;
  VectorXi depth1, depth2;
  std::string tag;

  const Kop& image(const GenSym& unstarred) const;
  Kop op(const GenSym& g) const;
  Kop eval(const AlgElt& a) const;
  double q() const;
  Rat q_exact() const;

  VectorXd mask1(int margin) const;
  VectorXd mask2(int margin) const;
  Eigen::Index interior_dim() const;  // margin-1 interior
};

static constexpr int kExactDepth = 1 << 20;

MatRep suq2_irrep(Eigen::Index M, const Rat& q0);
// 1-dimensional diagonal character; SUq: theta = (theta_2..theta_N) with
// theta_1 = -sum, Uq: theta = (theta_1..theta_N) and D^-1 -> e^{-i sum}.
MatRep torus_char_rep(const AlgebraCtx& ctx, const std::vector<double>& theta);
MatRep trivial_rep(const AlgebraCtx& ctx, Eigen::Index dim);
// SU_q(n) rep placed in the [m+1, m+n] block of SU_q(N)
MatRep block_embed(const MatRep& inner, int N, int offset);
MatRep conv_product(const MatRep& p1, const MatRep& p2, Eigen::Index tensor_cap = 4096);
MatRep direct_sum(const std::vector<MatRep>& parts, Eigen::Index dense_cap = 4096);

struct ResidualRow {
  std::string label;
  int degree = 0;
  double interior = 0;
  double full = 0;
};
struct ResidualReport {
  double max_interior = 0;
  double max_contraction_excess = 0;  // over generators: max(0, ||pi(g)|| - 1)
  double unit_defect = 0;
  std::vector<ResidualRow> rows;
};

// Interior compression margin grows with the relation word degree: a
// degree-d word wanders at most d-1 slots across the cut.
ResidualReport relation_residuals(const MatRep& rep, bool keep_rows = true);

// EvalOracle adapter for the SUq equality fallback.
class MatRepOracle final : public EvalOracle {
 public:
  MatRepOracle(const MatRep& rep, double tol) : rep_(&rep), tol_(tol) {}
  MatrixXcd eval_matrix(const AlgElt& a) const override;
  double tolerance() const override { return tol_; }

 private:
  const MatRep* rep_;
  double tol_;
};

struct LivesOnReport {
  int n = 0;
  double max_residual = 0;
  bool lives(double tol) const { return max_residual <= tol; }
};
// Checks pi(u_mm) = id and vanishing cross blocks for all indices > n.
LivesOnReport rep_lives_on(const MatRep& rep, int n);

struct RepLevel {
  int n = 0;
  MatrixXcd basis;                   // orthonormal columns in the ambient space
  std::optional<MatRep> compressed;  // as an SU_q(n) representation (n >= 2)
  double inj_sigma_min = 0;          // smallest singular value of I - pi_n(u_nn)
};

struct DecompositionResult {
  std::vector<RepLevel> levels;  // ordered n = 1..N
  double max_invariance_residual = 0;
  double max_livingon_residual = 0;
  Eigen::Index level_dim(int n) const;
  const RepLevel& level(int n) const;
};

// Splits along ker(I - pi(u_nn)) recursively, n = N..2; the n = 1 level is
// the maximal gaussian block. Throws PreconditionError when an invariance
// residual exceeds the tolerance instead of proceeding silently.
DecompositionResult decompose(const MatRep& rep, double tol = 1e-8);

// Kernel of sum_g (pi(g) - eps(g))* (pi(g) - eps(g)), both over g and g*.
MatrixXcd maximal_gaussian_subspace(const MatRep& rep, double tol = 1e-8);

struct KeyLemmaReport {
  std::vector<double> schedule;
  std::vector<double> proj_defect;   // max_v ||(I-A)(I-pA)^{-1} v - P1 v||
  std::vector<double> range_defect;  // max over v=(I-A)y of the same quantity
  std::vector<double> range_bound;   // 2 (1-p) max ||y||
  bool bound_satisfied = true;       // range_defect <= range_bound pointwise
};

// Strong-convergence numerics for (I-A)(I-pA)^{-1} -> projection onto the
// orthocomplement of ker(I-A), with the proof's O(1-p) bound on range
// vectors v = (I-A)y.
KeyLemmaReport key_lemma_limit(const MatrixXcd& a, const std::vector<VectorXcd>& test_vectors,
                               const std::vector<VectorXcd>& range_ys,
                               const std::vector<double>& p_schedule);

// ker(I - A) == ker(I - A*) for contractions; returns the max mismatch of
// the two kernel projectors over all generator images.
double eigenvalue_one_symmetry_defect(const MatRep& rep, double tol = 1e-10);

// Flat binary matrix exchange: 16-byte header of two little-endian int64
// (rows, cols), then row-major complex entries as little-endian float64
// (re, im) pairs. CSV mirrors the layout with "re,im" cells.
void write_matrix_bin(const std::string& path, const MatrixXcd& m);
MatrixXcd read_matrix_bin(const std::string& path);
void write_matrix_csv(const std::string& path, const MatrixXcd& m);

}  // namespace qglevy
