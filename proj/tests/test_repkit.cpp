#include <doctest.h>

#include <random>

#include "qglevy/repkit.hpp"

using namespace qglevy;

namespace {
const Rat kHalf(1, 2);

MatrixXcd random_matrix(Eigen::Index n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  MatrixXcd m(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) m(i, j) = Cplx(u(rng), u(rng));
  return m;
}

}  // namespace

TEST_CASE("Kron-structured operators") {
  std::mt19937_64 rng(3);
  MatrixXcd a = random_matrix(5, rng), b = random_matrix(4, rng);
  MatrixXcd c = random_matrix(5, rng), d = random_matrix(4, rng);
  Kop k1 = Kop::kron(a, b), k2 = Kop::kron(c, d);
  Kop sum = k1 + k2, prod = k1 * k2;
  MatrixXcd sum_dense = k1.to_dense() + k2.to_dense();
  MatrixXcd prod_dense = k1.to_dense() * k2.to_dense();
  CHECK((sum.to_dense() - sum_dense).norm() < 1e-13);
  CHECK((prod.to_dense() - prod_dense).norm() < 1e-12);
  CHECK(std::abs(sum.norm_fro() - sum_dense.norm()) < 1e-12);
  VectorXcd v = VectorXcd::Random(20);
  CHECK((sum.apply(v) - sum_dense * v).norm() < 1e-12);
  CHECK((sum.adj().to_dense() - sum_dense.adjoint()).norm() < 1e-13);
  // masking compresses both sides factorwise
  VectorXd m1 = VectorXd::Ones(5), m2 = VectorXd::Ones(4);
  m1(4) = 0;
  m2(0) = 0;
  MatrixXcd big_mask = MatrixXcd::Zero(20, 20);
  for (Eigen::Index i = 0; i < 5; ++i)
    for (Eigen::Index j = 0; j < 4; ++j) big_mask(i * 4 + j, i * 4 + j) = m1(i) * m2(j);
  CHECK((sum.masked(m1, m2).to_dense() - big_mask * sum_dense * big_mask).norm() < 1e-12);
}

TEST_CASE("suq2 irrep: exact identities and the corner defect") {
  const Eigen::Index M = 24;
  MatRep rep = suq2_irrep(M, kHalf);
  auto ctx = rep.ctx;
  // alpha gamma = q gamma alpha and the column unitarity hold exactly
  CHECK(rep.eval(parse_elt("u[1,1]*u[2,1] - q*u[2,1]*u[1,1]", ctx)).norm_fro() == 0.0);
  CHECK(rep.eval(parse_elt("u*[1,1]*u[1,1] + u*[2,1]*u[2,1] - 1", ctx)).norm_fro() < 1e-15);
  // the single corner defect and its hand-derived value
  AlgElt corner_rel = parse_elt("u[1,1]*u*[1,1] + q^2*u[2,1]*u*[2,1] - 1", ctx);
  double defect = rep.eval(corner_rel).norm_fro();
  double expected = 1.0 - std::pow(0.5, 2.0 * static_cast<double>(M));
  CHECK(std::abs(defect - expected) < 1e-12);
  // defect sits at basis index M-1 only
  MatrixXcd dm = rep.eval(corner_rel).to_dense();
  dm(M - 1, M - 1) = 0;
  CHECK(dm.norm() < 1e-15);
  // catalog residuals vanish on the interior at two sizes
  for (Eigen::Index m : {Eigen::Index(24), Eigen::Index(48)}) {
    MatRep r = suq2_irrep(m, kHalf);
    auto rr = relation_residuals(r, false);
    CHECK(rr.max_interior < 1e-12);
    CHECK(rr.max_contraction_excess < 1e-12);
    CHECK(rr.unit_defect == 0.0);
  }
  CHECK(rep.interior_dim() == M - 1);
  CHECK_THROWS_AS(suq2_irrep(1, kHalf), PreconditionError);
}

TEST_CASE("characters, trivial and block embeddings") {
  auto ctx3 = suq_ctx(3, kHalf);
  MatRep torus = torus_char_rep(ctx3, {0.4, -0.2});
  CHECK(relation_residuals(torus, false).max_interior < 1e-14);
  MatRep triv = trivial_rep(ctx3, 3);
  // the trivial rep evaluates like the counit
  for (const auto& a : word_battery(ctx3, 2, true, 15, 5)) {
    MatrixXcd m = triv.eval(a).to_dense();
    CHECK((m - counit(a) * MatrixXcd::Identity(3, 3)).norm() < 1e-12);
  }
  // [2,3]-block embedding sends u_11 to the identity
  MatRep blk = block_embed(suq2_irrep(12, kHalf), 3, 1);
  CHECK((blk.image(GenSym::u(1, 1)).to_dense() - MatrixXcd::Identity(12, 12)).norm() == 0.0);
  CHECK(relation_residuals(blk, false).max_interior < 1e-12);
  CHECK_THROWS_AS(block_embed(suq2_irrep(8, kHalf), 3, 2), PreconditionError);
}

TEST_CASE("convolution product") {
  MatRep b1 = block_embed(suq2_irrep(12, kHalf), 3, 0);
  MatRep b2 = block_embed(suq2_irrep(12, kHalf), 3, 1);
  MatRep conv = conv_product(b1, b2);
  // pi(u_33) = id (x) rho(alpha)*
  MatrixXcd expect = Kop::kron(MatrixXcd::Identity(12, 12),
                               suq2_irrep(12, kHalf).op(GenSym::u(2, 2)).to_dense())
                         .to_dense();
  CHECK((conv.image(GenSym::u(3, 3)).to_dense() - expect).norm() == 0.0);
  auto rr = relation_residuals(conv, false);
  CHECK(rr.max_interior < 1e-12);
  CHECK(rr.max_contraction_excess < 1e-10);
  // convolution with the trivial 1-dim rep reproduces the generators
  auto ctx3 = b1.ctx;
  MatRep conv_triv = conv_product(b1, trivial_rep(ctx3, 1));
  for (int j = 1; j <= 3; ++j)
    for (int k = 1; k <= 3; ++k)
      CHECK((conv_triv.image(GenSym::u(j, k)).to_dense() -
             b1.image(GenSym::u(j, k)).to_dense())
                .norm() < 1e-15);
  CHECK_THROWS_AS(conv_product(b1, b2, 10), CapExceeded);
}

TEST_CASE("evaluation") {
  MatRep rep = suq2_irrep(16, kHalf);
  CHECK((rep.eval(AlgElt::unit(rep.ctx)).to_dense() - MatrixXcd::Identity(16, 16)).norm() ==
        0.0);
  // relation elements restricted to the interior
  for (const auto& r : relation_catalog(rep.ctx)) {
    int margin = std::max(1, r.element.degree() - 1);
    CHECK(rep.eval(r.element).masked(rep.mask1(margin), rep.mask2(margin)).norm_fro() < 1e-12);
  }
}

TEST_CASE("decomposition recovers the construction") {
  auto ctx3 = suq_ctx(3, kHalf);
  // trivial rep sits entirely at level 1
  auto dec_triv = decompose(trivial_rep(ctx3, 3));
  CHECK(dec_triv.level_dim(1) == 3);
  CHECK(dec_triv.level_dim(2) == 0);
  CHECK(dec_triv.level_dim(3) == 0);
  // [2,3]-block embedding: ker(I - rho(alpha*)) = 0, whole space at level 3
  auto dec_blk = decompose(block_embed(suq2_irrep(10, kHalf), 3, 1));
  CHECK(dec_blk.level_dim(3) == 10);
  // construction-aware split
  std::vector<MatRep> parts{trivial_rep(ctx3, 2), torus_char_rep(ctx3, {0.7, 0.0}),
                            block_embed(suq2_irrep(10, kHalf), 3, 0),
                            conv_product(block_embed(suq2_irrep(10, kHalf), 3, 0),
                                         block_embed(suq2_irrep(10, kHalf), 3, 1))};
  MatRep big = direct_sum(parts);
  auto dec = decompose(big);
  CHECK(dec.level_dim(3) == 100);
  CHECK(dec.level_dim(2) == 11);
  CHECK(dec.level_dim(1) == 2);
  CHECK(dec.max_invariance_residual < 1e-10);
  CHECK(dec.max_livingon_residual < 1e-10);
  // compressed level reps keep injectivity certificates and contractions;
  // their truncation corners are inherited from the construction, so the
  // interior-residual contract applies to constructed reps only
  for (int n : {2, 3}) {
    const RepLevel& l = dec.level(n);
    REQUIRE(l.compressed.has_value());
    CHECK(l.inj_sigma_min > 1e-3);
    auto rr = relation_residuals(*l.compressed, false);
    CHECK(rr.max_contraction_excess < 1e-10);
    CHECK(rr.unit_defect < 1e-12);
  }
  // maximal gaussian subspace agrees with level 1
  MatrixXcd mg = maximal_gaussian_subspace(big);
  CHECK(mg.cols() == dec.level_dim(1));
  CHECK((mg.adjoint() * dec.level(1).basis).jacobiSvd().singularValues().minCoeff() >
        1.0 - 1e-10);
}

TEST_CASE("maximal gaussian subspace of the irrep is trivial") {
  // (1 - alpha) stays injective as M grows
  double prev = 0;
  for (Eigen::Index m : {Eigen::Index(16), Eigen::Index(32)}) {
    MatRep rep = suq2_irrep(m, kHalf);
    CHECK(maximal_gaussian_subspace(rep).cols() == 0);
    MatrixXcd b = MatrixXcd::Identity(m, m) - rep.op(GenSym::u(1, 1)).to_dense();
    double smin = b.jacobiSvd().singularValues().minCoeff();
    CHECK(smin > 1e-2);
    if (prev != 0) CHECK(smin > 0.5 * prev);
    prev = smin;
  }
}

TEST_CASE("lives-on reports") {
  MatRep blk = block_embed(suq2_irrep(8, kHalf), 3, 0);
  CHECK(rep_lives_on(blk, 2).lives(1e-12));
  CHECK_FALSE(rep_lives_on(blk, 1).lives(1e-12));
  MatRep blk23 = block_embed(suq2_irrep(8, kHalf), 3, 1);
  CHECK_FALSE(rep_lives_on(blk23, 2).lives(1e-12));
}

TEST_CASE("key lemma limits") {
  // a = 0 and a = I are exact at every p
  std::vector<VectorXcd> tv{VectorXcd::Ones(4)};
  std::vector<VectorXcd> ys{VectorXcd::Random(4)};
  auto z = key_lemma_limit(MatrixXcd::Zero(4, 4), tv, ys, {0.9, 0.99});
  for (double d : z.proj_defect) CHECK(d < 1e-14);
  auto o = key_lemma_limit(MatrixXcd::Identity(4, 4), tv, ys, {0.9, 0.99});
  for (double d : o.proj_defect) CHECK(d < 1e-14);
  // diagonal model: eigenvalues 1 and 1/2, limit is diag(0, 1)
  MatrixXcd a = MatrixXcd::Zero(2, 2);
  a(0, 0) = 1;
  a(1, 1) = 0.5;
  std::vector<VectorXcd> tv2{VectorXcd::Ones(2)};
  std::vector<VectorXcd> ys2{VectorXcd::Random(2)};
  auto r = key_lemma_limit(a, tv2, ys2, {0.9, 0.99, 0.999});
  CHECK_THROWS_AS(key_lemma_limit(a, tv, ys, {0.9}), PreconditionError);
  // defect (1-lambda)/(1-p lambda) - 1 at lambda = 1/2 decays linearly
  CHECK(r.proj_defect[0] == doctest::Approx(1.0 / 11).epsilon(1e-9));
  CHECK(r.proj_defect[2] < 1.2e-3);
  CHECK(r.bound_satisfied);
  CHECK_THROWS_AS(key_lemma_limit(2.0 * MatrixXcd::Identity(2, 2), tv2, ys2, {0.9}),
                  PreconditionError);
}

TEST_CASE("eigenvalue-one symmetry") {
  MatRep rep = direct_sum({trivial_rep(suq_ctx(2, kHalf), 2), suq2_irrep(12, kHalf)});
  CHECK(eigenvalue_one_symmetry_defect(rep) < 1e-10);
}

TEST_CASE("matrix export round trip") {
  std::mt19937_64 rng(8);
  MatrixXcd m = random_matrix(6, rng);
  std::string path = "qglevy_test_matrix.bin";
  write_matrix_bin(path, m);
  MatrixXcd back = read_matrix_bin(path);
  CHECK((m - back).norm() == 0.0);
  std::remove(path.c_str());
}
