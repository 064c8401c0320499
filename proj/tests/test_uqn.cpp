#include <doctest.h>

#include "qglevy/uqn.hpp"

using namespace qglevy;

namespace {
const Rat kHalf(1, 2);
}

TEST_CASE("lifting representations along t_N") {
  auto uctx = uq_ctx(2, kHalf);
  // the trivial U_q rep lifts to the trivial SU_q(3) rep
  MatRep triv = trivial_rep(uctx, 3);
  MatRep lifted = lift_rep_to_suq(triv);
  CHECK(lifted.ctx.N == 3);
  for (const auto& a : word_battery(lifted.ctx, 2, true, 12, 1))
    CHECK((lifted.eval(a).to_dense() - counit(a) * MatrixXcd::Identity(3, 3)).norm() < 1e-12);
  // a character lifts to the SU_q(3) torus character
  MatRep chr = torus_char_rep(uctx, {0.3, -0.8});
  MatRep chr_lift = lift_rep_to_suq(chr);
  MatRep chr3 = torus_char_rep(suq_ctx(3, kHalf), {-0.8, 0.5});  // theta_1 = 0.3
  for (int j = 1; j <= 3; ++j)
    CHECK((chr_lift.image(GenSym::u(j, j)).to_dense() -
           chr3.image(GenSym::u(j, j)).to_dense())
              .norm() < 1e-12);
  // U_q(1) = U(1): the unitary generator lifts to the SU_q(2) diagonal torus
  auto u1 = uq_ctx(1, kHalf);
  MatRep c1 = torus_char_rep(u1, {0.4});
  MatRep c1_lift = lift_rep_to_suq(c1);
  CHECK(std::abs(c1_lift.image(GenSym::u(1, 1)).to_dense()(0, 0) - std::exp(Cplx(0, 0.4))) <
        1e-15);
  CHECK(std::abs(c1_lift.image(GenSym::u(2, 2)).to_dense()(0, 0) - std::exp(Cplx(0, -0.4))) <
        1e-15);
  // lifted irrep satisfies the SU_q(3) relations
  MatRep piu = uq_rep_from_suq(suq2_irrep(16, kHalf));
  CHECK(relation_residuals(lift_rep_to_suq(piu), false).max_interior < 1e-12);
}

TEST_CASE("lifting functionals and the section") {
  auto uctx = uq_ctx(2, kHalf);
  Functional eps_u = counit_functional();
  Functional lifted = lift_functional_to_suq(eps_u, 2, kHalf);
  auto sctx = suq_ctx(3, kHalf);
  for (const auto& a : word_battery(sctx, 2, true, 15, 2))
    CHECK(std::abs(lifted(a) - counit(a)) < 1e-14);
  // t_N o section = id
  Morphism t = Morphism::t_N(2, kHalf);
  for (const auto& a : word_battery(uctx, 2, true, 20, 3))
    CHECK(t.apply(uq_section(a)) == a);
}

TEST_CASE("uq gaussian classification") {
  // N drift slots and an N x N matrix; exact round trip
  for (int N : {1, 2}) {
    auto ctx = uq_ctx(N, kHalf);
    auto idx = basis_extension_indices(ctx);
    CHECK(static_cast<int>(idx.size()) == N);
    GaussParams p = GaussParams::zero(ctx);
    for (int j = 0; j < N; ++j) p.drift[j] = 0.3 * (j + 1);
    p.diffusion = Eigen::MatrixXd::Identity(N, N) * 1.5;
    if (N == 2) p.diffusion(0, 1) = p.diffusion(1, 0) = 0.4;
    GaussParams rec = recover_params(ctx, gaussian_functional(ctx, p));
    CHECK((rec.drift - p.drift).norm() < 1e-12);
    CHECK((rec.diffusion - p.diffusion).norm() < 1e-12);
  }
  // duality of the extended family is exact
  auto ctx = uq_ctx(2, kHalf);
  for (int a : basis_extension_indices(ctx))
    for (int b : basis_extension_indices(ctx))
      CHECK(eps_prime_exact(basis_extension_elt(ctx, b), a) ==
            (a == b ? QCoeff(1) : QCoeff(0)));
  // no (GC) for N >= 2: a non-hermitian gaussian cocycle is rejected
  GaussCocycle c{ctx, {}};
  Eigen::VectorXcd v1(2), v2(2);
  v1 << 1, 0;
  v2 << Cplx(0, 1), 0;
  c.vectors = {v1, v2};
  CHECK_FALSE(is_hermitian_gaussian(c).hermitian);
}

TEST_CASE("uq hunt pipeline") {
  auto uctx = uq_ctx(2, kHalf);
  MatRep piu = uq_rep_from_suq(suq2_irrep(12, kHalf));
  GaussParams gp = GaussParams::zero(uctx);
  gp.drift << 0.1, -0.3;
  gp.diffusion << 1.0, 0.2, 0.2, 0.6;
  std::vector<LevelSpec> specs;
  {
    LevelSpec s;
    s.n = 2;
    s.eta_nn = VectorXcd::Zero(12);
    s.eta_nn(0) = 1.0;
    specs.push_back(s);
  }
  UqHunt uh = uq_hunt(piu, specs, gp);
  CHECK(uh.pushback_defect < 1e-10);
  // drift recovery through the native U_q gaussian
  CHECK(std::abs(uh.psi_total(basis_extension_elt(uctx, 2)) - Cplx(0.1, 0)) < 1e-12);
  CHECK(std::abs(uh.psi_total(basis_extension_elt(uctx, 3)) - Cplx(-0.3, 0)) < 1e-12);
  // the level lives on SU_q(2), hence on U_q(1)
  REQUIRE(uh.inner.levels.size() == 1);
  CHECK(uh.inner.levels.front().n == 2);
  CHECK(uh.inner.levels.front().living_residual < 1e-8);
  // hermiticity of the assembled functional
  auto battery = k1_battery(uctx, BatterySpec{2, {}, 15, 4});
  for (const auto& a : battery)
    CHECK(std::abs(uh.psi_total(adjoint(a)) - std::conj(uh.psi_total(a))) < 1e-10);
  // wrong parameter count is rejected
  GaussParams bad = GaussParams::zero(suq_ctx(2, kHalf));  // 1 slot instead of 2
  CHECK_THROWS_AS(uq_hunt(piu, specs, bad), PreconditionError);
}

TEST_CASE("morphism compatibility across the chain") {
  // t~_n o s~_{n,N} = s_{n,N} o t~_N
  for (auto [n, N] : std::vector<std::pair<int, int>>{{1, 2}, {2, 3}, {1, 3}}) {
    auto lhs = Morphism::compose(Morphism::t_breve_N(n, kHalf), Morphism::s_breve_nN(n, N, kHalf));
    auto rhs = Morphism::compose(Morphism::s_nN(n, N, kHalf), Morphism::t_breve_N(N, kHalf));
    for (const auto& w : word_battery(uq_ctx(N, kHalf), 2, true, 25, 5))
      CHECK(equals_exact(lhs.apply(w), rhs.apply(w)) == Equality::ProvedEqual);
  }
  // t_n o s_{n+1,N+1} = s~_{n,N} o t_N
  for (auto [n, N] : std::vector<std::pair<int, int>>{{1, 2}, {2, 3}}) {
    auto lhs = Morphism::compose(Morphism::t_N(n, kHalf), Morphism::s_nN(n + 1, N + 1, kHalf));
    auto rhs = Morphism::compose(Morphism::s_breve_nN(n, N, kHalf), Morphism::t_N(N, kHalf));
    for (const auto& w : word_battery(suq_ctx(N + 1, kHalf), 2, true, 25, 6))
      CHECK(equals_exact(lhs.apply(w), rhs.apply(w)) == Equality::ProvedEqual);
  }
}

TEST_CASE("P compatibility along t_N") {
  // P^{Uq} o t_N = t_N o P^{SUq(N+1)}: the basis extension maps onto the
  // extended family with no zeros
  for (int N : {1, 2}) {
    Morphism t = Morphism::t_N(N, kHalf);
    for (const auto& a : word_battery(suq_ctx(N + 1, kHalf), 2, true, 20, 7)) {
      AlgElt lhs = projP(t.apply(a));
      AlgElt rhs = t.apply(projP(a));
      CHECK(equals_exact(lhs, rhs) == Equality::ProvedEqual);
    }
  }
}
