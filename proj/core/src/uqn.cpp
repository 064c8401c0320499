#include "qglevy/uqn.hpp"

namespace qglevy {

MatRep lift_rep_to_suq(const MatRep& rep) {
  if (rep.ctx.variant != Variant::Uq)
    throw PreconditionError("lift_rep_to_suq: Uq representations only");
  const int N = rep.ctx.N;
  MatRep out;
  out.ctx = suq_ctx(N + 1, rep.ctx.q0);
  out.dim = rep.dim;
  out.tag = "lift(" + rep.tag + ")";
  const Eigen::Index d1 = rep.depth1.size(), d2 = std::max<Eigen::Index>(1, rep.depth2.size());
  for (int j = 1; j <= N + 1; ++j)
    for (int k = 1; k <= N + 1; ++k) {
      Kop img = Kop::zero(d1, d1, d2, d2);
      if (j <= N && k <= N)
        img = rep.image(GenSym::u(j, k));
      else if (j == N + 1 && k == N + 1)
        img = rep.image(GenSym::dinv());
      out.images.insert_or_assign(GenSym::u(j, k), std::move(img));
    }
  out.depth1 = rep.depth1;
  out.depth2 = rep.depth2;
  return out;
}

Functional lift_functional_to_suq(const Functional& psi, int N, std::optional<Rat> q0) {
  Morphism t = Morphism::t_N(N, std::move(q0));
  Functional out;
  out.eval = [psi, t](const AlgElt& a) { return psi(t.apply(a)); };
  out.hermitian = psi.hermitian;
  out.zero_normalized = psi.zero_normalized;
  out.drift = psi.drift;
  out.gaussian = psi.gaussian;
  out.generating_candidate = psi.generating_candidate;
  out.description = "(" + psi.description + ") o t_N";
  return out;
}

AlgElt uq_section(const AlgElt& a) {
  if (a.ctx().variant != Variant::Uq) throw PreconditionError("uq_section: Uq elements only");
  const int N = a.ctx().N;
  AlgebraCtx target = suq_ctx(N + 1, a.ctx().q0);
  AlgElt out(target);
  for (const auto& [w, c] : a.terms()) {
    Word nw;
    for (const GenSym& g : w) {
      switch (g.kind) {
        case GenSym::Kind::U:
          nw.push_back(g);
          break;
        case GenSym::Kind::Ustar:
          nw.push_back(g);
          break;
        case GenSym::Kind::Dinv:
          nw.push_back(GenSym::u(N + 1, N + 1));
          break;
        case GenSym::Kind::DinvStar:
          nw.push_back(GenSym::ustar(N + 1, N + 1));
          break;
      }
    }
    out.add_term(nw, c);
  }
  return out;
}

MatRep uq_rep_from_suq(const MatRep& rep) {
  if (rep.ctx.variant != Variant::SUq)
    throw PreconditionError("uq_rep_from_suq: SUq representations only");
  MatRep out = rep;
  out.ctx = uq_ctx(rep.ctx.N, rep.ctx.q0);
  out.tag = "uq(" + rep.tag + ")";
  const Eigen::Index d1 = rep.depth1.size(), d2 = std::max<Eigen::Index>(1, rep.depth2.size());
  out.images.insert_or_assign(GenSym::dinv(), Kop::identity(d1, d2));
  return out;
}

Cplx UqHunt::psi_L(const AlgElt& a) const { return inner.psi_L(uq_section(a)); }

Cplx UqHunt::psi_total(const AlgElt& a) const { return psi_G(a) + psi_L(a); }

Functional UqHunt::total_functional() const {
  Functional f;
  auto inner_copy = inner;
  auto gauss_f = psi_G;
  f.eval = [inner_copy, gauss_f](const AlgElt& a) {
    return gauss_f(a) + inner_copy.psi_L(uq_section(a));
  };
  f.hermitian = f.zero_normalized = f.generating_candidate = true;
  f.description = "uq-hunt-assembled";
  return f;
}

UqHunt uq_hunt(const MatRep& pi_uq, const std::vector<LevelSpec>& level_specs,
               const GaussParams& gauss_uq, double tol, const PSchedule& sched) {
  if (pi_uq.ctx.variant != Variant::Uq)
    throw PreconditionError("uq_hunt: Uq representations only");
  const int N = pi_uq.ctx.N;
  gauss_uq.validate();
  if (gauss_uq.drift.size() != N)
    throw PreconditionError("uq_hunt: gaussian parameters need N drift slots");

  UqHunt out;
  out.uq = pi_uq.ctx;
  out.suq = suq_ctx(N + 1, pi_uq.ctx.q0);
  out.gauss = gauss_uq;
  out.psi_G = gaussian_functional(pi_uq.ctx, gauss_uq);

  MatRep lifted = lift_rep_to_suq(pi_uq);
  out.inner = hunt_decompose(lifted, level_specs, GaussParams::zero(out.suq), tol, sched);

  // well-definedness of the pushback: the level functionals must kill the
  // kernel generators of t_N (and a few sampled ideal products)
  Morphism t = Morphism::t_N(N, pi_uq.ctx.q0);
  auto kgens = subgroup_kernel_generators(t);
  std::vector<AlgElt> probes = kgens;
  auto words = word_battery(out.suq, 1, false);
  for (const AlgElt& k : kgens)
    for (size_t w = 0; w < words.size() && w < 4; ++w) {
      probes.push_back(k * words[w]);
      probes.push_back(words[w] * k);
    }
  for (const auto& level : out.inner.levels)
    for (const AlgElt& p : probes)
      out.pushback_defect = std::max(out.pushback_defect, std::abs(level.psi(p)));
  return out;
}

}  // namespace qglevy
