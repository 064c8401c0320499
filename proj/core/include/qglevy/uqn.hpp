// U_q(N) support by reduction through SU_q(N+1): lifts of representations
// and functionals along t_N, the native U_q gaussian classification with N
// parameters, and the decomposition pipeline pushed back through the
// surjection.

#pragma once

#include "qglevy/levy.hpp"

namespace qglevy {

// pi_hat := pi o t_N as an SU_q(N+1) representation: the U block in the
// upper corner, D^-1 in the lower corner.
MatRep lift_rep_to_suq(const MatRep& rep);

// psi_hat := psi o t_N on SU_q(N+1).
Functional lift_functional_to_suq(const Functional& psi, int N, std::optional<Rat> q0);

// Word-level section of t_N: u_jk -> u_jk, D^-1 -> u_{N+1,N+1}; satisfies
// t_N(section(a)) = a.
AlgElt uq_section(const AlgElt& a);

// An SU_q(N) representation viewed as a U_q(N) representation through
// t_breve_N (D^-1 acts as the identity).
MatRep uq_rep_from_suq(const MatRep& rep);

struct UqHunt {
  AlgebraCtx uq;            // U_q(N)
  AlgebraCtx suq;           // SU_q(N+1)
  GaussParams gauss;        // N drifts + N x N PSD matrix
  Functional psi_G;         // native U_q gaussian
  HuntDecomposition inner;  // levels on SU_q(n), 2 <= n <= N+1
  double pushback_defect = 0;  // level functionals on ker t_N generators

  Cplx psi_L(const AlgElt& a) const;  // a in U_q(N)
  Cplx psi_total(const AlgElt& a) const;
  Functional total_functional() const;
};

// Runs the SU_q(N+1) pipeline on the lifted representation and pushes the
// level functionals back through the surjectivity of t_N; levels live on
// SU_q(n), hence on U_q(n-1).
UqHunt uq_hunt(const MatRep& pi_uq, const std::vector<LevelSpec>& level_specs,
               const GaussParams& gauss_uq, double tol = 1e-8, const PSchedule& sched = {});

}  // namespace qglevy
