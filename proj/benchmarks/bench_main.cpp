// Micro-benchmarks for the hot paths: normal-form rewriting, relation
// residual scans, subgroup decomposition, and convolution exponentials.
// Plain chrono harness; prints one line per case.

#include <chrono>
#include <iostream>
#include <random>

#include "qglevy/levy.hpp"

using namespace qglevy;
using clk = std::chrono::steady_clock;

namespace {

template <typename F>
void bench(const std::string& name, int iters, F&& body) {
  // one warmup, then the timed loop
  body();
  auto t0 = clk::now();
  for (int i = 0; i < iters; ++i) body();
  double total = std::chrono::duration<double>(clk::now() - t0).count();
  std::cout << name << ": " << (total / iters * 1e3) << " ms/iter (" << iters << " iters)\n";
}

AlgElt random_elt(const AlgebraCtx& ctx, int degree, uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> idx(1, ctx.N);
  std::uniform_int_distribution<int> coef(-3, 3);
  AlgElt e(ctx);
  for (int t = 0; t < 4; ++t) {
    Word w;
    for (int d = 0; d < degree; ++d) w.push_back(GenSym::u(idx(rng), idx(rng)));
    int c = coef(rng);
    e.add_term(w, QCoeff(c == 0 ? 1 : c));
  }
  return e;
}

}  // namespace

int main() {
  const Rat q(1, 2);

  {
    auto ctx = mq_ctx(3);
    std::vector<AlgElt> elts;
    for (uint64_t s = 0; s < 8; ++s) elts.push_back(random_elt(ctx, 5, 100 + s));
    bench("normal_form Mq(3) degree-5 x8", 20, [&] {
      for (const auto& e : elts) normal_form(e, false);
    });
  }
  {
    auto ctx = suq_ctx(3, q);
    std::vector<AlgElt> elts;
    for (uint64_t s = 0; s < 4; ++s) elts.push_back(random_elt(ctx, 4, 200 + s));
    bench("normal_form SUq(3)+det degree-4 x4", 10, [&] {
      for (const auto& e : elts) normal_form(e, true);
    });
  }
  {
    MatRep rep = suq2_irrep(64, q);
    bench("relation_residuals suq2 M=64", 5, [&] { relation_residuals(rep, false); });
  }
  {
    MatRep conv = conv_product(block_embed(suq2_irrep(32, q), 3, 0),
                               block_embed(suq2_irrep(32, q), 3, 1));
    bench("relation_residuals conv 32x32", 3, [&] { relation_residuals(conv, false); });
  }
  {
    auto ctx = suq_ctx(3, q);
    MatRep rep = direct_sum({trivial_rep(ctx, 2),
                             block_embed(suq2_irrep(10, q), 3, 0),
                             conv_product(block_embed(suq2_irrep(10, q), 3, 0),
                                          block_embed(suq2_irrep(10, q), 3, 1))});
    bench("decompose SUq(3) dim-113", 5, [&] { decompose(rep); });
  }
  {
    auto ctx = suq_ctx(2, q);
    auto rep = std::make_shared<MatRep>(suq2_irrep(16, q));
    VectorXcd f = VectorXcd::Zero(16);
    f(0) = 1;
    auto cob = Cocycle::coboundary(rep, f);
    AlgElt a = parse_elt("u*[2,2]*u[2,2] - 1", ctx);
    bench("psi_exact SUq(2) degree-2", 50, [&] { psi_exact(cob, a); });
    VectorXcd corner = cob.gen_value(GenSym::u(2, 2));
    bench("psi_plimit SUq(2) degree-2", 20, [&] { psi_plimit(*rep, corner, a); });
  }
  {
    auto ctx = suq_ctx(2, q);
    Functional drift = eps_prime_functional(2);
    AlgElt a = parse_elt("u[2,2]*u[1,1]", ctx);
    bench("conv_exp drift t=0.1 degree-2", 50, [&] { conv_exp(drift, 0.1, a); });
  }
  return 0;
}
