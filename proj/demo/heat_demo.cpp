// Solves 200 heat-equation steps with a few guess methods and prints the
// average PCG iteration count of each.

#include <cstdio>

#include "warmstart.hpp"

int main() {
  using namespace warmstart;

  HeatProblem problem;
  problem.n = 48;
  problem.steps = 200;

  StopCriterion crit;
  crit.epsilon = 1e-8;
  crit.max_iters = StopCriterion::default_max_iters(problem.size());

  for (const char *label : {"LAST", "CLASSIC(8)", "QR(8)", "EXTRAP(2,8)", "SPEXTRAP(2,8)"}) {
    const auto method = MethodSpec::parse(label);
    const auto result = run_simulation(problem, method, crit);
    long long its = 0;
    for (const auto &s : result.steps)
      its += s.stats.iterations;
    const auto pred = predicted_data_ops(method, problem.size());
    std::printf("%-14s %6.2f iterations/step, model %3llu N loads+stores/step\n",
                label, static_cast<double>(its) / problem.steps,
                static_cast<unsigned long long>(pred.total / problem.size()));
  }

  // Coefficients of a degree-2 least-squares fit through 8 past solutions.
  const auto ls = make_scheme(SchemeKind::LeastSquares, 2, 8);
  std::printf("EXTRAP(2,8) beta:");
  for (double b : ls.beta)
    std::printf(" %.4f", b);
  std::printf("  (Lebesgue constant %.3f)\n", lebesgue_constant(ls.beta));
}
