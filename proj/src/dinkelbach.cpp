#include "sasnet/dinkelbach.hpp"

#include <cmath>
#include <stdexcept>

namespace sasnet {

DinkelbachResult run_dinkelbach(const std::function<DinkelbachStep(double eta)>& solve_inner,
                                double upsilon, int max_iters) {
  DinkelbachResult res;
  double eta = 0.0;
  for (int j = 0; j < max_iters; ++j) {
    const DinkelbachStep step = solve_inner(eta);
    if (step.power <= 0.0) throw std::runtime_error("dinkelbach: inner solver returned P <= 0");
    const double f = step.rate - eta * step.power;
    res.trace.push_back({j, eta, f});
    res.iterations = j + 1;
    res.f_final = f;
    if (std::fabs(f) <= upsilon) {
      res.converged = true;
      res.eta_star = eta;
      return res;
    }
    eta = std::max(eta, step.rate / step.power);
  }
  res.eta_star = eta;
  return res;
}

}  // namespace sasnet
