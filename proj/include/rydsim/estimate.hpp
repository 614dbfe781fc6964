#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <utility>
#include <vector>

namespace rydsim {

// Gauss-Legendre nodes and weights on [-1, 1]. Computed by Newton iteration
// on the Legendre polynomial and cached per order.
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};
const GaussRule& gauss_legendre(int n);

// Composite Gauss-Legendre quadrature of f over [a, b]. n_nodes is the total
// node budget, split into panels of 16-point rules (a single smaller rule is
// used when n_nodes < 16). Throws if the integrand returns a non-finite value.
double quadrature(const std::function<double(double)>& f, double a, double b,
                  int n_nodes);

enum class Transform { Identity, Log, Logit };

// Box constraint plus the internal reparameterization used by the optimizer:
// Log maps (lo, inf) to the real line, Logit maps (lo, hi).
struct ParamBound {
  double lo = 0.0;
  double hi = 0.0;
  Transform transform = Transform::Identity;

  double to_internal(double x) const;
  double from_internal(double u) const;
};

struct Objective {
  int dimension = 0;
  std::function<double(std::span<const double>)> eval;
  std::vector<ParamBound> bounds;  // one per dimension
};

struct FitResult {
  std::vector<double> point;
  double value = 0.0;
  int iterations = 0;
  bool converged = false;
  int restart_index = 0;
};

// Bounded Nelder-Mead in transformed coordinates, best result over perturbed
// restarts (restart 0 starts exactly at x0). Deterministic for a fixed seed.
FitResult minimize(const Objective& obj, std::span<const double> x0,
                   int restarts = 4, double tol = 1e-8,
                   std::uint64_t seed = 0x5eedULL, int max_iter = 4000);

// Multinomial log-likelihood of an observed count histogram under a pmf:
// sum_n hist[n] * ln pmf[n], with probabilities floored at 1e-300. Histogram
// support beyond the pmf support contributes through the same floor.
double poisson_histogram_loglik(std::span<const double> pmf,
                                std::span<const long> hist);

// Sum-of-squares curve fit through minimize(). Throws std::invalid_argument
// when there are fewer data points than parameters.
FitResult least_squares_fit(
    const std::function<double(std::span<const double>, double)>& model,
    std::span<const std::pair<double, double>> data, std::span<const double> x0,
    const std::vector<ParamBound>& bounds, int restarts = 4, double tol = 1e-10,
    std::uint64_t seed = 0x5eedULL);

}  // namespace rydsim
