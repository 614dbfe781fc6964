#include "rydsim/estimate.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>

#include "rydsim/rng.hpp"

namespace rydsim {

namespace {

GaussRule compute_gauss_legendre(int n) {
  GaussRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    // Tricomi initial guess for the i-th root of P_n.
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      // Recurrence for P_n(x) and derivative.
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      pp = n * (x * p1 - p0) / (x * x - 1.0);
      double dx = p1 / pp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    double w = 2.0 / ((1.0 - x * x) * pp * pp);
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  return rule;
}

}  // namespace

const GaussRule& gauss_legendre(int n) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: order must be >= 1");
  static std::mutex mu;
  static std::map<int, GaussRule> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, compute_gauss_legendre(n)).first;
  return it->second;
}

double quadrature(const std::function<double(double)>& f, double a, double b,
                  int n_nodes) {
  if (!(a < b)) throw std::invalid_argument("quadrature: requires a < b");
  if (n_nodes < 2) throw std::invalid_argument("quadrature: need >= 2 nodes");
  const int per_panel = std::min(n_nodes, 16);
  const int panels = std::max(1, n_nodes / per_panel);
  const GaussRule& rule = gauss_legendre(per_panel);
  const double h = (b - a) / panels;
  double total = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double lo = a + p * h;
    const double mid = lo + 0.5 * h;
    double acc = 0.0;
    for (int i = 0; i < per_panel; ++i) {
      const double x = mid + 0.5 * h * rule.nodes[i];
      const double fx = f(x);
      if (!std::isfinite(fx))
        throw std::runtime_error("quadrature: non-finite integrand sample");
      acc += rule.weights[i] * fx;
    }
    total += 0.5 * h * acc;
  }
  return total;
}

double ParamBound::to_internal(double x) const {
  switch (transform) {
    case Transform::Identity:
      return x;
    case Transform::Log:
      return std::log(x - lo);
    case Transform::Logit:
      return std::log((x - lo) / (hi - x));
  }
  return x;
}

double ParamBound::from_internal(double u) const {
  switch (transform) {
    case Transform::Identity:
      return u;
    case Transform::Log:
      return lo + std::exp(u);
    case Transform::Logit: {
      // Guard against overflow far out in the tails.
      if (u > 700.0) return hi;
      if (u < -700.0) return lo;
      double e = std::exp(u);
      return (lo + hi * e) / (1.0 + e);
    }
  }
  return u;
}

namespace {

struct SimplexPoint {
  std::vector<double> u;
  double f = 0.0;
};

double eval_external(const Objective& obj, std::span<const double> u,
                     std::vector<double>& x_scratch) {
  x_scratch.resize(obj.dimension);
  for (int i = 0; i < obj.dimension; ++i)
    x_scratch[i] = obj.bounds[i].from_internal(u[i]);
  return obj.eval(x_scratch);
}

// One Nelder-Mead run from a given internal-coordinate start.
SimplexPoint nelder_mead(const Objective& obj, const std::vector<double>& u0,
                         double tol, int max_iter, int& iters_used,
                         bool& converged) {
  const int n = obj.dimension;
  std::vector<double> x_scratch;
  std::vector<SimplexPoint> s(n + 1);
  s[0].u = u0;
  s[0].f = eval_external(obj, s[0].u, x_scratch);
  for (int i = 0; i < n; ++i) {
    s[i + 1].u = u0;
    s[i + 1].u[i] += (u0[i] != 0.0 ? 0.25 * std::abs(u0[i]) + 0.1 : 0.25);
    s[i + 1].f = eval_external(obj, s[i + 1].u, x_scratch);
  }

  auto order = [&] {
    std::sort(s.begin(), s.end(),
              [](const SimplexPoint& a, const SimplexPoint& b) { return a.f < b.f; });
  };
  order();

  std::vector<double> centroid(n), trial(n);
  converged = false;
  int iter = 0;
  for (; iter < max_iter; ++iter) {
    // Convergence: simplex diameter and value spread both below tolerance.
    double diam = 0.0;
    for (int i = 1; i <= n; ++i)
      for (int k = 0; k < n; ++k)
        diam = std::max(diam, std::abs(s[i].u[k] - s[0].u[k]));
    double spread = std::abs(s[n].f - s[0].f);
    if (diam < tol && spread < tol * (1.0 + std::abs(s[0].f))) {
      converged = true;
      break;
    }

    for (int k = 0; k < n; ++k) {
      double c = 0.0;
      for (int i = 0; i < n; ++i) c += s[i].u[k];
      centroid[k] = c / n;
    }

    auto make_trial = [&](double coef) {
      for (int k = 0; k < n; ++k)
        trial[k] = centroid[k] + coef * (s[n].u[k] - centroid[k]);
      return eval_external(obj, trial, x_scratch);
    };

    double fr = make_trial(-1.0);  // reflection
    if (fr < s[0].f) {
      std::vector<double> refl = trial;
      double fe = make_trial(-2.0);  // expansion
      if (fe < fr) {
        s[n].u = trial;
        s[n].f = fe;
      } else {
        s[n].u = refl;
        s[n].f = fr;
      }
    } else if (fr < s[n - 1].f) {
      s[n].u = trial;
      s[n].f = fr;
    } else {
      double fc = make_trial(fr < s[n].f ? -0.5 : 0.5);  // contraction
      if (fc < std::min(fr, s[n].f)) {
        s[n].u = trial;
        s[n].f = fc;
      } else {
        // Shrink toward the best vertex.
        for (int i = 1; i <= n; ++i) {
          for (int k = 0; k < n; ++k) s[i].u[k] = 0.5 * (s[i].u[k] + s[0].u[k]);
          s[i].f = eval_external(obj, s[i].u, x_scratch);
        }
      }
    }
    order();
  }
  iters_used = iter;
  return s[0];
}

}  // namespace

FitResult minimize(const Objective& obj, std::span<const double> x0, int restarts,
                   double tol, std::uint64_t seed, int max_iter) {
  if (obj.dimension <= 0 || static_cast<int>(obj.bounds.size()) != obj.dimension)
    throw std::invalid_argument("minimize: inconsistent objective dimensions");
  if (static_cast<int>(x0.size()) != obj.dimension)
    throw std::invalid_argument("minimize: x0 dimension mismatch");
  if (restarts < 1) restarts = 1;

  std::vector<double> u0(obj.dimension);
  for (int i = 0; i < obj.dimension; ++i) u0[i] = obj.bounds[i].to_internal(x0[i]);

  FitResult best;
  int total_iters = 0;
  for (int r = 0; r < restarts; ++r) {
    std::vector<double> start = u0;
    if (r > 0) {
      Rng rng(seed_derive(seed, "minimize-restart", static_cast<std::uint64_t>(r)));
      for (auto& u : start) u += 0.5 * rng.normal();
    }
    int iters = 0;
    bool conv = false;
    SimplexPoint pt = nelder_mead(obj, start, tol, max_iter, iters, conv);
    total_iters += iters;
    if (r == 0 || pt.f < best.value) {
      best.value = pt.f;
      best.point.resize(obj.dimension);
      for (int i = 0; i < obj.dimension; ++i)
        best.point[i] = obj.bounds[i].from_internal(pt.u[i]);
      best.converged = conv;
      best.restart_index = r;
    }
  }
  best.iterations = total_iters;
  return best;
}

double poisson_histogram_loglik(std::span<const double> pmf,
                                std::span<const long> hist) {
  double ll = 0.0;
  for (std::size_t n = 0; n < hist.size(); ++n) {
    if (hist[n] == 0) continue;
    double p = n < pmf.size() ? pmf[n] : 0.0;
    ll += static_cast<double>(hist[n]) * std::log(std::max(p, 1e-300));
  }
  return ll;
}

FitResult least_squares_fit(
    const std::function<double(std::span<const double>, double)>& model,
    std::span<const std::pair<double, double>> data, std::span<const double> x0,
    const std::vector<ParamBound>& bounds, int restarts, double tol,
    std::uint64_t seed) {
  if (data.size() < x0.size())
    throw std::invalid_argument("least_squares_fit: underdetermined problem");
  Objective obj;
  obj.dimension = static_cast<int>(x0.size());
  obj.bounds = bounds;
  obj.eval = [&model, data](std::span<const double> params) {
    double ssr = 0.0;
    for (const auto& [x, y] : data) {
      double r = model(params, x) - y;
      ssr += r * r;
    }
    return ssr;
  };
  return minimize(obj, x0, restarts, tol, seed);
}

}  // namespace rydsim
