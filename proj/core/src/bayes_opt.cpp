#include "rlopt/bayes_opt.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "rlopt/errors.hpp"
#include "rlopt/normal.hpp"

namespace rlopt {
namespace {

constexpr double kInvPhi = 0.6180339887498949;  // (sqrt 5 - 1) / 2
constexpr std::size_t kLineEvaluations = 8;
constexpr double kInitialRadius = 0.1;

// Running argmax over evaluations in the order they are made. Strict
// improvement keeps the earliest of equal values.
struct Incumbent {
  std::vector<double> x;
  double value = -1.0;
  void offer(const std::vector<double>& candidate, double v) {
    if (x.empty() || v > value) {
      x = candidate;
      value = v;
    }
  }
};

class Refiner {
 public:
  Refiner(const GPModel& model, double f_best, std::size_t budget, Incumbent& best)
      : model_(model), f_best_(f_best), budget_(budget), best_(best) {}

  void run(std::vector<double> x, double value) {
    double radius = kInitialRadius;
    while (used_ < budget_) {
      for (std::size_t k = 0; k < x.size() && used_ < budget_; ++k) line_search(x, value, k, radius);
      radius *= 0.5;
    }
  }

 private:
  double eval(std::vector<double>& x) {
    ++used_;
    const double v = expected_improvement_at(model_, x, f_best_);
    best_.offer(x, v);
    return v;
  }

  // Golden-section maximization along coordinate k within x_k +- radius,
  // clipped to [0, 1]. Keeps the move only when it improves on `value`.
  void line_search(std::vector<double>& x, double& value, std::size_t k, double radius) {
    double lo = std::max(0.0, x[k] - radius);
    double hi = std::min(1.0, x[k] + radius);
    std::vector<double> probe = x;
    double c = hi - kInvPhi * (hi - lo);
    double d = lo + kInvPhi * (hi - lo);
    probe[k] = c;
    double fc = eval(probe);
    if (used_ >= budget_) return accept(x, value, k, c, fc);
    probe[k] = d;
    double fd = eval(probe);
    for (std::size_t i = 2; i < kLineEvaluations && used_ < budget_; ++i) {
      if (fc >= fd) {
        hi = d;
        d = c;
        fd = fc;
        c = hi - kInvPhi * (hi - lo);
        probe[k] = c;
        fc = eval(probe);
      } else {
        lo = c;
        c = d;
        fc = fd;
        d = lo + kInvPhi * (hi - lo);
        probe[k] = d;
        fd = eval(probe);
      }
    }
    if (fc >= fd) {
      accept(x, value, k, c, fc);
    } else {
      accept(x, value, k, d, fd);
    }
  }

  static void accept(std::vector<double>& x, double& value, std::size_t k, double coord, double v) {
    if (v > value) {
      x[k] = coord;
      value = v;
    }
  }

  const GPModel& model_;
  double f_best_;
  std::size_t budget_;
  std::size_t used_ = 0;
  Incumbent& best_;
};

}  // namespace

void AcquisitionConfig::validate() const {
  if (n_random_starts == 0) throw UsageError("AcquisitionConfig: n_random_starts must be positive");
  if (refine_iterations == 0) throw UsageError("AcquisitionConfig: refine_iterations must be positive");
}

double expected_improvement(double mean, double std, double f_best) {
  if (std < 0.0) throw UsageError("expected_improvement: negative standard deviation");
  const double gain = mean - f_best;
  if (std == 0.0) return std::max(gain, 0.0);
  const double z = gain / std;
  return std::max(0.0, gain * normal_cdf(z) + std * normal_pdf(z));
}

double expected_improvement_at(const GPModel& model, std::span<const double> x, double f_best) {
  const Posterior p = model.posterior(x);
  return expected_improvement(p.mean, std::sqrt(p.variance), f_best);
}

Candidate propose_next(const GPModel& model, double f_best, const AcquisitionConfig& config, Rng& rng) {
  config.validate();
  const std::size_t d = model.dim();
  if (model.size() == 0) {
    Candidate c;
    c.theta.resize(d);
    for (double& v : c.theta) v = uniform01(rng);
    return c;
  }

  struct Start {
    std::vector<double> x;
    double value;
  };
  std::vector<Start> starts(config.n_random_starts);
  Incumbent best;
  for (auto& s : starts) {
    s.x.resize(d);
    for (double& v : s.x) v = uniform01(rng);
    s.value = expected_improvement_at(model, s.x, f_best);
    best.offer(s.x, s.value);
  }

  // stable_sort keeps sample order among equal EI values.
  std::vector<std::size_t> order(starts.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return starts[a].value > starts[b].value; });
  const std::size_t n_refine = std::min(config.n_local_refine, starts.size());
  for (std::size_t i = 0; i < n_refine; ++i) {
    const Start& s = starts[order[i]];
    Refiner(model, f_best, config.refine_iterations, best).run(s.x, s.value);
  }
  return {best.x, best.value};
}

std::vector<std::vector<double>> latin_hypercube(std::size_t n, std::size_t d, Rng& rng) {
  if (n == 0 || d == 0) throw UsageError("latin_hypercube: n and d must be positive");
  std::vector<std::vector<double>> points(n, std::vector<double>(d));
  std::vector<std::size_t> perm(n);
  for (std::size_t k = 0; k < d; ++k) {
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    // Fisher-Yates with the portable index draw.
    for (std::size_t i = n; i > 1; --i) std::swap(perm[i - 1], perm[uniform_index(rng, i)]);
    for (std::size_t i = 0; i < n; ++i) {
      const double offset = uniform01(rng);
      double v = (static_cast<double>(perm[i]) + offset) / static_cast<double>(n);
      // Rounding can land exactly on the upper stratum edge.
      const double upper = static_cast<double>(perm[i] + 1) / static_cast<double>(n);
      if (v >= upper) v = std::nextafter(upper, 0.0);
      points[i][k] = v;
    }
  }
  return points;
}

}  // namespace rlopt
