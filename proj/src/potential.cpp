#include "invscat/potential.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "invscat/errors.hpp"
#include "invscat/quadrature.hpp"

namespace invscat {

namespace {

double sign(double x) { return (x > 0.0) - (x < 0.0); }

std::vector<double> pchip_slopes(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  std::vector<double> d(n, 0.0);
  if (n < 2) return d;
  std::vector<double> h(n - 1), delta(n - 1);
  for (std::size_t k = 0; k + 1 < n; ++k) {
    h[k] = x[k + 1] - x[k];
    delta[k] = (y[k + 1] - y[k]) / h[k];
  }
  if (n == 2) {
    d[0] = d[1] = delta[0];
    return d;
  }
  for (std::size_t k = 1; k + 1 < n; ++k) {
    if (delta[k - 1] * delta[k] <= 0.0) continue;
    const double w1 = 2.0 * h[k] + h[k - 1];
    const double w2 = h[k] + 2.0 * h[k - 1];
    d[k] = (w1 + w2) / (w1 / delta[k - 1] + w2 / delta[k]);
  }
  auto edge = [](double h0, double h1, double m0, double m1) {
    double dd = ((2.0 * h0 + h1) * m0 - h0 * m1) / (h0 + h1);
    if (sign(dd) != sign(m0)) dd = 0.0;
    else if (sign(m0) != sign(m1) && std::abs(dd) > 3.0 * std::abs(m0)) dd = 3.0 * m0;
    return dd;
  };
  d[0] = edge(h[0], h[1], delta[0], delta[1]);
  d[n - 1] = edge(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
  return d;
}

}  // namespace

RadialPotential::RadialPotential(std::vector<double> radii, std::vector<double> values,
                                 double support)
    : radii_(std::move(radii)), values_(std::move(values)), support_(support) {
  if (!(support_ > 0.0)) throw ValidationError("potential support radius must be positive");
  if (radii_.empty() || radii_.size() != values_.size())
    throw ValidationError("potential grid and values must be non-empty and of equal length");
  for (std::size_t k = 0; k < radii_.size(); ++k) {
    if (!(radii_[k] > 0.0) || radii_[k] > support_ * (1.0 + 1e-12))
      throw ValidationError("potential grid node " + std::to_string(radii_[k]) +
                            " outside (0, a]");
    if (k > 0 && !(radii_[k] > radii_[k - 1]))
      throw ValidationError("potential grid must be strictly increasing");
    if (!std::isfinite(values_[k])) throw ValidationError("potential value is not finite");
  }
  slopes_ = pchip_slopes(radii_, values_);
}

double RadialPotential::operator()(double r) const {
  if (r > support_ || radii_.empty()) return 0.0;
  if (r <= radii_.front()) return values_.front();
  if (r >= radii_.back()) return values_.back();
  const auto it = std::upper_bound(radii_.begin(), radii_.end(), r);
  const std::size_t k = static_cast<std::size_t>(it - radii_.begin()) - 1;
  const double h = radii_[k + 1] - radii_[k];
  const double t = (r - radii_[k]) / h;
  const double t2 = t * t, t3 = t2 * t;
  return (2 * t3 - 3 * t2 + 1) * values_[k] + (t3 - 2 * t2 + t) * h * slopes_[k] +
         (-2 * t3 + 3 * t2) * values_[k + 1] + (t3 - t2) * h * slopes_[k + 1];
}

bool RadialPotential::is_zero() const {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return v == 0.0; });
}

double RadialPotential::integrate(const std::function<double(double)>& f,
                                  int nodes_per_interval) const {
  if (radii_.empty()) return 0.0;
  const auto gl = gauss_legendre(nodes_per_interval, 0.0, 1.0);
  double sum = 0.0;
  auto piece = [&](double lo, double hi) {
    if (!(hi > lo)) return;
    double s = 0.0;
    for (int i = 0; i < nodes_per_interval; ++i) {
      const double r = lo + (hi - lo) * gl.nodes[i];
      s += gl.weights[i] * f(r) * (*this)(r);
    }
    sum += s * (hi - lo);
  };
  piece(0.0, radii_.front());
  for (std::size_t k = 0; k + 1 < radii_.size(); ++k) piece(radii_[k], radii_[k + 1]);
  // Constant continuation from the last node up to the support radius.
  piece(radii_.back(), support_);
  return sum;
}

RadialPotential RadialPotential::scaled(double factor) const {
  std::vector<double> v(values_);
  for (double& x : v) x *= factor;
  return RadialPotential(radii_, std::move(v), support_);
}

RadialPotential make_sampled(const std::function<double(double)>& q, double support,
                             int grid_points) {
  if (grid_points < 2) throw ValidationError("potential grid needs at least two points");
  std::vector<double> r(grid_points), v(grid_points);
  for (int i = 0; i < grid_points; ++i) {
    r[i] = support * (i + 1) / grid_points;
    v[i] = q(r[i]);
  }
  return RadialPotential(std::move(r), std::move(v), support);
}

RadialPotential make_zero_potential(double support) {
  return make_sampled([](double) { return 0.0; }, support, 2);
}

RadialPotential make_square_well(double v0, double support, int grid_points) {
  return make_sampled([v0](double) { return v0; }, support, grid_points);
}

RadialPotential make_truncated_gaussian(double v0, double width, double support,
                                        int grid_points) {
  if (!(width > 0.0)) throw ValidationError("gaussian width must be positive");
  return make_sampled([=](double r) { return v0 * std::exp(-(r / width) * (r / width)); },
                      support, grid_points);
}

RadialPotential make_piecewise_linear(const std::vector<std::pair<double, double>>& knots,
                                      double support, int grid_points) {
  if (knots.size() < 2) throw ValidationError("piecewise linear potential needs two knots");
  for (std::size_t k = 1; k < knots.size(); ++k)
    if (!(knots[k].first > knots[k - 1].first))
      throw ValidationError("piecewise linear knots must be strictly increasing");
  auto f = [&](double r) {
    if (r <= knots.front().first) return knots.front().second;
    if (r >= knots.back().first) return knots.back().second;
    const auto it = std::upper_bound(knots.begin(), knots.end(), r,
                                     [](double x, const auto& k) { return x < k.first; });
    const auto& hi = *it;
    const auto& lo = *(it - 1);
    const double t = (r - lo.first) / (hi.first - lo.first);
    return lo.second + t * (hi.second - lo.second);
  };
  return make_sampled(f, support, grid_points);
}

}  // namespace invscat
