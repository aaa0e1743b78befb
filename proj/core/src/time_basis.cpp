#include "oswr/time_basis.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "oswr/error.hpp"

namespace oswr {

TimePartition::TimePartition(std::vector<double> breakpoints) : t_(std::move(breakpoints)) {
  if (t_.size() < 2) throw ValidationError("time partition needs at least one interval");
  for (std::size_t n = 0; n + 1 < t_.size(); ++n) {
    if (!(t_[n + 1] > t_[n])) {
      throw ValidationError("time partition breakpoints must be strictly increasing");
    }
  }
}

TimePartition TimePartition::uniform(double t_start, double t_end, int intervals) {
  if (intervals < 1) throw ValidationError("time partition needs at least one interval");
  std::vector<double> t(static_cast<std::size_t>(intervals) + 1);
  const double k = (t_end - t_start) / intervals;
  for (int n = 0; n <= intervals; ++n) t[n] = t_start + n * k;
  t.back() = t_end;
  return TimePartition(std::move(t));
}

std::size_t TimePartition::locate(double t) const {
  // First breakpoint >= t closes the interval (t_{n}, t_{n+1}].
  auto it = std::lower_bound(t_.begin() + 1, t_.end(), t);
  if (it == t_.end()) return intervals() - 1;
  return static_cast<std::size_t>(it - t_.begin()) - 1;
}

double legendre(int j, double xi) {
  switch (j) {
    case 0: return 1.0;
    case 1: return xi;
    case 2: return 0.5 * (3.0 * xi * xi - 1.0);
    case 3: return 0.5 * xi * (5.0 * xi * xi - 3.0);
    default: break;
  }
  double p0 = 1.0, p1 = xi;
  for (int m = 1; m < j; ++m) {
    const double p2 = ((2 * m + 1) * xi * p1 - m * p0) / (m + 1);
    p0 = p1;
    p1 = p2;
  }
  return p1;
}

double legendre_derivative(int j, double xi) {
  switch (j) {
    case 0: return 0.0;
    case 1: return 1.0;
    case 2: return 3.0 * xi;
    case 3: return 0.5 * (15.0 * xi * xi - 3.0);
    default: break;
  }
  // (1 - xi^2) P'_j = j (P_{j-1} - xi P_j), valid off the endpoints.
  if (std::abs(xi) == 1.0) {
    return std::pow(xi, j - 1) * 0.5 * j * (j + 1);
  }
  return j * (legendre(j - 1, xi) - xi * legendre(j, xi)) / (1.0 - xi * xi);
}

double legendre_eval(int j, double t_n, double k_n, double t) {
  return legendre(j, 2.0 * (t - t_n) / k_n - 1.0);
}

IntervalBasis build_interval_basis(int d, double k_n) {
  if (d < 0 || d > kMaxDegree) {
    throw ValidationError("unsupported DG degree " + std::to_string(d));
  }
  if (!(k_n > 0.0)) throw ValidationError("interval length must be positive");
  IntervalBasis b;
  b.degree = d;
  b.k = k_n;
  for (int j = 0; j <= d; ++j) {
    b.norm2[j] = k_n / (2 * j + 1);
    for (int k = 0; k <= d; ++k) {
      const double sign = ((k + j) % 2 == 0) ? 1.0 : -1.0;
      b.D[k][j] = k <= j ? 0.0 : 1.0 - sign;
      b.A[k][j] = k <= j ? sign : 1.0;
    }
  }
  return b;
}

RadauRule gauss_radau(int d) {
  switch (d) {
    case 0: return {{1.0}, {1.0}};
    case 1: return {{1.0 / 3.0, 1.0}, {0.75, 0.25}};
    default: throw ValidationError("unsupported DG degree " + std::to_string(d));
  }
}

const GaussRule &gauss_legendre(int n) {
  static const GaussRule rules[4] = {
      {{0.0}, {2.0}},
      {{-1.0 / std::sqrt(3.0), 1.0 / std::sqrt(3.0)}, {1.0, 1.0}},
      {{-std::sqrt(0.6), 0.0, std::sqrt(0.6)}, {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0}},
      {{-std::sqrt(3.0 / 7.0 + 2.0 / 7.0 * std::sqrt(1.2)),
        -std::sqrt(3.0 / 7.0 - 2.0 / 7.0 * std::sqrt(1.2)),
        std::sqrt(3.0 / 7.0 - 2.0 / 7.0 * std::sqrt(1.2)),
        std::sqrt(3.0 / 7.0 + 2.0 / 7.0 * std::sqrt(1.2))},
       {(18.0 - std::sqrt(30.0)) / 36.0, (18.0 + std::sqrt(30.0)) / 36.0,
        (18.0 + std::sqrt(30.0)) / 36.0, (18.0 - std::sqrt(30.0)) / 36.0}},
  };
  if (n < 1 || n > 4) throw Error("Gauss-Legendre rule with " + std::to_string(n) + " points");
  return rules[n - 1];
}

std::vector<double> project_interval(const std::function<double(double)> &xi,
                                     double t_n, double k_n, int d) {
  if (d < 0 || d > kMaxDegree) {
    throw ValidationError("unsupported DG degree " + std::to_string(d));
  }
  const GaussRule &g = gauss_legendre(4);
  std::vector<double> out(static_cast<std::size_t>(d) + 1, 0.0);
  for (std::size_t q = 0; q < g.nodes.size(); ++q) {
    const double t = t_n + 0.5 * k_n * (g.nodes[q] + 1.0);
    const double v = xi(t);
    for (int j = 0; j <= d; ++j) out[j] += 0.5 * g.weights[q] * legendre(j, g.nodes[q]) * v;
  }
  // (2j+1)/k * int = (2j+1)/2 * sum over the reference interval
  for (int j = 0; j <= d; ++j) out[j] *= (2 * j + 1);
  return out;
}

}  // namespace oswr
