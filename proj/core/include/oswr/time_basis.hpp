#ifndef OSWR_TIME_BASIS_HPP_
#define OSWR_TIME_BASIS_HPP_

#include <array>
#include <cstddef>
#include <functional>
#include <vector>

namespace oswr {

/// Highest supported DG degree in time.
inline constexpr int kMaxDegree = 1;

/// Breakpoints t_0 < t_1 < ... < t_N of one time window.
class TimePartition {
 public:
  TimePartition() = default;
  explicit TimePartition(std::vector<double> breakpoints);

  static TimePartition uniform(double t_start, double t_end, int intervals);

  std::size_t intervals() const { return t_.empty() ? 0 : t_.size() - 1; }
  double start() const { return t_.front(); }
  double end() const { return t_.back(); }
  double operator[](std::size_t n) const { return t_[n]; }
  double length(std::size_t n) const { return t_[n + 1] - t_[n]; }
  double midpoint(std::size_t n) const { return 0.5 * (t_[n] + t_[n + 1]); }
  const std::vector<double> &breakpoints() const { return t_; }

  /// Interval containing t, with intervals taken as (t_n, t_{n+1}]; t_0 maps
  /// to interval 0.
  std::size_t locate(double t) const;

  friend bool operator==(const TimePartition &, const TimePartition &) = default;

 private:
  std::vector<double> t_;
};

/// Legendre polynomial L_j on [-1, 1].
double legendre(int j, double xi);
double legendre_derivative(int j, double xi);

/// Scaled Legendre polynomial L_{n,j}(t) = L_j(2 (t - t_mid) / k_n) on
/// [t_n, t_n + k_n].
double legendre_eval(int j, double t_n, double k_n, double t);

/// Per-interval Legendre tables for DG(d).
struct IntervalBasis {
  int degree = 0;
  double k = 0.0;
  std::array<double, kMaxDegree + 1> norm2{};  ///< ||L_{n,j}||^2 = k/(2j+1)
  /// D[a][b] = int L'_a L_b, A[a][b] = D[a][b] + L_a(t_n^+) L_b(t_n^+).
  std::array<std::array<double, kMaxDegree + 1>, kMaxDegree + 1> D{};
  std::array<std::array<double, kMaxDegree + 1>, kMaxDegree + 1> A{};
};

IntervalBasis build_interval_basis(int d, double k_n);

struct RadauRule {
  std::vector<double> nodes;  ///< on [0, 1], last node is 1
  std::vector<double> weights;
};

RadauRule gauss_radau(int d);

/// n-point Gauss-Legendre rule on [-1, 1], n in 1..4.
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};
const GaussRule &gauss_legendre(int n);

/// Legendre coefficients of the L2 projection of `xi` onto P_d on
/// [t_n, t_n + k_n], by 4-point Gauss quadrature.
std::vector<double> project_interval(const std::function<double(double)> &xi,
                                     double t_n, double k_n, int d);

/// Lifted polynomial I U on one interval: interpolates U at the Radau nodes
/// and equals `left` at t_n. `coeffs` are the P_d Legendre coefficients of U,
/// the result holds d+2 Legendre coefficients. V is a scalar or a vector type
/// with the usual linear operations.
template <class V>
std::vector<V> lift(const std::vector<V> &coeffs, const V &left) {
  if (coeffs.size() == 1) {
    const V &u1 = coeffs[0];
    return {0.5 * (left + u1), 0.5 * (u1 - left)};
  }
  // I U = a + b s + c s^2 with s = (t - t_mid)/k, s^2 = (2 L_2 + 1)/12.
  const V &u0 = coeffs[0];
  const V &u1 = coeffs[1];
  const V a = 0.25 * (5.0 * u0 - u1 - left);
  const V b = u0 + u1 - left;
  const V c = 3.0 * (u1 - u0 + left);
  return {a + c / 12.0, 0.5 * b, c / 6.0};
}

/// P_d Legendre coefficients of d/dt (I U) on an interval of length k.
template <class V>
std::vector<V> lift_derivative(const std::vector<V> &coeffs, const V &left, double k) {
  if (coeffs.size() == 1) return {(coeffs[0] - left) / k};
  const V &u0 = coeffs[0];
  const V &u1 = coeffs[1];
  return {(u0 + u1 - left) / k, 3.0 * (u1 - u0 + left) / k};
}

/// Evaluates a Legendre expansion at t in [t_n, t_n + k_n].
template <class V>
V legendre_sum(const std::vector<V> &coeffs, double t_n, double k_n, double t) {
  V out = coeffs[0] * legendre_eval(0, t_n, k_n, t);
  for (std::size_t j = 1; j < coeffs.size(); ++j) {
    out = out + coeffs[j] * legendre_eval(static_cast<int>(j), t_n, k_n, t);
  }
  return out;
}

}  // namespace oswr

#endif  // OSWR_TIME_BASIS_HPP_
