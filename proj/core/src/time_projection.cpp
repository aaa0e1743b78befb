#include "oswr/time_projection.hpp"

#include <cmath>
#include <string>

#include "oswr/error.hpp"

namespace oswr {

namespace {

using Triplets = std::vector<Eigen::Triplet<double>>;

void check_cover(double a0, double a1, double b0, double b1, const char *what) {
  const double tol = 1e-12 * std::max(a1 - a0, b1 - b0);
  if (std::abs(a0 - b0) > tol || std::abs(a1 - b1) > tol) {
    throw ValidationError(std::string(what) + " do not cover the same interval");
  }
}

}  // namespace

ProjectionMatrices build_projection_matrices(const TimePartition &source,
                                             const TimePartition &target, int d) {
  if (d < 0 || d > kMaxDegree) throw ValidationError("unsupported DG degree " + std::to_string(d));
  if (source.intervals() == 0 || target.intervals() == 0) {
    throw ValidationError("empty time partition");
  }
  check_cover(source.start(), source.end(), target.start(), target.end(), "time partitions");

  const int nb = d + 1;
  std::vector<Triplets> trip(static_cast<std::size_t>(nb * nb));
  const double sliver = 1e-13 * (target.end() - target.start());
  const GaussRule &g = gauss_legendre(2);

  std::size_t m = 0, n = 0;
  while (m < source.intervals() && n < target.intervals()) {
    const double a = std::max(source[m], target[n]);
    const double b = std::min(source[m + 1], target[n + 1]);
    if (b - a > sliver) {
      for (std::size_t q = 0; q < g.nodes.size(); ++q) {
        const double s = 0.5 * (a + b) + 0.5 * (b - a) * g.nodes[q];
        const double w = 0.5 * (b - a) * g.weights[q];
        for (int alpha = 0; alpha < nb; ++alpha) {
          const double ls = legendre_eval(alpha, source[m], source.length(m), s);
          for (int beta = 0; beta < nb; ++beta) {
            const double lt = legendre_eval(beta, target[n], target.length(n), s);
            trip[static_cast<std::size_t>(alpha * nb + beta)].emplace_back(
                static_cast<int>(n), static_cast<int>(m), w * ls * lt);
          }
        }
      }
    }
    const double es = source[m + 1];
    const double et = target[n + 1];
    if (std::abs(es - et) <= sliver) {
      ++m;
      ++n;
    } else if (es < et) {
      ++m;
    } else {
      ++n;
    }
  }

  ProjectionMatrices out;
  out.degree = d;
  out.source = source;
  out.target = target;
  for (auto &t : trip) {
    SparseMatrix mat(static_cast<Eigen::Index>(target.intervals()),
                     static_cast<Eigen::Index>(source.intervals()));
    mat.setFromTriplets(t.begin(), t.end());
    out.blocks.push_back(std::move(mat));
  }
  return out;
}

PiecewiseField apply_projection(const ProjectionMatrices &m, const PiecewiseField &source) {
  if (source.degree != m.degree || !(source.partition == m.source)) {
    throw ValidationError("trace does not live on the projection source partition");
  }
  const int nb = m.degree + 1;
  PiecewiseField out(m.target, m.degree, source.components());
  for (int beta = 0; beta < nb; ++beta) {
    Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(source.components(),
                                                static_cast<Eigen::Index>(m.target.intervals()));
    for (int alpha = 0; alpha < nb; ++alpha) {
      acc += source.modes[alpha] * m.block(alpha, beta).transpose();
    }
    for (Eigen::Index n = 0; n < acc.cols(); ++n) {
      acc.col(n) *= (2.0 * beta + 1.0) / m.target.length(static_cast<std::size_t>(n));
    }
    out.modes[beta] = std::move(acc);
  }
  return out;
}

SparseMatrix hat_overlap_matrix(const std::vector<double> &target_nodes,
                                const std::vector<double> &source_nodes, bool target_derivative,
                                bool source_derivative,
                                const std::function<double(double)> &weight) {
  if (target_nodes.size() < 2 || source_nodes.size() < 2) {
    throw ValidationError("interface mesh needs at least two nodes");
  }
  check_cover(target_nodes.front(), target_nodes.back(), source_nodes.front(),
              source_nodes.back(), "interface meshes");
  const double sliver = 1e-13 * (target_nodes.back() - target_nodes.front());
  const GaussRule &g = gauss_legendre(3);

  // Value (or derivative) of the local hats of element e at x.
  auto local = [](const std::vector<double> &x, std::size_t e, bool deriv, double s,
                  double out[2]) {
    const double h = x[e + 1] - x[e];
    if (deriv) {
      out[0] = -1.0 / h;
      out[1] = 1.0 / h;
    } else {
      out[1] = (s - x[e]) / h;
      out[0] = 1.0 - out[1];
    }
  };

  Triplets trip;
  std::size_t et = 0, es = 0;
  while (et + 1 < target_nodes.size() && es + 1 < source_nodes.size()) {
    const double a = std::max(target_nodes[et], source_nodes[es]);
    const double b = std::min(target_nodes[et + 1], source_nodes[es + 1]);
    if (b - a > sliver) {
      double acc[2][2] = {{0, 0}, {0, 0}};
      for (std::size_t q = 0; q < g.nodes.size(); ++q) {
        const double s = 0.5 * (a + b) + 0.5 * (b - a) * g.nodes[q];
        double w = 0.5 * (b - a) * g.weights[q];
        if (weight) w *= weight(s);
        double ht[2], hs[2];
        local(target_nodes, et, target_derivative, s, ht);
        local(source_nodes, es, source_derivative, s, hs);
        for (int i = 0; i < 2; ++i) {
          for (int j = 0; j < 2; ++j) acc[i][j] += w * ht[i] * hs[j];
        }
      }
      for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
          trip.emplace_back(static_cast<int>(et) + i, static_cast<int>(es) + j, acc[i][j]);
        }
      }
    }
    const double end_t = target_nodes[et + 1];
    const double end_s = source_nodes[es + 1];
    if (std::abs(end_t - end_s) <= sliver) {
      ++et;
      ++es;
    } else if (end_t < end_s) {
      ++et;
    } else {
      ++es;
    }
  }
  SparseMatrix out(static_cast<Eigen::Index>(target_nodes.size()),
                   static_cast<Eigen::Index>(source_nodes.size()));
  out.setFromTriplets(trip.begin(), trip.end());
  return out;
}

}  // namespace oswr
