#include "oswr/assembly.hpp"

#include <array>
#include <cmath>
#include <sstream>

#include "oswr/error.hpp"
#include "oswr/time_basis.hpp"

namespace oswr {

namespace {

using Triplets = std::vector<Eigen::Triplet<double>>;

/// Quadrature data of one element: points, weights, basis values and
/// (constant) basis gradients.
struct ElementQuad {
  int nv = 0;
  int nq = 0;
  std::array<std::array<double, 2>, 3> x{};
  std::array<double, 3> w{};
  std::array<std::array<double, 3>, 3> phi{};  // phi[q][a]
  std::array<std::array<double, 2>, 3> grad{};  // grad[a]
};

ElementQuad element_quad(const Mesh &m, std::size_t e) {
  ElementQuad eq;
  const auto &el = m.elements[e];
  if (m.dim == 1) {
    const double x0 = m.nodes[el[0]][0];
    const double x1 = m.nodes[el[1]][0];
    const double h = x1 - x0;
    const GaussRule &g = gauss_legendre(2);
    eq.nv = 2;
    eq.nq = 2;
    for (int q = 0; q < 2; ++q) {
      const double s = 0.5 * (g.nodes[q] + 1.0);
      eq.x[q] = {x0 + s * h, 0.0};
      eq.w[q] = 0.5 * h * g.weights[q];
      eq.phi[q] = {1.0 - s, s, 0.0};
    }
    eq.grad[0] = {-1.0 / h, 0.0};
    eq.grad[1] = {1.0 / h, 0.0};
    return eq;
  }
  const auto &p0 = m.nodes[el[0]];
  const auto &p1 = m.nodes[el[1]];
  const auto &p2 = m.nodes[el[2]];
  const double det = (p1[0] - p0[0]) * (p2[1] - p0[1]) - (p2[0] - p0[0]) * (p1[1] - p0[1]);
  const double area = 0.5 * det;
  if (!(area > 0.0)) throw ValidationError("nonpositive element measure");
  eq.nv = 3;
  eq.nq = 3;
  eq.grad[0] = {(p1[1] - p2[1]) / det, (p2[0] - p1[0]) / det};
  eq.grad[1] = {(p2[1] - p0[1]) / det, (p0[0] - p2[0]) / det};
  eq.grad[2] = {(p0[1] - p1[1]) / det, (p1[0] - p0[0]) / det};
  // Edge midpoints (01), (12), (20).
  const std::array<std::array<int, 2>, 3> edges = {{{0, 1}, {1, 2}, {2, 0}}};
  const std::array<const std::array<double, 2> *, 3> p = {&p0, &p1, &p2};
  for (int q = 0; q < 3; ++q) {
    const int a = edges[q][0];
    const int b = edges[q][1];
    eq.x[q] = {0.5 * ((*p[a])[0] + (*p[b])[0]), 0.5 * ((*p[a])[1] + (*p[b])[1])};
    eq.w[q] = area / 3.0;
    eq.phi[q] = {0.0, 0.0, 0.0};
    eq.phi[q][a] = 0.5;
    eq.phi[q][b] = 0.5;
  }
  return eq;
}

template <class F>
void for_elements(const Mesh &m, ElementSet elements, F &&body) {
  if (elements) {
    for (int e : *elements) body(static_cast<std::size_t>(e));
  } else {
    for (std::size_t e = 0; e < m.num_elements(); ++e) body(e);
  }
}

std::vector<char> element_mask(const Mesh &m, ElementSet elements) {
  std::vector<char> mask(m.num_elements(), elements ? 0 : 1);
  if (elements) {
    for (int e : *elements) mask[static_cast<std::size_t>(e)] = 1;
  }
  return mask;
}

SparseMatrix from_triplets(Eigen::Index rows, Eigen::Index cols, const Triplets &t) {
  SparseMatrix m(rows, cols);
  m.setFromTriplets(t.begin(), t.end());
  return m;
}

std::string where(double x, double y) {
  std::ostringstream os;
  os << "(" << x << ", " << y << ")";
  return os.str();
}

/// Points and weights of a 3-point Gauss rule on a boundary face, with the
/// values of the face's two nodal basis functions.
struct FaceQuad {
  int nq = 0;
  std::array<std::array<double, 2>, 3> x{};
  std::array<double, 3> w{};
  std::array<std::array<double, 2>, 3> phi{};
};

FaceQuad face_quad(const Mesh &m, const BoundaryFace &f) {
  FaceQuad fq;
  const auto &a = m.nodes[f.nodes[0]];
  if (f.nodes[1] < 0) {
    fq.nq = 1;
    fq.x[0] = a;
    fq.w[0] = 1.0;
    fq.phi[0] = {1.0, 0.0};
    return fq;
  }
  const auto &b = m.nodes[f.nodes[1]];
  const double len = std::hypot(b[0] - a[0], b[1] - a[1]);
  const GaussRule &g = gauss_legendre(3);
  fq.nq = 3;
  for (int q = 0; q < 3; ++q) {
    const double s = 0.5 * (g.nodes[q] + 1.0);
    fq.x[q] = {a[0] + s * (b[0] - a[0]), a[1] + s * (b[1] - a[1])};
    fq.w[q] = 0.5 * len * g.weights[q];
    fq.phi[q] = {1.0 - s, s};
  }
  return fq;
}

}  // namespace

Coefficients Coefficients::of(const SubdomainSpec &s) {
  return Coefficients{s.nu, s.bx, s.by, s.c, s.omega};
}

SparseMatrix assemble_mass(const FemSpace &space, const Expression &omega,
                           const std::map<int, double> &interface_q, ElementSet elements) {
  const Mesh &m = space.mesh;
  Triplets t;
  const bool constant = omega.is_constant();
  const double w0 = constant ? omega(0.0) : 0.0;
  for_elements(m, elements, [&](std::size_t e) {
    const ElementQuad eq = element_quad(m, e);
    const auto &el = m.elements[e];
    for (int q = 0; q < eq.nq; ++q) {
      const double om = constant ? w0 : omega(eq.x[q][0], eq.x[q][1]);
      if (!(om > 0.0)) {
        throw ValidationError("nonpositive porosity at " + where(eq.x[q][0], eq.x[q][1]));
      }
      for (int a = 0; a < eq.nv; ++a) {
        for (int b = 0; b < eq.nv; ++b) {
          const double v = eq.w[q] * om * eq.phi[q][a] * eq.phi[q][b];
          if (v != 0.0) t.emplace_back(el[a], el[b], v);
        }
      }
    }
  });
  const auto n = static_cast<Eigen::Index>(space.ndofs());
  SparseMatrix mass = from_triplets(n, n, t);
  for (const auto &[id, q] : interface_q) {
    if (q == 0.0 || !space.has_interface(id)) continue;
    TransmissionSpec unit;
    unit.p = 0.0;
    const InterfaceOperators ops = assemble_interface_ops(space, id, unit, Coefficients{});
    mass += q * extend(ops.M_gamma, ops.dofs, n);
  }
  return mass;
}

SparseMatrix assemble_advection(const FemSpace &space, const Coefficients &k,
                                ElementSet elements) {
  const Mesh &m = space.mesh;
  Triplets t;
  for_elements(m, elements, [&](std::size_t e) {
    const ElementQuad eq = element_quad(m, e);
    const auto &el = m.elements[e];
    for (int q = 0; q < eq.nq; ++q) {
      const double x = eq.x[q][0], y = eq.x[q][1];
      const double bx = k.bx(x, y);
      const double by = m.dim == 2 ? k.by(x, y) : 0.0;
      for (int a = 0; a < eq.nv; ++a) {
        const double bga = bx * eq.grad[a][0] + by * eq.grad[a][1];
        for (int b = 0; b < eq.nv; ++b) {
          const double bgb = bx * eq.grad[b][0] + by * eq.grad[b][1];
          // row a (test), column b (trial)
          const double v = 0.5 * eq.w[q] * (bgb * eq.phi[q][a] - bga * eq.phi[q][b]);
          if (v != 0.0) t.emplace_back(el[a], el[b], v);
        }
      }
    }
  });
  const auto n = static_cast<Eigen::Index>(space.ndofs());
  return from_triplets(n, n, t);
}

SparseMatrix assemble_atilde(const FemSpace &space, const Coefficients &k, ElementSet elements) {
  const Mesh &m = space.mesh;
  Expression divb = k.bx.derivative(Variable::x);
  if (m.dim == 2) divb = divb + k.by.derivative(Variable::y);
  const Expression shift = k.c + Expression::constant(0.5) * divb;
  Triplets t;
  for_elements(m, elements, [&](std::size_t e) {
    const ElementQuad eq = element_quad(m, e);
    const auto &el = m.elements[e];
    for (int q = 0; q < eq.nq; ++q) {
      const double x = eq.x[q][0], y = eq.x[q][1];
      const double nu = k.nu(x, y);
      if (!(nu >= 0.0)) throw ValidationError("negative diffusion at " + where(x, y));
      const double bx = k.bx(x, y);
      const double by = m.dim == 2 ? k.by(x, y) : 0.0;
      const double r = shift(x, y);
      for (int a = 0; a < eq.nv; ++a) {
        const double bga = bx * eq.grad[a][0] + by * eq.grad[a][1];
        for (int b = 0; b < eq.nv; ++b) {
          const double bgb = bx * eq.grad[b][0] + by * eq.grad[b][1];
          const double gg = eq.grad[a][0] * eq.grad[b][0] + eq.grad[a][1] * eq.grad[b][1];
          const double v =
              eq.w[q] * (0.5 * (bgb * eq.phi[q][a] - bga * eq.phi[q][b]) + nu * gg +
                         r * eq.phi[q][a] * eq.phi[q][b]);
          if (v != 0.0) t.emplace_back(el[a], el[b], v);
        }
      }
    }
  });
  const auto n = static_cast<Eigen::Index>(space.ndofs());
  return from_triplets(n, n, t);
}

SparseMatrix assemble_stiffness(const FemSpace &space, ElementSet elements) {
  const Mesh &m = space.mesh;
  Triplets t;
  for_elements(m, elements, [&](std::size_t e) {
    const ElementQuad eq = element_quad(m, e);
    const auto &el = m.elements[e];
    const double meas = m.element_measure(e);
    for (int a = 0; a < eq.nv; ++a) {
      for (int b = 0; b < eq.nv; ++b) {
        const double gg = eq.grad[a][0] * eq.grad[b][0] + eq.grad[a][1] * eq.grad[b][1];
        t.emplace_back(el[a], el[b], meas * gg);
      }
    }
  });
  const auto n = static_cast<Eigen::Index>(space.ndofs());
  return from_triplets(n, n, t);
}

SparseMatrix assemble_exterior_closure(const FemSpace &space, const Coefficients &k, double p_ext,
                                       ElementSet elements) {
  const Mesh &m = space.mesh;
  const auto mask = element_mask(m, elements);
  Triplets t;
  for (const auto &f : m.faces) {
    if (f.neighbour != 0 || !mask[static_cast<std::size_t>(f.element)]) continue;
    const FaceQuad fq = face_quad(m, f);
    const int nv = f.nodes[1] < 0 ? 1 : 2;
    for (int q = 0; q < fq.nq; ++q) {
      const double x = fq.x[q][0], y = fq.x[q][1];
      const double bn = k.bx(x, y) * f.normal[0] + (m.dim == 2 ? k.by(x, y) * f.normal[1] : 0.0);
      const double coef = p_ext - 0.5 * bn;
      for (int a = 0; a < nv; ++a) {
        for (int b = 0; b < nv; ++b) {
          t.emplace_back(f.nodes[a], f.nodes[b], fq.w[q] * coef * fq.phi[q][a] * fq.phi[q][b]);
        }
      }
    }
  }
  const auto n = static_cast<Eigen::Index>(space.ndofs());
  return from_triplets(n, n, t);
}

SparseMatrix InterfaceOperators::static_block() const {
  return M_pbn + q * B_r + K_s;
}

InterfaceOperators assemble_interface_ops(const FemSpace &space, int neighbour,
                                          const TransmissionSpec &params, const Coefficients &k) {
  const InterfaceDofs &itf = space.interface(neighbour);
  const Mesh &m = space.mesh;
  InterfaceOperators ops;
  ops.neighbour = neighbour;
  ops.dofs = itf.dofs;
  ops.coords = itf.coords;
  ops.p = params.p;
  ops.q = params.q;

  std::map<int, int> local;
  for (std::size_t i = 0; i < itf.dofs.size(); ++i) local[itf.dofs[i]] = static_cast<int>(i);

  Triplets mg, mpbn, mbn, br, ks;
  const double qs = params.q * params.s;
  for (int fi : itf.faces) {
    const BoundaryFace &f = m.faces[static_cast<std::size_t>(fi)];
    const FaceQuad fq = face_quad(m, f);
    const int nv = f.nodes[1] < 0 ? 1 : 2;
    std::array<int, 2> li{local.at(f.nodes[0]), nv == 2 ? local.at(f.nodes[1]) : -1};
    std::array<double, 2> dtau{0.0, 0.0};
    if (nv == 2) {
      const double dt = m.nodes[f.nodes[1]][itf.axis] - m.nodes[f.nodes[0]][itf.axis];
      dtau = {-1.0 / dt, 1.0 / dt};
    }
    for (int q = 0; q < fq.nq; ++q) {
      const double x = fq.x[q][0], y = fq.x[q][1];
      const double bn = k.bx(x, y) * f.normal[0] + (m.dim == 2 ? k.by(x, y) * f.normal[1] : 0.0);
      const double r = nv == 2 ? params.r(x, y) : 0.0;
      const double w = fq.w[q];
      for (int a = 0; a < nv; ++a) {
        for (int b = 0; b < nv; ++b) {
          const double pp = w * fq.phi[q][a] * fq.phi[q][b];
          mg.emplace_back(li[a], li[b], pp);
          mbn.emplace_back(li[a], li[b], bn * pp);
          mpbn.emplace_back(li[a], li[b], (params.p - 0.5 * bn) * pp);
          if (nv == 2) {
            // row a tests with psi_a, column b is the trial phi_b
            br.emplace_back(li[a], li[b], -w * r * fq.phi[q][b] * dtau[a]);
            ks.emplace_back(li[a], li[b], w * qs * dtau[a] * dtau[b]);
          }
        }
      }
    }
  }
  const auto n = static_cast<Eigen::Index>(itf.dofs.size());
  ops.M_gamma = from_triplets(n, n, mg);
  ops.M_pbn = from_triplets(n, n, mpbn);
  ops.M_bn = from_triplets(n, n, mbn);
  ops.B_r = from_triplets(n, n, br);
  ops.K_s = from_triplets(n, n, ks);
  return ops;
}

std::vector<Eigen::VectorXd> assemble_load(const FemSpace &space, const Expression &f,
                                           double t_n, double k_n, int d, ElementSet elements) {
  const Mesh &m = space.mesh;
  const auto n = static_cast<Eigen::Index>(space.ndofs());
  std::vector<Eigen::VectorXd> out(static_cast<std::size_t>(d) + 1, Eigen::VectorXd::Zero(n));
  if (f.is_constant() && f(0.0) == 0.0) return out;

  auto spatial = [&](double t, Eigen::VectorXd &acc, double scale) {
    for_elements(m, elements, [&](std::size_t e) {
      const ElementQuad eq = element_quad(m, e);
      const auto &el = m.elements[e];
      for (int q = 0; q < eq.nq; ++q) {
        const double fv = f(Point{eq.x[q][0], eq.x[q][1], t});
        for (int a = 0; a < eq.nv; ++a) acc[el[a]] += scale * eq.w[q] * fv * eq.phi[q][a];
      }
    });
  };

  if (!f.depends_on(Variable::t)) {
    spatial(0.0, out[0], k_n);
    return out;
  }
  const GaussRule &g = gauss_legendre(4);
  for (std::size_t q = 0; q < g.nodes.size(); ++q) {
    const double t = t_n + 0.5 * k_n * (g.nodes[q] + 1.0);
    Eigen::VectorXd v = Eigen::VectorXd::Zero(n);
    spatial(t, v, 0.5 * k_n * g.weights[q]);
    for (int j = 0; j <= d; ++j) out[j] += legendre(j, g.nodes[q]) * v;
  }
  return out;
}

SparseMatrix assemble_segment_mass(const Mesh &mesh, int tangent_axis, double position, double lo,
                                   double hi,
                                   const std::function<double(double, double)> &weight) {
  const auto n = static_cast<Eigen::Index>(mesh.num_nodes());
  Triplets t;
  auto find_line = [&](const std::vector<double> &lines) {
    for (std::size_t i = 0; i < lines.size(); ++i) {
      if (std::abs(lines[i] - position) <= 1e-12 * std::max(1.0, std::abs(position))) return i;
    }
    throw ValidationError("segment does not lie on a mesh line");
  };
  if (mesh.dim == 1) {
    const std::size_t i = find_line(mesh.xs);
    t.emplace_back(static_cast<int>(i), static_cast<int>(i), weight(mesh.xs[i], 0.0));
    return from_triplets(n, n, t);
  }
  const std::size_t line = find_line(tangent_axis == 1 ? mesh.xs : mesh.ys);
  const std::vector<double> &along = tangent_axis == 1 ? mesh.ys : mesh.xs;
  const GaussRule &g = gauss_legendre(3);
  const double tol = 1e-12 * std::max(1.0, hi - lo);
  for (std::size_t s = 0; s + 1 < along.size(); ++s) {
    const double a = along[s], b = along[s + 1];
    if (a < lo - tol || b > hi + tol) continue;
    const int na = tangent_axis == 1 ? mesh.node_index(line, s) : mesh.node_index(s, line);
    const int nb = tangent_axis == 1 ? mesh.node_index(line, s + 1) : mesh.node_index(s + 1, line);
    for (std::size_t q = 0; q < g.nodes.size(); ++q) {
      const double u = 0.5 * (g.nodes[q] + 1.0);
      const double tau = a + u * (b - a);
      const double x = tangent_axis == 1 ? position : tau;
      const double y = tangent_axis == 1 ? tau : position;
      const double w = 0.5 * (b - a) * g.weights[q] * weight(x, y);
      const double pa = 1.0 - u, pb = u;
      t.emplace_back(na, na, w * pa * pa);
      t.emplace_back(na, nb, w * pa * pb);
      t.emplace_back(nb, na, w * pb * pa);
      t.emplace_back(nb, nb, w * pb * pb);
    }
  }
  return from_triplets(n, n, t);
}

SparseMatrix extend(const SparseMatrix &block, const std::vector<int> &dofs, Eigen::Index n) {
  Triplets t;
  for (int k = 0; k < block.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(block, k); it; ++it) {
      t.emplace_back(dofs[static_cast<std::size_t>(it.row())],
                     dofs[static_cast<std::size_t>(it.col())], it.value());
    }
  }
  return from_triplets(n, n, t);
}

Eigen::VectorXd interpolate(const FemSpace &space, const Expression &u, double t) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(space.ndofs()));
  for (std::size_t i = 0; i < space.ndofs(); ++i) {
    const auto &p = space.mesh.nodes[i];
    v[static_cast<Eigen::Index>(i)] = u(Point{p[0], p[1], t});
  }
  return v;
}

}  // namespace oswr
