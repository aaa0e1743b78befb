#include "oswr/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include "oswr/error.hpp"

namespace oswr {

double Mesh::element_measure(std::size_t e) const {
  const auto &el = elements[e];
  const auto &a = nodes[el[0]];
  const auto &b = nodes[el[1]];
  if (dim == 1) return b[0] - a[0];
  const auto &c = nodes[el[2]];
  return 0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]));
}

std::array<double, 2> Mesh::centroid(std::size_t e) const {
  const auto &el = elements[e];
  std::array<double, 2> c{0.0, 0.0};
  const int nv = vertices_per_element();
  for (int v = 0; v < nv; ++v) {
    c[0] += nodes[el[v]][0] / nv;
    c[1] += nodes[el[v]][1] / nv;
  }
  return c;
}

double Mesh::max_spacing() const {
  double h = 0.0;
  for (std::size_t i = 0; i + 1 < xs.size(); ++i) h = std::max(h, xs[i + 1] - xs[i]);
  if (dim == 2) {
    for (std::size_t j = 0; j + 1 < ys.size(); ++j) h = std::max(h, ys[j + 1] - ys[j]);
  }
  return h;
}

std::vector<double> grid_lines(double a, double b, int n) {
  if (n < 1) throw ValidationError("element count must be at least 1");
  std::vector<double> x(static_cast<std::size_t>(n) + 1);
  for (int i = 0; i <= n; ++i) x[i] = a + (b - a) * i / n;
  x.back() = b;
  return x;
}

Mesh build_mesh(const Box &box, int nx, int ny) {
  if (box.x1 <= box.x0 || (box.dim == 2 && box.y1 <= box.y0)) {
    throw ValidationError("degenerate box");
  }
  if (box.dim == 1) return build_rectilinear_mesh(grid_lines(box.x0, box.x1, nx), {});
  return build_rectilinear_mesh(grid_lines(box.x0, box.x1, nx), grid_lines(box.y0, box.y1, ny));
}

Mesh build_rectilinear_mesh(std::vector<double> xs, std::vector<double> ys) {
  Mesh m;
  if (xs.size() < 2) throw ValidationError("mesh needs at least one cell per axis");
  m.dim = ys.empty() ? 1 : 2;
  if (m.dim == 2 && ys.size() < 2) throw ValidationError("mesh needs at least one cell per axis");
  if (m.dim == 1) ys = {0.0};
  m.xs = std::move(xs);
  m.ys = std::move(ys);
  const std::size_t nx = m.xs.size() - 1;
  const std::size_t ny = m.ys.size() - 1;

  for (double y : m.ys) {
    for (double x : m.xs) m.nodes.push_back({x, y});
  }

  if (m.dim == 1) {
    for (std::size_t i = 0; i < nx; ++i) {
      m.elements.push_back({static_cast<int>(i), static_cast<int>(i + 1), -1});
    }
    m.faces.push_back({{0, -1}, 0, {-1.0, 0.0}, 0});
    m.faces.push_back({{static_cast<int>(nx), -1}, static_cast<int>(nx - 1), {1.0, 0.0}, 0});
    return m;
  }

  for (std::size_t j = 0; j < ny; ++j) {
    for (std::size_t i = 0; i < nx; ++i) {
      const int a = m.node_index(i, j);
      const int b = m.node_index(i + 1, j);
      const int c = m.node_index(i + 1, j + 1);
      const int d = m.node_index(i, j + 1);
      const int lower = static_cast<int>(m.elements.size());
      m.elements.push_back({a, b, c});
      m.elements.push_back({a, c, d});
      if (j == 0) m.faces.push_back({{a, b}, lower, {0.0, -1.0}, 0});
      if (i == nx - 1) m.faces.push_back({{b, c}, lower, {1.0, 0.0}, 0});
      if (j == ny - 1) m.faces.push_back({{c, d}, lower + 1, {0.0, 1.0}, 0});
      if (i == 0) m.faces.push_back({{d, a}, lower + 1, {-1.0, 0.0}, 0});
    }
  }
  return m;
}

void tag_interfaces(Mesh &mesh, const std::vector<std::pair<int, Box>> &neighbours) {
  for (auto &f : mesh.faces) {
    double x = mesh.nodes[f.nodes[0]][0];
    double y = mesh.nodes[f.nodes[0]][1];
    if (f.nodes[1] >= 0) {
      x = 0.5 * (x + mesh.nodes[f.nodes[1]][0]);
      y = 0.5 * (y + mesh.nodes[f.nodes[1]][1]);
    }
    f.neighbour = 0;
    for (const auto &[id, box] : neighbours) {
      const double tol = 1e-12 * std::max(1.0, box.x1 - box.x0);
      if (box.contains(x, y, tol)) {
        f.neighbour = id;
        break;
      }
    }
  }
}

const InterfaceDofs &FemSpace::interface(int neighbour) const {
  for (const auto &i : interfaces) {
    if (i.neighbour == neighbour) return i;
  }
  throw ValidationError("no interface with subdomain " + std::to_string(neighbour));
}

bool FemSpace::has_interface(int neighbour) const {
  return std::any_of(interfaces.begin(), interfaces.end(),
                     [&](const InterfaceDofs &i) { return i.neighbour == neighbour; });
}

FemSpace make_space(Mesh mesh) {
  FemSpace s;
  s.mesh = std::move(mesh);
  std::map<int, InterfaceDofs> by_id;
  for (std::size_t fi = 0; fi < s.mesh.faces.size(); ++fi) {
    const auto &f = s.mesh.faces[fi];
    if (f.neighbour == 0) continue;
    auto &itf = by_id[f.neighbour];
    if (itf.faces.empty()) {
      itf.neighbour = f.neighbour;
      itf.normal = f.normal;
      itf.axis = s.mesh.dim == 1 ? -1 : (std::abs(f.normal[0]) > 0.5 ? 1 : 0);
    } else if (itf.normal != f.normal) {
      throw ValidationError("interface with subdomain " + std::to_string(f.neighbour) +
                            " is not flat");
    }
    itf.faces.push_back(static_cast<int>(fi));
    for (int v : f.nodes) {
      if (v >= 0) itf.dofs.push_back(v);
    }
  }
  for (auto &[id, itf] : by_id) {
    const int axis = itf.axis;
    auto coord = [&](int v) { return axis < 0 ? 0.0 : s.mesh.nodes[v][axis]; };
    std::sort(itf.dofs.begin(), itf.dofs.end(),
              [&](int a, int b) { return coord(a) < coord(b) || (coord(a) == coord(b) && a < b); });
    itf.dofs.erase(std::unique(itf.dofs.begin(), itf.dofs.end()), itf.dofs.end());
    for (int v : itf.dofs) itf.coords.push_back(coord(v));
    s.interfaces.push_back(std::move(itf));
  }
  return s;
}

}  // namespace oswr
