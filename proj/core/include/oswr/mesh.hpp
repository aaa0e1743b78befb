#ifndef OSWR_MESH_HPP_
#define OSWR_MESH_HPP_

#include <array>
#include <utility>
#include <vector>

#include "oswr/config.hpp"

namespace oswr {

/// Boundary face of a mesh: a node (1D) or an edge (2D).
struct BoundaryFace {
  std::array<int, 2> nodes{-1, -1};  ///< nodes[1] == -1 in 1D
  int element = -1;
  std::array<double, 2> normal{0.0, 0.0};  ///< outward unit normal
  int neighbour = 0;                       ///< 0: exterior, else subdomain id
};

/// Structured simplicial mesh on a rectilinear grid. In 2D each cell
/// (x_i, x_{i+1}) x (y_j, y_{j+1}) is split along its SW-NE diagonal.
struct Mesh {
  int dim = 1;
  std::vector<double> xs;
  std::vector<double> ys;  ///< {0} in 1D
  std::vector<std::array<double, 2>> nodes;
  std::vector<std::array<int, 3>> elements;  ///< third entry unused in 1D
  std::vector<BoundaryFace> faces;

  std::size_t num_nodes() const { return nodes.size(); }
  std::size_t num_elements() const { return elements.size(); }
  int vertices_per_element() const { return dim + 1; }
  int node_index(std::size_t i, std::size_t j) const {
    return static_cast<int>(j * xs.size() + i);
  }
  double element_measure(std::size_t e) const;
  std::array<double, 2> centroid(std::size_t e) const;
  /// Largest cell extent.
  double max_spacing() const;
};

Mesh build_mesh(const Box &box, int nx, int ny = 1);
Mesh build_rectilinear_mesh(std::vector<double> xs, std::vector<double> ys);

/// Tags boundary faces lying on the boundary of a neighbouring box.
void tag_interfaces(Mesh &mesh, const std::vector<std::pair<int, Box>> &neighbours);

/// Nodes of one interface, sorted along the tangential axis.
struct InterfaceDofs {
  int neighbour = 0;
  std::vector<int> dofs;
  std::vector<double> coords;  ///< tangential coordinate ({0} in 1D)
  int axis = -1;               ///< tangential axis (0 = x, 1 = y), -1 in 1D
  std::array<double, 2> normal{0.0, 0.0};
  std::vector<int> faces;
};

/// P1 space: one dof per mesh node.
struct FemSpace {
  Mesh mesh;
  std::vector<InterfaceDofs> interfaces;

  std::size_t ndofs() const { return mesh.num_nodes(); }
  const InterfaceDofs &interface(int neighbour) const;
  bool has_interface(int neighbour) const;
};

FemSpace make_space(Mesh mesh);

/// Uniform grid lines of `n` cells on [a, b].
std::vector<double> grid_lines(double a, double b, int n);

}  // namespace oswr

#endif  // OSWR_MESH_HPP_
