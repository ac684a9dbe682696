#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "nlch/sparse.hpp"

namespace nlch {

using NodalField = std::vector<double>;

struct Domain2D {
    double xmin = -1.0;
    double xmax = 1.0;
    double ymin = -1.0;
    double ymax = 1.0;

    double area() const noexcept { return (xmax - xmin) * (ymax - ymin); }
    void validate() const;
};

struct Point2D {
    double x = 0.0;
    double y = 0.0;
};

/// Structured P1 triangulation of a rectangle. Nodes are numbered row-major
/// (x fastest); every grid cell is split along its lower-left to upper-right
/// diagonal into two counter-clockwise triangles. Immutable after
/// construction.
struct Mesh {
    Domain2D domain;
    std::size_t nx = 0;
    std::size_t ny = 0;
    double hx = 0.0;
    double hy = 0.0;

    std::vector<Point2D> nodes;
    std::vector<std::array<std::size_t, 3>> elements;
    std::vector<double> element_area;
    std::vector<double> lumped_mass;                       // (1, chi_j)
    std::vector<std::vector<std::size_t>> adjacency;       // excludes the node itself
    std::vector<std::vector<std::size_t>> node_elements;   // elements incident to a node

    std::size_t num_nodes() const noexcept { return nodes.size(); }
    std::size_t num_elements() const noexcept { return elements.size(); }
    std::size_t node_index(std::size_t ix, std::size_t iy) const noexcept { return iy * (nx + 1) + ix; }

    /// Longest edge of element e.
    double element_diameter(std::size_t e) const;

    /// Constant gradients of the three P1 basis functions on element e.
    std::array<Point2D, 3> basis_gradients(std::size_t e) const;
};

Mesh build_uniform_mesh(const Domain2D& domain, std::size_t nx, std::size_t ny);

/// Lumped scalar product sum_j m_j f_j g_j.
double lumped_inner_product(std::span<const double> f, std::span<const double> g, const Mesh& mesh);

/// Exact L2 product of two P1 fields, by element-wise quadrature.
double l2_inner_product(std::span<const double> f, std::span<const double> g, const Mesh& mesh);

/// A_ij = sum_K coeff_K int_K grad chi_j . grad chi_i. Row-parallel gather
/// over incident elements.
CsrMatrix assemble_stiffness(const Mesh& mesh, std::span<const double> coeff);

/// Element-loop scatter; reference for assemble_stiffness.
CsrMatrix assemble_stiffness_serial(const Mesh& mesh, std::span<const double> coeff);

/// Sparsity pattern of the P1 stiffness: each node couples to itself and to
/// its adjacency.
CsrMatrix stiffness_pattern(const Mesh& mesh);

}  // namespace nlch
