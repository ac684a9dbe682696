#include "nlch/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace nlch {

void Domain2D::validate() const {
    if (!(xmax > xmin) || !(ymax > ymin)) {
        throw std::invalid_argument("domain must satisfy xmax > xmin and ymax > ymin");
    }
}

double Mesh::element_diameter(std::size_t e) const {
    const auto& t = elements[e];
    double d = 0.0;
    for (int a = 0; a < 3; ++a) {
        const Point2D& p = nodes[t[a]];
        const Point2D& q = nodes[t[(a + 1) % 3]];
        d = std::max(d, std::hypot(p.x - q.x, p.y - q.y));
    }
    return d;
}

std::array<Point2D, 3> Mesh::basis_gradients(std::size_t e) const {
    const auto& t = elements[e];
    const Point2D& p0 = nodes[t[0]];
    const Point2D& p1 = nodes[t[1]];
    const Point2D& p2 = nodes[t[2]];
    const double det = (p1.x - p0.x) * (p2.y - p0.y) - (p2.x - p0.x) * (p1.y - p0.y);
    return {Point2D{(p1.y - p2.y) / det, (p2.x - p1.x) / det},
            Point2D{(p2.y - p0.y) / det, (p0.x - p2.x) / det},
            Point2D{(p0.y - p1.y) / det, (p1.x - p0.x) / det}};
}

Mesh build_uniform_mesh(const Domain2D& domain, std::size_t nx, std::size_t ny) {
    domain.validate();
    if (nx == 0 || ny == 0) throw std::invalid_argument("mesh subdivision counts must be >= 1");

    Mesh m;
    m.domain = domain;
    m.nx = nx;
    m.ny = ny;
    m.hx = (domain.xmax - domain.xmin) / static_cast<double>(nx);
    m.hy = (domain.ymax - domain.ymin) / static_cast<double>(ny);

    m.nodes.reserve((nx + 1) * (ny + 1));
    for (std::size_t iy = 0; iy <= ny; ++iy) {
        // Snap the last row/column onto the boundary exactly.
        const double y = iy == ny ? domain.ymax : domain.ymin + static_cast<double>(iy) * m.hy;
        for (std::size_t ix = 0; ix <= nx; ++ix) {
            const double x = ix == nx ? domain.xmax : domain.xmin + static_cast<double>(ix) * m.hx;
            m.nodes.push_back({x, y});
        }
    }

    m.elements.reserve(2 * nx * ny);
    for (std::size_t iy = 0; iy < ny; ++iy) {
        for (std::size_t ix = 0; ix < nx; ++ix) {
            const std::size_t n00 = m.node_index(ix, iy);
            const std::size_t n10 = m.node_index(ix + 1, iy);
            const std::size_t n01 = m.node_index(ix, iy + 1);
            const std::size_t n11 = m.node_index(ix + 1, iy + 1);
            m.elements.push_back({n00, n10, n11});
            m.elements.push_back({n00, n11, n01});
        }
    }

    const std::size_t nn = m.num_nodes();
    m.lumped_mass.assign(nn, 0.0);
    m.node_elements.assign(nn, {});
    m.adjacency.assign(nn, {});
    m.element_area.resize(m.elements.size());
    for (std::size_t e = 0; e < m.elements.size(); ++e) {
        const auto& t = m.elements[e];
        const Point2D& p0 = m.nodes[t[0]];
        const Point2D& p1 = m.nodes[t[1]];
        const Point2D& p2 = m.nodes[t[2]];
        const double area = 0.5 * ((p1.x - p0.x) * (p2.y - p0.y) - (p2.x - p0.x) * (p1.y - p0.y));
        m.element_area[e] = area;
        for (int a = 0; a < 3; ++a) {
            m.lumped_mass[t[a]] += area / 3.0;
            m.node_elements[t[a]].push_back(e);
            for (int b = 0; b < 3; ++b) {
                if (a != b) m.adjacency[t[a]].push_back(t[b]);
            }
        }
    }
    for (auto& adj : m.adjacency) {
        std::sort(adj.begin(), adj.end());
        adj.erase(std::unique(adj.begin(), adj.end()), adj.end());
    }
    return m;
}

namespace {

void require_size(std::span<const double> f, const Mesh& mesh, const char* what) {
    if (f.size() != mesh.num_nodes()) {
        throw std::invalid_argument(std::string(what) + ": field size " + std::to_string(f.size()) +
                                    " does not match node count " + std::to_string(mesh.num_nodes()));
    }
}

}  // namespace

double lumped_inner_product(std::span<const double> f, std::span<const double> g, const Mesh& mesh) {
    require_size(f, mesh, "lumped_inner_product");
    require_size(g, mesh, "lumped_inner_product");
    double s = 0.0;
    for (std::size_t j = 0; j < f.size(); ++j) s += mesh.lumped_mass[j] * f[j] * g[j];
    return s;
}

double l2_inner_product(std::span<const double> f, std::span<const double> g, const Mesh& mesh) {
    require_size(f, mesh, "l2_inner_product");
    require_size(g, mesh, "l2_inner_product");
    // P1 mass matrix on a triangle: |K|/12 * (1 + delta_ab).
    double s = 0.0;
    for (std::size_t e = 0; e < mesh.num_elements(); ++e) {
        const auto& t = mesh.elements[e];
        double local = 0.0;
        for (int a = 0; a < 3; ++a) {
            for (int b = 0; b < 3; ++b) local += (a == b ? 2.0 : 1.0) * f[t[a]] * g[t[b]];
        }
        s += mesh.element_area[e] / 12.0 * local;
    }
    return s;
}

CsrMatrix stiffness_pattern(const Mesh& mesh) {
    std::vector<std::vector<std::size_t>> cols(mesh.num_nodes());
    for (std::size_t i = 0; i < mesh.num_nodes(); ++i) {
        cols[i] = mesh.adjacency[i];
        cols[i].push_back(i);
    }
    return make_pattern(mesh.num_nodes(), mesh.num_nodes(), cols);
}

namespace {

void check_coefficients(const Mesh& mesh, std::span<const double> coeff) {
    if (coeff.size() != mesh.num_elements()) {
        throw std::invalid_argument("assemble_stiffness: need one coefficient per element");
    }
    for (double c : coeff) {
        if (!(c >= 0.0)) throw std::invalid_argument("assemble_stiffness: negative or NaN coefficient");
    }
}

}  // namespace

CsrMatrix assemble_stiffness(const Mesh& mesh, std::span<const double> coeff) {
    check_coefficients(mesh, coeff);
    CsrMatrix a = stiffness_pattern(mesh);
    const auto n = static_cast<std::ptrdiff_t>(mesh.num_nodes());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        const auto row = static_cast<std::size_t>(i);
        for (std::size_t e : mesh.node_elements[row]) {
            if (coeff[e] == 0.0) continue;
            const auto& t = mesh.elements[e];
            const auto grads = mesh.basis_gradients(e);
            int la = 0;
            while (t[la] != row) ++la;
            const double w = coeff[e] * mesh.element_area[e];
            for (int b = 0; b < 3; ++b) {
                const double v = w * (grads[la].x * grads[b].x + grads[la].y * grads[b].y);
                a.val[a.find(row, t[b])] += v;
            }
        }
    }
    return a;
}

CsrMatrix assemble_stiffness_serial(const Mesh& mesh, std::span<const double> coeff) {
    check_coefficients(mesh, coeff);
    CsrMatrix a = stiffness_pattern(mesh);
    for (std::size_t e = 0; e < mesh.num_elements(); ++e) {
        const auto& t = mesh.elements[e];
        const auto grads = mesh.basis_gradients(e);
        const double w = coeff[e] * mesh.element_area[e];
        for (int p = 0; p < 3; ++p) {
            for (int q = 0; q < 3; ++q) {
                a.val[a.find(t[p], t[q])] += w * (grads[p].x * grads[q].x + grads[p].y * grads[q].y);
            }
        }
    }
    return a;
}

}  // namespace nlch
