#include "nlch/nonlocal.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>

#include "nlch/kernels.hpp"

namespace nlch {

void KernelSpec::validate() const {
    if (!(epsilon > 0.0)) throw std::invalid_argument("kernel epsilon must be positive");
    if (!(cutoff >= 0.0)) throw std::invalid_argument("kernel cutoff must be >= 0");
}

double kernel_eval(double dx, double dy, const KernelSpec& spec) {
    const double e2 = spec.epsilon * spec.epsilon;
    return std::exp(-(dx * dx + dy * dy) / (2.0 * e2)) / (e2 * e2);
}

namespace {

void finish_row_sums(KernelMatrices& km) {
    km.j1.assign(km.j2.rows, 0.0);
    for (std::size_t i = 0; i < km.j2.rows; ++i) {
        double s = 0.0;
        for (std::size_t k = km.j2.row_ptr[i]; k < km.j2.row_ptr[i + 1]; ++k) s += km.j2.val[k];
        km.j1[i] = s;
    }
}

}  // namespace

KernelMatrices assemble_kernel_matrices(const Mesh& mesh, const KernelSpec& spec) {
    spec.validate();
    const auto nx = static_cast<std::ptrdiff_t>(mesh.nx);
    const auto ny = static_cast<std::ptrdiff_t>(mesh.ny);

    // Kernel samples per index offset. Offsets beyond the kept radius are
    // marked negative so they are skipped.
    std::vector<double> stencil(static_cast<std::size_t>((2 * nx + 1) * (2 * ny + 1)), -1.0);
    auto sidx = [&](std::ptrdiff_t di, std::ptrdiff_t dj) {
        return static_cast<std::size_t>((dj + ny) * (2 * nx + 1) + (di + nx));
    };
    std::ptrdiff_t rx = 0, ry = 0;
    for (std::ptrdiff_t dj = -ny; dj <= ny; ++dj) {
        for (std::ptrdiff_t di = -nx; di <= nx; ++di) {
            const double dx = static_cast<double>(di) * mesh.hx;
            const double dy = static_cast<double>(dj) * mesh.hy;
            const double v = kernel_eval(dx, dy, spec);
            if (v > spec.cutoff) {
                stencil[sidx(di, dj)] = v;
                rx = std::max(rx, std::abs(di));
                ry = std::max(ry, std::abs(dj));
            }
        }
    }

    const std::size_t n = mesh.num_nodes();
    KernelMatrices km;
    km.j2.rows = n;
    km.j2.cols = n;
    km.j2.row_ptr.assign(n + 1, 0);

    // Row counts first, then fill in place.
    std::vector<std::size_t> counts(n, 0);
    const auto nn = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < nn; ++i) {
        const std::ptrdiff_t ix = i % (nx + 1);
        const std::ptrdiff_t iy = i / (nx + 1);
        std::size_t c = 0;
        for (std::ptrdiff_t jy = std::max<std::ptrdiff_t>(0, iy - ry); jy <= std::min(ny, iy + ry); ++jy) {
            for (std::ptrdiff_t jx = std::max<std::ptrdiff_t>(0, ix - rx); jx <= std::min(nx, ix + rx); ++jx) {
                if (stencil[sidx(jx - ix, jy - iy)] > 0.0) ++c;
            }
        }
        counts[static_cast<std::size_t>(i)] = c;
    }
    for (std::size_t i = 0; i < n; ++i) km.j2.row_ptr[i + 1] = km.j2.row_ptr[i] + counts[i];
    km.j2.col.resize(km.j2.row_ptr[n]);
    km.j2.val.resize(km.j2.row_ptr[n]);

#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < nn; ++i) {
        const auto row = static_cast<std::size_t>(i);
        const std::ptrdiff_t ix = i % (nx + 1);
        const std::ptrdiff_t iy = i / (nx + 1);
        std::size_t k = km.j2.row_ptr[row];
        const double mi = mesh.lumped_mass[row];
        for (std::ptrdiff_t jy = std::max<std::ptrdiff_t>(0, iy - ry); jy <= std::min(ny, iy + ry); ++jy) {
            for (std::ptrdiff_t jx = std::max<std::ptrdiff_t>(0, ix - rx); jx <= std::min(nx, ix + rx); ++jx) {
                const double v = stencil[sidx(jx - ix, jy - iy)];
                if (!(v > 0.0)) continue;
                const std::size_t col = static_cast<std::size_t>(jy * (nx + 1) + jx);
                km.j2.col[k] = col;
                km.j2.val[k] = v * mi * mesh.lumped_mass[col];
                ++k;
            }
        }
    }
    finish_row_sums(km);
    return km;
}

KernelMatrices assemble_kernel_matrices_serial(const Mesh& mesh, const KernelSpec& spec) {
    spec.validate();
    const std::size_t n = mesh.num_nodes();
    KernelMatrices km;
    km.j2.rows = n;
    km.j2.cols = n;
    km.j2.row_ptr.assign(n + 1, 0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            const double v = kernel_eval(mesh.nodes[i].x - mesh.nodes[j].x, mesh.nodes[i].y - mesh.nodes[j].y, spec);
            if (v > spec.cutoff) {
                km.j2.col.push_back(j);
                km.j2.val.push_back(v * mesh.lumped_mass[i] * mesh.lumped_mass[j]);
            }
        }
        km.j2.row_ptr[i + 1] = km.j2.col.size();
    }
    finish_row_sums(km);
    return km;
}

NodalField conv_lumped(std::span<const double> eta, const KernelMatrices& km, const Mesh& mesh) {
    if (eta.size() != mesh.num_nodes() || km.j2.rows != mesh.num_nodes()) {
        throw std::invalid_argument("conv_lumped: field size does not match the mesh");
    }
    NodalField out(eta.size());
    kernels::spmv(km.j2, eta, out);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] /= mesh.lumped_mass[i];
    return out;
}

NodalField conv_one(const KernelMatrices& km, const Mesh& mesh) {
    NodalField out(km.j1.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = km.j1[i] / mesh.lumped_mass[i];
    return out;
}

double conv_product(std::span<const double> a, std::span<const double> b, const KernelMatrices& km) {
    std::vector<double> tmp(a.size());
    kernels::spmv(km.j2, a, tmp);
    return kernels::dot(tmp, b);
}

double conv_one_product(std::span<const double> a, std::span<const double> b, const KernelMatrices& km) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += km.j1[i] * a[i] * b[i];
    return s;
}

}  // namespace nlch
