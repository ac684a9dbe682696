// Serial vs OpenMP timings for the parallel kernels.

#include <chrono>
#include <cstdio>
#include <functional>
#include <vector>

#include <omp.h>

#include "nlch/kernels.hpp"
#include "nlch/mesh.hpp"
#include "nlch/nonlocal.hpp"

namespace {

double seconds(const std::function<void()>& f, int reps) {
    f();
    const auto t0 = std::chrono::steady_clock::now();
    for (int r = 0; r < reps; ++r) f();
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count() / reps;
}

void report(const char* name, double serial, double parallel) {
    std::printf("%-36s serial %10.3e s   omp %10.3e s   speedup %5.2fx\n", name, serial, parallel, serial / parallel);
}

}  // namespace

int main() {
    std::printf("threads: %d\n", omp_get_max_threads());
    const nlch::Mesh mesh = nlch::build_uniform_mesh({}, 80, 80);
    const nlch::KernelSpec spec{0.014, 1e-6};

    const nlch::Mesh small = nlch::build_uniform_mesh({}, 30, 30);
    report("J assembly 30x30 (pairwise vs stencil)", seconds([&] { nlch::assemble_kernel_matrices_serial(small, spec); }, 1),
           seconds([&] { nlch::assemble_kernel_matrices(small, spec); }, 3));

    const nlch::KernelMatrices km = nlch::assemble_kernel_matrices(mesh, spec);
    const std::vector<double> coeff(mesh.num_elements(), 1.0);
    report("stiffness 80x80", seconds([&] { nlch::assemble_stiffness_serial(mesh, coeff); }, 20),
           seconds([&] { nlch::assemble_stiffness(mesh, coeff); }, 20));

    const std::size_t n = mesh.num_nodes();
    std::vector<double> x(n), y(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = 0.3 + 1e-3 * static_cast<double>(i % 17);
    report("spmv J2 80x80", seconds([&] { nlch::kernels::spmv_serial(km.j2, x, y); }, 50),
           seconds([&] { nlch::kernels::spmv(km.j2, x, y); }, 50));

    std::vector<double> big(1 << 22, 1.0), big2(1 << 22, 2.0);
    double sink = 0.0;
    report("dot 4M", seconds([&] { sink += nlch::kernels::dot_serial(big, big2); }, 20),
           seconds([&] { sink += nlch::kernels::dot(big, big2); }, 20));
    report("axpy 4M", seconds([&] { nlch::kernels::axpy_serial(1e-9, big, big2); }, 20),
           seconds([&] { nlch::kernels::axpy(1e-9, big, big2); }, 20));
    report("max_abs 4M", seconds([&] { sink += nlch::kernels::max_abs_serial(big2); }, 20),
           seconds([&] { sink += nlch::kernels::max_abs(big2); }, 20));
    std::printf("(checksum %g)\n", sink);
    return 0;
}
