#include <cmath>
#include <random>

#include "doctest.h"
#include "nlch/nonlocal.hpp"

using namespace nlch;

TEST_CASE("kernel value at the origin") {
    CHECK(kernel_eval(0.0, 0.0, {0.014, 1e-6}) == doctest::Approx(2.60308e7).epsilon(1e-6));
    CHECK(kernel_eval(0.014, 0.0, {0.014, 1e-6}) == doctest::Approx(2.60308e7 * std::exp(-0.5)).epsilon(1e-6));
}

TEST_CASE("stencil assembly reproduces pairwise assembly") {
    const Mesh m = build_uniform_mesh({-0.2, 0.2, -0.1, 0.2}, 14, 9);
    const KernelSpec spec{0.03, 1e-6};
    const KernelMatrices a = assemble_kernel_matrices(m, spec);
    const KernelMatrices b = assemble_kernel_matrices_serial(m, spec);
    REQUIRE(a.j2.row_ptr == b.j2.row_ptr);
    REQUIRE(a.j2.col == b.j2.col);
    for (std::size_t k = 0; k < a.j2.nnz(); ++k) CHECK(a.j2.val[k] == doctest::Approx(b.j2.val[k]).epsilon(1e-13));
    for (std::size_t i = 0; i < a.j1.size(); ++i) CHECK(a.j1[i] == doctest::Approx(b.j1[i]).epsilon(1e-13));
}

TEST_CASE("J2 is symmetric, J1 are its exact row sums, cutoff drops entries") {
    const Mesh m = build_uniform_mesh({}, 30, 30);
    const KernelMatrices km = assemble_kernel_matrices(m, {0.014, 1e-6});
    CHECK(is_symmetric(km.j2, 1e-14));
    for (std::size_t i = 0; i < km.j1.size(); ++i) {
        double s = 0.0;
        for (std::size_t k = km.j2.row_ptr[i]; k < km.j2.row_ptr[i + 1]; ++k) s += km.j2.val[k];
        CHECK(km.j1[i] == s);
    }
    const KernelMatrices loose = assemble_kernel_matrices(m, {0.014, 1e3});
    CHECK(loose.j2.nnz() < km.j2.nnz());
    CHECK(km.j2.nnz() < m.num_nodes() * m.num_nodes());
}

TEST_CASE("convolution helpers") {
    const Mesh m = build_uniform_mesh({}, 20, 20);
    const KernelMatrices km = assemble_kernel_matrices(m, {0.05, 1e-6});
    const NodalField one(m.num_nodes(), 1.0);
    const NodalField c1 = conv_one(km, m);
    const NodalField cl = conv_lumped(one, km, m);
    for (std::size_t i = 0; i < c1.size(); ++i) CHECK(cl[i] == doctest::Approx(c1[i]).epsilon(1e-13));
    // Interior value approximates the kernel mass 2 pi / eps^2.
    const double interior = c1[m.node_index(10, 10)];
    CHECK(interior == doctest::Approx(2.0 * M_PI / (0.05 * 0.05)).epsilon(0.05));
    CHECK(conv_product(one, one, km) == doctest::Approx(conv_one_product(one, one, km)).epsilon(1e-13));
}

TEST_CASE("discrete Young identity carries a factor one half") {
    const Mesh m = build_uniform_mesh({}, 10, 10);
    const KernelMatrices km = assemble_kernel_matrices(m, {0.3, 1e-6});
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    NodalField eta(m.num_nodes());
    for (double& v : eta) v = u(rng);
    double minus = 0.0, plus = 0.0;
    for (std::size_t i = 0; i < eta.size(); ++i) {
        for (std::size_t k = km.j2.row_ptr[i]; k < km.j2.row_ptr[i + 1]; ++k) {
            const double e = eta[i] - eta[km.j2.col[k]], s = eta[i] + eta[km.j2.col[k]];
            minus += km.j2.val[k] * e * e;
            plus += km.j2.val[k] * s * s;
        }
    }
    const double self = conv_one_product(eta, eta, km), cross = conv_product(eta, eta, km);
    CHECK(self - cross == doctest::Approx(0.5 * minus).epsilon(1e-12));
    CHECK(self + cross == doctest::Approx(0.5 * plus).epsilon(1e-12));
    CHECK(self - cross != doctest::Approx(minus));
}
