#pragma once

// Random small step problems shared by the solver tests and the acceptance
// binary.

#include <cstdint>
#include <random>

#include "nlch/mesh.hpp"
#include "nlch/nonlocal.hpp"
#include "nlch/potential.hpp"
#include "nlch/solver.hpp"

namespace nlch::testing {

struct Instance {
    Mesh mesh;
    KernelMatrices km;
    PotentialParams pot;
    MobilityParams mob;
    NodalField phi_prev;
    double dt = 0.0;
};

/// n x n mesh on [0, 0.02 n]^2 (h = 0.02, comparable to eps = 0.014) with
/// phi_prev uniform in [0.05, 0.9]. With `zero_band`, a random number of
/// leading columns is set to zero, which creates passive nodes (two or more
/// columns) or active nodes with phi_prev = 0 (one column), and every other
/// node is zeroed with probability `zero_fraction`.
inline Instance make_instance(std::uint64_t seed, std::size_t n, double alpha, bool zero_band, double dt = 2e-4,
                              double zero_fraction = 0.0) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> val(0.05, 0.9);
    Instance ins;
    const double len = 0.02 * static_cast<double>(n);
    ins.mesh = build_uniform_mesh({0.0, len, 0.0, len}, n, n);
    ins.km = assemble_kernel_matrices(ins.mesh, {ins.pot.epsilon, 1e-6});
    ins.mob.alpha = alpha;
    ins.dt = dt;
    ins.phi_prev.resize(ins.mesh.num_nodes());
    for (double& v : ins.phi_prev) v = val(rng);
    if (zero_band) {
        const std::size_t cols = 1 + rng() % 2;
        for (std::size_t iy = 0; iy <= n; ++iy) {
            for (std::size_t ix = 0; ix < cols; ++ix) ins.phi_prev[ins.mesh.node_index(ix, iy)] = 0.0;
        }
    }
    std::bernoulli_distribution drop(zero_fraction);
    for (double& v : ins.phi_prev) {
        if (drop(rng)) v = 0.0;
    }
    return ins;
}

}  // namespace nlch::testing
