#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "nlch/mesh.hpp"
#include "nlch/nonlocal.hpp"
#include "nlch/potential.hpp"
#include "nlch/solver.hpp"

namespace nlch {

enum class IcConvention {
    symmetric,  // mean + amplitude (2u - 1)
    one_sided   // mean + amplitude u
};

struct SimConfig {
    PotentialParams pot;
    MobilityParams mob;
    KernelSpec kernel;  // kernel.epsilon follows pot.epsilon
    Domain2D domain;
    std::size_t nx = 80;
    std::size_t ny = 80;
    double dt_safety = 0.1;  // multiplies eps^2
    double t_end = 0.03;
    double ic_mean = 0.3;
    double ic_amplitude = 0.15;
    IcConvention ic_convention = IcConvention::symmetric;
    std::uint64_t rng_seed = 1;
    SolverOptions solver;
    std::size_t snapshot_every = 100;  // accepted steps; 0 writes only the first and last state
    std::string output_dir = "out";

    /// Throws ConfigError naming the offending key.
    void validate() const;
    /// Kernel spec with epsilon taken from the potential.
    KernelSpec kernel_spec() const;
};

struct Snapshot {
    std::size_t step = 0;
    double time = 0.0;
    NodalField phi;
    NodalField mu;
};

/// One entry per accepted step; entry 0 is the initial state.
struct Diagnostics {
    std::vector<std::size_t> step;
    std::vector<double> time;
    std::vector<double> dt;
    std::vector<double> cfl_dt;  // bound for the following step
    std::vector<double> lyapunov;
    std::vector<double> mass;
    std::vector<double> min_phi;
    std::vector<double> max_phi;
    std::vector<std::size_t> iterations;
    std::vector<std::size_t> passive_nodes;
    std::vector<std::size_t> floored_elements;

    std::size_t size() const noexcept { return step.size(); }
};

struct SimSinks {
    std::function<void(const Snapshot&)> snapshot;
    std::function<void(const Diagnostics&)> step;  // called after every record
    std::function<void(const std::string&)> warning;
};

/// phi0_j from a counter-based hash of (seed, j), clamped to [0, 1 - 1e-9];
/// for alpha >= 2 additionally clamped below at 1e-9 (reported via `warn`).
NodalField init_field(const SimConfig& cfg, const Mesh& mesh,
                      const std::function<void(const std::string&)>& warn = {});

/// min_K h_K / max_K |v_K|_inf with v_K = -phibar_K^(alpha-1) (1 - phibar_K)^2 grad mu,
/// phibar_K the element mean of phi_prev. +infinity when v vanishes.
double compute_cfl_dt(std::span<const double> phi_prev, std::span<const double> mu, const Mesh& mesh,
                      const MobilityParams& mob);

/// (1/eps)(psi(phi), 1)^h + (eps/2) sum J1 phi^2 - (eps/2) phi^T J2 phi.
double lyapunov(std::span<const double> phi, const KernelMatrices& km, const Mesh& mesh,
                const PotentialParams& pot);

/// Runs the time loop to t_end. Solver failures are rethrown as SolverError
/// carrying the step index in the message and the last accepted phi.
Diagnostics run(const SimConfig& cfg, const SimSinks& sinks = {});

struct KernelCheck {
    double eps_inf_conv_one = 0.0;  // eps * min_j (J*1)_h(x_j)
    double eps_sup_conv_one = 0.0;
    double separation = 0.0;        // (1 - phibar) / eps
    double convexity = 0.0;         // convexity margin
    std::size_t nnz = 0;
    double seconds = 0.0;
};

KernelCheck check_kernel_condition(const SimConfig& cfg);

}  // namespace nlch
