#include "nlch/sim.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>

#include "nlch/errors.hpp"
#include "nlch/kernels.hpp"

namespace nlch {

namespace {

constexpr double kUpperClamp = 1.0 - 1e-9;
constexpr double kLowerClamp = 1e-9;

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

double uniform01(std::uint64_t seed, std::uint64_t index) {
    const std::uint64_t h = splitmix64(splitmix64(seed) ^ index);
    return static_cast<double>(h >> 11) * 0x1.0p-53;
}

template <typename F>
void checked(const char* key, F&& f) {
    try {
        f();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string(key) + ": " + e.what(), key);
    }
}

double lumped_mass_total(std::span<const double> phi, const Mesh& mesh) {
    double total = 0.0;
    for (std::size_t j = 0; j < phi.size(); ++j) total += mesh.lumped_mass[j] * phi[j];
    return total;
}

}  // namespace

void SimConfig::validate() const {
    checked("pot", [&] { pot.validate(); });
    checked("mob", [&] { mob.validate(); });
    checked("kernel.cutoff", [&] { kernel_spec().validate(); });
    checked("domain", [&] { domain.validate(); });
    if (nx == 0) throw ConfigError("mesh.nx must be positive", "mesh.nx");
    if (ny == 0) throw ConfigError("mesh.ny must be positive", "mesh.ny");
    if (!(dt_safety > 0.0)) throw ConfigError("time.dt_safety must be positive", "time.dt_safety");
    if (!(t_end > 0.0)) throw ConfigError("time.t_end must be positive", "time.t_end");
    if (!(ic_amplitude >= 0.0)) throw ConfigError("ic.amplitude must be >= 0", "ic.amplitude");
    const double lo = ic_convention == IcConvention::symmetric ? ic_mean - ic_amplitude : ic_mean;
    const double hi = ic_mean + ic_amplitude;
    if (!(ic_mean >= 0.0 && ic_mean < 1.0)) throw ConfigError("ic.mean must lie in [0, 1)", "ic.mean");
    if (!(lo >= 0.0 && hi < 1.0)) {
        throw ConfigError("initial values ic.mean +/- ic.amplitude must lie in [0, 1)", "ic.amplitude");
    }
    if (!(solver.tol > 0.0)) throw ConfigError("solver.tol must be positive", "solver.tol");
    if (solver.max_iters == 0) throw ConfigError("solver.max_iters must be positive", "solver.max_iters");
}

KernelSpec SimConfig::kernel_spec() const {
    KernelSpec k = kernel;
    k.epsilon = pot.epsilon;
    return k;
}

NodalField init_field(const SimConfig& cfg, const Mesh& mesh, const std::function<void(const std::string&)>& warn) {
    NodalField phi(mesh.num_nodes());
    const bool positive = cfg.mob.alpha >= 2.0;
    std::size_t lifted = 0;
    for (std::size_t j = 0; j < phi.size(); ++j) {
        const double u = uniform01(cfg.rng_seed, j);
        const double pert = cfg.ic_convention == IcConvention::symmetric ? 2.0 * u - 1.0 : u;
        double v = std::clamp(cfg.ic_mean + cfg.ic_amplitude * pert, 0.0, kUpperClamp);
        if (positive && v < kLowerClamp) {
            v = kLowerClamp;
            ++lifted;
        }
        phi[j] = v;
    }
    if (lifted > 0 && warn) {
        warn("alpha >= 2: " + std::to_string(lifted) + " initial values raised to 1e-9");
    }
    return phi;
}

double compute_cfl_dt(std::span<const double> phi_prev, std::span<const double> mu, const Mesh& mesh,
                      const MobilityParams& mob) {
    if (phi_prev.size() != mesh.num_nodes() || mu.size() != mesh.num_nodes()) {
        throw std::invalid_argument("compute_cfl_dt: size mismatch");
    }
    double h_min = std::numeric_limits<double>::infinity();
    double v_max = 0.0;
    for (std::size_t e = 0; e < mesh.num_elements(); ++e) {
        const auto& t = mesh.elements[e];
        h_min = std::min(h_min, mesh.element_diameter(e));
        const auto g = mesh.basis_gradients(e);
        double gx = 0.0, gy = 0.0;
        for (int k = 0; k < 3; ++k) {
            gx += mu[t[k]] * g[k].x;
            gy += mu[t[k]] * g[k].y;
        }
        const double grad = std::max(std::abs(gx), std::abs(gy));
        if (grad == 0.0) continue;
        const double mean = std::clamp((phi_prev[t[0]] + phi_prev[t[1]] + phi_prev[t[2]]) / 3.0, 0.0, 1.0);
        // Below alpha = 1 the prefactor blows up at phi = 0; floor it at the
        // initial-data clamp level.
        const double base = mob.alpha < 1.0 ? std::max(mean, kLowerClamp) : mean;
        const double pre = std::pow(base, mob.alpha - 1.0) * (1.0 - mean) * (1.0 - mean);
        v_max = std::max(v_max, pre * grad);
    }
    if (v_max == 0.0) return std::numeric_limits<double>::infinity();
    return h_min / v_max;
}

double lyapunov(std::span<const double> phi, const KernelMatrices& km, const Mesh& mesh, const PotentialParams& pot) {
    const std::size_t n = mesh.num_nodes();
    if (phi.size() != n) throw std::invalid_argument("lyapunov: size mismatch");
    double local = 0.0, self = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        if (!(phi[j] >= 0.0 && phi[j] < 1.0)) throw std::invalid_argument("lyapunov: phi must lie in [0, 1)");
        local += mesh.lumped_mass[j] * psi(phi[j], pot);
        self += km.j1[j] * phi[j] * phi[j];
    }
    std::vector<double> conv(n);
    kernels::spmv(km.j2, phi, conv);
    const double cross = kernels::dot(phi, conv);
    return local / pot.epsilon + 0.5 * pot.epsilon * (self - cross);
}

Diagnostics run(const SimConfig& cfg, const SimSinks& sinks) {
    cfg.validate();
    const Mesh mesh = build_uniform_mesh(cfg.domain, cfg.nx, cfg.ny);
    const KernelMatrices km = assemble_kernel_matrices(mesh, cfg.kernel_spec());
    const double dt_max = cfg.dt_safety * cfg.pot.epsilon * cfg.pot.epsilon;

    NodalField phi = init_field(cfg, mesh, sinks.warning);
    NodalField mu(mesh.num_nodes(), 0.0);
    Diagnostics diag;

    auto record = [&](std::size_t step, double time, double dt, double cfl, std::size_t iters, std::size_t passive,
                      std::size_t floored) {
        diag.step.push_back(step);
        diag.time.push_back(time);
        diag.dt.push_back(dt);
        diag.cfl_dt.push_back(cfl);
        diag.lyapunov.push_back(lyapunov(phi, km, mesh, cfg.pot));
        diag.mass.push_back(lumped_mass_total(phi, mesh));
        const auto [lo, hi] = std::minmax_element(phi.begin(), phi.end());
        diag.min_phi.push_back(*lo);
        diag.max_phi.push_back(*hi);
        diag.iterations.push_back(iters);
        diag.passive_nodes.push_back(passive);
        diag.floored_elements.push_back(floored);
        if (sinks.step) sinks.step(diag);
    };
    auto emit = [&](std::size_t step, double time) {
        if (sinks.snapshot) sinks.snapshot(Snapshot{step, time, phi, mu});
    };

    double t = 0.0;
    double cfl = std::numeric_limits<double>::infinity();
    record(0, 0.0, 0.0, cfl, 0, 0, 0);
    emit(0, 0.0);

    const double t_stop = cfg.t_end * (1.0 - 1e-12);
    std::size_t step = 0;
    bool last_emitted = true;
    while (t < t_stop) {
        ++step;
        const double dt = std::min({dt_max, cfl, cfg.t_end - t});
        StepResult res;
        NodePartition part;
        try {
            part = classify_nodes(phi, mesh, cfg.mob);
            const StepOperators ops = build_step_operators(phi, part, mesh, cfg.mob);
            res = solve_vi_step(phi, mu, ops, km, mesh, cfg.pot, cfg.mob, dt, cfg.solver);
        } catch (const SolverError& e) {
            std::ostringstream msg;
            msg << "step " << step << " (t = " << t << ", dt = " << dt << "): " << e.what();
            throw SolverError(msg.str(), phi, e.residual());
        }
        cfl = compute_cfl_dt(phi, res.mu_new, mesh, cfg.mob);
        phi = std::move(res.phi_new);
        mu = std::move(res.mu_new);
        t += dt;
        if (t >= t_stop) t = cfg.t_end;
        record(step, t, dt, cfl, res.iterations, part.passive.size(), res.floored_elements);
        last_emitted = cfg.snapshot_every > 0 && step % cfg.snapshot_every == 0;
        if (last_emitted) emit(step, t);
    }
    if (!last_emitted) emit(step, t);
    return diag;
}

KernelCheck check_kernel_condition(const SimConfig& cfg) {
    cfg.validate();
    const auto start = std::chrono::steady_clock::now();
    const Mesh mesh = build_uniform_mesh(cfg.domain, cfg.nx, cfg.ny);
    const KernelMatrices km = assemble_kernel_matrices(mesh, cfg.kernel_spec());
    const NodalField conv = conv_one(km, mesh);
    const auto [lo, hi] = std::minmax_element(conv.begin(), conv.end());
    KernelCheck out;
    out.eps_inf_conv_one = cfg.pot.epsilon * *lo;
    out.eps_sup_conv_one = cfg.pot.epsilon * *hi;
    out.separation = separation_threshold(cfg.pot);
    out.convexity = convexity_margin(cfg.pot);
    out.nnz = km.j2.nnz();
    out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return out;
}

}  // namespace nlch
