#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "doctest.h"
#include "nlch/errors.hpp"
#include "nlch/sim.hpp"

using namespace nlch;

namespace {

SimConfig small_config() {
    SimConfig cfg;
    cfg.domain = {-0.2, 0.2, -0.2, 0.2};
    cfg.nx = 16;
    cfg.ny = 16;
    cfg.t_end = 2e-4;
    cfg.snapshot_every = 5;
    return cfg;
}

}  // namespace

TEST_CASE("initial field: range, determinism, amplitude zero") {
    SimConfig cfg;
    const Mesh mesh = build_uniform_mesh(cfg.domain, cfg.nx, cfg.ny);
    const NodalField a = init_field(cfg, mesh);
    const NodalField b = init_field(cfg, mesh);
    CHECK(a == b);
    CHECK(*std::min_element(a.begin(), a.end()) >= 0.15);
    CHECK(*std::max_element(a.begin(), a.end()) <= 0.45);
    double mean = 0.0;
    for (double v : a) mean += v;
    CHECK(mean / static_cast<double>(a.size()) == doctest::Approx(0.3).epsilon(0.01));

    cfg.rng_seed = 2;
    CHECK(init_field(cfg, mesh) != a);

    cfg.ic_amplitude = 0.0;
    const NodalField flat = init_field(cfg, mesh);
    CHECK(std::all_of(flat.begin(), flat.end(), [](double v) { return v == 0.3; }));

    cfg.ic_amplitude = 0.1;
    cfg.ic_convention = IcConvention::one_sided;
    const NodalField one = init_field(cfg, mesh);
    CHECK(*std::min_element(one.begin(), one.end()) >= 0.3);
}

TEST_CASE("initial field clamps at 1e-9 for alpha >= 2 and warns") {
    SimConfig cfg;
    cfg.ic_mean = 0.0;
    cfg.ic_amplitude = 0.0;
    cfg.mob.alpha = 2.0;
    const Mesh mesh = build_uniform_mesh(cfg.domain, 4, 4);
    std::string warning;
    const NodalField phi = init_field(cfg, mesh, [&](const std::string& w) { warning = w; });
    CHECK(phi[0] == 1e-9);
    CHECK_FALSE(warning.empty());
}

TEST_CASE("CFL bound") {
    const Mesh mesh = build_uniform_mesh({}, 8, 8);
    const NodalField phi(mesh.num_nodes(), 0.3);
    CHECK(compute_cfl_dt(phi, NodalField(mesh.num_nodes(), 2.0), mesh, {}) == std::numeric_limits<double>::infinity());
    NodalField mu(mesh.num_nodes());
    for (std::size_t j = 0; j < mu.size(); ++j) mu[j] = 3.0 * mesh.nodes[j].x;
    CHECK(compute_cfl_dt(NodalField(mesh.num_nodes(), 0.0), mu, mesh, {2.0, 1.0}) ==
          std::numeric_limits<double>::infinity());
    // alpha = 1: |v| = (1 - 0.3)^2 * 3, h_K = sqrt(2) * 0.25.
    CHECK(compute_cfl_dt(phi, mu, mesh, {}) == doctest::Approx(std::sqrt(2.0) * 0.25 / (0.49 * 3.0)));
    // alpha = 1 at phi = 0 stays finite.
    CHECK(compute_cfl_dt(NodalField(mesh.num_nodes(), 0.0), mu, mesh, {}) == doctest::Approx(std::sqrt(2.0) * 0.25 / 3.0));
}

TEST_CASE("Lyapunov functional") {
    SimConfig cfg;
    const Mesh mesh = build_uniform_mesh(cfg.domain, 20, 20);
    const KernelMatrices km = assemble_kernel_matrices(mesh, cfg.kernel_spec());
    CHECK(lyapunov(NodalField(mesh.num_nodes(), 0.0), km, mesh, cfg.pot) == 0.0);
    const double expected = 4.0 / 0.014 * psi(0.3, cfg.pot);
    CHECK(lyapunov(NodalField(mesh.num_nodes(), 0.3), km, mesh, cfg.pot) == doctest::Approx(expected).epsilon(1e-12));
    NodalField bad(mesh.num_nodes(), 0.3);
    bad[3] = 1.0;
    CHECK_THROWS_AS(lyapunov(bad, km, mesh, cfg.pot), std::invalid_argument);
}

TEST_CASE("first time step is dt_safety eps^2") {
    SimConfig cfg = small_config();
    cfg.t_end = 1.0;
    cfg.ic_amplitude = 0.0;
    cfg.t_end = 3e-5;
    const Diagnostics d = run(cfg);
    CHECK(d.dt[1] == doctest::Approx(1.96e-5).epsilon(1e-12));
}

TEST_CASE("t_end below the first step runs exactly one step") {
    SimConfig cfg = small_config();
    cfg.t_end = 1e-6;
    const Diagnostics d = run(cfg);
    CHECK(d.size() == 2);
    CHECK(d.time.back() == cfg.t_end);
}

TEST_CASE("uniform initial state stays put") {
    SimConfig cfg = small_config();
    cfg.ic_amplitude = 0.0;
    std::size_t snaps = 0;
    SimSinks sinks;
    sinks.snapshot = [&](const Snapshot& s) {
        ++snaps;
        CHECK(std::all_of(s.phi.begin(), s.phi.end(), [](double v) { return std::abs(v - 0.3) < 1e-14; }));
    };
    run(cfg, sinks);
    CHECK(snaps >= 2);
}

TEST_CASE("short run: Lyapunov non-increasing, mass conserved, bounds, snapshot cadence") {
    SimConfig cfg = small_config();
    std::vector<std::size_t> snap_steps;
    double last_time = -1.0;
    SimSinks sinks;
    sinks.snapshot = [&](const Snapshot& s) {
        snap_steps.push_back(s.step);
        CHECK(s.time >= last_time);
        last_time = s.time;
    };
    const Diagnostics d = run(cfg, sinks);
    REQUIRE(d.size() > 5);
    for (std::size_t k = 1; k < d.size(); ++k) {
        CHECK(d.lyapunov[k] <= d.lyapunov[k - 1] + 1e-10 * std::abs(d.lyapunov[k - 1]));
        CHECK(std::abs(d.mass[k] - d.mass[0]) <= 1e-8 * d.mass[0]);
        CHECK(d.min_phi[k] >= 0.0);
        CHECK(d.max_phi[k] < 1.0);
    }
    CHECK(d.time.back() == cfg.t_end);
    CHECK(snap_steps.front() == 0);
    CHECK(snap_steps[1] == 5);
    CHECK(snap_steps.back() == d.step.back());
}

TEST_CASE("config validation") {
    SimConfig cfg;
    cfg.ic_mean = 0.9;
    cfg.ic_amplitude = 0.2;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = SimConfig{};
    cfg.t_end = 0.0;
    try {
        cfg.validate();
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(e.key() == "time.t_end");
    }
}

TEST_CASE("kernel check on the default setup") {
    const KernelCheck k = check_kernel_condition(SimConfig{});
    CHECK(k.separation == doctest::Approx(28.5714).epsilon(1e-5));
    CHECK(k.convexity == doctest::Approx(13.5415).epsilon(1e-5));
    CHECK(k.eps_inf_conv_one > k.separation);
}
