// Command-line front end: run, check, profile, heatmap.
//
// Exit codes: 0 success, 1 configuration or usage error, 2 solver failure,
// 3 I/O error.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "nlch/errors.hpp"
#include "nlch/io.hpp"
#include "nlch/sim.hpp"

namespace fs = std::filesystem;

namespace {

struct Overrides {
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out_dir;
    std::optional<double> alpha;

    void add_to(CLI::App* app) {
        app->add_option("--seed", seed, "Override ic.seed");
        app->add_option("--out-dir", out_dir, "Override output.dir");
        app->add_option("--alpha", alpha, "Override mob.alpha");
    }

    nlch::SimConfig apply(nlch::SimConfig cfg) const {
        if (seed) cfg.rng_seed = *seed;
        if (out_dir) cfg.output_dir = *out_dir;
        if (alpha) cfg.mob.alpha = *alpha;
        cfg.validate();
        return cfg;
    }
};

std::string snapshot_name(std::size_t step) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "snapshot_%07zu.csv", step);
    return buf;
}

int cmd_run(const std::string& config_path, const Overrides& ov) {
    const nlch::SimConfig cfg = ov.apply(nlch::load_config(config_path));
    const fs::path out = cfg.output_dir;
    const nlch::Mesh mesh = nlch::build_uniform_mesh(cfg.domain, cfg.nx, cfg.ny);
    nlch::write_file_atomic(out / "config.txt", nlch::serialize_config(cfg));

    nlch::SimSinks sinks;
    sinks.warning = [](const std::string& w) { std::cerr << "warning: " << w << '\n'; };
    sinks.snapshot = [&](const nlch::Snapshot& s) {
        nlch::write_snapshot_csv(s, mesh, out / snapshot_name(s.step));
    };
    nlch::Diagnostics latest;
    sinks.step = [&](const nlch::Diagnostics& d) {
        latest = d;
        const std::size_t k = d.size() - 1;
        if (d.step[k] % 100 == 0) {
            std::cout << "step " << d.step[k] << "  t = " << d.time[k] << "  L = " << d.lyapunov[k]
                      << "  min/max phi = " << d.min_phi[k] << " / " << d.max_phi[k] << '\n';
        }
    };
    try {
        const nlch::Diagnostics diag = nlch::run(cfg, sinks);
        nlch::write_diagnostics_csv(diag, out / "diagnostics.csv");
        const std::size_t k = diag.size() - 1;
        std::cout << "done: " << diag.step[k] << " steps to t = " << diag.time[k] << ", L = " << diag.lyapunov[k]
                  << ", output in " << out.string() << '\n';
    } catch (const nlch::SolverError&) {
        if (latest.size() > 0) nlch::write_diagnostics_csv(latest, out / "diagnostics.csv");
        throw;
    }
    return 0;
}

int cmd_check(const std::string& config_path, const Overrides& ov) {
    const nlch::SimConfig cfg = ov.apply(nlch::load_config(config_path));
    const nlch::KernelCheck k = nlch::check_kernel_condition(cfg);
    std::printf("mesh %zux%zu, eps = %g, phibar = %g, cutoff = %g, J2 nnz = %zu\n", cfg.nx, cfg.ny,
                cfg.pot.epsilon, cfg.pot.phibar, cfg.kernel.cutoff, k.nnz);
    std::printf("eps * inf (J*1)_h   = %.6f   (sup %.6f)\n", k.eps_inf_conv_one, k.eps_sup_conv_one);
    std::printf("(1 - phibar) / eps  = %.6f\n", k.separation);
    std::printf("convexity threshold = %.6f\n", k.convexity);
    const bool ordered = k.eps_inf_conv_one > k.separation && k.separation > k.convexity;
    std::printf("ordering inf > separation > convexity: %s\n", ordered ? "holds" : "violated");
    std::printf("assembly time %.3f s\n", k.seconds);
    return 0;
}

int cmd_profile(const std::string& snapshot, double x0) {
    const auto [snap, mesh] = nlch::read_snapshot_csv(snapshot);
    const nlch::LineProfile prof = nlch::extract_profile(snap, mesh, x0);
    std::printf("# x0 = %.17g\ny,phi\n", prof.x0);
    for (const auto& [y, phi] : prof.samples) std::printf("%.17g,%.17g\n", y, phi);
    return 0;
}

int cmd_heatmap(const std::string& snapshot, std::string out) {
    const auto [snap, mesh] = nlch::read_snapshot_csv(snapshot);
    if (out.empty()) out = fs::path(snapshot).replace_extension(".pgm").string();
    nlch::emit_heatmap(snap, mesh, out);
    std::cout << "wrote " << out << " (" << mesh.nx + 1 << "x" << mesh.ny + 1 << ")\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Non-local degenerate Cahn-Hilliard simulator"};
    app.require_subcommand(1);

    std::string config_path, snapshot_path, heatmap_out;
    double x0 = 0.0;
    Overrides run_ov, check_ov;

    auto* run = app.add_subcommand("run", "Run a simulation");
    run->add_option("config", config_path, "Configuration file")->required();
    run_ov.add_to(run);

    auto* check = app.add_subcommand("check", "Print the kernel-condition numbers");
    check->add_option("config", config_path, "Configuration file")->required();
    check_ov.add_to(check);

    auto* profile = app.add_subcommand("profile", "Print phi along the mesh column nearest to x0");
    profile->add_option("snapshot", snapshot_path, "Snapshot CSV")->required();
    profile->add_option("--x", x0, "Abscissa of the vertical line")->required();

    auto* heatmap = app.add_subcommand("heatmap", "Render phi as a binary PGM");
    heatmap->add_option("snapshot", snapshot_path, "Snapshot CSV")->required();
    heatmap->add_option("-o,--out", heatmap_out, "Output path (default: snapshot with .pgm)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (*run) return cmd_run(config_path, run_ov);
        if (*check) return cmd_check(config_path, check_ov);
        if (*profile) return cmd_profile(snapshot_path, x0);
        if (*heatmap) return cmd_heatmap(snapshot_path, heatmap_out);
    } catch (const nlch::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 1;
    } catch (const nlch::SolverError& e) {
        std::cerr << "solver failure: " << e.what() << '\n';
        return 2;
    } catch (const nlch::IoError& e) {
        std::cerr << "I/O error: " << e.what() << '\n';
        return 3;
    } catch (const fs::filesystem_error& e) {
        std::cerr << "I/O error: " << e.what() << '\n';
        return 3;
    } catch (const std::invalid_argument& e) {
        std::cerr << "invalid input: " << e.what() << '\n';
        return 1;
    }
    return 1;
}
