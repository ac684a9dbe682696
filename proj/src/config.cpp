#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>

#include "nlch/errors.hpp"
#include "nlch/io.hpp"

namespace nlch {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double parse_real(const std::string& v, const std::string& key, std::size_t line) {
    double out = 0.0;
    const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
    if (res.ec != std::errc{} || res.ptr != v.data() + v.size() || !std::isfinite(out)) {
        throw ConfigError("line " + std::to_string(line) + ": '" + key + "' expects a real number, got '" + v + "'",
                          key, line);
    }
    return out;
}

std::uint64_t parse_uint(const std::string& v, const std::string& key, std::size_t line) {
    std::uint64_t out = 0;
    const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
    if (res.ec != std::errc{} || res.ptr != v.data() + v.size()) {
        throw ConfigError("line " + std::to_string(line) + ": '" + key +
                              "' expects a non-negative integer, got '" + v + "'",
                          key, line);
    }
    return out;
}

using Setter = std::function<void(SimConfig&, const std::string&, const std::string&, std::size_t)>;

Setter real(double SimConfig::*field) {
    return [field](SimConfig& c, const std::string& v, const std::string& k, std::size_t l) {
        c.*field = parse_real(v, k, l);
    };
}

template <typename Sub>
Setter real(Sub SimConfig::*sub, double Sub::*field) {
    return [sub, field](SimConfig& c, const std::string& v, const std::string& k, std::size_t l) {
        (c.*sub).*field = parse_real(v, k, l);
    };
}

const std::map<std::string, Setter>& setters() {
    static const std::map<std::string, Setter> table = {
        {"domain.xmin", real(&SimConfig::domain, &Domain2D::xmin)},
        {"domain.xmax", real(&SimConfig::domain, &Domain2D::xmax)},
        {"domain.ymin", real(&SimConfig::domain, &Domain2D::ymin)},
        {"domain.ymax", real(&SimConfig::domain, &Domain2D::ymax)},
        {"mesh.nx", [](SimConfig& c, const std::string& v, const std::string& k, std::size_t l) {
             c.nx = parse_uint(v, k, l);
         }},
        {"mesh.ny", [](SimConfig& c, const std::string& v, const std::string& k, std::size_t l) {
             c.ny = parse_uint(v, k, l);
         }},
        {"pot.epsilon", real(&SimConfig::pot, &PotentialParams::epsilon)},
        {"pot.phibar", real(&SimConfig::pot, &PotentialParams::phibar)},
        {"mob.alpha", real(&SimConfig::mob, &MobilityParams::alpha)},
        {"mob.M", real(&SimConfig::mob, &MobilityParams::friction)},
        {"kernel.cutoff", real(&SimConfig::kernel, &KernelSpec::cutoff)},
        {"time.dt_safety", real(&SimConfig::dt_safety)},
        {"time.t_end", real(&SimConfig::t_end)},
        {"ic.mean", real(&SimConfig::ic_mean)},
        {"ic.amplitude", real(&SimConfig::ic_amplitude)},
        {"ic.seed", [](SimConfig& c, const std::string& v, const std::string& k, std::size_t l) {
             c.rng_seed = parse_uint(v, k, l);
         }},
        {"ic.convention", [](SimConfig& c, const std::string& v, const std::string& k, std::size_t l) {
             if (v == "symmetric") {
                 c.ic_convention = IcConvention::symmetric;
             } else if (v == "one_sided") {
                 c.ic_convention = IcConvention::one_sided;
             } else {
                 throw ConfigError("line " + std::to_string(l) + ": '" + k +
                                       "' must be 'symmetric' or 'one_sided'",
                                   k, l);
             }
         }},
        {"solver.tol", real(&SimConfig::solver, &SolverOptions::tol)},
        {"solver.max_iters", [](SimConfig& c, const std::string& v, const std::string& k, std::size_t l) {
             c.solver.max_iters = parse_uint(v, k, l);
         }},
        {"solver.method", [](SimConfig& c, const std::string& v, const std::string& k, std::size_t l) {
             if (v == "newton") {
                 c.solver.method = SolverMethod::newton;
             } else if (v == "projected_gradient") {
                 c.solver.method = SolverMethod::projected_gradient;
             } else {
                 throw ConfigError("line " + std::to_string(l) + ": '" + k +
                                       "' must be 'newton' or 'projected_gradient'",
                                   k, l);
             }
         }},
        {"output.dir", [](SimConfig& c, const std::string& v, const std::string&, std::size_t) {
             c.output_dir = v;
         }},
        {"output.every", [](SimConfig& c, const std::string& v, const std::string& k, std::size_t l) {
             c.snapshot_every = parse_uint(v, k, l);
         }},
    };
    return table;
}

std::string fmt(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

}  // namespace

SimConfig parse_config(const std::string& text) {
    SimConfig cfg;
    std::istringstream in(text);
    std::string raw;
    std::size_t line = 0;
    while (std::getline(in, raw)) {
        ++line;
        if (const auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
        const std::string body = trim(raw);
        if (body.empty()) continue;
        const auto eq = body.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("line " + std::to_string(line) + ": expected 'key = value'", {}, line);
        }
        const std::string key = trim(body.substr(0, eq));
        const std::string value = trim(body.substr(eq + 1));
        const auto it = setters().find(key);
        if (it == setters().end()) {
            throw ConfigError("line " + std::to_string(line) + ": unknown key '" + key + "'", key, line);
        }
        if (value.empty()) {
            throw ConfigError("line " + std::to_string(line) + ": missing value for '" + key + "'", key, line);
        }
        it->second(cfg, value, key, line);
    }
    cfg.validate();
    return cfg;
}

SimConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open config", path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string serialize_config(const SimConfig& c) {
    std::ostringstream o;
    o << "domain.xmin = " << fmt(c.domain.xmin) << '\n'
      << "domain.xmax = " << fmt(c.domain.xmax) << '\n'
      << "domain.ymin = " << fmt(c.domain.ymin) << '\n'
      << "domain.ymax = " << fmt(c.domain.ymax) << '\n'
      << "mesh.nx = " << c.nx << '\n'
      << "mesh.ny = " << c.ny << '\n'
      << "pot.epsilon = " << fmt(c.pot.epsilon) << '\n'
      << "pot.phibar = " << fmt(c.pot.phibar) << '\n'
      << "mob.alpha = " << fmt(c.mob.alpha) << '\n'
      << "mob.M = " << fmt(c.mob.friction) << '\n'
      << "kernel.cutoff = " << fmt(c.kernel.cutoff) << '\n'
      << "time.dt_safety = " << fmt(c.dt_safety) << '\n'
      << "time.t_end = " << fmt(c.t_end) << '\n'
      << "ic.mean = " << fmt(c.ic_mean) << '\n'
      << "ic.amplitude = " << fmt(c.ic_amplitude) << '\n'
      << "ic.seed = " << c.rng_seed << '\n'
      << "ic.convention = " << (c.ic_convention == IcConvention::symmetric ? "symmetric" : "one_sided") << '\n'
      << "solver.tol = " << fmt(c.solver.tol) << '\n'
      << "solver.max_iters = " << c.solver.max_iters << '\n'
      << "solver.method = " << (c.solver.method == SolverMethod::newton ? "newton" : "projected_gradient") << '\n'
      << "output.dir = " << c.output_dir << '\n'
      << "output.every = " << c.snapshot_every << '\n';
    return o.str();
}

}  // namespace nlch
