#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include "nlch/errors.hpp"
#include "nlch/io.hpp"

namespace nlch {

namespace {

std::string g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

double read_double(const std::string& s, const std::string& path, std::size_t line) {
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
        throw IoError("malformed number '" + s + "' on line " + std::to_string(line), path);
    }
    return v;
}

}  // namespace

void write_file_atomic(const std::filesystem::path& path, const std::string& contents) {
    std::error_code ec;
    if (path.has_parent_path()) {
        std::filesystem::create_directories(path.parent_path(), ec);
        if (ec) throw IoError("cannot create directory (" + ec.message() + ")", path.parent_path().string());
    }
    std::random_device rd;
    std::filesystem::path tmp = path;
    tmp += ".tmp" + std::to_string(rd());
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot open for writing", tmp.string());
        out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
        out.flush();
        if (!out) {
            std::filesystem::remove(tmp, ec);
            throw IoError("write failed", tmp.string());
        }
    }
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp, ec);
        throw IoError("cannot rename temporary file into place", path.string());
    }
}

void write_snapshot_csv(const Snapshot& snap, const Mesh& mesh, const std::filesystem::path& path) {
    const std::size_t n = mesh.num_nodes();
    if (snap.phi.size() != n || snap.mu.size() != n) {
        throw std::invalid_argument("write_snapshot_csv: snapshot does not match the mesh");
    }
    std::string text = "x,y,phi,mu\n";
    text.reserve(n * 80);
    for (std::size_t j = 0; j < n; ++j) {
        text += g17(mesh.nodes[j].x);
        text += ',';
        text += g17(mesh.nodes[j].y);
        text += ',';
        text += g17(snap.phi[j]);
        text += ',';
        text += g17(snap.mu[j]);
        text += '\n';
    }
    write_file_atomic(path, text);
}

std::pair<Snapshot, Mesh> read_snapshot_csv(const std::filesystem::path& path) {
    const std::string p = path.string();
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open snapshot", p);
    std::string line;
    if (!std::getline(in, line) || line != "x,y,phi,mu") throw IoError("missing header 'x,y,phi,mu'", p);

    std::vector<Point2D> pts;
    Snapshot snap;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::array<std::string, 4> cols;
        std::istringstream ss(line);
        for (auto& c : cols) {
            if (!std::getline(ss, c, ',')) throw IoError("expected 4 columns on line " + std::to_string(lineno), p);
        }
        pts.push_back({read_double(cols[0], p, lineno), read_double(cols[1], p, lineno)});
        snap.phi.push_back(read_double(cols[2], p, lineno));
        snap.mu.push_back(read_double(cols[3], p, lineno));
    }
    if (pts.size() < 4) throw IoError("snapshot has too few nodes", p);

    std::set<double> xs, ys;
    for (const auto& q : pts) {
        xs.insert(q.x);
        ys.insert(q.y);
    }
    Domain2D dom{*xs.begin(), *xs.rbegin(), *ys.begin(), *ys.rbegin()};
    const std::size_t nx = xs.size() - 1, ny = ys.size() - 1;
    if ((nx + 1) * (ny + 1) != pts.size() || nx == 0 || ny == 0) {
        throw IoError("snapshot nodes do not form a structured grid", p);
    }
    Mesh mesh = build_uniform_mesh(dom, nx, ny);
    const double tol = 1e-9 * std::max(dom.xmax - dom.xmin, dom.ymax - dom.ymin);
    for (std::size_t j = 0; j < pts.size(); ++j) {
        if (std::abs(pts[j].x - mesh.nodes[j].x) > tol || std::abs(pts[j].y - mesh.nodes[j].y) > tol) {
            throw IoError("snapshot node " + std::to_string(j) + " is not in mesh order", p);
        }
    }
    return {std::move(snap), std::move(mesh)};
}

LineProfile extract_profile(const Snapshot& snap, const Mesh& mesh, double x0) {
    if (!(x0 >= mesh.domain.xmin && x0 <= mesh.domain.xmax)) {
        throw std::invalid_argument("extract_profile: x0 outside the domain");
    }
    if (snap.phi.size() != mesh.num_nodes()) throw std::invalid_argument("extract_profile: snapshot does not match the mesh");
    const double pos = (x0 - mesh.domain.xmin) / mesh.hx;
    const auto ix = std::min(mesh.nx, static_cast<std::size_t>(std::floor(pos + 0.5)));
    LineProfile out;
    out.x0 = mesh.nodes[mesh.node_index(ix, 0)].x;
    for (std::size_t iy = 0; iy <= mesh.ny; ++iy) {
        const std::size_t j = mesh.node_index(ix, iy);
        out.samples.emplace_back(mesh.nodes[j].y, snap.phi[j]);
    }
    return out;
}

void emit_heatmap(const Snapshot& snap, const Mesh& mesh, const std::filesystem::path& path) {
    if (snap.phi.size() != mesh.num_nodes()) throw std::invalid_argument("emit_heatmap: snapshot does not match the mesh");
    const std::size_t w = mesh.nx + 1, h = mesh.ny + 1;
    std::string img = "P5\n" + std::to_string(w) + " " + std::to_string(h) + "\n255\n";
    img.reserve(img.size() + w * h);
    for (std::size_t r = 0; r < h; ++r) {
        const std::size_t iy = mesh.ny - r;
        for (std::size_t ix = 0; ix < w; ++ix) {
            const double v = std::clamp(snap.phi[mesh.node_index(ix, iy)], 0.0, 1.0);
            img += static_cast<char>(static_cast<unsigned char>(std::floor(255.0 * v + 0.5)));
        }
    }
    write_file_atomic(path, img);
}

void write_diagnostics_csv(const Diagnostics& d, const std::filesystem::path& path) {
    std::string text = "step,time,dt,lyapunov,mass,min_phi,max_phi,iters\n";
    for (std::size_t k = 0; k < d.size(); ++k) {
        text += std::to_string(d.step[k]) + ',' + g17(d.time[k]) + ',' + g17(d.dt[k]) + ',' + g17(d.lyapunov[k]) +
                ',' + g17(d.mass[k]) + ',' + g17(d.min_phi[k]) + ',' + g17(d.max_phi[k]) + ',' +
                std::to_string(d.iterations[k]) + '\n';
    }
    write_file_atomic(path, text);
}

}  // namespace nlch
