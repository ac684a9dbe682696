#include <algorithm>
#include <numeric>
#include <stdexcept>

#include "nlch/solver.hpp"

namespace nlch {

NodalField NodePartition::component_mask(std::size_t m) const {
    NodalField mask(component_of.size(), 0.0);
    for (std::size_t j : components.at(m)) mask[j] = 1.0;
    return mask;
}

namespace {

class DisjointSets {
public:
    explicit DisjointSets(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }

    std::size_t find(std::size_t x) {
        while (parent_[x] != x) {
            parent_[x] = parent_[parent_[x]];
            x = parent_[x];
        }
        return x;
    }

    void unite(std::size_t a, std::size_t b) {
        a = find(a);
        b = find(b);
        if (a != b) parent_[std::max(a, b)] = std::min(a, b);
    }

private:
    std::vector<std::size_t> parent_;
};

}  // namespace

NodePartition classify_nodes(std::span<const double> phi_prev, const Mesh& mesh, const MobilityParams& mob) {
    const std::size_t n = mesh.num_nodes();
    if (phi_prev.size() != n) throw std::invalid_argument("classify_nodes: field size does not match the mesh");
    for (double v : phi_prev) {
        if (!(v >= 0.0)) throw std::invalid_argument("classify_nodes: phi_prev must be nonnegative");
    }

    std::vector<char> active(n, 0);
    for (std::size_t j = 0; j < n; ++j) {
        if (phi_prev[j] > 0.0) {
            active[j] = 1;
            for (std::size_t k : mesh.adjacency[j]) active[k] = 1;
        }
    }

    DisjointSets sets(n);
    const bool degenerate = mob.alpha > 0.0;
    for (const auto& t : mesh.elements) {
        const bool carries_phi = phi_prev[t[0]] > 0.0 || phi_prev[t[1]] > 0.0 || phi_prev[t[2]] > 0.0;
        if (degenerate && !carries_phi) continue;
        for (int a = 0; a < 3; ++a) {
            for (int b = a + 1; b < 3; ++b) {
                if (active[t[a]] && active[t[b]]) sets.unite(t[a], t[b]);
            }
        }
    }

    NodePartition part;
    part.component_of.assign(n, -1);
    std::vector<int> root_to_component(n, -1);
    for (std::size_t j = 0; j < n; ++j) {
        if (!active[j]) {
            part.passive.push_back(j);
            continue;
        }
        const std::size_t r = sets.find(j);
        if (root_to_component[r] < 0) {
            root_to_component[r] = static_cast<int>(part.components.size());
            part.components.emplace_back();
        }
        part.component_of[j] = root_to_component[r];
        part.components[static_cast<std::size_t>(root_to_component[r])].push_back(j);
    }
    return part;
}

}  // namespace nlch
