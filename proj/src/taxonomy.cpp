#include "ecokg/taxonomy.hpp"

#include <fstream>
#include <stdexcept>

#include "ecokg/errors.hpp"

namespace ecokg {

Taxonomy Taxonomy::from_edges(const std::vector<std::pair<std::string, std::string>>& child_parent) {
    Taxonomy t;
    for (const auto& [child, parent] : child_parent) {
        const auto c = t.interner_.intern(child);
        const auto p = t.interner_.intern(parent);
        t.parent_.resize(t.interner_.size(), -1);
        if (c == p) throw InputError("taxonomy node is its own parent: " + child);
        if (t.parent_[c] >= 0 && static_cast<std::uint32_t>(t.parent_[c]) != p) {
            throw InputError("taxonomy node has two parents: " + child);
        }
        if (t.parent_[c] < 0) t.edges_.emplace_back(t.interner_.label(c), t.interner_.label(p));
        t.parent_[c] = p;
    }
    t.labels_ = t.interner_.labels();
    if (t.labels_.empty()) throw InputError("empty taxonomy");

    std::vector<std::size_t> roots;
    for (std::size_t i = 0; i < t.labels_.size(); ++i) {
        if (t.parent_[i] < 0) roots.push_back(i);
    }
    if (roots.size() != 1) {
        throw InputError("taxonomy must have exactly one root, found " + std::to_string(roots.size()));
    }
    t.root_ = roots.front();

    // Depths, with cycle detection: a walk longer than the node count never reaches the root.
    const std::size_t n = t.labels_.size();
    constexpr std::size_t unknown = static_cast<std::size_t>(-1);
    t.depth_.assign(n, unknown);
    t.depth_[t.root_] = 0;
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<std::size_t> chain;
        std::size_t cur = i;
        while (t.depth_[cur] == unknown) {
            chain.push_back(cur);
            if (chain.size() > n) throw InputError("taxonomy contains a cycle through " + t.labels_[i]);
            cur = static_cast<std::size_t>(t.parent_[cur]);
        }
        std::size_t d = t.depth_[cur];
        for (auto it = chain.rbegin(); it != chain.rend(); ++it) t.depth_[*it] = ++d;
    }

    std::vector<bool> has_child(n, false);
    for (std::size_t i = 0; i < n; ++i) {
        if (t.parent_[i] >= 0) has_child[static_cast<std::size_t>(t.parent_[i])] = true;
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (!has_child[i]) t.leaves_.push_back(i);
    }
    return t;
}

Taxonomy Taxonomy::load_tsv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InputError(path.string() + ": cannot open file");
    std::vector<std::pair<std::string, std::string>> edges;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (trim(line).empty() || line.front() == '#') continue;
        const auto fields = split_tabs(line);
        if (fields.size() != 2 || trim(fields[0]).empty() || trim(fields[1]).empty()) {
            throw InputError(path.string(), line_no, "expected <child>\\t<parent>");
        }
        edges.emplace_back(std::string(trim(fields[0])), std::string(trim(fields[1])));
    }
    try {
        return from_edges(edges);
    } catch (const InputError& e) {
        throw InputError(path.string() + ": " + e.what());
    }
}

std::size_t Taxonomy::node(const std::string& label) const {
    if (auto id = interner_.find(label)) return *id;
    throw InputError("unknown taxonomy node: " + label);
}

std::vector<std::string> Taxonomy::leaf_labels() const {
    std::vector<std::string> out;
    out.reserve(leaves_.size());
    for (auto l : leaves_) out.push_back(labels_[l]);
    return out;
}

std::vector<std::size_t> Taxonomy::path_to_root(std::size_t node) const {
    if (node >= size()) throw InputError("taxonomy node index out of range");
    std::vector<std::size_t> path{node};
    while (parent_[path.back()] >= 0) path.push_back(static_cast<std::size_t>(parent_[path.back()]));
    return path;
}

double Taxonomy::similarity(std::size_t a, std::size_t b) const {
    if (a >= size() || b >= size()) throw InputError("taxonomy node index out of range");
    const std::size_t len_a = depth_[a] + 1;
    const std::size_t len_b = depth_[b] + 1;
    // The shared part of two root paths in a tree is the path from their lowest common ancestor.
    std::size_t x = a;
    std::size_t y = b;
    while (depth_[x] > depth_[y]) x = static_cast<std::size_t>(parent_[x]);
    while (depth_[y] > depth_[x]) y = static_cast<std::size_t>(parent_[y]);
    while (x != y) {
        x = static_cast<std::size_t>(parent_[x]);
        y = static_cast<std::size_t>(parent_[y]);
    }
    const std::size_t shared = depth_[x] + 1;
    return 1.0 / static_cast<double>(len_a + len_b - 2 * shared + 1);
}

NeighborMatrix Taxonomy::adjacency(const std::vector<std::string>& species) const {
    NeighborMatrix m(species);
    std::vector<std::size_t> ids;
    ids.reserve(species.size());
    for (const auto& s : species) ids.push_back(node(s));
    for (std::size_t i = 0; i < ids.size(); ++i) {
        m(i, i) = similarity(ids[i], ids[i]);
        for (std::size_t j = i + 1; j < ids.size(); ++j) {
            m(i, j) = m(j, i) = similarity(ids[i], ids[j]);
        }
    }
    return m;
}

}  // namespace ecokg
