#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "ecokg/graph_store.hpp"
#include "ecokg/neighbor_matrix.hpp"

namespace ecokg {

/// Rooted species hierarchy built from child -> parent links.
///
/// Paths to the root include both endpoints, so |P(root)| = 1 and a node's path length is
/// its depth plus one.
class Taxonomy {
public:
    /// Throws InputError on cycles, multiple parents, or anything other than exactly one root.
    static Taxonomy from_edges(const std::vector<std::pair<std::string, std::string>>& child_parent);
    /// Reads `<child>\t<parent>` lines (`#` comments allowed).
    static Taxonomy load_tsv(const std::filesystem::path& path);

    std::size_t size() const noexcept { return labels_.size(); }
    std::size_t root() const noexcept { return root_; }
    const std::string& label(std::size_t node) const { return labels_.at(node); }
    std::size_t node(const std::string& label) const;
    bool contains(const std::string& label) const { return interner_.find(label).has_value(); }

    /// Leaf nodes in first-seen order.
    const std::vector<std::size_t>& leaves() const noexcept { return leaves_; }
    std::vector<std::string> leaf_labels() const;
    const std::vector<std::pair<std::string, std::string>>& edges() const noexcept { return edges_; }

    /// Nodes from `node` up to and including the root.
    std::vector<std::size_t> path_to_root(std::size_t node) const;
    std::vector<std::size_t> path_to_root(const std::string& label) const { return path_to_root(node(label)); }

    /// 1 / (|P(a)| + |P(b)| - 2|P(a) n P(b)| + 1).
    double similarity(std::size_t a, std::size_t b) const;
    double similarity(const std::string& a, const std::string& b) const { return similarity(node(a), node(b)); }

    /// Pairwise similarity between the given labels (defaults to all leaves).
    NeighborMatrix adjacency(const std::vector<std::string>& species) const;
    NeighborMatrix adjacency() const { return adjacency(leaf_labels()); }

private:
    Interner interner_;
    std::vector<std::string> labels_;
    std::vector<std::ptrdiff_t> parent_;
    std::vector<std::size_t> depth_;
    std::vector<std::size_t> leaves_;
    std::vector<std::pair<std::string, std::string>> edges_;
    std::size_t root_ = 0;
};

}  // namespace ecokg
