#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ttergm/errors.hpp"

namespace ttergm {

using NodeId = std::int32_t;
using Dyad = std::pair<NodeId, NodeId>;

enum class NodeKind : std::uint8_t { User, Repo };

struct NodeCovariates {
    NodeKind kind = NodeKind::User;
    bool is_influencer = false;
    std::int64_t follower_count = 0;

    void validate() const {
        if (is_influencer && kind != NodeKind::User)
            throw DataError("influencer covariate set on a non-user node");
        if (kind == NodeKind::Repo && follower_count != 0)
            throw DataError("repo node with nonzero follower count");
    }
};

// Covariate table plus the string ids interned at ingestion. `names` may be
// empty for synthetic universes.
struct Universe {
    std::vector<NodeCovariates> covariates;
    std::vector<std::string> names;

    NodeId n() const { return static_cast<NodeId>(covariates.size()); }
    void validate() const;
};

using CovariateTable = std::vector<NodeCovariates>;

// Directed graph over a fixed node universe 0..n-1. Out- and in-neighbor
// lists are kept sorted; both directions are maintained so triadic change
// statistics never scan the transpose.
class DirectedGraph {
public:
    DirectedGraph() = default;
    explicit DirectedGraph(NodeId n);

    NodeId n() const { return n_; }
    std::int64_t edge_count() const { return edge_count_; }

    bool has_edge(NodeId u, NodeId v) const;
    void add_edge(NodeId u, NodeId v);
    void remove_edge(NodeId u, NodeId v);

    // Flips the dyad state; reports whether the edge was present before.
    struct ToggleReport {
        bool was_present;
    };
    ToggleReport toggle_edge(NodeId u, NodeId v);

    std::span<const NodeId> out_neighbors(NodeId u) const { return out_[u]; }
    std::span<const NodeId> in_neighbors(NodeId v) const { return in_[v]; }
    NodeId out_degree(NodeId u) const { return static_cast<NodeId>(out_[u].size()); }
    NodeId in_degree(NodeId v) const { return static_cast<NodeId>(in_[v].size()); }

    bool operator==(const DirectedGraph& other) const = default;

    // Recount from adjacency, ignoring the cached counter.
    std::int64_t recount_edges() const;

    std::vector<Dyad> edges() const;

private:
    void check_dyad(NodeId u, NodeId v) const;

    NodeId n_ = 0;
    std::int64_t edge_count_ = 0;
    std::vector<std::vector<NodeId>> out_;
    std::vector<std::vector<NodeId>> in_;
};

// All n(n-1) ordered dyads in lexicographic order; the Gibbs sweep order.
std::vector<Dyad> dyad_iter(const DirectedGraph& g);

struct Snapshot {
    DirectedGraph graph;
    std::string label;
};

struct SnapshotDiff {
    std::vector<Dyad> added;
    std::vector<Dyad> removed;
};

// Edge formation/elimination between two snapshots of the same universe.
SnapshotDiff snapshot_diff(const Snapshot& a, const Snapshot& b);

struct TemporalNetwork {
    Universe universe;
    std::vector<Snapshot> snapshots;

    void validate() const;
};

} // namespace ttergm
