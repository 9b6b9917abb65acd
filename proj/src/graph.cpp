#include "ttergm/graph.hpp"

#include <algorithm>

namespace ttergm {

void Universe::validate() const {
    if (!names.empty() && names.size() != covariates.size())
        throw DataError("universe name table size does not match covariate table");
    for (const auto& c : covariates)
        c.validate();
}

DirectedGraph::DirectedGraph(NodeId n) : n_(n), out_(n), in_(n) {
    if (n < 0)
        throw DataError("negative node count");
}

void DirectedGraph::check_dyad(NodeId u, NodeId v) const {
    if (u < 0 || u >= n_ || v < 0 || v >= n_)
        throw DataError("node id out of range");
    if (u == v)
        throw DataError("self-loops are not allowed");
}

namespace {

bool sorted_contains(const std::vector<NodeId>& xs, NodeId x) {
    return std::binary_search(xs.begin(), xs.end(), x);
}

void sorted_insert(std::vector<NodeId>& xs, NodeId x) {
    xs.insert(std::lower_bound(xs.begin(), xs.end(), x), x);
}

void sorted_erase(std::vector<NodeId>& xs, NodeId x) {
    auto it = std::lower_bound(xs.begin(), xs.end(), x);
    xs.erase(it);
}

} // namespace

bool DirectedGraph::has_edge(NodeId u, NodeId v) const {
    check_dyad(u, v);
    return sorted_contains(out_[u], v);
}

void DirectedGraph::add_edge(NodeId u, NodeId v) {
    check_dyad(u, v);
    if (sorted_contains(out_[u], v))
        return;
    sorted_insert(out_[u], v);
    sorted_insert(in_[v], u);
    ++edge_count_;
}

void DirectedGraph::remove_edge(NodeId u, NodeId v) {
    check_dyad(u, v);
    if (!sorted_contains(out_[u], v))
        return;
    sorted_erase(out_[u], v);
    sorted_erase(in_[v], u);
    --edge_count_;
}

DirectedGraph::ToggleReport DirectedGraph::toggle_edge(NodeId u, NodeId v) {
    check_dyad(u, v);
    if (sorted_contains(out_[u], v)) {
        sorted_erase(out_[u], v);
        sorted_erase(in_[v], u);
        --edge_count_;
        return {true};
    }
    sorted_insert(out_[u], v);
    sorted_insert(in_[v], u);
    ++edge_count_;
    return {false};
}

std::int64_t DirectedGraph::recount_edges() const {
    std::int64_t from_out = 0;
    std::int64_t from_in = 0;
    for (NodeId v = 0; v < n_; ++v) {
        from_out += static_cast<std::int64_t>(out_[v].size());
        from_in += static_cast<std::int64_t>(in_[v].size());
    }
    if (from_out != from_in)
        throw DataError("adjacency out/in totals disagree");
    return from_out;
}

std::vector<Dyad> DirectedGraph::edges() const {
    std::vector<Dyad> es;
    es.reserve(static_cast<std::size_t>(edge_count_));
    for (NodeId u = 0; u < n_; ++u)
        for (NodeId v : out_[u])
            es.emplace_back(u, v);
    return es;
}

std::vector<Dyad> dyad_iter(const DirectedGraph& g) {
    std::vector<Dyad> ds;
    const NodeId n = g.n();
    ds.reserve(static_cast<std::size_t>(n) * (n > 0 ? n - 1 : 0));
    for (NodeId u = 0; u < n; ++u)
        for (NodeId v = 0; v < n; ++v)
            if (u != v)
                ds.emplace_back(u, v);
    return ds;
}

SnapshotDiff snapshot_diff(const Snapshot& a, const Snapshot& b) {
    if (a.graph.n() != b.graph.n())
        throw DataError("snapshot_diff: universe mismatch");
    SnapshotDiff d;
    for (NodeId u = 0; u < b.graph.n(); ++u)
        for (NodeId v : b.graph.out_neighbors(u))
            if (!a.graph.has_edge(u, v))
                d.added.emplace_back(u, v);
    for (NodeId u = 0; u < a.graph.n(); ++u)
        for (NodeId v : a.graph.out_neighbors(u))
            if (!b.graph.has_edge(u, v))
                d.removed.emplace_back(u, v);
    return d;
}

void TemporalNetwork::validate() const {
    universe.validate();
    const NodeId n = universe.n();
    std::string prev_label;
    for (std::size_t i = 0; i < snapshots.size(); ++i) {
        if (snapshots[i].graph.n() != n)
            throw DataError("snapshot node count does not match universe");
        if (i > 0 && snapshots[i].label <= prev_label)
            throw DataError("snapshot labels must strictly increase");
        prev_label = snapshots[i].label;
    }
}

} // namespace ttergm
