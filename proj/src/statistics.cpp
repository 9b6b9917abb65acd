#include "ttergm/statistics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <queue>

namespace ttergm {

namespace {

const std::array<std::string, 11> kTermNames = {
    "Edges",
    "Mutual",
    "TransitiveTriads",
    "TwoStarsOut",
    "TwoStarsIn",
    "HomophilyInfluencer",
    "Stability",
    "TriadicDirectLinks",
    "TriadicPath2",
    "TriadicPath3",
    "InfluencerTriangle",
};

bool influencer(const CovariateTable& cov, NodeId v) {
    return cov[static_cast<std::size_t>(v)].is_influencer;
}

std::int64_t choose2(std::int64_t d) { return d * (d - 1) / 2; }

// |a ∩ b| for sorted id lists.
std::int64_t intersection_size(std::span<const NodeId> a, std::span<const NodeId> b) {
    std::int64_t count = 0;
    std::size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        if (a[i] < b[j])
            ++i;
        else if (b[j] < a[i])
            ++j;
        else {
            ++count;
            ++i;
            ++j;
        }
    }
    return count;
}

void require_universe(const DirectedGraph& current, const DirectedGraph* prev,
                      const CovariateTable& cov) {
    if (static_cast<std::size_t>(current.n()) != cov.size())
        throw DataError("covariate table does not match graph universe");
    if (prev != nullptr && prev->n() != current.n())
        throw DataError("current and previous snapshots have different universes");
}

} // namespace

const std::string& term_name(Term t) {
    return kTermNames[static_cast<std::size_t>(t)];
}

Term term_from_name(const std::string& name) {
    for (Term t : kAllTerms)
        if (term_name(t) == name)
            return t;
    throw ConfigError("unknown statistic term: " + name);
}

bool term_requires_prev(Term t) {
    switch (t) {
    case Term::Stability:
    case Term::TriadicDirectLinks:
    case Term::TriadicPath2:
    case Term::TriadicPath3:
    case Term::InfluencerTriangle:
        return true;
    default:
        return false;
    }
}

bool ModelSpec::requires_prev() const {
    return std::any_of(terms.begin(), terms.end(), term_requires_prev);
}

void ModelSpec::validate() const {
    if (theta.size() != terms.size())
        throw ConfigError("theta length does not match term list");
    for (double v : theta)
        if (!std::isfinite(v))
            throw ConfigError("non-finite model coefficient");
}

namespace {

double full_statistic(Term term, const DirectedGraph& g, const DirectedGraph* prev,
                      const CovariateTable& cov) {
    const NodeId n = g.n();
    std::int64_t count = 0;
    switch (term) {
    case Term::Edges:
        return static_cast<double>(g.edge_count());

    case Term::Mutual:
        for (NodeId u = 0; u < n; ++u)
            for (NodeId v : g.out_neighbors(u))
                if (u < v && g.has_edge(v, u))
                    ++count;
        return static_cast<double>(count);

    case Term::TransitiveTriads:
        // Anchor each triple (i,j,k) at its i->j edge.
        for (NodeId i = 0; i < n; ++i)
            for (NodeId j : g.out_neighbors(i))
                count += intersection_size(g.out_neighbors(i), g.out_neighbors(j));
        return static_cast<double>(count);

    case Term::TwoStarsOut:
        for (NodeId v = 0; v < n; ++v)
            count += choose2(g.out_degree(v));
        return static_cast<double>(count);

    case Term::TwoStarsIn:
        for (NodeId v = 0; v < n; ++v)
            count += choose2(g.in_degree(v));
        return static_cast<double>(count);

    case Term::HomophilyInfluencer:
        for (NodeId u = 0; u < n; ++u)
            for (NodeId v : g.out_neighbors(u))
                if (influencer(cov, u) == influencer(cov, v))
                    ++count;
        return static_cast<double>(count);

    case Term::Stability: {
        // Dyads in the same state in both snapshots: n(n-1) - |A xor B|.
        std::int64_t common = 0;
        for (NodeId u = 0; u < n; ++u)
            common += intersection_size(g.out_neighbors(u), prev->out_neighbors(u));
        const std::int64_t dyads = static_cast<std::int64_t>(n) * (n - 1);
        const std::int64_t sym_diff = g.edge_count() + prev->edge_count() - 2 * common;
        return static_cast<double>(dyads - sym_diff);
    }

    case Term::TriadicDirectLinks:
        for (NodeId u = 0; u < n; ++u) {
            if (!influencer(cov, u))
                continue;
            for (NodeId v : g.out_neighbors(u))
                if (!influencer(cov, v))
                    ++count;
        }
        return static_cast<double>(count);

    case Term::TriadicPath2:
        // r -> a -> x, r influencer, x non-influencer (hence x != r), all
        // distinct by the no-self-loop invariant.
        for (NodeId r = 0; r < n; ++r) {
            if (!influencer(cov, r))
                continue;
            for (NodeId a : g.out_neighbors(r))
                for (NodeId x : g.out_neighbors(a))
                    if (!influencer(cov, x))
                        ++count;
        }
        return static_cast<double>(count);

    case Term::TriadicPath3:
        // r -> a -> b -> x with r influencer, x non-influencer; b != r and
        // x != a checked explicitly, the rest is automatic.
        for (NodeId r = 0; r < n; ++r) {
            if (!influencer(cov, r))
                continue;
            for (NodeId a : g.out_neighbors(r))
                for (NodeId b : g.out_neighbors(a)) {
                    if (b == r)
                        continue;
                    for (NodeId x : g.out_neighbors(b))
                        if (!influencer(cov, x) && x != a)
                            ++count;
                }
        }
        return static_cast<double>(count);

    case Term::InfluencerTriangle:
        // (r,f,x): r influencer, r->f, r->x, f->x now, r->x already in prev.
        for (NodeId r = 0; r < n; ++r) {
            if (!influencer(cov, r))
                continue;
            for (NodeId f : g.out_neighbors(r))
                for (NodeId x : g.out_neighbors(f))
                    if (g.has_edge(r, x) && prev->has_edge(r, x))
                        ++count;
        }
        return static_cast<double>(count);
    }
    return 0.0;
}

double change_statistic(Term term, const DirectedGraph& g, const DirectedGraph* prev,
                        const CovariateTable& cov, NodeId u, NodeId v) {
    std::int64_t count = 0;
    switch (term) {
    case Term::Edges:
        return 1.0;

    case Term::Mutual:
        return g.has_edge(v, u) ? 1.0 : 0.0;

    case Term::TransitiveTriads:
        return static_cast<double>(
            intersection_size(g.out_neighbors(u), g.out_neighbors(v)) +
            intersection_size(g.in_neighbors(u), g.in_neighbors(v)) +
            intersection_size(g.out_neighbors(u), g.in_neighbors(v)));

    case Term::TwoStarsOut:
        return static_cast<double>(g.out_degree(u) - (g.has_edge(u, v) ? 1 : 0));

    case Term::TwoStarsIn:
        return static_cast<double>(g.in_degree(v) - (g.has_edge(u, v) ? 1 : 0));

    case Term::HomophilyInfluencer:
        return influencer(cov, u) == influencer(cov, v) ? 1.0 : 0.0;

    case Term::Stability:
        return prev->has_edge(u, v) ? 1.0 : -1.0;

    case Term::TriadicDirectLinks:
        return (influencer(cov, u) && !influencer(cov, v)) ? 1.0 : 0.0;

    case Term::TriadicPath2:
        // As r->a: paths u -> v -> x. As a->x: paths r -> u -> v.
        if (influencer(cov, u))
            for (NodeId x : g.out_neighbors(v))
                if (!influencer(cov, x))
                    ++count;
        if (!influencer(cov, v))
            for (NodeId r : g.in_neighbors(u))
                if (influencer(cov, r) && r != v)
                    ++count;
        return static_cast<double>(count);

    case Term::TriadicPath3: {
        if (influencer(cov, u)) {
            // u -> v -> b -> x
            for (NodeId b : g.out_neighbors(v)) {
                if (b == u)
                    continue;
                for (NodeId x : g.out_neighbors(b))
                    if (!influencer(cov, x) && x != v)
                        ++count;
            }
        }
        // r -> u -> v -> x
        std::int64_t sources = 0;
        for (NodeId r : g.in_neighbors(u))
            if (influencer(cov, r) && r != v)
                ++sources;
        if (sources > 0) {
            std::int64_t sinks = 0;
            for (NodeId x : g.out_neighbors(v))
                if (!influencer(cov, x) && x != u)
                    ++sinks;
            count += sources * sinks;
        }
        if (!influencer(cov, v)) {
            // r -> a -> u -> v
            for (NodeId a : g.in_neighbors(u)) {
                if (a == v)
                    continue;
                for (NodeId r : g.in_neighbors(a))
                    if (influencer(cov, r) && r != u)
                        ++count;
            }
        }
        return static_cast<double>(count);
    }

    case Term::InfluencerTriangle: {
        // As r->f: closures through x in out(u) ∩ out(v) ∩ prev_out(u).
        if (influencer(cov, u)) {
            for (NodeId x : g.out_neighbors(v))
                if (g.has_edge(u, x) && prev->has_edge(u, x))
                    ++count;
            // As r->x: (u, f, v) with u->f->v and the prior-period edge u->v.
            if (prev->has_edge(u, v))
                for (NodeId f : g.out_neighbors(u))
                    if (f != v && g.has_edge(f, v))
                        ++count;
        }
        // As f->x: influencers r with r->u, r->v now and r->v in prev.
        for (NodeId r : g.in_neighbors(v))
            if (influencer(cov, r) && r != u && g.has_edge(r, u) && prev->has_edge(r, v))
                ++count;
        return static_cast<double>(count);
    }

    default:
        break;
    }
    return 0.0;
}

void require_prev_terms(const ModelSpec& spec, const DirectedGraph* prev) {
    if (prev == nullptr && spec.requires_prev())
        throw ConfigError("temporal term used without a previous snapshot");
}

} // namespace

StatisticVector compute_statistics(const DirectedGraph& current, const DirectedGraph* prev,
                                   const CovariateTable& cov, const ModelSpec& spec) {
    require_universe(current, prev, cov);
    require_prev_terms(spec, prev);
    StatisticVector values;
    values.reserve(spec.size());
    for (Term t : spec.terms)
        values.push_back(full_statistic(t, current, prev, cov));
    return values;
}

void change_statistics_into(const DirectedGraph& current, const DirectedGraph* prev,
                            const CovariateTable& cov, const ModelSpec& spec, Dyad dyad,
                            std::span<double> out) {
    const auto [u, v] = dyad;
    if (u == v)
        throw DataError("change statistics of a self-loop dyad");
    if (u < 0 || u >= current.n() || v < 0 || v >= current.n())
        throw DataError("dyad out of range");
    for (std::size_t i = 0; i < spec.terms.size(); ++i)
        out[i] = change_statistic(spec.terms[i], current, prev, cov, u, v);
}

StatisticVector change_statistics(const DirectedGraph& current, const DirectedGraph* prev,
                                  const CovariateTable& cov, const ModelSpec& spec,
                                  Dyad dyad) {
    require_universe(current, prev, cov);
    require_prev_terms(spec, prev);
    StatisticVector values(spec.size());
    change_statistics_into(current, prev, cov, spec, dyad, values);
    return values;
}

TopologyReport topology_report(const DirectedGraph& g) {
    const NodeId n = g.n();
    TopologyReport rep;
    rep.n_nodes = n;
    rep.n_edges = g.edge_count();
    const double nan = std::numeric_limits<double>::quiet_NaN();

    // Average shortest path over reachable ordered pairs (directed BFS).
    std::int64_t pair_count = 0;
    std::int64_t dist_total = 0;
    std::vector<std::int32_t> dist(static_cast<std::size_t>(n));
    for (NodeId s = 0; s < n; ++s) {
        std::fill(dist.begin(), dist.end(), -1);
        dist[s] = 0;
        std::queue<NodeId> q;
        q.push(s);
        while (!q.empty()) {
            const NodeId x = q.front();
            q.pop();
            for (NodeId y : g.out_neighbors(x)) {
                if (dist[y] < 0) {
                    dist[y] = dist[x] + 1;
                    dist_total += dist[y];
                    ++pair_count;
                    q.push(y);
                }
            }
        }
    }
    rep.avg_shortest_path =
        pair_count > 0 ? static_cast<double>(dist_total) / static_cast<double>(pair_count) : nan;

    // Degree assortativity: Pearson correlation of (outdeg(u), indeg(v)) over edges.
    {
        double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
        std::int64_t m = 0;
        for (NodeId u = 0; u < n; ++u) {
            const double x = g.out_degree(u);
            for (NodeId v : g.out_neighbors(u)) {
                const double y = g.in_degree(v);
                sx += x;
                sy += y;
                sxx += x * x;
                syy += y * y;
                sxy += x * y;
                ++m;
            }
        }
        if (m == 0) {
            rep.assortativity = nan;
        } else {
            const double dm = static_cast<double>(m);
            const double vx = sxx - sx * sx / dm;
            const double vy = syy - sy * sy / dm;
            const double cxy = sxy - sx * sy / dm;
            rep.assortativity = (vx > 0 && vy > 0) ? cxy / std::sqrt(vx * vy) : nan;
        }
    }

    // Weakly connected components.
    {
        std::vector<bool> seen(static_cast<std::size_t>(n), false);
        std::int64_t comps = 0;
        for (NodeId s = 0; s < n; ++s) {
            if (seen[s])
                continue;
            ++comps;
            std::queue<NodeId> q;
            q.push(s);
            seen[s] = true;
            while (!q.empty()) {
                const NodeId x = q.front();
                q.pop();
                for (NodeId y : g.out_neighbors(x))
                    if (!seen[y]) {
                        seen[y] = true;
                        q.push(y);
                    }
                for (NodeId y : g.in_neighbors(x))
                    if (!seen[y]) {
                        seen[y] = true;
                        q.push(y);
                    }
            }
        }
        rep.n_components = comps;
    }

    // Mean local clustering on the undirected projection; degree < 2 counts 0.
    {
        std::vector<std::vector<NodeId>> und(static_cast<std::size_t>(n));
        for (NodeId u = 0; u < n; ++u) {
            auto& nb = und[u];
            const auto outs = g.out_neighbors(u);
            const auto ins = g.in_neighbors(u);
            nb.resize(outs.size() + ins.size());
            std::merge(outs.begin(), outs.end(), ins.begin(), ins.end(), nb.begin());
            nb.erase(std::unique(nb.begin(), nb.end()), nb.end());
        }
        double total = 0.0;
        for (NodeId v = 0; v < n; ++v) {
            const auto& nb = und[v];
            const std::int64_t k = static_cast<std::int64_t>(nb.size());
            if (k < 2)
                continue;
            std::int64_t links = 0;
            for (NodeId a : nb)
                links += intersection_size(und[a], nb);
            // Each neighbor pair counted twice in the scan above.
            total += static_cast<double>(links) / 2.0 / static_cast<double>(choose2(k));
        }
        rep.avg_clustering = n > 0 ? total / static_cast<double>(n) : nan;
    }

    return rep;
}

} // namespace ttergm
