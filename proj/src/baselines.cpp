#include "ttergm/baselines.hpp"

#include <cmath>

#include "ttergm/rng.hpp"

namespace ttergm {

void BlockModel::validate() const {
    for (int b : block_of)
        if (b < 0 || b >= n_blocks())
            throw DataError("node assigned to an unknown block");
    for (const auto& row : p) {
        if (row.size() != static_cast<std::size_t>(n_blocks()))
            throw DataError("block rate matrix is not square");
        for (double v : row)
            if (!(v >= 0.0 && v <= 1.0))
                throw DataError("block rate outside [0,1]");
    }
}

BlockModel fit_block_model(const TemporalNetwork& data) {
    data.validate();
    if (data.snapshots.empty())
        throw DataError("empty temporal network");
    const NodeId n = data.universe.n();
    const auto& cov = data.universe.covariates;

    BlockModel m;
    m.block_of.resize(static_cast<std::size_t>(n));
    std::vector<std::int64_t> block_size(2, 0);
    for (NodeId v = 0; v < n; ++v) {
        const int b = cov[static_cast<std::size_t>(v)].is_influencer ? 1 : 0;
        m.block_of[static_cast<std::size_t>(v)] = b;
        ++block_size[static_cast<std::size_t>(b)];
    }

    std::vector<std::vector<std::int64_t>> edges(2, std::vector<std::int64_t>(2, 0));
    const std::size_t first_target = data.snapshots.size() == 1 ? 0 : 1;
    const std::int64_t n_targets =
        static_cast<std::int64_t>(data.snapshots.size() - first_target);
    for (std::size_t t = first_target; t < data.snapshots.size(); ++t) {
        const DirectedGraph& g = data.snapshots[t].graph;
        for (NodeId u = 0; u < n; ++u) {
            const int bu = m.block_of[static_cast<std::size_t>(u)];
            for (NodeId v : g.out_neighbors(u))
                ++edges[static_cast<std::size_t>(bu)]
                       [static_cast<std::size_t>(m.block_of[static_cast<std::size_t>(v)])];
        }
    }

    m.p.assign(2, std::vector<double>(2, 0.0));
    for (int a = 0; a < 2; ++a) {
        for (int b = 0; b < 2; ++b) {
            const std::int64_t na = block_size[static_cast<std::size_t>(a)];
            const std::int64_t nb = block_size[static_cast<std::size_t>(b)];
            const std::int64_t cells = (a == b) ? na * (na - 1) : na * nb;
            if (cells == 0) {
                m.empty_block = m.empty_block || na == 0 || nb == 0;
                m.p[a][b] = 0.0;
            } else {
                m.p[a][b] = static_cast<double>(edges[a][b]) /
                            (static_cast<double>(cells) * static_cast<double>(n_targets));
            }
        }
    }
    m.validate();
    return m;
}

std::vector<DirectedGraph> sample_block_model(const BlockModel& m, std::int64_t n_samples,
                                              std::uint64_t seed) {
    m.validate();
    if (n_samples < 1)
        throw ConfigError("n_samples must be >= 1");
    const NodeId n = static_cast<NodeId>(m.block_of.size());

    std::vector<DirectedGraph> out;
    out.reserve(static_cast<std::size_t>(n_samples));
    for (std::int64_t s = 0; s < n_samples; ++s) {
        Rng rng = Rng::derive(seed, static_cast<std::uint64_t>(s));
        DirectedGraph g(n);
        for (NodeId u = 0; u < n; ++u) {
            const auto& row = m.p[static_cast<std::size_t>(
                m.block_of[static_cast<std::size_t>(u)])];
            for (NodeId v = 0; v < n; ++v) {
                if (u == v)
                    continue;
                if (rng.bernoulli(row[static_cast<std::size_t>(
                        m.block_of[static_cast<std::size_t>(v)])]))
                    g.add_edge(u, v);
            }
        }
        out.push_back(std::move(g));
    }
    return out;
}

ModelSpec classic_tergm_spec() {
    ModelSpec spec;
    spec.terms = {Term::Edges, Term::Mutual, Term::TransitiveTriads,
                  Term::HomophilyInfluencer, Term::Stability};
    spec.theta.assign(spec.terms.size(), 0.0);
    return spec;
}

ModelSpec ttergm_spec() {
    ModelSpec spec = classic_tergm_spec();
    spec.terms.push_back(Term::TriadicDirectLinks);
    spec.terms.push_back(Term::TriadicPath2);
    spec.terms.push_back(Term::TriadicPath3);
    spec.terms.push_back(Term::InfluencerTriangle);
    spec.theta.assign(spec.terms.size(), 0.0);
    return spec;
}

} // namespace ttergm
