#pragma once

// Shared test helpers: small graph builders, random fixtures, and temp dirs.

#include <unistd.h>

#include <atomic>
#include <filesystem>
#include <initializer_list>
#include <string>
#include <vector>

#include "ttergm/graph.hpp"
#include "ttergm/rng.hpp"
#include "ttergm/sampler.hpp"

namespace ttergm::test {

inline DirectedGraph graph_from_edges(NodeId n, std::initializer_list<Dyad> edges) {
    DirectedGraph g(n);
    for (const auto& [u, v] : edges)
        g.add_edge(u, v);
    return g;
}

// All-user covariates; nodes listed in `influencers` get the flag.
inline CovariateTable user_covariates(NodeId n, std::initializer_list<NodeId> influencers = {}) {
    CovariateTable cov(static_cast<std::size_t>(n));
    for (NodeId v : influencers)
        cov[static_cast<std::size_t>(v)].is_influencer = true;
    return cov;
}

inline DirectedGraph random_graph(NodeId n, double density, Rng& rng) {
    DirectedGraph g(n);
    for (NodeId u = 0; u < n; ++u)
        for (NodeId v = 0; v < n; ++v)
            if (u != v && rng.bernoulli(density))
                g.add_edge(u, v);
    return g;
}

inline CovariateTable random_covariates(NodeId n, double influencer_rate, Rng& rng) {
    CovariateTable cov(static_cast<std::size_t>(n));
    for (auto& c : cov)
        c.is_influencer = rng.bernoulli(influencer_rate);
    return cov;
}

inline Universe universe_of(const CovariateTable& cov) {
    Universe u;
    u.covariates = cov;
    return u;
}

// Synthetic temporal data drawn from the model itself: a Bernoulli initial
// snapshot rolled forward with the sampler.
inline TemporalNetwork synthesize(const Universe& universe, const ModelSpec& spec,
                                  double initial_density, std::int64_t transitions,
                                  std::uint64_t seed, std::int64_t burn_in = 50) {
    Rng init_rng = Rng::derive(seed, 0xA11CE);
    DirectedGraph g0(universe.n());
    for (NodeId u = 0; u < universe.n(); ++u)
        for (NodeId v = 0; v < universe.n(); ++v)
            if (u != v && init_rng.bernoulli(initial_density))
                g0.add_edge(u, v);

    Snapshot initial;
    initial.graph = std::move(g0);
    initial.label = "2016-01";

    McmcConfig config;
    config.burn_in_sweeps = burn_in;
    config.sample_interval_sweeps = 1;
    config.n_samples = 1;
    config.seed = seed;
    return generate_sequence(initial, universe, spec, transitions, config).network;
}

inline std::filesystem::path make_temp_dir(const std::string& tag) {
    static std::atomic<int> counter{0};
    const auto dir = std::filesystem::temp_directory_path() /
                     ("ttergm_" + tag + "_" + std::to_string(counter.fetch_add(1)) + "_" +
                      std::to_string(static_cast<long long>(::getpid())));
    std::filesystem::create_directories(dir);
    return dir;
}

} // namespace ttergm::test
