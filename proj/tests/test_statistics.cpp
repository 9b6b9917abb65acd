#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "oracle_stats.hpp"
#include "support.hpp"
#include "ttergm/statistics.hpp"

using namespace ttergm;

namespace {

ModelSpec spec_of(std::initializer_list<Term> terms) {
    ModelSpec s;
    s.terms = terms;
    s.theta.assign(s.terms.size(), 0.0);
    return s;
}

ModelSpec all_terms_spec() {
    ModelSpec s;
    s.terms.assign(std::begin(kAllTerms), std::end(kAllTerms));
    s.theta.assign(s.terms.size(), 0.0);
    return s;
}

} // namespace

TEST_CASE("term names round-trip and unknown names fail") {
    for (Term t : kAllTerms)
        CHECK(term_from_name(term_name(t)) == t);
    CHECK_THROWS_AS(term_from_name("Edgez"), ConfigError);
}

TEST_CASE("statistics on hand-built graphs") {
    SUBCASE("mutual dyad") {
        const auto g = test::graph_from_edges(2, {{0, 1}, {1, 0}});
        const auto cov = test::user_covariates(2);
        const auto v = compute_statistics(g, nullptr, cov, spec_of({Term::Edges, Term::Mutual}));
        CHECK(v == StatisticVector{2.0, 1.0});
    }
    SUBCASE("single transitive triad") {
        const auto g = test::graph_from_edges(3, {{0, 1}, {1, 2}, {0, 2}});
        const auto cov = test::user_covariates(3);
        const auto v = compute_statistics(g, nullptr, cov, spec_of({Term::TransitiveTriads}));
        CHECK(v == StatisticVector{1.0});
    }
    SUBCASE("out-two-star") {
        const auto g = test::graph_from_edges(3, {{0, 1}, {0, 2}});
        const auto cov = test::user_covariates(3);
        const auto v = compute_statistics(g, nullptr, cov, spec_of({Term::TwoStarsOut}));
        CHECK(v == StatisticVector{1.0});
    }
    SUBCASE("stability on identical snapshots is n(n-1)") {
        Rng rng(7);
        const auto g = test::random_graph(6, 0.4, rng);
        const auto cov = test::user_covariates(6);
        const auto v = compute_statistics(g, &g, cov, spec_of({Term::Stability}));
        CHECK(v == StatisticVector{30.0});
    }
    SUBCASE("influencer triangle needs the prior-period edge") {
        // r=0 influencer; 0->1, 0->2, 1->2 now.
        const auto g = test::graph_from_edges(3, {{0, 1}, {0, 2}, {1, 2}});
        const auto cov = test::user_covariates(3, {0});
        const auto with_prev = test::graph_from_edges(3, {{0, 2}});
        const auto without_prev = DirectedGraph(3);
        CHECK(compute_statistics(g, &with_prev, cov,
                                 spec_of({Term::InfluencerTriangle})) == StatisticVector{1.0});
        CHECK(compute_statistics(g, &without_prev, cov,
                                 spec_of({Term::InfluencerTriangle})) == StatisticVector{0.0});
    }
}

TEST_CASE("temporal terms without a previous snapshot are a configuration error") {
    const DirectedGraph g(3);
    const auto cov = test::user_covariates(3);
    for (Term t : {Term::Stability, Term::TriadicDirectLinks, Term::TriadicPath2,
                   Term::TriadicPath3, Term::InfluencerTriangle})
        CHECK_THROWS_AS(compute_statistics(g, nullptr, cov, spec_of({t})), ConfigError);
    CHECK_NOTHROW(compute_statistics(g, nullptr, cov, spec_of({Term::Edges})));
}

TEST_CASE("full statistics equal the brute-force enumeration on random graphs") {
    const auto spec = all_terms_spec();
    Rng rng(99);
    for (int rep = 0; rep < 40; ++rep) {
        const NodeId n = 2 + static_cast<NodeId>(rng.next_below(5)); // 2..6
        auto cov = test::random_covariates(n, 0.4, rng);
        const auto g = test::random_graph(n, 0.45, rng);
        const auto prev = test::random_graph(n, 0.45, rng);
        const auto got = compute_statistics(g, &prev, cov, spec);
        const auto want = oracle::statistics(spec, g, &prev, cov);
        REQUIRE(got == want);
    }
}

TEST_CASE("change statistics equal the recomputation difference exactly") {
    const auto spec = all_terms_spec();
    Rng rng(2024);
    for (int rep = 0; rep < 200; ++rep) {
        const NodeId n = 2 + static_cast<NodeId>(rng.next_below(5)); // 2..6
        auto cov = test::random_covariates(n, 0.35, rng);
        auto g = test::random_graph(n, 0.4, rng);
        const auto prev = test::random_graph(n, 0.4, rng);
        for (const auto& dyad : dyad_iter(g)) {
            const auto delta = change_statistics(g, &prev, cov, spec, dyad);

            DirectedGraph with = g;
            with.add_edge(dyad.first, dyad.second);
            DirectedGraph without = g;
            without.remove_edge(dyad.first, dyad.second);
            const auto s_with = compute_statistics(with, &prev, cov, spec);
            const auto s_without = compute_statistics(without, &prev, cov, spec);

            for (std::size_t j = 0; j < spec.size(); ++j)
                REQUIRE(delta[j] == s_with[j] - s_without[j]);
        }
    }
}

TEST_CASE("known change-statistic components") {
    Rng rng(5);
    const auto g = test::random_graph(5, 0.5, rng);
    const auto cov = test::user_covariates(5);
    SUBCASE("edges component is always one") {
        for (const auto& dyad : dyad_iter(g))
            CHECK(change_statistics(g, nullptr, cov, spec_of({Term::Edges}), dyad) ==
                  StatisticVector{1.0});
    }
    SUBCASE("mutual component tracks the reciprocal arc") {
        const auto cov3 = test::user_covariates(3);
        auto h = test::graph_from_edges(3, {{1, 0}});
        CHECK(change_statistics(h, nullptr, cov3, spec_of({Term::Mutual}), {0, 1}) ==
              StatisticVector{1.0});
        CHECK(change_statistics(h, nullptr, cov3, spec_of({Term::Mutual}), {0, 2}) ==
              StatisticVector{0.0});
    }
}

TEST_CASE("statistics are invariant under node relabeling") {
    const auto spec = all_terms_spec();
    Rng rng(314);
    for (int rep = 0; rep < 20; ++rep) {
        const NodeId n = 4 + static_cast<NodeId>(rng.next_below(5)); // 4..8
        auto cov = test::random_covariates(n, 0.3, rng);
        const auto g = test::random_graph(n, 0.4, rng);
        const auto prev = test::random_graph(n, 0.4, rng);

        std::vector<NodeId> perm(static_cast<std::size_t>(n));
        std::iota(perm.begin(), perm.end(), 0);
        for (std::size_t i = perm.size(); i > 1; --i)
            std::swap(perm[i - 1], perm[rng.next_below(i)]);

        DirectedGraph pg(n), pprev(n);
        CovariateTable pcov(static_cast<std::size_t>(n));
        for (NodeId u = 0; u < n; ++u) {
            pcov[static_cast<std::size_t>(perm[static_cast<std::size_t>(u)])] =
                cov[static_cast<std::size_t>(u)];
            for (NodeId v : g.out_neighbors(u))
                pg.add_edge(perm[static_cast<std::size_t>(u)],
                            perm[static_cast<std::size_t>(v)]);
            for (NodeId v : prev.out_neighbors(u))
                pprev.add_edge(perm[static_cast<std::size_t>(u)],
                               perm[static_cast<std::size_t>(v)]);
        }

        CHECK(compute_statistics(g, &prev, cov, spec) ==
              compute_statistics(pg, &pprev, pcov, spec));
    }
}

TEST_CASE("statistic computation is pure") {
    Rng rng(86);
    const auto g = test::random_graph(7, 0.4, rng);
    const auto prev = test::random_graph(7, 0.4, rng);
    const auto cov = test::random_covariates(7, 0.3, rng);
    const auto spec = all_terms_spec();
    const auto a = compute_statistics(g, &prev, cov, spec);
    const auto b = compute_statistics(g, &prev, cov, spec);
    CHECK(a == b);
}

TEST_CASE("topology report") {
    SUBCASE("empty graph") {
        const auto rep = topology_report(DirectedGraph(3));
        CHECK(rep.n_components == 3);
        CHECK(rep.avg_clustering == 0.0);
        CHECK(rep.n_edges == 0);
        CHECK(rep.n_nodes == 3);
        CHECK(std::isnan(rep.avg_shortest_path));
        CHECK(std::isnan(rep.assortativity));
    }
    SUBCASE("directed 3-cycle") {
        const auto g = test::graph_from_edges(3, {{0, 1}, {1, 2}, {2, 0}});
        const auto rep = topology_report(g);
        CHECK(rep.avg_shortest_path == doctest::Approx(1.5));
        CHECK(rep.n_components == 1);
        // Every node has out-degree 1 and in-degree 1: no degree variance.
        CHECK(std::isnan(rep.assortativity));
    }
    SUBCASE("complete triad clusters fully") {
        const auto g = test::graph_from_edges(
            3, {{0, 1}, {1, 0}, {0, 2}, {2, 0}, {1, 2}, {2, 1}});
        const auto rep = topology_report(g);
        CHECK(rep.avg_clustering == doctest::Approx(1.0));
        CHECK(rep.avg_shortest_path == doctest::Approx(1.0));
        CHECK(rep.n_components == 1);
    }
    SUBCASE("assortativity is computable on a two-star") {
        const auto g = test::graph_from_edges(4, {{0, 1}, {0, 2}, {3, 0}});
        const auto rep = topology_report(g);
        CHECK(std::isfinite(rep.assortativity));
    }
}
