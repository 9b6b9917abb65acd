#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ttergm/graph.hpp"

namespace ttergm {

// Model terms. Counting conventions are over ordered tuples throughout (no
// division by automorphism counts), except Mutual which counts unordered
// reciprocal pairs.
//
//   Edges               number of edges
//   Mutual              unordered pairs {u,v} with u->v and v->u
//   TransitiveTriads    ordered distinct triples (i,j,k) with i->j, j->k, i->k
//   TwoStarsOut/In      sum over nodes of C(outdeg,2) / C(indeg,2)
//   HomophilyInfluencer edges whose endpoints share is_influencer
//   Stability           ordered dyads in the same state in current and prev
//   TriadicDirectLinks  edges influencer -> non-influencer
//   TriadicPath2/3      directed paths of length 2/3, distinct nodes, from an
//                       influencer to a non-influencer
//   InfluencerTriangle  triples (r,f,x): r influencer, r->f, r->x, f->x in the
//                       current graph, with r->x already present in prev
//
// Stability and the Triadic* terms condition on the previous snapshot and are
// rejected in static models.
enum class Term : std::uint8_t {
    Edges,
    Mutual,
    TransitiveTriads,
    TwoStarsOut,
    TwoStarsIn,
    HomophilyInfluencer,
    Stability,
    TriadicDirectLinks,
    TriadicPath2,
    TriadicPath3,
    InfluencerTriangle,
};

inline constexpr Term kAllTerms[] = {
    Term::Edges,
    Term::Mutual,
    Term::TransitiveTriads,
    Term::TwoStarsOut,
    Term::TwoStarsIn,
    Term::HomophilyInfluencer,
    Term::Stability,
    Term::TriadicDirectLinks,
    Term::TriadicPath2,
    Term::TriadicPath3,
    Term::InfluencerTriangle,
};

const std::string& term_name(Term t);
Term term_from_name(const std::string& name);
bool term_requires_prev(Term t);

struct ModelSpec {
    std::vector<Term> terms;
    std::vector<double> theta;

    std::size_t size() const { return terms.size(); }
    bool requires_prev() const;
    void validate() const;
};

using StatisticVector = std::vector<double>;

// Sufficient statistics of `current` (given `prev` for temporal terms) for
// every term in the spec, in spec order.
StatisticVector compute_statistics(const DirectedGraph& current,
                                   const DirectedGraph* prev,
                                   const CovariateTable& cov,
                                   const ModelSpec& spec);

// g(current with (u,v) present) - g(current with (u,v) absent), computed
// locally from the neighborhoods of u and v. Independent of the current
// state of the dyad itself.
StatisticVector change_statistics(const DirectedGraph& current,
                                  const DirectedGraph* prev,
                                  const CovariateTable& cov,
                                  const ModelSpec& spec,
                                  Dyad dyad);

// Allocation-free variant for sampler/estimator inner loops; `out` must have
// spec.size() entries.
void change_statistics_into(const DirectedGraph& current,
                            const DirectedGraph* prev,
                            const CovariateTable& cov,
                            const ModelSpec& spec,
                            Dyad dyad,
                            std::span<double> out);

// Network topology summary. Quantities that are undefined on the input
// (assortativity with zero degree variance, path length with no reachable
// pair) are reported as NaN.
struct TopologyReport {
    double avg_shortest_path = 0.0;
    double assortativity = 0.0;
    std::int64_t n_components = 0;
    double avg_clustering = 0.0;
    NodeId n_nodes = 0;
    std::int64_t n_edges = 0;
};

TopologyReport topology_report(const DirectedGraph& g);

} // namespace ttergm
