#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "ttergm/graph.hpp"
#include "ttergm/rng.hpp"
#include "ttergm/statistics.hpp"

namespace ttergm {

enum class Proposal : std::uint8_t { GibbsSweep, RandomToggle };

struct McmcConfig {
    std::int64_t burn_in_sweeps = 100;
    std::int64_t sample_interval_sweeps = 1;
    std::int64_t n_samples = 100;
    std::uint64_t seed = 0;
    Proposal proposal = Proposal::GibbsSweep;

    void validate() const {
        if (burn_in_sweeps < 1 || sample_interval_sweeps < 1 || n_samples < 1)
            throw ConfigError("MCMC sweep and sample counts must be >= 1");
    }
};

// Full conditional P(edge (u,v) present | rest of graph) = logistic(theta' d).
double conditional_edge_probability(const DirectedGraph& current,
                                    const DirectedGraph* prev,
                                    const CovariateTable& cov,
                                    const ModelSpec& spec,
                                    Dyad dyad);

// One MCMC chain over graphs at fixed theta, conditioned on an optional
// previous snapshot. Sufficient statistics are tracked incrementally; a
// sweep is one Gibbs pass over all dyads in lexicographic order, or n(n-1)
// random-dyad Metropolis toggles.
class GraphChain {
public:
    GraphChain(DirectedGraph initial, const DirectedGraph* prev,
               const CovariateTable& cov, const ModelSpec& spec,
               Proposal proposal, Rng rng);

    void sweep();
    void run_sweeps(std::int64_t count);

    const DirectedGraph& state() const { return graph_; }
    const StatisticVector& statistics() const { return stats_; }

    // Fraction of dyad updates that changed the graph (Gibbs) or of
    // proposals accepted (Metropolis).
    double acceptance_rate() const;
    bool at_degenerate_state() const;
    std::int64_t sweeps_done() const { return sweeps_; }
    std::int64_t degenerate_sweeps() const { return degenerate_sweeps_; }

private:
    void update_dyad(NodeId u, NodeId v);

    DirectedGraph graph_;
    const DirectedGraph* prev_;
    const CovariateTable& cov_;
    const ModelSpec& spec_;
    Proposal proposal_;
    Rng rng_;
    StatisticVector stats_;
    StatisticVector delta_;
    std::int64_t updates_ = 0;
    std::int64_t changes_ = 0;
    std::int64_t sweeps_ = 0;
    std::int64_t degenerate_sweeps_ = 0;
};

struct SampleBatch {
    std::vector<DirectedGraph> graphs;
    std::vector<StatisticVector> statistics; // n_samples rows, |terms| columns
    double acceptance_rate = 0.0;
    bool degenerate = false;
    DirectedGraph final_state;

    std::size_t size() const { return statistics.size(); }
};

// Draws n_samples graphs from P(. | prev; theta). The chain starts at prev,
// discards burn_in_sweeps, then records every sample_interval_sweeps.
// A batch is flagged degenerate when more than half of all sweeps ended at
// the empty or the complete graph.
SampleBatch sample_networks(const DirectedGraph& prev,
                            const CovariateTable& cov,
                            const ModelSpec& spec,
                            const McmcConfig& config,
                            bool record_graphs = true);

// Rolls the model forward `horizon` steps from `initial`, drawing each
// snapshot conditioned on the last one (final chain state per step).
// Labels continue the initial snapshot's calendar month when it parses as
// YYYY-MM, and otherwise get a fixed-width "+NNN" suffix. Degeneracy flags
// and flip rates are reported per step.
struct GeneratedSequence {
    TemporalNetwork network; // initial snapshot followed by `horizon` draws
    std::vector<bool> step_degenerate;
    std::vector<double> step_acceptance;

    bool any_degenerate() const;
};

GeneratedSequence generate_sequence(const Snapshot& initial,
                                    const Universe& universe,
                                    const ModelSpec& spec,
                                    std::int64_t horizon,
                                    const McmcConfig& config);

// Geyer-Thompson importance estimate of log(Z(theta_new)/Z(theta_ref)) from
// a batch sampled at theta_ref.
struct LogRatioEstimate {
    double value = 0.0;
    double effective_sample_size = 0.0;
    bool low_ess = false; // effective sample size below 5% of the batch
};

LogRatioEstimate estimate_log_normalizer_ratio(const std::vector<double>& theta_new,
                                               const std::vector<double>& theta_ref,
                                               const SampleBatch& batch_at_ref);

std::string next_month_label(const std::string& label);

} // namespace ttergm
