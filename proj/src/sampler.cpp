#include "ttergm/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "ttergm/numeric.hpp"

namespace ttergm {

namespace {

double theta_dot(const ModelSpec& spec, std::span<const double> delta) {
    double s = 0.0;
    for (std::size_t i = 0; i < delta.size(); ++i)
        s += spec.theta[i] * delta[i];
    return s;
}

} // namespace

double conditional_edge_probability(const DirectedGraph& current, const DirectedGraph* prev,
                                    const CovariateTable& cov, const ModelSpec& spec,
                                    Dyad dyad) {
    spec.validate();
    const StatisticVector delta = change_statistics(current, prev, cov, spec, dyad);
    const double x = theta_dot(spec, delta);
    if (!std::isfinite(x))
        throw DataError("non-finite conditional log-odds; model is degenerate");
    return logistic(x);
}

GraphChain::GraphChain(DirectedGraph initial, const DirectedGraph* prev,
                       const CovariateTable& cov, const ModelSpec& spec, Proposal proposal,
                       Rng rng)
    : graph_(std::move(initial)),
      prev_(prev),
      cov_(cov),
      spec_(spec),
      proposal_(proposal),
      rng_(rng),
      delta_(spec.size(), 0.0) {
    spec.validate();
    stats_ = compute_statistics(graph_, prev_, cov_, spec_);
}

void GraphChain::update_dyad(NodeId u, NodeId v) {
    change_statistics_into(graph_, prev_, cov_, spec_, {u, v}, delta_);
    const double x = theta_dot(spec_, delta_);
    if (!std::isfinite(x))
        throw DataError("non-finite conditional log-odds; model is degenerate");
    const bool present = graph_.has_edge(u, v);
    ++updates_;

    bool want_present;
    if (proposal_ == Proposal::GibbsSweep) {
        want_present = rng_.bernoulli(logistic(x));
    } else {
        // Metropolis toggle: flip with probability min(1, exp(+-x)).
        const double log_accept = present ? -x : x;
        const bool accept = log_accept >= 0.0 || rng_.next_double() < std::exp(log_accept);
        want_present = accept ? !present : present;
    }

    if (want_present != present) {
        graph_.toggle_edge(u, v);
        ++changes_;
        const double sign = want_present ? 1.0 : -1.0;
        for (std::size_t i = 0; i < stats_.size(); ++i)
            stats_[i] += sign * delta_[i];
    }
}

void GraphChain::sweep() {
    const NodeId n = graph_.n();
    const std::int64_t n_dyads = static_cast<std::int64_t>(n) * (n - 1);
    if (proposal_ == Proposal::GibbsSweep) {
        for (NodeId u = 0; u < n; ++u)
            for (NodeId v = 0; v < n; ++v)
                if (u != v)
                    update_dyad(u, v);
    } else {
        for (std::int64_t k = 0; k < n_dyads; ++k) {
            const std::uint64_t r = rng_.next_below(static_cast<std::uint64_t>(n_dyads));
            const NodeId u = static_cast<NodeId>(r / (n - 1));
            NodeId v = static_cast<NodeId>(r % (n - 1));
            if (v >= u)
                ++v;
            update_dyad(u, v);
        }
    }
    ++sweeps_;
    if (at_degenerate_state())
        ++degenerate_sweeps_;
}

void GraphChain::run_sweeps(std::int64_t count) {
    for (std::int64_t i = 0; i < count; ++i)
        sweep();
}

double GraphChain::acceptance_rate() const {
    return updates_ == 0 ? 0.0
                         : static_cast<double>(changes_) / static_cast<double>(updates_);
}

bool GraphChain::at_degenerate_state() const {
    const std::int64_t n_dyads =
        static_cast<std::int64_t>(graph_.n()) * (graph_.n() - 1);
    return graph_.edge_count() == 0 || graph_.edge_count() == n_dyads;
}

SampleBatch sample_networks(const DirectedGraph& prev, const CovariateTable& cov,
                            const ModelSpec& spec, const McmcConfig& config,
                            bool record_graphs) {
    config.validate();
    spec.validate();
    const DirectedGraph* prev_ptr = spec.requires_prev() ? &prev : nullptr;
    GraphChain chain(prev, prev_ptr, cov, spec, config.proposal,
                     Rng::derive(config.seed, 0));

    chain.run_sweeps(config.burn_in_sweeps);

    SampleBatch batch;
    batch.statistics.reserve(static_cast<std::size_t>(config.n_samples));
    if (record_graphs)
        batch.graphs.reserve(static_cast<std::size_t>(config.n_samples));
    for (std::int64_t s = 0; s < config.n_samples; ++s) {
        chain.run_sweeps(config.sample_interval_sweeps);
        batch.statistics.push_back(chain.statistics());
        if (record_graphs)
            batch.graphs.push_back(chain.state());
    }
    batch.acceptance_rate = chain.acceptance_rate();
    batch.degenerate = chain.degenerate_sweeps() * 2 > chain.sweeps_done();
    batch.final_state = chain.state();
    return batch;
}

std::string next_month_label(const std::string& label) {
    int year = 0, month = 0;
    if (label.size() == 7 && label[4] == '-' &&
        std::sscanf(label.c_str(), "%4d-%2d", &year, &month) == 2 && month >= 1 &&
        month <= 12) {
        ++month;
        if (month == 13) {
            month = 1;
            ++year;
        }
        char buf[16];
        std::snprintf(buf, sizeof(buf), "%04d-%02d", year, month);
        return buf;
    }
    return {};
}

bool GeneratedSequence::any_degenerate() const {
    return std::any_of(step_degenerate.begin(), step_degenerate.end(),
                       [](bool b) { return b; });
}

GeneratedSequence generate_sequence(const Snapshot& initial, const Universe& universe,
                                    const ModelSpec& spec, std::int64_t horizon,
                                    const McmcConfig& config) {
    if (horizon < 1)
        throw ConfigError("generation horizon must be >= 1");
    if (initial.graph.n() != universe.n())
        throw DataError("initial snapshot does not match universe");

    GeneratedSequence out;
    out.network.universe = universe;
    out.network.snapshots.push_back(initial);

    std::string label = initial.label;
    for (std::int64_t step = 0; step < horizon; ++step) {
        McmcConfig step_config = config;
        step_config.seed = Rng::derive(config.seed, static_cast<std::uint64_t>(step + 1))
                               .next_u64();
        SampleBatch batch = sample_networks(out.network.snapshots.back().graph,
                                            universe.covariates, spec, step_config,
                                            /*record_graphs=*/false);
        std::string next = next_month_label(label);
        if (next.empty()) {
            char buf[16];
            std::snprintf(buf, sizeof(buf), "+%03lld", static_cast<long long>(step + 1));
            next = initial.label + buf;
        }
        label = next;
        Snapshot snap;
        snap.graph = std::move(batch.final_state);
        snap.label = label;
        out.network.snapshots.push_back(std::move(snap));
        out.step_degenerate.push_back(batch.degenerate);
        out.step_acceptance.push_back(batch.acceptance_rate);
    }
    return out;
}

LogRatioEstimate estimate_log_normalizer_ratio(const std::vector<double>& theta_new,
                                               const std::vector<double>& theta_ref,
                                               const SampleBatch& batch_at_ref) {
    if (theta_new.size() != theta_ref.size())
        throw ConfigError("theta vectors differ in length");
    if (batch_at_ref.size() == 0)
        throw DataError("empty sample batch");

    const std::size_t m = batch_at_ref.size();
    std::vector<double> log_w(m);
    for (std::size_t i = 0; i < m; ++i) {
        const auto& g = batch_at_ref.statistics[i];
        if (g.size() != theta_new.size())
            throw DataError("batch statistic width does not match theta");
        double s = 0.0;
        for (std::size_t j = 0; j < g.size(); ++j)
            s += (theta_new[j] - theta_ref[j]) * g[j];
        log_w[i] = s;
    }

    LogRatioEstimate est;
    est.value = log_mean_exp(log_w);

    // ESS = (sum w)^2 / sum w^2, computed with max subtraction.
    const double mx = *std::max_element(log_w.begin(), log_w.end());
    double sw = 0.0, sw2 = 0.0;
    for (double lw : log_w) {
        const double w = std::exp(lw - mx);
        sw += w;
        sw2 += w * w;
    }
    est.effective_sample_size = sw2 > 0.0 ? sw * sw / sw2 : 0.0;
    est.low_ess = est.effective_sample_size < 0.05 * static_cast<double>(m);
    return est;
}

} // namespace ttergm
