#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "ttergm/baselines.hpp"
#include "ttergm/graph.hpp"
#include "ttergm/sampler.hpp"

namespace ttergm {

// |mean over predicted graphs of average degree - observed average degree|.
// For whole-graph averages the in- and out-components are equal, since every
// graph's mean in-degree equals its mean out-degree; the influencer-restricted
// variant below is the one that can split them apart.
struct DegreeErrorPair {
    double in_err = 0.0;
    double out_err = 0.0;
};

DegreeErrorPair degree_error(std::span<const DirectedGraph> predicted,
                             const DirectedGraph& observed);

// Same error restricted to the nodes selected by `mask` (e.g. influencers).
DegreeErrorPair degree_error_restricted(std::span<const DirectedGraph> predicted,
                                        const DirectedGraph& observed,
                                        std::span<const std::uint8_t> mask);

// Welch two-sample t-test, two-sided.
double significance_test(std::span<const double> errors_a,
                         std::span<const double> errors_b);

// A fitted model entering the holdout comparison. ERGM-family models carry
// their fitted coefficients in the spec; fitting failures are marked absent
// and skipped.
struct PredictiveModel {
    std::string name;
    std::variant<ModelSpec, BlockModel> model;
    bool absent = false;
    std::string note;

    static PredictiveModel ergm(std::string name, ModelSpec spec);
    static PredictiveModel block(std::string name, BlockModel m);
    static PredictiveModel failed(std::string name, std::string why);
};

inline constexpr std::array<const char*, 4> kEvalMetrics = {
    "in_deg", "out_deg", "influencer_in_deg", "influencer_out_deg"};

struct EvalCell {
    double mean_error = 0.0;
    std::vector<double> per_run;
};

struct PairwiseTest {
    std::string month;
    std::string metric;
    std::string model_a;
    std::string model_b;
    double p_value = 1.0;
};

struct EvalReport {
    std::vector<std::string> model_names;
    std::vector<std::uint8_t> model_absent;
    std::vector<std::string> months;
    std::vector<std::string> metrics;
    // cells[model][month][metric]; empty per_run for absent models.
    std::vector<std::vector<std::vector<EvalCell>>> cells;
    std::vector<PairwiseTest> tests;
    std::int64_t n_runs = 0;
    bool p_values_available = false;
    std::string note;

    const EvalCell& cell(std::size_t model, std::size_t month, std::size_t metric) const {
        return cells[model][month][metric];
    }
};

// Holdout protocol: the holdout labels must be the trailing snapshots of
// `data`. Per run, each ERGM model rolls one trajectory forward from the
// last training snapshot and the block model draws one independent graph per
// month; per-run degree errors are aggregated and compared pairwise.
EvalReport run_holdout(const TemporalNetwork& data,
                       const std::vector<PredictiveModel>& models,
                       const std::vector<std::string>& holdout_labels,
                       std::int64_t n_runs,
                       std::uint64_t seed,
                       const McmcConfig& gen_mcmc,
                       unsigned threads = 1);

} // namespace ttergm
