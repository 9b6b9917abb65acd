#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ttergm/graph.hpp"
#include "ttergm/sampler.hpp"
#include "ttergm/statistics.hpp"

namespace ttergm {

enum class EstimationMethod : std::uint8_t { MPLE, MCMLE };

struct EstimationResult {
    std::vector<Term> terms;
    std::vector<double> theta_hat;
    std::vector<double> std_errors;
    std::vector<double> log_likelihood_path;
    bool converged = false;
    std::int64_t iterations = 0;
    EstimationMethod method = EstimationMethod::MPLE;

    // Diagnostics.
    bool ridge_fallback = false;       // singular information, ridge added
    bool separation_suspected = false; // coefficients diverged
    bool ess_warning = false;          // low importance-sampling ESS (MCMLE)
    std::string note;
};

struct MpleOptions {
    double gradient_tolerance = 1e-8;
    std::int64_t max_iterations = 100;
    double ridge = 1e-6; // fallback added to a singular information matrix
};

// Logistic regression by Newton-Raphson with step halving; the workhorse
// behind MPLE. Rows of x are observations, y in {0,1}.
struct LogisticFit {
    std::vector<double> beta;
    std::vector<double> std_errors;
    std::vector<double> log_likelihood_path;
    bool converged = false;
    std::int64_t iterations = 0;
    bool ridge_fallback = false;
    bool separation_suspected = false;
};

LogisticFit fit_logistic(const std::vector<std::vector<double>>& x,
                         const std::vector<std::uint8_t>& y,
                         const MpleOptions& options = {});

// Maximum pseudolikelihood over all dyads of every transition (or of the
// single snapshot when the network is static and the spec has no temporal
// terms).
EstimationResult mple(const TemporalNetwork& data, const ModelSpec& spec,
                      const MpleOptions& options = {});

struct McmleOptions {
    double step_tolerance = 1e-3; // outer stop: max |theta_{k+1} - theta_k|
    double inner_gradient_tolerance = 1e-5;
    std::int64_t max_inner_iterations = 50;
    std::int64_t max_step_halvings = 10;
    unsigned threads = 1;
};

// Monte Carlo MLE: starts from the MPLE, then alternates sampling at the
// current theta with Newton ascent of the importance-approximated
// log-likelihood (per-transition normalizer ratios estimated independently).
EstimationResult mcmle(const TemporalNetwork& data, const ModelSpec& spec,
                       const McmcConfig& mcmc, std::int64_t max_outer,
                       const McmleOptions& options = {});

struct BootstrapResult {
    std::vector<double> std_errors;
    std::int64_t n_requested = 0;
    std::int64_t n_used = 0;
    std::int64_t n_dropped = 0;
};

// Nonparametric bootstrap over transitions, refitting the MPLE per
// replicate. Fails when more than half the replicates do not converge.
BootstrapResult bootstrap_std_errors(const TemporalNetwork& data, const ModelSpec& spec,
                                     std::int64_t n_boot, std::uint64_t seed,
                                     unsigned threads = 1);

} // namespace ttergm
