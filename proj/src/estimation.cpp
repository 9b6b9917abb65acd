#include "ttergm/estimation.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "ttergm/numeric.hpp"
#include "ttergm/parallel.hpp"

namespace ttergm {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// Pseudolikelihood design: one row per dyad per target snapshot. A static
// spec on a single-snapshot network fits that snapshot directly; otherwise
// every snapshot after the first is a target conditioned on its predecessor.
struct DyadDesign {
    MatrixXd x;
    std::vector<std::uint8_t> y;
    // Row ranges per transition, for bootstrap resampling.
    std::vector<std::pair<std::int64_t, std::int64_t>> transition_rows;
};

std::int64_t dyads_per_snapshot(NodeId n) {
    return static_cast<std::int64_t>(n) * (n - 1);
}

DyadDesign build_design(const TemporalNetwork& data, const ModelSpec& spec) {
    data.validate();
    spec.validate();
    const NodeId n = data.universe.n();
    const auto& cov = data.universe.covariates;
    const std::size_t p = spec.size();

    if (data.snapshots.empty())
        throw DataError("empty temporal network");
    const bool static_fit = data.snapshots.size() == 1;
    if (static_fit && spec.requires_prev())
        throw ConfigError("temporal term used without a previous snapshot");

    const std::size_t n_targets = static_fit ? 1 : data.snapshots.size() - 1;
    const std::int64_t rows_per = dyads_per_snapshot(n);

    DyadDesign d;
    d.x.resize(static_cast<Eigen::Index>(n_targets * rows_per), static_cast<Eigen::Index>(p));
    d.y.resize(n_targets * rows_per);

    std::vector<double> delta(p);
    std::int64_t row = 0;
    for (std::size_t t = 0; t < n_targets; ++t) {
        const std::size_t target = static_fit ? 0 : t + 1;
        const DirectedGraph& current = data.snapshots[target].graph;
        const DirectedGraph* prev = static_fit ? nullptr : &data.snapshots[target - 1].graph;
        d.transition_rows.emplace_back(row, row + rows_per);
        for (NodeId u = 0; u < n; ++u) {
            for (NodeId v = 0; v < n; ++v) {
                if (u == v)
                    continue;
                change_statistics_into(current, prev, cov, spec, {u, v}, delta);
                for (std::size_t j = 0; j < p; ++j)
                    d.x(row, static_cast<Eigen::Index>(j)) = delta[j];
                d.y[static_cast<std::size_t>(row)] = current.has_edge(u, v) ? 1 : 0;
                ++row;
            }
        }
    }
    return d;
}

double logistic_log_likelihood(const MatrixXd& x, const std::vector<std::uint8_t>& y,
                               const VectorXd& beta) {
    const VectorXd eta = x * beta;
    double ll = 0.0;
    for (Eigen::Index i = 0; i < eta.size(); ++i) {
        const double e = eta(i);
        // log(1 + exp(e)) without overflow.
        const double log1pe = e > 0 ? e + std::log1p(std::exp(-e)) : std::log1p(std::exp(e));
        ll += (y[static_cast<std::size_t>(i)] ? e : 0.0) - log1pe;
    }
    return ll;
}

struct Solved {
    VectorXd step;
    bool ridge_used = false;
};

// Solves info * step = grad; falls back to a small ridge when the
// information matrix is numerically singular.
Solved solve_information(const MatrixXd& info, const VectorXd& grad, double ridge) {
    Eigen::LDLT<MatrixXd> ldlt(info);
    if (ldlt.info() == Eigen::Success && ldlt.isPositive()) {
        VectorXd step = ldlt.solve(grad);
        if (step.allFinite() && (info * step - grad).norm() <= 1e-6 * (1.0 + grad.norm()))
            return {step, false};
    }
    MatrixXd ridged = info;
    ridged.diagonal().array() += ridge;
    return {Eigen::LDLT<MatrixXd>(ridged).solve(grad), true};
}

std::vector<double> information_std_errors(const MatrixXd& info, double ridge,
                                           bool* ridge_used) {
    const Eigen::Index p = info.rows();
    MatrixXd m = info;
    Eigen::FullPivLU<MatrixXd> lu(m);
    if (!lu.isInvertible()) {
        m.diagonal().array() += ridge;
        lu.compute(m);
        if (ridge_used)
            *ridge_used = true;
    }
    const MatrixXd inv = lu.inverse();
    std::vector<double> se(static_cast<std::size_t>(p));
    for (Eigen::Index j = 0; j < p; ++j)
        se[static_cast<std::size_t>(j)] = inv(j, j) > 0 ? std::sqrt(inv(j, j)) : 0.0;
    return se;
}

LogisticFit newton_logistic(const MatrixXd& x, const std::vector<std::uint8_t>& y,
                            const MpleOptions& options) {
    const Eigen::Index p = x.cols();
    LogisticFit fit;
    VectorXd beta = VectorXd::Zero(p);
    double ll = logistic_log_likelihood(x, y, beta);
    fit.log_likelihood_path.push_back(ll);

    for (std::int64_t iter = 0; iter < options.max_iterations; ++iter) {
        const VectorXd eta = x * beta;
        VectorXd grad = VectorXd::Zero(p);
        MatrixXd info = MatrixXd::Zero(p, p);
        for (Eigen::Index i = 0; i < eta.size(); ++i) {
            const double pi = logistic(eta(i));
            const double resid = (y[static_cast<std::size_t>(i)] ? 1.0 : 0.0) - pi;
            grad += resid * x.row(i).transpose();
            info += pi * (1.0 - pi) * x.row(i).transpose() * x.row(i);
        }

        if (grad.lpNorm<Eigen::Infinity>() < options.gradient_tolerance) {
            fit.converged = true;
            fit.iterations = iter;
            break;
        }

        Solved sol = solve_information(info, grad, options.ridge);
        fit.ridge_fallback = fit.ridge_fallback || sol.ridge_used;

        // The pseudolikelihood is concave; step-halve until it does not
        // decrease.
        double scale = 1.0;
        VectorXd candidate = beta + sol.step;
        double candidate_ll = logistic_log_likelihood(x, y, candidate);
        int halvings = 0;
        while (candidate_ll < ll && halvings < 50) {
            scale *= 0.5;
            candidate = beta + scale * sol.step;
            candidate_ll = logistic_log_likelihood(x, y, candidate);
            ++halvings;
        }
        beta = candidate;
        ll = candidate_ll;
        fit.log_likelihood_path.push_back(ll);
        fit.iterations = iter + 1;

        if (beta.lpNorm<Eigen::Infinity>() > 30.0) {
            // Coefficients running away: perfectly separated design.
            fit.separation_suspected = true;
            break;
        }
    }

    fit.beta.assign(beta.data(), beta.data() + p);
    if (fit.converged || !fit.separation_suspected) {
        const VectorXd eta = x * beta;
        MatrixXd info = MatrixXd::Zero(p, p);
        for (Eigen::Index i = 0; i < eta.size(); ++i) {
            const double pi = logistic(eta(i));
            info += pi * (1.0 - pi) * x.row(i).transpose() * x.row(i);
        }
        fit.std_errors = information_std_errors(info, options.ridge, &fit.ridge_fallback);
    } else {
        fit.std_errors.assign(static_cast<std::size_t>(p),
                              std::numeric_limits<double>::quiet_NaN());
    }
    return fit;
}

} // namespace

LogisticFit fit_logistic(const std::vector<std::vector<double>>& x,
                         const std::vector<std::uint8_t>& y, const MpleOptions& options) {
    if (x.size() != y.size() || x.empty())
        throw DataError("design and response size mismatch");
    const std::size_t p = x[0].size();
    MatrixXd mx(static_cast<Eigen::Index>(x.size()), static_cast<Eigen::Index>(p));
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (x[i].size() != p)
            throw DataError("ragged design matrix");
        for (std::size_t j = 0; j < p; ++j)
            mx(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = x[i][j];
    }
    return newton_logistic(mx, y, options);
}

EstimationResult mple(const TemporalNetwork& data, const ModelSpec& spec,
                      const MpleOptions& options) {
    const DyadDesign design = build_design(data, spec);
    LogisticFit fit = newton_logistic(design.x, design.y, options);

    EstimationResult res;
    res.terms = spec.terms;
    res.theta_hat = fit.beta;
    res.std_errors = fit.std_errors;
    res.log_likelihood_path = fit.log_likelihood_path;
    res.converged = fit.converged;
    res.iterations = fit.iterations;
    res.method = EstimationMethod::MPLE;
    res.ridge_fallback = fit.ridge_fallback;
    res.separation_suspected = fit.separation_suspected;
    if (fit.separation_suspected)
        res.note = "coefficients diverged; design may be completely separated";
    return res;
}

namespace {

struct TransitionSamples {
    std::vector<StatisticVector> stats; // sampled sufficient statistics
    StatisticVector observed;
};

// Importance-weighted moments of the sampled statistics under
// exp((theta - theta_ref)' g).
struct WeightedMoments {
    VectorXd mean;
    MatrixXd cov;
    double log_mean_weight;
    double ess;
};

WeightedMoments weighted_moments(const TransitionSamples& ts, const VectorXd& theta,
                                 const VectorXd& theta_ref) {
    const std::size_t m = ts.stats.size();
    const std::size_t p = ts.observed.size();
    std::vector<double> log_w(m);
    double mx = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < m; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < p; ++j)
            s += (theta(static_cast<Eigen::Index>(j)) -
                  theta_ref(static_cast<Eigen::Index>(j))) *
                 ts.stats[i][j];
        log_w[i] = s;
        mx = std::max(mx, s);
    }

    VectorXd mean = VectorXd::Zero(static_cast<Eigen::Index>(p));
    MatrixXd second = MatrixXd::Zero(static_cast<Eigen::Index>(p),
                                     static_cast<Eigen::Index>(p));
    double sw = 0.0, sw2 = 0.0;
    VectorXd g(static_cast<Eigen::Index>(p));
    for (std::size_t i = 0; i < m; ++i) {
        const double w = std::exp(log_w[i] - mx);
        for (std::size_t j = 0; j < p; ++j)
            g(static_cast<Eigen::Index>(j)) = ts.stats[i][j];
        mean += w * g;
        second += w * g * g.transpose();
        sw += w;
        sw2 += w * w;
    }
    mean /= sw;
    second /= sw;

    WeightedMoments out;
    out.mean = mean;
    out.cov = second - mean * mean.transpose();
    out.log_mean_weight = mx + std::log(sw / static_cast<double>(m));
    out.ess = sw2 > 0 ? sw * sw / sw2 : 0.0;
    return out;
}

} // namespace

EstimationResult mcmle(const TemporalNetwork& data, const ModelSpec& spec,
                       const McmcConfig& mcmc, std::int64_t max_outer,
                       const McmleOptions& options) {
    if (max_outer < 1)
        throw ConfigError("max_outer must be >= 1");
    mcmc.validate();
    data.validate();
    if (data.snapshots.size() < 2)
        throw DataError("Monte Carlo MLE needs at least one transition");

    EstimationResult start = mple(data, spec);
    const std::size_t p = spec.size();
    const std::size_t n_trans = data.snapshots.size() - 1;
    const auto& cov = data.universe.covariates;

    EstimationResult res;
    res.terms = spec.terms;
    res.method = EstimationMethod::MCMLE;
    if (!start.converged && start.separation_suspected) {
        res = start;
        res.method = EstimationMethod::MCMLE;
        res.note = "MPLE initialization failed: " + start.note;
        return res;
    }

    VectorXd theta = Eigen::Map<const VectorXd>(start.theta_hat.data(),
                                                static_cast<Eigen::Index>(p));
    std::vector<StatisticVector> observed(n_trans);
    for (std::size_t t = 0; t < n_trans; ++t)
        observed[t] = compute_statistics(data.snapshots[t + 1].graph,
                                         &data.snapshots[t].graph, cov, spec);

    bool converged = false;
    bool ess_warning = false;
    bool halted = false;
    std::int64_t outer = 0;
    std::vector<TransitionSamples> samples(n_trans);
    VectorXd theta_ref = theta;

    for (outer = 0; outer < max_outer; ++outer) {
        theta_ref = theta;
        ModelSpec at_ref = spec;
        at_ref.theta.assign(theta_ref.data(), theta_ref.data() + p);

        // Sample each conditioning snapshot independently at theta_ref.
        parallel_for(n_trans, options.threads, [&](std::size_t t) {
            McmcConfig c = mcmc;
            c.seed = Rng::derive(mcmc.seed,
                                 static_cast<std::uint64_t>(outer) * n_trans + t)
                         .next_u64();
            SampleBatch batch = sample_networks(data.snapshots[t].graph, cov, at_ref, c,
                                                /*record_graphs=*/false);
            samples[t].stats = std::move(batch.statistics);
            samples[t].observed = observed[t];
        });

        // Newton ascent of the importance-approximated log-likelihood.
        auto approx_ll = [&](const VectorXd& th) {
            double ll = 0.0;
            for (std::size_t t = 0; t < n_trans; ++t) {
                WeightedMoments wm = weighted_moments(samples[t], th, theta_ref);
                double dot = 0.0;
                for (std::size_t j = 0; j < p; ++j)
                    dot += th(static_cast<Eigen::Index>(j)) * samples[t].observed[j];
                ll += dot - wm.log_mean_weight;
            }
            return ll;
        };

        double ll = approx_ll(theta);
        bool inner_failed = false;
        for (std::int64_t inner = 0; inner < options.max_inner_iterations; ++inner) {
            VectorXd grad = VectorXd::Zero(static_cast<Eigen::Index>(p));
            MatrixXd info = MatrixXd::Zero(static_cast<Eigen::Index>(p),
                                           static_cast<Eigen::Index>(p));
            double min_ess = std::numeric_limits<double>::infinity();
            for (std::size_t t = 0; t < n_trans; ++t) {
                WeightedMoments wm = weighted_moments(samples[t], theta, theta_ref);
                for (std::size_t j = 0; j < p; ++j)
                    grad(static_cast<Eigen::Index>(j)) +=
                        samples[t].observed[j] - wm.mean(static_cast<Eigen::Index>(j));
                info += wm.cov;
                min_ess = std::min(min_ess, wm.ess);
            }
            if (min_ess < 0.05 * static_cast<double>(mcmc.n_samples))
                ess_warning = true;

            if (grad.lpNorm<Eigen::Infinity>() < options.inner_gradient_tolerance)
                break;

            Solved sol = solve_information(info, grad, 1e-6);
            res.ridge_fallback = res.ridge_fallback || sol.ridge_used;

            double scale = 1.0;
            VectorXd candidate = theta + sol.step;
            double candidate_ll = approx_ll(candidate);
            std::int64_t halvings = 0;
            while (candidate_ll < ll && halvings < options.max_step_halvings) {
                scale *= 0.5;
                candidate = theta + scale * sol.step;
                candidate_ll = approx_ll(candidate);
                ++halvings;
            }
            if (candidate_ll < ll) {
                inner_failed = true;
                break;
            }
            theta = candidate;
            ll = candidate_ll;
        }

        res.log_likelihood_path.push_back(ll);

        if (inner_failed) {
            halted = true;
            res.note = "no improving step after step halving";
            break;
        }
        if ((theta - theta_ref).lpNorm<Eigen::Infinity>() < options.step_tolerance) {
            converged = true;
            ++outer;
            break;
        }
    }

    // Fisher information from the final batches, reweighted to theta-hat.
    MatrixXd info = MatrixXd::Zero(static_cast<Eigen::Index>(p),
                                   static_cast<Eigen::Index>(p));
    for (std::size_t t = 0; t < n_trans; ++t)
        info += weighted_moments(samples[t], theta, theta_ref).cov;

    res.theta_hat.assign(theta.data(), theta.data() + p);
    res.std_errors = information_std_errors(info, 1e-6, &res.ridge_fallback);
    res.converged = converged && !halted;
    res.iterations = outer;
    res.ess_warning = ess_warning;
    return res;
}

BootstrapResult bootstrap_std_errors(const TemporalNetwork& data, const ModelSpec& spec,
                                     std::int64_t n_boot, std::uint64_t seed,
                                     unsigned threads) {
    if (n_boot < 1)
        throw ConfigError("n_boot must be >= 1");
    data.validate();
    if (data.snapshots.size() < 3)
        throw DataError("bootstrap needs at least two transitions");

    const DyadDesign design = build_design(data, spec);
    const std::size_t n_trans = design.transition_rows.size();
    const std::size_t p = spec.size();

    std::vector<std::vector<double>> estimates(static_cast<std::size_t>(n_boot));
    std::vector<std::uint8_t> ok(static_cast<std::size_t>(n_boot), 0);

    parallel_for(static_cast<std::size_t>(n_boot), threads, [&](std::size_t b) {
        Rng rng = Rng::derive(seed, b);
        const std::int64_t rows_per =
            design.transition_rows[0].second - design.transition_rows[0].first;
        MatrixXd x(static_cast<Eigen::Index>(n_trans) * rows_per,
                   static_cast<Eigen::Index>(p));
        std::vector<std::uint8_t> y(n_trans * static_cast<std::size_t>(rows_per));
        std::int64_t row = 0;
        for (std::size_t t = 0; t < n_trans; ++t) {
            const std::size_t pick =
                static_cast<std::size_t>(rng.next_below(n_trans));
            const auto [lo, hi] = design.transition_rows[pick];
            x.middleRows(row, hi - lo) = design.x.middleRows(lo, hi - lo);
            for (std::int64_t r = lo; r < hi; ++r)
                y[static_cast<std::size_t>(row + (r - lo))] =
                    design.y[static_cast<std::size_t>(r)];
            row += hi - lo;
        }
        LogisticFit fit = newton_logistic(x, y, MpleOptions{});
        if (fit.converged) {
            estimates[b] = fit.beta;
            ok[b] = 1;
        }
    });

    BootstrapResult out;
    out.n_requested = n_boot;
    for (std::size_t b = 0; b < static_cast<std::size_t>(n_boot); ++b)
        (ok[b] ? out.n_used : out.n_dropped)++;
    if (out.n_used * 2 < n_boot)
        throw DataError("more than half of the bootstrap replicates failed to converge");

    out.std_errors.assign(p, 0.0);
    if (out.n_used <= 1)
        return out; // a single replicate carries no resampling variance

    std::vector<double> mean(p, 0.0);
    for (std::size_t b = 0; b < estimates.size(); ++b)
        if (ok[b])
            for (std::size_t j = 0; j < p; ++j)
                mean[j] += estimates[b][j];
    for (std::size_t j = 0; j < p; ++j)
        mean[j] /= static_cast<double>(out.n_used);
    for (std::size_t b = 0; b < estimates.size(); ++b)
        if (ok[b])
            for (std::size_t j = 0; j < p; ++j) {
                const double d = estimates[b][j] - mean[j];
                out.std_errors[j] += d * d;
            }
    for (std::size_t j = 0; j < p; ++j)
        out.std_errors[j] =
            std::sqrt(out.std_errors[j] / static_cast<double>(out.n_used - 1));
    return out;
}

} // namespace ttergm
