#include "ttergm/evaluation.hpp"

#include <algorithm>
#include <cmath>

#include "ttergm/numeric.hpp"
#include "ttergm/parallel.hpp"

namespace ttergm {

double incomplete_beta(double a, double b, double x) {
    if (x <= 0.0)
        return 0.0;
    if (x >= 1.0)
        return 1.0;

    // Lentz's continued fraction for the incomplete beta.
    auto betacf = [](double aa, double bb, double xx) {
        const double tiny = 1e-300;
        const double qab = aa + bb;
        const double qap = aa + 1.0;
        const double qam = aa - 1.0;
        double c = 1.0;
        double d = 1.0 - qab * xx / qap;
        if (std::fabs(d) < tiny)
            d = tiny;
        d = 1.0 / d;
        double h = d;
        for (int m = 1; m <= 300; ++m) {
            const int m2 = 2 * m;
            double num = m * (bb - m) * xx / ((qam + m2) * (aa + m2));
            d = 1.0 + num * d;
            if (std::fabs(d) < tiny)
                d = tiny;
            c = 1.0 + num / c;
            if (std::fabs(c) < tiny)
                c = tiny;
            d = 1.0 / d;
            h *= d * c;
            num = -(aa + m) * (qab + m) * xx / ((aa + m2) * (qap + m2));
            d = 1.0 + num * d;
            if (std::fabs(d) < tiny)
                d = tiny;
            c = 1.0 + num / c;
            if (std::fabs(c) < tiny)
                c = tiny;
            d = 1.0 / d;
            const double del = d * c;
            h *= del;
            if (std::fabs(del - 1.0) < 1e-14)
                break;
        }
        return h;
    };

    const double log_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                             a * std::log(x) + b * std::log1p(-x);
    const double front = std::exp(log_front);
    if (x < (a + 1.0) / (a + b + 2.0))
        return front * betacf(a, b, x) / a;
    return 1.0 - front * betacf(b, a, 1.0 - x) / b;
}

double student_t_two_sided_p(double t, double df) {
    if (!std::isfinite(t))
        return 0.0;
    if (df <= 0.0)
        return 1.0;
    const double x = df / (df + t * t);
    return std::clamp(incomplete_beta(df / 2.0, 0.5, x), 0.0, 1.0);
}

namespace {

double mean_of(std::span<const double> v) {
    double s = 0.0;
    for (double x : v)
        s += x;
    return s / static_cast<double>(v.size());
}

double sample_variance(std::span<const double> v, double mean) {
    double s = 0.0;
    for (double x : v) {
        const double d = x - mean;
        s += d * d;
    }
    return s / static_cast<double>(v.size() - 1);
}

struct DegreeAverages {
    double in_avg = 0.0;
    double out_avg = 0.0;
};

DegreeAverages average_degrees(const DirectedGraph& g,
                               std::span<const std::uint8_t> mask) {
    DegreeAverages a;
    std::int64_t count = 0;
    double in_sum = 0.0, out_sum = 0.0;
    for (NodeId v = 0; v < g.n(); ++v) {
        if (!mask.empty() && !mask[static_cast<std::size_t>(v)])
            continue;
        in_sum += g.in_degree(v);
        out_sum += g.out_degree(v);
        ++count;
    }
    if (count == 0) {
        a.in_avg = a.out_avg = std::numeric_limits<double>::quiet_NaN();
        return a;
    }
    a.in_avg = in_sum / static_cast<double>(count);
    a.out_avg = out_sum / static_cast<double>(count);
    return a;
}

DegreeErrorPair degree_error_impl(std::span<const DirectedGraph> predicted,
                                  const DirectedGraph& observed,
                                  std::span<const std::uint8_t> mask) {
    if (predicted.empty())
        throw DataError("degree error needs at least one predicted graph");
    for (const auto& g : predicted)
        if (g.n() != observed.n())
            throw DataError("predicted and observed graphs differ in universe");

    double in_mean = 0.0, out_mean = 0.0;
    for (const auto& g : predicted) {
        const DegreeAverages a = average_degrees(g, mask);
        in_mean += a.in_avg;
        out_mean += a.out_avg;
    }
    in_mean /= static_cast<double>(predicted.size());
    out_mean /= static_cast<double>(predicted.size());
    const DegreeAverages obs = average_degrees(observed, mask);
    return {std::fabs(in_mean - obs.in_avg), std::fabs(out_mean - obs.out_avg)};
}

} // namespace

DegreeErrorPair degree_error(std::span<const DirectedGraph> predicted,
                             const DirectedGraph& observed) {
    return degree_error_impl(predicted, observed, {});
}

DegreeErrorPair degree_error_restricted(std::span<const DirectedGraph> predicted,
                                        const DirectedGraph& observed,
                                        std::span<const std::uint8_t> mask) {
    if (mask.size() != static_cast<std::size_t>(observed.n()))
        throw DataError("restriction mask does not match universe");
    return degree_error_impl(predicted, observed, mask);
}

double significance_test(std::span<const double> errors_a,
                         std::span<const double> errors_b) {
    if (errors_a.size() < 2 || errors_b.size() < 2)
        throw DataError("significance test needs at least two runs per side");
    const double na = static_cast<double>(errors_a.size());
    const double nb = static_cast<double>(errors_b.size());
    const double ma = mean_of(errors_a);
    const double mb = mean_of(errors_b);
    const double va = sample_variance(errors_a, ma);
    const double vb = sample_variance(errors_b, mb);
    const double se2 = va / na + vb / nb;
    if (se2 == 0.0)
        return ma == mb ? 1.0 : 0.0;
    const double t = (ma - mb) / std::sqrt(se2);
    const double df = se2 * se2 /
                      ((va / na) * (va / na) / (na - 1.0) +
                       (vb / nb) * (vb / nb) / (nb - 1.0));
    return student_t_two_sided_p(t, df);
}

PredictiveModel PredictiveModel::ergm(std::string name, ModelSpec spec) {
    PredictiveModel m;
    m.name = std::move(name);
    m.model = std::move(spec);
    return m;
}

PredictiveModel PredictiveModel::block(std::string name, BlockModel bm) {
    PredictiveModel m;
    m.name = std::move(name);
    m.model = std::move(bm);
    return m;
}

PredictiveModel PredictiveModel::failed(std::string name, std::string why) {
    PredictiveModel m;
    m.name = std::move(name);
    m.absent = true;
    m.note = std::move(why);
    return m;
}

EvalReport run_holdout(const TemporalNetwork& data,
                       const std::vector<PredictiveModel>& models,
                       const std::vector<std::string>& holdout_labels,
                       std::int64_t n_runs, std::uint64_t seed,
                       const McmcConfig& gen_mcmc, unsigned threads) {
    data.validate();
    if (n_runs < 1)
        throw ConfigError("n_runs must be >= 1");
    if (holdout_labels.empty())
        throw ConfigError("no holdout months given");
    const std::size_t horizon = holdout_labels.size();
    if (data.snapshots.size() < horizon + 1)
        throw ConfigError("not enough snapshots for the requested holdout");
    const std::size_t first_holdout = data.snapshots.size() - horizon;
    for (std::size_t h = 0; h < horizon; ++h)
        if (data.snapshots[first_holdout + h].label != holdout_labels[h])
            throw ConfigError("holdout labels must match the trailing snapshots");

    const Snapshot& initial = data.snapshots[first_holdout - 1];
    std::vector<std::uint8_t> influencer_mask(
        static_cast<std::size_t>(data.universe.n()), 0);
    for (NodeId v = 0; v < data.universe.n(); ++v)
        influencer_mask[static_cast<std::size_t>(v)] =
            data.universe.covariates[static_cast<std::size_t>(v)].is_influencer ? 1 : 0;
    const bool have_influencers =
        std::any_of(influencer_mask.begin(), influencer_mask.end(),
                    [](std::uint8_t b) { return b != 0; });

    EvalReport report;
    report.n_runs = n_runs;
    report.metrics.assign(kEvalMetrics.begin(), kEvalMetrics.end());
    for (std::size_t h = 0; h < horizon; ++h)
        report.months.push_back(holdout_labels[h]);
    for (const auto& m : models) {
        report.model_names.push_back(m.name);
        report.model_absent.push_back(m.absent ? 1 : 0);
    }
    report.cells.assign(
        models.size(),
        std::vector<std::vector<EvalCell>>(horizon,
                                           std::vector<EvalCell>(report.metrics.size())));

    for (std::size_t mi = 0; mi < models.size(); ++mi) {
        const PredictiveModel& pm = models[mi];
        if (pm.absent)
            continue;

        // errors[run][month][metric]
        std::vector<std::vector<std::array<double, 4>>> errors(
            static_cast<std::size_t>(n_runs),
            std::vector<std::array<double, 4>>(horizon));

        parallel_for(static_cast<std::size_t>(n_runs), threads, [&](std::size_t run) {
            const std::uint64_t run_seed =
                Rng::derive(Rng::derive(seed, mi).next_u64(), run).next_u64();
            std::vector<DirectedGraph> predicted;
            predicted.reserve(horizon);
            if (std::holds_alternative<ModelSpec>(pm.model)) {
                McmcConfig c = gen_mcmc;
                c.seed = run_seed;
                GeneratedSequence gen =
                    generate_sequence(initial, data.universe,
                                      std::get<ModelSpec>(pm.model),
                                      static_cast<std::int64_t>(horizon), c);
                for (std::size_t h = 0; h < horizon; ++h)
                    predicted.push_back(std::move(gen.network.snapshots[h + 1].graph));
            } else {
                const BlockModel& bm = std::get<BlockModel>(pm.model);
                for (std::size_t h = 0; h < horizon; ++h)
                    predicted.push_back(
                        std::move(sample_block_model(bm, 1, Rng::derive(run_seed, h)
                                                               .next_u64())[0]));
            }
            for (std::size_t h = 0; h < horizon; ++h) {
                const DirectedGraph& obs = data.snapshots[first_holdout + h].graph;
                std::span<const DirectedGraph> one(&predicted[h], 1);
                const DegreeErrorPair whole = degree_error(one, obs);
                DegreeErrorPair infl{std::numeric_limits<double>::quiet_NaN(),
                                     std::numeric_limits<double>::quiet_NaN()};
                if (have_influencers)
                    infl = degree_error_restricted(one, obs, influencer_mask);
                errors[run][h] = {whole.in_err, whole.out_err, infl.in_err, infl.out_err};
            }
        });

        for (std::size_t h = 0; h < horizon; ++h)
            for (std::size_t k = 0; k < report.metrics.size(); ++k) {
                EvalCell& cell = report.cells[mi][h][k];
                cell.per_run.resize(static_cast<std::size_t>(n_runs));
                for (std::int64_t run = 0; run < n_runs; ++run)
                    cell.per_run[static_cast<std::size_t>(run)] =
                        errors[static_cast<std::size_t>(run)][h][k];
                cell.mean_error = mean_of(cell.per_run);
            }
    }

    if (n_runs >= 2) {
        report.p_values_available = true;
        for (std::size_t a = 0; a < models.size(); ++a) {
            if (models[a].absent)
                continue;
            for (std::size_t b = a + 1; b < models.size(); ++b) {
                if (models[b].absent)
                    continue;
                for (std::size_t h = 0; h < horizon; ++h)
                    for (std::size_t k = 0; k < report.metrics.size(); ++k) {
                        const auto& ea = report.cells[a][h][k].per_run;
                        const auto& eb = report.cells[b][h][k].per_run;
                        if (std::any_of(ea.begin(), ea.end(),
                                        [](double x) { return std::isnan(x); }) ||
                            std::any_of(eb.begin(), eb.end(),
                                        [](double x) { return std::isnan(x); }))
                            continue;
                        PairwiseTest t;
                        t.month = report.months[h];
                        t.metric = report.metrics[k];
                        t.model_a = models[a].name;
                        t.model_b = models[b].name;
                        t.p_value = significance_test(ea, eb);
                        report.tests.push_back(std::move(t));
                    }
            }
        }
    } else {
        report.note = "p-values unavailable: fewer than two runs";
    }
    return report;
}

} // namespace ttergm
