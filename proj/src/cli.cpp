#include "ttergm/cli.hpp"

#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "ttergm/baselines.hpp"
#include "ttergm/estimation.hpp"
#include "ttergm/evaluation.hpp"
#include "ttergm/ingestion.hpp"
#include "ttergm/parallel.hpp"
#include "ttergm/serialize.hpp"

namespace ttergm {

namespace {

using nlohmann::json;
using ordered_json = nlohmann::ordered_json;

int log_verbosity = 1; // 0 quiet, 1 info, 2 debug

void info(const std::string& line) {
    if (log_verbosity >= 1)
        std::cout << line << "\n";
}

void reject_unknown_keys(const json& obj, const std::set<std::string>& allowed,
                         const std::string& where) {
    for (const auto& [key, value] : obj.items())
        if (!allowed.count(key))
            throw ConfigError("unknown config key '" + key + "' in " + where);
}

struct LoadedConfig {
    json root;
    std::uint64_t seed = 0;
    std::filesystem::path out = "out";
    unsigned threads = 0;
};

LoadedConfig load_config(const std::filesystem::path& path, const CliOverrides& ov) {
    if (path.empty())
        throw ConfigError("--config is required");
    if (!std::filesystem::exists(path))
        throw IoError("config file does not exist: " + path.string());
    json root;
    try {
        root = json::parse(read_text_file(path));
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!root.is_object())
        throw ConfigError("config root must be a JSON object");
    reject_unknown_keys(root,
                        {"seed", "out", "threads", "log_level", "ingest", "estimate",
                         "simulate", "evaluate"},
                        "config root");

    LoadedConfig cfg;
    cfg.root = root;
    if (root.contains("seed")) {
        if (!root["seed"].is_number_unsigned() && !root["seed"].is_number_integer())
            throw ConfigError("seed must be an unsigned integer");
        cfg.seed = root["seed"].get<std::uint64_t>();
    }
    if (root.contains("out")) {
        if (!root["out"].is_string())
            throw ConfigError("out must be a path string");
        cfg.out = root["out"].get<std::string>();
    }
    if (root.contains("threads")) {
        if (!root["threads"].is_number_unsigned())
            throw ConfigError("threads must be a non-negative integer");
        cfg.threads = root["threads"].get<unsigned>();
    }
    if (root.contains("log_level")) {
        const std::string lvl = root["log_level"].get<std::string>();
        if (lvl == "quiet")
            log_verbosity = 0;
        else if (lvl == "info")
            log_verbosity = 1;
        else if (lvl == "debug")
            log_verbosity = 2;
        else
            throw ConfigError("log_level must be quiet|info|debug");
    }

    if (ov.has_seed)
        cfg.seed = ov.seed;
    if (ov.has_out)
        cfg.out = ov.out;
    if (ov.has_threads)
        cfg.threads = ov.threads;
    if (cfg.threads == 0)
        cfg.threads = default_thread_count();
    return cfg;
}

const json& require_block(const json& root, const std::string& name) {
    if (!root.contains(name))
        throw ConfigError("config is missing the '" + name + "' block");
    if (!root[name].is_object())
        throw ConfigError("'" + name + "' must be a JSON object");
    return root[name];
}

std::filesystem::path require_path(const json& block, const std::string& key,
                                   const std::string& where) {
    if (!block.contains(key) || !block[key].is_string())
        throw ConfigError("missing path '" + key + "' in " + where);
    const std::filesystem::path p = block[key].get<std::string>();
    if (!std::filesystem::exists(p))
        throw IoError("input path does not exist: " + p.string());
    return p;
}

McmcConfig parse_mcmc(const json& block, std::uint64_t seed) {
    McmcConfig c;
    c.seed = seed;
    if (block.is_null())
        return c;
    reject_unknown_keys(
        block, {"burn_in_sweeps", "sample_interval_sweeps", "n_samples", "proposal"},
        "mcmc");
    if (block.contains("burn_in_sweeps"))
        c.burn_in_sweeps = block["burn_in_sweeps"].get<std::int64_t>();
    if (block.contains("sample_interval_sweeps"))
        c.sample_interval_sweeps = block["sample_interval_sweeps"].get<std::int64_t>();
    if (block.contains("n_samples"))
        c.n_samples = block["n_samples"].get<std::int64_t>();
    if (block.contains("proposal")) {
        const std::string p = block["proposal"].get<std::string>();
        if (p == "gibbs")
            c.proposal = Proposal::GibbsSweep;
        else if (p == "random-toggle")
            c.proposal = Proposal::RandomToggle;
        else
            throw ConfigError("proposal must be gibbs|random-toggle");
    }
    c.validate();
    return c;
}

ModelSpec resolve_preset(const std::string& name) {
    if (name == "classic-tergm")
        return classic_tergm_spec();
    if (name == "ttergm")
        return ttergm_spec();
    if (name == "edges") {
        ModelSpec spec;
        spec.terms = {Term::Edges};
        spec.theta = {0.0};
        return spec;
    }
    throw ConfigError("unknown preset '" + name + "' (expected classic-tergm|ttergm|edges)");
}

std::map<std::string, std::int64_t> load_follower_counts(const std::filesystem::path& p) {
    const json j = json::parse(read_text_file(p));
    if (!j.is_object())
        throw DataError("follower count file must be a JSON object of user -> count");
    std::map<std::string, std::int64_t> counts;
    for (const auto& [user, count] : j.items()) {
        if (!count.is_number_integer() && !count.is_number_unsigned())
            throw DataError("follower count for '" + user + "' is not an integer");
        const std::int64_t c = count.get<std::int64_t>();
        if (c < 0)
            throw DataError("negative follower count for '" + user + "'");
        counts[user] = c;
    }
    return counts;
}

void ensure_out_dir(const std::filesystem::path& out) {
    std::error_code ec;
    std::filesystem::create_directories(out, ec);
    if (ec)
        throw IoError("cannot create output directory: " + out.string());
}

TemporalNetwork training_slice(const TemporalNetwork& data, std::size_t holdout) {
    TemporalNetwork train;
    train.universe = data.universe;
    train.snapshots.assign(data.snapshots.begin(),
                           data.snapshots.end() - static_cast<std::ptrdiff_t>(holdout));
    return train;
}

int run_guarded(const std::function<void()>& body) {
    try {
        body();
        return kExitOk;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const IoError& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return kExitIo;
    } catch (const DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return kExitData;
    } catch (const json::exception& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return kExitData;
    }
}

} // namespace

int cmd_ingest(const std::filesystem::path& config_path, const CliOverrides& overrides) {
    return run_guarded([&] {
        const LoadedConfig cfg = load_config(config_path, overrides);
        const json& block = require_block(cfg.root, "ingest");
        reject_unknown_keys(block,
                            {"events_path", "followers_path", "date_range",
                             "top_k_repos", "top_k_influencers"},
                            "ingest");

        const auto events_path = require_path(block, "events_path", "ingest");
        if (!block.contains("date_range") || !block["date_range"].is_array() ||
            block["date_range"].size() != 2)
            throw ConfigError("ingest.date_range must be [start, end] dates");
        const auto start = parse_date_utc(block["date_range"][0].get<std::string>());
        const auto end = parse_date_utc(block["date_range"][1].get<std::string>());
        if (!start || !end)
            throw ConfigError("ingest.date_range entries must be YYYY-MM-DD");

        IngestConfig icfg;
        icfg.start_ts = *start;
        icfg.end_ts = *end + 86399; // inclusive end-of-day
        if (block.contains("top_k_repos"))
            icfg.top_k_repos = block["top_k_repos"].get<std::int64_t>();
        if (block.contains("top_k_influencers"))
            icfg.top_k_influencers = block["top_k_influencers"].get<std::int64_t>();
        icfg.validate();

        std::ifstream events_in(events_path);
        if (!events_in)
            throw IoError("cannot open event log: " + events_path.string());
        ParsedLog log = parse_event_log(events_in);

        std::map<std::string, std::int64_t> followers;
        if (block.contains("followers_path"))
            followers = load_follower_counts(require_path(block, "followers_path", "ingest"));
        else
            followers = derive_follower_proxy(log.events, icfg.start_ts, icfg.end_ts);

        IngestResult result = build_influence_network(log.events, icfg, followers);

        ensure_out_dir(cfg.out);
        save_network(cfg.out / "network", result.network);

        std::vector<NodeId> influencer_ids;
        for (NodeId v = 0; v < result.network.universe.n(); ++v)
            if (result.network.universe.covariates[static_cast<std::size_t>(v)].is_influencer)
                influencer_ids.push_back(v);
        const auto features =
            extract_connection_features(result.network, influencer_ids);
        write_text_file(cfg.out / "features.csv",
                        connection_features_csv(features, result.network.universe));

        ordered_json summary;
        summary["events"] = log.events.size();
        summary["rejected"] = log.rejections.count;
        summary["rejected_samples"] = log.rejections.samples;
        summary["influencers"] = result.influencers;
        summary["influencer_note"] = result.influencer_note;
        summary["top_repos"] = result.top_repos;
        summary["nodes"] = result.network.universe.n();
        summary["months"] = ordered_json::array();
        for (const auto& s : result.network.snapshots) {
            ordered_json m;
            m["label"] = s.label;
            m["edges"] = s.graph.edge_count();
            summary["months"].push_back(std::move(m));
        }
        write_text_file(cfg.out / "ingest_summary.json", summary.dump(2) + "\n");

        std::ostringstream line;
        line << "events=" << log.events.size() << " rejected=" << log.rejections.count;
        info(line.str());
        std::ostringstream line2;
        line2 << "nodes=" << result.network.universe.n()
              << " months=" << result.network.snapshots.size();
        info(line2.str());
        for (const auto& s : result.network.snapshots) {
            std::ostringstream ml;
            ml << "month " << s.label << " edges=" << s.graph.edge_count();
            info(ml.str());
        }
    });
}

int cmd_estimate(const std::filesystem::path& config_path, const CliOverrides& overrides) {
    return run_guarded([&] {
        const LoadedConfig cfg = load_config(config_path, overrides);
        const json& block = require_block(cfg.root, "estimate");
        reject_unknown_keys(block, {"network_dir", "preset", "method", "max_outer", "mcmc"},
                            "estimate");

        const auto network_dir = require_path(block, "network_dir", "estimate");
        const TemporalNetwork data = load_network(network_dir);

        const std::string preset =
            block.contains("preset") ? block["preset"].get<std::string>() : "ttergm";
        ModelSpec spec = resolve_preset(preset);
        const std::string method =
            block.contains("method") ? block["method"].get<std::string>() : "mple";
        if (method != "mple" && method != "mcmle")
            throw ConfigError("estimate.method must be mple|mcmle");

        EstimationResult res;
        if (method == "mple") {
            res = mple(data, spec);
        } else {
            const McmcConfig mcmc =
                parse_mcmc(block.contains("mcmc") ? block["mcmc"] : json(nullptr), cfg.seed);
            const std::int64_t max_outer =
                block.contains("max_outer") ? block["max_outer"].get<std::int64_t>() : 20;
            McmleOptions opts;
            opts.threads = cfg.threads;
            res = mcmle(data, spec, mcmc, max_outer, opts);
        }

        ensure_out_dir(cfg.out);
        ordered_json echo;
        echo["preset"] = preset;
        echo["method"] = method;
        write_text_file(cfg.out / "estimate.json",
                        estimation_result_to_json(res, cfg.seed, echo.dump()));

        std::ostringstream line;
        line << "method=" << method << " converged=" << (res.converged ? "true" : "false")
             << " iterations=" << res.iterations;
        info(line.str());
        for (std::size_t j = 0; j < res.terms.size(); ++j)
            info(term_name(res.terms[j]) + "=" + format_double(res.theta_hat[j]) +
                 " se=" + format_double(res.std_errors[j]));
    });
}

int cmd_simulate(const std::filesystem::path& config_path, const CliOverrides& overrides) {
    return run_guarded([&] {
        const LoadedConfig cfg = load_config(config_path, overrides);
        const json& block = require_block(cfg.root, "simulate");
        reject_unknown_keys(block, {"network_dir", "model_path", "horizon", "mcmc"},
                            "simulate");

        const auto network_dir = require_path(block, "network_dir", "simulate");
        const TemporalNetwork data = load_network(network_dir);
        if (data.snapshots.empty())
            throw DataError("network has no snapshots to start from");

        const auto model_path = require_path(block, "model_path", "simulate");
        const ModelSpec spec = model_spec_from_json(read_text_file(model_path));

        const std::int64_t horizon =
            block.contains("horizon") ? block["horizon"].get<std::int64_t>() : 1;
        McmcConfig mcmc =
            parse_mcmc(block.contains("mcmc") ? block["mcmc"] : json(nullptr), cfg.seed);

        const GeneratedSequence gen = generate_sequence(
            data.snapshots.back(), data.universe, spec, horizon, mcmc);

        ensure_out_dir(cfg.out);
        save_network(cfg.out / "generated", gen.network);

        // Per-step statistics of the generated snapshots.
        SampleBatch steps;
        for (std::size_t s = 1; s < gen.network.snapshots.size(); ++s)
            steps.statistics.push_back(compute_statistics(
                gen.network.snapshots[s].graph, &gen.network.snapshots[s - 1].graph,
                data.universe.covariates, spec));
        write_text_file(cfg.out / "generated_statistics.csv",
                        batch_statistics_csv(steps, spec));

        ordered_json sidecar;
        sidecar["horizon"] = horizon;
        sidecar["seed"] = cfg.seed;
        sidecar["steps"] = ordered_json::array();
        for (std::size_t s = 0; s < gen.step_degenerate.size(); ++s) {
            ordered_json st;
            st["label"] = gen.network.snapshots[s + 1].label;
            st["degenerate"] = static_cast<bool>(gen.step_degenerate[s]);
            st["acceptance_rate"] = gen.step_acceptance[s];
            sidecar["steps"].push_back(std::move(st));
        }
        write_text_file(cfg.out / "simulate_summary.json", sidecar.dump(2) + "\n");

        std::ostringstream line;
        line << "generated=" << gen.step_degenerate.size()
             << " degenerate=" << (gen.any_degenerate() ? "true" : "false");
        info(line.str());
    });
}

int cmd_evaluate(const std::filesystem::path& config_path, const CliOverrides& overrides) {
    return run_guarded([&] {
        const LoadedConfig cfg = load_config(config_path, overrides);
        const json& block = require_block(cfg.root, "evaluate");
        reject_unknown_keys(block,
                            {"network_dir", "holdout", "n_runs", "method", "max_outer",
                             "mcmc"},
                            "evaluate");

        const auto network_dir = require_path(block, "network_dir", "evaluate");
        const TemporalNetwork data = load_network(network_dir);

        if (!block.contains("holdout") || !block["holdout"].is_array() ||
            block["holdout"].empty())
            throw ConfigError("evaluate.holdout must list the trailing snapshot labels");
        std::vector<std::string> holdout;
        for (const auto& l : block["holdout"])
            holdout.push_back(l.get<std::string>());
        const std::int64_t n_runs =
            block.contains("n_runs") ? block["n_runs"].get<std::int64_t>() : 30;
        const std::string method =
            block.contains("method") ? block["method"].get<std::string>() : "mple";
        if (method != "mple" && method != "mcmle")
            throw ConfigError("evaluate.method must be mple|mcmle");
        McmcConfig mcmc =
            parse_mcmc(block.contains("mcmc") ? block["mcmc"] : json(nullptr), cfg.seed);
        const std::int64_t max_outer =
            block.contains("max_outer") ? block["max_outer"].get<std::int64_t>() : 20;

        if (holdout.size() >= data.snapshots.size())
            throw ConfigError("holdout covers every snapshot; nothing left to fit on");
        const TemporalNetwork train = training_slice(data, holdout.size());

        auto fit_ergm = [&](const std::string& name, ModelSpec spec) {
            try {
                EstimationResult res;
                if (method == "mple") {
                    res = mple(train, spec);
                } else {
                    McmleOptions opts;
                    opts.threads = cfg.threads;
                    res = mcmle(train, spec, mcmc, max_outer, opts);
                }
                if (res.separation_suspected)
                    return PredictiveModel::failed(name, "fit diverged: " + res.note);
                spec.theta = res.theta_hat;
                return PredictiveModel::ergm(name, std::move(spec));
            } catch (const std::exception& e) {
                return PredictiveModel::failed(name, e.what());
            }
        };

        std::vector<PredictiveModel> models;
        try {
            models.push_back(PredictiveModel::block("block", fit_block_model(train)));
        } catch (const std::exception& e) {
            models.push_back(PredictiveModel::failed("block", e.what()));
        }
        models.push_back(fit_ergm("tergm", classic_tergm_spec()));
        models.push_back(fit_ergm("ttergm", ttergm_spec()));

        const EvalReport report = run_holdout(data, models, holdout, n_runs, cfg.seed,
                                              mcmc, cfg.threads);

        ensure_out_dir(cfg.out);
        write_text_file(cfg.out / "eval_report.csv", eval_report_csv(report));
        write_text_file(cfg.out / "eval_report.json", eval_report_json(report, cfg.seed));

        for (std::size_t m = 0; m < report.model_names.size(); ++m) {
            std::ostringstream line;
            line << report.model_names[m];
            if (report.model_absent[m]) {
                line << " absent (" << models[m].note << ")";
            } else {
                for (std::size_t h = 0; h < report.months.size(); ++h)
                    line << " " << report.months[h] << ":in="
                         << format_double(report.cell(m, h, 0).mean_error)
                         << ",out=" << format_double(report.cell(m, h, 1).mean_error);
            }
            info(line.str());
        }
    });
}

int run_cli(int argc, const char* const* argv) {
    CLI::App app{"Triadic temporal ERGM toolkit: ingest event logs, estimate models, "
                 "simulate network trajectories, and evaluate holdout predictions"};
    app.require_subcommand(0, 1);

    std::string config;
    CliOverrides ov;
    std::uint64_t seed_opt = 0;
    std::string out_opt;
    unsigned threads_opt = 0;

    app.add_option("--config", config, "Path to the JSON run configuration");
    auto* seed_flag = app.add_option("--seed", seed_opt, "Override the global seed");
    auto* out_flag = app.add_option("--out", out_opt, "Override the output directory");
    auto* threads_flag =
        app.add_option("--threads", threads_opt, "Worker thread cap (0 = all cores)");

    auto* ingest = app.add_subcommand("ingest", "Build monthly snapshots from an event log");
    auto* estimate = app.add_subcommand("estimate", "Fit model coefficients");
    auto* simulate = app.add_subcommand("simulate", "Generate future snapshots");
    auto* evaluate = app.add_subcommand("evaluate", "Holdout degree-error comparison");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e); // prints help, exits 0
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    }

    if (seed_flag->count()) {
        ov.has_seed = true;
        ov.seed = seed_opt;
    }
    if (out_flag->count()) {
        ov.has_out = true;
        ov.out = out_opt;
    }
    if (threads_flag->count()) {
        ov.has_threads = true;
        ov.threads = threads_opt;
    }

    if (ingest->parsed())
        return cmd_ingest(config, ov);
    if (estimate->parsed())
        return cmd_estimate(config, ov);
    if (simulate->parsed())
        return cmd_simulate(config, ov);
    if (evaluate->parsed())
        return cmd_evaluate(config, ov);

    std::cerr << app.help();
    return kExitConfig;
}

} // namespace ttergm
