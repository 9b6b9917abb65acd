#include "ttergm/serialize.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace ttergm {

namespace {

using ordered_json = nlohmann::ordered_json;

const char* kind_name(NodeKind k) { return k == NodeKind::User ? "User" : "Repo"; }

NodeKind kind_from_name(const std::string& s) {
    if (s == "User")
        return NodeKind::User;
    if (s == "Repo")
        return NodeKind::Repo;
    throw DataError("unknown node kind: " + s);
}

} // namespace

std::string format_double(double v) {
    if (std::isnan(v))
        return "nan";
    return nlohmann::json(v).dump();
}

void write_edge_list(std::ostream& out, const DirectedGraph& g) {
    out << "n=" << g.n() << "\n";
    for (NodeId u = 0; u < g.n(); ++u)
        for (NodeId v : g.out_neighbors(u))
            out << u << " " << v << "\n";
}

DirectedGraph read_edge_list(std::istream& in) {
    std::string header;
    if (!std::getline(in, header) || header.rfind("n=", 0) != 0)
        throw DataError("edge list missing n= header");
    long n = 0;
    try {
        n = std::stol(header.substr(2));
    } catch (const std::exception&) {
        throw DataError("unparseable node count in edge list header");
    }
    if (n < 0)
        throw DataError("negative node count in edge list header");
    DirectedGraph g(static_cast<NodeId>(n));
    std::string line;
    while (std::getline(in, line)) {
        if (line.find_first_not_of(" \t") == std::string::npos)
            continue;
        std::istringstream ls(line);
        long u = 0, v = 0;
        if (!(ls >> u >> v))
            throw DataError("malformed edge line: " + line);
        g.add_edge(static_cast<NodeId>(u), static_cast<NodeId>(v));
    }
    return g;
}

std::string covariates_to_json(const Universe& universe) {
    ordered_json table = ordered_json::object();
    for (NodeId v = 0; v < universe.n(); ++v) {
        const auto& c = universe.covariates[static_cast<std::size_t>(v)];
        ordered_json rec;
        if (!universe.names.empty())
            rec["id"] = universe.names[static_cast<std::size_t>(v)];
        rec["kind"] = kind_name(c.kind);
        rec["is_influencer"] = c.is_influencer;
        rec["follower_count"] = c.follower_count;
        table[std::to_string(v)] = std::move(rec);
    }
    return table.dump(2) + "\n";
}

Universe covariates_from_json(const std::string& text) {
    const auto j = nlohmann::json::parse(text);
    if (!j.is_object())
        throw DataError("covariate file is not a JSON object");
    Universe u;
    u.covariates.resize(j.size());
    bool any_names = false;
    std::vector<std::string> names(j.size());
    for (const auto& [key, rec] : j.items()) {
        std::size_t idx = 0;
        try {
            idx = std::stoul(key);
        } catch (const std::exception&) {
            throw DataError("covariate key is not a node index: " + key);
        }
        if (idx >= u.covariates.size())
            throw DataError("covariate index out of range: " + key);
        NodeCovariates c;
        c.kind = kind_from_name(rec.at("kind").get<std::string>());
        c.is_influencer = rec.at("is_influencer").get<bool>();
        c.follower_count = rec.at("follower_count").get<std::int64_t>();
        u.covariates[idx] = c;
        if (rec.contains("id")) {
            names[idx] = rec["id"].get<std::string>();
            any_names = true;
        }
    }
    if (any_names)
        u.names = std::move(names);
    u.validate();
    return u;
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw IoError("cannot open for writing: " + path.string());
    out << content;
    if (!out)
        throw IoError("write failed: " + path.string());
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot open for reading: " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    if (in.bad())
        throw IoError("read failed: " + path.string());
    return buf.str();
}

void save_network(const std::filesystem::path& dir, const TemporalNetwork& tn) {
    tn.validate();
    std::error_code ec;
    std::filesystem::create_directories(dir / "snapshots", ec);
    if (ec)
        throw IoError("cannot create network directory: " + dir.string());

    ordered_json manifest;
    manifest["n"] = tn.universe.n();
    manifest["labels"] = ordered_json::array();
    for (const auto& s : tn.snapshots)
        manifest["labels"].push_back(s.label);
    write_text_file(dir / "manifest.json", manifest.dump(2) + "\n");
    write_text_file(dir / "covariates.json", covariates_to_json(tn.universe));

    for (const auto& s : tn.snapshots) {
        std::ostringstream out;
        write_edge_list(out, s.graph);
        write_text_file(dir / "snapshots" / (s.label + ".edges"), out.str());
    }
}

TemporalNetwork load_network(const std::filesystem::path& dir) {
    const auto manifest = nlohmann::json::parse(read_text_file(dir / "manifest.json"));
    TemporalNetwork tn;
    tn.universe = covariates_from_json(read_text_file(dir / "covariates.json"));
    for (const auto& label : manifest.at("labels")) {
        Snapshot s;
        s.label = label.get<std::string>();
        std::istringstream in(read_text_file(dir / "snapshots" / (s.label + ".edges")));
        s.graph = read_edge_list(in);
        tn.snapshots.push_back(std::move(s));
    }
    tn.validate();
    return tn;
}

std::string model_spec_to_json(const ModelSpec& spec) {
    ordered_json j;
    j["terms"] = ordered_json::array();
    for (Term t : spec.terms)
        j["terms"].push_back(term_name(t));
    j["theta"] = spec.theta;
    return j.dump(2) + "\n";
}

ModelSpec model_spec_from_json(const std::string& text) {
    const auto j = nlohmann::json::parse(text);
    ModelSpec spec;
    for (const auto& name : j.at("terms"))
        spec.terms.push_back(term_from_name(name.get<std::string>()));
    const char* theta_key = j.contains("theta") ? "theta" : "theta_hat";
    spec.theta = j.at(theta_key).get<std::vector<double>>();
    spec.validate();
    return spec;
}

std::string estimation_result_to_json(const EstimationResult& res, std::uint64_t seed,
                                      const std::string& config_echo) {
    ordered_json j;
    j["method"] = res.method == EstimationMethod::MPLE ? "MPLE" : "MCMLE";
    j["terms"] = ordered_json::array();
    for (Term t : res.terms)
        j["terms"].push_back(term_name(t));
    j["theta_hat"] = res.theta_hat;
    j["std_errors"] = res.std_errors;
    j["converged"] = res.converged;
    j["iterations"] = res.iterations;
    j["log_likelihood_path"] = res.log_likelihood_path;
    j["ridge_fallback"] = res.ridge_fallback;
    j["separation_suspected"] = res.separation_suspected;
    j["ess_warning"] = res.ess_warning;
    j["note"] = res.note;
    j["seed"] = seed;
    if (!config_echo.empty())
        j["config"] = nlohmann::json::parse(config_echo);
    return j.dump(2) + "\n";
}

std::string batch_statistics_csv(const SampleBatch& batch, const ModelSpec& spec) {
    std::ostringstream out;
    for (std::size_t j = 0; j < spec.terms.size(); ++j)
        out << (j ? "," : "") << term_name(spec.terms[j]);
    out << "\n";
    for (const auto& row : batch.statistics) {
        for (std::size_t j = 0; j < row.size(); ++j)
            out << (j ? "," : "") << format_double(row[j]);
        out << "\n";
    }
    return out.str();
}

std::string batch_sidecar_json(const SampleBatch& batch) {
    ordered_json j;
    j["n_samples"] = batch.statistics.size();
    j["acceptance_rate"] = batch.acceptance_rate;
    j["degenerate"] = batch.degenerate;
    return j.dump(2) + "\n";
}

std::string connection_features_csv(const std::vector<SnapshotFeatures>& features,
                                    const Universe& universe) {
    std::ostringstream out;
    out << "month,influencer,direct_links,path2_links,path3_links,influencer_triangles\n";
    for (const auto& sf : features) {
        for (const auto& f : sf.per_influencer) {
            const std::size_t idx = static_cast<std::size_t>(f.influencer);
            const std::string name = universe.names.empty()
                                         ? std::to_string(f.influencer)
                                         : universe.names[idx];
            out << sf.label << "," << name << "," << f.direct_links << ","
                << f.path2_links << "," << f.path3_links << ","
                << f.influencer_triangles << "\n";
        }
    }
    return out.str();
}

std::string eval_report_csv(const EvalReport& report) {
    std::ostringstream out;
    out << "model,month,metric,mean_error,n_runs\n";
    for (std::size_t m = 0; m < report.model_names.size(); ++m)
        for (std::size_t h = 0; h < report.months.size(); ++h)
            for (std::size_t k = 0; k < report.metrics.size(); ++k) {
                const EvalCell& cell = report.cells[m][h][k];
                out << report.model_names[m] << "," << report.months[h] << ","
                    << report.metrics[k] << ","
                    << (report.model_absent[m] ? "nan" : format_double(cell.mean_error))
                    << "," << report.n_runs << "\n";
            }
    return out.str();
}

std::string eval_report_json(const EvalReport& report, std::uint64_t seed) {
    ordered_json j;
    j["seed"] = seed;
    j["n_runs"] = report.n_runs;
    j["months"] = report.months;
    j["metrics"] = report.metrics;
    j["models"] = ordered_json::array();
    for (std::size_t m = 0; m < report.model_names.size(); ++m) {
        ordered_json mj;
        mj["name"] = report.model_names[m];
        mj["absent"] = report.model_absent[m] != 0;
        mj["errors"] = ordered_json::object();
        if (!report.model_absent[m]) {
            for (std::size_t h = 0; h < report.months.size(); ++h) {
                ordered_json month = ordered_json::object();
                for (std::size_t k = 0; k < report.metrics.size(); ++k) {
                    const EvalCell& cell = report.cells[m][h][k];
                    ordered_json cj;
                    cj["mean"] = cell.mean_error;
                    cj["per_run"] = cell.per_run;
                    month[report.metrics[k]] = std::move(cj);
                }
                mj["errors"][report.months[h]] = std::move(month);
            }
        }
        j["models"].push_back(std::move(mj));
    }
    j["p_values_available"] = report.p_values_available;
    if (!report.note.empty())
        j["note"] = report.note;
    j["pairwise_tests"] = ordered_json::array();
    for (const auto& t : report.tests) {
        ordered_json tj;
        tj["month"] = t.month;
        tj["metric"] = t.metric;
        tj["model_a"] = t.model_a;
        tj["model_b"] = t.model_b;
        tj["p_value"] = t.p_value;
        j["pairwise_tests"].push_back(std::move(tj));
    }
    return j.dump(2) + "\n";
}

} // namespace ttergm
