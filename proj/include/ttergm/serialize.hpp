#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "ttergm/estimation.hpp"
#include "ttergm/evaluation.hpp"
#include "ttergm/graph.hpp"
#include "ttergm/ingestion.hpp"
#include "ttergm/sampler.hpp"
#include "ttergm/statistics.hpp"

namespace ttergm {

// Shortest round-trip decimal representation; "nan" for missing values.
std::string format_double(double v);

// Edge-list text format: a `n=<count>` header, then one `u v` pair per line
// in lexicographic order.
void write_edge_list(std::ostream& out, const DirectedGraph& g);
DirectedGraph read_edge_list(std::istream& in);

// Covariate table as a JSON object keyed by node index.
std::string covariates_to_json(const Universe& universe);
Universe covariates_from_json(const std::string& text);

// On-disk network layout: manifest.json (snapshot labels in order),
// covariates.json, and snapshots/<label>.edges.
void save_network(const std::filesystem::path& dir, const TemporalNetwork& tn);
TemporalNetwork load_network(const std::filesystem::path& dir);

std::string model_spec_to_json(const ModelSpec& spec);
// Accepts either {"terms", "theta"} or an estimation result ({"terms",
// "theta_hat"}).
ModelSpec model_spec_from_json(const std::string& text);

std::string estimation_result_to_json(const EstimationResult& res, std::uint64_t seed,
                                      const std::string& config_echo);

// Sample batch export: statistics matrix as CSV with a term-name header,
// acceptance rate and degeneracy flags in a JSON sidecar.
std::string batch_statistics_csv(const SampleBatch& batch, const ModelSpec& spec);
std::string batch_sidecar_json(const SampleBatch& batch);

std::string connection_features_csv(const std::vector<SnapshotFeatures>& features,
                                    const Universe& universe);

std::string eval_report_csv(const EvalReport& report);
std::string eval_report_json(const EvalReport& report, std::uint64_t seed);

void write_text_file(const std::filesystem::path& path, const std::string& content);
std::string read_text_file(const std::filesystem::path& path);

} // namespace ttergm
