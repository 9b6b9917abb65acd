#pragma once

#include <cstdint>
#include <vector>

#include "ttergm/graph.hpp"
#include "ttergm/statistics.hpp"

namespace ttergm {

// Two-block stochastic block model over the influencer/non-influencer
// partition: block 0 = non-influencer, block 1 = influencer.
struct BlockModel {
    std::vector<int> block_of;
    std::vector<std::vector<double>> p; // p[a][b] = edge rate from a to b
    bool empty_block = false;           // some block had no nodes; its rates are 0

    int n_blocks() const { return static_cast<int>(p.size()); }
    void validate() const;
};

// Exact MLE for independent Bernoulli dyads, pooled over all target
// snapshots (every snapshot after the first; a single-snapshot network is
// fit on that snapshot).
BlockModel fit_block_model(const TemporalNetwork& data);

std::vector<DirectedGraph> sample_block_model(const BlockModel& m, std::int64_t n_samples,
                                              std::uint64_t seed);

// Term presets. The classic set is a strict prefix of the triadic set.
ModelSpec classic_tergm_spec();
ModelSpec ttergm_spec();

} // namespace ttergm
