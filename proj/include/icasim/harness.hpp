#pragma once

#include <cstdint>
#include <functional>
#include <set>
#include <string>
#include <vector>

#include "icasim/channel.hpp"

namespace icasim::harness {

enum class DetectorKind { Sud, Ica, SudIca };

const char* detector_name(DetectorKind d);

/// Full experiment description.
struct ExperimentPlan {
    std::vector<channel::LinkScenario> scenarios;
    int runs_per_point = 100;
    std::set<DetectorKind> detectors = {DetectorKind::Sud, DetectorKind::Ica,
                                        DetectorKind::SudIca};
    std::uint64_t base_seed = 1;
    int pilot_symbols = 50;

    void validate() const;
};

/// Aggregated result for one (scenario, detector) pair.
struct PointRecord {
    channel::NoiseColor noise;
    int symbols = 0;
    double snr_db = 0.0;
    std::string algorithm;  ///< "none" for the algorithm-independent SUD rows
    DetectorKind detector = DetectorKind::Sud;

    double mean_ser = 0.0;
    double ser_stderr = 0.0;
    int failed_runs = 0;
    int scored_runs = 0;
    int runs = 0;
    double mean_iterations = 0.0;
    double wallclock_s = 0.0;  ///< summed per-run seconds for this point

    std::string scenario_key;
};

struct SerReport {
    std::vector<PointRecord> points;
    double total_wallclock_s = 0.0;

    const PointRecord* find(channel::NoiseColor noise, int symbols, double snr_db,
                            const std::string& algorithm, DetectorKind det) const;
};

/// Canonical scenario key; the per-run seed is
/// hash(base_seed, key, run index) so adding points never perturbs the
/// random streams of existing ones.
std::string scenario_key(const channel::LinkScenario& sc, bool algorithm_dependent);

std::uint64_t run_seed(std::uint64_t base_seed, const std::string& key, int run_index);

/// Monte Carlo for a single scenario: `runs` independent frames, each scored
/// per requested detector over the post-pilot columns.
std::vector<PointRecord> run_point(const channel::LinkScenario& sc, int runs,
                                   const std::set<DetectorKind>& detectors,
                                   std::uint64_t base_seed, int pilot_symbols);

/// Execute the whole plan. Points and runs are flattened into independent
/// jobs (parallelized when OpenMP is enabled); the report is assembled in
/// canonical key order regardless of execution order or thread count.
/// SUD rows are deduplicated across algorithms.
SerReport run_plan(const ExperimentPlan& plan);

/// Progress callback variant; cb(index, total, record) fires once per point
/// in canonical order after aggregation.
SerReport run_plan(const ExperimentPlan& plan,
                   const std::function<void(std::size_t, std::size_t, const PointRecord&)>& cb);

}  // namespace icasim::harness
