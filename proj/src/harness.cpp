#include "icasim/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>

#include "icasim/detectors.hpp"
#include "icasim/errors.hpp"
#include "icasim/rng.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace icasim::harness {

namespace {

double now_seconds() {
    return std::chrono::duration<double>(
               std::chrono::steady_clock::now().time_since_epoch())
        .count();
}

std::string format_snr(double snr_db) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%g", snr_db);
    return buf;
}

/// Outcome of one run for one detector.
struct RunOutcome {
    long errors = 0;
    long scored = 0;
    bool failed = false;
    double iterations = 0.0;
    bool has_iterations = false;
};

struct PointSpec {
    channel::LinkScenario scenario;
    std::string key;
    std::string algorithm;  ///< "none" for SUD-only points
    std::vector<DetectorKind> detectors;
};

long count_errors(const Matrix& hard, const Matrix& truth, std::size_t from_col) {
    long e = 0;
    for (std::size_t u = 0; u < truth.rows(); ++u) {
        const double* h = hard.row(u);
        const double* b = truth.row(u);
        for (std::size_t t = from_col; t < truth.cols(); ++t)
            if (h[t] != b[t]) ++e;
    }
    return e;
}

void execute_run(const PointSpec& spec, int run_index, std::uint64_t base_seed,
                 int pilot_symbols, const codes::GoldCodeSet& family,
                 std::vector<RunOutcome>& out) {
    channel::LinkScenario sc = spec.scenario;
    sc.seed = run_seed(base_seed, spec.key, run_index);
    sc.algorithm.seed = rng::combine(sc.seed, 0xa150);

    const channel::TransmittedFrame frame = channel::synthesize(sc, family);
    const std::size_t p = static_cast<std::size_t>(pilot_symbols);
    const long scored_symbols = static_cast<long>(frame.symbols.rows()) *
                                static_cast<long>(frame.symbols.cols() - p);

    bool want_sud = false, want_ica = false, want_combined = false;
    for (DetectorKind d : spec.detectors) {
        want_sud |= d == DetectorKind::Sud;
        want_ica |= d == DetectorKind::Ica;
        want_combined |= d == DetectorKind::SudIca;
    }

    detectors::DetectorOutput sud_out;
    if (want_sud || want_combined)
        sud_out = detectors::sud_detect_all(frame.received, frame.mixing);

    detectors::DetectorOutput ica_out;
    if (want_ica || want_combined) {
        Matrix pilots(frame.symbols.rows(), p);
        for (std::size_t u = 0; u < frame.symbols.rows(); ++u)
            for (std::size_t t = 0; t < p; ++t) pilots(u, t) = frame.symbols(u, t);
        ica_out = detectors::ica_detect(frame.received, sc.algorithm, pilots);
    }

    for (std::size_t d = 0; d < spec.detectors.size(); ++d) {
        RunOutcome& r = out[d];
        r.scored = scored_symbols;
        switch (spec.detectors[d]) {
            case DetectorKind::Sud:
                r.errors = count_errors(sud_out.hard, frame.symbols, p);
                break;
            case DetectorKind::Ica:
                // A run fails when separation produced nothing usable or some
                // user could not be matched to a component.
                r.failed = ica_out.ica_failed || ica_out.any_unresolved();
                r.errors = r.failed ? 0 : count_errors(ica_out.hard, frame.symbols, p);
                if (ica_out.ica_iterations) {
                    r.iterations = *ica_out.ica_iterations;
                    r.has_iterations = true;
                }
                break;
            case DetectorKind::SudIca: {
                const detectors::DetectorOutput comb =
                    detectors::sudica_combine(sud_out, ica_out);
                r.errors = count_errors(comb.hard, frame.symbols, p);
                if (ica_out.ica_iterations) {
                    r.iterations = *ica_out.ica_iterations;
                    r.has_iterations = true;
                }
                break;
            }
        }
    }
}

SerReport run_plan_impl(
    const ExperimentPlan& plan,
    const std::function<void(std::size_t, std::size_t, const PointRecord&)>* cb) {
    plan.validate();
    const codes::GoldCodeSet family = codes::default_gold_family();
    for (const auto& sc : plan.scenarios)
        if (static_cast<std::size_t>(sc.chips) != family.length())
            throw DimensionError("plan: only the 31-chip code family is available");

    // Expand scenarios into points. SUD does not depend on the algorithm, so
    // it gets a single point per algorithm-free scenario key.
    std::vector<PointSpec> specs;
    std::vector<DetectorKind> algo_dets;
    if (plan.detectors.count(DetectorKind::Ica)) algo_dets.push_back(DetectorKind::Ica);
    if (plan.detectors.count(DetectorKind::SudIca))
        algo_dets.push_back(DetectorKind::SudIca);

    for (const auto& sc : plan.scenarios) {
        if (plan.detectors.count(DetectorKind::Sud)) {
            const std::string key = scenario_key(sc, false);
            bool seen = false;
            for (const auto& s : specs) seen |= s.key == key;
            if (!seen)
                specs.push_back({sc, key, "none", {DetectorKind::Sud}});
        }
        if (!algo_dets.empty()) {
            const std::string key = scenario_key(sc, true);
            bool seen = false;
            for (const auto& s : specs) seen |= s.key == key;
            if (!seen)
                specs.push_back(
                    {sc, key, ica::algorithm_name(sc.algorithm.algorithm), algo_dets});
        }
    }
    std::sort(specs.begin(), specs.end(),
              [](const PointSpec& a, const PointSpec& b) { return a.key < b.key; });

    SerReport report;
    const double plan_start = now_seconds();
    std::size_t total_points = 0;
    for (const auto& s : specs) total_points += s.detectors.size();

    std::size_t emitted = 0;
    for (std::size_t si = 0; si < specs.size(); ++si) {
        const PointSpec& spec = specs[si];
        const int runs = plan.runs_per_point;
        std::vector<std::vector<RunOutcome>> outcomes(
            runs, std::vector<RunOutcome>(spec.detectors.size()));
        std::vector<double> run_secs(runs, 0.0);

#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
        for (int r = 0; r < runs; ++r) {
            const double t0 = now_seconds();
            execute_run(spec, r, plan.base_seed, plan.pilot_symbols, family, outcomes[r]);
            run_secs[r] = now_seconds() - t0;
        }

        double point_secs = 0.0;
        for (double s : run_secs) point_secs += s;

        for (std::size_t d = 0; d < spec.detectors.size(); ++d) {
            PointRecord rec;
            rec.noise = spec.scenario.noise;
            rec.symbols = spec.scenario.symbols;
            rec.snr_db = spec.scenario.snr_db;
            rec.algorithm = spec.algorithm;
            rec.detector = spec.detectors[d];
            rec.runs = runs;
            rec.scenario_key = spec.key;
            rec.wallclock_s = point_secs;

            double sum = 0.0, sum2 = 0.0;
            int scored_runs = 0, failed = 0, iter_runs = 0;
            double iter_sum = 0.0;
            for (int r = 0; r < runs; ++r) {
                const RunOutcome& o = outcomes[r][d];
                if (o.has_iterations) {
                    iter_sum += o.iterations;
                    ++iter_runs;
                }
                if (o.failed) {
                    ++failed;
                    continue;
                }
                const double ser =
                    static_cast<double>(o.errors) / static_cast<double>(o.scored);
                sum += ser;
                sum2 += ser * ser;
                ++scored_runs;
            }
            rec.failed_runs = failed;
            rec.scored_runs = scored_runs;
            if (scored_runs > 0) {
                rec.mean_ser = sum / scored_runs;
                if (scored_runs > 1) {
                    const double var =
                        std::max(0.0, (sum2 - sum * sum / scored_runs) / (scored_runs - 1));
                    rec.ser_stderr = std::sqrt(var / scored_runs);
                }
            } else {
                rec.mean_ser = std::numeric_limits<double>::quiet_NaN();
                rec.ser_stderr = std::numeric_limits<double>::quiet_NaN();
            }
            rec.mean_iterations = iter_runs > 0 ? iter_sum / iter_runs : 0.0;

            report.points.push_back(std::move(rec));
            if (cb && *cb) (*cb)(emitted, total_points, report.points.back());
            ++emitted;
        }
    }
    report.total_wallclock_s = now_seconds() - plan_start;
    return report;
}

}  // namespace

const char* detector_name(DetectorKind d) {
    switch (d) {
        case DetectorKind::Sud: return "sud";
        case DetectorKind::Ica: return "ica";
        case DetectorKind::SudIca: return "sudica";
    }
    return "?";
}

void ExperimentPlan::validate() const {
    if (scenarios.empty()) throw DimensionError("plan: scenario list is empty");
    if (runs_per_point < 1) throw DimensionError("plan: runs_per_point must be at least 1");
    if (detectors.empty()) throw DimensionError("plan: detector set is empty");
    if (pilot_symbols < 20) throw DimensionError("plan: pilot window must be >= 20");
    for (const auto& sc : scenarios) {
        sc.validate();
        if (pilot_symbols >= sc.symbols)
            throw DimensionError("plan: pilot window must be shorter than the frame");
    }
}

std::string scenario_key(const channel::LinkScenario& sc, bool algorithm_dependent) {
    std::string key = std::string(channel::noise_name(sc.noise)) +
                      "|snr=" + format_snr(sc.snr_db) + "|M=" + std::to_string(sc.symbols) +
                      "|K=" + std::to_string(sc.users) + "|C=" + std::to_string(sc.chips);
    if (algorithm_dependent) {
        key += std::string("|alg=") + ica::algorithm_name(sc.algorithm.algorithm);
        if (sc.algorithm.algorithm == ica::Algorithm::FastIca)
            key += std::string("|g=") + ica::contrast_name(sc.algorithm.contrast);
    } else {
        key += "|alg=none";
    }
    return key;
}

std::uint64_t run_seed(std::uint64_t base_seed, const std::string& key, int run_index) {
    return rng::combine(rng::combine(base_seed, rng::hash_string(key)),
                        static_cast<std::uint64_t>(run_index));
}

const PointRecord* SerReport::find(channel::NoiseColor noise, int symbols, double snr_db,
                                   const std::string& algorithm, DetectorKind det) const {
    for (const PointRecord& p : points)
        if (p.noise == noise && p.symbols == symbols && p.snr_db == snr_db &&
            p.algorithm == algorithm && p.detector == det)
            return &p;
    return nullptr;
}

std::vector<PointRecord> run_point(const channel::LinkScenario& sc, int runs,
                                   const std::set<DetectorKind>& detectors,
                                   std::uint64_t base_seed, int pilot_symbols) {
    ExperimentPlan plan;
    plan.scenarios = {sc};
    plan.runs_per_point = runs;
    plan.detectors = detectors;
    plan.base_seed = base_seed;
    plan.pilot_symbols = pilot_symbols;
    return run_plan(plan).points;
}

SerReport run_plan(const ExperimentPlan& plan) { return run_plan_impl(plan, nullptr); }

SerReport run_plan(
    const ExperimentPlan& plan,
    const std::function<void(std::size_t, std::size_t, const PointRecord&)>& cb) {
    return run_plan_impl(plan, &cb);
}

}  // namespace icasim::harness
