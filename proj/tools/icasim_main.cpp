#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "icasim/codes.hpp"
#include "icasim/config.hpp"
#include "icasim/report_io.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace {

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitConfig = 2;

int cmd_run(const std::string& config_path, const std::string& out_dir, int threads,
            const std::vector<std::string>& overrides) {
    icasim::harness::ExperimentPlan plan;
    try {
        plan = icasim::config::parse_config_file(config_path, overrides);
    } catch (const icasim::ConfigError& e) {
        std::cerr << "config error";
        if (e.line > 0) std::cerr << " (line " << e.line << ")";
        std::cerr << ": " << e.what() << "\n";
        return kExitConfig;
    }

#ifdef _OPENMP
    if (threads > 0) omp_set_num_threads(threads);
#else
    (void)threads;
#endif

    try {
        std::filesystem::create_directories(out_dir);
        auto progress = [](std::size_t i, std::size_t total,
                           const icasim::harness::PointRecord& p) {
            std::printf("[%3zu/%zu] %-44s %-7s ser=%-12.6g failed=%d/%d t=%.1fs\n", i + 1,
                        total, p.scenario_key.c_str(),
                        icasim::harness::detector_name(p.detector), p.mean_ser,
                        p.failed_runs, p.runs, p.wallclock_s);
            std::fflush(stdout);
        };
        const icasim::harness::SerReport report = icasim::harness::run_plan(plan, progress);
        const auto csvs = icasim::report_io::write_csv(report, out_dir);
        const auto svgs = icasim::report_io::render_plots(report, out_dir);
        std::printf("wrote %zu csv and %zu svg files to %s (%.1f s total)\n", csvs.size(),
                    svgs.size(), out_dir.c_str(), report.total_wallclock_s);
        return kExitOk;
    } catch (const std::exception& e) {
        std::cerr << "run failed: " << e.what() << "\n";
        return kExitRuntime;
    }
}

int cmd_codes(const std::string& out_file) {
    try {
        const icasim::codes::GoldCodeSet family = icasim::codes::default_gold_family();
        std::ostream* out = &std::cout;
        std::ofstream file;
        if (!out_file.empty()) {
            file.open(out_file, std::ios::binary);
            if (!file) {
                std::cerr << "cannot write '" << out_file << "'\n";
                return kExitRuntime;
            }
            out = &file;
        }
        for (std::size_t k = 0; k < family.size(); ++k) {
            const auto& code = family.code(k);
            for (std::size_t i = 0; i < code.size(); ++i)
                (*out) << (i ? " " : "") << (code[i] > 0 ? "+1" : "-1");
            (*out) << "\n";
        }
        return kExitOk;
    } catch (const std::exception& e) {
        std::cerr << "codes failed: " << e.what() << "\n";
        return kExitRuntime;
    }
}

int cmd_plot(const std::string& csv_dir, std::string out_dir) {
    try {
        if (out_dir.empty()) out_dir = csv_dir;
        std::vector<icasim::report_io::CsvTable> tables;
        std::vector<std::filesystem::path> files;
        for (const auto& entry : std::filesystem::directory_iterator(csv_dir)) {
            const std::string name = entry.path().filename().string();
            if (name.rfind("ser_", 0) == 0 && name.ends_with(".csv"))
                files.push_back(entry.path());
        }
        std::sort(files.begin(), files.end());
        for (const auto& f : files)
            tables.push_back(icasim::report_io::read_csv(f.string()));
        if (tables.empty()) {
            std::cerr << "no ser_*.csv files in '" << csv_dir << "'\n";
            return kExitConfig;
        }
        const auto svgs = icasim::report_io::render_plots(tables, out_dir);
        std::printf("wrote %zu svg files to %s\n", svgs.size(), out_dir.c_str());
        return kExitOk;
    } catch (const icasim::ConfigError& e) {
        std::cerr << "plot input error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "plot failed: " << e.what() << "\n";
        return kExitRuntime;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"DS-CDMA downlink detector comparison (SUD / ICA / SUD-ICA)"};
    app.require_subcommand(1);

    std::string config_path, out_dir = "results", codes_file, csv_dir, plot_out;
    int threads = 0;
    std::vector<std::string> overrides;

    CLI::App* run = app.add_subcommand("run", "execute an experiment plan");
    run->add_option("config", config_path, "plan config file (key = value lines)")
        ->required();
    run->add_option("--out", out_dir, "output directory (default: results)");
    run->add_option("--threads", threads, "worker thread cap");
    run->add_option("--set", overrides, "override a config key, e.g. --set runs_per_point=5");

    CLI::App* codes = app.add_subcommand("codes", "dump the Gold code family");
    codes->add_option("--out", codes_file, "output file (default: stdout)");

    CLI::App* plot = app.add_subcommand("plot", "re-render SVG plots from CSV output");
    plot->add_option("csv-dir", csv_dir, "directory with ser_*.csv files")->required();
    plot->add_option("--out", plot_out, "output directory (default: csv-dir)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitConfig;
    }

    if (run->parsed()) return cmd_run(config_path, out_dir, threads, overrides);
    if (codes->parsed()) return cmd_codes(codes_file);
    if (plot->parsed()) return cmd_plot(csv_dir, plot_out);
    return kExitConfig;
}
