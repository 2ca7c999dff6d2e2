#include "icasim/report_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "icasim/errors.hpp"

namespace icasim::report_io {

namespace {

std::string fmt(double v, const char* spec = "%.17g") {
    char buf[64];
    std::snprintf(buf, sizeof(buf), spec, v);
    return buf;
}

bool row_less(const CsvRow& a, const CsvRow& b) {
    if (a.snr_db != b.snr_db) return a.snr_db < b.snr_db;
    if (a.algorithm != b.algorithm) return a.algorithm < b.algorithm;
    return a.detector < b.detector;
}

// Fixed series order and palette; series absent from the data are skipped.
struct SeriesStyle {
    const char* algorithm;
    const char* detector;
    const char* color;
};
constexpr SeriesStyle kSeries[] = {
    {"none", "sud", "#000000"},      {"comon", "ica", "#d95f02"},
    {"fastica", "ica", "#1b9e77"},   {"jade", "ica", "#7570b3"},
    {"comon", "sudica", "#e7298a"},  {"fastica", "sudica", "#66a61e"},
    {"jade", "sudica", "#e6ab02"},
};

std::string series_label(const std::string& algorithm, const std::string& detector) {
    return algorithm == "none" ? detector : detector + "-" + algorithm;
}

}  // namespace

std::vector<CsvTable> tables_from_report(const harness::SerReport& report) {
    std::map<std::pair<std::string, int>, CsvTable> grouped;
    for (const harness::PointRecord& p : report.points) {
        const std::string noise = channel::noise_name(p.noise);
        CsvTable& t = grouped[{noise, p.symbols}];
        t.noise = noise;
        t.symbols = p.symbols;
        CsvRow row;
        row.snr_db = p.snr_db;
        row.algorithm = p.algorithm;
        row.detector = harness::detector_name(p.detector);
        row.mean_ser = p.mean_ser;
        row.stderr_val = p.ser_stderr;
        row.failed_runs = p.failed_runs;
        row.mean_iterations = p.mean_iterations;
        t.rows.push_back(std::move(row));
    }
    std::vector<CsvTable> tables;
    for (auto& [key, t] : grouped) {
        std::sort(t.rows.begin(), t.rows.end(), row_less);
        tables.push_back(std::move(t));
    }
    return tables;
}

std::vector<std::string> write_csv(const harness::SerReport& report, const std::string& dir) {
    std::filesystem::create_directories(dir);
    std::vector<std::string> paths;
    for (const CsvTable& t : tables_from_report(report)) {
        const std::string path =
            dir + "/ser_" + t.noise + "_M" + std::to_string(t.symbols) + ".csv";
        std::ofstream out(path, std::ios::binary);
        if (!out) throw IoError("cannot write '" + path + "'");
        out << "snr_db,algorithm,detector,mean_ser,stderr,failed_runs,mean_iterations\n";
        for (const CsvRow& r : t.rows)
            out << fmt(r.snr_db) << ',' << r.algorithm << ',' << r.detector << ','
                << fmt(r.mean_ser) << ',' << fmt(r.stderr_val) << ',' << r.failed_runs << ','
                << fmt(r.mean_iterations) << '\n';
        if (!out) throw IoError("write failed for '" + path + "'");
        paths.push_back(path);
    }
    return paths;
}

CsvTable read_csv(const std::string& path) {
    const std::string name = std::filesystem::path(path).filename().string();
    CsvTable t;
    // ser_<noise>_M<M>.csv
    if (name.rfind("ser_", 0) != 0)
        throw ConfigError("unexpected csv name '" + name + "'", 0);
    const std::size_t mpos = name.find("_M");
    const std::size_t dot = name.rfind(".csv");
    if (mpos == std::string::npos || dot == std::string::npos || dot <= mpos + 2)
        throw ConfigError("unexpected csv name '" + name + "'", 0);
    t.noise = name.substr(4, mpos - 4);
    try {
        t.symbols = std::stoi(name.substr(mpos + 2, dot - mpos - 2));
    } catch (const std::exception&) {
        throw ConfigError("cannot parse symbol count from '" + name + "'", 0);
    }

    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path + "'");
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (lineno == 1) continue;  // header
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string field;
        std::vector<std::string> fields;
        while (std::getline(ss, field, ',')) fields.push_back(field);
        if (fields.size() != 7)
            throw ConfigError("bad csv row in '" + name + "'", lineno);
        CsvRow r;
        try {
            r.snr_db = std::stod(fields[0]);
            r.algorithm = fields[1];
            r.detector = fields[2];
            r.mean_ser = std::stod(fields[3]);
            r.stderr_val = std::stod(fields[4]);
            r.failed_runs = std::stoi(fields[5]);
            r.mean_iterations = std::stod(fields[6]);
        } catch (const std::exception&) {
            throw ConfigError("bad csv row in '" + name + "'", lineno);
        }
        t.rows.push_back(std::move(r));
    }
    std::sort(t.rows.begin(), t.rows.end(), row_less);
    return t;
}

namespace {

constexpr double kWidth = 760, kHeight = 520;
constexpr double kLeft = 80, kRight = 580, kTop = 48, kBottom = 460;

double x_coord(double snr, double snr_min, double snr_max) {
    if (snr_max == snr_min) return (kLeft + kRight) / 2.0;
    return kLeft + (snr - snr_min) / (snr_max - snr_min) * (kRight - kLeft);
}

double y_coord(double ser) {
    const double v = std::max(ser, kSerFloor);
    const double frac = (std::log10(v) - std::log10(kSerFloor)) / (0.0 - std::log10(kSerFloor));
    return kBottom - frac * (kBottom - kTop);
}

void render_one(const CsvTable& t, const std::string& path) {
    std::set<double> snr_set;
    for (const CsvRow& r : t.rows) snr_set.insert(r.snr_db);
    if (snr_set.empty()) throw DimensionError("render_plots: empty table");
    const double snr_min = *snr_set.begin();
    const double snr_max = *snr_set.rbegin();

    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write '" + path + "'");

    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
        << kHeight << "\" viewBox=\"0 0 " << kWidth << " " << kHeight << "\">\n";
    out << "<rect width=\"" << kWidth << "\" height=\"" << kHeight << "\" fill=\"white\"/>\n";
    out << "<text x=\"" << (kLeft + kRight) / 2 << "\" y=\"24\" text-anchor=\"middle\" "
           "font-family=\"sans-serif\" font-size=\"15\">SER vs SNR ("
        << t.noise << ", M=" << t.symbols << ")</text>\n";

    // axes and grid
    out << "<g stroke=\"#cccccc\" stroke-width=\"1\">\n";
    const int decades = static_cast<int>(-std::log10(kSerFloor));
    for (int d = 0; d <= decades; ++d) {
        const double y = y_coord(std::pow(10.0, -d));
        out << "<line x1=\"" << kLeft << "\" y1=\"" << fmt(y, "%.2f") << "\" x2=\"" << kRight
            << "\" y2=\"" << fmt(y, "%.2f") << "\"/>\n";
    }
    out << "</g>\n";
    out << "<g font-family=\"sans-serif\" font-size=\"12\" fill=\"#000000\">\n";
    for (int d = 0; d <= decades; ++d) {
        const double y = y_coord(std::pow(10.0, -d));
        out << "<text x=\"" << kLeft - 8 << "\" y=\"" << fmt(y + 4, "%.2f")
            << "\" text-anchor=\"end\">1e-" << d << "</text>\n";
    }
    for (double snr : snr_set) {
        const double x = x_coord(snr, snr_min, snr_max);
        out << "<line x1=\"" << fmt(x, "%.2f") << "\" y1=\"" << kBottom << "\" x2=\""
            << fmt(x, "%.2f") << "\" y2=\"" << kBottom + 6 << "\" stroke=\"#000000\"/>\n";
        out << "<text x=\"" << fmt(x, "%.2f") << "\" y=\"" << kBottom + 22
            << "\" text-anchor=\"middle\">" << fmt(snr, "%g") << "</text>\n";
    }
    out << "<text x=\"" << (kLeft + kRight) / 2 << "\" y=\"" << kBottom + 44
        << "\" text-anchor=\"middle\">SNR per user (dB)</text>\n";
    out << "<text x=\"20\" y=\"" << (kTop + kBottom) / 2
        << "\" text-anchor=\"middle\" transform=\"rotate(-90 20 " << (kTop + kBottom) / 2
        << ")\">mean SER</text>\n";
    out << "</g>\n";
    out << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << kRight - kLeft
        << "\" height=\"" << kBottom - kTop
        << "\" fill=\"none\" stroke=\"#000000\" stroke-width=\"1\"/>\n";

    double legend_y = kTop + 10;
    for (const SeriesStyle& st : kSeries) {
        std::vector<const CsvRow*> pts;
        for (const CsvRow& r : t.rows)
            if (r.algorithm == st.algorithm && r.detector == st.detector) pts.push_back(&r);
        if (pts.empty()) continue;
        std::ostringstream poly;
        bool any = false;
        for (const CsvRow* r : pts) {
            if (std::isnan(r->mean_ser)) continue;  // no scored runs: gap
            poly << fmt(x_coord(r->snr_db, snr_min, snr_max), "%.2f") << ','
                 << fmt(y_coord(r->mean_ser), "%.2f") << ' ';
            any = true;
        }
        if (any)
            out << "<polyline fill=\"none\" stroke=\"" << st.color
                << "\" stroke-width=\"1.5\" points=\"" << poly.str() << "\"/>\n";
        for (const CsvRow* r : pts) {
            if (std::isnan(r->mean_ser)) continue;
            const double x = x_coord(r->snr_db, snr_min, snr_max);
            const double y = y_coord(r->mean_ser);
            if (r->mean_ser < kSerFloor) {
                // at or below the log floor: downward triangle
                out << "<path d=\"M " << fmt(x - 4, "%.2f") << ' ' << fmt(y - 4, "%.2f")
                    << " L " << fmt(x + 4, "%.2f") << ' ' << fmt(y - 4, "%.2f") << " L "
                    << fmt(x, "%.2f") << ' ' << fmt(y + 4, "%.2f") << " Z\" fill=\""
                    << st.color << "\"/>\n";
            } else {
                out << "<circle cx=\"" << fmt(x, "%.2f") << "\" cy=\"" << fmt(y, "%.2f")
                    << "\" r=\"3\" fill=\"" << st.color << "\"/>\n";
            }
        }
        out << "<line x1=\"" << kRight + 14 << "\" y1=\"" << fmt(legend_y, "%.2f")
            << "\" x2=\"" << kRight + 40 << "\" y2=\"" << fmt(legend_y, "%.2f")
            << "\" stroke=\"" << st.color << "\" stroke-width=\"2\"/>\n";
        out << "<text x=\"" << kRight + 46 << "\" y=\"" << fmt(legend_y + 4, "%.2f")
            << "\" font-family=\"sans-serif\" font-size=\"12\">"
            << series_label(st.algorithm, st.detector) << "</text>\n";
        legend_y += 18;
    }
    out << "</svg>\n";
    if (!out) throw IoError("write failed for '" + path + "'");
}

}  // namespace

std::vector<std::string> render_plots(const std::vector<CsvTable>& tables,
                                      const std::string& dir) {
    std::filesystem::create_directories(dir);
    std::vector<std::string> paths;
    for (const CsvTable& t : tables) {
        const std::string path =
            dir + "/ser_" + t.noise + "_M" + std::to_string(t.symbols) + ".svg";
        render_one(t, path);
        paths.push_back(path);
    }
    return paths;
}

std::vector<std::string> render_plots(const harness::SerReport& report,
                                      const std::string& dir) {
    return render_plots(tables_from_report(report), dir);
}

}  // namespace icasim::report_io
