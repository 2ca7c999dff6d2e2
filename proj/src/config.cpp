#include "icasim/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

#include "icasim/errors.hpp"

namespace icasim::config {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

std::vector<std::string> split_list(const std::string& v) {
    std::vector<std::string> parts;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) parts.push_back(item);
    }
    return parts;
}

struct Entry {
    std::string value;
    int line;
};

long parse_int(const std::string& v, const std::string& key, int line) {
    try {
        std::size_t pos = 0;
        const long x = std::stol(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw ConfigError("invalid integer '" + v + "' for key '" + key + "'", line);
    }
}

double parse_real(const std::string& v, const std::string& key, int line) {
    try {
        std::size_t pos = 0;
        const double x = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw ConfigError("invalid number '" + v + "' for key '" + key + "'", line);
    }
}

std::uint64_t parse_u64(const std::string& v, const std::string& key, int line) {
    try {
        std::size_t pos = 0;
        const std::uint64_t x = std::stoull(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw ConfigError("invalid unsigned integer '" + v + "' for key '" + key + "'", line);
    }
}

const std::vector<std::string> kKnownKeys = {
    "runs_per_point", "base_seed",  "users",     "chips",          "symbols",
    "snr_db",         "noise",      "algorithms", "detectors",     "contrast",
    "max_iterations", "tolerance",  "pilot_symbols"};

}  // namespace

harness::ExperimentPlan parse_config_text(const std::string& text,
                                          const std::vector<std::string>& overrides) {
    std::map<std::string, Entry> kv;

    auto absorb = [&](const std::string& raw, int line) {
        std::string s = raw;
        const std::size_t comment = s.find_first_of("#;");
        if (comment != std::string::npos) s = s.substr(0, comment);
        s = trim(s);
        if (s.empty()) return;
        const std::size_t eq = s.find('=');
        if (eq == std::string::npos)
            throw ConfigError("expected 'key = value', got '" + s + "'", line);
        const std::string key = lower(trim(s.substr(0, eq)));
        const std::string value = trim(s.substr(eq + 1));
        if (std::find(kKnownKeys.begin(), kKnownKeys.end(), key) == kKnownKeys.end())
            throw ConfigError("unknown key '" + key + "'", line);
        if (value.empty()) throw ConfigError("empty value for key '" + key + "'", line);
        kv[key] = {value, line};  // later entries override earlier ones
    };

    {
        std::stringstream ss(text);
        std::string lineStr;
        int line = 0;
        while (std::getline(ss, lineStr)) absorb(lineStr, ++line);
    }
    for (const std::string& ov : overrides) absorb(ov, 0);

    // Paper-grid defaults; any key in the file replaces its default.
    harness::ExperimentPlan plan;
    plan.runs_per_point = 100;
    plan.base_seed = 1;
    plan.pilot_symbols = 50;
    int users = 30, chips = 31, max_iterations = 100;
    double tolerance = 1e-4;
    std::vector<int> symbols = {2000, 5000, 10000};
    std::vector<double> snrs = {-10.0, -5.0, 0.0};
    std::vector<channel::NoiseColor> noises = {channel::NoiseColor::Awgn,
                                               channel::NoiseColor::Pink};
    std::vector<ica::Algorithm> algorithms = {ica::Algorithm::FastIca, ica::Algorithm::Jade,
                                              ica::Algorithm::Comon};
    ica::Contrast contrast = ica::Contrast::Tanh;

    auto get = [&](const char* key) -> const Entry* {
        const auto it = kv.find(key);
        return it == kv.end() ? nullptr : &it->second;
    };

    if (const Entry* e = get("runs_per_point")) {
        const long v = parse_int(e->value, "runs_per_point", e->line);
        if (v < 1) throw ConfigError("runs_per_point must be at least 1", e->line);
        plan.runs_per_point = static_cast<int>(v);
    }
    if (const Entry* e = get("base_seed")) plan.base_seed = parse_u64(e->value, "base_seed", e->line);
    if (const Entry* e = get("pilot_symbols")) {
        const long v = parse_int(e->value, "pilot_symbols", e->line);
        if (v < 20) throw ConfigError("pilot_symbols must be at least 20", e->line);
        plan.pilot_symbols = static_cast<int>(v);
    }
    if (const Entry* e = get("users")) {
        const long v = parse_int(e->value, "users", e->line);
        if (v < 1 || v > 30) throw ConfigError("users must be in 1..30", e->line);
        users = static_cast<int>(v);
    }
    if (const Entry* e = get("chips")) {
        const long v = parse_int(e->value, "chips", e->line);
        if (v != 31) throw ConfigError("chips: only the 31-chip Gold family is available", e->line);
        chips = static_cast<int>(v);
    }
    if (const Entry* e = get("max_iterations")) {
        const long v = parse_int(e->value, "max_iterations", e->line);
        if (v < 1) throw ConfigError("max_iterations must be at least 1", e->line);
        max_iterations = static_cast<int>(v);
    }
    if (const Entry* e = get("tolerance")) {
        tolerance = parse_real(e->value, "tolerance", e->line);
        if (!(tolerance > 0.0)) throw ConfigError("tolerance must be positive", e->line);
    }
    if (const Entry* e = get("symbols")) {
        symbols.clear();
        for (const std::string& s : split_list(e->value)) {
            const long v = parse_int(s, "symbols", e->line);
            if (v < 100) throw ConfigError("symbols must be at least 100", e->line);
            symbols.push_back(static_cast<int>(v));
        }
        if (symbols.empty()) throw ConfigError("symbols list is empty", e->line);
    }
    if (const Entry* e = get("snr_db")) {
        snrs.clear();
        for (const std::string& s : split_list(e->value))
            snrs.push_back(parse_real(s, "snr_db", e->line));
        if (snrs.empty()) throw ConfigError("snr_db list is empty", e->line);
    }
    if (const Entry* e = get("noise")) {
        noises.clear();
        for (const std::string& s : split_list(e->value)) {
            const std::string v = lower(s);
            if (v == "awgn") noises.push_back(channel::NoiseColor::Awgn);
            else if (v == "pink") noises.push_back(channel::NoiseColor::Pink);
            else throw ConfigError("noise must be awgn or pink, got '" + s + "'", e->line);
        }
        if (noises.empty()) throw ConfigError("noise list is empty", e->line);
    }
    if (const Entry* e = get("algorithms")) {
        algorithms.clear();
        for (const std::string& s : split_list(e->value)) {
            const std::string v = lower(s);
            if (v == "fastica") algorithms.push_back(ica::Algorithm::FastIca);
            else if (v == "jade") algorithms.push_back(ica::Algorithm::Jade);
            else if (v == "comon") algorithms.push_back(ica::Algorithm::Comon);
            else throw ConfigError("unknown algorithm '" + s + "'", e->line);
        }
        if (algorithms.empty()) throw ConfigError("algorithms list is empty", e->line);
    }
    if (const Entry* e = get("detectors")) {
        plan.detectors.clear();
        for (const std::string& s : split_list(e->value)) {
            const std::string v = lower(s);
            if (v == "sud") plan.detectors.insert(harness::DetectorKind::Sud);
            else if (v == "ica") plan.detectors.insert(harness::DetectorKind::Ica);
            else if (v == "sudica") plan.detectors.insert(harness::DetectorKind::SudIca);
            else throw ConfigError("unknown detector '" + s + "'", e->line);
        }
        if (plan.detectors.empty()) throw ConfigError("detectors list is empty", e->line);
    }
    if (const Entry* e = get("contrast")) {
        const std::string v = lower(e->value);
        if (v == "tanh") contrast = ica::Contrast::Tanh;
        else if (v == "kurtosis") contrast = ica::Contrast::Kurtosis;
        else throw ConfigError("contrast must be tanh or kurtosis, got '" + e->value + "'",
                               e->line);
    }

    for (channel::NoiseColor noise : noises)
        for (int m : symbols)
            for (double snr : snrs)
                for (ica::Algorithm alg : algorithms) {
                    channel::LinkScenario sc;
                    sc.users = users;
                    sc.chips = chips;
                    sc.symbols = m;
                    sc.snr_db = snr;
                    sc.noise = noise;
                    sc.algorithm.algorithm = alg;
                    sc.algorithm.contrast = contrast;
                    sc.algorithm.max_iterations = max_iterations;
                    sc.algorithm.tolerance = tolerance;
                    plan.scenarios.push_back(sc);
                }

    try {
        plan.validate();
    } catch (const Error& e) {
        throw ConfigError(std::string("invalid plan: ") + e.what(), 0);
    }
    return plan;
}

harness::ExperimentPlan parse_config_file(const std::string& path,
                                          const std::vector<std::string>& overrides) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'", 0);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str(), overrides);
}

}  // namespace icasim::config
