#include "icasim/detectors.hpp"

#include <algorithm>
#include <cmath>

#include "icasim/errors.hpp"
#include "icasim/numkit.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace icasim::detectors {

namespace {

double sign_plus(double v) { return v < 0.0 ? -1.0 : 1.0; }

void fill_hard_from_soft(DetectorOutput& out) {
    out.hard = Matrix(out.soft.rows(), out.soft.cols());
    for (std::size_t i = 0; i < out.soft.data().size(); ++i)
        out.hard.data()[i] = sign_plus(out.soft.data()[i]);
}

/// Mean absolute soft value per user; the confidence normalizer.
std::vector<double> row_abs_means(const Matrix& soft) {
    std::vector<double> mu(soft.rows());
    for (std::size_t i = 0; i < soft.rows(); ++i) {
        double s = 0.0;
        const double* r = soft.row(i);
        for (std::size_t t = 0; t < soft.cols(); ++t) s += std::abs(r[t]);
        mu[i] = s / static_cast<double>(soft.cols());
    }
    return mu;
}

/// Separation with principal-subspace fallback for rank-deficient frames.
/// Returns the recovered source rows (d x M, d <= C) or nothing when no
/// component converged.
std::optional<ica::IcaResult> run_separation(const Matrix& received,
                                             const ica::IcaConfig& cfg) {
    try {
        return ica::separate(received, cfg);
    } catch (const SingularDataError&) {
        // Project onto the principal subspace and separate there.
        const Matrix cov = numkit::covariance(received);
        const numkit::SymEig eig = numkit::sym_eig(cov);
        const double floor = 1e-12 * std::max(eig.values.front(), 0.0);
        std::size_t d = 0;
        while (d < eig.values.size() && eig.values[d] > floor) ++d;
        if (d < 2) return std::nullopt;

        const std::vector<double> mu = numkit::row_means(received);
        Matrix reduced(d, received.cols());
        for (std::size_t i = 0; i < d; ++i)
            for (std::size_t t = 0; t < received.cols(); ++t) {
                double s = 0.0;
                for (std::size_t r = 0; r < received.rows(); ++r)
                    s += eig.vectors(r, i) * (received(r, t) - mu[r]);
                reduced(i, t) = s;
            }
        try {
            return ica::separate(reduced, cfg);
        } catch (const Error&) {
            return std::nullopt;
        }
    } catch (const SeparationFailedError&) {
        return std::nullopt;
    }
}

}  // namespace

bool DetectorOutput::any_unresolved() const {
    for (char u : unresolved)
        if (u) return true;
    return false;
}

DetectorOutput sud_detect(const Matrix& received, const std::vector<double>& code) {
    if (code.size() != received.rows())
        throw DimensionError("sud_detect: code length does not match chip count");
    double norm2 = 0.0;
    for (double c : code) norm2 += c * c;
    if (norm2 <= 0.0) throw DimensionError("sud_detect: zero code");

    DetectorOutput out;
    out.soft = Matrix(1, received.cols());
    const std::size_t chips = received.rows(), m = received.cols();
    double* soft = out.soft.row(0);
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
    for (std::size_t t = 0; t < m; ++t) {
        double s = 0.0;
        for (std::size_t i = 0; i < chips; ++i) s += code[i] * received(i, t);
        soft[t] = s / norm2;
    }
    fill_hard_from_soft(out);
    out.unresolved.assign(1, 0);
    return out;
}

DetectorOutput sud_detect_all(const Matrix& received, const Matrix& signatures) {
    if (signatures.rows() != received.rows())
        throw DimensionError("sud_detect_all: signature length does not match chip count");
    const std::size_t users = signatures.cols();
    DetectorOutput out;
    out.soft = Matrix(users, received.cols());
    std::vector<double> code(received.rows());
    for (std::size_t k = 0; k < users; ++k) {
        for (std::size_t i = 0; i < received.rows(); ++i) code[i] = signatures(i, k);
        const DetectorOutput one = sud_detect(received, code);
        for (std::size_t t = 0; t < received.cols(); ++t) out.soft(k, t) = one.soft(0, t);
    }
    fill_hard_from_soft(out);
    out.unresolved.assign(users, 0);
    return out;
}

AmbiguityMap resolve_ambiguity(const ica::IcaResult& ica, const Matrix& pilots) {
    const std::size_t users = pilots.rows();
    const std::size_t p = pilots.cols();
    const std::size_t comps = ica.sources.rows();
    if (p < 20) throw DimensionError("resolve_ambiguity: pilot window must be >= 20 symbols");
    if (comps < users)
        throw DimensionError("resolve_ambiguity: fewer components than users");
    if (ica.sources.cols() < p)
        throw DimensionError("resolve_ambiguity: sources shorter than the pilot window");

    // Pearson correlation over the pilot window for every (user, component).
    Matrix corr(users, comps);
    std::vector<double> ic_mean(comps), ic_sd(comps);
    for (std::size_t c = 0; c < comps; ++c) {
        double s = 0.0, s2 = 0.0;
        for (std::size_t t = 0; t < p; ++t) s += ica.sources(c, t);
        ic_mean[c] = s / static_cast<double>(p);
        for (std::size_t t = 0; t < p; ++t) {
            const double d = ica.sources(c, t) - ic_mean[c];
            s2 += d * d;
        }
        ic_sd[c] = std::sqrt(s2 / static_cast<double>(p));
    }
    for (std::size_t u = 0; u < users; ++u) {
        double s = 0.0, s2 = 0.0;
        for (std::size_t t = 0; t < p; ++t) s += pilots(u, t);
        const double pm = s / static_cast<double>(p);
        for (std::size_t t = 0; t < p; ++t) {
            const double d = pilots(u, t) - pm;
            s2 += d * d;
        }
        const double psd = std::sqrt(s2 / static_cast<double>(p));
        for (std::size_t c = 0; c < comps; ++c) {
            if (psd <= 0.0 || ic_sd[c] <= 0.0) {
                corr(u, c) = 0.0;
                continue;
            }
            double cv = 0.0;
            for (std::size_t t = 0; t < p; ++t)
                cv += (pilots(u, t) - pm) * (ica.sources(c, t) - ic_mean[c]);
            corr(u, c) = cv / (static_cast<double>(p) * psd * ic_sd[c]);
        }
    }

    AmbiguityMap map;
    map.ic_of_user.assign(users, -1);
    map.signs.assign(users, 1.0);
    map.match_scores.assign(users, 0.0);
    map.resolved.assign(users, 0);

    constexpr double kMatchThreshold = 0.5;
    std::vector<char> user_done(users, 0), ic_taken(comps, 0);
    for (std::size_t step = 0; step < users; ++step) {
        // next best (user, component) among the unassigned
        double best = -1.0;
        std::size_t bu = 0, bc = 0;
        for (std::size_t u = 0; u < users; ++u) {
            if (user_done[u]) continue;
            for (std::size_t c = 0; c < comps; ++c) {
                if (ic_taken[c]) continue;
                const double score = std::min(std::abs(corr(u, c)), 1.0);
                if (score > best) {
                    best = score;
                    bu = u;
                    bc = c;
                }
            }
        }
        user_done[bu] = 1;
        map.ic_of_user[bu] = static_cast<int>(bc);
        map.signs[bu] = sign_plus(corr(bu, bc));
        map.match_scores[bu] = best;
        if (best >= kMatchThreshold) {
            map.resolved[bu] = 1;
            ic_taken[bc] = 1;  // below threshold the component stays available
        }
    }
    return map;
}

DetectorOutput ica_detect(const Matrix& received, const ica::IcaConfig& cfg,
                          const Matrix& pilots) {
    const std::size_t users = pilots.rows();
    const std::size_t p = pilots.cols();
    if (p >= received.cols())
        throw DimensionError("ica_detect: pilot window must be shorter than the frame");

    DetectorOutput out;
    out.soft = Matrix(users, received.cols());
    out.unresolved.assign(users, 1);

    const std::optional<ica::IcaResult> sep = run_separation(received, cfg);
    if (!sep || sep->sources.rows() < users) {
        out.ica_failed = true;
        fill_hard_from_soft(out);
        if (sep) {
            out.ica_converged = false;
            double it = 0.0;
            for (int v : sep->iterations) it += v;
            out.ica_iterations = it / static_cast<double>(sep->iterations.size());
        }
        return out;
    }

    const AmbiguityMap map = resolve_ambiguity(*sep, pilots);
    for (std::size_t u = 0; u < users; ++u) {
        const int c = map.ic_of_user[u];
        out.unresolved[u] = map.resolved[u] ? 0 : 1;
        for (std::size_t t = 0; t < received.cols(); ++t)
            out.soft(u, t) = map.signs[u] * sep->sources(static_cast<std::size_t>(c), t);
    }
    fill_hard_from_soft(out);
    out.ica_converged = sep->converged_count() == static_cast<int>(sep->components());
    double it = 0.0;
    for (int v : sep->iterations) it += v;
    out.ica_iterations = it / static_cast<double>(sep->iterations.size());
    return out;
}

DetectorOutput sudica_combine(const DetectorOutput& sud, const DetectorOutput& ica) {
    DetectorOutput out;
    out.ica_failed = ica.ica_failed;
    out.ica_converged = ica.ica_converged;
    out.ica_iterations = ica.ica_iterations;
    out.unresolved = ica.unresolved;

    if (ica.ica_failed) {
        out.soft = sud.soft;
        out.hard = sud.hard;
        return out;
    }

    const std::size_t users = sud.soft.rows(), m = sud.soft.cols();
    out.soft = Matrix(users, m);
    const std::vector<double> mu_sud = row_abs_means(sud.soft);
    const std::vector<double> mu_ica = row_abs_means(ica.soft);
    for (std::size_t u = 0; u < users; ++u) {
        const bool fallback = u < ica.unresolved.size() && ica.unresolved[u];
        for (std::size_t t = 0; t < m; ++t) {
            if (fallback) {
                out.soft(u, t) = sud.soft(u, t);
                continue;
            }
            const double ss = sud.soft(u, t), is = ica.soft(u, t);
            if (sign_plus(ss) == sign_plus(is)) {
                out.soft(u, t) = ss;
                continue;
            }
            const double conf_s = mu_sud[u] > 0.0 ? std::abs(ss) / mu_sud[u] : std::abs(ss);
            const double conf_i = mu_ica[u] > 0.0 ? std::abs(is) / mu_ica[u] : std::abs(is);
            out.soft(u, t) = conf_i > conf_s ? is : ss;
        }
    }
    fill_hard_from_soft(out);
    return out;
}

DetectorOutput sudica_detect(const Matrix& received, const Matrix& signatures,
                             const ica::IcaConfig& cfg, const Matrix& pilots) {
    const DetectorOutput sud = sud_detect_all(received, signatures);
    const DetectorOutput ica = ica_detect(received, cfg, pilots);
    return sudica_combine(sud, ica);
}

}  // namespace icasim::detectors
