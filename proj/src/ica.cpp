#include "icasim/ica.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "icasim/errors.hpp"
#include "icasim/polyroots.hpp"
#include "icasim/rng.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace icasim::ica {

namespace {

constexpr std::uint64_t kTagFasticaInit = 0xF457;
// E[log cosh X] for X ~ N(0,1); reference point of the tanh contrast.
constexpr double kGaussLogCosh = 0.374567207491438;

void check_whitened(const Matrix& z, const char* who) {
    const Matrix cov = numkit::covariance(z);
    double dev = 0.0;
    for (std::size_t i = 0; i < cov.rows(); ++i)
        for (std::size_t j = 0; j < cov.cols(); ++j)
            dev = std::max(dev, std::abs(cov(i, j) - (i == j ? 1.0 : 0.0)));
    if (dev > 1e-3)
        throw ContractViolationError(std::string(who) +
                                     " expects whitened input (covariance deviates by " +
                                     std::to_string(dev) + ")");
}

double norm(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

double dotv(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

/// Kurtosis of a unit-variance row: E[y^4] - 3.
double row_kurtosis(const double* y, std::size_t m) {
    return numkit::pair_moments4(y, y, m).m40 - 3.0;
}

double tanh_contrast(const Matrix& y) {
    std::vector<double> buf(y.cols());
    double total = 0.0;
    for (std::size_t i = 0; i < y.rows(); ++i) {
        const double* row = y.row(i);
        const std::size_t m = y.cols();
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
        for (std::size_t t = 0; t < m; ++t) buf[t] = std::log(std::cosh(row[t]));
        const double d = numkit::mean(buf) - kGaussLogCosh;
        total += d * d;
    }
    return total;
}

}  // namespace

const char* algorithm_name(Algorithm a) {
    switch (a) {
        case Algorithm::Comon: return "comon";
        case Algorithm::Jade: return "jade";
        case Algorithm::FastIca: return "fastica";
    }
    return "?";
}

const char* contrast_name(Contrast c) {
    return c == Contrast::Kurtosis ? "kurtosis" : "tanh";
}

void IcaConfig::validate() const {
    if (max_iterations < 1) throw DimensionError("max_iterations must be at least 1");
    if (!(tolerance > 0.0)) throw DimensionError("tolerance must be positive");
}

int IcaResult::converged_count() const {
    int c = 0;
    for (char f : converged) c += (f != 0);
    return c;
}

double sum_squared_kurtosis(const Matrix& y) {
    double s = 0.0;
    for (std::size_t i = 0; i < y.rows(); ++i) {
        const double k = row_kurtosis(y.row(i), y.cols());
        s += k * k;
    }
    return s;
}

PairRotation best_pair_rotation(const numkit::PairMoments& m) {
    // Fourth moments of the rotated pair are trigonometric polynomials in
    // theta with harmonics at 2 theta and 4 theta:
    //   E[a'ated^4](theta) = A0 + A2c cos2t + A2s sin2t + A4c cos4t + A4s sin4t
    // and the pair contrast (ka^2 + kb^2 with k = E[.^4] - 3) collapses to
    //   Psi(theta) = 2 (D + A4c cos4t + A4s sin4t)^2 + 2 (A2c cos2t + A2s sin2t)^2.
    const double a0 = (3.0 * m.m40 + 6.0 * m.m22 + 3.0 * m.m04) / 8.0;
    const double a2c = (m.m40 - m.m04) / 2.0;
    const double a2s = m.m31 + m.m13;
    const double a4c = (m.m40 - 6.0 * m.m22 + m.m04) / 8.0;
    const double a4s = (m.m31 - m.m13) / 2.0;
    const double d = a0 - 3.0;

    auto psi = [&](double theta) {
        const double q = d + a4c * std::cos(4.0 * theta) + a4s * std::sin(4.0 * theta);
        const double l = a2c * std::cos(2.0 * theta) + a2s * std::sin(2.0 * theta);
        return 2.0 * q * q + 2.0 * l * l;
    };

    // dPsi/dtheta = alpha cos w + beta sin w + gamma cos 2w + delta sin 2w
    // with w = 4 theta; tan(w/2) substitution turns the stationarity
    // condition into a quartic.
    const double alpha = 16.0 * d * a4s + 8.0 * a2c * a2s;
    const double beta = -16.0 * d * a4c + 4.0 * (a2s * a2s - a2c * a2c);
    const double gamma = 16.0 * a4c * a4s;
    const double delta = 8.0 * (a4s * a4s - a4c * a4c);

    std::vector<double> taus = poly::quartic_roots(
        gamma - alpha, 2.0 * beta - 4.0 * delta, -6.0 * gamma, 2.0 * beta + 4.0 * delta,
        alpha + gamma);

    PairRotation best{0.0, psi(0.0), psi(0.0)};
    auto consider = [&](double theta) {
        const double v = psi(theta);
        if (v > best.contrast + 1e-15 * std::abs(best.contrast) ||
            (v >= best.contrast && std::abs(theta) < std::abs(best.theta))) {
            best.theta = theta;
            best.contrast = v;
        }
    };
    for (double tau : taus) {
        if (!std::isfinite(tau)) continue;
        consider(0.5 * std::atan(tau));
    }
    consider(std::numbers::pi / 4.0);
    return best;
}

IcaResult fastica_deflate(const Matrix& z, const IcaConfig& cfg) {
    cfg.validate();
    check_whitened(z, "fastica_deflate");
    const std::size_t n = z.rows(), m = z.cols();
    const bool cubic = cfg.contrast == Contrast::Kurtosis;

    Matrix w_all(n, n);
    std::vector<int> iterations(n, 0);
    std::vector<char> converged(n, 0);

    std::vector<double> u(m), gbuf(m), gpbuf(m), ezg(n);
    std::vector<double> w(n), w_old(n);

    for (std::size_t k = 0; k < n; ++k) {
        bool ok = false;
        int total_iters = 0;
        for (int attempt = 0; attempt < 2 && !ok; ++attempt) {
            const rng::Stream st =
                rng::substream(cfg.seed, kTagFasticaInit, 2 * k + static_cast<std::size_t>(attempt));
            std::uint64_t draw_at = 0;
            auto reinit = [&]() {
                double nrm;
                do {
                    for (std::size_t i = 0; i < n; ++i) w[i] = st.gaussian(draw_at + i);
                    draw_at += n;
                    for (std::size_t j = 0; j < k; ++j) {
                        const double* wj = w_all.row(j);
                        double d = 0.0;
                        for (std::size_t i = 0; i < n; ++i) d += w[i] * wj[i];
                        for (std::size_t i = 0; i < n; ++i) w[i] -= d * wj[i];
                    }
                    nrm = norm(w);
                } while (nrm < 1e-12);
                for (double& x : w) x /= nrm;
            };
            reinit();

            for (int it = 0; it < cfg.max_iterations; ++it) {
                w_old = w;
                numkit::project_rows(z, w, u);
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
                for (std::size_t t = 0; t < m; ++t) {
                    const double x = u[t];
                    if (cubic) {
                        gbuf[t] = x * x * x;
                        gpbuf[t] = 3.0 * x * x;
                    } else {
                        const double th = std::tanh(x);
                        gbuf[t] = th;
                        gpbuf[t] = 1.0 - th * th;
                    }
                }
                const double egp = numkit::mean(gpbuf);
                numkit::row_weighted_means(z, gbuf, ezg);
                for (std::size_t i = 0; i < n; ++i) w[i] = ezg[i] - egp * w[i];
                ++total_iters;

                double nrm = norm(w);
                if (nrm < 1e-12) {
                    reinit();
                    continue;
                }
                for (double& x : w) x /= nrm;
                for (std::size_t j = 0; j < k; ++j) {
                    const double* wj = w_all.row(j);
                    double dp = 0.0;
                    for (std::size_t i = 0; i < n; ++i) dp += w[i] * wj[i];
                    for (std::size_t i = 0; i < n; ++i) w[i] -= dp * wj[i];
                }
                nrm = norm(w);
                if (nrm < 1e-12) {
                    reinit();
                    continue;
                }
                for (double& x : w) x /= nrm;

                if (1.0 - std::abs(dotv(w, w_old)) < cfg.tolerance) {
                    ok = true;
                    break;
                }
            }
        }
        for (std::size_t i = 0; i < n; ++i) w_all(k, i) = w[i];
        iterations[k] = total_iters;
        converged[k] = ok ? 1 : 0;
    }

    IcaResult res;
    res.sources = matmul(w_all, z);
    res.contrast_value =
        cubic ? sum_squared_kurtosis(res.sources) : tanh_contrast(res.sources);
    res.unmixing = std::move(w_all);
    res.iterations = std::move(iterations);
    res.converged = std::move(converged);
    return res;
}

IcaResult jade(const Matrix& z, const IcaConfig& cfg) {
    cfg.validate();
    check_whitened(z, "jade");
    const std::size_t n = z.rows();
    const numkit::CumulantSet set = numkit::cum4_eigenmatrices(z, n);
    const numkit::JointDiag jd = numkit::joint_diagonalize(set);

    IcaResult res;
    res.unmixing = transpose(jd.rotation);
    res.sources = matmul(res.unmixing, z);
    res.iterations.assign(n, jd.sweeps);
    res.converged.assign(n, jd.converged ? 1 : 0);
    res.contrast_value = jd.off_energy.back();
    return res;
}

IcaResult comon(const Matrix& z, const IcaConfig& cfg) {
    cfg.validate();
    check_whitened(z, "comon");
    const std::size_t n = z.rows(), m = z.cols();

    IcaResult res;
    if (n == 1) {
        res.unmixing = Matrix::identity(1);
        res.sources = z;
        res.iterations.assign(1, 0);
        res.converged.assign(1, 1);
        const double k = row_kurtosis(z.row(0), m);
        res.contrast_value = k * k;
        return res;
    }

    Matrix y = z;
    Matrix w = Matrix::identity(n);
    constexpr int kMaxSweeps = 50;
    int sweeps = 0;
    bool converged = false;
    while (sweeps < kMaxSweeps) {
        ++sweeps;
        double max_gain = 0.0;
        for (std::size_t p = 0; p + 1 < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) {
                const numkit::PairMoments mom = numkit::pair_moments4(y.row(p), y.row(q), m);
                const PairRotation rot = best_pair_rotation(mom);
                const double gain = rot.contrast - rot.contrast_at_zero;
                if (rot.theta == 0.0 || gain <= 0.0) continue;
                max_gain = std::max(max_gain, gain);
                const double c = std::cos(rot.theta), s = std::sin(rot.theta);
                double* yp = y.row(p);
                double* yq = y.row(q);
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
                for (std::size_t t = 0; t < m; ++t) {
                    const double a = yp[t], b = yq[t];
                    yp[t] = c * a + s * b;
                    yq[t] = -s * a + c * b;
                }
                for (std::size_t i = 0; i < n; ++i) {
                    const double a = w(p, i), b = w(q, i);
                    w(p, i) = c * a + s * b;
                    w(q, i) = -s * a + c * b;
                }
            }
        if (max_gain < cfg.tolerance) {
            converged = true;
            break;
        }
    }

    res.unmixing = std::move(w);
    res.sources = matmul(res.unmixing, z);
    res.iterations.assign(n, sweeps);
    res.converged.assign(n, converged ? 1 : 0);
    res.contrast_value = sum_squared_kurtosis(res.sources);
    return res;
}

IcaResult separate(const Matrix& x, const IcaConfig& cfg) {
    cfg.validate();
    if (x.rows() < 2) throw DimensionError("separate needs at least 2 rows");
    if (x.cols() < 10 * x.rows())
        throw DimensionError("separate needs at least 10 samples per channel");

    auto [z, wt] = numkit::whiten(x);
    IcaResult inner;
    switch (cfg.algorithm) {
        case Algorithm::Comon: inner = comon(z, cfg); break;
        case Algorithm::Jade: inner = jade(z, cfg); break;
        case Algorithm::FastIca: inner = fastica_deflate(z, cfg); break;
    }

    IcaResult res;
    res.unmixing = matmul(inner.unmixing, wt.whitener);
    res.sources = matmul(res.unmixing, x);
    res.iterations = std::move(inner.iterations);
    res.converged = std::move(inner.converged);
    res.contrast_value = inner.contrast_value;
    if (res.converged_count() == 0)
        throw SeparationFailedError(
            "separation failed: no component converged out of " +
                std::to_string(res.components()),
            static_cast<int>(res.components()), 0);
    return res;
}

}  // namespace icasim::ica
