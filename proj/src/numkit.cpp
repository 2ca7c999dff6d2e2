#include "icasim/numkit.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace icasim::numkit {

namespace {

// Fixed reduction block; partial sums are combined in block order so results
// never depend on the number of threads.
constexpr std::size_t kBlock = 8192;

std::size_t block_count(std::size_t n) { return (n + kBlock - 1) / kBlock; }

// Four fixed accumulator lanes so the loop vectorizes; the lane structure
// (not the thread count) defines the summation order.
double dot(const double* a, const double* b, std::size_t n) {
    double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
    std::size_t t = 0;
    for (; t + 4 <= n; t += 4) {
        s0 += a[t] * b[t];
        s1 += a[t + 1] * b[t + 1];
        s2 += a[t + 2] * b[t + 2];
        s3 += a[t + 3] * b[t + 3];
    }
    double s = (s0 + s1) + (s2 + s3);
    for (; t < n; ++t) s += a[t] * b[t];
    return s;
}

void check_symmetric(const Matrix& m) {
    if (m.rows() != m.cols())
        throw ContractViolationError("sym_eig requires a square matrix");
    const double scale = std::max(1.0, frobenius_norm(m));
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = i + 1; j < m.cols(); ++j)
            if (std::abs(m(i, j) - m(j, i)) > 1e-10 * scale)
                throw ContractViolationError("sym_eig input is not symmetric");
}

double off_diagonal_norm(const Matrix& a) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = i + 1; j < a.cols(); ++j) s += a(i, j) * a(i, j);
    return std::sqrt(2.0 * s);
}

struct Rotation {
    std::size_t p, q;
    double c, s;
};

// Zeroing rotation for entry (p,q) of a symmetric matrix.
Rotation make_rotation(std::size_t p, std::size_t q, double app, double aqq, double apq) {
    if (apq == 0.0) return {p, q, 1.0, 0.0};
    const double tau = (aqq - app) / (2.0 * apq);
    double t;
    if (std::abs(tau) > 1e154) {
        t = 1.0 / (2.0 * tau);
    } else {
        t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
    }
    const double c = 1.0 / std::sqrt(1.0 + t * t);
    return {p, q, c, t * c};
}

void apply_rotation_sym(Matrix& a, const Rotation& r) {
    const std::size_t p = r.p, q = r.q, n = a.rows();
    const double c = r.c, s = r.s;
    const double app = a(p, p), aqq = a(q, q), apq = a(p, q);
    for (std::size_t k = 0; k < n; ++k) {
        if (k == p || k == q) continue;
        const double akp = a(k, p), akq = a(k, q);
        a(k, p) = a(p, k) = c * akp - s * akq;
        a(k, q) = a(q, k) = s * akp + c * akq;
    }
    a(p, p) = c * c * app - 2.0 * c * s * apq + s * s * aqq;
    a(q, q) = s * s * app + 2.0 * c * s * apq + c * c * aqq;
    a(p, q) = a(q, p) = 0.0;
}

void apply_rotation_cols(Matrix& v, const Rotation& r) {
    for (std::size_t i = 0; i < v.rows(); ++i) {
        const double vip = v(i, r.p), viq = v(i, r.q);
        v(i, r.p) = r.c * vip - r.s * viq;
        v(i, r.q) = r.s * vip + r.c * viq;
    }
}

SymEig sort_descending(std::vector<double> values, Matrix vectors) {
    const std::size_t n = values.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return values[a] > values[b]; });
    SymEig out;
    out.values.resize(n);
    out.vectors = Matrix(n, n);
    for (std::size_t k = 0; k < n; ++k) {
        out.values[k] = values[order[k]];
        for (std::size_t i = 0; i < n; ++i) out.vectors(i, k) = vectors(i, order[k]);
    }
    return out;
}

SymEig jacobi_cyclic(Matrix a) {
    const std::size_t n = a.rows();
    Matrix v = Matrix::identity(n);
    const double fro = frobenius_norm(a);
    if (fro > 0.0) {
        for (int sweep = 0; sweep < 60; ++sweep) {
            for (std::size_t p = 0; p + 1 < n; ++p)
                for (std::size_t q = p + 1; q < n; ++q) {
                    if (a(p, q) == 0.0) continue;
                    const Rotation r = make_rotation(p, q, a(p, p), a(q, q), a(p, q));
                    apply_rotation_sym(a, r);
                    apply_rotation_cols(v, r);
                }
            if (off_diagonal_norm(a) <= 5e-15 * fro) break;
        }
    }
    std::vector<double> values(n);
    for (std::size_t i = 0; i < n; ++i) values[i] = a(i, i);
    return sort_descending(std::move(values), std::move(v));
}

// Round-robin ordered Jacobi: each round rotates n/2 disjoint index pairs.
// Angles are computed from the pre-round matrix (the 2x2 blocks involved are
// untouched by the other pairs), then the row and column passes update
// disjoint slices, so the result is identical for any thread count.
// Stops at an off-diagonal norm of 1e-9 of the input scale, which leaves
// ample margin on the 1e-8 residual contract.
SymEig jacobi_rounds(Matrix a, std::size_t n) {
    Matrix v = Matrix::identity(n);
    const double fro = frobenius_norm(a);
    const std::size_t m = n + (n % 2);  // pad with a dummy player when odd
    std::vector<std::size_t> arr(m);
    std::iota(arr.begin(), arr.end(), std::size_t{0});
    std::vector<Rotation> rots(m / 2);

    if (fro > 0.0) {
        for (int sweep = 0; sweep < 60; ++sweep) {
            std::iota(arr.begin(), arr.end(), std::size_t{0});
            for (std::size_t round = 0; round + 1 < m; ++round) {
                const std::size_t npairs = m / 2;
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
                for (std::size_t j = 0; j < npairs; ++j) {
                    std::size_t p = arr[j], q = arr[m - 1 - j];
                    if (p > q) std::swap(p, q);
                    if (q >= n) {  // dummy pair
                        rots[j] = {0, 0, 1.0, 0.0};
                        continue;
                    }
                    const double app = a(p, p), aqq = a(q, q), apq = a(p, q);
                    // negligible against the local diagonal: not worth a rotation
                    if (std::abs(apq) <= 1e-14 * (std::abs(app) + std::abs(aqq))) {
                        rots[j] = {0, 0, 1.0, 0.0};
                        continue;
                    }
                    rots[j] = make_rotation(p, q, app, aqq, apq);
                }
                std::vector<Rotation> active;
                active.reserve(npairs);
                for (std::size_t j = 0; j < npairs; ++j)
                    if (rots[j].p != rots[j].q) active.push_back(rots[j]);
                if (active.empty()) {
                    const std::size_t last = arr[m - 1];
                    for (std::size_t i = m - 1; i > 1; --i) arr[i] = arr[i - 1];
                    arr[1] = last;
                    continue;
                }
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
                for (std::size_t j = 0; j < active.size(); ++j) {
                    const Rotation& r = active[j];
                    double* rp = a.row(r.p);
                    double* rq = a.row(r.q);
                    for (std::size_t k = 0; k < n; ++k) {
                        const double apk = rp[k], aqk = rq[k];
                        rp[k] = r.c * apk - r.s * aqk;
                        rq[k] = r.s * apk + r.c * aqk;
                    }
                }
                // Column pass runs row-by-row: the round's pairs are
                // disjoint, so updates within one row are independent and
                // the whole row stays cache resident.
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
                for (std::size_t i = 0; i < n; ++i) {
                    double* ai = a.row(i);
                    double* vi = v.row(i);
                    for (const Rotation& r : active) {
                        const double aip = ai[r.p], aiq = ai[r.q];
                        ai[r.p] = r.c * aip - r.s * aiq;
                        ai[r.q] = r.s * aip + r.c * aiq;
                        const double vip = vi[r.p], viq = vi[r.q];
                        vi[r.p] = r.c * vip - r.s * viq;
                        vi[r.q] = r.s * vip + r.c * viq;
                    }
                }
                for (const Rotation& r : active) a(r.p, r.q) = a(r.q, r.p) = 0.0;
                // rotate the tournament schedule (player 0 stays fixed)
                const std::size_t last = arr[m - 1];
                for (std::size_t i = m - 1; i > 1; --i) arr[i] = arr[i - 1];
                arr[1] = last;
            }
            if (off_diagonal_norm(a) <= 1e-9 * fro) break;
        }
    }
    std::vector<double> values(n);
    for (std::size_t i = 0; i < n; ++i) values[i] = a(i, i);
    return sort_descending(std::move(values), std::move(v));
}

Matrix centered_copy(const Matrix& x, const std::vector<double>& means) {
    Matrix xc(x.rows(), x.cols());
    const std::size_t n = x.rows(), m = x.cols();
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
    for (std::size_t i = 0; i < n; ++i) {
        const double mu = means[i];
        const double* src = x.row(i);
        double* dst = xc.row(i);
        for (std::size_t t = 0; t < m; ++t) dst[t] = src[t] - mu;
    }
    return xc;
}

// (i,j) pairs with i <= j in lexicographic order; svec weighting is 1 on the
// diagonal and sqrt(2) off it, which makes the quadricovariance symmetric.
std::vector<std::pair<std::size_t, std::size_t>> sym_pairs(std::size_t n) {
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    pairs.reserve(n * (n + 1) / 2);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j) pairs.emplace_back(i, j);
    return pairs;
}

}  // namespace

std::vector<double> row_means(const Matrix& x) {
    const std::size_t n = x.rows(), m = x.cols();
    std::vector<double> means(n);
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
    for (std::size_t i = 0; i < n; ++i) {
        const double* r = x.row(i);
        double s = 0.0;
        for (std::size_t t = 0; t < m; ++t) s += r[t];
        means[i] = s / static_cast<double>(m);
    }
    return means;
}

double mean(const std::vector<double>& v) {
    const std::size_t n = v.size();
    const std::size_t nb = block_count(n);
    std::vector<double> partial(nb, 0.0);
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
    for (std::size_t b = 0; b < nb; ++b) {
        const std::size_t lo = b * kBlock, hi = std::min(n, lo + kBlock);
        double s = 0.0;
        for (std::size_t t = lo; t < hi; ++t) s += v[t];
        partial[b] = s;
    }
    double s = 0.0;
    for (double p : partial) s += p;
    return s / static_cast<double>(n);
}

void project_rows(const Matrix& z, const std::vector<double>& w, std::vector<double>& u) {
    const std::size_t n = z.rows(), m = z.cols();
    u.assign(m, 0.0);
    const std::size_t nb = block_count(m);
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
    for (std::size_t b = 0; b < nb; ++b) {
        const std::size_t lo = b * kBlock, hi = std::min(m, lo + kBlock);
        for (std::size_t i = 0; i < n; ++i) {
            const double wi = w[i];
            const double* zi = z.row(i);
            for (std::size_t t = lo; t < hi; ++t) u[t] += wi * zi[t];
        }
    }
}

void row_weighted_means(const Matrix& z, const std::vector<double>& v, std::vector<double>& out) {
    const std::size_t n = z.rows(), m = z.cols();
    out.assign(n, 0.0);
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
    for (std::size_t i = 0; i < n; ++i)
        out[i] = dot(z.row(i), v.data(), m) / static_cast<double>(m);
}

PairMoments pair_moments4(const double* a, const double* b, std::size_t n) {
    const std::size_t nb = block_count(n);
    std::vector<PairMoments> partial(nb);
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
    for (std::size_t blk = 0; blk < nb; ++blk) {
        const std::size_t lo = blk * kBlock, hi = std::min(n, lo + kBlock);
        PairMoments p{0, 0, 0, 0, 0};
        for (std::size_t t = lo; t < hi; ++t) {
            const double x = a[t], y = b[t];
            const double x2 = x * x, y2 = y * y;
            p.m40 += x2 * x2;
            p.m31 += x2 * x * y;
            p.m22 += x2 * y2;
            p.m13 += x * y * y2;
            p.m04 += y2 * y2;
        }
        partial[blk] = p;
    }
    PairMoments s{0, 0, 0, 0, 0};
    for (const auto& p : partial) {
        s.m40 += p.m40;
        s.m31 += p.m31;
        s.m22 += p.m22;
        s.m13 += p.m13;
        s.m04 += p.m04;
    }
    const double inv = 1.0 / static_cast<double>(n);
    return {s.m40 * inv, s.m31 * inv, s.m22 * inv, s.m13 * inv, s.m04 * inv};
}

Matrix covariance(const Matrix& x) {
    const std::size_t n = x.rows(), m = x.cols();
    if (m < 2) throw DimensionError("covariance needs at least 2 samples");
    const std::vector<double> means = row_means(x);
    const Matrix xc = centered_copy(x, means);
    Matrix c(n, n);
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j) {
            const double v = dot(xc.row(i), xc.row(j), m) / static_cast<double>(m);
            c(i, j) = c(j, i) = v;
        }
    return c;
}

SymEig sym_eig(const Matrix& m) {
    check_symmetric(m);
    // Symmetrize away the rounding-level asymmetry allowed by the contract.
    Matrix a = m;
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = i + 1; j < a.cols(); ++j)
            a(i, j) = a(j, i) = 0.5 * (m(i, j) + m(j, i));
    if (a.rows() >= 64) return jacobi_rounds(std::move(a), m.rows());
    return jacobi_cyclic(std::move(a));
}

std::pair<Matrix, Whitening> whiten(const Matrix& x) {
    const std::size_t n = x.rows(), m = x.cols();
    const Matrix cov = covariance(x);
    const SymEig eig = sym_eig(cov);
    const double lmax = eig.values.front();
    const double floor = 1e-12 * std::max(lmax, 0.0);
    int deficient = 0;
    for (double v : eig.values)
        if (v <= floor) ++deficient;
    if (deficient > 0)
        throw SingularDataError("whitening failed: covariance is rank deficient in " +
                                    std::to_string(deficient) + " of " + std::to_string(n) +
                                    " dimensions",
                                deficient);

    Whitening w;
    w.mean = row_means(x);
    w.whitener = Matrix(n, n);
    w.dewhitener = Matrix(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        const double rs = 1.0 / std::sqrt(eig.values[i]);
        const double fs = std::sqrt(eig.values[i]);
        for (std::size_t j = 0; j < n; ++j) {
            w.whitener(i, j) = rs * eig.vectors(j, i);
            w.dewhitener(j, i) = fs * eig.vectors(j, i);
        }
    }

    const Matrix xc = centered_copy(x, w.mean);
    Matrix z(n, m);
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
    for (std::size_t i = 0; i < n; ++i) {
        double* zi = z.row(i);
        for (std::size_t k = 0; k < n; ++k) {
            const double wik = w.whitener(i, k);
            const double* xk = xc.row(k);
            for (std::size_t t = 0; t < m; ++t) zi[t] += wik * xk[t];
        }
    }
    return {std::move(z), std::move(w)};
}

Matrix quadricov_gram(const Matrix& z) {
    const std::size_t n = z.rows(), m = z.cols();
    const auto pairs = sym_pairs(n);
    const std::size_t p = pairs.size();
    const double sqrt2 = std::sqrt(2.0);
    Matrix v(p, p);
    // Accumulate over fixed sample blocks to bound scratch memory; block
    // order is part of the result, so thread count cannot change it. The
    // upper triangle is computed in row/column tiles to keep the pair
    // products cache resident.
    constexpr std::size_t kTile = 16;
    std::vector<std::pair<std::size_t, std::size_t>> tiles;
    for (std::size_t r0 = 0; r0 < p; r0 += kTile)
        for (std::size_t c0 = r0; c0 < p; c0 += kTile) tiles.emplace_back(r0, c0);

    Matrix pb(p, std::min(m, kBlock));
    for (std::size_t lo = 0; lo < m; lo += kBlock) {
        const std::size_t len = std::min(kBlock, m - lo);
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
        for (std::size_t r = 0; r < p; ++r) {
            const auto [i, j] = pairs[r];
            const double w = (i == j) ? 1.0 : sqrt2;
            const double* zi = z.row(i) + lo;
            const double* zj = z.row(j) + lo;
            double* dst = pb.row(r);
            for (std::size_t t = 0; t < len; ++t) dst[t] = w * zi[t] * zj[t];
        }
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
        for (std::size_t ti = 0; ti < tiles.size(); ++ti) {
            const auto [r0, c0] = tiles[ti];
            const std::size_t r1 = std::min(p, r0 + kTile), c1 = std::min(p, c0 + kTile);
            for (std::size_t r = r0; r < r1; ++r) {
                double* vr = v.row(r);
                const double* pr = pb.row(r);
                for (std::size_t c = std::max(r, c0); c < c1; ++c)
                    vr[c] += dot(pr, pb.row(c), len);
            }
        }
    }
    const double inv = 1.0 / static_cast<double>(m);
    for (std::size_t r = 0; r < p; ++r)
        for (std::size_t c = r; c < p; ++c) v(c, r) = v(r, c) = v(r, c) * inv;
    return v;
}

CumulantSet cum4_eigenmatrices(const Matrix& z, std::size_t count) {
    const std::size_t n = z.rows(), m = z.cols();
    if (m < 2) throw DimensionError("cum4_eigenmatrices needs at least 2 samples");
    const std::size_t p = n * (n + 1) / 2;
    if (count > p)
        throw DimensionError("requested " + std::to_string(count) +
                             " eigen-matrices but only " + std::to_string(p) + " exist");
    {
        const Matrix cov = covariance(z);
        double dev = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                dev = std::max(dev, std::abs(cov(i, j) - (i == j ? 1.0 : 0.0)));
        if (dev > 1e-3)
            throw ContractViolationError("cum4_eigenmatrices expects whitened input");
    }

    Matrix q = quadricov_gram(z);
    const auto pairs = sym_pairs(n);
    const double sqrt2 = std::sqrt(2.0);
    // Subtract the Gaussian part: cum(i,j,k,l) = E[zi zj zk zl]
    // - d_ij d_kl - d_ik d_jl - d_il d_jk, carried into svec weighting.
    for (std::size_t r = 0; r < pairs.size(); ++r) {
        const auto [i, j] = pairs[r];
        const double wr = (i == j) ? 1.0 : sqrt2;
        for (std::size_t c = 0; c < pairs.size(); ++c) {
            const auto [k, l] = pairs[c];
            const double wc = (k == l) ? 1.0 : sqrt2;
            const int delta = (i == j && k == l ? 1 : 0) + (i == k && j == l ? 1 : 0) +
                              (i == l && j == k ? 1 : 0);
            if (delta != 0) q(r, c) -= wr * wc * static_cast<double>(delta);
        }
    }

    const SymEig eig = sym_eig(q);
    std::vector<std::size_t> order(p);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return std::abs(eig.values[a]) > std::abs(eig.values[b]);
    });

    CumulantSet set;
    set.low_sample_warning = m < 10 * n * n;
    set.matrices.reserve(count);
    set.weights.reserve(count);
    for (std::size_t k = 0; k < count; ++k) {
        const std::size_t col = order[k];
        Matrix em(n, n);
        for (std::size_t r = 0; r < pairs.size(); ++r) {
            const auto [i, j] = pairs[r];
            const double val = eig.vectors(r, col);
            if (i == j) {
                em(i, i) = val;
            } else {
                em(i, j) = em(j, i) = val / sqrt2;
            }
        }
        set.matrices.push_back(std::move(em));
        set.weights.push_back(eig.values[col]);
    }
    return set;
}

JointDiag joint_diagonalize(const CumulantSet& set) {
    if (set.matrices.empty())
        throw DimensionError("joint_diagonalize needs a non-empty matrix set");
    const std::size_t n = set.matrices.front().rows();
    std::vector<Matrix> work;
    work.reserve(set.matrices.size());
    for (std::size_t r = 0; r < set.matrices.size(); ++r) {
        const Matrix& m = set.matrices[r];
        if (m.rows() != n || m.cols() != n)
            throw DimensionError("joint_diagonalize matrices must share one square shape");
        const double w = r < set.weights.size() ? set.weights[r] : 1.0;
        Matrix a = m;
        for (double& v : a.data()) v *= w;
        work.push_back(std::move(a));
    }

    JointDiag out;
    out.rotation = Matrix::identity(n);
    auto off_energy = [&]() {
        double s = 0.0;
        for (const Matrix& a : work)
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j)
                    if (i != j) s += a(i, j) * a(i, j);
        return s;
    };
    out.off_energy.push_back(off_energy());

    constexpr double kSineTol = 1e-8;
    constexpr int kMaxSweeps = 100;
    for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
        double max_sine = 0.0;
        for (std::size_t p = 0; p + 1 < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) {
                // 2x2 subproblem: rotate (u, v) = (a_pp - a_qq, 2 a_pq) so the
                // summed squared u is maximal; its direction is the dominant
                // eigenvector of G = sum_r [u_r v_r]^T [u_r v_r].
                double g11 = 0.0, g12 = 0.0, g22 = 0.0;
                for (const Matrix& a : work) {
                    const double u = a(p, p) - a(q, q);
                    const double v = 2.0 * a(p, q);
                    g11 += u * u;
                    g12 += u * v;
                    g22 += v * v;
                }
                const double phi = 0.5 * std::atan2(2.0 * g12, g11 - g22);
                double x = std::cos(phi), y = std::sin(phi);
                if (x < 0.0) {
                    x = -x;
                    y = -y;
                }
                const double c = std::sqrt((1.0 + x) / 2.0);
                const double s = -y / (2.0 * c);
                max_sine = std::max(max_sine, std::abs(s));
                if (s == 0.0) continue;
                const Rotation rot{p, q, c, s};
                for (Matrix& a : work) {
                    // General (not zeroing) rotation: a_pq transforms too.
                    const double app = a(p, p), aqq = a(q, q), apq = a(p, q);
                    for (std::size_t k = 0; k < n; ++k) {
                        if (k == p || k == q) continue;
                        const double akp = a(k, p), akq = a(k, q);
                        a(k, p) = a(p, k) = c * akp - s * akq;
                        a(k, q) = a(q, k) = s * akp + c * akq;
                    }
                    a(p, p) = c * c * app - 2.0 * c * s * apq + s * s * aqq;
                    a(q, q) = s * s * app + 2.0 * c * s * apq + c * c * aqq;
                    a(p, q) = a(q, p) = c * s * (app - aqq) + (c * c - s * s) * apq;
                }
                apply_rotation_cols(out.rotation, rot);
            }
        out.sweeps = sweep + 1;
        out.off_energy.push_back(off_energy());
        if (max_sine < kSineTol) {
            out.converged = true;
            break;
        }
    }
    return out;
}

namespace ref {

Matrix covariance(const Matrix& x) {
    const std::size_t n = x.rows(), m = x.cols();
    if (m < 2) throw DimensionError("covariance needs at least 2 samples");
    std::vector<double> means(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t t = 0; t < m; ++t) means[i] += x(i, t);
        means[i] /= static_cast<double>(m);
    }
    Matrix c(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j) {
            double s = 0.0;
            for (std::size_t t = 0; t < m; ++t)
                s += (x(i, t) - means[i]) * (x(j, t) - means[j]);
            c(i, j) = c(j, i) = s / static_cast<double>(m);
        }
    return c;
}

SymEig sym_eig(const Matrix& m) {
    check_symmetric(m);
    Matrix a = m;
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = i + 1; j < a.cols(); ++j)
            a(i, j) = a(j, i) = 0.5 * (m(i, j) + m(j, i));
    return jacobi_cyclic(std::move(a));
}

PairMoments pair_moments4(const double* a, const double* b, std::size_t n) {
    PairMoments p{0, 0, 0, 0, 0};
    for (std::size_t t = 0; t < n; ++t) {
        const double x = a[t], y = b[t];
        p.m40 += x * x * x * x;
        p.m31 += x * x * x * y;
        p.m22 += x * x * y * y;
        p.m13 += x * y * y * y;
        p.m04 += y * y * y * y;
    }
    const double inv = 1.0 / static_cast<double>(n);
    return {p.m40 * inv, p.m31 * inv, p.m22 * inv, p.m13 * inv, p.m04 * inv};
}

double mean(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

Matrix quadricov_gram(const Matrix& z) {
    const std::size_t n = z.rows(), m = z.cols();
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j) pairs.emplace_back(i, j);
    const std::size_t p = pairs.size();
    const double sqrt2 = std::sqrt(2.0);
    Matrix v(p, p);
    for (std::size_t r = 0; r < p; ++r)
        for (std::size_t c = r; c < p; ++c) {
            const auto [i, j] = pairs[r];
            const auto [k, l] = pairs[c];
            const double w = ((i == j) ? 1.0 : sqrt2) * ((k == l) ? 1.0 : sqrt2);
            double s = 0.0;
            for (std::size_t t = 0; t < m; ++t) s += z(i, t) * z(j, t) * z(k, t) * z(l, t);
            v(r, c) = v(c, r) = w * s / static_cast<double>(m);
        }
    return v;
}

}  // namespace ref

}  // namespace icasim::numkit
