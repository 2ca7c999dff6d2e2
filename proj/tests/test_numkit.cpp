#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "icasim/numkit.hpp"
#include "icasim/rng.hpp"
#include "support/oracles.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

using icasim::Matrix;
using icasim::DimensionError;
using icasim::ContractViolationError;
using icasim::SingularDataError;
namespace numkit = icasim::numkit;

namespace {

Matrix residual(const Matrix& m, const numkit::SymEig& eig) {
    // m * v_k - lambda_k * v_k stacked as columns
    Matrix r(m.rows(), m.cols());
    for (std::size_t k = 0; k < m.cols(); ++k)
        for (std::size_t i = 0; i < m.rows(); ++i) {
            double s = 0.0;
            for (std::size_t j = 0; j < m.cols(); ++j) s += m(i, j) * eig.vectors(j, k);
            r(i, k) = s - eig.values[k] * eig.vectors(i, k);
        }
    return r;
}

double max_abs(const Matrix& m) {
    double v = 0.0;
    for (double x : m.data()) v = std::max(v, std::abs(x));
    return v;
}

Matrix gram_identity_gap(const Matrix& v) {
    Matrix g(v.cols(), v.cols());
    for (std::size_t a = 0; a < v.cols(); ++a)
        for (std::size_t b = 0; b < v.cols(); ++b) {
            double s = 0.0;
            for (std::size_t i = 0; i < v.rows(); ++i) s += v(i, a) * v(i, b);
            g(a, b) = s - (a == b ? 1.0 : 0.0);
        }
    return g;
}

}  // namespace

TEST_CASE("covariance of perfectly correlated rows is rank one") {
    const Matrix s = oracles::gaussian_sources(1, 500, 11);
    Matrix x(2, 500);
    for (std::size_t t = 0; t < 500; ++t) x(0, t) = x(1, t) = s(0, t);
    const Matrix c = numkit::covariance(x);
    const double det = c(0, 0) * c(1, 1) - c(0, 1) * c(1, 0);
    CHECK(std::abs(det) < 1e-12 * c(0, 0) * c(0, 0));
}

TEST_CASE("covariance of independent unit-variance rows approaches identity") {
    const Matrix x = oracles::gaussian_sources(4, 100000, 12);
    const Matrix c = numkit::covariance(x);
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = 0; j < 4; ++j) {
            if (i == j) CHECK(c(i, j) == doctest::Approx(1.0).epsilon(0.05));
            else CHECK(std::abs(c(i, j)) < 0.05);
        }
}

TEST_CASE("covariance of a constant row is exactly zero") {
    Matrix x(1, 50);
    for (std::size_t t = 0; t < 50; ++t) x(0, t) = 3.25;
    const Matrix c = numkit::covariance(x);
    CHECK(c(0, 0) == 0.0);
}

TEST_CASE("covariance rejects degenerate sample counts") {
    Matrix x(2, 1);
    CHECK_THROWS_AS((void)numkit::covariance(x), DimensionError);
}

TEST_CASE("covariance matches the serial reference") {
    const Matrix x = oracles::uniform_sources(5, 10000, 13);
    const Matrix a = numkit::covariance(x);
    const Matrix b = numkit::ref::covariance(x);
    CHECK(icasim::max_abs_diff(a, b) < 1e-12);
}

#ifdef _OPENMP
TEST_CASE("kernels are bit-identical for any thread count") {
    const Matrix x = oracles::gaussian_sources(6, 30000, 14);
    const int saved = omp_get_max_threads();
    omp_set_num_threads(1);
    const Matrix c1 = numkit::covariance(x);
    const Matrix q1 = numkit::quadricov_gram(x);
    const numkit::SymEig e1 = numkit::sym_eig(q1);
    omp_set_num_threads(2);
    const Matrix c2 = numkit::covariance(x);
    const Matrix q2 = numkit::quadricov_gram(x);
    const numkit::SymEig e2 = numkit::sym_eig(q1);
    omp_set_num_threads(saved);
    CHECK(c1.data() == c2.data());
    CHECK(q1.data() == q2.data());
    CHECK(e1.values == e2.values);
    CHECK(e1.vectors.data() == e2.vectors.data());
}
#endif

TEST_CASE("sym_eig solves the hand-checked instances") {
    SUBCASE("identity") {
        const numkit::SymEig e = numkit::sym_eig(Matrix::identity(3));
        for (double v : e.values) CHECK(v == doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("diagonal") {
        Matrix m(2, 2);
        m(0, 0) = 4.0;
        m(1, 1) = 1.0;
        const numkit::SymEig e = numkit::sym_eig(m);
        CHECK(e.values[0] == doctest::Approx(4.0));
        CHECK(e.values[1] == doctest::Approx(1.0));
        CHECK(std::abs(e.vectors(0, 0)) == doctest::Approx(1.0));
        CHECK(std::abs(e.vectors(1, 1)) == doctest::Approx(1.0));
    }
    SUBCASE("two by two with known eigenvectors") {
        Matrix m(2, 2);
        m(0, 0) = m(1, 1) = 2.0;
        m(0, 1) = m(1, 0) = 1.0;
        const numkit::SymEig e = numkit::sym_eig(m);
        CHECK(e.values[0] == doctest::Approx(3.0));
        CHECK(e.values[1] == doctest::Approx(1.0));
        const double r = 1.0 / std::numbers::sqrt2;
        CHECK(std::abs(e.vectors(0, 0) * r + e.vectors(1, 0) * r) ==
              doctest::Approx(1.0).epsilon(1e-9));
        CHECK(std::abs(e.vectors(0, 1) * r - e.vectors(1, 1) * r) ==
              doctest::Approx(1.0).epsilon(1e-9));
    }
}

TEST_CASE("sym_eig rejects asymmetric input") {
    Matrix m(2, 2);
    m(0, 1) = 0.5;
    m(1, 0) = -0.5;
    CHECK_THROWS_AS((void)numkit::sym_eig(m), ContractViolationError);
}

TEST_CASE("sym_eig meets its residual and orthogonality contract") {
    for (std::size_t n : {10ul, 80ul}) {  // cyclic and round-robin paths
        Matrix m(n, n);
        const icasim::rng::Stream st = icasim::rng::substream(21, 0xa, n);
        std::uint64_t c = 0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i; j < n; ++j) m(i, j) = m(j, i) = st.gaussian(c++);
        const numkit::SymEig e = numkit::sym_eig(m);
        const double scale = icasim::frobenius_norm(m);
        CHECK(max_abs(residual(m, e)) < 1e-8 * scale);
        CHECK(max_abs(gram_identity_gap(e.vectors)) < 1e-10);
        for (std::size_t i = 0; i + 1 < n; ++i) CHECK(e.values[i] >= e.values[i + 1]);

        const numkit::SymEig r = numkit::ref::sym_eig(m);
        for (std::size_t i = 0; i < n; ++i)
            CHECK(std::abs(e.values[i] - r.values[i]) < 1e-8 * scale);
    }
}

TEST_CASE("whitening produces identity covariance and an exact inverse pair") {
    const Matrix s = oracles::uniform_sources(4, 20000, 31);
    const Matrix a = oracles::random_mixing(4, 32);
    const Matrix x = matmul(a, s);
    const auto [z, w] = numkit::whiten(x);

    const Matrix cz = numkit::covariance(z);
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = 0; j < 4; ++j)
            CHECK(std::abs(cz(i, j) - (i == j ? 1.0 : 0.0)) < 1e-6);

    const Matrix cov = numkit::covariance(x);
    const Matrix wc = matmul(w.whitener, matmul(cov, icasim::transpose(w.whitener)));
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = 0; j < 4; ++j)
            CHECK(std::abs(wc(i, j) - (i == j ? 1.0 : 0.0)) < 1e-8);

    const Matrix dw = matmul(w.dewhitener, w.whitener);
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = 0; j < 4; ++j)
            CHECK(std::abs(dw(i, j) - (i == j ? 1.0 : 0.0)) < 1e-8);

    const Matrix back = matmul(w.dewhitener, z);
    double worst = 0.0;
    for (std::size_t i = 0; i < x.rows(); ++i)
        for (std::size_t t = 0; t < x.cols(); ++t)
            worst = std::max(worst, std::abs(back(i, t) + w.mean[i] - x(i, t)));
    CHECK(worst < 1e-6 * max_abs(x));
}

TEST_CASE("whitening an already-white signal stays near the identity covariance") {
    const Matrix z0 = oracles::pm1_sources(3, 50000, 33);
    const auto [z, w] = numkit::whiten(z0);
    const Matrix cz = numkit::covariance(z);
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j)
            CHECK(std::abs(cz(i, j) - (i == j ? 1.0 : 0.0)) < 1e-6);
    const Matrix g = matmul(w.whitener, icasim::transpose(w.whitener));
    for (std::size_t i = 0; i < 3; ++i)
        CHECK(g(i, i) == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("whitening names the deficient dimension count") {
    Matrix x(3, 1000);
    const icasim::rng::Stream st = icasim::rng::substream(34, 0xb, 0);
    for (std::size_t t = 0; t < 1000; ++t) {
        x(0, t) = st.gaussian(t);
        x(1, t) = 2.0;       // constant row
        x(2, t) = -x(0, t);  // linearly dependent row
    }
    try {
        (void)numkit::whiten(x);
        FAIL("expected SingularDataError");
    } catch (const SingularDataError& e) {
        CHECK(e.deficient == 2);
    }
}

TEST_CASE("cum4 of a single pm1 stream is -2") {
    const Matrix s = oracles::pm1_sources(1, 100000, 41);
    const auto [z, w] = numkit::whiten(s);
    const numkit::CumulantSet set = numkit::cum4_eigenmatrices(z, 1);
    REQUIRE(set.matrices.size() == 1);
    CHECK(set.weights[0] == doctest::Approx(-2.0).epsilon(0.025));
}

TEST_CASE("cum4 of independent pm1 rows: diagonal -2, cross terms vanish") {
    const Matrix s = oracles::pm1_sources(2, 100000, 42);

    // The naive oracle on the raw rows: x^2 = 1 identically, so the marginal
    // cumulants are exactly -2 and the even cross terms exactly 0.
    CHECK(oracles::naive_cum4(s, 0, 0, 0, 0) == doctest::Approx(-2.0).epsilon(1e-9));
    CHECK(oracles::naive_cum4(s, 1, 1, 1, 1) == doctest::Approx(-2.0).epsilon(1e-9));
    CHECK(std::abs(oracles::naive_cum4(s, 0, 0, 1, 1)) < 1e-9);
    CHECK(std::abs(oracles::naive_cum4(s, 0, 1, 1, 1)) < 0.05);

    // Whitening rotates the pair, but the tensor eigenvalues are basis
    // invariant: two at -2, the rest near 0.
    const auto [z, w] = numkit::whiten(s);
    const numkit::CumulantSet set = numkit::cum4_eigenmatrices(z, 3);
    CHECK(set.weights[0] == doctest::Approx(-2.0).epsilon(0.05));
    CHECK(set.weights[1] == doctest::Approx(-2.0).epsilon(0.05));
    CHECK(std::abs(set.weights[2]) < 0.05);

    // and the quadricovariance entries agree with the naive oracle on the
    // same whitened data; svec order for n=2 is (0,0), (0,1), (1,1)
    Matrix qc = numkit::quadricov_gram(z);
    const double sqrt2 = std::numbers::sqrt2;
    qc(0, 0) -= 3.0;
    qc(2, 2) -= 3.0;
    qc(0, 2) -= 1.0;
    qc(2, 0) -= 1.0;
    qc(1, 1) -= 2.0;
    CHECK(std::abs(qc(0, 0) - oracles::naive_cum4(z, 0, 0, 0, 0)) < 1e-9);
    CHECK(std::abs(qc(1, 1) - 2.0 * oracles::naive_cum4(z, 0, 1, 0, 1)) < 1e-9);
    CHECK(std::abs(qc(0, 1) - sqrt2 * oracles::naive_cum4(z, 0, 0, 0, 1)) < 1e-9);
}

TEST_CASE("cum4 of Gaussian streams vanishes") {
    const Matrix s = oracles::gaussian_sources(3, 100000, 43);
    const auto [z, w] = numkit::whiten(s);
    const numkit::CumulantSet set = numkit::cum4_eigenmatrices(z, 6);
    const double bound = 10.0 * 5.0 / std::sqrt(100000.0);
    for (double wt : set.weights) CHECK(std::abs(wt) < std::min(0.05, bound));
    CHECK_FALSE(set.low_sample_warning);
}

TEST_CASE("cum4 eigen-matrices are symmetric, unit norm, ordered, and flagged") {
    const Matrix s = oracles::uniform_sources(3, 80, 44);  // 80 < 10 n^2 = 90
    const auto [z, w] = numkit::whiten(s);
    const numkit::CumulantSet set = numkit::cum4_eigenmatrices(z, 3);
    CHECK(set.low_sample_warning);
    for (std::size_t r = 0; r < set.matrices.size(); ++r) {
        const Matrix& m = set.matrices[r];
        for (std::size_t i = 0; i < 3; ++i)
            for (std::size_t j = 0; j < 3; ++j) CHECK(m(i, j) == m(j, i));
        CHECK(icasim::frobenius_norm(m) == doctest::Approx(1.0).epsilon(1e-10));
        if (r > 0) CHECK(std::abs(set.weights[r]) <= std::abs(set.weights[r - 1]));
    }
}

TEST_CASE("cum4 validates its preconditions") {
    const Matrix x = oracles::uniform_sources(2, 2000, 45);
    CHECK_THROWS_AS((void)numkit::cum4_eigenmatrices(x, 1), ContractViolationError);
    const auto [z, w] = numkit::whiten(x);
    CHECK_THROWS_AS((void)numkit::cum4_eigenmatrices(z, 4), DimensionError);
}

TEST_CASE("quadricov gram matches the serial reference") {
    const Matrix s = oracles::uniform_sources(4, 9000, 46);
    const auto [z, w] = numkit::whiten(s);
    const Matrix a = numkit::quadricov_gram(z);
    const Matrix b = numkit::ref::quadricov_gram(z);
    CHECK(icasim::max_abs_diff(a, b) < 1e-10);
}

TEST_CASE("pair moments match the serial reference") {
    const Matrix x = oracles::uniform_sources(2, 50000, 47);
    const numkit::PairMoments a = numkit::pair_moments4(x.row(0), x.row(1), x.cols());
    const numkit::PairMoments b = numkit::ref::pair_moments4(x.row(0), x.row(1), x.cols());
    CHECK(std::abs(a.m40 - b.m40) < 1e-11);
    CHECK(std::abs(a.m31 - b.m31) < 1e-11);
    CHECK(std::abs(a.m22 - b.m22) < 1e-11);
    CHECK(std::abs(a.m13 - b.m13) < 1e-11);
    CHECK(std::abs(a.m04 - b.m04) < 1e-11);
}

TEST_CASE("joint diagonalization leaves diagonal sets alone") {
    numkit::CumulantSet set;
    for (int r = 0; r < 3; ++r) {
        Matrix d(4, 4);
        for (std::size_t i = 0; i < 4; ++i)
            d(i, i) = static_cast<double>((r + 1) * (i + 1)) * (i % 2 ? -1.0 : 1.0);
        set.matrices.push_back(d);
        set.weights.push_back(1.0);
    }
    const numkit::JointDiag jd = numkit::joint_diagonalize(set);
    CHECK(jd.converged);
    // identity up to permutation and sign: one unit entry per column
    for (std::size_t c = 0; c < 4; ++c) {
        double mx = 0.0, sum = 0.0;
        for (std::size_t r = 0; r < 4; ++r) {
            mx = std::max(mx, std::abs(jd.rotation(r, c)));
            sum += jd.rotation(r, c) * jd.rotation(r, c);
        }
        CHECK(mx == doctest::Approx(1.0).epsilon(1e-8));
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-10));
    }
}

TEST_CASE("joint diagonalization recovers a planted rotation") {
    const Matrix q = oracles::random_orthogonal(3, 47);
    numkit::CumulantSet set;
    const double d1[] = {3.0, -1.0, 0.5};
    const double d2[] = {-2.0, 1.5, 4.0};
    for (const double* d : {d1, d2}) {
        Matrix m(3, 3);
        for (std::size_t i = 0; i < 3; ++i) m(i, i) = d[i];
        set.matrices.push_back(matmul(icasim::transpose(q), matmul(m, q)));
        set.weights.push_back(1.0);
    }
    const numkit::JointDiag jd = numkit::joint_diagonalize(set);
    CHECK(jd.converged);
    double off = 0.0;
    for (const Matrix& m : set.matrices) {
        const Matrix t = matmul(icasim::transpose(jd.rotation), matmul(m, jd.rotation));
        for (std::size_t i = 0; i < 3; ++i)
            for (std::size_t j = 0; j < 3; ++j)
                if (i != j) off += t(i, j) * t(i, j);
    }
    CHECK(off < 1e-10);
}

TEST_CASE("joint diagonalization solves the closed-form 2x2") {
    numkit::CumulantSet set;
    Matrix m(2, 2);
    m(0, 1) = m(1, 0) = 1.0;
    set.matrices.push_back(m);
    set.weights.push_back(1.0);
    const numkit::JointDiag jd = numkit::joint_diagonalize(set);
    CHECK(jd.converged);
    CHECK(std::abs(jd.rotation(0, 0)) == doctest::Approx(1.0 / std::numbers::sqrt2));
    const Matrix t = matmul(icasim::transpose(jd.rotation), matmul(m, jd.rotation));
    CHECK(std::abs(t(0, 1)) < 1e-14);
}

TEST_CASE("joint diagonalization stays orthogonal with a monotone sweep trace") {
    numkit::CumulantSet set;
    const icasim::rng::Stream st = icasim::rng::substream(48, 0xc, 0);
    std::uint64_t c = 0;
    for (int r = 0; r < 5; ++r) {
        Matrix m(6, 6);
        for (std::size_t i = 0; i < 6; ++i)
            for (std::size_t j = i; j < 6; ++j) m(i, j) = m(j, i) = st.gaussian(c++);
        set.matrices.push_back(m);
        set.weights.push_back(1.0 + 0.1 * r);
    }
    const numkit::JointDiag jd = numkit::joint_diagonalize(set);
    CHECK(max_abs(gram_identity_gap(jd.rotation)) < 1e-10);
    REQUIRE(jd.off_energy.size() >= 2);
    for (std::size_t i = 0; i + 1 < jd.off_energy.size(); ++i)
        CHECK(jd.off_energy[i + 1] <= jd.off_energy[i] * (1.0 + 1e-12) + 1e-12);
}
