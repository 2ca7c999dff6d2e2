#include "icasim/channel.hpp"

#include <cmath>
#include <complex>
#include <string>

#include "icasim/errors.hpp"
#include "icasim/fft.hpp"
#include "icasim/rng.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace icasim::channel {

namespace {

constexpr std::uint64_t kTagSymbols = 0x5b01;
constexpr std::uint64_t kTagNoise = 0x401e;

}  // namespace

const char* noise_name(NoiseColor n) { return n == NoiseColor::Awgn ? "awgn" : "pink"; }

void LinkScenario::validate() const {
    if (chips < 1) throw DimensionError("scenario: chips must be positive");
    if (users < 1) throw DimensionError("scenario: users must be at least 1");
    if (chips == 31 && users > 30)
        throw DimensionError("scenario: at most 30 users with 31 chips");
    if (symbols < 100) throw DimensionError("scenario: symbols must be at least 100");
    if (!std::isfinite(snr_db)) throw DimensionError("scenario: snr_db must be finite");
    algorithm.validate();
}

double chip_noise_variance(double snr_db, int chips) {
    const double snr = std::pow(10.0, snr_db / 10.0);
    return 1.0 / (static_cast<double>(chips) * snr);
}

Matrix generate_symbols(int users, int symbols, std::uint64_t seed) {
    if (users < 1 || symbols < 1) throw DimensionError("generate_symbols: sizes must be >= 1");
    Matrix b(users, symbols);
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
    for (int k = 0; k < users; ++k) {
        const rng::Stream st = rng::substream(seed, kTagSymbols, static_cast<std::uint64_t>(k));
        double* row = b.row(static_cast<std::size_t>(k));
        for (int t = 0; t < symbols; ++t) row[t] = st.pm1(static_cast<std::uint64_t>(t));
    }
    return b;
}

std::pair<Matrix, Matrix> spread_and_mix(const Matrix& symbols, const codes::GoldCodeSet& codes) {
    const std::size_t users = symbols.rows();
    if (users > codes.size())
        throw DimensionError("spread_and_mix: " + std::to_string(users) +
                             " users exceed the " + std::to_string(codes.size()) +
                             "-code family");
    const std::size_t chips = codes.length();
    const double scale = 1.0 / std::sqrt(static_cast<double>(chips));

    Matrix mixing(chips, users);
    for (std::size_t k = 0; k < users; ++k) {
        const std::vector<double>& c = codes.code(k);
        for (std::size_t i = 0; i < chips; ++i) mixing(i, k) = c[i] * scale;
    }
    return {mixing, matmul(mixing, symbols)};
}

Matrix awgn(int rows, int cols, double snr_db, double signal_power_per_user,
            std::uint64_t seed) {
    if (!std::isfinite(snr_db)) throw DimensionError("awgn: snr_db must be finite");
    const double sigma =
        std::sqrt(signal_power_per_user / std::pow(10.0, snr_db / 10.0));
    Matrix n(rows, cols);
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
    for (int r = 0; r < rows; ++r) {
        const rng::Stream st = rng::substream(seed, kTagNoise, static_cast<std::uint64_t>(r));
        double* row = n.row(static_cast<std::size_t>(r));
        for (int t = 0; t < cols; ++t)
            row[t] = sigma * st.gaussian(static_cast<std::uint64_t>(t));
    }
    return n;
}

Matrix pink_noise(int rows, int cols, double snr_db, double signal_power_per_user,
                  std::uint64_t seed) {
    if (!std::isfinite(snr_db)) throw DimensionError("pink_noise: snr_db must be finite");
    const double sigma2 = signal_power_per_user / std::pow(10.0, snr_db / 10.0);
    const std::size_t nfft = fft::next_pow2(static_cast<std::size_t>(cols));

    Matrix n(rows, cols);
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
    for (int r = 0; r < rows; ++r) {
        const rng::Stream st = rng::substream(seed, kTagNoise, static_cast<std::uint64_t>(r));
        std::vector<std::complex<double>> spec(nfft, {0.0, 0.0});
        for (std::size_t k = 1; k < nfft / 2; ++k) {
            const double a = st.gaussian(2 * k);
            const double b = st.gaussian(2 * k + 1);
            const double shape = 1.0 / std::sqrt(static_cast<double>(k));
            spec[k] = {a * shape, b * shape};
            spec[nfft - k] = std::conj(spec[k]);
        }
        fft::transform(spec, true);
        double* row = n.row(static_cast<std::size_t>(r));
        for (int t = 0; t < cols; ++t) row[t] = spec[static_cast<std::size_t>(t)].real();
    }

    // One global factor brings the emitted block to the AWGN power budget.
    double power = 0.0;
    for (double v : n.data()) power += v * v;
    const double target = sigma2 * static_cast<double>(rows) * static_cast<double>(cols);
    const double scale = power > 0.0 ? std::sqrt(target / power) : 0.0;
    for (double& v : n.data()) v *= scale;
    return n;
}

TransmittedFrame synthesize(const LinkScenario& sc, const codes::GoldCodeSet& codes) {
    sc.validate();
    if (static_cast<std::size_t>(sc.chips) != codes.length())
        throw DimensionError("synthesize: scenario chips do not match the code length");

    TransmittedFrame f;
    f.symbols = generate_symbols(sc.users, sc.symbols, sc.seed);
    auto [mixing, clean] = spread_and_mix(f.symbols, codes);
    f.mixing = std::move(mixing);

    // Per-chip power of one user's contribution: unit-norm column, unit
    // symbols -> 1/C per chip, symbol energy 1.
    const double signal_power_per_user = 1.0 / static_cast<double>(sc.chips);
    f.noise_realization = sc.noise == NoiseColor::Awgn
                              ? awgn(sc.chips, sc.symbols, sc.snr_db, signal_power_per_user,
                                     sc.seed)
                              : pink_noise(sc.chips, sc.symbols, sc.snr_db,
                                           signal_power_per_user, sc.seed);

    f.received = std::move(clean);
    for (std::size_t i = 0; i < f.received.data().size(); ++i)
        f.received.data()[i] += f.noise_realization.data()[i];
    return f;
}

}  // namespace icasim::channel
