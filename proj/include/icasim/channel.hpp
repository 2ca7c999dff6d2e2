#pragma once

#include <cstdint>

#include "icasim/codes.hpp"
#include "icasim/ica.hpp"
#include "icasim/matrix.hpp"

namespace icasim::channel {

enum class NoiseColor { Awgn, Pink };

const char* noise_name(NoiseColor n);

/// One downlink experiment configuration. The SNR is per user and per
/// symbol: with unit-norm code columns and unit symbols the symbol energy is
/// 1, so snr_db maps to a per-chip noise variance of
/// 10^(-snr_db/10) / chips.
struct LinkScenario {
    int users = 30;
    int chips = 31;
    int symbols = 5000;
    double snr_db = 0.0;
    NoiseColor noise = NoiseColor::Awgn;
    ica::IcaConfig algorithm;
    std::uint64_t seed = 0;

    void validate() const;
};

/// Synthesized downlink frame: received = mixing * symbols + noise_realization.
struct TransmittedFrame {
    Matrix symbols;            ///< K x M, entries +-1
    Matrix mixing;             ///< C x K, unit-norm code columns
    Matrix received;           ///< C x M
    Matrix noise_realization;  ///< C x M
};

/// Independent equiprobable +-1 entries; row k draws from its own counter
/// stream, so output is identical for any evaluation order.
Matrix generate_symbols(int users, int symbols, std::uint64_t seed);

/// mixing columns are the first K family codes scaled to unit norm;
/// clean = mixing * symbols.
std::pair<Matrix, Matrix> spread_and_mix(const Matrix& symbols, const codes::GoldCodeSet& codes);

/// I.i.d. Gaussian noise with per-chip variance signal_power_per_user /
/// 10^(snr_db/10).
Matrix awgn(int rows, int cols, double snr_db, double signal_power_per_user, std::uint64_t seed);

/// Per-row 1/f noise: white Gaussian spectrum shaped by 1/sqrt(f) (DC bin
/// zeroed), inverse-transformed, then globally scaled so the emitted block
/// has the same total power as the matching AWGN case.
Matrix pink_noise(int rows, int cols, double snr_db, double signal_power_per_user,
                  std::uint64_t seed);

TransmittedFrame synthesize(const LinkScenario& sc, const codes::GoldCodeSet& codes);

/// Per-chip noise variance implied by the scenario SNR convention.
double chip_noise_variance(double snr_db, int chips);

}  // namespace icasim::channel
