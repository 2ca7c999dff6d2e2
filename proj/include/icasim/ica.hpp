#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "icasim/matrix.hpp"
#include "icasim/numkit.hpp"

namespace icasim::ica {

enum class Algorithm { Comon, Jade, FastIca };
enum class Contrast { Kurtosis, Tanh };

const char* algorithm_name(Algorithm a);
const char* contrast_name(Contrast c);

struct IcaConfig {
    Algorithm algorithm = Algorithm::FastIca;
    Contrast contrast = Contrast::Tanh;  ///< FastICA only
    int max_iterations = 100;            ///< per component
    double tolerance = 1e-4;
    std::uint64_t seed = 0;

    void validate() const;
};

/// Result of one separation. For the whitened-coordinate entry points
/// (fastica_deflate, jade, comon) `unmixing` acts on the whitened input; for
/// separate() it acts on the original input. In both cases
/// sources = unmixing * input holds exactly.
struct IcaResult {
    Matrix unmixing;
    Matrix sources;
    std::vector<int> iterations;    ///< per component
    std::vector<char> converged;    ///< per component
    double contrast_value = 0.0;    ///< final value of the algorithm's contrast

    std::size_t components() const { return converged.size(); }
    int converged_count() const;
};

/// Center, whiten and run the configured algorithm; result is expressed in
/// the coordinates of x. Requires n >= 2 rows and cols >= 10 n.
/// Throws SeparationFailedError when no component converges.
IcaResult separate(const Matrix& x, const IcaConfig& cfg);

/// Fixed-point deflation on whitened data (covariance = I within 1e-3).
/// Components are extracted one at a time; each gets one re-initialization
/// retry before being flagged unconverged.
IcaResult fastica_deflate(const Matrix& z, const IcaConfig& cfg);

/// Joint diagonalization of the n most significant cumulant eigen-matrices
/// of whitened data.
IcaResult jade(const Matrix& z, const IcaConfig& cfg);

/// Pairwise rotation sweeps maximizing the summed squared kurtosis of the
/// outputs, on whitened data.
IcaResult comon(const Matrix& z, const IcaConfig& cfg);

/// Best rotation angle for one whitened pair: maximizes the summed squared
/// kurtosis of the rotated pair over theta in (-pi/4, pi/4]. Exposed for
/// tests. Returns {theta, contrast at theta, contrast at 0}.
struct PairRotation {
    double theta;
    double contrast;
    double contrast_at_zero;
};
PairRotation best_pair_rotation(const numkit::PairMoments& m);

/// Summed squared kurtosis over rows (the Comon-style contrast); also used
/// as the reported contrast for kurtosis-driven FastICA.
double sum_squared_kurtosis(const Matrix& y);

}  // namespace icasim::ica
