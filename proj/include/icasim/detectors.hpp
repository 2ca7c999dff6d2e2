#pragma once

#include <optional>
#include <vector>

#include "icasim/ica.hpp"
#include "icasim/matrix.hpp"

namespace icasim::detectors {

/// Hard/soft decisions of one detector over a frame.
/// hard(i, t) = sign(soft(i, t)) with sign(0) resolved to +1.
struct DetectorOutput {
    Matrix hard;
    Matrix soft;
    bool ica_failed = false;          ///< separation produced nothing usable
    std::vector<char> unresolved;     ///< per user: no IC matched the pilot
    std::optional<bool> ica_converged;
    std::optional<double> ica_iterations;  ///< mean per-component count

    bool any_unresolved() const;
};

/// Assignment of independent components to users from a pilot window.
struct AmbiguityMap {
    std::vector<int> ic_of_user;       ///< -1 when unresolved
    std::vector<double> signs;         ///< +-1 per user
    std::vector<double> match_scores;  ///< |correlation| per user, in [0, 1]
    std::vector<char> resolved;
};

/// Matched filter for one user: soft value per symbol is
/// code^T r_t / ||code||^2. Takes the unit-norm signature column.
DetectorOutput sud_detect(const Matrix& received, const std::vector<double>& code);

/// Matched filters for all signature columns of `signatures` (C x K).
DetectorOutput sud_detect_all(const Matrix& received, const Matrix& signatures);

/// Greedy highest-|correlation| assignment of IC rows to users over the
/// pilot window (first P columns of `ica.sources` against `pilots`, K x P).
/// Users whose best remaining score is below 0.5 are left unresolved.
AmbiguityMap resolve_ambiguity(const ica::IcaResult& ica, const Matrix& pilots);

/// Separation-based detector: extracts one component per received dimension,
/// matches components to users via the pilots, decides by sign. Rank
/// deficient input (e.g. a noise-free frame) is projected onto its principal
/// subspace first.
DetectorOutput ica_detect(const Matrix& received, const ica::IcaConfig& cfg,
                          const Matrix& pilots);

/// Combined detector: SUD and the ICA detector run on the same frame; where
/// their hard decisions disagree, the decision with the larger per-user
/// normalized confidence |soft| / mean|soft| wins. Falls back to SUD for
/// failed separations and unresolved users.
DetectorOutput sudica_detect(const Matrix& received, const Matrix& signatures,
                             const ica::IcaConfig& cfg, const Matrix& pilots);

/// Same, reusing an already-computed ICA detector output for the frame.
DetectorOutput sudica_combine(const DetectorOutput& sud, const DetectorOutput& ica);

}  // namespace icasim::detectors
