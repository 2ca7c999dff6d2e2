#pragma once

#include <cstdint>
#include <utility>
#include <vector>

namespace icasim::codes {

/// Family of length-31 spreading codes in +1/-1 chip form: the two
/// m-sequences of a preferred pair plus the 31 cyclic XOR combinations.
class GoldCodeSet {
public:
    GoldCodeSet(std::uint32_t taps_u, std::uint32_t taps_v);

    std::size_t length() const { return 31; }
    std::size_t size() const { return codes_.size(); }

    /// Code by family index (0 = u, 1 = v, 2+k = u xor shift_k(v)).
    /// Throws CodeError for an out-of-range index.
    const std::vector<double>& code(std::size_t idx) const;

    std::pair<std::uint32_t, std::uint32_t> preferred_pair() const { return taps_; }

private:
    std::pair<std::uint32_t, std::uint32_t> taps_;
    std::vector<std::vector<double>> codes_;
};

/// Maximal-length sequence from a degree-5 LFSR. `taps` is the polynomial
/// bitmask (bit 5 and bit 0 must be set, e.g. 0b100101 for x^5 + x^2 + 1);
/// `init` is the nonzero 5-bit start state. Output chips are +1 for bit 0,
/// -1 for bit 1. Throws CodeError unless the polynomial has period exactly 31.
std::vector<double> m_sequence(std::uint32_t taps, std::uint32_t init);

/// Build the Gold family and verify the three-valued cross-correlation
/// spectrum {-1, -9, +7} across every distinct pair and shift; throws
/// CodeError when the pair is not a preferred pair.
GoldCodeSet gold_family(std::uint32_t taps_u, std::uint32_t taps_v);

/// The family used by the simulator: x^5 + x^2 + 1 with x^5+x^4+x^3+x^2+1.
GoldCodeSet default_gold_family();

inline constexpr std::uint32_t kTapsA = 0b100101;  // x^5 + x^2 + 1
inline constexpr std::uint32_t kTapsB = 0b111101;  // x^5 + x^4 + x^3 + x^2 + 1

}  // namespace icasim::codes
