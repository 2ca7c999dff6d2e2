#include "icasim/codes.hpp"

#include <string>

#include "icasim/errors.hpp"

namespace icasim::codes {

namespace {

constexpr std::size_t kDegree = 5;
constexpr std::size_t kPeriod = 31;

/// One LFSR step for state bits (a_t .. a_{t+4}) packed LSB-first; returns
/// the new state. The recurrence is a_{t+5} = xor of a_{t+k} over the set
/// tap exponents k < 5.
std::uint32_t lfsr_step(std::uint32_t state, std::uint32_t taps) {
    std::uint32_t fb = 0;
    for (std::size_t k = 0; k < kDegree; ++k)
        if (taps & (1u << k)) fb ^= (state >> k) & 1u;
    return (state >> 1) | (fb << (kDegree - 1));
}

}  // namespace

std::vector<double> m_sequence(std::uint32_t taps, std::uint32_t init) {
    if (init == 0) throw CodeError("m_sequence: zero initial state is degenerate");
    if ((taps & (1u << kDegree)) == 0 || (taps & 1u) == 0 || taps >= (1u << (kDegree + 1)))
        throw CodeError("m_sequence: taps must describe a degree-5 polynomial with nonzero "
                        "constant term");
    init &= (1u << kDegree) - 1;
    if (init == 0) throw CodeError("m_sequence: zero initial state is degenerate");

    std::vector<double> chips(kPeriod);
    std::uint32_t state = init;
    for (std::size_t t = 0; t < kPeriod; ++t) {
        chips[t] = (state & 1u) ? -1.0 : 1.0;
        state = lfsr_step(state, taps);
        if (state == init && t + 1 < kPeriod)
            throw CodeError("m_sequence: period " + std::to_string(t + 1) +
                            " < 31, polynomial is not primitive");
    }
    if (state != init)
        throw CodeError("m_sequence: state did not return after 31 steps, polynomial is "
                        "not primitive");
    return chips;
}

GoldCodeSet::GoldCodeSet(std::uint32_t taps_u, std::uint32_t taps_v)
    : taps_{taps_u, taps_v} {
    const std::uint32_t all_ones = (1u << kDegree) - 1;
    const std::vector<double> u = m_sequence(taps_u, all_ones);
    const std::vector<double> v = m_sequence(taps_v, all_ones);

    codes_.reserve(kPeriod + 2);
    codes_.push_back(u);
    codes_.push_back(v);
    for (std::size_t shift = 0; shift < kPeriod; ++shift) {
        std::vector<double> c(kPeriod);
        // xor in the binary domain is a product of +-1 chips
        for (std::size_t i = 0; i < kPeriod; ++i) c[i] = u[i] * v[(i + shift) % kPeriod];
        codes_.push_back(std::move(c));
    }

    // Three-valued cross-correlation spectrum check over all distinct pairs
    // and all shifts; t(5) = 9 gives {-1, -9, +7}.
    for (std::size_t a = 0; a < codes_.size(); ++a)
        for (std::size_t b = a + 1; b < codes_.size(); ++b)
            for (std::size_t shift = 0; shift < kPeriod; ++shift) {
                double r = 0.0;
                for (std::size_t i = 0; i < kPeriod; ++i)
                    r += codes_[a][i] * codes_[b][(i + shift) % kPeriod];
                if (r != -1.0 && r != -9.0 && r != 7.0)
                    throw CodeError(
                        "gold_family: cross-correlation " + std::to_string(r) +
                        " outside {-1,-9,7}; taps are not a preferred pair");
            }
}

const std::vector<double>& GoldCodeSet::code(std::size_t idx) const {
    if (idx >= codes_.size())
        throw CodeError("code index " + std::to_string(idx) + " out of range (family has " +
                        std::to_string(codes_.size()) + " codes)");
    return codes_[idx];
}

GoldCodeSet gold_family(std::uint32_t taps_u, std::uint32_t taps_v) {
    return GoldCodeSet(taps_u, taps_v);
}

GoldCodeSet default_gold_family() { return GoldCodeSet(kTapsA, kTapsB); }

}  // namespace icasim::codes
