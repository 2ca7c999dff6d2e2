#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <set>

#include "icasim/codes.hpp"
#include "icasim/errors.hpp"

using icasim::CodeError;
namespace codes = icasim::codes;

namespace {

double circular_corr(const std::vector<double>& a, const std::vector<double>& b,
                     std::size_t shift) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[(i + shift) % b.size()];
    return s;
}

}  // namespace

TEST_CASE("m-sequence balance: 16 of one sign, 15 of the other") {
    const auto seq = codes::m_sequence(codes::kTapsA, 0b11111);
    REQUIRE(seq.size() == 31);
    int plus = 0, minus = 0;
    for (double c : seq) {
        CHECK((c == 1.0 || c == -1.0));
        (c > 0 ? plus : minus)++;
    }
    CHECK(std::max(plus, minus) == 16);
    CHECK(std::min(plus, minus) == 15);
}

TEST_CASE("m-sequence autocorrelation is -1 at every nonzero shift") {
    for (std::uint32_t taps : {codes::kTapsA, codes::kTapsB}) {
        const auto seq = codes::m_sequence(taps, 0b00001);
        CHECK(circular_corr(seq, seq, 0) == 31.0);
        for (std::size_t shift = 1; shift < 31; ++shift)
            CHECK(circular_corr(seq, seq, shift) == -1.0);
    }
}

TEST_CASE("m-sequence rejects bad arguments") {
    CHECK_THROWS_AS((void)codes::m_sequence(codes::kTapsA, 0), CodeError);
    // reducible polynomial: period collapses
    CHECK_THROWS_AS((void)codes::m_sequence(0b111111, 0b11111), CodeError);
    // not degree 5
    CHECK_THROWS_AS((void)codes::m_sequence(0b0101, 1), CodeError);
}

TEST_CASE("gold family has 33 codes with the three-valued spectrum") {
    const codes::GoldCodeSet family = codes::default_gold_family();
    CHECK(family.size() == 33);
    CHECK(family.length() == 31);

    for (std::size_t k = 0; k < family.size(); ++k) {
        const auto& c = family.code(k);
        CHECK(circular_corr(c, c, 0) == 31.0);
        for (double chip : c) CHECK((chip == 1.0 || chip == -1.0));
    }

    std::set<double> seen;
    for (std::size_t a = 0; a < family.size(); ++a)
        for (std::size_t b = a + 1; b < family.size(); ++b)
            for (std::size_t shift = 0; shift < 31; ++shift)
                seen.insert(circular_corr(family.code(a), family.code(b), shift));
    CHECK(seen == std::set<double>{-9.0, -1.0, 7.0});
}

TEST_CASE("out-of-range code index fails") {
    const codes::GoldCodeSet family = codes::default_gold_family();
    CHECK_THROWS_AS((void)family.code(33), CodeError);
}

TEST_CASE("a non-preferred primitive pair is rejected") {
    // x^5+x^3+1 is primitive but reciprocal to x^5+x^2+1; their
    // cross-correlation is not three-valued.
    CHECK_THROWS_AS((void)codes::gold_family(codes::kTapsA, 0b101001), CodeError);
}

TEST_CASE("normalized user-code columns have bounded inner products") {
    const codes::GoldCodeSet family = codes::default_gold_family();
    const double scale = 1.0 / std::sqrt(31.0);
    for (std::size_t a = 0; a < 30; ++a)
        for (std::size_t b = a + 1; b < 30; ++b) {
            double ip = 0.0;
            for (std::size_t i = 0; i < 31; ++i)
                ip += family.code(a)[i] * scale * family.code(b)[i] * scale;
            CHECK(std::abs(ip) <= 9.0 / 31.0 + 1e-12);
        }
}
