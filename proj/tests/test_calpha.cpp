#include <catch_amalgamated.hpp>

#include "helpers.hpp"
#include "ranklab/calpha.hpp"

using namespace ranklab;
using testing_support::explicit_spec;

namespace {

const CAlphaFamily& family_of(const ConstructionSpec& spec) { return std::get<CAlphaFamily>(spec.source); }

}  // namespace

TEST_CASE("alpha = 19 thresholds", "[calpha]") {
    auto r10 = classify_power(Rational(19), 10);
    REQUIRE(r10.conservative);
    REQUIRE(r10.spectral == SpectralType::singular);
    auto r11 = classify_power(Rational(19), 11);
    REQUIRE(r11.conservative);
    REQUIRE(r11.spectral == SpectralType::absolutely_continuous);
    REQUIRE(classify_power(Rational(19), 20).conservative);
    REQUIRE_FALSE(classify_power(Rational(19), 21).conservative);
}

TEST_CASE("measure-preserving base case", "[calpha]") {
    auto r = classify_power(Rational(0), 1);
    REQUIRE(r.conservative);
    REQUIRE(r.spectral == SpectralType::singular);
    REQUIRE(r.conservativity.collapsed == 0);
    REQUIRE(r.singularity.collapsed == 0);
    REQUIRE_FALSE(classify_power(Rational(0), 2).conservative);
}

TEST_CASE("evidence exponents at a fractional alpha", "[calpha]") {
    auto r = classify_power(Rational(1, 2), 2);
    REQUIRE(r.conservativity.exponent == 1);
    REQUIRE(r.conservativity.collapsed == Rational(-1, 2));
    REQUIRE_FALSE(r.conservative);
    REQUIRE(r.absolute_continuity.exponent == 2);
    REQUIRE(r.singularity.exponent == Rational(3, 2));
    REQUIRE(r.spectral == SpectralType::absolutely_continuous);
    REQUIRE_THROWS_AS(classify_power(Rational(-1), 1), Error);
    REQUIRE_THROWS_AS(classify_power(Rational(1), 0), Error);
}

TEST_CASE("stated claims against both exponents", "[calpha]") {
    auto pe = named_family("paper-example");
    auto conflicts = claim_conflicts(family_of(pe));
    REQUIRE(conflicts.size() == 1);
    REQUIRE(conflicts[0].claim.d == 11);
    REQUIRE(conflicts[0].computed.spectral == SpectralType::singular);

    auto fixed = named_family("paper-example-alpha19");
    REQUIRE(claim_conflicts(family_of(fixed)).empty());
    auto rep = classify_power(family_of(fixed), 11);
    REQUIRE(rep.annotations.size() == 1);
}

TEST_CASE("non-summable growth is refused", "[calpha]") {
    CAlphaFamily f;
    f.alpha = 2;
    f.growth = GrowthRule{Growth::polynomial, 2, 1};
    REQUIRE_THROWS_AS(classify_power(f, 1), Error);
    f.growth = GrowthRule{Growth::constant, 3};
    REQUIRE_THROWS_AS(require_calpha(f), Error);
    f.growth = GrowthRule{Growth::exponential, 2};
    REQUIRE_NOTHROW(require_calpha(f));
}

TEST_CASE("exact partial sums", "[calpha]") {
    auto two = [](std::uint64_t) { return BigInt(2); };
    auto s = series_partial_sums(two, Rational(1), 7);
    REQUIRE(s.exact);
    for (std::uint64_t k = 1; k <= 7; ++k) REQUIRE(s.values[k - 1] == Rational(BigInt(k), BigInt(2)));
    auto z = series_partial_sums([](std::uint64_t j) { return factorial(j + 1); }, Rational(0), 9);
    REQUIRE(z.values.back() == 9);
    auto neg = series_partial_sums(two, Rational(-2), 3);
    REQUIRE(neg.values.back() == 12);
}

TEST_CASE("irrational terms carry an error bound", "[calpha]") {
    auto two = [](std::uint64_t) { return BigInt(2); };
    auto s = series_partial_sums(two, Rational(1, 2), 10);
    REQUIRE_FALSE(s.exact);
    Float50 expected = Float50(10) / boost::multiprecision::sqrt(Float50(2));
    REQUIRE(boost::multiprecision::abs(s.approx.back() - expected) <= s.error_bound);
    REQUIRE(s.error_bound < Float50("1e-40"));
}

TEST_CASE("block-collapsed sums at the singular threshold", "[calpha]") {
    const auto spec = named_family("paper-example-alpha19");
    const auto& f = family_of(spec);
    // d = 1 + alpha/2 makes 2d - 2 - alpha = 0: each block contributes 1.
    auto per_block = series_partial_sums([&](std::uint64_t k) { return f.growth.value(k); }, Rational(0), 5);
    auto stages = block_collapsed_sums(f, f.alpha, 5);
    for (std::uint64_t k = 1; k <= 5; ++k) {
        REQUIRE(per_block.values[k - 1] == BigInt(k));
        REQUIRE(stages.values[k - 1] == BigInt(k));
    }
}

TEST_CASE("alpha inference from block lengths", "[calpha]") {
    REQUIRE(infer_alpha(std::vector<RunLength>{{2, 1}, {6, 1}}) == Rational(0));
    REQUIRE(infer_alpha(named_family("paper-example-alpha19")) == Rational(19));
    REQUIRE(infer_alpha(named_family("paper-example")) == Rational(20));
    REQUIRE(infer_alpha(std::vector<RunLength>{{4, 2}, {9, 3}}) == Rational(1, 2));
    REQUIRE_FALSE(infer_alpha(std::vector<RunLength>{{2, 4}, {3, 1}}));
    REQUIRE_FALSE(infer_alpha(named_family("odometer")));
    REQUIRE_THROWS_AS(infer_alpha(std::vector<RunLength>{{2, 1}}), Error);

    // Runs from an explicit list: r = 2 twice, then r = 6 six times.
    std::vector<std::vector<std::uint64_t>> stages(2, std::vector<std::uint64_t>(2, 5));
    for (int i = 0; i < 6; ++i) stages.push_back(std::vector<std::uint64_t>(6, 5));
    REQUIRE(infer_alpha(explicit_spec(1, stages)) == Rational(1));
}

TEST_CASE("spacer rule is Sidon on the first blocks", "[calpha]") {
    const auto spec = named_family("paper-example");
    for (const auto& v : family_sidon_blocks(family_of(spec), spec.h1, 4)) REQUIRE(v.is_sidon);
    CAlphaFamily weak = family_of(spec);
    weak.spacer_base = 1;
    auto vs = family_sidon_blocks(weak, spec.h1, 2);
    REQUIRE(vs[0].is_sidon);
    REQUIRE_FALSE(vs[1].is_sidon);
}
