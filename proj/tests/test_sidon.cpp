#include <catch_amalgamated.hpp>

#include <random>

#include "helpers.hpp"
#include "ranklab/sidon.hpp"

using namespace ranklab;
using testing_support::explicit_spec;
using testing_support::odometer;

namespace {

bool brute_sidon(const Construction& c, std::uint64_t j) {
    const auto& g = c.cut(j);
    OverlapOracle oracle(g, g.next_height());
    const auto h = static_cast<std::uint64_t>(g.h), top = static_cast<std::uint64_t>(g.next_height());
    for (std::uint64_t m = h + 1; m <= top; ++m)
        if (oracle.columns_met(m, 2).size() > 1) return false;
    return true;
}

void require_valid_witness(const Construction& c, const SidonVerdict& v) {
    REQUIRE(v.witness);
    const auto& w = *v.witness;
    const auto& g = c.cut(v.j);
    REQUIRE(w.m > g.h);
    REQUIRE(w.m <= g.next_height());
    REQUIRE(w.first.to != w.second.to);
    for (const auto& p : {w.first, w.second}) {
        BigInt d = g.offsets[p.to - 1] - g.offsets[p.from - 1];
        REQUIRE(abs(d - w.m) < g.h);
    }
    auto met = brute_force_overlap(c, v.j, w.m);
    REQUIRE(met.size() >= 2);
    REQUIRE(met.count(w.first.to));
    REQUIRE(met.count(w.second.to));
}

}  // namespace

TEST_CASE("a single copy pair is always Sidon", "[sidon]") {
    Construction c(explicit_spec(10, {{0, 0}}));
    auto v = check_stage(c.cut(1), c.stage(2));
    REQUIRE(v.is_sidon);
    REQUIRE_FALSE(v.margin);
}

TEST_CASE("well separated differences", "[sidon]") {
    Construction c(explicit_spec(10, {{100, 1110, 0}}));
    REQUIRE(c.stage(1).offsets == std::vector<BigInt>{0, 110, 1230});
    auto v = check_stage(c.cut(1), c.stage(2));
    REQUIRE(v.is_sidon);
    // Sorted differences 110, 1120, 1230: gaps 1010 and 110.
    REQUIRE(v.margin == BigInt(110 - 20));
    REQUIRE(brute_sidon(c, 1));
}

TEST_CASE("coinciding differences give a witness", "[sidon]") {
    Construction c(explicit_spec(2, {{0, 0, 0}}));
    auto v = check_stage(c.cut(1), c.stage(2));
    REQUIRE_FALSE(v.is_sidon);
    REQUIRE(v.witness->m == 3);
    require_valid_witness(c, v);
    REQUIRE(brute_force_overlap(c, 1, 3) == std::set<std::uint64_t>{2, 3});
}

TEST_CASE("brute-force overlap examples", "[sidon]") {
    Construction od(odometer());
    REQUIRE(od.height(2) == 2);
    REQUIRE(brute_force_overlap(od, 2, 3) == std::set<std::uint64_t>{2});
    // m = h_{j+1} pushes everything past the top.
    REQUIRE(brute_force_overlap(od, 2, 4).empty());
    Construction pe(explicit_spec(10, {{100, 1000}}));
    REQUIRE(brute_force_overlap(pe, 1, 500).empty());
    REQUIRE(brute_force_overlap(pe, 1, 105) == std::set<std::uint64_t>{2});
    REQUIRE_THROWS_AS(brute_force_overlap(pe, 1, 10), Error);
    REQUIRE_THROWS_AS(brute_force_overlap(pe, 1, 1121), Error);
}

TEST_CASE("construction-level checks", "[sidon]") {
    Construction pe(named_family("paper-example"));
    auto vs = check_construction(pe, 2);
    REQUIRE(vs.size() == 2);
    REQUIRE_FALSE(first_failure(vs));

    // Two columns per stage: one pair, so the binary odometer is Sidon.
    Construction od(odometer());
    for (std::uint64_t j = 1; j <= 3; ++j) REQUIRE(brute_sidon(od, j));
    REQUIRE_FALSE(first_failure(check_construction(od, 3)));

    // Three columns: stage 1 has h = 1 so all windows are points; stage 2 collides.
    Construction od3(odometer(3));
    auto v3 = check_construction(od3, 3);
    REQUIRE(v3[0].is_sidon);
    REQUIRE_FALSE(v3[1].is_sidon);
    REQUIRE(first_failure(v3)->j == 2);
    require_valid_witness(od3, v3[1]);

    Construction single(explicit_spec(3, {{1, 2}}));
    REQUIRE(check_construction(single, 1).size() == 1);
    REQUIRE_THROWS_AS(check_construction(single, 2), Error);
}

TEST_CASE("pair cap refuses huge stages", "[sidon]") {
    std::vector<std::uint64_t> s(100, 1000);
    Construction c(explicit_spec(1, {s}));
    REQUIRE_THROWS_AS(check_stage(c.cut(1), c.stage(2), 100), Error);
}

TEST_CASE("window predicate agrees with enumeration exhaustively", "[sidon]") {
    std::size_t cases = 0;
    for (std::uint64_t h = 1; h <= 4; ++h)
        for (std::uint64_t r = 2; r <= 4; ++r) {
            std::vector<std::uint64_t> s(r, 0);
            const std::uint64_t top = r == 4 ? 4 : 7;
            for (;;) {
                Construction c(explicit_spec(h, {s}));
                auto v = check_stage(c.cut(1), c.stage(2));
                REQUIRE(v.is_sidon == brute_sidon(c, 1));
                if (!v.is_sidon) require_valid_witness(c, v);
                ++cases;
                std::size_t k = 0;
                while (k < r && ++s[k] > top) s[k++] = 0;
                if (k == r) break;
            }
        }
    REQUIRE(cases > 1000);
}

TEST_CASE("a uniform spacer increase keeps three-column stages Sidon", "[sidon]") {
    std::mt19937_64 rng(7);
    int sidon_cases = 0;
    for (int trial = 0; trial < 2000; ++trial) {
        std::uint64_t h = 1 + rng() % 6;
        std::vector<std::uint64_t> s(2 + rng() % 2);
        for (auto& v : s) v = rng() % 20;
        Construction c(explicit_spec(h, {s}));
        if (!check_stage(c.cut(1), c.stage(2)).is_sidon) continue;
        ++sidon_cases;
        auto bigger = s;
        std::uint64_t delta = 2 * h + rng() % 10;
        for (auto& v : bigger) v += delta;
        Construction d(explicit_spec(h, {bigger}));
        REQUIRE(check_stage(d.cut(1), d.stage(2)).is_sidon);
        REQUIRE(brute_sidon(d, 1));
    }
    REQUIRE(sidon_cases > 100);
}

TEST_CASE("a uniform spacer increase can break a four-column stage", "[sidon]") {
    // Offsets (0,1,3,8): differences all distinct. Adding 2 gives (0,3,7,14)
    // where 7 - 0 and 14 - 7 collide with different targets.
    Construction before(explicit_spec(1, {{0, 1, 4, 0}}));
    REQUIRE(check_stage(before.cut(1), before.stage(2)).is_sidon);
    REQUIRE(brute_sidon(before, 1));
    Construction after(explicit_spec(1, {{2, 3, 6, 2}}));
    auto v = check_stage(after.cut(1), after.stage(2));
    REQUIRE_FALSE(v.is_sidon);
    REQUIRE(v.witness->m == 7);
    require_valid_witness(after, v);
}

TEST_CASE("close differences sharing a target stay Sidon", "[sidon]") {
    // Differences 1010 and 1020 are closer than 2h but both windows end in
    // copy 3, so no shift meets two columns even though the margin is negative.
    Construction c(explicit_spec(10, {{0, 1000, 0}}));
    auto v = check_stage(c.cut(1), c.stage(2));
    REQUIRE(v.is_sidon);
    REQUIRE(brute_sidon(c, 1));
    REQUIRE(v.margin == BigInt(-10));
}
