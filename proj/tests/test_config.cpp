#include <catch_amalgamated.hpp>

#include "helpers.hpp"
#include "ranklab/cache.hpp"
#include "ranklab/config.hpp"

using namespace ranklab;

namespace {

ErrorCode code_of(const std::string& text) {
    try {
        parse_spec(text);
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected a parse error");
    return ErrorCode::io;
}

std::string message_of(const std::string& text) {
    try {
        parse_spec(text);
    } catch (const Error& e) {
        return e.what();
    }
    return {};
}

}  // namespace

TEST_CASE("named families parse to the built-in specs", "[config]") {
    REQUIRE(parse_spec("family: paper-example\n") == named_family("paper-example"));
    auto spec = parse_spec("family: paper-example\n");
    const auto& f = std::get<CAlphaFamily>(spec.source);
    REQUIRE(spec.h1 == 10);
    REQUIRE(f.alpha == 20);
    REQUIRE(f.growth.kind == Growth::factorial);
    REQUIRE(f.spacer_base == 10);
}

TEST_CASE("explicit spec round-trips through canonical text", "[config]") {
    const std::string text = "family: explicit\nh1: 10\nstages:\n  - r: 2\n    spacers: [100, 1000]\n"
                             "  - r: 3\n    spacers: [1, 2, 3]\n";
    auto spec = parse_spec(text);
    REQUIRE(serialize_spec(spec) == text);
    REQUIRE(parse_spec(serialize_spec(spec)) == spec);
    // Flow style and a huge integer parse to the same canonical form.
    auto alt = parse_spec("{family: explicit, h1: 10, stages: [{r: 2, spacers: [100, 1000]}, "
                          "{r: 3, spacers: [1, 2, 3]}]}");
    REQUIRE(serialize_spec(alt) == text);
    auto big = parse_spec("family: explicit\nh1: 123456789012345678901234567890\nstages: []\n");
    REQUIRE(big.h1 == parse_bigint("123456789012345678901234567890"));
    REQUIRE(serialize_spec(big) == "family: explicit\nh1: 123456789012345678901234567890\nstages: []\n");
}

TEST_CASE("calpha and odometer round-trip", "[config]") {
    for (const char* name : {"paper-example", "paper-example-alpha19", "odometer"}) {
        auto spec = named_family(name);
        auto again = parse_spec(serialize_spec(spec));
        REQUIRE(serialize_spec(again) == serialize_spec(spec));
        REQUIRE(spec_hash(again) == spec_hash(spec));
    }
    auto c = parse_spec("family: calpha\nh1: 3\nalpha: 3/2\ngrowth: exponential\ngrowth_base: 3\n"
                        "claims:\n  - {d: 2, property: singular}\n");
    REQUIRE(std::get<CAlphaFamily>(c.source).alpha == Rational(3, 2));
    REQUIRE(parse_spec(serialize_spec(c)) == c);
    REQUIRE(spec_hash(c) != spec_hash(named_family("paper-example")));
}

TEST_CASE("spec diagnostics", "[config]") {
    REQUIRE(code_of("family: nonsense\n") == ErrorCode::invalid_spec);
    REQUIRE(message_of("family: nonsense\n").find("unknown family") != std::string::npos);
    REQUIRE(message_of("family: calpha\nh1: 10\nalpha: 1/0x\n").find("malformed rational") != std::string::npos);
    auto msg = message_of("family: explicit\nh1: 10\nstages:\n  - r: 2\n    spacers: [1, 2]\n"
                          "  - r: 3\n    spacers: [1, 2]\n");
    REQUIRE(msg.find("stage 2") != std::string::npos);
    REQUIRE(msg.find("line 7") != std::string::npos);
    REQUIRE(message_of("family: explicit\nh1: 10\nstagez: []\n").find("unknown key") != std::string::npos);
    REQUIRE(message_of("family: explicit\nh1: -3\nstages: []\n").find("h1") != std::string::npos);
    REQUIRE(code_of("family: [unclosed\n") == ErrorCode::invalid_spec);
    REQUIRE(code_of("family: explicit\nh1: 10\nstages:\n  - r: 2\n    spacers: [1, -2]\n") ==
            ErrorCode::invalid_spec);
}

TEST_CASE("rational and integer parsing", "[config]") {
    REQUIRE(parse_rational("19") == 19);
    REQUIRE(parse_rational("-3/6") == Rational(-1, 2));
    REQUIRE(parse_rational("0.25") == Rational(1, 4));
    REQUIRE_THROWS_AS(parse_rational("1/0"), Error);
    REQUIRE_THROWS_AS(parse_rational("abc"), Error);
    REQUIRE_THROWS_AS(parse_bigint("12x"), Error);
    REQUIRE(to_string(Rational(6, 4)) == "3/2");
    REQUIRE(to_string(Rational(4, 2)) == "2");
}

TEST_CASE("CRC-64 check value", "[config]") {
    REQUIRE(crc64_hex("123456789") == "6c40df5f0b497347");
}

TEST_CASE("stage records round-trip and detect corruption", "[cache]") {
    Construction c(named_family("paper-example"));
    const auto& g = c.stage(3);
    auto text = serialize_geometry(g);
    REQUIRE(parse_geometry(text) == g);

    auto flipped = text;
    flipped[flipped.find("h=") + 2] = '9';
    REQUIRE_THROWS_AS(parse_geometry(flipped), Error);
    REQUIRE_THROWS_AS(parse_geometry(text.substr(0, text.size() / 2)), Error);
    try {
        parse_geometry(flipped);
    } catch (const Error& e) {
        REQUIRE(e.code() == ErrorCode::cache_corrupt);
    }
}

TEST_CASE("disk store serves hits and skips corrupt records", "[cache]") {
    namespace fs = std::filesystem;
    auto root = fs::temp_directory_path() / ("ranklab-cache-test-" + std::to_string(::getpid()));
    fs::remove_all(root);
    auto spec = named_family("paper-example");
    const auto hash = spec_hash(spec);
    {
        auto store = std::make_shared<DiskStageStore>(root, hash);
        Construction c(spec, Limits{}, store);
        c.stage(4);
        REQUIRE(store->writes() == 4);
        REQUIRE(store->hits() == 0);
    }
    {
        auto store = std::make_shared<DiskStageStore>(root, hash, CachePolicy::read_only);
        Construction c(spec, Limits{}, store);
        Construction fresh(spec);
        for (std::uint64_t j = 1; j <= 4; ++j) REQUIRE(c.stage(j) == fresh.stage(j));
        REQUIRE(store->hits() == 4);
        REQUIRE(store->writes() == 0);
    }
    {
        std::ofstream(root / hash / "stage-2.txt", std::ios::app) << "x";
        auto store = std::make_shared<DiskStageStore>(root, hash);
        Construction c(spec, Limits{}, store);
        Construction fresh(spec);
        REQUIRE(c.stage(3) == fresh.stage(3));
        REQUIRE(store->corrupt() == 1);
        REQUIRE(store->problems().size() == 1);
    }
    {
        // Well-formed record with a valid checksum but the wrong height.
        Construction fresh(spec);
        auto bad = fresh.stage(3);
        bad.h += 1;
        std::ofstream(root / hash / "stage-3.txt", std::ios::trunc) << serialize_geometry(bad);
        auto store = std::make_shared<DiskStageStore>(root, hash);
        Construction c(spec, Limits{}, store);
        REQUIRE(c.stage(4) == fresh.stage(4));
        REQUIRE(store->corrupt() == 1);
        REQUIRE(store->hits() == 3);
        REQUIRE(store->problems()[0].find("height") != std::string::npos);
    }
    fs::remove_all(root);
}
