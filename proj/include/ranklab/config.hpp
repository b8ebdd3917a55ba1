#pragma once

#include <yaml-cpp/yaml.h>

#include <boost/crc.hpp>

#include <cstdint>
#include <cstdio>
#include <set>
#include <sstream>
#include <string>
#include <string_view>

#include "ranklab/construction.hpp"

namespace ranklab {

// CRC-64/ECMA-182.
using Crc64 = boost::crc_optimal<64, 0x42F0E1EBA9EA3693ULL, 0, 0, false, false>;

inline std::string crc64_hex(std::string_view data) {
    Crc64 crc;
    crc.process_bytes(data.data(), data.size());
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(crc.checksum()));
    return buf;
}

namespace detail {

inline std::string where(const YAML::Node& n, const std::string& field) {
    auto mark = n.Mark();
    std::string loc = mark.line >= 0 ? "line " + std::to_string(mark.line + 1) + ", col " +
                                           std::to_string(mark.column + 1) + ": "
                                     : "";
    return loc + "field '" + field + "'";
}

[[noreturn]] inline void fail(const YAML::Node& n, const std::string& field, const std::string& msg,
                              std::optional<std::uint64_t> stage = std::nullopt) {
    throw Error(ErrorCode::invalid_spec, where(n, field) + ": " + msg, stage);
}

inline std::string scalar(const YAML::Node& n, const std::string& field) {
    if (!n.IsScalar()) fail(n, field, "expected a scalar");
    return n.Scalar();
}

inline BigInt big(const YAML::Node& n, const std::string& field) {
    try {
        return parse_bigint(scalar(n, field));
    } catch (const Error& e) {
        fail(n, field, e.what());
    }
}

inline std::uint64_t u64(const YAML::Node& n, const std::string& field) {
    BigInt v = big(n, field);
    if (v < 0 || v > BigInt(std::numeric_limits<std::uint64_t>::max())) fail(n, field, "out of range");
    return static_cast<std::uint64_t>(v);
}

inline Rational rational(const YAML::Node& n, const std::string& field) {
    try {
        return parse_rational(scalar(n, field));
    } catch (const Error& e) {
        fail(n, field, std::string("malformed rational: ") + e.what());
    }
}

inline bool boolean(const YAML::Node& n, const std::string& field) {
    std::string s = scalar(n, field);
    if (s == "true" || s == "yes" || s == "1") return true;
    if (s == "false" || s == "no" || s == "0") return false;
    fail(n, field, "expected true or false");
}

inline void only_keys(const YAML::Node& map, const std::set<std::string>& allowed, const std::string& ctx) {
    if (!map.IsMap()) fail(map, ctx, "expected a mapping");
    for (const auto& kv : map) {
        std::string key = kv.first.as<std::string>();
        if (!allowed.count(key)) fail(kv.first, ctx.empty() ? key : ctx + "." + key, "unknown key");
    }
}

inline YAML::Node load_yaml(const std::string& text) {
    try {
        return YAML::Load(text);
    } catch (const YAML::Exception& e) {
        throw Error(ErrorCode::invalid_spec, "line " + std::to_string(e.mark.line + 1) + ", col " +
                                                 std::to_string(e.mark.column + 1) + ": " + e.msg);
    }
}

inline Growth parse_growth(const YAML::Node& n) {
    std::string s = scalar(n, "growth");
    for (Growth g : {Growth::factorial, Growth::exponential, Growth::superexponential, Growth::polynomial,
                     Growth::constant})
        if (s == to_string(g)) return g;
    fail(n, "growth", "unknown growth rule '" + s + "'");
}

inline ClaimedProperty parse_property(const YAML::Node& n, const std::string& field) {
    std::string s = scalar(n, field);
    for (ClaimedProperty p : {ClaimedProperty::singular, ClaimedProperty::absolutely_continuous,
                              ClaimedProperty::conservative, ClaimedProperty::dissipative})
        if (s == to_string(p)) return p;
    fail(n, field, "unknown property '" + s + "'");
}

}  // namespace detail

/// Builds a spec from a parsed mapping; see README for the grammar.
inline ConstructionSpec spec_from_yaml(const YAML::Node& root) {
    using namespace detail;
    if (!root.IsMap()) throw Error(ErrorCode::invalid_spec, "construction spec must be a mapping");
    if (!root["family"]) fail(root, "family", "missing");
    std::string family = scalar(root["family"], "family");

    ConstructionSpec spec;
    if (family == "explicit") {
        only_keys(root, {"family", "h1", "stages"}, "");
        spec.family = family;
        if (!root["h1"]) fail(root, "h1", "missing");
        spec.h1 = big(root["h1"], "h1");
        ExplicitStages ex;
        const auto& stages = root["stages"];
        if (stages) {
            if (!stages.IsSequence()) fail(stages, "stages", "expected a list");
            for (std::size_t i = 0; i < stages.size(); ++i) {
                const auto& st = stages[i];
                std::string ctx = "stages[" + std::to_string(i + 1) + "]";
                only_keys(st, {"r", "spacers"}, ctx);
                if (!st["r"]) fail(st, ctx + ".r", "missing", i + 1);
                if (!st["spacers"]) fail(st, ctx + ".spacers", "missing", i + 1);
                StageParams p;
                p.r = u64(st["r"], ctx + ".r");
                if (p.r < 1) fail(st["r"], ctx + ".r", "r must be >= 1", i + 1);
                const auto& sp = st["spacers"];
                if (!sp.IsSequence()) fail(sp, ctx + ".spacers", "expected a list", i + 1);
                for (std::size_t k = 0; k < sp.size(); ++k) {
                    BigInt v = big(sp[k], ctx + ".spacers");
                    if (v < 0) fail(sp[k], ctx + ".spacers", "spacers must be >= 0", i + 1);
                    p.spacers.push_back(v);
                }
                if (p.spacers.size() != p.r)
                    fail(sp, ctx + ".spacers",
                         "stage " + std::to_string(i + 1) + " lists " + std::to_string(p.spacers.size()) +
                             " spacers but r = " + std::to_string(p.r),
                         i + 1);
                ex.stages.push_back(std::move(p));
            }
        }
        spec.source = std::move(ex);
    } else if (family == "odometer") {
        only_keys(root, {"family", "h1", "r"}, "");
        spec.family = family;
        spec.h1 = root["h1"] ? big(root["h1"], "h1") : BigInt(1);
        OdometerFamily o;
        if (root["r"]) o.r = u64(root["r"], "r");
        if (o.r < 1) fail(root["r"], "r", "r must be >= 1");
        spec.source = o;
    } else if (family == "calpha") {
        only_keys(root, {"family", "h1", "alpha", "growth", "growth_base", "growth_power", "spacer_base", "claims"},
                  "");
        spec.family = family;
        if (!root["h1"]) fail(root, "h1", "missing");
        spec.h1 = big(root["h1"], "h1");
        CAlphaFamily f;
        if (!root["alpha"]) fail(root, "alpha", "missing");
        f.alpha = rational(root["alpha"], "alpha");
        if (f.alpha < 0) fail(root["alpha"], "alpha", "alpha must be >= 0");
        if (root["growth"]) f.growth.kind = parse_growth(root["growth"]);
        if (root["growth_base"]) f.growth.base = u64(root["growth_base"], "growth_base");
        if (root["growth_power"]) f.growth.power = u64(root["growth_power"], "growth_power");
        if (root["spacer_base"]) f.spacer_base = u64(root["spacer_base"], "spacer_base");
        if (const auto& claims = root["claims"]) {
            if (!claims.IsSequence()) fail(claims, "claims", "expected a list");
            for (std::size_t i = 0; i < claims.size(); ++i) {
                std::string ctx = "claims[" + std::to_string(i + 1) + "]";
                only_keys(claims[i], {"d", "property", "label"}, ctx);
                Claim c;
                if (!claims[i]["d"] || !claims[i]["property"]) fail(claims[i], ctx, "needs d and property");
                c.d = u64(claims[i]["d"], ctx + ".d");
                c.property = parse_property(claims[i]["property"], ctx + ".property");
                if (claims[i]["label"]) c.label = scalar(claims[i]["label"], ctx + ".label");
                f.claims.push_back(std::move(c));
            }
        }
        spec.source = std::move(f);
    } else {
        only_keys(root, {"family"}, "");
        try {
            spec = named_family(family);
        } catch (const Error& e) {
            fail(root["family"], "family", e.what());
        }
    }
    try {
        spec.validate();
    } catch (const Error& e) {
        fail(root, "spec", e.what(), e.stage());
    }
    return spec;
}

inline ConstructionSpec parse_spec(const std::string& text) { return spec_from_yaml(detail::load_yaml(text)); }

/// Canonical text: fixed key order, plain decimal integers, "p/q" rationals.
inline std::string serialize_spec(const ConstructionSpec& spec) {
    std::ostringstream os;
    os << "family: " << spec.family << "\n";
    if (auto e = std::get_if<ExplicitStages>(&spec.source)) {
        os << "h1: " << spec.h1 << "\n";
        os << "stages:\n";
        if (e->stages.empty()) {
            std::string s = os.str();
            return s.substr(0, s.size() - 1) + " []\n";
        }
        for (const auto& st : e->stages) {
            os << "  - r: " << st.r << "\n    spacers: [";
            for (std::size_t i = 0; i < st.spacers.size(); ++i) os << (i ? ", " : "") << st.spacers[i];
            os << "]\n";
        }
    } else if (spec.family == "odometer") {
        const auto& o = std::get<OdometerFamily>(spec.source);
        os << "h1: " << spec.h1 << "\n";
        os << "r: " << o.r << "\n";
    } else if (spec.family == "calpha") {
        const auto& f = std::get<CAlphaFamily>(spec.source);
        os << "h1: " << spec.h1 << "\n";
        os << "alpha: \"" << to_string(f.alpha) << "\"\n";
        os << "growth: " << to_string(f.growth.kind) << "\n";
        os << "growth_base: " << f.growth.base << "\n";
        os << "growth_power: " << f.growth.power << "\n";
        os << "spacer_base: " << f.spacer_base << "\n";
        if (!f.claims.empty()) {
            os << "claims:\n";
            for (const auto& c : f.claims) {
                os << "  - d: " << c.d << "\n    property: " << to_string(c.property) << "\n";
                if (!c.label.empty()) os << "    label: \"" << c.label << "\"\n";
            }
        }
    }
    return os.str();
}

inline std::string spec_hash(const ConstructionSpec& spec) { return crc64_hex(serialize_spec(spec)); }

}  // namespace ranklab
