#pragma once

#include <algorithm>
#include <cstdint>
#include <memory>
#include <optional>
#include <random>
#include <variant>
#include <vector>

#include "ranklab/construction.hpp"
#include "ranklab/spectral.hpp"

namespace ranklab {

/// Digits i_j for j >= first_stage, in order. Exhausting the list halts.
struct ExplicitDigits {
    std::uint64_t first_stage = 1;
    std::vector<std::uint64_t> digits;

    friend bool operator==(const ExplicitDigits&, const ExplicitDigits&) = default;
};

struct ConstantDigit {
    std::uint64_t value = 1;

    friend bool operator==(const ConstantDigit&, const ConstantDigit&) = default;
};

/// i_j = 1 + (x mod r_j) where x is the first output of mt19937_64 seeded
/// from (seed, j). Pure in j, so every stage resolves the same way however
/// the orbit reaches it.
struct SeededDigits {
    std::uint64_t seed = 0;

    friend bool operator==(const SeededDigits&, const SeededDigits&) = default;
};

using DigitProvider = std::variant<ExplicitDigits, ConstantDigit, SeededDigits>;

inline std::uint64_t digit_at(const DigitProvider& p, std::uint64_t j, std::uint64_t r) {
    if (auto e = std::get_if<ExplicitDigits>(&p)) {
        if (j < e->first_stage || j - e->first_stage >= e->digits.size())
            throw Error(ErrorCode::digit_exhausted,
                        "digit list exhausted: stage " + std::to_string(j) + " needs a column digit", j);
        std::uint64_t d = e->digits[j - e->first_stage];
        if (d < 1 || d > r)
            throw Error(ErrorCode::invalid_spec,
                        "digit " + std::to_string(d) + " out of range 1.." + std::to_string(r) + " at stage " +
                            std::to_string(j),
                        j);
        return d;
    }
    if (auto c = std::get_if<ConstantDigit>(&p)) {
        if (c->value < 1 || c->value > r)
            throw Error(ErrorCode::invalid_spec,
                        "constant digit " + std::to_string(c->value) + " out of range at stage " + std::to_string(j), j);
        return c->value;
    }
    const auto& s = std::get<SeededDigits>(p);
    std::seed_seq seq{static_cast<std::uint32_t>(s.seed), static_cast<std::uint32_t>(s.seed >> 32),
                      static_cast<std::uint32_t>(j), static_cast<std::uint32_t>(j >> 32)};
    std::mt19937_64 eng(seq);
    return 1 + eng() % r;
}

/// A point of X addressed by (stage, level) plus the column digits of every
/// higher stage, supplied on demand.
struct OrbitPoint {
    std::uint64_t stage = 1;
    BigInt level = 0;
    std::shared_ptr<const DigitProvider> digits = std::make_shared<const DigitProvider>(ConstantDigit{1});
};

inline OrbitPoint make_point(std::uint64_t stage, BigInt level, DigitProvider digits) {
    return OrbitPoint{stage, std::move(level), std::make_shared<const DigitProvider>(std::move(digits))};
}

struct OrbitLimits {
    std::uint64_t max_lift = 512;  // stages a single iterate may climb
};

/// Re-addresses p one stage up: level' = o_K(i_K) + level.
inline OrbitPoint lift(const Construction& c, OrbitPoint p) {
    const auto& g = c.cut(p.stage);
    std::uint64_t i = digit_at(*p.digits, p.stage, g.r());
    p.level += g.offsets[i - 1];
    ++p.stage;
    return p;
}

inline OrbitPoint reexpress(const Construction& c, OrbitPoint p, std::uint64_t stage) {
    while (p.stage < stage) p = lift(c, std::move(p));
    return p;
}

/// T^m p. Inside a tower T^m is level addition; when the move does not fit
/// the point is lifted until it does.
inline OrbitPoint iterate(const Construction& c, OrbitPoint p, const BigInt& m, const OrbitLimits& lim = {}) {
    const std::uint64_t start = p.stage;
    for (;;) {
        BigInt target = p.level + m;
        if (target >= 0 && target < c.height(p.stage)) {
            p.level = std::move(target);
            return p;
        }
        if (p.stage - start >= lim.max_lift) {
            if (m < 0)
                throw Error(ErrorCode::left_space,
                            "left the materialized space: no column below the point up to stage " +
                                std::to_string(p.stage),
                            p.stage);
            throw Error(ErrorCode::too_large, "iterate climbed past the stage cap", p.stage);
        }
        p = lift(c, std::move(p));
    }
}

inline OrbitPoint step(const Construction& c, OrbitPoint p) { return iterate(c, std::move(p), 1); }
inline OrbitPoint inverse_step(const Construction& c, OrbitPoint p) { return iterate(c, std::move(p), -1); }

/// Same point of X: equal level once both are expressed at a common stage.
inline bool same_point(const Construction& c, const OrbitPoint& a, const OrbitPoint& b) {
    if (!(*a.digits == *b.digits)) return false;
    std::uint64_t k = std::max(a.stage, b.stage);
    return reexpress(c, a, k).level == reexpress(c, b, k).level;
}

/// Level of p inside tower J, or nullopt when p lies on a spacer added
/// after stage J (i.e. outside X_J).
inline std::optional<BigInt> level_at_stage(const Construction& c, const OrbitPoint& p, std::uint64_t J) {
    if (p.stage <= J) return reexpress(c, p, J).level;
    BigInt level = p.level;
    for (std::uint64_t t = p.stage - 1; t >= J; --t) {
        const auto& g = c.cut(t);
        auto it = std::upper_bound(g.offsets.begin(), g.offsets.end(), level);
        const BigInt& o = *std::prev(it);
        if (level - o >= g.h) return std::nullopt;
        level -= o;
        if (t == J) break;
    }
    return level;
}

/// Component-wise action of the d-fold product.
inline std::vector<OrbitPoint> product_iterate(const Construction& c, std::vector<OrbitPoint> points, const BigInt& m,
                                               const OrbitLimits& lim = {}) {
    if (points.empty()) throw Error(ErrorCode::invalid_spec, "product needs d >= 1 points");
    for (auto& p : points) p = iterate(c, std::move(p), m, lim);
    return points;
}

/// A finite union of levels of tower `stage`.
struct LevelSet {
    std::uint64_t stage = 1;
    std::vector<BigInt> levels;  // sorted, distinct

    Rational measure(const Construction& c) const { return Rational(BigInt(levels.size())) * c.stage(stage).w; }
};

inline void validate(const Construction& c, const LevelSet& a) {
    const BigInt& h = c.height(a.stage);
    for (std::size_t i = 0; i < a.levels.size(); ++i) {
        if (a.levels[i] < 0 || a.levels[i] >= h)
            throw Error(ErrorCode::invalid_spec, "level " + a.levels[i].str() + " outside tower", a.stage);
        if (i && a.levels[i] <= a.levels[i - 1])
            throw Error(ErrorCode::invalid_spec, "levels must be sorted and distinct", a.stage);
    }
}

/// The same set in tower stage + 1.
inline LevelSet lift(const Construction& c, const LevelSet& a, std::uint64_t cap) {
    const auto& g = c.cut(a.stage);
    if (BigInt(a.levels.size()) * g.r() > BigInt(cap))
        throw Error(ErrorCode::too_large, "level set exceeds the enumeration cap", a.stage + 1);
    LevelSet out{a.stage + 1, {}};
    out.levels.reserve(a.levels.size() * g.r());
    for (const auto& o : g.offsets)
        for (const auto& l : a.levels) out.levels.push_back(o + l);
    return out;
}

struct ReturnStatistics {
    std::uint64_t stage = 1;       // tower where the counts were taken
    bool exact = true;             // max level + M < h at that stage
    Rational measure;              // mu(A)
    std::vector<Rational> overlap; // mu(A n T^-m A), m = 0..M, realized inside the tower
    std::vector<Rational> proportion;  // (overlap / mu(A))^d
};

/// Proportion of A^d returning to A^d at each time m <= M under the d-fold
/// product. A is lifted until its tower satisfies h >= max level + M.
inline ReturnStatistics return_statistics(const Construction& c, LevelSet a, std::uint64_t d, std::uint64_t M) {
    if (d < 1) throw Error(ErrorCode::invalid_spec, "power d must be >= 1");
    if (a.levels.empty()) throw Error(ErrorCode::invalid_spec, "empty level set");
    validate(c, a);
    // Spacer-free towers never fit (the top level stays h - 1); stop at the
    // cap and report stage-resolution counts.
    const std::uint64_t cap = c.limits().max_enumeration;
    while (c.height(a.stage) < a.levels.back() + M) {
        const auto& g = c.stage(a.stage);
        if (!g.has_cut() || BigInt(a.levels.size()) * g.r() > BigInt(cap)) break;
        a = lift(c, a, cap);
    }

    ReturnStatistics out;
    out.stage = a.stage;
    out.exact = a.levels.back() + M < c.height(a.stage);
    const Rational w = c.stage(a.stage).w;
    out.measure = Rational(BigInt(a.levels.size())) * w;
    auto counts = pair_counts(a.levels, M);
    for (std::uint64_t m = 0; m <= M; ++m) {
        Rational ov = Rational(counts[m]) * w;
        Rational ratio = ov / out.measure;
        Rational pw = 1;
        for (std::uint64_t i = 0; i < d; ++i) pw *= ratio;
        out.overlap.push_back(ov);
        out.proportion.push_back(pw);
    }
    return out;
}

}  // namespace ranklab
