#pragma once

#include <algorithm>
#include <cstdint>
#include <deque>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <variant>
#include <vector>

#include "ranklab/error.hpp"
#include "ranklab/numeric.hpp"

namespace ranklab {

/// Cut count and spacer vector of one stage.
struct StageParams {
    std::uint64_t r = 0;
    std::vector<BigInt> spacers;

    friend bool operator==(const StageParams&, const StageParams&) = default;
};

/// Finite list of stages; stage j uses stages[j - 1].
struct ExplicitStages {
    std::vector<StageParams> stages;

    friend bool operator==(const ExplicitStages&, const ExplicitStages&) = default;
};

/// Constant cut count, no spacers.
struct OdometerFamily {
    std::uint64_t r = 2;

    friend bool operator==(const OdometerFamily&, const OdometerFamily&) = default;
};

enum class Growth { factorial, exponential, superexponential, polynomial, constant };

/// Rule for the block values r_{j(k)}, k >= 1.
///   factorial        (k+1)!
///   exponential      base^k
///   superexponential base^(k^2)
///   polynomial       (k+1)^power
///   constant         base
struct GrowthRule {
    Growth kind = Growth::factorial;
    std::uint64_t base = 2;
    std::uint64_t power = 1;

    BigInt value(std::uint64_t k) const {
        switch (kind) {
        case Growth::factorial: return factorial(k + 1);
        case Growth::exponential: return ipow(BigInt(base), k);
        case Growth::superexponential: return ipow(BigInt(base), k * k);
        case Growth::polynomial: return ipow(BigInt(k + 1), power);
        case Growth::constant: return BigInt(base);
        }
        return BigInt(0);
    }

    // Sum_k r^-delta < inf for every delta > 0 holds exactly when r_k grows
    // at least geometrically; the first three rules do, the last two do not.
    bool summable() const {
        switch (kind) {
        case Growth::factorial: return true;
        case Growth::exponential:
        case Growth::superexponential: return base >= 2;
        case Growth::polynomial:
        case Growth::constant: return false;
        }
        return false;
    }

    friend bool operator==(const GrowthRule&, const GrowthRule&) = default;
};

inline const char* to_string(Growth g) {
    switch (g) {
    case Growth::factorial: return "factorial";
    case Growth::exponential: return "exponential";
    case Growth::superexponential: return "superexponential";
    case Growth::polynomial: return "polynomial";
    case Growth::constant: return "constant";
    }
    return "?";
}

enum class ClaimedProperty { singular, absolutely_continuous, conservative, dissipative };

inline const char* to_string(ClaimedProperty p) {
    switch (p) {
    case ClaimedProperty::singular: return "singular";
    case ClaimedProperty::absolutely_continuous: return "absolutely_continuous";
    case ClaimedProperty::conservative: return "conservative";
    case ClaimedProperty::dissipative: return "dissipative";
    }
    return "?";
}

/// A property a named family is stated to have for the power d.
struct Claim {
    std::uint64_t d = 1;
    ClaimedProperty property = ClaimedProperty::singular;
    std::string label;

    friend bool operator==(const Claim&, const Claim&) = default;
};

/// One block [start, start + length) of constant cut count r.
struct Block {
    std::uint64_t k = 1;
    BigInt r;
    BigInt start;
    BigInt length;
};

/// Block-constant family: r_j = r_{j(k)} on block k, block lengths
/// floor(r_{j(k)}^alpha), j(1) = 1, spacers s_j(i) = spacer_base^i * h_j.
struct CAlphaFamily {
    Rational alpha = 0;
    GrowthRule growth;
    std::uint64_t spacer_base = 10;
    std::vector<Claim> claims;

    Block block(std::uint64_t k) const {
        if (k == 0) throw Error(ErrorCode::invalid_spec, "block index starts at 1");
        BigInt start = 1;
        for (std::uint64_t m = 1; m < k; ++m) start += floor_pow(growth.value(m), alpha);
        BigInt r = growth.value(k);
        return Block{k, r, start, floor_pow(r, alpha)};
    }

    /// Block containing stage j.
    Block block_of_stage(std::uint64_t j) const {
        BigInt start = 1;
        for (std::uint64_t k = 1;; ++k) {
            BigInt r = growth.value(k);
            BigInt len = floor_pow(r, alpha);
            if (len == 0) throw Error(ErrorCode::invalid_spec, "empty block", j);
            if (BigInt(j) < start + len) return Block{k, r, start, len};
            start += len;
        }
    }

    friend bool operator==(const CAlphaFamily&, const CAlphaFamily&) = default;
};

using StageSource = std::variant<ExplicitStages, OdometerFamily, CAlphaFamily>;

struct ConstructionSpec {
    std::string family = "explicit";  // "explicit", "odometer", "calpha" or a named family
    BigInt h1 = 1;
    StageSource source = ExplicitStages{};

    friend bool operator==(const ConstructionSpec&, const ConstructionSpec&) = default;

    /// Number of stages with parameters; nullopt for infinite families.
    std::optional<std::uint64_t> stage_count() const {
        if (auto e = std::get_if<ExplicitStages>(&source)) return e->stages.size();
        return std::nullopt;
    }

    /// True when min_{i<r} s_j(i) is nondecreasing in j for every stage.
    bool spacer_floor_nondecreasing() const {
        return !std::holds_alternative<ExplicitStages>(source);
    }

    /// Parameters of stage j given its height h_j.
    StageParams params(std::uint64_t j, const BigInt& h_j, std::uint64_t max_columns) const {
        if (j == 0) throw Error(ErrorCode::stage_unavailable, "stage indices start at 1", j);
        if (auto e = std::get_if<ExplicitStages>(&source)) {
            if (j > e->stages.size())
                throw Error(ErrorCode::stage_unavailable,
                            "spec defines parameters for stages 1.." + std::to_string(e->stages.size()) +
                                " only; stage " + std::to_string(j) + " requested",
                            j);
            return e->stages[j - 1];
        }
        if (auto o = std::get_if<OdometerFamily>(&source)) {
            return StageParams{o->r, std::vector<BigInt>(o->r, BigInt(0))};
        }
        const auto& fam = std::get<CAlphaFamily>(source);
        Block b = fam.block_of_stage(j);
        if (b.r > BigInt(max_columns))
            throw Error(ErrorCode::too_large,
                        "stage " + std::to_string(j) + " has r = " + b.r.str() + " columns, above the cap of " +
                            std::to_string(max_columns),
                        j);
        StageParams p;
        p.r = static_cast<std::uint64_t>(b.r);
        p.spacers.reserve(p.r);
        BigInt factor = fam.spacer_base;
        for (std::uint64_t i = 1; i <= p.r; ++i, factor *= fam.spacer_base) p.spacers.push_back(factor * h_j);
        return p;
    }

    /// Structural checks; throws invalid_spec naming the offending stage.
    void validate() const {
        if (h1 < 1) throw Error(ErrorCode::invalid_spec, "h1 must be a positive integer");
        if (auto e = std::get_if<ExplicitStages>(&source)) {
            for (std::size_t i = 0; i < e->stages.size(); ++i) {
                const auto& st = e->stages[i];
                std::uint64_t j = i + 1;
                if (st.r < 1) throw Error(ErrorCode::invalid_spec, "stage " + std::to_string(j) + ": r must be >= 1", j);
                if (st.spacers.size() != st.r)
                    throw Error(ErrorCode::invalid_spec,
                                "stage " + std::to_string(j) + ": spacer vector has " +
                                    std::to_string(st.spacers.size()) + " entries, expected r = " +
                                    std::to_string(st.r),
                                j);
                for (const auto& s : st.spacers)
                    if (s < 0)
                        throw Error(ErrorCode::invalid_spec, "stage " + std::to_string(j) + ": negative spacer", j);
            }
        } else if (auto o = std::get_if<OdometerFamily>(&source)) {
            if (o->r < 1) throw Error(ErrorCode::invalid_spec, "odometer r must be >= 1");
        } else {
            const auto& f = std::get<CAlphaFamily>(source);
            if (f.alpha < 0) throw Error(ErrorCode::invalid_spec, "alpha must be >= 0");
            if (f.spacer_base < 1) throw Error(ErrorCode::invalid_spec, "spacer_base must be >= 1");
            if (f.growth.value(1) < 1) throw Error(ErrorCode::invalid_spec, "growth rule yields r < 1");
        }
    }
};

/// Geometry of tower j together with how it is cut into tower j + 1.
/// `spacers` and `offsets` are empty when the spec has no parameters for
/// stage j (the top tower of a finite spec).
struct StageGeometry {
    std::uint64_t j = 1;
    BigInt h;
    Rational w;
    std::vector<BigInt> spacers;
    std::vector<BigInt> offsets;

    friend bool operator==(const StageGeometry&, const StageGeometry&) = default;

    bool has_cut() const { return !offsets.empty(); }
    std::uint64_t r() const { return offsets.size(); }

    BigInt next_height() const {
        if (!has_cut()) throw Error(ErrorCode::stage_unavailable, "stage has no cut parameters", j);
        return offsets.back() + h + spacers.back();
    }

    /// min over i < r of s_j(i); nullopt when r = 1 (no gap between copies).
    std::optional<BigInt> min_gap_spacer() const {
        if (r() < 2) return std::nullopt;
        return *std::min_element(spacers.begin(), spacers.end() - 1);
    }
};

/// Fills in offsets o(1) = 0, o(i+1) = o(i) + h + s(i).
inline void apply_cut(StageGeometry& g, StageParams p) {
    if (p.r < 1 || p.spacers.size() != p.r)
        throw Error(ErrorCode::invalid_spec, "stage " + std::to_string(g.j) + ": spacer vector length must equal r", g.j);
    g.offsets.clear();
    g.offsets.reserve(p.r);
    BigInt o = 0;
    for (std::uint64_t i = 0; i < p.r; ++i) {
        g.offsets.push_back(o);
        o += g.h + p.spacers[i];
    }
    g.spacers = std::move(p.spacers);
}

struct Limits {
    std::uint64_t max_columns = 1u << 20;      // r_j above this is refused
    std::uint64_t max_enumeration = 1u << 22;  // enumerated level sets above this are refused
};

inline StageGeometry first_stage(const ConstructionSpec& spec, const Limits& limits = {}) {
    StageGeometry g;
    g.j = 1;
    g.h = spec.h1;
    g.w = 1;
    auto count = spec.stage_count();
    if (!count || *count >= 1) apply_cut(g, spec.params(1, g.h, limits.max_columns));
    return g;
}

/// Tower j + 1 built from tower j; its own cut is attached when the spec
/// provides parameters for stage j + 1.
inline StageGeometry expand_stage(const ConstructionSpec& spec, const StageGeometry& prev, const Limits& limits = {}) {
    StageGeometry next;
    next.j = prev.j + 1;
    next.h = prev.next_height();
    next.w = prev.w / Rational(prev.r());
    auto count = spec.stage_count();
    if (!count || next.j <= *count) apply_cut(next, spec.params(next.j, next.h, limits.max_columns));
    return next;
}

/// Persistent backing store for computed stages; see cache.hpp.
class StageStore {
public:
    virtual ~StageStore() = default;
    virtual std::optional<StageGeometry> load(std::uint64_t j) = 0;
    virtual void store(const StageGeometry& g) = 0;
    // A loaded record that failed the recurrence check.
    virtual void reject(std::uint64_t, const std::string&) {}
};

/// Empty when g is a valid successor of prev (or a valid first stage).
inline std::string recurrence_problem(const StageGeometry& g, const StageGeometry* prev, const BigInt& h1) {
    const BigInt h = prev ? prev->next_height() : h1;
    const Rational w = prev ? prev->w / Rational(BigInt(prev->r())) : Rational(1);
    if (g.h != h) return "height does not follow from the previous stage";
    if (g.w != w) return "width does not follow from the previous stage";
    if (g.spacers.size() != g.offsets.size()) return "spacer and offset counts differ";
    BigInt o = 0;
    for (std::size_t i = 0; i < g.offsets.size(); ++i) {
        if (g.spacers[i] < 0) return "negative spacer";
        if (g.offsets[i] != o) return "offsets do not follow from the spacers";
        o += g.h + g.spacers[i];
    }
    return {};
}

/// A construction with lazily generated, memoized stages. Readers share the
/// cache; extending it takes the writer lock.
class Construction {
public:
    explicit Construction(ConstructionSpec spec, Limits limits = {}, std::shared_ptr<StageStore> store = nullptr)
        : spec_(std::move(spec)), limits_(limits), store_(std::move(store)) {
        spec_.validate();
    }

    Construction(const Construction&) = delete;
    Construction& operator=(const Construction&) = delete;

    const ConstructionSpec& spec() const { return spec_; }
    const Limits& limits() const { return limits_; }

    /// Highest tower index that exists; nullopt for infinite families.
    std::optional<std::uint64_t> last_stage() const {
        auto c = spec_.stage_count();
        if (!c) return std::nullopt;
        return *c + 1;
    }

    bool has_stage(std::uint64_t j) const {
        auto last = last_stage();
        return j >= 1 && (!last || j <= *last);
    }

    bool has_cut(std::uint64_t j) const {
        auto c = spec_.stage_count();
        return j >= 1 && (!c || j <= *c);
    }

    const StageGeometry& stage(std::uint64_t j) const {
        if (!has_stage(j))
            throw Error(ErrorCode::stage_unavailable,
                        "stage " + std::to_string(j) + " is not defined by the spec", j);
        {
            std::shared_lock lock(mu_);
            if (j <= stages_.size()) return stages_[j - 1];
        }
        std::unique_lock lock(mu_);
        while (stages_.size() < j) {
            std::uint64_t next = stages_.size() + 1;
            std::optional<StageGeometry> g;
            if (store_) g = store_->load(next);
            if (g) {
                auto why = recurrence_problem(*g, stages_.empty() ? nullptr : &stages_.back(), spec_.h1);
                if (!why.empty()) {
                    store_->reject(next, why);
                    g.reset();
                }
            }
            if (!g) {
                g = stages_.empty() ? first_stage(spec_, limits_) : expand_stage(spec_, stages_.back(), limits_);
                if (store_) store_->store(*g);
            }
            if (g->has_cut() && g->r() == 1)
                warnings_.push_back("stage " + std::to_string(next) + " has r = 1 (pure spacer extension)");
            stages_.push_back(std::move(*g));
        }
        return stages_[j - 1];
    }

    const StageGeometry& cut(std::uint64_t j) const {
        const auto& g = stage(j);
        if (!g.has_cut())
            throw Error(ErrorCode::stage_unavailable,
                        "spec defines no parameters for stage " + std::to_string(j), j);
        return g;
    }

    BigInt height(std::uint64_t j) const { return stage(j).h; }

    std::vector<std::string> warnings() const {
        std::shared_lock lock(mu_);
        return warnings_;
    }

private:
    ConstructionSpec spec_;
    Limits limits_;
    std::shared_ptr<StageStore> store_;
    mutable std::shared_mutex mu_;
    mutable std::deque<StageGeometry> stages_;
    mutable std::vector<std::string> warnings_;
};

/// Families shipped with the library:
///   paper-example          h1 = 10, r = (k+1)! on block k, s_j(i) = 10^i h_j,
///                          block lengths ((k+1)!)^20 as stated
///   paper-example-alpha19  the same with block lengths ((k+1)!)^19, the
///                          exponent that matches the stated claims
///   odometer               constant r = 2, no spacers, h1 = 1
inline std::vector<std::string> named_families() {
    return {"paper-example", "paper-example-alpha19", "odometer"};
}

inline ConstructionSpec named_family(const std::string& name) {
    auto stated = [](Rational alpha) {
        CAlphaFamily f;
        f.alpha = alpha;
        f.growth = GrowthRule{Growth::factorial};
        f.spacer_base = 10;
        f.claims = {
            Claim{10, ClaimedProperty::singular, "singular spectrum of the 10-fold power"},
            Claim{11, ClaimedProperty::absolutely_continuous, "Lebesgue spectrum of the 11-fold power"},
            Claim{20, ClaimedProperty::conservative, "conservative 20-fold power"},
        };
        return f;
    };
    ConstructionSpec spec;
    spec.family = name;
    if (name == "paper-example") {
        spec.h1 = 10;
        spec.source = stated(20);
    } else if (name == "paper-example-alpha19") {
        spec.h1 = 10;
        spec.source = stated(19);
    } else if (name == "odometer") {
        spec.h1 = 1;
        spec.source = OdometerFamily{2};
    } else {
        throw Error(ErrorCode::invalid_spec, "unknown family '" + name + "'");
    }
    return spec;
}

inline std::vector<BigInt> tower_heights(const Construction& c, std::uint64_t J) {
    if (J < 1) throw Error(ErrorCode::invalid_spec, "J must be >= 1");
    std::vector<BigInt> out;
    out.reserve(J);
    for (std::uint64_t j = 1; j <= J; ++j) out.push_back(c.height(j));
    return out;
}

/// mu(X_j) = h_j * w_j with w_1 = 1.
inline Rational stage_measure(const Construction& c, std::uint64_t j) {
    const auto& g = c.stage(j);
    return Rational(g.h) * g.w;
}

/// Levels occupied by the base E_{j0} inside tower J, sorted ascending.
inline std::vector<BigInt> levels_of_base(const Construction& c, std::uint64_t j0, std::uint64_t J,
                                          std::optional<std::uint64_t> cap = std::nullopt) {
    if (j0 < 1 || j0 > J) throw Error(ErrorCode::invalid_spec, "levels_of_base needs 1 <= j0 <= J");
    std::uint64_t limit = cap.value_or(c.limits().max_enumeration);
    BigInt count = 1;
    for (std::uint64_t j = j0; j < J; ++j) {
        count *= c.cut(j).r();
        if (count > BigInt(limit))
            throw Error(ErrorCode::too_large,
                        "E_" + std::to_string(j0) + " has more than " + std::to_string(limit) + " levels in tower " +
                            std::to_string(J),
                        J);
    }
    std::vector<BigInt> levels{BigInt(0)};
    for (std::uint64_t j = j0; j < J; ++j) {
        const auto& g = c.cut(j);
        std::vector<BigInt> next;
        next.reserve(levels.size() * g.r());
        for (const auto& o : g.offsets)
            for (const auto& l : levels) next.push_back(o + l);
        levels = std::move(next);
    }
    std::sort(levels.begin(), levels.end());
    return levels;
}

}  // namespace ranklab
