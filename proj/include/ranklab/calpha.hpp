#pragma once

#include <boost/multiprecision/cpp_bin_float.hpp>

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "ranklab/construction.hpp"
#include "ranklab/sidon.hpp"

namespace ranklab {

enum class SpectralType { singular, absolutely_continuous };

inline const char* to_string(SpectralType t) {
    return t == SpectralType::singular ? "singular" : "absolutely_continuous";
}

/// One series hypothesis evaluated for a power d.
///
/// For Sum_j r_j^-e the block structure gives
///   Sum_j r_j^-e = Sum_k floor(r_{j(k)}^alpha) r_{j(k)}^-e,
/// which diverges iff alpha - e >= 0 once Sum_k r_{j(k)}^-delta < inf for all
/// delta > 0. For the per-block series Sum_k r_{j(k)}^-e the same
/// summability gives divergence iff -e >= 0. `collapsed` stores that sign
/// quantity in both cases.
struct SeriesEvidence {
    std::string series;     // human-readable form of the series
    Rational exponent;      // e
    Rational collapsed;     // alpha - e (per stage) or -e (per block)
    bool diverges = false;  // collapsed >= 0
    std::string reading;    // what divergence or convergence implies
};

struct ClassificationReport {
    std::uint64_t d = 1;
    Rational alpha;
    bool conservative = true;
    SpectralType spectral = SpectralType::singular;
    SeriesEvidence conservativity;
    SeriesEvidence absolute_continuity;
    SeriesEvidence singularity;
    std::string citation;
    std::vector<std::string> annotations;
};

/// Classifies T^{(x)d} for a Sidon construction in class C(alpha). The
/// verdict is the exact threshold rule; the series evidence is computed
/// independently and must agree with it.
inline ClassificationReport classify_power(const Rational& alpha, std::uint64_t d) {
    if (d < 1) throw Error(ErrorCode::invalid_spec, "power d must be >= 1");
    if (alpha < 0) throw Error(ErrorCode::invalid_spec, "alpha must be >= 0");

    ClassificationReport rep;
    rep.d = d;
    rep.alpha = alpha;
    const Rational dd(d);

    rep.conservative = dd <= 1 + alpha;
    rep.spectral = dd <= 1 + alpha / 2 ? SpectralType::singular : SpectralType::absolutely_continuous;

    auto& c = rep.conservativity;
    c.series = "sum_j r_j^-(d-1)";
    c.exponent = dd - 1;
    c.collapsed = alpha - c.exponent;
    c.diverges = c.collapsed >= 0;
    c.reading = c.diverges ? "diverges: no wandering set of positive measure" : "converges";

    auto& a = rep.absolute_continuity;
    a.series = "sum_j r_j^-(2d-2)";
    a.exponent = 2 * dd - 2;
    a.collapsed = alpha - a.exponent;
    a.diverges = a.collapsed >= 0;
    a.reading = a.diverges ? "diverges" : "converges: absolutely continuous spectrum";

    auto& s = rep.singularity;
    s.series = "sum_k r_j(k)^-(2d-2-alpha)";
    s.exponent = 2 * dd - 2 - alpha;
    s.collapsed = -s.exponent;
    s.diverges = s.collapsed >= 0;
    s.reading = s.diverges ? "diverges: singular spectrum" : "converges";

    if (rep.conservative != c.diverges || (rep.spectral == SpectralType::singular) != s.diverges ||
        (rep.spectral == SpectralType::absolutely_continuous) == a.diverges)
        throw std::logic_error("threshold rule and series evidence disagree");

    rep.citation = rep.conservative ? "conservative: d <= 1 + alpha" : "dissipative: d > 1 + alpha";
    rep.citation += rep.spectral == SpectralType::singular ? "; singular: d <= 1 + alpha/2"
                                                           : "; absolutely continuous: d > 1 + alpha/2";
    return rep;
}

inline void require_calpha(const CAlphaFamily& fam) {
    if (!fam.growth.summable())
        throw Error(ErrorCode::not_calpha,
                    std::string("not in C(alpha): ") + to_string(fam.growth.kind) +
                        " growth of r_j(k) does not make sum_k r_j(k)^-delta finite for every delta > 0");
}

inline ClassificationReport classify_power(const CAlphaFamily& fam, std::uint64_t d) {
    require_calpha(fam);
    ClassificationReport rep = classify_power(fam.alpha, d);
    for (const auto& claim : fam.claims) {
        if (claim.d != d) continue;
        if (claim.property == ClaimedProperty::absolutely_continuous &&
            rep.spectral == SpectralType::absolutely_continuous)
            rep.annotations.push_back("stated claim: " + claim.label);
    }
    return rep;
}

inline bool holds(const ClassificationReport& rep, ClaimedProperty p) {
    switch (p) {
    case ClaimedProperty::singular: return rep.spectral == SpectralType::singular;
    case ClaimedProperty::absolutely_continuous: return rep.spectral == SpectralType::absolutely_continuous;
    case ClaimedProperty::conservative: return rep.conservative;
    case ClaimedProperty::dissipative: return !rep.conservative;
    }
    return false;
}

struct ClaimConflict {
    Claim claim;
    ClassificationReport computed;
};

/// Claims of the family that the threshold rule contradicts.
inline std::vector<ClaimConflict> claim_conflicts(const CAlphaFamily& fam) {
    std::vector<ClaimConflict> out;
    for (const auto& claim : fam.claims) {
        auto rep = classify_power(fam, claim.d);
        if (!holds(rep, claim.property)) out.push_back(ClaimConflict{claim, rep});
    }
    return out;
}

/// Partial sums Sum_{j<=K} r_j^-e of a positive integer sequence.
struct PartialSums {
    bool exact = true;
    std::vector<Rational> values;    // filled when exact
    std::vector<Float50> approx;     // filled otherwise (and mirrors values when exact)
    Float50 error_bound = 0;         // absolute bound on the last approximate sum
};

using IntegerSequence = std::function<BigInt(std::uint64_t)>;

inline PartialSums series_partial_sums(const IntegerSequence& r, const Rational& e, std::uint64_t K) {
    if (K < 1) throw Error(ErrorCode::invalid_spec, "K must be >= 1");
    PartialSums out;
    out.exact = boost::multiprecision::denominator(e) == 1;
    if (out.exact) {
        BigInt ei = boost::multiprecision::numerator(e);
        if (boost::multiprecision::abs(ei) > BigInt(1u << 20))
            throw Error(ErrorCode::too_large, "exponent too large for exact partial sums");
        const auto n = static_cast<std::uint64_t>(boost::multiprecision::abs(ei));
        Rational sum = 0;
        for (std::uint64_t j = 1; j <= K; ++j) {
            BigInt v = r(j);
            if (v < 1) throw Error(ErrorCode::invalid_spec, "sequence terms must be positive");
            BigInt p = ipow(v, n);
            sum += ei >= 0 ? Rational(BigInt(1), p) : Rational(p);
            out.values.push_back(sum);
            out.approx.push_back(Float50(sum));
        }
        return out;
    }
    const Float50 fe(e);
    Float50 sum = 0;
    for (std::uint64_t j = 1; j <= K; ++j) {
        BigInt v = r(j);
        if (v < 1) throw Error(ErrorCode::invalid_spec, "sequence terms must be positive");
        sum += boost::multiprecision::exp(-fe * boost::multiprecision::log(Float50(v)));
        out.approx.push_back(sum);
    }
    // Each term carries a few ulps of relative error at 50 digits.
    out.error_bound = sum * Float50(K + 1) * Float50("1e-45");
    return out;
}

/// Sum over stages of the first K blocks, Sum_k floor(r_k^alpha) r_k^-e.
inline PartialSums block_collapsed_sums(const CAlphaFamily& fam, const Rational& e, std::uint64_t K) {
    std::vector<BigInt> lengths;
    for (std::uint64_t k = 1; k <= K; ++k) lengths.push_back(fam.block(k).length);
    PartialSums per_block = series_partial_sums([&](std::uint64_t k) { return fam.growth.value(k); }, e, K);
    PartialSums out;
    out.exact = per_block.exact;
    Rational sum = 0;
    Float50 fsum = 0;
    for (std::uint64_t k = 0; k < K; ++k) {
        if (out.exact) {
            Rational term = per_block.values[k] - (k ? per_block.values[k - 1] : Rational(0));
            sum += term * Rational(lengths[k]);
            out.values.push_back(sum);
            out.approx.push_back(Float50(sum));
        } else {
            Float50 term = per_block.approx[k] - (k ? per_block.approx[k - 1] : Float50(0));
            fsum += term * Float50(lengths[k]);
            out.approx.push_back(fsum);
        }
    }
    if (!out.exact) out.error_bound = fsum * Float50(K + 1) * Float50("1e-45");
    return out;
}

/// (r, length) of each constant-r run.
struct RunLength {
    BigInt r;
    BigInt length;
};

inline std::vector<RunLength> block_runs(const ConstructionSpec& spec, std::uint64_t family_blocks = 4) {
    std::vector<RunLength> runs;
    if (auto e = std::get_if<ExplicitStages>(&spec.source)) {
        for (const auto& st : e->stages) {
            if (!runs.empty() && runs.back().r == st.r)
                runs.back().length += 1;
            else
                runs.push_back(RunLength{BigInt(st.r), BigInt(1)});
        }
    } else if (auto f = std::get_if<CAlphaFamily>(&spec.source)) {
        for (std::uint64_t k = 1; k <= family_blocks; ++k) {
            Block b = f->block(k);
            runs.push_back(RunLength{b.r, b.length});
        }
    }
    return runs;
}

/// Simplest rational alpha (smallest denominator, then smallest numerator)
/// with floor(r^alpha) equal to every run length; nullopt when no such
/// alpha exists with denominator <= max_denominator.
inline std::optional<Rational> infer_alpha(const std::vector<RunLength>& runs, std::uint64_t max_denominator = 4096) {
    if (runs.size() < 2)
        throw Error(ErrorCode::insufficient_data,
                    "need at least 2 blocks of constant r to infer alpha, have " + std::to_string(runs.size()));
    using boost::multiprecision::log;
    Float50 lo = 0;
    Float50 hi = std::numeric_limits<Float50>::max();
    for (const auto& run : runs) {
        if (run.length < 1) return std::nullopt;
        if (run.r == 1) {
            if (run.length != 1) return std::nullopt;
            continue;
        }
        Float50 lr = log(Float50(run.r));
        lo = std::max(lo, Float50(log(Float50(run.length)) / lr));
        hi = std::min(hi, Float50(log(Float50(run.length + 1)) / lr));
    }
    const Float50 slack("1e-40");
    lo -= slack;
    hi += slack;
    if (lo > hi) return std::nullopt;
    if (lo < 0) lo = 0;

    auto verify = [&](const Rational& a) {
        for (const auto& run : runs)
            if (floor_pow(run.r, a) != run.length) return false;
        return true;
    };
    for (std::uint64_t q = 1; q <= max_denominator; ++q) {
        Float50 fq(q);
        BigInt p = static_cast<BigInt>(boost::multiprecision::ceil(lo * fq));
        for (; Float50(p) <= hi * fq; ++p) {
            Rational cand(p, BigInt(q));
            if (boost::multiprecision::denominator(cand) != q) continue;
            if (verify(cand)) return cand;
        }
        if (hi >= Float50(1u << 20)) break;
    }
    return std::nullopt;
}

inline std::optional<Rational> infer_alpha(const ConstructionSpec& spec) {
    if (std::holds_alternative<OdometerFamily>(spec.source)) return std::nullopt;
    return infer_alpha(block_runs(spec));
}

/// Sidon check of the spacer rule s(i) = base^i h on the cut counts of the
/// first `blocks` blocks. Offsets are h times integers, so any h >= 2 gives
/// the same verdict.
inline std::vector<SidonVerdict> family_sidon_blocks(const CAlphaFamily& fam, const BigInt& h1, std::uint64_t blocks) {
    std::vector<SidonVerdict> out;
    const BigInt h = h1 < 2 ? BigInt(2) : h1;
    for (std::uint64_t k = 1; k <= blocks; ++k) {
        BigInt r = fam.growth.value(k);
        if (r > BigInt(4096)) break;
        StageGeometry g;
        g.j = 1;
        g.h = h;
        g.w = 1;
        StageParams p;
        p.r = static_cast<std::uint64_t>(r);
        BigInt factor = fam.spacer_base;
        for (std::uint64_t i = 1; i <= p.r; ++i, factor *= fam.spacer_base) p.spacers.push_back(factor * h);
        apply_cut(g, p);
        StageGeometry next;
        next.j = 2;
        next.h = g.next_height();
        auto v = check_stage(g, next);
        v.j = k;
        out.push_back(std::move(v));
    }
    return out;
}

}  // namespace ranklab
