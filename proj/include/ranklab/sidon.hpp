#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <set>
#include <tuple>
#include <vector>

#include "ranklab/construction.hpp"

namespace ranklab {

/// Ordered pair (source copy, target copy) of columns, 1-based.
struct CopyPair {
    std::uint64_t from = 0;
    std::uint64_t to = 0;

    friend bool operator==(const CopyPair&, const CopyPair&) = default;
};

struct SidonWitness {
    BigInt m;
    CopyPair first;
    CopyPair second;
};

struct SidonVerdict {
    std::uint64_t j = 0;
    bool is_sidon = true;
    std::optional<SidonWitness> witness;
    // Minimum gap between consecutive sorted copy differences, minus 2 h_j.
    // Absent when the stage has a single copy pair or none.
    std::optional<BigInt> margin;
};

/// Decides whether every shift m in (h_j, h_{j+1}] carries tower j into at
/// most one of its columns.
///
/// Shifting copy i by m meets copy i' exactly when |o(i') - o(i) - m| < h_j,
/// so each ordered pair (i, i') owns the integer window
/// [D - h_j + 1, D + h_j - 1] with D = o(i') - o(i). The stage fails when two
/// windows with different target copies share an integer in range. Windows
/// are swept in order of D; only windows with D values within 2 h_j - 2 can
/// share an integer.
inline SidonVerdict check_stage(const StageGeometry& g, const StageGeometry& next,
                                std::uint64_t max_pairs = 1u << 24) {
    if (!g.has_cut()) throw Error(ErrorCode::stage_unavailable, "stage has no cut parameters", g.j);
    if (next.j != g.j + 1 || next.h != g.next_height())
        throw Error(ErrorCode::invalid_spec, "check_stage needs consecutive stages of one construction", g.j);

    SidonVerdict v;
    v.j = g.j;
    const std::uint64_t r = g.r();
    const BigInt pair_count = BigInt(r) * BigInt(r - 1) / 2;
    if (pair_count > BigInt(max_pairs))
        throw Error(ErrorCode::too_large,
                    "stage " + std::to_string(g.j) + " has " + pair_count.str() +
                        " copy pairs, above the cap; check a sample of stages instead",
                    g.j);

    struct Window {
        BigInt d;
        BigInt lo;
        BigInt hi;
        CopyPair pair;
    };
    std::vector<Window> windows;
    windows.reserve(static_cast<std::size_t>(pair_count));
    const BigInt range_lo = g.h + 1;
    const BigInt& range_hi = next.h;
    for (std::uint64_t a = 0; a < r; ++a) {
        for (std::uint64_t b = a + 1; b < r; ++b) {
            Window w;
            w.d = g.offsets[b] - g.offsets[a];
            w.lo = std::max(BigInt(w.d - g.h + 1), range_lo);
            w.hi = std::min(BigInt(w.d + g.h - 1), range_hi);
            w.pair = CopyPair{a + 1, b + 1};
            windows.push_back(std::move(w));
        }
    }
    std::sort(windows.begin(), windows.end(), [](const Window& x, const Window& y) {
        return std::tie(x.d, x.pair.from) < std::tie(y.d, y.pair.from);
    });

    for (std::size_t k = 0; k + 1 < windows.size(); ++k) {
        BigInt gap = windows[k + 1].d - windows[k].d - 2 * g.h;
        if (!v.margin || gap < *v.margin) v.margin = gap;
    }

    const BigInt reach = 2 * g.h - 2;
    for (std::size_t k = 0; k < windows.size() && v.is_sidon; ++k) {
        const Window& x = windows[k];
        if (x.lo > x.hi) continue;
        for (std::size_t l = k + 1; l < windows.size() && windows[l].d - x.d <= reach; ++l) {
            const Window& y = windows[l];
            if (y.pair.to == x.pair.to) continue;
            BigInt lo = std::max(x.lo, y.lo);
            BigInt hi = std::min(x.hi, y.hi);
            if (lo <= hi) {
                v.is_sidon = false;
                v.witness = SidonWitness{lo, x.pair, y.pair};
                break;
            }
        }
    }
    return v;
}

/// Literal enumeration of tower j inside tower j + 1: shifts every level of
/// every copy by m and records which copies the shifted levels land in.
class OverlapOracle {
public:
    OverlapOracle(const StageGeometry& g, const BigInt& next_height, std::uint64_t max_levels = 1u << 24)
        : h_(to_u64(g.h, "tower height")) {
        if (!g.has_cut()) throw Error(ErrorCode::stage_unavailable, "stage has no cut parameters", g.j);
        if (next_height > BigInt(max_levels))
            throw Error(ErrorCode::too_large, "tower " + std::to_string(g.j + 1) + " exceeds the enumeration cap",
                        g.j + 1);
        top_ = static_cast<std::uint64_t>(next_height);
        copy_of_.assign(top_, 0);
        for (std::uint64_t i = 0; i < g.r(); ++i) {
            std::uint64_t o = to_u64(g.offsets[i], "offset");
            starts_.push_back(o);
            for (std::uint64_t l = 0; l < h_; ++l) copy_of_[o + l] = static_cast<std::uint32_t>(i + 1);
        }
    }

    /// Columns met by T^m X_j, stopping early once `stop_after` are found.
    std::set<std::uint64_t> columns_met(std::uint64_t m, std::size_t stop_after = SIZE_MAX) const {
        std::set<std::uint64_t> met;
        for (std::uint64_t o : starts_) {
            for (std::uint64_t l = o; l < o + h_; ++l) {
                std::uint64_t t = l + m;
                if (t >= top_) break;
                if (copy_of_[t]) {
                    met.insert(copy_of_[t]);
                    if (met.size() >= stop_after) return met;
                }
            }
        }
        return met;
    }

private:
    std::uint64_t h_;
    std::uint64_t top_ = 0;
    std::vector<std::uint64_t> starts_;
    std::vector<std::uint32_t> copy_of_;
};

inline std::set<std::uint64_t> brute_force_overlap(const Construction& c, std::uint64_t j, const BigInt& m) {
    const auto& g = c.cut(j);
    const BigInt next = g.next_height();
    if (m <= g.h || m > next)
        throw Error(ErrorCode::invalid_spec, "shift must satisfy h_j < m <= h_{j+1}", j);
    OverlapOracle oracle(g, next, c.limits().max_enumeration);
    return oracle.columns_met(static_cast<std::uint64_t>(m));
}

inline std::vector<SidonVerdict> check_construction(const Construction& c, std::uint64_t J) {
    if (J < 1) throw Error(ErrorCode::invalid_spec, "J must be >= 1");
    std::vector<SidonVerdict> out;
    out.reserve(J);
    for (std::uint64_t j = 1; j <= J; ++j) out.push_back(check_stage(c.cut(j), c.stage(j + 1)));
    return out;
}

inline std::optional<SidonVerdict> first_failure(const std::vector<SidonVerdict>& verdicts) {
    for (const auto& v : verdicts)
        if (!v.is_sidon) return v;
    return std::nullopt;
}

}  // namespace ranklab
