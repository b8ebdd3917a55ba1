#pragma once

#include <boost/math/constants/constants.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "ranklab/construction.hpp"

namespace ranklab {

/// #{(x, y) in L x L : y - x = m} for m = 0..M, with L sorted ascending.
inline std::vector<BigInt> pair_counts(const std::vector<BigInt>& levels, std::uint64_t M) {
    std::vector<std::uint64_t> counts(M + 1, 0);
    const BigInt bound = M;
    for (std::size_t i = 0; i < levels.size(); ++i) {
        for (std::size_t k = i; k < levels.size(); ++k) {
            BigInt diff = levels[k] - levels[i];
            if (diff > bound) break;
            ++counts[static_cast<std::size_t>(diff)];
        }
    }
    return {counts.begin(), counts.end()};
}

namespace detail {

/// Pair counts P_J(t) of the levels of E_{j0} inside tower J, kept either
/// densely over [0, h) or on the two windows [0, M] and [h - M, h). The
/// windows suffice once h > 2M + 2: lags m <= M of the next tower only read
/// P_J near 0 (same copy) and near h (adjacent copies), and lags near the
/// next top only read P_J near h.
class PairCountWindow {
public:
    PairCountWindow(const BigInt& h, std::uint64_t M) : h_(h), M_(M) {
        dense_ = h <= dense_limit();
        if (dense_) {
            full_.assign(static_cast<std::size_t>(h), BigInt(0));
            full_[0] = 1;
        } else {
            low_.assign(M + 1, BigInt(0));
            low_[0] = 1;
            high_.assign(M, BigInt(0));
        }
    }

    const BigInt& height() const { return h_; }

    BigInt at(BigInt t) const {
        if (t < 0) t = -t;
        if (t >= h_) return 0;
        if (dense_) return full_[static_cast<std::size_t>(t)];
        if (t <= BigInt(M_)) return low_[static_cast<std::size_t>(t)];
        BigInt u = h_ - 1 - t;
        if (u < BigInt(M_)) return high_[static_cast<std::size_t>(u)];
        throw std::logic_error("pair-count window miss at lag " + t.str());
    }

    /// Advance through the cut of tower J. `diffs` holds every ordered copy
    /// difference o(b) - o(a) (including the r zero differences), sorted,
    /// with multiplicities.
    PairCountWindow next(const std::vector<std::pair<BigInt, std::uint64_t>>& diffs, const BigInt& next_h) const {
        PairCountWindow out(M_);
        out.h_ = next_h;
        out.dense_ = next_h <= dense_limit();
        auto eval = [&](const BigInt& m) {
            BigInt lo = m - h_;
            BigInt hi = m + h_;
            auto first = std::upper_bound(diffs.begin(), diffs.end(), lo,
                                          [](const BigInt& v, const auto& e) { return v < e.first; });
            BigInt sum = 0;
            for (auto it = first; it != diffs.end() && it->first < hi; ++it) sum += at(m - it->first) * it->second;
            return sum;
        };
        if (out.dense_) {
            auto n = static_cast<std::size_t>(next_h);
            out.full_.resize(n);
            for (std::size_t t = 0; t < n; ++t) out.full_[t] = eval(BigInt(t));
        } else {
            out.low_.resize(M_ + 1);
            for (std::uint64_t t = 0; t <= M_; ++t) out.low_[t] = eval(BigInt(t));
            out.high_.resize(M_);
            for (std::uint64_t u = 0; u < M_; ++u) out.high_[u] = eval(next_h - 1 - u);
        }
        return out;
    }

private:
    explicit PairCountWindow(std::uint64_t M) : M_(M) {}
    BigInt dense_limit() const { return BigInt(2 * M_ + 2); }

    BigInt h_;
    std::uint64_t M_;
    bool dense_ = true;
    std::vector<BigInt> full_;
    std::vector<BigInt> low_;
    std::vector<BigInt> high_;
};

inline std::vector<std::pair<BigInt, std::uint64_t>> copy_differences(const StageGeometry& g, std::uint64_t max_pairs) {
    const std::uint64_t r = g.r();
    if (BigInt(r) * BigInt(r) > BigInt(max_pairs))
        throw Error(ErrorCode::too_large, "stage " + std::to_string(g.j) + " has too many copy pairs", g.j);
    std::vector<BigInt> all;
    all.reserve(r * r);
    for (std::uint64_t a = 0; a < r; ++a)
        for (std::uint64_t b = 0; b < r; ++b) all.push_back(g.offsets[b] - g.offsets[a]);
    std::sort(all.begin(), all.end());
    std::vector<std::pair<BigInt, std::uint64_t>> out;
    for (auto& d : all) {
        if (!out.empty() && out.back().first == d)
            ++out.back().second;
        else
            out.emplace_back(std::move(d), 1);
    }
    return out;
}

}  // namespace detail

/// Exact c_m = mu(E_{j0} n T^-m E_{j0}), m = 0..M, as realized in tower
/// `stage`.
struct CorrelationTable {
    std::uint64_t j0 = 1;
    std::uint64_t M = 0;
    std::uint64_t stage = 1;
    std::vector<Rational> values;
    std::optional<std::uint64_t> stabilized_at;
    std::vector<std::uint64_t> unstable_lags;

    bool stable() const { return unstable_lags.empty(); }
};

struct CorrelationOptions {
    std::optional<std::uint64_t> max_stage;  // default j0 + 64
    std::uint64_t max_pairs = 1u << 22;
};

/// Stage-by-stage pair counting. Each cut convolves the pair counts with
/// the difference multiset of the copy offsets; a cut whose smallest
/// inter-copy spacer s satisfies s + 1 > M adds nothing at lags <= M.
///
/// Values are final (`stabilized_at`) when no later stage can contribute:
/// for families whose spacer floor never decreases this follows from the
/// first non-contributing cut; for finite specs it follows from reaching the
/// last stage. Otherwise the lags a future cut could still change are listed
/// in `unstable_lags`.
inline CorrelationTable autocorrelation(const Construction& c, std::uint64_t j0, std::uint64_t M,
                                        const CorrelationOptions& opt = {}) {
    if (j0 < 1) throw Error(ErrorCode::invalid_spec, "j0 must be >= 1");
    const std::uint64_t max_stage = opt.max_stage.value_or(j0 + 64);
    if (max_stage < j0) throw Error(ErrorCode::invalid_spec, "max_stage below j0");
    const bool monotone = c.spec().spacer_floor_nondecreasing();

    CorrelationTable table;
    table.j0 = j0;
    table.M = M;

    detail::PairCountWindow window(c.height(j0), M);
    std::optional<std::uint64_t> last_change;
    std::uint64_t J = j0;
    for (;;) {
        if (!c.has_cut(J)) {
            table.stabilized_at = last_change ? *last_change + 1 : j0;
            break;
        }
        const auto& g = c.cut(J);
        auto floor = g.min_gap_spacer();
        const bool contributes = floor && *floor + 1 <= BigInt(M);
        if (!contributes && monotone && floor) {
            table.stabilized_at = J;
            break;
        }
        if (J >= max_stage) {
            std::uint64_t first_unstable = 1;
            if (monotone && floor) first_unstable = static_cast<std::uint64_t>(*floor + 1);
            for (std::uint64_t m = std::max<std::uint64_t>(first_unstable, 1); m <= M; ++m)
                table.unstable_lags.push_back(m);
            break;
        }
        window = window.next(detail::copy_differences(g, opt.max_pairs), g.next_height());
        if (contributes) last_change = J;
        ++J;
    }

    table.stage = J;
    const Rational w = c.stage(J).w;
    table.values.reserve(M + 1);
    for (std::uint64_t m = 0; m <= M; ++m) table.values.push_back(Rational(window.at(BigInt(m))) * w);
    return table;
}

inline void require_stable(const CorrelationTable& t, bool force) {
    if (!force && !t.stable())
        throw Error(ErrorCode::unstable_table,
                    std::to_string(t.unstable_lags.size()) + " lags are not stabilized (first: " +
                        std::to_string(t.unstable_lags.front()) + "); pass force to use stage values",
                    t.stage);
}

/// Fourier coefficients of sigma^{*d}: c_m^d.
inline std::vector<Rational> convolution_power_coefficients(const CorrelationTable& t, std::uint64_t d,
                                                            bool force = false) {
    if (d < 1) throw Error(ErrorCode::invalid_spec, "power d must be >= 1");
    require_stable(t, force);
    std::vector<Rational> out;
    out.reserve(t.values.size());
    for (const auto& c : t.values) {
        Rational p = 1;
        for (std::uint64_t i = 0; i < d; ++i) p *= c;
        out.push_back(std::move(p));
    }
    return out;
}

enum class TrendClass { apparently_bounded, apparently_divergent, inconclusive };

inline const char* to_string(TrendClass t) {
    switch (t) {
    case TrendClass::apparently_bounded: return "apparently_bounded";
    case TrendClass::apparently_divergent: return "apparently_divergent";
    case TrendClass::inconclusive: return "inconclusive";
    }
    return "?";
}

struct PowerSumTrend {
    std::vector<std::uint64_t> checkpoints;
    std::vector<Rational> sums;   // Sum_{1 <= m <= M_t} c_m^{2d}
    std::vector<double> slopes;   // increment per lag between checkpoints
    TrendClass trend = TrendClass::inconclusive;
};

/// Heuristic only: finite prefixes cannot decide convergence.
inline PowerSumTrend power_sum_trend(const CorrelationTable& t, std::uint64_t d,
                                     std::vector<std::uint64_t> checkpoints) {
    if (d < 1) throw Error(ErrorCode::invalid_spec, "power d must be >= 1");
    std::sort(checkpoints.begin(), checkpoints.end());
    checkpoints.erase(std::unique(checkpoints.begin(), checkpoints.end()), checkpoints.end());
    PowerSumTrend out;
    Rational sum = 0;
    std::uint64_t m = 1;
    for (std::uint64_t cp : checkpoints) {
        if (cp > t.M) throw Error(ErrorCode::invalid_spec, "checkpoint beyond the table's max lag");
        for (; m <= cp; ++m) {
            Rational p = 1;
            for (std::uint64_t i = 0; i < 2 * d; ++i) p *= t.values[m];
            sum += p;
        }
        out.checkpoints.push_back(cp);
        out.sums.push_back(sum);
    }
    for (std::size_t i = 1; i < out.sums.size(); ++i) {
        Rational inc = out.sums[i] - out.sums[i - 1];
        out.slopes.push_back(static_cast<double>(inc / Rational(out.checkpoints[i] - out.checkpoints[i - 1])));
    }
    if (out.slopes.size() >= 1) {
        double last = out.slopes.back();
        double first = out.slopes.front();
        if (last == 0.0)
            out.trend = TrendClass::apparently_bounded;
        else if (last > 0.0 && last >= 0.5 * first)
            out.trend = TrendClass::apparently_divergent;
    }
    return out;
}

template <typename Real>
struct FejerGrid {
    std::vector<Real> values;  // f(2 pi t / N), t = 0..N-1
    bool aliasing = false;     // N < 2M + 2
};

/// Fejer mean f(theta) = Sum_{|m|<=M} (1 - |m|/(M+1)) c_{|m|}^d cos(m theta)
/// on N equispaced points, evaluated in Real after exact coefficient
/// assembly. With double the grid is accurate to about 1e-15 relative to
/// Sum |a_m|; Float50 gives about 1e-48.
template <typename Real = double>
FejerGrid<Real> fejer_density(const CorrelationTable& t, std::uint64_t d, std::uint64_t N, bool force = false) {
    if (N < 1) throw Error(ErrorCode::invalid_spec, "grid size N must be >= 1");
    auto coeffs = convolution_power_coefficients(t, d, force);
    const std::uint64_t M = t.M;
    std::vector<Real> a(M + 1);
    for (std::uint64_t m = 0; m <= M; ++m) {
        Rational weight = m == 0 ? Rational(1) : Rational(2) * (Rational(1) - Rational(m, M + 1));
        a[m] = static_cast<Real>(weight * coeffs[m]);
    }
    std::vector<Real> cosines(N);
    const Real two_pi = boost::math::constants::two_pi<Real>();
    for (std::uint64_t k = 0; k < N; ++k) {
        using std::cos;
        cosines[k] = cos(two_pi * Real(k) / Real(N));
    }
    FejerGrid<Real> out;
    out.aliasing = N < 2 * M + 2;
    out.values.assign(N, Real(0));
    for (std::uint64_t k = 0; k < N; ++k) {
        Real f = a[0];
        std::uint64_t idx = 0;
        for (std::uint64_t m = 1; m <= M; ++m) {
            idx += k;
            idx %= N;
            if (a[m] != Real(0)) f += a[m] * cosines[idx];
        }
        out.values[k] = f;
    }
    return out;
}

struct SpectralDiagnostics {
    std::uint64_t d = 1;
    Rational power_sum_2d;  // Sum_{m=1}^M c_m^{2d}
    Rational power_sum_d;   // Sum_{m=1}^M c_m^d
    std::vector<double> fejer_grid;
    double concentration = 0;  // share of grid mass on the top `quantile` of points
    bool aliasing = false;
};

inline SpectralDiagnostics spectral_diagnostics(const CorrelationTable& t, std::uint64_t d, std::uint64_t N,
                                                double quantile = 0.01, bool force = false) {
    auto coeffs = convolution_power_coefficients(t, d, force);
    SpectralDiagnostics out;
    out.d = d;
    for (std::uint64_t m = 1; m <= t.M; ++m) {
        out.power_sum_d += coeffs[m];
        out.power_sum_2d += coeffs[m] * coeffs[m];
    }
    auto grid = fejer_density<double>(t, d, N, force);
    out.aliasing = grid.aliasing;
    out.fejer_grid = grid.values;
    std::vector<double> sorted = grid.values;
    std::sort(sorted.begin(), sorted.end(), std::greater<>());
    auto top = static_cast<std::size_t>(std::ceil(quantile * static_cast<double>(N)));
    top = std::clamp<std::size_t>(top, 1, sorted.size());
    double total = 0, head = 0;
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        double v = std::max(sorted[i], 0.0);
        total += v;
        if (i < top) head += v;
    }
    out.concentration = total > 0 ? head / total : 0.0;
    return out;
}

}  // namespace ranklab
