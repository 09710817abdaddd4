#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <mutex>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "certsens/errors.hpp"
#include "certsens/interval.hpp"
#include "certsens/rng.hpp"

namespace certsens {

/// Pick-freeze sample couple: two i.i.d. designs plus the index of the
/// input that is shared at evaluation time.
struct PickFreezeDesign {
    std::vector<std::vector<double>> x;        // N points of dimension p
    std::vector<std::vector<double>> x_prime;  // N points of dimension p
    int frozen_index = 1;                      // 1-based
    std::uint64_t seed = 0;

    std::size_t size() const { return x.size(); }
    std::size_t dim() const { return x.empty() ? 0 : x.front().size(); }

    /// The substituted point: x_prime[k] with coordinate i replaced by x[k]_i.
    std::vector<double> substituted(std::size_t k) const {
        std::vector<double> pt = x_prime[k];
        pt[frozen_index - 1] = x[k][frozen_index - 1];
        return pt;
    }
};

inline PickFreezeDesign generate_design(const std::vector<std::pair<double, double>>& ranges,
                                        std::size_t n, int frozen_index, std::uint64_t seed) {
    if (n < 2) throw ConfigError("sample size must be >= 2");
    const int p = static_cast<int>(ranges.size());
    if (frozen_index < 1 || frozen_index > p)
        throw ConfigError("frozen index out of range");
    for (auto& r : ranges)
        if (r.second < r.first) throw ConfigError("invalid input range");

    PickFreezeDesign d;
    d.frozen_index = frozen_index;
    d.seed = seed;
    const CounterRng rng_x(seed, CounterRng::kDesignX);
    const CounterRng rng_xp(seed, CounterRng::kDesignXPrime);
    d.x.resize(n);
    d.x_prime.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
        d.x[k].resize(p);
        d.x_prime[k].resize(p);
        for (int j = 0; j < p; ++j) {
            const std::uint64_t ctr = k * p + j;
            d.x[k][j] = rng_x.uniform(ctr, ranges[j].first, ranges[j].second);
            d.x_prime[k][j] = rng_xp.uniform(ctr, ranges[j].first, ranges[j].second);
        }
    }
    return d;
}

/// Surrogate outputs and certified radii for both halves of a pick-freeze
/// couple.  The full-model values are never observed.
struct CertifiedPairs {
    std::vector<double> y_tilde;
    std::vector<double> y_tilde_prime;
    std::vector<double> eps;
    std::vector<double> eps_prime;

    std::size_t size() const { return y_tilde.size(); }
};

/// model(point) -> (surrogate value, certified radius); radius 0 for an
/// exact model.
using CertifiedEvaluator = std::function<std::pair<double, double>(const std::vector<double>&)>;

inline CertifiedPairs evaluate_pairs(const PickFreezeDesign& design,
                                     const CertifiedEvaluator& model, int threads = 1) {
    const std::size_t n = design.size();
    CertifiedPairs pairs;
    pairs.y_tilde.resize(n);
    pairs.y_tilde_prime.resize(n);
    pairs.eps.resize(n);
    pairs.eps_prime.resize(n);

    auto work = [&](std::size_t lo, std::size_t hi) {
        for (std::size_t k = lo; k < hi; ++k) {
            try {
                auto [y, e] = model(design.x[k]);
                pairs.y_tilde[k] = y;
                pairs.eps[k] = e;
                auto [yp, ep] = model(design.substituted(k));
                pairs.y_tilde_prime[k] = yp;
                pairs.eps_prime[k] = ep;
            } catch (const std::exception& e) {
                throw SolverDiverged(std::string(e.what()) + " (sample k=" +
                                     std::to_string(k) + ")");
            }
        }
    };

    if (threads <= 1) {
        work(0, n);
    } else {
        // Each k writes its own slots, so the split is race-free and the
        // result is identical for any thread count.
        std::vector<std::thread> pool;
        std::exception_ptr first_error;
        std::mutex err_mutex;
        const std::size_t chunk = (n + threads - 1) / threads;
        for (int t = 0; t < threads; ++t) {
            const std::size_t lo = std::min(n, t * chunk);
            const std::size_t hi = std::min(n, lo + chunk);
            pool.emplace_back([&, lo, hi] {
                try {
                    work(lo, hi);
                } catch (...) {
                    std::lock_guard<std::mutex> g(err_mutex);
                    if (!first_error) first_error = std::current_exception();
                }
            });
        }
        for (auto& th : pool) th.join();
        if (first_error) std::rethrow_exception(first_error);
    }
    return pairs;
}

/// Pick-freeze point estimator of the first-order Sobol index:
/// ( mean(y y') - mean(y) mean(y') ) / ( mean(y^2) - mean(y)^2 ).
inline double estimate_sobol(const std::vector<double>& y, const std::vector<double>& yp) {
    const std::size_t n = y.size();
    if (n < 2 || yp.size() != n) throw ConfigError("need two arrays of length N >= 2");
    double sy = 0.0, syp = 0.0, syyp = 0.0, syy = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        sy += y[k];
        syp += yp[k];
        syyp += y[k] * yp[k];
        syy += y[k] * y[k];
    }
    const double inv = 1.0 / static_cast<double>(n);
    const double num = syyp * inv - (sy * inv) * (syp * inv);
    const double den = syy * inv - (sy * inv) * (sy * inv);
    if (std::abs(den) < 1e-14 * (syy * inv))
        throw DegenerateVariance("sample variance of y is numerically zero");
    return num / den;
}

struct IndexBounds {
    double s_min = 0.0;
    double s_max = 0.0;
};

namespace detail {

/// Interval enclosure of the estimator over the admissible box
/// |y_k - y~_k| <= eps_k, |y'_k - y~'_k| <= eps'_k, computed on data
/// centered at the surrogate means (the estimator is invariant under
/// separate shifts of y and y', and centering tightens the enclosure by
/// orders of magnitude).
inline Interval sobol_enclosure(const CertifiedPairs& pairs,
                                const std::vector<std::size_t>* index_list) {
    const std::size_t n = index_list ? index_list->size() : pairs.size();
    if (n < 2) throw ConfigError("need N >= 2 pairs");
    auto at = [&](std::size_t j) { return index_list ? (*index_list)[j] : j; };

    double my = 0.0, myp = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        my += pairs.y_tilde[at(j)];
        myp += pairs.y_tilde_prime[at(j)];
    }
    my /= static_cast<double>(n);
    myp /= static_cast<double>(n);

    Interval sum_y{0, 0}, sum_yp{0, 0}, sum_prod{0, 0}, sum_sq{0, 0};
    for (std::size_t j = 0; j < n; ++j) {
        const std::size_t k = at(j);
        const Interval yk = Interval::radius(pairs.y_tilde[k] - my, pairs.eps[k]);
        const Interval ypk = Interval::radius(pairs.y_tilde_prime[k] - myp, pairs.eps_prime[k]);
        sum_y = sum_y + yk;
        sum_yp = sum_yp + ypk;
        sum_prod = sum_prod + yk * ypk;
        sum_sq = sum_sq + square(yk);
    }
    const double inv = 1.0 / static_cast<double>(n);
    const Interval mean_y = inv * sum_y;
    const Interval mean_yp = inv * sum_yp;
    const Interval num = inv * sum_prod - mean_y * mean_yp;
    const Interval den = inv * sum_sq - square(mean_y);
    if (den.lo <= 0.0)
        throw DenominatorStraddlesZero("guaranteed variance interval [" +
                                       std::to_string(den.lo) + ", " +
                                       std::to_string(den.hi) + "] is not positive");
    return divide_positive(num, den);
}

}  // namespace detail

/// Deterministic sandwich [S^m, S^M]: every admissible truth inside the
/// certified boxes has its estimator value inside these bounds.
inline IndexBounds bound_sobol(const CertifiedPairs& pairs) {
    const Interval enc = detail::sobol_enclosure(pairs, nullptr);
    return {enc.lo, enc.hi};
}

struct CombinedCI {
    double lo = 0.0;
    double hi = 0.0;
    double alpha = 0.05;
    std::size_t n_boot = 0;
    bool unbounded = false;
};

/// Empirical quantile: lower order statistic at index ceil(q*B), clamped
/// to [1, B] (inverse-CDF definition).
inline double quantile(std::vector<double> values, double q) {
    if (values.empty()) throw ConfigError("quantile of empty array");
    std::sort(values.begin(), values.end());
    const std::size_t b = values.size();
    std::size_t idx = static_cast<std::size_t>(std::ceil(q * static_cast<double>(b)));
    idx = std::clamp<std::size_t>(idx, 1, b);
    return values[idx - 1];
}

/// Bootstrap on the two bounding estimators: one shared index list per
/// replication, applied jointly to all four arrays; the combined CI is
/// [alpha/2 quantile of the lower replications, 1-alpha/2 quantile of the
/// upper ones].
inline CombinedCI bootstrap_combined_ci(const CertifiedPairs& pairs, std::size_t n_boot,
                                        double alpha, std::uint64_t seed, int threads = 1) {
    if (n_boot < 2) throw ConfigError("need B >= 2 bootstrap replications");
    if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("alpha must be in (0, 1)");
    const std::size_t n = pairs.size();

    std::vector<double> lower(n_boot), upper(n_boot);
    std::vector<std::uint8_t> bad(n_boot, 0);
    const CounterRng rng(seed, CounterRng::kBootstrap);

    auto work = [&](std::size_t lo, std::size_t hi) {
        std::vector<std::size_t> list(n);
        for (std::size_t b = lo; b < hi; ++b) {
            for (std::size_t j = 0; j < n; ++j)
                list[j] = rng.uniform_index(b * n + j, n);
            try {
                const Interval enc = detail::sobol_enclosure(pairs, &list);
                lower[b] = enc.lo;
                upper[b] = enc.hi;
            } catch (const DenominatorStraddlesZero&) {
                bad[b] = 1;
                lower[b] = -std::numeric_limits<double>::infinity();
                upper[b] = std::numeric_limits<double>::infinity();
            }
        }
    };

    if (threads <= 1) {
        work(0, n_boot);
    } else {
        std::vector<std::thread> pool;
        const std::size_t chunk = (n_boot + threads - 1) / threads;
        for (int t = 0; t < threads; ++t) {
            const std::size_t lo = std::min(n_boot, t * chunk);
            const std::size_t hi = std::min(n_boot, lo + chunk);
            pool.emplace_back([&, lo, hi] { work(lo, hi); });
        }
        for (auto& th : pool) th.join();
    }

    std::size_t n_bad = 0;
    for (auto b : bad) n_bad += b;

    CombinedCI ci;
    ci.alpha = alpha;
    ci.n_boot = n_boot;
    if (static_cast<double>(n_bad) > 0.01 * static_cast<double>(n_boot)) {
        ci.lo = -std::numeric_limits<double>::infinity();
        ci.hi = std::numeric_limits<double>::infinity();
        ci.unbounded = true;
        return ci;
    }
    ci.lo = quantile(lower, alpha / 2.0);
    ci.hi = quantile(upper, 1.0 - alpha / 2.0);
    ci.unbounded = !std::isfinite(ci.lo) || !std::isfinite(ci.hi);
    return ci;
}

}  // namespace certsens
