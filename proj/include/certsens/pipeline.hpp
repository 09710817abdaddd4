#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "certsens/budget.hpp"
#include "certsens/burgers.hpp"
#include "certsens/config.hpp"
#include "certsens/csv.hpp"
#include "certsens/reduced_basis.hpp"
#include "certsens/sobol.hpp"

namespace certsens {

/// Certified evaluator backed by the reduced model; radius is the rigorous
/// output bound.  Thread-safe: a solver instance per thread would avoid
/// workspace re-allocation, but evaluator copies share nothing mutable
/// except through the shared_ptr-owned online data, so each call makes a
/// solver on the stack kept in thread_local storage keyed by this object.
inline CertifiedEvaluator make_reduced_evaluator(std::shared_ptr<const ReducedOnline> online) {
    return [online](const std::vector<double>& pt) -> std::pair<double, double> {
        thread_local std::unique_ptr<ReducedSolver> solver;
        thread_local const ReducedOnline* bound_to = nullptr;
        if (bound_to != online.get()) {
            solver = std::make_unique<ReducedSolver>(*online);
            bound_to = online.get();
        }
        const CertifiedOutput out = solver->output_with_bound({pt[0], pt[1]});
        return {out.f_tilde, out.eps};
    };
}

/// Exact evaluator: the full solver with radius zero.
inline CertifiedEvaluator make_full_evaluator(const Discretization& disc) {
    return [disc](const std::vector<double>& pt) -> std::pair<double, double> {
        const Trajectory traj = solve_full({pt[0], pt[1]}, disc);
        return {output_functional(traj), 0.0};
    };
}

struct SensitivityRow {
    int input = 1;                 // 1 = nu, 2 = u0m
    IndexBounds bounds;
    CombinedCI ci;
    bool bounds_unbounded = false;
};

inline const char* input_name(int input) { return input == 1 ? "nu" : "u0m"; }

struct SensitivityResult {
    std::vector<SensitivityRow> rows;
    double mean_ci_length = 0.0;
};

inline SensitivityResult run_sensitivity(const std::vector<std::pair<double, double>>& ranges,
                                         std::int64_t n_samples, std::int64_t n_boot,
                                         double alpha, std::uint64_t seed,
                                         const CertifiedEvaluator& model, int threads,
                                         std::vector<CertifiedPairs>* pairs_out = nullptr) {
    SensitivityResult res;
    double length_sum = 0.0;
    int length_count = 0;
    for (int i = 1; i <= static_cast<int>(ranges.size()); ++i) {
        const PickFreezeDesign design =
            generate_design(ranges, static_cast<std::size_t>(n_samples), i, seed);
        const CertifiedPairs pairs = evaluate_pairs(design, model, threads);
        SensitivityRow row;
        row.input = i;
        try {
            row.bounds = bound_sobol(pairs);
        } catch (const DenominatorStraddlesZero&) {
            row.bounds_unbounded = true;
            row.bounds = {-std::numeric_limits<double>::infinity(),
                          std::numeric_limits<double>::infinity()};
        }
        row.ci = bootstrap_combined_ci(pairs, static_cast<std::size_t>(n_boot), alpha, seed,
                                       threads);
        if (!row.ci.unbounded) {
            length_sum += row.ci.hi - row.ci.lo;
            ++length_count;
        }
        res.rows.push_back(row);
        if (pairs_out) pairs_out->push_back(pairs);
    }
    res.mean_ci_length = length_count ? length_sum / length_count
                                      : std::numeric_limits<double>::infinity();
    return res;
}

inline std::string sensitivity_csv(const SensitivityResult& res) {
    std::ostringstream os;
    os << "input,s_min,s_max,ci_lo,ci_hi,unbounded\n";
    for (const auto& r : res.rows)
        os << input_name(r.input) << "," << fmt_double(r.bounds.s_min) << ","
           << fmt_double(r.bounds.s_max) << "," << fmt_double(r.ci.lo) << ","
           << fmt_double(r.ci.hi) << "," << (r.bounds_unbounded || r.ci.unbounded ? 1 : 0)
           << "\n";
    return os.str();
}

struct ConvergenceRow {
    int n_basis = 0;
    IndexBounds bounds;
    CombinedCI ci;
};

/// Sandwich bounds and combined CI for the nu index at several basis
/// sizes, on one fixed design (same seed for every n).
inline std::vector<ConvergenceRow> run_convergence(const ReducedBasis& base,
                                                   const std::vector<int>& n_list,
                                                   const std::vector<std::pair<double, double>>& ranges,
                                                   std::int64_t n_samples, std::int64_t n_boot,
                                                   double alpha, std::uint64_t seed,
                                                   int threads) {
    const PickFreezeDesign design =
        generate_design(ranges, static_cast<std::size_t>(n_samples), 1, seed);
    std::vector<ConvergenceRow> rows;
    for (int n : n_list) {
        const ReducedBasis rb = truncate_basis(base, n);
        auto online = std::make_shared<const ReducedOnline>(rb.online);
        const CertifiedPairs pairs =
            evaluate_pairs(design, make_reduced_evaluator(online), threads);
        ConvergenceRow row;
        row.n_basis = n;
        try {
            row.bounds = bound_sobol(pairs);
        } catch (const DenominatorStraddlesZero&) {
            row.bounds = {-std::numeric_limits<double>::infinity(),
                          std::numeric_limits<double>::infinity()};
        }
        row.ci = bootstrap_combined_ci(pairs, static_cast<std::size_t>(n_boot), alpha, seed,
                                       threads);
        rows.push_back(row);
    }
    return rows;
}

inline std::string convergence_csv(const std::vector<ConvergenceRow>& rows) {
    std::ostringstream os;
    os << "n,s_min,s_max,ci_lo,ci_hi\n";
    for (const auto& r : rows)
        os << r.n_basis << "," << fmt_double(r.bounds.s_min) << "," << fmt_double(r.bounds.s_max)
           << "," << fmt_double(r.ci.lo) << "," << fmt_double(r.ci.hi) << "\n";
    return os.str();
}

struct BenchmarkData {
    std::vector<SandwichWidthRecord> sandwich;
    std::vector<SamplingLengthRecord> sampling;
};

/// Benchmark sweep for the precision-model fit: mean sandwich width (over
/// both inputs) per basis size at fixed N, plus a radii-zero bootstrap CI
/// length at the largest basis size.
inline BenchmarkData run_benchmark(const ReducedBasis& base, const std::vector<int>& n_list,
                                   const std::vector<std::pair<double, double>>& ranges,
                                   std::int64_t n_samples, std::int64_t n_boot, double alpha,
                                   std::uint64_t seed, int threads) {
    BenchmarkData data;
    std::vector<CertifiedPairs> largest_pairs;
    for (int n : n_list) {
        const ReducedBasis rb = truncate_basis(base, n);
        auto online = std::make_shared<const ReducedOnline>(rb.online);
        const CertifiedEvaluator model = make_reduced_evaluator(online);
        double width_sum = 0.0;
        std::vector<CertifiedPairs> all_pairs;
        for (int i = 1; i <= static_cast<int>(ranges.size()); ++i) {
            const PickFreezeDesign design =
                generate_design(ranges, static_cast<std::size_t>(n_samples), i, seed);
            const CertifiedPairs pairs = evaluate_pairs(design, model, threads);
            try {
                const IndexBounds b = bound_sobol(pairs);
                width_sum += b.s_max - b.s_min;
            } catch (const DenominatorStraddlesZero&) {
                width_sum = std::numeric_limits<double>::infinity();
            }
            all_pairs.push_back(pairs);
        }
        data.sandwich.push_back({n, width_sum / static_cast<double>(ranges.size())});
        if (n == n_list.back()) largest_pairs = std::move(all_pairs);
    }
    // Sampling-only CI length: same surrogate values with radii forced to 0.
    double len_sum = 0.0;
    for (auto pairs : largest_pairs) {
        std::fill(pairs.eps.begin(), pairs.eps.end(), 0.0);
        std::fill(pairs.eps_prime.begin(), pairs.eps_prime.end(), 0.0);
        const CombinedCI ci = bootstrap_combined_ci(pairs, static_cast<std::size_t>(n_boot),
                                                    alpha, seed, threads);
        len_sum += ci.hi - ci.lo;
    }
    data.sampling.push_back({n_samples, len_sum / static_cast<double>(largest_pairs.size())});
    return data;
}

}  // namespace certsens
