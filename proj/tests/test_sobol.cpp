#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "certsens/csv.hpp"
#include "certsens/rng.hpp"
#include "certsens/sobol.hpp"

using namespace certsens;

namespace {

const std::vector<std::pair<double, double>> kUnitBox{{0.0, 1.0}, {0.0, 1.0}};

double linear_model(const std::vector<double>& x) { return x[0] + 2.0 * x[1]; }

CertifiedPairs linear_pairs(std::size_t n, int input, std::uint64_t seed) {
    const PickFreezeDesign d = generate_design(kUnitBox, n, input, seed);
    CertifiedPairs pairs;
    for (std::size_t k = 0; k < n; ++k) {
        pairs.y_tilde.push_back(linear_model(d.x[k]));
        pairs.y_tilde_prime.push_back(linear_model(d.substituted(k)));
        pairs.eps.push_back(0.0);
        pairs.eps_prime.push_back(0.0);
    }
    return pairs;
}

CertifiedPairs random_pairs(std::size_t n, double radius_cap, std::uint64_t seed) {
    const CounterRng rng(seed, CounterRng::kTest);
    CertifiedPairs pairs;
    for (std::size_t k = 0; k < n; ++k) {
        pairs.y_tilde.push_back(rng.uniform(4 * k, 0.0, 1.0));
        pairs.y_tilde_prime.push_back(rng.uniform(4 * k + 1, 0.0, 1.0));
        pairs.eps.push_back(rng.uniform(4 * k + 2, 0.0, radius_cap));
        pairs.eps_prime.push_back(rng.uniform(4 * k + 3, 0.0, radius_cap));
    }
    return pairs;
}

}  // namespace

TEST_CASE("design generation") {
    const PickFreezeDesign a = generate_design(kUnitBox, 100, 1, 5);
    const PickFreezeDesign b = generate_design(kUnitBox, 100, 1, 5);
    CHECK(a.x == b.x);
    CHECK(a.x_prime == b.x_prime);
    const PickFreezeDesign c = generate_design(kUnitBox, 100, 1, 6);
    CHECK(a.x != c.x);

    for (std::size_t k = 0; k < a.size(); ++k)
        for (int j = 0; j < 2; ++j) {
            CHECK(a.x[k][j] >= 0.0);
            CHECK(a.x[k][j] < 1.0);
        }

    CHECK_THROWS_AS(generate_design(kUnitBox, 1, 1, 5), ConfigError);
    CHECK_THROWS_AS(generate_design(kUnitBox, 10, 0, 5), ConfigError);
    CHECK_THROWS_AS(generate_design(kUnitBox, 10, 3, 5), ConfigError);

    const PickFreezeDesign deg =
        generate_design({{0.7, 0.7}, {0.0, 1.0}}, 50, 2, 5);
    for (std::size_t k = 0; k < deg.size(); ++k) {
        CHECK(deg.x[k][0] == 0.7);
        CHECK(deg.x_prime[k][0] == 0.7);
    }
}

TEST_CASE("design marginals pass a CLT check") {
    const std::size_t n = 10000;
    const PickFreezeDesign d = generate_design(kUnitBox, n, 1, 42);
    for (int j = 0; j < 2; ++j) {
        double s = 0.0;
        for (std::size_t k = 0; k < n; ++k) s += d.x[k][j];
        const double se = std::sqrt(1.0 / 12.0) / std::sqrt(double(n));
        CHECK(std::abs(s / n - 0.5) < 4.0 * se);
    }
}

TEST_CASE("substitution semantics") {
    const PickFreezeDesign d = generate_design(kUnitBox, 20, 2, 9);
    for (std::size_t k = 0; k < d.size(); ++k) {
        const auto s = d.substituted(k);
        CHECK(s[1] == d.x[k][1]);
        CHECK(s[0] == d.x_prime[k][0]);
    }
    // p = 1: everything frozen, primed outputs equal the plain ones.
    const PickFreezeDesign one = generate_design({{0.0, 1.0}}, 20, 1, 9);
    for (std::size_t k = 0; k < one.size(); ++k)
        CHECK(one.substituted(k) == one.x[k]);
}

TEST_CASE("evaluate_pairs is thread-count independent and tags failures") {
    const PickFreezeDesign d = generate_design(kUnitBox, 200, 1, 3);
    CertifiedEvaluator model = [](const std::vector<double>& x) {
        return std::make_pair(linear_model(x), 0.01 * x[0]);
    };
    const CertifiedPairs p1 = evaluate_pairs(d, model, 1);
    const CertifiedPairs p4 = evaluate_pairs(d, model, 4);
    CHECK(p1.y_tilde == p4.y_tilde);
    CHECK(p1.y_tilde_prime == p4.y_tilde_prime);
    CHECK(p1.eps == p4.eps);
    CHECK(p1.eps_prime == p4.eps_prime);

    CertifiedEvaluator bad = [](const std::vector<double>& x) -> std::pair<double, double> {
        if (x[0] > 0.9) throw SolverDiverged("boom");
        return {x[0], 0.0};
    };
    CHECK_THROWS_AS(evaluate_pairs(d, bad, 1), SolverDiverged);
    CHECK_THROWS_AS(evaluate_pairs(d, bad, 4), SolverDiverged);
}

TEST_CASE("point estimator oracles") {
    std::vector<double> y{1.0, 2.0, 5.0, -1.0};
    CHECK(estimate_sobol(y, y) == Catch::Approx(1.0).epsilon(1e-14));

    std::vector<double> constant(10, 3.0);
    CHECK_THROWS_AS(estimate_sobol(constant, constant), DegenerateVariance);
    CHECK_THROWS_AS(estimate_sobol({1.0}, {1.0}), ConfigError);

    // Y = X1 + 2 X2: S1 = 0.2, S2 = 0.8.
    const CertifiedPairs s1 = linear_pairs(100000, 1, 11);
    const CertifiedPairs s2 = linear_pairs(100000, 2, 11);
    CHECK(estimate_sobol(s1.y_tilde, s1.y_tilde_prime) == Catch::Approx(0.2).margin(0.02));
    CHECK(estimate_sobol(s2.y_tilde, s2.y_tilde_prime) == Catch::Approx(0.8).margin(0.02));

    // Independent y': index near zero.
    const CounterRng rng(4, CounterRng::kTest);
    std::vector<double> u(10000), v(10000);
    for (std::size_t k = 0; k < u.size(); ++k) {
        u[k] = rng.uniform(2 * k);
        v[k] = rng.uniform(2 * k + 1);
    }
    CHECK(std::abs(estimate_sobol(u, v)) < 0.05);
}

TEST_CASE("zero radii collapse the sandwich to the point estimate") {
    const CertifiedPairs pairs = linear_pairs(500, 1, 17);
    const IndexBounds b = bound_sobol(pairs);
    const double est = estimate_sobol(pairs.y_tilde, pairs.y_tilde_prime);
    CHECK(b.s_min == Catch::Approx(est).margin(1e-12));
    CHECK(b.s_max == Catch::Approx(est).margin(1e-12));
}

TEST_CASE("sandwich contains every vertex at N = 4") {
    const CertifiedPairs pairs = random_pairs(4, 0.02, 23);
    const IndexBounds b = bound_sobol(pairs);
    std::vector<double> y(4), yp(4);
    for (int mask = 0; mask < 256; ++mask) {
        for (int k = 0; k < 4; ++k) {
            y[k] = pairs.y_tilde[k] + ((mask >> k) & 1 ? 1.0 : -1.0) * pairs.eps[k];
            yp[k] = pairs.y_tilde_prime[k] +
                    ((mask >> (4 + k)) & 1 ? 1.0 : -1.0) * pairs.eps_prime[k];
        }
        const double est = estimate_sobol(y, yp);
        CHECK(est >= b.s_min);
        CHECK(est <= b.s_max);
    }
}

TEST_CASE("sandwich contains sampled admissible truths at N = 8") {
    const CertifiedPairs pairs = random_pairs(8, 0.02, 31);
    const IndexBounds b = bound_sobol(pairs);
    const CounterRng rng(32, CounterRng::kTest);
    std::vector<double> y(8), yp(8);
    std::uint64_t ctr = 0;
    for (int trial = 0; trial < 100000; ++trial) {
        for (int k = 0; k < 8; ++k) {
            y[k] = pairs.y_tilde[k] + rng.uniform(ctr++, -pairs.eps[k], pairs.eps[k]);
            yp[k] = pairs.y_tilde_prime[k] +
                    rng.uniform(ctr++, -pairs.eps_prime[k], pairs.eps_prime[k]);
        }
        const double est = estimate_sobol(y, yp);
        REQUIRE(est >= b.s_min);
        REQUIRE(est <= b.s_max);
    }
}

TEST_CASE("doubling radii never shrinks the sandwich") {
    CertifiedPairs pairs = random_pairs(50, 0.01, 41);
    const IndexBounds b1 = bound_sobol(pairs);
    for (auto& e : pairs.eps) e *= 2.0;
    for (auto& e : pairs.eps_prime) e *= 2.0;
    const IndexBounds b2 = bound_sobol(pairs);
    CHECK(b2.s_min <= b1.s_min);
    CHECK(b2.s_max >= b1.s_max);
}

TEST_CASE("huge radii make the denominator interval straddle zero") {
    CertifiedPairs pairs = random_pairs(20, 0.01, 43);
    for (auto& e : pairs.eps) e = 50.0;
    CHECK_THROWS_AS(bound_sobol(pairs), DenominatorStraddlesZero);
}

TEST_CASE("estimator invariances carry over to the sandwich") {
    CertifiedPairs pairs = random_pairs(40, 0.01, 47);
    const IndexBounds base = bound_sobol(pairs);

    // Joint k-permutation.
    CertifiedPairs perm = pairs;
    std::vector<std::size_t> idx(40);
    for (std::size_t k = 0; k < 40; ++k) idx[k] = (k * 17 + 5) % 40;
    for (std::size_t k = 0; k < 40; ++k) {
        perm.y_tilde[k] = pairs.y_tilde[idx[k]];
        perm.y_tilde_prime[k] = pairs.y_tilde_prime[idx[k]];
        perm.eps[k] = pairs.eps[idx[k]];
        perm.eps_prime[k] = pairs.eps_prime[idx[k]];
    }
    const IndexBounds pb = bound_sobol(perm);
    CHECK(pb.s_min == Catch::Approx(base.s_min).margin(1e-13));
    CHECK(pb.s_max == Catch::Approx(base.s_max).margin(1e-13));

    // Shift and scale invariance of the point estimator.
    std::vector<double> y = pairs.y_tilde, yp = pairs.y_tilde_prime;
    const double est = estimate_sobol(y, yp);
    std::vector<double> ys = y, yps = yp;
    for (auto& v : ys) v += 13.5;
    for (auto& v : yps) v += -2.25;
    CHECK(estimate_sobol(ys, yps) == Catch::Approx(est).epsilon(1e-12));
    std::vector<double> yc = y, ypc = yp;
    for (auto& v : yc) v *= -3.0;
    for (auto& v : ypc) v *= -3.0;
    CHECK(estimate_sobol(yc, ypc) == Catch::Approx(est).epsilon(1e-12));
}

TEST_CASE("quantile definition") {
    CHECK(quantile({3.0, 1.0, 2.0}, 0.0) == 1.0);
    CHECK(quantile({3.0, 1.0, 2.0}, 1.0) == 3.0);
    CHECK(quantile({1.0, 2.0, 3.0, 4.0}, 0.5) == 2.0);
    CHECK_THROWS_AS(quantile({}, 0.5), ConfigError);

    const CounterRng rng(51, CounterRng::kTest);
    std::uint64_t ctr = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t n = 1 + rng.uniform_index(ctr++, 30);
        std::vector<double> vals(n);
        for (auto& v : vals) v = rng.uniform(ctr++);
        const double q = rng.uniform(ctr++);
        std::vector<double> sorted = vals;
        std::sort(sorted.begin(), sorted.end());
        const std::size_t want =
            std::clamp<std::size_t>(std::size_t(std::ceil(q * double(n))), 1, n);
        CHECK(quantile(vals, q) == sorted[want - 1]);
    }
}

TEST_CASE("bootstrap endpoints are order statistics of the replications") {
    const CertifiedPairs pairs = random_pairs(60, 0.005, 57);
    const std::size_t B = 200;
    const CombinedCI ci = bootstrap_combined_ci(pairs, B, 0.05, 99, 1);

    // Rebuild every replication with the same counter scheme.
    const CounterRng rng(99, CounterRng::kBootstrap);
    std::vector<double> lower, upper;
    std::vector<std::size_t> list(60);
    for (std::size_t b = 0; b < B; ++b) {
        for (std::size_t j = 0; j < 60; ++j) list[j] = rng.uniform_index(b * 60 + j, 60);
        CertifiedPairs res;
        for (std::size_t j : list) {
            res.y_tilde.push_back(pairs.y_tilde[j]);
            res.y_tilde_prime.push_back(pairs.y_tilde_prime[j]);
            res.eps.push_back(pairs.eps[j]);
            res.eps_prime.push_back(pairs.eps_prime[j]);
        }
        const IndexBounds bb = bound_sobol(res);
        lower.push_back(bb.s_min);
        upper.push_back(bb.s_max);
    }
    CHECK(ci.lo == Catch::Approx(quantile(lower, 0.025)).margin(1e-13));
    CHECK(ci.hi == Catch::Approx(quantile(upper, 0.975)).margin(1e-13));
}

TEST_CASE("bootstrap is thread-count independent") {
    const CertifiedPairs pairs = random_pairs(100, 0.005, 61);
    const CombinedCI c1 = bootstrap_combined_ci(pairs, 300, 0.05, 7, 1);
    const CombinedCI c4 = bootstrap_combined_ci(pairs, 300, 0.05, 7, 4);
    CHECK(c1.lo == c4.lo);
    CHECK(c1.hi == c4.hi);
}

TEST_CASE("radii widen the combined CI for every seed") {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        CertifiedPairs pairs = random_pairs(80, 0.01, 100 + seed);
        CertifiedPairs flat = pairs;
        std::fill(flat.eps.begin(), flat.eps.end(), 0.0);
        std::fill(flat.eps_prime.begin(), flat.eps_prime.end(), 0.0);
        const CombinedCI wide = bootstrap_combined_ci(pairs, 200, 0.05, seed, 1);
        const CombinedCI narrow = bootstrap_combined_ci(flat, 200, 0.05, seed, 1);
        CHECK(wide.hi - wide.lo >= narrow.hi - narrow.lo);
        CHECK(wide.lo <= narrow.lo);
        CHECK(wide.hi >= narrow.hi);
    }
}

TEST_CASE("combined CI coverage on the linear model") {
    int covered = 0;
    for (std::uint64_t rep = 0; rep < 100; ++rep) {
        const CertifiedPairs pairs = linear_pairs(500, 1, 1000 + rep);
        const CombinedCI ci = bootstrap_combined_ci(pairs, 300, 0.05, 1000 + rep, 1);
        if (ci.lo <= 0.2 && 0.2 <= ci.hi) ++covered;
    }
    INFO("coverage " << covered << "/100");
    CHECK(covered >= 90);
}

TEST_CASE("unbounded replication policy") {
    // Radii so large every replication straddles: CI reported unbounded.
    CertifiedPairs pairs = random_pairs(20, 0.01, 71);
    for (auto& e : pairs.eps) e = 50.0;
    const CombinedCI ci = bootstrap_combined_ci(pairs, 100, 0.05, 3, 1);
    CHECK(ci.unbounded);
    CHECK(std::isinf(ci.lo));
    CHECK(std::isinf(ci.hi));
}

TEST_CASE("pairs CSV round-trip") {
    const CertifiedPairs pairs = random_pairs(25, 0.03, 81);
    std::ostringstream os;
    write_pairs_csv(os, pairs);
    std::istringstream is(os.str());
    const CertifiedPairs back = read_pairs_csv(is);
    CHECK(back.y_tilde == pairs.y_tilde);
    CHECK(back.y_tilde_prime == pairs.y_tilde_prime);
    CHECK(back.eps == pairs.eps);
    CHECK(back.eps_prime == pairs.eps_prime);

    std::istringstream bad("wrong,header\n");
    CHECK_THROWS_AS(read_pairs_csv(bad), ConfigError);
}
