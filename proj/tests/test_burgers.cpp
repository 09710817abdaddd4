#include <catch2/catch_amalgamated.hpp>

#include <Eigen/Dense>
#include <cmath>

#include "certsens/burgers.hpp"
#include "certsens/rng.hpp"

using namespace certsens;

TEST_CASE("boundary values follow the compatibility conditions") {
    auto [b0, b1] = boundary_values({10.0, 0.0});
    CHECK(b0 == 0.0);
    CHECK(b1 == Catch::Approx(5.0 * std::sin(0.5)).epsilon(1e-15));
    CHECK(b1 == Catch::Approx(2.3971).margin(5e-5));

    auto [c0, c1] = boundary_values({10.0, 0.3});
    CHECK(c0 == Catch::Approx(0.09).epsilon(1e-15));
    CHECK(c1 == Catch::Approx(0.09 + 5.0 * std::sin(0.5)).epsilon(1e-15));

    auto [d0, d1] = boundary_values({10.0, -0.3});
    CHECK(d0 == c0);
    CHECK(d1 == c1);
}

TEST_CASE("initial condition matches the profile and its endpoints") {
    const Discretization d{60, 0.01, 0.05};
    const SpatialState u = initial_condition({10.0, 0.3}, d);
    REQUIRE(u.size() == 61);
    CHECK(u[30] == Catch::Approx(0.09 + 5.0 * std::sin(0.25)).epsilon(1e-14));
    auto [b0, b1] = boundary_values({10.0, 0.3});
    CHECK(u.front() == b0);
    CHECK(u.back() == b1);

    const SpatialState z = initial_condition({10.0, 0.0}, d);
    CHECK(z.front() == 0.0);

    for (double u0m : {-0.3, -0.1, 0.0, 0.12, 0.3}) {
        const SpatialState v = initial_condition({5.0, u0m}, d);
        auto [e0, e1] = boundary_values({5.0, u0m});
        CHECK(v.front() == e0);
        CHECK(v.back() == e1);
    }
}

TEST_CASE("discretization validation") {
    CHECK_THROWS_AS(Discretization(1, 0.01, 0.05), ConfigError);
    CHECK_THROWS_AS(Discretization(60, -0.01, 0.05), ConfigError);
    CHECK_THROWS_AS(Discretization(60, 0.01, 0.055), ConfigError);
    CHECK_NOTHROW(Discretization(60, 0.01, 0.0));
    CHECK(Discretization(60, 0.01, 0.05).num_steps() == 5);
    CHECK(Discretization(60, 0.01, 0.0).num_steps() == 0);
}

TEST_CASE("one step agrees with a dense linear-algebra reference") {
    const Discretization d{40, 0.01, 0.05};
    const ParameterPoint p{7.5, 0.2};
    const SpatialState u = initial_condition(p, d);
    const SpatialState next = step(u, p, d);

    // Assemble (I - dt nu D) and the right-hand side independently and
    // solve with a dense factorization.
    const int m = d.n_space - 1;
    const double h = d.h();
    const double mu = d.dt * p.nu / (h * h);
    auto [b0, b1] = boundary_values(p);
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(m, m);
    Eigen::VectorXd rhs(m);
    for (int i = 1; i < d.n_space; ++i) {
        A(i - 1, i - 1) = 1.0 + 2.0 * mu;
        if (i > 1) A(i - 1, i - 2) = -mu;
        if (i < d.n_space - 1) A(i - 1, i) = -mu;
        const double conv = (u[i + 1] * u[i + 1] - u[i - 1] * u[i - 1]) / (4.0 * h);
        rhs(i - 1) = u[i] + d.dt * (1.0 - conv);
    }
    rhs(0) += mu * b0;
    rhs(m - 1) += mu * b1;
    const Eigen::VectorXd ref = A.partialPivLu().solve(rhs);

    CHECK(next.front() == b0);
    CHECK(next.back() == b1);
    for (int i = 1; i < d.n_space; ++i)
        CHECK(next[i] == Catch::Approx(ref(i - 1)).margin(1e-12));
}

TEST_CASE("diffusion-dominated steady state with linear data is preserved") {
    const Discretization d{60, 0.001, 0.05};
    const ParameterPoint p{1e9, 0.1};
    auto [b0, b1] = boundary_values(p);
    SpatialState lin(d.n_space + 1);
    for (int i = 0; i <= d.n_space; ++i) lin[i] = b0 + (b1 - b0) * d.node(i);

    StepOptions opts;
    opts.forcing = 0.0;
    const SpatialState next = step(lin, p, d, opts);
    for (int i = 0; i <= d.n_space; ++i) CHECK(next[i] == Catch::Approx(lin[i]).margin(1e-8));
}

TEST_CASE("self-convergence of the output under refinement") {
    const ParameterPoint p{10.0, 0.1};
    const double f1 = output_functional(solve_full(p, Discretization{60, 0.01, 0.05}));
    const double f2 = output_functional(solve_full(p, Discretization{120, 0.005, 0.05}));
    const double f3 = output_functional(solve_full(p, Discretization{240, 0.0025, 0.05}));
    const double d12 = std::abs(f1 - f2);
    const double d23 = std::abs(f2 - f3);
    CHECK(d23 < d12);
    CHECK(d12 / d23 > 1.5);
}

TEST_CASE("solve_full shape, determinism, and K=0 edge") {
    const Discretization d{60, 0.01, 0.05};
    const ParameterPoint p{10.0, 0.0};
    const Trajectory t1 = solve_full(p, d);
    REQUIRE(t1.states.size() == 6);
    const Trajectory t2 = solve_full(p, d);
    for (std::size_t k = 0; k < t1.states.size(); ++k)
        CHECK(t1.states[k] == t2.states[k]);

    auto [b0, b1] = boundary_values(p);
    for (const auto& s : t1.states) {
        CHECK(s.front() == b0);
        CHECK(s.back() == b1);
    }

    const Trajectory t0 = solve_full(p, Discretization{60, 0.01, 0.0});
    REQUIRE(t0.states.size() == 1);
    CHECK(t0.states[0] == initial_condition(p, d));
}

TEST_CASE("divergence guard fires") {
    const Discretization d{60, 0.5, 5.0};
    StepOptions opts;
    opts.magnitude_cap = 10.0;
    const ParameterPoint p{0.01, 0.3};
    CHECK_THROWS_AS(solve_full(p, d, opts), SolverDiverged);
    try {
        solve_full(p, d, opts);
    } catch (const SolverDiverged& e) {
        CHECK(std::string(e.what()).find("time step") != std::string::npos);
    }
}

TEST_CASE("output is even in u0m") {
    const Discretization d{60, 0.01, 0.05};
    const CounterRng rng(7, CounterRng::kTest);
    for (int k = 0; k < 20; ++k) {
        const double nu = rng.uniform(2 * k, 1.0, 20.0);
        const double u0m = rng.uniform(2 * k + 1, 0.0, 0.3);
        const double fp = output_functional(solve_full({nu, u0m}, d));
        const double fm = output_functional(solve_full({nu, -u0m}, d));
        CHECK(fp == fm);
    }
}

TEST_CASE("output functional arithmetic") {
    const int ns = 60;
    SpatialState c(ns + 1, 3.0);
    CHECK(output_functional_state(c, ns) == Catch::Approx(3.0 * 61.0 / 60.0).epsilon(1e-15));
    SpatialState z(ns + 1, 0.0);
    CHECK(output_functional_state(z, ns) == 0.0);
}

TEST_CASE("discrete L2 norm oracles") {
    SpatialState one(61, 1.0);
    CHECK(l2_norm(one) == Catch::Approx(1.0).epsilon(1e-14));
    SpatialState two(61, 2.0);
    CHECK(l2_norm(two) == Catch::Approx(2.0 * l2_norm(one)).epsilon(1e-14));

    // Trapezoid sums sin^2(pi x) exactly to 1/2 on a uniform grid.
    const int ns = 60;
    SpatialState s(ns + 1);
    for (int i = 0; i <= ns; ++i) s[i] = std::sin(M_PI * i / ns);
    CHECK(l2_norm(s) == Catch::Approx(std::sqrt(0.5)).epsilon(1e-12));

    SpatialState a{1.0, 2.0, 3.0}, b{0.5, -1.0, 2.0};
    CHECK(l2_inner(a, b) == Catch::Approx(0.5 * (0.5 * 1.0 * 0.5 + 0.5 * 3.0 * 2.0) +
                                          0.5 * 2.0 * -1.0)
                                 .epsilon(1e-14));
}
