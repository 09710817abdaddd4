#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "certsens/burgers.hpp"
#include "certsens/errors.hpp"

namespace certsens {

/// All full trajectories collected at a set of training parameters.
struct SnapshotSet {
    std::vector<ParameterPoint> parameters;
    std::vector<SpatialState> states;      // every time-step state, all points
    std::vector<int> state_param;          // states[j] came from parameters[state_param[j]]
    Discretization disc;
};

inline SnapshotSet collect_snapshots(const std::vector<ParameterPoint>& training,
                                     const Discretization& disc) {
    if (training.empty()) throw ConfigError("training set is empty");
    SnapshotSet set;
    set.parameters = training;
    set.disc = disc;
    for (std::size_t t = 0; t < training.size(); ++t) {
        Trajectory traj;
        try {
            traj = solve_full(training[t], disc);
        } catch (const SolverDiverged& e) {
            throw SolverDiverged(std::string(e.what()) + " at training point (nu=" +
                                 std::to_string(training[t].nu) + ", u0m=" +
                                 std::to_string(training[t].u0m) + ")");
        }
        for (auto& s : traj.states) {
            set.states.push_back(std::move(s));
            set.state_param.push_back(static_cast<int>(t));
        }
    }
    return set;
}

/// Boundary lift: L(x; u0m) = u0m^2 + 5 sin(0.5) x, which matches the
/// Dirichlet data (b0, b1) for every u0m.  The grid part below is the
/// parameter-independent linear piece; the constant piece is theta = u0m^2
/// times the all-ones vector.
inline SpatialState lift_linear_part(const Discretization& d) {
    SpatialState l(d.n_space + 1);
    const double slope = 5.0 * std::sin(0.5);
    for (int i = 0; i <= d.n_space; ++i) l[i] = slope * d.node(i);
    l.front() = 0.0;
    l.back() = slope;
    return l;
}

/// Everything the online phase touches.  Holds only n-sized (or n^2,
/// n^4...) objects and scalars; nothing scales with the fine grid.
struct ReducedOnline {
    int n = 0;
    int n_space = 0;
    int num_steps = 0;
    double dt = 0.0;
    double h = 0.0;
    double lambda_min = 0.0;   // smallest eigenvalue of the Dirichlet -Laplacian
    double c_out = 0.0;        // L2 operator norm of the output functional
    double bound_cap = 1e6;

    Eigen::MatrixXd diffusion;            // <phi_i, D phi_j>, n x n
    Eigen::VectorXd diffusion_lift;       // <phi_i, D lift_lin>, n
    std::vector<Eigen::MatrixXd> conv;    // conv[i](a,b) = <phi_i, C(psi_a, psi_b)>, (n+2)^2
    Eigen::VectorXd forcing;              // <phi_i, 1>, n

    Eigen::VectorXd init_coeffs;          // projection of the homogenized IC
    double init_error = 0.0;              // its projection-error norm

    double out_lift = 0.0;                // output functional of lift_lin
    double out_one = 0.0;                 // output functional of the ones vector
    Eigen::VectorXd out_modes;            // output functional of each mode

    Eigen::VectorXd mode_inf_norms;       // max-norm of each mode

    Eigen::MatrixXd residual_gram;        // Gram of the residual component fields

    int num_component_fields() const { return n + 2; }
    int num_residual_fields() const {
        const int nc = num_component_fields();
        return 2 * n + 2 + nc * (nc + 1) / 2;
    }
};

struct ReducedBasis {
    Discretization disc;
    Eigen::MatrixXd modes;          // (n_space+1) x n, orthonormal, zero at boundary
    SpatialState lift_lin;
    std::vector<double> pod_spectrum;   // all Gram eigenvalues, descending
    int snapshot_rank = 0;              // eigenvalues above rank_tol * lambda_max
    ReducedOnline online;
};

struct ReducedTrajectory {
    ParameterPoint params;
    std::vector<Eigen::VectorXd> coeffs;  // num_steps+1 entries of length n
};

/// Surrogate output with its rigorous error radius.
struct CertifiedOutput {
    double f_tilde = 0.0;
    double eps = 0.0;
    std::vector<double> eps_u_series;
};

namespace detail {

/// Conservative-form convection product field on the interior,
/// C(u,v)_i = (u_{i+1} v_{i+1} - u_{i-1} v_{i-1}) / (4h); boundary
/// entries zero.
inline SpatialState conv_field(const SpatialState& u, const SpatialState& v, double h) {
    const std::size_t n = u.size() - 1;
    SpatialState out(n + 1, 0.0);
    for (std::size_t i = 1; i < n; ++i)
        out[i] = (u[i + 1] * v[i + 1] - u[i - 1] * v[i - 1]) / (4.0 * h);
    return out;
}

/// Second-difference field D u on the interior (boundary entries zero).
inline SpatialState second_diff_field(const SpatialState& u, double h) {
    const std::size_t n = u.size() - 1;
    SpatialState out(n + 1, 0.0);
    for (std::size_t i = 1; i < n; ++i)
        out[i] = (u[i + 1] - 2.0 * u[i] + u[i - 1]) / (h * h);
    return out;
}

inline SpatialState column(const Eigen::MatrixXd& m, int j) {
    SpatialState s(m.rows());
    for (int i = 0; i < m.rows(); ++i) s[i] = m(i, j);
    return s;
}

}  // namespace detail

/// Builds every projected operator and bound ingredient from the mode
/// matrix.  Shared by the initial build and by truncation to smaller n.
inline ReducedOnline assemble_online(const Eigen::MatrixXd& modes,
                                     const SpatialState& lift_lin,
                                     const Discretization& disc) {
    const int n = static_cast<int>(modes.cols());
    const int ns = disc.n_space;
    const double h = disc.h();

    ReducedOnline on;
    on.n = n;
    on.n_space = ns;
    on.num_steps = disc.num_steps();
    on.dt = disc.dt;
    on.h = h;
    on.lambda_min = 4.0 / (h * h) * std::pow(std::sin(M_PI / (2.0 * ns)), 2);
    // Output functional l(u) = (1/N) sum u_i restricted to boundary-vanishing
    // error fields: |l(e)| <= sqrt((N-1) h^2 / h) ||e|| = sqrt((N-1)/N) ||e||.
    on.c_out = std::sqrt(static_cast<double>(ns - 1) / ns);

    std::vector<SpatialState> phi(n);
    for (int j = 0; j < n; ++j) phi[j] = detail::column(modes, j);

    // Component fields psi for the quadratic convection term:
    // psi_0 = lift_lin, psi_1 = ones, psi_{2+j} = phi_j.
    const int nc = n + 2;
    std::vector<SpatialState> psi(nc);
    psi[0] = lift_lin;
    psi[1] = SpatialState(ns + 1, 1.0);
    for (int j = 0; j < n; ++j) psi[2 + j] = phi[j];

    on.diffusion.resize(n, n);
    on.diffusion_lift.resize(n);
    on.forcing.resize(n);
    on.out_modes.resize(n);
    on.mode_inf_norms.resize(n);
    const SpatialState ones(ns + 1, 1.0);
    const SpatialState d_lift = detail::second_diff_field(lift_lin, h);
    std::vector<SpatialState> d_phi(n);
    for (int j = 0; j < n; ++j) d_phi[j] = detail::second_diff_field(phi[j], h);

    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) on.diffusion(i, j) = l2_inner(phi[i], d_phi[j]);
        on.diffusion_lift(i) = l2_inner(phi[i], d_lift);
        on.forcing(i) = l2_inner(phi[i], ones);
        on.out_modes(i) = output_functional_state(phi[i], ns);
        double m = 0.0;
        for (double v : phi[i]) m = std::max(m, std::abs(v));
        on.mode_inf_norms(i) = m;
    }
    on.out_lift = output_functional_state(lift_lin, ns);
    on.out_one = output_functional_state(ones, ns);

    // Convection tensor over component fields.
    std::vector<std::vector<SpatialState>> q(nc);
    on.conv.assign(n, Eigen::MatrixXd(nc, nc));
    for (int a = 0; a < nc; ++a) {
        q[a].resize(nc);
        for (int b = a; b < nc; ++b) q[a][b] = detail::conv_field(psi[a], psi[b], h);
    }
    for (int i = 0; i < n; ++i)
        for (int a = 0; a < nc; ++a)
            for (int b = a; b < nc; ++b) {
                const double v = l2_inner(phi[i], q[a][b]);
                on.conv[i](a, b) = v;
                on.conv[i](b, a) = v;
            }

    // Homogenized initial condition w0 = u0 - L, parameter-free:
    // 5 sin(0.5 x) - 5 sin(0.5) x.
    SpatialState w0(ns + 1);
    for (int i = 0; i <= ns; ++i)
        w0[i] = 5.0 * std::sin(0.5 * disc.node(i)) - lift_lin[i];
    w0.front() = 0.0;
    w0.back() = 0.0;
    on.init_coeffs.resize(n);
    for (int j = 0; j < n; ++j) on.init_coeffs(j) = l2_inner(phi[j], w0);
    SpatialState w0_err = w0;
    for (int j = 0; j < n; ++j)
        for (int i = 0; i <= ns; ++i) w0_err[i] -= on.init_coeffs(j) * phi[j][i];
    // Tiny inflation keeps the bound one-sided in floating point: when the
    // state error sits exactly at the projection error, recomputing the
    // same norm from a reconstructed state differs by a few ulps.
    on.init_error = l2_norm(w0_err) * (1.0 + 1e-9) + 1e-13;

    // Residual component fields, in a fixed order:
    //   [phi_j] [D phi_j] [D lift_lin] [ones] [conv q_ab, a<=b]
    std::vector<SpatialState> fields;
    fields.reserve(on.num_residual_fields());
    for (int j = 0; j < n; ++j) fields.push_back(phi[j]);
    for (int j = 0; j < n; ++j) fields.push_back(d_phi[j]);
    fields.push_back(d_lift);
    {
        SpatialState ones_int = ones;
        ones_int.front() = 0.0;
        ones_int.back() = 0.0;
        fields.push_back(ones_int);
    }
    for (int a = 0; a < nc; ++a)
        for (int b = a; b < nc; ++b) fields.push_back(q[a][b]);
    // phi fields carry their (zero) boundary values; all residual algebra
    // lives on the interior, so zero the endpoints uniformly.
    for (auto& f : fields) {
        f.front() = 0.0;
        f.back() = 0.0;
    }
    const int m = static_cast<int>(fields.size());
    on.residual_gram.resize(m, m);
    for (int a = 0; a < m; ++a)
        for (int b = a; b < m; ++b) {
            const double v = l2_inner(fields[a], fields[b]);
            on.residual_gram(a, b) = v;
            on.residual_gram(b, a) = v;
        }
    return on;
}

struct BasisBuildOptions {
    /// Gram eigenvalues below rank_tol * lambda_max do not count toward the
    /// usable snapshot rank.
    double rank_tol = 1e-12;
    /// When the requested n exceeds the snapshot rank, pad the basis with
    /// orthonormalized interior Fourier modes instead of failing.  The
    /// extra directions only enlarge the Galerkin space; every bound stays
    /// valid because it is computed a posteriori.
    bool fill_to_n = false;
};

/// POD build: homogenize snapshots against their own lift, eigensolve the
/// L2 Gram matrix, keep the n dominant modes, re-orthonormalize.
inline ReducedBasis build_basis(const SnapshotSet& snapshots, int n,
                                const BasisBuildOptions& opts = {}) {
    const int m = static_cast<int>(snapshots.states.size());
    if (n < 1 || n > m)
        throw ConfigError("basis size " + std::to_string(n) + " outside [1, " +
                          std::to_string(m) + "]");
    const Discretization& disc = snapshots.disc;
    const int ns = disc.n_space;
    const SpatialState lift_lin = lift_linear_part(disc);

    std::vector<SpatialState> w(m);
    for (int j = 0; j < m; ++j) {
        const ParameterPoint& p = snapshots.parameters[snapshots.state_param[j]];
        const double theta = p.u0m * p.u0m;
        w[j] = snapshots.states[j];
        for (int i = 0; i <= ns; ++i) w[j][i] -= theta + lift_lin[i];
        w[j].front() = 0.0;
        w[j].back() = 0.0;
    }

    Eigen::MatrixXd gram(m, m);
    for (int a = 0; a < m; ++a)
        for (int b = a; b < m; ++b) {
            const double v = l2_inner(w[a], w[b]);
            gram(a, b) = v;
            gram(b, a) = v;
        }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram);
    if (eig.info() != Eigen::Success) throw RankDeficient("POD eigensolver failed");

    // Ascending order from Eigen; flip to descending.
    std::vector<double> lambda(m);
    for (int j = 0; j < m; ++j) lambda[j] = eig.eigenvalues()(m - 1 - j);
    const double lmax = std::max(lambda[0], 0.0);
    int rank = 0;
    while (rank < m && lambda[rank] > opts.rank_tol * lmax) ++rank;
    if (n > rank && !opts.fill_to_n)
        throw RankDeficient("snapshot Gram has rank " + std::to_string(rank) +
                            " < requested n = " + std::to_string(n));
    const int n_pod = std::min(n, rank);

    Eigen::MatrixXd modes(ns + 1, n);
    for (int j = 0; j < n_pod; ++j) {
        const Eigen::VectorXd v = eig.eigenvectors().col(m - 1 - j);
        const double scale = 1.0 / std::sqrt(lambda[j]);
        for (int i = 0; i <= ns; ++i) {
            double s = 0.0;
            for (int a = 0; a < m; ++a) s += v(a) * w[a][i];
            modes(i, j) = s * scale;
        }
        modes(0, j) = 0.0;
        modes(ns, j) = 0.0;
    }

    // Complement with interior Fourier modes when asked for more
    // directions than the snapshots numerically support.
    if (n_pod < n) {
        int filled = n_pod;
        for (int freq = 1; filled < n && freq <= 4 * (ns + n); ++freq) {
            SpatialState cand(ns + 1, 0.0);
            for (int i = 1; i < ns; ++i)
                cand[i] = std::sin(freq * M_PI * disc.node(i));
            for (int k = 0; k < filled; ++k) {
                SpatialState ck(ns + 1);
                for (int i = 0; i <= ns; ++i) ck[i] = modes(i, k);
                const double proj = l2_inner(ck, cand);
                for (int i = 0; i <= ns; ++i) cand[i] -= proj * ck[i];
            }
            const double nrm = l2_norm(cand);
            if (nrm < 1e-6) continue;  // direction already represented
            for (int i = 0; i <= ns; ++i) modes(i, filled) = cand[i] / nrm;
            modes(0, filled) = 0.0;
            modes(ns, filled) = 0.0;
            ++filled;
        }
        if (filled < n)
            throw RankDeficient("could not complement basis to n = " + std::to_string(n));
    }

    // Two passes of modified Gram-Schmidt in the discrete L2 inner product.
    for (int pass = 0; pass < 2; ++pass) {
        for (int j = 0; j < n; ++j) {
            SpatialState cj = detail::column(modes, j);
            for (int k = 0; k < j; ++k) {
                SpatialState ck = detail::column(modes, k);
                const double proj = l2_inner(ck, cj);
                for (int i = 0; i <= ns; ++i) cj[i] -= proj * ck[i];
            }
            const double nrm = l2_norm(cj);
            if (nrm < 1e-14) throw RankDeficient("mode " + std::to_string(j) +
                                                 " vanished during orthonormalization");
            for (int i = 0; i <= ns; ++i) modes(i, j) = cj[i] / nrm;
            modes(0, j) = 0.0;
            modes(ns, j) = 0.0;
        }
    }

    ReducedBasis rb;
    rb.disc = disc;
    rb.modes = std::move(modes);
    rb.lift_lin = lift_lin;
    rb.pod_spectrum = std::move(lambda);
    rb.snapshot_rank = rank;
    rb.online = assemble_online(rb.modes, rb.lift_lin, disc);
    return rb;
}

/// First n modes of an existing basis, with operators reassembled.
inline ReducedBasis truncate_basis(const ReducedBasis& rb, int n) {
    if (n < 1 || n > rb.online.n)
        throw ConfigError("truncation size outside [1, n]");
    ReducedBasis out;
    out.disc = rb.disc;
    out.modes = rb.modes.leftCols(n);
    out.lift_lin = rb.lift_lin;
    out.pod_spectrum = rb.pod_spectrum;
    out.snapshot_rank = rb.snapshot_rank;
    out.online = assemble_online(out.modes, out.lift_lin, out.disc);
    return out;
}

inline SpatialState reconstruct(const ReducedBasis& rb, const Eigen::VectorXd& coeffs,
                                const ParameterPoint& params) {
    const int ns = rb.disc.n_space;
    const double theta = params.u0m * params.u0m;
    SpatialState u(ns + 1);
    for (int i = 0; i <= ns; ++i) {
        double s = theta + rb.lift_lin[i];
        for (int j = 0; j < coeffs.size(); ++j) s += coeffs(j) * rb.modes(i, j);
        u[i] = s;
    }
    auto [b0, b1] = boundary_values(params);
    u.front() = b0;
    u.back() = b1;
    return u;
}

/// Online Galerkin solver plus the residual-energy error bound.  A single
/// instance is reusable across parameter points; it owns all workspaces, so
/// repeated evaluation does no allocation beyond the first call.
class ReducedSolver {
public:
    explicit ReducedSolver(const ReducedOnline& on) : on_(on) {}

    /// Galerkin solve of the same semi-implicit scheme as the full model,
    /// projected on the reduced space.
    ReducedTrajectory solve(const ParameterPoint& params) const {
        if (!(params.nu > 0.0)) throw ConfigError("nu must be > 0");
        ReducedTrajectory traj;
        traj.params = params;
        traj.coeffs.reserve(on_.num_steps + 1);
        prepare(params);
        Eigen::VectorXd c = on_.init_coeffs;
        traj.coeffs.push_back(c);
        for (int k = 0; k < on_.num_steps; ++k) {
            c = advance(c, params);
            for (int j = 0; j < on_.n; ++j)
                if (!std::isfinite(c(j)))
                    throw SolverDiverged("reduced coefficient non-finite at step " +
                                         std::to_string(k + 1));
            traj.coeffs.push_back(c);
        }
        return traj;
    }

    /// Per-step bounds eps_u(X, t_k) on the L2 state error of the
    /// reconstructed reduced trajectory.  Derivation in docs/error_bound.md.
    std::vector<double> error_bound_series(const ParameterPoint& params,
                                           const ReducedTrajectory& traj) const {
        prepare(params);
        std::vector<double> eps(on_.num_steps + 1);
        eps[0] = on_.init_error;
        const double sigma_min = 1.0 + on_.dt * params.nu * on_.lambda_min;
        const double sqrt_ns = std::sqrt(static_cast<double>(on_.n_space));
        const double theta = params.u0m * params.u0m;
        const double lift_max = theta + 5.0 * std::sin(0.5);
        for (int k = 0; k < on_.num_steps; ++k) {
            const double rnorm = residual_norm(traj.coeffs[k], traj.coeffs[k + 1], params);
            double umax = lift_max;
            for (int j = 0; j < on_.n; ++j)
                umax += std::abs(traj.coeffs[k](j)) * on_.mode_inf_norms(j);
            const double big_m = 2.0 * umax + sqrt_ns * eps[k];
            const double lipschitz = big_m / (2.0 * on_.h);
            const double next = ((1.0 + on_.dt * lipschitz) * eps[k] + rnorm) / sigma_min;
            eps[k + 1] = std::max(eps[k], next);
            if (eps[k + 1] > on_.bound_cap)
                throw BoundBlowup("state-error bound " + std::to_string(eps[k + 1]) +
                                  " exceeded cap at step " + std::to_string(k + 1));
        }
        return eps;
    }

    CertifiedOutput output_with_bound(const ParameterPoint& params) const {
        const ReducedTrajectory traj = solve(params);
        CertifiedOutput out;
        out.eps_u_series = error_bound_series(params, traj);
        const double theta = params.u0m * params.u0m;
        double f = on_.out_lift + theta * on_.out_one;
        const Eigen::VectorXd& cT = traj.coeffs.back();
        for (int j = 0; j < on_.n; ++j) f += cT(j) * on_.out_modes(j);
        out.f_tilde = f;
        out.eps = on_.c_out * out.eps_u_series.back();
        return out;
    }

private:
    // Component-field coefficient vector gamma = (1, theta, c_1..c_n).
    void fill_gamma(const Eigen::VectorXd& c, double theta) const {
        gamma_.resize(on_.n + 2);
        gamma_(0) = 1.0;
        gamma_(1) = theta;
        gamma_.tail(on_.n) = c;
    }

    void prepare(const ParameterPoint& params) const {
        if (prepared_ && params.nu == prepared_nu_) return;
        Eigen::MatrixXd m = Eigen::MatrixXd::Identity(on_.n, on_.n) -
                            on_.dt * params.nu * on_.diffusion;
        llt_.compute(m);
        if (llt_.info() != Eigen::Success)
            throw SolverDiverged("implicit reduced operator not SPD");
        prepared_ = true;
        prepared_nu_ = params.nu;
    }

    Eigen::VectorXd advance(const Eigen::VectorXd& c, const ParameterPoint& params) const {
        const double theta = params.u0m * params.u0m;
        fill_gamma(c, theta);
        Eigen::VectorXd rhs(on_.n);
        for (int i = 0; i < on_.n; ++i)
            rhs(i) = c(i) + on_.dt * (params.nu * on_.diffusion_lift(i) -
                                      gamma_.dot(on_.conv[i] * gamma_) + on_.forcing(i));
        return llt_.solve(rhs);
    }

    /// Exact L2 norm of the full-operator residual of the reconstructed
    /// iterate, evaluated as a quadratic form in precomputed Gram data.
    double residual_norm(const Eigen::VectorXd& c_old, const Eigen::VectorXd& c_new,
                         const ParameterPoint& params) const {
        const int n = on_.n;
        const int nc = n + 2;
        const double theta = params.u0m * params.u0m;
        fill_gamma(c_old, theta);
        w_.resize(on_.num_residual_fields());
        int idx = 0;
        for (int j = 0; j < n; ++j) w_(idx++) = c_new(j) - c_old(j);
        for (int j = 0; j < n; ++j) w_(idx++) = -on_.dt * params.nu * c_new(j);
        w_(idx++) = -on_.dt * params.nu;       // D lift_lin
        w_(idx++) = -on_.dt;                   // forcing ones (g = 1)
        for (int a = 0; a < nc; ++a)
            for (int b = a; b < nc; ++b)
                w_(idx++) = on_.dt * gamma_(a) * gamma_(b) * (a == b ? 1.0 : 2.0);
        const double sq = w_.dot(on_.residual_gram * w_);
        return std::sqrt(std::max(sq, 0.0));
    }

    const ReducedOnline& on_;
    mutable Eigen::LLT<Eigen::MatrixXd> llt_;
    mutable bool prepared_ = false;
    mutable double prepared_nu_ = 0.0;
    mutable Eigen::VectorXd gamma_;
    mutable Eigen::VectorXd w_;
};

inline ReducedTrajectory solve_reduced(const ReducedBasis& rb, const ParameterPoint& params) {
    return ReducedSolver(rb.online).solve(params);
}

inline std::vector<double> error_bound_series(const ReducedBasis& rb,
                                              const ParameterPoint& params,
                                              const ReducedTrajectory& traj) {
    return ReducedSolver(rb.online).error_bound_series(params, traj);
}

inline CertifiedOutput output_with_bound(const ReducedBasis& rb, const ParameterPoint& params) {
    return ReducedSolver(rb.online).output_with_bound(params);
}

/// Tensor training grid: geometric spacing in nu (the stiff direction),
/// uniform in u0m.
inline std::vector<ParameterPoint> training_grid(double nu_min, double nu_max, int n_nu,
                                                 double u0m_min, double u0m_max, int n_u0m) {
    if (n_nu < 1 || n_u0m < 1) throw ConfigError("training grid counts must be >= 1");
    std::vector<ParameterPoint> pts;
    pts.reserve(static_cast<std::size_t>(n_nu) * n_u0m);
    for (int a = 0; a < n_nu; ++a) {
        const double fa = n_nu == 1 ? 0.0 : static_cast<double>(a) / (n_nu - 1);
        const double nu = nu_min * std::pow(nu_max / nu_min, fa);
        for (int b = 0; b < n_u0m; ++b) {
            const double fb = n_u0m == 1 ? 0.5 : static_cast<double>(b) / (n_u0m - 1);
            pts.push_back({nu, u0m_min + fb * (u0m_max - u0m_min)});
        }
    }
    return pts;
}

}  // namespace certsens
