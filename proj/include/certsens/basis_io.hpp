#pragma once

#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "certsens/errors.hpp"
#include "certsens/reduced_basis.hpp"

namespace certsens {

inline constexpr int kBasisFormatVersion = 1;

namespace detail {

inline nlohmann::json matrix_to_json(const Eigen::MatrixXd& m) {
    nlohmann::json rows = nlohmann::json::array();
    for (int i = 0; i < m.rows(); ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (int j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

inline Eigen::MatrixXd matrix_from_json(const nlohmann::json& j) {
    const int rows = static_cast<int>(j.size());
    const int cols = rows ? static_cast<int>(j.at(0).size()) : 0;
    Eigen::MatrixXd m(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int c = 0; c < cols; ++c) m(i, c) = j.at(i).at(c).get<double>();
    return m;
}

inline nlohmann::json vector_to_json(const Eigen::VectorXd& v) {
    nlohmann::json a = nlohmann::json::array();
    for (int i = 0; i < v.size(); ++i) a.push_back(v(i));
    return a;
}

inline Eigen::VectorXd vector_from_json(const nlohmann::json& j) {
    Eigen::VectorXd v(static_cast<int>(j.size()));
    for (int i = 0; i < v.size(); ++i) v(i) = j.at(i).get<double>();
    return v;
}

}  // namespace detail

inline nlohmann::json basis_to_json(const ReducedBasis& rb) {
    nlohmann::json j;
    j["format_version"] = kBasisFormatVersion;
    j["disc"] = {{"n_space", rb.disc.n_space}, {"dt", rb.disc.dt}, {"t_final", rb.disc.t_final}};
    j["modes"] = detail::matrix_to_json(rb.modes);
    j["lift_lin"] = rb.lift_lin;
    j["pod_spectrum"] = rb.pod_spectrum;
    j["snapshot_rank"] = rb.snapshot_rank;

    const ReducedOnline& on = rb.online;
    nlohmann::json o;
    o["n"] = on.n;
    o["n_space"] = on.n_space;
    o["num_steps"] = on.num_steps;
    o["dt"] = on.dt;
    o["h"] = on.h;
    o["lambda_min"] = on.lambda_min;
    o["c_out"] = on.c_out;
    o["bound_cap"] = on.bound_cap;
    o["diffusion"] = detail::matrix_to_json(on.diffusion);
    o["diffusion_lift"] = detail::vector_to_json(on.diffusion_lift);
    nlohmann::json conv = nlohmann::json::array();
    for (const auto& t : on.conv) conv.push_back(detail::matrix_to_json(t));
    o["conv"] = std::move(conv);
    o["forcing"] = detail::vector_to_json(on.forcing);
    o["init_coeffs"] = detail::vector_to_json(on.init_coeffs);
    o["init_error"] = on.init_error;
    o["out_lift"] = on.out_lift;
    o["out_one"] = on.out_one;
    o["out_modes"] = detail::vector_to_json(on.out_modes);
    o["mode_inf_norms"] = detail::vector_to_json(on.mode_inf_norms);
    o["residual_gram"] = detail::matrix_to_json(on.residual_gram);
    j["online"] = std::move(o);
    return j;
}

inline SpatialState basis_column(const ReducedBasis& rb, int j) {
    SpatialState s(rb.modes.rows());
    for (int i = 0; i < rb.modes.rows(); ++i) s[i] = rb.modes(i, j);
    return s;
}

inline ReducedBasis basis_from_json(const nlohmann::json& j) {
    if (j.at("format_version").get<int>() != kBasisFormatVersion)
        throw ConfigError("unsupported basis format version");
    ReducedBasis rb;
    rb.disc = Discretization(j.at("disc").at("n_space").get<int>(),
                             j.at("disc").at("dt").get<double>(),
                             j.at("disc").at("t_final").get<double>());
    rb.modes = detail::matrix_from_json(j.at("modes"));
    rb.lift_lin = j.at("lift_lin").get<std::vector<double>>();
    rb.pod_spectrum = j.at("pod_spectrum").get<std::vector<double>>();
    rb.snapshot_rank = j.at("snapshot_rank").get<int>();

    const nlohmann::json& o = j.at("online");
    ReducedOnline& on = rb.online;
    on.n = o.at("n").get<int>();
    on.n_space = o.at("n_space").get<int>();
    on.num_steps = o.at("num_steps").get<int>();
    on.dt = o.at("dt").get<double>();
    on.h = o.at("h").get<double>();
    on.lambda_min = o.at("lambda_min").get<double>();
    on.c_out = o.at("c_out").get<double>();
    on.bound_cap = o.at("bound_cap").get<double>();
    on.diffusion = detail::matrix_from_json(o.at("diffusion"));
    on.diffusion_lift = detail::vector_from_json(o.at("diffusion_lift"));
    for (const auto& t : o.at("conv")) on.conv.push_back(detail::matrix_from_json(t));
    on.forcing = detail::vector_from_json(o.at("forcing"));
    on.init_coeffs = detail::vector_from_json(o.at("init_coeffs"));
    on.init_error = o.at("init_error").get<double>();
    on.out_lift = o.at("out_lift").get<double>();
    on.out_one = o.at("out_one").get<double>();
    on.out_modes = detail::vector_from_json(o.at("out_modes"));
    on.mode_inf_norms = detail::vector_from_json(o.at("mode_inf_norms"));
    on.residual_gram = detail::matrix_from_json(o.at("residual_gram"));

    // Refuse to use a basis whose modes are not orthonormal in the
    // discrete L2 inner product.
    for (int a = 0; a < on.n; ++a)
        for (int b = a; b < on.n; ++b) {
            const double ip = l2_inner(basis_column(rb, a), basis_column(rb, b));
            const double expect = a == b ? 1.0 : 0.0;
            if (std::abs(ip - expect) > 1e-10)
                throw ConfigError("basis file failed orthonormality validation at (" +
                                  std::to_string(a) + "," + std::to_string(b) + ")");
        }
    return rb;
}

inline void save_basis(const ReducedBasis& rb, const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw ConfigError("cannot write basis file: " + path);
    os << basis_to_json(rb).dump(1) << "\n";
}

inline ReducedBasis load_basis(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw ConfigError("cannot open basis file: " + path);
    nlohmann::json j;
    try {
        is >> j;
    } catch (const std::exception& e) {
        throw ConfigError("malformed basis file " + path + ": " + e.what());
    }
    return basis_from_json(j);
}

}  // namespace certsens
