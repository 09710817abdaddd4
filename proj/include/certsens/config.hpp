#pragma once

#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "certsens/burgers.hpp"
#include "certsens/errors.hpp"

namespace certsens {

/// Experiment configuration; defaults reproduce the reference setup
/// (N_space=60, dt=0.01, T=0.05, nu in [1,20], u0m in [-0.3,0.3],
/// B=300, alpha=0.05).
struct RunConfig {
    int n_space = 60;
    double dt = 0.01;
    double t_final = 0.05;
    double nu_min = 1.0;
    double nu_max = 20.0;
    double u0m_min = -0.3;
    double u0m_max = 0.3;
    int train_nu = 5;
    int train_u0m = 5;
    int n_basis = 10;
    bool rank_fill = false;  // pad the basis past the snapshot rank
    std::int64_t n_samples = 300;
    std::int64_t n_boot = 300;
    double alpha = 0.05;
    std::uint64_t seed = 42;
    int threads = 1;
    std::string out_dir = "run";

    Discretization discretization() const { return {n_space, dt, t_final}; }

    std::vector<std::pair<double, double>> ranges() const {
        return {{nu_min, nu_max}, {u0m_min, u0m_max}};
    }
};

/// Flat key=value format; '#' starts a comment, blank lines ignored.
inline RunConfig parse_config(std::istream& in) {
    RunConfig cfg;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        // trim
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos) continue;
        const auto last = line.find_last_not_of(" \t\r");
        line = line.substr(first, last - first + 1);
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(lineno) + ": expected key=value");
        std::string key = line.substr(0, eq);
        std::string val = line.substr(eq + 1);
        auto trim = [](std::string& s) {
            const auto a = s.find_first_not_of(" \t");
            const auto b = s.find_last_not_of(" \t");
            s = a == std::string::npos ? "" : s.substr(a, b - a + 1);
        };
        trim(key);
        trim(val);
        if (val.empty()) throw ConfigError("line " + std::to_string(lineno) + ": empty value");

        try {
            if (key == "n_space") cfg.n_space = std::stoi(val);
            else if (key == "dt") cfg.dt = std::stod(val);
            else if (key == "t_final") cfg.t_final = std::stod(val);
            else if (key == "nu_min") cfg.nu_min = std::stod(val);
            else if (key == "nu_max") cfg.nu_max = std::stod(val);
            else if (key == "u0m_min") cfg.u0m_min = std::stod(val);
            else if (key == "u0m_max") cfg.u0m_max = std::stod(val);
            else if (key == "train_nu") cfg.train_nu = std::stoi(val);
            else if (key == "train_u0m") cfg.train_u0m = std::stoi(val);
            else if (key == "n") cfg.n_basis = std::stoi(val);
            else if (key == "rank_fill") cfg.rank_fill = std::stoi(val) != 0;
            else if (key == "N") cfg.n_samples = std::stoll(val);
            else if (key == "B") cfg.n_boot = std::stoll(val);
            else if (key == "alpha") cfg.alpha = std::stod(val);
            else if (key == "seed") cfg.seed = std::stoull(val);
            else if (key == "threads") cfg.threads = std::stoi(val);
            else if (key == "out") cfg.out_dir = val;
            else throw ConfigError("line " + std::to_string(lineno) + ": unknown key '" + key + "'");
        } catch (const ConfigError&) {
            throw;
        } catch (const std::exception&) {
            throw ConfigError("line " + std::to_string(lineno) + ": bad value for '" + key + "'");
        }
    }
    if (!(cfg.alpha > 0.0 && cfg.alpha < 1.0)) throw ConfigError("alpha must be in (0,1)");
    if (cfg.n_boot < 2) throw ConfigError("B must be >= 2");
    if (cfg.n_samples < 2) throw ConfigError("N must be >= 2");
    if (cfg.threads < 1) throw ConfigError("threads must be >= 1");
    cfg.discretization().validate();
    return cfg;
}

inline RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    return parse_config(in);
}

inline std::string config_to_text(const RunConfig& cfg) {
    std::ostringstream os;
    os.precision(17);
    os << "n_space=" << cfg.n_space << "\n"
       << "dt=" << cfg.dt << "\n"
       << "t_final=" << cfg.t_final << "\n"
       << "nu_min=" << cfg.nu_min << "\n"
       << "nu_max=" << cfg.nu_max << "\n"
       << "u0m_min=" << cfg.u0m_min << "\n"
       << "u0m_max=" << cfg.u0m_max << "\n"
       << "train_nu=" << cfg.train_nu << "\n"
       << "train_u0m=" << cfg.train_u0m << "\n"
       << "n=" << cfg.n_basis << "\n"
       << "rank_fill=" << (cfg.rank_fill ? 1 : 0) << "\n"
       << "N=" << cfg.n_samples << "\n"
       << "B=" << cfg.n_boot << "\n"
       << "alpha=" << cfg.alpha << "\n"
       << "seed=" << cfg.seed << "\n"
       << "threads=" << cfg.threads << "\n"
       << "out=" << cfg.out_dir << "\n";
    return os.str();
}

}  // namespace certsens
