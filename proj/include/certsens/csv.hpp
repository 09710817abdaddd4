#pragma once

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "certsens/burgers.hpp"
#include "certsens/errors.hpp"
#include "certsens/sobol.hpp"

namespace certsens {

/// Shortest-round-trip decimal formatting; %.17g is lossless for doubles.
inline std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) out.push_back(field);
    return out;
}

/// Trajectory debug export: one row per time step, columns t, u(x_0..x_N).
inline void write_trajectory_csv(std::ostream& os, const Trajectory& traj) {
    os << "t";
    for (int i = 0; i <= traj.disc.n_space; ++i) os << ",u" << i;
    os << "\n";
    for (std::size_t k = 0; k < traj.states.size(); ++k) {
        os << fmt_double(k * traj.disc.dt);
        for (double v : traj.states[k]) os << "," << fmt_double(v);
        os << "\n";
    }
}

inline void write_pairs_csv(std::ostream& os, const CertifiedPairs& pairs) {
    os << "k,y_tilde,y_tilde_prime,eps,eps_prime\n";
    for (std::size_t k = 0; k < pairs.size(); ++k)
        os << k << "," << fmt_double(pairs.y_tilde[k]) << ","
           << fmt_double(pairs.y_tilde_prime[k]) << "," << fmt_double(pairs.eps[k]) << ","
           << fmt_double(pairs.eps_prime[k]) << "\n";
}

inline CertifiedPairs read_pairs_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line)) throw ConfigError("empty pairs CSV");
    if (line.size() && line.back() == '\r') line.pop_back();
    if (line != "k,y_tilde,y_tilde_prime,eps,eps_prime")
        throw ConfigError("unexpected pairs CSV header: " + line);
    CertifiedPairs pairs;
    while (std::getline(is, line)) {
        if (line.size() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto f = split_csv_line(line);
        if (f.size() != 5) throw ConfigError("malformed pairs CSV row: " + line);
        pairs.y_tilde.push_back(std::stod(f[1]));
        pairs.y_tilde_prime.push_back(std::stod(f[2]));
        pairs.eps.push_back(std::stod(f[3]));
        pairs.eps_prime.push_back(std::stod(f[4]));
    }
    return pairs;
}

inline void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw ConfigError("cannot write file: " + path);
    os << content;
}

inline std::string read_text_file(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw ConfigError("cannot read file: " + path);
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

}  // namespace certsens
