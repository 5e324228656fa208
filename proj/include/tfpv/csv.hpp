#ifndef TFPV_CSV_HPP
#define TFPV_CSV_HPP

#include <charconv>
#include <string>

#include "tfpv/sim.hpp"

namespace tfpv {

// Shortest decimal representation that round-trips to the same double.
inline std::string format_double(double v) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

inline std::string trajectory_csv(const Trajectory& tr) {
    std::string out = "t,tau";
    for (const auto& s : tr.states) out += "," + s;
    out += "\n";
    double T = tr.T > 0.0 ? tr.T : 1.0;
    for (size_t i = 0; i < tr.t.size(); ++i) {
        out += format_double(tr.t[i]) + "," + format_double(tr.t[i] / T);
        for (int j = 0; j < tr.x[i].size(); ++j) out += "," + format_double(tr.x[i](j));
        out += "\n";
    }
    return out;
}

inline std::string comparison_csv(const ComparisonReport& rep) {
    std::string out = "eps,eps_star,mu_star,t_c,err_post,err_full,slope\n";
    for (const auto& r : rep.rows) {
        out += format_double(r.eps) + "," + format_double(r.eps_star) + "," +
               format_double(r.mu_star) + "," + format_double(r.t_c) + "," +
               format_double(r.err_post) + "," + format_double(r.err_full) + "," +
               format_double(rep.slope) + "\n";
    }
    return out;
}

}  // namespace tfpv

#endif
