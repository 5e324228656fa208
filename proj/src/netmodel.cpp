#include "tfpv/netmodel.hpp"

#include <cctype>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace tfpv {

namespace {

[[noreturn]] void syntax_error(int line, const std::string& msg) {
    throw std::runtime_error("syntax error at line " + std::to_string(line) + ": " + msg);
}

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep)) out.push_back(trim(item));
    return out;
}

bool valid_ident(const std::string& s) {
    if (s.empty() || !(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
    for (char c : s)
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_')) return false;
    return true;
}

// Parse a complex like "2*X + Y" (or "0" for the empty complex) into
// (species index, multiplicity) pairs.
std::vector<std::pair<int, int>> parse_complex(const std::string& text, const Network& net,
                                               int line) {
    std::vector<std::pair<int, int>> out;
    std::string t = trim(text);
    if (t == "0" || t.empty()) return out;
    for (const std::string& part : split(t, '+')) {
        int coeff = 1;
        std::string name = part;
        size_t star = part.find('*');
        if (star != std::string::npos) {
            try {
                size_t used = 0;
                coeff = std::stoi(part.substr(0, star), &used);
                if (trim(part.substr(0, star)).size() != used) throw std::invalid_argument("");
            } catch (...) {
                syntax_error(line, "bad stoichiometric coefficient in '" + part + "'");
            }
            if (coeff <= 0) syntax_error(line, "stoichiometric coefficient must be positive");
            name = trim(part.substr(star + 1));
        }
        int idx = net.species_index(name);
        if (idx < 0) syntax_error(line, "undeclared species '" + name + "'");
        bool merged = false;
        for (auto& p : out)
            if (p.first == idx) {
                p.second += coeff;
                merged = true;
            }
        if (!merged) out.emplace_back(idx, coeff);
    }
    return out;
}

// Exact rational scalar for integer row reduction of the stoichiometric
// matrix.  Entries stay tiny (stoichiometric coefficients), so long long
// arithmetic cannot overflow in practice.
struct Rat {
    long long num = 0, den = 1;
    Rat() = default;
    Rat(long long n) : num(n) {}
    Rat(long long n, long long d) : num(n), den(d) { reduce(); }
    void reduce() {
        if (den < 0) { num = -num; den = -den; }
        long long g = std::gcd(std::abs(num), den);
        if (g > 1) { num /= g; den /= g; }
        if (num == 0) den = 1;
    }
    Rat operator*(const Rat& o) const { return Rat(num * o.num, den * o.den); }
    Rat operator-(const Rat& o) const { return Rat(num * o.den - o.num * den, den * o.den); }
    Rat operator/(const Rat& o) const { return Rat(num * o.den, den * o.num); }
    bool is_zero() const { return num == 0; }
};

}  // namespace

int Network::species_index(const std::string& name) const {
    for (size_t i = 0; i < species.size(); ++i)
        if (species[i] == name) return static_cast<int>(i);
    return -1;
}

int Network::param_index(const std::string& name) const {
    for (size_t i = 0; i < parameters.size(); ++i)
        if (parameters[i] == name) return static_cast<int>(i);
    return -1;
}

Eigen::MatrixXi Network::stoich() const {
    Eigen::MatrixXi N = Eigen::MatrixXi::Zero(static_cast<int>(species.size()),
                                              static_cast<int>(reactions.size()));
    for (size_t r = 0; r < reactions.size(); ++r) {
        for (auto& [sp, c] : reactions[r].reactants) N(sp, static_cast<int>(r)) -= c;
        for (auto& [sp, c] : reactions[r].products) N(sp, static_cast<int>(r)) += c;
    }
    return N;
}

std::vector<Eigen::VectorXi> Network::conservation_laws() const {
    // Row-reduce N^T over the rationals; the null space of N^T (as a map on
    // species-indexed vectors) gives the conservation laws l with l^T N = 0.
    Eigen::MatrixXi N = stoich();
    int ns = static_cast<int>(species.size());
    int nr = static_cast<int>(reactions.size());
    std::vector<std::vector<Rat>> A(nr, std::vector<Rat>(ns));
    for (int r = 0; r < nr; ++r)
        for (int s = 0; s < ns; ++s) A[r][s] = Rat(N(s, r));

    std::vector<int> pivot_col;
    int row = 0;
    for (int col = 0; col < ns && row < nr; ++col) {
        int p = -1;
        for (int r = row; r < nr; ++r)
            if (!A[r][col].is_zero()) { p = r; break; }
        if (p < 0) continue;
        std::swap(A[row], A[p]);
        Rat inv = Rat(1) / A[row][col];
        for (int c = 0; c < ns; ++c) A[row][c] = A[row][c] * inv;
        for (int r = 0; r < nr; ++r) {
            if (r == row || A[r][col].is_zero()) continue;
            Rat f = A[r][col];
            for (int c = 0; c < ns; ++c) A[r][c] = A[r][c] - f * A[row][c];
        }
        pivot_col.push_back(col);
        ++row;
    }

    std::vector<Eigen::VectorXi> basis;
    for (int col = 0; col < ns; ++col) {
        if (std::find(pivot_col.begin(), pivot_col.end(), col) != pivot_col.end()) continue;
        // free column -> null vector with rational entries; clear denominators
        std::vector<Rat> v(ns);
        v[col] = Rat(1);
        for (size_t r = 0; r < pivot_col.size(); ++r) v[pivot_col[r]] = Rat(0) - A[r][col];
        long long lcm = 1;
        for (auto& x : v) lcm = std::lcm(lcm, x.den);
        Eigen::VectorXi iv(ns);
        for (int s = 0; s < ns; ++s) iv(s) = static_cast<int>(v[s].num * (lcm / v[s].den));
        // normalize sign so the first nonzero entry is positive
        for (int s = 0; s < ns; ++s) {
            if (iv(s) != 0) {
                if (iv(s) < 0) iv = -iv;
                break;
            }
        }
        basis.push_back(iv);
    }
    return basis;
}

Network parse_network(const std::string& text) {
    Network net;
    std::stringstream ss(text);
    std::string raw;
    int lineno = 0;
    std::vector<std::tuple<int, std::string, std::string>> reaction_lines;  // defer
    std::vector<std::tuple<int, std::string, std::string>> init_lines;
    while (std::getline(ss, raw)) {
        ++lineno;
        std::string line = raw;
        size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        size_t sp = line.find_first_of(" \t");
        std::string kw = sp == std::string::npos ? line : line.substr(0, sp);
        std::string rest = sp == std::string::npos ? "" : trim(line.substr(sp));
        if (kw == "species" || kw == "param") {
            for (const std::string& name : split(rest, ',')) {
                if (!valid_ident(name)) syntax_error(lineno, "bad identifier '" + name + "'");
                auto& list = (kw == "species") ? net.species : net.parameters;
                if (net.species_index(name) >= 0 || net.param_index(name) >= 0)
                    syntax_error(lineno, "duplicate declaration of '" + name + "'");
                list.push_back(name);
            }
        } else if (kw == "reaction") {
            size_t colon = rest.find(':');
            if (colon == std::string::npos) syntax_error(lineno, "missing ':' in reaction");
            std::string name = trim(rest.substr(0, colon));
            if (!valid_ident(name)) syntax_error(lineno, "bad reaction name '" + name + "'");
            reaction_lines.emplace_back(lineno, name, trim(rest.substr(colon + 1)));
        } else if (kw == "init") {
            size_t eq = rest.find('=');
            if (eq == std::string::npos) syntax_error(lineno, "missing '=' in init");
            init_lines.emplace_back(lineno, trim(rest.substr(0, eq)), trim(rest.substr(eq + 1)));
        } else {
            syntax_error(lineno, "unknown directive '" + kw + "'");
        }
    }

    for (auto& [ln, name, body] : reaction_lines) {
        bool reversible = body.find("<->") != std::string::npos;
        size_t arrow = reversible ? body.find("<->") : body.find("->");
        if (arrow == std::string::npos) syntax_error(ln, "missing '->' in reaction");
        size_t at = body.find('@');
        if (at == std::string::npos || at < arrow) syntax_error(ln, "missing '@ rate' in reaction");
        std::string lhs = body.substr(0, arrow);
        std::string rhs = body.substr(arrow + (reversible ? 3 : 2), at - arrow - (reversible ? 3 : 2));
        std::vector<std::string> rates = split(body.substr(at + 1), ',');
        if (rates.size() != (reversible ? 2u : 1u))
            syntax_error(ln, reversible ? "reversible reaction needs '@ kf, kr'"
                                        : "irreversible reaction takes one rate");
        auto reactants = parse_complex(lhs, net, ln);
        auto products = parse_complex(rhs, net, ln);
        auto mk = [&](const std::string& rxname, const std::vector<std::pair<int, int>>& re,
                      const std::vector<std::pair<int, int>>& pr, const std::string& k) {
            int kp = net.param_index(k);
            if (kp < 0) syntax_error(ln, "undeclared parameter '" + k + "'");
            net.reactions.push_back(Reaction{rxname, re, pr, kp});
        };
        if (reversible) {
            mk(name + "_f", reactants, products, rates[0]);
            mk(name + "_r", products, reactants, rates[1]);
        } else {
            mk(name, reactants, products, rates[0]);
        }
    }

    for (auto& [ln, spn, pn] : init_lines) {
        if (net.species_index(spn) < 0) syntax_error(ln, "undeclared species '" + spn + "'");
        if (net.param_index(pn) < 0) syntax_error(ln, "undeclared parameter '" + pn + "'");
        net.inits[spn] = pn;
    }
    return net;
}

std::string unparse_network(const Network& net) {
    std::ostringstream os;
    auto join = [](const std::vector<std::string>& v) {
        std::string s;
        for (size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + v[i];
        return s;
    };
    os << "species " << join(net.species) << "\n";
    os << "param " << join(net.parameters) << "\n";
    auto side = [&](const std::vector<std::pair<int, int>>& cx) {
        if (cx.empty()) return std::string("0");
        std::string s;
        for (size_t i = 0; i < cx.size(); ++i) {
            if (i) s += " + ";
            if (cx[i].second != 1) s += std::to_string(cx[i].second) + "*";
            s += net.species[cx[i].first];
        }
        return s;
    };
    for (const auto& r : net.reactions)
        os << "reaction " << r.name << ": " << side(r.reactants) << " -> " << side(r.products)
           << " @ " << net.parameters[r.rate_param] << "\n";
    for (const auto& [spn, pn] : net.inits) os << "init " << spn << " = " << pn << "\n";
    return os.str();
}

int PolyVectorField::state_index(const std::string& name) const {
    for (size_t i = 0; i < states.size(); ++i)
        if (states[i] == name) return static_cast<int>(i);
    return -1;
}

int PolyVectorField::param_index(const std::string& name) const {
    for (size_t i = 0; i < params.size(); ++i)
        if (params[i] == name) return static_cast<int>(i);
    return -1;
}

Eigen::VectorXd PolyVectorField::param_vector(const ParameterPoint& pp) const {
    Eigen::VectorXd p = Eigen::VectorXd::Zero(np());
    for (const auto& [k, v] : pp) {
        int i = param_index(k);
        if (i >= 0) p(i) = v;
    }
    return p;
}

Eigen::VectorXd PolyVectorField::eval(const Eigen::VectorXd& x, const Eigen::VectorXd& p) const {
    if (x.size() != n() || p.size() != np())
        throw std::invalid_argument("PolyVectorField::eval: dimension mismatch");
    std::vector<double> vals(nvars());
    for (int i = 0; i < n(); ++i) vals[i] = x(i);
    for (int i = 0; i < np(); ++i) vals[n() + i] = p(i);
    Eigen::VectorXd out(n());
    for (int i = 0; i < n(); ++i) out(i) = rhs[i].eval(vals.data());
    return out;
}

Eigen::MatrixXd PolyVectorField::jacobian(const Eigen::VectorXd& x, const Eigen::VectorXd& p) const {
    if (x.size() != n() || p.size() != np())
        throw std::invalid_argument("PolyVectorField::jacobian: dimension mismatch");
    std::vector<double> vals(nvars());
    for (int i = 0; i < n(); ++i) vals[i] = x(i);
    for (int i = 0; i < np(); ++i) vals[n() + i] = p(i);
    Eigen::MatrixXd J(n(), n());
    for (int i = 0; i < n(); ++i)
        for (int j = 0; j < n(); ++j) J(i, j) = jac[i][j].eval(vals.data());
    return J;
}

int PolyVectorField::param_degree() const {
    int d = 0;
    for (const auto& p : rhs) d = std::max(d, p.degree_in(n(), nvars()));
    for (const auto& row : jac)
        for (const auto& p : row) d = std::max(d, p.degree_in(n(), nvars()));
    return d;
}

PolyVectorField eliminate_conservation(const Network& net,
                                       const std::map<std::string, std::string>& totals) {
    std::vector<int> elim;
    for (const auto& [spn, pn] : totals) {
        int si = net.species_index(spn);
        if (si < 0) throw std::runtime_error("eliminate_conservation: unknown species " + spn);
        if (net.param_index(pn) < 0)
            throw std::runtime_error("eliminate_conservation: unknown parameter " + pn);
        elim.push_back(si);
    }

    PolyVectorField f;
    for (size_t i = 0; i < net.species.size(); ++i)
        if (std::find(elim.begin(), elim.end(), static_cast<int>(i)) == elim.end())
            f.states.push_back(net.species[i]);
    f.params = net.parameters;
    int nv = f.nvars();

    // For each eliminated species, find a conservation law supported on that
    // species (with unit coefficient after scaling) and no other eliminated
    // species; combine basis vectors if needed.
    std::vector<Eigen::VectorXi> laws = net.conservation_laws();
    std::map<int, Poly> subst;  // species index -> polynomial in retained vars
    for (const auto& [spn, pn] : totals) {
        int si = net.species_index(spn);
        // Gaussian elimination over the eliminated columns: pick a law with a
        // nonzero entry at si, then clear other eliminated columns using the
        // remaining laws.
        std::vector<Eigen::VectorXd> work;
        for (auto& l : laws) work.push_back(l.cast<double>());
        Eigen::VectorXd chosen;
        bool found = false;
        for (size_t a = 0; a < work.size() && !found; ++a) {
            if (work[a](si) == 0.0) continue;
            Eigen::VectorXd v = work[a] / work[a](si);
            // clear other eliminated species using other basis vectors
            for (int other : elim) {
                if (other == si || v(other) == 0.0) continue;
                for (size_t b = 0; b < work.size(); ++b) {
                    if (b == a || work[b](other) == 0.0 || work[b](si) != 0.0) continue;
                    v -= work[b] * (v(other) / work[b](other));
                    break;
                }
            }
            bool clean = true;
            for (int other : elim)
                if (other != si && std::abs(v(other)) > 1e-12) clean = false;
            if (clean) {
                chosen = v;
                found = true;
            }
        }
        if (!found)
            throw std::runtime_error("eliminate_conservation: supplied total '" + pn +
                                     "' is not in the left null space for species " + spn);
        // spn = total - sum(coeff * retained species)
        Poly sub = Poly::var(nv, f.n() + f.param_index(pn));
        for (int r = 0; r < f.n(); ++r) {
            int gi = net.species_index(f.states[r]);
            if (chosen(gi) != 0.0)
                sub = sub - Poly::var(nv, r).scaled(chosen(gi));
        }
        subst[si] = sub;
        f.eliminated[spn] = sub;
    }

    // species polynomial: retained -> state var; eliminated -> substitution
    auto species_poly = [&](int si) -> Poly {
        auto it = subst.find(si);
        if (it != subst.end()) return it->second;
        int r = f.state_index(net.species[si]);
        return Poly::var(nv, r);
    };

    std::vector<Poly> drv(f.n(), Poly(nv));
    for (const auto& rx : net.reactions) {
        Poly rate = Poly::var(nv, f.n() + rx.rate_param);
        for (auto& [sp, c] : rx.reactants)
            for (int k = 0; k < c; ++k) rate = rate * species_poly(sp);
        auto add = [&](int sp, int c) {
            int r = f.state_index(net.species[sp]);
            if (r >= 0) drv[r] += rate.scaled(c);
        };
        for (auto& [sp, c] : rx.reactants) add(sp, -c);
        for (auto& [sp, c] : rx.products) add(sp, c);
    }
    f.rhs = std::move(drv);

    f.jac.resize(f.n());
    for (int i = 0; i < f.n(); ++i) {
        f.jac[i].resize(f.n());
        for (int j = 0; j < f.n(); ++j) f.jac[i][j] = f.rhs[i].derivative(j);
    }
    return f;
}

}  // namespace tfpv
