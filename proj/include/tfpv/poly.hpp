#ifndef TFPV_POLY_HPP
#define TFPV_POLY_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace tfpv {

// Sparse multivariate polynomial over a fixed variable universe.
// Variables are addressed by index; callers decide which indices are
// dynamical states and which are rate parameters.  Coefficients produced by
// mass-action model building are (signed) integers, so double storage is
// exact; no rounding occurs before numeric evaluation.
class Poly {
  public:
    struct Term {
        double coeff;
        std::vector<int> exps;  // length nvars
    };

    Poly() : nvars_(0) {}
    explicit Poly(int nvars) : nvars_(nvars) {}

    static Poly constant(int nvars, double c) {
        Poly p(nvars);
        if (c != 0.0) p.terms_.push_back({c, std::vector<int>(nvars, 0)});
        return p;
    }
    static Poly var(int nvars, int idx) {
        if (idx < 0 || idx >= nvars) throw std::invalid_argument("Poly::var: index out of range");
        Poly p(nvars);
        std::vector<int> e(nvars, 0);
        e[idx] = 1;
        p.terms_.push_back({1.0, std::move(e)});
        return p;
    }

    int nvars() const { return nvars_; }
    const std::vector<Term>& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }

    Poly operator+(const Poly& o) const {
        check(o);
        Poly r(nvars_);
        r.terms_ = terms_;
        r.terms_.insert(r.terms_.end(), o.terms_.begin(), o.terms_.end());
        r.normalize();
        return r;
    }
    Poly operator-(const Poly& o) const { return *this + o.scaled(-1.0); }
    Poly operator*(const Poly& o) const {
        check(o);
        Poly r(nvars_);
        r.terms_.reserve(terms_.size() * o.terms_.size());
        for (const auto& a : terms_)
            for (const auto& b : o.terms_) {
                Term t;
                t.coeff = a.coeff * b.coeff;
                t.exps.resize(nvars_);
                for (int i = 0; i < nvars_; ++i) t.exps[i] = a.exps[i] + b.exps[i];
                r.terms_.push_back(std::move(t));
            }
        r.normalize();
        return r;
    }
    Poly scaled(double c) const {
        Poly r(nvars_);
        if (c == 0.0) return r;
        r.terms_ = terms_;
        for (auto& t : r.terms_) t.coeff *= c;
        return r;
    }
    Poly& operator+=(const Poly& o) {
        *this = *this + o;
        return *this;
    }

    Poly derivative(int var) const {
        Poly r(nvars_);
        for (const auto& t : terms_) {
            if (t.exps[var] == 0) continue;
            Term d = t;
            d.coeff *= d.exps[var];
            d.exps[var] -= 1;
            r.terms_.push_back(std::move(d));
        }
        r.normalize();
        return r;
    }

    // vals must have length nvars().
    double eval(const double* vals) const {
        double acc = 0.0;
        for (const auto& t : terms_) {
            double m = t.coeff;
            for (int i = 0; i < nvars_; ++i) {
                int e = t.exps[i];
                if (e == 0) continue;
                double v = vals[i];
                // small integer powers; exponents never exceed reaction order
                for (int k = 0; k < e; ++k) m *= v;
            }
            acc += m;
        }
        return acc;
    }

    // Maximum total degree restricted to variable indices in [lo, hi).
    int degree_in(int lo, int hi) const {
        int d = 0;
        for (const auto& t : terms_) {
            int s = 0;
            for (int i = lo; i < hi; ++i) s += t.exps[i];
            d = std::max(d, s);
        }
        return d;
    }

  private:
    void check(const Poly& o) const {
        if (nvars_ != o.nvars_) throw std::invalid_argument("Poly: variable universe mismatch");
    }
    void normalize() {
        std::sort(terms_.begin(), terms_.end(),
                  [](const Term& a, const Term& b) { return a.exps < b.exps; });
        std::vector<Term> out;
        for (auto& t : terms_) {
            if (!out.empty() && out.back().exps == t.exps)
                out.back().coeff += t.coeff;
            else
                out.push_back(std::move(t));
        }
        out.erase(std::remove_if(out.begin(), out.end(),
                                 [](const Term& t) { return t.coeff == 0.0; }),
                  out.end());
        terms_ = std::move(out);
    }

    int nvars_;
    std::vector<Term> terms_;
};

}  // namespace tfpv

#endif
