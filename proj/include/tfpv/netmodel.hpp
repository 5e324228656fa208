#ifndef TFPV_NETMODEL_HPP
#define TFPV_NETMODEL_HPP

#include <Eigen/Dense>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tfpv/poly.hpp"

namespace tfpv {

using ParameterPoint = std::map<std::string, double>;

struct Reaction {
    std::string name;
    std::vector<std::pair<int, int>> reactants;  // (species index, stoich coeff)
    std::vector<std::pair<int, int>> products;
    int rate_param;  // index into Network::parameters
};

struct Network {
    std::vector<std::string> species;
    std::vector<std::string> parameters;
    std::vector<Reaction> reactions;
    // init bindings: species -> parameter name (value resolved per run)
    std::map<std::string, std::string> inits;

    int species_index(const std::string& name) const;
    int param_index(const std::string& name) const;
    // species x reactions, column = products - reactants
    Eigen::MatrixXi stoich() const;
    // Integer basis of the left null space of the stoichiometric matrix
    // (conservation laws), via exact rational row reduction.
    std::vector<Eigen::VectorXi> conservation_laws() const;
};

// Parse the line-oriented reaction network DSL:
//   species A, B, ...
//   param k1, km1, ...
//   reaction NAME: c1*X + c2*Y -> d1*Z @ kf        (irreversible)
//   reaction NAME: X + Y <-> Z @ kf, kr            (expands to two reactions)
//   init X = p
// '#' starts a comment; '0' denotes the empty complex (pure inflow/outflow).
Network parse_network(const std::string& text);

// Canonical text form; parse(unparse(parse(text))) is an identical Network.
std::string unparse_network(const Network& net);

// Polynomial vector field over the retained states after conservation-law
// elimination.  Variable universe: states first, then all network parameters
// (rate constants and conserved totals).
class PolyVectorField {
  public:
    std::vector<std::string> states;
    std::vector<std::string> params;
    std::vector<Poly> rhs;                    // one per state
    std::vector<std::vector<Poly>> jac;       // jac[i][j] = d rhs[i] / d state j
    // substitutions for eliminated species (in the same variable universe)
    std::map<std::string, Poly> eliminated;

    int n() const { return static_cast<int>(states.size()); }
    int np() const { return static_cast<int>(params.size()); }
    int nvars() const { return n() + np(); }

    int state_index(const std::string& name) const;
    int param_index(const std::string& name) const;

    Eigen::VectorXd param_vector(const ParameterPoint& pp) const;

    Eigen::VectorXd eval(const Eigen::VectorXd& x, const Eigen::VectorXd& p) const;
    Eigen::MatrixXd jacobian(const Eigen::VectorXd& x, const Eigen::VectorXd& p) const;

    // Maximum total degree of rhs/jacobian entries in the parameter block;
    // bounds the epsilon-degree of sigma expansions along parameter rays.
    int param_degree() const;
};

// Substitute conserved species using the supplied totals
// (eliminated species name -> total parameter name, e.g. E -> e0).
// With an empty map, returns the field over all species unchanged.
PolyVectorField eliminate_conservation(const Network& net,
                                       const std::map<std::string, std::string>& totals);

}  // namespace tfpv

#endif
