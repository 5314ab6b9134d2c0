#pragma once

#include "polyvar/fields.hpp"
#include "polyvar/integrand.hpp"
#include "polyvar/map.hpp"
#include "polyvar/mesh.hpp"

namespace polyvar::nulllag {

// The pair (chi, U) and its induced integrand
//   F(t,x,v) = chi_x(wedge_{l-1} v . U_dot(t)) + dchi_x(wedge_l v . U(t)),
// which integrates to zero along every C^1 map. Affine in the minor tuple
// by construction.
struct NullLagrangianSpec {
    int l = 1;
    int domain_dim = 0;
    int target_dim = 0;
    FormField chi;       // degree l-1 on the target
    LVectorField field;  // degree l on the domain
    LVectorField field_dot;

    double evaluate(const Eigen::VectorXd& t, const Eigen::VectorXd& x,
                    const Eigen::MatrixXd& v) const;

    // Same value from a precomputed minor tuple; affine in the entries.
    double evaluate_lifted(const Eigen::VectorXd& t, const Eigen::VectorXd& x,
                           const variational::MinorTuple& minors) const;
};

NullLagrangianSpec make_null_lagrangian(int l, FormField chi, LVectorField u);

// Quadrature value of the integral of F along a map; near zero for C^1 maps.
double vanishing_residual(const NullLagrangianSpec& F, const meshmaps::PwAffineMap& u,
                          const meshmaps::QuadratureRule& q);
double vanishing_residual(const NullLagrangianSpec& F, const meshmaps::SmoothMap& u,
                          const meshmaps::SimplicialMesh& mesh, const meshmaps::QuadratureRule& q);

}  // namespace polyvar::nulllag

namespace polyvar::meshmaps {

// Weak-formulation pairing of the pointwise minors of u against the test
// pair (chi, U): the quadrature value of
//   int dchi_u (wedge_l du . U) + int chi_u (wedge_{l-1} du . U_dot).
// Near zero exactly when the pointwise minors are distributional against
// this test pair.
double weak_minor_residual(const PwAffineMap& u, int l, const nulllag::FormField& chi,
                           const nulllag::LVectorField& U, const QuadratureRule& q);
double weak_minor_residual(const SmoothMap& u, const SimplicialMesh& mesh, int l,
                           const nulllag::FormField& chi, const nulllag::LVectorField& U,
                           const QuadratureRule& q);

}  // namespace polyvar::meshmaps
