#pragma once

#include <Eigen/Dense>
#include <functional>
#include <optional>

#include "polyvar/exterior.hpp"

namespace polyvar::nulllag {

struct DomainDescriptor {
    enum class Kind { Ball, Box, Annulus };
    Kind kind = Kind::Ball;
    Eigen::VectorXd center;
    double radius = 1.0;        // ball / annulus outer radius
    double inner_radius = 0.0;  // annulus only
    Eigen::VectorXd box_lo, box_hi;

    int dim() const { return static_cast<int>(center.size()); }
    Eigen::VectorXd centroid() const { return center; }
    double diameter() const;
    bool star_shaped() const { return kind != Kind::Annulus; }

    static DomainDescriptor unit_ball(int n);
    static DomainDescriptor unit_box(int n);
    static DomainDescriptor annulus(int n, double inner, double outer);
};

// exp(1 - 1/(1-s^2)) with s = |t-c|/rho, extended by zero; peak value 1.
struct ScalarBump {
    Eigen::VectorXd center;
    double radius = 1.0;

    double value(const Eigen::VectorXd& t) const;
    Eigen::VectorXd gradient(const Eigen::VectorXd& t) const;
};

// Odd C^2 clamp into (-3,3): identity on [-2,2], erf tail beyond.
double smooth_clamp(double s);
double smooth_clamp_derivative(double s);

// Field of l-vectors on the domain with analytic coefficient derivatives.
// Coefficients are indexed by basis_subsets(domain_dim, degree).
struct LVectorField {
    int domain_dim = 0;
    int degree = 0;
    std::function<Eigen::VectorXd(const Eigen::VectorXd&)> coeffs;
    std::function<Eigen::MatrixXd(const Eigen::VectorXd&)> derivs;  // coeff x d/dt_j
    bool compactly_supported = false;
    Eigen::VectorXd support_center;
    double support_radius = 0.0;

    exterior::WedgeVector at(const Eigen::VectorXd& t) const;
    bool in_support(const Eigen::VectorXd& t) const;
    double sup_norm_estimate(std::uint64_t seed = 1, int samples = 4096) const;
};

// (degree)-form on the target with analytic coefficient derivatives and
// declared sup bounds for itself and its exterior derivative.
struct FormField {
    int target_dim = 0;
    int degree = 0;
    std::function<Eigen::VectorXd(const Eigen::VectorXd&)> coeffs;
    std::function<Eigen::MatrixXd(const Eigen::VectorXd&)> derivs;  // coeff x d/dx_j
    double sup_coeff = 0.0;
    double sup_dcoeff = 0.0;

    exterior::WedgeForm at(const Eigen::VectorXd& x) const;
    exterior::WedgeForm exterior_derivative(const Eigen::VectorXd& x) const;
};

// Construction-time finite-difference audits of the declared derivatives.
void validate_field(const LVectorField& u, std::uint64_t seed, int samples = 24,
                    double tol = 1e-6);
void validate_field(const FormField& chi, std::uint64_t seed, int samples = 24, double tol = 1e-6,
                    double sample_radius = 2.0);

// The (l-1)-vector field with d(i_U Omega) = (-1)^{l+1} i_{U_dot} Omega for
// the standard volume form; reduces to div U when l = 1. The returned field
// carries no derivative callbacks of its own.
LVectorField u_dot(const LVectorField& u);

// U(t) = (t - centroid)/n on a star-shaped domain, so div U = 1 exactly.
LVectorField divergence_one_field(const DomainDescriptor& domain);

}  // namespace polyvar::nulllag
