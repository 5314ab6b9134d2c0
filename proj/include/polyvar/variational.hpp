#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "polyvar/integrand.hpp"
#include "polyvar/map.hpp"
#include "polyvar/mesh.hpp"

namespace polyvar::variational {

// eps(|v|^p + |t|^4 |v|^4) + (det v)^2 on two-dimensional jets, with
// analytic gradient and a superlinear lower envelope; k = 2.
IntegrandSpec example_lagrangian(double eps, double p);

// |v|^2 Dirichlet integrand, k = 1.
IntegrandSpec dirichlet_integrand(int domain_dim, int target_dim);

struct ConvexityCheck {
    bool passed = true;
    double worst_violation = 0.0;
    Eigen::VectorXd witness_t, witness_x;
    MinorTuple witness_a, witness_b;
};

// Midpoint convexity of the lifted integrand along random segments in the
// minor-tuple variables (treated as independent coordinates). Passing is
// necessary, not sufficient.
ConvexityCheck kconvexity_sample_check(const IntegrandSpec& L, int points, int segments,
                                       std::uint64_t seed);

struct SuperlinearityTable {
    std::vector<double> radii;
    std::vector<double> min_ratios;  // min over jets of L / (sum of minor norms)
    bool stagnant = false;
};

SuperlinearityTable superlinearity_check(const IntegrandSpec& L, const std::vector<double>& radii,
                                         int samples, std::uint64_t seed);

struct MinimizeOptions {
    double grad_tol = 1e-6;
    int max_iterations = 500;
    double armijo = 1e-4;
    double initial_step = 1.0;
    int max_halvings = 60;
    int quadrature_order = 4;
    int starts = 1;
    double start_perturbation = 0.0;
    std::uint64_t seed = 0;
    bool project_to_sphere = false;
    bool record_iterate_maps = false;
};

struct IterationRecord {
    int iteration;
    double energy;
    double grad_norm;
    double step;
    double degree;  // exact cellwise degree integral (2d maps), else 0
};

struct MinimizeReport {
    meshmaps::PwAffineMap minimizer;
    double energy = 0.0;
    bool converged = false;
    bool line_search_failed = false;
    int iterations = 0;
    int best_start = 0;
    std::vector<IterationRecord> history;
    std::vector<meshmaps::PwAffineMap> iterate_maps;  // when recording is on
};

// Projected gradient descent with Armijo backtracking on interior nodal
// values; boundary nodes stay bitwise equal to u0's trace.
MinimizeReport minimize(const meshmaps::PwAffineMap& u0, const IntegrandSpec& L,
                        const MinimizeOptions& options = {});

// Nodal energy gradient with boundary components zeroed; needs L.gradient.
Eigen::MatrixXd energy_gradient(const meshmaps::PwAffineMap& u, const IntegrandSpec& L,
                                const meshmaps::QuadratureRule& q);

// Exact cellwise integral of det du over a planar mesh (no quadrature).
double degree_integral(const meshmaps::PwAffineMap& u);

// Energy of t/|t| on the unit disc from the exact radial integrals; delta
// only splits the computation and the result is delta-independent.
double competitor_energy_semianalytic(double eps, double p, double delta = 0.25);

struct GapResult {
    double competitor_energy = 0.0;
    double minimizer_energy = 0.0;
    double area = 0.0;         // |B_h|
    double lower_bound = 0.0;  // degree^2 / |B_h|
    double gap_ratio = 0.0;    // lower_bound / competitor_energy
    double degree = 0.0;
    std::vector<double> blowup_h;
    std::vector<double> blowup_energy;  // det-part energy of the t/|t| interpolant
    double blowup_exponent = 0.0;
    MinimizeReport report;
};

GapResult gap_experiment(double eps, double p, double h, const MinimizeOptions& options = {});

struct TestFunction {
    enum class Kind { Bump, UnitSquare };
    Kind kind = Kind::Bump;
    Eigen::Vector2d center = Eigen::Vector2d::Zero();
    double radius = 0.25;

    static TestFunction bump(const Eigen::Vector2d& center, double radius);
    static TestFunction unit_square();
};

struct WeakMinorTable {
    std::vector<int> band_counts;
    // pairings(f, i) = |<det du_i - det du_inf, psi_f>|
    Eigen::MatrixXd pairings;
};

// Oscillating-gradient sequences u_i (bands of period 1/i, gradient A on
// the lambda-fraction) against fixed test functions; the pairings of
// det du_i converge to the pairing of det(lambda A + (1-lambda) B).
// Evaluated by exact band decomposition in the direction normal to the
// stripes; requires rank(A - B) = 1.
WeakMinorTable weak_minor_convergence_experiment(const Eigen::Matrix2d& A,
                                                 const Eigen::Matrix2d& B, double lambda,
                                                 const std::vector<int>& band_counts,
                                                 const std::vector<TestFunction>& tests);

}  // namespace polyvar::variational
