#pragma once

#include <Eigen/Dense>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "polyvar/exterior.hpp"
#include "polyvar/integrand.hpp"
#include "polyvar/mesh.hpp"

namespace polyvar::meshmaps {

// Continuous map defined by one target point per vertex; affine on cells.
struct PwAffineMap {
    MeshPtr mesh;
    Eigen::MatrixXd values;  // m x num_vertices

    int target_dim() const { return static_cast<int>(values.rows()); }

    // Constant differential of the affine piece on a cell, m x n.
    Eigen::MatrixXd cell_gradient(int cell) const;

    Eigen::VectorXd evaluate(int cell, const Eigen::VectorXd& barycentric) const;

    // Nodal values restricted to the boundary nodes, in node order.
    Eigen::MatrixXd boundary_trace() const;
};

PwAffineMap interpolate(const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& f,
                        MeshPtr mesh, int target_dim);

PwAffineMap identity_map(MeshPtr mesh);

bool traces_equal(const PwAffineMap& a, const PwAffineMap& b, double tol = 1e-12);

// Analytic map with analytic differential, for quadrature-based residuals.
struct SmoothMap {
    int target_dim = 0;
    std::function<Eigen::VectorXd(const Eigen::VectorXd&)> value;
    std::function<Eigen::MatrixXd(const Eigen::VectorXd&)> gradient;
};

// Sum over cells and quadrature points of w * L(t, u(t), du); +inf
// propagates, NaN raises EvaluationError. Fixed-order tree reduction over
// cells, so the result is independent of the thread count.
double integrate_energy(const PwAffineMap& u, const variational::IntegrandSpec& L,
                        const QuadratureRule& q);

// Cellwise-constant field of l-th wedge powers of the gradient.
std::vector<exterior::MinorMatrix> minor_field(const PwAffineMap& u, int l);

// Map whose gradient alternates between A and B on horizontal bands:
// gradient A on the fraction lambda of each band of period 1/bands. A and B
// must agree outside their last column so the map stays continuous. Exact
// on meshes whose horizontal lines include all band breakpoints.
PwAffineMap stripe_map(MeshPtr mesh, const Eigen::MatrixXd& A, const Eigen::MatrixXd& B,
                       double lambda, int bands);

// Line-oriented text serialization; doubles carry 17 significant digits so
// save/load round-trips are bit-exact.
void save_map(const PwAffineMap& u, std::ostream& out);
void save_map(const PwAffineMap& u, const std::string& path);
PwAffineMap load_map(std::istream& in);
PwAffineMap load_map(const std::string& path);

}  // namespace polyvar::meshmaps
