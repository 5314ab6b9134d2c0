#pragma once

#include <Eigen/Dense>
#include <memory>
#include <vector>

#include "polyvar/common.hpp"

namespace polyvar::meshmaps {

// Positive-weight rule on the reference simplex, stored in barycentric
// coordinates; weights sum to the reference volume 1/n!.
struct QuadratureRule {
    int dim = 0;
    int order = 0;
    Eigen::MatrixXd points;   // (dim+1) x Q barycentric
    Eigen::VectorXd weights;  // Q

    int size() const { return static_cast<int>(weights.size()); }

    // Exact for polynomials of total degree <= order. Symmetric rules at low
    // order, collapsed Gauss-Legendre products (always positive) above.
    static QuadratureRule simplex(int dim, int order);
};

class SimplicialMesh {
public:
    SimplicialMesh(int dim, Eigen::MatrixXd vertices, Eigen::MatrixXi cells);

    int dim() const { return dim_; }
    int num_vertices() const { return static_cast<int>(vertices_.cols()); }
    int num_cells() const { return static_cast<int>(cells_.cols()); }
    const Eigen::MatrixXd& vertices() const { return vertices_; }
    const Eigen::MatrixXi& cells() const { return cells_; }
    const std::vector<int>& boundary_nodes() const { return boundary_nodes_; }
    bool is_boundary_node(int v) const;

    double cell_volume(int c) const { return cell_volumes_[c]; }
    const Eigen::VectorXd& cell_volumes() const { return cell_volumes_; }
    double total_volume() const { return total_volume_; }

    // Gradients of the barycentric coordinate functions, rows = local vertex.
    const Eigen::MatrixXd& barycentric_gradients(int c) const { return bary_grads_[c]; }
    Eigen::VectorXd cell_centroid(int c) const;
    Eigen::VectorXd point_from_barycentric(int c, const Eigen::VectorXd& bary) const;

private:
    int dim_;
    Eigen::MatrixXd vertices_;
    Eigen::MatrixXi cells_;
    std::vector<int> boundary_nodes_;
    Eigen::VectorXd cell_volumes_;
    std::vector<Eigen::MatrixXd> bary_grads_;
    double total_volume_ = 0.0;
};

using MeshPtr = std::shared_ptr<const SimplicialMesh>;

// Unit cube [0,1]^n, n in {2,3}, `divisions` cells per side.
MeshPtr build_box_mesh(int n, int divisions);

// Unit square with independent x/y divisions (band-aligned experiments).
MeshPtr build_rect_mesh(int nx, int ny);

// Triangulated polygon inscribed in the unit circle with target edge
// length h. No vertex sits at the origin; the origin lies strictly inside
// one cell of the innermost fan.
MeshPtr build_disc_mesh(double h);

// Gauss-Legendre nodes and weights on [0,1].
void gauss_legendre_unit(int n, std::vector<double>& x, std::vector<double>& w);

}  // namespace polyvar::meshmaps
