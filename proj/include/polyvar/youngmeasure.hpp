#pragma once

#include <Eigen/Dense>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "polyvar/integrand.hpp"
#include "polyvar/map.hpp"
#include "polyvar/mesh.hpp"
#include "polyvar/nulllag.hpp"

namespace polyvar::youngmeasure {

// Jet-space weight 1 + |v| + |wedge_2 v| + ... + |wedge_k v| (Frobenius).
double r_k(const Eigen::MatrixXd& v, int k);

struct JetAtom {
    int cell = -1;
    Eigen::VectorXd t;
    Eigen::VectorXd x;
    Eigen::MatrixXd v;
    double weight = 0.0;
};

// Finitely supported measure on jet space. Atoms are stored in a canonical
// order (cell, then lexicographic jet data), so integration results do not
// depend on construction order. The t-marginal matches the mesh volume
// element for measures built by from_map/laminate; marginal_residual
// quantifies any deviation.
class AtomicYoungMeasure {
public:
    AtomicYoungMeasure(meshmaps::MeshPtr mesh, std::vector<JetAtom> atoms, int degree_bound);

    int degree_bound() const { return k_; }
    int domain_dim() const { return n_; }
    int target_dim() const { return m_; }
    const std::vector<JetAtom>& atoms() const { return atoms_; }
    const meshmaps::MeshPtr& mesh() const { return mesh_; }
    double total_weight() const { return total_weight_; }

    // Per-cell sequential sums and a fixed-order tree across cells; bitwise
    // reproducible and identical to integrate_energy on from_map measures.
    double integrate(const std::function<double(const JetAtom&)>& f) const;

private:
    meshmaps::MeshPtr mesh_;
    std::vector<JetAtom> atoms_;
    int k_;
    int n_;
    int m_;
    double total_weight_;
};

// One atom per (cell, quadrature point): x = u(t), v = du on the cell,
// weight = cell volume * normalized quadrature weight.
AtomicYoungMeasure from_map(const meshmaps::PwAffineMap& u, const meshmaps::QuadratureRule& q,
                            int degree_bound);

// Two atoms per cell over the base map: gradients A and B with weights
// lambda and 1-lambda times the cell volume.
AtomicYoungMeasure laminate(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B, double lambda,
                            const meshmaps::PwAffineMap& base, int degree_bound);

double integrate(const AtomicYoungMeasure& eta, const variational::IntegrandSpec& L);
double integrate(const AtomicYoungMeasure& eta,
                 const std::function<double(const JetAtom&)>& jet_function);

// max over cells of |sum of atom weights - cell volume|.
double marginal_residual(const AtomicYoungMeasure& eta);

// |integral of F d eta|.
double closedness_residual(const AtomicYoungMeasure& eta, const nulllag::NullLagrangianSpec& F);

// |int (dchi_x(v U) + chi(x) div U) d eta - int (dchi_{u0}(du0 U) + chi(u0) div U) dt|
// with a scalar chi and a vector field U smooth up to the boundary.
double anchoring_residual(const AtomicYoungMeasure& eta, const meshmaps::PwAffineMap& u0,
                          const nulllag::FormField& chi, const nulllag::LVectorField& U,
                          const meshmaps::QuadratureRule& q);

struct TightnessProfile {
    std::vector<double> radii;
    std::vector<double> tails;  // sup over the family of the r_k tail mass
};

// Tail of the r_k integral outside Z(R) = {d(x0,x) <= R, |v| <= R}.
TightnessProfile tightness_profile(const std::vector<AtomicYoungMeasure>& family,
                                   const std::vector<double>& radii, const Eigen::VectorXd& x0);

struct Fiber {
    int cell = -1;
    Eigen::VectorXd t;
    Eigen::VectorXd x;
    double weight = 0.0;
    std::vector<Eigen::MatrixXd> gradients;
    std::vector<double> gamma;              // probabilities, sum to 1
    std::vector<Eigen::MatrixXd> moments;   // entry l-1 = Gamma-average of wedge_l v
};

struct Disintegration {
    bool graph = true;
    int offending_cell = -1;
    int degree_bound = 1;
    std::vector<Fiber> fibers;
};

// Groups atoms by base point (cell, t). Graph-concentrated iff every fiber
// has x-spread below x_tol; otherwise reports the offending cell.
Disintegration disintegrate(const AtomicYoungMeasure& eta, double x_tol = 1e-9);

// max over fibers and degrees 2..k of |moment_l - wedge_l(moment_1)|.
double structure_residual(const Disintegration& d);

// int L d eta - sum over fibers of weight * L(t, x, moment_1); nonnegative
// (up to round-off) for k-convex L on generalized maps.
double jensen_gap(const AtomicYoungMeasure& eta, const variational::IntegrandSpec& L,
                  double structure_tol = 1e-9);

// Serialization: header "k n m #atoms", one atom per line, 17 significant
// digits, bit-exact round-trip. Loaded measures carry no mesh.
void save_measure(const AtomicYoungMeasure& eta, std::ostream& out);
void save_measure(const AtomicYoungMeasure& eta, const std::string& path);
AtomicYoungMeasure load_measure(std::istream& in);
AtomicYoungMeasure load_measure(const std::string& path);

}  // namespace polyvar::youngmeasure
