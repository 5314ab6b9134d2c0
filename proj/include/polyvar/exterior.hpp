#pragma once

#include <Eigen/Dense>
#include <utility>
#include <vector>

#include "polyvar/common.hpp"

namespace polyvar::exterior {

// Hard cap: C(8,4)=70 keeps every wedge object small and dense.
inline constexpr int kMaxDim = 8;

// Strictly increasing 0-based index set in an ambient dimension.
struct IndexSubset {
    int ambient_dim = 0;
    std::vector<int> indices;

    int size() const { return static_cast<int>(indices.size()); }
    bool contains(int i) const;
    IndexSubset complement() const;
};

bool operator==(const IndexSubset& a, const IndexSubset& b);

// All cardinality-l subsets of {0,...,n-1} in lexicographic order.
const std::vector<IndexSubset>& basis_subsets(int n, int l);

// Position of `s` within basis_subsets(s.ambient_dim, s.size()).
int subset_rank(const IndexSubset& s);

// Sign sigma(I) with e_I ^ e_{I^c} = sigma(I) e_{0..n-1}.
int sigma_sign(const IndexSubset& s);

// Sign and merged subset of e_I ^ e_J, zero sign when they intersect.
std::pair<int, IndexSubset> wedge_basis(const IndexSubset& a, const IndexSubset& b);

struct WedgeVector {
    int ambient_dim = 0;
    int degree = 0;
    Eigen::VectorXd coords;

    static WedgeVector zero(int n, int l);
    static WedgeVector basis(int n, const IndexSubset& s);
};

// Same coordinates, interpreted against the dual basis.
struct WedgeForm {
    int ambient_dim = 0;
    int degree = 0;
    Eigen::VectorXd coords;

    static WedgeForm zero(int n, int l);
    static WedgeForm basis(int n, const IndexSubset& s);
    static WedgeForm volume(int n);  // e*_0 ^ ... ^ e*_{n-1}

    double apply(const WedgeVector& v) const;
};

// Wedge of column vectors v_0 ^ ... ^ v_{l-1}; columns.cols() == l.
WedgeVector wedge_of_columns(const Eigen::MatrixXd& columns);

WedgeVector wedge(const WedgeVector& a, const WedgeVector& b);

// Gram-determinant inner product of two simple l-vectors given by columns.
double wedge_inner(const Eigen::MatrixXd& vs, const Eigen::MatrixXd& ws);

// The induced map on l-th wedge powers of a linear map E -> F.
// `matrix` has C(m,l) rows (target subsets) and C(n,l) columns (source
// subsets); entry (J,I) is the minor of `a` with rows J and columns I,
// so apply(basis I) carries the wedge of the I-columns of `a`.
struct MinorMatrix {
    int source_dim = 0;  // n
    int target_dim = 0;  // m
    int degree = 0;      // l
    Eigen::MatrixXd matrix;

    WedgeVector apply(const WedgeVector& v) const;
    double entry(const IndexSubset& source, const IndexSubset& target) const;
};

// a is the m-by-n matrix of a map R^n -> R^m; 1 <= l <= min(n,m).
MinorMatrix lift_minors(const Eigen::MatrixXd& a, int l);

// Directional derivative of lift_minors at `a` in direction `da`.
MinorMatrix lift_minors_derivative(const Eigen::MatrixXd& a, const Eigen::MatrixXd& da, int l);

// Adjoint of the directional derivative: the m-by-n matrix H with
// <H, B> = <G, lift_minors_derivative(a, B, l).matrix> for all B.
Eigen::MatrixXd lift_minors_derivative_adjoint(const Eigen::MatrixXd& a, const Eigen::MatrixXd& g,
                                               int l);

// Contraction: (i_U omega)(w) = omega(U ^ w).
WedgeForm interior_product(const WedgeVector& u, const WedgeForm& omega);

// Both sides of the graph identity for v -> (v, a(v)): the left side pairs
// (i_U Omega) ^ chi with the n-th wedge power of the graph map, the right
// side is (-1)^{k(n-k)} chi(wedge_k a . U).
std::pair<double, double> graph_identity_sides(const Eigen::MatrixXd& a, const WedgeVector& u,
                                               const WedgeForm& chi);

// det of a small square matrix: cofactor formulas up to 3x3, pivoted LU above.
double small_det(const Eigen::MatrixXd& a);

// Frobenius norms of all wedge powers 1..k of v (used by the r_k weight).
std::vector<double> minor_norms(const Eigen::MatrixXd& v, int k);

}  // namespace polyvar::exterior
