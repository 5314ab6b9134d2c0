#include "polyvar/nulllag.hpp"

#include <cmath>

namespace polyvar::nulllag {

namespace {

double lifted_value(const NullLagrangianSpec& spec, const Eigen::VectorXd& t,
                    const Eigen::VectorXd& x, const variational::MinorTuple& minors) {
    const int l = spec.l;
    const int n = spec.domain_dim;
    const int m = spec.target_dim;
    double value = 0.0;

    // chi term: chi_x applied to wedge_{l-1} v . U_dot(t).
    const Eigen::VectorXd ud = spec.field_dot.coeffs(t);
    if (l == 1) {
        value += spec.chi.coeffs(x)[0] * ud[0];
    } else {
        const exterior::MinorMatrix lower{n, m, l - 1, minors[l - 2]};
        const exterior::WedgeVector w = lower.apply({n, l - 1, ud});
        value += spec.chi.at(x).apply(w);
    }

    // dchi term: dchi_x applied to wedge_l v . U(t).
    const exterior::MinorMatrix top{n, m, l, minors[l - 1]};
    const exterior::WedgeVector w = top.apply(spec.field.at(t));
    value += spec.chi.exterior_derivative(x).apply(w);
    return value;
}

}  // namespace

double NullLagrangianSpec::evaluate(const Eigen::VectorXd& t, const Eigen::VectorXd& x,
                                    const Eigen::MatrixXd& v) const {
    if (field.compactly_supported && !field.in_support(t)) return 0.0;
    return lifted_value(*this, t, x, variational::minor_tuple(v, l));
}

double NullLagrangianSpec::evaluate_lifted(const Eigen::VectorXd& t, const Eigen::VectorXd& x,
                                           const variational::MinorTuple& minors) const {
    if (field.compactly_supported && !field.in_support(t)) return 0.0;
    return lifted_value(*this, t, x, minors);
}

NullLagrangianSpec make_null_lagrangian(int l, FormField chi, LVectorField u) {
    if (l < 1) throw std::invalid_argument("make_null_lagrangian: l must be >= 1");
    if (u.degree != l)
        throw std::invalid_argument("make_null_lagrangian: field degree must equal l");
    if (chi.degree != l - 1)
        throw std::invalid_argument("make_null_lagrangian: form degree must equal l-1");
    if (!u.compactly_supported)
        throw std::invalid_argument("make_null_lagrangian: field must be compactly supported");
    NullLagrangianSpec spec;
    spec.l = l;
    spec.domain_dim = u.domain_dim;
    spec.target_dim = chi.target_dim;
    spec.field_dot = u_dot(u);
    spec.chi = std::move(chi);
    spec.field = std::move(u);
    return spec;
}

namespace {

template <typename JetAt>
double quadrature_residual(const NullLagrangianSpec& F, const meshmaps::SimplicialMesh& mesh,
                           const meshmaps::QuadratureRule& q, const JetAt& jet_at) {
    double ref = 1.0;
    for (int i = 2; i <= mesh.dim(); ++i) ref /= i;
    const auto cell_value = [&](std::size_t c) -> double {
        const double scale = mesh.cell_volume(static_cast<int>(c)) / ref;
        double acc = 0.0;
        for (int p = 0; p < q.size(); ++p) {
            const Eigen::VectorXd bary = q.points.col(p);
            const Eigen::VectorXd t = mesh.point_from_barycentric(static_cast<int>(c), bary);
            if (F.field.compactly_supported && !F.field.in_support(t)) continue;
            const auto [x, v] = jet_at(static_cast<int>(c), bary, t);
            acc += q.weights[p] * F.evaluate(t, x, v);
        }
        return scale * acc;
    };
    return tree_sum(parallel_map(static_cast<std::size_t>(mesh.num_cells()), cell_value));
}

}  // namespace

double vanishing_residual(const NullLagrangianSpec& F, const meshmaps::PwAffineMap& u,
                          const meshmaps::QuadratureRule& q) {
    return quadrature_residual(
        F, *u.mesh, q, [&](int c, const Eigen::VectorXd& bary, const Eigen::VectorXd&) {
            return std::make_pair(u.evaluate(c, bary), u.cell_gradient(c));
        });
}

double vanishing_residual(const NullLagrangianSpec& F, const meshmaps::SmoothMap& u,
                          const meshmaps::SimplicialMesh& mesh,
                          const meshmaps::QuadratureRule& q) {
    return quadrature_residual(F, mesh, q,
                               [&](int, const Eigen::VectorXd&, const Eigen::VectorXd& t) {
                                   return std::make_pair(u.value(t), u.gradient(t));
                               });
}

}  // namespace polyvar::nulllag

namespace polyvar::meshmaps {

double weak_minor_residual(const PwAffineMap& u, int l, const nulllag::FormField& chi,
                           const nulllag::LVectorField& U, const QuadratureRule& q) {
    if (l < 1 || l > std::min(u.mesh->dim(), u.target_dim()))
        throw std::invalid_argument("weak_minor_residual: unsupported degree");
    return nulllag::vanishing_residual(nulllag::make_null_lagrangian(l, chi, U), u, q);
}

double weak_minor_residual(const SmoothMap& u, const SimplicialMesh& mesh, int l,
                           const nulllag::FormField& chi, const nulllag::LVectorField& U,
                           const QuadratureRule& q) {
    if (l < 1 || l > std::min(mesh.dim(), u.target_dim))
        throw std::invalid_argument("weak_minor_residual: unsupported degree");
    return nulllag::vanishing_residual(nulllag::make_null_lagrangian(l, chi, U), u, mesh, q);
}

}  // namespace polyvar::meshmaps
