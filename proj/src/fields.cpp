#include "polyvar/fields.hpp"

#include <cmath>

#include "polyvar/common.hpp"
#include "polyvar/rng.hpp"

namespace polyvar::nulllag {

using exterior::basis_subsets;
using exterior::IndexSubset;
using exterior::sigma_sign;
using exterior::subset_rank;
using exterior::wedge_basis;

double DomainDescriptor::diameter() const {
    switch (kind) {
        case Kind::Ball:
        case Kind::Annulus:
            return 2.0 * radius;
        case Kind::Box:
            return (box_hi - box_lo).norm();
    }
    return 0.0;
}

DomainDescriptor DomainDescriptor::unit_ball(int n) {
    DomainDescriptor d;
    d.kind = Kind::Ball;
    d.center = Eigen::VectorXd::Zero(n);
    d.radius = 1.0;
    return d;
}

DomainDescriptor DomainDescriptor::unit_box(int n) {
    DomainDescriptor d;
    d.kind = Kind::Box;
    d.box_lo = Eigen::VectorXd::Zero(n);
    d.box_hi = Eigen::VectorXd::Ones(n);
    d.center = Eigen::VectorXd::Constant(n, 0.5);
    return d;
}

DomainDescriptor DomainDescriptor::annulus(int n, double inner, double outer) {
    DomainDescriptor d;
    d.kind = Kind::Annulus;
    d.center = Eigen::VectorXd::Zero(n);
    d.inner_radius = inner;
    d.radius = outer;
    return d;
}

double ScalarBump::value(const Eigen::VectorXd& t) const {
    const double s2 = (t - center).squaredNorm() / (radius * radius);
    if (s2 >= 1.0) return 0.0;
    return std::exp(1.0 - 1.0 / (1.0 - s2));
}

Eigen::VectorXd ScalarBump::gradient(const Eigen::VectorXd& t) const {
    const Eigen::VectorXd d = t - center;
    const double s2 = d.squaredNorm() / (radius * radius);
    if (s2 >= 1.0) return Eigen::VectorXd::Zero(t.size());
    const double g = 1.0 - s2;
    return value(t) * (-2.0 / (radius * radius * g * g)) * d;
}

double smooth_clamp(double s) {
    const double a = std::abs(s);
    if (a <= 2.0) return s;
    const double tail = 2.0 + 0.5 * std::sqrt(3.14159265358979323846) * std::erf(a - 2.0);
    return s > 0 ? tail : -tail;
}

double smooth_clamp_derivative(double s) {
    const double a = std::abs(s);
    if (a <= 2.0) return 1.0;
    const double d = a - 2.0;
    return std::exp(-d * d);
}

exterior::WedgeVector LVectorField::at(const Eigen::VectorXd& t) const {
    return {domain_dim, degree, coeffs(t)};
}

bool LVectorField::in_support(const Eigen::VectorXd& t) const {
    if (!compactly_supported) return true;
    return (t - support_center).norm() < support_radius;
}

double LVectorField::sup_norm_estimate(std::uint64_t seed, int samples) const {
    Rng rng(seed);
    const double r = compactly_supported ? support_radius : 1.0;
    const Eigen::VectorXd c =
        compactly_supported ? support_center : Eigen::VectorXd::Zero(domain_dim);
    double sup = 0.0;
    for (int i = 0; i < samples; ++i) {
        Eigen::VectorXd t(domain_dim);
        for (int j = 0; j < domain_dim; ++j) t[j] = c[j] + r * rng.uniform(-1.0, 1.0);
        sup = std::max(sup, coeffs(t).norm());
    }
    return sup;
}

exterior::WedgeForm FormField::at(const Eigen::VectorXd& x) const {
    return {target_dim, degree, coeffs(x)};
}

exterior::WedgeForm FormField::exterior_derivative(const Eigen::VectorXd& x) const {
    const Eigen::MatrixXd d = derivs(x);
    exterior::WedgeForm out = exterior::WedgeForm::zero(target_dim, degree + 1);
    const auto& lower = basis_subsets(target_dim, degree);
    for (std::size_t ci = 0; ci < lower.size(); ++ci) {
        for (int j = 0; j < target_dim; ++j) {
            if (lower[ci].contains(j)) continue;
            IndexSubset single{target_dim, {j}};
            auto [sign, merged] = wedge_basis(single, lower[ci]);
            out.coords[subset_rank(merged)] +=
                sign * d(static_cast<Eigen::Index>(ci), j);
        }
    }
    return out;
}

void validate_field(const LVectorField& u, std::uint64_t seed, int samples, double tol) {
    if (!u.derivs) return;
    Rng rng(seed);
    const double r = u.compactly_supported ? 0.9 * u.support_radius : 0.9;
    const Eigen::VectorXd c =
        u.compactly_supported ? u.support_center : Eigen::VectorXd::Zero(u.domain_dim);
    const double h = 1e-6;
    for (int s = 0; s < samples; ++s) {
        Eigen::VectorXd t(u.domain_dim);
        for (int j = 0; j < u.domain_dim; ++j) t[j] = c[j] + r * rng.uniform(-1.0, 1.0);
        const Eigen::MatrixXd d = u.derivs(t);
        for (int j = 0; j < u.domain_dim; ++j) {
            Eigen::VectorXd tp = t, tm = t;
            tp[j] += h;
            tm[j] -= h;
            const Eigen::VectorXd fd = (u.coeffs(tp) - u.coeffs(tm)) / (2.0 * h);
            if ((fd - d.col(j)).cwiseAbs().maxCoeff() > tol * (1.0 + fd.cwiseAbs().maxCoeff()))
                throw EvaluationError(
                    "LVectorField: declared derivatives disagree with finite differences");
        }
    }
}

void validate_field(const FormField& chi, std::uint64_t seed, int samples, double tol,
                    double sample_radius) {
    Rng rng(seed);
    const double h = 1e-6;
    for (int s = 0; s < samples; ++s) {
        Eigen::VectorXd x(chi.target_dim);
        for (int j = 0; j < chi.target_dim; ++j) x[j] = sample_radius * rng.uniform(-1.0, 1.0);
        if (chi.coeffs(x).norm() > chi.sup_coeff + 1e-9)
            throw EvaluationError("FormField: declared sup bound violated");
        if (chi.exterior_derivative(x).coords.norm() > chi.sup_dcoeff + 1e-9)
            throw EvaluationError("FormField: declared derivative bound violated");
        if (!chi.derivs) continue;
        const Eigen::MatrixXd d = chi.derivs(x);
        for (int j = 0; j < chi.target_dim; ++j) {
            Eigen::VectorXd xp = x, xm = x;
            xp[j] += h;
            xm[j] -= h;
            const Eigen::VectorXd fd = (chi.coeffs(xp) - chi.coeffs(xm)) / (2.0 * h);
            if ((fd - d.col(j)).cwiseAbs().maxCoeff() > tol * (1.0 + fd.cwiseAbs().maxCoeff()))
                throw EvaluationError(
                    "FormField: declared derivatives disagree with finite differences");
        }
    }
}

LVectorField u_dot(const LVectorField& u) {
    if (u.degree < 1) throw std::invalid_argument("u_dot: degree must be >= 1");
    if (!u.derivs) throw std::invalid_argument("u_dot: field carries no derivative callbacks");
    const int n = u.domain_dim;
    const int l = u.degree;
    const int overall = (l % 2 == 0) ? -1 : 1;  // (-1)^{l+1}

    // Symbolic table: U_dot_K = (-1)^{l+1} sigma(K) sum_{j not in K}
    //   dU_{K u {j}}/dt_j * sigma(K u {j}) * sign(e*_j ^ e*_{(K u {j})^c}).
    struct Term {
        int coeff_index;
        int deriv_axis;
        double factor;
    };
    const auto& lower = basis_subsets(n, l - 1);
    std::vector<std::vector<Term>> table(lower.size());
    for (std::size_t ki = 0; ki < lower.size(); ++ki) {
        const IndexSubset& k = lower[ki];
        for (int j = 0; j < n; ++j) {
            if (k.contains(j)) continue;
            IndexSubset single{n, {j}};
            auto [msign, i] = wedge_basis(single, k);
            (void)msign;
            const IndexSubset ic = i.complement();
            auto [jsign, merged] = wedge_basis(single, ic);
            (void)merged;
            const double factor =
                overall * sigma_sign(k) * sigma_sign(i) * jsign;
            table[ki].push_back(Term{subset_rank(i), j, factor});
        }
    }

    LVectorField out;
    out.domain_dim = n;
    out.degree = l - 1;
    out.compactly_supported = u.compactly_supported;
    out.support_center = u.support_center;
    out.support_radius = u.support_radius;
    const auto derivs = u.derivs;
    const auto size = static_cast<Eigen::Index>(lower.size());
    out.coeffs = [derivs, table, size](const Eigen::VectorXd& t) -> Eigen::VectorXd {
        const Eigen::MatrixXd d = derivs(t);
        Eigen::VectorXd c = Eigen::VectorXd::Zero(size);
        for (Eigen::Index ki = 0; ki < size; ++ki)
            for (const auto& term : table[static_cast<std::size_t>(ki)])
                c[ki] += term.factor * d(term.coeff_index, term.deriv_axis);
        return c;
    };
    return out;
}

LVectorField divergence_one_field(const DomainDescriptor& domain) {
    if (!domain.star_shaped())
        throw UnsupportedDomainError("divergence_one_field: domain must be star-shaped");
    const int n = domain.dim();
    const Eigen::VectorXd c = domain.centroid();
    LVectorField u;
    u.domain_dim = n;
    u.degree = 1;
    u.compactly_supported = false;
    u.support_center = c;
    u.support_radius = 0.5 * domain.diameter();
    u.coeffs = [c, n](const Eigen::VectorXd& t) -> Eigen::VectorXd { return (t - c) / n; };
    u.derivs = [n](const Eigen::VectorXd& t) -> Eigen::MatrixXd {
        return Eigen::MatrixXd::Identity(n, n) / n;
    };
    return u;
}

}  // namespace polyvar::nulllag
