#include "polyvar/youngmeasure.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

namespace polyvar::youngmeasure {

double r_k(const Eigen::MatrixXd& v, int k) {
    double r = 1.0;
    for (double norm : exterior::minor_norms(v, k)) r += norm;
    return r;
}

namespace {

bool lexicographic_less(const JetAtom& a, const JetAtom& b) {
    if (a.cell != b.cell) return a.cell < b.cell;
    for (Eigen::Index i = 0; i < a.t.size(); ++i)
        if (a.t[i] != b.t[i]) return a.t[i] < b.t[i];
    for (Eigen::Index i = 0; i < a.x.size(); ++i)
        if (a.x[i] != b.x[i]) return a.x[i] < b.x[i];
    for (Eigen::Index i = 0; i < a.v.size(); ++i)
        if (a.v(i) != b.v(i)) return a.v(i) < b.v(i);
    return a.weight < b.weight;
}

}  // namespace

AtomicYoungMeasure::AtomicYoungMeasure(meshmaps::MeshPtr mesh, std::vector<JetAtom> atoms,
                                       int degree_bound)
    : mesh_(std::move(mesh)), atoms_(std::move(atoms)), k_(degree_bound) {
    if (atoms_.empty()) throw std::invalid_argument("AtomicYoungMeasure: no atoms");
    if (k_ < 1) throw std::invalid_argument("AtomicYoungMeasure: degree bound must be >= 1");
    n_ = static_cast<int>(atoms_.front().t.size());
    m_ = static_cast<int>(atoms_.front().x.size());
    for (const auto& a : atoms_) {
        if (a.t.size() != n_ || a.x.size() != m_ || a.v.rows() != m_ || a.v.cols() != n_)
            throw std::invalid_argument("AtomicYoungMeasure: inconsistent atom shapes");
        if (!(a.weight > 0.0)) throw std::invalid_argument("AtomicYoungMeasure: weights must be positive");
        if (!a.t.allFinite() || !a.x.allFinite() || !a.v.allFinite() || !std::isfinite(a.weight))
            throw std::invalid_argument("AtomicYoungMeasure: non-finite atom");
        if (mesh_ && (a.cell < 0 || a.cell >= mesh_->num_cells()))
            throw std::invalid_argument("AtomicYoungMeasure: atom cell out of range");
    }
    std::sort(atoms_.begin(), atoms_.end(), lexicographic_less);
    std::vector<double> w(atoms_.size());
    for (std::size_t i = 0; i < atoms_.size(); ++i) w[i] = atoms_[i].weight;
    total_weight_ = tree_sum(w);
}

double AtomicYoungMeasure::integrate(const std::function<double(const JetAtom&)>& f) const {
    // Group contiguous runs of equal cell index; sequential sum inside a run,
    // tree reduction across runs.
    std::vector<double> per_cell;
    per_cell.reserve(atoms_.size());
    std::size_t i = 0;
    bool saw_inf = false;
    while (i < atoms_.size()) {
        const int cell = atoms_[i].cell;
        double acc = 0.0;
        while (i < atoms_.size() && atoms_[i].cell == cell) {
            const double value = f(atoms_[i]);
            if (std::isnan(value))
                throw EvaluationError("AtomicYoungMeasure::integrate: NaN from integrand");
            if (std::isinf(value)) {
                if (value < 0)
                    throw EvaluationError("AtomicYoungMeasure::integrate: -inf from integrand");
                saw_inf = true;
            }
            acc += atoms_[i].weight * value;
            ++i;
        }
        per_cell.push_back(acc);
    }
    if (saw_inf) return std::numeric_limits<double>::infinity();
    return tree_sum(per_cell);
}

AtomicYoungMeasure from_map(const meshmaps::PwAffineMap& u, const meshmaps::QuadratureRule& q,
                            int degree_bound) {
    const auto& mesh = *u.mesh;
    if (q.dim != mesh.dim()) throw std::invalid_argument("from_map: quadrature dimension mismatch");
    double ref = 1.0;
    for (int i = 2; i <= mesh.dim(); ++i) ref /= i;
    std::vector<JetAtom> atoms;
    atoms.reserve(static_cast<std::size_t>(mesh.num_cells()) * q.size());
    for (int c = 0; c < mesh.num_cells(); ++c) {
        const double scale = mesh.cell_volume(c) / ref;
        const Eigen::MatrixXd grad = u.cell_gradient(c);
        for (int p = 0; p < q.size(); ++p) {
            const Eigen::VectorXd bary = q.points.col(p);
            JetAtom a;
            a.cell = c;
            a.t = mesh.point_from_barycentric(c, bary);
            a.x = u.evaluate(c, bary);
            a.v = grad;
            a.weight = scale * q.weights[p];
            atoms.push_back(std::move(a));
        }
    }
    return AtomicYoungMeasure(u.mesh, std::move(atoms), degree_bound);
}

AtomicYoungMeasure laminate(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B, double lambda,
                            const meshmaps::PwAffineMap& base, int degree_bound) {
    if (!(lambda > 0.0 && lambda < 1.0))
        throw std::invalid_argument("laminate: lambda must lie in (0,1)");
    const auto& mesh = *base.mesh;
    const int n = mesh.dim();
    if (A.rows() != base.target_dim() || A.cols() != n || B.rows() != A.rows() ||
        B.cols() != A.cols())
        throw std::invalid_argument("laminate: gradient shapes mismatch");
    const Eigen::VectorXd center_bary = Eigen::VectorXd::Constant(n + 1, 1.0 / (n + 1));
    std::vector<JetAtom> atoms;
    atoms.reserve(2 * static_cast<std::size_t>(mesh.num_cells()));
    for (int c = 0; c < mesh.num_cells(); ++c) {
        JetAtom a;
        a.cell = c;
        a.t = mesh.cell_centroid(c);
        a.x = base.evaluate(c, center_bary);
        a.v = A;
        a.weight = lambda * mesh.cell_volume(c);
        atoms.push_back(a);
        a.v = B;
        a.weight = (1.0 - lambda) * mesh.cell_volume(c);
        atoms.push_back(std::move(a));
    }
    return AtomicYoungMeasure(base.mesh, std::move(atoms), degree_bound);
}

double integrate(const AtomicYoungMeasure& eta, const variational::IntegrandSpec& L) {
    return eta.integrate([&](const JetAtom& a) { return L.evaluate_jet(a.t, a.x, a.v); });
}

double integrate(const AtomicYoungMeasure& eta,
                 const std::function<double(const JetAtom&)>& jet_function) {
    return eta.integrate(jet_function);
}

double marginal_residual(const AtomicYoungMeasure& eta) {
    if (!eta.mesh()) throw std::invalid_argument("marginal_residual: measure carries no mesh");
    const auto& mesh = *eta.mesh();
    std::vector<double> cell_weight(mesh.num_cells(), 0.0);
    for (const auto& a : eta.atoms()) cell_weight[a.cell] += a.weight;
    double worst = 0.0;
    for (int c = 0; c < mesh.num_cells(); ++c)
        worst = std::max(worst, std::abs(cell_weight[c] - mesh.cell_volume(c)));
    return worst;
}

double closedness_residual(const AtomicYoungMeasure& eta, const nulllag::NullLagrangianSpec& F) {
    return std::abs(eta.integrate([&](const JetAtom& a) { return F.evaluate(a.t, a.x, a.v); }));
}

double anchoring_residual(const AtomicYoungMeasure& eta, const meshmaps::PwAffineMap& u0,
                          const nulllag::FormField& chi, const nulllag::LVectorField& U,
                          const meshmaps::QuadratureRule& q) {
    if (chi.degree != 0)
        throw std::invalid_argument("anchoring_residual: chi must be a scalar function");
    if (U.degree != 1) throw std::invalid_argument("anchoring_residual: U must be a vector field");
    const nulllag::LVectorField div_u = nulllag::u_dot(U);
    const auto integrand = [&](const Eigen::VectorXd& t, const Eigen::VectorXd& x,
                               const Eigen::MatrixXd& v) {
        const Eigen::VectorXd grad_chi = chi.derivs(x).row(0).transpose();
        return grad_chi.dot(v * U.coeffs(t)) + chi.coeffs(x)[0] * div_u.coeffs(t)[0];
    };

    const double measure_side =
        eta.integrate([&](const JetAtom& a) { return integrand(a.t, a.x, a.v); });

    const auto& mesh = *u0.mesh;
    double ref = 1.0;
    for (int i = 2; i <= mesh.dim(); ++i) ref /= i;
    const auto cell_value = [&](std::size_t c) -> double {
        const Eigen::MatrixXd grad = u0.cell_gradient(static_cast<int>(c));
        const double scale = mesh.cell_volume(static_cast<int>(c)) / ref;
        double acc = 0.0;
        for (int p = 0; p < q.size(); ++p) {
            const Eigen::VectorXd bary = q.points.col(p);
            const Eigen::VectorXd t = mesh.point_from_barycentric(static_cast<int>(c), bary);
            const Eigen::VectorXd x = u0.evaluate(static_cast<int>(c), bary);
            acc += q.weights[p] * integrand(t, x, grad);
        }
        return scale * acc;
    };
    const double map_side =
        tree_sum(parallel_map(static_cast<std::size_t>(mesh.num_cells()), cell_value));
    return std::abs(measure_side - map_side);
}

TightnessProfile tightness_profile(const std::vector<AtomicYoungMeasure>& family,
                                   const std::vector<double>& radii, const Eigen::VectorXd& x0) {
    TightnessProfile profile;
    profile.radii = radii;
    profile.tails.reserve(radii.size());
    for (const double R : radii) {
        double sup = 0.0;
        for (const auto& eta : family) {
            const double tail = eta.integrate([&](const JetAtom& a) {
                const bool inside = (a.x - x0).norm() <= R && a.v.norm() <= R;
                return inside ? 0.0 : r_k(a.v, eta.degree_bound());
            });
            sup = std::max(sup, tail);
        }
        profile.tails.push_back(sup);
    }
    return profile;
}

Disintegration disintegrate(const AtomicYoungMeasure& eta, double x_tol) {
    Disintegration d;
    d.degree_bound = eta.degree_bound();
    // Atoms are in canonical order: fibers are contiguous runs of equal (cell, t).
    const auto& atoms = eta.atoms();
    std::size_t i = 0;
    while (i < atoms.size()) {
        std::size_t j = i + 1;
        while (j < atoms.size() && atoms[j].cell == atoms[i].cell &&
               (atoms[j].t.array() == atoms[i].t.array()).all())
            ++j;
        Fiber fiber;
        fiber.cell = atoms[i].cell;
        fiber.t = atoms[i].t;
        double w = 0.0;
        for (std::size_t a = i; a < j; ++a) w += atoms[a].weight;
        fiber.weight = w;
        Eigen::VectorXd mean_x = Eigen::VectorXd::Zero(eta.target_dim());
        for (std::size_t a = i; a < j; ++a) mean_x += (atoms[a].weight / w) * atoms[a].x;
        for (std::size_t a = i; a < j; ++a) {
            if ((atoms[a].x - mean_x).cwiseAbs().maxCoeff() > x_tol) {
                d.graph = false;
                d.offending_cell = fiber.cell;
                return d;
            }
        }
        fiber.x = mean_x;
        fiber.gradients.reserve(j - i);
        fiber.gamma.reserve(j - i);
        for (std::size_t a = i; a < j; ++a) {
            fiber.gradients.push_back(atoms[a].v);
            fiber.gamma.push_back(atoms[a].weight / w);
        }
        const int p = std::min(eta.domain_dim(), eta.target_dim());
        for (int l = 1; l <= eta.degree_bound(); ++l) {
            if (l > p) break;
            Eigen::MatrixXd moment;
            for (std::size_t g = 0; g < fiber.gradients.size(); ++g) {
                const Eigen::MatrixXd lifted =
                    (l == 1) ? fiber.gradients[g]
                             : exterior::lift_minors(fiber.gradients[g], l).matrix;
                if (moment.size() == 0)
                    moment = fiber.gamma[g] * lifted;
                else
                    moment += fiber.gamma[g] * lifted;
            }
            fiber.moments.push_back(std::move(moment));
        }
        d.fibers.push_back(std::move(fiber));
        i = j;
    }
    return d;
}

double structure_residual(const Disintegration& d) {
    if (!d.graph)
        throw std::invalid_argument("structure_residual: disintegration is not graph-concentrated");
    double worst = 0.0;
    for (const auto& fiber : d.fibers) {
        for (std::size_t l = 2; l <= fiber.moments.size(); ++l) {
            const Eigen::MatrixXd lifted =
                exterior::lift_minors(fiber.moments[0], static_cast<int>(l)).matrix;
            worst = std::max(worst, (fiber.moments[l - 1] - lifted).norm());
        }
    }
    return worst;
}

double jensen_gap(const AtomicYoungMeasure& eta, const variational::IntegrandSpec& L,
                  double structure_tol) {
    const Disintegration d = disintegrate(eta);
    if (!d.graph) throw std::invalid_argument("jensen_gap: measure is not graph-concentrated");
    if (structure_residual(d) > structure_tol)
        throw std::invalid_argument("jensen_gap: not a generalized map (structure residual)");
    const double measure_value = integrate(eta, L);
    std::vector<double> per_fiber(d.fibers.size());
    for (std::size_t i = 0; i < d.fibers.size(); ++i) {
        const auto& fiber = d.fibers[i];
        per_fiber[i] = fiber.weight * L.evaluate_jet(fiber.t, fiber.x, fiber.moments[0]);
    }
    return measure_value - tree_sum(per_fiber);
}

void save_measure(const AtomicYoungMeasure& eta, std::ostream& out) {
    out << eta.degree_bound() << ' ' << eta.domain_dim() << ' ' << eta.target_dim() << ' '
        << eta.atoms().size() << '\n';
    for (const auto& a : eta.atoms()) {
        out << a.cell;
        for (Eigen::Index i = 0; i < a.t.size(); ++i) out << ' ' << format_double(a.t[i]);
        for (Eigen::Index i = 0; i < a.x.size(); ++i) out << ' ' << format_double(a.x[i]);
        for (Eigen::Index r = 0; r < a.v.rows(); ++r)
            for (Eigen::Index c = 0; c < a.v.cols(); ++c) out << ' ' << format_double(a.v(r, c));
        out << ' ' << format_double(a.weight) << '\n';
    }
}

void save_measure(const AtomicYoungMeasure& eta, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("save_measure: cannot open " + path);
    save_measure(eta, out);
}

AtomicYoungMeasure load_measure(std::istream& in) {
    int k = 0, n = 0, m = 0;
    std::size_t count = 0;
    if (!(in >> k >> n >> m >> count)) throw std::runtime_error("load_measure: bad header");
    std::vector<JetAtom> atoms(count);
    for (auto& a : atoms) {
        a.t.resize(n);
        a.x.resize(m);
        a.v.resize(m, n);
        if (!(in >> a.cell)) throw std::runtime_error("load_measure: bad atom line");
        for (int i = 0; i < n; ++i)
            if (!(in >> a.t[i])) throw std::runtime_error("load_measure: bad atom line");
        for (int i = 0; i < m; ++i)
            if (!(in >> a.x[i])) throw std::runtime_error("load_measure: bad atom line");
        for (int r = 0; r < m; ++r)
            for (int c = 0; c < n; ++c)
                if (!(in >> a.v(r, c))) throw std::runtime_error("load_measure: bad atom line");
        if (!(in >> a.weight)) throw std::runtime_error("load_measure: bad atom line");
    }
    return AtomicYoungMeasure(nullptr, std::move(atoms), k);
}

AtomicYoungMeasure load_measure(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_measure: cannot open " + path);
    return load_measure(in);
}

}  // namespace polyvar::youngmeasure
