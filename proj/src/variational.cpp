#include "polyvar/variational.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "polyvar/fields.hpp"
#include "polyvar/rng.hpp"

namespace polyvar::variational {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

MinorTuple minor_tuple(const Eigen::MatrixXd& v, int k) {
    const int p = static_cast<int>(std::min(v.rows(), v.cols()));
    MinorTuple tuple;
    tuple.reserve(std::min(k, p));
    for (int l = 1; l <= std::min(k, p); ++l)
        tuple.push_back(l == 1 ? v : exterior::lift_minors(v, l).matrix);
    return tuple;
}

double IntegrandSpec::evaluate(const Eigen::VectorXd& t, const Eigen::VectorXd& x,
                               const MinorTuple& minors) const {
    const double val = value(t, x, minors);
    if (std::isnan(val)) throw EvaluationError("IntegrandSpec: evaluator returned NaN");
    if (std::isinf(val) && val < 0)
        throw EvaluationError("IntegrandSpec: evaluator returned -inf");
    return val;
}

double IntegrandSpec::evaluate_jet(const Eigen::VectorXd& t, const Eigen::VectorXd& x,
                                   const Eigen::MatrixXd& v) const {
    return evaluate(t, x, minor_tuple(v, k));
}

void validate_integrand_gradient(const IntegrandSpec& L, std::uint64_t seed, int trials,
                                 double tol) {
    if (!L.has_gradient()) return;
    Rng rng(seed);
    const double h = 1e-6;
    for (int trial = 0; trial < trials; ++trial) {
        Eigen::VectorXd t(L.domain_dim), x(L.target_dim);
        for (int i = 0; i < L.domain_dim; ++i) t[i] = rng.uniform(-1, 1);
        for (int i = 0; i < L.target_dim; ++i) x[i] = rng.uniform(-1, 1);
        Eigen::MatrixXd v(L.target_dim, L.domain_dim);
        for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = rng.uniform(-2, 2);
        MinorTuple minors = minor_tuple(v, L.k);
        if (std::isinf(L.evaluate(t, x, minors))) continue;
        const IntegrandGradient g = L.gradient(t, x, minors);
        for (int i = 0; i < L.target_dim; ++i) {
            Eigen::VectorXd xp = x, xm = x;
            xp[i] += h;
            xm[i] -= h;
            const double fd = (L.evaluate(t, xp, minors) - L.evaluate(t, xm, minors)) / (2 * h);
            if (std::abs(fd - g.dx[i]) > tol * (1.0 + std::abs(fd)))
                throw EvaluationError("IntegrandSpec: x-gradient disagrees with differences");
        }
        for (std::size_t l = 0; l < minors.size(); ++l) {
            for (Eigen::Index e = 0; e < minors[l].size(); ++e) {
                MinorTuple mp = minors, mm = minors;
                mp[l](e) += h;
                mm[l](e) -= h;
                const double fd = (L.evaluate(t, x, mp) - L.evaluate(t, x, mm)) / (2 * h);
                if (std::abs(fd - g.dv[l](e)) > tol * (1.0 + std::abs(fd)))
                    throw EvaluationError(
                        "IntegrandSpec: minor-gradient disagrees with differences");
            }
        }
    }
}

IntegrandSpec example_lagrangian(double eps, double p) {
    if (!(eps > 0.0)) throw std::invalid_argument("example_lagrangian: eps must be positive");
    if (!(p > 1.0 && p < 2.0))
        throw std::invalid_argument("example_lagrangian: p must lie in (1,2)");
    IntegrandSpec L;
    L.k = 2;
    L.domain_dim = 2;
    L.target_dim = 2;
    L.value = [eps, p](const Eigen::VectorXd& t, const Eigen::VectorXd&,
                       const MinorTuple& minors) {
        const double vnorm = minors[0].norm();
        const double det = minors[1](0, 0);
        const double t4 = std::pow(t.squaredNorm(), 2);
        return eps * (std::pow(vnorm, p) + t4 * std::pow(vnorm, 4)) + det * det;
    };
    L.gradient = [eps, p](const Eigen::VectorXd& t, const Eigen::VectorXd&,
                          const MinorTuple& minors) {
        IntegrandGradient g;
        g.dx = Eigen::VectorXd::Zero(2);
        const double vnorm = minors[0].norm();
        const double t4 = std::pow(t.squaredNorm(), 2);
        Eigen::MatrixXd dv1 = Eigen::MatrixXd::Zero(2, 2);
        if (vnorm > 0.0)
            dv1 = eps * (p * std::pow(vnorm, p - 2.0) + 4.0 * t4 * vnorm * vnorm) * minors[0];
        g.dv.push_back(dv1);
        g.dv.push_back(2.0 * minors[1]);
        return g;
    };
    const double c = 0.25 * std::min(eps, 1.0) / std::pow(2.0, p);
    L.witness = [c, p](double s) { return c * std::min(std::pow(s, p), s * s); };
    return L;
}

IntegrandSpec dirichlet_integrand(int domain_dim, int target_dim) {
    IntegrandSpec L;
    L.k = 1;
    L.domain_dim = domain_dim;
    L.target_dim = target_dim;
    L.value = [](const Eigen::VectorXd&, const Eigen::VectorXd&, const MinorTuple& minors) {
        return minors[0].squaredNorm();
    };
    L.gradient = [](const Eigen::VectorXd&, const Eigen::VectorXd&, const MinorTuple& minors) {
        IntegrandGradient g;
        g.dx = Eigen::VectorXd::Zero(minors[0].rows());
        g.dv.push_back(2.0 * minors[0]);
        return g;
    };
    L.witness = [](double s) { return s * s / 2.0; };
    return L;
}

ConvexityCheck kconvexity_sample_check(const IntegrandSpec& L, int points, int segments,
                                       std::uint64_t seed) {
    Rng rng(seed);
    ConvexityCheck result;
    const int p = std::min(L.domain_dim, L.target_dim);
    const int blocks = std::min(L.k, p);
    for (int pt = 0; pt < points; ++pt) {
        Eigen::VectorXd t(L.domain_dim), x(L.target_dim);
        for (int i = 0; i < L.domain_dim; ++i) t[i] = rng.uniform(-1, 1);
        for (int i = 0; i < L.target_dim; ++i) x[i] = rng.uniform(-1, 1);
        for (int seg = 0; seg < segments; ++seg) {
            MinorTuple a, b, mid;
            for (int l = 1; l <= blocks; ++l) {
                const auto rows = binomial(L.target_dim, l);
                const auto cols = binomial(L.domain_dim, l);
                Eigen::MatrixXd ma(rows, cols), mb(rows, cols);
                for (Eigen::Index e = 0; e < ma.size(); ++e) {
                    ma(e) = rng.uniform(-2, 2);
                    mb(e) = rng.uniform(-2, 2);
                }
                mid.push_back(0.5 * (ma + mb));
                a.push_back(std::move(ma));
                b.push_back(std::move(mb));
            }
            const double fa = L.evaluate(t, x, a);
            const double fb = L.evaluate(t, x, b);
            const double fmid = L.evaluate(t, x, mid);
            if (std::isinf(fa) || std::isinf(fb) || std::isinf(fmid)) continue;
            const double slack = fmid - 0.5 * (fa + fb);
            const double scale = 1.0 + std::abs(fa) + std::abs(fb);
            if (slack > 1e-10 * scale && slack > result.worst_violation) {
                result.passed = false;
                result.worst_violation = slack;
                result.witness_t = t;
                result.witness_x = x;
                result.witness_a = a;
                result.witness_b = b;
            }
        }
    }
    return result;
}

SuperlinearityTable superlinearity_check(const IntegrandSpec& L, const std::vector<double>& radii,
                                         int samples, std::uint64_t seed) {
    Rng rng(seed);
    SuperlinearityTable table;
    table.radii = radii;
    for (const double radius : radii) {
        double worst = std::numeric_limits<double>::infinity();
        for (int s = 0; s < samples; ++s) {
            Eigen::VectorXd t(L.domain_dim), x(L.target_dim);
            for (int i = 0; i < L.domain_dim; ++i) t[i] = rng.uniform(-1, 1);
            for (int i = 0; i < L.target_dim; ++i) x[i] = rng.uniform(-1, 1);
            Eigen::MatrixXd dir(L.target_dim, L.domain_dim);
            for (Eigen::Index e = 0; e < dir.size(); ++e) dir(e) = rng.normal();
            const Eigen::MatrixXd v = (radius / dir.norm()) * dir;
            double denom = 0.0;
            for (double norm : exterior::minor_norms(v, L.k)) denom += norm;
            if (denom <= 0.0) continue;
            const double val = L.evaluate_jet(t, x, v);
            if (std::isinf(val)) continue;
            worst = std::min(worst, val / denom);
        }
        table.min_ratios.push_back(worst);
    }
    if (table.min_ratios.size() >= 2)
        table.stagnant = !(table.min_ratios.back() > 1.5 * table.min_ratios.front());
    return table;
}

Eigen::MatrixXd energy_gradient(const meshmaps::PwAffineMap& u, const IntegrandSpec& L,
                                const meshmaps::QuadratureRule& q) {
    if (!L.has_gradient())
        throw std::invalid_argument("energy_gradient: integrand has no gradient evaluator");
    const auto& mesh = *u.mesh;
    const int n = mesh.dim();
    const int m = u.target_dim();
    double ref = 1.0;
    for (int i = 2; i <= n; ++i) ref /= i;
    Eigen::MatrixXd grad = Eigen::MatrixXd::Zero(m, mesh.num_vertices());
    for (int c = 0; c < mesh.num_cells(); ++c) {
        const Eigen::MatrixXd du = u.cell_gradient(c);
        const MinorTuple minors = minor_tuple(du, L.k);
        const double scale = mesh.cell_volume(c) / ref;
        const Eigen::MatrixXd& bary_grads = mesh.barycentric_gradients(c);
        for (int p = 0; p < q.size(); ++p) {
            const Eigen::VectorXd bary = q.points.col(p);
            const Eigen::VectorXd t = mesh.point_from_barycentric(c, bary);
            const Eigen::VectorXd x = u.evaluate(c, bary);
            const IntegrandGradient g = L.gradient(t, x, minors);
            Eigen::MatrixXd dv = g.dv[0];
            for (std::size_t l = 2; l <= g.dv.size(); ++l)
                dv += exterior::lift_minors_derivative_adjoint(du, g.dv[l - 1],
                                                               static_cast<int>(l));
            const double w = scale * q.weights[p];
            for (int j = 0; j <= n; ++j) {
                const int vertex = mesh.cells()(j, c);
                grad.col(vertex) += w * (bary[j] * g.dx +
                                         dv * bary_grads.row(j).transpose());
            }
        }
    }
    for (int b : mesh.boundary_nodes()) grad.col(b).setZero();
    return grad;
}

double degree_integral(const meshmaps::PwAffineMap& u) {
    const auto& mesh = *u.mesh;
    if (mesh.dim() != 2 || u.target_dim() != 2)
        throw std::invalid_argument("degree_integral: planar maps only");
    std::vector<double> per_cell(mesh.num_cells());
    for (int c = 0; c < mesh.num_cells(); ++c) {
        const Eigen::MatrixXd g = u.cell_gradient(c);
        per_cell[c] = (g(0, 0) * g(1, 1) - g(0, 1) * g(1, 0)) * mesh.cell_volume(c);
    }
    return tree_sum(per_cell);
}

namespace {

struct DescentOutcome {
    meshmaps::PwAffineMap map;
    double energy;
    bool converged;
    bool line_search_failed;
    int iterations;
    std::vector<IterationRecord> history;
    std::vector<meshmaps::PwAffineMap> iterate_maps;
};

void project_interior_to_sphere(meshmaps::PwAffineMap& u) {
    for (int v = 0; v < u.mesh->num_vertices(); ++v) {
        if (u.mesh->is_boundary_node(v)) continue;
        const double norm = u.values.col(v).norm();
        if (norm > 0.0) u.values.col(v) /= norm;
    }
}

DescentOutcome descend(const meshmaps::PwAffineMap& start, const IntegrandSpec& L,
                       const meshmaps::QuadratureRule& q, const MinimizeOptions& options) {
    DescentOutcome out{start, 0.0, false, false, 0, {}, {}};
    const bool planar = start.mesh->dim() == 2 && start.target_dim() == 2;
    double energy = integrate_energy(out.map, L, q);
    double step = options.initial_step;
    for (int iter = 0; iter < options.max_iterations; ++iter) {
        const Eigen::MatrixXd grad = energy_gradient(out.map, L, q);
        const double gnorm = grad.cwiseAbs().maxCoeff();
        const double degree = planar ? degree_integral(out.map) : 0.0;
        out.history.push_back(IterationRecord{iter, energy, gnorm, step, degree});
        if (options.record_iterate_maps) out.iterate_maps.push_back(out.map);
        out.iterations = iter;
        if (gnorm <= options.grad_tol) {
            out.converged = true;
            break;
        }
        const double slope = grad.squaredNorm();
        double trial_step = std::min(2.0 * step, options.initial_step * 1048576.0);
        bool accepted = false;
        for (int halving = 0; halving < options.max_halvings; ++halving) {
            meshmaps::PwAffineMap candidate{out.map.mesh, out.map.values - trial_step * grad};
            if (options.project_to_sphere) project_interior_to_sphere(candidate);
            const double cand_energy = integrate_energy(candidate, L, q);
            if (std::isfinite(cand_energy) &&
                cand_energy <= energy - options.armijo * trial_step * slope) {
                out.map = std::move(candidate);
                energy = cand_energy;
                step = trial_step;
                accepted = true;
                break;
            }
            trial_step *= 0.5;
        }
        if (!accepted) {
            out.line_search_failed = true;
            break;
        }
    }
    out.energy = energy;
    return out;
}

}  // namespace

MinimizeReport minimize(const meshmaps::PwAffineMap& u0, const IntegrandSpec& L,
                        const MinimizeOptions& options) {
    const meshmaps::QuadratureRule q =
        meshmaps::QuadratureRule::simplex(u0.mesh->dim(), options.quadrature_order);
    if (!std::isfinite(integrate_energy(u0, L, q)))
        throw std::invalid_argument("minimize: initial energy is not finite");
    MinimizeReport report;
    bool have_best = false;
    for (int s = 0; s < std::max(1, options.starts); ++s) {
        meshmaps::PwAffineMap start = u0;
        if (s > 0) {
            Rng rng = Rng::split(options.seed, "minimize/start-" + std::to_string(s));
            for (int v = 0; v < start.mesh->num_vertices(); ++v) {
                if (start.mesh->is_boundary_node(v)) continue;
                for (int i = 0; i < start.target_dim(); ++i)
                    start.values(i, v) += options.start_perturbation * rng.uniform(-1.0, 1.0);
            }
            if (!std::isfinite(integrate_energy(start, L, q))) continue;
        }
        DescentOutcome outcome = descend(start, L, q, options);
        if (!have_best || outcome.energy < report.energy) {
            have_best = true;
            report.minimizer = std::move(outcome.map);
            report.energy = outcome.energy;
            report.converged = outcome.converged;
            report.line_search_failed = outcome.line_search_failed;
            report.iterations = outcome.iterations;
            report.best_start = s;
            report.history = std::move(outcome.history);
            report.iterate_maps = std::move(outcome.iterate_maps);
        }
    }
    return report;
}

double competitor_energy_semianalytic(double eps, double p, double delta) {
    if (!(p > 1.0 && p < 2.0))
        throw std::invalid_argument("competitor_energy_semianalytic: p must lie in (1,2)");
    if (!(delta > 0.0 && delta < 0.5))
        throw std::invalid_argument("competitor_energy_semianalytic: delta must lie in (0,1/2)");
    // |du| = 1/r for u = t/|t|; det du = 0.
    const double grad_annulus = 2.0 * kPi * (1.0 - std::pow(delta, 2.0 - p)) / (2.0 - p);
    const double grad_inner = 2.0 * kPi * std::pow(delta, 2.0 - p) / (2.0 - p);
    const double quartic_annulus = 2.0 * kPi * (1.0 - delta * delta) / 2.0;
    const double quartic_inner = 2.0 * kPi * delta * delta / 2.0;
    return eps * ((grad_annulus + grad_inner) + (quartic_annulus + quartic_inner));
}

namespace {

Eigen::VectorXd radial_projection(const Eigen::VectorXd& t) {
    const double norm = t.norm();
    return t / norm;
}

double det_part_energy_of_radial_interpolant(double h) {
    const meshmaps::MeshPtr mesh = meshmaps::build_disc_mesh(h);
    const meshmaps::PwAffineMap u = meshmaps::interpolate(radial_projection, mesh, 2);
    std::vector<double> per_cell(mesh->num_cells());
    for (int c = 0; c < mesh->num_cells(); ++c) {
        const Eigen::MatrixXd g = u.cell_gradient(c);
        const double det = g(0, 0) * g(1, 1) - g(0, 1) * g(1, 0);
        per_cell[c] = det * det * mesh->cell_volume(c);
    }
    return tree_sum(per_cell);
}

}  // namespace

GapResult gap_experiment(double eps, double p, double h, const MinimizeOptions& options) {
    GapResult result;
    result.competitor_energy = competitor_energy_semianalytic(eps, p);

    const meshmaps::MeshPtr mesh = meshmaps::build_disc_mesh(h);
    const meshmaps::PwAffineMap u0 = meshmaps::identity_map(mesh);
    const IntegrandSpec L = example_lagrangian(eps, p);
    result.report = minimize(u0, L, options);
    result.minimizer_energy = result.report.energy;
    result.area = mesh->total_volume();
    result.degree = degree_integral(result.report.minimizer);
    result.lower_bound = result.degree * result.degree / result.area;
    result.gap_ratio = result.lower_bound / result.competitor_energy;

    result.blowup_h = {h, h / 2.0, h / 4.0};
    for (const double hh : result.blowup_h)
        result.blowup_energy.push_back(det_part_energy_of_radial_interpolant(hh));
    // Least-squares slope of log E against log h.
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const int n = static_cast<int>(result.blowup_h.size());
    for (int i = 0; i < n; ++i) {
        const double lx = std::log(result.blowup_h[i]);
        const double ly = std::log(result.blowup_energy[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    result.blowup_exponent = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    return result;
}

TestFunction TestFunction::bump(const Eigen::Vector2d& center, double radius) {
    TestFunction f;
    f.kind = Kind::Bump;
    f.center = center;
    f.radius = radius;
    return f;
}

TestFunction TestFunction::unit_square() {
    TestFunction f;
    f.kind = Kind::UnitSquare;
    return f;
}

namespace {

// Integral of the test function along the line {nu . t = s}.
double chord_integral(const TestFunction& f, const Eigen::Vector2d& nu, double s,
                      const std::vector<double>& gl_x, const std::vector<double>& gl_w) {
    const Eigen::Vector2d perp(-nu[1], nu[0]);
    if (f.kind == TestFunction::Kind::UnitSquare) {
        // Chord length of the unit square.
        double lo = -std::numeric_limits<double>::infinity();
        double hi = std::numeric_limits<double>::infinity();
        for (int axis = 0; axis < 2; ++axis) {
            const double origin = s * nu[axis];
            const double slope = perp[axis];
            if (std::abs(slope) < 1e-15) {
                if (origin < 0.0 || origin > 1.0) return 0.0;
                continue;
            }
            double a = (0.0 - origin) / slope;
            double b = (1.0 - origin) / slope;
            if (a > b) std::swap(a, b);
            lo = std::max(lo, a);
            hi = std::min(hi, b);
        }
        return std::max(0.0, hi - lo);
    }
    const double s0 = nu.dot(f.center);
    const double off = s - s0;
    if (std::abs(off) >= f.radius) return 0.0;
    const double w = std::sqrt(f.radius * f.radius - off * off);
    const double tau0 = perp.dot(f.center);
    nulllag::ScalarBump bump{f.center, f.radius};
    double acc = 0.0;
    for (std::size_t i = 0; i < gl_x.size(); ++i) {
        const double tau = tau0 - w + 2.0 * w * gl_x[i];
        acc += gl_w[i] * bump.value(s * nu + tau * perp);
    }
    return 2.0 * w * acc;
}

double support_range(const TestFunction& f, const Eigen::Vector2d& nu, double& lo, double& hi,
                     std::vector<double>& extra_breaks) {
    if (f.kind == TestFunction::Kind::UnitSquare) {
        lo = std::numeric_limits<double>::infinity();
        hi = -std::numeric_limits<double>::infinity();
        for (const double cx : {0.0, 1.0})
            for (const double cy : {0.0, 1.0}) {
                const double s = nu[0] * cx + nu[1] * cy;
                lo = std::min(lo, s);
                hi = std::max(hi, s);
                extra_breaks.push_back(s);
            }
        return hi - lo;
    }
    const double s0 = nu.dot(f.center);
    lo = s0 - f.radius;
    hi = s0 + f.radius;
    return hi - lo;
}

}  // namespace

WeakMinorTable weak_minor_convergence_experiment(const Eigen::Matrix2d& A,
                                                 const Eigen::Matrix2d& B, double lambda,
                                                 const std::vector<int>& band_counts,
                                                 const std::vector<TestFunction>& tests) {
    if (!(lambda > 0.0 && lambda < 1.0))
        throw std::invalid_argument("weak_minor_convergence_experiment: lambda in (0,1)");
    const Eigen::Matrix2d diff = A - B;
    Eigen::JacobiSVD<Eigen::Matrix2d> svd(diff, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const double s1 = svd.singularValues()[0];
    const double s2 = svd.singularValues()[1];
    if (!(s1 > 0.0) || s2 > 1e-10 * std::max(1.0, s1))
        throw std::invalid_argument("weak_minor_convergence_experiment: rank(A-B) must be 1");
    const Eigen::Vector2d nu = svd.matrixV().col(0);

    const Eigen::Matrix2d mean = lambda * A + (1.0 - lambda) * B;
    const double det_a = A.determinant();
    const double det_b = B.determinant();
    const double det_mean = mean.determinant();

    std::vector<double> gl_x, gl_w;
    meshmaps::gauss_legendre_unit(24, gl_x, gl_w);
    std::vector<double> piece_x, piece_w;
    meshmaps::gauss_legendre_unit(16, piece_x, piece_w);

    WeakMinorTable table;
    table.band_counts = band_counts;
    table.pairings.resize(static_cast<Eigen::Index>(tests.size()),
                          static_cast<Eigen::Index>(band_counts.size()));

    for (std::size_t fidx = 0; fidx < tests.size(); ++fidx) {
        const TestFunction& f = tests[fidx];
        double lo = 0.0, hi = 0.0;
        std::vector<double> extra;
        support_range(f, nu, lo, hi, extra);
        for (std::size_t iidx = 0; iidx < band_counts.size(); ++iidx) {
            const int bands = band_counts[iidx];
            // Breakpoints of the two-valued profile plus test-support kinks.
            std::set<double> breaks(extra.begin(), extra.end());
            breaks.insert(lo);
            breaks.insert(hi);
            const double period = 1.0 / bands;
            for (long long j = static_cast<long long>(std::floor(lo / period)) - 1;
                 j * period <= hi + period; ++j) {
                const double base = j * period;
                if (base > lo && base < hi) breaks.insert(base);
                const double split = base + lambda * period;
                if (split > lo && split < hi) breaks.insert(split);
            }
            std::vector<double> pts(breaks.begin(), breaks.end());
            double pairing = 0.0;
            for (std::size_t seg = 0; seg + 1 < pts.size(); ++seg) {
                const double a = pts[seg];
                const double b = pts[seg + 1];
                if (!(b > a)) continue;
                const double mid = 0.5 * (a + b);
                const double frac = mid * bands - std::floor(mid * bands);
                const double det_here = (frac < lambda) ? det_a : det_b;
                double integral = 0.0;
                for (std::size_t g = 0; g < piece_x.size(); ++g) {
                    const double s = a + (b - a) * piece_x[g];
                    integral += piece_w[g] * chord_integral(f, nu, s, gl_x, gl_w);
                }
                pairing += (det_here - det_mean) * (b - a) * integral;
            }
            table.pairings(static_cast<Eigen::Index>(fidx), static_cast<Eigen::Index>(iidx)) =
                std::abs(pairing);
        }
    }
    return table;
}

}  // namespace polyvar::variational
