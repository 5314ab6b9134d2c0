#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "polyvar/variational.hpp"
#include "polyvar/youngmeasure.hpp"
#include "test_helpers.hpp"

using namespace polyvar;
using namespace polyvar::variational;
using namespace polyvar::meshmaps;
using polyvar::testing::random_matrix;
using polyvar::testing::random_rank_one_pair;

namespace {

constexpr double kPi = 3.14159265358979323846;

// Dense Dirichlet solve: the discrete harmonic map with given boundary data.
double harmonic_energy_by_direct_solve(const PwAffineMap& u0) {
    const auto& mesh = *u0.mesh;
    const int nv = mesh.num_vertices();
    Eigen::MatrixXd stiffness = Eigen::MatrixXd::Zero(nv, nv);
    for (int c = 0; c < mesh.num_cells(); ++c) {
        const Eigen::MatrixXd& grads = mesh.barycentric_gradients(c);
        for (int i = 0; i <= mesh.dim(); ++i)
            for (int j = 0; j <= mesh.dim(); ++j)
                stiffness(mesh.cells()(i, c), mesh.cells()(j, c)) +=
                    mesh.cell_volume(c) * grads.row(i).dot(grads.row(j));
    }
    std::vector<int> interior;
    for (int v = 0; v < nv; ++v)
        if (!mesh.is_boundary_node(v)) interior.push_back(v);
    const int ni = static_cast<int>(interior.size());
    Eigen::MatrixXd kii(ni, ni);
    for (int a = 0; a < ni; ++a)
        for (int b = 0; b < ni; ++b) kii(a, b) = stiffness(interior[a], interior[b]);
    Eigen::MatrixXd values = u0.values;
    for (int comp = 0; comp < u0.target_dim(); ++comp) {
        Eigen::VectorXd rhs = Eigen::VectorXd::Zero(ni);
        for (int a = 0; a < ni; ++a)
            for (int v = 0; v < nv; ++v)
                if (mesh.is_boundary_node(v))
                    rhs[a] -= stiffness(interior[a], v) * u0.values(comp, v);
        const Eigen::VectorXd sol = kii.ldlt().solve(rhs);
        for (int a = 0; a < ni; ++a) values(comp, interior[a]) = sol[a];
    }
    const PwAffineMap harmonic{u0.mesh, values};
    // Energy of |v|^2: quadrature order is irrelevant for cellwise data.
    return integrate_energy(harmonic, dirichlet_integrand(mesh.dim(), u0.target_dim()),
                            QuadratureRule::simplex(mesh.dim(), 2));
}

}  // namespace

TEST_CASE("example lagrangian values") {
    const double eps = 1e-3, p = 1.5;
    const IntegrandSpec L = example_lagrangian(eps, p);
    const Eigen::Vector2d origin(0.0, 0.0);
    const Eigen::Vector2d x(0.4, -0.7);

    CHECK(L.evaluate_jet(origin, x, Eigen::Matrix2d::Identity()) ==
          doctest::Approx(eps * std::pow(2.0, p / 2.0) + 1.0).epsilon(1e-14));
    CHECK(L.evaluate_jet(origin, x, Eigen::Matrix2d::Zero()) == 0.0);

    // No x dependence.
    Rng rng(61);
    for (int trial = 0; trial < 20; ++trial) {
        const Eigen::Vector2d t(rng.normal(), rng.normal());
        const Eigen::MatrixXd v = random_matrix(rng, 2, 2, 2.0);
        const Eigen::Vector2d x1(rng.normal(), rng.normal());
        const Eigen::Vector2d x2 = x1 + Eigen::Vector2d(3.0, -1.0);
        CHECK(L.evaluate_jet(t, x1, v) == L.evaluate_jet(t, x2, v));
    }

    CHECK_THROWS_AS(example_lagrangian(1e-3, 2.5), std::invalid_argument);
    CHECK_THROWS_AS(example_lagrangian(1e-3, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(example_lagrangian(0.0, 1.5), std::invalid_argument);

    CHECK_NOTHROW(validate_integrand_gradient(L, 7, 50));
    CHECK_NOTHROW(validate_integrand_gradient(dirichlet_integrand(2, 2), 7, 50));
}

TEST_CASE("example lagrangian dominates its superlinearity witness") {
    const IntegrandSpec L = example_lagrangian(1e-3, 1.5);
    Rng rng(62);
    for (int trial = 0; trial < 10000; ++trial) {
        const Eigen::Vector2d t(rng.uniform(-1, 1), rng.uniform(-1, 1));
        const Eigen::Vector2d x(rng.normal(), rng.normal());
        const Eigen::MatrixXd v = random_matrix(rng, 2, 2, std::pow(10.0, rng.uniform(-1, 2)));
        double s = 0.0;
        for (double norm : exterior::minor_norms(v, 2)) s += norm;
        CHECK(L.evaluate_jet(t, x, v) >= L.witness(s) - 1e-12);
    }
}

TEST_CASE("midpoint convexity sampling") {
    CHECK(kconvexity_sample_check(example_lagrangian(1e-2, 1.5), 10, 100, 1).passed);

    IntegrandSpec det_only;
    det_only.k = 2;
    det_only.domain_dim = 2;
    det_only.target_dim = 2;
    det_only.value = [](const Eigen::VectorXd&, const Eigen::VectorXd&, const MinorTuple& m) {
        return m[1](0, 0);
    };
    CHECK(kconvexity_sample_check(det_only, 10, 100, 2).passed);

    IntegrandSpec concave;
    concave.k = 1;
    concave.domain_dim = 2;
    concave.target_dim = 2;
    concave.value = [](const Eigen::VectorXd&, const Eigen::VectorXd&, const MinorTuple& m) {
        return -m[0].squaredNorm();
    };
    const ConvexityCheck failed = kconvexity_sample_check(concave, 10, 100, 3);
    CHECK(!failed.passed);
    CHECK(failed.worst_violation > 0.0);
    CHECK(failed.witness_a.size() == 1);
}

TEST_CASE("superlinearity tables") {
    const std::vector<double> radii = {1.0, 4.0, 16.0, 64.0, 256.0};
    const SuperlinearityTable grows =
        superlinearity_check(example_lagrangian(1e-3, 1.5), radii, 200, 4);
    CHECK(!grows.stagnant);
    CHECK(grows.min_ratios.back() > grows.min_ratios.front());

    IntegrandSpec linear;
    linear.k = 1;
    linear.domain_dim = 2;
    linear.target_dim = 2;
    linear.value = [](const Eigen::VectorXd&, const Eigen::VectorXd&, const MinorTuple& m) {
        return m[0].norm();
    };
    CHECK(superlinearity_check(linear, radii, 200, 5).stagnant);

    IntegrandSpec quadratic = dirichlet_integrand(2, 2);
    CHECK(!superlinearity_check(quadratic, radii, 200, 6).stagnant);
}

TEST_CASE("analytic energy gradient matches finite differences") {
    Rng rng(63);
    const MeshPtr mesh = build_box_mesh(2, 3);
    const QuadratureRule q = QuadratureRule::simplex(2, 4);
    for (const IntegrandSpec& L :
         {dirichlet_integrand(2, 2), example_lagrangian(1e-2, 1.5)}) {
        PwAffineMap u = identity_map(mesh);
        for (int v = 0; v < mesh->num_vertices(); ++v)
            u.values.col(v) += 0.2 * Eigen::Vector2d(rng.normal(), rng.normal());
        const Eigen::MatrixXd grad = energy_gradient(u, L, q);
        const double h = 1e-6;
        for (int trial = 0; trial < 12; ++trial) {
            const int v = rng.uniform_int(0, mesh->num_vertices() - 1);
            const int comp = rng.uniform_int(0, 1);
            PwAffineMap up = u, um = u;
            up.values(comp, v) += h;
            um.values(comp, v) -= h;
            const double fd =
                (integrate_energy(up, L, q) - integrate_energy(um, L, q)) / (2.0 * h);
            if (mesh->is_boundary_node(v)) {
                CHECK(grad(comp, v) == 0.0);
            } else {
                CHECK(std::abs(fd - grad(comp, v)) <= 1e-5 * (1.0 + std::abs(fd)));
            }
        }
    }
}

TEST_CASE("minimize: identity square is already harmonic") {
    const MeshPtr mesh = build_box_mesh(2, 6);
    const PwAffineMap u0 = identity_map(mesh);
    MinimizeOptions options;
    options.grad_tol = 1e-6;
    const MinimizeReport report = minimize(u0, dirichlet_integrand(2, 2), options);
    CHECK(report.converged);
    CHECK(std::abs(report.energy - 2.0) <= 1e-8);
    CHECK(report.minimizer.boundary_trace() == u0.boundary_trace());
}

TEST_CASE("minimize: reaches the direct-solve harmonic energy") {
    const MeshPtr mesh = build_box_mesh(2, 6);
    nulllag::ScalarBump bump{Eigen::Vector2d(0.5, 0.5), 0.45};
    const PwAffineMap u0 = interpolate(
        [&](const Eigen::VectorXd& t) -> Eigen::VectorXd {
            return t + 0.3 * bump.value(t) * Eigen::Vector2d(1.0, -1.0);
        },
        mesh, 2);
    MinimizeOptions options;
    options.grad_tol = 1e-8;
    options.max_iterations = 20000;
    const MinimizeReport report = minimize(u0, dirichlet_integrand(2, 2), options);
    const double direct = harmonic_energy_by_direct_solve(u0);
    CHECK(report.energy <= integrate_energy(u0, dirichlet_integrand(2, 2),
                                            QuadratureRule::simplex(2, 2)));
    CHECK(std::abs(report.energy - direct) <= 1e-6 * (1.0 + direct));
    CHECK(report.minimizer.boundary_trace() == u0.boundary_trace());

    // Energies never increase along the iteration.
    for (std::size_t i = 1; i < report.history.size(); ++i)
        CHECK(report.history[i].energy <= report.history[i - 1].energy);
}

TEST_CASE("minimize rejects infinite starting energy") {
    const MeshPtr mesh = build_box_mesh(2, 2);
    IntegrandSpec wall = dirichlet_integrand(2, 2);
    wall.value = [](const Eigen::VectorXd&, const Eigen::VectorXd&, const MinorTuple& m) {
        return m[0].norm() > 0.5 ? std::numeric_limits<double>::infinity() : 0.0;
    };
    CHECK_THROWS_AS(minimize(identity_map(mesh), wall), std::invalid_argument);
}

TEST_CASE("minimize with the sphere projection option") {
    const MeshPtr mesh = build_disc_mesh(0.3);
    const PwAffineMap u0 = interpolate(
        [](const Eigen::VectorXd& t) -> Eigen::VectorXd { return t / t.norm(); }, mesh, 2);
    MinimizeOptions options;
    options.project_to_sphere = true;
    options.max_iterations = 5;
    options.grad_tol = 1e-14;
    const MinimizeReport report = minimize(u0, dirichlet_integrand(2, 2), options);
    for (int v = 0; v < mesh->num_vertices(); ++v)
        CHECK(report.minimizer.values.col(v).norm() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("degree integral is a boundary quantity") {
    Rng rng(64);
    const MeshPtr mesh = build_disc_mesh(0.15);
    const PwAffineMap id = identity_map(mesh);
    const double area = mesh->total_volume();
    CHECK(degree_integral(id) == doctest::Approx(area).epsilon(1e-14));

    PwAffineMap perturbed = id;
    for (int v = 0; v < mesh->num_vertices(); ++v) {
        if (mesh->is_boundary_node(v)) continue;
        perturbed.values.col(v) += 0.4 * Eigen::Vector2d(rng.normal(), rng.normal());
    }
    CHECK(std::abs(degree_integral(perturbed) - area) <= 1e-10);

    PwAffineMap doubled = id;
    doubled.values *= 2.0;
    CHECK(degree_integral(doubled) == doctest::Approx(4.0 * area).epsilon(1e-13));

    const MeshPtr cube = build_box_mesh(3, 1);
    PwAffineMap three{cube, cube->vertices()};
    CHECK_THROWS_AS(degree_integral(three), std::invalid_argument);
}

TEST_CASE("degree integral is invariant along minimization") {
    const MeshPtr mesh = build_disc_mesh(0.25);
    MinimizeOptions options;
    options.max_iterations = 25;
    options.grad_tol = 1e-12;
    const MinimizeReport report =
        minimize(identity_map(mesh), example_lagrangian(1e-3, 1.5), options);
    const double area = mesh->total_volume();
    for (const auto& rec : report.history) CHECK(std::abs(rec.degree - area) <= 1e-10);
}

TEST_CASE("competitor energy from the radial formulas") {
    const double eps = 1e-3, p = 1.5;
    const double value = competitor_energy_semianalytic(eps, p);
    CHECK(value == doctest::Approx(5.0 * kPi * eps).epsilon(1e-12));

    // Delta only splits the integrals.
    for (double delta : {0.05, 0.1, 0.25, 0.4})
        CHECK(std::abs(competitor_energy_semianalytic(eps, p, delta) - value) <= 1e-10);

    // Linear in eps.
    CHECK(competitor_energy_semianalytic(2 * eps, p) ==
          doctest::Approx(2.0 * value).epsilon(1e-12));

    CHECK_THROWS_AS(competitor_energy_semianalytic(eps, 2.0), std::invalid_argument);
    CHECK_THROWS_AS(competitor_energy_semianalytic(eps, p, 0.7), std::invalid_argument);
}

TEST_CASE("gap experiment at coarse resolution") {
    MinimizeOptions options;
    options.max_iterations = 30;
    options.grad_tol = 1e-5;
    const GapResult gap = gap_experiment(1e-3, 1.5, 0.15, options);

    CHECK(gap.competitor_energy == doctest::Approx(5.0 * kPi * 1e-3).epsilon(1e-10));
    CHECK(gap.area > 3.0);
    CHECK(std::abs(gap.degree - gap.area) <= 1e-10);
    CHECK(gap.lower_bound >= gap.area - 1e-8);
    CHECK(gap.minimizer_energy >= gap.lower_bound - 1e-8);
    CHECK(gap.gap_ratio > 100.0);
    CHECK(gap.blowup_exponent > -2.5);
    CHECK(gap.blowup_exponent < -1.5);
    // The det-part energy of the radial interpolant grows under refinement.
    CHECK(gap.blowup_energy[2] > gap.blowup_energy[1]);
    CHECK(gap.blowup_energy[1] > gap.blowup_energy[0]);
}

TEST_CASE("weak minor pairings: aligned diagonal pair is exactly balanced") {
    Eigen::Matrix2d A, B;
    A << 1, 0, 0, 1;
    B << 1, 0, 0, -1;
    const std::vector<TestFunction> tests = {TestFunction::unit_square()};
    const WeakMinorTable table =
        weak_minor_convergence_experiment(A, B, 0.5, {1, 2, 4, 8, 16}, tests);
    for (Eigen::Index i = 0; i < table.pairings.cols(); ++i)
        CHECK(table.pairings(0, i) <= 1e-12);
}

TEST_CASE("weak minor pairings decrease and vanish in the limit") {
    Rng rng(65);
    const std::vector<int> bands = {1, 2, 4, 8, 16, 32, 64};
    const std::vector<TestFunction> tests = {
        TestFunction::bump(Eigen::Vector2d(0.45, 0.55), 0.3),
        TestFunction::bump(Eigen::Vector2d(0.6, 0.4), 0.25),
        TestFunction::bump(Eigen::Vector2d(0.5, 0.5), 0.4)};
    for (int trial = 0; trial < 5; ++trial) {
        const auto [A, B] = random_rank_one_pair(rng, 2, 2);
        const WeakMinorTable table = weak_minor_convergence_experiment(
            Eigen::Matrix2d(A), Eigen::Matrix2d(B), 0.5, bands, tests);
        for (Eigen::Index f = 0; f < table.pairings.rows(); ++f) {
            for (std::size_t i = 3; i < bands.size(); ++i)
                CHECK(table.pairings(f, static_cast<Eigen::Index>(i)) <
                      table.pairings(f, static_cast<Eigen::Index>(i - 1)) + 1e-15);
            CHECK(table.pairings(f, static_cast<Eigen::Index>(bands.size() - 1)) < 1e-3);
        }
    }

    Eigen::Matrix2d full = Eigen::Matrix2d::Identity();
    Eigen::Matrix2d other = -Eigen::Matrix2d::Identity();
    CHECK_THROWS_AS(
        weak_minor_convergence_experiment(full, other, 0.5, {2}, tests),
        std::invalid_argument);
}
