#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "polyvar/exterior.hpp"
#include "polyvar/rng.hpp"

using namespace polyvar;
using namespace polyvar::exterior;

namespace {

Eigen::MatrixXd random_matrix(Rng& rng, int rows, int cols, double scale = 1.0) {
    Eigen::MatrixXd a(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) a(i, j) = scale * rng.uniform(-1.0, 1.0);
    return a;
}

}  // namespace

TEST_CASE("basis subsets are lexicographic and complete") {
    const auto& s32 = basis_subsets(3, 2);
    REQUIRE(s32.size() == 3);
    CHECK(s32[0].indices == std::vector<int>{0, 1});
    CHECK(s32[1].indices == std::vector<int>{0, 2});
    CHECK(s32[2].indices == std::vector<int>{1, 2});

    CHECK(basis_subsets(4, 2).size() == 6);

    const auto& empty = basis_subsets(5, 0);
    REQUIRE(empty.size() == 1);
    CHECK(empty[0].indices.empty());

    for (int n = 0; n <= 6; ++n)
        for (int l = 0; l <= n; ++l) {
            const auto& subs = basis_subsets(n, l);
            CHECK(static_cast<long long>(subs.size()) == binomial(n, l));
            for (std::size_t i = 0; i < subs.size(); ++i)
                CHECK(subset_rank(subs[i]) == static_cast<int>(i));
        }

    CHECK_THROWS_AS(basis_subsets(3, 4), std::invalid_argument);
    CHECK_THROWS_AS(basis_subsets(3, -1), std::invalid_argument);
    CHECK_THROWS_AS(basis_subsets(9, 2), ResourceError);
}

TEST_CASE("wedge inner products") {
    // Orthonormal frame pairs with itself give 1.
    Eigen::MatrixXd q(3, 2);
    q << 1, 0, 0, 1, 0, 0;
    CHECK(wedge_inner(q, q) == doctest::Approx(1.0).epsilon(1e-14));

    // Swapping two vectors flips the sign exactly.
    Eigen::MatrixXd e12(2, 2), e21(2, 2);
    e12 << 1, 0, 0, 1;
    e21 << 0, 1, 1, 0;
    CHECK(wedge_inner(e12, e21) == -1.0);

    Eigen::MatrixXd d(2, 2);
    d << 1, 0, 0, 2;
    CHECK(wedge_inner(d, d) == 4.0);

    Eigen::MatrixXd bad(3, 1);
    CHECK_THROWS_AS(wedge_inner(q, bad), std::invalid_argument);
}

TEST_CASE("wedge inner matches coordinate dot product") {
    Rng rng(11);
    for (int trial = 0; trial < 200; ++trial) {
        const int n = rng.uniform_int(1, 5);
        const int l = rng.uniform_int(1, n);
        const Eigen::MatrixXd vs = random_matrix(rng, n, l);
        const Eigen::MatrixXd ws = random_matrix(rng, n, l);
        const double gram = wedge_inner(vs, ws);
        const double dot = wedge_of_columns(vs).coords.dot(wedge_of_columns(ws).coords);
        CHECK(std::abs(gram - dot) <= 1e-12 * (1.0 + std::abs(dot)));
    }
}

TEST_CASE("antisymmetry of the column wedge is exact") {
    Rng rng(12);
    for (int trial = 0; trial < 50; ++trial) {
        const int n = rng.uniform_int(2, 5);
        const int l = rng.uniform_int(2, n);
        Eigen::MatrixXd vs = random_matrix(rng, n, l);
        Eigen::MatrixXd ws = random_matrix(rng, n, l);
        const double before = wedge_inner(vs, ws);
        vs.col(0).swap(vs.col(1));
        CHECK(wedge_inner(vs, ws) == -before);
    }
}

TEST_CASE("lift_minors basics") {
    const Eigen::MatrixXd id4 = Eigen::MatrixXd::Identity(4, 4);
    for (int l = 1; l <= 4; ++l) {
        const MinorMatrix mm = lift_minors(id4, l);
        CHECK(mm.matrix.isApprox(
            Eigen::MatrixXd::Identity(mm.matrix.rows(), mm.matrix.cols()), 1e-15));
    }

    Eigen::MatrixXd d(2, 2);
    d << 2, 0, 0, 3;
    const MinorMatrix top = lift_minors(d, 2);
    REQUIRE(top.matrix.rows() == 1);
    REQUIRE(top.matrix.cols() == 1);
    CHECK(top.matrix(0, 0) == 6.0);

    Rng rng(13);
    const Eigen::MatrixXd a = random_matrix(rng, 3, 4);
    CHECK(lift_minors(a, 1).matrix.isApprox(a));
    CHECK_THROWS_AS(lift_minors(a, 4), std::invalid_argument);
    CHECK_THROWS_AS(lift_minors(a, 0), std::invalid_argument);
}

TEST_CASE("lift_minors agrees with wedges of columns") {
    Rng rng(14);
    for (int trial = 0; trial < 100; ++trial) {
        const int n = rng.uniform_int(1, 5);
        const int m = rng.uniform_int(1, 5);
        const int p = std::min(n, m);
        if (p < 1) continue;
        const int l = rng.uniform_int(1, p);
        const Eigen::MatrixXd a = random_matrix(rng, m, n);
        const MinorMatrix mm = lift_minors(a, l);
        const auto& src = basis_subsets(n, l);
        for (const auto& s : src) {
            Eigen::MatrixXd cols(m, l);
            for (int j = 0; j < l; ++j) cols.col(j) = a.col(s.indices[j]);
            const WedgeVector expected = wedge_of_columns(cols);
            const WedgeVector got = mm.apply(WedgeVector::basis(n, s));
            CHECK((got.coords - expected.coords).norm() <= 1e-12 * (1.0 + expected.coords.norm()));
        }
    }
}

TEST_CASE("Cauchy-Binet composition") {
    Rng rng(15);
    for (int trial = 0; trial < 200; ++trial) {
        const int n = rng.uniform_int(1, 5);
        const int k = rng.uniform_int(1, 5);
        const int m = rng.uniform_int(1, 5);
        const int lmax = std::min(std::min(n, k), m);
        if (lmax < 1) continue;
        const Eigen::MatrixXd b = random_matrix(rng, k, n);
        const Eigen::MatrixXd a = random_matrix(rng, m, k);
        for (int l = 1; l <= lmax; ++l) {
            const Eigen::MatrixXd composed = lift_minors(a * b, l).matrix;
            const Eigen::MatrixXd product = lift_minors(a, l).matrix * lift_minors(b, l).matrix;
            CHECK((composed - product).norm() <= 1e-10 * (1.0 + product.norm()));
        }
    }
}

TEST_CASE("sigma sign") {
    for (int n = 1; n <= 6; ++n)
        for (int k = 0; k <= n; ++k) {
            IndexSubset lead{n, {}};
            for (int i = 0; i < k; ++i) lead.indices.push_back(i);
            CHECK(sigma_sign(lead) == 1);
        }

    CHECK(sigma_sign(IndexSubset{2, {1}}) == -1);  // e_2 ^ e_1 = -e_1 ^ e_2

    // sigma(I^c) = (-1)^{k(n-k)} sigma(I), exhaustively.
    for (int n = 1; n <= 6; ++n)
        for (int l = 0; l <= n; ++l)
            for (const auto& s : basis_subsets(n, l)) {
                const int k = s.size();
                const int expect = ((k * (n - k)) % 2 == 0) ? 1 : -1;
                CHECK(sigma_sign(s.complement()) == expect * sigma_sign(s));
            }
}

TEST_CASE("interior product basics") {
    // i_{e_I} Omega = sigma(I) e*_{I^c}.
    for (int n = 2; n <= 5; ++n)
        for (int l = 0; l <= n; ++l)
            for (const auto& s : basis_subsets(n, l)) {
                const WedgeForm got = interior_product(WedgeVector::basis(n, s), WedgeForm::volume(n));
                WedgeForm expected = WedgeForm::zero(n, n - l);
                expected.coords[subset_rank(s.complement())] = sigma_sign(s);
                CHECK((got.coords - expected.coords).norm() == 0.0);
            }

    // Full contraction against the dual n-vector gives the constant 1.
    Rng rng(16);
    for (int n = 2; n <= 4; ++n) {
        WedgeVector lambda = WedgeVector::zero(n, n);
        lambda.coords[0] = 1.0;
        const WedgeForm one = interior_product(lambda, WedgeForm::volume(n));
        REQUIRE(one.degree == 0);
        CHECK(one.coords[0] == 1.0);
    }

    // In R^2: i_{e0}(dx0 ^ dx1) = dx1.
    const WedgeForm f = interior_product(WedgeVector::basis(2, IndexSubset{2, {0}}),
                                         WedgeForm::volume(2));
    REQUIRE(f.degree == 1);
    CHECK(f.coords[0] == 0.0);
    CHECK(f.coords[1] == 1.0);

    CHECK_THROWS_AS(interior_product(WedgeVector::zero(2, 2), WedgeForm::zero(2, 1)),
                    std::invalid_argument);
    CHECK_THROWS_AS(interior_product(WedgeVector::zero(2, 1), WedgeForm::zero(3, 2)),
                    std::invalid_argument);
}

TEST_CASE("interior product defining identity") {
    Rng rng(17);
    for (int trial = 0; trial < 200; ++trial) {
        const int n = rng.uniform_int(1, 5);
        const int k = rng.uniform_int(0, n);
        const int l = rng.uniform_int(0, k);
        WedgeVector u = WedgeVector::zero(n, l);
        WedgeForm omega = WedgeForm::zero(n, k);
        for (Eigen::Index i = 0; i < u.coords.size(); ++i) u.coords[i] = rng.uniform(-1, 1);
        for (Eigen::Index i = 0; i < omega.coords.size(); ++i) omega.coords[i] = rng.uniform(-1, 1);
        const WedgeForm iuo = interior_product(u, omega);
        for (const auto& s : basis_subsets(n, k - l)) {
            const WedgeVector w = WedgeVector::basis(n, s);
            const double left = iuo.apply(w);
            const double right = omega.apply(wedge(u, w));
            CHECK(std::abs(left - right) <= 1e-12 * (1.0 + std::abs(right)));
        }
    }
}

TEST_CASE("graph identity: zero map") {
    Rng rng(18);
    for (int trial = 0; trial < 20; ++trial) {
        const int n = rng.uniform_int(1, 4);
        const int m = rng.uniform_int(1, 4);
        const int k = rng.uniform_int(1, std::min(n, m));
        WedgeVector u = WedgeVector::zero(n, k);
        WedgeForm chi = WedgeForm::zero(m, k);
        for (Eigen::Index i = 0; i < u.coords.size(); ++i) u.coords[i] = rng.uniform(-1, 1);
        for (Eigen::Index i = 0; i < chi.coords.size(); ++i) chi.coords[i] = rng.uniform(-1, 1);
        const auto [lhs, rhs] = graph_identity_sides(Eigen::MatrixXd::Zero(m, n), u, chi);
        CHECK(lhs == 0.0);
        CHECK(rhs == 0.0);
    }
}

TEST_CASE("graph identity: 2x2 top degree equals det") {
    Rng rng(19);
    const WedgeVector u = WedgeVector::basis(2, IndexSubset{2, {0, 1}});
    WedgeForm chi = WedgeForm::zero(2, 2);
    chi.coords[0] = 1.0;
    for (int trial = 0; trial < 20; ++trial) {
        const Eigen::MatrixXd a = random_matrix(rng, 2, 2);
        const auto [lhs, rhs] = graph_identity_sides(a, u, chi);
        const double det = a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0);
        CHECK(std::abs(lhs - det) <= 1e-14 * (1.0 + std::abs(det)));
        CHECK(std::abs(rhs - det) <= 1e-14 * (1.0 + std::abs(det)));
    }
}

TEST_CASE("graph identity: random instances") {
    Rng rng(20);
    for (int trial = 0; trial < 1000; ++trial) {
        const int n = rng.uniform_int(1, 4);
        const int m = rng.uniform_int(1, 4);
        const int k = rng.uniform_int(1, std::min(n, m));
        const Eigen::MatrixXd a = random_matrix(rng, m, n, 2.0);
        WedgeVector u = WedgeVector::zero(n, k);
        WedgeForm chi = WedgeForm::zero(m, k);
        for (Eigen::Index i = 0; i < u.coords.size(); ++i) u.coords[i] = rng.uniform(-1, 1);
        for (Eigen::Index i = 0; i < chi.coords.size(); ++i) chi.coords[i] = rng.uniform(-1, 1);
        const auto [lhs, rhs] = graph_identity_sides(a, u, chi);
        CHECK(std::abs(lhs - rhs) <= 1e-10 * (1.0 + std::abs(rhs)));
    }
}

TEST_CASE("minor norms") {
    Eigen::MatrixXd id = Eigen::MatrixXd::Identity(2, 2);
    const auto norms = minor_norms(id, 2);
    REQUIRE(norms.size() == 2);
    CHECK(norms[0] == doctest::Approx(std::sqrt(2.0)));
    CHECK(norms[1] == doctest::Approx(1.0));
}
