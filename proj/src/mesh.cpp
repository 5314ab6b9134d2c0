#include "polyvar/mesh.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <set>

#include "polyvar/exterior.hpp"

namespace polyvar::meshmaps {

namespace {

constexpr double kPi = 3.14159265358979323846;

double reference_volume(int dim) {
    double v = 1.0;
    for (int i = 2; i <= dim; ++i) v /= i;
    return v;
}

}  // namespace

// Gauss-Legendre nodes/weights on [0,1] by Newton iteration.
void gauss_legendre_unit(int n, std::vector<double>& x, std::vector<double>& w) {
    x.assign(n, 0.0);
    w.assign(n, 0.0);
    for (int i = 0; i < n; ++i) {
        double t = std::cos(kPi * (i + 0.75) / (n + 0.5));
        double p0 = 0.0, p1 = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            p0 = 1.0;
            p1 = 0.0;
            for (int j = 0; j < n; ++j) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * t * p1 - j * p2) / (j + 1.0);
            }
            const double dp = n * (t * p0 - p1) / (t * t - 1.0);
            const double dt = p0 / dp;
            t -= dt;
            if (std::abs(dt) < 1e-15) break;
        }
        p0 = 1.0;
        p1 = 0.0;
        for (int j = 0; j < n; ++j) {
            const double p2 = p1;
            p1 = p0;
            p0 = ((2.0 * j + 1.0) * t * p1 - j * p2) / (j + 1.0);
        }
        const double dp = n * (t * p0 - p1) / (t * t - 1.0);
        x[i] = 0.5 * (1.0 + t);
        w[i] = 1.0 / ((1.0 - t * t) * dp * dp);
    }
}

namespace {

QuadratureRule collapsed_triangle(int order) {
    const int nu = (order + 4) / 2;  // ceil((order+2)/2)
    const int nv = (order + 3) / 2;
    std::vector<double> xu, wu, xv, wv;
    gauss_legendre_unit(nu, xu, wu);
    gauss_legendre_unit(nv, xv, wv);
    QuadratureRule q{2, order, Eigen::MatrixXd(3, nu * nv), Eigen::VectorXd(nu * nv)};
    int idx = 0;
    for (int i = 0; i < nu; ++i)
        for (int j = 0; j < nv; ++j) {
            const double x = xu[i];
            const double y = xv[j] * (1.0 - xu[i]);
            q.points(0, idx) = 1.0 - x - y;
            q.points(1, idx) = x;
            q.points(2, idx) = y;
            q.weights[idx] = wu[i] * wv[j] * (1.0 - xu[i]);
            ++idx;
        }
    return q;
}

QuadratureRule collapsed_tet(int order) {
    const int nu = (order + 5) / 2;
    const int nv = (order + 4) / 2;
    const int nw = (order + 3) / 2;
    std::vector<double> xu, wu, xv, wv, xw, ww;
    gauss_legendre_unit(nu, xu, wu);
    gauss_legendre_unit(nv, xv, wv);
    gauss_legendre_unit(nw, xw, ww);
    const int total = nu * nv * nw;
    QuadratureRule q{3, order, Eigen::MatrixXd(4, total), Eigen::VectorXd(total)};
    int idx = 0;
    for (int i = 0; i < nu; ++i)
        for (int j = 0; j < nv; ++j)
            for (int k = 0; k < nw; ++k) {
                const double x = xu[i];
                const double y = xv[j] * (1.0 - x);
                const double z = xw[k] * (1.0 - x) * (1.0 - xv[j]);
                q.points(0, idx) = 1.0 - x - y - z;
                q.points(1, idx) = x;
                q.points(2, idx) = y;
                q.points(3, idx) = z;
                q.weights[idx] = wu[i] * wv[j] * ww[k] * (1.0 - x) * (1.0 - x) * (1.0 - xv[j]);
                ++idx;
            }
    return q;
}

}  // namespace

QuadratureRule QuadratureRule::simplex(int dim, int order) {
    if (order < 1) order = 1;
    if (dim == 2) {
        if (order == 1) {
            QuadratureRule q{2, 1, Eigen::MatrixXd(3, 1), Eigen::VectorXd(1)};
            q.points.col(0) = Eigen::Vector3d(1.0 / 3, 1.0 / 3, 1.0 / 3);
            q.weights[0] = 0.5;
            return q;
        }
        if (order == 2) {
            // Edge-midpoint rule.
            QuadratureRule q{2, 2, Eigen::MatrixXd(3, 3), Eigen::VectorXd::Constant(3, 0.5 / 3)};
            q.points.col(0) = Eigen::Vector3d(0.5, 0.5, 0.0);
            q.points.col(1) = Eigen::Vector3d(0.5, 0.0, 0.5);
            q.points.col(2) = Eigen::Vector3d(0.0, 0.5, 0.5);
            return q;
        }
        if (order <= 4) {
            // Symmetric six-point rule, exact to degree 4.
            const double a1 = 0.445948490915965;
            const double w1 = 0.223381589678011;
            const double a2 = 0.091576213509771;
            const double w2 = 0.109951743655322;
            QuadratureRule q{2, 4, Eigen::MatrixXd(3, 6), Eigen::VectorXd(6)};
            int idx = 0;
            for (const auto& [a, w] : {std::pair{a1, w1}, std::pair{a2, w2}}) {
                const double b = 1.0 - 2.0 * a;
                q.points.col(idx) = Eigen::Vector3d(b, a, a);
                q.weights[idx++] = 0.5 * w;
                q.points.col(idx) = Eigen::Vector3d(a, b, a);
                q.weights[idx++] = 0.5 * w;
                q.points.col(idx) = Eigen::Vector3d(a, a, b);
                q.weights[idx++] = 0.5 * w;
            }
            return q;
        }
        return collapsed_triangle(order);
    }
    if (dim == 3) {
        if (order == 1) {
            QuadratureRule q{3, 1, Eigen::MatrixXd(4, 1), Eigen::VectorXd(1)};
            q.points.col(0) = Eigen::Vector4d::Constant(0.25);
            q.weights[0] = reference_volume(3);
            return q;
        }
        if (order == 2) {
            const double a = (5.0 + 3.0 * std::sqrt(5.0)) / 20.0;
            const double b = (5.0 - std::sqrt(5.0)) / 20.0;
            QuadratureRule q{3, 2, Eigen::MatrixXd(4, 4),
                             Eigen::VectorXd::Constant(4, reference_volume(3) / 4.0)};
            for (int i = 0; i < 4; ++i) {
                q.points.col(i) = Eigen::Vector4d::Constant(b);
                q.points(i, i) = a;
            }
            return q;
        }
        return collapsed_tet(order);
    }
    throw std::invalid_argument("QuadratureRule::simplex: dim must be 2 or 3");
}

SimplicialMesh::SimplicialMesh(int dim, Eigen::MatrixXd vertices, Eigen::MatrixXi cells)
    : dim_(dim), vertices_(std::move(vertices)), cells_(std::move(cells)) {
    if (dim_ != 2 && dim_ != 3) throw std::invalid_argument("SimplicialMesh: dim must be 2 or 3");
    if (vertices_.rows() != dim_ || cells_.rows() != dim_ + 1)
        throw std::invalid_argument("SimplicialMesh: inconsistent array shapes");

    const int nc = num_cells();
    cell_volumes_.resize(nc);
    bary_grads_.reserve(nc);
    const double ref = reference_volume(dim_);
    Eigen::MatrixXd edges(dim_, dim_);
    for (int c = 0; c < nc; ++c) {
        const Eigen::VectorXd p0 = vertices_.col(cells_(0, c));
        for (int j = 0; j < dim_; ++j) edges.col(j) = vertices_.col(cells_(j + 1, c)) - p0;
        const double det = exterior::small_det(edges);
        const double vol = det * ref;
        if (!(vol > 0.0))
            throw std::logic_error("SimplicialMesh: degenerate or misoriented cell");
        cell_volumes_[c] = vol;
        const Eigen::MatrixXd inv = edges.inverse();
        Eigen::MatrixXd grads(dim_ + 1, dim_);
        grads.bottomRows(dim_) = inv;
        grads.row(0) = -inv.colwise().sum();
        bary_grads_.push_back(std::move(grads));
    }
    std::vector<double> vols(cell_volumes_.data(), cell_volumes_.data() + nc);
    total_volume_ = tree_sum(vols);

    // Boundary = facets that occur exactly once.
    std::map<std::vector<int>, int> facet_count;
    std::vector<int> facet(dim_);
    for (int c = 0; c < nc; ++c) {
        for (int skip = 0; skip <= dim_; ++skip) {
            int k = 0;
            for (int j = 0; j <= dim_; ++j)
                if (j != skip) facet[k++] = cells_(j, c);
            std::sort(facet.begin(), facet.end());
            facet_count[facet]++;
        }
    }
    std::set<int> bset;
    for (const auto& [f, count] : facet_count) {
        if (count == 1)
            for (int v : f) bset.insert(v);
    }
    boundary_nodes_.assign(bset.begin(), bset.end());
}

bool SimplicialMesh::is_boundary_node(int v) const {
    return std::binary_search(boundary_nodes_.begin(), boundary_nodes_.end(), v);
}

Eigen::VectorXd SimplicialMesh::cell_centroid(int c) const {
    Eigen::VectorXd p = Eigen::VectorXd::Zero(dim_);
    for (int j = 0; j <= dim_; ++j) p += vertices_.col(cells_(j, c));
    return p / (dim_ + 1);
}

Eigen::VectorXd SimplicialMesh::point_from_barycentric(int c, const Eigen::VectorXd& bary) const {
    Eigen::VectorXd p = Eigen::VectorXd::Zero(dim_);
    for (int j = 0; j <= dim_; ++j) p += bary[j] * vertices_.col(cells_(j, c));
    return p;
}

MeshPtr build_rect_mesh(int nx, int ny) {
    if (nx < 1 || ny < 1) throw std::invalid_argument("build_rect_mesh: divisions must be >= 1");
    if (static_cast<long long>(nx) * ny > 2'000'000)
        throw ResourceError("build_rect_mesh: cell budget exceeded");
    const int vx = nx + 1, vy = ny + 1;
    Eigen::MatrixXd verts(2, vx * vy);
    for (int j = 0; j < vy; ++j)
        for (int i = 0; i < vx; ++i)
            verts.col(j * vx + i) = Eigen::Vector2d(static_cast<double>(i) / nx,
                                                    static_cast<double>(j) / ny);
    Eigen::MatrixXi cells(3, 2 * nx * ny);
    int c = 0;
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
            const int v00 = j * vx + i, v10 = v00 + 1, v01 = v00 + vx, v11 = v01 + 1;
            cells.col(c++) = Eigen::Vector3i(v00, v10, v11);
            cells.col(c++) = Eigen::Vector3i(v00, v11, v01);
        }
    return std::make_shared<SimplicialMesh>(2, std::move(verts), std::move(cells));
}

MeshPtr build_box_mesh(int n, int divisions) {
    if (divisions < 1) throw std::invalid_argument("build_box_mesh: divisions must be >= 1");
    if (n == 2) return build_rect_mesh(divisions, divisions);
    if (n != 3) throw std::invalid_argument("build_box_mesh: n must be 2 or 3");
    const int d = divisions;
    if (static_cast<long long>(d) * d * d > 300'000)
        throw ResourceError("build_box_mesh: cell budget exceeded");
    const int v1 = d + 1;
    Eigen::MatrixXd verts(3, v1 * v1 * v1);
    auto vid = [&](int i, int j, int k) { return (k * v1 + j) * v1 + i; };
    for (int k = 0; k < v1; ++k)
        for (int j = 0; j < v1; ++j)
            for (int i = 0; i < v1; ++i)
                verts.col(vid(i, j, k)) = Eigen::Vector3d(static_cast<double>(i) / d,
                                                          static_cast<double>(j) / d,
                                                          static_cast<double>(k) / d);
    // Kuhn subdivision: six tets per cube, one per axis permutation.
    const std::array<std::array<int, 3>, 6> perms = {
        {{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}}};
    Eigen::MatrixXi cells(4, 6 * d * d * d);
    int c = 0;
    for (int k = 0; k < d; ++k)
        for (int j = 0; j < d; ++j)
            for (int i = 0; i < d; ++i) {
                const std::array<int, 3> base = {i, j, k};
                for (const auto& perm : perms) {
                    std::array<std::array<int, 3>, 4> corner;
                    corner[0] = base;
                    for (int s = 0; s < 3; ++s) {
                        corner[s + 1] = corner[s];
                        corner[s + 1][perm[s]] += 1;
                    }
                    Eigen::Vector4i tet;
                    for (int s = 0; s < 4; ++s) tet[s] = vid(corner[s][0], corner[s][1], corner[s][2]);
                    // Flip odd permutations to keep positive orientation.
                    Eigen::Matrix3d e;
                    for (int s = 0; s < 3; ++s)
                        e.col(s) = verts.col(tet[s + 1]) - verts.col(tet[0]);
                    if (e.determinant() < 0) std::swap(tet[2], tet[3]);
                    cells.col(c++) = tet;
                }
            }
    return std::make_shared<SimplicialMesh>(3, std::move(verts), std::move(cells));
}

MeshPtr build_disc_mesh(double h) {
    if (!(h > 0.0 && h < 1.0)) throw std::invalid_argument("build_disc_mesh: need 0 < h < 1");
    const int rings = std::max(1, static_cast<int>(std::ceil(1.0 / h)));
    int m = std::max(5, static_cast<int>(std::ceil(2.0 * kPi / h)));
    if (m % 2 == 0) ++m;  // odd vertex count keeps the origin off fan diagonals
    if (static_cast<long long>(rings) * m > 2'000'000)
        throw ResourceError("build_disc_mesh: cell budget exceeded");

    Eigen::MatrixXd verts(2, rings * m);
    auto vid = [&](int ring, int q) { return (ring - 1) * m + (q % m); };
    for (int ring = 1; ring <= rings; ++ring) {
        const double r = static_cast<double>(ring) / rings;
        for (int q = 0; q < m; ++q) {
            const double a = 2.0 * kPi * q / m;
            verts.col(vid(ring, q)) = Eigen::Vector2d(r * std::cos(a), r * std::sin(a));
        }
    }
    const int fan_cells = m - 2;
    const int annulus_cells = 2 * m * (rings - 1);
    Eigen::MatrixXi cells(3, fan_cells + annulus_cells);
    int c = 0;
    for (int q = 1; q + 1 < m; ++q)
        cells.col(c++) = Eigen::Vector3i(vid(1, 0), vid(1, q), vid(1, q + 1));
    for (int ring = 1; ring < rings; ++ring)
        for (int q = 0; q < m; ++q) {
            cells.col(c++) = Eigen::Vector3i(vid(ring, q), vid(ring + 1, q), vid(ring + 1, q + 1));
            cells.col(c++) = Eigen::Vector3i(vid(ring, q), vid(ring + 1, q + 1), vid(ring, q + 1));
        }
    auto mesh = std::make_shared<SimplicialMesh>(2, std::move(verts), std::move(cells));

    // The origin must sit strictly inside one fan cell.
    int containing = -1;
    for (int fc = 0; fc < fan_cells; ++fc) {
        const Eigen::VectorXd p0 = mesh->vertices().col(mesh->cells()(0, fc));
        const Eigen::VectorXd g = mesh->barycentric_gradients(fc).bottomRows(2) * (-p0);
        const double b1 = g[0], b2 = g[1];
        const double b0 = 1.0 - b1 - b2;
        if (b0 > 1e-12 && b1 > 1e-12 && b2 > 1e-12) {
            containing = fc;
            break;
        }
    }
    if (containing < 0) throw std::logic_error("build_disc_mesh: origin not strictly interior");
    return mesh;
}

}  // namespace polyvar::meshmaps
