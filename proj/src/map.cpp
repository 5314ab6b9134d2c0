#include "polyvar/map.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace polyvar::meshmaps {

Eigen::MatrixXd PwAffineMap::cell_gradient(int cell) const {
    const auto& mesh_ref = *mesh;
    const int n = mesh_ref.dim();
    const int m = target_dim();
    Eigen::MatrixXd g = Eigen::MatrixXd::Zero(m, n);
    // du = sum_i u_i (grad lambda_i)^T.
    const Eigen::MatrixXd& grads = mesh_ref.barycentric_gradients(cell);
    for (int j = 0; j <= n; ++j)
        g.noalias() += values.col(mesh_ref.cells()(j, cell)) * grads.row(j);
    return g;
}

Eigen::VectorXd PwAffineMap::evaluate(int cell, const Eigen::VectorXd& barycentric) const {
    Eigen::VectorXd x = Eigen::VectorXd::Zero(target_dim());
    for (int j = 0; j <= mesh->dim(); ++j)
        x += barycentric[j] * values.col(mesh->cells()(j, cell));
    return x;
}

Eigen::MatrixXd PwAffineMap::boundary_trace() const {
    const auto& nodes = mesh->boundary_nodes();
    Eigen::MatrixXd trace(target_dim(), static_cast<Eigen::Index>(nodes.size()));
    for (std::size_t i = 0; i < nodes.size(); ++i)
        trace.col(static_cast<Eigen::Index>(i)) = values.col(nodes[i]);
    return trace;
}

PwAffineMap interpolate(const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& f,
                        MeshPtr mesh, int target_dim) {
    PwAffineMap u{mesh, Eigen::MatrixXd(target_dim, mesh->num_vertices())};
    for (int v = 0; v < mesh->num_vertices(); ++v) {
        const Eigen::VectorXd value = f(mesh->vertices().col(v));
        if (value.size() != target_dim)
            throw std::invalid_argument("interpolate: callback returned wrong dimension");
        if (!value.allFinite()) throw EvaluationError("interpolate: non-finite nodal value");
        u.values.col(v) = value;
    }
    return u;
}

PwAffineMap identity_map(MeshPtr mesh) {
    PwAffineMap u{mesh, mesh->vertices()};
    return u;
}

bool traces_equal(const PwAffineMap& a, const PwAffineMap& b, double tol) {
    if (a.mesh != b.mesh || a.target_dim() != b.target_dim()) return false;
    return ((a.boundary_trace() - b.boundary_trace()).cwiseAbs().maxCoeff() <= tol);
}

double integrate_energy(const PwAffineMap& u, const variational::IntegrandSpec& L,
                        const QuadratureRule& q) {
    const auto& mesh = *u.mesh;
    if (q.dim != mesh.dim())
        throw std::invalid_argument("integrate_energy: quadrature dimension mismatch");
    if (L.target_dim != u.target_dim())
        throw std::invalid_argument("integrate_energy: target dimension mismatch");
    double ref = 1.0;
    for (int i = 2; i <= mesh.dim(); ++i) ref /= i;

    const auto cell_value = [&](std::size_t c) -> double {
        const Eigen::MatrixXd grad = u.cell_gradient(static_cast<int>(c));
        const variational::MinorTuple minors = variational::minor_tuple(grad, L.k);
        const double scale = mesh.cell_volume(static_cast<int>(c)) / ref;
        double acc = 0.0;
        for (int p = 0; p < q.size(); ++p) {
            const Eigen::VectorXd bary = q.points.col(p);
            const Eigen::VectorXd t = mesh.point_from_barycentric(static_cast<int>(c), bary);
            const Eigen::VectorXd x = u.evaluate(static_cast<int>(c), bary);
            const double val = L.evaluate(t, x, minors);
            if (std::isinf(val)) return std::numeric_limits<double>::infinity();
            acc += q.weights[p] * val;
        }
        return scale * acc;
    };
    const std::vector<double> per_cell =
        parallel_map(static_cast<std::size_t>(mesh.num_cells()), cell_value);
    for (double v : per_cell)
        if (std::isinf(v)) return std::numeric_limits<double>::infinity();
    return tree_sum(per_cell);
}

std::vector<exterior::MinorMatrix> minor_field(const PwAffineMap& u, int l) {
    const int n = u.mesh->dim();
    const int m = u.target_dim();
    if (l < 1 || l > std::min(n, m))
        throw std::invalid_argument("minor_field: degree must satisfy 1 <= l <= min(n,m)");
    std::vector<exterior::MinorMatrix> field;
    field.reserve(u.mesh->num_cells());
    for (int c = 0; c < u.mesh->num_cells(); ++c)
        field.push_back(exterior::lift_minors(u.cell_gradient(c), l));
    return field;
}

PwAffineMap stripe_map(MeshPtr mesh, const Eigen::MatrixXd& A, const Eigen::MatrixXd& B,
                       double lambda, int bands) {
    const int n = mesh->dim();
    const int m = static_cast<int>(A.rows());
    if (B.rows() != m || A.cols() != n || B.cols() != n)
        throw std::invalid_argument("stripe_map: gradient shapes mismatch");
    if (!(lambda > 0.0 && lambda < 1.0))
        throw std::invalid_argument("stripe_map: lambda must lie in (0,1)");
    if (bands < 1) throw std::invalid_argument("stripe_map: bands must be >= 1");
    for (int j = 0; j + 1 < n; ++j)
        if ((A.col(j) - B.col(j)).norm() > 0.0)
            throw std::invalid_argument(
                "stripe_map: A and B may differ only in the last column (rank-one, band-normal "
                "direction)");

    const Eigen::MatrixXd mean = lambda * A + (1.0 - lambda) * B;
    const Eigen::VectorXd jump = A.col(n - 1) - B.col(n - 1);
    // 1-periodic sawtooth with slope (1-lambda) then -lambda; S(0)=S(1)=0.
    const auto saw = [lambda](double s) {
        const double f = s - std::floor(s);
        return (f <= lambda) ? (1.0 - lambda) * f : lambda * (1.0 - f);
    };
    const auto f = [&](const Eigen::VectorXd& t) -> Eigen::VectorXd {
        return mean * t + (saw(bands * t[n - 1]) / bands) * jump;
    };
    return interpolate(f, mesh, m);
}

void save_map(const PwAffineMap& u, std::ostream& out) {
    const auto& mesh = *u.mesh;
    out << mesh.dim() << ' ' << u.target_dim() << ' ' << mesh.num_vertices() << ' '
        << mesh.num_cells() << '\n';
    for (int v = 0; v < mesh.num_vertices(); ++v) {
        for (int i = 0; i < mesh.dim(); ++i)
            out << (i ? " " : "") << format_double(mesh.vertices()(i, v));
        out << '\n';
    }
    for (int c = 0; c < mesh.num_cells(); ++c) {
        for (int j = 0; j <= mesh.dim(); ++j) out << (j ? " " : "") << mesh.cells()(j, c);
        out << '\n';
    }
    out << mesh.boundary_nodes().size();
    for (int b : mesh.boundary_nodes()) out << ' ' << b;
    out << '\n';
    for (int v = 0; v < mesh.num_vertices(); ++v) {
        for (int i = 0; i < u.target_dim(); ++i)
            out << (i ? " " : "") << format_double(u.values(i, v));
        out << '\n';
    }
}

void save_map(const PwAffineMap& u, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("save_map: cannot open " + path);
    save_map(u, out);
}

PwAffineMap load_map(std::istream& in) {
    int n = 0, m = 0, nv = 0, nc = 0;
    if (!(in >> n >> m >> nv >> nc)) throw std::runtime_error("load_map: bad header");
    Eigen::MatrixXd verts(n, nv);
    for (int v = 0; v < nv; ++v)
        for (int i = 0; i < n; ++i)
            if (!(in >> verts(i, v))) throw std::runtime_error("load_map: bad vertex line");
    Eigen::MatrixXi cells(n + 1, nc);
    for (int c = 0; c < nc; ++c)
        for (int j = 0; j <= n; ++j)
            if (!(in >> cells(j, c))) throw std::runtime_error("load_map: bad cell line");
    std::size_t nb = 0;
    if (!(in >> nb)) throw std::runtime_error("load_map: bad boundary line");
    std::vector<int> boundary(nb);
    for (auto& b : boundary)
        if (!(in >> b)) throw std::runtime_error("load_map: bad boundary line");
    Eigen::MatrixXd values(m, nv);
    for (int v = 0; v < nv; ++v)
        for (int i = 0; i < m; ++i)
            if (!(in >> values(i, v))) throw std::runtime_error("load_map: bad value line");
    auto mesh = std::make_shared<SimplicialMesh>(n, std::move(verts), std::move(cells));
    if (mesh->boundary_nodes() != boundary)
        throw std::runtime_error("load_map: boundary nodes disagree with mesh topology");
    return PwAffineMap{mesh, std::move(values)};
}

PwAffineMap load_map(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_map: cannot open " + path);
    return load_map(in);
}

}  // namespace polyvar::meshmaps
