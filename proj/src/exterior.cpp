#include "polyvar/exterior.hpp"

#include <algorithm>
#include <array>
#include <map>
#include <mutex>

namespace polyvar::exterior {

namespace {

void check_dims(int n, int l) {
    if (n < 0 || n > kMaxDim) throw ResourceError("exterior: ambient dimension must be in [0,8]");
    if (l < 0 || l > n) throw std::invalid_argument("exterior: degree must satisfy 0 <= l <= n");
}

std::vector<IndexSubset> enumerate_subsets(int n, int l) {
    std::vector<IndexSubset> out;
    out.reserve(static_cast<std::size_t>(binomial(n, l)));
    std::vector<int> cur(l);
    for (int i = 0; i < l; ++i) cur[i] = i;
    while (true) {
        out.push_back(IndexSubset{n, cur});
        if (l == 0) break;
        int i = l - 1;
        while (i >= 0 && cur[i] == n - l + i) --i;
        if (i < 0) break;
        ++cur[i];
        for (int j = i + 1; j < l; ++j) cur[j] = cur[j - 1] + 1;
    }
    return out;
}

}  // namespace

bool IndexSubset::contains(int i) const {
    return std::binary_search(indices.begin(), indices.end(), i);
}

IndexSubset IndexSubset::complement() const {
    IndexSubset c{ambient_dim, {}};
    c.indices.reserve(ambient_dim - size());
    for (int i = 0; i < ambient_dim; ++i)
        if (!contains(i)) c.indices.push_back(i);
    return c;
}

bool operator==(const IndexSubset& a, const IndexSubset& b) {
    return a.ambient_dim == b.ambient_dim && a.indices == b.indices;
}

const std::vector<IndexSubset>& basis_subsets(int n, int l) {
    check_dims(n, l);
    static std::map<std::pair<int, int>, std::vector<IndexSubset>> cache;
    static std::mutex mu;
    std::lock_guard<std::mutex> lock(mu);
    auto key = std::make_pair(n, l);
    auto it = cache.find(key);
    if (it == cache.end()) it = cache.emplace(key, enumerate_subsets(n, l)).first;
    return it->second;
}

int subset_rank(const IndexSubset& s) {
    // Lexicographic rank by counting subsets that precede s.
    const int n = s.ambient_dim;
    const int l = s.size();
    long long rank = 0;
    int prev = -1;
    for (int pos = 0; pos < l; ++pos) {
        for (int v = prev + 1; v < s.indices[pos]; ++v)
            rank += binomial(n - 1 - v, l - 1 - pos);
        prev = s.indices[pos];
    }
    return static_cast<int>(rank);
}

int sigma_sign(const IndexSubset& s) {
    // Inversions of the concatenation (I, I^c) relative to 0..n-1.
    const IndexSubset c = s.complement();
    long long inv = 0;
    for (int a : s.indices)
        for (int b : c.indices)
            if (a > b) ++inv;
    return (inv % 2 == 0) ? 1 : -1;
}

std::pair<int, IndexSubset> wedge_basis(const IndexSubset& a, const IndexSubset& b) {
    IndexSubset merged{a.ambient_dim, {}};
    merged.indices.reserve(a.size() + b.size());
    long long inv = 0;
    std::size_t i = 0, j = 0;
    while (i < a.indices.size() && j < b.indices.size()) {
        if (a.indices[i] == b.indices[j]) return {0, merged};
        if (a.indices[i] < b.indices[j]) {
            merged.indices.push_back(a.indices[i++]);
        } else {
            // b's element jumps over the remaining elements of a.
            inv += static_cast<long long>(a.indices.size() - i);
            merged.indices.push_back(b.indices[j++]);
        }
    }
    while (i < a.indices.size()) merged.indices.push_back(a.indices[i++]);
    while (j < b.indices.size()) merged.indices.push_back(b.indices[j++]);
    return {(inv % 2 == 0) ? 1 : -1, merged};
}

WedgeVector WedgeVector::zero(int n, int l) {
    check_dims(n, l);
    return {n, l, Eigen::VectorXd::Zero(binomial(n, l))};
}

WedgeVector WedgeVector::basis(int n, const IndexSubset& s) {
    WedgeVector v = zero(n, s.size());
    v.coords[subset_rank(s)] = 1.0;
    return v;
}

WedgeForm WedgeForm::zero(int n, int l) {
    check_dims(n, l);
    return {n, l, Eigen::VectorXd::Zero(binomial(n, l))};
}

WedgeForm WedgeForm::basis(int n, const IndexSubset& s) {
    WedgeForm f = zero(n, s.size());
    f.coords[subset_rank(s)] = 1.0;
    return f;
}

WedgeForm WedgeForm::volume(int n) {
    WedgeForm f = zero(n, n);
    f.coords[0] = 1.0;
    return f;
}

double WedgeForm::apply(const WedgeVector& v) const {
    if (v.ambient_dim != ambient_dim || v.degree != degree)
        throw std::invalid_argument("WedgeForm::apply: degree or dimension mismatch");
    return coords.dot(v.coords);
}

double small_det(const Eigen::MatrixXd& a) {
    const auto n = a.rows();
    if (n != a.cols()) throw std::invalid_argument("small_det: matrix must be square");
    switch (n) {
        case 0:
            return 1.0;
        case 1:
            return a(0, 0);
        case 2:
            return a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0);
        case 3:
            return a(0, 0) * (a(1, 1) * a(2, 2) - a(1, 2) * a(2, 1)) -
                   a(0, 1) * (a(1, 0) * a(2, 2) - a(1, 2) * a(2, 0)) +
                   a(0, 2) * (a(1, 0) * a(2, 1) - a(1, 1) * a(2, 0));
        default:
            return Eigen::PartialPivLU<Eigen::MatrixXd>(a).determinant();
    }
}

WedgeVector wedge_of_columns(const Eigen::MatrixXd& columns) {
    const int n = static_cast<int>(columns.rows());
    const int l = static_cast<int>(columns.cols());
    check_dims(n, l);
    WedgeVector v = WedgeVector::zero(n, l);
    const auto& rows = basis_subsets(n, l);
    Eigen::MatrixXd sub(l, l);
    for (std::size_t r = 0; r < rows.size(); ++r) {
        for (int i = 0; i < l; ++i)
            for (int j = 0; j < l; ++j) sub(i, j) = columns(rows[r].indices[i], j);
        v.coords[static_cast<Eigen::Index>(r)] = small_det(sub);
    }
    return v;
}

WedgeVector wedge(const WedgeVector& a, const WedgeVector& b) {
    if (a.ambient_dim != b.ambient_dim)
        throw std::invalid_argument("wedge: ambient dimension mismatch");
    const int n = a.ambient_dim;
    WedgeVector out = WedgeVector::zero(n, a.degree + b.degree);
    const auto& sa = basis_subsets(n, a.degree);
    const auto& sb = basis_subsets(n, b.degree);
    for (std::size_t i = 0; i < sa.size(); ++i) {
        if (a.coords[static_cast<Eigen::Index>(i)] == 0.0) continue;
        for (std::size_t j = 0; j < sb.size(); ++j) {
            auto [sign, merged] = wedge_basis(sa[i], sb[j]);
            if (sign == 0) continue;
            out.coords[subset_rank(merged)] +=
                sign * a.coords[static_cast<Eigen::Index>(i)] * b.coords[static_cast<Eigen::Index>(j)];
        }
    }
    return out;
}

namespace {

// Sort columns lexicographically and report the permutation parity, so that
// determinant-based values negate bitwise under column swaps.
std::pair<Eigen::MatrixXd, int> canonical_columns(const Eigen::MatrixXd& a) {
    const int cols = static_cast<int>(a.cols());
    std::vector<int> order(cols);
    for (int i = 0; i < cols; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](int i, int j) {
        for (Eigen::Index r = 0; r < a.rows(); ++r) {
            if (a(r, i) != a(r, j)) return a(r, i) < a(r, j);
        }
        return i < j;
    });
    int inversions = 0;
    for (int i = 0; i < cols; ++i)
        for (int j = i + 1; j < cols; ++j)
            if (order[i] > order[j]) ++inversions;
    Eigen::MatrixXd sorted(a.rows(), cols);
    for (int i = 0; i < cols; ++i) sorted.col(i) = a.col(order[i]);
    return {sorted, (inversions % 2 == 0) ? 1 : -1};
}

}  // namespace

double wedge_inner(const Eigen::MatrixXd& vs, const Eigen::MatrixXd& ws) {
    if (vs.cols() != ws.cols() || vs.rows() != ws.rows())
        throw std::invalid_argument("wedge_inner: vector lists must have matching shapes");
    const auto [sv, sign_v] = canonical_columns(vs);
    const auto [sw, sign_w] = canonical_columns(ws);
    const Eigen::MatrixXd gram = sv.transpose() * sw;
    return sign_v * sign_w * small_det(gram);
}

WedgeVector MinorMatrix::apply(const WedgeVector& v) const {
    if (v.ambient_dim != source_dim || v.degree != degree)
        throw std::invalid_argument("MinorMatrix::apply: degree or dimension mismatch");
    return {target_dim, degree, matrix * v.coords};
}

double MinorMatrix::entry(const IndexSubset& source, const IndexSubset& target) const {
    return matrix(subset_rank(target), subset_rank(source));
}

MinorMatrix lift_minors(const Eigen::MatrixXd& a, int l) {
    const int m = static_cast<int>(a.rows());
    const int n = static_cast<int>(a.cols());
    if (n > kMaxDim || m > kMaxDim) throw ResourceError("lift_minors: dimensions capped at 8");
    if (l < 1 || l > std::min(n, m))
        throw std::invalid_argument("lift_minors: degree must satisfy 1 <= l <= min(n,m)");
    const auto& src = basis_subsets(n, l);
    const auto& tgt = basis_subsets(m, l);
    MinorMatrix out{n, m, l, Eigen::MatrixXd(tgt.size(), src.size())};
    Eigen::MatrixXd sub(l, l);
    for (std::size_t r = 0; r < tgt.size(); ++r) {
        for (std::size_t c = 0; c < src.size(); ++c) {
            for (int i = 0; i < l; ++i)
                for (int j = 0; j < l; ++j) sub(i, j) = a(tgt[r].indices[i], src[c].indices[j]);
            out.matrix(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = small_det(sub);
        }
    }
    return out;
}

MinorMatrix lift_minors_derivative(const Eigen::MatrixXd& a, const Eigen::MatrixXd& da, int l) {
    const int m = static_cast<int>(a.rows());
    const int n = static_cast<int>(a.cols());
    if (da.rows() != m || da.cols() != n)
        throw std::invalid_argument("lift_minors_derivative: direction shape mismatch");
    if (l < 1 || l > std::min(n, m))
        throw std::invalid_argument("lift_minors_derivative: invalid degree");
    const auto& src = basis_subsets(n, l);
    const auto& tgt = basis_subsets(m, l);
    MinorMatrix out{n, m, l, Eigen::MatrixXd::Zero(tgt.size(), src.size())};
    Eigen::MatrixXd sub(l, l);
    for (std::size_t r = 0; r < tgt.size(); ++r) {
        for (std::size_t c = 0; c < src.size(); ++c) {
            double d = 0.0;
            // Multilinearity in columns: replace one column at a time.
            for (int rep = 0; rep < l; ++rep) {
                for (int i = 0; i < l; ++i)
                    for (int j = 0; j < l; ++j)
                        sub(i, j) = (j == rep) ? da(tgt[r].indices[i], src[c].indices[j])
                                               : a(tgt[r].indices[i], src[c].indices[j]);
                d += small_det(sub);
            }
            out.matrix(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = d;
        }
    }
    return out;
}

Eigen::MatrixXd lift_minors_derivative_adjoint(const Eigen::MatrixXd& a, const Eigen::MatrixXd& g,
                                               int l) {
    const int m = static_cast<int>(a.rows());
    const int n = static_cast<int>(a.cols());
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(m, n);
    Eigen::MatrixXd dir = Eigen::MatrixXd::Zero(m, n);
    for (int r = 0; r < m; ++r) {
        for (int c = 0; c < n; ++c) {
            dir(r, c) = 1.0;
            const MinorMatrix d = lift_minors_derivative(a, dir, l);
            h(r, c) = (g.array() * d.matrix.array()).sum();
            dir(r, c) = 0.0;
        }
    }
    return h;
}

WedgeForm interior_product(const WedgeVector& u, const WedgeForm& omega) {
    if (u.ambient_dim != omega.ambient_dim)
        throw std::invalid_argument("interior_product: ambient dimension mismatch");
    if (u.degree > omega.degree)
        throw std::invalid_argument("interior_product: contraction degree exceeds form degree");
    const int n = u.ambient_dim;
    WedgeForm out = WedgeForm::zero(n, omega.degree - u.degree);
    const auto& su = basis_subsets(n, u.degree);
    const auto& sres = basis_subsets(n, out.degree);
    for (std::size_t i = 0; i < su.size(); ++i) {
        const double ui = u.coords[static_cast<Eigen::Index>(i)];
        if (ui == 0.0) continue;
        for (std::size_t s = 0; s < sres.size(); ++s) {
            auto [sign, merged] = wedge_basis(su[i], sres[s]);
            if (sign == 0) continue;
            out.coords[static_cast<Eigen::Index>(s)] +=
                sign * ui * omega.coords[subset_rank(merged)];
        }
    }
    return out;
}

std::pair<double, double> graph_identity_sides(const Eigen::MatrixXd& a, const WedgeVector& u,
                                               const WedgeForm& chi) {
    const int m = static_cast<int>(a.rows());
    const int n = static_cast<int>(a.cols());
    const int k = u.degree;
    if (u.ambient_dim != n || chi.ambient_dim != m || chi.degree != k)
        throw std::invalid_argument("graph_identity_sides: dimension mismatch");
    if (n + m > kMaxDim) throw ResourceError("graph_identity_sides: n+m capped at 8");

    // Right side: (-1)^{k(n-k)} chi(wedge_k a . U).
    double rhs = 0.0;
    if (k == 0) {
        rhs = chi.coords[0] * u.coords[0];
    } else if (k <= std::min(n, m)) {
        rhs = chi.apply(lift_minors(a, k).apply(u));
    }
    if (((k * (n - k)) % 2) != 0) rhs = -rhs;

    // Left side in the product basis (e's first, f's after).
    Eigen::MatrixXd graph(n + m, n);
    graph.topRows(n) = Eigen::MatrixXd::Identity(n, n);
    graph.bottomRows(m) = a;
    const auto& sub_full = basis_subsets(n + m, n);
    Eigen::MatrixXd block(n, n);
    const WedgeForm iuo = interior_product(u, WedgeForm::volume(n));
    double lhs = 0.0;
    for (const auto& s : sub_full) {
        IndexSubset se{n, {}}, sf{m, {}};
        for (int idx : s.indices) {
            if (idx < n)
                se.indices.push_back(idx);
            else
                sf.indices.push_back(idx - n);
        }
        if (se.size() != n - k) continue;
        const double form_coeff = iuo.coords[subset_rank(se)] * chi.coords[subset_rank(sf)];
        if (form_coeff == 0.0) continue;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) block(i, j) = graph(s.indices[i], j);
        lhs += form_coeff * small_det(block);
    }
    return {lhs, rhs};
}

std::vector<double> minor_norms(const Eigen::MatrixXd& v, int k) {
    const int p = static_cast<int>(std::min(v.rows(), v.cols()));
    std::vector<double> out;
    out.reserve(k);
    for (int l = 1; l <= k; ++l) {
        if (l > p) {
            out.push_back(0.0);
        } else if (l == 1) {
            out.push_back(v.norm());
        } else {
            out.push_back(lift_minors(v, l).matrix.norm());
        }
    }
    return out;
}

}  // namespace polyvar::exterior
