#include "polyvar/kr.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <vector>

namespace polyvar::youngmeasure {

namespace {

// Dense transportation simplex. Nodes 0..R-1 are supplies, R..R+C-1 demands;
// the basis is a spanning tree with R+C-1 arcs (zero flows allowed).
class TransportSimplex {
public:
    TransportSimplex(const Eigen::VectorXd& a, const Eigen::VectorXd& b,
                     const Eigen::MatrixXd& cost)
        : a_(a), b_(b), cost_(cost), rows_(static_cast<int>(a.size())),
          cols_(static_cast<int>(b.size())) {}

    double solve() {
        northwest_corner();
        const double tol = 1e-12 * (1.0 + cost_.cwiseAbs().maxCoeff());
        const long long max_pivots = 400LL * (rows_ + cols_) + 20000;
        bool bland = false;  // anti-cycling fallback after the pivot budget
        for (long long pivot = 0;; ++pivot) {
            if (pivot > max_pivots) {
                if (bland) throw EvaluationError("transport_cost: pivot budget exceeded");
                bland = true;
                pivot = 0;
            }
            compute_potentials();
            int ei = -1, ej = -1;
            double best = -tol;
            for (int i = 0; i < rows_ && !(bland && ei >= 0); ++i) {
                const double ui = u_[i];
                for (int j = 0; j < cols_; ++j) {
                    const double rc = cost_(i, j) - ui - v_[j];
                    if (rc < best) {
                        best = rc;
                        ei = i;
                        ej = j;
                        if (bland) break;
                    }
                }
            }
            if (ei < 0) break;
            pivot_on(ei, ej);
        }
        std::vector<double> terms;
        terms.reserve(arcs_.size());
        for (const auto& arc : arcs_)
            if (arc.active) terms.push_back(arc.flow * cost_(arc.i, arc.j));
        std::sort(terms.begin(), terms.end());
        return tree_sum(terms);
    }

private:
    struct Arc {
        int i, j;
        double flow;
        bool active;
    };

    void add_arc(int i, int j, double flow) {
        adjacency_[i].push_back(static_cast<int>(arcs_.size()));
        adjacency_[rows_ + j].push_back(static_cast<int>(arcs_.size()));
        arcs_.push_back(Arc{i, j, flow, true});
    }

    void northwest_corner() {
        adjacency_.assign(rows_ + cols_, {});
        arcs_.clear();
        Eigen::VectorXd arem = a_, brem = b_;
        int i = 0, j = 0;
        while (i < rows_ && j < cols_) {
            const double f = std::min(arem[i], brem[j]);
            add_arc(i, j, f);
            arem[i] -= f;
            brem[j] -= f;
            if (i == rows_ - 1 && j == cols_ - 1) break;
            if (arem[i] <= 0.0 && i < rows_ - 1)
                ++i;
            else
                ++j;
        }
    }

    void compute_potentials() {
        const int nodes = rows_ + cols_;
        u_.assign(rows_, 0.0);
        v_.assign(cols_, 0.0);
        std::vector<char> seen(nodes, 0);
        std::deque<int> queue;
        queue.push_back(0);
        seen[0] = 1;
        while (!queue.empty()) {
            const int node = queue.front();
            queue.pop_front();
            for (const int ai : adjacency_[node]) {
                const Arc& arc = arcs_[ai];
                if (!arc.active) continue;
                const int other = (node == arc.i) ? rows_ + arc.j : arc.i;
                if (seen[other]) continue;
                seen[other] = 1;
                if (other >= rows_)
                    v_[other - rows_] = cost_(arc.i, arc.j) - u_[arc.i];
                else
                    u_[other] = cost_(arc.i, arc.j) - v_[arc.j];
                queue.push_back(other);
            }
        }
    }

    // Tree path between the endpoints of the entering arc; flows alternate
    // -theta starting from the arc incident to the entering row.
    void pivot_on(int ei, int ej) {
        const int nodes = rows_ + cols_;
        std::vector<int> parent_arc(nodes, -1);
        std::vector<int> parent_node(nodes, -1);
        std::vector<char> seen(nodes, 0);
        std::deque<int> queue;
        const int start = ei;
        const int goal = rows_ + ej;
        queue.push_back(start);
        seen[start] = 1;
        while (!queue.empty()) {
            const int node = queue.front();
            queue.pop_front();
            if (node == goal) break;
            for (const int ai : adjacency_[node]) {
                const Arc& arc = arcs_[ai];
                if (!arc.active) continue;
                const int other = (node == arc.i) ? rows_ + arc.j : arc.i;
                if (seen[other]) continue;
                seen[other] = 1;
                parent_arc[other] = ai;
                parent_node[other] = node;
                queue.push_back(other);
            }
        }
        std::vector<int> path;  // arcs from start to goal
        for (int node = goal; node != start; node = parent_node[node])
            path.push_back(parent_arc[node]);
        std::reverse(path.begin(), path.end());

        double theta = std::numeric_limits<double>::infinity();
        int leaving = -1;
        for (std::size_t p = 0; p < path.size(); p += 2) {  // decreasing arcs
            const Arc& arc = arcs_[path[p]];
            if (arc.flow < theta) {
                theta = arc.flow;
                leaving = path[p];
            }
        }
        for (std::size_t p = 0; p < path.size(); ++p) {
            Arc& arc = arcs_[path[p]];
            arc.flow += (p % 2 == 0) ? -theta : theta;
        }
        arcs_[leaving].active = false;
        add_arc(ei, ej, theta);
    }

    Eigen::VectorXd a_, b_;
    Eigen::MatrixXd cost_;
    int rows_, cols_;
    std::vector<Arc> arcs_;
    std::vector<std::vector<int>> adjacency_;
    std::vector<double> u_, v_;
};

}  // namespace

double transport_cost(const Eigen::VectorXd& supply, const Eigen::VectorXd& demand,
                      const Eigen::MatrixXd& cost) {
    if (supply.size() == 0 || demand.size() == 0)
        throw std::invalid_argument("transport_cost: empty marginals");
    if (cost.rows() != supply.size() || cost.cols() != demand.size())
        throw std::invalid_argument("transport_cost: cost shape mismatch");
    if (supply.minCoeff() < 0.0 || demand.minCoeff() < 0.0)
        throw std::invalid_argument("transport_cost: negative masses");
    const double total_a = supply.sum();
    const double total_b = demand.sum();
    if (std::abs(total_a - total_b) > 1e-10 * std::max(1.0, std::abs(total_a)))
        throw std::invalid_argument("transport_cost: total masses differ");
    // Rescale the demand side so the balance is exact.
    Eigen::VectorXd b = demand * (total_a / total_b);
    TransportSimplex simplex(supply, b, cost);
    return simplex.solve();
}

double kr_distance(const AtomicYoungMeasure& mu, const AtomicYoungMeasure& nu) {
    if (mu.degree_bound() != nu.degree_bound() || mu.domain_dim() != nu.domain_dim() ||
        mu.target_dim() != nu.target_dim())
        throw std::invalid_argument("kr_distance: measures live on different jet spaces");
    const auto& atoms_a = mu.atoms();
    const auto& atoms_b = nu.atoms();
    if (atoms_a.size() > 10'000 || atoms_b.size() > 10'000)
        throw ResourceError("kr_distance: support exceeds 10^4 atoms");
    if (std::abs(mu.total_weight() - nu.total_weight()) >
        1e-10 * std::max(1.0, mu.total_weight()))
        throw std::invalid_argument("kr_distance: total masses differ");

    const int k = mu.degree_bound();
    std::vector<double> ra(atoms_a.size()), rb(atoms_b.size());
    for (std::size_t i = 0; i < atoms_a.size(); ++i) ra[i] = r_k(atoms_a[i].v, k);
    for (std::size_t j = 0; j < atoms_b.size(); ++j) rb[j] = r_k(atoms_b[j].v, k);

    Eigen::MatrixXd cost(atoms_a.size(), atoms_b.size());
    for (std::size_t i = 0; i < atoms_a.size(); ++i) {
        const auto& p = atoms_a[i];
        for (std::size_t j = 0; j < atoms_b.size(); ++j) {
            const auto& q = atoms_b[j];
            const double d2 = (p.t - q.t).squaredNorm() + (p.x - q.x).squaredNorm() +
                              (p.v - q.v).squaredNorm();
            cost(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                std::min(std::sqrt(d2), 1.0) + std::abs(rb[j] - ra[i]);
        }
    }
    Eigen::VectorXd supply(atoms_a.size()), demand(atoms_b.size());
    for (std::size_t i = 0; i < atoms_a.size(); ++i) supply[static_cast<Eigen::Index>(i)] = atoms_a[i].weight;
    for (std::size_t j = 0; j < atoms_b.size(); ++j) demand[static_cast<Eigen::Index>(j)] = atoms_b[j].weight;
    return transport_cost(supply, demand, cost);
}

}  // namespace polyvar::youngmeasure
