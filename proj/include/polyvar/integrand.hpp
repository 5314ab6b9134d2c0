#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "polyvar/common.hpp"
#include "polyvar/exterior.hpp"

namespace polyvar::variational {

// Entry l-1 holds the l-th wedge power of the gradient; entry 0 is the
// gradient itself. Degrees above min(m,n) would be identically zero and are
// not stored.
using MinorTuple = std::vector<Eigen::MatrixXd>;

MinorTuple minor_tuple(const Eigen::MatrixXd& v, int k);

struct IntegrandGradient {
    Eigen::VectorXd dx;
    std::vector<Eigen::MatrixXd> dv;  // one block per stored minor degree
};

// Integrand L(t,x,v) presented through its lifted form on the minor tuple,
// with values in R union {+inf}. NaN is never a legal value.
struct IntegrandSpec {
    int k = 1;
    int domain_dim = 2;
    int target_dim = 2;
    std::function<double(const Eigen::VectorXd&, const Eigen::VectorXd&, const MinorTuple&)> value;
    std::function<IntegrandGradient(const Eigen::VectorXd&, const Eigen::VectorXd&,
                                    const MinorTuple&)>
        gradient;                         // optional
    std::function<double(double)> witness;  // claimed superlinear envelope l(s)

    bool has_gradient() const { return static_cast<bool>(gradient); }

    double evaluate(const Eigen::VectorXd& t, const Eigen::VectorXd& x,
                    const MinorTuple& minors) const;
    double evaluate_jet(const Eigen::VectorXd& t, const Eigen::VectorXd& x,
                        const Eigen::MatrixXd& v) const;
};

// Compares the declared gradient against central finite differences on
// random finite-value jets; throws EvaluationError on mismatch.
void validate_integrand_gradient(const IntegrandSpec& L, std::uint64_t seed, int trials,
                                 double tol = 1e-5);

}  // namespace polyvar::variational
