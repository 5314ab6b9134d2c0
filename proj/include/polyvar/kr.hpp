#pragma once

#include <Eigen/Dense>

#include "polyvar/youngmeasure.hpp"

namespace polyvar::youngmeasure {

// Exact transportation simplex (dense network simplex on the bipartite
// supply/demand graph). Supplies and demands must balance within 1e-10.
double transport_cost(const Eigen::VectorXd& supply, const Eigen::VectorXd& demand,
                      const Eigen::MatrixXd& cost);

// Kantorovich-Rubinstein distance of two atomic measures under the ground
// metric d_r(p,q) = min(d(p,q), 1) + |r_k(q) - r_k(p)|, where d is the
// Euclidean metric on flattened (t,x,v) and r_k the jet weight.
double kr_distance(const AtomicYoungMeasure& mu, const AtomicYoungMeasure& nu);

}  // namespace polyvar::youngmeasure
