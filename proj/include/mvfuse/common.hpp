#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>
#include <vector>

namespace mvfuse {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Cluster assignment, one id per node.
using Labels = std::vector<int>;

/// Inputs whose dimensions disagree (view counts, node counts, vector lengths).
class ShapeError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Numerical routine failed to reach its tolerance.
class ConvergenceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline void require_shape(bool ok, const std::string& what) {
    if (!ok) throw ShapeError(what);
}

inline void require(bool ok, const std::string& what) {
    if (!ok) throw std::invalid_argument(what);
}

} // namespace mvfuse
