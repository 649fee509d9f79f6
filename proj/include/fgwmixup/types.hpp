#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace fgw {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Raised on malformed inputs: dimension mismatches, invalid measures, bad files.
class DataError : public std::runtime_error {
public:
    explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

/// Raised when a solver cannot make progress (e.g. a row of the plan cannot be scaled).
class SolverError : public std::runtime_error {
public:
    explicit SolverError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace fgw
