#pragma once

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace fraclap {

using Index = Eigen::Index;
using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXd;
using CMatrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXd;
using CVector = Eigen::VectorXcd;

/// Invalid argument or a request outside an operation's stated domain.
struct DomainError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A numerical routine failed to reach its tolerance.
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Malformed configuration or command line.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace fraclap
