#pragma once

#include "fraclap/types.hpp"

namespace fraclap {

/// Complex Gamma function, Lanczos approximation with reflection on the left
/// half-plane. Throws DomainError at the poles (nonpositive integers).
Complex complex_gamma(Complex z);

}  // namespace fraclap
