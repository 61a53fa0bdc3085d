#pragma once

#include <optional>

#include "liectrl/types.hpp"

namespace liectrl {

/// Matrix exponential, scaling-and-squaring with a degree-13 Padé approximant.
Mat expm(const Mat& a);

/// Principal matrix logarithm via inverse scaling-and-squaring. Returns
/// nullopt when the principal branch is ill-conditioned: an eigenvalue at
/// zero or with argument beyond `max_angle` (default 0.95*pi).
std::optional<Mat> logm_principal(const Mat& a, double max_angle = 0.95 * M_PI);

/// Nearest orthogonal matrix (polar factor).
Mat polar_orthogonal(const Mat& a);

}  // namespace liectrl
