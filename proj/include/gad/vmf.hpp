#pragma once

#include "gad/geometry.hpp"
#include "gad/rng.hpp"

namespace gad {

// Draw from the von Mises-Fisher distribution on S^3 with the given mean
// direction and concentration kappa, via Wood's rejection scheme (beta
// envelope for the mean-direction cosine, uniform tangent direction).
// kappa = 0 degenerates to the uniform distribution on S^3.
UnitQuat vmf_sample(const UnitQuat& mean, double kappa, Rng& rng);

}  // namespace gad
