#pragma once

// Transcendental kernels shared by fixed.cpp and fixed_math.cpp. None of
// these record a leaf op; the public entry points do.

#include "dotvm/fixed.hpp"

namespace dotvm::fixed::impl {

FixedScalar sqrt(FixedScalar a);
FixedScalar exp(FixedScalar a);
FixedScalar log(FixedScalar a);
FixedScalar sin(FixedScalar a);
FixedScalar cos(FixedScalar a);
FixedScalar tan(FixedScalar a);
FixedScalar pow(FixedScalar a, FixedScalar b);

}  // namespace dotvm::fixed::impl
