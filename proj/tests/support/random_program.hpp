#pragma once

#include <random>

#include "dotvm/ast.hpp"

namespace dotvm::testing {

// A syntactically well-formed program covering every instruction form,
// operand kind and seq kind. Not necessarily valid (ids may be undefined).
Program random_program(std::mt19937_64& rng);

}  // namespace dotvm::testing
