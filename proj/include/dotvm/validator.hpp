#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "dotvm/ast.hpp"
#include "dotvm/taint.hpp"

namespace dotvm {

class ValidationError : public std::runtime_error {
 public:
  enum class Rule {
    Rule1Downgrade,
    Rule3PseudonymToUnsafe,
    UndefinedOperand,
    DimensionMismatch,
    DatasetUnknown,
    LoopBoundTainted,
    IllegalConstruct,
  };

  ValidationError(Rule rule, int instr_index, int line, const std::string& message);

  Rule rule() const { return rule_; }
  // Preorder position of the offending instruction (loop bodies included).
  int instr_index() const { return instr_index_; }
  int line() const { return line_; }
  const std::string& message() const { return message_; }

 private:
  Rule rule_;
  int instr_index_;
  int line_;
  std::string message_;
};

std::string_view to_string(ValidationError::Rule rule);

struct MatrixInfo {
  Dims dims;
  Taint taint = Taint::Concrete;
  bool is_const = false;
  friend bool operator==(const MatrixInfo&, const MatrixInfo&) = default;
};

struct TaintedProgram {
  Program program;
  // Taint of the value each instruction writes, in preorder. Loops are
  // Concrete.
  std::vector<Taint> instr_taints;
  // State after the last instruction.
  std::map<int, MatrixInfo> matrices;
  std::map<int, Taint> registers;
};

// Checks DOT semantics against declared dataset shapes. Throws
// ValidationError on the first violation; never looks at data.
TaintedProgram validate(const Program& program, const std::map<std::string, Dims>& datasets);

// Validates against the program's own dataset declarations.
TaintedProgram validate(const Program& program);

// Number of iterations of `for k = from; k <= to (or >=); k += step`.
std::int64_t iteration_count(std::int64_t from, std::int64_t to, std::int64_t step);

}  // namespace dotvm
