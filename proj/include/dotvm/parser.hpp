#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

#include "dotvm/ast.hpp"

namespace dotvm {

class ParseError : public std::runtime_error {
 public:
  enum class Kind { Lex, Syntax, Framing };

  ParseError(Kind kind, int line, int column, const std::string& message);

  Kind kind() const { return kind_; }
  int line() const { return line_; }
  int column() const { return column_; }
  const std::string& message() const { return message_; }

 private:
  Kind kind_;
  int line_;
  int column_;
  std::string message_;
};

std::string_view to_string(ParseError::Kind kind);

// Parses DOT text. Throws ParseError on the first lexical, syntactic or
// framing violation.
Program parse(std::string_view text);

// Canonical DOT text; parse(print(p)) == p for every well-formed p.
std::string print(const Program& program);

std::string print_operand(const Operand& o);
std::string print_seq(const Seq& s);

}  // namespace dotvm
