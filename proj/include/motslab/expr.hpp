#pragma once

#include <map>
#include <memory>
#include <string>

namespace motslab::expr {

/// Compiled scalar expression over named variables.
///
/// Grammar: numbers, identifiers, + - * / ^, parentheses, unary minus,
/// calls of one-argument functions (sin cos tan exp log sqrt sinh cosh
/// tanh abs, atan2/pow/min/max with two arguments) and the constant pi.
class Expression {
 public:
  /// Throws std::invalid_argument with position info on parse errors.
  explicit Expression(const std::string& text);
  ~Expression();
  Expression(Expression&&) noexcept;
  Expression& operator=(Expression&&) noexcept;

  /// Evaluate with variable bindings; unknown variables throw.
  double eval(const std::map<std::string, double>& vars) const;

  const std::string& text() const { return text_; }

  struct Node;

 private:
  std::unique_ptr<Node> root_;
  std::string text_;
};

}  // namespace motslab::expr
