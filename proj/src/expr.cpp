#include "motslab/expr.hpp"

#include <cctype>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

namespace motslab::expr {

struct Expression::Node {
  enum class Kind { constant, variable, unary, binary, call2 } kind;
  double value = 0.0;
  std::string name;
  char op = 0;
  std::unique_ptr<Node> lhs, rhs;
  double (*fn1)(double) = nullptr;
  double (*fn2)(double, double) = nullptr;
};

namespace {

using Node = Expression::Node;
using NodePtr = std::unique_ptr<Node>;

struct Parser {
  const std::string& s;
  size_t pos = 0;

  explicit Parser(const std::string& text) : s(text) {}

  [[noreturn]] void fail(const std::string& what) const {
    throw std::invalid_argument("expression error at position " +
                                std::to_string(pos) + ": " + what + " in '" +
                                s + "'");
  }

  void skip_ws() {
    while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos])))
      ++pos;
  }

  bool consume(char c) {
    skip_ws();
    if (pos < s.size() && s[pos] == c) {
      ++pos;
      return true;
    }
    return false;
  }

  NodePtr parse() {
    auto n = parse_sum();
    skip_ws();
    if (pos != s.size()) fail("trailing input");
    return n;
  }

  NodePtr parse_sum() {
    auto lhs = parse_product();
    for (;;) {
      skip_ws();
      if (consume('+'))
        lhs = make_binary('+', std::move(lhs), parse_product());
      else if (consume('-'))
        lhs = make_binary('-', std::move(lhs), parse_product());
      else
        return lhs;
    }
  }

  NodePtr parse_product() {
    auto lhs = parse_unary();
    for (;;) {
      skip_ws();
      if (consume('*'))
        lhs = make_binary('*', std::move(lhs), parse_unary());
      else if (consume('/'))
        lhs = make_binary('/', std::move(lhs), parse_unary());
      else
        return lhs;
    }
  }

  NodePtr parse_unary() {
    skip_ws();
    if (consume('-')) {
      auto n = std::make_unique<Node>();
      n->kind = Node::Kind::unary;
      n->lhs = parse_unary();
      return n;
    }
    consume('+');
    return parse_power();
  }

  NodePtr parse_power() {
    auto base = parse_atom();
    skip_ws();
    if (consume('^'))
      return make_binary('^', std::move(base), parse_unary());
    return base;
  }

  NodePtr parse_atom() {
    skip_ws();
    if (pos >= s.size()) fail("unexpected end");
    const char c = s[pos];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      size_t used = 0;
      double v = std::stod(s.substr(pos), &used);
      pos += used;
      auto n = std::make_unique<Node>();
      n->kind = Node::Kind::constant;
      n->value = v;
      return n;
    }
    if (c == '(') {
      ++pos;
      auto n = parse_sum();
      if (!consume(')')) fail("missing ')'");
      return n;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      size_t start = pos;
      while (pos < s.size() && (std::isalnum(static_cast<unsigned char>(s[pos])) ||
                                s[pos] == '_'))
        ++pos;
      std::string name = s.substr(start, pos - start);
      skip_ws();
      if (pos < s.size() && s[pos] == '(') return parse_call(name);
      if (name == "pi") {
        auto n = std::make_unique<Node>();
        n->kind = Node::Kind::constant;
        n->value = 3.14159265358979323846;
        return n;
      }
      auto n = std::make_unique<Node>();
      n->kind = Node::Kind::variable;
      n->name = name;
      return n;
    }
    fail("unexpected character");
  }

  NodePtr parse_call(const std::string& name) {
    static const std::map<std::string, double (*)(double)> kFn1 = {
        {"sin", std::sin},   {"cos", std::cos},   {"tan", std::tan},
        {"exp", std::exp},   {"log", std::log},   {"sqrt", std::sqrt},
        {"sinh", std::sinh}, {"cosh", std::cosh}, {"tanh", std::tanh},
        {"abs", std::fabs},  {"asin", std::asin}, {"acos", std::acos},
        {"atan", std::atan}};
    static const std::map<std::string, double (*)(double, double)> kFn2 = {
        {"atan2", std::atan2},
        {"pow", std::pow},
        {"min", [](double a, double b) { return a < b ? a : b; }},
        {"max", [](double a, double b) { return a > b ? a : b; }}};
    consume('(');
    auto arg = parse_sum();
    if (auto it = kFn2.find(name); it != kFn2.end()) {
      if (!consume(',')) fail("expected second argument to " + name);
      auto arg2 = parse_sum();
      if (!consume(')')) fail("missing ')'");
      auto n = std::make_unique<Node>();
      n->kind = Node::Kind::call2;
      n->fn2 = it->second;
      n->lhs = std::move(arg);
      n->rhs = std::move(arg2);
      return n;
    }
    auto it = kFn1.find(name);
    if (it == kFn1.end()) fail("unknown function '" + name + "'");
    if (!consume(')')) fail("missing ')'");
    auto n = std::make_unique<Node>();
    n->kind = Node::Kind::unary;
    n->fn1 = it->second;
    n->lhs = std::move(arg);
    return n;
  }

  static NodePtr make_binary(char op, NodePtr lhs, NodePtr rhs) {
    auto n = std::make_unique<Node>();
    n->kind = Node::Kind::binary;
    n->op = op;
    n->lhs = std::move(lhs);
    n->rhs = std::move(rhs);
    return n;
  }
};

double eval_node(const Node& n, const std::map<std::string, double>& vars) {
  switch (n.kind) {
    case Node::Kind::constant:
      return n.value;
    case Node::Kind::variable: {
      auto it = vars.find(n.name);
      if (it == vars.end())
        throw std::invalid_argument("unknown variable '" + n.name + "'");
      return it->second;
    }
    case Node::Kind::unary: {
      const double v = eval_node(*n.lhs, vars);
      return n.fn1 ? n.fn1(v) : -v;
    }
    case Node::Kind::call2:
      return n.fn2(eval_node(*n.lhs, vars), eval_node(*n.rhs, vars));
    case Node::Kind::binary: {
      const double a = eval_node(*n.lhs, vars);
      const double b = eval_node(*n.rhs, vars);
      switch (n.op) {
        case '+': return a + b;
        case '-': return a - b;
        case '*': return a * b;
        case '/': return a / b;
        case '^': return std::pow(a, b);
      }
    }
  }
  throw std::logic_error("bad expression node");
}

}  // namespace

Expression::Expression(const std::string& text) : text_(text) {
  Parser p(text);
  root_ = p.parse();
}

Expression::~Expression() = default;
Expression::Expression(Expression&&) noexcept = default;
Expression& Expression::operator=(Expression&&) noexcept = default;

double Expression::eval(const std::map<std::string, double>& vars) const {
  return eval_node(*root_, vars);
}

}  // namespace motslab::expr
