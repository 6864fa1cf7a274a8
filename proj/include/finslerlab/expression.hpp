#pragma once

// Small arithmetic expression language for metric parameters, e.g.
// "0.3*sin(x2)" or "(1+s)^2". Expressions evaluate generically, so the same
// tree yields plain values (double) or full expansions (Taylor).

#include <cctype>
#include <cmath>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "finslerlab/error.hpp"
#include "finslerlab/taylor.hpp"

namespace finslerlab {

class Expression {
 public:
  Expression() : Expression(0.0) {}
  explicit Expression(double constant) : source_(format_number(constant)) {
    root_ = std::make_shared<Node>(Node{Op::kConstant, constant, -1, {}});
  }

  // Parses `source`; identifiers listed in `variables` bind to argument
  // positions of eval().
  static Expression parse(const std::string& source, const std::vector<std::string>& variables) {
    Parser p{source, variables, 0};
    Expression e;
    e.source_ = source;
    e.root_ = p.parse_expression();
    p.skip_space();
    if (p.pos != source.size()) p.fail("unexpected trailing input");
    return e;
  }

  const std::string& source() const { return source_; }

  bool is_constant() const { return !depends_on_any(*root_); }

  bool depends_on(int variable) const { return depends_on_var(*root_, variable); }

  template <class T>
  T eval(std::span<const T> vars) const {
    return eval_node<T>(*root_, vars);
  }

  double eval(std::span<const double> vars) const { return eval_node<double>(*root_, vars); }

 private:
  enum class Op { kConstant, kVariable, kAdd, kSub, kMul, kDiv, kNeg, kPow, kCall };
  enum Func { kSin, kCos, kTan, kExp, kLog, kSqrt, kSinh, kCosh, kAtan };

  struct Node {
    Op op;
    double value;
    int index;  // variable slot or function id
    std::vector<std::shared_ptr<Node>> args;
  };

  static std::string format_number(double v) {
    std::string s = std::to_string(v);
    return s;
  }

  static bool depends_on_any(const Node& n) {
    if (n.op == Op::kVariable) return true;
    for (const auto& a : n.args)
      if (depends_on_any(*a)) return true;
    return false;
  }

  static bool depends_on_var(const Node& n, int v) {
    if (n.op == Op::kVariable) return n.index == v;
    for (const auto& a : n.args)
      if (depends_on_var(*a, v)) return true;
    return false;
  }

  template <class T>
  static T eval_node(const Node& n, std::span<const T> vars) {
    using std::atan;
    using std::cos;
    using std::cosh;
    using std::exp;
    using std::log;
    using std::pow;
    using std::sin;
    using std::sinh;
    using std::sqrt;
    using std::tan;
    switch (n.op) {
      case Op::kConstant:
        return T(n.value);
      case Op::kVariable:
        if (static_cast<std::size_t>(n.index) >= vars.size()) throw Error("expression: missing variable value");
        return vars[static_cast<std::size_t>(n.index)];
      case Op::kAdd:
        return eval_node<T>(*n.args[0], vars) + eval_node<T>(*n.args[1], vars);
      case Op::kSub:
        return eval_node<T>(*n.args[0], vars) - eval_node<T>(*n.args[1], vars);
      case Op::kMul:
        return eval_node<T>(*n.args[0], vars) * eval_node<T>(*n.args[1], vars);
      case Op::kDiv:
        return eval_node<T>(*n.args[0], vars) / eval_node<T>(*n.args[1], vars);
      case Op::kNeg:
        return -eval_node<T>(*n.args[0], vars);
      case Op::kPow: {
        const Node& exponent = *n.args[1];
        T base = eval_node<T>(*n.args[0], vars);
        if (exponent.op == Op::kConstant) {
          double p = exponent.value;
          if (p == std::round(p) && std::abs(p) <= 64) return ipow(base, static_cast<int>(p));
          return pow(base, p);
        }
        return exp(eval_node<T>(exponent, vars) * log(base));
      }
      case Op::kCall: {
        T a = eval_node<T>(*n.args[0], vars);
        switch (n.index) {
          case kSin: return sin(a);
          case kCos: return cos(a);
          case kTan: return tan(a);
          case kExp: return exp(a);
          case kLog: return log(a);
          case kSqrt: return sqrt(a);
          case kSinh: return sinh(a);
          case kCosh: return cosh(a);
          case kAtan: return atan(a);
          default: break;
        }
        break;
      }
    }
    throw Error("expression: corrupt tree");
  }

  template <class T>
  static T ipow(const T& base, int p) {
    if constexpr (std::is_same_v<T, double>) {
      return std::pow(base, p);
    } else {
      return pow(base, p);
    }
  }

  struct Parser {
    const std::string& src;
    const std::vector<std::string>& variables;
    std::size_t pos;

    [[noreturn]] void fail(const std::string& msg) const {
      throw ConfigError("expression '" + src + "': " + msg + " at offset " + std::to_string(pos));
    }

    void skip_space() {
      while (pos < src.size() && std::isspace(static_cast<unsigned char>(src[pos]))) ++pos;
    }

    bool accept(char c) {
      skip_space();
      if (pos < src.size() && src[pos] == c) {
        ++pos;
        return true;
      }
      return false;
    }

    static std::shared_ptr<Node> make(Op op, std::vector<std::shared_ptr<Node>> args, int index = -1) {
      return std::make_shared<Node>(Node{op, 0.0, index, std::move(args)});
    }

    std::shared_ptr<Node> parse_expression() {
      auto lhs = parse_term();
      for (;;) {
        if (accept('+')) {
          lhs = make(Op::kAdd, {lhs, parse_term()});
        } else if (accept('-')) {
          lhs = make(Op::kSub, {lhs, parse_term()});
        } else {
          return lhs;
        }
      }
    }

    std::shared_ptr<Node> parse_term() {
      auto lhs = parse_unary();
      for (;;) {
        if (accept('*')) {
          lhs = make(Op::kMul, {lhs, parse_unary()});
        } else if (accept('/')) {
          lhs = make(Op::kDiv, {lhs, parse_unary()});
        } else {
          return lhs;
        }
      }
    }

    std::shared_ptr<Node> parse_unary() {
      if (accept('-')) return make(Op::kNeg, {parse_unary()});
      if (accept('+')) return parse_unary();
      return parse_power();
    }

    std::shared_ptr<Node> parse_power() {
      auto base = parse_primary();
      if (accept('^')) return make(Op::kPow, {base, parse_unary()});
      return base;
    }

    std::shared_ptr<Node> parse_primary() {
      skip_space();
      if (pos >= src.size()) fail("unexpected end of input");
      char c = src[pos];
      if (c == '(') {
        ++pos;
        auto e = parse_expression();
        if (!accept(')')) fail("expected ')'");
        return e;
      }
      if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
        std::size_t used = 0;
        double v = 0.0;
        try {
          v = std::stod(src.substr(pos), &used);
        } catch (const std::exception&) {
          fail("malformed number");
        }
        pos += used;
        return std::make_shared<Node>(Node{Op::kConstant, v, -1, {}});
      }
      if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
        std::size_t start = pos;
        while (pos < src.size() && (std::isalnum(static_cast<unsigned char>(src[pos])) || src[pos] == '_')) ++pos;
        std::string name = src.substr(start, pos - start);
        if (accept('(')) {
          int f = function_id(name);
          if (name == "pow") {
            auto a = parse_expression();
            if (!accept(',')) fail("pow expects two arguments");
            auto b = parse_expression();
            if (!accept(')')) fail("expected ')'");
            return make(Op::kPow, {a, b});
          }
          if (f < 0) fail("unknown function '" + name + "'");
          auto arg = parse_expression();
          if (!accept(')')) fail("expected ')'");
          return make(Op::kCall, {arg}, f);
        }
        for (std::size_t i = 0; i < variables.size(); ++i) {
          if (variables[i] == name) return std::make_shared<Node>(Node{Op::kVariable, 0.0, static_cast<int>(i), {}});
        }
        if (name == "pi") return std::make_shared<Node>(Node{Op::kConstant, M_PI, -1, {}});
        fail("unknown identifier '" + name + "'");
      }
      fail(std::string("unexpected character '") + c + "'");
    }

    static int function_id(const std::string& name) {
      static const std::pair<const char*, int> table[] = {
          {"sin", kSin},   {"cos", kCos},   {"tan", kTan},   {"exp", kExp},  {"log", kLog},
          {"sqrt", kSqrt}, {"sinh", kSinh}, {"cosh", kCosh}, {"atan", kAtan}, {"pow", -2}};
      for (const auto& [n, id] : table)
        if (name == n) return id;
      return -1;
    }
  };

  std::string source_;
  std::shared_ptr<const Node> root_;
};

}  // namespace finslerlab
