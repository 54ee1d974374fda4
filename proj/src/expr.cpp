#include "lsurf/expr.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <numbers>

namespace lsurf {

ExprPtr Expr::make_number(double v, std::string name) {
  auto e = std::make_shared<Expr>();
  e->kind = Kind::Number;
  e->number = v;
  e->name = std::move(name);
  return e;
}

ExprPtr Expr::make_var(std::string name, int slot) {
  auto e = std::make_shared<Expr>();
  e->kind = Kind::Var;
  e->name = std::move(name);
  e->slot = slot;
  return e;
}

ExprPtr Expr::make_unary(Kind k, ExprPtr x) {
  auto e = std::make_shared<Expr>();
  e->kind = k;
  e->a = std::move(x);
  return e;
}

ExprPtr Expr::make_binary(Kind k, ExprPtr x, ExprPtr y) {
  auto e = std::make_shared<Expr>();
  e->kind = k;
  e->a = std::move(x);
  e->b = std::move(y);
  return e;
}

ExprPtr Expr::make_call(std::string fn, ExprPtr x) {
  auto e = std::make_shared<Expr>();
  e->kind = Kind::Call;
  e->name = std::move(fn);
  e->a = std::move(x);
  return e;
}

std::vector<VarBinding> chart_vars() {
  return {{"u", 0}, {"v", 1}, {"s", 0}, {"t", 1}};
}

std::vector<VarBinding> single_var(const std::string& name) {
  return {{name, 0}};
}

namespace {

struct Token {
  enum class Type { Number, Ident, Op, LParen, RParen, End };
  Type type;
  double number = 0;
  std::string text;
  size_t offset = 0;
};

class Lexer {
 public:
  explicit Lexer(const std::string& src) : src_(src) { advance(); }

  const Token& peek() const { return tok_; }

  Token take() {
    Token t = tok_;
    advance();
    return t;
  }

 private:
  void advance() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    tok_.offset = pos_;
    if (pos_ >= src_.size()) {
      tok_.type = Token::Type::End;
      tok_.text = "";
      return;
    }
    char c = src_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) ||
        (c == '.' && pos_ + 1 < src_.size() &&
         std::isdigit(static_cast<unsigned char>(src_[pos_ + 1])))) {
      size_t end = pos_;
      while (end < src_.size() &&
             (std::isdigit(static_cast<unsigned char>(src_[end])) || src_[end] == '.'))
        ++end;
      if (end < src_.size() && (src_[end] == 'e' || src_[end] == 'E')) {
        size_t e = end + 1;
        if (e < src_.size() && (src_[e] == '+' || src_[e] == '-')) ++e;
        if (e < src_.size() && std::isdigit(static_cast<unsigned char>(src_[e]))) {
          ++e;
          while (e < src_.size() && std::isdigit(static_cast<unsigned char>(src_[e]))) ++e;
          end = e;
        }
      }
      std::string text = src_.substr(pos_, end - pos_);
      char* stop = nullptr;
      double v = std::strtod(text.c_str(), &stop);
      if (stop != text.c_str() + text.size())
        throw Error(ErrorCode::SyntaxError, "malformed number")
            .with("offset", static_cast<double>(pos_))
            .with("token", text);
      tok_.type = Token::Type::Number;
      tok_.number = v;
      tok_.text = text;
      pos_ = end;
      return;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      size_t end = pos_;
      while (end < src_.size() &&
             (std::isalnum(static_cast<unsigned char>(src_[end])) || src_[end] == '_'))
        ++end;
      tok_.type = Token::Type::Ident;
      tok_.text = src_.substr(pos_, end - pos_);
      pos_ = end;
      return;
    }
    if (c == '(') {
      tok_.type = Token::Type::LParen;
      tok_.text = "(";
      ++pos_;
      return;
    }
    if (c == ')') {
      tok_.type = Token::Type::RParen;
      tok_.text = ")";
      ++pos_;
      return;
    }
    if (c == '+' || c == '-' || c == '*' || c == '/' || c == '^') {
      tok_.type = Token::Type::Op;
      tok_.text = std::string(1, c);
      ++pos_;
      return;
    }
    throw Error(ErrorCode::SyntaxError, "unexpected character")
        .with("offset", static_cast<double>(pos_))
        .with("character", std::string(1, c));
  }

  const std::string& src_;
  size_t pos_ = 0;
  Token tok_;
};

bool is_function(const std::string& name) {
  return name == "exp" || name == "log" || name == "sqrt" || name == "sin" ||
         name == "cos";
}

class Parser {
 public:
  Parser(const std::string& src, const std::vector<VarBinding>& vars)
      : lex_(src), vars_(vars) {}

  ExprPtr run() {
    ExprPtr e = expr();
    const Token& t = lex_.peek();
    if (t.type != Token::Type::End)
      throw Error(ErrorCode::SyntaxError, "trailing input after expression")
          .with("offset", static_cast<double>(t.offset))
          .with("token", t.text);
    return e;
  }

 private:
  ExprPtr expr() {
    ExprPtr lhs = term();
    while (lex_.peek().type == Token::Type::Op &&
           (lex_.peek().text == "+" || lex_.peek().text == "-")) {
      std::string op = lex_.take().text;
      ExprPtr rhs = term();
      lhs = Expr::make_binary(op == "+" ? Expr::Kind::Add : Expr::Kind::Sub,
                              std::move(lhs), std::move(rhs));
    }
    return lhs;
  }

  ExprPtr term() {
    ExprPtr lhs = unary();
    while (lex_.peek().type == Token::Type::Op &&
           (lex_.peek().text == "*" || lex_.peek().text == "/")) {
      std::string op = lex_.take().text;
      ExprPtr rhs = unary();
      lhs = Expr::make_binary(op == "*" ? Expr::Kind::Mul : Expr::Kind::Div,
                              std::move(lhs), std::move(rhs));
    }
    return lhs;
  }

  ExprPtr unary() {
    if (lex_.peek().type == Token::Type::Op && lex_.peek().text == "-") {
      lex_.take();
      return Expr::make_unary(Expr::Kind::Neg, unary());
    }
    return power();
  }

  ExprPtr power() {
    ExprPtr base = atom();
    if (lex_.peek().type == Token::Type::Op && lex_.peek().text == "^") {
      lex_.take();
      // Right-associative; the exponent may start with a unary minus.
      return Expr::make_binary(Expr::Kind::Pow, std::move(base), unary());
    }
    return base;
  }

  ExprPtr atom() {
    Token t = lex_.take();
    switch (t.type) {
      case Token::Type::Number:
        return Expr::make_number(t.number);
      case Token::Type::LParen: {
        ExprPtr inner = expr();
        Token close = lex_.take();
        if (close.type != Token::Type::RParen)
          throw Error(ErrorCode::SyntaxError, "expected ')'")
              .with("offset", static_cast<double>(close.offset));
        return inner;
      }
      case Token::Type::Ident: {
        if (lex_.peek().type == Token::Type::LParen) {
          if (!is_function(t.text))
            throw Error(ErrorCode::UnknownIdentifier, "unknown function")
                .with("offset", static_cast<double>(t.offset))
                .with("name", t.text);
          lex_.take();
          ExprPtr arg = expr();
          Token close = lex_.take();
          if (close.type != Token::Type::RParen)
            throw Error(ErrorCode::SyntaxError, "expected ')' after argument")
                .with("offset", static_cast<double>(close.offset));
          return Expr::make_call(t.text, std::move(arg));
        }
        if (t.text == "pi")
          return Expr::make_number(std::numbers::pi, "pi");
        if (t.text == "e")
          return Expr::make_number(std::numbers::e, "e");
        for (const auto& b : vars_)
          if (b.name == t.text) return Expr::make_var(t.text, b.slot);
        throw Error(ErrorCode::UnknownIdentifier, "unknown identifier")
            .with("offset", static_cast<double>(t.offset))
            .with("name", t.text);
      }
      default:
        throw Error(ErrorCode::SyntaxError, "expected a value")
            .with("offset", static_cast<double>(t.offset))
            .with("token", t.text);
    }
  }

  Lexer lex_;
  const std::vector<VarBinding>& vars_;
};

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

ExprPtr parse_expr(const std::string& src, const std::vector<VarBinding>& vars) {
  return Parser(src, vars).run();
}

ExprPtr parse_expr(const std::string& src) {
  auto vars = chart_vars();
  return Parser(src, vars).run();
}

std::string print_expr(const ExprPtr& e) {
  switch (e->kind) {
    case Expr::Kind::Number:
      return e->name.empty() ? format_number(e->number) : e->name;
    case Expr::Kind::Var:
      return e->name;
    case Expr::Kind::Neg:
      return "(-" + print_expr(e->a) + ")";
    case Expr::Kind::Add:
      return "(" + print_expr(e->a) + " + " + print_expr(e->b) + ")";
    case Expr::Kind::Sub:
      return "(" + print_expr(e->a) + " - " + print_expr(e->b) + ")";
    case Expr::Kind::Mul:
      return "(" + print_expr(e->a) + " * " + print_expr(e->b) + ")";
    case Expr::Kind::Div:
      return "(" + print_expr(e->a) + " / " + print_expr(e->b) + ")";
    case Expr::Kind::Pow:
      return "(" + print_expr(e->a) + " ^ " + print_expr(e->b) + ")";
    case Expr::Kind::Call:
      return e->name + "(" + print_expr(e->a) + ")";
  }
  return "";
}

bool expr_equal(const ExprPtr& a, const ExprPtr& b) {
  if (a->kind != b->kind) return false;
  switch (a->kind) {
    case Expr::Kind::Number:
      return a->number == b->number && a->name == b->name;
    case Expr::Kind::Var:
      return a->name == b->name && a->slot == b->slot;
    case Expr::Kind::Neg:
      return expr_equal(a->a, b->a);
    case Expr::Kind::Call:
      return a->name == b->name && expr_equal(a->a, b->a);
    default:
      return expr_equal(a->a, b->a) && expr_equal(a->b, b->b);
  }
}

bool expr_is_constant(const ExprPtr& e) {
  switch (e->kind) {
    case Expr::Kind::Number:
      return true;
    case Expr::Kind::Var:
      return false;
    case Expr::Kind::Neg:
    case Expr::Kind::Call:
      return expr_is_constant(e->a);
    default:
      return expr_is_constant(e->a) && expr_is_constant(e->b);
  }
}

namespace {

double call_value(const std::string& fn, double x) {
  if (fn == "exp") return std::exp(x);
  if (fn == "log") {
    if (!(x > 0))
      throw Error(ErrorCode::DomainError, "log requires a positive argument")
          .with("argument", x);
    return std::log(x);
  }
  if (fn == "sqrt") {
    if (!(x > 0))
      throw Error(ErrorCode::DomainError, "sqrt requires a positive argument")
          .with("argument", x);
    return std::sqrt(x);
  }
  if (fn == "sin") return std::sin(x);
  return std::cos(x);
}

Jet call_jet(const std::string& fn, const Jet& x) {
  if (fn == "exp") return exp(x);
  if (fn == "log") return log(x);
  if (fn == "sqrt") return sqrt(x);
  if (fn == "sin") return sin(x);
  return cos(x);
}

double pow_value(double base, double r) {
  double rr = std::round(r);
  if (rr == r && std::abs(rr) <= 32) {
    int n = static_cast<int>(rr);
    if (n == 0) return 1.0;
    double acc = 1.0;
    for (int k = 0; k < std::abs(n); ++k) acc *= base;
    if (n < 0) {
      if (std::abs(acc) < 1e-300)
        throw Error(ErrorCode::DomainError, "negative power of zero");
      acc = 1.0 / acc;
    }
    return acc;
  }
  if (!(base > 0))
    throw Error(ErrorCode::DomainError,
                "fractional power requires a positive base")
        .with("base", base)
        .with("exponent", r);
  return std::pow(base, r);
}

}  // namespace

double eval_value(const ExprPtr& e, double p0, double p1) {
  switch (e->kind) {
    case Expr::Kind::Number:
      return e->number;
    case Expr::Kind::Var:
      return e->slot == 0 ? p0 : p1;
    case Expr::Kind::Neg:
      return -eval_value(e->a, p0, p1);
    case Expr::Kind::Add:
      return eval_value(e->a, p0, p1) + eval_value(e->b, p0, p1);
    case Expr::Kind::Sub:
      return eval_value(e->a, p0, p1) - eval_value(e->b, p0, p1);
    case Expr::Kind::Mul:
      return eval_value(e->a, p0, p1) * eval_value(e->b, p0, p1);
    case Expr::Kind::Div: {
      double den = eval_value(e->b, p0, p1);
      if (std::abs(den) < 1e-300)
        throw Error(ErrorCode::DomainError, "division by zero");
      return eval_value(e->a, p0, p1) / den;
    }
    case Expr::Kind::Pow: {
      if (expr_is_constant(e->b))
        return pow_value(eval_value(e->a, p0, p1), eval_value(e->b, 0, 0));
      double base = eval_value(e->a, p0, p1);
      if (!(base > 0))
        throw Error(ErrorCode::DomainError,
                    "variable exponent requires a positive base")
            .with("base", base);
      return std::exp(eval_value(e->b, p0, p1) * std::log(base));
    }
    case Expr::Kind::Call:
      return call_value(e->name, eval_value(e->a, p0, p1));
  }
  return 0;
}

Jet eval_jet(const ExprPtr& e, const Jet& p0, const Jet& p1) {
  switch (e->kind) {
    case Expr::Kind::Number:
      return Jet::constant(e->number);
    case Expr::Kind::Var:
      return e->slot == 0 ? p0 : p1;
    case Expr::Kind::Neg:
      return -eval_jet(e->a, p0, p1);
    case Expr::Kind::Add:
      return eval_jet(e->a, p0, p1) + eval_jet(e->b, p0, p1);
    case Expr::Kind::Sub:
      return eval_jet(e->a, p0, p1) - eval_jet(e->b, p0, p1);
    case Expr::Kind::Mul:
      return eval_jet(e->a, p0, p1) * eval_jet(e->b, p0, p1);
    case Expr::Kind::Div:
      return eval_jet(e->a, p0, p1) / eval_jet(e->b, p0, p1);
    case Expr::Kind::Pow: {
      Jet base = eval_jet(e->a, p0, p1);
      if (expr_is_constant(e->b)) return pow(base, eval_value(e->b, 0, 0));
      return exp(eval_jet(e->b, p0, p1) * log(base));
    }
    case Expr::Kind::Call:
      return call_jet(e->name, eval_jet(e->a, p0, p1));
  }
  return Jet::constant(0);
}

Jet eval_jet(const ExprPtr& e, double p0, double p1, int order) {
  return eval_jet(e, Jet::variable(p0, 0, order), Jet::variable(p1, 1, order));
}

}  // namespace lsurf
