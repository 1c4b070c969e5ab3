#include "summands/expr.hpp"

#include <cctype>

namespace summands {

void skip_space(std::string_view text, size_t& pos) {
  while (pos < text.size()) {
    char c = text[pos];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++pos;
    } else if (c == '#') {
      while (pos < text.size() && text[pos] != '\n') ++pos;
    } else {
      break;
    }
  }
}

namespace {

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }
bool digit(char c) { return std::isdigit(static_cast<unsigned char>(c)); }

class Reader {
 public:
  Reader(const Ring& r, std::string_view t, size_t& p, bool implicit) : R(r), text(t), pos(p), implicit_(implicit) {}

  Poly expr() {
    skip_space(text, pos);
    bool negate = false;
    if (peek() == '+' || peek() == '-') {
      negate = peek() == '-';
      ++pos;
    }
    Poly acc = term();
    if (negate) acc = R.neg(acc);
    for (;;) {
      skip_space(text, pos);
      char c = peek();
      if (c != '+' && c != '-') break;
      ++pos;
      Poly t = term();
      acc = c == '+' ? R.add(acc, t) : R.sub(acc, t);
    }
    return acc;
  }

 private:
  char peek() const { return pos < text.size() ? text[pos] : '\0'; }

  [[noreturn]] void error(const std::string& msg, ErrorCode code = ErrorCode::SyntaxError) const {
    throw ParseError(code, pos, msg);
  }

  Poly term() {
    Poly acc = factor();
    for (;;) {
      size_t save = pos;
      skip_space(text, pos);
      char c = peek();
      if (c == '*') {
        ++pos;
        acc = R.mul(acc, factor());
      } else if (c == '/') {
        ++pos;
        skip_space(text, pos);
        if (!digit(peek())) error("division is only allowed by integer constants");
        mpz_class d = integer();
        if (d == 0) error("division by zero", ErrorCode::DivisionByZero);
        acc = R.scale(acc, R.field()->inv(R.field()->from_mpz(d)));
      } else if (ident_start(c) || digit(c) || c == '(') {
        if (!implicit_) error(std::string("missing '*' before '") + c + "'");
        acc = R.mul(acc, factor());
      } else {
        pos = save;
        break;
      }
    }
    return acc;
  }

  Poly factor() {
    Poly b = base();
    size_t save = pos;
    skip_space(text, pos);
    if (peek() != '^') {
      pos = save;
      return b;
    }
    ++pos;
    skip_space(text, pos);
    if (!digit(peek())) error("exponent must be a nonnegative integer");
    mpz_class e = integer();
    if (e > 0xffff) error("exponent too large", ErrorCode::ResourceLimit);
    return R.pow(b, unsigned(e.get_ui()));
  }

  mpz_class integer() {
    size_t start = pos;
    while (digit(peek())) ++pos;
    return mpz_class(std::string(text.substr(start, pos - start)));
  }

  Poly base() {
    skip_space(text, pos);
    char c = peek();
    if (digit(c)) return R.constant(R.field()->from_mpz(integer()));
    if (c == '(') {
      ++pos;
      Poly inner = expr();
      skip_space(text, pos);
      if (peek() != ')') error("expected ')'");
      ++pos;
      return inner;
    }
    if (ident_start(c)) {
      size_t start = pos;
      while (ident_char(peek())) ++pos;
      std::string name(text.substr(start, pos - start));
      const auto& vars = R.variables();
      for (size_t i = 0; i < vars.size(); ++i)
        if (vars[i] == name) return R.variable(i);
      const Field& F = *R.field();
      if (F.degree() > 1 && name == F.generator_name()) return R.constant(F.generator());
      pos = start;
      error("unknown identifier '" + name + "'", ErrorCode::SemanticError);
    }
    if (c == '\0') error("unexpected end of input");
    error(std::string("unexpected '") + c + "'");
  }

  const Ring& R;
  std::string_view text;
  size_t& pos;
  bool implicit_;
};

}  // namespace

Poly parse_expression(const Ring& ring, std::string_view text, size_t& pos, bool implicit_mult) {
  Reader r(ring, text, pos, implicit_mult);
  return r.expr();
}

Poly parse_poly(const Ring& ring, std::string_view text, bool implicit_mult) {
  size_t pos = 0;
  Poly f = parse_expression(ring, text, pos, implicit_mult);
  skip_space(text, pos);
  if (pos != text.size()) throw ParseError(ErrorCode::SyntaxError, pos, "unexpected trailing input");
  return f;
}

}  // namespace summands
