#include "symflow/parse.hpp"

#include <cctype>
#include <optional>
#include <string>
#include <vector>

namespace symflow {

namespace {

enum class Tok { Number, Ident, Plus, Minus, Star, Slash, Caret, LParen, RParen, End };

struct Token {
  Tok kind;
  std::size_t offset;
  std::string text;
};

Rational decimal_to_rational(std::string_view digits, std::size_t offset) {
  // digits: [0-9]*(.[0-9]*)?([eE][+-]?[0-9]+)?
  std::string mantissa;
  long exponent = 0;
  std::size_t i = 0;
  bool seen_digit = false;
  for (; i < digits.size() && std::isdigit(static_cast<unsigned char>(digits[i])); ++i) {
    mantissa += digits[i];
    seen_digit = true;
  }
  if (i < digits.size() && digits[i] == '.') {
    ++i;
    for (; i < digits.size() && std::isdigit(static_cast<unsigned char>(digits[i])); ++i) {
      mantissa += digits[i];
      --exponent;
      seen_digit = true;
    }
  }
  if (!seen_digit) throw ParseError("malformed number", offset);
  if (i < digits.size() && (digits[i] == 'e' || digits[i] == 'E')) {
    ++i;
    bool negative = false;
    if (i < digits.size() && (digits[i] == '+' || digits[i] == '-')) negative = digits[i++] == '-';
    if (i >= digits.size()) throw ParseError("malformed exponent", offset);
    long e = 0;
    for (; i < digits.size(); ++i) {
      if (!std::isdigit(static_cast<unsigned char>(digits[i]))) throw ParseError("malformed exponent", offset);
      e = e * 10 + (digits[i] - '0');
      if (e > 10000) throw ParseError("exponent out of range", offset);
    }
    exponent += negative ? -e : e;
  }
  if (i != digits.size()) throw ParseError("malformed number", offset);
  mpz_class num(mantissa, 10);
  mpz_class scale;
  mpz_ui_pow_ui(scale.get_mpz_t(), 10, static_cast<unsigned long>(exponent < 0 ? -exponent : exponent));
  Rational q = exponent < 0 ? Rational(num, scale) : Rational(num * scale);
  q.canonicalize();
  return q;
}

std::vector<Token> tokenize(std::string_view text) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < text.size()) {
    char c = text[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    std::size_t start = i;
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      while (i < text.size() && (std::isdigit(static_cast<unsigned char>(text[i])) || text[i] == '.')) ++i;
      if (i < text.size() && (text[i] == 'e' || text[i] == 'E')) {
        std::size_t j = i + 1;
        if (j < text.size() && (text[j] == '+' || text[j] == '-')) ++j;
        if (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) {
          i = j;
          while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) ++i;
        }
      }
      out.push_back({Tok::Number, start, std::string(text.substr(start, i - start))});
      continue;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      while (i < text.size() && (std::isalnum(static_cast<unsigned char>(text[i])) || text[i] == '_')) ++i;
      out.push_back({Tok::Ident, start, std::string(text.substr(start, i - start))});
      continue;
    }
    Tok kind;
    switch (c) {
      case '+': kind = Tok::Plus; break;
      case '-': kind = Tok::Minus; break;
      case '*': kind = Tok::Star; break;
      case '/': kind = Tok::Slash; break;
      case '^': kind = Tok::Caret; break;
      case '(': kind = Tok::LParen; break;
      case ')': kind = Tok::RParen; break;
      default:
        throw ParseError(std::string("unexpected character '") + c + "'", i);
    }
    out.push_back({kind, i, std::string(1, c)});
    ++i;
  }
  out.push_back({Tok::End, text.size(), ""});
  return out;
}

std::optional<Rational> rational_power(const Rational& base, const Rational& exponent) {
  if (!is_integer(exponent)) return std::nullopt;
  if (!exponent.get_num().fits_slong_p()) return std::nullopt;
  long e = exponent.get_num().get_si();
  if (base == 0 && e < 0) return std::nullopt;
  if (e > 4096 || e < -4096) return std::nullopt;
  mpz_class num, den;
  unsigned long ue = static_cast<unsigned long>(e < 0 ? -e : e);
  mpz_pow_ui(num.get_mpz_t(), base.get_num().get_mpz_t(), ue);
  mpz_pow_ui(den.get_mpz_t(), base.get_den().get_mpz_t(), ue);
  Rational q = e < 0 ? Rational(den, num) : Rational(num, den);
  q.canonicalize();
  return q;
}

// Folds operators applied to literal constants so "2/3" is one constant.
Expr fold_binary(Op op, Expr lhs, Expr rhs) {
  if (lhs.is_constant() && rhs.is_constant()) {
    const Rational& a = lhs.value();
    const Rational& b = rhs.value();
    switch (op) {
      case Op::Add: return Expr::constant(Rational(a + b));
      case Op::Sub: return Expr::constant(Rational(a - b));
      case Op::Mul: return Expr::constant(Rational(a * b));
      case Op::Div:
        if (b != 0) return Expr::constant(Rational(a / b));
        break;
      default:
        break;
    }
  }
  return Expr::binary(op, std::move(lhs), std::move(rhs));
}

class Parser {
 public:
  Parser(std::string_view text, int dimension) : tokens_(tokenize(text)), dimension_(dimension) {}

  Expr parse_all() {
    Expr e = parse_sum();
    if (peek().kind != Tok::End) {
      throw ParseError("unexpected token '" + peek().text + "'", peek().offset);
    }
    return e;
  }

 private:
  const Token& peek() const { return tokens_[pos_]; }
  const Token& advance() { return tokens_[pos_++]; }

  void expect(Tok kind, const char* what) {
    if (peek().kind != kind) {
      throw ParseError(std::string("expected ") + what, peek().offset);
    }
    ++pos_;
  }

  Expr parse_sum() {
    Expr lhs = parse_product();
    while (peek().kind == Tok::Plus || peek().kind == Tok::Minus) {
      Op op = advance().kind == Tok::Plus ? Op::Add : Op::Sub;
      lhs = fold_binary(op, std::move(lhs), parse_product());
    }
    return lhs;
  }

  Expr parse_product() {
    Expr lhs = parse_unary();
    while (peek().kind == Tok::Star || peek().kind == Tok::Slash) {
      Op op = advance().kind == Tok::Star ? Op::Mul : Op::Div;
      lhs = fold_binary(op, std::move(lhs), parse_unary());
    }
    return lhs;
  }

  Expr parse_unary() {
    if (peek().kind == Tok::Minus) {
      ++pos_;
      Expr arg = parse_unary();
      if (arg.is_constant()) return Expr::constant(Rational(-arg.value()));
      return -arg;
    }
    if (peek().kind == Tok::Plus) {
      ++pos_;
      return parse_unary();
    }
    return parse_power();
  }

  Expr parse_power() {
    Expr base = parse_primary();
    if (peek().kind != Tok::Caret) return base;
    std::size_t at = advance().offset;
    // Right associative; the exponent may carry its own sign.
    Expr exponent = parse_unary();
    if (!exponent.is_constant()) {
      throw ParseError("exponent must be a rational constant", at + 1);
    }
    const Rational& r = exponent.value();
    if (base.is_constant()) {
      if (auto folded = rational_power(base.value(), r)) return Expr::constant(*folded);
    }
    return pow(base, r);
  }

  Expr parse_primary() {
    const Token& t = peek();
    switch (t.kind) {
      case Tok::Number:
        ++pos_;
        return Expr::constant(decimal_to_rational(t.text, t.offset));
      case Tok::LParen: {
        ++pos_;
        Expr inner = parse_sum();
        expect(Tok::RParen, "')'");
        return inner;
      }
      case Tok::Ident:
        return parse_identifier();
      case Tok::End:
        throw ParseError("unexpected end of input", t.offset);
      default:
        throw ParseError("unexpected token '" + t.text + "'", t.offset);
    }
  }

  Expr parse_identifier() {
    const Token t = advance();
    static const std::pair<const char*, Op> functions[] = {
        {"sin", Op::Sin}, {"cos", Op::Cos},   {"exp", Op::Exp},
        {"log", Op::Log}, {"sqrt", Op::Sqrt}, {"pos", Op::Pos},
    };
    for (const auto& [name, op] : functions) {
      if (t.text == name) {
        expect(Tok::LParen, "'(' after function name");
        Expr arg = parse_sum();
        expect(Tok::RParen, "')'");
        return Expr::unary(op, std::move(arg));
      }
    }
    int index = variable_index(t);
    if (index > dimension_) {
      throw DimensionError("variable '" + t.text + "' at offset " + std::to_string(t.offset) +
                           " exceeds dimension " + std::to_string(dimension_));
    }
    return Expr::variable(index);
  }

  int variable_index(const Token& t) const {
    const std::string& s = t.text;
    if (s.size() == 1 && (s[0] == 'x' || s[0] == 'y' || s[0] == 'z')) {
      if (dimension_ > 3) {
        throw DimensionError("variable '" + s + "' is only available when dimension <= 3; use z1..z" +
                             std::to_string(dimension_));
      }
      return s[0] == 'x' ? 1 : (s[0] == 'y' ? 2 : 3);
    }
    if (s.size() >= 2 && s[0] == 'z' && s[1] != '0') {
      bool digits = true;
      for (std::size_t i = 1; i < s.size(); ++i) digits &= std::isdigit(static_cast<unsigned char>(s[i])) != 0;
      if (digits && s.size() < 8) return std::stoi(s.substr(1));
    }
    throw ParseError("unknown identifier '" + s + "'", t.offset);
  }

  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
  int dimension_;
};

}  // namespace

Expr parse(std::string_view text, int dimension) {
  if (dimension < 1) throw DimensionError("dimension must be >= 1");
  return Parser(text, dimension).parse_all();
}

Rational parse_rational(std::string_view text) {
  Expr e = parse(text, 1);
  if (!e.is_constant()) throw ParseError("expected a rational constant", 0);
  return e.value();
}

}  // namespace symflow
