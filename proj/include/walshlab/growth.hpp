#pragma once

// Growth functions N -> N on big integers, and a small expression language:
//   expr    := term ('+' term)*
//   term    := power ('*' power)*
//   power   := postfix ('^' power)?
//   postfix := primary ('(' expr ')')*      E(E2) is E composed with E2
//   primary := integer | 'M' | 'max' '(' expr ',' expr ')' | '(' expr ')'

#include "walshlab/numeric.hpp"

#include <cctype>
#include <functional>
#include <memory>
#include <string>

namespace walshlab {

class GrowthFunction {
 public:
  using Fn = std::function<BigInt(const BigInt&)>;

  GrowthFunction() : GrowthFunction(identity()) {}
  GrowthFunction(Fn fn, std::string text) : fn_(std::make_shared<Fn>(std::move(fn))), text_(std::move(text)) {}

  static GrowthFunction identity() {
    return GrowthFunction([](const BigInt& x) { return x; }, "M");
  }
  static GrowthFunction constant(BigInt c) {
    auto s = c.str();
    return GrowthFunction([c = std::move(c)](const BigInt&) { return c; }, s);
  }

  static GrowthFunction parse(const std::string& text);

  BigInt operator()(const BigInt& x) const { return (*fn_)(x); }
  const std::string& text() const { return text_; }
  /// Identity of the underlying callable (copies share it).
  const void* id() const { return fn_.get(); }

  /// x -> max(F(x), x).
  GrowthFunction at_least_identity() const {
    auto f = fn_;
    return GrowthFunction([f](const BigInt& x) { return std::max((*f)(x), x); }, "max(" + text_ + ",M)");
  }

  GrowthFunction compose(const GrowthFunction& inner) const {
    auto f = fn_, g = inner.fn_;
    return GrowthFunction([f, g](const BigInt& x) { return (*f)((*g)(x)); }, "(" + text_ + ")(" + inner.text_ + ")");
  }

  /// Sampled check F(x) <= F(x+1) for lo <= x < hi.
  bool nondecreasing_on(std::int64_t lo, std::int64_t hi) const {
    BigInt prev = (*this)(BigInt(lo));
    for (std::int64_t x = lo + 1; x <= hi; ++x) {
      BigInt cur = (*this)(BigInt(x));
      if (cur < prev) return false;
      prev = std::move(cur);
    }
    return true;
  }

 private:
  std::shared_ptr<Fn> fn_;
  std::string text_;
};

namespace detail {

constexpr std::size_t kGrowthMaxBits = std::size_t{1} << 24;

class GrowthParser {
 public:
  explicit GrowthParser(const std::string& s) : s_(s) {}

  GrowthFunction::Fn parse_all() {
    auto f = expr();
    skip();
    if (pos_ != s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
    return f;
  }

 private:
  using Fn = GrowthFunction::Fn;

  [[noreturn]] void fail(const std::string& why) const {
    throw Error("growth expression: " + why + " at position " + std::to_string(pos_));
  }
  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool eat(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }
  void expect(char c) {
    if (!eat(c)) fail(std::string("expected '") + c + "'");
  }

  Fn expr() {
    Fn f = term();
    while (eat('+')) {
      Fn g = term();
      f = [f, g](const BigInt& x) { return f(x) + g(x); };
    }
    return f;
  }
  Fn term() {
    Fn f = power();
    while (eat('*')) {
      Fn g = power();
      f = [f, g](const BigInt& x) { return f(x) * g(x); };
    }
    return f;
  }
  Fn power() {
    Fn f = postfix();
    if (eat('^')) {
      Fn g = power();
      return [f, g](const BigInt& x) {
        BigInt base = f(x), e = g(x);
        if (base == 0 || base == 1) return e == 0 ? BigInt(1) : base;
        if (e > kGrowthMaxBits || bit_length(base) * e.convert_to<std::size_t>() > kGrowthMaxBits)
          throw Error("growth value too large to evaluate exactly");
        return ipow(base, e.convert_to<std::uint64_t>());
      };
    }
    return f;
  }
  Fn postfix() {
    Fn f = primary();
    while (true) {
      skip();
      if (pos_ < s_.size() && s_[pos_] == '(') {
        ++pos_;
        Fn g = expr();
        expect(')');
        f = [f, g](const BigInt& x) { return f(g(x)); };
      } else {
        return f;
      }
    }
  }
  Fn primary() {
    skip();
    if (pos_ >= s_.size()) fail("unexpected end");
    char c = s_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t start = pos_;
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      BigInt v(s_.substr(start, pos_ - start));
      return [v](const BigInt&) { return v; };
    }
    if (c == 'M') {
      ++pos_;
      return [](const BigInt& x) { return x; };
    }
    if (s_.compare(pos_, 3, "max") == 0) {
      pos_ += 3;
      expect('(');
      Fn a = expr();
      expect(',');
      Fn b = expr();
      expect(')');
      return [a, b](const BigInt& x) { return std::max(a(x), b(x)); };
    }
    if (c == '(') {
      ++pos_;
      Fn f = expr();
      expect(')');
      return f;
    }
    fail("unexpected '" + std::string(1, c) + "'");
  }

  const std::string& s_;
  std::size_t pos_ = 0;
};

}  // namespace detail

inline GrowthFunction GrowthFunction::parse(const std::string& text) {
  detail::GrowthParser p(text);
  return GrowthFunction(p.parse_all(), text);
}

}  // namespace walshlab
