#pragma once

#include <vector>

#include "ergodic/sets.hpp"

namespace ergodic {

// f(x) = table[x_0 x_1 ... x_{k-1}], the word read as a binary number with
// x_0 most significant.
class CylFn {
 public:
  CylFn() : CylFn(Rational(0)) {}
  explicit CylFn(const Rational& c) : depth_(0), table_{c} {}
  CylFn(std::size_t depth, std::vector<Rational> table) : depth_(depth), table_(std::move(table)) {
    require(depth_ < 62 && table_.size() == (std::size_t(1) << depth_), "table: needs 2^depth entries");
  }

  static CylFn indicator(const Word& w) {
    std::vector<Rational> t(std::size_t(1) << w.size(), Rational(0));
    t[index_of(w)] = 1;
    return CylFn(w.size(), std::move(t));
  }

  static std::size_t index_of(const Word& w) {
    std::size_t z = 0;
    for (char c : w) z = 2 * z + (c == '1');
    return z;
  }
  static Word word_of(std::size_t z, std::size_t depth) {
    Word w(depth, '0');
    for (std::size_t i = depth; i-- > 0; z >>= 1) w[i] = (z & 1) ? '1' : '0';
    return w;
  }

  std::size_t depth() const { return depth_; }
  const std::vector<Rational>& table() const { return table_; }
  const Rational& value(std::size_t z) const { return table_[z]; }

  // the prefix must hold at least depth() bits
  const Rational& operator()(const Word& prefix) const { return table_[index_of(prefix.substr(0, depth_))]; }

  CylFn extended(std::size_t d) const {
    if (d <= depth_) return *this;
    if (d >= 62 || (std::size_t(1) << d) > limits().cylinders) fail(ErrorCode::budget_exceeded, "cylinder table size");
    std::size_t shift = d - depth_;
    std::vector<Rational> t(std::size_t(1) << d);
    for (std::size_t z = 0; z < t.size(); ++z) t[z] = table_[z >> shift];
    return CylFn(d, std::move(t));
  }

  // x -> f(shift x)
  CylFn compose_shift() const {
    std::size_t d = depth_ + 1;
    if (d >= 62 || (std::size_t(1) << d) > limits().cylinders) fail(ErrorCode::budget_exceeded, "cylinder table size");
    std::vector<Rational> t(std::size_t(1) << d);
    std::size_t mask = table_.size() - 1;
    for (std::size_t z = 0; z < t.size(); ++z) t[z] = table_[z & mask];
    return CylFn(d, std::move(t));
  }

  Rational integral(const Rational& p) const {
    Rational s = 0;
    for (std::size_t z = 0; z < table_.size(); ++z) s += table_[z] * word_measure(word_of(z, depth_), p);
    return s;
  }
  Rational integral_abs(const Rational& p) const {
    Rational s = 0;
    for (std::size_t z = 0; z < table_.size(); ++z) s += qabs(table_[z]) * word_measure(word_of(z, depth_), p);
    return s;
  }
  Rational integral_sq(const Rational& p) const {
    Rational s = 0;
    for (std::size_t z = 0; z < table_.size(); ++z) s += table_[z] * table_[z] * word_measure(word_of(z, depth_), p);
    return s;
  }

  Rational sup_abs() const {
    Rational m = 0;
    for (auto& v : table_) m = qmax(m, qabs(v));
    return m;
  }

  template <class Op>
  static CylFn combine(const CylFn& f, const CylFn& g, Op op) {
    std::size_t d = std::max(f.depth_, g.depth_);
    CylFn a = f.extended(d), b = g.extended(d);
    for (std::size_t z = 0; z < a.table_.size(); ++z) a.table_[z] = op(a.table_[z], b.table_[z]);
    return a;
  }

  friend CylFn operator+(const CylFn& f, const CylFn& g) {
    return combine(f, g, [](const Rational& a, const Rational& b) { return Rational(a + b); });
  }
  friend CylFn operator-(const CylFn& f, const CylFn& g) {
    return combine(f, g, [](const Rational& a, const Rational& b) { return Rational(a - b); });
  }
  static CylFn max(const CylFn& f, const CylFn& g) {
    return combine(f, g, [](const Rational& a, const Rational& b) { return qmax(a, b); });
  }
  static CylFn min(const CylFn& f, const CylFn& g) {
    return combine(f, g, [](const Rational& a, const Rational& b) { return qmin(a, b); });
  }
  CylFn scaled(const Rational& c) const {
    CylFn g = *this;
    for (auto& v : g.table_) v *= c;
    return g;
  }
  CylFn plus(const Rational& c) const {
    CylFn g = *this;
    for (auto& v : g.table_) v += c;
    return g;
  }
  CylFn truncated(const Rational& M) const {
    CylFn g = *this;
    for (auto& v : g.table_) v = qmax(qmin(v, M), Rational(-M));
    return g;
  }

  // {x : lo < f < hi} or {x : lo <= f <= hi}; clopen either way
  CylinderSet band(const Rational& lo, const Rational& hi, bool strict) const {
    std::vector<Word> ws;
    for (std::size_t z = 0; z < table_.size(); ++z) {
      const Rational& v = table_[z];
      if (strict ? (lo < v && v < hi) : (lo <= v && v <= hi)) ws.push_back(word_of(z, depth_));
    }
    return CylinderSet::from_words(std::move(ws));
  }

  bool operator==(const CylFn& o) const { return depth_ == o.depth_ && table_ == o.table_; }

 private:
  std::size_t depth_;
  std::vector<Rational> table_;
};

}  // namespace ergodic
