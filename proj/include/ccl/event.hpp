#pragma once

#include <ccl/rational.hpp>

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace ccl {

/// Subset of {0,1}^dims stored as a dense membership bitset over all 2^dims
/// points. Used for events on configurations (dims = |E|) and on spin or
/// site configurations.
class Event {
 public:
  Event() = default;
  explicit Event(int dims, bool full = false, std::string provenance = {});

  template <class Pred>
  static Event from_predicate(int dims, Pred&& pred, std::string provenance = {}) {
    Event e(dims, false, std::move(provenance));
    for (std::uint64_t x = 0; x < e.size(); ++x)
      if (pred(x)) e.insert(x);
    return e;
  }

  int dims() const { return dims_; }
  std::uint64_t size() const { return std::uint64_t{1} << dims_; }
  bool contains(std::uint64_t x) const { return (words_[x >> 6] >> (x & 63)) & 1u; }
  void insert(std::uint64_t x) { words_[x >> 6] |= std::uint64_t{1} << (x & 63); }
  void erase(std::uint64_t x) { words_[x >> 6] &= ~(std::uint64_t{1} << (x & 63)); }
  std::uint64_t count() const;
  bool empty() const { return count() == 0; }
  bool is_full() const { return count() == size(); }
  bool subset_of(const Event& o) const;

  const std::string& provenance() const { return provenance_; }
  Event& set_provenance(std::string p) {
    provenance_ = std::move(p);
    return *this;
  }

  friend Event operator&(const Event& a, const Event& b);
  friend Event operator|(const Event& a, const Event& b);
  friend Event operator-(const Event& a, const Event& b);
  Event operator~() const;
  friend bool operator==(const Event& a, const Event& b) {
    return a.dims_ == b.dims_ && a.words_ == b.words_;
  }

  /// Up-closure in the coordinatewise order.
  Event up_closure() const;
  bool is_increasing() const;
  bool is_decreasing() const;

 private:
  void trim();

  int dims_ = 0;
  std::vector<std::uint64_t> words_;
  std::string provenance_;
};

/// Dense real function on {0,1}^dims with exact values.
class RealFunction {
 public:
  RealFunction() = default;
  explicit RealFunction(int dims, const Rational& value = Rational(0));
  RealFunction(int dims, std::vector<Rational> values);

  static RealFunction indicator(const Event& e);

  int dims() const { return dims_; }
  std::uint64_t size() const { return values_.size(); }
  const Rational& operator[](std::uint64_t x) const { return values_[x]; }
  Rational& operator[](std::uint64_t x) { return values_[x]; }
  std::span<const Rational> values() const { return values_; }

  friend RealFunction operator+(const RealFunction& a, const RealFunction& b);
  friend RealFunction operator*(const Rational& c, const RealFunction& f);
  RealFunction operator-() const;
  friend bool operator==(const RealFunction&, const RealFunction&) = default;

 private:
  int dims_ = 0;
  std::vector<Rational> values_;
};

}  // namespace ccl
