#include <ccl/error.hpp>
#include <ccl/event.hpp>

#include <bit>

namespace ccl {

Event::Event(int dims, bool full, std::string provenance) : dims_(dims), provenance_(std::move(provenance)) {
  if (dims < 0 || dims > 30) throw BudgetError("event dimension out of range");
  words_.assign((size() + 63) / 64, full ? ~std::uint64_t{0} : 0);
  trim();
}

void Event::trim() {
  if (size() % 64 != 0) words_.back() &= (std::uint64_t{1} << (size() % 64)) - 1;
}

std::uint64_t Event::count() const {
  std::uint64_t c = 0;
  for (auto w : words_) c += std::popcount(w);
  return c;
}

bool Event::subset_of(const Event& o) const {
  if (dims_ != o.dims_) throw InputError("event dimension mismatch");
  for (std::size_t i = 0; i < words_.size(); ++i)
    if (words_[i] & ~o.words_[i]) return false;
  return true;
}

namespace {
void check_same(const Event& a, const Event& b) {
  if (a.dims() != b.dims()) throw InputError("event dimension mismatch");
}
}  // namespace

Event operator&(const Event& a, const Event& b) {
  check_same(a, b);
  Event r = a;
  for (std::size_t i = 0; i < r.words_.size(); ++i) r.words_[i] &= b.words_[i];
  r.provenance_ = "(" + a.provenance_ + " & " + b.provenance_ + ")";
  return r;
}

Event operator|(const Event& a, const Event& b) {
  check_same(a, b);
  Event r = a;
  for (std::size_t i = 0; i < r.words_.size(); ++i) r.words_[i] |= b.words_[i];
  r.provenance_ = "(" + a.provenance_ + " | " + b.provenance_ + ")";
  return r;
}

Event operator-(const Event& a, const Event& b) {
  check_same(a, b);
  Event r = a;
  for (std::size_t i = 0; i < r.words_.size(); ++i) r.words_[i] &= ~b.words_[i];
  r.provenance_ = "(" + a.provenance_ + " - " + b.provenance_ + ")";
  return r;
}

Event Event::operator~() const {
  Event r = *this;
  for (auto& w : r.words_) w = ~w;
  r.trim();
  r.provenance_ = "!" + provenance_;
  return r;
}

Event Event::up_closure() const {
  Event r = *this;
  // Sweeping points in increasing numeric order visits every x before x|bit.
  for (std::uint64_t x = 0; x < size(); ++x) {
    if (!r.contains(x)) continue;
    for (int i = 0; i < dims_; ++i) r.insert(x | (std::uint64_t{1} << i));
  }
  return r;
}

bool Event::is_increasing() const {
  for (std::uint64_t x = 0; x < size(); ++x) {
    if (!contains(x)) continue;
    for (int i = 0; i < dims_; ++i)
      if (!contains(x | (std::uint64_t{1} << i))) return false;
  }
  return true;
}

bool Event::is_decreasing() const { return (~*this).is_increasing(); }

RealFunction::RealFunction(int dims, const Rational& value)
    : dims_(dims), values_(std::size_t{1} << dims, value) {}

RealFunction::RealFunction(int dims, std::vector<Rational> values) : dims_(dims), values_(std::move(values)) {
  if (values_.size() != (std::size_t{1} << dims)) throw InputError("function length must be 2^dims");
}

RealFunction RealFunction::indicator(const Event& e) {
  RealFunction f(e.dims());
  for (std::uint64_t x = 0; x < e.size(); ++x)
    if (e.contains(x)) f.values_[x] = 1;
  return f;
}

RealFunction operator+(const RealFunction& a, const RealFunction& b) {
  if (a.dims_ != b.dims_) throw InputError("function dimension mismatch");
  RealFunction r = a;
  for (std::size_t i = 0; i < r.values_.size(); ++i) r.values_[i] += b.values_[i];
  return r;
}

RealFunction operator*(const Rational& c, const RealFunction& f) {
  RealFunction r = f;
  for (auto& v : r.values_) v *= c;
  return r;
}

RealFunction RealFunction::operator-() const { return Rational(-1) * *this; }

}  // namespace ccl
