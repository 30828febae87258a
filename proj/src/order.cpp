#include <ccl/order.hpp>

#include <array>
#include <mutex>

namespace ccl {

std::vector<std::uint64_t> minimal_elements(const Event& up) {
  std::vector<std::uint64_t> out;
  for (std::uint64_t x = 0; x < up.size(); ++x) {
    if (!up.contains(x)) continue;
    bool minimal = true;
    for (std::uint64_t b = x; b && minimal; b &= b - 1)
      if (up.contains(x & ~(b & -b))) minimal = false;
    if (minimal) out.push_back(x);
  }
  return out;
}

Event upset_from_generators(int dims, std::span<const std::uint64_t> generators) {
  Event e(dims);
  for (auto g : generators) e.insert(g);
  return e.up_closure();
}

const std::vector<Event>& all_upsets(int k) {
  if (k < 0 || k > 5) throw BudgetError("up-set enumeration is limited to 5 coordinates");
  static std::array<std::vector<Event>, 6> cache;
  static std::once_flag once;
  std::call_once(once, [] {
    cache[0] = {Event(0, false), Event(0, true)};
    for (int d = 1; d <= 5; ++d) {
      const auto& prev = cache[d - 1];
      const std::uint64_t half = std::uint64_t{1} << (d - 1);
      for (const Event& f0 : prev)
        for (const Event& f1 : prev) {
          if (!f0.subset_of(f1)) continue;
          Event u(d);
          for (std::uint64_t x = 0; x < half; ++x) {
            if (f0.contains(x)) u.insert(x);
            if (f1.contains(x)) u.insert(x | half);
          }
          cache[d].push_back(std::move(u));
        }
    }
  });
  return cache[k];
}

const char* to_string(AssociationStrategy s) {
  switch (s) {
    case AssociationStrategy::Exhaustive: return "exhaustive";
    case AssociationStrategy::Sampled: return "sampled";
    case AssociationStrategy::Supplied: return "supplied";
  }
  return "?";
}

bool function_is_increasing(const RealFunction& f) {
  for (std::uint64_t x = 0; x < f.size(); ++x)
    for (int i = 0; i < f.dims(); ++i) {
      const std::uint64_t y = x | (std::uint64_t{1} << i);
      if (y != x && f[y] < f[x]) return false;
    }
  return true;
}

bool function_is_decreasing(const RealFunction& f) { return function_is_increasing(-f); }

}  // namespace ccl
