#pragma once

#include <bit>
#include <compare>
#include <cstdint>
#include <functional>

namespace ccl {

// Fixed-width subset of {0, ..., bits-1}. Tag keeps edge sets and vertex sets
// from being mixed up.
template <class Word, class Tag>
struct BitMask {
  Word bits = 0;

  constexpr BitMask() = default;
  constexpr explicit BitMask(Word b) : bits(b) {}

  static constexpr BitMask single(int i) { return BitMask(Word{1} << i); }
  static constexpr BitMask first(int n) {
    return n >= static_cast<int>(sizeof(Word) * 8) ? BitMask(~Word{0})
                                                   : BitMask((Word{1} << n) - 1);
  }

  constexpr bool test(int i) const { return (bits >> i) & Word{1}; }
  constexpr BitMask with(int i) const { return BitMask(bits | (Word{1} << i)); }
  constexpr BitMask without(int i) const { return BitMask(bits & ~(Word{1} << i)); }
  constexpr int count() const { return std::popcount(bits); }
  constexpr bool empty() const { return bits == 0; }
  constexpr bool subset_of(BitMask o) const { return (bits & ~o.bits) == 0; }
  constexpr bool intersects(BitMask o) const { return (bits & o.bits) != 0; }

  template <class F>
  void for_each(F&& f) const {
    for (Word w = bits; w != 0; w &= w - 1) f(std::countr_zero(w));
  }

  friend constexpr BitMask operator|(BitMask a, BitMask b) { return BitMask(a.bits | b.bits); }
  friend constexpr BitMask operator&(BitMask a, BitMask b) { return BitMask(a.bits & b.bits); }
  friend constexpr BitMask operator-(BitMask a, BitMask b) { return BitMask(a.bits & ~b.bits); }
  friend constexpr BitMask operator^(BitMask a, BitMask b) { return BitMask(a.bits ^ b.bits); }
  BitMask& operator|=(BitMask o) { bits |= o.bits; return *this; }
  BitMask& operator&=(BitMask o) { bits &= o.bits; return *this; }
  friend constexpr bool operator==(BitMask, BitMask) = default;
  friend constexpr auto operator<=>(BitMask, BitMask) = default;
};

struct EdgeTag;
struct VertexTag;

using EdgeSet = BitMask<std::uint32_t, EdgeTag>;
using VertexSet = BitMask<std::uint64_t, VertexTag>;

// A configuration omega is identified with its set of open edges.
using Config = EdgeSet;

}  // namespace ccl

template <class W, class T>
struct std::hash<ccl::BitMask<W, T>> {
  std::size_t operator()(ccl::BitMask<W, T> m) const noexcept { return std::hash<W>{}(m.bits); }
};
