#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "voigraph/errors.hpp"

namespace voigraph {

/// Fixed-width bitstring, at most 64 bits. Indexing follows the convention
/// that the leftmost bit is highest-order and carries index 0, so
/// 0100[01] = 1.
struct Bitstring {
  std::uint64_t bits = 0;
  std::uint32_t width = 0;

  Bitstring() = default;
  Bitstring(std::uint64_t value, std::uint32_t w) : bits(value), width(w) {
    require(w <= 64, ErrorCode::DomainExplosion, "bitstring wider than 64");
    if (w < 64) bits &= (std::uint64_t(1) << w) - 1;
  }

  int bit(std::uint64_t index) const {
    require(index < width, ErrorCode::DomainViolation,
            "bit index " + std::to_string(index) + " out of range for width " +
                std::to_string(width));
    return static_cast<int>((bits >> (width - 1 - index)) & 1);
  }
  /// x[y]: the y-th bit of x, where y is read as a binary number.
  int bit(const Bitstring& index) const { return bit(index.bits); }

  std::uint64_t count() const;  // 2^width
  bool operator==(const Bitstring& o) const {
    return width == o.width && bits == o.bits;
  }
  std::string str() const;

  static Bitstring repeated(int bitval, std::uint32_t w);
};

/// Width of the n-th element of a fork chain with base width k:
/// exp2_tower(k, 0) = k, exp2_tower(k, n) = 2^exp2_tower(k, n-1).
std::uint64_t exp2_tower(std::uint32_t k, std::uint32_t n);

/// w = <w_0, w_1..w_J> with w_0 of base width and the rest single bits;
/// u = <u_0..u_J> with u_n of width exp2_tower(base, n). Consistent iff
/// w_0 = u_0 and w_n = u_n[u_{n-1}] for n >= 1.
bool consistent(const std::vector<Bitstring>& w, const std::vector<Bitstring>& u);

/// True iff some fork prefix u_0..u_{J-1} makes w consistent with
/// u_0..u_{J-1}, u_J.
bool compatible(const std::vector<Bitstring>& w, const Bitstring& u_last);

/// Constructive adversary of the encryption lemma: given w and wbar that
/// first differ at index J', and a prefix u_0..u_{J'-1} consistent with w,
/// returns u_{J'}..u_J such that w is consistent with the full sequence but
/// wbar is incompatible with u_J.
std::vector<Bitstring> adversarial_forks(const std::vector<Bitstring>& w,
                                         const std::vector<Bitstring>& wbar,
                                         const std::vector<Bitstring>& u_prefix);

}  // namespace voigraph
