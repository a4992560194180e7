#include "voigraph/bitstring.hpp"

#include <functional>
#include <random>

#include "doctest.h"

using namespace voigraph;

namespace {

// Definition-level recomputation used as the oracle.
bool consistent_oracle(const std::vector<Bitstring>& w,
                       const std::vector<Bitstring>& u) {
  if (!(w[0] == u[0])) return false;
  for (std::size_t n = 1; n < w.size(); ++n)
    if (u[n].bit(u[n - 1]) != w[n].bit(std::uint64_t(0))) return false;
  return true;
}

// Brute force over every fork prefix.
bool compatible_oracle(const std::vector<Bitstring>& w, const Bitstring& u_last) {
  std::size_t j_max = w.size() - 1;
  std::uint32_t base = w[0].width;
  if (j_max == 0) return w[0] == u_last;
  std::vector<Bitstring> u(w.size());
  u[0] = w[0];
  u[j_max] = u_last;
  std::function<bool(std::size_t)> rec = [&](std::size_t j) -> bool {
    if (j == j_max) return consistent_oracle(w, u);
    std::uint32_t width =
        static_cast<std::uint32_t>(exp2_tower(base, static_cast<std::uint32_t>(j)));
    for (std::uint64_t v = 0; v < (std::uint64_t(1) << width); ++v) {
      u[j] = Bitstring(v, width);
      if (rec(j + 1)) return true;
    }
    return false;
  };
  return rec(1);
}

std::vector<Bitstring> make_w(std::uint32_t base, std::uint64_t w0,
                              std::vector<int> bits) {
  std::vector<Bitstring> w{Bitstring(w0, base)};
  for (int b : bits) w.emplace_back(b, 1);
  return w;
}

}  // namespace

TEST_CASE("indexing follows the leftmost-high-order convention") {
  Bitstring s(0b0100, 4);
  CHECK(s.bit(Bitstring(0b01, 2)) == 1);
  CHECK(s.bit(Bitstring(0b00, 2)) == 0);
  CHECK(s.str() == "0100");
}

TEST_CASE("consistency example from the indexing discussion") {
  // w = <0,0> vs u = <0, 01>: u1[0] = 0, so consistent.
  auto w = make_w(1, 0, {0});
  std::vector<Bitstring> u{Bitstring(0, 1), Bitstring(0b01, 2)};
  CHECK(consistent(w, u));
  // <1,1> is compatible with u1 = 01: pick u0 = 1, since 01[1] = 1.
  auto w2 = make_w(1, 1, {1});
  CHECK(compatible(w2, Bitstring(0b01, 2)));
}

TEST_CASE("singleton sequences reduce to equality") {
  std::vector<Bitstring> w{Bitstring(1, 1)};
  std::vector<Bitstring> u{Bitstring(1, 1)};
  CHECK(consistent(w, u));
  CHECK(compatible(w, Bitstring(1, 1)));
  CHECK(!compatible(w, Bitstring(0, 1)));
}

TEST_CASE("consistency matches the definitional recomputation at k=1") {
  for (std::uint64_t w0 = 0; w0 < 2; ++w0)
    for (int w1 = 0; w1 < 2; ++w1)
      for (int w2 = 0; w2 < 2; ++w2)
        for (std::uint64_t u1 = 0; u1 < 4; ++u1)
          for (std::uint64_t u2 = 0; u2 < 16; ++u2) {
            auto w = make_w(1, w0, {w1, w2});
            std::vector<Bitstring> u{Bitstring(w0, 1), Bitstring(u1, 2),
                                     Bitstring(u2, 4)};
            CHECK(consistent(w, u) == consistent_oracle(w, u));
          }
}

TEST_CASE("compatibility matches brute force over prefixes, k=1, J<=2") {
  for (std::uint64_t w0 = 0; w0 < 2; ++w0)
    for (int w1 = 0; w1 < 2; ++w1)
      for (int w2 = 0; w2 < 2; ++w2)
        for (std::uint64_t uj = 0; uj < 16; ++uj) {
          auto w = make_w(1, w0, {w1, w2});
          Bitstring u_last(uj, 4);
          CHECK(compatible(w, u_last) == compatible_oracle(w, u_last));
        }
}

TEST_CASE("consistency implies compatibility with the last element") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    std::size_t j = 1 + rng() % 2;
    std::vector<Bitstring> w{Bitstring(rng() % 2, 1)};
    std::vector<Bitstring> u{w[0]};
    for (std::size_t n = 1; n <= j; ++n) {
      std::uint32_t width = static_cast<std::uint32_t>(
          exp2_tower(1, static_cast<std::uint32_t>(n)));
      u.emplace_back(rng() & ((1ull << width) - 1), width);
      w.emplace_back(u[n].bit(u[n - 1]), 1);
    }
    CHECK(consistent(w, u));
    CHECK(compatible(w, u.back()));
  }
}

TEST_CASE("adversarial forks on the k=1 worked example") {
  // w = <0,1>, wbar = <0,0>, prefix u0 = 0: the construction must emit
  // u1 = 11 (w stays consistent, wbar dies).
  auto w = make_w(1, 0, {1});
  auto wbar = make_w(1, 0, {0});
  std::vector<Bitstring> prefix{Bitstring(0, 1)};
  auto got = adversarial_forks(w, wbar, prefix);
  REQUIRE(got.size() == 1);
  CHECK(got[0] == Bitstring(0b11, 2));
}

TEST_CASE("adversarial forks reject identical sequences") {
  auto w = make_w(1, 0, {1});
  try {
    adversarial_forks(w, w, {Bitstring(0, 1)});
    FAIL("expected PreconditionViolated");
  } catch (const VgError& e) {
    CHECK(e.code() == ErrorCode::PreconditionViolated);
  }
}

TEST_CASE("adversarial forks satisfy both postconditions exhaustively") {
  // k = 1, J <= 3: every (w, wbar) pair and every w-consistent prefix.
  for (std::size_t j_max = 1; j_max <= 3; ++j_max) {
    std::uint64_t seqs = std::uint64_t(1) << (j_max + 1);
    for (std::uint64_t wv = 0; wv < seqs; ++wv) {
      for (std::uint64_t bv = 0; bv < seqs; ++bv) {
        std::vector<Bitstring> w{Bitstring(wv >> j_max, 1)};
        std::vector<Bitstring> wbar{Bitstring(bv >> j_max, 1)};
        for (std::size_t n = 1; n <= j_max; ++n) {
          w.emplace_back((wv >> (j_max - n)) & 1, 1);
          wbar.emplace_back((bv >> (j_max - n)) & 1, 1);
        }
        std::size_t j_diff = w.size();
        for (std::size_t n = 0; n < w.size(); ++n)
          if (!(w[n] == wbar[n])) {
            j_diff = n;
            break;
          }
        if (j_diff == w.size()) continue;  // equal sequences

        std::vector<Bitstring> prefix(j_diff);
        std::function<void(std::size_t)> rec = [&](std::size_t n) {
          if (n == j_diff) {
            auto tail = adversarial_forks(w, wbar, prefix);
            std::vector<Bitstring> full = prefix;
            full.insert(full.end(), tail.begin(), tail.end());
            CHECK(consistent(w, full));
            CHECK(!compatible(wbar, full.back()));
            return;
          }
          if (n == 0) {
            prefix[0] = w[0];
            rec(1);
            return;
          }
          std::uint32_t width = static_cast<std::uint32_t>(
              exp2_tower(1, static_cast<std::uint32_t>(n)));
          for (std::uint64_t v = 0; v < (std::uint64_t(1) << width); ++v) {
            Bitstring cand(v, width);
            if (cand.bit(prefix[n - 1]) != w[n].bit(std::uint64_t(0))) continue;
            prefix[n] = cand;
            rec(n + 1);
          }
        };
        rec(0);
      }
    }
  }
}
