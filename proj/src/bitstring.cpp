#include "voigraph/bitstring.hpp"

#include <sstream>

namespace voigraph {

std::uint64_t Bitstring::count() const {
  require(width < 64, ErrorCode::DomainExplosion, "domain too large to count");
  return std::uint64_t(1) << width;
}

std::string Bitstring::str() const {
  std::ostringstream os;
  for (std::uint32_t i = 0; i < width; ++i) os << bit(i);
  return os.str();
}

Bitstring Bitstring::repeated(int bitval, std::uint32_t w) {
  require(w <= 64, ErrorCode::DomainExplosion, "bitstring wider than 64");
  std::uint64_t mask = w == 64 ? ~std::uint64_t(0) : (std::uint64_t(1) << w) - 1;
  return Bitstring(bitval ? mask : 0, w);
}

std::uint64_t exp2_tower(std::uint32_t k, std::uint32_t n) {
  std::uint64_t w = k;
  for (std::uint32_t i = 0; i < n; ++i) {
    require(w <= 63, ErrorCode::DomainExplosion,
            "fork width tower exceeds 64 bits");
    w = std::uint64_t(1) << w;
  }
  return w;
}

namespace {

void check_profile(const std::vector<Bitstring>& w,
                   const std::vector<Bitstring>& u) {
  require(!w.empty() && w.size() == u.size(), ErrorCode::DomainMismatch,
          "w and u must be nonempty sequences of equal length");
  std::uint32_t base = w[0].width;
  require(u[0].width == base, ErrorCode::DomainMismatch, "u_0 width != w_0 width");
  for (std::size_t n = 1; n < w.size(); ++n) {
    require(w[n].width == 1, ErrorCode::DomainMismatch,
            "w_n must be single bits for n >= 1");
    require(u[n].width == exp2_tower(base, static_cast<std::uint32_t>(n)),
            ErrorCode::DomainMismatch, "u_n width is not exp2 tower of base");
  }
}

// Membership of `value` in the set of level-n values that admit a
// w-compatible prefix chain below them. Level 0 holds only w_0.
bool level_reachable(const std::vector<Bitstring>& w, std::size_t n,
                     const Bitstring& value) {
  if (n == 0) return value == w[0];
  std::uint64_t prev_width = exp2_tower(w[0].width, static_cast<std::uint32_t>(n - 1));
  require(prev_width < 63, ErrorCode::DomainExplosion,
          "compatibility search space too large");
  for (std::uint64_t prev = 0; prev < (std::uint64_t(1) << prev_width); ++prev) {
    Bitstring cand(prev, static_cast<std::uint32_t>(prev_width));
    if (value.bit(cand) != w[n].bit(std::uint64_t(0))) continue;
    if (level_reachable(w, n - 1, cand)) return true;
  }
  return false;
}

}  // namespace

bool consistent(const std::vector<Bitstring>& w, const std::vector<Bitstring>& u) {
  check_profile(w, u);
  if (!(w[0] == u[0])) return false;
  for (std::size_t n = 1; n < w.size(); ++n)
    if (u[n].bit(u[n - 1]) != w[n].bit(std::uint64_t(0))) return false;
  return true;
}

bool compatible(const std::vector<Bitstring>& w, const Bitstring& u_last) {
  require(!w.empty(), ErrorCode::DomainMismatch, "empty w sequence");
  std::size_t j_max = w.size() - 1;
  require(u_last.width == exp2_tower(w[0].width, static_cast<std::uint32_t>(j_max)),
          ErrorCode::DomainMismatch, "u_J width is not exp2 tower of base");
  for (std::size_t n = 1; n < w.size(); ++n)
    require(w[n].width == 1, ErrorCode::DomainMismatch,
            "w_n must be single bits for n >= 1");
  if (j_max == 0) return w[0] == u_last;
  // w compatible with u_J iff some level-(J-1) value v reachable from w
  // satisfies u_J[v] = w_J.
  std::uint64_t prev_width = exp2_tower(w[0].width, static_cast<std::uint32_t>(j_max - 1));
  require(prev_width < 63, ErrorCode::DomainExplosion,
          "compatibility search space too large");
  for (std::uint64_t prev = 0; prev < (std::uint64_t(1) << prev_width); ++prev) {
    Bitstring cand(prev, static_cast<std::uint32_t>(prev_width));
    if (u_last.bit(cand) != w[j_max].bit(std::uint64_t(0))) continue;
    if (level_reachable(w, j_max - 1, cand)) return true;
  }
  return false;
}

std::vector<Bitstring> adversarial_forks(const std::vector<Bitstring>& w,
                                         const std::vector<Bitstring>& wbar,
                                         const std::vector<Bitstring>& u_prefix) {
  require(w.size() == wbar.size() && !w.empty(), ErrorCode::DomainMismatch,
          "w and wbar must have equal nonzero length");
  require(w[0].width == wbar[0].width, ErrorCode::DomainMismatch,
          "w_0 and wbar_0 widths differ");
  const std::uint32_t base = w[0].width;
  const std::size_t j_max = w.size() - 1;

  std::size_t j_diff = w.size();
  for (std::size_t j = 0; j < w.size(); ++j) {
    require(j == 0 || (w[j].width == 1 && wbar[j].width == 1),
            ErrorCode::DomainMismatch, "entries beyond index 0 must be bits");
    if (!(w[j] == wbar[j]) && j_diff == w.size()) j_diff = j;
  }
  require(j_diff < w.size(), ErrorCode::PreconditionViolated,
          "w and wbar do not differ at any index");
  require(u_prefix.size() == j_diff, ErrorCode::PreconditionViolated,
          "prefix must cover exactly the agreeing indices");
  for (std::size_t j = 0; j < j_diff; ++j) {
    require(u_prefix[j].width == exp2_tower(base, static_cast<std::uint32_t>(j)),
            ErrorCode::DomainMismatch, "prefix width profile mismatch");
    if (j >= 1)
      require(u_prefix[j].bit(u_prefix[j - 1]) == w[j].bit(std::uint64_t(0)),
              ErrorCode::PreconditionViolated,
              "prefix is not consistent with w");
  }
  if (j_diff >= 1)
    require(u_prefix[0] == w[0], ErrorCode::PreconditionViolated,
            "u_0 must equal w_0");

  std::vector<Bitstring> full = u_prefix;
  auto wbar_prefix_compatible = [&](std::size_t upto) {
    std::vector<Bitstring> wb(wbar.begin(), wbar.begin() + upto + 1);
    return compatible(wb, full[upto]);
  };

  for (std::size_t j = j_diff; j <= j_max; ++j) {
    std::uint32_t width =
        static_cast<std::uint32_t>(exp2_tower(base, static_cast<std::uint32_t>(j)));
    Bitstring uj;
    if (j == 0) {
      // Consistency forces u_0 = w_0, and w_0 != wbar_0 already excludes
      // wbar at level zero.
      uj = w[0];
    } else if (j == j_diff && wbar_prefix_compatible(j - 1)) {
      // First difference while wbar is still alive: a constant string kills
      // every wbar witness at once and keeps w consistent.
      uj = Bitstring::repeated(w[j].bit(std::uint64_t(0)), width);
    } else {
      // Induction step: the w-chain entry gets w_j, everything else the
      // complement of wbar_j.
      uj = Bitstring::repeated(1 - wbar[j].bit(std::uint64_t(0)), width);
      std::uint64_t pos = full[j - 1].bits;
      std::uint64_t mask = std::uint64_t(1) << (width - 1 - pos);
      if (w[j].bit(std::uint64_t(0)))
        uj.bits |= mask;
      else
        uj.bits &= ~mask;
    }
    full.push_back(uj);
  }

  std::vector<Bitstring> result(full.begin() + static_cast<long>(j_diff), full.end());
  require(consistent(w, full), ErrorCode::InternalAssertion,
          "adversarial forks failed to keep w consistent");
  require(!compatible(wbar, full.back()), ErrorCode::InternalAssertion,
          "adversarial forks failed to exclude wbar");
  return result;
}

}  // namespace voigraph
