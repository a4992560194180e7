#pragma once

#include "voigraph/scm.hpp"

namespace voigraph {

struct MEUResult {
  Rational value;
  Policy witness;
  BigInt policies_examined;
};

struct SearchOptions {
  BigInt policy_budget = BigInt(1) << 24;
  int threads = 1;
};

/// Streams every deterministic policy for the scope in a fixed odometer
/// order: decisions sorted by name, cells in mixed-radix context order, last
/// decision's last cell fastest.
class PolicyEnumerator {
 public:
  PolicyEnumerator(const FiniteSCM& scm, const Scope& scope,
                   const BigInt& budget = BigInt(1) << 24);
  BigInt total() const { return total_; }
  bool next(Policy& out);  // false when exhausted

 private:
  std::vector<std::string> names_;
  std::vector<Value> cards_;
  std::vector<std::vector<Value>> rules_;
  BigInt total_;
  bool first_ = true;
  bool done_ = false;
};

BigInt deterministic_policy_count(const FiniteSCM& scm, const Scope& scope);

/// Exact maximum expected utility over deterministic policies following the
/// scope. Stochastic policies can never surpass it, so this is the MEU.
/// Ties are broken by enumeration order.
MEUResult meu(const FiniteSCM& scm, const Scope& scope,
              const SearchOptions& opt = {});

/// Value of information of `context` for `decision`: MEU with the context
/// minus MEU with it removed from the decision's scope. Never negative.
Rational voi(const FiniteSCM& scm, const Scope& scope,
             const std::string& decision, const std::string& context,
             const SearchOptions& opt = {});

/// Behavioral stochastic policy with exact rational mixtures.
struct StochasticPolicy {
  std::map<std::string, std::vector<std::vector<Rational>>> rules;  // cell -> dist
};

Rational expected_utility_stochastic(const FiniteSCM& scm, const Scope& scope,
                                     const StochasticPolicy& policy);

/// Samples random stochastic policies; true iff none exceeds the
/// deterministic MEU (exact comparison).
bool stochastic_bound_check(const FiniteSCM& scm, const Scope& scope,
                            std::size_t samples, std::uint64_t seed,
                            const SearchOptions& opt = {});

}  // namespace voigraph
