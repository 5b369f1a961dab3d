#pragma once

#include <cmath>
#include <concepts>
#include <stdexcept>
#include <vector>

#include "sbs/math.hpp"
#include "sbs/models/states.hpp"
#include "sbs/random.hpp"

namespace sbs::approx {

using models::Permutation;

inline constexpr int kMaxSymmetrizedGroups = 6;

/// All permutations of {0..g-1} in lexicographic order; the identity comes first.
/// Throws std::invalid_argument for g < 1 or g > kMaxSymmetrizedGroups.
std::vector<Permutation> all_permutations(int g);

Permutation identity_permutation(int g);
bool is_permutation_of(const Permutation& sigma, int g);
double log_factorial(int g);

/// A label-structured approximation whose components can be matched to state
/// labels through a permutation.
template <class B>
concept PermutableApprox = requires(const B& b, const typename B::State& s,
                                    const Permutation& sigma, Rng& rng) {
  { b.group_count() } -> std::convertible_to<int>;
  { b.log_density_permuted(s, sigma) } -> std::convertible_to<double>;
  { b.sample_permuted(sigma, rng) } -> std::convertible_to<typename B::State>;
};

/// Uniform mixture of `base` over all relabelings of its components.
/// The state's `sigma` field records the mixture component a draw came from.
template <PermutableApprox Base>
class Symmetrized {
 public:
  using State = typename Base::State;

  explicit Symmetrized(Base base)
      : base_(std::move(base)),
        perms_(all_permutations(base_.group_count())),
        log_count_(log_factorial(base_.group_count())) {}

  const Base& base() const { return base_; }
  int group_count() const { return base_.group_count(); }
  const std::vector<Permutation>& permutations() const { return perms_; }
  double log_perm_count() const { return log_count_; }

  /// log of (1/g!) sum_sigma q_sigma(state); ignores state.sigma.
  double log_density(const State& s) const {
    const auto terms = component_log_densities(s);
    return log_sum_exp(terms) - log_count_;
  }

  /// Joint density of (state, sigma): q_sigma(state) / g!.
  double log_joint_density(const State& s, const Permutation& sigma) const {
    return base_.log_density_permuted(s, sigma) - log_count_;
  }

  std::vector<double> component_log_densities(const State& s) const {
    std::vector<double> out(perms_.size());
    for (std::size_t i = 0; i < perms_.size(); ++i) out[i] = base_.log_density_permuted(s, perms_[i]);
    return out;
  }

  State sample(Rng& rng) const {
    auto idx = static_cast<std::size_t>(uniform01(rng) * static_cast<double>(perms_.size()));
    if (idx >= perms_.size()) idx = perms_.size() - 1;
    return base_.sample_permuted(perms_[idx], rng);
  }

 private:
  Base base_;
  std::vector<Permutation> perms_;
  double log_count_;
};

}  // namespace sbs::approx
