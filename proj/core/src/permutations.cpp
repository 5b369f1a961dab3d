#include <algorithm>
#include <numeric>

#include "sbs/approx/symmetrized.hpp"

namespace sbs::approx {

Permutation identity_permutation(int g) {
  Permutation p(static_cast<std::size_t>(g));
  std::iota(p.begin(), p.end(), 0);
  return p;
}

std::vector<Permutation> all_permutations(int g) {
  if (g < 1) throw std::invalid_argument("all_permutations: g must be >= 1");
  if (g > kMaxSymmetrizedGroups)
    throw std::invalid_argument("symmetrization refused: g! components for g > 6");
  std::vector<Permutation> out;
  Permutation p = identity_permutation(g);
  do {
    out.push_back(p);
  } while (std::next_permutation(p.begin(), p.end()));
  return out;
}

bool is_permutation_of(const Permutation& sigma, int g) {
  if (static_cast<int>(sigma.size()) != g) return false;
  std::vector<bool> seen(static_cast<std::size_t>(g), false);
  for (int v : sigma) {
    if (v < 0 || v >= g || seen[static_cast<std::size_t>(v)]) return false;
    seen[static_cast<std::size_t>(v)] = true;
  }
  return true;
}

double log_factorial(int g) { return log_gamma(static_cast<double>(g) + 1.0); }

}  // namespace sbs::approx
