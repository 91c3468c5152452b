#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <random>
#include <set>
#include <vector>

#include "localmq/bits.hpp"
#include "localmq/errors.hpp"
#include "localmq/random.hpp"
#include "localmq/targets.hpp"

namespace localmq {

// Random subset of [n] with exactly k elements.
template <typename Rng>
Subset random_subset(int n, int k, Rng& rng) {
  if (k < 0 || k > n) throw ContractViolation("random_subset: need 0 <= k <= n");
  std::vector<int> idx(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) idx[static_cast<std::size_t>(i)] = i;
  Subset s = 0;
  for (int j = 0; j < k; ++j) {
    const auto r = j + static_cast<int>(uniform_below(rng, static_cast<std::uint64_t>(n - j)));
    std::swap(idx[static_cast<std::size_t>(j)], idx[static_cast<std::size_t>(r)]);
    s |= Subset{1} << idx[static_cast<std::size_t>(j)];
  }
  return s;
}

// t distinct monomials of degree <= max_degree with nonzero integer
// coefficients in [-B, B]. With `constant` the empty monomial is included.
template <typename Rng>
SparsePolynomial random_sparse_polynomial(int n, Domain domain, int t, int max_degree, int B, Rng& rng,
                                          bool constant = false) {
  if (t < 1 || B < 1 || max_degree < 0) throw ContractViolation("random_sparse_polynomial: bad parameters");
  std::map<Subset, double> terms;
  auto coeff = [&] {
    const auto v = static_cast<int>(uniform_below(rng, static_cast<std::uint64_t>(2 * B))) - B;
    return static_cast<double>(v >= 0 ? v + 1 : v);
  };
  if (constant) terms[0] = coeff();
  std::size_t guard = 0;
  while (static_cast<int>(terms.size()) < t) {
    if (++guard > 100000) throw ContractViolation("random_sparse_polynomial: too few distinct monomials");
    const int k = static_cast<int>(uniform_below(rng, static_cast<std::uint64_t>(std::min(max_degree, n) + 1)));
    terms.emplace(random_subset(n, k, rng), coeff());
  }
  return SparsePolynomial(n, domain, terms, t, static_cast<double>(B));
}

// Grows a tree by splitting uniformly chosen leaves (below max_depth, on a
// variable unused along the path) until it has `leaves` leaves or no leaf
// can split. Leaf labels are uniform +-1.
template <typename Rng>
DecisionTree random_tree(int n, Domain domain, int leaves, int max_depth, Rng& rng) {
  if (leaves < 1 || max_depth < 0) throw ContractViolation("random_tree: bad parameters");
  struct Proto {
    int var = -1, low = -1, high = -1, depth = 0;
    Subset used = 0;
  };
  std::vector<Proto> p(1);
  std::vector<int> open{0};
  int count = 1;
  while (count < leaves) {
    std::vector<int> splittable;
    for (int k : open)
      if (p[static_cast<std::size_t>(k)].depth < std::min(max_depth, n)) splittable.push_back(k);
    if (splittable.empty()) break;
    const int k = splittable[uniform_below(rng, splittable.size())];
    const Subset used = p[static_cast<std::size_t>(k)].used;
    std::vector<int> free;
    for (int i = 0; i < n; ++i)
      if (!contains(used, i)) free.push_back(i);
    const int v = free[uniform_below(rng, free.size())];
    Proto lo, hi;
    lo.depth = hi.depth = p[static_cast<std::size_t>(k)].depth + 1;
    lo.used = hi.used = used | (Subset{1} << v);
    p[static_cast<std::size_t>(k)].var = v;
    p[static_cast<std::size_t>(k)].low = static_cast<int>(p.size());
    p.push_back(lo);
    p[static_cast<std::size_t>(k)].high = static_cast<int>(p.size());
    p.push_back(hi);
    open.erase(std::find(open.begin(), open.end(), k));
    open.push_back(p[static_cast<std::size_t>(k)].low);
    open.push_back(p[static_cast<std::size_t>(k)].high);
    ++count;
  }
  DecisionTree::Builder b;
  auto emit = [&](auto&& self, int k) -> int {
    const Proto& q = p[static_cast<std::size_t>(k)];
    if (q.var < 0) return b.leaf(uniform_below(rng, 2) ? 1.0 : -1.0);
    const int lo = self(self, q.low);
    const int hi = self(self, q.high);
    return b.split(q.var, lo, hi);
  };
  const int root = emit(emit, 0);
  return std::move(b).build(n, domain, root);
}

// A path ("caterpillar") tree of the given depth: every internal node has one
// leaf child. depth + 1 leaves.
template <typename Rng>
DecisionTree random_path_tree(int n, Domain domain, int depth, Rng& rng) {
  if (depth < 0 || depth > n) throw ContractViolation("random_path_tree: need 0 <= depth <= n");
  std::vector<int> vars(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) vars[static_cast<std::size_t>(i)] = i;
  std::shuffle(vars.begin(), vars.end(), rng);
  DecisionTree::Builder b;
  int node = b.leaf(uniform_below(rng, 2) ? 1.0 : -1.0);
  for (int j = depth - 1; j >= 0; --j) {
    const int leaf = b.leaf(uniform_below(rng, 2) ? 1.0 : -1.0);
    node = uniform_below(rng, 2) ? b.split(vars[static_cast<std::size_t>(j)], leaf, node)
                                 : b.split(vars[static_cast<std::size_t>(j)], node, leaf);
  }
  return std::move(b).build(n, domain, node);
}

// s terms of `width` distinct literals with uniform signs.
template <typename Rng>
DnfFormula random_dnf(int n, Domain domain, int s, int width, Rng& rng) {
  if (s < 1 || width < 1 || width > n) throw ContractViolation("random_dnf: bad parameters");
  std::vector<std::vector<int>> terms;
  for (int j = 0; j < s; ++j) {
    std::vector<int> lits;
    for (int v : elements(random_subset(n, width, rng))) lits.push_back(uniform_below(rng, 2) ? v + 1 : -(v + 1));
    terms.push_back(std::move(lits));
  }
  return DnfFormula::from_literals(n, domain, terms);
}

// Means drawn uniformly from [-bound, bound].
template <typename Rng>
std::vector<double> random_means(int n, double bound, Rng& rng) {
  std::vector<double> mu(static_cast<std::size_t>(n));
  for (auto& m : mu) m = bound * (2.0 * uniform01(rng) - 1.0);
  return mu;
}

}  // namespace localmq
