#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <json.hpp>

#include "localmq/bits.hpp"
#include "localmq/spectrum.hpp"

namespace localmq {

// ---------------------------------------------------------------------------
// Sparse multilinear polynomial f(x) = sum_S c_S prod_{i in S} x_i.

class SparsePolynomial {
 public:
  SparsePolynomial(int n, Domain domain, std::map<Subset, double> terms,
                   int sparsity_budget, double coeff_bound)
      : n_(n), domain_(domain), t_(sparsity_budget), bound_(coeff_bound) {
    check_dimension(n);
    if (sparsity_budget < 1) throw ContractViolation("sparsity budget must be positive");
    if (!(coeff_bound > 0)) throw ContractViolation("coefficient bound must be positive");
    for (const auto& [s, c] : terms) {
      if ((s & ~full_set(n)) != 0) throw ContractViolation("term uses a variable outside [n]");
      if (c == 0.0) continue;
      if (std::abs(c) > coeff_bound)
        throw ContractViolation("coefficient exceeds the bound B");
      terms_.emplace_back(s, c);
    }
    if (static_cast<int>(terms_.size()) > sparsity_budget)
      throw ContractViolation("polynomial has more than t nonzero terms");
  }

  // Convenience: sparsity and bound taken from the terms themselves.
  static SparsePolynomial from_terms(int n, Domain domain,
                                     const std::map<Subset, double>& terms) {
    int t = 0;
    double b = 0;
    for (const auto& [s, c] : terms)
      if (c != 0.0) {
        ++t;
        b = std::max(b, std::abs(c));
      }
    return SparsePolynomial(n, domain, terms, std::max(t, 1), b > 0 ? b : 1.0);
  }

  int dimension() const { return n_; }
  Domain domain() const { return domain_; }
  int sparsity_budget() const { return t_; }
  double coeff_bound() const { return bound_; }
  const std::vector<std::pair<Subset, double>>& terms() const { return terms_; }

  int degree() const {
    int d = 0;
    for (const auto& [s, c] : terms_) d = std::max(d, set_size(s));
    return d;
  }

  double eval_bits(std::uint32_t bits) const {
    double v = 0;
    if (domain_ == Domain::zero_one) {
      for (const auto& [s, c] : terms_)
        if (is_subset(s, bits)) v += c;
    } else {
      for (const auto& [s, c] : terms_) v += c * parity_sign(s, bits);
    }
    return v;
  }

  std::map<Subset, double> term_map() const {
    return {terms_.begin(), terms_.end()};
  }

 private:
  int n_;
  Domain domain_;
  int t_;
  double bound_;
  std::vector<std::pair<Subset, double>> terms_;  // ascending mask order
};

// ---------------------------------------------------------------------------
// Decision tree over Boolean variables with +-1 leaves.

class DecisionTree {
 public:
  struct Node {
    int var = -1;     // -1 for a leaf
    int low = -1;     // child for bit 0 (x_i = 0 or -1)
    int high = -1;    // child for bit 1 (x_i = 1 or +1)
    double label = 0; // leaf label, +-1
  };

  // Builders produce a node index inside `nodes`; the tree takes ownership.
  class Builder {
   public:
    int leaf(double label) {
      if (label != 1.0 && label != -1.0)
        throw ContractViolation("decision-tree leaves must be labelled +-1");
      nodes_.push_back(Node{-1, -1, -1, label});
      return static_cast<int>(nodes_.size()) - 1;
    }
    int split(int var, int low, int high) {
      nodes_.push_back(Node{var, low, high, 0});
      return static_cast<int>(nodes_.size()) - 1;
    }
    DecisionTree build(int n, Domain domain, int root) && {
      return DecisionTree(n, domain, std::move(nodes_), root);
    }

   private:
    std::vector<Node> nodes_;
  };

  DecisionTree(int n, Domain domain, std::vector<Node> nodes, int root)
      : n_(n), domain_(domain) {
    check_dimension(n);
    // Re-pack reachable nodes in preorder so the structure is canonical.
    root_ = copy_from(nodes, root, 0);
    compute_stats();
  }

  static DecisionTree constant(int n, Domain domain, double label) {
    Builder b;
    int r = b.leaf(label);
    return std::move(b).build(n, domain, r);
  }

  int dimension() const { return n_; }
  Domain domain() const { return domain_; }
  int leaf_count() const { return leaves_; }
  int depth() const { return depth_; }
  int root() const { return root_; }
  const std::vector<Node>& nodes() const { return nodes_; }

  double eval_bits(std::uint32_t bits) const {
    int k = root_;
    while (nodes_[static_cast<std::size_t>(k)].var >= 0) {
      const Node& nd = nodes_[static_cast<std::size_t>(k)];
      k = contains(bits, nd.var) ? nd.high : nd.low;
    }
    return nodes_[static_cast<std::size_t>(k)].label;
  }

  struct Path {
    Subset vars = 0;
    Subset high_bits = 0;  // subset of vars taken on the high branch
    double label = 0;
  };

  std::vector<Path> paths() const {
    std::vector<Path> out;
    collect_paths(root_, Path{}, out);
    return out;
  }

 private:
  int copy_from(const std::vector<Node>& src, int k, int guard) {
    if (k < 0 || k >= static_cast<int>(src.size()))
      throw ContractViolation("decision tree references a missing node");
    if (guard > kMaxDimension + 1)
      throw ContractViolation("decision tree is deeper than the dimension allows");
    const Node& s = src[static_cast<std::size_t>(k)];
    if (s.var < 0) {
      if (s.label != 1.0 && s.label != -1.0)
        throw ContractViolation("decision-tree leaves must be labelled +-1");
      nodes_.push_back(s);
      return static_cast<int>(nodes_.size()) - 1;
    }
    if (s.var >= n_) throw ContractViolation("decision tree splits on a variable outside [n]");
    const int idx = static_cast<int>(nodes_.size());
    nodes_.push_back(Node{s.var, -1, -1, 0});
    const int lo = copy_from(src, s.low, guard + 1);
    const int hi = copy_from(src, s.high, guard + 1);
    nodes_[static_cast<std::size_t>(idx)].low = lo;
    nodes_[static_cast<std::size_t>(idx)].high = hi;
    return idx;
  }

  void compute_stats() {
    leaves_ = 0;
    depth_ = 0;
    walk(root_, 0, 0);
  }

  void walk(int k, int d, Subset seen) {
    const Node& nd = nodes_[static_cast<std::size_t>(k)];
    if (nd.var < 0) {
      ++leaves_;
      depth_ = std::max(depth_, d);
      return;
    }
    if (contains(seen, nd.var))
      throw ContractViolation("variable repeats on a root-to-leaf path");
    const Subset next = seen | (Subset{1} << nd.var);
    walk(nd.low, d + 1, next);
    walk(nd.high, d + 1, next);
  }

  void collect_paths(int k, Path p, std::vector<Path>& out) const {
    const Node& nd = nodes_[static_cast<std::size_t>(k)];
    if (nd.var < 0) {
      p.label = nd.label;
      out.push_back(p);
      return;
    }
    const Subset bit = Subset{1} << nd.var;
    Path lo = p, hi = p;
    lo.vars |= bit;
    hi.vars |= bit;
    hi.high_bits |= bit;
    collect_paths(nd.low, lo, out);
    collect_paths(nd.high, hi, out);
  }

  int n_;
  Domain domain_;
  std::vector<Node> nodes_;
  int root_ = 0;
  int leaves_ = 0;
  int depth_ = 0;
};

// ---------------------------------------------------------------------------
// DNF formula; +1 when some term is satisfied.

class DnfFormula {
 public:
  struct Term {
    Subset positive = 0;  // literals x_i
    Subset negative = 0;  // literals not x_i
  };

  DnfFormula(int n, Domain domain, std::vector<Term> terms)
      : n_(n), domain_(domain), terms_(std::move(terms)) {
    check_dimension(n);
    for (const auto& t : terms_) {
      if ((t.positive & t.negative) != 0)
        throw ContractViolation("DNF term contains a variable twice");
      if (((t.positive | t.negative) & ~full_set(n)) != 0)
        throw ContractViolation("DNF term uses a variable outside [n]");
    }
  }

  // Signed 1-based literals per term, e.g. {{1, -2}, {3}}.
  static DnfFormula from_literals(int n, Domain domain,
                                  const std::vector<std::vector<int>>& terms) {
    std::vector<Term> out;
    for (const auto& lits : terms) {
      Term t;
      for (int l : lits) {
        const int v = std::abs(l);
        if (l == 0 || v > n) throw ContractViolation("DNF literal outside [1, n]");
        const Subset bit = Subset{1} << (v - 1);
        if ((t.positive | t.negative) & bit)
          throw ContractViolation("DNF term contains a variable twice");
        (l > 0 ? t.positive : t.negative) |= bit;
      }
      out.push_back(t);
    }
    return DnfFormula(n, domain, std::move(out));
  }

  int dimension() const { return n_; }
  Domain domain() const { return domain_; }
  int size() const { return static_cast<int>(terms_.size()); }
  const std::vector<Term>& terms() const { return terms_; }

  double eval_bits(std::uint32_t bits) const {
    for (const auto& t : terms_)
      if ((bits & t.positive) == t.positive && (bits & t.negative) == 0) return 1.0;
    return -1.0;
  }

  // Keeps only the terms with at most `width` literals.
  DnfFormula drop_wide_terms(int width) const {
    std::vector<Term> kept;
    for (const auto& t : terms_)
      if (set_size(t.positive | t.negative) <= width) kept.push_back(t);
    return DnfFormula(n_, domain_, std::move(kept));
  }

 private:
  int n_;
  Domain domain_;
  std::vector<Term> terms_;
};

// ---------------------------------------------------------------------------
// Arbitrary label function, used for constructions that are not one of the
// three concrete classes (embedded functions, PRF-based separations).

struct CallableTarget {
  int n = 0;
  Domain domain = Domain::plus_minus;
  bool boolean = true;
  std::function<double(std::uint32_t)> fn;
  std::string name = "callable";
};

using TargetFunction =
    std::variant<SparsePolynomial, DecisionTree, DnfFormula, CallableTarget>;

inline int dimension(const TargetFunction& f) {
  return std::visit(
      [](const auto& t) {
        if constexpr (std::is_same_v<std::decay_t<decltype(t)>, CallableTarget>)
          return t.n;
        else
          return t.dimension();
      },
      f);
}

inline Domain domain_of(const TargetFunction& f) {
  return std::visit(
      [](const auto& t) {
        if constexpr (std::is_same_v<std::decay_t<decltype(t)>, CallableTarget>)
          return t.domain;
        else
          return t.domain();
      },
      f);
}

inline bool is_boolean(const TargetFunction& f) {
  if (std::holds_alternative<SparsePolynomial>(f)) return false;
  if (const auto* c = std::get_if<CallableTarget>(&f)) return c->boolean;
  return true;
}

inline std::string kind_name(const TargetFunction& f) {
  switch (f.index()) {
    case 0: return "sparse_poly";
    case 1: return "decision_tree";
    case 2: return "dnf";
    default: return std::get<CallableTarget>(f).name;
  }
}

// Unchecked evaluation on a raw bit pattern of the right dimension.
inline double evaluate_bits(const TargetFunction& f, std::uint32_t bits) {
  switch (f.index()) {
    case 0: return std::get<0>(f).eval_bits(bits);
    case 1: return std::get<1>(f).eval_bits(bits);
    case 2: return std::get<2>(f).eval_bits(bits);
    default: return std::get<3>(f).fn(bits);
  }
}

inline double evaluate(const TargetFunction& f, const Point& x) {
  if (x.n != dimension(f))
    throw ContractViolation("evaluate: point has dimension " + std::to_string(x.n) +
                            ", target has " + std::to_string(dimension(f)));
  if (x.domain != domain_of(f))
    throw ContractViolation("evaluate: point domain " + std::string(to_string(x.domain)) +
                            " does not match target domain " +
                            std::string(to_string(domain_of(f))));
  return evaluate_bits(f, x.bits);
}

// ---------------------------------------------------------------------------
// Truncations.

// f^d: the terms of f of degree at most d.
inline SparsePolynomial truncate_polynomial(const SparsePolynomial& f, int d) {
  if (d < 0) throw ContractViolation("truncation degree must be nonnegative");
  std::map<Subset, double> kept;
  for (const auto& [s, c] : f.terms())
    if (set_size(s) <= d) kept.emplace(s, c);
  return SparsePolynomial(f.dimension(), f.domain(), kept, f.sparsity_budget(),
                          f.coeff_bound());
}

// Cuts every path longer than d and caps it with a leaf labelled `cap_label`.
inline DecisionTree truncate_tree(const DecisionTree& g, int d, double cap_label = -1.0) {
  if (d < 1) throw ContractViolation("tree truncation depth must be at least 1");
  DecisionTree::Builder b;
  const auto& nodes = g.nodes();
  std::function<int(int, int)> rec = [&](int k, int depth) -> int {
    const auto& nd = nodes[static_cast<std::size_t>(k)];
    if (nd.var < 0) return b.leaf(nd.label);
    if (depth == d) return b.leaf(cap_label);
    const int lo = rec(nd.low, depth + 1);
    const int hi = rec(nd.high, depth + 1);
    return b.split(nd.var, lo, hi);
  };
  const int root = rec(g.root(), 0);
  return std::move(b).build(g.dimension(), g.domain(), root);
}

// Exact expansion of the tree as a polynomial in the requested basis, via
// g(x) = sum_paths label * prod_{i in path} 1[x_i = b_i].
inline FourierSpectrum tree_to_polynomial(const DecisionTree& g, const Basis& basis) {
  check_dimension(g.dimension(), kMaxEnumerationDimension);
  if (basis.kind == BasisKind::product_mu &&
      static_cast<int>(basis.means.size()) != g.dimension())
    throw ContractViolation("product basis has the wrong number of means");
  FourierSpectrum out{g.dimension(), basis, {}};
  for (const auto& p : g.paths()) {
    // Each indicator 1[x_i = b] = a0 + a1 * phi_i(x) in the chosen basis.
    const auto vars = elements(p.vars);
    std::vector<std::pair<double, double>> fac;
    for (int i : vars) {
      const bool hi = contains(p.high_bits, i);
      double a0 = 0, a1 = 0;
      switch (basis.kind) {
        case BasisKind::uniform_pm:
          a0 = 0.5;
          a1 = hi ? 0.5 : -0.5;
          break;
        case BasisKind::monomial_01:
          a0 = hi ? 0.0 : 1.0;
          a1 = hi ? 1.0 : -1.0;
          break;
        case BasisKind::product_mu: {
          const double mu = basis.means[static_cast<std::size_t>(i)];
          const double sigma = std::sqrt(1.0 - mu * mu);
          a0 = hi ? (1.0 + mu) / 2.0 : (1.0 - mu) / 2.0;
          a1 = hi ? sigma / 2.0 : -sigma / 2.0;
          break;
        }
      }
      fac.emplace_back(a0, a1);
    }
    const std::size_t k = vars.size();
    for (std::uint32_t pick = 0; pick < (1u << k); ++pick) {
      double c = p.label;
      Subset s = 0;
      for (std::size_t j = 0; j < k; ++j) {
        if ((pick >> j) & 1u) {
          c *= fac[j].second;
          s |= Subset{1} << vars[j];
        } else {
          c *= fac[j].first;
        }
      }
      if (c != 0.0) out.coeffs[s] += c;
    }
  }
  std::erase_if(out.coeffs, [](const auto& kv) { return std::abs(kv.second) <= 1e-15; });
  return out;
}

// ---------------------------------------------------------------------------
// JSON.

namespace detail {
inline nlohmann::json tree_node_json(const DecisionTree& g, int k) {
  const auto& nd = g.nodes()[static_cast<std::size_t>(k)];
  if (nd.var < 0) return {{"leaf", static_cast<int>(nd.label)}};
  return {{"var", nd.var + 1},
          {"low", tree_node_json(g, nd.low)},
          {"high", tree_node_json(g, nd.high)}};
}

inline int tree_node_from_json(const nlohmann::json& j, DecisionTree::Builder& b, int n) {
  if (j.contains("leaf")) return b.leaf(j.at("leaf").get<double>());
  const int v = j.at("var").get<int>();
  if (v < 1 || v > n) throw ContractViolation("tree variable outside [1, n]");
  const int lo = tree_node_from_json(j.at("low"), b, n);
  const int hi = tree_node_from_json(j.at("high"), b, n);
  return b.split(v - 1, lo, hi);
}
}  // namespace detail

inline nlohmann::json to_json(const TargetFunction& f) {
  nlohmann::json j{{"kind", kind_name(f)},
                   {"n", dimension(f)},
                   {"domain", std::string(to_string(domain_of(f)))}};
  if (const auto* p = std::get_if<SparsePolynomial>(&f)) {
    nlohmann::json terms = nlohmann::json::array();
    for (const auto& [s, c] : p->terms())
      terms.push_back({{"vars", to_one_based(s)}, {"coeff", c}});
    j["terms"] = terms;
    j["t"] = p->sparsity_budget();
    j["B"] = p->coeff_bound();
  } else if (const auto* g = std::get_if<DecisionTree>(&f)) {
    j["root"] = detail::tree_node_json(*g, g->root());
    j["leaves"] = g->leaf_count();
    j["depth"] = g->depth();
  } else if (const auto* dnf = std::get_if<DnfFormula>(&f)) {
    nlohmann::json terms = nlohmann::json::array();
    for (const auto& t : dnf->terms()) {
      std::vector<int> lits;
      for (int i = 0; i < dnf->dimension(); ++i) {
        if (contains(t.positive, i)) lits.push_back(i + 1);
        if (contains(t.negative, i)) lits.push_back(-(i + 1));
      }
      terms.push_back(lits);
    }
    j["terms"] = terms;
  } else {
    throw ContractViolation("callable targets have no JSON form");
  }
  return j;
}

inline TargetFunction target_from_json(const nlohmann::json& j) {
  const auto kind = j.at("kind").get<std::string>();
  const int n = j.at("n").get<int>();
  check_dimension(n);
  const Domain domain = domain_from_string(j.value("domain", std::string("plus_minus")));
  if (kind == "sparse_poly") {
    std::map<Subset, double> terms;
    for (const auto& e : j.at("terms"))
      terms[from_one_based(e.at("vars").get<std::vector<int>>(), n)] +=
          e.at("coeff").get<double>();
    if (j.contains("t") && j.contains("B"))
      return SparsePolynomial(n, domain, terms, j.at("t").get<int>(), j.at("B").get<double>());
    return SparsePolynomial::from_terms(n, domain, terms);
  }
  if (kind == "decision_tree") {
    DecisionTree::Builder b;
    const int root = detail::tree_node_from_json(j.at("root"), b, n);
    return std::move(b).build(n, domain, root);
  }
  if (kind == "dnf")
    return DnfFormula::from_literals(n, domain,
                                     j.at("terms").get<std::vector<std::vector<int>>>());
  throw ContractViolation("unknown target kind '" + kind + "'");
}

}  // namespace localmq
