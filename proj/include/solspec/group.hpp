#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <numeric>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "solspec/error.hpp"
#include "solspec/verify_report.hpp"

namespace solspec {

/// Materialization cap for group enumeration.
inline constexpr std::size_t kDefaultEnumCap = 200'000;

enum class GroupKind { cyclic, sl2_mod, permutation };

inline std::string kind_name(GroupKind k) {
  switch (k) {
    case GroupKind::cyclic: return "cyclic";
    case GroupKind::sl2_mod: return "sl2_mod";
    case GroupKind::permutation: return "permutation";
  }
  return "?";
}

/// Tagged value: residue mod m, 2x2 determinant-1 matrix over Z/m, or a
/// permutation of {0..n-1}.  Canonical form: residues and matrix entries
/// reduced into [0, m).
struct GroupElem {
  GroupKind kind = GroupKind::cyclic;
  std::uint64_t modulus_or_degree = 1;
  std::uint64_t residue = 0;                 // cyclic
  std::array<std::uint64_t, 4> mat{};        // sl2_mod, row-major (a,b,c,d)
  std::vector<std::uint32_t> perm;           // permutation images

  bool operator==(const GroupElem&) const = default;

  /// Flat integer key; unique per element within one group.
  std::vector<std::uint64_t> key() const {
    switch (kind) {
      case GroupKind::cyclic: return {residue};
      case GroupKind::sl2_mod: return {mat[0], mat[1], mat[2], mat[3]};
      case GroupKind::permutation: {
        std::vector<std::uint64_t> k(perm.begin(), perm.end());
        return k;
      }
    }
    return {};
  }

  std::string to_string() const {
    switch (kind) {
      case GroupKind::cyclic:
        return std::to_string(residue) + " (mod " +
               std::to_string(modulus_or_degree) + ")";
      case GroupKind::sl2_mod:
        return "[[" + std::to_string(mat[0]) + "," + std::to_string(mat[1]) +
               "],[" + std::to_string(mat[2]) + "," + std::to_string(mat[3]) +
               "]] (mod " + std::to_string(modulus_or_degree) + ")";
      case GroupKind::permutation: {
        std::string s = "[";
        for (std::size_t i = 0; i < perm.size(); ++i) {
          if (i) s += ",";
          s += std::to_string(perm[i]);
        }
        return s + "]";
      }
    }
    return "?";
  }
};

inline GroupElem cyclic_elem(std::uint64_t r, std::uint64_t m) {
  if (m == 0) throw Error("cyclic modulus must be positive");
  GroupElem e;
  e.kind = GroupKind::cyclic;
  e.modulus_or_degree = m;
  e.residue = r % m;
  return e;
}

inline GroupElem sl2_elem(std::uint64_t a, std::uint64_t b, std::uint64_t c,
                          std::uint64_t d, std::uint64_t m) {
  if (m < 2) throw Error("sl2 modulus must be at least 2");
  GroupElem e;
  e.kind = GroupKind::sl2_mod;
  e.modulus_or_degree = m;
  e.mat = {a % m, b % m, c % m, d % m};
  // det = ad - bc must be 1 mod m; computed without underflow.
  std::uint64_t det =
      (e.mat[0] * e.mat[3] % m + m - e.mat[1] * e.mat[2] % m) % m;
  if (det != 1 % m)
    throw Error("sl2 element has determinant " + std::to_string(det) +
                " != 1 (mod " + std::to_string(m) + ")");
  return e;
}

inline GroupElem perm_elem(std::vector<std::uint32_t> images) {
  GroupElem e;
  e.kind = GroupKind::permutation;
  e.modulus_or_degree = images.size();
  std::vector<bool> seen(images.size(), false);
  for (auto v : images) {
    if (v >= images.size() || seen[v])
      throw Error("permutation images are not a bijection");
    seen[v] = true;
  }
  e.perm = std::move(images);
  return e;
}

/// S = [[0,-1],[1,0]] reduced mod m.
inline GroupElem sl2_S(std::uint64_t m) { return sl2_elem(0, m - 1, 1, 0, m); }
/// T = [[1,1],[0,1]] reduced mod m.
inline GroupElem sl2_T(std::uint64_t m) { return sl2_elem(1, 1, 0, 1, m); }

/// Product a*b.  Permutations compose as (a*b)(x) = a(b(x)).
inline GroupElem group_mul(const GroupElem& a, const GroupElem& b) {
  if (a.kind != b.kind || a.modulus_or_degree != b.modulus_or_degree)
    throw Error("group element mismatch: " + a.to_string() + " vs " +
                b.to_string());
  switch (a.kind) {
    case GroupKind::cyclic:
      return cyclic_elem(a.residue + b.residue, a.modulus_or_degree);
    case GroupKind::sl2_mod: {
      std::uint64_t m = a.modulus_or_degree;
      return sl2_elem(a.mat[0] * b.mat[0] + a.mat[1] * b.mat[2],
                      a.mat[0] * b.mat[1] + a.mat[1] * b.mat[3],
                      a.mat[2] * b.mat[0] + a.mat[3] * b.mat[2],
                      a.mat[2] * b.mat[1] + a.mat[3] * b.mat[3], m);
    }
    case GroupKind::permutation: {
      std::vector<std::uint32_t> img(a.perm.size());
      for (std::size_t x = 0; x < img.size(); ++x) img[x] = a.perm[b.perm[x]];
      return perm_elem(std::move(img));
    }
  }
  throw Error("unreachable group kind");
}

inline GroupElem group_inv(const GroupElem& a) {
  switch (a.kind) {
    case GroupKind::cyclic:
      return cyclic_elem(a.modulus_or_degree - a.residue % a.modulus_or_degree,
                         a.modulus_or_degree);
    case GroupKind::sl2_mod: {
      // Inverse of a determinant-1 matrix: [[d,-b],[-c,a]].
      std::uint64_t m = a.modulus_or_degree;
      return sl2_elem(a.mat[3], (m - a.mat[1]) % m, (m - a.mat[2]) % m,
                      a.mat[0], m);
    }
    case GroupKind::permutation: {
      std::vector<std::uint32_t> img(a.perm.size());
      for (std::size_t x = 0; x < a.perm.size(); ++x)
        img[a.perm[x]] = static_cast<std::uint32_t>(x);
      return perm_elem(std::move(img));
    }
  }
  throw Error("unreachable group kind");
}

/// Finite group with a materialized, deterministically ordered element list.
/// Index 0 is the identity.  Immutable after construction.
class FiniteGroup {
 public:
  static FiniteGroup cyclic(std::uint64_t m, std::size_t cap = kDefaultEnumCap) {
    if (m == 0) throw Error("cyclic modulus must be positive");
    if (m > cap)
      throw Error("cyclic group of order " + std::to_string(m) +
                  " exceeds enumeration cap " + std::to_string(cap));
    FiniteGroup g;
    g.kind_ = GroupKind::cyclic;
    g.elements_.reserve(m);
    for (std::uint64_t r = 0; r < m; ++r)
      g.elements_.push_back(cyclic_elem(r, m));
    if (m > 1) g.generator_indices_ = {1};
    g.finish();
    return g;
  }

  static FiniteGroup sl2_mod(std::uint64_t m, std::size_t cap = kDefaultEnumCap) {
    if (m < 2) throw Error("sl2 modulus must be at least 2");
    std::uint64_t predicted = sl2_order(m);
    if (predicted > cap)
      throw Error("SL(2,Z/" + std::to_string(m) + "Z) has order " +
                  std::to_string(predicted) + ", exceeding enumeration cap " +
                  std::to_string(cap));
    GroupElem id = sl2_elem(1, 0, 0, 1, m);
    FiniteGroup g = closure(GroupKind::sl2_mod, id, {sl2_S(m), sl2_T(m)}, cap);
    if (g.order() != predicted)
      throw Error("SL(2,Z/" + std::to_string(m) + "Z) enumeration found " +
                  std::to_string(g.order()) + " elements, expected " +
                  std::to_string(predicted));
    return g;
  }

  static FiniteGroup permutation(std::uint32_t degree,
                                 const std::vector<GroupElem>& gens,
                                 std::size_t cap = kDefaultEnumCap) {
    if (degree == 0) throw Error("permutation degree must be positive");
    std::vector<std::uint32_t> id_img(degree);
    std::iota(id_img.begin(), id_img.end(), 0u);
    GroupElem id = perm_elem(std::move(id_img));
    for (const auto& gen : gens) {
      if (gen.kind != GroupKind::permutation || gen.modulus_or_degree != degree)
        throw Error("permutation generator of wrong degree: " +
                    gen.to_string());
    }
    return closure(GroupKind::permutation, id, gens, cap);
  }

  GroupKind kind() const { return kind_; }
  std::size_t order() const { return elements_.size(); }
  const GroupElem& element(std::uint32_t idx) const { return elements_[idx]; }
  const GroupElem& identity() const { return elements_[0]; }
  const std::vector<std::uint32_t>& generator_indices() const {
    return generator_indices_;
  }

  bool contains(const GroupElem& e) const {
    return index_.find(e.key()) != index_.end();
  }

  std::uint32_t index_of(const GroupElem& e) const {
    auto it = index_.find(e.key());
    if (it == index_.end())
      throw Error("element " + e.to_string() + " not in " + kind_name(kind_) +
                  " group of order " + std::to_string(order()));
    return it->second;
  }

  std::uint32_t mul(std::uint32_t a, std::uint32_t b) const {
    if (kind_ == GroupKind::cyclic) {
      std::uint64_t m = elements_.size();
      return static_cast<std::uint32_t>((std::uint64_t(a) + b) % m);
    }
    if (!mul_table_.empty()) return mul_table_[a * order() + b];
    return index_of(group_mul(elements_[a], elements_[b]));
  }

  std::uint32_t inv(std::uint32_t a) const { return inv_table_[a]; }

 private:
  /// Right-multiplication closure from the identity; BFS order is the
  /// element order, so indices are reproducible across runs.
  static FiniteGroup closure(GroupKind kind, const GroupElem& id,
                             const std::vector<GroupElem>& gens,
                             std::size_t cap) {
    FiniteGroup g;
    g.kind_ = kind;
    g.elements_.push_back(id);
    g.index_.emplace(id.key(), 0u);
    for (std::size_t head = 0; head < g.elements_.size(); ++head) {
      GroupElem cur = g.elements_[head];  // copy: elements_ may reallocate
      for (const auto& gen : gens) {
        GroupElem next = group_mul(cur, gen);
        auto [it, fresh] = g.index_.emplace(
            next.key(), static_cast<std::uint32_t>(g.elements_.size()));
        if (fresh) {
          if (g.elements_.size() >= cap)
            throw Error(kind_name(kind) +
                        " group enumeration exceeds cap " +
                        std::to_string(cap));
          g.elements_.push_back(std::move(next));
        }
      }
    }
    for (const auto& gen : gens)
      g.generator_indices_.push_back(g.index_.at(gen.key()));
    g.finish();
    return g;
  }

  /// |SL(2,Z/m)| = m^3 * prod_{p | m} (1 - 1/p^2); used only as a cap guard
  /// and consistency check against the enumeration.
  static std::uint64_t sl2_order(std::uint64_t m) {
    std::uint64_t num = m * m * m;
    std::uint64_t n = m;
    for (std::uint64_t p = 2; p * p <= n; ++p) {
      if (n % p) continue;
      while (n % p == 0) n /= p;
      num = num / (p * p) * (p * p - 1);
    }
    if (n > 1) num = num / (n * n) * (n * n - 1);
    return num;
  }

  void finish() {
    if (index_.empty())
      for (std::uint32_t i = 0; i < elements_.size(); ++i)
        index_.emplace(elements_[i].key(), i);
    inv_table_.resize(order());
    for (std::uint32_t i = 0; i < order(); ++i)
      inv_table_[i] = index_of(group_inv(elements_[i]));
    // Dense multiplication table for small non-cyclic groups.
    if (kind_ != GroupKind::cyclic && order() <= 1500) {
      mul_table_.resize(order() * order());
      for (std::uint32_t a = 0; a < order(); ++a)
        for (std::uint32_t b = 0; b < order(); ++b)
          mul_table_[a * order() + b] =
              index_of(group_mul(elements_[a], elements_[b]));
    }
  }

  GroupKind kind_ = GroupKind::cyclic;
  std::vector<GroupElem> elements_;
  std::map<std::vector<std::uint64_t>, std::uint32_t> index_;
  std::vector<std::uint32_t> generator_indices_;
  std::vector<std::uint32_t> inv_table_;
  std::vector<std::uint32_t> mul_table_;
};

/// Chain of deck groups with one-step downward projections.  Fields are
/// public so verification tooling can exercise corrupted chains; library
/// constructors always produce chains satisfying the invariants.
struct DeckChain {
  std::vector<FiniteGroup> levels;  // levels[i] holds Gamma_{i+1}
  /// projections[i][g] = index in levels[i] of the image of levels[i+1][g].
  std::vector<std::vector<std::uint32_t>> projections;
  std::vector<std::uint64_t> kernel_sizes;

  std::size_t depth() const { return levels.size(); }

  /// 1-based level accessor matching the Gamma_1..Gamma_k numbering.
  const FiniteGroup& group(std::size_t level) const {
    if (level < 1 || level > depth())
      throw Error("level " + std::to_string(level) + " out of range [1," +
                  std::to_string(depth()) + "]");
    return levels[level - 1];
  }

  /// Image at level-1 of element index idx at `level` (level >= 2).
  std::uint32_t project_down(std::size_t level, std::uint32_t idx) const {
    if (level < 2 || level > depth())
      throw Error("projection source level out of range");
    return projections[level - 2][idx];
  }

  std::uint32_t project_to(std::size_t from, std::size_t to,
                           std::uint32_t idx) const {
    if (to > from) throw Error("projection target above source");
    for (std::size_t l = from; l > to; --l) idx = project_down(l, idx);
    return idx;
  }
};

/// lcm(2..k) in checked 64-bit arithmetic.
inline std::uint64_t lcm_ladder(std::uint64_t k) {
  if (k < 2) throw Error("lcm_ladder requires k >= 2");
  std::uint64_t l = 1;
  for (std::uint64_t i = 2; i <= k; ++i) {
    std::uint64_t g = std::gcd(l, i);
    std::uint64_t r;
    if (__builtin_mul_overflow(l / g, i, &r))
      throw Error("lcm(2.." + std::to_string(k) + ") overflows 64 bits");
    l = r;
  }
  return l;
}

/// Chain of cyclic groups Z/m_1 <- Z/m_2 <- ... with reduction projections.
/// Requires m_i | m_{i+1}.
inline DeckChain cyclic_ladder(const std::vector<std::uint64_t>& moduli,
                               std::size_t cap = kDefaultEnumCap) {
  if (moduli.empty()) throw Error("cyclic ladder needs at least one modulus");
  DeckChain chain;
  for (std::size_t i = 0; i < moduli.size(); ++i) {
    if (i > 0) {
      if (moduli[i] % moduli[i - 1] != 0)
        throw Error("cyclic ladder moduli must divide: " +
                    std::to_string(moduli[i - 1]) + " does not divide " +
                    std::to_string(moduli[i]));
      chain.kernel_sizes.push_back(moduli[i] / moduli[i - 1]);
    }
    chain.levels.push_back(FiniteGroup::cyclic(moduli[i], cap));
  }
  for (std::size_t i = 0; i + 1 < moduli.size(); ++i) {
    std::vector<std::uint32_t> table(moduli[i + 1]);
    for (std::uint64_t g = 0; g < moduli[i + 1]; ++g)
      table[g] = static_cast<std::uint32_t>(g % moduli[i]);
    chain.projections.push_back(std::move(table));
  }
  return chain;
}

/// Gamma_n = Z/l(n+1)Z for n = 1..depth.
inline DeckChain cyclic_chain(std::size_t depth,
                              std::size_t cap = kDefaultEnumCap) {
  if (depth < 1) throw Error("chain depth must be at least 1");
  std::vector<std::uint64_t> moduli;
  for (std::size_t n = 1; n <= depth; ++n)
    moduli.push_back(lcm_ladder(n + 1));
  return cyclic_ladder(moduli, cap);
}

namespace detail {

/// Builds projection tables by mapping each element through `image` and
/// looking it up below; also derives kernel sizes and checks exact division.
inline void link_chain_levels(
    DeckChain& chain,
    const std::function<GroupElem(std::size_t, const GroupElem&)>& image) {
  for (std::size_t i = 0; i + 1 < chain.levels.size(); ++i) {
    const FiniteGroup& hi = chain.levels[i + 1];
    const FiniteGroup& lo = chain.levels[i];
    if (hi.order() % lo.order() != 0)
      throw Error("level order " + std::to_string(hi.order()) +
                  " not divisible by " + std::to_string(lo.order()));
    chain.kernel_sizes.push_back(hi.order() / lo.order());
    std::vector<std::uint32_t> table(hi.order());
    for (std::uint32_t g = 0; g < hi.order(); ++g)
      table[g] = lo.index_of(image(i, hi.element(g)));
    chain.projections.push_back(std::move(table));
  }
}

}  // namespace detail

/// Gamma_n = SL(2, Z/l(n+1)Z) with entrywise-reduction projections;
/// generators are the images of S and T.
inline DeckChain sl2_chain(std::size_t depth,
                           std::size_t cap = kDefaultEnumCap) {
  if (depth < 1) throw Error("chain depth must be at least 1");
  DeckChain chain;
  for (std::size_t n = 1; n <= depth; ++n)
    chain.levels.push_back(FiniteGroup::sl2_mod(lcm_ladder(n + 1), cap));
  detail::link_chain_levels(chain, [&](std::size_t i, const GroupElem& e) {
    std::uint64_t m = chain.levels[i].element(0).modulus_or_degree;
    return sl2_elem(e.mat[0], e.mat[1], e.mat[2], e.mat[3], m);
  });
  return chain;
}

/// Permutation chain by prefix restriction: every top generator must map
/// {0..d-1} into itself for each degree d in `degrees`; level i is generated
/// by the restrictions to degrees[i-1] points and the projection is
/// restriction, which is automatically a surjective homomorphism.
inline DeckChain permutation_chain(const std::vector<std::uint32_t>& degrees,
                                   const std::vector<GroupElem>& top_gens,
                                   std::size_t cap = kDefaultEnumCap) {
  if (degrees.empty()) throw Error("permutation chain needs degrees");
  for (std::size_t i = 0; i + 1 < degrees.size(); ++i)
    if (degrees[i] > degrees[i + 1])
      throw Error("permutation chain degrees must be nondecreasing");
  std::uint32_t top = degrees.back();
  for (const auto& gen : top_gens) {
    if (gen.kind != GroupKind::permutation || gen.modulus_or_degree != top)
      throw Error("top generator of wrong degree: " + gen.to_string());
    for (std::uint32_t d : degrees)
      for (std::uint32_t x = 0; x < d; ++x)
        if (gen.perm[x] >= d)
          throw Error("generator " + gen.to_string() +
                      " does not preserve the first " + std::to_string(d) +
                      " points");
  }
  auto restrict_to = [](const GroupElem& e, std::uint32_t d) {
    std::vector<std::uint32_t> img(e.perm.begin(), e.perm.begin() + d);
    return perm_elem(std::move(img));
  };
  DeckChain chain;
  for (std::uint32_t d : degrees) {
    std::vector<GroupElem> gens;
    gens.reserve(top_gens.size());
    for (const auto& g : top_gens) gens.push_back(restrict_to(g, d));
    chain.levels.push_back(FiniteGroup::permutation(d, gens, cap));
  }
  detail::link_chain_levels(chain, [&](std::size_t i, const GroupElem& e) {
    return restrict_to(e, degrees[i]);
  });
  return chain;
}

/// Checks every DeckChain invariant; failures become report entries.
/// Homomorphism pairs are exhaustive when the upper order is at most 5000,
/// otherwise `pair_budget` seeded random pairs.
inline VerifyReport verify_chain(const DeckChain& chain,
                                 std::size_t pair_budget = 10'000,
                                 std::uint64_t seed = 0x5eed) {
  VerifyReport rep;
  std::mt19937_64 rng(seed);
  for (std::size_t l = 1; l <= chain.depth(); ++l) {
    const FiniteGroup& g = chain.group(l);
    std::string tag = "level " + std::to_string(l) + " ";

    bool inv_ok = true;
    for (std::uint32_t a = 0; a < g.order() && inv_ok; ++a)
      inv_ok = g.mul(a, g.inv(a)) == 0 && g.mul(g.inv(a), a) == 0;
    rep.add(tag + "inverses", inv_ok,
            "order " + std::to_string(g.order()));

    // Generator closure: orbit of the identity under right multiplication
    // must reach every element.
    std::vector<char> reached(g.order(), 0);
    reached[0] = 1;
    std::vector<std::uint32_t> queue = {0};
    for (std::size_t head = 0; head < queue.size(); ++head)
      for (std::uint32_t gen : g.generator_indices()) {
        std::uint32_t nxt = g.mul(queue[head], gen);
        if (!reached[nxt]) {
          reached[nxt] = 1;
          queue.push_back(nxt);
        }
      }
    bool gen_ok = queue.size() == g.order();
    rep.add(tag + "generators generate", gen_ok,
            std::to_string(queue.size()) + " of " + std::to_string(g.order()) +
                " reached");
  }

  for (std::size_t l = 2; l <= chain.depth(); ++l) {
    const FiniteGroup& hi = chain.group(l);
    const FiniteGroup& lo = chain.group(l - 1);
    const auto& table = chain.projections[l - 2];
    std::string tag =
        "q_" + std::to_string(l - 1) + ": level " + std::to_string(l) +
        " -> " + std::to_string(l - 1) + " ";

    bool size_ok = table.size() == hi.order();
    rep.add(tag + "table size", size_ok, std::to_string(table.size()));
    if (!size_ok) continue;

    rep.add(tag + "maps identity to identity", table[0] == 0);

    bool hom_ok = true;
    std::uint64_t pairs = 0;
    if (hi.order() <= 5000) {
      for (std::uint32_t a = 0; a < hi.order() && hom_ok; ++a)
        for (std::uint32_t b = 0; b < hi.order() && hom_ok; ++b, ++pairs)
          hom_ok = table[hi.mul(a, b)] == lo.mul(table[a], table[b]);
      pairs = std::uint64_t(hi.order()) * hi.order();
    } else {
      std::uniform_int_distribution<std::uint32_t> pick(
          0, static_cast<std::uint32_t>(hi.order() - 1));
      for (std::size_t t = 0; t < pair_budget && hom_ok; ++t, ++pairs) {
        std::uint32_t a = pick(rng), b = pick(rng);
        hom_ok = table[hi.mul(a, b)] == lo.mul(table[a], table[b]);
      }
    }
    rep.add(tag + "homomorphism", hom_ok,
            std::to_string(pairs) + " pairs checked");

    std::vector<char> hit(lo.order(), 0);
    std::uint64_t kernel = 0;
    for (std::uint32_t gidx : table) {
      if (gidx < lo.order()) hit[gidx] = 1;
      if (gidx == 0) ++kernel;
    }
    std::size_t image = 0;
    for (char h : hit) image += h;
    rep.add(tag + "surjective", image == lo.order(),
            std::to_string(image) + " of " + std::to_string(lo.order()) +
                " hit");
    bool kernel_ok = kernel == chain.kernel_sizes[l - 2] &&
                     kernel * lo.order() == hi.order();
    rep.add(tag + "kernel size x lower order = upper order", kernel_ok,
            std::to_string(kernel) + " x " + std::to_string(lo.order()) +
                " vs " + std::to_string(hi.order()));
  }
  return rep;
}

}  // namespace solspec
