#pragma once

#include <cstdint>
#include <fstream>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "solspec/error.hpp"
#include "solspec/graph.hpp"
#include "solspec/group.hpp"
#include "solspec/rational.hpp"
#include "solspec/tower.hpp"
#include "solspec/verify_report.hpp"

namespace solspec {

struct SolverSpec {
  enum class Mode { dense, iterative };
  Mode mode = Mode::dense;
  std::uint32_t count = 6;  // iterative: how many lowest pairs
  double tol = 1e-10;       // iterative: residual tolerance scale

  /// Part of the cache key: distinct solver settings never share entries.
  std::string mode_string() const {
    if (mode == Mode::dense) return "dense";
    return "iterative:m=" + std::to_string(count) + ":tol=" + fmt_det(tol);
  }
};

struct ChainSpec {
  enum class Kind { cyclic, cyclic_ladder, sl2, permutation };
  Kind kind = Kind::cyclic;
  std::size_t depth = 1;                          // cyclic, sl2
  std::vector<std::uint64_t> moduli;              // cyclic_ladder
  std::vector<std::uint32_t> degrees;             // permutation
  std::vector<std::vector<std::uint32_t>> generators;  // permutation

  DeckChain materialize(std::size_t cap = kDefaultEnumCap) const {
    switch (kind) {
      case Kind::cyclic:
        return cyclic_chain(depth, cap);
      case Kind::cyclic_ladder:
        return cyclic_ladder(moduli, cap);
      case Kind::sl2:
        return sl2_chain(depth, cap);
      case Kind::permutation: {
        std::vector<GroupElem> gens;
        gens.reserve(generators.size());
        for (const auto& images : generators) gens.push_back(perm_elem(images));
        return permutation_chain(degrees, gens, cap);
      }
    }
    throw Error("unreachable chain kind");
  }
};

/// One voltage as written in the config: a flat list of integers whose
/// meaning depends on the chain kind (residue / matrix entries / images).
struct VoltageSpec {
  std::vector<std::uint64_t> numbers;
};

struct RunConfig {
  WeightedGraph base;
  bool rational_measures = false;
  std::vector<Rational> exact_measures;
  ChainSpec chain;
  std::vector<VoltageSpec> voltages;
  std::size_t depth = 0;  // truncation depth; 0 means full chain depth
  SolverSpec solver;
  bool rational_mode = false;
  double lambda_max = 40.0;
  double epsilon = 0.1;
  std::string out_dir = "solspec-out";
  std::string cache_dir;  // empty: <out_dir>/cache

  std::string resolved_cache_dir() const {
    return cache_dir.empty() ? out_dir + "/cache" : cache_dir;
  }

  /// Voltage elements of the chain's top group.  Membership is strict:
  /// out-of-range residues, non-unimodular matrices, and permutations
  /// outside the generated group are config errors, not silent reductions.
  std::vector<GroupElem> resolve_voltages(const DeckChain& dc) const {
    const FiniteGroup& top = dc.group(dc.depth());
    std::vector<GroupElem> out;
    out.reserve(voltages.size());
    for (std::size_t e = 0; e < voltages.size(); ++e) {
      const auto& nums = voltages[e].numbers;
      std::string where = "voltage " + std::to_string(e);
      GroupElem elem;
      try {
        switch (chain.kind) {
          case ChainSpec::Kind::cyclic:
          case ChainSpec::Kind::cyclic_ladder: {
            if (nums.size() != 1)
              throw ConfigError(where + ": cyclic voltage needs one residue");
            std::uint64_t m = top.element(0).modulus_or_degree;
            if (nums[0] >= m)
              throw ConfigError(where + ": residue " +
                                std::to_string(nums[0]) +
                                " outside Z/" + std::to_string(m) + "Z");
            elem = cyclic_elem(nums[0], m);
            break;
          }
          case ChainSpec::Kind::sl2: {
            if (nums.size() != 4)
              throw ConfigError(where + ": sl2 voltage needs [a,b,c,d]");
            std::uint64_t m = top.element(0).modulus_or_degree;
            for (std::uint64_t v : nums)
              if (v >= m)
                throw ConfigError(where + ": entry " + std::to_string(v) +
                                  " outside Z/" + std::to_string(m) + "Z");
            elem = sl2_elem(nums[0], nums[1], nums[2], nums[3], m);
            break;
          }
          case ChainSpec::Kind::permutation: {
            std::vector<std::uint32_t> images;
            images.reserve(nums.size());
            for (std::uint64_t v : nums)
              images.push_back(static_cast<std::uint32_t>(v));
            elem = perm_elem(std::move(images));
            break;
          }
        }
        out.push_back(top.element(top.index_of(elem)));
      } catch (const ConfigError&) {
        throw;
      } catch (const Error& err) {
        throw ConfigError(where + ": " + err.what());
      }
    }
    return out;
  }
};

namespace detail {

using json = nlohmann::json;

inline void reject_unknown_keys(const json& obj, const std::string& where,
                                const std::set<std::string>& allowed) {
  for (const auto& [key, value] : obj.items())
    if (!allowed.count(key))
      throw ConfigError("unknown key " + where + "/" + key);
}

inline const json& require(const json& obj, const std::string& where,
                           const char* key) {
  auto it = obj.find(key);
  if (it == obj.end())
    throw ConfigError("missing key " + where + "/" + key);
  return *it;
}

inline double positive_number(const json& v, const std::string& where) {
  if (!v.is_number())
    throw ConfigError(where + " must be a number");
  double x = v.get<double>();
  if (!(x > 0)) throw ConfigError(where + " must be positive");
  return x;
}

inline std::uint64_t nonneg_integer(const json& v, const std::string& where) {
  if (!v.is_number_unsigned())
    throw ConfigError(where + " must be a nonnegative integer");
  return v.get<std::uint64_t>();
}

inline Rational exact_value(const json& v, const std::string& where) {
  if (v.is_number_unsigned())
    return Rational(static_cast<std::int64_t>(v.get<std::uint64_t>()));
  if (v.is_number_integer()) return Rational(v.get<std::int64_t>());
  if (v.is_string()) {
    try {
      return Rational::parse(v.get<std::string>());
    } catch (const Error& err) {
      throw ConfigError(where + ": " + err.what());
    }
  }
  throw ConfigError(where +
                    " must be an integer or a rational/decimal string in "
                    "rational mode (floats are not exact)");
}

}  // namespace detail

/// Parses and validates the JSON config.  Unknown keys anywhere are
/// rejected; every diagnostic carries the JSON-pointer-style path of the
/// offending field.
inline RunConfig parse_config(const std::string& text) {
  using detail::json;
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& err) {
    throw ConfigError(std::string("config is not valid JSON: ") + err.what());
  }
  if (!root.is_object()) throw ConfigError("config root must be an object");
  detail::reject_unknown_keys(
      root, "",
      {"tower", "depth", "solver", "arithmetic", "lambda_max", "epsilon",
       "out_dir", "cache_dir"});

  RunConfig cfg;
  if (root.contains("arithmetic")) {
    const json& a = root["arithmetic"];
    if (!a.is_string() ||
        (a.get<std::string>() != "float" && a.get<std::string>() != "rational"))
      throw ConfigError("/arithmetic must be \"float\" or \"rational\"");
    cfg.rational_mode = a.get<std::string>() == "rational";
  }

  const json& tower = detail::require(root, "", "tower");
  if (!tower.is_object()) throw ConfigError("/tower must be an object");
  detail::reject_unknown_keys(tower, "/tower", {"base", "chain", "voltages"});

  // --- base graph ---
  const json& base = detail::require(tower, "/tower", "base");
  if (!base.is_object()) throw ConfigError("/tower/base must be an object");
  detail::reject_unknown_keys(base, "/tower/base",
                              {"vertices", "measures", "edges"});
  std::uint64_t nv = detail::nonneg_integer(
      detail::require(base, "/tower/base", "vertices"), "/tower/base/vertices");
  if (nv == 0 || nv > 100000)
    throw ConfigError("/tower/base/vertices must be in [1, 100000]");
  cfg.base.vertex_count = static_cast<std::uint32_t>(nv);

  const json& measures = detail::require(base, "/tower/base", "measures");
  if (!measures.is_array() || measures.size() != nv)
    throw ConfigError("/tower/base/measures must be an array of length " +
                      std::to_string(nv));
  for (std::size_t v = 0; v < measures.size(); ++v) {
    std::string where = "/tower/base/measures/" + std::to_string(v);
    if (cfg.rational_mode) {
      Rational r = detail::exact_value(measures[v], where);
      if (!(r.num() > 0)) throw ConfigError(where + " must be positive");
      cfg.exact_measures.push_back(r);
      cfg.base.vertex_measure.push_back(r.to_double());
    } else {
      cfg.base.vertex_measure.push_back(
          detail::positive_number(measures[v], where));
    }
  }
  cfg.rational_measures = cfg.rational_mode;

  const json& edges = detail::require(base, "/tower/base", "edges");
  if (!edges.is_array() || edges.empty())
    throw ConfigError("/tower/base/edges must be a nonempty array");
  for (std::size_t e = 0; e < edges.size(); ++e) {
    std::string where = "/tower/base/edges/" + std::to_string(e);
    const json& edge = edges[e];
    if (!edge.is_array() || edge.size() != 3)
      throw ConfigError(where + " must be [u, v, weight]");
    std::uint64_t u = detail::nonneg_integer(edge[0], where + "/0");
    std::uint64_t v = detail::nonneg_integer(edge[1], where + "/1");
    if (u >= nv || v >= nv)
      throw ConfigError(where + ": endpoint outside [0, " +
                        std::to_string(nv - 1) + "]");
    double w = detail::positive_number(edge[2], where + "/2");
    cfg.base.edges.push_back({static_cast<std::uint32_t>(u),
                              static_cast<std::uint32_t>(v), w});
  }

  // --- chain ---
  const json& chain = detail::require(tower, "/tower", "chain");
  if (!chain.is_object()) throw ConfigError("/tower/chain must be an object");
  const json& kind = detail::require(chain, "/tower/chain", "kind");
  if (!kind.is_string()) throw ConfigError("/tower/chain/kind must be a string");
  std::string ks = kind.get<std::string>();
  if (ks == "cyclic" || ks == "sl2") {
    detail::reject_unknown_keys(chain, "/tower/chain", {"kind", "depth"});
    cfg.chain.kind = ks == "cyclic" ? ChainSpec::Kind::cyclic
                                    : ChainSpec::Kind::sl2;
    std::uint64_t d = detail::nonneg_integer(
        detail::require(chain, "/tower/chain", "depth"), "/tower/chain/depth");
    if (d < 1 || d > 16) throw ConfigError("/tower/chain/depth must be in [1, 16]");
    cfg.chain.depth = d;
  } else if (ks == "cyclic_ladder") {
    detail::reject_unknown_keys(chain, "/tower/chain", {"kind", "moduli"});
    cfg.chain.kind = ChainSpec::Kind::cyclic_ladder;
    const json& moduli = detail::require(chain, "/tower/chain", "moduli");
    if (!moduli.is_array() || moduli.empty())
      throw ConfigError("/tower/chain/moduli must be a nonempty array");
    for (std::size_t i = 0; i < moduli.size(); ++i) {
      std::uint64_t m = detail::nonneg_integer(
          moduli[i], "/tower/chain/moduli/" + std::to_string(i));
      if (m == 0)
        throw ConfigError("/tower/chain/moduli/" + std::to_string(i) +
                          " must be positive");
      cfg.chain.moduli.push_back(m);
    }
  } else if (ks == "permutation") {
    detail::reject_unknown_keys(chain, "/tower/chain",
                                {"kind", "degrees", "generators"});
    cfg.chain.kind = ChainSpec::Kind::permutation;
    const json& degrees = detail::require(chain, "/tower/chain", "degrees");
    if (!degrees.is_array() || degrees.empty())
      throw ConfigError("/tower/chain/degrees must be a nonempty array");
    for (std::size_t i = 0; i < degrees.size(); ++i)
      cfg.chain.degrees.push_back(static_cast<std::uint32_t>(
          detail::nonneg_integer(degrees[i],
                                 "/tower/chain/degrees/" + std::to_string(i))));
    const json& gens = detail::require(chain, "/tower/chain", "generators");
    if (!gens.is_array() || gens.empty())
      throw ConfigError("/tower/chain/generators must be a nonempty array");
    for (std::size_t g = 0; g < gens.size(); ++g) {
      std::string where = "/tower/chain/generators/" + std::to_string(g);
      if (!gens[g].is_array()) throw ConfigError(where + " must be an array");
      std::vector<std::uint32_t> images;
      for (std::size_t i = 0; i < gens[g].size(); ++i)
        images.push_back(static_cast<std::uint32_t>(detail::nonneg_integer(
            gens[g][i], where + "/" + std::to_string(i))));
      cfg.chain.generators.push_back(std::move(images));
    }
  } else {
    throw ConfigError(
        "/tower/chain/kind must be one of cyclic, cyclic_ladder, sl2, "
        "permutation");
  }

  // --- voltages ---
  const json& volts = detail::require(tower, "/tower", "voltages");
  if (!volts.is_array() || volts.size() != cfg.base.edges.size())
    throw ConfigError("/tower/voltages must be an array with one entry per "
                      "edge (" +
                      std::to_string(cfg.base.edges.size()) + ")");
  for (std::size_t e = 0; e < volts.size(); ++e) {
    std::string where = "/tower/voltages/" + std::to_string(e);
    VoltageSpec vs;
    if (volts[e].is_number_unsigned()) {
      vs.numbers.push_back(volts[e].get<std::uint64_t>());
    } else if (volts[e].is_array()) {
      for (std::size_t i = 0; i < volts[e].size(); ++i)
        vs.numbers.push_back(detail::nonneg_integer(
            volts[e][i], where + "/" + std::to_string(i)));
    } else {
      throw ConfigError(where +
                        " must be an integer or an array of integers");
    }
    cfg.voltages.push_back(std::move(vs));
  }

  // --- scalars ---
  if (root.contains("depth")) {
    std::uint64_t d = detail::nonneg_integer(root["depth"], "/depth");
    if (d < 1) throw ConfigError("/depth must be at least 1");
    cfg.depth = d;
  }
  if (root.contains("solver")) {
    const json& solver = root["solver"];
    if (!solver.is_object()) throw ConfigError("/solver must be an object");
    detail::reject_unknown_keys(solver, "/solver", {"mode", "count", "tol"});
    const json& mode = detail::require(solver, "/solver", "mode");
    if (!mode.is_string()) throw ConfigError("/solver/mode must be a string");
    std::string ms = mode.get<std::string>();
    if (ms == "dense") {
      cfg.solver.mode = SolverSpec::Mode::dense;
      detail::reject_unknown_keys(solver, "/solver", {"mode"});
    } else if (ms == "iterative") {
      cfg.solver.mode = SolverSpec::Mode::iterative;
      if (solver.contains("count")) {
        std::uint64_t c = detail::nonneg_integer(solver["count"],
                                                 "/solver/count");
        if (c < 1) throw ConfigError("/solver/count must be at least 1");
        cfg.solver.count = static_cast<std::uint32_t>(c);
      }
      if (solver.contains("tol"))
        cfg.solver.tol = detail::positive_number(solver["tol"], "/solver/tol");
    } else {
      throw ConfigError("/solver/mode must be \"dense\" or \"iterative\"");
    }
  }
  if (root.contains("lambda_max"))
    cfg.lambda_max = detail::positive_number(root["lambda_max"], "/lambda_max");
  if (root.contains("epsilon"))
    cfg.epsilon = detail::positive_number(root["epsilon"], "/epsilon");
  if (root.contains("out_dir")) {
    if (!root["out_dir"].is_string())
      throw ConfigError("/out_dir must be a string");
    cfg.out_dir = root["out_dir"].get<std::string>();
  }
  if (root.contains("cache_dir")) {
    if (!root["cache_dir"].is_string())
      throw ConfigError("/cache_dir must be a string");
    cfg.cache_dir = root["cache_dir"].get<std::string>();
  }
  return cfg;
}

inline RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  return parse_config(text);
}

}  // namespace solspec
