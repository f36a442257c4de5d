// Command-line front end: builds covering towers from JSON configs, runs
// level eigensolves with an on-disk cache, drives the verification suite,
// and emits deterministic reports and plot data.
//
// Exit codes: 0 success, 1 verification failure, 2 usage/config error.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "solspec/solspec.hpp"

namespace {

using namespace solspec;

constexpr int kExitOk = 0;
constexpr int kExitVerifyFail = 1;
constexpr int kExitConfigError = 2;

struct Overrides {
  std::string config_path;
  std::string out_dir;
  std::string cache_dir;
  std::string mode;
  std::size_t depth = 0;
  double lambda_max = 0;
  double epsilon = 0;
};

RunConfig load_with_overrides(const Overrides& ov) {
  RunConfig cfg = load_config(ov.config_path);
  if (!ov.out_dir.empty()) cfg.out_dir = ov.out_dir;
  if (ov.depth > 0) cfg.depth = ov.depth;
  if (ov.lambda_max > 0) cfg.lambda_max = ov.lambda_max;
  if (ov.epsilon > 0) cfg.epsilon = ov.epsilon;
  if (!ov.mode.empty()) {
    if (ov.mode == "dense")
      cfg.solver.mode = SolverSpec::Mode::dense;
    else if (ov.mode == "iterative")
      cfg.solver.mode = SolverSpec::Mode::iterative;
    else
      throw ConfigError("--mode must be dense or iterative");
  }
  // Cache precedence: flag, then environment, then config, then default.
  if (!ov.cache_dir.empty()) {
    cfg.cache_dir = ov.cache_dir;
  } else if (const char* env = std::getenv("SOLSPEC_CACHE_DIR");
             env && *env) {
    cfg.cache_dir = env;
  }
  return cfg;
}

struct Built {
  CoverTower tower;
  std::size_t k = 0;  // analysis depth (truncation)
};

Built build_from_config(const RunConfig& cfg) {
  DeckChain chain = cfg.chain.materialize();
  VoltageAssignment volt;
  volt.voltages = cfg.resolve_voltages(chain);
  Built b{build_tower(cfg.base, volt, chain), chain.depth()};
  if (cfg.depth > 0) {
    if (cfg.depth > chain.depth())
      throw ConfigError("depth " + std::to_string(cfg.depth) +
                        " exceeds chain depth " +
                        std::to_string(chain.depth()));
    b.k = cfg.depth;
  }
  return b;
}

/// Cache-aware level eigensolve.  Corrupt cache entries are reported and
/// recomputed; every fresh result is written back atomically.
std::vector<SpectrumLevel> compute_spectra(const RunConfig& cfg,
                                           const CoverTower& tower,
                                           std::size_t k, bool force_dense,
                                           std::vector<std::string>* notes) {
  const std::filesystem::path cache_dir = cfg.resolved_cache_dir();
  const std::string mode_str =
      force_dense ? "dense" : cfg.solver.mode_string();
  std::vector<SpectrumLevel> spectra;
  for (std::size_t i = 1; i <= k; ++i) {
    LaplaceOperator L = laplacian(tower, i);
    std::string key = cache_key(L, mode_str);
    std::string warning;
    if (auto cached = load_spectrum_cache(cache_dir, key, warning)) {
      if (notes)
        notes->push_back("level " + std::to_string(i) + ": cache hit");
      spectra.push_back(std::move(*cached));
      continue;
    }
    if (!warning.empty()) {
      std::cerr << "warning: " << warning << "; recomputing\n";
      if (notes)
        notes->push_back("level " + std::to_string(i) +
                         ": corrupt cache entry recomputed");
    } else if (notes) {
      notes->push_back("level " + std::to_string(i) + ": cache miss");
    }
    SpectrumLevel s;
    if (force_dense || cfg.solver.mode == SolverSpec::Mode::dense) {
      s = eigendecompose(L);
    } else {
      std::uint32_t m = std::min<std::uint32_t>(cfg.solver.count, L.n);
      s = lowest_eigenpairs(L, m, cfg.solver.tol * (1.0 + L.norm_bound()));
    }
    s.level = i;
    save_spectrum_cache(cache_dir, key, s);
    spectra.push_back(std::move(s));
  }
  return spectra;
}

/// Recomputed residual certificates; cached eigenpairs are never trusted
/// without this (a tampered but checksum-valid file must still fail).
VerifyReport recertify_spectra(const CoverTower& tower,
                               const std::vector<SpectrumLevel>& spectra) {
  VerifyReport rep;
  for (const auto& s : spectra) {
    LaplaceOperator L = laplacian(tower, s.level);
    LevelMeasure mu = level_measure(tower, s.level);
    double worst = 0;
    bool shape_ok = !s.eigenvalues.empty() &&
                    s.vectors.size() == s.eigenvalues.size();
    for (const auto& v : s.vectors)
      shape_ok = shape_ok && v.size() == L.n;
    if (shape_ok) {
      for (std::size_t t = 0; t < s.eigenvalues.size(); ++t) {
        std::vector<double> r = L.apply(s.vectors[t]);
        for (std::uint32_t x = 0; x < L.n; ++x)
          r[x] -= s.eigenvalues[t] * s.vectors[t][x];
        worst = std::max(worst, weighted_norm(r, mu.weights));
      }
    }
    double tol = 1e-8 * (1.0 + L.norm_bound());
    rep.add("level " + std::to_string(s.level) + " residual certificates",
            shape_ok && worst <= tol,
            shape_ok ? "max residual " + fmt_sci(worst)
                     : "malformed spectrum data");
  }
  return rep;
}

void emit(const std::filesystem::path& path, const std::string& text) {
  write_text_file(path, text);
  std::cout << text;
}

int cmd_build(const Overrides& ov) {
  RunConfig cfg = load_with_overrides(ov);
  Built b = build_from_config(cfg);
  ReportInputs in;
  in.tower = &b.tower;
  in.checks.emplace_back("deck chain verification",
                         verify_chain(b.tower.chain));
  for (std::size_t i = 1; i <= b.k; ++i)
    in.checks.emplace_back("principal bundle level " + std::to_string(i),
                           check_principal(b.tower, i));
  bool pass = true;
  for (const auto& [name, rep] : in.checks) pass = pass && rep.all_pass();
  emit(std::filesystem::path(cfg.out_dir) / "build_report.txt",
       render_report(in));
  return pass ? kExitOk : kExitVerifyFail;
}

int cmd_spectra(const Overrides& ov) {
  RunConfig cfg = load_with_overrides(ov);
  Built b = build_from_config(cfg);
  std::vector<std::string> notes;
  auto spectra = compute_spectra(cfg, b.tower, b.k, false, &notes);
  write_text_file(std::filesystem::path(cfg.out_dir) / "spectra.tsv",
                  spectra_table(spectra));
  for (const auto& n : notes) std::cout << n << "\n";
  ReportInputs in;
  in.tower = &b.tower;
  in.spectra = &spectra;
  std::cout << render_report(in);
  return kExitOk;
}

int cmd_verify(const Overrides& ov) {
  RunConfig cfg = load_with_overrides(ov);
  Built b = build_from_config(cfg);
  const CoverTower& tower = b.tower;
  const std::size_t k = b.k;
  ReportInputs in;
  in.tower = &tower;
  in.checks.emplace_back("deck chain verification", verify_chain(tower.chain));
  for (std::size_t i = 1; i <= k; ++i)
    in.checks.emplace_back("principal bundle level " + std::to_string(i),
                           check_principal(tower, i));

  {
    VerifyReport rep;
    double worst = 0;
    for (std::size_t i = 1; i <= k; ++i)
      for (std::size_t j = i; j <= k; ++j)
        worst = std::max(worst, measure_consistency(tower, i, j));
    rep.add("level measures consistent across the tower", worst <= 1e-12,
            "max deviation " + fmt_sci(worst));
    if (cfg.rational_mode) {
      ExactMeasures ctx{cfg.exact_measures};
      bool exact = true;
      for (std::size_t i = 1; i <= k; ++i) {
        exact = exact && !(mass_defect_exact(tower, ctx, i) != Rational(0));
        for (std::size_t j = i; j <= k; ++j)
          exact = exact &&
                  !(measure_consistency_exact(tower, ctx, i, j) != Rational(0));
      }
      rep.add("exact rational measure identities", exact,
              exact ? "all defects are exactly 0" : "nonzero exact defect");
    }
    double iso = 0, adj = 0;
    for (std::size_t i = 1; i <= k; ++i)
      for (std::size_t j = i + 1; j <= k; ++j) {
        iso = std::max(iso, pullback_isometry_defect(tower, i, j));
        adj = std::max(adj, pullback_adjoint_defect(tower, i, j));
      }
    rep.add("pullback preserves inner products", iso <= 1e-13,
            "max relative defect " + fmt_sci(iso));
    rep.add("fiber averaging is the pullback adjoint", adj <= 1e-13,
            "max relative defect " + fmt_sci(adj));
    in.checks.emplace_back("measure and pullback checks", rep);
  }

  {
    VerifyReport rep;
    double worst_rel = 0;
    for (std::size_t i = 1; i <= k; ++i)
      for (std::size_t j = i + 1; j <= k; ++j) {
        double bound = 1.0 + laplacian(tower, j).norm_bound();
        worst_rel = std::max(worst_rel,
                             check_commutation(tower, i, j) / bound);
      }
    rep.add("Laplacian commutes with pullback", worst_rel <= 1e-12,
            "max relative residual " + fmt_sci(worst_rel));
    in.checks.emplace_back("commutation checks", rep);
  }

  auto spectra = compute_spectra(cfg, tower, k, true, nullptr);
  in.checks.emplace_back("spectrum certificates",
                         recertify_spectra(tower, spectra));
  bool certs_ok = in.checks.back().second.all_pass();

  if (certs_ok) {
    try {
      TelescopeDecomposition decomp = telescope(tower, spectra, k);
      VerifyReport rep;
      double gram = 0, cross = 0, mgap = 0;
      for (std::size_t i = 1; i <= k; ++i) {
        gram = std::max(gram, decomp.levels[i - 1].max_mixed_gram);
        cross = std::max(cross, decomp.levels[i - 1].max_cross);
        mgap = std::max(
            mgap, new_spectrum_multiset_check(decomp, spectra, i) /
                      (1.0 + spectra[i - 1].op_norm));
      }
      rep.add("new subspaces orthogonal to pulled-back subspaces",
              gram <= 1e-10, "max mixed Gram entry " + fmt_sci(gram));
      rep.add("compressed operator leaves new subspaces invariant",
              cross <= 1e-8, "max cross term " + fmt_sci(cross));
      rep.add("level spectrum equals union of new spectra (multisets)",
              mgap <= 1e-8, "max relative matching gap " + fmt_sci(mgap));
      in.checks.emplace_back("telescoping decomposition", rep);

      SpectralMeasureTrunc m = build_spectral_measure(tower, decomp, k);
      in.checks.emplace_back("resolution of the identity",
                             pvm_axioms_check(m, laplacian(tower, k)));

      {
        VerifyReport orep;
        LevelMeasure mu_k = level_measure(tower, k);
        auto cuts = safe_cut_positions(m.lambdas, 10 * m.cluster_tol);
        std::mt19937_64 rng(0x0a51de);
        double worst = 0;
        for (int t = 0; t < 50; ++t) {
          IntervalSet omega = random_snapped_set(rng, cuts);
          worst = std::max(
              worst, frobenius_distance(
                         assemble_resolution(tower, decomp, k, omega),
                         direct_resolution(spectra[k - 1], mu_k.weights,
                                           omega)));
        }
        orep.add("assembled resolution matches direct spectral projector",
                 worst <= 1e-8,
                 "max Frobenius distance " + fmt_sci(worst) +
                     " over 50 interval sets");
        in.checks.emplace_back("oracle equivalence", orep);
      }

      if (k >= 2) {
        VerifyReport crep;
        double worst = 0;
        for (std::size_t i = 1; i + 1 <= k; ++i) {
          SpectralMeasureTrunc mi = build_spectral_measure(tower, decomp, i);
          SpectralMeasureTrunc mj =
              build_spectral_measure(tower, decomp, i + 1);
          std::vector<double> pts = mi.lambdas;
          pts.insert(pts.end(), mj.lambdas.begin(), mj.lambdas.end());
          auto cuts = safe_cut_positions(pts, 10 * mj.cluster_tol);
          std::mt19937_64 rng(0xc0117e + i);
          for (int t = 0; t < 20; ++t)
            worst = std::max(worst, pullback_spectral_commute_check(
                                        tower, mi, mj,
                                        random_snapped_set(rng, cuts)));
        }
        crep.add("spectral projectors commute with pullback", worst <= 1e-9,
                 "max residual " + fmt_sci(worst));
        in.checks.emplace_back("projector-pullback commutation", crep);
      }

      SolenoidSpectrum sol = solenoid_spectrum(tower, spectra, decomp, k);
      VerifyReport srep;
      srep.add("union-spectrum routes agree",
               sol.route_hausdorff <= 1e-8,
               "Hausdorff distance " + fmt_sci(sol.route_hausdorff));
      in.checks.emplace_back("union spectrum", srep);
    } catch (const Error& err) {
      VerifyReport rep;
      rep.add("verification pipeline completed", false, err.what());
      in.checks.emplace_back("pipeline", rep);
    }
  }

  bool pass = true;
  for (const auto& [name, rep] : in.checks) pass = pass && rep.all_pass();
  emit(std::filesystem::path(cfg.out_dir) / "verify_report.txt",
       render_report(in));
  return pass ? kExitOk : kExitVerifyFail;
}

int cmd_report(const Overrides& ov) {
  RunConfig cfg = load_with_overrides(ov);
  Built b = build_from_config(cfg);
  auto spectra = compute_spectra(cfg, b.tower, b.k, true, nullptr);
  TelescopeDecomposition decomp = telescope(b.tower, spectra, b.k);
  SolenoidSpectrum sol = solenoid_spectrum(b.tower, spectra, decomp, b.k);
  DensityReport dens = density_report(sol, cfg.lambda_max, cfg.epsilon);
  SpectralMeasureTrunc m = build_spectral_measure(b.tower, decomp, b.k);

  ReportInputs in;
  in.tower = &b.tower;
  in.spectra = &spectra;
  in.decomp = &decomp;
  in.solenoid = &sol;
  in.density = &dens;
  in.checks.emplace_back("resolution of the identity",
                         pvm_axioms_check(m, laplacian(b.tower, b.k)));

  std::filesystem::path out(cfg.out_dir);
  write_text_file(out / "spectra.tsv", spectra_table(spectra));
  write_text_file(out / "spectrum_plot.tsv", plot_data(sol));
  bool pass = true;
  for (const auto& [name, rep] : in.checks) pass = pass && rep.all_pass();
  emit(out / "report.txt", render_report(in));
  return pass ? kExitOk : kExitVerifyFail;
}

int cmd_circle(const Overrides& ov) {
  std::size_t depth = ov.depth ? ov.depth : 7;
  double lambda_max = ov.lambda_max > 0 ? ov.lambda_max : 40.0;
  double epsilon = ov.epsilon > 0 ? ov.epsilon : 0.1;
  SolenoidSpectrum sol = circle_tower_analytic(depth, lambda_max);
  DensityReport dens = density_report(sol, lambda_max, epsilon);
  ReportInputs in;
  in.solenoid = &sol;
  in.density = &dens;
  std::filesystem::path out(ov.out_dir.empty() ? "solspec-out" : ov.out_dir);
  write_text_file(out / "circle_plot.tsv", plot_data(sol));
  emit(out / "circle_report.txt", render_report(in));
  return kExitOk;
}

int cmd_selberg(const Overrides& ov) {
  std::size_t depth = ov.depth ? ov.depth : 2;
  SelbergReport rep = selberg_gap_report(depth);
  std::string text = rep.to_text();
  for (const auto& l : rep.levels)
    if (l.cross_checked)
      text += "level " + std::to_string(l.level) +
              " dense/iterative gap: " + fmt_sci(l.cross_gap) + "\n";
  std::filesystem::path out(ov.out_dir.empty() ? "solspec-out" : ov.out_dir);
  write_text_file(out / "selberg_report.txt", text);
  std::cout << text;
  return rep.all_connected ? kExitOk : kExitVerifyFail;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "solspec: spectra of covering towers and their truncated solenoid "
      "limits"};
  app.require_subcommand(1);
  Overrides ov;

  auto add_config_opts = [&](CLI::App* sub, bool need_config) {
    auto* c = sub->add_option("--config", ov.config_path,
                              "JSON run configuration");
    if (need_config) c->required();
    sub->add_option("--depth", ov.depth, "truncation depth override");
    sub->add_option("--out", ov.out_dir, "output directory override");
    sub->add_option("--cache", ov.cache_dir, "cache directory override");
    sub->add_option("--lambda-max", ov.lambda_max,
                    "spectral window upper bound");
    sub->add_option("--epsilon", ov.epsilon, "density tolerance");
    sub->add_option("--mode", ov.mode, "solver mode: dense or iterative");
  };

  auto* build = app.add_subcommand("build", "build a tower and verify it");
  add_config_opts(build, true);
  auto* spectra =
      app.add_subcommand("spectra", "compute level spectra (cached)");
  add_config_opts(spectra, true);
  auto* verify =
      app.add_subcommand("verify", "run the full verification suite");
  add_config_opts(verify, true);
  auto* report = app.add_subcommand(
      "report", "union spectrum, density diagnostics, plot data");
  add_config_opts(report, true);
  auto* circle = app.add_subcommand(
      "circle", "analytic flat-circle tower spectrum and density");
  add_config_opts(circle, false);
  auto* selberg = app.add_subcommand(
      "selberg", "lambda_1 table for the SL(2, Z/lZ) Cayley tower");
  add_config_opts(selberg, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) ? kExitConfigError : kExitOk;
  }

  try {
    if (build->parsed()) return cmd_build(ov);
    if (spectra->parsed()) return cmd_spectra(ov);
    if (verify->parsed()) return cmd_verify(ov);
    if (report->parsed()) return cmd_report(ov);
    if (circle->parsed()) return cmd_circle(ov);
    if (selberg->parsed()) return cmd_selberg(ov);
  } catch (const ConfigError& err) {
    std::cerr << "config error: " << err.what() << "\n";
    return kExitConfigError;
  } catch (const Error& err) {
    std::cerr << "error: " << err.what() << "\n";
    return kExitConfigError;
  }
  return kExitConfigError;
}
