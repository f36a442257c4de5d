// End-to-end checks of the command-line tool.  argv[1] is the binary under
// test; every scenario runs it as a subprocess in a scratch directory and
// inspects exit codes and emitted files.  Output: one ok/FAIL line each.

#include <sys/wait.h>
#include <unistd.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "solspec/cache.hpp"

namespace fs = std::filesystem;

namespace {

int g_failures = 0;
std::string g_cli;
fs::path g_root;

void check(bool ok, const std::string& name, const std::string& detail = "") {
  std::printf("%s - %s%s\n", ok ? "ok" : "FAIL", name.c_str(),
              detail.empty() ? "" : (" (" + detail + ")").c_str());
  if (!ok) ++g_failures;
}

/// Runs `cli args` with stdout/stderr captured; returns the exit code.
int run(const std::string& args, std::string* out = nullptr,
        std::string* err = nullptr) {
  fs::path of = g_root / "stdout.txt";
  fs::path ef = g_root / "stderr.txt";
  std::string cmd = g_cli + " " + args + " > " + of.string() + " 2> " +
                    ef.string();
  int rc = std::system(cmd.c_str());
  auto slurp = [](const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return std::string((std::istreambuf_iterator<char>(in)),
                       std::istreambuf_iterator<char>());
  };
  if (out) *out = slurp(of);
  if (err) *err = slurp(ef);
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

std::string slurp_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return std::string((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
}

void write_file(const fs::path& p, const std::string& text) {
  fs::create_directories(p.parent_path());
  std::ofstream(p, std::ios::binary) << text;
}

const char* kConfig = R"json({
  "tower": {
    "base": {
      "vertices": 2,
      "measures": ["1", "2"],
      "edges": [[0, 1, 1.0], [0, 1, 0.5], [0, 0, 0.25]]
    },
    "chain": {"kind": "cyclic_ladder", "moduli": [2, 4, 8]},
    "voltages": [0, 1, 2]
  },
  "arithmetic": "rational",
  "solver": {"mode": "dense"},
  "lambda_max": 8.0,
  "epsilon": 2.0
})json";

std::vector<fs::path> cache_entries(const fs::path& dir) {
  std::vector<fs::path> out;
  if (!fs::exists(dir)) return out;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.path().extension() == ".bin") out.push_back(e.path());
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::fprintf(stderr, "usage: %s <cli-binary>\n", argv[0]);
    return 2;
  }
  g_cli = argv[1];
  g_root = fs::temp_directory_path() /
           ("solspec_cli_" + std::to_string(::getpid()));
  fs::remove_all(g_root);
  fs::create_directories(g_root);
  fs::path cfg = g_root / "tower.json";
  write_file(cfg, kConfig);
  fs::path out = g_root / "out";
  fs::path cache = g_root / "cache";
  std::string base_args = "--config " + cfg.string() + " --out " +
                          out.string() + " --cache " + cache.string();

  {
    int rc = run("build " + base_args);
    std::string rep = slurp_file(out / "build_report.txt");
    check(rc == 0, "build exits 0");
    check(rep.find("PASS") != std::string::npos &&
              rep.find("FAIL") == std::string::npos,
          "build report is all PASS");
    check(rep.find("principal bundle level 3") != std::string::npos,
          "build report covers every level");
  }

  {
    std::string stdout_text;
    int rc = run("spectra " + base_args, &stdout_text);
    check(rc == 0, "spectra exits 0");
    check(slurp_file(out / "spectra.tsv")
                  .find("level\tindex\teigenvalue\tresidual") == 0,
          "spectra.tsv has the table header");
    check(cache_entries(cache).size() == 3, "one cache entry per level");
    check(stdout_text.find("cache miss") != std::string::npos,
          "first run reports cache misses");

    rc = run("spectra " + base_args, &stdout_text);
    check(rc == 0 &&
              stdout_text.find("cache hit") != std::string::npos &&
              stdout_text.find("cache miss") == std::string::npos,
          "second run is served from cache");
  }

  {
    // Truncated cache entry: warn, recompute, succeed.
    auto entries = cache_entries(cache);
    std::string bytes = slurp_file(entries[0]);
    write_file(entries[0], bytes.substr(0, bytes.size() / 2));
    std::string stdout_text, stderr_text;
    int rc = run("spectra " + base_args, &stdout_text, &stderr_text);
    check(rc == 0, "corrupt cache entry still exits 0");
    check(stdout_text.find("corrupt cache entry recomputed") !=
              std::string::npos,
          "corruption is reported and recomputed");
    check(stderr_text.find("warning") != std::string::npos,
          "corruption warns on stderr");
  }

  {
    int rc = run("verify " + base_args);
    std::string rep = slurp_file(out / "verify_report.txt");
    check(rc == 0, "verify exits 0 on a sound tower");
    check(rep.find("FAIL") == std::string::npos, "verify report is clean");
    check(rep.find("exact rational measure identities") != std::string::npos,
          "rational mode adds exact identities");
    check(rep.find("resolution of the identity") != std::string::npos &&
              rep.find("spectral projectors commute with pullback") !=
                  std::string::npos,
          "verify covers projector checks");
  }

  {
    // Tampered cache entry with a valid checksum: the eigenvalue shift must
    // be caught by residual recertification, failing verification.
    auto entries = cache_entries(cache);
    bool tampered = false;
    for (const auto& entry : entries) {
      std::string key = entry.stem().string().substr(std::string("spectrum_").size());
      std::string warning;
      auto s = solspec::load_spectrum_cache(cache, key, warning);
      if (!s || s->eigenvalues.size() < 2) continue;
      s->eigenvalues[1] += 1e-3;
      solspec::save_spectrum_cache(cache, key, *s);
      tampered = true;
      break;
    }
    check(tampered, "tampering setup found a cache entry");
    std::string rep_text;
    int rc = run("verify " + base_args);
    rep_text = slurp_file(out / "verify_report.txt");
    check(rc == 1, "verify exits 1 on tampered cached spectra");
    check(rep_text.find("FAIL") != std::string::npos,
          "tampered spectra surface as FAIL entries");
    fs::remove_all(cache);  // reset for later scenarios
  }

  {
    int rc1 = run("report " + base_args);
    std::string first = slurp_file(out / "report.txt");
    std::string plot1 = slurp_file(out / "spectrum_plot.tsv");
    int rc2 = run("report " + base_args);
    std::string second = slurp_file(out / "report.txt");
    std::string plot2 = slurp_file(out / "spectrum_plot.tsv");
    check(rc1 == 0 && rc2 == 0, "report exits 0");
    check(!first.empty() && first == second,
          "report.txt is byte-identical across runs");
    check(!plot1.empty() && plot1 == plot2,
          "plot data is byte-identical across runs");
    check(first.find("union spectrum") != std::string::npos,
          "report includes the union spectrum section");
  }

  {
    fs::path flag_cache = g_root / "flag_cache";
    fs::path env_cache = g_root / "env_cache";
    std::string cmd = "SOLSPEC_CACHE_DIR=" + env_cache.string() + " " +
                      g_cli + " spectra --config " + cfg.string() + " --out " +
                      out.string() + " > /dev/null 2>&1";
    check(std::system(cmd.c_str()) == 0 && !cache_entries(env_cache).empty(),
          "environment variable selects the cache directory");
    cmd = "SOLSPEC_CACHE_DIR=" + env_cache.string() + " " + g_cli +
          " spectra --config " + cfg.string() + " --out " + out.string() +
          " --cache " + flag_cache.string() + " > /dev/null 2>&1";
    fs::remove_all(env_cache);
    check(std::system(cmd.c_str()) == 0 &&
              !cache_entries(flag_cache).empty() &&
              cache_entries(env_cache).empty(),
          "--cache flag overrides the environment");
  }

  {
    fs::path bad = g_root / "bad.json";
    std::string text = kConfig;
    text.insert(text.rfind('}'), ", \"typo_key\": 1");
    write_file(bad, text);
    std::string stderr_text;
    int rc = run("verify --config " + bad.string(), nullptr, &stderr_text);
    check(rc == 2, "unknown config key exits 2");
    check(stderr_text.find("typo_key") != std::string::npos,
          "config error names the offending key");

    rc = run("build", nullptr, &stderr_text);
    check(rc == 2, "missing required --config exits 2");
    rc = run("bogus", nullptr, &stderr_text);
    check(rc == 2, "unknown subcommand exits 2");
    rc = run("spectra " + base_args + " --depth 9", nullptr, &stderr_text);
    check(rc == 2 && stderr_text.find("depth") != std::string::npos,
          "depth beyond the chain exits 2");
  }

  {
    fs::path cdir = g_root / "circle";
    int rc = run("circle --out " + cdir.string());
    std::string rep = slurp_file(cdir / "circle_report.txt");
    check(rc == 0, "circle exits 0");
    check(rep.find("epsilon-dense: yes") != std::string::npos,
          "default circle depth is dense");
    check(fs::exists(cdir / "circle_plot.tsv"), "circle writes plot data");
    rc = run("circle --depth 1 --out " + cdir.string());
    rep = slurp_file(cdir / "circle_report.txt");
    check(rc == 0 && rep.find("epsilon-dense: no") != std::string::npos,
          "depth-1 circle is reported sparse");
  }

  {
    fs::path sdir = g_root / "selberg";
    int rc = run("selberg --depth 2 --out " + sdir.string());
    std::string rep = slurp_file(sdir / "selberg_report.txt");
    check(rc == 0, "selberg exits 0");
    check(rep.find("lambda_1") != std::string::npos &&
              rep.find("144") != std::string::npos,
          "selberg table lists the level orders");
    check(rep.find("analog") != std::string::npos,
          "selberg report carries the analog disclaimer");
    check(rep.find("dense/iterative gap") != std::string::npos,
          "selberg report records solver cross-checks");
  }

  fs::remove_all(g_root);
  std::printf("%d failure(s)\n", g_failures);
  return g_failures == 0 ? 0 : 1;
}
