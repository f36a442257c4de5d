#pragma once

#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "solspec/error.hpp"
#include "solspec/graph.hpp"
#include "solspec/spectral.hpp"

namespace solspec {

namespace detail {

inline constexpr std::uint64_t kFnvOffset = 0xcbf29ce484222325ULL;
inline constexpr std::uint64_t kFnvPrime = 0x100000001b3ULL;

struct Fnv1a {
  std::uint64_t state = kFnvOffset;
  void feed(const void* data, std::size_t len) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t t = 0; t < len; ++t) {
      state ^= p[t];
      state *= kFnvPrime;
    }
  }
  void feed_u64(std::uint64_t v) {
    unsigned char b[8];
    for (int t = 0; t < 8; ++t) b[t] = (v >> (8 * t)) & 0xff;
    feed(b, 8);
  }
  void feed_f64(double x) {
    std::uint64_t bits;
    std::memcpy(&bits, &x, 8);
    feed_u64(bits);
  }
};

/// Little-endian byte stream; the on-disk format is byte-order fixed, not
/// whatever the host happens to use.
struct ByteWriter {
  std::string bytes;
  void u32(std::uint32_t v) {
    for (int t = 0; t < 4; ++t) bytes.push_back(char((v >> (8 * t)) & 0xff));
  }
  void u64(std::uint64_t v) {
    for (int t = 0; t < 8; ++t) bytes.push_back(char((v >> (8 * t)) & 0xff));
  }
  void f64(double x) {
    std::uint64_t bits;
    std::memcpy(&bits, &x, 8);
    u64(bits);
  }
};

struct ByteReader {
  const std::string& bytes;
  std::size_t pos = 0;
  bool failed = false;
  std::uint32_t u32() {
    if (pos + 4 > bytes.size()) {
      failed = true;
      return 0;
    }
    std::uint32_t v = 0;
    for (int t = 0; t < 4; ++t)
      v |= std::uint32_t(static_cast<unsigned char>(bytes[pos++])) << (8 * t);
    return v;
  }
  std::uint64_t u64() {
    if (pos + 8 > bytes.size()) {
      failed = true;
      return 0;
    }
    std::uint64_t v = 0;
    for (int t = 0; t < 8; ++t)
      v |= std::uint64_t(static_cast<unsigned char>(bytes[pos++])) << (8 * t);
    return v;
  }
  double f64() {
    std::uint64_t bits = u64();
    double x;
    std::memcpy(&x, &bits, 8);
    return x;
  }
};

}  // namespace detail

inline constexpr char kCacheMagic[8] = {'S', 'O', 'L', 'S',
                                        'P', 'E', 'C', '1'};
inline constexpr std::uint32_t kCacheVersion = 1;

/// Content hash of everything the eigendecomposition depends on: graph
/// shape, weights, both measures, and the solver mode string.
inline std::string cache_key(const LaplaceOperator& L,
                             const std::string& solver_mode) {
  detail::Fnv1a h;
  h.feed_u64(L.n);
  h.feed_u64(L.off.size());
  for (std::uint32_t v = 0; v < L.n; ++v) {
    h.feed_f64(L.diag[v]);
    h.feed_f64(L.mu_action[v]);
    h.feed_f64(L.mu_inner[v]);
    h.feed_u64(L.off[v].size());
    for (const auto& [u, w] : L.off[v]) {
      h.feed_u64(u);
      h.feed_f64(w);
    }
  }
  h.feed(solver_mode.data(), solver_mode.size());
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(h.state));
  return buf;
}

inline std::filesystem::path cache_path(const std::filesystem::path& dir,
                                        const std::string& key) {
  return dir / ("spectrum_" + key + ".bin");
}

/// Serializes a spectrum: magic, version, dims, flags, payload, checksum.
inline std::string encode_spectrum(const SpectrumLevel& s) {
  detail::ByteWriter w;
  w.bytes.append(kCacheMagic, 8);
  w.u32(kCacheVersion);
  w.u32(static_cast<std::uint32_t>(s.level));
  w.u32(s.partial ? 1 : 0);
  w.f64(s.op_norm);
  w.u32(static_cast<std::uint32_t>(s.eigenvalues.size()));
  w.u32(s.vectors.empty()
            ? 0
            : static_cast<std::uint32_t>(s.vectors.front().size()));
  for (double v : s.eigenvalues) w.f64(v);
  for (const auto& vec : s.vectors)
    for (double x : vec) w.f64(x);
  for (double r : s.residuals) w.f64(r);
  detail::Fnv1a h;
  h.feed(w.bytes.data(), w.bytes.size());
  w.u64(h.state);
  return w.bytes;
}

/// Decode failure returns nullopt and sets `warning`; never throws on bad
/// bytes, and never partially populates the result.
inline std::optional<SpectrumLevel> decode_spectrum(const std::string& bytes,
                                                    std::string& warning) {
  if (bytes.size() < 8 + 4 + 8 || std::memcmp(bytes.data(), kCacheMagic, 8)) {
    warning = "bad magic";
    return std::nullopt;
  }
  detail::Fnv1a h;
  h.feed(bytes.data(), bytes.size() - 8);
  detail::ByteReader tail{bytes, bytes.size() - 8};
  if (tail.u64() != h.state) {
    warning = "checksum mismatch";
    return std::nullopt;
  }
  detail::ByteReader r{bytes, 8};
  std::uint32_t version = r.u32();
  if (version != kCacheVersion) {
    warning = "version " + std::to_string(version) + " != " +
              std::to_string(kCacheVersion);
    return std::nullopt;
  }
  SpectrumLevel s;
  s.level = r.u32();
  s.partial = r.u32() != 0;
  s.op_norm = r.f64();
  std::uint32_t count = r.u32();
  std::uint32_t dim = r.u32();
  const std::size_t expect =
      36 + 8ull * count * (2 + std::size_t(dim)) + 8;
  if (r.failed || bytes.size() != expect) {
    warning = "truncated payload";
    return std::nullopt;
  }
  s.eigenvalues.resize(count);
  for (auto& v : s.eigenvalues) v = r.f64();
  s.vectors.assign(count, std::vector<double>(dim));
  for (auto& vec : s.vectors)
    for (auto& x : vec) x = r.f64();
  s.residuals.resize(count);
  for (auto& x : s.residuals) x = r.f64();
  if (r.failed) {
    warning = "truncated payload";
    return std::nullopt;
  }
  return s;
}

/// Atomic save: write to a temp name in the same directory, then rename.
inline void save_spectrum_cache(const std::filesystem::path& dir,
                                const std::string& key,
                                const SpectrumLevel& s) {
  std::filesystem::create_directories(dir);
  std::filesystem::path target = cache_path(dir, key);
  std::filesystem::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write cache file " + tmp.string());
    std::string bytes = encode_spectrum(s);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw Error("short write to " + tmp.string());
  }
  std::filesystem::rename(tmp, target);
}

/// Missing file: nullopt with empty warning.  Corrupt file: nullopt with a
/// warning naming the reason; callers recompute and overwrite.
inline std::optional<SpectrumLevel> load_spectrum_cache(
    const std::filesystem::path& dir, const std::string& key,
    std::string& warning) {
  warning.clear();
  std::filesystem::path target = cache_path(dir, key);
  std::ifstream in(target, std::ios::binary);
  if (!in) return std::nullopt;
  std::string bytes((std::istreambuf_iterator<char>(in)),
                    std::istreambuf_iterator<char>());
  auto result = decode_spectrum(bytes, warning);
  if (!result && !warning.empty())
    warning = "cache file " + target.string() + ": " + warning;
  return result;
}

}  // namespace solspec
