#include "xrk/reference.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <sstream>
#include <thread>

#include <unistd.h>

#include "xrk/errors.hpp"
#include "xrk/stepper.hpp"

namespace xrk {

namespace fs = std::filesystem;

namespace {

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

fs::path cache_stem(const fs::path& dir, const ProblemConfig& cfg, MethodId method,
                    double h_ref) {
  char hbuf[64];
  std::snprintf(hbuf, sizeof hbuf, "%a", h_ref);
  std::string name = std::string(to_string(cfg.id)) + "-" + cfg.digest() + "-" +
                     std::string(to_string(method)) + "-h" + hbuf;
  for (char& ch : name) {
    if (ch == '.' || ch == '+') ch = '_';
  }
  return dir / name;
}

std::optional<ReferenceSolution> load(const fs::path& stem, Index dim) {
  std::ifstream bin(fs::path(stem).concat(".bin"), std::ios::binary);
  if (!bin) return std::nullopt;
  std::uint64_t n = 0;
  if (!bin.read(reinterpret_cast<char*>(&n), sizeof n) || static_cast<Index>(n) != dim) {
    return std::nullopt;
  }
  ReferenceSolution ref;
  ref.y.resize(dim);
  if (!bin.read(reinterpret_cast<char*>(ref.y.data()),
                static_cast<std::streamsize>(sizeof(double) * n))) {
    return std::nullopt;
  }
  double h_ref = 0.0;
  double gap = 0.0;
  if (!bin.read(reinterpret_cast<char*>(&h_ref), sizeof h_ref) ||
      !bin.read(reinterpret_cast<char*>(&gap), sizeof gap)) {
    return std::nullopt;
  }
  ref.h_ref = h_ref;
  ref.gap = gap;
  ref.from_disk = true;
  return ref;
}

// Write to a unique temporary name, then rename into place (last writer wins).
void write_atomically(const fs::path& target, const std::string& bytes) {
  static std::atomic<unsigned> counter{0};
  fs::path tmp = target;
  tmp += ".tmp." + std::to_string(::getpid()) + "." +
         std::to_string(std::hash<std::thread::id>{}(std::this_thread::get_id())) + "." +
         std::to_string(counter++);
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) return;
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) return;
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) fs::remove(tmp, ec);
}

void store(const fs::path& stem, const ProblemConfig& cfg, MethodId method,
           const ReferenceSolution& ref) {
  std::error_code ec;
  fs::create_directories(stem.parent_path(), ec);
  if (ec) return;

  std::string bytes;
  const std::uint64_t n = static_cast<std::uint64_t>(ref.y.size());
  bytes.append(reinterpret_cast<const char*>(&n), sizeof n);
  bytes.append(reinterpret_cast<const char*>(ref.y.data()), sizeof(double) * n);
  bytes.append(reinterpret_cast<const char*>(&ref.h_ref), sizeof ref.h_ref);
  bytes.append(reinterpret_cast<const char*>(&ref.gap), sizeof ref.gap);
  write_atomically(fs::path(stem).concat(".bin"), bytes);

  std::ostringstream text;
  text << "config = " << cfg.canonical() << "\n"
       << "digest = " << cfg.digest() << "\n"
       << "method = " << to_string(method) << "\n"
       << "h_ref = " << format_double(ref.h_ref) << "\n"
       << "gap = " << format_double(ref.gap) << "\n";
  write_atomically(fs::path(stem).concat(".txt"), text.str());
}

}  // namespace

fs::path default_refcache_dir() {
  if (const char* env = std::getenv("XRK_REFCACHE"); env && *env) return fs::path(env);
  return fs::path("refcache");
}

ReferenceSolution reference_solution(const ProblemConfig& cfg, double smallest_h,
                                     const ReferenceOptions& opts) {
  if (!(smallest_h > 0.0) || !(opts.refinement >= 1.0)) {
    throw ConfigError("reference_solution: invalid stepsize or refinement");
  }
  const SemiLinearSystem sys = build_problem(cfg);
  const MethodSpec spec = method_spec(opts.method);
  const double h_first = smallest_h / opts.refinement;
  const fs::path dir = opts.cache_dir.value_or(default_refcache_dir());
  const fs::path stem = cache_stem(dir, cfg, opts.method, h_first);

  if (opts.use_disk_cache) {
    if (auto hit = load(stem, sys.dimension())) return *hit;
  }

  double h_ref = h_first;
  double last_gap = 0.0;
  std::optional<Vector> coarse;
  for (int attempt = 0; attempt < 2; ++attempt) {
    if (!coarse) coarse = integrate_fixed(spec, sys, h_ref).y;
    Vector fine = integrate_fixed(spec, sys, 0.5 * h_ref).y;
    last_gap = max_norm(fine - *coarse);
    if (last_gap <= opts.certify_tolerance) {
      ReferenceSolution ref{std::move(fine), h_ref, last_gap, false};
      if (opts.use_disk_cache) store(stem, cfg, opts.method, ref);
      return ref;
    }
    // Tighten by the number of halvings the method order predicts is needed
    // to bring the gap to half the tolerance.
    const double excess = std::log2(last_gap / (0.5 * opts.certify_tolerance));
    const int halvings = std::clamp(static_cast<int>(std::ceil(excess / spec.order)), 1, 4);
    h_ref = std::ldexp(h_ref, -halvings);
    if (halvings == 1) {
      coarse = std::move(fine);
    } else {
      coarse.reset();
    }
  }
  throw OracleError("reference for " + cfg.canonical() + " not certified: gap " +
                    format_double(last_gap) + " > " + format_double(opts.certify_tolerance));
}

}  // namespace xrk
