#include "oscimax/report.hpp"

#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <thread>

#include <unistd.h>

#include "oscimax/error.hpp"

namespace oscimax {

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::pass: return "PASS";
    case Verdict::fail: return "FAIL";
    case Verdict::inconclusive: return "INCONCLUSIVE";
    case Verdict::skipped: return "SKIPPED";
    case Verdict::info: return "INFO";
  }
  return "?";
}

Verdict judge(double margin, double err) {
  if (std::isnan(margin)) return Verdict::inconclusive;
  if (margin > err) return Verdict::pass;
  if (margin < -err) return Verdict::fail;
  return Verdict::inconclusive;
}

nlohmann::json Check::to_json() const {
  return {{"name", name},       {"measured", measured}, {"bound", bound}, {"margin", margin},
          {"err", err},         {"verdict", to_string(verdict)}, {"detail", detail}};
}

void VerdictCounts::add(Verdict v) {
  switch (v) {
    case Verdict::pass: ++pass; break;
    case Verdict::fail: ++fail; break;
    case Verdict::inconclusive: ++inconclusive; break;
    case Verdict::skipped: ++skipped; break;
    case Verdict::info: ++info; break;
  }
}

nlohmann::json VerdictCounts::to_json() const {
  return {{"PASS", pass}, {"FAIL", fail}, {"INCONCLUSIVE", inconclusive}, {"SKIPPED", skipped}, {"INFO", info}};
}

VerdictCounts ExperimentReport::counts() const {
  VerdictCounts c;
  for (const auto& r : rows) c.add(r.verdict);
  for (const auto& k : checks) c.add(k.verdict);
  return c;
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string csv_escape(std::string_view field) {
  if (field.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char ch : field) {
    if (ch == '"') out += '"';
    out += ch;
  }
  out += '"';
  return out;
}

std::string format_cell(const Cell& c) {
  return std::visit(
      [](const auto& v) -> std::string {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, std::monostate>) return "";
        else if constexpr (std::is_same_v<T, double>) return format_double(v);
        else if constexpr (std::is_same_v<T, long long>) return std::to_string(v);
        else if constexpr (std::is_same_v<T, bool>) return v ? "true" : "false";
        else return csv_escape(v);
      },
      c);
}

std::string ExperimentReport::to_csv() const {
  std::string out;
  auto line = [&](const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (i) out += ',';
      out += fields[i];
    }
    out += "\r\n";
  };
  std::vector<std::string> header;
  for (const auto& c : param_columns) header.push_back(csv_escape(c));
  for (const char* c : {"measured", "bound", "margin", "err", "verdict", "flag", "config_hash"}) header.push_back(c);
  line(header);
  for (const auto& r : rows) {
    if (r.params.size() != param_columns.size())
      throw PreconditionError("report row width does not match the header");
    std::vector<std::string> f;
    for (const auto& c : r.params) f.push_back(format_cell(c));
    f.push_back(format_double(r.measured));
    f.push_back(r.bound ? format_double(*r.bound) : "");
    f.push_back(r.margin ? format_double(*r.margin) : "");
    f.push_back(format_double(r.err));
    f.push_back(to_string(r.verdict));
    f.push_back(csv_escape(r.flag));
    f.push_back(config_hash);
    line(f);
  }
  return out;
}

nlohmann::json ExperimentReport::summary_json() const {
  nlohmann::json cj = nlohmann::json::array();
  for (const auto& c : checks) cj.push_back(c.to_json());
  return {{"id", id},
          {"config_hash", config_hash},
          {"config", config},
          {"pass_counts", counts().to_json()},
          {"fit_stats", fit},
          {"checks", cj},
          {"extra", extra},
          {"rows", rows.size()},
          {"runtime_seconds", runtime_seconds}};
}

void set_config(ExperimentReport& rep, nlohmann::json config) {
  rep.config_hash = config_hash(config);
  rep.config = std::move(config);
}

std::string config_hash(const nlohmann::json& config) {
  const std::string s = config.dump();
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

void write_file_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  fs::path tmp = target;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    os << content;
    os.flush();
    if (!os) throw std::runtime_error("write failed: " + tmp.string());
  }
  fs::rename(tmp, target);
}

nlohmann::json LinearFit::to_json() const {
  return {{"slope", slope}, {"intercept", intercept}, {"r2", r2}, {"n", n}};
}

LinearFit linear_fit(const std::vector<double>& xs, const std::vector<double>& ys) {
  if (xs.size() != ys.size()) throw PreconditionError("linear_fit: size mismatch");
  LinearFit fit;
  fit.n = xs.size();
  if (fit.n < 2) return fit;
  const double n = static_cast<double>(fit.n);
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < fit.n; ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < fit.n; ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  if (sxx == 0.0) return fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.r2 = syy > 0.0 ? sxy * sxy / (sxx * syy) : 1.0;
  return fit;
}

int default_workers() {
  if (const char* env = std::getenv("OSCIMAX_WORKERS")) {
    const int w = std::atoi(env);
    if (w > 0) return w;
  }
  const unsigned hc = std::thread::hardware_concurrency();
  return hc > 0 ? static_cast<int>(hc) : 1;
}

void parallel_for(std::size_t n, int workers, const std::function<void(std::size_t)>& fn) {
  if (n == 0) return;
  const std::size_t w = std::min<std::size_t>(n, static_cast<std::size_t>(std::max(1, workers)));
  std::atomic<std::size_t> next{0};
  std::mutex mu;
  std::size_t failed_index = n;
  std::exception_ptr failure;
  auto body = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(mu);
        if (i < failed_index) {
          failed_index = i;
          failure = std::current_exception();
        }
      }
    }
  };
  if (w == 1) {
    body();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(w);
    for (std::size_t k = 0; k < w; ++k) pool.emplace_back(body);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);
}

}  // namespace oscimax
