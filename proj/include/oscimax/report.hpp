#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <json.hpp>

namespace oscimax {

enum class Verdict { pass, fail, inconclusive, skipped, info };

const char* to_string(Verdict v);

// margin ≥ 0 means the bound holds. PASS needs margin > err, FAIL needs
// margin < −err; anything in between is inconclusive.
Verdict judge(double margin, double err);

using Cell = std::variant<std::monostate, double, long long, std::string, bool>;

struct ReportRow {
  std::vector<Cell> params;  // one per ExperimentReport::param_columns
  double measured = 0.0;
  std::optional<double> bound;
  std::optional<double> margin;
  double err = 0.0;
  Verdict verdict = Verdict::info;
  std::string flag;
};

// Aggregate check that is not tied to one parameter row.
struct Check {
  std::string name;
  double measured = 0.0;
  double bound = 0.0;
  double margin = 0.0;
  double err = 0.0;
  Verdict verdict = Verdict::info;
  nlohmann::json detail = nlohmann::json::object();

  nlohmann::json to_json() const;
};

struct VerdictCounts {
  int pass = 0, fail = 0, inconclusive = 0, skipped = 0, info = 0;
  void add(Verdict v);
  nlohmann::json to_json() const;
};

struct ExperimentReport {
  std::string id;
  nlohmann::json config = nlohmann::json::object();
  std::string config_hash;
  std::vector<std::string> param_columns;
  std::vector<ReportRow> rows;
  std::vector<Check> checks;
  nlohmann::json fit = nlohmann::json::object();
  nlohmann::json extra = nlohmann::json::object();
  double runtime_seconds = 0.0;

  VerdictCounts counts() const;  // rows and checks together
  bool has_failures() const { return counts().fail > 0; }

  // RFC-4180, header row, CRLF line ends, doubles with 17 significant digits.
  // Contains nothing run-dependent, so equal configs give equal bytes.
  std::string to_csv() const;
  // {id, config_hash, config, pass_counts, fit_stats, checks, extra, runtime_seconds}
  nlohmann::json summary_json() const;
};

// Stamps config and its hash onto the report.
void set_config(ExperimentReport& rep, nlohmann::json config);

// FNV-1a 64 of the canonical dump (object keys sorted), as 16 hex digits.
std::string config_hash(const nlohmann::json& config);

std::string format_double(double v);
std::string csv_escape(std::string_view field);
std::string format_cell(const Cell& c);

// Writes to a sibling temp file, then renames over the target.
void write_file_atomic(const std::string& path, const std::string& content);

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  std::size_t n = 0;

  nlohmann::json to_json() const;
};

LinearFit linear_fit(const std::vector<double>& xs, const std::vector<double>& ys);

// OSCIMAX_WORKERS if set and positive, else the hardware thread count.
int default_workers();

// Calls fn(i) for i in [0, n) on up to `workers` threads. Results must be
// written by index. The exception of the lowest failing index is rethrown.
void parallel_for(std::size_t n, int workers, const std::function<void(std::size_t)>& fn);

}  // namespace oscimax
