#include "oscimax/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "oscimax/error.hpp"
#include "oscimax/expr.hpp"

namespace oscimax {

namespace {

std::string trim(std::string s) {
  auto notspace = [](unsigned char c) { return !std::isspace(c); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), notspace));
  s.erase(std::find_if(s.rbegin(), s.rend(), notspace).base(), s.end());
  return s;
}

double parse_real(const std::string& text, const std::string& what) {
  const std::string t = trim(text);
  char* end = nullptr;
  const double v = std::strtod(t.c_str(), &end);
  if (t.empty() || end != t.c_str() + t.size() || !std::isfinite(v))
    throw ConfigError("expected a number for " + what + ", got '" + text + "'");
  return v;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, sep)) out.push_back(trim(cur));
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

bool read_json_file(const std::string& path, nlohmann::json& out) {
  std::error_code ec;
  if (!std::filesystem::is_regular_file(path, ec)) return false;
  std::ifstream is(path);
  try {
    out = nlohmann::json::parse(is);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("cannot parse " + path + ": " + e.what());
  }
  return true;
}

struct Monomial {
  double coeff = 1.0;
  double exponent = 0.0;
};

// Splits "c*t^k ± ..." at the top-level signs. A sign right after '^', '*'
// or an exponent marker belongs to the number that follows it.
std::vector<std::string> split_terms(const std::string& s) {
  std::vector<std::string> terms;
  std::string cur;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const char c = s[i];
    if ((c == '+' || c == '-') && !cur.empty()) {
      const char prev = cur.back();
      const bool exp_marker = (prev == 'e' || prev == 'E') && cur.size() >= 2 &&
                              std::isdigit(static_cast<unsigned char>(cur[cur.size() - 2]));
      if (prev != '^' && prev != '*' && !exp_marker) {
        terms.push_back(cur);
        cur.clear();
      }
    }
    if (!std::isspace(static_cast<unsigned char>(c))) cur += c;
  }
  if (!cur.empty()) terms.push_back(cur);
  return terms;
}

Monomial parse_monomial(const std::string& term, bool absolute) {
  const std::string var = absolute ? "|t|" : "t";
  Monomial m;
  std::string s = term;
  double sign = 1.0;
  if (!s.empty() && (s[0] == '+' || s[0] == '-')) {
    if (s[0] == '-') sign = -1.0;
    s.erase(0, 1);
  }
  const auto pos = s.find(var);
  if (pos == std::string::npos) {
    if (absolute) throw ConfigError("term '" + term + "' has no |t|");
    m.coeff = sign * parse_real(s, "coefficient");
    m.exponent = 0.0;
    return m;
  }
  std::string pre = s.substr(0, pos), post = s.substr(pos + var.size());
  if (!pre.empty() && pre.back() == '*') pre.pop_back();
  m.coeff = sign * (pre.empty() ? 1.0 : parse_real(pre, "coefficient"));
  if (post.empty()) {
    m.exponent = 1.0;
  } else if (post[0] == '^') {
    m.exponent = parse_real(post.substr(1), "exponent");
  } else {
    throw ConfigError("cannot parse term '" + term + "'");
  }
  return m;
}

Phase laurent_from_monomials(const std::vector<Monomial>& ms) {
  std::map<int, double> by_power;
  for (const auto& m : ms) {
    if (m.exponent != std::round(m.exponent)) throw ConfigError("Laurent exponents must be integers");
    by_power[static_cast<int>(m.exponent)] += m.coeff;
  }
  int d = 1;
  for (const auto& [k, c] : by_power) d = std::max(d, std::abs(k));
  std::vector<Coefficient> coeffs(static_cast<std::size_t>(2 * d + 1), Coefficient(0.0));
  for (const auto& [k, c] : by_power) coeffs[static_cast<std::size_t>(k + d)] = Coefficient(c);
  return Phase::laurent(d, std::move(coeffs));
}

Phase curved_from_monomials(std::vector<Monomial> ms) {
  std::sort(ms.begin(), ms.end(), [](const Monomial& a, const Monomial& b) { return a.exponent < b.exponent; });
  std::vector<Coefficient> coeffs;
  std::vector<double> ex;
  for (const auto& m : ms) {
    if (!ex.empty() && ex.back() == m.exponent) throw ConfigError("repeated exponent in curved phase");
    coeffs.emplace_back(m.coeff);
    ex.push_back(m.exponent);
  }
  return Phase::curved(std::move(coeffs), std::move(ex));
}

Coefficient coefficient_from_json(const nlohmann::json& j) {
  if (j.is_number()) return Coefficient(j.get<double>());
  if (!j.is_object() || !j.contains("expr") || !j.contains("sup"))
    throw ConfigError("coefficient must be a number or {expr, sup[, inv_sup]}");
  const std::string text = j.at("expr").get<std::string>();
  Expr e = Expr::parse(text, 'x');
  std::optional<double> inv;
  if (j.contains("inv_sup")) inv = j.at("inv_sup").get<double>();
  return Coefficient([e](double x) { return e(x); }, j.at("sup").get<double>(), inv, text);
}

Phase separable_inline(const std::string& body) {
  const auto parts = split(body, ';');
  if (parts.size() != 3) throw ConfigError("separable phase needs '<alpha>;<beta>;<sup alpha>'");
  const double sup = parse_real(parts[2], "alpha sup bound");
  Expr a = Expr::parse(parts[0], 'x');
  Coefficient alpha = a.is_constant() ? Coefficient(a(0.0))
                                      : Coefficient([a](double x) { return a(x); }, sup, std::nullopt, parts[0]);
  return Phase::separable(std::move(alpha), ScalarFunction::from_expression(parts[1]));
}

}  // namespace

Phase phase_from_json(const nlohmann::json& j) {
  try {
    const std::string fam = j.at("family").get<std::string>();
    if (fam == "zero") return Phase::zero();
    if (fam == "quadratic") return Phase::quadratic(coefficient_from_json(j.at("a")));
    if (fam == "separable") {
      return Phase::separable(coefficient_from_json(j.at("alpha")),
                              ScalarFunction::from_expression(j.at("beta").get<std::string>()));
    }
    const auto& cj = j.at("coeffs");
    const auto& ej = j.at("exponents");
    if (!cj.is_array() || !ej.is_array() || cj.size() != ej.size())
      throw ConfigError("coeffs and exponents must be arrays of equal length");
    if (fam == "laurent") {
      std::map<int, Coefficient> by_power;
      int d = 1;
      for (std::size_t i = 0; i < cj.size(); ++i) {
        const int k = ej[i].get<int>();
        by_power[k] = coefficient_from_json(cj[i]);
        d = std::max(d, std::abs(k));
      }
      std::vector<Coefficient> coeffs(static_cast<std::size_t>(2 * d + 1), Coefficient(0.0));
      for (auto& [k, c] : by_power) coeffs[static_cast<std::size_t>(k + d)] = c;
      return Phase::laurent(d, std::move(coeffs));
    }
    if (fam == "curved") {
      std::vector<Coefficient> coeffs;
      std::vector<double> ex;
      for (std::size_t i = 0; i < cj.size(); ++i) {
        coeffs.push_back(coefficient_from_json(cj[i]));
        ex.push_back(ej[i].get<double>());
      }
      return Phase::curved(std::move(coeffs), std::move(ex));
    }
    throw ConfigError("unknown phase family '" + fam + "'");
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bad phase JSON: ") + e.what());
  } catch (const PreconditionError& e) {
    throw ConfigError(e.what());
  }
}

Phase parse_phase(const std::string& spec_in) {
  const std::string spec = trim(spec_in);
  if (spec.empty()) throw ConfigError("empty phase spec");
  nlohmann::json j;
  if (spec[0] == '{') {
    try {
      j = nlohmann::json::parse(spec);
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(std::string("bad phase JSON: ") + e.what());
    }
    return phase_from_json(j);
  }
  if (read_json_file(spec, j)) return phase_from_json(j);

  const auto colon = spec.find(':');
  const std::string head = spec.substr(0, colon);
  const std::string body = colon == std::string::npos ? "" : trim(spec.substr(colon + 1));
  try {
    if (head == "zero") return Phase::zero();
    if (body.empty()) throw ConfigError("phase spec '" + spec + "' has no parameters");
    if (head == "laurent" || head == "curved") {
      const bool absolute = head == "curved";
      std::vector<Monomial> ms;
      for (const auto& t : split_terms(body)) ms.push_back(parse_monomial(t, absolute));
      return absolute ? curved_from_monomials(std::move(ms)) : laurent_from_monomials(ms);
    }
    if (head == "quadratic") return Phase::quadratic(Coefficient(parse_real(body, "quadratic coefficient")));
    if (head == "separable") return separable_inline(body);
  } catch (const PreconditionError& e) {
    throw ConfigError(e.what());
  }
  throw ConfigError("unknown phase spec '" + spec + "'");
}

std::vector<double> parse_real_list(const std::string& text) {
  std::vector<double> out;
  for (const auto& p : split(text, ',')) out.push_back(parse_real(p, "list entry"));
  return out;
}

Function parse_function(const std::string& spec_in) {
  const std::string spec = trim(spec_in);
  if (spec.empty()) throw ConfigError("empty function spec");
  nlohmann::json j;
  try {
    if (spec[0] == '{') return function_from_json(nlohmann::json::parse(spec));
    if (read_json_file(spec, j)) return function_from_json(j);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bad function JSON: ") + e.what());
  } catch (const PreconditionError& e) {
    throw ConfigError(e.what());
  }

  const auto colon = spec.find(':');
  if (colon == std::string::npos) throw ConfigError("function spec '" + spec + "' needs '<kind>:<params>'");
  const std::string head = spec.substr(0, colon);
  const std::string body = trim(spec.substr(colon + 1));
  try {
    if (head == "char") return char_fn(parse_real(body, "char half-width"));
    if (head == "atom") return atom_fbeta(parse_real(body, "atom width"));
    if (head == "bump") {
      const auto v = parse_real_list(body);
      if (v.size() != 3) throw ConfigError("bump needs c,s,h");
      return smooth_bump(v[0], v[1], v[2]);
    }
    if (head == "step") {
      const auto parts = split(body, ';');
      if (parts.size() != 2) throw ConfigError("step needs '<breakpoints>;<values>'");
      return PiecewiseConstantFn(parse_real_list(parts[0]), parse_real_list(parts[1]));
    }
    if (head == "counterexample1" || head == "counterexample2") {
      const double k = parse_real(body, "term count");
      if (k != std::round(k) || k < 1) throw ConfigError("term count must be a positive integer");
      return head == "counterexample1" ? counterexample_part1(static_cast<int>(k)).first
                                       : counterexample_part2(static_cast<int>(k)).first;
    }
  } catch (const PreconditionError& e) {
    throw ConfigError(e.what());
  }
  throw ConfigError("unknown function kind '" + head + "'");
}

}  // namespace oscimax
