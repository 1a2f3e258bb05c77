#include <doctest.h>

#include <atomic>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "oscimax/report.hpp"

using namespace oscimax;

TEST_CASE("verdict rule") {
  CHECK(judge(1.0, 0.5) == Verdict::pass);
  CHECK(judge(0.4, 0.5) == Verdict::inconclusive);
  CHECK(judge(-0.4, 0.5) == Verdict::inconclusive);
  CHECK(judge(-0.6, 0.5) == Verdict::fail);
  CHECK(judge(0.0, 0.0) == Verdict::inconclusive);
  CHECK(std::string(to_string(Verdict::pass)) == "PASS");
}

TEST_CASE("CSV formatting") {
  CHECK(csv_escape("plain") == "plain");
  CHECK(csv_escape("a,b") == "\"a,b\"");
  CHECK(csv_escape("say \"hi\"") == "\"say \"\"hi\"\"\"");
  CHECK(format_double(0.1) == "0.10000000000000001");
  CHECK(format_double(2.0) == "2");

  ExperimentReport rep;
  rep.id = "t";
  rep.param_columns = {"k", "label"};
  set_config(rep, {{"b", 1}, {"a", 2}});
  ReportRow row;
  row.params = {1.5, std::string("x,y")};
  row.measured = 0.25;
  row.bound = 1.0;
  row.margin = 0.75;
  row.verdict = Verdict::pass;
  rep.rows.push_back(row);
  const std::string csv = rep.to_csv();
  std::istringstream is(csv);
  std::string header, line;
  std::getline(is, header);
  std::getline(is, line);
  CHECK(header == "k,label,measured,bound,margin,err,verdict,flag,config_hash\r");
  CHECK(line == "1.5,\"x,y\",0.25,1,0.75,0,PASS,," + rep.config_hash + "\r");
  CHECK(rep.counts().pass == 1);
  CHECK_FALSE(rep.has_failures());
}

TEST_CASE("config hash is canonical") {
  const auto a = nlohmann::json::parse(R"({"x":1,"y":[1,2]})");
  const auto b = nlohmann::json::parse(R"({"y":[1,2],"x":1})");
  CHECK(config_hash(a) == config_hash(b));
  CHECK(config_hash(a).size() == 16);
  CHECK(config_hash(a) != config_hash(nlohmann::json::parse(R"({"x":2,"y":[1,2]})")));
}

TEST_CASE("linear fit") {
  const auto f = linear_fit({1, 2, 3, 4}, {3, 5, 7, 9});
  CHECK(f.slope == doctest::Approx(2.0));
  CHECK(f.intercept == doctest::Approx(1.0));
  CHECK(f.r2 == doctest::Approx(1.0));
}

TEST_CASE("parallel_for covers every index and reports the lowest failure") {
  std::vector<int> hit(1000, 0);
  parallel_for(hit.size(), 4, [&](std::size_t i) { hit[i] += 1; });
  for (int h : hit) CHECK(h == 1);
  try {
    parallel_for(100, 3, [](std::size_t i) {
      if (i == 17 || i == 60) throw std::runtime_error(std::to_string(i));
    });
    FAIL("no exception");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()) == "17");
  }
}

TEST_CASE("atomic file write") {
  const std::string path = "oscimax_test_atomic.txt";
  write_file_atomic(path, "one");
  write_file_atomic(path, "two");
  std::ifstream is(path);
  std::string s;
  is >> s;
  CHECK(s == "two");
  std::remove(path.c_str());
}
