#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "commands.hpp"
#include "doctest.h"
#include "fixtures.hpp"
#include "mgmax/io.hpp"

using namespace mgmax;
using namespace mgmax::cli;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("mgmax_test_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp_dir(const fs::path& dir) {
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir)) files.push_back(e.path());
  std::sort(files.begin(), files.end());
  std::string all;
  for (const auto& f : files) all += f.filename().string() + "\n" + read_file(f);
  return all;
}

std::vector<nlohmann::json> records(const std::string& text) {
  std::vector<nlohmann::json> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(nlohmann::json::parse(line));
  return out;
}

int run(const std::string& args) {
  const int status = std::system((std::string(MGMAX_CLI_PATH) + " " + args + " >/dev/null 2>&1").c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

SweepConfig small_config() {
  SweepConfig c;
  c.trials = 6;
  c.seed = 11;
  c.candidates = 40;
  c.ascent_rounds = 10;
  return c;
}

}  // namespace

TEST_CASE("q tokens") {
  CHECK(QToken::parse("inf").resolve(2.0).is_infinite());
  CHECK(QToken::parse("p").resolve(1.5) == Exponent::finite(1.5));
  CHECK(QToken::parse("2p").resolve(3.0) == Exponent::finite(6.0));
  CHECK(QToken::parse("4").resolve(2.0) == Exponent::finite(4.0));
  CHECK_THROWS_AS(QToken::parse("abc"), ConfigError);
  CHECK_THROWS_AS(QToken::parse("0.5"), ConfigError);

  SweepConfig c;
  c.p_values = {3.0};
  c.q_values = {QToken::parse("2")};
  CHECK_THROWS_AS(c.validate(), ConfigError);
}

TEST_CASE("generate is deterministic in the seed") {
  auto c = small_config();
  c.out = scratch("gen_a");
  std::ostringstream m1, m2, m3;
  cmd_generate(c, m1);
  const auto first = slurp_dir(c.out);
  c.out = scratch("gen_b");
  cmd_generate(c, m2);
  CHECK(slurp_dir(c.out) == first);
  CHECK(m1.str() == m2.str());

  c.seed = 12;
  c.out = scratch("gen_c");
  cmd_generate(c, m3);
  CHECK(slurp_dir(c.out) != first);
}

TEST_CASE("depth 1 gives a root with leaf children") {
  auto c = small_config();
  c.depth_min = c.depth_max = 1;
  c.out = scratch("depth1");
  std::ostringstream manifest;
  cmd_generate(c, manifest);
  for (const auto& path : list_instances(c.out)) {
    const auto m = read_model(read_file(path));
    CHECK(m.roots().size() == 1);
    CHECK(m.max_depth() == 1);
    CHECK(m.node_count() == m.leaf_count() + 1);
  }
}

TEST_CASE("zero trials is a configuration error") {
  auto c = small_config();
  c.trials = 0;
  c.out = scratch("zero");
  std::ostringstream sink;
  CHECK_THROWS_AS(cmd_generate(c, sink), ConfigError);
  CHECK(run("generate --trials 0 --out " + c.out.string()) == 2);
}

TEST_CASE("verify on E1 finds B = A_lower = 2") {
  const auto dir = scratch("e1");
  write_file(dir / "e1.json", write_model(testing::make_e1()));
  auto c = small_config();
  c.p_values = {2.0};
  c.q_values = {QToken::parse("inf")};
  std::ostringstream report, log;
  CHECK(cmd_verify(c, {dir / "e1.json"}, report, log) == 0);
  bool seen = false;
  for (const auto& j : records(report.str())) {
    CHECK(j["pass"].get<bool>());
    if (j["check"] == "sandwich") {
      seen = true;
      CHECK(j["B"].get<double>() == doctest::Approx(2.0).epsilon(1e-12));
      CHECK(j["A_lower"].get<double>() == doctest::Approx(2.0).epsilon(1e-12));
    }
  }
  CHECK(seen);
  CHECK(run("verify " + (dir / "e1.json").string() + " --p 2 --q inf") == 0);
}

TEST_CASE("a corrupted instance exits with code 2") {
  const auto dir = scratch("corrupt");
  write_file(dir / "bad.json", "{\"nodes\": [");
  std::ostringstream report, log;
  CHECK(cmd_verify(small_config(), {dir / "bad.json"}, report, log) == 2);
  CHECK(report.str().empty());
  CHECK(run("verify " + (dir / "bad.json").string()) == 2);

  write_file(dir / "neg.json",
             R"({"nodes":[{"id":"a","children":["b","c"]},{"id":"b","parent":"a"},{"id":"c","parent":"a"}],)"
             R"("mu":{"b":-1,"c":1},"nu":{"b":1,"c":1}})");
  CHECK(cmd_verify(small_config(), {dir / "neg.json"}, report, log) == 2);
}

TEST_CASE("halving C(p) is caught and names the failing link") {
  const auto dir = scratch("halve");
  write_file(dir / "e1.json", write_model(testing::make_e1()));
  auto c = small_config();
  c.p_values = {6.0};
  c.q_values = {QToken::parse("inf")};
  c.cp_factor = 0.5;
  std::ostringstream report, log;
  CHECK(cmd_verify(c, {dir / "e1.json"}, report, log) == 1);
  std::set<std::string> failed;
  for (const auto& j : records(report.str())) {
    if (!j["pass"].get<bool>()) failed.insert(j["failed_link"].get<std::string>());
  }
  CHECK(failed.contains("sufficiency"));
  CHECK(run("verify " + (dir / "e1.json").string() + " --p 6 --q inf --debug-halve-cp") == 1);
}

TEST_CASE("a generated sweep passes and summarizes") {
  auto c = small_config();
  c.out = scratch("sweep");
  std::ostringstream manifest, report, log;
  cmd_generate(c, manifest);
  const auto files = list_instances(c.out);
  CHECK(files.size() == c.trials);
  CHECK(cmd_verify(c, files, report, log) == 0);

  const auto recs = records(report.str());
  CHECK(recs.size() == c.trials * 9 * 5);
  for (const auto& j : recs) {
    if (j["check"] == "sandwich" && j["p"].get<double>() == 2.0) {
      CHECK(j["A_lower"].get<double>() <= 5.196153 * j["B"].get<double>());
    }
  }
  // Worker count does not change the report.
  c.workers = 3;
  std::ostringstream report3;
  CHECK(cmd_verify(c, files, report3, log) == 0);
  CHECK(report3.str() == report.str());

  write_file(c.out / "report.jsonl", report.str());
  std::ostringstream csv;
  cmd_report(c.out / "report.jsonl", csv);
  std::istringstream lines(csv.str());
  std::string header;
  std::getline(lines, header);
  CHECK(header == "p,q,metric,value,instance_id");
  std::size_t rows = 0;
  for (std::string line; std::getline(lines, line);) {
    ++rows;
    CHECK(line.find("failures") == std::string::npos);
    if (line.starts_with("2,") && line.find("max_A_lower_over_B") != std::string::npos) {
      const double ratio = std::stod(line.substr(line.find("B,") + 2));
      CHECK(ratio >= 1.0 - 1e-9);
      CHECK(ratio <= 5.196153);
    }
  }
  CHECK(rows == 9 * 3);
}

TEST_CASE("report edge cases") {
  const auto dir = scratch("report");
  write_file(dir / "empty.jsonl", "");
  std::ostringstream csv;
  cmd_report(dir / "empty.jsonl", csv);
  CHECK(csv.str() == "p,q,metric,value,instance_id\n");
  CHECK_THROWS_AS(cmd_report(dir / "missing.jsonl", csv), ConfigError);
  CHECK(run("report " + (dir / "missing.jsonl").string()) == 2);
}

TEST_CASE("resume skips instances already in the report") {
  auto c = small_config();
  c.trials = 2;
  c.p_values = {2.0};
  c.q_values = {QToken::parse("p")};
  c.out = scratch("resume");
  std::ostringstream manifest;
  cmd_generate(c, manifest);
  const auto report = (c.out / "r.jsonl").string();
  const auto inst = (c.out / "inst_0000.json").string();
  CHECK(run("verify " + inst + " --p 2 --q p --report " + report) == 0);
  const auto once = read_file(report);
  CHECK(run("verify " + inst + " --p 2 --q p --resume --report " + report) == 0);
  CHECK(read_file(report) == once);
  CHECK(run("verify " + c.out.string() + " --p 2 --q p --resume --report " + report) == 0);
  CHECK(records(read_file(report)).size() == 2 * 5);
}
