#include <doctest.h>

#include <array>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#ifndef MARGINLOSS_CLI_PATH
#define MARGINLOSS_CLI_PATH "marginloss"
#endif

namespace {

using nlohmann::json;

struct RunResult {
  int exit_code = -1;
  std::string stdout_text;
  std::string stderr_text;
};

RunResult run_cli(const std::string& args) {
  const std::string out_file = "/tmp/mgl_cli_stdout.txt";
  const std::string err_file = "/tmp/mgl_cli_stderr.txt";
  const std::string command = std::string(MARGINLOSS_CLI_PATH) + " " + args + " >" +
                              out_file + " 2>" + err_file;
  const int raw = std::system(command.c_str());
  RunResult result;
  result.exit_code = WEXITSTATUS(raw);
  auto slurp = [](const std::string& path) {
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  };
  result.stdout_text = slurp(out_file);
  result.stderr_text = slurp(err_file);
  return result;
}

std::string slurp_file(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct Workspace {
  std::string dir;
  Workspace() : dir("/tmp/mgl_cli_ws") {
    const int rc = std::system(("rm -rf " + dir + " && mkdir -p " + dir).c_str());
    REQUIRE(rc == 0);
  }
  std::string path(const std::string& name) const { return dir + "/" + name; }
};

std::vector<std::vector<std::string>> parse_table(const std::string& text, char sep) {
  std::vector<std::vector<std::string>> rows;
  std::stringstream ss(text);
  std::string line;
  while (std::getline(ss, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> fields;
    std::stringstream ls(line);
    std::string field;
    while (std::getline(ls, field, sep)) fields.push_back(field);
    rows.push_back(fields);
  }
  return rows;
}

}  // namespace

TEST_CASE("cli: losses check emits conformability and convexity JSON lines") {
  const auto result = run_cli("losses check --loss exponential");
  REQUIRE(result.exit_code == 0);
  std::stringstream ss(result.stdout_text);
  std::string line;
  std::vector<json> lines;
  while (std::getline(ss, line)) lines.push_back(json::parse(line));
  REQUIRE(lines.size() == 4);  // config echo + three report lines
  const json summary = lines.back();
  CHECK(summary["conformable"] == true);
  CHECK(summary["convex"] == true);

  const auto savage = run_cli("losses check --loss savage");
  std::stringstream ss2(savage.stdout_text);
  std::vector<json> lines2;
  while (std::getline(ss2, line)) lines2.push_back(json::parse(line));
  CHECK(lines2.back()["conformable"] == true);
  CHECK(lines2.back()["convex"] == false);
}

TEST_CASE("cli: losses tabulate writes a parseable TSV") {
  Workspace ws;
  const std::string out = ws.path("curve.tsv");
  const auto result =
      run_cli("losses tabulate --loss exponential --range -2:2 --points 5 --out " + out);
  REQUIRE(result.exit_code == 0);
  const auto rows = parse_table(slurp_file(out), '\t');
  REQUIRE(rows.size() == 6);  // header + 5 points
  CHECK(rows[0][0] == "v");
  CHECK(std::stod(rows[3][1]) == 1.0);  // phi(0) = k = 1
  // round trip at 17 digits: phi column matches e^{-v/2} exactly
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const double v = std::stod(rows[i][0]);
    const double phi = std::stod(rows[i][1]);
    CHECK(phi == std::exp(-0.5 * v));
  }
}

TEST_CASE("cli: simulate -> fit -> diagnose round trip") {
  Workspace ws;
  const std::string cfg_path = ws.path("gen.json");
  {
    std::ofstream cfg(cfg_path);
    cfg << R"({"n":2000,"beta0":[0.5,-1.0,0.25],"feature_law":"standard_gaussian",)"
        << R"("link":"logistic","seed":7})";
  }
  const std::string data_path = ws.path("data.csv");
  REQUIRE(run_cli("simulate --config " + cfg_path + " --out " + data_path).exit_code ==
          0);

  const std::string model_path = ws.path("model.json");
  const auto fit_run = run_cli("fit --loss logistic --data " + data_path +
                               " --tol 1e-8 --seed 7 --out " + model_path);
  REQUIRE(fit_run.exit_code == 0);
  const json model = json::parse(slurp_file(model_path));
  CHECK(model["status"] == "converged");
  CHECK(model["loss"] == "logistic");
  CHECK(model["beta"].size() == 3);
  CHECK(model.contains("r_emp"));
  CHECK(model["config"]["seed"] == 7);

  const std::string resid_path = ws.path("resid.csv");
  REQUIRE(run_cli("diagnose residuals --model " + model_path + " --data " + data_path +
                  " --out " + resid_path)
              .exit_code == 0);
  const auto rows = parse_table(slurp_file(resid_path), ',');
  REQUIRE(rows.size() == 2001);
  REQUIRE(rows[0].size() == 8);  // y_star,f,margin,s,s_squared + 3 components
  CHECK(rows[0][2] == "margin");
  // margin column reproduces -log(s^2) from the s column to 1e-12
  for (std::size_t i = 1; i < rows.size(); i += 97) {
    const double margin = std::stod(rows[i][2]);
    const double s = std::stod(rows[i][3]);
    CHECK(std::abs(-std::log(s * s) - margin) < 1e-12);
    // component log-S^2 columns sum to -margin... i.e. -log total S^2
    double component_sum = 0.0;
    for (std::size_t c = 5; c < 8; ++c) component_sum += std::stod(rows[i][c]);
    CHECK(std::abs(component_sum + margin) < 1e-10);
  }
}

TEST_CASE("cli: identical seeds give byte-identical outputs") {
  Workspace ws;
  const std::string cfg_path = ws.path("gen.json");
  {
    std::ofstream cfg(cfg_path);
    cfg << R"({"n":500,"beta0":[1.0,-0.5],"seed":99})";
  }
  const std::string a = ws.path("a.csv");
  const std::string b = ws.path("b.csv");
  REQUIRE(run_cli("simulate --config " + cfg_path + " --out " + a).exit_code == 0);
  REQUIRE(run_cli("simulate --config " + cfg_path + " --out " + b).exit_code == 0);
  CHECK(slurp_file(a) == slurp_file(b));

  // identical command line run twice, snapshotting the artifact between runs
  const std::string model_path = ws.path("model.json");
  const std::string command =
      "fit --loss exponential --data " + a + " --seed 3 --out " + model_path;
  REQUIRE(run_cli(command).exit_code == 0);
  const std::string first = slurp_file(model_path);
  REQUIRE(run_cli(command).exit_code == 0);
  CHECK(first == slurp_file(model_path));
}

TEST_CASE("cli: boost writes model JSON and diagnostics") {
  Workspace ws;
  const std::string cfg_path = ws.path("gen.json");
  {
    std::ofstream cfg(cfg_path);
    cfg << R"({"n":200,"beta0":[1.5,-1.0],"seed":42})";
  }
  const std::string data_path = ws.path("train.csv");
  REQUIRE(run_cli("simulate --config " + cfg_path + " --out " + data_path).exit_code ==
          0);
  const std::string model_path = ws.path("boost.json");
  const std::string diag_path = ws.path("diag.csv");
  const auto result = run_cli("boost --data " + data_path +
                              " --stages 20 --seed 7 --out " + model_path + " --diag " +
                              diag_path);
  REQUIRE(result.exit_code == 0);
  const json model = json::parse(slurp_file(model_path));
  CHECK(model["stages"].size() == 20);
  CHECK(model["staged_r_emp"].size() == 21);
  CHECK(model["staged_r_emp"][0] == 1.0);

  const auto diag = parse_table(slurp_file(diag_path), ',');
  REQUIRE(diag.size() == 22);  // header + 21 stages
  CHECK(diag[0][0] == "stage");
  CHECK(std::stod(diag[1][2]) == 1.0);
  // r_emp column never increases
  for (std::size_t i = 2; i < diag.size(); ++i)
    CHECK(std::stod(diag[i][2]) <= std::stod(diag[i - 1][2]));
}

TEST_CASE("cli: validation and io errors use distinct exit codes") {
  Workspace ws;
  // empty dataset: header only
  const std::string empty_path = ws.path("empty.csv");
  {
    std::ofstream out(empty_path);
    out << "x1,x2,y\n";
  }
  const auto empty = run_cli("fit --loss logistic --data " + empty_path + " --out " +
                             ws.path("m.json"));
  CHECK(empty.exit_code == 2);
  CHECK(json::parse(empty.stderr_text)["message"] == "empty dataset");

  const auto missing = run_cli("fit --loss logistic --data /nonexistent.csv --out " +
                               ws.path("m.json"));
  CHECK(missing.exit_code == 3);
  CHECK(json::parse(missing.stderr_text)["error"] == "io");

  const auto unknown_loss =
      run_cli("losses check --loss hinge");
  CHECK(unknown_loss.exit_code == 2);

  const auto unknown_flag = run_cli("losses check --loss exponential --bogus 3");
  CHECK(unknown_flag.exit_code == 2);

  const auto bad_range = run_cli("losses tabulate --loss exponential --range oops "
                                 "--out " + ws.path("t.tsv"));
  CHECK(bad_range.exit_code == 2);

  // domain error: squared loss outside (-1, 1)
  const auto domain = run_cli("losses tabulate --loss squared --range -3:3 --out " +
                              ws.path("sq.tsv"));
  CHECK(domain.exit_code == 2);
  CHECK(json::parse(domain.stderr_text)["error"] == "domain");
}

TEST_CASE("cli: pnorm-fit scales coefficients as 2/p") {
  Workspace ws;
  const std::string cfg_path = ws.path("gen.json");
  {
    std::ofstream cfg(cfg_path);
    cfg << R"({"n":500,"beta0":[0.8,-0.6],"seed":99})";
  }
  const std::string data_path = ws.path("data.csv");
  REQUIRE(run_cli("simulate --config " + cfg_path + " --out " + data_path).exit_code ==
          0);
  const std::string m2 = ws.path("p2.json");
  const std::string m4 = ws.path("p4.json");
  REQUIRE(run_cli("pnorm-fit --p 2 --data " + data_path + " --out " + m2).exit_code ==
          0);
  REQUIRE(run_cli("pnorm-fit --p 4 --data " + data_path + " --out " + m4).exit_code ==
          0);
  const json j2 = json::parse(slurp_file(m2));
  const json j4 = json::parse(slurp_file(m4));
  for (std::size_t j = 0; j < 2; ++j) {
    const double b2 = j2["beta"][j].get<double>();
    const double b4 = j4["beta"][j].get<double>();
    CHECK(std::abs(b4 - 0.5 * b2) <= 1e-4 * std::abs(b2));
  }
}
