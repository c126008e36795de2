// Command-line front end for the marginloss shared library. Talks to the
// library exclusively through the C API in marginloss.h; all file formats
// (CSV/TSV tables, model JSON) are owned here.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "marginloss.h"

using nlohmann::json;

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitIo = 3;

struct CliError {
  int code;
  std::string category;
  std::string message;
};

[[noreturn]] void fail(int code, const std::string& category,
                       const std::string& message) {
  throw CliError{code, category, message};
}

/// Maps a C API status to an exit, pulling the library's error message.
void check(mgl_status status) {
  if (status == MGL_OK) return;
  const std::string message = mgl_last_error();
  switch (status) {
    case MGL_ERR_IO:
      fail(kExitIo, "io", message);
    case MGL_ERR_DOMAIN:
      fail(kExitValidation, "domain", message);
    case MGL_ERR_UNSUPPORTED:
      fail(kExitValidation, "unsupported", message);
    case MGL_ERR_RUNTIME:
      fail(kExitValidation, "runtime", message);
    default:
      fail(kExitValidation, "validation", message);
  }
}

std::string fmt17(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void echo_config(const std::string& command, const json& config) {
  json line;
  line["command"] = command;
  line["config"] = config;
  std::cout << line.dump() << "\n";
}

/// Writes a numeric table as csv, tsv or json, with the resolved
/// configuration in a leading comment (csv/tsv) or a "config" field (json).
void write_table(const std::string& path, const std::string& format,
                 const std::vector<std::string>& columns,
                 const std::vector<std::vector<double>>& rows, const json& config) {
  std::ofstream out(path);
  if (!out) fail(kExitIo, "io", "cannot write " + path);
  if (format == "json") {
    json j;
    j["config"] = config;
    j["columns"] = columns;
    j["rows"] = rows;
    out << j.dump() << "\n";
  } else {
    const char sep = format == "tsv" ? '\t' : ',';
    out << "# config: " << config.dump() << "\n";
    for (std::size_t c = 0; c < columns.size(); ++c)
      out << columns[c] << (c + 1 < columns.size() ? sep : '\n');
    for (const auto& row : rows) {
      for (std::size_t c = 0; c < row.size(); ++c)
        out << fmt17(row[c]) << (c + 1 < row.size() ? sep : '\n');
    }
  }
  if (!out) fail(kExitIo, "io", "failed writing " + path);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(kExitIo, "io", "cannot open " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

json load_json_file(const std::string& path) {
  const std::string text = read_file(path);
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded()) fail(kExitValidation, "validation", "bad JSON in " + path);
  return j;
}

/// RAII wrappers for the opaque handles used below.
struct DatasetHandle {
  mgl_dataset* ptr = nullptr;
  ~DatasetHandle() { mgl_dataset_free(ptr); }
};
struct LossHandle {
  mgl_loss* ptr = nullptr;
  ~LossHandle() { mgl_loss_free(ptr); }
};
struct FitHandle {
  mgl_fit_result* ptr = nullptr;
  ~FitHandle() { mgl_fit_result_free(ptr); }
};
struct BoostHandle {
  mgl_boost_model* ptr = nullptr;
  ~BoostHandle() { mgl_boost_model_free(ptr); }
};

struct GlobalFlags {
  unsigned long long seed = 0;
  int threads = 1;
  std::string format = "csv";
};

void run_losses_tabulate(const std::string& loss_name, const std::string& range,
                         std::size_t points, const std::string& out_path,
                         const GlobalFlags& globals) {
  const auto colon = range.find(':');
  if (colon == std::string::npos)
    fail(kExitValidation, "validation", "range must look like a:b");
  double lo = 0.0;
  double hi = 0.0;
  try {
    lo = std::stod(range.substr(0, colon));
    hi = std::stod(range.substr(colon + 1));
  } catch (const std::exception&) {
    fail(kExitValidation, "validation", "range must look like a:b");
  }

  LossHandle loss;
  check(mgl_loss_create_named(loss_name.c_str(), &loss.ptr));
  std::vector<double> v(points), phi(points), dphi(points);
  check(mgl_loss_tabulate(loss.ptr, lo, hi, points, v.data(), phi.data(),
                          dphi.data()));

  json config = {{"loss", loss_name}, {"range", range}, {"points", points},
                 {"out", out_path},   {"format", globals.format}};
  echo_config("losses tabulate", config);
  std::vector<std::vector<double>> rows(points);
  for (std::size_t i = 0; i < points; ++i) rows[i] = {v[i], phi[i], dphi[i]};
  write_table(out_path, globals.format, {"v", "phi", "dphi"}, rows, config);
}

void run_losses_check(const std::string& loss_name, const GlobalFlags& globals) {
  LossHandle loss;
  check(mgl_loss_create_named(loss_name.c_str(), &loss.ptr));
  int conformable = 0;
  int convex = 0;
  double max_rel_err = 0.0;
  double max_violation = 0.0;
  check(mgl_loss_check(loss.ptr, &conformable, &convex, &max_rel_err, &max_violation));

  json config = {{"loss", loss_name}, {"format", globals.format}};
  echo_config("losses check", config);
  json conf_line = {{"loss", loss_name},
                    {"check", "conformability"},
                    {"pass", conformable == 1},
                    {"max_rel_err", max_rel_err}};
  json convex_line = {{"loss", loss_name},
                      {"check", "convexity"},
                      {"convex", convex == 1},
                      {"max_violation", max_violation}};
  json summary = {{"loss", loss_name},
                  {"conformable", conformable == 1},
                  {"convex", convex == 1}};
  std::cout << conf_line.dump() << "\n"
            << convex_line.dump() << "\n"
            << summary.dump() << "\n";
}

json fit_result_json(const FitHandle& result) {
  const std::size_t dim = mgl_fit_result_dim(result.ptr);
  std::vector<double> beta(dim);
  check(mgl_fit_result_beta(result.ptr, beta.data(), dim));
  json j;
  j["beta"] = beta;
  j["status"] = mgl_fit_result_status(result.ptr);
  j["iterations"] = mgl_fit_result_iterations(result.ptr);
  j["final_risk"] = mgl_fit_result_final_risk(result.ptr);
  j["gradient_norm"] = mgl_fit_result_gradient_norm(result.ptr);
  j["r_emp"] = mgl_fit_result_exp_risk(result.ptr);
  return j;
}

void write_json_file(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) fail(kExitIo, "io", "cannot write " + path);
  out << j.dump(2) << "\n";
  if (!out) fail(kExitIo, "io", "failed writing " + path);
}

struct FitFlags {
  std::string loss;
  std::string data_path;
  std::string model = "linear";
  bool intercept = false;
  double tolerance = 1e-8;
  std::size_t max_iterations = 20000;
  std::size_t restarts = 1;
  double p = 2.0;  // pnorm-fit only
  std::string out_path;
};

void run_fit(const FitFlags& flags, const GlobalFlags& globals, bool pnorm) {
  if (flags.model != "linear")
    fail(kExitValidation, "validation", "only --model linear is supported");
  DatasetHandle data;
  check(mgl_dataset_read_csv(flags.data_path.c_str(), &data.ptr));

  mgl_fit_options options;
  mgl_fit_options_init(&options);
  options.tolerance = flags.tolerance;
  options.max_iterations = flags.max_iterations;
  options.restarts = flags.restarts;
  options.seed = globals.seed;
  options.intercept = flags.intercept ? 1 : 0;
  options.threads = globals.threads;

  json config = {{"data", flags.data_path},
                 {"model", flags.model},
                 {"intercept", flags.intercept},
                 {"tol", flags.tolerance},
                 {"max_iter", flags.max_iterations},
                 {"restarts", flags.restarts},
                 {"seed", globals.seed},
                 {"threads", globals.threads},
                 {"out", flags.out_path}};

  FitHandle result;
  if (pnorm) {
    config["p"] = flags.p;
    echo_config("pnorm-fit", config);
    check(mgl_pnorm_fit(data.ptr, flags.p, &options, &result.ptr));
  } else {
    config["loss"] = flags.loss;
    echo_config("fit", config);
    LossHandle loss;
    check(mgl_loss_create_named(flags.loss.c_str(), &loss.ptr));
    check(mgl_fit(loss.ptr, data.ptr, &options, &result.ptr));
  }

  json model = fit_result_json(result);
  model["config"] = config;
  if (pnorm) {
    model["loss"] = "pnorm";
    model["p"] = flags.p;
  } else {
    model["loss"] = flags.loss;
  }
  model["model"] = {{"kind", "linear"},
                    {"intercept", flags.intercept},
                    {"p", mgl_dataset_cols(data.ptr)}};
  write_json_file(flags.out_path, model);
}

void run_boost(const std::string& data_path, std::size_t stages, double r_emp_stop,
               const std::string& out_path, const std::string& diag_path,
               const GlobalFlags& globals) {
  DatasetHandle data;
  check(mgl_dataset_read_csv(data_path.c_str(), &data.ptr));

  mgl_boost_options options;
  mgl_boost_options_init(&options);
  options.stages = stages;
  options.r_emp_stop = r_emp_stop;
  options.seed = globals.seed;

  json config = {{"data", data_path},   {"stages", stages},
                 {"r_emp_stop", r_emp_stop}, {"seed", globals.seed},
                 {"out", out_path},     {"diag", diag_path}};
  echo_config("boost", config);

  BoostHandle model;
  check(mgl_boost_train(data.ptr, &options, &model.ptr));
  const std::size_t trained = mgl_boost_stages(model.ptr);

  json stages_json = json::array();
  for (std::size_t m = 0; m < trained; ++m) {
    double theta = 0.0;
    std::size_t feature = 0;
    double threshold = 0.0;
    int polarity = 0;
    check(mgl_boost_stage(model.ptr, m, &theta, &feature, &threshold, &polarity));
    stages_json.push_back({{"theta", theta},
                           {"feature", feature},
                           {"threshold", threshold},
                           {"polarity", polarity}});
  }
  std::vector<double> staged(trained + 1);
  check(mgl_boost_staged_r_emp(model.ptr, staged.data(), trained + 1));

  json out;
  out["config"] = config;
  out["stages"] = stages_json;
  out["staged_r_emp"] = staged;
  out["status"] = mgl_boost_status(model.ptr);
  write_json_file(out_path, out);

  if (!diag_path.empty()) {
    std::vector<double> diag((trained + 1) * 4);
    check(mgl_boost_diagnostics(model.ptr, data.ptr, diag.data(), trained + 1));
    std::vector<std::vector<double>> rows(trained + 1);
    for (std::size_t m = 0; m <= trained; ++m)
      rows[m] = {diag[m * 4], diag[m * 4 + 1], diag[m * 4 + 2], diag[m * 4 + 3]};
    write_table(diag_path, globals.format,
                {"stage", "train_risk", "r_emp", "misclassification"}, rows, config);
  }
}

void run_simulate(const std::string& config_path, const std::string& out_path,
                  const GlobalFlags& globals) {
  const json cfg = load_json_file(config_path);
  json config = {{"config", config_path}, {"out", out_path}};
  config["generator"] = cfg;
  echo_config("simulate", config);

  DatasetHandle data;
  check(mgl_dataset_generate(cfg.dump().c_str(), &data.ptr));
  check(mgl_dataset_write_csv(data.ptr, out_path.c_str(),
                              ("config: " + cfg.dump()).c_str()));
  (void)globals;
}

void run_diagnose(const std::string& model_path, const std::string& data_path,
                  const std::string& out_path, const GlobalFlags& globals) {
  const json model = load_json_file(model_path);
  if (!model.contains("beta") || !model.contains("model"))
    fail(kExitValidation, "validation", "model JSON lacks beta/model fields");
  const std::vector<double> beta = model["beta"].get<std::vector<double>>();
  const bool intercept = model["model"].value("intercept", false);

  DatasetHandle data;
  check(mgl_dataset_read_csv(data_path.c_str(), &data.ptr));
  const std::size_t n = mgl_dataset_rows(data.ptr);
  const std::size_t p = mgl_dataset_cols(data.ptr);
  if (beta.size() != p + (intercept ? 1 : 0))
    fail(kExitValidation, "validation", "model dimension does not match data");

  json config = {{"model", model_path}, {"data", data_path}, {"out", out_path}};
  echo_config("diagnose residuals", config);

  std::vector<std::string> columns = {"y_star", "f", "margin", "s", "s_squared"};
  for (std::size_t j = 0; j < beta.size(); ++j)
    columns.push_back("log_s2_b" + std::to_string(j));

  std::vector<std::vector<double>> rows;
  rows.reserve(n);
  std::vector<double> x(p);
  for (std::size_t i = 0; i < n; ++i) {
    int y = 0;
    check(mgl_dataset_row(data.ptr, i, x.data(), &y));
    double f = 0.0;
    check(mgl_linear_predict(beta.data(), beta.size(), intercept ? 1 : 0, x.data(), p,
                             &f));
    double s = 0.0;
    check(mgl_slrr(y, f, &s));
    std::vector<double> row = {static_cast<double>(y), f,
                               static_cast<double>(y) * f, s, s * s};
    // per-component log S^2: -y * beta_j * d_j
    for (std::size_t j = 0; j < beta.size(); ++j) {
      const double d = intercept ? (j == 0 ? 1.0 : x[j - 1]) : x[j];
      row.push_back(-static_cast<double>(y) * beta[j] * d);
    }
    rows.push_back(std::move(row));
  }
  write_table(out_path, globals.format, columns, rows, config);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "margin-based loss functions: construction, checking, fitting, "
      "boosting, simulation and residual diagnostics\n\n"
      "Data CSV schema: header row; the column named 'y' holds labels in\n"
      "{-1,1} or {0,1} (0 maps to -1); every other column is a numeric\n"
      "feature; lines starting with '#' are ignored. Model JSON schema:\n"
      "{loss, model:{kind,intercept,p}, beta:[...], status, iterations,\n"
      "final_risk, gradient_norm, r_emp, config:{...}}. All numeric table\n"
      "output uses 17 significant digits so values re-parse losslessly."};
  app.require_subcommand(1);
  app.fallthrough();

  GlobalFlags globals;
  app.add_option("--seed", globals.seed, "random seed for seeded commands");
  app.add_option("--threads", globals.threads, "data-parallel reduction width")
      ->check(CLI::PositiveNumber);
  auto* format_option =
      app.add_option("--format", globals.format, "table output format")
          ->check(CLI::IsMember({"csv", "tsv", "json"}));

  // losses tabulate / losses check
  auto* losses = app.add_subcommand("losses", "loss construction and verification");
  losses->require_subcommand(1);
  losses->fallthrough();

  std::string loss_name;
  std::string range = "-5:5";
  std::size_t points = 201;
  std::string out_path;
  auto* tabulate_cmd = losses->add_subcommand("tabulate", "emit loss curve data");
  tabulate_cmd->fallthrough();
  tabulate_cmd->add_option("--loss", loss_name, "loss name")->required();
  tabulate_cmd->add_option("--range", range, "margin range a:b");
  tabulate_cmd->add_option("--points", points, "grid size")->check(CLI::PositiveNumber);
  tabulate_cmd->add_option("--out", out_path, "output table path")->required();

  std::string check_loss;
  auto* check_cmd =
      losses->add_subcommand("check", "conformability and convexity report");
  check_cmd->fallthrough();
  check_cmd->add_option("--loss", check_loss, "loss name")->required();

  // fit / pnorm-fit
  FitFlags fit_flags;
  auto* fit_cmd = app.add_subcommand("fit", "empirical risk minimization");
  fit_cmd->fallthrough();
  fit_cmd->add_option("--loss", fit_flags.loss, "loss name")->required();
  fit_cmd->add_option("--data", fit_flags.data_path, "training CSV")->required();
  fit_cmd->add_option("--model", fit_flags.model, "model kind (linear)");
  fit_cmd->add_flag("--intercept", fit_flags.intercept, "prepend an intercept");
  fit_cmd->add_option("--tol", fit_flags.tolerance, "gradient tolerance");
  fit_cmd->add_option("--max-iter", fit_flags.max_iterations, "iteration cap");
  fit_cmd->add_option("--restarts", fit_flags.restarts, "number of starts");
  fit_cmd->add_option("--out", fit_flags.out_path, "model JSON path")->required();

  FitFlags pnorm_flags;
  auto* pnorm_cmd =
      app.add_subcommand("pnorm-fit", "residual p-norm minimization");
  pnorm_cmd->fallthrough();
  pnorm_cmd->add_option("--p", pnorm_flags.p, "norm exponent")->required();
  pnorm_cmd->add_option("--data", pnorm_flags.data_path, "training CSV")->required();
  pnorm_cmd->add_option("--model", pnorm_flags.model, "model kind (linear)");
  pnorm_cmd->add_flag("--intercept", pnorm_flags.intercept, "prepend an intercept");
  pnorm_cmd->add_option("--tol", pnorm_flags.tolerance, "gradient tolerance");
  pnorm_cmd->add_option("--max-iter", pnorm_flags.max_iterations, "iteration cap");
  pnorm_cmd->add_option("--restarts", pnorm_flags.restarts, "number of starts");
  pnorm_cmd->add_option("--out", pnorm_flags.out_path, "model JSON path")->required();

  // boost
  std::string boost_data;
  std::size_t boost_stages = 50;
  double r_emp_stop = -1.0;
  std::string boost_out;
  std::string boost_diag;
  auto* boost_cmd = app.add_subcommand("boost", "AdaBoost with decision stumps");
  boost_cmd->fallthrough();
  boost_cmd->add_option("--data", boost_data, "training CSV")->required();
  boost_cmd->add_option("--stages", boost_stages, "number of stages")
      ->check(CLI::PositiveNumber);
  boost_cmd->add_option("--r-emp-stop", r_emp_stop,
                        "stop when R_Emp falls to this value (< 0 disables)");
  boost_cmd->add_option("--out", boost_out, "model JSON path")->required();
  boost_cmd->add_option("--diag", boost_diag, "staged diagnostics table path");

  // simulate
  std::string sim_config;
  std::string sim_out;
  auto* sim_cmd = app.add_subcommand("simulate", "seeded synthetic data");
  sim_cmd->fallthrough();
  sim_cmd->add_option("--config", sim_config, "generator config JSON")->required();
  sim_cmd->add_option("--out", sim_out, "output CSV path")->required();

  // diagnose residuals
  auto* diagnose = app.add_subcommand("diagnose", "model diagnostics");
  diagnose->require_subcommand(1);
  diagnose->fallthrough();
  std::string diag_model;
  std::string diag_data;
  std::string diag_out;
  auto* resid_cmd =
      diagnose->add_subcommand("residuals", "standardized residual table");
  resid_cmd->fallthrough();
  resid_cmd->add_option("--model", diag_model, "model JSON from fit")->required();
  resid_cmd->add_option("--data", diag_data, "data CSV")->required();
  resid_cmd->add_option("--out", diag_out, "output table path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    std::cerr << json{{"error", "usage"}, {"message", e.what()}}.dump() << "\n";
    return kExitValidation;
  }

  try {
    // tabulate emits TSV unless a format was chosen explicitly
    GlobalFlags tabulate_globals = globals;
    if (format_option->count() == 0) tabulate_globals.format = "tsv";
    if (tabulate_cmd->parsed())
      run_losses_tabulate(loss_name, range, points, out_path, tabulate_globals);
    else if (check_cmd->parsed())
      run_losses_check(check_loss, globals);
    else if (fit_cmd->parsed())
      run_fit(fit_flags, globals, /*pnorm=*/false);
    else if (pnorm_cmd->parsed())
      run_fit(pnorm_flags, globals, /*pnorm=*/true);
    else if (boost_cmd->parsed())
      run_boost(boost_data, boost_stages, r_emp_stop, boost_out, boost_diag, globals);
    else if (sim_cmd->parsed())
      run_simulate(sim_config, sim_out, globals);
    else if (resid_cmd->parsed())
      run_diagnose(diag_model, diag_data, diag_out, globals);
  } catch (const CliError& e) {
    std::cerr << json{{"error", e.category}, {"message", e.message}}.dump() << "\n";
    return e.code;
  } catch (const std::exception& e) {
    std::cerr << json{{"error", "internal"}, {"message", e.what()}}.dump() << "\n";
    return kExitValidation;
  }
  return 0;
}
