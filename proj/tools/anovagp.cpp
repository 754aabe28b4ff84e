#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "anovagp/benchmarks.hpp"
#include "anovagp/checks.hpp"
#include "anovagp/config.hpp"
#include "anovagp/errors.hpp"
#include "anovagp/io.hpp"

namespace fs = std::filesystem;
using namespace anovagp;

namespace {

struct Common {
  std::string config;
  std::optional<std::uint64_t> seed;
  int threads = 1;
  std::string output_dir;
};

void add_common(CLI::App* cmd, Common& c, bool config_required) {
  auto* opt = cmd->add_option("--config", c.config, "JSON run configuration");
  if (config_required) {
    opt->required()->check(CLI::ExistingFile);
  }
  cmd->add_option("--seed", c.seed, "Master seed (overrides the configuration)");
  cmd->add_option("--threads", c.threads, "Worker threads")->check(CLI::PositiveNumber);
  cmd->add_option("--output-dir", c.output_dir, "Directory for emitted files");
}

RunConfig load_config(const Common& c) {
  RunConfig config = load_run_config(c.config);
  if (c.seed) {
    config.seed = *c.seed;
  }
  if (!c.output_dir.empty()) {
    config.output_dir = c.output_dir;
  }
  config.mle.threads = c.threads;
  config.estimation.options.threads = c.threads;
  fs::create_directories(config.output_dir);
  return config;
}

fs::path output_dir_of(const Common& c) {
  fs::path dir = c.output_dir.empty() ? fs::path(".") : fs::path(c.output_dir);
  fs::create_directories(dir);
  return dir;
}

std::vector<std::string> column_names(int dim) {
  std::vector<std::string> out;
  for (int d = 1; d <= dim; ++d) {
    out.push_back("x" + std::to_string(d));
  }
  return out;
}

int print_checks(const std::vector<Check>& checks) {
  for (const auto& c : checks) {
    std::cout << (c.passed ? "PASS " : "FAIL ") << c.name << ": " << c.detail << "\n";
  }
  return all_passed(checks) ? 0 : 4;
}

int cmd_design(const Common& common) {
  const RunConfig config = load_config(common);
  Rng rng(derive_seed(config.seed, 100));
  MaximinOptions options;
  options.restarts = config.design.restarts;
  const std::vector<Bounds> unit(static_cast<std::size_t>(config.dim()), Bounds{0.0, 1.0});
  const DesignSet design = design_from_unit(maximin_lhs(config.design.n, unit, options, rng).points, config.marginals);
  const fs::path path = config.output_dir / "design.csv";
  write_csv(path, column_names(config.dim()), design.points);
  std::clog << "design: " << design.size() << " points written to " << path.string() << "\n";
  return 0;
}

int cmd_fit(const Common& common, std::string design_path, const std::string& outputs_path,
            std::string model_path) {
  const RunConfig config = load_config(common);
  if (design_path.empty()) {
    if (!config.design.csv) {
      throw ConfigError("fit needs --design or design.csv in the configuration");
    }
    design_path = config.design.csv->string();
  }
  const CsvTable x = read_csv(design_path);
  const CsvTable y = read_csv(outputs_path);
  if (x.data.cols() != config.dim()) {
    throw DataError("design has " + std::to_string(x.data.cols()) + " columns, configuration has " +
                    std::to_string(config.dim()) + " inputs");
  }
  if (y.data.cols() != 1) {
    throw DataError("outputs file must have exactly one column");
  }
  if (x.data.rows() != y.data.rows()) {
    throw DataError("design has " + std::to_string(x.data.rows()) + " rows, outputs have " +
                    std::to_string(y.data.rows()));
  }
  DesignSet design{x.data, config.bounds};
  validate_design(design);
  Rng rng(derive_seed(config.seed, 100));
  std::clog << "fit: " << design.size() << " points, " << config.mle.starts << " starts\n";
  const FitResult fit = fit_mle(design, y.data.col(0), config.kernels, config.mle, rng);
  const fs::path out = model_path.empty() ? config.output_dir / "model.json" : fs::path(model_path);
  save_model(out, fit.model, fit.objective);

  std::cout << "theta:";
  for (double t : fit.theta) {
    std::cout << " " << format_double(t);
  }
  std::cout << "\nsigma2: " << format_double(fit.model.sigma2()) << "\nf0: " << format_double(fit.model.f0())
            << "\nnugget: " << format_double(fit.model.nugget())
            << "\nobjective: " << format_double(fit.objective) << "\nmodel: " << out.string() << "\n";
  return 0;
}

int cmd_analyze(const Common& common, const std::string& model_path) {
  const RunConfig config = load_config(common);
  const auto subsets = resolve_subsets(config.estimation, config.dim());
  const FittedGP model = load_model(model_path);
  if (model.dim() != config.dim()) {
    throw ConfigError("model has " + std::to_string(model.dim()) + " inputs, configuration has " +
                      std::to_string(config.dim()));
  }
  const JointDistribution joint = config.joint();
  const auto& opt = config.estimation.options;

  std::vector<IndexDistribution> dists;
  if (config.estimation.consistent) {
    std::clog << "analyze: joint draws of all components\n";
    for (auto& d : estimate_all_indices_consistent(model, joint, opt, config.seed)) {
      if (std::find(subsets.begin(), subsets.end(), d.u) != subsets.end()) {
        dists.push_back(std::move(d));
      }
    }
  } else {
    for (std::size_t k = 0; k < subsets.size(); ++k) {
      std::clog << "analyze: index " << subsets[k].label() << "\n";
      dists.push_back(estimate_index(model, subsets[k], joint, opt, derive_seed(config.seed, k)));
    }
  }

  nlohmann::json results{{"seed", config.seed},
                         {"m", opt.m},
                         {"N_s", opt.realizations},
                         {"K", opt.perturbations},
                         {"consistent", config.estimation.consistent},
                         {"indices", nlohmann::json::object()}};
  std::vector<std::vector<std::string>> rows;
  for (const auto& d : dists) {
    results["indices"][d.u.label()] = to_json(d);
    const auto s = summarize(d);
    rows.push_back({d.u.label(), format_double(s.mode), format_double(s.mean), format_double(s.q025),
                    format_double(s.q975), format_double(s.variance_part), format_double(s.covariance_part)});
  }
  write_json(config.output_dir / "results.json", results);
  write_text_csv(config.output_dir / "results.csv",
                 {"index", "mode", "mean", "q025", "q975", "variance_part", "covariance_part"}, rows);
  for (const auto& r : rows) {
    std::cout << r[0] << " mode " << r[1] << " [" << r[3] << ", " << r[4] << "]\n";
  }
  return 0;
}

int cmd_validate(const Common& common, const std::string& model_path, const std::string& inputs_path,
                 const std::string& outputs_path) {
  const FittedGP model = load_model(model_path);
  const CsvTable x = read_csv(inputs_path);
  const CsvTable y = read_csv(outputs_path);
  if (x.data.cols() != model.dim()) {
    throw DataError("test inputs have " + std::to_string(x.data.cols()) + " columns, model has " +
                    std::to_string(model.dim()) + " inputs");
  }
  if (y.data.cols() != 1 || x.data.rows() != y.data.rows()) {
    throw DataError("test outputs must be one column with as many rows as the inputs");
  }
  const double q2 = q2_score(model, x.data, y.data.col(0));
  const nlohmann::json report{{"q2", q2}, {"test_points", x.data.rows()}};
  write_json(output_dir_of(common) / "validation.json", report);
  std::cout << "Q2: " << format_double(q2) << "\n";
  return 0;
}

struct BenchArgs {
  std::string name;
  bool check = false;
  std::optional<int> reps;
  std::optional<Eigen::Index> n;
  std::optional<Eigen::Index> m;
  std::optional<int> ns;
  std::optional<int> k;
  std::optional<int> mle_starts;
};

int cmd_bench(const Common& common, const BenchArgs& args) {
  const std::vector<std::string> known{"table1", "table3", "copula", "flood", "coverage"};
  if (std::find(known.begin(), known.end(), args.name) == known.end()) {
    throw ConfigError("unknown benchmark \"" + args.name + "\"");
  }
  ExperimentOptions opt;
  opt.seed = common.seed.value_or(1);
  opt.threads = common.threads;
  opt.estimation.threads = common.threads;
  if (args.name == "copula" || args.name == "coverage") {
    opt.consistent = true;
  }
  if (args.name == "copula") {
    opt.n = 200;
  }
  if (args.name == "flood") {
    opt.n = 200;
    opt.estimation.m = 5000;
    opt.estimation.realizations = 100;
  }
  if (args.n) opt.n = *args.n;
  if (args.m) opt.estimation.m = *args.m;
  if (args.ns) opt.estimation.realizations = *args.ns;
  if (args.k) opt.estimation.perturbations = *args.k;
  if (args.mle_starts) opt.mle_starts = *args.mle_starts;
  const fs::path dir = output_dir_of(common);
  std::clog << "bench " << args.name << ": seed " << opt.seed << ", n " << opt.n << ", m " << opt.estimation.m
            << ", N_s " << opt.estimation.realizations << ", K " << opt.estimation.perturbations << "\n";

  auto finish = [&](const auto& report) {
    write_report(report, dir);
    const auto checks = check_report(report);
    const int status = print_checks(checks);
    return args.check ? status : 0;
  };
  if (args.name == "table1") {
    return finish(run_table1(opt));
  }
  if (args.name == "table3") {
    return finish(run_table3(opt));
  }
  if (args.name == "copula") {
    return finish(run_copula_study(opt));
  }
  if (args.name == "flood") {
    return finish(run_flood(opt, args.reps.value_or(1)));
  }
  return finish(run_coverage(opt, args.reps.value_or(50)));
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gaussian-process ANOVA sensitivity analysis with dependent inputs"};
  app.require_subcommand(1);

  Common design_c;
  auto* design_cmd = app.add_subcommand("design", "Write a maximin Latin hypercube design for a configuration");
  add_common(design_cmd, design_c, true);

  Common fit_c;
  std::string fit_design;
  std::string fit_outputs;
  std::string fit_model;
  auto* fit = app.add_subcommand("fit", "Fit the surrogate by maximum likelihood");
  add_common(fit, fit_c, true);
  fit->add_option("--design", fit_design, "Design CSV (n rows, p columns, header)");
  fit->add_option("--outputs", fit_outputs, "Outputs CSV (n rows, 1 column, header)")->required();
  fit->add_option("--model", fit_model, "Model file to write (default output_dir/model.json)");

  Common analyze_c;
  std::string analyze_model;
  auto* analyze = app.add_subcommand("analyze", "Estimate sensitivity index distributions");
  add_common(analyze, analyze_c, true);
  analyze->add_option("--model", analyze_model, "Model file")->required();

  Common validate_c;
  std::string validate_model;
  std::string validate_inputs;
  std::string validate_outputs;
  auto* validate = app.add_subcommand("validate", "Q2 of a model on a test set");
  add_common(validate, validate_c, false);
  validate->add_option("--model", validate_model, "Model file")->required();
  validate->add_option("--inputs", validate_inputs, "Test inputs CSV")->required();
  validate->add_option("--outputs", validate_outputs, "Test outputs CSV")->required();

  Common bench_c;
  BenchArgs bench_args;
  auto* bench = app.add_subcommand("bench", "Run a reference experiment");
  add_common(bench, bench_c, false);
  bench->add_option("name", bench_args.name, "table1, table3, copula, flood or coverage")->required();
  bench->add_flag("--check", bench_args.check, "Exit nonzero when a threshold fails");
  bench->add_option("--reps", bench_args.reps, "Repetitions (flood, coverage)")->check(CLI::PositiveNumber);
  bench->add_option("--n", bench_args.n, "Design size");
  bench->add_option("--m", bench_args.m, "Monte-Carlo sample size");
  bench->add_option("--ns", bench_args.ns, "Realizations N_s");
  bench->add_option("--k", bench_args.k, "Perturbations K");
  bench->add_option("--mle-starts", bench_args.mle_starts, "Multistart count");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*design_cmd) {
      return cmd_design(design_c);
    }
    if (*fit) {
      return cmd_fit(fit_c, fit_design, fit_outputs, fit_model);
    }
    if (*analyze) {
      return cmd_analyze(analyze_c, analyze_model);
    }
    if (*validate) {
      return cmd_validate(validate_c, validate_model, validate_inputs, validate_outputs);
    }
    if (*bench) {
      return cmd_bench(bench_c, bench_args);
    }
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 1;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 2;
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
