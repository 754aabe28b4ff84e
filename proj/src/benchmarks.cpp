#include "anovagp/benchmarks.hpp"

#include <cmath>
#include <numbers>

#include "anovagp/errors.hpp"
#include "anovagp/io.hpp"
#include "anovagp/parallel.hpp"

namespace anovagp {

namespace {

constexpr double kPi = std::numbers::pi;

std::vector<Marginal> ishigami_marginals() {
  return std::vector<Marginal>(3, Marginal(Uniform{-kPi, kPi}));
}

std::vector<Subset> up_to_pairs(int dim) {
  std::vector<Subset> out;
  for (const auto& u : all_subsets(dim)) {
    if (u.size() <= 2) {
      out.push_back(u);
    }
  }
  return out;
}

std::string index_label(const Subset& u) {
  std::string label = "S";
  for (int i : u.indices()) {
    label += std::to_string(i + 1);
  }
  return label;
}

FitSummary summarize_fit(const FitResult& fit) {
  return {fit.theta, fit.model.sigma2(), fit.model.f0(), fit.model.nugget(), fit.objective};
}

// Maximin design on `bounds`, observations and maximum-likelihood fit; the
// design and the likelihood starts share one stream.
FitResult fit_surrogate(const TestFunction& fn, const std::vector<KernelSpec>& specs,
                        const std::vector<Bounds>& bounds, const ExperimentOptions& options,
                        std::uint64_t seed, const std::vector<Marginal>* transform = nullptr) {
  Rng rng(seed);
  MaximinOptions maximin;
  maximin.restarts = options.design_restarts;
  DesignSet design = maximin_lhs(options.n, bounds, maximin, rng);
  if (transform != nullptr) {
    design = design_from_unit(design.points, *transform);
  }
  const Eigen::VectorXd y = fn(design.points);
  MleOptions mle;
  mle.starts = options.mle_starts;
  mle.threads = options.threads;
  return fit_mle(design, y, specs, mle, rng);
}

EstimationOptions estimation_of(const ExperimentOptions& options) {
  EstimationOptions est = options.estimation;
  est.threads = options.threads;
  return est;
}

// Distributions for `subsets` on one fixed sample T.
std::vector<IndexDistribution> estimate_subsets(const FittedGP& model, const std::vector<Subset>& subsets,
                                                const Eigen::MatrixXd& T, const ExperimentOptions& options,
                                                std::uint64_t seed) {
  const auto est = estimation_of(options);
  std::vector<IndexDistribution> out;
  if (options.consistent) {
    for (auto& dist : estimate_all_indices_consistent(model, T, est, seed)) {
      if (std::find(subsets.begin(), subsets.end(), dist.u) != subsets.end()) {
        out.push_back(std::move(dist));
      }
    }
    return out;
  }
  for (const auto& u : subsets) {
    out.push_back(estimate_index(model, u, T, est, seed));
  }
  return out;
}

IndexRow make_row(const IndexDistribution& dist) {
  return {dist.u, summarize(dist), summarize_realizations(dist), 0.0, false};
}

const IndexRow& find_row(const std::vector<IndexRow>& rows, const Subset& u) {
  for (const auto& row : rows) {
    if (row.u == u) {
      return row;
    }
  }
  throw ConfigError("index " + u.label() + " missing from report");
}

nlohmann::json rows_json(const std::vector<IndexRow>& rows) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& row : rows) {
    nlohmann::json j{{"index", row.u.label()},
                     {"pooled", to_json(row.pooled)},
                     {"meta_model_only", to_json(row.realization)}};
    if (row.has_reference) {
      j["reference"] = row.reference;
    }
    out.push_back(std::move(j));
  }
  return out;
}

void ensure_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) {
    throw DataError("cannot create output directory " + dir.string() + ": " + ec.message());
  }
}

} // namespace

Eigen::VectorXd TestFunction::operator()(const Eigen::MatrixXd& points) const {
  if (points.cols() != dim) {
    throw DataError(name + " expects " + std::to_string(dim) + " inputs");
  }
  Eigen::VectorXd out(points.rows());
  std::vector<double> row(static_cast<std::size_t>(dim));
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    for (int d = 0; d < dim; ++d) {
      row[static_cast<std::size_t>(d)] = points(i, d);
    }
    out[i] = evaluate(row);
  }
  return out;
}

double ishigami(double x1, double x2, double x3) {
  const double s2 = std::sin(x2);
  return std::sin(x1) + 7.0 * s2 * s2 + 0.1 * std::pow(x3, 4) * std::sin(x1);
}

TestFunction ishigami_function() {
  return {"ishigami", 3, [](std::span<const double> x) { return ishigami(x[0], x[1], x[2]); },
          std::vector<Bounds>(3, {-kPi, kPi})};
}

TestFunction ishigami_tied_function() {
  return {"ishigami_tied", 2, [](std::span<const double> x) { return ishigami(x[0], x[0], x[1]); },
          std::vector<Bounds>(2, {-kPi, kPi})};
}

std::vector<ReferenceIndex> ishigami_analytical_indices() {
  constexpr double a = 7.0;
  constexpr double b = 0.1;
  const double pi4 = std::pow(kPi, 4);
  const double pi8 = pi4 * pi4;
  const double v1 = 0.5 * std::pow(1.0 + b * pi4 / 5.0, 2);
  const double v2 = a * a / 8.0;
  const double v13 = b * b * pi8 * (1.0 / 18.0 - 1.0 / 50.0);
  const double total = v1 + v2 + v13;
  return {{Subset{0}, v1 / total},   {Subset{1}, v2 / total},   {Subset{2}, 0.0},
          {Subset{0, 1}, 0.0},       {Subset{0, 2}, v13 / total}, {Subset{1, 2}, 0.0}};
}

double flood_overflow(double q, double ks, double zv, double zm, double hd, double cb, double l,
                      double b) {
  if (!(zm > zv)) {
    throw DataError("flood model needs Zm > Zv (nonpositive river slope)");
  }
  if (!(q > 0.0) || !(ks > 0.0) || !(l > 0.0) || !(b > 0.0)) {
    throw DataError("flood model needs positive Q, Ks, L and B");
  }
  const double h = std::pow(q / (b * ks * std::sqrt((zm - zv) / l)), 0.6);
  return zv + h - hd - cb;
}

std::vector<Marginal> flood_marginals() {
  constexpr double inf = std::numeric_limits<double>::infinity();
  return {Marginal(TruncatedGumbel{1013.0, 558.0, 500.0, 3000.0}),
          Marginal(TruncatedNormal{30.0, 8.0, 15.0, inf}),
          Marginal(Triangular{49.0, 50.0, 51.0}),
          Marginal(Triangular{54.0, 55.0, 56.0}),
          Marginal(Uniform{7.0, 9.0}),
          Marginal(Triangular{55.0, 55.5, 56.0}),
          Marginal(Triangular{4990.0, 5000.0, 5010.0}),
          Marginal(Triangular{295.0, 300.0, 305.0})};
}

TestFunction flood_function() {
  std::vector<Bounds> bounds;
  const auto design = design_from_unit(Eigen::MatrixXd(0, 8), flood_marginals());
  return {"flood", 8,
          [](std::span<const double> x) {
            return flood_overflow(x[0], x[1], x[2], x[3], x[4], x[5], x[6], x[7]);
          },
          design.bounds};
}

JointDistribution flood_inputs(std::uint64_t seed, Eigen::Index matching_samples) {
  const auto marginals = flood_marginals();
  Eigen::MatrixXd corr = Eigen::MatrixXd::Identity(8, 8);
  const std::array<std::tuple<int, int, double>, 3> pairs{
      {{0, 1, 0.5}, {2, 3, 0.3}, {6, 7, 0.3}}};
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    const auto [i, j, target] = pairs[k];
    const double r = match_pearson_gaussian(marginals[static_cast<std::size_t>(i)],
                                            marginals[static_cast<std::size_t>(j)], target,
                                            matching_samples, derive_seed(seed, k));
    corr(i, j) = corr(j, i) = r;
  }
  return JointDistribution(marginals, GaussianCopula{corr});
}

double pick_freeze_sobol(const TestFunction& fn, const JointDistribution& joint, const Subset& u,
                         Eigen::Index m, Rng& rng) {
  if (!joint.independent()) {
    throw ConfigError("pick-freeze Sobol estimation requires independent inputs");
  }
  if (joint.dim() != fn.dim) {
    throw ConfigError("input distribution dimension does not match the function");
  }
  require_valid(u, fn.dim);
  if (m < 2) {
    throw ConfigError("pick-freeze needs at least 2 samples");
  }
  const Eigen::MatrixXd a = joint.sample(m, rng);
  const Eigen::MatrixXd b = joint.sample(m, rng);
  Eigen::VectorXd fa = fn(a);
  const Eigen::VectorXd fb = fn(b);
  const double center = 0.5 * (fa.mean() + fb.mean());
  const double total =
      0.5 * ((fa.array() - center).square().mean() + (fb.array() - center).square().mean());
  if (!(total > 0.0)) {
    throw NumericalError("function has zero variance on the sample");
  }
  fa.array() -= center;
  double index = 0.0;
  // Inclusion-exclusion over the nonempty subsets v of u.
  const std::uint64_t mask = u.mask();
  for (std::uint64_t sub = mask; sub != 0; sub = (sub - 1) & mask) {
    const Subset v = Subset::from_mask(sub);
    Eigen::MatrixXd mixed = b;
    for (int i : v.indices()) {
      mixed.col(i) = a.col(i);
    }
    const double closed = (fa.array() * (fn(mixed) - fb).array()).mean() / total;
    index += ((u.size() - v.size()) % 2 == 0 ? 1.0 : -1.0) * closed;
  }
  return index;
}

DesignSet design_from_unit(const Eigen::MatrixXd& unit, const std::vector<Marginal>& marginals) {
  if (static_cast<std::size_t>(unit.cols()) != marginals.size()) {
    throw DataError("unit design dimension does not match the marginals");
  }
  DesignSet out{Eigen::MatrixXd(unit.rows(), unit.cols()), {}};
  for (std::size_t d = 0; d < marginals.size(); ++d) {
    const auto& marginal = marginals[d];
    auto [lo, hi] = marginal.support();
    if (!std::isfinite(lo)) {
      lo = marginal.inverse_cdf(1e-6);
    }
    if (!std::isfinite(hi)) {
      hi = marginal.inverse_cdf(1.0 - 1e-6);
    }
    out.bounds.emplace_back(lo, hi);
    for (Eigen::Index i = 0; i < unit.rows(); ++i) {
      out.points(i, static_cast<Eigen::Index>(d)) =
          marginal.inverse_cdf(unit(i, static_cast<Eigen::Index>(d)));
    }
  }
  return out;
}

std::vector<KernelSpec> kernel_specs_for(const std::vector<Marginal>& marginals, BaseKind kind, int nodes) {
  std::vector<KernelSpec> out;
  const bool closed_kind = kind == BaseKind::Exponential || kind == BaseKind::Gaussian;
  for (const auto& marginal : marginals) {
    KernelSpec spec{kind, Centering::quadrature(nodes), marginal, std::nullopt};
    if (closed_kind && marginal.is_uniform()) {
      spec.centering = Centering::closed_form();
    }
    out.push_back(std::move(spec));
  }
  return out;
}

std::pair<double, double> predictive_mean_interval(const FittedGP& model, const Subset& u,
                                                   const Eigen::MatrixXd& T) {
  const Eigen::VectorXd mu = model.predictive_mean(T);
  const Eigen::VectorXd mu_u = model.mean_component(u, T);
  const double center = durrande_index(model, u, T);
  const double half =
      1.959963984540054 * std::sqrt(delta_variance(mu_u, mu - mu_u) / static_cast<double>(T.rows()));
  return {center - half, center + half};
}

Table1Report run_table1(const ExperimentOptions& options, Eigen::Index test_points) {
  const auto fn = ishigami_function();
  const auto marginals = ishigami_marginals();
  const auto fit = fit_surrogate(fn, kernel_specs_for(marginals, BaseKind::Gaussian), fn.default_bounds,
                                 options, derive_seed(options.seed, 100));
  const JointDistribution joint(marginals, IndependentCopula{});
  Table1Report report;
  report.fit = summarize_fit(fit);
  {
    Rng rng(derive_seed(options.seed, 101));
    const Eigen::MatrixXd test = joint.sample(test_points, rng);
    report.q2 = q2_score(fit.model, test, fn(test));
  }
  Rng rng(derive_seed(options.seed, 102));
  const Eigen::MatrixXd T = joint.sample(options.estimation.m, rng);
  const auto dists = estimate_subsets(fit.model, up_to_pairs(3), T, options, derive_seed(options.seed, 103));
  const auto reference = ishigami_analytical_indices();
  for (const auto& dist : dists) {
    auto row = make_row(dist);
    for (const auto& ref : reference) {
      if (ref.u == row.u) {
        row.reference = ref.value;
        row.has_reference = true;
      }
    }
    report.rows.push_back(std::move(row));
  }
  return report;
}

Table3Report run_table3(const ExperimentOptions& options, Eigen::Index oracle_samples) {
  const auto fn = ishigami_function();
  const auto marginals = ishigami_marginals();
  const auto fit = fit_surrogate(fn, kernel_specs_for(marginals, BaseKind::Gaussian), fn.default_bounds,
                                 options, derive_seed(options.seed, 100));
  const JointDistribution joint(marginals, EqualityCopula{{{0, 1}}});
  Table3Report report;
  report.fit = summarize_fit(fit);
  Rng rng(derive_seed(options.seed, 102));
  const Eigen::MatrixXd T = joint.sample(options.estimation.m, rng);
  for (const auto& dist :
       estimate_subsets(fit.model, up_to_pairs(3), T, options, derive_seed(options.seed, 103))) {
    report.rows.push_back(make_row(dist));
  }
  auto mode = [&](const Subset& u) { return find_row(report.rows, u).pooled.mode; };
  report.group_first = mode(Subset{0}) + mode(Subset{1}) + mode(Subset{0, 1});
  report.group_third = mode(Subset{2});
  report.group_interaction = mode(Subset{0, 2}) + mode(Subset{1, 2});

  const auto tied = ishigami_tied_function();
  const JointDistribution pair(std::vector<Marginal>(2, Marginal(Uniform{-kPi, kPi})), IndependentCopula{});
  Rng oracle(derive_seed(options.seed, 104));
  report.sobol_first = pick_freeze_sobol(tied, pair, Subset{0}, oracle_samples, oracle);
  report.sobol_third = pick_freeze_sobol(tied, pair, Subset{1}, oracle_samples, oracle);
  report.sobol_interaction = pick_freeze_sobol(tied, pair, Subset{0, 1}, oracle_samples, oracle);
  return report;
}

CopulaReport run_copula_study(const ExperimentOptions& options, double rho_s) {
  if (!(rho_s > 0.0 && rho_s < 1.0)) {
    throw ConfigError("copula study needs 0 < rho_s < 1");
  }
  const auto fn = ishigami_function();
  const auto marginals = ishigami_marginals();
  const auto fit = fit_surrogate(fn, kernel_specs_for(marginals, BaseKind::Gaussian), fn.default_bounds,
                                 options, derive_seed(options.seed, 100));
  CopulaReport report;
  report.fit = summarize_fit(fit);
  report.rho_s = rho_s;
  report.gaussian_parameter = spearman_to_gaussian_param(rho_s);
  report.clayton_parameter = spearman_to_clayton_param(rho_s);
  Eigen::MatrixXd corr = Eigen::MatrixXd::Constant(3, 3, report.gaussian_parameter);
  corr.diagonal().setOnes();
  const JointDistribution gaussian(marginals, GaussianCopula{corr});
  const JointDistribution clayton(marginals, ClaytonCopula{{ClaytonGroup{{0, 1, 2}, report.clayton_parameter}}});
  const auto subsets = all_subsets(3);
  {
    Rng rng(derive_seed(options.seed, 102));
    const Eigen::MatrixXd T = gaussian.sample(options.estimation.m, rng);
    report.gaussian = estimate_subsets(fit.model, subsets, T, options, derive_seed(options.seed, 103));
  }
  {
    Rng rng(derive_seed(options.seed, 105));
    const Eigen::MatrixXd T = clayton.sample(options.estimation.m, rng);
    report.clayton = estimate_subsets(fit.model, subsets, T, options, derive_seed(options.seed, 106));
  }
  for (const auto& dist : report.gaussian) {
    report.gaussian_rows.push_back(make_row(dist));
  }
  for (const auto& dist : report.clayton) {
    report.clayton_rows.push_back(make_row(dist));
  }
  return report;
}

FloodReport run_flood(const ExperimentOptions& options, int repetitions) {
  if (repetitions < 1) {
    throw ConfigError("flood study needs at least one repetition");
  }
  if (options.consistent) {
    throw ConfigError("the flood model has 8 inputs; consistent estimation is limited to p <= 4");
  }
  const auto fn = flood_function();
  const auto marginals = flood_marginals();
  const auto specs = kernel_specs_for(marginals, BaseKind::Gaussian);
  const JointDistribution joint = flood_inputs(derive_seed(options.seed, 199));
  FloodReport report;
  report.names = {"Q", "Ks", "Zv", "Zm", "Hd", "Cb", "L", "B"};
  const std::vector<Bounds> unit(8, {0.0, 1.0});
  for (int r = 0; r < repetitions; ++r) {
    FloodRepetition rep;
    rep.seed = derive_seed(options.seed, 200 + static_cast<std::uint64_t>(r));
    const auto fit = fit_surrogate(fn, specs, unit, options, derive_seed(rep.seed, 100), &marginals);
    rep.fit = summarize_fit(fit);
    Rng rng(derive_seed(rep.seed, 102));
    const Eigen::MatrixXd T = joint.sample(options.estimation.m, rng);
    rep.q2 = q2_score(fit.model, T, fn(T));
    for (const auto& dist :
         estimate_subsets(fit.model, first_order_subsets(8), T, options, derive_seed(rep.seed, 103))) {
      rep.rows.push_back(make_row(dist));
    }
    report.repetitions.push_back(std::move(rep));
  }
  return report;
}

CoverageReport run_coverage(const ExperimentOptions& options, int repetitions) {
  if (repetitions < 1) {
    throw ConfigError("coverage study needs at least one repetition");
  }
  const auto fn = ishigami_function();
  const auto marginals = ishigami_marginals();
  const auto specs = kernel_specs_for(marginals, BaseKind::Gaussian);
  const JointDistribution joint(marginals, IndependentCopula{});
  CoverageReport report;
  report.repetitions = repetitions;
  for (const auto& ref : ishigami_analytical_indices()) {
    report.rows.push_back({ref.u, ref.value, 0, 0, 0});
  }
  std::vector<Subset> subsets;
  for (const auto& row : report.rows) {
    subsets.push_back(row.u);
  }
  for (int r = 0; r < repetitions; ++r) {
    const std::uint64_t seed = derive_seed(options.seed, 300 + static_cast<std::uint64_t>(r));
    const auto fit = fit_surrogate(fn, specs, fn.default_bounds, options, derive_seed(seed, 100));
    Rng rng(derive_seed(seed, 102));
    const Eigen::MatrixXd T = joint.sample(options.estimation.m, rng);
    const auto dists = estimate_subsets(fit.model, subsets, T, options, derive_seed(seed, 103));
    for (auto& row : report.rows) {
      for (const auto& dist : dists) {
        if (dist.u != row.u) {
          continue;
        }
        const auto pooled = summarize(dist);
        const auto realization = summarize_realizations(dist);
        const auto [lo, hi] = predictive_mean_interval(fit.model, row.u, T);
        row.covered_pooled += pooled.q025 <= row.truth && row.truth <= pooled.q975;
        row.covered_realization += realization.q025 <= row.truth && row.truth <= realization.q975;
        row.covered_mean += lo <= row.truth && row.truth <= hi;
      }
    }
  }
  return report;
}

nlohmann::json to_json(const IndexSummary& s) {
  return {{"mode", s.mode},
          {"mean", s.mean},
          {"q025", s.q025},
          {"q975", s.q975},
          {"variance_part", s.variance_part},
          {"covariance_part", s.covariance_part}};
}

nlohmann::json to_json(const IndexDistribution& dist) {
  const auto s = summarize(dist);
  nlohmann::json j = to_json(s);
  j["index"] = dist.u.label();
  std::vector<double> values;
  std::vector<double> deltas;
  for (const auto& r : dist.realizations) {
    values.push_back(r.value);
    deltas.push_back(r.delta_variance);
  }
  j["realizations"] = values;
  j["delta_variances"] = deltas;
  return j;
}

nlohmann::json to_json(const FitSummary& fit) {
  return {{"theta", fit.theta},
          {"sigma2", fit.sigma2},
          {"f0", fit.f0},
          {"nugget", fit.nugget},
          {"objective", fit.objective}};
}

nlohmann::json to_json(const Table1Report& report) {
  return {{"fit", to_json(report.fit)}, {"q2", report.q2}, {"indices", rows_json(report.rows)}};
}

nlohmann::json to_json(const Table3Report& report) {
  return {{"fit", to_json(report.fit)},
          {"indices", rows_json(report.rows)},
          {"groups",
           {{"S1+S2+S12", {{"estimate", report.group_first}, {"sobol", report.sobol_first}}},
            {"S3", {{"estimate", report.group_third}, {"sobol", report.sobol_third}}},
            {"S13+S23",
             {{"estimate", report.group_interaction}, {"sobol", report.sobol_interaction}}}}}};
}

nlohmann::json to_json(const CopulaReport& report) {
  return {{"fit", to_json(report.fit)},
          {"rho_s", report.rho_s},
          {"gaussian_parameter", report.gaussian_parameter},
          {"clayton_parameter", report.clayton_parameter},
          {"gaussian", rows_json(report.gaussian_rows)},
          {"clayton", rows_json(report.clayton_rows)}};
}

nlohmann::json to_json(const FloodReport& report) {
  nlohmann::json reps = nlohmann::json::array();
  for (const auto& rep : report.repetitions) {
    nlohmann::json inputs = nlohmann::json::array();
    for (std::size_t k = 0; k < rep.rows.size(); ++k) {
      nlohmann::json j = to_json(rep.rows[k].pooled);
      j["input"] = report.names[k];
      inputs.push_back(std::move(j));
    }
    reps.push_back({{"seed", rep.seed}, {"fit", to_json(rep.fit)}, {"q2", rep.q2}, {"inputs", inputs}});
  }
  return {{"inputs", report.names}, {"repetitions", reps}};
}

nlohmann::json to_json(const CoverageReport& report) {
  nlohmann::json rows = nlohmann::json::array();
  const double n = report.repetitions;
  for (const auto& row : report.rows) {
    rows.push_back({{"index", row.u.label()},
                    {"truth", row.truth},
                    {"mc_meta_model", row.covered_pooled / n},
                    {"meta_model", row.covered_realization / n},
                    {"mc_predictive_mean", row.covered_mean / n}});
  }
  return {{"repetitions", report.repetitions}, {"coverage", rows}};
}

void write_report(const Table1Report& report, const std::filesystem::path& dir) {
  ensure_dir(dir);
  write_json(dir / "table1.json", to_json(report));
  std::vector<std::string> header{"row"};
  std::vector<std::vector<std::string>> rows{{"analytical"}, {"estimate"}, {"q025"}, {"q975"}};
  for (const auto& row : report.rows) {
    header.push_back(index_label(row.u));
    rows[0].push_back(format_double(row.reference));
    rows[1].push_back(format_double(row.pooled.mode));
    rows[2].push_back(format_double(row.pooled.q025));
    rows[3].push_back(format_double(row.pooled.q975));
  }
  write_text_csv(dir / "table1.csv", header, rows);
}

void write_report(const Table3Report& report, const std::filesystem::path& dir) {
  ensure_dir(dir);
  write_json(dir / "table3.json", to_json(report));
  std::vector<std::string> header{"row"};
  std::vector<std::vector<std::string>> rows{{"estimate"}, {"sobol"}};
  for (const auto& row : report.rows) {
    header.push_back(index_label(row.u));
    rows[0].push_back(format_double(row.pooled.mode));
    std::string sobol;
    if (row.u == Subset{0}) {
      sobol = format_double(report.sobol_first);
    } else if (row.u == Subset{2}) {
      sobol = format_double(report.sobol_third);
    } else if (row.u == Subset{0, 2}) {
      sobol = format_double(report.sobol_interaction);
    }
    rows[1].push_back(sobol);
  }
  write_text_csv(dir / "table3.csv", header, rows);
}

void write_report(const CopulaReport& report, const std::filesystem::path& dir) {
  ensure_dir(dir);
  write_json(dir / "copula_study.json", to_json(report));
  std::vector<std::vector<std::string>> rows;
  auto emit = [&rows](const std::string& copula, const std::vector<IndexDistribution>& dists) {
    for (const auto& dist : dists) {
      for (std::size_t r = 0; r < dist.realizations.size(); ++r) {
        const auto& rz = dist.realizations[r];
        rows.push_back({copula, index_label(dist.u), std::to_string(r), format_double(rz.value),
                        format_double(rz.delta_variance), format_double(rz.variance_part),
                        format_double(rz.covariance_part)});
      }
    }
  };
  emit("gaussian", report.gaussian);
  emit("clayton", report.clayton);
  write_text_csv(dir / "copula_study.csv",
                 {"copula", "index", "realization", "value", "delta_variance", "variance_part",
                  "covariance_part"},
                 rows);
}

void write_report(const FloodReport& report, const std::filesystem::path& dir) {
  ensure_dir(dir);
  write_json(dir / "flood.json", to_json(report));
}

void write_report(const CoverageReport& report, const std::filesystem::path& dir) {
  ensure_dir(dir);
  write_json(dir / "coverage.json", to_json(report));
}

} // namespace anovagp
