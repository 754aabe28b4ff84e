#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "anovagp/design.hpp"
#include "anovagp/distributions.hpp"
#include "anovagp/gp.hpp"
#include "anovagp/sensitivity.hpp"
#include "anovagp/subset.hpp"

namespace anovagp {

struct TestFunction {
  std::string name;
  int dim = 0;
  std::function<double(std::span<const double>)> evaluate;
  std::vector<Bounds> default_bounds;

  /// Evaluates every row.
  Eigen::VectorXd operator()(const Eigen::MatrixXd& points) const;
};

double ishigami(double x1, double x2, double x3);
/// Ishigami on U(-pi, pi)^3.
TestFunction ishigami_function();
/// Ishigami restricted to x2 = x1: z(x1, x3).
TestFunction ishigami_tied_function();

struct ReferenceIndex {
  Subset u;
  double value;
};
/// Closed-form Sobol indices of Ishigami under independent U(-pi, pi)
/// inputs for every u of size <= 2.
std::vector<ReferenceIndex> ishigami_analytical_indices();

/// Maximal overflow S = Zv + h - Hd - Cb of the river model with
/// h = (Q / (B Ks sqrt((Zm - Zv) / L)))^0.6.
double flood_overflow(double q, double ks, double zv, double zm, double hd, double cb, double l,
                      double b);
TestFunction flood_function();
/// Marginals of (Q, Ks, Zv, Zm, Hd, Cb, L, B).
std::vector<Marginal> flood_marginals();
/// Flood inputs with Pearson correlations 0.5 for (Q, Ks) and 0.3 for
/// (Zv, Zm) and (L, B), each realized by a Gaussian copula whose
/// parameter is matched by bisection.
JointDistribution flood_inputs(std::uint64_t seed, Eigen::Index matching_samples = 200000);

/// Sobol index of u under independent inputs: closed indices
/// V(E[f | X_v]) / V(f) by pick-freeze, combined by inclusion-exclusion
/// over v in u. Throws ConfigError for dependent inputs.
double pick_freeze_sobol(const TestFunction& fn, const JointDistribution& joint, const Subset& u,
                         Eigen::Index m, Rng& rng);

/// Maps a design on the unit cube through the marginal inverse CDFs.
/// Bounds are the supports with infinite ends replaced by the 1e-6 tail
/// quantiles.
DesignSet design_from_unit(const Eigen::MatrixXd& unit, const std::vector<Marginal>& marginals);

/// Kernel family with `kind` for every marginal: closed-form centering
/// where available, otherwise quadrature with `nodes` per piece.
std::vector<KernelSpec> kernel_specs_for(const std::vector<Marginal>& marginals, BaseKind kind,
                                         int nodes = 256);

/// Summary row of one index.
struct IndexRow {
  Subset u;
  IndexSummary pooled;      // MC + meta-model
  IndexSummary realization; // meta-model only
  double reference = 0.0;
  bool has_reference = false;
};

struct FitSummary {
  std::vector<double> theta;
  double sigma2 = 0.0;
  double f0 = 0.0;
  double nugget = 0.0;
  double objective = 0.0;
};

struct ExperimentOptions {
  std::uint64_t seed = 1;
  Eigen::Index n = 150;
  int design_restarts = 5;
  int mle_starts = 20;
  EstimationOptions estimation;
  /// Use one joint draw of every component (p <= 4) instead of one
  /// sampler per index.
  bool consistent = false;
  int threads = 1;
};

struct Table1Report {
  FitSummary fit;
  double q2 = 0.0;
  std::vector<IndexRow> rows;
};
Table1Report run_table1(const ExperimentOptions& options, Eigen::Index test_points = 10000);

struct Table3Report {
  FitSummary fit;
  std::vector<IndexRow> rows;
  /// Mode sums S1 + S2 + S12, S3, S13 + S23.
  double group_first = 0.0;
  double group_third = 0.0;
  double group_interaction = 0.0;
  /// Two-input Sobol oracle S1, S3, S13 of the tied function.
  double sobol_first = 0.0;
  double sobol_third = 0.0;
  double sobol_interaction = 0.0;
};
Table3Report run_table3(const ExperimentOptions& options, Eigen::Index oracle_samples = 1000000);

struct CopulaReport {
  FitSummary fit;
  double rho_s = 0.7;
  double gaussian_parameter = 0.0;
  double clayton_parameter = 0.0;
  std::vector<IndexDistribution> gaussian;
  std::vector<IndexDistribution> clayton;
  std::vector<IndexRow> gaussian_rows;
  std::vector<IndexRow> clayton_rows;
};
/// Same meta-model analyzed under a Gaussian and a Clayton copula with
/// equal pairwise Spearman rho on all three pairs.
CopulaReport run_copula_study(const ExperimentOptions& options, double rho_s = 0.7);

struct FloodRepetition {
  std::uint64_t seed = 0;
  FitSummary fit;
  double q2 = 0.0;
  std::vector<IndexRow> rows; // one per input
};
struct FloodReport {
  std::vector<std::string> names;
  std::vector<FloodRepetition> repetitions;
};
FloodReport run_flood(const ExperimentOptions& options, int repetitions = 1);

struct CoverageRow {
  Subset u;
  double truth = 0.0;
  int covered_pooled = 0;      // MC + meta-model
  int covered_realization = 0; // meta-model only
  int covered_mean = 0;        // MC + predictive mean
};
struct CoverageReport {
  int repetitions = 0;
  std::vector<CoverageRow> rows;
};
CoverageReport run_coverage(const ExperimentOptions& options, int repetitions = 50);

/// Interval S^D +- 1.96 sqrt(delta / m) from the predictive-mean
/// components on T.
std::pair<double, double> predictive_mean_interval(const FittedGP& model, const Subset& u,
                                                   const Eigen::MatrixXd& T);

nlohmann::json to_json(const IndexSummary& summary);
nlohmann::json to_json(const IndexDistribution& dist);
nlohmann::json to_json(const FitSummary& fit);
nlohmann::json to_json(const Table1Report& report);
nlohmann::json to_json(const Table3Report& report);
nlohmann::json to_json(const CopulaReport& report);
nlohmann::json to_json(const FloodReport& report);
nlohmann::json to_json(const CoverageReport& report);

/// Writes the JSON and CSV files of each report into `dir`.
void write_report(const Table1Report& report, const std::filesystem::path& dir);
void write_report(const Table3Report& report, const std::filesystem::path& dir);
void write_report(const CopulaReport& report, const std::filesystem::path& dir);
void write_report(const FloodReport& report, const std::filesystem::path& dir);
void write_report(const CoverageReport& report, const std::filesystem::path& dir);

} // namespace anovagp
