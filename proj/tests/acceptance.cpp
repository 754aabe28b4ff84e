// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 when any
// criterion fails. Tolerances are fixed here and never read from input.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <algorithm>
#include <functional>
#include <numeric>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "anovagp/benchmarks.hpp"
#include "anovagp/conditional.hpp"
#include "anovagp/gp.hpp"
#include "anovagp/sensitivity.hpp"

using namespace anovagp;

namespace {

constexpr double kZ95 = 1.959963984540054;

struct Outcome {
  bool passed;
  std::string detail;
};

std::string fixed(double v, int digits = 4) {
  std::ostringstream out;
  out.precision(digits);
  out << std::fixed << v;
  return out.str();
}

std::string sci(double v) {
  std::ostringstream out;
  out.precision(2);
  out << std::scientific << v;
  return out.str();
}

std::vector<Marginal> pi_marginals(int dim) {
  return std::vector<Marginal>(static_cast<std::size_t>(dim), Marginal(Uniform{-std::numbers::pi, std::numbers::pi}));
}

double mean_of(const Eigen::VectorXd& v) { return v.sum() / static_cast<double>(v.size()); }

double var_of(const Eigen::VectorXd& v) {
  const double m = mean_of(v);
  return (v.array() - m).square().sum() / static_cast<double>(v.size());
}

// Independent simulation grid integral: Simpson split at the kink.
double centered_integral(const CenteredKernel& k, double y) {
  const auto [a, b] = k.marginal().support();
  auto simpson = [&](double lo, double hi) {
    const int n = 4000;
    const double h = (hi - lo) / n;
    double s = k(lo, y) + k(hi, y);
    for (int i = 1; i < n; ++i) {
      s += (i % 2 ? 4.0 : 2.0) * k(lo + i * h, y);
    }
    return s * h / 3.0;
  };
  return (simpson(a, y) + simpson(y, b)) / (b - a);
}

// Ishigami surrogate shared by the sampler and Delta-method criteria.
const FittedGP& ishigami_surrogate() {
  static const FittedGP model = [] {
    Rng rng(derive_seed(2024, 100));
    const std::vector<Bounds> bounds(3, Bounds{-std::numbers::pi, std::numbers::pi});
    const DesignSet design = maximin_lhs(150, bounds, MaximinOptions{}, rng);
    const Eigen::VectorXd y = ishigami_function()(design.points);
    return fit_mle(design, y, kernel_specs_for(pi_marginals(3), BaseKind::Gaussian), MleOptions{}, rng).model;
  }();
  return model;
}

const Table1Report& table1() {
  static const Table1Report report = run_table1(ExperimentOptions{});
  return report;
}

Outcome criterion_table1_modes() {
  const std::vector<std::pair<Subset, double>> targets{{Subset{0}, 0.314},    {Subset{1}, 0.442},
                                                       {Subset{2}, 0.0},      {Subset{0, 1}, 0.0},
                                                       {Subset{0, 2}, 0.244}, {Subset{1, 2}, 0.0}};
  bool ok = true;
  std::string detail;
  for (const auto& [u, target] : targets) {
    for (const auto& row : table1().rows) {
      if (row.u == u) {
        ok = ok && std::abs(row.pooled.mode - target) <= 0.03;
        detail += u.label() + "=" + fixed(row.pooled.mode, 3) + " ";
      }
    }
  }
  return {ok, detail + "(tol 0.03)"};
}

Outcome criterion_q2() {
  return {table1().q2 >= 0.95, "Q2=" + fixed(table1().q2) + " (>= 0.95)"};
}

Outcome criterion_table3() {
  const Table3Report r = run_table3(ExperimentOptions{});
  const bool first = std::abs(r.group_first - r.sobol_first) <= 0.05;
  const bool third = std::abs(r.group_third - 0.001) <= 0.02;
  const bool inter = std::abs(r.group_interaction - 0.245) <= 0.05;
  return {first && third && inter, "S1+S2+S12=" + fixed(r.group_first) + " vs oracle " + fixed(r.sobol_first) +
                                       " (0.05), S3=" + fixed(r.group_third) + " vs 0.001 (0.02), S13+S23=" +
                                       fixed(r.group_interaction) + " vs 0.245 (0.05)"};
}

Outcome criterion_sum_to_one() {
  EstimationOptions opt;
  opt.m = 10000;
  opt.realizations = 50;
  opt.perturbations = 10;
  const JointDistribution joint(pi_marginals(3), IndependentCopula{});
  const auto all = estimate_all_indices_consistent(ishigami_surrogate(), joint, opt, 77);
  double worst = 0.0;
  for (int r = 0; r < opt.realizations; ++r) {
    double total = 0.0;
    for (const auto& d : all) {
      total += d.realizations[static_cast<std::size_t>(r)].value;
    }
    worst = std::max(worst, std::abs(total - 1.0));
  }
  return {worst < 1e-8, "max |sum - 1| = " + sci(worst) + " over 50 realizations (< 1e-8)"};
}

Outcome criterion_centering() {
  const Marginal m(Uniform{-std::numbers::pi, std::numbers::pi});
  const std::vector<CenteredKernel> kernels{
      CenteredKernel(BaseKernel(BaseKind::Exponential, 1.0), m, Centering::closed_form()),
      CenteredKernel(BaseKernel(BaseKind::Gaussian, 1.5), m, Centering::closed_form())};
  double integral = 0.0;
  double agreement = 0.0;
  for (const auto& k : kernels) {
    const CenteredKernel quad(k.base(), m, Centering::quadrature(512));
    for (int i = 0; i < 20; ++i) {
      const double y = -std::numbers::pi + (i + 0.5) * 2 * std::numbers::pi / 20;
      integral = std::max(integral, std::abs(centered_integral(k, y)));
      for (int j = 0; j < 20; ++j) {
        const double x = -std::numbers::pi + (j + 0.5) * 2 * std::numbers::pi / 20;
        agreement = std::max(agreement, std::abs(k(x, y) - quad(x, y)));
      }
    }
  }
  return {integral < 1e-8 && agreement < 1e-6,
          "max |int k0| = " + sci(integral) + " (< 1e-8), closed form vs quadrature " +
              sci(agreement) + " (< 1e-6)"};
}

Outcome criterion_sampler() {
  const FittedGP& model = ishigami_surrogate();
  Rng rng(31);
  const Eigen::MatrixXd probes = JointDistribution(pi_marginals(3), IndependentCopula{}).sample(5, rng);
  Eigen::MatrixXd T(5 + model.size(), 3);
  T << probes, model.design().points;
  const ComponentSampler sampler(model, Subset{0}, T);
  const int seeds = 2000;
  Eigen::MatrixXd values(seeds, 5);
  double interp = 0.0;
  for (int s = 0; s < seeds; ++s) {
    const auto r = sampler.draw(derive_seed(32, static_cast<std::uint64_t>(s)));
    values.row(s) = r.f.head(5).transpose();
    interp = std::max(interp, (r.f.tail(model.size()) - model.y()).cwiseAbs().maxCoeff());
  }
  const Eigen::VectorXd mu = model.predictive_mean(probes);
  const Eigen::VectorXd s2 = model.predictive_cov(probes, probes).diagonal();
  double worst_z = 0.0;
  double worst_rel = 0.0;
  for (int j = 0; j < 5; ++j) {
    const Eigen::VectorXd col = values.col(j);
    worst_z = std::max(worst_z, std::abs(mean_of(col) - mu[j]) / std::sqrt(s2[j] / seeds));
    worst_rel = std::max(worst_rel, std::abs(var_of(col) / s2[j] - 1.0));
  }
  const double range = model.y().maxCoeff() - model.y().minCoeff();
  return {worst_z <= 3.0 && worst_rel <= 0.15 && interp <= 1e-6 * range,
          "mean error " + fixed(worst_z, 2) + " SE (<= 3), variance error " + fixed(100 * worst_rel, 1) +
              "% (<= 15%), interpolation " + sci(interp / range) + " x range (<= 1e-6)"};
}

Outcome criterion_delta_coverage() {
  // Fixed components: the predictive-mean split of the surrogate for u = {1}.
  const FittedGP& model = ishigami_surrogate();
  const Subset u{0};
  const JointDistribution joint(pi_marginals(3), IndependentCopula{});
  auto components = [&](const Eigen::MatrixXd& x) {
    const Eigen::VectorXd f = model.predictive_mean(x);
    const Eigen::VectorXd fu = model.mean_component(u, x);
    return std::pair<Eigen::VectorXd, Eigen::VectorXd>{fu, f - fu};
  };
  double truth = 0.0;
  {
    Rng rng(41);
    const Eigen::MatrixXd big = joint.sample(1000000, rng);
    const auto [fu, fuc] = components(big);
    truth = plugin_index(fu, fuc).value;
  }
  const int reps = 500;
  const Eigen::Index m = 2000;
  int covered = 0;
  for (int r = 0; r < reps; ++r) {
    Rng rng(derive_seed(42, static_cast<std::uint64_t>(r)));
    const auto [fu, fuc] = components(joint.sample(m, rng));
    const double s = plugin_index(fu, fuc).value;
    const double half = kZ95 * std::sqrt(delta_variance(fu, fuc) / static_cast<double>(m));
    covered += (s - half <= truth && truth <= s + half) ? 1 : 0;
  }
  const double rate = static_cast<double>(covered) / reps;
  return {rate >= 0.90 && rate <= 0.99, "coverage " + fixed(rate, 3) + " of 500 (in [0.90, 0.99]), truth " +
                                            fixed(truth)};
}

Outcome criterion_coverage_ordering() {
  ExperimentOptions opt;
  opt.consistent = true;
  const CoverageReport r = run_coverage(opt, 50);
  bool ok = true;
  std::string detail;
  for (const auto& row : r.rows) {
    if (row.u == Subset{0} || row.u == Subset{1}) {
      ok = ok && row.covered_pooled >= row.covered_realization && row.covered_pooled >= row.covered_mean;
      detail += row.u.label() + ": MC+meta " + std::to_string(row.covered_pooled) + ", meta " +
                std::to_string(row.covered_realization) + ", MC+mean " + std::to_string(row.covered_mean) + "; ";
    }
  }
  return {ok, detail + "of 50"};
}

Outcome criterion_copula() {
  ExperimentOptions opt;
  opt.n = 200;
  opt.consistent = true;
  const CopulaReport r = run_copula_study(opt, 0.7);
  const IndexSummary* g = nullptr;
  const IndexSummary* c = nullptr;
  for (const auto& row : r.gaussian_rows) {
    if (row.u == Subset{0}) g = &row.pooled;
  }
  for (const auto& row : r.clayton_rows) {
    if (row.u == Subset{0}) c = &row.pooled;
  }
  if (g == nullptr || c == nullptr) {
    return {false, "S1 missing from report"};
  }
  const double gap = std::abs(g->mode - c->mode);
  const double half = 0.5 * (g->q975 - g->q025) + 0.5 * (c->q975 - c->q025);
  return {gap > half, "Gaussian " + fixed(g->mode) + ", Clayton " + fixed(c->mode) + ", gap " + fixed(gap) +
                          (gap > half ? " > " : " <= ") + "half-widths " + fixed(half)};
}

Outcome criterion_flood() {
  ExperimentOptions opt;
  opt.n = 200;
  opt.estimation.m = 5000;
  opt.estimation.realizations = 100;
  const FloodReport r = run_flood(opt, 5);
  bool ok = true;
  std::vector<double> sums;
  std::string detail;
  for (const auto& rep : r.repetitions) {
    std::vector<double> mode;
    for (const auto& row : rep.rows) {
      mode.push_back(row.pooled.mode);
    }
    const bool hd_top = std::max_element(mode.begin(), mode.end()) - mode.begin() == 4;
    ok = ok && hd_top && mode[6] < 0.02 && mode[7] < 0.02 && mode[0] > 0.0 && mode[1] > 0.0;
    sums.push_back(mode[0] + mode[1]);
    detail += "[Hd " + fixed(mode[4], 3) + (hd_top ? " top" : " NOT top") + ", L " + fixed(mode[6], 3) + ", B " +
              fixed(mode[7], 3) + ", Q " + fixed(mode[0], 3) + ", Ks " + fixed(mode[1], 3) + "] ";
  }
  const double mean = std::accumulate(sums.begin(), sums.end(), 0.0) / static_cast<double>(sums.size());
  double spread = 0.0;
  for (double s : sums) {
    spread = std::max(spread, std::abs(s - mean));
  }
  ok = ok && spread <= 0.05;
  return {ok, detail + "Q+Ks " + fixed(mean, 3) + " +- " + fixed(spread, 3) + " (<= 0.05)"};
}

} // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"1 Ishigami independent modes", criterion_table1_modes},
      {"2 Ishigami Q2", criterion_q2},
      {"3 Perfectly correlated inputs", criterion_table3},
      {"4 Sum to one in consistent mode", criterion_sum_to_one},
      {"5 Kernel centering", criterion_centering},
      {"6 Conditional sampler moments", criterion_sampler},
      {"7 Delta-method interval coverage", criterion_delta_coverage},
      {"8 Coverage ordering", criterion_coverage_ordering},
      {"9 Gaussian vs Clayton copula", criterion_copula},
      {"10 Flood ranking", criterion_flood},
  };
  int failures = 0;
  for (const auto& [name, run] : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome out{false, ""};
    try {
      out = run();
    } catch (const std::exception& e) {
      out = {false, std::string("error: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("%s criterion %s: %s [%.0f s]\n", out.passed ? "PASS" : "FAIL", name.c_str(), out.detail.c_str(), secs);
    std::fflush(stdout);
    failures += out.passed ? 0 : 1;
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
