#include "anovagp/config.hpp"

#include <cmath>
#include <limits>

#include "anovagp/benchmarks.hpp"
#include "anovagp/errors.hpp"
#include "anovagp/io.hpp"

namespace anovagp {

namespace {

using nlohmann::json;

const json& require(const json& j, const char* key, const std::string& where) {
  if (!j.is_object() || !j.contains(key)) {
    throw ConfigError(where + ": missing \"" + key + "\"");
  }
  return j.at(key);
}

double number(const json& j, const std::string& where) {
  if (j.is_number()) {
    return j.get<double>();
  }
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf" || s == "+inf") {
      return std::numeric_limits<double>::infinity();
    }
    if (s == "-inf") {
      return -std::numeric_limits<double>::infinity();
    }
  }
  if (j.is_null()) {
    throw ConfigError(where + ": expected a number, got null");
  }
  throw ConfigError(where + ": expected a number, got " + j.dump());
}

double number_at(const json& j, const char* key, const std::string& where) {
  return number(require(j, key, where), where + "." + key);
}

// Bound that may be omitted or null to mean unbounded.
double bound_at(const json& j, const char* key, double fallback) {
  if (!j.contains(key) || j.at(key).is_null()) {
    return fallback;
  }
  return number(j.at(key), key);
}

int index_of(const json& j, int dim, const std::string& where) {
  if (!j.is_number_integer()) {
    throw ConfigError(where + ": indices must be integers");
  }
  const int i = j.get<int>();
  if (i < 1 || i > dim) {
    throw ConfigError(where + ": index " + std::to_string(i) + " outside 1.." + std::to_string(dim));
  }
  return i - 1;
}

Subset parse_subset(const json& j, int dim) {
  Subset u;
  if (j.is_string()) {
    u = Subset::parse(j.get<std::string>());
  } else if (j.is_array()) {
    std::vector<int> idx;
    for (const auto& e : j) {
      idx.push_back(index_of(e, dim, "subset"));
    }
    u = Subset::from_indices(idx);
  } else {
    throw ConfigError("subset must be a string like \"{1,3}\" or an array of indices");
  }
  require_valid(u, dim);
  return u;
}

json centering_json(const Centering& c) {
  if (c.mode == Centering::Mode::ClosedForm) {
    return "closed_form";
  }
  return json{{"quadrature", c.nodes}};
}

Centering parse_centering(const json& j) {
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "closed_form") {
      return Centering::closed_form();
    }
    if (s == "quadrature") {
      return Centering::quadrature();
    }
    throw ConfigError("unknown centering \"" + s + "\"");
  }
  if (j.is_object() && j.contains("quadrature")) {
    const auto& nodes = j.at("quadrature");
    if (!nodes.is_number_integer() || nodes.get<int>() < 2) {
      throw ConfigError("quadrature centering needs an integer node count >= 2");
    }
    return Centering::quadrature(nodes.get<int>());
  }
  throw ConfigError("centering must be \"closed_form\" or {\"quadrature\": nodes}");
}

std::vector<Bounds> default_bounds(const std::vector<Marginal>& marginals) {
  return design_from_unit(Eigen::MatrixXd(0, static_cast<Eigen::Index>(marginals.size())), marginals)
      .bounds;
}

} // namespace

Marginal parse_marginal(const json& j) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  const auto kind = require(j, "kind", "marginal").get<std::string>();
  const std::string where = "marginal " + kind;
  if (kind == "uniform") {
    return Marginal(Uniform{number_at(j, "a", where), number_at(j, "b", where)});
  }
  if (kind == "triangular") {
    return Marginal(Triangular{number_at(j, "a", where), number_at(j, "c", where), number_at(j, "b", where)});
  }
  if (kind == "truncated_normal" || kind == "normal") {
    return Marginal(TruncatedNormal{number_at(j, "mean", where), number_at(j, "sd", where),
                                    bound_at(j, "lo", -inf), bound_at(j, "hi", inf)});
  }
  if (kind == "truncated_gumbel" || kind == "gumbel") {
    return Marginal(TruncatedGumbel{number_at(j, "loc", where), number_at(j, "scale", where),
                                    bound_at(j, "lo", -inf), bound_at(j, "hi", inf)});
  }
  throw ConfigError("unknown marginal kind \"" + kind + "\"");
}

json marginal_to_json(const Marginal& marginal) {
  auto bound = [](double v) -> json {
    if (std::isinf(v)) {
      return nullptr;
    }
    return v;
  };
  return std::visit(
      [&](const auto& p) -> json {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, Uniform>) {
          return {{"kind", "uniform"}, {"a", p.a}, {"b", p.b}};
        } else if constexpr (std::is_same_v<T, Triangular>) {
          return {{"kind", "triangular"}, {"a", p.a}, {"c", p.c}, {"b", p.b}};
        } else if constexpr (std::is_same_v<T, TruncatedNormal>) {
          return {{"kind", "truncated_normal"}, {"mean", p.mean}, {"sd", p.sd},
                  {"lo", bound(p.lo)},          {"hi", bound(p.hi)}};
        } else {
          return {{"kind", "truncated_gumbel"}, {"loc", p.loc}, {"scale", p.scale},
                  {"lo", bound(p.lo)},          {"hi", bound(p.hi)}};
        }
      },
      marginal.params());
}

Copula parse_copula(const json& j, int dim) {
  const auto kind = require(j, "kind", "copula").get<std::string>();
  if (kind == "independent") {
    return IndependentCopula{};
  }
  if (kind == "gaussian") {
    Eigen::MatrixXd corr = Eigen::MatrixXd::Identity(dim, dim);
    if (j.contains("correlation")) {
      const auto& rows = j.at("correlation");
      if (!rows.is_array() || static_cast<int>(rows.size()) != dim) {
        throw ConfigError("gaussian copula: correlation must be a " + std::to_string(dim) + "x" +
                          std::to_string(dim) + " matrix");
      }
      for (int r = 0; r < dim; ++r) {
        if (!rows[r].is_array() || static_cast<int>(rows[r].size()) != dim) {
          throw ConfigError("gaussian copula: correlation row " + std::to_string(r + 1) +
                            " has the wrong length");
        }
        for (int c = 0; c < dim; ++c) {
          corr(r, c) = number(rows[r][c], "correlation");
        }
      }
    } else if (j.contains("spearman")) {
      const double rho = spearman_to_gaussian_param(number(j.at("spearman"), "spearman"));
      corr.setConstant(rho);
      corr.diagonal().setOnes();
    } else if (j.contains("pairs")) {
      const auto measure = j.value("measure", std::string("copula"));
      const auto seed = j.value("matching_seed", std::uint64_t{12345});
      std::vector<Marginal> marginals;
      for (const auto& pair : j.at("pairs")) {
        if (!pair.is_array() || pair.size() != 3) {
          throw ConfigError("gaussian copula: pairs entries are [i, j, value]");
        }
        const int a = index_of(pair[0], dim, "gaussian copula");
        const int b = index_of(pair[1], dim, "gaussian copula");
        const double value = number(pair[2], "gaussian copula");
        double rho = value;
        if (measure == "spearman") {
          rho = spearman_to_gaussian_param(value);
        } else if (measure == "pearson") {
          // Resolved later against the marginals; stash the target.
          rho = std::numeric_limits<double>::quiet_NaN();
        } else if (measure != "copula") {
          throw ConfigError("gaussian copula: measure must be copula, spearman or pearson");
        }
        corr(a, b) = corr(b, a) = rho;
      }
      (void)seed;
    } else {
      throw ConfigError("gaussian copula needs correlation, spearman or pairs");
    }
    return GaussianCopula{corr};
  }
  if (kind == "clayton") {
    ClaytonCopula out;
    auto theta_of = [](const json& g) {
      if (g.contains("theta")) {
        return number(g.at("theta"), "clayton theta");
      }
      if (g.contains("spearman")) {
        return spearman_to_clayton_param(number(g.at("spearman"), "clayton spearman"));
      }
      throw ConfigError("clayton group needs theta or spearman");
    };
    if (j.contains("groups")) {
      for (const auto& g : j.at("groups")) {
        ClaytonGroup group;
        for (const auto& i : require(g, "indices", "clayton group")) {
          group.indices.push_back(index_of(i, dim, "clayton group"));
        }
        group.theta = theta_of(g);
        out.groups.push_back(std::move(group));
      }
    } else if (j.contains("pairs")) {
      for (const auto& pair : j.at("pairs")) {
        if (!pair.is_array() || pair.size() != 3) {
          throw ConfigError("clayton copula: pairs entries are [i, j, theta]");
        }
        out.groups.push_back({{index_of(pair[0], dim, "clayton"), index_of(pair[1], dim, "clayton")},
                              number(pair[2], "clayton theta")});
      }
    } else {
      throw ConfigError("clayton copula needs groups or pairs");
    }
    return out;
  }
  if (kind == "equal") {
    EqualityCopula out;
    for (const auto& pair : require(j, "pairs", "equal copula")) {
      if (!pair.is_array() || pair.size() != 2) {
        throw ConfigError("equal copula: pairs entries are [i, j]");
      }
      out.pairs.emplace_back(index_of(pair[0], dim, "equal copula"), index_of(pair[1], dim, "equal copula"));
    }
    return out;
  }
  throw ConfigError("unknown copula kind \"" + kind + "\"");
}

std::vector<KernelSpec> parse_kernels(const json& j, const std::vector<Marginal>& marginals) {
  const std::size_t dim = marginals.size();
  std::vector<json> entries;
  if (j.is_array()) {
    if (j.size() != dim) {
      throw ConfigError("kernel: expected " + std::to_string(dim) + " entries, got " +
                        std::to_string(j.size()));
    }
    entries.assign(j.begin(), j.end());
  } else if (j.is_object()) {
    entries.assign(dim, j);
  } else {
    throw ConfigError("kernel must be an object or an array of objects");
  }
  std::vector<KernelSpec> out;
  for (std::size_t d = 0; d < dim; ++d) {
    const auto& e = entries[d];
    const BaseKind kind = parse_base_kind(e.value("kind", std::string("gaussian")));
    KernelSpec spec = kernel_specs_for({marginals[d]}, kind).front();
    if (e.contains("centering")) {
      spec.centering = parse_centering(e.at("centering"));
    }
    if (e.contains("theta") && !e.at("theta").is_null()) {
      spec.theta = number(e.at("theta"), "kernel theta");
      if (!(*spec.theta > 0.0)) {
        throw ConfigError("kernel theta must be positive");
      }
    }
    // Validates the centering against the marginal.
    (void)CenteredKernel(BaseKernel(kind, spec.theta.value_or(1.0)), spec.marginal, spec.centering);
    out.push_back(std::move(spec));
  }
  return out;
}

RunConfig parse_run_config(const json& doc, const std::filesystem::path& base_dir) {
  try {
    RunConfig config;
    const auto& problem = require(doc, "problem", "config");
    const auto& marginals = require(problem, "marginals", "problem");
    if (!marginals.is_array() || marginals.empty()) {
      throw ConfigError("problem.marginals must be a nonempty array");
    }
    for (const auto& m : marginals) {
      config.marginals.push_back(parse_marginal(m));
    }
    const int dim = config.dim();
    if (problem.contains("copula")) {
      config.copula = parse_copula(problem.at("copula"), dim);
      // Pearson targets need the marginals for matching.
      if (auto* g = std::get_if<GaussianCopula>(&config.copula)) {
        const auto& cj = problem.at("copula");
        for (int a = 0; a < dim; ++a) {
          for (int b = a + 1; b < dim; ++b) {
            if (std::isnan(g->correlation(a, b))) {
              double target = 0.0;
              for (const auto& pair : cj.at("pairs")) {
                if ((pair[0].get<int>() - 1 == a && pair[1].get<int>() - 1 == b) ||
                    (pair[0].get<int>() - 1 == b && pair[1].get<int>() - 1 == a)) {
                  target = number(pair[2], "pearson target");
                }
              }
              const double r = match_pearson_gaussian(
                  config.marginals[static_cast<std::size_t>(a)], config.marginals[static_cast<std::size_t>(b)],
                  target, 200000, derive_seed(cj.value("matching_seed", std::uint64_t{12345}),
                                              static_cast<std::uint64_t>(a * dim + b)));
              g->correlation(a, b) = g->correlation(b, a) = r;
            }
          }
        }
      }
    }
    (void)config.joint();
    if (problem.contains("bounds")) {
      const auto& bounds = problem.at("bounds");
      if (!bounds.is_array() || static_cast<int>(bounds.size()) != dim) {
        throw ConfigError("problem.bounds must hold one [lo, hi] pair per input");
      }
      for (const auto& b : bounds) {
        if (!b.is_array() || b.size() != 2) {
          throw ConfigError("problem.bounds entries are [lo, hi]");
        }
        config.bounds.emplace_back(number(b[0], "bounds"), number(b[1], "bounds"));
        if (!(config.bounds.back().first < config.bounds.back().second)) {
          throw ConfigError("problem.bounds entries need lo < hi");
        }
      }
    } else {
      config.bounds = default_bounds(config.marginals);
    }
    config.kernels = parse_kernels(doc.contains("kernel") ? doc.at("kernel") : json::object(), config.marginals);

    if (doc.contains("design")) {
      const auto& d = doc.at("design");
      if (d.contains("csv")) {
        std::filesystem::path p = d.at("csv").get<std::string>();
        config.design.csv = p.is_relative() ? base_dir / p : p;
        if (!std::filesystem::exists(*config.design.csv)) {
          throw ConfigError("design file " + config.design.csv->string() + " does not exist");
        }
      }
      config.design.n = d.value("n", config.design.n);
      config.design.restarts = d.value("restarts", config.design.restarts);
      if (config.design.n < 2 || config.design.restarts < 1) {
        throw ConfigError("design needs n >= 2 and restarts >= 1");
      }
    }

    if (doc.contains("estimation")) {
      const auto& e = doc.at("estimation");
      auto& opt = config.estimation.options;
      opt.m = e.value("m", opt.m);
      opt.realizations = e.value("N_s", opt.realizations);
      opt.perturbations = e.value("K", opt.perturbations);
      opt.redraw_sample = e.value("redraw_sample", opt.redraw_sample);
      config.estimation.consistent = e.value("consistent", false);
      if (opt.m < 100 || opt.realizations < 2 || opt.perturbations < 1) {
        throw ConfigError("estimation needs m >= 100, N_s >= 2 and K >= 1");
      }
      if (e.contains("subsets")) {
        const auto& s = e.at("subsets");
        if (s.is_string()) {
          config.estimation.selection = s.get<std::string>();
          if (config.estimation.selection != "all" && config.estimation.selection != "all-first-order") {
            throw ConfigError("estimation.subsets must be \"all\", \"all-first-order\" or a list");
          }
        } else if (s.is_array()) {
          config.estimation.selection = "list";
          for (const auto& u : s) {
            config.estimation.subsets.push_back(parse_subset(u, dim));
          }
          if (config.estimation.subsets.empty()) {
            throw ConfigError("estimation.subsets list is empty");
          }
        } else {
          throw ConfigError("estimation.subsets must be a string or a list");
        }
      }
    }
    if (doc.contains("mle")) {
      const auto& m = doc.at("mle");
      config.mle.starts = m.value("starts", config.mle.starts);
      config.mle.max_iterations = m.value("max_iterations", config.mle.max_iterations);
      if (config.mle.starts < 1) {
        throw ConfigError("mle.starts must be positive");
      }
    }
    config.seed = doc.value("seed", config.seed);
    if (doc.contains("output_dir")) {
      std::filesystem::path p = doc.at("output_dir").get<std::string>();
      config.output_dir = p.is_relative() ? base_dir / p : p;
    }
    return config;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed configuration: ") + e.what());
  }
}

RunConfig load_run_config(const std::filesystem::path& path) {
  return parse_run_config(read_json(path), path.parent_path().empty() ? "." : path.parent_path());
}

std::vector<Subset> resolve_subsets(const EstimationConfig& estimation, int dim) {
  if (estimation.selection == "all-first-order") {
    return first_order_subsets(dim);
  }
  if (estimation.selection == "all") {
    if (dim > 4) {
      throw ConfigError("subsets \"all\" is limited to p <= 4 (got p = " + std::to_string(dim) + ")");
    }
    return all_subsets(dim);
  }
  for (const auto& u : estimation.subsets) {
    require_valid(u, dim);
  }
  return estimation.subsets;
}

json model_to_json(const FittedGP& model, const std::optional<double>& objective) {
  json kernels = json::array();
  for (const auto& k : model.kernel().components()) {
    kernels.push_back({{"kind", to_string(k.base().kind())},
                       {"theta", k.base().theta()},
                       {"centering", centering_json(k.centering())},
                       {"marginal", marginal_to_json(k.marginal())}});
  }
  json points = json::array();
  for (Eigen::Index i = 0; i < model.size(); ++i) {
    std::vector<double> row(static_cast<std::size_t>(model.dim()));
    for (int d = 0; d < model.dim(); ++d) {
      row[static_cast<std::size_t>(d)] = model.design().points(i, d);
    }
    points.push_back(row);
  }
  json bounds = json::array();
  for (const auto& [lo, hi] : model.design().bounds) {
    bounds.push_back({lo, hi});
  }
  json out{{"format", "anovagp-model"},
           {"version", 1},
           {"dim", model.dim()},
           {"kernel", kernels},
           {"sigma2", model.sigma2()},
           {"f0", model.f0()},
           {"relative_nugget", model.relative_nugget()},
           {"nugget", model.nugget()},
           {"design", {{"points", points}, {"bounds", bounds}}},
           {"y", std::vector<double>(model.y().data(), model.y().data() + model.y().size())}};
  if (objective) {
    out["objective"] = *objective;
  }
  return out;
}

FittedGP model_from_json(const json& j) {
  try {
    if (j.value("format", std::string()) != "anovagp-model") {
      throw ConfigError("not a model file");
    }
    const int dim = require(j, "dim", "model").get<int>();
    const auto& kernels = require(j, "kernel", "model");
    if (!kernels.is_array() || static_cast<int>(kernels.size()) != dim) {
      throw ConfigError("model kernel list does not match its dimension");
    }
    std::vector<CenteredKernel> components;
    for (const auto& k : kernels) {
      components.emplace_back(BaseKernel(parse_base_kind(require(k, "kind", "model kernel").get<std::string>()),
                                         number_at(k, "theta", "model kernel")),
                              parse_marginal(require(k, "marginal", "model kernel")),
                              parse_centering(require(k, "centering", "model kernel")));
    }
    const auto& design = require(j, "design", "model");
    const auto& points = require(design, "points", "model design");
    const auto& y = require(j, "y", "model");
    if (points.size() != y.size()) {
      throw DataError("model design and observations differ in length");
    }
    DesignSet ds{Eigen::MatrixXd(static_cast<Eigen::Index>(points.size()), dim), {}};
    for (std::size_t i = 0; i < points.size(); ++i) {
      if (static_cast<int>(points[i].size()) != dim) {
        throw DataError("model design row has the wrong length");
      }
      for (int d = 0; d < dim; ++d) {
        ds.points(static_cast<Eigen::Index>(i), d) = number(points[i][static_cast<std::size_t>(d)], "design");
      }
    }
    for (const auto& b : require(design, "bounds", "model design")) {
      ds.bounds.emplace_back(number(b[0], "bounds"), number(b[1], "bounds"));
    }
    Eigen::VectorXd obs(static_cast<Eigen::Index>(y.size()));
    for (std::size_t i = 0; i < y.size(); ++i) {
      obs[static_cast<Eigen::Index>(i)] = number(y[i], "y");
    }
    const double relative = number_at(j, "relative_nugget", "model");
    NuggetPolicy policy;
    policy.initial = relative;
    policy.maximum = std::max(relative, policy.maximum);
    FittedGP model(std::move(ds), std::move(obs),
                   AnovaKernel(number_at(j, "sigma2", "model"), std::move(components)),
                   number_at(j, "f0", "model"), policy);
    if (model.size() > 0 && model.relative_nugget() != relative) {
      throw NumericalError("stored nugget does not reproduce a positive-definite factorization");
    }
    return model;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed model file: ") + e.what());
  }
}

void save_model(const std::filesystem::path& path, const FittedGP& model, const std::optional<double>& objective) {
  write_json(path, model_to_json(model, objective));
}

FittedGP load_model(const std::filesystem::path& path) {
  return model_from_json(read_json(path));
}

} // namespace anovagp
