#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "anovagp/distributions.hpp"
#include "anovagp/gp.hpp"
#include "anovagp/sensitivity.hpp"

namespace anovagp {

struct DesignConfig {
  Eigen::Index n = 150;
  int restarts = 5;
  std::optional<std::filesystem::path> csv;
};

struct EstimationConfig {
  EstimationOptions options;
  /// "all-first-order", "all" or "list".
  std::string selection = "all-first-order";
  std::vector<Subset> subsets;
  /// Joint draw of every component (p <= 4) instead of one sampler per index.
  bool consistent = false;
};

/// Parsed JSON run configuration. Indices in the file are 1-based.
struct RunConfig {
  std::vector<Marginal> marginals;
  Copula copula = IndependentCopula{};
  std::vector<Bounds> bounds;
  std::vector<KernelSpec> kernels;
  DesignConfig design;
  EstimationConfig estimation;
  MleOptions mle;
  std::uint64_t seed = 1;
  std::filesystem::path output_dir = ".";

  int dim() const { return static_cast<int>(marginals.size()); }
  JointDistribution joint() const { return JointDistribution(marginals, copula); }
};

/// Relative paths inside the document resolve against `base_dir`.
/// Throws ConfigError on schema violations.
RunConfig parse_run_config(const nlohmann::json& doc, const std::filesystem::path& base_dir = ".");
RunConfig load_run_config(const std::filesystem::path& path);

/// Subsets selected by the estimation section; "all" is limited to p <= 4.
std::vector<Subset> resolve_subsets(const EstimationConfig& estimation, int dim);

Marginal parse_marginal(const nlohmann::json& j);
nlohmann::json marginal_to_json(const Marginal& marginal);
Copula parse_copula(const nlohmann::json& j, int dim);
std::vector<KernelSpec> parse_kernels(const nlohmann::json& j, const std::vector<Marginal>& marginals);

/// Model file: hyperparameters, kernel family, design, observations and
/// nugget. Loading refactorizes K_n and checks the nugget is reproduced.
nlohmann::json model_to_json(const FittedGP& model, const std::optional<double>& objective = {});
FittedGP model_from_json(const nlohmann::json& j);
void save_model(const std::filesystem::path& path, const FittedGP& model,
                const std::optional<double>& objective = {});
FittedGP load_model(const std::filesystem::path& path);

} // namespace anovagp
