#include "anovagp/conditional.hpp"

#include "anovagp/errors.hpp"
#include "anovagp/random.hpp"

namespace anovagp {

namespace {

// M = [T; D] with kernel embeddings.
EmbeddedPoints stack(const FittedGP& model, const Eigen::MatrixXd& T, const SamplerOptions& options) {
  if (T.cols() != model.dim()) {
    throw DataError("evaluation set has " + std::to_string(T.cols()) + " columns, model expects " +
                    std::to_string(model.dim()));
  }
  if (T.rows() < 1) {
    throw DataError("evaluation set is empty");
  }
  const Eigen::Index m = T.rows();
  const Eigen::Index n = model.size();
  if (m + n > options.max_block) {
    throw ConfigError("n + m = " + std::to_string(m + n) + " exceeds the sampler block limit " +
                      std::to_string(options.max_block));
  }
  const auto et = model.kernel().embed(T);
  const auto& ed = model.design_embedding();
  EmbeddedPoints out{Eigen::MatrixXd(m + n, model.dim()), Eigen::MatrixXd(m + n, model.dim())};
  out.points.topRows(m) = et.points;
  out.points.bottomRows(n) = ed.points;
  out.embeddings.topRows(m) = et.embeddings;
  out.embeddings.bottomRows(n) = ed.embeddings;
  return out;
}

// Column j of sigma2 prod_{d in u} k0_d (subset part) or of
// sigma2 [prod_d (1 + k0_d) - prod_{d in u} k0_d] (complement part) on M.
class StackedColumns {
public:
  StackedColumns(const AnovaKernel& kernel, const EmbeddedPoints& points, const Subset& u)
      : kernel_(kernel), points_(points), u_(u), scratch_(points.size()) {}

  void subset(Eigen::Index j, Eigen::Ref<Eigen::VectorXd> out) {
    out.setConstant(kernel_.sigma2());
    for (int d : u_.indices()) {
      centered(d, j);
      out.array() *= scratch_.array();
    }
  }

  void complement(Eigen::Index j, Eigen::Ref<Eigen::VectorXd> out) {
    Eigen::VectorXd part(points_.size());
    part.setConstant(kernel_.sigma2());
    out.setConstant(kernel_.sigma2());
    for (int d = 0; d < kernel_.dim(); ++d) {
      centered(d, j);
      out.array() *= 1.0 + scratch_.array();
      if (u_.contains(d)) {
        part.array() *= scratch_.array();
      }
    }
    out -= part;
  }

  Eigen::VectorXd subset_diagonal() const {
    Eigen::VectorXd diag(points_.size());
    for (Eigen::Index i = 0; i < points_.size(); ++i) {
      double v = kernel_.sigma2();
      for (int d : u_.indices()) {
        v *= kernel_.centered(d, points_, i, points_, i);
      }
      diag[i] = v;
    }
    return diag;
  }

  Eigen::VectorXd complement_diagonal() const {
    Eigen::VectorXd diag(points_.size());
    for (Eigen::Index i = 0; i < points_.size(); ++i) {
      double full = kernel_.sigma2();
      double part = kernel_.sigma2();
      for (int d = 0; d < kernel_.dim(); ++d) {
        const double k0 = kernel_.centered(d, points_, i, points_, i);
        full *= 1.0 + k0;
        if (u_.contains(d)) {
          part *= k0;
        }
      }
      diag[i] = full - part;
    }
    return diag;
  }

private:
  void centered(int d, Eigen::Index j) {
    for (Eigen::Index i = 0; i < points_.size(); ++i) {
      scratch_[i] = kernel_.centered(d, points_, i, points_, j);
    }
  }

  const AnovaKernel& kernel_;
  const EmbeddedPoints& points_;
  Subset u_;
  Eigen::VectorXd scratch_;
};

std::unique_ptr<PivotedCholesky> subset_factor(const FittedGP& model, const EmbeddedPoints& points,
                                               const Subset& u, double tolerance) {
  StackedColumns columns(model.kernel(), points, u);
  return std::make_unique<PivotedCholesky>(
      columns.subset_diagonal(),
      [&columns](Eigen::Index j, Eigen::Ref<Eigen::VectorXd> out) { columns.subset(j, out); },
      tolerance);
}

std::unique_ptr<PivotedCholesky> complement_factor(const FittedGP& model, const EmbeddedPoints& points,
                                                   const Subset& u, double tolerance) {
  StackedColumns columns(model.kernel(), points, u);
  return std::make_unique<PivotedCholesky>(
      columns.complement_diagonal(),
      [&columns](Eigen::Index j, Eigen::Ref<Eigen::VectorXd> out) { columns.complement(j, out); },
      tolerance);
}

// Relative to the largest prior variance on M, shared by every factor.
double absolute_scale(const FittedGP& model, const EmbeddedPoints& points) {
  double scale = 0.0;
  for (Eigen::Index i = 0; i < points.size(); ++i) {
    double v = model.sigma2();
    for (int d = 0; d < model.dim(); ++d) {
      v *= 1.0 + model.kernel().centered(d, points, i, points, i);
    }
    scale = std::max(scale, v);
  }
  return scale;
}

} // namespace

ComponentSampler::ComponentSampler(const FittedGP& model, const Subset& u, const Eigen::MatrixXd& T,
                                   const SamplerOptions& options)
    : model_(&model), u_(u) {
  require_valid(u, model.dim());
  const auto points = stack(model, T, options);
  const auto et = model.kernel().embed(T);
  mu_ = model.predictive_mean(T);
  mu_u_ = model.mean_component(u, T);
  k_td_ = model.kernel().gram(et, model.design_embedding());
  k_u_td_ = model.kernel().subset_gram(u, et, model.design_embedding());
  factor_u_ = subset_factor(model, points, u, options.rank_tolerance);
  factor_uc_ = complement_factor(model, points, u, options.rank_tolerance);
}

ComponentRealization ComponentSampler::draw(std::uint64_t seed) const {
  const Eigen::Index m = mu_.size();
  const Eigen::Index n = model_->size();
  Rng rng(seed);
  const Eigen::VectorXd eps_u = standard_normals(rng, m + n);
  const Eigen::VectorXd eps_uc = standard_normals(rng, m + n);
  const Eigen::VectorXd z_u = factor_u_->apply(eps_u);
  const Eigen::VectorXd z = z_u + factor_uc_->apply(eps_uc);
  const Eigen::VectorXd w = model_->solve(z.tail(n));
  ComponentRealization out;
  out.u = u_;
  out.seed = seed;
  out.f = mu_ - k_td_ * w + z.head(m);
  out.f_u = mu_u_ - k_u_td_ * w + z_u.head(m);
  out.f_uc = out.f - out.f_u;
  return out;
}

ComponentRealization sample_component_paths(const FittedGP& model, const Subset& u,
                                            const Eigen::MatrixXd& T, std::uint64_t seed,
                                            const SamplerOptions& options) {
  return ComponentSampler(model, u, T, options).draw(seed);
}

const Eigen::VectorXd& FullDecomposition::component(const Subset& u) const {
  for (std::size_t k = 0; k < subsets.size(); ++k) {
    if (subsets[k] == u) {
      return components[k];
    }
  }
  throw ConfigError("subset " + u.label() + " is not part of the decomposition");
}

FullDecompositionSampler::FullDecompositionSampler(const FittedGP& model, const Eigen::MatrixXd& T,
                                                   const SamplerOptions& options)
    : model_(&model) {
  if (model.dim() > 4) {
    throw ConfigError("full decomposition is limited to p <= 4 (got p = " +
                      std::to_string(model.dim()) + ")");
  }
  const auto points = stack(model, T, options);
  const auto et = model.kernel().embed(T);
  mu_ = model.predictive_mean(T);
  subsets_ = all_subsets(model.dim());
  // Tolerance relative to the full prior variance rather than each term's own.
  const double scale = absolute_scale(model, points);
  for (const auto& u : subsets_) {
    mu_u_.push_back(model.mean_component(u, T));
    k_u_td_.push_back(model.kernel().subset_gram(u, et, model.design_embedding()));
    StackedColumns columns(model.kernel(), points, u);
    const Eigen::VectorXd diag = columns.subset_diagonal();
    const double own = diag.maxCoeff();
    const double tolerance = own > 0.0 ? options.rank_tolerance * scale / own : 1.0;
    factors_.push_back(std::make_unique<PivotedCholesky>(
        diag, [&columns](Eigen::Index j, Eigen::Ref<Eigen::VectorXd> out) { columns.subset(j, out); },
        tolerance));
  }
}

FullDecomposition FullDecompositionSampler::draw(std::uint64_t seed) const {
  const Eigen::Index m = mu_.size();
  const Eigen::Index n = model_->size();
  const double sigma2 = model_->sigma2();
  Rng rng(seed);
  FullDecomposition out;
  out.seed = seed;
  out.subsets = subsets_;
  const double z0 = std::sqrt(sigma2) * standard_normal(rng);
  Eigen::VectorXd z = Eigen::VectorXd::Constant(m + n, z0);
  std::vector<Eigen::VectorXd> parts;
  parts.reserve(subsets_.size());
  for (const auto& factor : factors_) {
    parts.push_back(factor->apply(standard_normals(rng, m + n)));
    z += parts.back();
  }
  const Eigen::VectorXd w = model_->solve(z.tail(n));
  out.f0 = model_->mean_constant() - sigma2 * w.sum() + z0;
  out.f = Eigen::VectorXd::Constant(m, out.f0);
  for (std::size_t k = 0; k < subsets_.size(); ++k) {
    out.components.push_back(mu_u_[k] - k_u_td_[k] * w + parts[k].head(m));
    out.f += out.components.back();
  }
  return out;
}

FullDecomposition sample_full_decomposition(const FittedGP& model, const Eigen::MatrixXd& T,
                                            std::uint64_t seed, const SamplerOptions& options) {
  return FullDecompositionSampler(model, T, options).draw(seed);
}

} // namespace anovagp
