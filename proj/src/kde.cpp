#include "berest/kde.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace berest {

namespace {

constexpr double kLog2Pi = 1.8378770664093454835606594728112;
constexpr double kInf = std::numeric_limits<double>::infinity();

double logsumexp(const Eigen::Ref<const Eigen::VectorXd>& v) {
  const double mx = v.maxCoeff();
  if (!std::isfinite(mx)) return mx;  // all -inf
  return mx + std::log((v.array() - mx).exp().sum());
}

/// Everything adaptive_kde_fit derives, including the diagonal-shape
/// factorization (bandwidth_i = delta_i * ratio) used by the fast paths.
struct FittedAdaptive {
  AdaptiveDensityModel model;
  Eigen::VectorXd delta;  // per-point scale, floored
  Eigen::VectorXd ratio;  // per-dimension shape, floored
  double log_ratio_sum = 0.0;
};

Eigen::VectorXd dimension_spread(const Eigen::MatrixXd& points) {
  const Eigen::Index m = points.rows();
  Eigen::VectorXd mean = points.colwise().mean();
  Eigen::VectorXd var =
      (points.rowwise() - mean.transpose()).array().square().colwise().sum() /
      static_cast<double>(m - 1);
  return var.cwiseSqrt();
}

/// Leave-one-out log likelihood of the factorized model at global scale
/// `lambda`. `g` holds -scaled_d2(i, q) / (2 delta_i^2) with -inf on the
/// diagonal; `c` holds -d*log(delta_i). Single-precision exponentials keep
/// the scan fast; the objective is only used to pick the scale.
double loo_log_likelihood(const Eigen::MatrixXf& g, const Eigen::VectorXf& c,
                          double lambda, int d, double log_const) {
  const float inv_l2 = static_cast<float>(1.0 / (lambda * lambda));
  const Eigen::Index m = g.rows();
  double total = 0.0;
  Eigen::ArrayXf col(m);
  for (Eigen::Index q = 0; q < m; ++q) {
    col = g.col(q).array() * inv_l2 + c.array();  // col(q) is -inf
    const float mx = col.maxCoeff();
    const float sum = (col - mx).exp().sum();
    total += static_cast<double>(mx) + std::log(static_cast<double>(sum));
  }
  total -= static_cast<double>(m) *
           (d * std::log(lambda) + log_const +
            std::log(static_cast<double>(m - 1)));
  return total;
}

FittedAdaptive fit_internal(const Eigen::MatrixXd& points) {
  const Eigen::Index m = points.rows();
  const Eigen::Index d = points.cols();
  if (m < std::max<Eigen::Index>(4, d + 1))
    throw std::invalid_argument("adaptive_kde_fit: need at least max(4, d+1) points");

  const Eigen::VectorXd spread = dimension_spread(points);
  const double mean_spread = spread.mean();
  if (!(mean_spread > 0.0))
    throw std::invalid_argument("adaptive_kde_fit: degenerate (all-identical) points");

  FittedAdaptive fit;
  fit.ratio = (spread / mean_spread).cwiseMax(1e-6);
  fit.log_ratio_sum = fit.ratio.array().log().sum();

  // Scale seed: distance to the ceil(sqrt(m))-th neighbor.
  const Eigen::MatrixXd d2 = squared_distance_matrix(points);
  const int kth = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(m))));
  fit.delta.resize(m);
  std::vector<double> col(static_cast<std::size_t>(m));
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < m; ++j)
      col[static_cast<std::size_t>(j)] = d2(j, i);
    std::nth_element(col.begin(), col.begin() + kth, col.end());
    fit.delta(i) = std::max(std::sqrt(col[static_cast<std::size_t>(kth)]),
                            1e-9 * mean_spread);
  }

  // Shape-scaled coordinates make the per-point kernels a function of one
  // squared-distance matrix, so scale search costs O(m^2) per evaluation.
  const Eigen::MatrixXd scaled =
      points.array().rowwise() / fit.ratio.transpose().array();
  const Eigen::MatrixXd sd2 = squared_distance_matrix(scaled);
  Eigen::MatrixXf g(m, m);
  for (Eigen::Index q = 0; q < m; ++q)
    for (Eigen::Index i = 0; i < m; ++i)
      g(i, q) = static_cast<float>(-sd2(i, q) / (2.0 * fit.delta(i) * fit.delta(i)));
  g.diagonal().setConstant(-std::numeric_limits<float>::infinity());
  const Eigen::VectorXf c =
      (-static_cast<double>(d) * fit.delta.array().log()).cast<float>();

  const double log_const = fit.log_ratio_sum + 0.5 * d * kLog2Pi;
  const auto objective = [&](double lambda) {
    return loo_log_likelihood(g, c, lambda, static_cast<int>(d), log_const);
  };

  // Coarse octave scan, then golden-section refinement of the bracket.
  double best_log = 0.0;
  double best_val = -kInf;
  for (int j = -4; j <= 4; ++j) {
    const double lv = j * std::log(2.0);
    const double v = objective(std::exp(lv));
    if (v > best_val) {
      best_val = v;
      best_log = lv;
    }
  }
  double lo = best_log - std::log(2.0);
  double hi = best_log + std::log(2.0);
  const double gr = 0.6180339887498949;
  double x1 = hi - gr * (hi - lo);
  double x2 = lo + gr * (hi - lo);
  double f1 = objective(std::exp(x1));
  double f2 = objective(std::exp(x2));
  for (int it = 0; it < 18; ++it) {
    if (f1 >= f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - gr * (hi - lo);
      f1 = objective(std::exp(x1));
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + gr * (hi - lo);
      f2 = objective(std::exp(x2));
    }
  }
  const double lambda = std::exp(0.5 * (lo + hi));

  fit.model.refs = points;
  fit.model.scale = lambda;
  fit.model.bandwidths = fit.delta * fit.ratio.transpose();
  return fit;
}

/// Log mean density of `queries` under a fitted model, optionally with
/// leave-one-out self-scoring (queries must then be the reference set).
double log_mean_density(const FittedAdaptive& fit,
                        const Eigen::MatrixXd& queries, bool leave_one_out) {
  const Eigen::Index m = fit.model.refs.rows();
  const Eigen::Index nq = queries.rows();
  const Eigen::Index d = fit.model.refs.cols();
  const double lambda = fit.model.scale;

  const Eigen::MatrixXd refs_scaled =
      fit.model.refs.array().rowwise() / fit.ratio.transpose().array();
  const Eigen::MatrixXd q_scaled =
      queries.array().rowwise() / fit.ratio.transpose().array();
  Eigen::MatrixXd g = cross_squared_distances(refs_scaled, q_scaled);  // m x nq
  const Eigen::ArrayXd inv2d2 =
      1.0 / (2.0 * lambda * lambda * fit.delta.array().square());
  const Eigen::ArrayXd c = -static_cast<double>(d) * fit.delta.array().log();

  const double per_kernel_const = -static_cast<double>(d) * std::log(lambda) -
                                  fit.log_ratio_sum - 0.5 * d * kLog2Pi;
  const double count = static_cast<double>(leave_one_out ? m - 1 : m);

  Eigen::VectorXd logf(nq);
  Eigen::ArrayXd col(m);
  for (Eigen::Index q = 0; q < nq; ++q) {
    col = -g.col(q).array() * inv2d2 + c;
    if (leave_one_out) col(q) = -kInf;
    const double mx = col.maxCoeff();
    logf(q) = mx + std::log((col - mx).exp().sum()) + per_kernel_const -
              std::log(count);
  }
  return logsumexp(logf) - std::log(static_cast<double>(nq));
}

}  // namespace

double gaussian_kde_logpdf(const Eigen::VectorXd& query,
                           const Eigen::MatrixXd& refs, double h) {
  if (refs.rows() < 1)
    throw std::invalid_argument("gaussian_kde_logpdf: need at least one reference");
  if (!(h > 0.0)) throw std::invalid_argument("gaussian_kde_logpdf: h must be positive");
  const Eigen::Index d = refs.cols();
  if (query.size() != d)
    throw std::invalid_argument("gaussian_kde_logpdf: dimension mismatch");

  const Eigen::VectorXd exponents =
      (refs.rowwise() - query.transpose()).rowwise().squaredNorm() *
      (-0.5 / (h * h));
  return logsumexp(exponents) - std::log(static_cast<double>(refs.rows())) -
         d * std::log(h) - 0.5 * d * kLog2Pi;
}

double silverman_bandwidth(const Eigen::MatrixXd& points) {
  const Eigen::Index m = points.rows();
  const Eigen::Index d = points.cols();
  if (m < 2) throw std::invalid_argument("silverman_bandwidth: need at least 2 points");
  const double pooled = dimension_spread(points).mean();
  if (!(pooled > 0.0))
    throw std::invalid_argument("silverman_bandwidth: zero-variance input");
  const double exponent = -1.0 / (d + 4.0);
  return std::pow(4.0 / (d + 2.0), -exponent) *
         std::pow(static_cast<double>(m), exponent) * pooled;
}

double gkde_estimate(const LabeledDataset& dataset, double h) {
  return gkde_estimate(dataset, h, squared_distance_matrix(dataset.x));
}

double gkde_estimate(const LabeledDataset& dataset, double h,
                     const Eigen::MatrixXd& d2) {
  if (!(h > 0.0)) throw std::invalid_argument("gkde_estimate: h must be positive");
  const Eigen::Index n = dataset.n();
  const Eigen::Index na = dataset.count(ClassLabel::A);
  const Eigen::Index nb = n - na;
  if (na == 0 || nb == 0)
    throw std::invalid_argument("gkde_estimate: both classes must be nonempty");
  if (d2.rows() != n || d2.cols() != n)
    throw std::invalid_argument("gkde_estimate: distance matrix shape mismatch");

  // Work in a class-blocked layout so per-class reductions run down
  // contiguous column segments. The score sum is order-invariant.
  bool blocked = true;
  for (Eigen::Index i = 0; i + 1 < n && blocked; ++i)
    blocked = !(dataset.labels[static_cast<std::size_t>(i)] == ClassLabel::B &&
                dataset.labels[static_cast<std::size_t>(i + 1)] == ClassLabel::A);
  Eigen::MatrixXd permuted;
  const Eigen::MatrixXd* dist = &d2;
  if (!blocked) {
    std::vector<Eigen::Index> order = dataset.indices_of(ClassLabel::A);
    const auto bs = dataset.indices_of(ClassLabel::B);
    order.insert(order.end(), bs.begin(), bs.end());
    permuted.resize(n, n);
    for (Eigen::Index r = 0; r < n; ++r)
      for (Eigen::Index cidx = 0; cidx < n; ++cidx)
        permuted(r, cidx) = d2(order[static_cast<std::size_t>(r)],
                               order[static_cast<std::size_t>(cidx)]);
    dist = &permuted;
  }

  const double scale = -0.5 / (h * h);
  Eigen::VectorXd log_score_a(n), log_score_b(n);
  Eigen::ArrayXd tmp(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto col = dist->col(i);
    const auto seg_a = col.head(na).array();
    const auto seg_b = col.tail(nb).array();
    const double max_a = seg_a.minCoeff() * scale;  // scale < 0 flips min/max
    const double max_b = seg_b.minCoeff() * scale;
    log_score_a(i) = max_a + std::log((seg_a * scale - max_a).exp().sum());
    log_score_b(i) = max_b + std::log((seg_b * scale - max_b).exp().sum());
  }

  const double denom_a = logsumexp(log_score_a);
  const double denom_b = logsumexp(log_score_b);
  const double prior_a = static_cast<double>(na) / static_cast<double>(n);
  const double prior_b = static_cast<double>(nb) / static_cast<double>(n);

  double total = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double sa = std::exp(log_score_a(i) - denom_a) * prior_a;
    const double sb = std::exp(log_score_b(i) - denom_b) * prior_b;
    total += std::max(sa, sb);
  }
  return std::clamp(1.0 - total, 0.0, 1.0);
}

AdaptiveDensityModel adaptive_kde_fit(const Eigen::MatrixXd& points) {
  return fit_internal(points).model;
}

double adaptive_kde_logpdf(const AdaptiveDensityModel& model,
                           const Eigen::VectorXd& query,
                           std::optional<Eigen::Index> exclude) {
  const Eigen::Index m = model.refs.rows();
  const Eigen::Index d = model.refs.cols();
  if (query.size() != d)
    throw std::invalid_argument("adaptive_kde_logpdf: dimension mismatch");
  if (exclude && (*exclude < 0 || *exclude >= m))
    throw std::invalid_argument("adaptive_kde_logpdf: exclude index out of range");
  if (exclude && m < 2)
    throw std::invalid_argument("adaptive_kde_logpdf: cannot exclude the only reference");

  Eigen::VectorXd terms(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    if (exclude && *exclude == i) {
      terms(i) = -kInf;
      continue;
    }
    double z2 = 0.0;
    double log_h = 0.0;
    for (Eigen::Index c = 0; c < d; ++c) {
      const double hh = model.scale * model.bandwidths(i, c);
      const double z = (query(c) - model.refs(i, c)) / hh;
      z2 += z * z;
      log_h += std::log(hh);
    }
    terms(i) = -0.5 * z2 - log_h;
  }
  const double count = static_cast<double>(exclude ? m - 1 : m);
  return logsumexp(terms) - 0.5 * d * kLog2Pi - std::log(count);
}

double clakde_estimate(const LabeledDataset& dataset) {
  const Eigen::MatrixXd pts_a = dataset.rows_of(ClassLabel::A);
  const Eigen::MatrixXd pts_b = dataset.rows_of(ClassLabel::B);
  const FittedAdaptive fit_a = fit_internal(pts_a);
  const FittedAdaptive fit_b = fit_internal(pts_b);

  const double g_aa = log_mean_density(fit_a, pts_a, true);
  const double g_bb = log_mean_density(fit_b, pts_b, true);
  const double g_ab = log_mean_density(fit_b, pts_a, false);  // A scored on B's model
  const double g_ba = log_mean_density(fit_a, pts_b, false);

  Eigen::Vector2d cross(g_ab, g_ba), self(g_aa, g_bb);
  const double log_j = logsumexp(cross) - logsumexp(self);
  const double j = std::clamp(std::exp(log_j), 0.0, 1.0);
  return j / 2.0;
}

double gc_estimate(double ghp_lower, double clakde) {
  if (!(ghp_lower >= 0.0 && ghp_lower <= 0.5) ||
      !(clakde >= 0.0 && clakde <= 0.5))
    throw std::invalid_argument("gc_estimate: inputs must be in [0, 0.5]");
  return 0.5 * (ghp_lower + clakde);
}

double naive_bayes_error(const LabeledDataset& dataset) {
  const Eigen::Index n = dataset.n();
  const Eigen::Index d = dataset.dim();
  const Eigen::MatrixXd pts_a = dataset.rows_of(ClassLabel::A);
  const Eigen::MatrixXd pts_b = dataset.rows_of(ClassLabel::B);
  if (pts_a.rows() < 2 || pts_b.rows() < 2)
    throw std::invalid_argument("naive_bayes_error: need >= 2 points per class");

  auto moments = [d](const Eigen::MatrixXd& pts, Eigen::VectorXd& mean,
                     Eigen::VectorXd& var) {
    mean = pts.colwise().mean();
    var = (pts.rowwise() - mean.transpose()).array().square().colwise().sum() /
          static_cast<double>(pts.rows());
    for (Eigen::Index c = 0; c < d; ++c) {
      if (!(var(c) >= 0.0))
        throw std::runtime_error("naive_bayes_error: degenerate variance");
      var(c) = std::max(var(c), 1e-9);
    }
  };
  Eigen::VectorXd mean_a, var_a, mean_b, var_b;
  moments(pts_a, mean_a, var_a);
  moments(pts_b, mean_b, var_b);

  const double log_prior_a =
      std::log(static_cast<double>(pts_a.rows()) / static_cast<double>(n));
  const double log_prior_b =
      std::log(static_cast<double>(pts_b.rows()) / static_cast<double>(n));
  const double const_a = -0.5 * var_a.array().log().sum() - 0.5 * d * kLog2Pi;
  const double const_b = -0.5 * var_b.array().log().sum() - 0.5 * d * kLog2Pi;

  long wrong = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto row = dataset.x.row(i).transpose().array();
    const double score_a =
        log_prior_a + const_a -
        0.5 * ((row - mean_a.array()).square() / var_a.array()).sum();
    const double score_b =
        log_prior_b + const_b -
        0.5 * ((row - mean_b.array()).square() / var_b.array()).sum();
    const ClassLabel predicted =
        score_b > score_a ? ClassLabel::B : ClassLabel::A;
    wrong += (predicted != dataset.labels[static_cast<std::size_t>(i)]);
  }
  return static_cast<double>(wrong) / static_cast<double>(n);
}

}  // namespace berest
