#pragma once

#include <optional>
#include <vector>

#include "berest/dataset.hpp"

namespace berest {

/// Log density of a fixed-bandwidth Gaussian KDE at `query`:
/// log[ m^-1 h^-d sum_i K((query - ref_i)/h) ] with the standard normal
/// kernel, evaluated with log-sum-exp.
double gaussian_kde_logpdf(const Eigen::VectorXd& query,
                           const Eigen::MatrixXd& refs, double h);

/// Silverman's rule with the multivariate factor (4/(d+2))^(1/(d+4)) applied
/// to the mean per-dimension sample standard deviation.
double silverman_bandwidth(const Eigen::MatrixXd& points);

/// GKDE BER estimate: per-class KDE scores normalized over the whole
/// dataset, prior-weighted maximum per point.
double gkde_estimate(const LabeledDataset& dataset, double h);

/// As above but reusing a precomputed squared-distance matrix over the
/// dataset rows (shared across bandwidths within one simulation).
double gkde_estimate(const LabeledDataset& dataset, double h,
                     const Eigen::MatrixXd& d2);

/// KDE with one diagonal bandwidth vector per reference point and a global
/// scale chosen by leave-one-out likelihood.
struct AdaptiveDensityModel {
  Eigen::MatrixXd refs;        // m x d
  Eigen::MatrixXd bandwidths;  // m x d, strictly positive, before `scale`
  double scale = 1.0;
  ClassLabel label = ClassLabel::A;
};

/// Fit an adaptive model: per-point bandwidths from the ceil(sqrt(m))-th
/// neighbor distance shaped by the per-dimension spread, then a global scale
/// multiplier maximizing the leave-one-out log likelihood (grid scan plus
/// golden-section refinement; fully deterministic).
AdaptiveDensityModel adaptive_kde_fit(const Eigen::MatrixXd& points);

/// Log density of the adaptive mixture at `query`. When `exclude` names a
/// reference point it is left out and the mixture renormalizes over m-1.
double adaptive_kde_logpdf(const AdaptiveDensityModel& model,
                           const Eigen::VectorXd& query,
                           std::optional<Eigen::Index> exclude = std::nullopt);

/// Comparative adaptive-KDE estimate: fit one model per class, score each
/// class against itself (leave-one-out) and against the other, form the
/// similarity ratio J in the log domain, clamp to [0, 1], return J/2.
double clakde_estimate(const LabeledDataset& dataset);

/// Mean of the GHP lower bound and the CLAKDE estimate.
double gc_estimate(double ghp_lower, double clakde);

/// Training error of a Gaussian Naive Bayes classifier fit on the dataset
/// (ML per-class, per-feature moments, variances floored at 1e-9, priors
/// from class counts; posterior ties go to A).
double naive_bayes_error(const LabeledDataset& dataset);

}  // namespace berest
