#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "berest/dataset.hpp"
#include "berest/rng.hpp"

namespace berest {

enum class Family { GvG, TvT, TvS, SvS };

const char* family_name(Family f);
Family family_from_name(const std::string& name);

/// A fully parameterized two-class distribution pair. Mixture centers are
/// frozen at construction so the ground-truth search and every simulation
/// drawing from the scenario see the same distribution.
struct ScenarioSpec {
  Family family = Family::GvG;
  int d = 1;
  double mu = 0.0;
  double var_a = 0.0;
  double var_b = 0.0;
  double r_a = 0.0;
  double r_b = 0.0;
  Eigen::MatrixXd centers_a;  // rows are centers
  Eigen::MatrixXd centers_b;
  std::vector<double> weights_a;
  std::vector<double> weights_b;
  std::string scenario_id;

  const Eigen::MatrixXd& centers(ClassLabel c) const {
    return c == ClassLabel::A ? centers_a : centers_b;
  }
  const std::vector<double>& weights(ClassLabel c) const {
    return c == ClassLabel::A ? weights_a : weights_b;
  }
  double variance(ClassLabel c) const {
    return c == ClassLabel::A ? var_a : var_b;
  }
};

/// Centers placed uniformly at random on the radius-`radius` sphere
/// (normalized isotropic Gaussian draws). Deterministic given the stream.
Eigen::MatrixXd hypersphere_centers(int d, double radius, int count,
                                    RngStream& rng);

/// Construct a scenario of the given family. `r_a` is only read for SvS;
/// TvS and SvS consume `center_rng` for sphere-center placement and the
/// +/-2 jitter on the sphere-center counts.
ScenarioSpec build_scenario(Family family, int d, double mu, double var_a,
                            double var_b, double r_a, RngStream& center_rng);

/// Draw `count` i.i.d. points from one class: pick a mixture center by the
/// class weights, add isotropic Gaussian noise.
Eigen::MatrixXd sample(const ScenarioSpec& spec, ClassLabel label, int count,
                       RngStream& rng);

/// Exact log density of one class at x (log-sum-exp over mixture centers).
double log_pdf(const ScenarioSpec& spec, ClassLabel label,
               const Eigen::VectorXd& x);

/// Log density of one class at every row of `points`.
Eigen::VectorXd log_pdf_batch(const ScenarioSpec& spec, ClassLabel label,
                              const Eigen::MatrixXd& points);

std::string scenario_to_json(const ScenarioSpec& spec);
ScenarioSpec scenario_from_json(const std::string& text);

}  // namespace berest
