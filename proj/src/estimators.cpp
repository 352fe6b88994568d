#include "berest/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "berest/ghp.hpp"
#include "berest/ground_truth.hpp"
#include "berest/kde.hpp"
#include "berest/knn.hpp"

namespace berest {

namespace {

std::string gkde_id(double h) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "gkde_h%g", h);
  return buf;
}

bool wants(const std::vector<std::string>& ids, const std::string& id) {
  return std::find(ids.begin(), ids.end(), id) != ids.end();
}

/// Prefix failures with the estimator id so campaign failure logs name the
/// culprit.
template <typename Fn>
auto with_context(const char* id, Fn&& fn) {
  try {
    return fn();
  } catch (const std::exception& e) {
    throw std::runtime_error(std::string(id) + ": " + e.what());
  }
}

}  // namespace

const std::vector<double>& gkde_bandwidths() {
  static const std::vector<double> hs = {0.0025, 0.05, 0.1, 0.25, 0.5};
  return hs;
}

const std::vector<std::string>& all_estimator_ids() {
  static const std::vector<std::string> ids = [] {
    std::vector<std::string> v = {"bayes",  "knn_L", "knn_M", "knn_H",
                                  "ghp_L",  "ghp_M", "ghp_H"};
    for (double h : gkde_bandwidths()) v.push_back(gkde_id(h));
    v.push_back("gkde_silverman");
    v.push_back("clakde");
    v.push_back("gc");
    v.push_back("nb");
    return v;
  }();
  return ids;
}

bool is_known_estimator(const std::string& id) {
  return wants(all_estimator_ids(), id);
}

std::map<std::string, double> evaluate_estimators(
    const ScenarioSpec& spec, const LabeledDataset& dataset,
    const std::vector<std::string>& estimator_ids) {
  for (const auto& id : estimator_ids)
    if (!is_known_estimator(id))
      throw std::invalid_argument("unknown estimator id: " + id);

  std::map<std::string, double> out;

  const bool want_knn =
      wants(estimator_ids, "knn_L") || wants(estimator_ids, "knn_M") ||
      wants(estimator_ids, "knn_H");
  const bool want_ghp =
      wants(estimator_ids, "ghp_L") || wants(estimator_ids, "ghp_M") ||
      wants(estimator_ids, "ghp_H") || wants(estimator_ids, "gc");
  const bool want_clakde =
      wants(estimator_ids, "clakde") || wants(estimator_ids, "gc");
  bool want_gkde = wants(estimator_ids, "gkde_silverman");
  for (double h : gkde_bandwidths()) want_gkde |= wants(estimator_ids, gkde_id(h));

  // One distance matrix feeds kNN and every GKDE bandwidth.
  Eigen::MatrixXd d2;
  if (want_knn || want_gkde) d2 = squared_distance_matrix(dataset.x);

  if (wants(estimator_ids, "bayes")) {
    const auto predicted = bayes_classify_batch(spec, dataset.x);
    long wrong = 0;
    for (Eigen::Index i = 0; i < dataset.n(); ++i)
      wrong += (predicted[static_cast<std::size_t>(i)] !=
                dataset.labels[static_cast<std::size_t>(i)]);
    out["bayes"] = static_cast<double>(wrong) / static_cast<double>(dataset.n());
  }

  if (want_knn) {
    const KnnEstimate e =
        with_context("knn", [&] { return knn_estimate(dataset, default_k_range()); });
    if (wants(estimator_ids, "knn_H")) out["knn_H"] = e.upper;
    if (wants(estimator_ids, "knn_M")) out["knn_M"] = e.mid;
    if (wants(estimator_ids, "knn_L")) out["knn_L"] = e.lower;
  }

  double ghp_lower = 0.0;
  if (want_ghp) {
    const GhpEstimate e = with_context("ghp", [&] { return ghp_estimate(dataset); });
    ghp_lower = e.lower;
    if (wants(estimator_ids, "ghp_H")) out["ghp_H"] = e.upper;
    if (wants(estimator_ids, "ghp_M")) out["ghp_M"] = e.mid;
    if (wants(estimator_ids, "ghp_L")) out["ghp_L"] = e.lower;
  }

  if (want_gkde) {
    for (double h : gkde_bandwidths()) {
      const std::string id = gkde_id(h);
      if (wants(estimator_ids, id))
        out[id] = with_context(id.c_str(),
                               [&] { return gkde_estimate(dataset, h, d2); });
    }
    if (wants(estimator_ids, "gkde_silverman"))
      out["gkde_silverman"] = with_context("gkde_silverman", [&] {
        return gkde_estimate(dataset, silverman_bandwidth(dataset.x), d2);
      });
  }

  double clakde = 0.0;
  if (want_clakde) {
    clakde = with_context("clakde", [&] { return clakde_estimate(dataset); });
    if (wants(estimator_ids, "clakde")) out["clakde"] = clakde;
  }
  if (wants(estimator_ids, "gc")) out["gc"] = gc_estimate(ghp_lower, clakde);

  if (wants(estimator_ids, "nb"))
    out["nb"] = with_context("nb", [&] { return naive_bayes_error(dataset); });

  for (const auto& [id, value] : out)
    if (!std::isfinite(value))
      throw std::runtime_error("estimator " + id + " produced a non-finite value");
  return out;
}

}  // namespace berest
