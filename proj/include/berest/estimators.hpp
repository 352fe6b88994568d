#pragma once

#include <map>
#include <string>
#include <vector>

#include "berest/dataset.hpp"
#include "berest/scenario.hpp"

namespace berest {

/// Every estimator id the harness can emit. "bayes" is the oracle classifier
/// (it reads the scenario densities); everything else sees only the data.
const std::vector<std::string>& all_estimator_ids();

bool is_known_estimator(const std::string& id);

/// The paper's fixed GKDE bandwidth list.
const std::vector<double>& gkde_bandwidths();

/// Evaluate the requested estimators on one dataset. Shared work (the
/// pairwise distance matrix, the GHP bounds feeding GC) is computed once.
/// Throws if any estimator fails; the caller records the failure.
std::map<std::string, double> evaluate_estimators(
    const ScenarioSpec& spec, const LabeledDataset& dataset,
    const std::vector<std::string>& estimator_ids);

}  // namespace berest
