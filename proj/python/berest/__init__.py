"""Bayes error rate estimators and their Monte Carlo test bench."""

from berest._core import (
    GhpEstimate,
    KnnEstimate,
    ScenarioSpec,
    all_estimator_ids,
    bayes_classify,
    build_scenario,
    clakde_estimate,
    evaluate_estimators,
    gc_estimate,
    ghp_estimate,
    gkde_estimate,
    hp_divergence,
    knn_estimate,
    knn_loo_error,
    knn_lower_bound,
    loess_fit,
    log_pdf,
    mc_ber,
    naive_bayes_error,
    percentile,
    run_campaign,
    sample,
    silverman_bandwidth,
)

__all__ = [
    "GhpEstimate",
    "KnnEstimate",
    "ScenarioSpec",
    "all_estimator_ids",
    "bayes_classify",
    "build_scenario",
    "clakde_estimate",
    "evaluate_estimators",
    "gc_estimate",
    "ghp_estimate",
    "gkde_estimate",
    "hp_divergence",
    "knn_estimate",
    "knn_loo_error",
    "knn_lower_bound",
    "loess_fit",
    "log_pdf",
    "mc_ber",
    "naive_bayes_error",
    "percentile",
    "run_campaign",
    "sample",
    "silverman_bandwidth",
]
