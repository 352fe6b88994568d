#pragma once

#include <map>
#include <string>
#include <vector>

#include "berest/harness.hpp"

namespace berest {

/// Per-estimator error summary. Errors are percentage points with the sign
/// convention E = 100*(BER - estimate): positive means underestimation.
struct ErrorSummary {
  std::string estimator_id;
  int count = 0;
  double mse = 0.0;       // percentage-points squared
  double bound_lo = 0.0;  // 2.5th percentile of E
  double bound_hi = 0.0;  // 97.5th percentile of E
  bool meets_5pp = false; // strict: bound_hi - bound_lo < 5.0
  bool low_confidence = false;  // fewer than 30 records
};

/// Signed errors in percentage points for one estimator across records.
std::vector<double> error_values(const std::vector<EstimateRecord>& records,
                                 const std::string& estimator_id);

/// Linear-interpolation percentile at rank 1 + q/100*(n-1) (inclusive).
double percentile(std::vector<double> values, double q);

ErrorSummary summarize(const std::vector<EstimateRecord>& records,
                       const std::string& estimator_id);

struct SummaryCell {
  std::string family;
  int d = 0;
  int n_per_class = 0;
  std::vector<ErrorSummary> estimators;  // all estimators present in the cell
  std::string best_estimator;            // lowest MSE, ties to lexicographic id
};

struct SummaryTable {
  std::vector<SummaryCell> cells;  // ordered by (family, d, n)
};

/// Group records by (family, d, n per class) and pick the best estimator per
/// cell. Family is recovered from the scenario id prefix.
SummaryTable best_estimator_table(const std::vector<EstimateRecord>& records);

std::string summary_to_csv(const SummaryTable& table);

/// Markdown grid per family: rows are sample counts, columns dimensions,
/// cells "best (lo, hi)" with sub-5pp ranges in bold.
std::string summary_to_markdown(const SummaryTable& table);

/// LOESS: local linear regression with tricube weights over the span
/// fraction, evaluated at the sample points. Degenerate neighborhoods fall
/// back to the local weighted mean.
std::vector<double> loess_fit(const std::vector<double>& x,
                              const std::vector<double>& y, double span = 0.3);

/// Scatter diagnostic for one estimator: CSV of (true BER, estimate, loess)
/// plus a self-contained SVG with the identity line and the LOESS curve.
/// Output bytes are deterministic for identical inputs.
void emit_plot(const std::vector<EstimateRecord>& records,
               const std::string& estimator_id, const std::string& csv_path,
               const std::string& svg_path, double span = 0.3);

}  // namespace berest
