#include "berest/reporting.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <tuple>

namespace berest {

namespace {

std::string family_of(const EstimateRecord& r) {
  const auto pos = r.scenario_id.find('-');
  return pos == std::string::npos ? r.scenario_id : r.scenario_id.substr(0, pos);
}

std::string format_num(double v, int precision = 6) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.*g", precision, v);
  return buf;
}

}  // namespace

std::vector<double> error_values(const std::vector<EstimateRecord>& records,
                                 const std::string& estimator_id) {
  if (records.empty())
    throw std::invalid_argument("error_values: no records");
  std::vector<double> out;
  out.reserve(records.size());
  for (const auto& r : records) {
    const auto it = r.estimates.find(estimator_id);
    if (it == r.estimates.end())
      throw std::invalid_argument("error_values: estimator " + estimator_id +
                                  " missing from record");
    out.push_back(100.0 * r.true_ber - 100.0 * it->second);
  }
  return out;
}

double percentile(std::vector<double> values, double q) {
  if (values.empty()) throw std::invalid_argument("percentile: empty input");
  if (q < 0.0 || q > 100.0)
    throw std::invalid_argument("percentile: q must be in [0, 100]");
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  const double rank = 1.0 + q / 100.0 * static_cast<double>(n - 1);
  const std::size_t lo = static_cast<std::size_t>(std::floor(rank));
  const double frac = rank - static_cast<double>(lo);
  if (lo >= n) return values[n - 1];
  const double base = values[lo - 1];
  if (frac == 0.0 || lo == n) return base;
  return base + frac * (values[lo] - base);
}

ErrorSummary summarize(const std::vector<EstimateRecord>& records,
                       const std::string& estimator_id) {
  auto errors = error_values(records, estimator_id);
  ErrorSummary s;
  s.estimator_id = estimator_id;
  s.count = static_cast<int>(errors.size());
  s.low_confidence = s.count < 30;
  // Accumulate in sorted order so the summary is exactly permutation
  // invariant, not just up to rounding.
  std::sort(errors.begin(), errors.end());
  double sum_sq = 0.0;
  for (double e : errors) sum_sq += e * e;
  s.mse = sum_sq / static_cast<double>(errors.size());
  s.bound_lo = percentile(errors, 2.5);
  s.bound_hi = percentile(errors, 97.5);
  s.meets_5pp = (s.bound_hi - s.bound_lo) < 5.0;
  return s;
}

SummaryTable best_estimator_table(const std::vector<EstimateRecord>& records) {
  std::map<std::tuple<std::string, int, int>, std::vector<EstimateRecord>> cells;
  for (const auto& r : records)
    cells[{family_of(r), r.d, r.n_per_class}].push_back(r);

  SummaryTable table;
  for (const auto& [key, cell_records] : cells) {
    SummaryCell cell;
    cell.family = std::get<0>(key);
    cell.d = std::get<1>(key);
    cell.n_per_class = std::get<2>(key);

    std::set<std::string> ids;
    for (const auto& r : cell_records)
      for (const auto& [id, value] : r.estimates) ids.insert(id);

    double best_mse = 0.0;
    for (const auto& id : ids) {
      const ErrorSummary s = summarize(cell_records, id);
      // std::set iterates in lexicographic order, so on MSE ties the first
      // (lexicographically smallest) id is kept.
      if (cell.best_estimator.empty() || s.mse < best_mse) {
        best_mse = s.mse;
        cell.best_estimator = id;
      }
      cell.estimators.push_back(s);
    }
    table.cells.push_back(std::move(cell));
  }
  return table;
}

std::string summary_to_csv(const SummaryTable& table) {
  std::ostringstream out;
  out << "family,d,n_per_class,estimator,count,mse,bound_lo,bound_hi,"
         "meets_5pp,best\n";
  for (const auto& cell : table.cells) {
    for (const auto& s : cell.estimators) {
      out << cell.family << ',' << cell.d << ',' << cell.n_per_class << ','
          << s.estimator_id << ',' << s.count << ',' << format_num(s.mse) << ','
          << format_num(s.bound_lo) << ',' << format_num(s.bound_hi) << ','
          << (s.meets_5pp ? 1 : 0) << ','
          << (s.estimator_id == cell.best_estimator ? 1 : 0) << '\n';
    }
  }
  return out.str();
}

std::string summary_to_markdown(const SummaryTable& table) {
  // family -> (n -> (d -> cell))
  std::map<std::string, std::map<int, std::map<int, const SummaryCell*>>> grid;
  std::map<std::string, std::set<int>> dims;
  for (const auto& cell : table.cells) {
    grid[cell.family][cell.n_per_class][cell.d] = &cell;
    dims[cell.family].insert(cell.d);
  }

  std::ostringstream out;
  for (const auto& [family, rows] : grid) {
    out << "## " << family << ": best estimator by MSE\n\n";
    out << "| n \\\\ d |";
    for (int d : dims[family]) out << ' ' << d << " |";
    out << "\n|---|";
    for (std::size_t i = 0; i < dims[family].size(); ++i) out << "---|";
    out << "\n";
    for (const auto& [n, by_d] : rows) {
      out << "| " << n << " |";
      for (int d : dims[family]) {
        const auto it = by_d.find(d);
        if (it == by_d.end()) {
          out << "  |";
          continue;
        }
        const SummaryCell& cell = *it->second;
        const auto best = std::find_if(
            cell.estimators.begin(), cell.estimators.end(),
            [&](const ErrorSummary& s) {
              return s.estimator_id == cell.best_estimator;
            });
        char buf[96];
        std::snprintf(buf, sizeof(buf), "%s (%.1f, %.1f)",
                      cell.best_estimator.c_str(), best->bound_lo,
                      best->bound_hi);
        if (best->meets_5pp)
          out << " **" << buf << "** |";
        else
          out << ' ' << buf << " |";
      }
      out << "\n";
    }
    out << "\n";
  }
  return out.str();
}

std::vector<double> loess_fit(const std::vector<double>& x,
                              const std::vector<double>& y, double span) {
  const std::size_t n = x.size();
  if (n != y.size()) throw std::invalid_argument("loess_fit: size mismatch");
  if (n < 10) throw std::invalid_argument("loess_fit: need at least 10 points");
  if (!(span > 0.0 && span <= 1.0))
    throw std::invalid_argument("loess_fit: span must be in (0, 1]");

  const std::size_t q = std::max<std::size_t>(
      2, static_cast<std::size_t>(std::ceil(span * static_cast<double>(n))));

  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });

  std::vector<double> fitted(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double x0 = x[i];
    // Window of the q nearest x values (two-pointer over the sorted order).
    auto pos = std::lower_bound(order.begin(), order.end(), x0,
                                [&](std::size_t a, double v) { return x[a] < v; });
    std::size_t lo = static_cast<std::size_t>(pos - order.begin());
    std::size_t hi = lo;  // window is [lo, hi)
    while (hi - lo < q) {
      if (lo == 0) ++hi;
      else if (hi == n) --lo;
      else if (x0 - x[order[lo - 1]] <= x[order[hi]] - x0) --lo;
      else ++hi;
    }
    double dmax = 0.0;
    for (std::size_t j = lo; j < hi; ++j)
      dmax = std::max(dmax, std::abs(x[order[j]] - x0));

    double sw = 0, swx = 0, swy = 0, swxx = 0, swxy = 0;
    for (std::size_t j = lo; j < hi; ++j) {
      const std::size_t idx = order[j];
      double w = 1.0;
      if (dmax > 0.0) {
        const double u = std::abs(x[idx] - x0) / dmax;
        const double t = 1.0 - u * u * u;
        w = t * t * t;
      }
      sw += w;
      swx += w * x[idx];
      swy += w * y[idx];
      swxx += w * x[idx] * x[idx];
      swxy += w * x[idx] * y[idx];
    }
    const double denom = sw * swxx - swx * swx;
    if (sw <= 0.0) {
      fitted[i] = y[i];
    } else if (std::abs(denom) < 1e-12 * std::max(1.0, sw * swxx)) {
      fitted[i] = swy / sw;  // constant-x neighborhood
    } else {
      const double slope = (sw * swxy - swx * swy) / denom;
      const double intercept = (swy - slope * swx) / sw;
      fitted[i] = intercept + slope * x0;
    }
  }
  return fitted;
}

void emit_plot(const std::vector<EstimateRecord>& records,
               const std::string& estimator_id, const std::string& csv_path,
               const std::string& svg_path, double span) {
  if (records.empty()) throw std::invalid_argument("emit_plot: no records");

  std::vector<double> x, y;
  x.reserve(records.size());
  y.reserve(records.size());
  for (const auto& r : records) {
    const auto it = r.estimates.find(estimator_id);
    if (it == r.estimates.end())
      throw std::invalid_argument("emit_plot: estimator " + estimator_id +
                                  " missing from record");
    x.push_back(r.true_ber);
    y.push_back(it->second);
  }
  const auto smooth = loess_fit(x, y, span);

  {
    std::ofstream csv(csv_path);
    if (!csv) throw std::runtime_error("emit_plot: cannot open " + csv_path);
    csv << "true_ber,estimate,loess\n";
    char line[160];
    for (std::size_t i = 0; i < x.size(); ++i) {
      std::snprintf(line, sizeof(line), "%.17g,%.17g,%.17g\n", x[i], y[i],
                    smooth[i]);
      csv << line;
    }
  }

  // Fixed 640x480 canvas; data mapped over [0, 0.5] on both axes.
  const double w = 640, h = 480, m = 48;
  auto px = [&](double v) { return m + v / 0.5 * (w - 2 * m); };
  auto py = [&](double v) { return h - m - v / 0.5 * (h - 2 * m); };

  std::vector<std::size_t> order(x.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });

  std::ofstream svg(svg_path);
  if (!svg) throw std::runtime_error("emit_plot: cannot open " + svg_path);
  char buf[256];
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" "
         "height=\"480\" viewBox=\"0 0 640 480\">\n";
  svg << "<rect width=\"640\" height=\"480\" fill=\"white\"/>\n";
  std::snprintf(buf, sizeof(buf),
                "<line x1=\"%.2f\" y1=\"%.2f\" x2=\"%.2f\" y2=\"%.2f\" "
                "stroke=\"black\" stroke-width=\"1\"/>\n",
                px(0.0), py(0.0), px(0.5), py(0.5));
  svg << buf;
  for (std::size_t i = 0; i < x.size(); ++i) {
    std::snprintf(buf, sizeof(buf),
                  "<circle cx=\"%.2f\" cy=\"%.2f\" r=\"2\" fill=\"steelblue\" "
                  "fill-opacity=\"0.5\"/>\n",
                  px(x[i]), py(y[i]));
    svg << buf;
  }
  svg << "<polyline fill=\"none\" stroke=\"orange\" stroke-width=\"2\" points=\"";
  for (std::size_t j = 0; j < order.size(); ++j) {
    std::snprintf(buf, sizeof(buf), "%s%.2f,%.2f", j ? " " : "",
                  px(x[order[j]]), py(smooth[order[j]]));
    svg << buf;
  }
  svg << "\"/>\n";
  std::snprintf(buf, sizeof(buf),
                "<text x=\"%.0f\" y=\"20\" font-family=\"sans-serif\" "
                "font-size=\"13\">%s (loess span %.2f)</text>\n",
                m, estimator_id.c_str(), span);
  svg << buf;
  svg << "</svg>\n";
}

}  // namespace berest
