#include "berest/ghp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace berest {

std::vector<std::pair<Eigen::Index, Eigen::Index>> euclidean_mst(
    const Eigen::MatrixXd& points) {
  const Eigen::Index n = points.rows();
  if (n < 2) throw std::invalid_argument("euclidean_mst: need at least 2 points");
  if (!points.allFinite())
    throw std::invalid_argument("euclidean_mst: coordinates must be finite");

  // Prim on the implicit complete graph; squared distances preserve the MST.
  std::vector<char> in_tree(static_cast<std::size_t>(n), 0);
  std::vector<double> best(static_cast<std::size_t>(n),
                           std::numeric_limits<double>::infinity());
  std::vector<Eigen::Index> parent(static_cast<std::size_t>(n), 0);

  std::vector<std::pair<Eigen::Index, Eigen::Index>> edges;
  edges.reserve(static_cast<std::size_t>(n) - 1);

  in_tree[0] = 1;
  Eigen::Index last = 0;
  for (Eigen::Index added = 1; added < n; ++added) {
    // Relax against the vertex added last.
    for (Eigen::Index j = 0; j < n; ++j) {
      if (in_tree[static_cast<std::size_t>(j)]) continue;
      const double w = (points.row(last) - points.row(j)).squaredNorm();
      auto& b = best[static_cast<std::size_t>(j)];
      if (w < b) {
        b = w;
        parent[static_cast<std::size_t>(j)] = last;
      }
    }
    Eigen::Index pick = -1;
    double pick_w = std::numeric_limits<double>::infinity();
    for (Eigen::Index j = 0; j < n; ++j) {
      if (in_tree[static_cast<std::size_t>(j)]) continue;
      const double w = best[static_cast<std::size_t>(j)];
      if (w < pick_w) {  // strict: equal weights keep the smaller index
        pick_w = w;
        pick = j;
      }
    }
    in_tree[static_cast<std::size_t>(pick)] = 1;
    const Eigen::Index p = parent[static_cast<std::size_t>(pick)];
    edges.emplace_back(std::min(p, pick), std::max(p, pick));
    last = pick;
  }
  return edges;
}

int fr_cross_count(const LabeledDataset& dataset) {
  if (dataset.count(ClassLabel::A) == 0 || dataset.count(ClassLabel::B) == 0)
    throw std::invalid_argument("fr_cross_count: both classes must be nonempty");
  const auto edges = euclidean_mst(dataset.x);
  int crossings = 0;
  for (const auto& [u, v] : edges)
    crossings += (dataset.labels[static_cast<std::size_t>(u)] !=
                  dataset.labels[static_cast<std::size_t>(v)]);
  return crossings;
}

double hp_divergence(const LabeledDataset& dataset) {
  const double na = static_cast<double>(dataset.count(ClassLabel::A));
  const double nb = static_cast<double>(dataset.count(ClassLabel::B));
  const double n = na + nb;
  const double r = static_cast<double>(fr_cross_count(dataset));
  const double raw = 1.0 - r * n / (2.0 * na * nb);
  return std::clamp(raw, 0.0, 1.0);
}

GhpEstimate ghp_estimate(const LabeledDataset& dataset) {
  const double na = static_cast<double>(dataset.count(ClassLabel::A));
  const double nb = static_cast<double>(dataset.count(ClassLabel::B));
  if (na == 0 || nb == 0)
    throw std::invalid_argument("ghp_estimate: both classes must be nonempty");
  const double n = na + nb;
  const double p = na / n;
  const double q = nb / n;

  GhpEstimate est;
  est.cross_edges = fr_cross_count(dataset);
  const double raw = 1.0 - est.cross_edges * n / (2.0 * na * nb);
  est.divergence = std::clamp(raw, 0.0, 1.0);

  const double u = 4.0 * p * q * est.divergence + (p - q) * (p - q);
  est.upper = 0.5 - 0.5 * u;
  est.lower = 0.5 - 0.5 * std::sqrt(u);
  est.mid = 0.5 * (est.lower + est.upper);
  return est;
}

}  // namespace berest
