#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

namespace berest {

enum class ClassLabel : std::uint8_t { A = 0, B = 1 };

/// Feature matrix (rows are points) with binary labels.
struct LabeledDataset {
  Eigen::MatrixXd x;                 // n x d
  std::vector<ClassLabel> labels;    // size n

  Eigen::Index n() const { return x.rows(); }
  Eigen::Index dim() const { return x.cols(); }

  Eigen::Index count(ClassLabel c) const {
    Eigen::Index k = 0;
    for (ClassLabel l : labels) k += (l == c);
    return k;
  }

  std::vector<Eigen::Index> indices_of(ClassLabel c) const {
    std::vector<Eigen::Index> out;
    for (Eigen::Index i = 0; i < n(); ++i)
      if (labels[static_cast<std::size_t>(i)] == c) out.push_back(i);
    return out;
  }

  Eigen::MatrixXd rows_of(ClassLabel c) const {
    const auto idx = indices_of(c);
    Eigen::MatrixXd out(static_cast<Eigen::Index>(idx.size()), x.cols());
    for (Eigen::Index r = 0; r < out.rows(); ++r)
      out.row(r) = x.row(idx[static_cast<std::size_t>(r)]);
    return out;
  }
};

/// All pairwise squared Euclidean distances via the Gram-matrix identity,
/// clamped at zero against cancellation. Shared by kNN, GHP and GKDE so the
/// matrix is built once per dataset.
Eigen::MatrixXd squared_distance_matrix(const Eigen::MatrixXd& points);

/// Cross squared distances between two point sets (rows of a against rows of b).
Eigen::MatrixXd cross_squared_distances(const Eigen::MatrixXd& a,
                                        const Eigen::MatrixXd& b);

}  // namespace berest
