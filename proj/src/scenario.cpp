#include "berest/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace berest {

namespace {

constexpr double kLog2Pi = 1.8378770664093454835606594728112;

// Variance floors from the scenario parameter table: 0.01 in general, 0.1
// for any class built on a hypersphere mixture.
constexpr double kVarFloor = 0.01;
constexpr double kVarFloorSphere = 0.1;

// Nominal sphere-center counts; each scenario jitters them by +/-2.
constexpr int kSphereCountA = 190;
constexpr int kSphereCountB = 200;

std::uint64_t fnv1a(std::uint64_t h, const void* data, std::size_t len) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < len; ++i) {
    h ^= p[i];
    h *= 0x100000001B3ull;
  }
  return h;
}

std::uint64_t hash_double(std::uint64_t h, double v) {
  std::uint64_t bits;
  std::memcpy(&bits, &v, sizeof(bits));
  return fnv1a(h, &bits, sizeof(bits));
}

std::string make_scenario_id(const ScenarioSpec& s) {
  std::uint64_t h = 0xCBF29CE484222325ull;
  const int fam = static_cast<int>(s.family);
  h = fnv1a(h, &fam, sizeof(fam));
  h = fnv1a(h, &s.d, sizeof(s.d));
  h = hash_double(h, s.mu);
  h = hash_double(h, s.var_a);
  h = hash_double(h, s.var_b);
  h = hash_double(h, s.r_a);
  h = hash_double(h, s.r_b);
  for (const auto* m : {&s.centers_a, &s.centers_b})
    for (Eigen::Index i = 0; i < m->size(); ++i) h = hash_double(h, m->data()[i]);
  for (const auto* w : {&s.weights_a, &s.weights_b})
    for (double v : *w) h = hash_double(h, v);

  char buf[64];
  std::snprintf(buf, sizeof(buf), "%s-d%d-%016llx", family_name(s.family), s.d,
                static_cast<unsigned long long>(h));
  return buf;
}

Eigen::MatrixXd ones_center(int d, double per_coord) {
  Eigen::MatrixXd c(1, d);
  c.setConstant(per_coord);
  return c;
}

void check_variance(double var, double floor, const char* which) {
  if (!(var > 0.0)) throw std::invalid_argument(std::string(which) + " must be positive");
  if (var < floor)
    throw std::invalid_argument(std::string(which) + " below family floor");
}

}  // namespace

const char* family_name(Family f) {
  switch (f) {
    case Family::GvG: return "GvG";
    case Family::TvT: return "TvT";
    case Family::TvS: return "TvS";
    case Family::SvS: return "SvS";
  }
  return "?";
}

Family family_from_name(const std::string& name) {
  if (name == "GvG" || name == "gvg") return Family::GvG;
  if (name == "TvT" || name == "tvt") return Family::TvT;
  if (name == "TvS" || name == "tvs") return Family::TvS;
  if (name == "SvS" || name == "svs") return Family::SvS;
  throw std::invalid_argument("unknown family: " + name);
}

Eigen::MatrixXd hypersphere_centers(int d, double radius, int count,
                                    RngStream& rng) {
  if (d < 2) throw std::invalid_argument("hypersphere_centers: d must be >= 2");
  if (count < 1) throw std::invalid_argument("hypersphere_centers: count must be >= 1");
  if (!(radius > 0.0))
    throw std::invalid_argument("hypersphere_centers: radius must be positive");
  Eigen::MatrixXd centers(count, d);
  for (int i = 0; i < count; ++i) {
    double norm2 = 0.0;
    do {
      for (int j = 0; j < d; ++j) centers(i, j) = rng.normal();
      norm2 = centers.row(i).squaredNorm();
    } while (norm2 < 1e-24);
    centers.row(i) *= radius / std::sqrt(norm2);
  }
  return centers;
}

ScenarioSpec build_scenario(Family family, int d, double mu, double var_a,
                            double var_b, double r_a, RngStream& center_rng) {
  const bool spherical = (family == Family::TvS || family == Family::SvS);
  if (d < 1) throw std::invalid_argument("build_scenario: d must be >= 1");
  if (spherical && d < 2)
    throw std::invalid_argument("build_scenario: spherical families need d >= 2");
  if (mu < 0.0) throw std::invalid_argument("build_scenario: mu must be >= 0");

  check_variance(var_a, family == Family::SvS ? kVarFloorSphere : kVarFloor, "var_a");
  check_variance(var_b, spherical ? kVarFloorSphere : kVarFloor, "var_b");

  ScenarioSpec s;
  s.family = family;
  s.d = d;
  s.mu = mu;
  s.var_a = var_a;
  s.var_b = var_b;

  const double per_coord = std::sqrt(mu * mu / d);

  switch (family) {
    case Family::GvG: {
      s.centers_a = Eigen::MatrixXd::Zero(1, d);
      s.centers_b = ones_center(d, per_coord);
      s.weights_a = {1.0};
      s.weights_b = {1.0};
      break;
    }
    case Family::TvT: {
      s.centers_a.resize(3, d);
      s.centers_a.row(0).setZero();
      s.centers_a.row(1).setConstant(per_coord);
      s.centers_a.row(2).setConstant(-per_coord);
      s.weights_a.assign(3, 1.0 / 3.0);
      const double half = std::sqrt((mu / 2) * (mu / 2) / d);
      s.centers_b.resize(2, d);
      s.centers_b.row(0).setConstant(half);
      s.centers_b.row(1).setConstant(-half);
      s.weights_b.assign(2, 0.5);
      break;
    }
    case Family::TvS: {
      s.centers_a.resize(3, d);
      s.centers_a.row(0).setZero();
      s.centers_a.row(1).setConstant(per_coord);
      s.centers_a.row(2).setConstant(-per_coord);
      s.weights_a.assign(3, 1.0 / 3.0);
      s.r_b = mu / 2;
      if (!(s.r_b > 0.0))
        throw std::invalid_argument("build_scenario: TvS requires mu > 0");
      const int count =
          kSphereCountB + static_cast<int>(center_rng.uniform_int(-2, 2));
      s.centers_b = hypersphere_centers(d, s.r_b, count, center_rng);
      s.weights_b.assign(static_cast<std::size_t>(count), 1.0 / count);
      break;
    }
    case Family::SvS: {
      if (!(r_a > 0.0))
        throw std::invalid_argument("build_scenario: SvS requires r_a > 0");
      s.r_a = r_a;
      s.r_b = r_a / 2;
      const int count_a =
          kSphereCountA + static_cast<int>(center_rng.uniform_int(-2, 2));
      const int count_b =
          kSphereCountB + static_cast<int>(center_rng.uniform_int(-2, 2));
      // Class A: central Gaussian takes half the mass, the sphere the rest.
      Eigen::MatrixXd sphere_a = hypersphere_centers(d, r_a, count_a, center_rng);
      s.centers_a.resize(count_a + 1, d);
      s.centers_a.row(0).setZero();
      s.centers_a.bottomRows(count_a) = sphere_a;
      s.weights_a.assign(static_cast<std::size_t>(count_a) + 1,
                         0.5 / count_a);
      s.weights_a[0] = 0.5;
      s.centers_b = hypersphere_centers(d, s.r_b, count_b, center_rng);
      s.weights_b.assign(static_cast<std::size_t>(count_b), 1.0 / count_b);
      break;
    }
  }

  s.scenario_id = make_scenario_id(s);
  return s;
}

Eigen::MatrixXd sample(const ScenarioSpec& spec, ClassLabel label, int count,
                       RngStream& rng) {
  if (count < 1) throw std::invalid_argument("sample: count must be >= 1");
  const auto& centers = spec.centers(label);
  const auto& weights = spec.weights(label);
  const double sigma = std::sqrt(spec.variance(label));
  const int d = spec.d;

  std::vector<double> cumulative(weights.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    acc += weights[i];
    cumulative[i] = acc;
  }

  Eigen::MatrixXd out(count, d);
  for (int i = 0; i < count; ++i) {
    const double u = rng.uniform01() * acc;
    const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
    const Eigen::Index c = std::min<Eigen::Index>(
        static_cast<Eigen::Index>(it - cumulative.begin()), centers.rows() - 1);
    for (int j = 0; j < d; ++j) out(i, j) = centers(c, j) + sigma * rng.normal();
  }
  return out;
}

double log_pdf(const ScenarioSpec& spec, ClassLabel label,
               const Eigen::VectorXd& x) {
  if (x.size() != spec.d) throw std::invalid_argument("log_pdf: dimension mismatch");
  Eigen::MatrixXd pts(1, spec.d);
  pts.row(0) = x.transpose();
  return log_pdf_batch(spec, label, pts)(0);
}

Eigen::VectorXd log_pdf_batch(const ScenarioSpec& spec, ClassLabel label,
                              const Eigen::MatrixXd& points) {
  if (points.cols() != spec.d)
    throw std::invalid_argument("log_pdf_batch: dimension mismatch");
  const auto& centers = spec.centers(label);
  const auto& weights = spec.weights(label);
  const double var = spec.variance(label);
  const Eigen::Index n = points.rows();
  const Eigen::Index m = centers.rows();
  const double norm_const =
      -0.5 * spec.d * (kLog2Pi + std::log(var));

  // exponents(c, i) = log w_c - ||x_i - center_c||^2 / (2 var)
  Eigen::MatrixXd d2 = cross_squared_distances(centers, points);
  Eigen::MatrixXd exponents = d2 * (-0.5 / var);
  for (Eigen::Index c = 0; c < m; ++c)
    exponents.row(c).array() += std::log(weights[static_cast<std::size_t>(c)]);

  Eigen::VectorXd out(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double mx = exponents.col(i).maxCoeff();
    const double sum = (exponents.col(i).array() - mx).exp().sum();
    out(i) = mx + std::log(sum) + norm_const;
  }
  return out;
}

Eigen::MatrixXd squared_distance_matrix(const Eigen::MatrixXd& points) {

  Eigen::VectorXd sq = points.rowwise().squaredNorm();
  Eigen::MatrixXd d2 = -2.0 * (points * points.transpose());
  d2.colwise() += sq;
  d2.rowwise() += sq.transpose();
  d2 = d2.cwiseMax(0.0);
  d2.diagonal().setZero();
  return d2;
}

Eigen::MatrixXd cross_squared_distances(const Eigen::MatrixXd& a,
                                        const Eigen::MatrixXd& b) {
  Eigen::VectorXd sa = a.rowwise().squaredNorm();
  Eigen::VectorXd sb = b.rowwise().squaredNorm();
  Eigen::MatrixXd d2 = -2.0 * (a * b.transpose());
  d2.colwise() += sa;
  d2.rowwise() += sb.transpose();
  return d2.cwiseMax(0.0);
}

std::string scenario_to_json(const ScenarioSpec& s) {
  nlohmann::json j;
  j["family"] = family_name(s.family);
  j["d"] = s.d;
  j["mu"] = s.mu;
  j["var_a"] = s.var_a;
  j["var_b"] = s.var_b;
  j["r_a"] = s.r_a;
  j["r_b"] = s.r_b;
  auto dump_centers = [](const Eigen::MatrixXd& m) {
    nlohmann::json arr = nlohmann::json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      nlohmann::json row = nlohmann::json::array();
      for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(i, c));
      arr.push_back(std::move(row));
    }
    return arr;
  };
  j["centers_a"] = dump_centers(s.centers_a);
  j["centers_b"] = dump_centers(s.centers_b);
  j["weights_a"] = s.weights_a;
  j["weights_b"] = s.weights_b;
  j["scenario_id"] = s.scenario_id;
  return j.dump();
}

ScenarioSpec scenario_from_json(const std::string& text) {
  const nlohmann::json j = nlohmann::json::parse(text);
  ScenarioSpec s;
  s.family = family_from_name(j.at("family").get<std::string>());
  s.d = j.at("d").get<int>();
  s.mu = j.at("mu").get<double>();
  s.var_a = j.at("var_a").get<double>();
  s.var_b = j.at("var_b").get<double>();
  s.r_a = j.at("r_a").get<double>();
  s.r_b = j.at("r_b").get<double>();
  auto load_centers = [&](const char* key) {
    const auto& arr = j.at(key);
    const Eigen::Index rows = static_cast<Eigen::Index>(arr.size());
    Eigen::MatrixXd m(rows, s.d);
    for (Eigen::Index i = 0; i < rows; ++i)
      for (Eigen::Index c = 0; c < s.d; ++c)
        m(i, c) = arr[static_cast<std::size_t>(i)][static_cast<std::size_t>(c)]
                      .get<double>();
    return m;
  };
  s.centers_a = load_centers("centers_a");
  s.centers_b = load_centers("centers_b");
  s.weights_a = j.at("weights_a").get<std::vector<double>>();
  s.weights_b = j.at("weights_b").get<std::vector<double>>();
  s.scenario_id = j.at("scenario_id").get<std::string>();
  return s;
}

}  // namespace berest
