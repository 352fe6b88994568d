#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "berest/ghp.hpp"
#include "berest/ground_truth.hpp"
#include "berest/harness.hpp"
#include "berest/kde.hpp"
#include "berest/knn.hpp"
#include "berest/reporting.hpp"

namespace py = pybind11;
using namespace berest;

namespace {

LabeledDataset make_dataset(const Eigen::MatrixXd& x,
                            const std::vector<int>& labels) {
  if (static_cast<Eigen::Index>(labels.size()) != x.rows())
    throw std::invalid_argument("labels length must match rows of x");
  LabeledDataset ds;
  ds.x = x;
  ds.labels.reserve(labels.size());
  for (int l : labels) {
    if (l != 0 && l != 1) throw std::invalid_argument("labels must be 0 or 1");
    ds.labels.push_back(l == 0 ? ClassLabel::A : ClassLabel::B);
  }
  return ds;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Bayes error rate estimators and their Monte Carlo test bench";

  py::class_<ScenarioSpec>(m, "ScenarioSpec")
      .def_readonly("d", &ScenarioSpec::d)
      .def_readonly("mu", &ScenarioSpec::mu)
      .def_readonly("var_a", &ScenarioSpec::var_a)
      .def_readonly("var_b", &ScenarioSpec::var_b)
      .def_readonly("r_a", &ScenarioSpec::r_a)
      .def_readonly("r_b", &ScenarioSpec::r_b)
      .def_readonly("centers_a", &ScenarioSpec::centers_a)
      .def_readonly("centers_b", &ScenarioSpec::centers_b)
      .def_readonly("weights_a", &ScenarioSpec::weights_a)
      .def_readonly("weights_b", &ScenarioSpec::weights_b)
      .def_readonly("scenario_id", &ScenarioSpec::scenario_id)
      .def_property_readonly(
          "family",
          [](const ScenarioSpec& s) { return std::string(family_name(s.family)); })
      .def("to_json", &scenario_to_json)
      .def_static("from_json", &scenario_from_json);

  py::class_<KnnEstimate>(m, "KnnEstimate")
      .def_readonly("upper", &KnnEstimate::upper)
      .def_readonly("lower", &KnnEstimate::lower)
      .def_readonly("mid", &KnnEstimate::mid)
      .def_readonly("k0", &KnnEstimate::k0);

  py::class_<GhpEstimate>(m, "GhpEstimate")
      .def_readonly("lower", &GhpEstimate::lower)
      .def_readonly("upper", &GhpEstimate::upper)
      .def_readonly("mid", &GhpEstimate::mid)
      .def_readonly("cross_edges", &GhpEstimate::cross_edges)
      .def_readonly("divergence", &GhpEstimate::divergence);

  m.def(
      "build_scenario",
      [](const std::string& family, int d, double mu, double var_a,
         double var_b, double r_a, std::uint64_t seed) {
        auto rng = derive_stream(seed, 0, StreamPurpose::Centers);
        return build_scenario(family_from_name(family), d, mu, var_a, var_b,
                              r_a, rng);
      },
      py::arg("family"), py::arg("d"), py::arg("mu"), py::arg("var_a") = 0.3,
      py::arg("var_b") = 0.3, py::arg("r_a") = 0.0, py::arg("seed") = 1,
      "Construct a frozen two-class scenario of the given family.");

  m.def(
      "sample",
      [](const ScenarioSpec& spec, int label, int count, std::uint64_t seed) {
        auto rng = derive_stream(seed, 0, StreamPurpose::Data);
        return sample(spec, label == 0 ? ClassLabel::A : ClassLabel::B, count,
                      rng);
      },
      py::arg("spec"), py::arg("label"), py::arg("count"), py::arg("seed") = 1,
      "Draw points from one class (label 0 = A, 1 = B).");

  m.def(
      "log_pdf",
      [](const ScenarioSpec& spec, int label, const Eigen::MatrixXd& points) {
        return log_pdf_batch(spec, label == 0 ? ClassLabel::A : ClassLabel::B,
                             points);
      },
      py::arg("spec"), py::arg("label"), py::arg("points"),
      "Exact class log density at each row of points.");

  m.def(
      "bayes_classify",
      [](const ScenarioSpec& spec, const Eigen::MatrixXd& points) {
        const auto labels = bayes_classify_batch(spec, points);
        std::vector<int> out;
        out.reserve(labels.size());
        for (auto l : labels) out.push_back(l == ClassLabel::A ? 0 : 1);
        return out;
      },
      py::arg("spec"), py::arg("points"));

  m.def(
      "mc_ber",
      [](const ScenarioSpec& spec, int batches, int batch_size,
         std::uint64_t seed) {
        const auto e =
            mc_ber(spec, batches, batch_size,
                   derive_stream(seed, 0, StreamPurpose::Calibration));
        return py::make_tuple(e.ber, e.std_err, e.n_mc);
      },
      py::arg("spec"), py::arg("batches") = 128, py::arg("batch_size") = 1024,
      py::arg("seed") = 1,
      "Monte Carlo ground-truth BER: returns (ber, std_err, n_mc).");

  m.def(
      "knn_estimate",
      [](const Eigen::MatrixXd& x, const std::vector<int>& labels,
         const std::vector<int>& k_range) {
        const auto ds = make_dataset(x, labels);
        return knn_estimate(ds, k_range.empty() ? default_k_range() : k_range);
      },
      py::arg("x"), py::arg("labels"), py::arg("k_range") = std::vector<int>{},
      "kNN-LOO bounds with best-k search (default odd k in [1, 199]).");

  m.def(
      "knn_loo_error",
      [](const Eigen::MatrixXd& x, const std::vector<int>& labels, int k) {
        return knn_loo_error(make_dataset(x, labels), k);
      },
      py::arg("x"), py::arg("labels"), py::arg("k"));

  m.def("knn_lower_bound", &knn_lower_bound, py::arg("upper"), py::arg("k"));

  m.def(
      "ghp_estimate",
      [](const Eigen::MatrixXd& x, const std::vector<int>& labels) {
        return ghp_estimate(make_dataset(x, labels));
      },
      py::arg("x"), py::arg("labels"),
      "Henze-Penrose divergence BER bounds from the Friedman-Rafsky count.");

  m.def(
      "hp_divergence",
      [](const Eigen::MatrixXd& x, const std::vector<int>& labels) {
        return hp_divergence(make_dataset(x, labels));
      },
      py::arg("x"), py::arg("labels"));

  m.def(
      "gkde_estimate",
      [](const Eigen::MatrixXd& x, const std::vector<int>& labels, double h) {
        return gkde_estimate(make_dataset(x, labels), h);
      },
      py::arg("x"), py::arg("labels"), py::arg("h"));

  m.def("silverman_bandwidth", &silverman_bandwidth, py::arg("points"));

  m.def(
      "clakde_estimate",
      [](const Eigen::MatrixXd& x, const std::vector<int>& labels) {
        return clakde_estimate(make_dataset(x, labels));
      },
      py::arg("x"), py::arg("labels"),
      "Comparative adaptive-KDE estimate (J/2).");

  m.def("gc_estimate", &gc_estimate, py::arg("ghp_lower"), py::arg("clakde"));

  m.def(
      "naive_bayes_error",
      [](const Eigen::MatrixXd& x, const std::vector<int>& labels) {
        return naive_bayes_error(make_dataset(x, labels));
      },
      py::arg("x"), py::arg("labels"));

  m.def(
      "evaluate_estimators",
      [](const ScenarioSpec& spec, const Eigen::MatrixXd& x,
         const std::vector<int>& labels,
         const std::vector<std::string>& estimator_ids) {
        return evaluate_estimators(
            spec, make_dataset(x, labels),
            estimator_ids.empty() ? all_estimator_ids() : estimator_ids);
      },
      py::arg("spec"), py::arg("x"), py::arg("labels"),
      py::arg("estimator_ids") = std::vector<std::string>{},
      "Run a set of estimators on one dataset, sharing intermediate work.");

  m.def("all_estimator_ids", [] { return all_estimator_ids(); });

  m.def("percentile", &percentile, py::arg("values"), py::arg("q"));

  m.def("loess_fit", &loess_fit, py::arg("x"), py::arg("y"),
        py::arg("span") = 0.3);

  m.def(
      "run_campaign",
      [](const std::string& config_json) {
        const auto cells = run_campaign(config_from_json(config_json));
        py::list out;
        for (const auto& cell : cells) {
          py::dict d;
          d["d"] = cell.d;
          d["n_per_class"] = cell.n_per_class;
          d["records_path"] = cell.records_path;
          d["completed"] = cell.completed;
          d["failed"] = cell.failed;
          d["skipped_existing"] = cell.skipped_existing;
          out.append(d);
        }
        return out;
      },
      py::arg("config_json"),
      "Run a campaign from a config JSON string; returns per-cell results.");
}
