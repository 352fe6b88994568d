#include "berest/ground_truth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "berest/parallel.hpp"

namespace berest {

namespace {

/// Sampler with per-point class labels; precomputes cumulative weights.
struct MixtureSampler {
  const ScenarioSpec& spec;
  std::vector<double> cum_a;
  std::vector<double> cum_b;
  double sigma_a;
  double sigma_b;

  explicit MixtureSampler(const ScenarioSpec& s)
      : spec(s),
        sigma_a(std::sqrt(s.var_a)),
        sigma_b(std::sqrt(s.var_b)) {
    auto fill = [](const std::vector<double>& w, std::vector<double>& cum) {
      cum.resize(w.size());
      double acc = 0.0;
      for (std::size_t i = 0; i < w.size(); ++i) {
        acc += w[i];
        cum[i] = acc;
      }
    };
    fill(s.weights_a, cum_a);
    fill(s.weights_b, cum_b);
  }

  void draw(ClassLabel label, RngStream& rng, Eigen::MatrixXd& out,
            Eigen::Index row) const {
    const bool is_a = (label == ClassLabel::A);
    const auto& cum = is_a ? cum_a : cum_b;
    const auto& centers = is_a ? spec.centers_a : spec.centers_b;
    const double sigma = is_a ? sigma_a : sigma_b;
    const double u = rng.uniform01() * cum.back();
    const auto it = std::upper_bound(cum.begin(), cum.end(), u);
    const Eigen::Index c = std::min<Eigen::Index>(
        static_cast<Eigen::Index>(it - cum.begin()), centers.rows() - 1);
    for (int j = 0; j < spec.d; ++j)
      out(row, j) = centers(c, j) + sigma * rng.normal();
  }
};

struct Candidate {
  double param;
  GroundTruthEntry entry;
};

}  // namespace

McProfile profile_from_name(const std::string& name) {
  if (name == "reference") return McProfile::reference();
  if (name == "desk") return McProfile::desk();
  throw std::invalid_argument("unknown ground-truth profile: " + name);
}

const char* profile_name(const McProfile& p) {
  if (p.batches == 1000 && p.batch_size == 1024) return "reference";
  if (p.batches == 128 && p.batch_size == 1024) return "desk";
  return "custom";
}

ClassLabel bayes_classify(const ScenarioSpec& spec, const Eigen::VectorXd& x) {
  const double la = log_pdf(spec, ClassLabel::A, x);
  const double lb = log_pdf(spec, ClassLabel::B, x);
  return lb > la ? ClassLabel::B : ClassLabel::A;
}

std::vector<ClassLabel> bayes_classify_batch(const ScenarioSpec& spec,
                                             const Eigen::MatrixXd& points) {
  const Eigen::VectorXd la = log_pdf_batch(spec, ClassLabel::A, points);
  const Eigen::VectorXd lb = log_pdf_batch(spec, ClassLabel::B, points);
  std::vector<ClassLabel> out(static_cast<std::size_t>(points.rows()));
  for (Eigen::Index i = 0; i < points.rows(); ++i)
    out[static_cast<std::size_t>(i)] =
        lb(i) > la(i) ? ClassLabel::B : ClassLabel::A;
  return out;
}

GroundTruthEntry mc_ber(const ScenarioSpec& spec, int batches, int batch_size,
                        RngStream rng, int workers) {
  if (batches < 1 || batch_size < 1)
    throw std::invalid_argument("mc_ber: batches and batch_size must be >= 1");
  if (workers <= 0) workers = default_worker_count();

  const MixtureSampler sampler(spec);
  std::vector<long> errors(static_cast<std::size_t>(batches), 0);

  parallel_for(static_cast<std::size_t>(batches), workers, [&](std::size_t b) {
    RngStream stream = rng.child(b);
    Eigen::MatrixXd points(batch_size, spec.d);
    std::vector<ClassLabel> truth(static_cast<std::size_t>(batch_size));
    for (int i = 0; i < batch_size; ++i) {
      const ClassLabel label =
          stream.uniform01() < 0.5 ? ClassLabel::A : ClassLabel::B;
      truth[static_cast<std::size_t>(i)] = label;
      sampler.draw(label, stream, points, i);
    }
    const auto predicted = bayes_classify_batch(spec, points);
    long wrong = 0;
    for (int i = 0; i < batch_size; ++i)
      wrong += (predicted[static_cast<std::size_t>(i)] !=
                truth[static_cast<std::size_t>(i)]);
    errors[b] = wrong;
  });

  long wrong = 0;
  for (long e : errors) wrong += e;
  const long total = static_cast<long>(batches) * batch_size;
  const double p = static_cast<double>(wrong) / static_cast<double>(total);

  GroundTruthEntry out;
  out.spec = spec;
  out.ber = p;
  out.std_err = std::sqrt(p * (1.0 - p) / static_cast<double>(total));
  out.n_mc = total;
  return out;
}

GroundTruthEntry mc_ber(const ScenarioSpec& spec, const McProfile& profile,
                        RngStream rng, int workers) {
  return mc_ber(spec, profile.batches, profile.batch_size, rng, workers);
}

CalibratedParameterTable calibrate(Family family, int d, double ber_lo,
                                   double ber_hi, double max_gap,
                                   RngStream rng,
                                   const CalibrationOptions& options) {
  if (!(0.0 < ber_lo && ber_lo < ber_hi && ber_hi <= 0.5))
    throw std::invalid_argument("calibrate: need 0 < ber_lo < ber_hi <= 0.5");
  if (!(max_gap > 0.0)) throw std::invalid_argument("calibrate: max_gap must be > 0");

  int evaluations = 0;
  std::uint64_t next_child = 0;

  auto evaluate = [&](double param) -> Candidate {
    if (evaluations >= options.max_evaluations)
      throw std::runtime_error(
          "calibrate: evaluation budget exhausted before gap targets were met");
    ++evaluations;
    RngStream center_rng = rng.child(next_child++);
    RngStream eval_rng = rng.child(next_child++);
    const ScenarioSpec spec =
        family == Family::SvS
            ? build_scenario(family, d, 0.0, options.var_a, options.var_b,
                             param, center_rng)
            : build_scenario(family, d, param, options.var_a, options.var_b,
                             0.0, center_rng);
    Candidate c;
    c.param = param;
    c.entry = mc_ber(spec, options.profile, eval_rng, options.workers);
    return c;
  };

  // BER decreases as the offset parameter grows, for every family: mu (r_a
  // for SvS) pushes the classes apart. Bracket both ends of the range, with
  // a 3-sigma guard so Monte Carlo noise cannot fake coverage.
  std::vector<Candidate> cands;  // sorted by param descending = ber ascending
  cands.push_back(evaluate(1.0));

  const double guard =
      3.0 * std::sqrt(0.25 / static_cast<double>(options.profile.total()));

  double p_large = 1.0;
  while (cands.front().entry.ber > std::max(0.0, ber_lo - guard)) {
    p_large *= 2.0;
    if (p_large > 1e6)
      throw std::runtime_error(
          "calibrate: parameter range cannot reach ber_lo (offset bracket "
          "exceeded 1e6)");
    cands.insert(cands.begin(), evaluate(p_large));
  }
  double p_small = 1.0;
  while (cands.back().entry.ber < std::min(0.5, ber_hi + guard)) {
    p_small /= 2.0;
    if (p_small < 1e-9)
      throw std::runtime_error(
          "calibrate: parameter range cannot reach ber_hi (offset bracket "
          "fell below 1e-9)");
    cands.push_back(evaluate(p_small));
  }

  // Bisect the widest relevant BER gap until all are <= max_gap. Gaps that
  // come out non-positive are plateaus (Monte Carlo noise) and count as met.
  for (;;) {
    int widest = -1;
    double widest_gap = max_gap;
    for (std::size_t i = 0; i + 1 < cands.size(); ++i) {
      const double b0 = cands[i].entry.ber;
      const double b1 = cands[i + 1].entry.ber;
      if (b1 < ber_lo || b0 > ber_hi) continue;  // outside requested range
      const double gap = b1 - b0;
      if (gap > widest_gap) {
        widest_gap = gap;
        widest = static_cast<int>(i);
      }
    }
    if (widest < 0) break;
    const double mid =
        0.5 * (cands[static_cast<std::size_t>(widest)].param +
               cands[static_cast<std::size_t>(widest) + 1].param);
    Candidate c = evaluate(mid);
    cands.insert(cands.begin() + widest + 1, std::move(c));
  }

  // Keep a strictly increasing BER chain (drops plateau inversions, keeps
  // the offset monotone), then trim to the entries covering the range.
  std::vector<Candidate> chain;
  for (auto& c : cands) {
    if (!chain.empty() && c.entry.ber <= chain.back().entry.ber) continue;
    chain.push_back(std::move(c));
  }

  std::size_t lo_idx = 0;
  for (std::size_t i = 0; i < chain.size(); ++i)
    if (chain[i].entry.ber <= ber_lo) lo_idx = i;
  std::size_t hi_idx = chain.size() - 1;
  for (std::size_t i = chain.size(); i-- > 0;)
    if (chain[i].entry.ber >= ber_hi) hi_idx = i;

  if (chain[lo_idx].entry.ber > ber_lo || chain[hi_idx].entry.ber < ber_hi)
    throw std::runtime_error(
        "calibrate: achieved BER values do not cover the requested range");

  CalibratedParameterTable table;
  table.family = family;
  table.d = d;
  for (std::size_t i = lo_idx; i <= hi_idx; ++i)
    table.entries.push_back(std::move(chain[i].entry));
  return table;
}

std::vector<double> stratified_targets(double lo, double hi, int count) {
  std::vector<double> out(static_cast<std::size_t>(count));
  if (count == 1) {
    out[0] = 0.5 * (lo + hi);
    return out;
  }
  for (int i = 0; i < count; ++i)
    out[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (count - 1);
  return out;
}

std::vector<const GroundTruthEntry*> select_uniform(
    const CalibratedParameterTable& table, int count) {
  if (table.entries.empty())
    throw std::invalid_argument("select_uniform: empty table");
  if (count < 1) throw std::invalid_argument("select_uniform: count must be >= 1");

  const auto size = static_cast<long>(table.entries.size());
  std::vector<const GroundTruthEntry*> out;
  out.reserve(static_cast<std::size_t>(count));
  if (count <= size) {
    // Spread the picks across the index range, keeping both endpoints.
    for (int i = 0; i < count; ++i) {
      const long idx =
          count == 1 ? (size - 1) / 2
                     : std::lround(static_cast<double>(i) * (size - 1) /
                                   (count - 1));
      out.push_back(&table.entries[static_cast<std::size_t>(idx)]);
    }
  } else {
    // More runs than entries: contiguous blocks of floor/ceil(count/size)
    // runs per entry, so repetition counts differ by at most one.
    for (int i = 0; i < count; ++i) {
      const long idx = static_cast<long>(i) * size / count;
      out.push_back(&table.entries[static_cast<std::size_t>(idx)]);
    }
  }
  return out;
}

std::string table_to_json(const CalibratedParameterTable& table) {
  nlohmann::json j;
  j["family"] = family_name(table.family);
  j["d"] = table.d;
  nlohmann::json entries = nlohmann::json::array();
  for (const auto& e : table.entries) {
    nlohmann::json je;
    je["spec"] = nlohmann::json::parse(scenario_to_json(e.spec));
    je["ber"] = e.ber;
    je["std_err"] = e.std_err;
    je["n_mc"] = e.n_mc;
    entries.push_back(std::move(je));
  }
  j["entries"] = std::move(entries);
  return j.dump();
}

CalibratedParameterTable table_from_json(const std::string& text) {
  const nlohmann::json j = nlohmann::json::parse(text);
  CalibratedParameterTable table;
  table.family = family_from_name(j.at("family").get<std::string>());
  table.d = j.at("d").get<int>();
  for (const auto& je : j.at("entries")) {
    GroundTruthEntry e;
    e.spec = scenario_from_json(je.at("spec").dump());
    e.ber = je.at("ber").get<double>();
    e.std_err = je.at("std_err").get<double>();
    e.n_mc = je.at("n_mc").get<long>();
    table.entries.push_back(std::move(e));
  }
  return table;
}

std::string table_cache_name(Family family, int d, double ber_lo,
                             double ber_hi, std::uint64_t seed,
                             const McProfile& profile) {
  char buf[160];
  std::snprintf(buf, sizeof(buf), "cal_%s_d%d_%.4f-%.4f_s%llu_%s.json",
                family_name(family), d, ber_lo, ber_hi,
                static_cast<unsigned long long>(seed), profile_name(profile));
  return buf;
}

}  // namespace berest
