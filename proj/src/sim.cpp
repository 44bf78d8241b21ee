#include "rcbtl/sim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace rcbtl {

std::vector<double> truth_ladder(int k_clusters) {
  switch (k_clusters) {
    case 1:
      return std::vector<double>(8, 1.0);
    case 2:
      return {1, 1, 1, 1, 4, 4, 4, 4};
    case 4:
      return {1, 1, 4, 4, 16, 16, 64, 64};
    case 8:
      return {1, 4, 16, 64, 256, 1024, 4096, 16384};
    default:
      throw std::invalid_argument("truth ladder defined for K in {1,2,4,8}");
  }
}

void SimScenario::validate() const {
  if (num_objects != 8)
    throw std::invalid_argument("truth ladders are defined for 8 objects");
  truth_ladder(k_true);
  if (replicates < 1) throw std::invalid_argument("replicates must be >= 1");
  if (!(lambda > 0)) throw std::invalid_argument("lambda must be positive");
  if (num_judges < 1) throw std::invalid_argument("need at least one judge");
}

double CellResult::median_mae() const {
  std::vector<double> maes;
  for (const auto& r : replicates) maes.push_back(r.mae);
  std::sort(maes.begin(), maes.end());
  size_t n = maes.size();
  return n % 2 ? maes[n / 2] : 0.5 * (maes[n / 2 - 1] + maes[n / 2]);
}

CellResult run_scenario(const SimScenario& s) {
  s.validate();
  CellResult cell;
  cell.scenario = s;
  cell.replicates.resize(s.replicates);

  const auto truth = truth_ladder(s.k_true);
  std::vector<int> all_objects(s.num_objects);
  for (int j = 1; j <= s.num_objects; ++j) all_objects[j - 1] = j;

  std::vector<std::exception_ptr> errors(s.replicates);
#pragma omp parallel for schedule(dynamic)
  for (int r = 0; r < s.replicates; ++r) {
    try {
      std::mt19937_64 rng(derive_seed(s.seed, 1000 + static_cast<std::uint64_t>(r)));
      Dataset d;
      d.num_objects = s.num_objects;
      for (int i = 0; i < s.num_judges; ++i)
        d.observations.push_back(
            sample_ranking(truth, all_objects, s.num_objects, rng));

      ChainConfig cfg;
      cfg.outer_iters = s.outer_iters;
      cfg.worth_sweeps = s.worth_sweeps;
      cfg.num_chains = s.num_chains;
      cfg.seed = derive_seed(s.seed, 2000 + static_cast<std::uint64_t>(r));
      cfg.burn_in = static_cast<int>(cfg.samples_per_chain() / 2);
      cfg.hyper.lambda = s.lambda;
      cfg.hyper.a_gamma = s.a_gamma;
      cfg.hyper.b_gamma = s.b_gamma;

      auto samples = run_chains(d, cfg);
      auto summary = summarize(samples, cfg.burn_in);

      ReplicateMetrics m;
      m.mae = mae_against_truth(summary, truth);
      m.recovery = cluster_recovery_rates(summary, truth);
      m.k_mode = 1 + static_cast<int>(std::distance(
                         summary.k_pmf.begin(),
                         std::max_element(summary.k_pmf.begin(), summary.k_pmf.end())));
      cell.replicates[r] = m;
    } catch (...) {
      errors[r] = std::current_exception();
    }
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return cell;
}

std::vector<SimScenario> preset_scenarios(const std::string& name,
                                          std::uint64_t seed) {
  std::vector<SimScenario> out;
  auto make = [&](int k, double lambda, int judges, int reps, int t1) {
    SimScenario s;
    s.k_true = k;
    s.lambda = lambda;
    s.num_judges = judges;
    s.replicates = reps;
    s.outer_iters = t1;
    s.seed = derive_seed(seed, out.size());
    out.push_back(s);
  };
  if (name == "desk") {
    make(2, 2, 200, 5, 2000);
    make(2, 2, 800, 5, 2000);
    make(8, 8, 800, 5, 2000);
  } else if (name == "full") {
    for (int k : {1, 2, 4, 8})
      for (double lambda : {0.1, 2.0, 4.0, 8.0})
        for (int judges : {50, 200, 800}) make(k, lambda, judges, 20, 5000);
  } else {
    throw std::invalid_argument("unknown preset: " + name);
  }
  return out;
}

SimScenario parse_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open " + path);
  SimScenario s;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    std::string t;
    for (char c : line)
      if (!std::isspace(static_cast<unsigned char>(c))) t += c;
    if (t.empty()) continue;
    auto eq = t.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("line " + std::to_string(lineno) +
                                  ": expected key=value");
    std::string key = t.substr(0, eq);
    std::string value = t.substr(eq + 1);
    try {
      if (key == "J")
        s.num_objects = std::stoi(value);
      else if (key == "K")
        s.k_true = std::stoi(value);
      else if (key == "lambda")
        s.lambda = std::stod(value);
      else if (key == "I")
        s.num_judges = std::stoi(value);
      else if (key == "replicates")
        s.replicates = std::stoi(value);
      else if (key == "T1")
        s.outer_iters = std::stoi(value);
      else if (key == "T2")
        s.worth_sweeps = std::stoi(value);
      else if (key == "chains")
        s.num_chains = std::stoi(value);
      else if (key == "seed")
        s.seed = std::stoull(value);
      else if (key == "a_gamma")
        s.a_gamma = std::stod(value);
      else if (key == "b_gamma")
        s.b_gamma = std::stod(value);
      else
        throw std::invalid_argument("unknown key: " + key);
    } catch (const std::logic_error&) {
      throw std::invalid_argument("line " + std::to_string(lineno) +
                                  ": bad value for " + key);
    }
  }
  s.validate();
  return s;
}

void write_metrics_csv(const std::vector<CellResult>& cells, std::ostream& out) {
  out << "k_true,lambda,num_judges,replicate,mae,coclust_clustered,"
         "coclust_distinct,k_mode\n";
  char buf[32];
  auto fmt = [&](double v) {
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return std::string(buf);
  };
  for (const auto& cell : cells)
    for (size_t r = 0; r < cell.replicates.size(); ++r) {
      const auto& m = cell.replicates[r];
      out << cell.scenario.k_true << ',' << fmt(cell.scenario.lambda) << ','
          << cell.scenario.num_judges << ',' << r + 1 << ',' << fmt(m.mae) << ',';
      if (m.recovery.clustered_pairs) out << fmt(*m.recovery.clustered_pairs);
      out << ',';
      if (m.recovery.distinct_pairs) out << fmt(*m.recovery.distinct_pairs);
      out << ',' << m.k_mode << '\n';
    }
}

}  // namespace rcbtl
