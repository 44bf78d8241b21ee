#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "rcbtl/posterior.hpp"
#include "rcbtl/sampler.hpp"

namespace rcbtl {

/// True worth ladder for 8 objects grouped into K rank-clusters, with a
/// factor of 4 between successive clusters. K must be 1, 2, 4, or 8.
std::vector<double> truth_ladder(int k_clusters);

struct SimScenario {
  int num_objects = 8;
  int k_true = 2;  // selects the truth ladder
  double lambda = 2.0;
  int num_judges = 200;
  int replicates = 5;
  int outer_iters = 2000;
  int worth_sweeps = 2;
  int num_chains = 1;
  std::uint64_t seed = 1;
  double a_gamma = 5.0;
  double b_gamma = 3.0;

  void validate() const;
};

struct ReplicateMetrics {
  double mae = 0.0;
  RecoveryRates recovery;
  int k_mode = 0;  // posterior mode of the cluster count
};

struct CellResult {
  SimScenario scenario;
  std::vector<ReplicateMetrics> replicates;

  double median_mae() const;
};

/// Per replicate: draws num_judges complete rankings from the truth,
/// fits, and summarizes (first half burn-in). Replicates run in parallel
/// with counter-derived seeds.
CellResult run_scenario(const SimScenario& s);

/// "desk": (K=2, lambda=2, I=200), (2,2,800), (8,8,800), 5 replicates,
/// T1=2000, T2=2. "full": the 4x4x3 grid with 20 replicates and T1=5000.
std::vector<SimScenario> preset_scenarios(const std::string& name, std::uint64_t seed);

/// key=value lines: J, K, lambda, I, replicates, T1, T2, chains, seed.
SimScenario parse_scenario_file(const std::string& path);

void write_metrics_csv(const std::vector<CellResult>& cells, std::ostream& out);

}  // namespace rcbtl
