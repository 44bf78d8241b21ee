#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "rcbtl/prior.hpp"
#include "rcbtl/sampler.hpp"

namespace rcbtl {

struct PosteriorSummary {
  int num_objects = 0;
  double credible_level = 0.8;
  // Retained draws pooled over chains, each normalized to sum to 1.
  std::vector<std::vector<double>> normalized_draws;
  std::vector<double> median;  // per object, of the normalized worth
  std::vector<double> ci_low;
  std::vector<double> ci_high;
  std::vector<std::vector<double>> coclustering;  // J x J, symmetric
  Partition map_partition;  // modal canonical partition among retained draws
  std::vector<double> k_pmf;  // index k-1
  int k_ci_low = 0;
  int k_ci_high = 0;
  // Object ids in report order: descending posterior median worth.
  std::vector<int> display_order;
};

/// Drops the first `burn_in` records of each chain and pools the rest.
PosteriorSummary summarize(const PosteriorSamples& samples, int burn_in,
                           double credible_level = 0.8);

/// Mean over retained draws and objects of |draw_j - truth_j|, both sides
/// normalized to sum to 1.
double mae_against_truth(const PosteriorSummary& summary,
                         std::vector<double> omega_true);

struct RecoveryRates {
  std::optional<double> clustered_pairs;  // mean co-clustering, truly equal pairs
  std::optional<double> distinct_pairs;   // mean co-clustering, truly distinct pairs
};

RecoveryRates cluster_recovery_rates(const PosteriorSummary& summary,
                                     const std::vector<double>& omega_true);

/// Long-format CSV (iteration, chain, variable, value) over all recorded
/// samples; variables are K and each un-normalized omega_j.
void export_traces(const PosteriorSamples& samples, std::ostream& out);
void export_traces(const PosteriorSamples& samples, const std::string& path);

/// Split-chain potential scale reduction on m sequences (each split in
/// half). Reports a large finite value when within-sequence variance is 0.
double split_rhat(const std::vector<std::vector<double>>& chains_draws);

/// variable is "K" or "omega_<j>"; omega draws are normalized per draw.
double rhat(const PosteriorSamples& samples, const std::string& variable,
            int burn_in);

void write_summary_json(const PosteriorSummary& summary,
                        const std::vector<std::string>& labels,
                        std::ostream& out);

}  // namespace rcbtl
