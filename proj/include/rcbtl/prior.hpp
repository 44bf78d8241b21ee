#pragma once

#include <random>
#include <string>
#include <utility>
#include <vector>

namespace rcbtl {

/// A set partition of objects 1..J into clusters 1..K, stored in canonical
/// form: clusters are numbered by order of first member, so cluster 1 is
/// always the cluster of object 1. Canonical form makes equality and the
/// string key well-defined for posterior tabulation.
struct Partition {
  std::vector<int> assignment;  // size J, values in 1..num_clusters
  int num_clusters = 0;

  static Partition singletons(int num_objects);
  // Canonicalizes; throws on non-contiguous or empty cluster labels.
  static Partition from_assignment(std::vector<int> assignment);

  int size() const { return static_cast<int>(assignment.size()); }
  int cluster_of(int object_id) const { return assignment[object_id - 1]; }
  std::vector<int> cluster_sizes() const;
  std::vector<std::vector<int>> clusters() const;  // member ids per cluster
  std::string key() const;                         // e.g. "1|1|2"

  bool operator==(const Partition&) const = default;
};

// Relabels `assignment` to canonical form in place. If `values` is
// non-null it is permuted alongside (one value per cluster). Returns K.
int canonicalize_assignment(std::vector<int>& assignment, std::vector<double>* values);

struct Hyperparameters {
  double lambda = 2.0;    // Poisson rate on the number of clusters
  double a_gamma = 5.0;   // slab shape
  double b_gamma = 3.0;   // slab rate
  double birth_prob = 0.5;

  void validate() const;
};

/// omega_j = nu_{cluster_of(j)}.
std::vector<double> omega_from(const Partition& g, const std::vector<double>& nu);

/// log of the partition-prior ratio f_G(g_new)/f_G(g_old); the normalizer
/// over all partitions cancels, leaving a Poisson pmf ratio in the cluster
/// counts alone.
double log_partition_prior_ratio(int k_new, int k_old, double lambda);
double log_partition_prior_ratio(const Partition& g_new, const Partition& g_old,
                                 const Hyperparameters& h);

/// P(K = k) for k = 1..J under the partition prior, computed from exact
/// Stirling numbers of the second kind. Requires J <= 12.
std::vector<double> stirling_k_pmf(int num_objects, double lambda);

/// Draws (partition, cluster worths) from the prior. Exact for J <= 12
/// (cluster count from the Stirling-weighted pmf, then a uniform partition
/// with that count); for larger J, falls back to running the partition
/// kernel with a flat likelihood.
std::pair<Partition, std::vector<double>> sample_prior(int num_objects,
                                                       const Hyperparameters& h,
                                                       std::mt19937_64& rng);

/// log Gamma(x | shape a, rate b) density.
double gamma_log_pdf(double x, double a, double b);

}  // namespace rcbtl
