#include "rcbtl/prior.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "rcbtl/sampler.hpp"

namespace rcbtl {

namespace {

constexpr int kMaxExactObjects = 12;  // exact uint64 Stirling numbers

// table[n][k] = S(n, k), Stirling numbers of the second kind.
std::vector<std::vector<std::uint64_t>> stirling_table(int n_max) {
  std::vector<std::vector<std::uint64_t>> s(n_max + 1,
                                            std::vector<std::uint64_t>(n_max + 1, 0));
  s[0][0] = 1;
  for (int n = 1; n <= n_max; ++n)
    for (int k = 1; k <= n; ++k)
      s[n][k] = k * s[n - 1][k] + s[n - 1][k - 1];
  return s;
}

// Uniform draw among partitions of {1..n} into exactly k blocks, using the
// recursion S(n,k) = S(n-1,k-1) + k*S(n-1,k): element n either opens a new
// block or joins one of the k blocks of a smaller partition.
void uniform_partition_rec(int n, int k,
                           const std::vector<std::vector<std::uint64_t>>& s,
                           std::mt19937_64& rng, std::vector<int>& assignment,
                           int& blocks_used) {
  if (n == 0) return;
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  double p_new = static_cast<double>(s[n - 1][k - 1]) / static_cast<double>(s[n][k]);
  if (unif(rng) < p_new) {
    uniform_partition_rec(n - 1, k - 1, s, rng, assignment, blocks_used);
    assignment[n - 1] = ++blocks_used;
  } else {
    uniform_partition_rec(n - 1, k, s, rng, assignment, blocks_used);
    std::uniform_int_distribution<int> pick(1, k);
    assignment[n - 1] = pick(rng);
  }
}

}  // namespace

int canonicalize_assignment(std::vector<int>& assignment, std::vector<double>* values) {
  std::vector<int> relabel(assignment.size() + 1, 0);
  int next = 0;
  for (int& a : assignment) {
    if (a < 1 || a > static_cast<int>(assignment.size()))
      throw std::invalid_argument("cluster index outside 1..J");
    if (relabel[a] == 0) relabel[a] = ++next;
    a = relabel[a];
  }
  if (values != nullptr) {
    if (static_cast<int>(values->size()) < next)
      throw std::invalid_argument("worth vector shorter than the cluster count");
    std::vector<double> permuted(next);
    for (size_t old = 1; old < relabel.size(); ++old)
      if (relabel[old] != 0) permuted[relabel[old] - 1] = (*values)[old - 1];
    *values = std::move(permuted);
  }
  return next;
}

Partition Partition::singletons(int num_objects) {
  Partition g;
  g.assignment.resize(num_objects);
  std::iota(g.assignment.begin(), g.assignment.end(), 1);
  g.num_clusters = num_objects;
  return g;
}

Partition Partition::from_assignment(std::vector<int> assignment) {
  if (assignment.empty()) throw std::invalid_argument("empty assignment");
  Partition g;
  g.assignment = std::move(assignment);
  g.num_clusters = canonicalize_assignment(g.assignment, nullptr);
  return g;
}

std::vector<int> Partition::cluster_sizes() const {
  std::vector<int> sizes(num_clusters, 0);
  for (int a : assignment) ++sizes[a - 1];
  return sizes;
}

std::vector<std::vector<int>> Partition::clusters() const {
  std::vector<std::vector<int>> members(num_clusters);
  for (int j = 1; j <= size(); ++j) members[assignment[j - 1] - 1].push_back(j);
  return members;
}

std::string Partition::key() const {
  std::ostringstream out;
  for (size_t i = 0; i < assignment.size(); ++i)
    out << (i ? "|" : "") << assignment[i];
  return out.str();
}

void Hyperparameters::validate() const {
  if (!(lambda > 0) || !(a_gamma > 0) || !(b_gamma > 0))
    throw std::invalid_argument("lambda, a_gamma, b_gamma must be positive");
  if (!(birth_prob > 0) || !(birth_prob < 1))
    throw std::invalid_argument("birth probability must lie in (0,1)");
}

std::vector<double> omega_from(const Partition& g, const std::vector<double>& nu) {
  if (static_cast<int>(nu.size()) != g.num_clusters)
    throw std::invalid_argument("worth vector size does not match cluster count");
  std::vector<double> omega(g.size());
  for (int j = 1; j <= g.size(); ++j) omega[j - 1] = nu[g.cluster_of(j) - 1];
  return omega;
}

double log_partition_prior_ratio(int k_new, int k_old, double lambda) {
  return (k_new - k_old) * std::log(lambda) + std::lgamma(k_old + 1.0) -
         std::lgamma(k_new + 1.0);
}

double log_partition_prior_ratio(const Partition& g_new, const Partition& g_old,
                                 const Hyperparameters& h) {
  if (g_new.size() != g_old.size())
    throw std::invalid_argument("partitions cover different object sets");
  return log_partition_prior_ratio(g_new.num_clusters, g_old.num_clusters, h.lambda);
}

std::vector<double> stirling_k_pmf(int num_objects, double lambda) {
  if (num_objects < 1) throw std::invalid_argument("need at least one object");
  if (num_objects > kMaxExactObjects)
    throw std::invalid_argument("exact Stirling pmf limited to J <= 12");
  if (!(lambda > 0)) throw std::invalid_argument("lambda must be positive");
  auto s = stirling_table(num_objects);
  std::vector<double> pmf(num_objects);
  double log_lambda = std::log(lambda);
  for (int k = 1; k <= num_objects; ++k)
    pmf[k - 1] = std::exp(k * log_lambda - std::lgamma(k + 1.0) +
                          std::log(static_cast<double>(s[num_objects][k])));
  double total = std::accumulate(pmf.begin(), pmf.end(), 0.0);
  for (double& p : pmf) p /= total;
  return pmf;
}

double gamma_log_pdf(double x, double a, double b) {
  if (!(x > 0)) return -std::numeric_limits<double>::infinity();
  return a * std::log(b) - std::lgamma(a) + (a - 1.0) * std::log(x) - b * x;
}

std::pair<Partition, std::vector<double>> sample_prior(int num_objects,
                                                       const Hyperparameters& h,
                                                       std::mt19937_64& rng) {
  if (num_objects < 1) throw std::invalid_argument("need at least one object");
  h.validate();
  std::gamma_distribution<double> slab(h.a_gamma, 1.0 / h.b_gamma);

  if (num_objects > kMaxExactObjects) {
    // Flat-likelihood fallback: run the partition kernel on an empty
    // dataset so its stationary law is the prior itself.
    Dataset empty;
    empty.num_objects = num_objects;
    ChainState state;
    state.g = Partition::singletons(num_objects);
    state.nu.resize(num_objects);
    for (double& v : state.nu) v = slab(rng);
    for (int t = 0; t < 200 * num_objects; ++t) {
      step_partition(state, empty, h, rng);
      step_worths(state, empty, h, rng);
    }
    return {state.g, state.nu};
  }

  auto pmf = stirling_k_pmf(num_objects, h.lambda);
  std::discrete_distribution<int> k_dist(pmf.begin(), pmf.end());
  int k = k_dist(rng) + 1;

  auto s = stirling_table(num_objects);
  std::vector<int> assignment(num_objects, 0);
  int blocks_used = 0;
  uniform_partition_rec(num_objects, k, s, rng, assignment, blocks_used);

  std::vector<double> nu(k);
  for (double& v : nu) v = slab(rng);
  canonicalize_assignment(assignment, &nu);
  Partition g;
  g.assignment = std::move(assignment);
  g.num_clusters = k;
  return {g, nu};
}

}  // namespace rcbtl
