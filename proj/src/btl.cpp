#include "rcbtl/btl.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace rcbtl {

namespace {

void check_omega(const std::vector<double>& omega) {
  for (double w : omega)
    if (!(w > 0.0) || !std::isfinite(w))
      throw std::invalid_argument("worths must be finite and positive");
}

// Core evaluation; returns NaN instead of throwing so it can run inside
// OpenMP regions. A fresh remaining-worth sum is accumulated per
// observation and updated by subtraction across stages.
double log_likelihood_core(const Observation& obs,
                           const std::vector<double>& omega) noexcept {
  double remaining = 0.0;
  for (int id : obs.considered) remaining += omega[id - 1];
  double ll = 0.0;
  for (int id : obs.ranked) {
    if (!(remaining > 0.0)) return std::numeric_limits<double>::quiet_NaN();
    double w = omega[id - 1];
    ll += std::log(w) - std::log(remaining);
    remaining -= w;
  }
  return ll;
}

}  // namespace

double pairwise_prob(double worth_i, double worth_j) {
  if (!(worth_i > 0.0) || !(worth_j > 0.0))
    throw std::invalid_argument("worths must be positive");
  return worth_i / (worth_i + worth_j);
}

double log_likelihood(const Observation& obs, const std::vector<double>& omega) {
  check_omega(omega);
  double ll = log_likelihood_core(obs, omega);
  if (std::isnan(ll))
    throw std::runtime_error("non-positive remaining worth in likelihood");
  return ll;
}

double dataset_log_likelihood_serial(const Dataset& d,
                                     const std::vector<double>& omega) {
  double total = 0.0;
  for (const auto& obs : d.observations) total += log_likelihood_core(obs, omega);
  if (std::isnan(total))
    throw std::runtime_error("non-positive remaining worth in likelihood");
  return total;
}

double dataset_log_likelihood(const Dataset& d, const std::vector<double>& omega) {
#ifdef _OPENMP
  const long n = static_cast<long>(d.observations.size());
  if (n < 256) return dataset_log_likelihood_serial(d, omega);
  // Per-thread partials summed in thread-id order: deterministic for a
  // fixed thread count.
  std::vector<double> partial(omp_get_max_threads(), 0.0);
#pragma omp parallel for schedule(static)
  for (long i = 0; i < n; ++i)
    partial[omp_get_thread_num()] += log_likelihood_core(d.observations[i], omega);
  double total = 0.0;
  for (double p : partial) total += p;
  if (std::isnan(total))
    throw std::runtime_error("non-positive remaining worth in likelihood");
  return total;
#else
  return dataset_log_likelihood_serial(d, omega);
#endif
}

Observation sample_ranking(const std::vector<double>& omega,
                           std::vector<int> considered, int depth,
                           std::mt19937_64& rng) {
  check_omega(omega);
  std::sort(considered.begin(), considered.end());
  if (depth < 1 || depth > static_cast<int>(considered.size()))
    throw std::invalid_argument("depth must be in 1..|considered|");
  for (int id : considered)
    if (id < 1 || id > static_cast<int>(omega.size()))
      throw std::invalid_argument("considered id outside the worth vector");

  Observation obs;
  obs.considered = considered;
  std::vector<int> pool = considered;
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int r = 0; r < depth; ++r) {
    double total = 0.0;
    for (int id : pool) total += omega[id - 1];
    double target = unif(rng) * total;
    size_t pick = 0;
    double acc = 0.0;
    for (size_t i = 0; i < pool.size(); ++i) {
      acc += omega[pool[i] - 1];
      if (target < acc || i + 1 == pool.size()) {
        pick = i;
        break;
      }
    }
    obs.ranked.push_back(pool[pick]);
    pool.erase(pool.begin() + pick);
  }
  return obs;
}

}  // namespace rcbtl
