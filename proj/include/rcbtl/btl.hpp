#pragma once

#include <random>
#include <vector>

#include "rcbtl/data.hpp"

namespace rcbtl {

/// P[i beats j] = w_i / (w_i + w_j). Both worths must be > 0.
double pairwise_prob(double worth_i, double worth_j);

/// Log-probability of one observation under sequential choice with
/// probabilities proportional to the remaining worths. omega[j-1] is the
/// worth of object j; all entries must be finite and positive.
double log_likelihood(const Observation& obs, const std::vector<double>& omega);

/// Sum of per-observation log-likelihoods. OpenMP-parallel over
/// observations when built with OpenMP; falls back to the serial path
/// otherwise.
double dataset_log_likelihood(const Dataset& d, const std::vector<double>& omega);

/// Serial reference implementation, kept for testing and benchmarking the
/// parallel path against.
double dataset_log_likelihood_serial(const Dataset& d, const std::vector<double>& omega);

/// Draws the top `depth` objects of a ranking over `considered` by
/// sequential selection without replacement, proportional to worths.
Observation sample_ranking(const std::vector<double>& omega,
                           std::vector<int> considered, int depth,
                           std::mt19937_64& rng);

}  // namespace rcbtl
