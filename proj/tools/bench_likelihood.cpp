// Compares the serial reference and OpenMP dataset log-likelihood on
// synthetic data of increasing size.

#include <chrono>
#include <cstdio>
#include <random>
#include <vector>

#include "rcbtl/btl.hpp"
#include "rcbtl/data.hpp"

int main() {
  std::mt19937_64 rng(7);
  const int num_objects = 20;
  std::vector<double> omega(num_objects);
  std::gamma_distribution<double> slab(5.0, 1.0 / 3.0);
  for (double& w : omega) w = slab(rng);
  std::vector<int> all(num_objects);
  for (int j = 1; j <= num_objects; ++j) all[j - 1] = j;

  std::printf("%12s %14s %14s %10s\n", "observations", "serial (ms)", "openmp (ms)",
              "speedup");
  for (long n : {1000L, 10000L, 100000L, 500000L}) {
    rcbtl::Dataset d;
    d.num_objects = num_objects;
    d.observations.reserve(n);
    for (long i = 0; i < n; ++i)
      d.observations.push_back(rcbtl::sample_ranking(omega, all, num_objects, rng));

    auto time_ms = [&](auto&& fn) {
      // Warm-up, then best of 5.
      volatile double sink = fn();
      double best = 1e18;
      for (int rep = 0; rep < 5; ++rep) {
        auto t0 = std::chrono::steady_clock::now();
        sink = fn();
        auto t1 = std::chrono::steady_clock::now();
        best = std::min(best, std::chrono::duration<double, std::milli>(t1 - t0).count());
      }
      (void)sink;
      return best;
    };

    double serial =
        time_ms([&] { return rcbtl::dataset_log_likelihood_serial(d, omega); });
    double parallel = time_ms([&] { return rcbtl::dataset_log_likelihood(d, omega); });
    std::printf("%12ld %14.3f %14.3f %9.2fx\n", n, serial, parallel,
                serial / parallel);
  }
  return 0;
}
