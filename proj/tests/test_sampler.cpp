#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <random>
#include <sstream>

#include "rcbtl/posterior.hpp"
#include "rcbtl/sampler.hpp"

using namespace rcbtl;

namespace {

Dataset empty_dataset(int num_objects) {
  Dataset d;
  d.num_objects = num_objects;
  return d;
}

ChainState make_state(std::vector<int> assignment, std::vector<double> nu) {
  ChainState s;
  s.g.assignment = std::move(assignment);
  s.g.num_clusters = canonicalize_assignment(s.g.assignment, &nu);
  s.nu = std::move(nu);
  return s;
}

}  // namespace

TEST_CASE("split map and merge map are inverses") {
  for (double nu : {0.01, 1.0, 100.0}) {
    for (double u : {0.5 + 1e-9, 1.0, 1.5 - 1e-9}) {
      double child1 = u * nu;
      double child2 = nu / u;
      double merged = std::sqrt(child1 * child2);
      CHECK(merged == doctest::Approx(nu).epsilon(1e-12));
    }
  }
  // Worked split: nu_k = 3, u = 1.2.
  CHECK(1.2 * 3.0 == doctest::Approx(3.6));
  CHECK(3.0 / 1.2 == doctest::Approx(2.5));
  CHECK(std::sqrt(3.6 * 2.5) == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("birth proposals split binomially with the stated geometry") {
  std::mt19937_64 rng(7);
  auto state = make_state({1, 1, 1}, {3.0});

  std::map<std::string, int> split_counts;
  const int trials = 30000;
  for (int i = 0; i < trials; ++i) {
    auto p = propose_birth(state, rng);
    REQUIRE(p.next.g.num_clusters == 2);
    REQUIRE(p.geo.parent_size == 3);
    REQUIRE(p.geo.num_splittable == 1);
    CHECK(p.geo.nu_child_low == doctest::Approx(p.geo.u * 3.0));
    CHECK(p.geo.nu_child_other == doctest::Approx(3.0 / p.geo.u));
    // The lowest-id child carries u * nu.
    CHECK(p.next.nu[p.next.g.cluster_of(1) - 1] ==
          doctest::Approx(p.geo.nu_child_low));
    ++split_counts[p.next.g.key()];
  }
  // A 3-cluster has (2^3-2)/2 = 3 distinct unordered splits, equally likely.
  REQUIRE(split_counts.size() == 3);
  for (const auto& [key, count] : split_counts)
    CHECK(std::abs(count - trials / 3.0) < 4 * std::sqrt(trials * (1.0 / 3) * (2.0 / 3)));

  // A 2-cluster has exactly one split.
  auto pair_state = make_state({1, 1}, {2.0});
  auto p = propose_birth(pair_state, rng);
  CHECK(p.next.g.key() == "1|2");
}

TEST_CASE("death proposals merge adjacent worths only") {
  std::mt19937_64 rng(11);
  auto state = make_state({1, 2, 3}, {1.0, 10.0, 100.0});
  std::map<std::string, int> merged;
  for (int i = 0; i < 2000; ++i) {
    auto p = propose_death(state, rng);
    ++merged[p.merged.g.key()];
    CHECK(p.merged.g.num_clusters == 2);
  }
  // Adjacent pairs are {1,10} and {10,100}; never {1,100}.
  CHECK(merged.size() == 2);
  CHECK(merged.count("1|1|2") == 1);
  CHECK(merged.count("1|2|2") == 1);

  // Children (3.6, 2.5) merge back to 3.
  auto children = make_state({1, 2}, {3.6, 2.5});
  auto q = propose_death(children, rng);
  CHECK(q.merged.nu[0] == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(q.geo.u == doctest::Approx(1.2).epsilon(1e-12));
  CHECK(q.u_in_support);
}

TEST_CASE("acceptance ratio terms") {
  Hyperparameters h;
  // Jacobian factor alone: 2*nu/u at nu=2, u=0.8 is 5.
  CHECK(2.0 * 2.0 / 0.8 == doctest::Approx(5.0));

  // Flat likelihood, lambda = e so the Poisson ratio log is 1 - log(K+1):
  // verify the full assembled ratio against a hand computation for a
  // 2-object split with one splittable cluster.
  auto before = make_state({1, 1}, {2.0});
  BirthGeometry geo;
  geo.u = 0.8;
  geo.nu_parent = 2.0;
  geo.nu_child_low = 1.6;
  geo.nu_child_other = 2.5;
  geo.parent_size = 2;
  geo.num_splittable = 1;
  auto after = make_state({1, 2}, {1.6, 2.5});

  Dataset d = empty_dataset(2);
  double log_a = birth_log_acceptance(d, h, before, after, geo);
  double expected = gamma_log_pdf(1.6, h.a_gamma, h.b_gamma) +
                    gamma_log_pdf(2.5, h.a_gamma, h.b_gamma) -
                    gamma_log_pdf(2.0, h.a_gamma, h.b_gamma) +
                    log_partition_prior_ratio(2, 1, h.lambda) +
                    std::log(0.5 * 1 * 1.0) - std::log(0.5 * 1.0) +
                    std::log(2.0 * 2.0 / 0.8);
  CHECK(log_a == doctest::Approx(expected).epsilon(1e-12));
  // The proposal-ratio term itself is log 1 = 0 in this configuration.
  CHECK(std::log((1 - h.birth_prob) * 1 * (std::exp2(1.0) - 1)) -
            std::log(h.birth_prob * 1) ==
        doctest::Approx(0.0));
}

TEST_CASE("matched birth and death log ratios cancel") {
  std::mt19937_64 rng(13);
  Hyperparameters h;
  Dataset d = empty_dataset(5);
  for (int trial = 0; trial < 200; ++trial) {
    std::gamma_distribution<double> slab(h.a_gamma, 1.0 / h.b_gamma);
    auto state = make_state({1, 1, 2, 2, 1}, {slab(rng), slab(rng)});
    auto p = propose_birth(state, rng);
    if (!p.children_adjacent) continue;
    double la_birth = birth_log_acceptance(d, h, state, p.next, p.geo);

    // Reconstruct the matched death from the post-birth state.
    auto q = propose_death(p.next, rng);
    // Only compare when the sampled death picked the same pair.
    if (q.merged.g == state.g) {
      double la_death = -birth_log_acceptance(d, h, q.merged, p.next, q.geo);
      CHECK(la_birth + la_death == doctest::Approx(0.0).epsilon(1e-10));
      CHECK(q.merged.nu[0] == doctest::Approx(state.nu[0]).epsilon(1e-12));
    }
  }
}

TEST_CASE("boundary moves are no-op rejections") {
  std::mt19937_64 rng(17);
  Hyperparameters h;
  Dataset d = empty_dataset(3);

  // K = 1: every drawn death is infeasible.
  auto merged = make_state({1, 1, 1}, {1.0});
  // All singletons: every drawn birth is infeasible.
  auto singles = make_state({1, 2, 3}, {1.0, 2.0, 3.0});
  int death_attempts = 0, birth_attempts = 0;
  for (int i = 0; i < 200; ++i) {
    auto s = merged;
    auto rec = step_partition(s, d, h, rng);
    if (rec.type == MoveType::Death) {
      ++death_attempts;
      CHECK_FALSE(rec.feasible);
      CHECK_FALSE(rec.accepted);
      CHECK(s.g == merged.g);
    }
    auto s2 = singles;
    auto rec2 = step_partition(s2, d, h, rng);
    if (rec2.type == MoveType::Birth) {
      ++birth_attempts;
      CHECK_FALSE(rec2.feasible);
      CHECK_FALSE(rec2.accepted);
      CHECK(s2.g == singles.g);
    }
  }
  CHECK(death_attempts > 0);
  CHECK(birth_attempts > 0);
}

TEST_CASE("non-adjacent births are automatically rejected") {
  std::mt19937_64 rng(19);
  Hyperparameters h;
  Dataset d = empty_dataset(4);
  // Cluster worths 1 and 1.05: a split of the size-2 cluster at worth 1
  // frequently brackets 1.05, which must auto-reject.
  bool saw_nonadjacent = false;
  for (int i = 0; i < 2000; ++i) {
    auto state = make_state({1, 1, 2, 3}, {1.0, 1.05, 1.3});
    auto p = propose_birth(state, rng);
    if (!p.children_adjacent) {
      saw_nonadjacent = true;
      break;
    }
  }
  CHECK(saw_nonadjacent);
}

TEST_CASE("augmentation counts match the stage bookkeeping") {
  // Observation ranked [3,1] over {1,2,3}, clusters {1,3} and {2}.
  auto d = parse_dataset_text("{\"ranked\":[3,1],\"considered\":[1,2,3]}\n",
                              DataFormat::RankingsJson);
  auto g = Partition::from_assignment({1, 2, 1});

  // c_{ki}: both ranked objects live in cluster 1.
  // Run many sweeps at a fixed partition and compare the posterior mean of
  // nu against the closed-form shape/rate structure: with no data the draw
  // is the prior.
  Hyperparameters h;
  std::mt19937_64 rng(23);
  ChainState state;
  state.g = g;
  state.nu = {1.0, 1.0};

  // Empty data: worth updates sample the slab.
  Dataset empty = empty_dataset(3);
  double sum = 0.0;
  const int sweeps = 20000;
  for (int i = 0; i < sweeps; ++i) {
    step_worths(state, empty, h, rng);
    sum += state.nu[0];
  }
  CHECK(sum / sweeps == doctest::Approx(h.a_gamma / h.b_gamma).epsilon(0.02));
}

TEST_CASE("exponential rates equal the likelihood stage denominators") {
  // Computed indirectly: with worths fixed, the mean of the drawn
  // exponential must be the reciprocal of the stage denominator.
  auto d = parse_dataset_text("{\"ranked\":[3,1],\"considered\":[1,2,3]}\n",
                              DataFormat::RankingsJson);
  auto g = Partition::from_assignment({1, 2, 1});
  std::vector<double> nu{2.0, 0.5};
  auto omega = omega_from(g, nu);

  // Stage denominators from the likelihood side.
  std::vector<double> denom;
  double remaining = omega[0] + omega[1] + omega[2];
  for (int id : d.observations[0].ranked) {
    denom.push_back(remaining);
    remaining -= omega[id - 1];
  }
  CHECK(denom[0] == doctest::Approx(4.5).epsilon(1e-12));
  CHECK(denom[1] == doctest::Approx(2.5).epsilon(1e-12));

  // delta_{irk} at r=2: remaining objects {1,2} -> one per cluster, so the
  // rate is nu_1 + nu_2 = 2.5, matching the second denominator.
  CHECK(nu[0] * 1 + nu[1] * 1 == doctest::Approx(denom[1]).epsilon(1e-12));
}

TEST_CASE("empty data leaves the prior invariant through the full kernel") {
  Dataset d = empty_dataset(4);
  ChainConfig cfg;
  cfg.outer_iters = 20000;
  cfg.worth_sweeps = 1;
  cfg.num_chains = 1;
  cfg.seed = 101;
  cfg.hyper.lambda = 2.0;

  auto samples = run_chains(d, cfg);
  auto pmf = stirling_k_pmf(4, 2.0);
  std::vector<double> freq(4, 0.0);
  for (const auto& rec : samples.chains[0].samples)
    freq[rec.g.num_clusters - 1] += 1.0;
  for (double& f : freq) f /= samples.chains[0].samples.size();
  double tv = 0.0;
  for (int k = 0; k < 4; ++k) tv += std::abs(freq[k] - pmf[k]);
  CHECK(tv / 2 < 0.05);
}

TEST_CASE("deterministic replay") {
  auto d = parse_dataset_text("1>2|1,2,3\n3>1\n2|2,3\n", DataFormat::RankingsCsv);
  ChainConfig cfg;
  cfg.outer_iters = 50;
  cfg.worth_sweeps = 2;
  cfg.num_chains = 2;
  cfg.seed = 42;

  auto a = run_chains(d, cfg);
  auto b = run_chains(d, cfg);
  std::ostringstream csv_a, csv_b;
  write_samples_csv(a, csv_a);
  write_samples_csv(b, csv_b);
  CHECK(csv_a.str() == csv_b.str());

  ChainConfig other = cfg;
  other.seed = 43;
  std::ostringstream csv_c;
  write_samples_csv(run_chains(d, other), csv_c);
  CHECK(csv_a.str() != csv_c.str());
}

TEST_CASE("run_chain records T1*T2 samples and valid states") {
  auto d = parse_dataset_text("1>2|1,2,3\n", DataFormat::RankingsCsv);
  ChainConfig cfg;
  cfg.outer_iters = 100;
  cfg.worth_sweeps = 3;
  cfg.num_chains = 1;
  auto samples = run_chains(d, cfg);
  REQUIRE(samples.chains[0].samples.size() == 300);
  for (const auto& rec : samples.chains[0].samples) {
    CHECK(static_cast<int>(rec.nu.size()) == rec.g.num_clusters);
    for (double v : rec.nu) CHECK(v > 0);
  }
}
