#include "rcbtl/sampler.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace rcbtl {

namespace {

constexpr double kWorthFloor = 1e-300;
constexpr double kSplitLow = 0.5;
constexpr double kSplitHigh = 1.5;

double log_two_pow_minus_one(int n) {
  // log(2^n - 1); for large n the -1 is below double resolution.
  if (n >= 50) return n * std::log(2.0);
  return std::log(std::exp2(static_cast<double>(n)) - 1.0);
}

std::vector<int> splittable_clusters(const ChainState& state) {
  auto sizes = state.g.cluster_sizes();
  std::vector<int> out;
  for (int k = 1; k <= state.g.num_clusters; ++k)
    if (sizes[k - 1] >= 2) out.push_back(k);
  return out;
}

void check_state(const ChainState& state) {
  if (static_cast<int>(state.nu.size()) != state.g.num_clusters)
    throw std::invalid_argument("worth vector size does not match cluster count");
}

}  // namespace

void ChainConfig::validate() const {
  if (outer_iters < 1 || worth_sweeps < 1 || num_chains < 1)
    throw std::invalid_argument("iteration and chain counts must be >= 1");
  if (burn_in < 0 || burn_in >= samples_per_chain())
    throw std::invalid_argument("burn-in must be < T1*T2");
  hyper.validate();
}

std::uint64_t derive_seed(std::uint64_t root, std::uint64_t index) {
  // splitmix64 of the counter stream, so task seeds never collide.
  std::uint64_t z = root + (index + 1) * 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

BirthProposal propose_birth(const ChainState& state, std::mt19937_64& rng) {
  check_state(state);
  auto splittable = splittable_clusters(state);
  if (splittable.empty())
    throw std::invalid_argument("no cluster with at least two members");

  std::uniform_int_distribution<size_t> pick(0, splittable.size() - 1);
  int parent = splittable[pick(rng)];
  std::vector<int> members = state.g.clusters()[parent - 1];
  int m = static_cast<int>(members.size());

  // Binomial split conditioned on both children nonempty.
  std::uniform_int_distribution<int> coin(0, 1);
  std::vector<int> side(m);
  for (;;) {
    int ones = 0;
    for (int i = 0; i < m; ++i) {
      side[i] = coin(rng);
      ones += side[i];
    }
    if (ones > 0 && ones < m) break;
  }

  std::uniform_real_distribution<double> u_dist(kSplitLow, kSplitHigh);
  double u = u_dist(rng);
  double nu_parent = state.nu[parent - 1];
  // The child holding the lowest object id takes u * nu_k.
  int low_side = side[0];
  double nu_low = u * nu_parent;
  double nu_other = nu_parent / u;

  BirthProposal p;
  p.geo.u = u;
  p.geo.nu_parent = nu_parent;
  p.geo.nu_child_low = nu_low;
  p.geo.nu_child_other = nu_other;
  p.geo.parent_size = m;
  p.geo.num_splittable = static_cast<int>(splittable.size());

  std::vector<int> assignment = state.g.assignment;
  int new_label = state.g.num_clusters + 1;
  for (int i = 0; i < m; ++i)
    if (side[i] != low_side) assignment[members[i] - 1] = new_label;
  std::vector<double> nu = state.nu;
  nu[parent - 1] = nu_low;
  nu.push_back(nu_other);

  int k_new = canonicalize_assignment(assignment, &nu);
  p.next.g.assignment = std::move(assignment);
  p.next.g.num_clusters = k_new;
  p.next.nu = std::move(nu);

  double lo = std::min(nu_low, nu_other);
  double hi = std::max(nu_low, nu_other);
  p.children_adjacent = true;
  for (int k = 1; k <= state.g.num_clusters; ++k) {
    if (k == parent) continue;
    if (state.nu[k - 1] > lo && state.nu[k - 1] < hi) p.children_adjacent = false;
  }
  return p;
}

DeathProposal propose_death(const ChainState& state, std::mt19937_64& rng) {
  check_state(state);
  int k_count = state.g.num_clusters;
  if (k_count < 2) throw std::invalid_argument("death requires K >= 2");

  // Adjacency = consecutive in worth order; there are K-1 such pairs.
  std::vector<int> order(k_count);
  std::iota(order.begin(), order.end(), 1);
  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return state.nu[a - 1] < state.nu[b - 1]; });
  std::uniform_int_distribution<int> pick(0, k_count - 2);
  int idx = pick(rng);
  int c1 = order[idx];
  int c2 = order[idx + 1];

  double nu_merged = std::sqrt(state.nu[c1 - 1] * state.nu[c2 - 1]);

  auto members = state.g.clusters();
  int low_id = std::min(members[c1 - 1].front(), members[c2 - 1].front());
  double nu_low = state.g.cluster_of(low_id) == c1 ? state.nu[c1 - 1] : state.nu[c2 - 1];
  double nu_other = state.g.cluster_of(low_id) == c1 ? state.nu[c2 - 1] : state.nu[c1 - 1];

  std::vector<int> assignment = state.g.assignment;
  for (int& a : assignment)
    if (a == c2) a = c1;
  std::vector<double> nu = state.nu;
  nu[c1 - 1] = nu_merged;
  // Drop the merged-away label before canonicalizing.
  nu.erase(nu.begin() + (c2 - 1));
  for (int& a : assignment)
    if (a > c2) --a;
  int k_new = canonicalize_assignment(assignment, &nu);

  DeathProposal p;
  p.merged.g.assignment = std::move(assignment);
  p.merged.g.num_clusters = k_new;
  p.merged.nu = std::move(nu);

  p.geo.u = nu_low / nu_merged;
  p.geo.nu_parent = nu_merged;
  p.geo.nu_child_low = nu_low;
  p.geo.nu_child_other = nu_other;
  p.geo.parent_size =
      static_cast<int>(members[c1 - 1].size() + members[c2 - 1].size());
  p.geo.num_splittable =
      static_cast<int>(splittable_clusters(p.merged).size());
  p.u_in_support = p.geo.u > kSplitLow && p.geo.u < kSplitHigh;
  return p;
}

double birth_log_acceptance(const Dataset& d, const Hyperparameters& h,
                            const ChainState& before, const ChainState& after,
                            const BirthGeometry& geo) {
  double ll_before = d.observations.empty()
                         ? 0.0
                         : dataset_log_likelihood(d, omega_from(before.g, before.nu));
  double ll_after = d.observations.empty()
                        ? 0.0
                        : dataset_log_likelihood(d, omega_from(after.g, after.nu));

  double log_a = ll_after - ll_before;
  log_a += gamma_log_pdf(geo.nu_child_low, h.a_gamma, h.b_gamma) +
           gamma_log_pdf(geo.nu_child_other, h.a_gamma, h.b_gamma) -
           gamma_log_pdf(geo.nu_parent, h.a_gamma, h.b_gamma);
  int k_after = after.g.num_clusters;
  log_a += log_partition_prior_ratio(k_after, before.g.num_clusters, h.lambda);
  // Proposal ratio: death of the new pair over birth of this split.
  log_a += std::log((1.0 - h.birth_prob) * geo.num_splittable) +
           log_two_pow_minus_one(geo.parent_size - 1);
  log_a -= std::log(h.birth_prob * (k_after - 1));
  // Jacobian of (u, nu_k) -> (u*nu_k, nu_k/u).
  log_a += std::log(2.0 * geo.nu_parent / geo.u);

  if (std::isnan(log_a))
    throw std::runtime_error("non-finite birth acceptance ratio");
  return log_a;
}

MoveRecord step_partition(ChainState& state, const Dataset& d,
                          const Hyperparameters& h, std::mt19937_64& rng) {
  check_state(state);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  MoveRecord rec;
  bool attempt_birth = unif(rng) < h.birth_prob;
  rec.type = attempt_birth ? MoveType::Birth : MoveType::Death;
  rec.log_accept = -std::numeric_limits<double>::infinity();

  if (attempt_birth) {
    if (splittable_clusters(state).empty()) return rec;  // all singletons
    rec.feasible = true;
    BirthProposal p = propose_birth(state, rng);
    if (!p.children_adjacent) return rec;  // automatic rejection
    rec.log_accept = birth_log_acceptance(d, h, state, p.next, p.geo);
    if (std::log(unif(rng)) < rec.log_accept) {
      state = std::move(p.next);
      rec.accepted = true;
    }
  } else {
    if (state.g.num_clusters < 2) return rec;
    rec.feasible = true;
    DeathProposal p = propose_death(state, rng);
    if (!p.u_in_support) return rec;  // reverse birth impossible
    rec.log_accept = -birth_log_acceptance(d, h, p.merged, state, p.geo);
    if (std::log(unif(rng)) < rec.log_accept) {
      state = std::move(p.merged);
      rec.accepted = true;
    }
  }
  return rec;
}

long step_worths(ChainState& state, const Dataset& d, const Hyperparameters& h,
                 std::mt19937_64& rng) {
  check_state(state);
  const int k_count = state.g.num_clusters;
  std::vector<double> shape(k_count, h.a_gamma);
  std::vector<double> rate(k_count, h.b_gamma);

  std::vector<int> delta(k_count);  // per-cluster remaining-object counts
  for (const auto& obs : d.observations) {
    std::fill(delta.begin(), delta.end(), 0);
    double remaining = 0.0;
    for (int id : obs.considered) {
      int k = state.g.cluster_of(id);
      ++delta[k - 1];
      remaining += state.nu[k - 1];
    }
    for (int id : obs.ranked) {
      int k = state.g.cluster_of(id);
      shape[k - 1] += 1.0;  // c_{ki}: ranked members per cluster
      if (!(remaining > 0.0))
        throw std::runtime_error("non-positive augmentation rate");
      std::exponential_distribution<double> expo(remaining);
      double y = expo(rng);
      for (int c = 0; c < k_count; ++c) rate[c] += y * delta[c];
      --delta[k - 1];
      remaining -= state.nu[k - 1];
    }
  }

  long clamps = 0;
  for (int k = 0; k < k_count; ++k) {
    std::gamma_distribution<double> gamma(shape[k], 1.0 / rate[k]);
    double v = gamma(rng);
    if (v < kWorthFloor) {
      v = kWorthFloor;
      ++clamps;
    }
    state.nu[k] = v;
  }
  return clamps;
}

ChainResult run_chain(const Dataset& d, const ChainConfig& cfg, int chain_index) {
  cfg.validate();
  if (d.num_objects < 2) throw std::invalid_argument("need at least 2 objects");
  std::mt19937_64 rng(derive_seed(cfg.seed, static_cast<std::uint64_t>(chain_index)));

  ChainState state;
  state.g = Partition::singletons(d.num_objects);
  state.nu.resize(d.num_objects);
  std::gamma_distribution<double> slab(cfg.hyper.a_gamma, 1.0 / cfg.hyper.b_gamma);
  for (double& v : state.nu) v = slab(rng);

  ChainResult result;
  result.samples.reserve(cfg.samples_per_chain());
  for (int t = 0; t < cfg.outer_iters; ++t) {
    MoveRecord rec = step_partition(state, d, cfg.hyper, rng);
    if (rec.type == MoveType::Birth) {
      ++result.birth_attempts;
      result.birth_accepts += rec.accepted;
    } else {
      ++result.death_attempts;
      result.death_accepts += rec.accepted;
    }
    for (int s = 0; s < cfg.worth_sweeps; ++s) {
      result.clamp_events += step_worths(state, d, cfg.hyper, rng);
      result.samples.push_back({state.g, state.nu});
    }
  }
  return result;
}

PosteriorSamples run_chains(const Dataset& d, const ChainConfig& cfg) {
  cfg.validate();
  PosteriorSamples out;
  out.num_objects = d.num_objects;
  out.config = cfg;
  out.chains.resize(cfg.num_chains);

  std::vector<std::exception_ptr> errors(cfg.num_chains);
#pragma omp parallel for schedule(dynamic)
  for (int c = 0; c < cfg.num_chains; ++c) {
    try {
      out.chains[c] = run_chain(d, cfg, c);
    } catch (...) {
      errors[c] = std::current_exception();
    }
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

void write_samples_csv(const PosteriorSamples& samples, std::ostream& out) {
  out << "iteration,chain,K";
  for (int j = 1; j <= samples.num_objects; ++j) out << ",omega_" << j;
  out << ",assignment\n";
  char buf[32];
  for (size_t c = 0; c < samples.chains.size(); ++c) {
    long iter = 0;
    for (const auto& rec : samples.chains[c].samples) {
      out << ++iter << ',' << c + 1 << ',' << rec.g.num_clusters;
      auto omega = omega_from(rec.g, rec.nu);
      for (double w : omega) {
        std::snprintf(buf, sizeof(buf), "%.17g", w);
        out << ',' << buf;
      }
      out << ',' << rec.g.key() << '\n';
    }
  }
}

}  // namespace rcbtl
