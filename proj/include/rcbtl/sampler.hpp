#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <random>
#include <vector>

#include "rcbtl/btl.hpp"
#include "rcbtl/data.hpp"
#include "rcbtl/prior.hpp"

namespace rcbtl {

struct ChainConfig {
  int outer_iters = 5000;   // partition-move iterations (T1)
  int worth_sweeps = 2;     // worth-update sweeps per outer iteration (T2)
  int num_chains = 4;
  int burn_in = 0;          // records dropped per chain when summarizing
  std::uint64_t seed = 1;
  Hyperparameters hyper;

  long samples_per_chain() const {
    return static_cast<long>(outer_iters) * worth_sweeps;
  }
  void validate() const;
};

struct ChainState {
  Partition g;
  std::vector<double> nu;  // nu[k-1] is the worth shared by cluster k
};

struct SampleRecord {
  Partition g;
  std::vector<double> nu;
};

struct ChainResult {
  std::vector<SampleRecord> samples;
  long birth_attempts = 0;
  long birth_accepts = 0;
  long death_attempts = 0;
  long death_accepts = 0;
  long clamp_events = 0;  // worths clamped away from underflow
};

struct PosteriorSamples {
  int num_objects = 0;
  ChainConfig config;
  std::vector<ChainResult> chains;
};

enum class MoveType { Birth, Death };

struct MoveRecord {
  MoveType type = MoveType::Birth;
  bool feasible = false;
  bool accepted = false;
  double log_accept = 0.0;  // log acceptance ratio of the attempted move
};

/// Geometry of a split: parent worth nu_k maps to children (u*nu_k,
/// nu_k/u). `nu_child_low` is the worth of the child containing the lowest
/// object id (which receives u*nu_k).
struct BirthGeometry {
  double u = 1.0;
  double nu_parent = 1.0;
  double nu_child_low = 1.0;
  double nu_child_other = 1.0;
  int parent_size = 0;      // members of the split cluster
  int num_splittable = 0;   // clusters of size >= 2 before the split
};

struct BirthProposal {
  ChainState next;  // canonical state after the split
  BirthGeometry geo;
  bool children_adjacent = false;  // no other worth strictly between the children
};

struct DeathProposal {
  ChainState merged;  // canonical state after the merge
  BirthGeometry geo;  // geometry of the matched reverse birth
  bool u_in_support = false;  // recovered u falls in (0.5, 1.5)
};

/// Requires at least one cluster with >= 2 members.
BirthProposal propose_birth(const ChainState& state, std::mt19937_64& rng);

/// Requires K >= 2. Merges a uniformly chosen pair of clusters adjacent in
/// worth order; the merged worth is the geometric mean of the pair.
DeathProposal propose_death(const ChainState& state, std::mt19937_64& rng);

/// log A for the birth move `before` -> `after` with geometry `geo`. The
/// matched death uses -log A. Throws on non-finite intermediates.
double birth_log_acceptance(const Dataset& d, const Hyperparameters& h,
                            const ChainState& before, const ChainState& after,
                            const BirthGeometry& geo);

/// One reversible-jump partition move. Infeasible draws (birth
/// with all singletons, death with K=1) leave the state unchanged and are
/// recorded as rejections.
MoveRecord step_partition(ChainState& state, const Dataset& d,
                          const Hyperparameters& h, std::mt19937_64& rng);

/// One data-augmented worth sweep: draws the latent exponentials
/// at the stage-denominator rates, then each cluster worth from its
/// closed-form Gamma full conditional. Returns the number of clamp events.
long step_worths(ChainState& state, const Dataset& d, const Hyperparameters& h,
                 std::mt19937_64& rng);

ChainResult run_chain(const Dataset& d, const ChainConfig& cfg, int chain_index);

/// Runs cfg.num_chains chains in parallel (OpenMP) with independent
/// counter-derived seeds. The dataset may be empty (flat likelihood), in
/// which case the chain targets the prior.
PosteriorSamples run_chains(const Dataset& d, const ChainConfig& cfg);

/// CSV columns: iteration, chain, K, omega_1..omega_J (un-normalized),
/// assignment (cluster indices joined by '|'). Deterministic formatting.
void write_samples_csv(const PosteriorSamples& samples, std::ostream& out);

/// Seed for chain/task `index` derived from a root seed by counter.
std::uint64_t derive_seed(std::uint64_t root, std::uint64_t index);

}  // namespace rcbtl
