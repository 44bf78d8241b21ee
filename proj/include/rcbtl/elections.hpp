#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "rcbtl/data.hpp"

namespace rcbtl {

struct ElectionResult {
  std::string method;
  // ranks[j-1] is the rank of candidate j (1 = winner); 0 marks candidates
  // who never appear on any ballot.
  std::vector<int> ranks;
  std::vector<std::string> round_log;  // per-round elimination log (IRV)
};

/// Candidates ordered by first-place vote count, descending; ties broken
/// by candidate id ascending. Later preferences never affect the order.
ElectionResult fpp_ranking(const Dataset& d);

/// Single-winner instant-runoff: repeatedly eliminate the candidate with
/// fewest first-active-choice votes, transferring ballots to their next
/// active choice; exhausted ballots drop out. Final rank is the reverse
/// elimination order. Elimination ties go to the candidate with fewest
/// total mentions across all ranks, then lowest id; the same rule orders
/// remaining candidates if every ballot exhausts.
ElectionResult irv_ranking(const Dataset& d);

void write_election_json(const std::vector<ElectionResult>& results,
                         const Dataset& d, std::ostream& out);

}  // namespace rcbtl
