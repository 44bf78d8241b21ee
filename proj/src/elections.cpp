#include "rcbtl/elections.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace rcbtl {

namespace {

std::vector<long> mention_counts(const Dataset& d) {
  std::vector<long> mentions(d.num_objects, 0);
  for (const auto& obs : d.observations)
    for (int id : obs.ranked) ++mentions[id - 1];
  return mentions;
}

}  // namespace

ElectionResult fpp_ranking(const Dataset& d) {
  d.validate(true);
  std::vector<long> first_votes(d.num_objects, 0);
  for (const auto& obs : d.observations) ++first_votes[obs.ranked.front() - 1];
  auto mentions = mention_counts(d);

  std::vector<int> order;
  for (int j = 1; j <= d.num_objects; ++j)
    if (mentions[j - 1] > 0) order.push_back(j);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (first_votes[a - 1] != first_votes[b - 1])
      return first_votes[a - 1] > first_votes[b - 1];
    return a < b;
  });

  ElectionResult res;
  res.method = "fpp";
  res.ranks.assign(d.num_objects, 0);
  for (size_t i = 0; i < order.size(); ++i) res.ranks[order[i] - 1] = i + 1;
  return res;
}

ElectionResult irv_ranking(const Dataset& d) {
  d.validate(true);
  auto mentions = mention_counts(d);
  std::vector<bool> active(d.num_objects, false);
  int num_active = 0;
  for (int j = 1; j <= d.num_objects; ++j)
    if (mentions[j - 1] > 0) {
      active[j - 1] = true;
      ++num_active;
    }

  ElectionResult res;
  res.method = "irv";
  res.ranks.assign(d.num_objects, 0);
  int next_rank_from_bottom = num_active;
  int round = 0;

  while (num_active > 1) {
    ++round;
    std::vector<long> votes(d.num_objects, 0);
    long live_ballots = 0;
    for (const auto& obs : d.observations)
      for (int id : obs.ranked)
        if (active[id - 1]) {
          ++votes[id - 1];
          ++live_ballots;
          break;  // ballot counts for its top active choice only
        }

    // Lowest current vote count loses the round; ties go to fewest total
    // mentions, then lowest id.
    int loser = 0;
    for (int j = 1; j <= d.num_objects; ++j) {
      if (!active[j - 1]) continue;
      if (loser == 0 || votes[j - 1] < votes[loser - 1] ||
          (votes[j - 1] == votes[loser - 1] &&
           (mentions[j - 1] < mentions[loser - 1] ||
            (mentions[j - 1] == mentions[loser - 1] && j < loser))))
        loser = j;
    }
    active[loser - 1] = false;
    res.ranks[loser - 1] = next_rank_from_bottom--;
    --num_active;

    std::ostringstream log;
    log << "round " << round << ": eliminated "
        << (d.labels.empty() ? std::to_string(loser) : d.label_of(loser))
        << " with " << votes[loser - 1] << " of " << live_ballots
        << " live ballots";
    res.round_log.push_back(log.str());
  }
  for (int j = 1; j <= d.num_objects; ++j)
    if (active[j - 1]) res.ranks[j - 1] = 1;
  return res;
}

void write_election_json(const std::vector<ElectionResult>& results,
                         const Dataset& d, std::ostream& out) {
  nlohmann::json j;
  j["num_candidates"] = d.num_objects;
  if (!d.labels.empty()) j["labels"] = d.labels;
  for (const auto& res : results) {
    nlohmann::json r;
    r["method"] = res.method;
    r["ranks"] = res.ranks;
    if (!res.round_log.empty()) r["rounds"] = res.round_log;
    j["results"].push_back(r);
  }
  out << j.dump(2) << "\n";
}

}  // namespace rcbtl
