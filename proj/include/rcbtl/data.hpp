#pragma once

#include <string>
#include <vector>

namespace rcbtl {

/// One judge's ordinal preference: the objects they ranked, in order of
/// preference, plus the full set of objects they considered. A pairwise
/// comparison is |considered| == 2 with the winner (and optionally the
/// loser) in `ranked`; a partial ranking has |ranked| < |considered|.
struct Observation {
  std::vector<int> ranked;      // object ids, most preferred first
  std::vector<int> considered;  // sorted ascending, superset of ranked
};

/// A collection of ordinal observations over objects 1..num_objects.
/// Immutable after construction; safe to share across parallel chains.
struct Dataset {
  int num_objects = 0;
  std::vector<Observation> observations;
  std::vector<std::string> labels;  // empty, or label for id i at [i-1]

  // Throws std::invalid_argument on any structural violation.
  void validate(bool require_observations = false) const;

  const std::string& label_of(int id) const;
};

enum class DataFormat { RankingsCsv, RankingsJson };

DataFormat format_from_name(const std::string& name);

// rankings-json: one JSON object per line, keys "ranked" (array) and
// optional "considered" (array). rankings-csv: per line, ranked ids joined
// by '>', optionally followed by '|' and the considered ids joined by ','.
// Omitted `considered` means all objects. Ids may be integers (used as-is,
// must be dense 1..J) or strings (mapped to ids by first appearance).
Dataset parse_dataset(const std::string& path, DataFormat format);
Dataset parse_dataset_text(const std::string& text, DataFormat format);
std::string serialize_dataset(const Dataset& d, DataFormat format);

/// Per-object rank-frequency table: rank_counts[j-1][r-1] is the number of
/// times object j received rank r; unranked_counts[j-1] counts observations
/// where j was considered but not ranked.
struct RankFrequency {
  std::vector<std::vector<long>> rank_counts;
  std::vector<long> unranked_counts;
};

RankFrequency dataset_summary(const Dataset& d);

}  // namespace rcbtl
