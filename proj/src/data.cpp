#include "rcbtl/data.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

#include <json.hpp>

namespace rcbtl {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& msg) { throw std::invalid_argument(msg); }

[[noreturn]] void fail_line(int line, const std::string& msg) {
  fail("line " + std::to_string(line) + ": " + msg);
}

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, sep)) out.push_back(trim(tok));
  return out;
}

bool is_positive_integer(const std::string& s) {
  if (s.empty()) return false;
  for (char c : s)
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  return s != "0" && !(s.size() > 1 && s[0] == '0');
}

// Raw tokens per row before label/id resolution.
struct RawRow {
  int line = 0;
  std::vector<std::string> ranked;
  std::vector<std::string> considered;  // empty means "all objects"
};

std::vector<RawRow> read_csv_rows(std::istream& in) {
  std::vector<RawRow> rows;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    RawRow row;
    row.line = lineno;
    auto bar = t.find('|');
    std::string ranked_part = bar == std::string::npos ? t : t.substr(0, bar);
    row.ranked = split(ranked_part, '>');
    if (bar != std::string::npos) row.considered = split(t.substr(bar + 1), ',');
    for (const auto& tok : row.ranked)
      if (tok.empty()) fail_line(lineno, "empty ranked entry");
    for (const auto& tok : row.considered)
      if (tok.empty()) fail_line(lineno, "empty considered entry");
    if (row.ranked.empty()) fail_line(lineno, "no ranked objects");
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<std::string> json_tokens(const json& arr, int lineno) {
  if (!arr.is_array()) fail_line(lineno, "expected an array");
  std::vector<std::string> out;
  for (const auto& v : arr) {
    if (v.is_number_integer()) {
      long id = v.get<long>();
      if (id < 1) fail_line(lineno, "object id must be >= 1");
      out.push_back(std::to_string(id));
    } else if (v.is_string()) {
      std::string s = trim(v.get<std::string>());
      if (s.empty()) fail_line(lineno, "empty object label");
      out.push_back(s);
    } else {
      fail_line(lineno, "object entries must be integers or strings");
    }
  }
  return out;
}

std::vector<RawRow> read_json_rows(std::istream& in) {
  std::vector<RawRow> rows;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string t = trim(line);
    if (t.empty()) continue;
    json obj;
    try {
      obj = json::parse(t);
    } catch (const json::parse_error& e) {
      fail_line(lineno, std::string("malformed JSON: ") + e.what());
    }
    if (!obj.is_object() || !obj.contains("ranked"))
      fail_line(lineno, "expected an object with a \"ranked\" key");
    RawRow row;
    row.line = lineno;
    row.ranked = json_tokens(obj["ranked"], lineno);
    if (obj.contains("considered"))
      row.considered = json_tokens(obj["considered"], lineno);
    if (row.ranked.empty()) fail_line(lineno, "no ranked objects");
    rows.push_back(std::move(row));
  }
  return rows;
}

Dataset resolve_rows(const std::vector<RawRow>& rows) {
  if (rows.empty()) fail("empty dataset");
  bool all_numeric = true;
  for (const auto& row : rows) {
    for (const auto& tok : row.ranked)
      all_numeric = all_numeric && is_positive_integer(tok);
    for (const auto& tok : row.considered)
      all_numeric = all_numeric && is_positive_integer(tok);
  }

  Dataset d;
  std::unordered_map<std::string, int> label_to_id;
  auto resolve = [&](const std::string& tok, int lineno) -> int {
    if (all_numeric) {
      long id = std::stol(tok);
      if (id > 10'000'000) fail_line(lineno, "object id out of range: " + tok);
      d.num_objects = std::max(d.num_objects, static_cast<int>(id));
      return static_cast<int>(id);
    }
    auto it = label_to_id.find(tok);
    if (it != label_to_id.end()) return it->second;
    int id = static_cast<int>(d.labels.size()) + 1;
    label_to_id.emplace(tok, id);
    d.labels.push_back(tok);
    d.num_objects = id;
    return id;
  };

  struct IdRow {
    int line;
    std::vector<int> ranked, considered;
  };
  std::vector<IdRow> id_rows;
  id_rows.reserve(rows.size());
  for (const auto& row : rows) {
    IdRow r;
    r.line = row.line;
    for (const auto& tok : row.ranked) r.ranked.push_back(resolve(tok, row.line));
    for (const auto& tok : row.considered)
      r.considered.push_back(resolve(tok, row.line));
    id_rows.push_back(std::move(r));
  }

  for (auto& r : id_rows) {
    Observation obs;
    obs.ranked = r.ranked;
    if (r.considered.empty()) {
      obs.considered.resize(d.num_objects);
      for (int j = 1; j <= d.num_objects; ++j) obs.considered[j - 1] = j;
    } else {
      obs.considered = r.considered;
      std::sort(obs.considered.begin(), obs.considered.end());
      if (std::adjacent_find(obs.considered.begin(), obs.considered.end()) !=
          obs.considered.end())
        fail_line(r.line, "duplicate id in considered set");
    }
    std::set<int> seen;
    for (int id : obs.ranked) {
      if (!seen.insert(id).second)
        fail_line(r.line, "duplicate id " + std::to_string(id) + " in ranking");
      if (!std::binary_search(obs.considered.begin(), obs.considered.end(), id))
        fail_line(r.line, "ranked id " + std::to_string(id) + " not in considered set");
    }
    if (obs.considered.size() < 2)
      fail_line(r.line, "considered set must contain at least 2 objects");
    d.observations.push_back(std::move(obs));
  }

  d.validate(true);
  return d;
}

std::string token_of(const Dataset& d, int id) {
  return d.labels.empty() ? std::to_string(id) : d.labels[id - 1];
}

}  // namespace

void Dataset::validate(bool require_observations) const {
  if (num_objects < 2) fail("dataset must contain at least 2 objects");
  if (require_observations && observations.empty()) fail("empty dataset");
  if (!labels.empty() && static_cast<int>(labels.size()) != num_objects)
    fail("label table size does not match the number of objects");
  for (const auto& obs : observations) {
    if (obs.ranked.empty()) fail("observation with no ranked objects");
    if (obs.considered.size() < 2) fail("considered set smaller than 2");
    if (obs.ranked.size() > obs.considered.size())
      fail("more ranked than considered objects");
    if (!std::is_sorted(obs.considered.begin(), obs.considered.end()) ||
        std::adjacent_find(obs.considered.begin(), obs.considered.end()) !=
            obs.considered.end())
      fail("considered set not sorted-unique");
    for (int id : obs.considered)
      if (id < 1 || id > num_objects)
        fail("object id " + std::to_string(id) + " outside 1.." +
             std::to_string(num_objects));
    std::set<int> seen;
    for (int id : obs.ranked) {
      if (!seen.insert(id).second) fail("duplicate id in ranking");
      if (!std::binary_search(obs.considered.begin(), obs.considered.end(), id))
        fail("ranked id not in considered set");
    }
  }
}

const std::string& Dataset::label_of(int id) const {
  static const std::string empty;
  if (labels.empty()) return empty;
  return labels[id - 1];
}

DataFormat format_from_name(const std::string& name) {
  if (name == "rankings-csv" || name == "csv") return DataFormat::RankingsCsv;
  if (name == "rankings-json" || name == "json") return DataFormat::RankingsJson;
  fail("unknown data format: " + name);
}

Dataset parse_dataset(const std::string& path, DataFormat format) {
  std::ifstream in(path);
  if (!in) fail("cannot open " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_dataset_text(buf.str(), format);
}

Dataset parse_dataset_text(const std::string& text, DataFormat format) {
  std::istringstream in(text);
  auto rows = format == DataFormat::RankingsCsv ? read_csv_rows(in)
                                                : read_json_rows(in);
  return resolve_rows(rows);
}

std::string serialize_dataset(const Dataset& d, DataFormat format) {
  std::ostringstream out;
  for (const auto& obs : d.observations) {
    if (format == DataFormat::RankingsCsv) {
      for (size_t i = 0; i < obs.ranked.size(); ++i)
        out << (i ? ">" : "") << token_of(d, obs.ranked[i]);
      out << "|";
      for (size_t i = 0; i < obs.considered.size(); ++i)
        out << (i ? "," : "") << token_of(d, obs.considered[i]);
      out << "\n";
    } else {
      json row;
      for (int id : obs.ranked) {
        if (d.labels.empty())
          row["ranked"].push_back(id);
        else
          row["ranked"].push_back(d.labels[id - 1]);
      }
      for (int id : obs.considered) {
        if (d.labels.empty())
          row["considered"].push_back(id);
        else
          row["considered"].push_back(d.labels[id - 1]);
      }
      out << row.dump() << "\n";
    }
  }
  return out.str();
}

RankFrequency dataset_summary(const Dataset& d) {
  RankFrequency f;
  f.rank_counts.assign(d.num_objects, std::vector<long>(d.num_objects, 0));
  f.unranked_counts.assign(d.num_objects, 0);
  for (const auto& obs : d.observations) {
    for (size_t r = 0; r < obs.ranked.size(); ++r)
      ++f.rank_counts[obs.ranked[r] - 1][r];
    for (int id : obs.considered)
      if (std::find(obs.ranked.begin(), obs.ranked.end(), id) == obs.ranked.end())
        ++f.unranked_counts[id - 1];
  }
  return f;
}

}  // namespace rcbtl
