#include "rcbtl/posterior.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <stdexcept>

#include <json.hpp>

namespace rcbtl {

namespace {

double quantile(std::vector<double> sorted, double q) {
  // Linear interpolation between order statistics (R type 7).
  const size_t n = sorted.size();
  if (n == 0) throw std::invalid_argument("quantile of empty sample");
  double pos = q * (n - 1);
  size_t lo = static_cast<size_t>(pos);
  size_t hi = std::min(lo + 1, n - 1);
  double frac = pos - lo;
  return sorted[lo] * (1.0 - frac) + sorted[hi] * frac;
}

std::vector<double> normalize(const std::vector<double>& omega) {
  double total = std::accumulate(omega.begin(), omega.end(), 0.0);
  std::vector<double> out(omega.size());
  for (size_t j = 0; j < omega.size(); ++j) out[j] = omega[j] / total;
  return out;
}

}  // namespace

PosteriorSummary summarize(const PosteriorSamples& samples, int burn_in,
                           double credible_level) {
  if (credible_level <= 0 || credible_level >= 1)
    throw std::invalid_argument("credible level must lie in (0,1)");
  const int num_objects = samples.num_objects;

  PosteriorSummary s;
  s.num_objects = num_objects;
  s.credible_level = credible_level;

  std::vector<const SampleRecord*> retained;
  for (const auto& chain : samples.chains) {
    if (burn_in < 0 || burn_in >= static_cast<int>(chain.samples.size()))
      throw std::invalid_argument("burn-in must be < sample count per chain");
    for (size_t i = burn_in; i < chain.samples.size(); ++i)
      retained.push_back(&chain.samples[i]);
  }
  if (retained.empty()) throw std::invalid_argument("no retained samples");
  const size_t n = retained.size();

  s.normalized_draws.reserve(n);
  s.coclustering.assign(num_objects, std::vector<double>(num_objects, 0.0));
  s.k_pmf.assign(num_objects, 0.0);
  std::map<std::string, long> partition_counts;

  for (const auto* rec : retained) {
    s.normalized_draws.push_back(normalize(omega_from(rec->g, rec->nu)));
    s.k_pmf[rec->g.num_clusters - 1] += 1.0;
    ++partition_counts[rec->g.key()];
    for (int i = 1; i <= num_objects; ++i)
      for (int j = i; j <= num_objects; ++j)
        if (rec->g.cluster_of(i) == rec->g.cluster_of(j)) {
          s.coclustering[i - 1][j - 1] += 1.0;
          if (i != j) s.coclustering[j - 1][i - 1] += 1.0;
        }
  }
  for (auto& row : s.coclustering)
    for (double& v : row) v /= static_cast<double>(n);
  for (double& p : s.k_pmf) p /= static_cast<double>(n);

  // MAP partition: most frequent canonical form; ties to smaller K, then
  // lexicographically smaller key (map iteration is already key-ordered).
  long best = -1;
  int best_k = 0;
  for (const auto& [key, count] : partition_counts) {
    Partition g = Partition::from_assignment([&] {
      std::vector<int> a;
      size_t pos = 0;
      while (pos <= key.size()) {
        size_t next = key.find('|', pos);
        if (next == std::string::npos) next = key.size();
        a.push_back(std::stoi(key.substr(pos, next - pos)));
        pos = next + 1;
      }
      return a;
    }());
    if (count > best || (count == best && g.num_clusters < best_k)) {
      best = count;
      best_k = g.num_clusters;
      s.map_partition = g;
    }
  }

  // Per-object medians and equal-tailed intervals over normalized draws.
  double alpha = (1.0 - credible_level) / 2.0;
  s.median.resize(num_objects);
  s.ci_low.resize(num_objects);
  s.ci_high.resize(num_objects);
  std::vector<double> column(n);
  for (int j = 0; j < num_objects; ++j) {
    for (size_t i = 0; i < n; ++i) column[i] = s.normalized_draws[i][j];
    std::sort(column.begin(), column.end());
    s.median[j] = quantile(column, 0.5);
    s.ci_low[j] = quantile(column, alpha);
    s.ci_high[j] = quantile(column, 1.0 - alpha);
  }

  // Central interval on K from the empirical cdf.
  double cdf = 0.0;
  s.k_ci_low = 0;
  s.k_ci_high = 0;
  for (int k = 1; k <= num_objects; ++k) {
    cdf += s.k_pmf[k - 1];
    if (s.k_ci_low == 0 && cdf >= alpha) s.k_ci_low = k;
    if (s.k_ci_high == 0 && cdf >= 1.0 - alpha) s.k_ci_high = k;
  }
  if (s.k_ci_high == 0) s.k_ci_high = num_objects;

  s.display_order.resize(num_objects);
  std::iota(s.display_order.begin(), s.display_order.end(), 1);
  std::stable_sort(s.display_order.begin(), s.display_order.end(),
                   [&](int a, int b) { return s.median[a - 1] > s.median[b - 1]; });
  return s;
}

double mae_against_truth(const PosteriorSummary& summary,
                         std::vector<double> omega_true) {
  if (static_cast<int>(omega_true.size()) != summary.num_objects)
    throw std::invalid_argument("truth dimension mismatch");
  omega_true = normalize(omega_true);
  double total = 0.0;
  for (const auto& draw : summary.normalized_draws)
    for (int j = 0; j < summary.num_objects; ++j)
      total += std::abs(draw[j] - omega_true[j]);
  return total / (summary.normalized_draws.size() * summary.num_objects);
}

RecoveryRates cluster_recovery_rates(const PosteriorSummary& summary,
                                     const std::vector<double>& omega_true) {
  if (static_cast<int>(omega_true.size()) != summary.num_objects)
    throw std::invalid_argument("truth dimension mismatch");
  double clustered_sum = 0.0, distinct_sum = 0.0;
  long clustered_n = 0, distinct_n = 0;
  for (int i = 0; i < summary.num_objects; ++i)
    for (int j = i + 1; j < summary.num_objects; ++j) {
      if (omega_true[i] == omega_true[j]) {
        clustered_sum += summary.coclustering[i][j];
        ++clustered_n;
      } else {
        distinct_sum += summary.coclustering[i][j];
        ++distinct_n;
      }
    }
  RecoveryRates r;
  if (clustered_n > 0) r.clustered_pairs = clustered_sum / clustered_n;
  if (distinct_n > 0) r.distinct_pairs = distinct_sum / distinct_n;
  return r;
}

void export_traces(const PosteriorSamples& samples, std::ostream& out) {
  out << "iteration,chain,variable,value\n";
  char buf[32];
  for (size_t c = 0; c < samples.chains.size(); ++c) {
    long iter = 0;
    for (const auto& rec : samples.chains[c].samples) {
      ++iter;
      out << iter << ',' << c + 1 << ",K," << rec.g.num_clusters << '\n';
      auto omega = omega_from(rec.g, rec.nu);
      for (int j = 1; j <= samples.num_objects; ++j) {
        std::snprintf(buf, sizeof(buf), "%.17g", omega[j - 1]);
        out << iter << ',' << c + 1 << ",omega_" << j << ',' << buf << '\n';
      }
    }
  }
}

void export_traces(const PosteriorSamples& samples, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  export_traces(samples, out);
}

double split_rhat(const std::vector<std::vector<double>>& chains_draws) {
  if (chains_draws.size() < 2)
    throw std::invalid_argument("need at least 2 chains");
  std::vector<std::vector<double>> seqs;
  for (const auto& chain : chains_draws) {
    size_t n = chain.size() / 2;
    if (n < 2) throw std::invalid_argument("need at least 4 draws per chain");
    seqs.emplace_back(chain.begin(), chain.begin() + n);
    seqs.emplace_back(chain.begin() + n, chain.begin() + 2 * n);
  }
  const size_t m = seqs.size();
  const size_t n = seqs[0].size();
  std::vector<double> means(m), vars(m);
  for (size_t j = 0; j < m; ++j) {
    double mean = std::accumulate(seqs[j].begin(), seqs[j].end(), 0.0) / n;
    double ss = 0.0;
    for (double v : seqs[j]) ss += (v - mean) * (v - mean);
    means[j] = mean;
    vars[j] = ss / (n - 1);
  }
  double grand = std::accumulate(means.begin(), means.end(), 0.0) / m;
  double b = 0.0;
  for (double mu : means) b += (mu - grand) * (mu - grand);
  b *= static_cast<double>(n) / (m - 1);
  double w = std::accumulate(vars.begin(), vars.end(), 0.0) / m;
  if (w <= 0.0) return b > 0.0 ? 1e12 : 1.0;
  double var_plus = (static_cast<double>(n) - 1.0) / n * w + b / n;
  return std::sqrt(var_plus / w);
}

double rhat(const PosteriorSamples& samples, const std::string& variable,
            int burn_in) {
  std::vector<std::vector<double>> chains;
  for (const auto& chain : samples.chains) {
    if (burn_in < 0 || burn_in >= static_cast<int>(chain.samples.size()))
      throw std::invalid_argument("burn-in must be < sample count per chain");
    std::vector<double> seq;
    for (size_t i = burn_in; i < chain.samples.size(); ++i) {
      const auto& rec = chain.samples[i];
      if (variable == "K") {
        seq.push_back(rec.g.num_clusters);
      } else if (variable.rfind("omega_", 0) == 0) {
        int j = std::stoi(variable.substr(6));
        if (j < 1 || j > samples.num_objects)
          throw std::invalid_argument("unknown variable " + variable);
        seq.push_back(normalize(omega_from(rec.g, rec.nu))[j - 1]);
      } else {
        throw std::invalid_argument("unknown variable " + variable);
      }
    }
    chains.push_back(std::move(seq));
  }
  return split_rhat(chains);
}

void write_summary_json(const PosteriorSummary& summary,
                        const std::vector<std::string>& labels,
                        std::ostream& out) {
  nlohmann::json j;
  j["num_objects"] = summary.num_objects;
  j["credible_level"] = summary.credible_level;
  j["median"] = summary.median;
  j["ci_low"] = summary.ci_low;
  j["ci_high"] = summary.ci_high;
  j["coclustering"] = summary.coclustering;
  j["map_partition"] = summary.map_partition.assignment;
  j["k_pmf"] = summary.k_pmf;
  j["k_ci"] = {summary.k_ci_low, summary.k_ci_high};
  j["display_order"] = summary.display_order;
  if (!labels.empty()) j["labels"] = labels;
  out << j.dump(2) << "\n";
}

}  // namespace rcbtl
