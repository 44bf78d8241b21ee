// Command-line front end: `fit` runs the rank-clustered BTL sampler on a
// rankings file, `simulate` runs the simulation-study harness, and
// `elections` tabulates deterministic voting baselines.

#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "rcbtl/data.hpp"
#include "rcbtl/elections.hpp"
#include "rcbtl/posterior.hpp"
#include "rcbtl/sampler.hpp"
#include "rcbtl/sim.hpp"

namespace {

constexpr const char* kVersion = "0.1.0";

namespace fs = std::filesystem;
using nlohmann::json;

std::string fnv1a_digest(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::invalid_argument("cannot open " + path);
  std::uint64_t h = 1469598103934665603ull;
  char c;
  while (in.get(c)) {
    h ^= static_cast<unsigned char>(c);
    h *= 1099511628211ull;
  }
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string default_out_dir() {
  const char* env = std::getenv("RCBTL_OUT_DIR");
  return env != nullptr && *env != '\0' ? env : ".";
}

rcbtl::DataFormat resolve_format(const std::string& flag, const std::string& path) {
  if (!flag.empty()) return rcbtl::format_from_name(flag);
  return path.size() >= 4 && path.substr(path.size() - 4) == ".csv"
             ? rcbtl::DataFormat::RankingsCsv
             : rcbtl::DataFormat::RankingsJson;
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << content;
}

void write_manifest(const fs::path& dir, const std::string& command,
                    const json& config, std::uint64_t seed,
                    const std::string& input_path, double seconds) {
  json m;
  m["command"] = command;
  m["version"] = kVersion;
  m["seed"] = seed;
  m["config"] = config;
  if (!input_path.empty()) {
    m["input_path"] = input_path;
    m["input_digest"] = fnv1a_digest(input_path);
  }
  m["seconds"] = seconds;
  std::ofstream out(dir / "manifest.json");
  out << m.dump(2) << "\n";
}

struct FitOptions {
  std::string data_path;
  std::string format;
  double lambda = 2.0, a_gamma = 5.0, b_gamma = 3.0;
  int t1 = 5000, t2 = 2, chains = 4;
  double burn_in_frac = 0.5;
  std::uint64_t seed = 1;
  std::string out_dir = default_out_dir();
};

int run_fit(const FitOptions& opt) {
  auto start = std::chrono::steady_clock::now();
  auto d = rcbtl::parse_dataset(opt.data_path, resolve_format(opt.format, opt.data_path));

  rcbtl::ChainConfig cfg;
  cfg.outer_iters = opt.t1;
  cfg.worth_sweeps = opt.t2;
  cfg.num_chains = opt.chains;
  cfg.seed = opt.seed;
  cfg.burn_in = static_cast<int>(cfg.samples_per_chain() * opt.burn_in_frac);
  cfg.hyper.lambda = opt.lambda;
  cfg.hyper.a_gamma = opt.a_gamma;
  cfg.hyper.b_gamma = opt.b_gamma;
  cfg.validate();

  auto samples = rcbtl::run_chains(d, cfg);
  auto summary = rcbtl::summarize(samples, cfg.burn_in);

  fs::path dir(opt.out_dir);
  fs::create_directories(dir);
  {
    std::ofstream out(dir / "samples.csv", std::ios::binary);
    rcbtl::write_samples_csv(samples, out);
  }
  {
    std::ofstream out(dir / "summary.json");
    rcbtl::write_summary_json(summary, d.labels, out);
  }
  rcbtl::export_traces(samples, (dir / "trace.csv").string());

  long accepted = 0, attempted = 0;
  for (const auto& chain : samples.chains) {
    accepted += chain.birth_accepts + chain.death_accepts;
    attempted += chain.birth_attempts + chain.death_attempts;
  }
  json config{{"data", opt.data_path},    {"lambda", opt.lambda},
              {"a_gamma", opt.a_gamma},   {"b_gamma", opt.b_gamma},
              {"t1", opt.t1},             {"t2", opt.t2},
              {"chains", opt.chains},     {"burn_in_frac", opt.burn_in_frac},
              {"burn_in", cfg.burn_in}};
  config["acceptance_rate"] =
      attempted > 0 ? static_cast<double>(accepted) / attempted : 0.0;
  double seconds = std::chrono::duration<double>(
                       std::chrono::steady_clock::now() - start)
                       .count();
  write_manifest(dir, "fit", config, opt.seed, opt.data_path, seconds);
  std::cout << "wrote " << (dir / "samples.csv").string() << ", summary.json, "
            << "trace.csv, manifest.json\n";
  return 0;
}

struct SimulateOptions {
  std::string preset;
  std::string scenario_path;
  std::uint64_t seed = 1;
  std::string out_dir = default_out_dir();
};

int run_simulate(const SimulateOptions& opt) {
  auto start = std::chrono::steady_clock::now();
  std::vector<rcbtl::SimScenario> scenarios;
  if (!opt.scenario_path.empty()) {
    auto s = rcbtl::parse_scenario_file(opt.scenario_path);
    s.seed = rcbtl::derive_seed(opt.seed, 0);
    scenarios.push_back(s);
  } else {
    scenarios = rcbtl::preset_scenarios(opt.preset, opt.seed);
  }

  std::vector<rcbtl::CellResult> cells;
  for (const auto& s : scenarios) cells.push_back(rcbtl::run_scenario(s));

  fs::path dir(opt.out_dir);
  fs::create_directories(dir);
  {
    std::ofstream out(dir / "metrics.csv", std::ios::binary);
    rcbtl::write_metrics_csv(cells, out);
  }
  json config;
  config["preset"] = opt.preset;
  if (!opt.scenario_path.empty()) config["scenario"] = opt.scenario_path;
  config["cells"] = cells.size();
  double seconds = std::chrono::duration<double>(
                       std::chrono::steady_clock::now() - start)
                       .count();
  write_manifest(dir, "simulate", config, opt.seed, opt.scenario_path, seconds);
  std::cout << "wrote " << (dir / "metrics.csv").string() << ", manifest.json\n";
  return 0;
}

struct ElectionOptions {
  std::string data_path;
  std::string format;
  std::string rc_summary_path;   // fitted rank-clustered summary JSON
  std::string btl_summary_path;  // fitted plain-BTL summary JSON
  std::string out_path;
};

// Ranks from a posterior summary: the BTL row orders candidates by
// posterior median; the rank-clustered row assigns each MAP cluster one
// dense rank, clusters ordered by their members' median worth.
std::vector<int> summary_ranks(const json& s, bool use_map_clusters) {
  std::vector<double> median = s.at("median").get<std::vector<double>>();
  int n = static_cast<int>(median.size());
  std::vector<int> ranks(n, 0);
  if (!use_map_clusters) {
    std::vector<int> order = s.at("display_order").get<std::vector<int>>();
    for (int i = 0; i < n; ++i) ranks[order[i] - 1] = i + 1;
    return ranks;
  }
  std::vector<int> assignment = s.at("map_partition").get<std::vector<int>>();
  int k = *std::max_element(assignment.begin(), assignment.end());
  std::vector<double> cluster_med(k, 0.0);
  std::vector<int> cluster_size(k, 0);
  for (int j = 0; j < n; ++j) {
    cluster_med[assignment[j] - 1] += median[j];
    ++cluster_size[assignment[j] - 1];
  }
  for (int c = 0; c < k; ++c) cluster_med[c] /= cluster_size[c];
  std::vector<int> order(k);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return cluster_med[a] > cluster_med[b]; });
  std::vector<int> cluster_rank(k);
  for (int i = 0; i < k; ++i) cluster_rank[order[i]] = i + 1;
  for (int j = 0; j < n; ++j) ranks[j] = cluster_rank[assignment[j] - 1];
  return ranks;
}

int run_elections(const ElectionOptions& opt) {
  auto d = rcbtl::parse_dataset(opt.data_path, resolve_format(opt.format, opt.data_path));
  auto fpp = rcbtl::fpp_ranking(d);
  auto irv = rcbtl::irv_ranking(d);

  json out;
  out["num_candidates"] = d.num_objects;
  if (!d.labels.empty()) out["labels"] = d.labels;
  json table;
  table["irv"] = irv.ranks;
  table["fpp"] = fpp.ranks;
  out["rounds"] = irv.round_log;

  auto load = [](const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open " + path);
    return json::parse(in);
  };
  if (!opt.btl_summary_path.empty())
    table["btl"] = summary_ranks(load(opt.btl_summary_path), false);
  if (!opt.rc_summary_path.empty())
    table["rc_btl"] = summary_ranks(load(opt.rc_summary_path), true);
  out["ranks"] = table;

  if (opt.out_path.empty()) {
    std::cout << out.dump(2) << "\n";
  } else {
    write_file(opt.out_path, out.dump(2) + "\n");
    std::cout << "wrote " << opt.out_path << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Rank-clustered Bradley-Terry-Luce inference"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  FitOptions fit;
  auto* cmd_fit = app.add_subcommand("fit", "Fit the model to a rankings file");
  cmd_fit->add_option("--data", fit.data_path, "Rankings file")->required();
  cmd_fit->add_option("--format", fit.format, "rankings-csv or rankings-json");
  cmd_fit->add_option("--lambda", fit.lambda, "Poisson rate on cluster count");
  cmd_fit->add_option("--a-gamma", fit.a_gamma, "Slab shape");
  cmd_fit->add_option("--b-gamma", fit.b_gamma, "Slab rate");
  cmd_fit->add_option("--t1", fit.t1, "Outer iterations");
  cmd_fit->add_option("--t2", fit.t2, "Worth sweeps per iteration");
  cmd_fit->add_option("--chains", fit.chains, "Number of chains");
  cmd_fit->add_option("--burn-in-frac", fit.burn_in_frac, "Burn-in fraction");
  cmd_fit->add_option("--seed", fit.seed, "Root seed");
  cmd_fit->add_option("--out-dir", fit.out_dir, "Output directory");

  SimulateOptions sim;
  auto* cmd_sim = app.add_subcommand("simulate", "Run the simulation harness");
  auto* preset_opt = cmd_sim->add_option("--preset", sim.preset, "desk or full");
  cmd_sim->add_option("--scenario", sim.scenario_path, "Scenario file")
      ->excludes(preset_opt);
  cmd_sim->add_option("--seed", sim.seed, "Root seed");
  cmd_sim->add_option("--out-dir", sim.out_dir, "Output directory");

  ElectionOptions elec;
  auto* cmd_elec = app.add_subcommand("elections", "Deterministic vote tabulations");
  cmd_elec->add_option("--data", elec.data_path, "Rankings file")->required();
  cmd_elec->add_option("--format", elec.format, "rankings-csv or rankings-json");
  cmd_elec->add_option("--rc-summary", elec.rc_summary_path,
                       "Rank-clustered fit summary JSON");
  cmd_elec->add_option("--btl-summary", elec.btl_summary_path,
                       "Plain BTL fit summary JSON (large lambda)");
  cmd_elec->add_option("--out", elec.out_path, "Output JSON path");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*cmd_fit) return run_fit(fit);
    if (*cmd_sim) {
      if (sim.preset.empty() && sim.scenario_path.empty()) {
        std::cerr << "error: need --preset or --scenario\n";
        return 1;
      }
      return run_simulate(sim);
    }
    if (*cmd_elec) return run_elections(elec);
  } catch (const std::invalid_argument& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "runtime fault: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
