// SPDX-License-Identifier: Apache-2.0
// promap: map a task graph onto a hierarchical PE topology, evaluate mappings,
// run seed-repeated benchmarks and emit performance profiles.
//
// Exit codes: 0 ok, 1 I/O or format error, 2 invalid configuration or
// mapping id, 3 mapping written but not balanced.
#include <chrono>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "promap/bench.hpp"
#include "promap/parallel.hpp"
#include "promap/pipelines.hpp"

namespace {

using namespace promap;

enum ExitCode : int { kOk = 0, kIoError = 1, kConfigError = 2, kImbalanced = 3 };

/// Invalid user input, reported with exit code 2.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct TopologyOptions {
  std::string hierarchy = "4:8:6";
  std::string distance = "1:10:100";
  double epsilon = 0.03;

  void add_to(CLI::App& app) {
    app.add_option("--hierarchy", hierarchy, "PE hierarchy a_1:...:a_l, bottom level first")->capture_default_str();
    app.add_option("--distance", distance, "Integer distances d_1:...:d_l")->capture_default_str();
    app.add_option("--epsilon", epsilon, "Allowed imbalance")->capture_default_str();
  }

  [[nodiscard]] Topology topology() const {
    if (epsilon < 0.0) throw ConfigError("--epsilon must be nonnegative");
    try {
      return Topology::parse(hierarchy, distance);
    } catch (const std::exception& e) {
      throw ConfigError(e.what());
    }
  }
};

struct AlgorithmOptions {
  std::string filter = "nonneg";
  double coarsest_factor = 128.0;
  RefinementSchedule schedule{};

  void add_to(CLI::App& app) {
    app.add_option("--phi", schedule.phi, "Relative improvement that resets the refinement counter")
        ->capture_default_str();
    app.add_option("--iw-max", schedule.iw_max, "Weak rebalancing rounds before a strong one")->capture_default_str();
    app.add_option("--rho", schedule.rho, "Mini-buckets per gain bucket")->capture_default_str();
    app.add_option("--sigma-coarse", schedule.sigma_coarse, "Rebalance slack on the coarsest level")
        ->capture_default_str();
    app.add_option("--sigma-fine", schedule.sigma_fine, "Rebalance slack on the input level")->capture_default_str();
    app.add_option("--filter", filter, "Label propagation filter")
        ->check(CLI::IsMember({"nonneg", "jet"}))
        ->capture_default_str();
    app.add_option("--coarsest-factor", coarsest_factor, "Coarsen below coarsest-factor * k vertices")
        ->capture_default_str();
  }

  [[nodiscard]] IntegratedConfig integrated(std::uint64_t seed) const {
    if (!(coarsest_factor > 0.0)) throw ConfigError("--coarsest-factor must be positive");
    IntegratedConfig cfg;
    cfg.coarsest_factor = coarsest_factor;
    cfg.refinement = schedule;
    cfg.refinement.filter = filter == "jet" ? FilterMode::kJet : FilterMode::kNonNegative;
    try {
      cfg.refinement.at_level(0, 0).validate();
    } catch (const std::exception& e) {
      throw ConfigError(e.what());
    }
    cfg.initial_partitioner.refinement = cfg.refinement;
    cfg.seed = seed;
    return cfg;
  }
};

Mapping run_pipeline(const std::string& algo, const Graph& g, const Topology& t, double epsilon,
                     const IntegratedConfig& cfg) {
  if (algo == "hm") {
    PartitionerConfig p = cfg.initial_partitioner;
    p.seed = cfg.seed;
    return hierarchical_multisection(g, t, epsilon, internal_partitioner(p)).mapping;
  }
  return integrated_map(g, t, epsilon, cfg).mapping;
}

Graph load_graph(const std::string& path) {
  try {
    return load_metis(path);
  } catch (const GraphFormatError&) {
    throw;
  } catch (const std::exception& e) {
    throw std::runtime_error(e.what());
  }
}

nlohmann::json evaluation(const Graph& g, const Topology& t, const Mapping& m, double epsilon) {
  const Cost j = total_cost(g, t, m);
  const BalanceSpec balance = BalanceSpec::make(epsilon, g.total_vertex_weight(), t.k());
  return {{"J", j},
          {"J_undirected", j / 2},
          {"balanced", balance.fits(m.max_block_weight())},
          {"max_block_weight", m.max_block_weight()},
          {"l_max", balance.l_max},
          {"k", t.k()}};
}

void write_json(const nlohmann::json& j, const std::string& path) {
  std::ofstream out(path);
  out << j.dump(2) << '\n';
  if (!out) throw std::runtime_error("cannot write " + path);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream in(s);
  for (std::string item; std::getline(in, item, ',');) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::string instance_name(const std::string& path) { return std::filesystem::path(path).stem().string(); }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Process mapping onto hierarchical PE topologies"};
  app.require_subcommand(1);
  int threads = 0;
  app.add_option("--threads", threads, "Worker threads (0 keeps the OpenMP default)");

  // map
  auto* map_cmd = app.add_subcommand("map", "Compute a mapping");
  std::string graph_path, out_path, stats_path, algo = "im";
  std::uint64_t seed = 0;
  TopologyOptions topo;
  AlgorithmOptions algo_opts;
  map_cmd->add_option("--graph", graph_path, "METIS graph file")->required();
  map_cmd->add_option("--out", out_path, "Mapping file, one PE id per line")->required();
  map_cmd->add_option("--stats", stats_path, "Stats JSON file");
  map_cmd->add_option("--algo", algo, "hm: multisection, im: integrated multilevel")
      ->check(CLI::IsMember({"hm", "im"}))
      ->capture_default_str();
  map_cmd->add_option("--seed", seed)->capture_default_str();
  map_cmd->add_option("--threads", threads, "Worker threads");
  topo.add_to(*map_cmd);
  algo_opts.add_to(*map_cmd);

  // eval
  auto* eval_cmd = app.add_subcommand("eval", "Evaluate a mapping file");
  std::string mapping_path;
  TopologyOptions eval_topo;
  eval_cmd->add_option("--graph", graph_path, "METIS graph file")->required();
  eval_cmd->add_option("--mapping", mapping_path, "Mapping file")->required();
  eval_topo.add_to(*eval_cmd);

  // bench
  auto* bench_cmd = app.add_subcommand("bench", "Run instances x algorithms x seeds");
  std::vector<std::string> graph_paths;
  std::string algos = "hm,im", raw_path, avg_path;
  int seeds = 5;
  TopologyOptions bench_topo;
  AlgorithmOptions bench_algo_opts;
  bench_cmd->add_option("--graphs", graph_paths, "METIS graph files")->required();
  bench_cmd->add_option("--algos", algos, "Comma separated subset of hm,im")->capture_default_str();
  bench_cmd->add_option("--seeds", seeds, "Seeds 0..seeds-1 per run")->capture_default_str();
  bench_cmd->add_option("--raw", raw_path, "Raw CSV output")->required();
  bench_cmd->add_option("--avg", avg_path, "Averaged CSV output")->required();
  bench_cmd->add_option("--threads", threads, "Worker threads");
  bench_topo.add_to(*bench_cmd);
  bench_algo_opts.add_to(*bench_cmd);

  // profile
  auto* profile_cmd = app.add_subcommand("profile", "Performance profile from averaged bench CSV");
  std::string input_path, profile_out;
  std::vector<double> taus;
  int steps = 21;
  profile_cmd->add_option("--input", input_path, "Averaged CSV")->required();
  profile_cmd->add_option("--out", profile_out, "Profile CSV (stdout when omitted)");
  profile_cmd->add_option("--tau", taus, "Explicit tau values");
  profile_cmd->add_option("--steps", steps, "Geometric grid size from 1.0 to 2.0")->capture_default_str();

  // gen
  auto* gen_cmd = app.add_subcommand("gen", "Write a generated graph in METIS format");
  std::string kind;
  std::int64_t rows = 0, cols = 0, n = 0;
  double radius = 0.55;
  gen_cmd->add_option("kind", kind)->required()->check(CLI::IsMember({"grid", "rgg"}));
  gen_cmd->add_option("--rows", rows);
  gen_cmd->add_option("--cols", cols);
  gen_cmd->add_option("--n", n);
  gen_cmd->add_option("--radius-factor", radius)->capture_default_str();
  gen_cmd->add_option("--seed", seed);
  gen_cmd->add_option("--out", out_path)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfigError;
  }

  if (threads < 0) {
    std::cerr << "error: --threads must be >= 0\n";
    return kConfigError;
  }
  if (threads > 0) par::set_threads(threads);

  try {
    if (*map_cmd) {
      const Topology t = topo.topology();
      const IntegratedConfig cfg = algo_opts.integrated(seed);
      const Graph g = load_graph(graph_path);
      if (g.n() == 0) throw ConfigError("graph has no vertices");
      const auto start = std::chrono::steady_clock::now();
      const Mapping m = run_pipeline(algo, g, t, topo.epsilon, cfg);
      const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
      write_mapping_file(m.assignment(), out_path);
      nlohmann::json stats = evaluation(g, t, m, topo.epsilon);
      stats["runtime_s"] = elapsed.count();
      stats["seed"] = seed;
      stats["algo"] = algo;
      if (!stats_path.empty()) write_json(stats, stats_path);
      std::cout << stats.dump() << '\n';
      return stats["balanced"].get<bool>() ? kOk : kImbalanced;
    }
    if (*eval_cmd) {
      const Topology t = eval_topo.topology();
      const Graph g = load_graph(graph_path);
      std::vector<BlockId> assignment = read_mapping_file(mapping_path);
      std::optional<Mapping> m;
      try {
        m.emplace(g, t.k(), std::move(assignment));
      } catch (const std::exception& e) {
        throw ConfigError(e.what());
      }
      std::cout << evaluation(g, t, *m, eval_topo.epsilon).dump() << '\n';
      return kOk;
    }
    if (*bench_cmd) {
      const Topology t = bench_topo.topology();
      if (seeds < 1) throw ConfigError("--seeds must be >= 1");
      const IntegratedConfig base = bench_algo_opts.integrated(0);
      std::vector<BenchAlgorithm> algorithms;
      for (const auto& name : split_list(algos)) {
        if (name != "hm" && name != "im") throw ConfigError("unknown algorithm '" + name + "'");
        algorithms.push_back({name, [name, base](const Graph& g, const Topology& topology, double eps,
                                                 std::uint64_t s) {
                                IntegratedConfig cfg = base;
                                cfg.seed = s;
                                return run_pipeline(name, g, topology, eps, cfg);
                              }});
      }
      std::vector<BenchInstance> instances;
      for (const auto& path : graph_paths) instances.push_back({instance_name(path), load_graph(path)});
      std::vector<std::uint64_t> seed_list;
      for (int s = 0; s < seeds; ++s) seed_list.push_back(static_cast<std::uint64_t>(s));
      const auto raw = run_bench(instances, t, bench_topo.epsilon, algorithms, seed_list);
      std::ofstream raw_out(raw_path), avg_out(avg_path);
      write_records_csv(raw_out, raw);
      write_records_csv(avg_out, average_records(raw));
      if (!raw_out || !avg_out) throw std::runtime_error("cannot write bench CSV output");
      return kOk;
    }
    if (*profile_cmd) {
      std::ifstream in(input_path);
      if (!in) throw std::runtime_error("cannot open " + input_path);
      const auto records = read_records_csv(in);
      if (taus.empty()) taus = default_tau_grid(steps);
      PerformanceProfile profile;
      try {
        profile = performance_profile(records, taus);
      } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
      }
      if (profile_out.empty()) {
        write_profile_csv(std::cout, profile);
      } else {
        std::ofstream out(profile_out);
        write_profile_csv(out, profile);
        if (!out) throw std::runtime_error("cannot write " + profile_out);
      }
      return kOk;
    }
    if (*gen_cmd) {
      Graph g;
      try {
        g = kind == "grid" ? gen_grid(rows, cols) : gen_rgg(n, radius, seed);
      } catch (const std::exception& e) {
        throw ConfigError(e.what());
      }
      write_metis(g, out_path);
      return kOk;
    }
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kIoError;
  }
  return kOk;
}
