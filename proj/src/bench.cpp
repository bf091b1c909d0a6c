// SPDX-License-Identifier: Apache-2.0
#include "promap/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <stdexcept>

#include "promap/csv.hpp"

namespace promap {
namespace {

const std::vector<std::string> kRecordHeader{"instance", "algorithm", "seed", "J", "runtime_s", "balanced",
                                             "max_block_weight"};

/// Shortest representation that parses back to the same double.
std::string format_double(double x) {
  char buf[32];
  for (int precision = 1; precision <= 17; ++precision) {
    std::snprintf(buf, sizeof buf, "%.*g", precision, x);
    if (std::strtod(buf, nullptr) == x) break;
  }
  return buf;
}

template <typename T>
T parse_number(const std::string& field, std::size_t row) {
  try {
    std::size_t used = 0;
    T value{};
    if constexpr (std::is_same_v<T, double>) {
      value = std::stod(field, &used);
    } else if constexpr (std::is_unsigned_v<T>) {
      value = static_cast<T>(std::stoull(field, &used));
    } else {
      value = static_cast<T>(std::stoll(field, &used));
    }
    if (used != field.size()) throw std::invalid_argument(field);
    return value;
  } catch (const std::exception&) {
    throw std::runtime_error("CSV row " + std::to_string(row) + ": bad number '" + field + "'");
  }
}

}  // namespace

std::vector<RunRecord> run_bench(const std::vector<BenchInstance>& instances, const Topology& t, double epsilon,
                                 const std::vector<BenchAlgorithm>& algorithms,
                                 const std::vector<std::uint64_t>& seeds) {
  std::vector<RunRecord> records;
  for (const auto& instance : instances) {
    const BalanceSpec balance = BalanceSpec::make(epsilon, instance.graph.total_vertex_weight(), t.k());
    for (const auto& algorithm : algorithms) {
      for (const std::uint64_t seed : seeds) {
        const auto start = std::chrono::steady_clock::now();
        const Mapping mapping = algorithm.run(instance.graph, t, epsilon, seed);
        const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
        RunRecord r;
        r.instance = instance.name;
        r.algorithm = algorithm.name;
        r.seed = seed;
        r.cost = static_cast<double>(total_cost(instance.graph, t, mapping));
        // A clock tick of zero would break the positive-runtime invariant.
        r.runtime_s = std::max(elapsed.count(), 1e-9);
        r.max_block_weight = mapping.max_block_weight();
        r.balanced = balance.fits(r.max_block_weight);
        records.push_back(std::move(r));
      }
    }
  }
  return records;
}

std::vector<RunRecord> average_records(const std::vector<RunRecord>& raw) {
  std::vector<RunRecord> out;
  std::map<std::pair<std::string, std::string>, std::size_t> index;
  for (const auto& r : raw) {
    const auto [it, inserted] = index.try_emplace({r.instance, r.algorithm}, out.size());
    if (inserted) {
      out.push_back({r.instance, r.algorithm, 0, 0.0, 0.0, true, 0});
    }
    RunRecord& a = out[it->second];
    ++a.seed;
    a.cost += r.cost;
    a.runtime_s += r.runtime_s;
    a.balanced = a.balanced && r.balanced;
    a.max_block_weight = std::max(a.max_block_weight, r.max_block_weight);
  }
  for (auto& a : out) {
    a.cost /= static_cast<double>(a.seed);
    a.runtime_s /= static_cast<double>(a.seed);
  }
  return out;
}

void write_records_csv(std::ostream& out, const std::vector<RunRecord>& records) {
  csv::write_row(out, kRecordHeader);
  for (const auto& r : records) {
    csv::write_row(out, {r.instance, r.algorithm, std::to_string(r.seed), format_double(r.cost),
                         format_double(r.runtime_s), r.balanced ? "1" : "0", std::to_string(r.max_block_weight)});
  }
}

std::vector<RunRecord> read_records_csv(std::istream& in) {
  std::vector<std::string> fields;
  if (!csv::read_row(in, fields) || fields != kRecordHeader) {
    throw std::runtime_error("CSV header must be: instance,algorithm,seed,J,runtime_s,balanced,max_block_weight");
  }
  std::vector<RunRecord> records;
  for (std::size_t row = 2; csv::read_row(in, fields); ++row) {
    if (fields.size() == 1 && fields[0].empty()) continue;
    if (fields.size() != kRecordHeader.size()) {
      throw std::runtime_error("CSV row " + std::to_string(row) + ": expected 7 fields, found " +
                               std::to_string(fields.size()));
    }
    if (fields[5] != "0" && fields[5] != "1") {
      throw std::runtime_error("CSV row " + std::to_string(row) + ": balanced must be 0 or 1");
    }
    records.push_back({fields[0], fields[1], parse_number<std::uint64_t>(fields[2], row),
                       parse_number<double>(fields[3], row), parse_number<double>(fields[4], row), fields[5] == "1",
                       parse_number<Weight>(fields[6], row)});
  }
  return records;
}

std::vector<double> default_tau_grid(int steps) {
  if (steps < 2) return {1.0};
  std::vector<double> taus(static_cast<std::size_t>(steps));
  for (int i = 0; i < steps; ++i) taus[i] = std::exp2(static_cast<double>(i) / (steps - 1));
  taus.back() = 2.0;
  return taus;
}

PerformanceProfile performance_profile(const std::vector<RunRecord>& records, const std::vector<double>& taus) {
  PerformanceProfile profile;
  std::vector<std::string> instances;
  std::map<std::string, std::size_t> algo_index;
  std::map<std::string, std::size_t> instance_index;
  for (const auto& r : records) {
    if (algo_index.try_emplace(r.algorithm, profile.algorithms.size()).second) profile.algorithms.push_back(r.algorithm);
    if (instance_index.try_emplace(r.instance, instances.size()).second) instances.push_back(r.instance);
  }
  const std::size_t num_algos = profile.algorithms.size();
  std::vector<std::vector<double>> cost(instances.size(), std::vector<double>(num_algos, INFINITY));
  for (const auto& r : records) {
    double& c = cost[instance_index[r.instance]][algo_index[r.algorithm]];
    c = std::min(c, r.cost);
  }
  std::vector<double> best(instances.size());
  for (std::size_t i = 0; i < instances.size(); ++i) best[i] = *std::min_element(cost[i].begin(), cost[i].end());

  for (const double tau : taus) {
    if (!(tau >= 1.0)) throw std::invalid_argument("tau must be >= 1");
    ProfilePoint point{tau, std::vector<double>(num_algos, 0.0)};
    for (std::size_t a = 0; a < num_algos; ++a) {
      std::size_t hits = 0;
      for (std::size_t i = 0; i < instances.size(); ++i) {
        const double bound = tau * best[i];
        // Relative slack so that boundary values such as 12 <= 1.2 * 10 count.
        if (std::isfinite(cost[i][a]) && cost[i][a] <= bound + 1e-12 * std::abs(bound)) ++hits;
      }
      point.fractions[a] = instances.empty() ? 0.0 : static_cast<double>(hits) / static_cast<double>(instances.size());
    }
    profile.points.push_back(std::move(point));
  }
  return profile;
}

void write_profile_csv(std::ostream& out, const PerformanceProfile& profile) {
  std::vector<std::string> header{"tau"};
  header.insert(header.end(), profile.algorithms.begin(), profile.algorithms.end());
  csv::write_row(out, header);
  for (const auto& p : profile.points) {
    std::vector<std::string> row{format_double(p.tau)};
    for (const double f : p.fractions) row.push_back(format_double(f));
    csv::write_row(out, row);
  }
}

}  // namespace promap
