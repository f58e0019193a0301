#include "asyncopt/train/metrics.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "asyncopt/error.hpp"
#include "asyncopt/parse.hpp"

namespace asyncopt::train {

void write_metrics_header(std::ostream& out) { out << kMetricsHeader << '\n'; }

void write_metrics_row(std::ostream& out, const IterationMetrics& m) {
  out << fmt::format("{},{},{},{},{},{},{}\n", m.iteration, m.env_steps, m.decision_points,
                     m.mean_reward, m.policy_loss, m.value_loss, m.entropy);
}

void write_metrics_csv(const std::string& path, std::span<const IterationMetrics> metrics) {
  std::ofstream out(path);
  if (!out) throw Error(fmt::format("cannot write metrics file '{}'", path));
  write_metrics_header(out);
  for (const auto& m : metrics) write_metrics_row(out, m);
}

std::vector<IterationMetrics> read_metrics_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(fmt::format("cannot read metrics file '{}'", path));
  std::string line;
  if (!std::getline(in, line) || line != kMetricsHeader) {
    throw Error(fmt::format("'{}' does not start with the metrics header", path));
  }
  std::vector<IterationMetrics> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() != 7) throw Error(fmt::format("'{}': malformed row '{}'", path, line));
    IterationMetrics m;
    m.iteration = parse_number<int>("iteration", cells[0]);
    m.env_steps = parse_number<std::int64_t>("env_steps", cells[1]);
    m.decision_points = parse_number<std::int64_t>("decision_points", cells[2]);
    m.mean_reward = parse_number<double>("mean_reward", cells[3]);
    m.policy_loss = parse_number<double>("policy_loss", cells[4]);
    m.value_loss = parse_number<double>("value_loss", cells[5]);
    m.entropy = parse_number<double>("entropy", cells[6]);
    rows.push_back(m);
  }
  return rows;
}

double final_reward(std::span<const IterationMetrics> metrics, int window) {
  if (metrics.empty()) return 0.0;
  const auto count = std::min<std::size_t>(metrics.size(), static_cast<std::size_t>(std::max(window, 1)));
  double sum = 0.0;
  for (std::size_t i = metrics.size() - count; i < metrics.size(); ++i) sum += metrics[i].mean_reward;
  return sum / static_cast<double>(count);
}

}  // namespace asyncopt::train
