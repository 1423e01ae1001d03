#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "report.hpp"
#include "spec_file.hpp"

namespace symflow::cli {

/// Bad flags or a spec unsuitable for the command; exit code 2.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct CheckOptions {
  CheckKind kind = CheckKind::reversibility;
  int orders = 3;
  bool flow = false;
  double horizon = 0.5;
  double step = 1e-3;
  std::size_t flow_samples = 50;
};

struct ClassifyOptions {
  std::optional<CheckKind> kind;
};

struct CandidatesOptions {
  CheckKind kind = CheckKind::reversibility;
  std::optional<std::vector<int>> selection;
  std::optional<std::vector<Interval>> grid;
  int per_axis = 20;
  std::optional<Point> anchor;
  std::string csv = "candidates.csv";
};

struct TowerCommandOptions {
  int orders = 3;
  std::optional<Point> at;
};

struct TrajectoryOptions {
  Point from;
  double horizon = 1.0;
  double step = 1e-3;
  std::string csv = "trajectory.csv";
};

Report cmd_check(const SystemSpec& spec, const CheckOptions& options, std::uint64_t seed);
Report cmd_classify(const SystemSpec& spec, const ClassifyOptions& options, std::uint64_t seed);
Report cmd_candidates(const SystemSpec& spec, const CandidatesOptions& options, std::uint64_t seed);
Report cmd_tower(const SystemSpec& spec, const TowerCommandOptions& options, std::uint64_t seed);
Report cmd_trajectory(const SystemSpec& spec, const TrajectoryOptions& options, std::uint64_t seed);

/// 1 if any verdict fails, else 3 if any is inconclusive, else 0.
int exit_code_for(const std::vector<Status>& statuses);
int exit_code_for(Existence e);

/// Writes through a temporary file in the same directory and renames.
void write_atomic(const std::string& path, const std::string& content);

}  // namespace symflow::cli
