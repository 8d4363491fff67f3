#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "hmmar/config.hpp"
#include "hmmar/filters.hpp"

namespace hmmar {

struct ErrorStat {
  double mean = 0.0;
  double std_error = 0.0;
};

/// Mean 0-1 loss over the evaluation window, averaged across repeats.
/// Entries are empty for methods the experiment did not run.
struct ErrorSummary {
  std::size_t repeats = 0;
  std::optional<ErrorStat> filtering_optimal;
  std::optional<ErrorStat> prediction_optimal;
  std::optional<ErrorStat> filtering_nonparametric;
  std::optional<ErrorStat> prediction_nonparametric;
};

struct RepeatOutcome {
  std::uint64_t seed = 0;
  double filtering_optimal = 0.0;
  double prediction_optimal = 0.0;
  double filtering_nonparametric = 0.0;
  double prediction_nonparametric = 0.0;
  std::optional<double> bandwidth;
  std::size_t qp_fallbacks = 0;
  std::size_t simplex_violations = 0;  // vectors off the simplex beyond 1e-10
  std::size_t nonfinite_values = 0;
};

struct ExperimentResult {
  ErrorSummary summary;
  std::vector<RepeatOutcome> repeats;
};

struct RunOptions {
  unsigned threads = 0;  // 0 = hardware concurrency
  std::optional<std::filesystem::path> trace_dir;
};

/// Repeat r simulates with seed + r, filters, and scores decisions on the
/// evaluation window. Results do not depend on the thread count.
ExperimentResult run_experiment(const ExperimentConfig& config, const RunOptions& options = {});

ErrorStat mean_and_std_error(const std::vector<double>& values);

/// Shortest decimal that round-trips to the same double.
std::string format_double(double value);

std::string trace_header(std::size_t num_states);

/// Writes one CSV row per record; states are reported 1-based.
void emit_trace(const Trajectory& trajectory, const std::vector<StepRecord>& records,
                std::size_t num_states, const std::filesystem::path& path);

std::string summary_csv(const ErrorSummary& summary);
void write_summary_csv(const ErrorSummary& summary, const std::filesystem::path& path);

/// Parses HMMAR_THREADS; unset, empty or "0" means automatic.
unsigned threads_from_env();

}  // namespace hmmar
