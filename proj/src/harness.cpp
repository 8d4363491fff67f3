#include "hmmar/harness.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <exception>
#include <fstream>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace hmmar {

namespace {

constexpr double kSimplexTol = 1e-10;

void audit(const Vector& v, RepeatOutcome& out) {
  if (!v.allFinite()) {
    out.nonfinite_values += static_cast<std::size_t>((!v.array().isFinite()).count());
    ++out.simplex_violations;
    return;
  }
  if (v.minCoeff() < 0.0 || std::abs(v.sum() - 1.0) > kSimplexTol) ++out.simplex_violations;
}

RepeatOutcome run_repeat(const ExperimentConfig& cfg, std::size_t r, const RunOptions& options,
                         std::mutex& io_mutex) {
  RepeatOutcome out;
  out.seed = cfg.seed + r;
  const Trajectory traj = simulate(cfg.model, cfg.n_total, cfg.burn_in, out.seed);

  RunConfig rc;
  rc.tau = cfg.tau;
  rc.stride = cfg.stride;
  rc.eval_start = cfg.eval_lo;
  rc.nonparametric = cfg.runs_nonparametric();
  FilterRun run = run_filters(traj, cfg.model, rc);
  std::erase_if(run.records, [&](const StepRecord& rec) { return rec.n > cfg.eval_hi; });

  out.bandwidth = run.bandwidth;
  std::array<std::size_t, 4> misses{};
  for (const StepRecord& rec : run.records) {
    const int truth = traj.s[rec.n - 1];
    audit(rec.optimal.predictive, out);
    audit(rec.optimal.posterior, out);
    misses[0] += rec.optimal_decision.filtered_state != truth;
    misses[1] += rec.optimal_decision.predicted_state != truth;
    if (rec.nonparametric) {
      audit(rec.nonparametric->predictive, out);
      audit(rec.nonparametric->posterior, out);
      misses[2] += rec.nonparametric_decision->filtered_state != truth;
      misses[3] += rec.nonparametric_decision->predicted_state != truth;
    }
    out.qp_fallbacks += rec.qp_fallback;
  }
  const double count = static_cast<double>(run.records.size());
  out.filtering_optimal = static_cast<double>(misses[0]) / count;
  out.prediction_optimal = static_cast<double>(misses[1]) / count;
  out.filtering_nonparametric = static_cast<double>(misses[2]) / count;
  out.prediction_nonparametric = static_cast<double>(misses[3]) / count;

  if (options.trace_dir) {
    std::lock_guard lock(io_mutex);
    emit_trace(traj, run.records, cfg.model.num_states(),
               *options.trace_dir / ("trace_" + std::to_string(r) + ".csv"));
  }
  return out;
}

}  // namespace

ErrorStat mean_and_std_error(const std::vector<double>& values) {
  ErrorStat st;
  if (values.empty()) return st;
  const double n = static_cast<double>(values.size());
  for (double v : values) st.mean += v;
  st.mean /= n;
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - st.mean) * (v - st.mean);
    st.std_error = std::sqrt(ss / (n - 1.0) / n);
  }
  return st;
}

ExperimentResult run_experiment(const ExperimentConfig& config, const RunOptions& options) {
  validate(config);
  if (options.trace_dir) std::filesystem::create_directories(*options.trace_dir);

  const std::size_t repeats = config.repeats;
  std::vector<RepeatOutcome> outcomes(repeats);
  std::vector<std::exception_ptr> errors(repeats);
  std::mutex io_mutex;
  std::atomic<std::size_t> next{0};

  unsigned workers = options.threads ? options.threads : std::thread::hardware_concurrency();
  workers = static_cast<unsigned>(std::clamp<std::size_t>(workers, 1, repeats));

  auto work = [&] {
    for (std::size_t r = next++; r < repeats; r = next++) {
      try {
        outcomes[r] = run_repeat(config, r, options, io_mutex);
      } catch (...) {
        errors[r] = std::current_exception();
      }
    }
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  ExperimentResult result;
  result.repeats = std::move(outcomes);
  ErrorSummary& s = result.summary;
  s.repeats = repeats;
  auto collect = [&](double RepeatOutcome::*field) {
    std::vector<double> v;
    v.reserve(repeats);
    for (const auto& o : result.repeats) v.push_back(o.*field);
    return mean_and_std_error(v);
  };
  if (config.runs_optimal()) {
    s.filtering_optimal = collect(&RepeatOutcome::filtering_optimal);
    s.prediction_optimal = collect(&RepeatOutcome::prediction_optimal);
  }
  if (config.runs_nonparametric()) {
    s.filtering_nonparametric = collect(&RepeatOutcome::filtering_nonparametric);
    s.prediction_nonparametric = collect(&RepeatOutcome::prediction_nonparametric);
  }
  return result;
}

std::string format_double(double value) {
  std::array<char, 32> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  return std::string(buf.data(), res.ptr);
}

std::string trace_header(std::size_t num_states) {
  std::string h = "n,s_true,x,s_opt_filter,s_np_filter,s_opt_pred,s_np_pred";
  for (const char* method : {"opt", "np"}) {
    for (std::size_t m = 1; m <= num_states; ++m) {
      h += ",post_" + std::string(method) + "_" + std::to_string(m);
    }
  }
  return h;
}

void emit_trace(const Trajectory& trajectory, const std::vector<StepRecord>& records,
                std::size_t num_states, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write trace file " + path.string());
  out << trace_header(num_states) << '\n';
  for (const StepRecord& rec : records) {
    const bool np = rec.nonparametric.has_value();
    const auto state_or_blank = [&](std::optional<int> s) {
      return s ? std::to_string(*s + 1) : std::string();
    };
    out << rec.n << ',' << trajectory.s[rec.n - 1] + 1 << ','
        << format_double(trajectory.x[rec.n - 1]) << ','
        << rec.optimal_decision.filtered_state + 1 << ','
        << state_or_blank(np ? std::optional(rec.nonparametric_decision->filtered_state)
                             : std::nullopt)
        << ',' << rec.optimal_decision.predicted_state + 1 << ','
        << state_or_blank(np ? std::optional(rec.nonparametric_decision->predicted_state)
                             : std::nullopt);
    for (std::size_t m = 0; m < num_states; ++m) {
      out << ',' << format_double(rec.optimal.posterior[static_cast<Eigen::Index>(m)]);
    }
    for (std::size_t m = 0; m < num_states; ++m) {
      out << ',';
      if (np) out << format_double(rec.nonparametric->posterior[static_cast<Eigen::Index>(m)]);
    }
    out << '\n';
  }
  if (!out) throw std::runtime_error("failed writing trace file " + path.string());
}

std::string summary_csv(const ErrorSummary& s) {
  std::ostringstream out;
  out << "method,task,mean_error,stderr,repeats\n";
  auto row = [&](const char* method, const char* task, const std::optional<ErrorStat>& st) {
    if (!st) return;
    out << method << ',' << task << ',' << format_double(st->mean) << ','
        << format_double(st->std_error) << ',' << s.repeats << '\n';
  };
  row("optimal", "filtering", s.filtering_optimal);
  row("optimal", "prediction", s.prediction_optimal);
  row("nonparametric", "filtering", s.filtering_nonparametric);
  row("nonparametric", "prediction", s.prediction_nonparametric);
  return out.str();
}

void write_summary_csv(const ErrorSummary& summary, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write summary file " + path.string());
  out << summary_csv(summary);
  if (!out) throw std::runtime_error("failed writing summary file " + path.string());
}

unsigned threads_from_env() {
  const char* raw = std::getenv("HMMAR_THREADS");
  if (!raw || !*raw) return 0;
  unsigned value = 0;
  const auto res = std::from_chars(raw, raw + std::strlen(raw), value);
  if (res.ec != std::errc() || *res.ptr != '\0') {
    throw ConfigError("HMMAR_THREADS", "expected a non-negative integer");
  }
  return value;
}

}  // namespace hmmar
