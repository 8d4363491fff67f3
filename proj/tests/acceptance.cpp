// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits non-zero if any criterion fails.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "hmmar/config.hpp"
#include "hmmar/filters.hpp"
#include "hmmar/gaussian.hpp"
#include "hmmar/harness.hpp"
#include "hmmar/kde.hpp"
#include "hmmar/simplex_qp.hpp"
#include "oracles.hpp"
#include "paper_model.hpp"

using namespace hmmar;
namespace fs = std::filesystem;

namespace {

const fs::path kExample = fs::path(HMMAR_SOURCE_DIR) / "configs" / "example.json";

int failures = 0;

void report(int id, const char* name, bool ok, const std::string& detail) {
  std::printf("[%s] %d. %s: %s\n", ok ? "PASS" : "FAIL", id, name, detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

std::string pct(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f%%", 100.0 * v);
  return buf;
}

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

RunOptions options() {
  RunOptions o;
  o.threads = threads_from_env();
  return o;
}

void table_and_ordering(const ExperimentResult& res) {
  const ErrorSummary& s = res.summary;
  const double of = s.filtering_optimal->mean;
  const double op = s.prediction_optimal->mean;
  const double nf = s.filtering_nonparametric->mean;
  const double np = s.prediction_nonparametric->mean;

  const bool table = std::abs(of - 0.164) <= 0.04 && std::abs(op - 0.266) <= 0.05 &&
                     std::abs(nf - 0.227) <= 0.06 && std::abs(np - 0.376) <= 0.07;
  report(1, "Table I reproduction", table,
         "optimal filt " + pct(of) + " (16.4 +/- 4), optimal pred " + pct(op) +
             " (26.6 +/- 5), nonparametric filt " + pct(nf) + " (22.7 +/- 6), nonparametric pred " +
             pct(np) + " (37.6 +/- 7)");

  const double margin = 0.02;
  const bool order = nf - of >= margin && np - op >= margin && op - of >= margin && np - nf >= margin;
  report(2, "Ordering constraints", order,
         "np-opt filt " + pct(nf - of) + ", np-opt pred " + pct(np - op) + ", opt pred-filt " +
             pct(op - of) + ", np pred-filt " + pct(np - nf) + " (each >= 2.00%)");
}

void qp_oracle() {
  std::mt19937_64 rng(20240);
  std::uniform_real_distribution<double> lin(0.05, 2.0);
  double worst_gap = -1e300;
  double worst_residual = 0.0;
  int instances = 0;
  for (int m = 2; m <= 5; ++m) {
    for (int k = 0; k < 50; ++k) {
      QpProblem p{oracle::random_spd(rng, m), Vector(m)};
      for (int i = 0; i < m; ++i) p.lin[i] = lin(rng);
      const QpSolution s = solve_kkt(p);
      const double grid = qp_objective(p, brute_force_solve(p, 0.005));
      worst_gap = std::max(worst_gap, qp_objective(p, s.u) - grid);
      const Vector stationarity =
          p.quad * s.u - p.lin - s.lambda + Vector::Constant(m, s.lambda_eq);
      worst_residual = std::max({worst_residual, stationarity.cwiseAbs().maxCoeff(),
                                 s.u.cwiseProduct(s.lambda).cwiseAbs().maxCoeff(),
                                 std::max(0.0, -s.lambda.minCoeff()),
                                 std::abs(s.u.sum() - 1.0)});
      ++instances;
    }
  }
  report(3, "QP oracle equivalence", worst_gap <= 1e-6 && worst_residual < 1e-8,
         std::to_string(instances) + " instances, max(kkt - grid) = " + sci(worst_gap) +
             " (<= 1e-6), max KKT residual = " + sci(worst_residual) + " (< 1e-8)");
}

void filter_oracle() {
  const SwitchingArModel model = test_model::paper_model();
  const Trajectory tr = simulate(model, 1000, 100, 777);
  FilterState opt{model.initial_dist(), model.initial_dist(), 2};
  double worst = 0.0;
  std::size_t steps = 0;
  for (std::size_t n = 3; n <= tr.size(); ++n) {
    const std::vector<double> hist{tr.x[n - 2], tr.x[n - 3]};
    Vector true_predictive = model.transition().matrix().transpose() * opt.posterior;
    true_predictive /= true_predictive.sum();
    opt = optimal_step(opt, tr.x[n - 1], hist, model);
    const Vector np = posterior_update(true_predictive, log_emissions(tr.x[n - 1], hist, model.states()));
    worst = std::max(worst, (np - opt.posterior).cwiseAbs().maxCoeff());
    ++steps;
  }
  report(4, "Filter oracle equivalence", worst <= 1e-12,
         std::to_string(steps) + " steps, max |difference| = " + sci(worst) + " (<= 1e-12)");
}

void gaussian_identities() {
  double worst_product = 0.0;
  const double means[] = {-2.0, -0.5, 0.0, 0.7, 3.0};
  const double vars[] = {0.01, 0.1, 0.5, 1.0, 4.0};
  for (double mu : means) {
    for (double var : vars) {
      const Gaussian1 g1{0.3, 0.25};
      const Gaussian1 g2{mu, var};
      const double quad = oracle::integrate_line(
          [&](double x) { return oracle::phi(x, g1.mean, g1.var) * oracle::phi(x, g2.mean, g2.var); });
      worst_product = std::max(worst_product, std::abs(product_integral(g1, g2) - quad));
    }
  }

  std::mt19937_64 rng(9);
  std::normal_distribution<double> g;
  std::vector<double> x(40);
  for (auto& v : x) v = g(rng);
  const double h = 0.35;
  const double lo = *std::min_element(x.begin(), x.end()) - 8 * h;
  const double hi = *std::max_element(x.begin(), x.end()) + 8 * h;
  const auto s1 = EmbeddedSample::build(x, 1, 1);
  const double int1 = oracle::integrate(
      [&](double y) { return kde_eval(s1, Bandwidth(h), std::vector<double>{y}); }, lo, hi);
  const auto s2 = EmbeddedSample::build(std::vector<double>(x.begin(), x.begin() + 16), 2, 1);
  const double int2 = oracle::integrate(
      [&](double y1) {
        return oracle::integrate(
            [&](double y2) { return kde_eval(s2, Bandwidth(h), std::vector<double>{y1, y2}); }, lo, hi);
      },
      lo, hi);
  const double kde_err = std::max(std::abs(int1 - 1.0), std::abs(int2 - 1.0));
  report(5, "Gaussian identities", worst_product < 1e-9 && kde_err < 1e-6,
         "product integral max error " + sci(worst_product) + " (< 1e-9) on 5x5 grid; kde mass error " +
             sci(kde_err) + " (< 1e-6) for d = 1, 2");
}

void ucv_checks() {
  std::mt19937_64 rng(606);
  std::normal_distribution<double> g;
  std::uniform_int_distribution<int> dim(1, 3);
  std::uniform_int_distribution<int> len(4, 15);
  std::uniform_real_distribution<double> hd(0.1, 2.0);
  double worst_formula = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const auto d = static_cast<std::size_t>(dim(rng));
    std::vector<double> x(static_cast<std::size_t>(len(rng)) + d);
    for (auto& v : x) v = g(rng);
    const auto s = EmbeddedSample::build(x, d, 1);
    std::vector<Eigen::VectorXd> pts;
    for (std::size_t i = 0; i < s.size(); ++i) {
      pts.emplace_back(Eigen::Map<const Eigen::VectorXd>(s.point(i).data(), static_cast<Eigen::Index>(d)));
    }
    const double h = hd(rng);
    const Eigen::MatrixXd bw =
        h * h * Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
    worst_formula = std::max(worst_formula, std::abs(ucv_objective(s, h) - oracle::ucv_general(pts, bw)));
  }

  // Bandwidth search on the embedding the nonparametric filter uses.
  const Trajectory tr = simulate(test_model::paper_model(), 300, 100, 5);
  const auto sample = EmbeddedSample::build(tr.x, 3, 1);
  const double h_plus = oversmoothed_bandwidth(sample);
  const UcvObjective ucv(sample);
  double grid_min = std::numeric_limits<double>::infinity();
  for (int k = 1; k <= 10000; ++k) grid_min = std::min(grid_min, ucv(h_plus * k / 10000.0));
  const double gap = ucv(ucv_bandwidth(sample).value()) - grid_min;

  report(6, "UCV correctness", worst_formula <= 1e-12 && gap <= 1e-6,
         "specialized vs generic max diff " + sci(worst_formula) + " (<= 1e-12) on 20 samples; "
         "UCV(h_hat) - grid min = " + sci(gap) + " (<= 1e-6)");
}

void simplex_invariants(const ExperimentResult& res) {
  std::size_t violations = 0;
  std::size_t nonfinite = 0;
  std::size_t fallbacks = 0;
  for (const auto& r : res.repeats) {
    violations += r.simplex_violations;
    nonfinite += r.nonfinite_values;
    fallbacks += r.qp_fallbacks;
  }
  report(7, "Simplex invariants", violations == 0 && nonfinite == 0,
         std::to_string(violations) + " off-simplex vectors, " + std::to_string(nonfinite) +
             " non-finite values (QP fallback steps: " + std::to_string(fallbacks) + ")");
}

void determinism(const ExperimentConfig& cfg, const ExperimentResult& first) {
  const fs::path dir = fs::temp_directory_path() / "hmmar_acceptance";
  fs::create_directories(dir);
  write_summary_csv(first.summary, dir / "summary_a.csv");
  write_summary_csv(run_experiment(cfg, options()).summary, dir / "summary_b.csv");
  const std::string a = slurp(dir / "summary_a.csv");
  const std::string b = slurp(dir / "summary_b.csv");
  report(8, "Determinism", !a.empty() && a == b,
         "summary.csv " + std::string(a == b ? "byte-identical" : "differs") + " across two runs (" +
             std::to_string(a.size()) + " bytes)");
}

}  // namespace

int main() {
  const ExperimentConfig cfg = load_experiment_config(kExample);
  const ExperimentResult res = run_experiment(cfg, options());

  table_and_ordering(res);
  qp_oracle();
  filter_oracle();
  gaussian_identities();
  ucv_checks();
  simplex_invariants(res);
  determinism(cfg, res);

  std::printf("%s: %d criterion(s) failed\n", failures ? "FAILED" : "ALL PASSED", failures);
  return failures ? 1 : 0;
}
