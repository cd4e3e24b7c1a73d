#include "riesz/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include "riesz/flows.hpp"
#include "riesz/special.hpp"

namespace riesz {

namespace {

constexpr double kAlphaMinClip = 1e-3;
constexpr double kTrendSlack = 1e-12;

const std::set<std::string>& experiment_names() {
  static const std::set<std::string> s = {
      "sweep-zero",     "sweep-d",        "flow-zero-scaled",
      "flow-zero-renorm", "flow-d-plain", "flow-d-renorm",
      "fourier-check",  "grad-check",     "counterexample",
      "certify"};
  return s;
}

const std::set<std::string>& config_keys() {
  static const std::set<std::string> s = {
      "experiment", "dim", "n",   "box",          "alphas", "sign",
      "tau",        "T",   "u0",  "out",          "tol",    "record_every",
      "quad_n",     "scheme", "plot"};
  return s;
}

std::string num17(double v) {
  char b[64];
  std::snprintf(b, sizeof b, "%.17g", v);
  return b;
}

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

double parse_double(const std::string& s, const std::string& what) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size() || !std::isfinite(v)) throw std::invalid_argument("");
    return v;
  } catch (...) {
    throw UsageError("invalid number for " + what + ": '" + s + "'");
  }
}

int parse_int(const std::string& s, const std::string& what) {
  try {
    std::size_t pos = 0;
    const long v = std::stol(s, &pos);
    if (pos != s.size() || v < -1000000000L || v > 1000000000L) {
      throw std::invalid_argument("");
    }
    return static_cast<int>(v);
  } catch (...) {
    throw UsageError("invalid integer for " + what + ": '" + s + "'");
  }
}

int parse_sign(const std::string& s) {
  if (s == "+1" || s == "1" || s == "+") return 1;
  if (s == "-1" || s == "-") return -1;
  throw UsageError("invalid sign (use +1 or -1): '" + s + "'");
}

bool parse_bool(const std::string& s, const std::string& what) {
  if (s == "1" || s == "true" || s == "yes") return true;
  if (s == "0" || s == "false" || s == "no") return false;
  throw UsageError("invalid boolean for " + what + ": '" + s + "'");
}

// Runs body(i) for i in [0, count) with one worker per alpha; the first
// exception (if any) is rethrown after the loop.
template <class F>
void parallel_indexed(std::size_t count, F&& body) {
  std::exception_ptr err = nullptr;
#pragma omp parallel for schedule(dynamic)
  for (long i = 0; i < static_cast<long>(count); ++i) {
    try {
      body(static_cast<std::size_t>(i));
    } catch (...) {
#pragma omp critical
      if (!err) err = std::current_exception();
    }
  }
  if (err) std::rethrow_exception(err);
}

struct Timer {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  double ms() const {
    return std::chrono::duration<double, std::milli>(
               std::chrono::steady_clock::now() - t0)
        .count();
  }
};

// ---------------------------------------------------------------------------
// Defaults and validation.

std::vector<double> default_alphas(const std::string& exp, int dim) {
  const double d = dim;
  if (exp == "sweep-zero") return {0.025, 0.05, 0.1, 0.2, 0.4};
  if (exp == "sweep-d") return {d - 0.2, d - 0.1, d - 0.05, d - 0.01};
  if (exp == "flow-zero-scaled") return {0.05, 0.1, 0.2, 0.4};
  if (exp == "flow-zero-renorm") return {0.1, 0.2, 0.4};
  if (exp == "flow-d-plain" || exp == "flow-d-renorm") {
    return {d - 0.2, d - 0.1, d - 0.05};
  }
  if (exp == "fourier-check") return {0.25, 0.5, 0.75};
  if (exp == "counterexample") return {0.02, 0.05, 0.1, 0.2, 0.4};
  return {0.5};  // grad-check, certify
}

double default_tol(const std::string& exp) {
  if (exp == "sweep-zero") return 0.1;
  if (exp == "sweep-d") return 0.05;
  if (exp == "flow-zero-scaled") return 0.5;
  if (exp == "flow-zero-renorm") return 0.5;
  if (exp == "flow-d-plain") return 0.1;
  if (exp == "flow-d-renorm") return 0.5;
  if (exp == "fourier-check") return 1e-6;
  if (exp == "grad-check") return 1e-6;
  return 0.0;
}

// Limit direction of the alpha family: -1 when the limit sits at small
// alpha (alpha -> 0 experiments), +1 at large alpha (alpha -> d), 0 when no
// trend check applies.
int approach_direction(const std::string& exp) {
  if (exp == "sweep-zero" || exp == "flow-zero-scaled" ||
      exp == "flow-zero-renorm") {
    return -1;
  }
  if (exp == "sweep-d" || exp == "flow-d-plain" || exp == "flow-d-renorm") {
    return +1;
  }
  return 0;
}

void validate_alphas(const ExperimentConfig& cfg) {
  const double d = cfg.dim;
  for (double a : cfg.alphas) {
    if (cfg.experiment == "fourier-check") {
      if (!(a > 0.0 && a < 1.0)) {
        throw UsageError("fourier-check requires alpha in (0, 1), got " +
                         num17(a));
      }
      continue;
    }
    if (!(a >= kAlphaMinClip && a <= d - kAlphaMinClip)) {
      throw UsageError("alpha = " + num17(a) +
                       " outside the admissible range [1e-3, d-1e-3] for d=" +
                       std::to_string(cfg.dim));
    }
  }
  if (cfg.alphas.empty()) throw UsageError("empty alpha list");
}

Scheme scheme_of(const ExperimentConfig& cfg) {
  return cfg.scheme == "euler" ? Scheme::ExplicitEuler
                               : Scheme::MinimizingMovements;
}

// ---------------------------------------------------------------------------
// Report assembly helpers.

void common_meta(SweepReport& rep, const ExperimentConfig& cfg) {
  rep.version = version_string();
  rep.csv_meta.push_back("experiment=" + rep.experiment);
  rep.csv_meta.push_back("version=" + rep.version);
  if (rep.n > 0) {
    rep.csv_meta.push_back("dim=" + std::to_string(rep.dim) +
                           " n=" + std::to_string(rep.n) +
                           " h=" + num17(rep.h));
    rep.csv_meta.push_back("u0=" + cfg.u0_source);
  }
}

void sort_rows(SweepReport& rep) {
  std::stable_sort(rep.rows.begin(), rep.rows.end(),
                   [](const SweepRow& a, const SweepRow& b) {
                     if (a.alpha != b.alpha) return a.alpha < b.alpha;
                     return a.quantity < b.quantity;
                   });
}

// Emits the uniform 5-column CSV for sweep/flow experiments.
void rows_to_csv(SweepReport& rep) {
  rep.csv_columns = {"alpha", "quantity", "value", "limit_value", "abs_error"};
  for (const SweepRow& r : rep.rows) {
    rep.csv_rows.push_back({num17(r.alpha), r.quantity, num17(r.value),
                            num17(r.limit_value), num17(r.abs_error)});
  }
}

// Monotone-approach check on the rows of one quantity. approach = -1: the
// error must not increase as alpha decreases and the smallest-alpha error
// must meet tol; approach = +1: mirrored.
void check_trend(SweepReport& rep, const std::string& quantity, int approach,
                 double tol) {
  std::vector<std::pair<double, double>> err;  // (alpha, abs_error), ascending
  for (const SweepRow& r : rep.rows) {
    if (r.quantity == quantity) err.push_back({r.alpha, r.abs_error});
  }
  if (err.empty()) return;
  for (std::size_t i = 0; i + 1 < err.size(); ++i) {
    const bool ok = approach < 0
                        ? err[i].second <= err[i + 1].second + kTrendSlack
                        : err[i].second + kTrendSlack >= err[i + 1].second;
    if (!ok) {
      rep.passed = false;
      rep.message += quantity + " not monotone between alpha=" +
                     num17(err[i].first) + " and alpha=" +
                     num17(err[i + 1].first) + "; ";
    }
  }
  const double final_err = approach < 0 ? err.front().second : err.back().second;
  if (!(final_err <= tol)) {
    rep.passed = false;
    rep.message += quantity + " final error " + num17(final_err) +
                   " exceeds tol " + num17(tol) + "; ";
  }
}

// ---------------------------------------------------------------------------
// Individual experiments. Each fills rep.rows / csv and the pass verdict.

void run_sweep_zero(const ExperimentConfig& cfg, SweepReport& rep,
                    std::shared_ptr<const Domain> dom, const GridField& u0) {
  EnergyEvaluator ev0(dom);
  const double l2 = l2_norm(u0);
  const double limit_scaled = cfg.dim * ball_volume(cfg.dim) * l2 * l2;
  const double limit_renorm = ev0.energy(EnergyKind::jhat0(), u0);

  std::vector<std::array<double, 3>> res(cfg.alphas.size());
  parallel_indexed(cfg.alphas.size(), [&](std::size_t i) {
    Timer tm;
    const double a = cfg.alphas[i];
    EnergyEvaluator ev(dom);
    const double scaled = a * ev.energy(EnergyKind::j(a, -1), u0);
    const double renorm = ev.energy(EnergyKind::jhat(a), u0);
    res[i] = {scaled, renorm, tm.ms()};
  });
  for (std::size_t i = 0; i < cfg.alphas.size(); ++i) {
    const double a = cfg.alphas[i];
    rep.rows.push_back({a, "neg_alpha_J", res[i][0], limit_scaled,
                        std::abs(res[i][0] - limit_scaled), res[i][2]});
    rep.rows.push_back({a, "Jhat", res[i][1], limit_renorm,
                        std::abs(res[i][1] - limit_renorm), res[i][2]});
  }
  sort_rows(rep);
  rows_to_csv(rep);
  check_trend(rep, "neg_alpha_J", -1, cfg.tol);
  check_trend(rep, "Jhat", -1, cfg.tol);
}

void run_sweep_d(const ExperimentConfig& cfg, SweepReport& rep,
                 std::shared_ptr<const Domain> dom, const GridField& u0) {
  EnergyEvaluator ev0(dom);
  const double limit_plain = ev0.energy(EnergyKind::jd(), u0);
  const double limit_renorm = ev0.energy(EnergyKind::jtilde_d(), u0);

  std::vector<std::array<double, 3>> res(cfg.alphas.size());
  parallel_indexed(cfg.alphas.size(), [&](std::size_t i) {
    Timer tm;
    const double a = cfg.alphas[i];
    EnergyEvaluator ev(dom);
    const double plain = ev.energy(EnergyKind::j(a), u0);
    const double renorm = ev.energy(EnergyKind::jtilde(a), u0);
    res[i] = {plain, renorm, tm.ms()};
  });
  for (std::size_t i = 0; i < cfg.alphas.size(); ++i) {
    const double a = cfg.alphas[i];
    rep.rows.push_back({a, "J", res[i][0], limit_plain,
                        std::abs(res[i][0] - limit_plain), res[i][2]});
    rep.rows.push_back({a, "Jtilde", res[i][1], limit_renorm,
                        std::abs(res[i][1] - limit_renorm), res[i][2]});
  }
  sort_rows(rep);
  rows_to_csv(rep);
  check_trend(rep, "J", +1, cfg.tol);
  check_trend(rep, "Jtilde", +1, cfg.tol);
}

// Shared driver for the four flow experiments. limit_of builds the limit
// trajectory for a given alpha run (closed form or a second MM solve).
template <class MakeGrad, class MakeLimit>
void run_flow_family(const ExperimentConfig& cfg, SweepReport& rep,
                     std::shared_ptr<const Domain> dom, const GridField& u0,
                     MakeGrad&& make_grad, MakeLimit&& make_limit,
                     bool energy_gap_rows) {
  struct Res {
    TrajectoryGap gap;
    double tau = 0.0, ms = 0.0;
  };
  std::vector<Res> res(cfg.alphas.size());
  parallel_indexed(cfg.alphas.size(), [&](std::size_t i) {
    Timer tm;
    const double a = cfg.alphas[i];
    FlowSolver fs(dom);
    const OperatorKind grad = make_grad(a);
    double tau = cfg.tau;
    if (tau <= 0.0) {
      tau = std::min(1e-3, 0.1 / fs.driving_lambda(grad));
    }
    FlowProblem prob{grad, u0, cfg.T, tau, scheme_of(cfg), cfg.record_every};
    FlowTrajectory traj = fs.solve(prob);
    FlowTrajectory lim = make_limit(a, fs, tau, traj);
    res[i].gap = compare_trajectories(traj, lim);
    res[i].tau = tau;
    res[i].ms = tm.ms();
  });
  for (std::size_t i = 0; i < cfg.alphas.size(); ++i) {
    const double a = cfg.alphas[i];
    rep.rows.push_back({a, "sup_state_gap", res[i].gap.sup_state_gap, 0.0,
                        res[i].gap.sup_state_gap, res[i].ms});
    if (energy_gap_rows) {
      rep.rows.push_back({a, "max_energy_gap", res[i].gap.max_energy_gap, 0.0,
                          res[i].gap.max_energy_gap, res[i].ms});
    }
  }
  sort_rows(rep);
  rows_to_csv(rep);
  check_trend(rep, "sup_state_gap", approach_direction(cfg.experiment), cfg.tol);
}

void run_fourier(const ExperimentConfig& cfg, SweepReport& rep) {
  struct Res {
    FourierCheck fc;
    double ms = 0.0;
  };
  std::vector<Res> res(cfg.alphas.size());
  parallel_indexed(cfg.alphas.size(), [&](std::size_t i) {
    Timer tm;
    res[i].fc = check_fourier_identity(cfg.alphas[i], 1, cfg.quad_n);
    res[i].ms = tm.ms();
  });
  std::vector<std::size_t> order(cfg.alphas.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return cfg.alphas[a] < cfg.alphas[b];
  });
  rep.csv_meta.push_back("quad_n=" + std::to_string(cfg.quad_n));
  rep.csv_columns = {"alpha", "lhs", "rhs", "rel_error"};
  for (std::size_t i : order) {
    const FourierCheck& fc = res[i].fc;
    rep.rows.push_back({cfg.alphas[i], "rel_error", fc.rel_error, 0.0,
                        fc.rel_error, res[i].ms});
    rep.csv_rows.push_back({num17(cfg.alphas[i]), num17(fc.lhs), num17(fc.rhs),
                            num17(fc.rel_error)});
    if (!(fc.rel_error <= cfg.tol)) {
      rep.passed = false;
      rep.message += "rel_error " + num17(fc.rel_error) + " at alpha=" +
                     num17(cfg.alphas[i]) + " exceeds tol; ";
    }
  }
}

void run_grad_check(const ExperimentConfig& cfg, SweepReport& rep,
                    std::shared_ptr<const Domain> dom) {
  std::mt19937 rng(12345);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  GridField u = zero_field(dom), phi = zero_field(dom);
  for (double& x : u.values) x = dist(rng);
  for (double& x : phi.values) x = dist(rng);

  std::vector<EnergyKind> kinds;
  for (double a : cfg.alphas) {
    kinds.push_back(EnergyKind::j(a));
    kinds.push_back(EnergyKind::jhat(a));
    kinds.push_back(EnergyKind::g1(a));
    kinds.push_back(EnergyKind::j1(a));
    kinds.push_back(EnergyKind::jtilde(a));
  }
  kinds.push_back(EnergyKind::g1(0.0));
  kinds.push_back(EnergyKind::j1(0.0));
  kinds.push_back(EnergyKind::jhat0());
  kinds.push_back(EnergyKind::jd());
  kinds.push_back(EnergyKind::jtilde_d());

  const std::vector<double> ts = {1e-1, 1e-2, 1e-3};
  rep.csv_columns = {"kind", "alpha", "t", "defect", "defect_over_t"};
  EnergyEvaluator ev(dom);
  for (const EnergyKind& kind : kinds) {
    const double ref = std::abs(ev.energy(kind, phi));
    const auto rows = gradient_check(ev, kind, u, phi, ts);
    for (const GradCheckRow& r : rows) {
      rep.rows.push_back({kind.alpha, energy_name(kind.tag), r.ratio, ref,
                          std::abs(r.ratio - ref), 0.0});
      rep.csv_rows.push_back({energy_name(kind.tag), num17(kind.alpha),
                              num17(r.t), num17(r.defect), num17(r.ratio)});
      if (!(std::abs(r.ratio - ref) <= cfg.tol * std::max(ref, 1e-300))) {
        rep.passed = false;
        rep.message += std::string(energy_name(kind.tag)) + " defect ratio " +
                       num17(r.ratio) + " vs |E(phi)| " + num17(ref) +
                       " at t=" + num17(r.t) + "; ";
      }
    }
  }
}

void run_counterexample(const ExperimentConfig& cfg, SweepReport& rep) {
  rep.csv_columns = {"n", "alpha", "l2_norm_sq", "l2_norm", "g1"};
  bool found = false;
  long found_n = 0;
  double found_alpha = 0.0, found_nsq = 0.0, found_g1 = 0.0;

  long n = 1;
  for (int k = 1; k <= 12; ++k) {
    n *= 4;
    const double ext = 2.0 / static_cast<double>(n);
    auto dom = build_domain(cfg.dim, {-ext, -ext}, {ext, ext}, 8,
                            MaskSpec::full_box());
    GridField v = counterexample_sequence(static_cast<int>(n), dom);
    const double nrm = l2_norm(v);
    EnergyEvaluator ev(dom);
    for (double a : cfg.alphas) {
      const double g1 = ev.energy(EnergyKind::g1(a), v);
      rep.rows.push_back({a, "g1_n" + std::to_string(k), g1, 10.0,
                          std::abs(g1 - 10.0), 0.0});
      rep.csv_rows.push_back({std::to_string(n), num17(a), num17(nrm * nrm),
                              num17(nrm), num17(g1)});
      if (!found && nrm * nrm <= 0.5 && g1 >= 10.0) {
        found = true;
        found_n = n;
        found_alpha = a;
        found_nsq = nrm * nrm;
        found_g1 = g1;
      }
    }
  }
  if (found) {
    rep.csv_meta.push_back(
        "found: n=" + std::to_string(found_n) + " alpha=" + num17(found_alpha) +
        " l2_norm_sq=" + num17(found_nsq) + " g1=" + num17(found_g1));
  } else {
    rep.passed = false;
    rep.message =
        "no (n, alpha) pair reached l2_norm_sq <= 0.5 with g1 >= 10; ";
  }
}

void run_certify(const ExperimentConfig& cfg, SweepReport& rep,
                 std::shared_ptr<const Domain> dom) {
  std::vector<EnergyKind> kinds;
  for (int s : {+1, -1}) {
    for (double a : cfg.alphas) {
      kinds.push_back(EnergyKind::j(a, s));
      kinds.push_back(EnergyKind::jhat(a, s));
      kinds.push_back(EnergyKind::g1(a, s));
      kinds.push_back(EnergyKind::j1(a, s));
      kinds.push_back(EnergyKind::jtilde(a, s));
    }
    kinds.push_back(EnergyKind::g1(0.0, s));
    kinds.push_back(EnergyKind::j1(0.0, s));
    kinds.push_back(EnergyKind::jhat0(s));
    kinds.push_back(EnergyKind::jd(s));
    kinds.push_back(EnergyKind::jtilde_d(s));
  }
  rep.csv_columns = {"kind", "alpha", "sign", "lambda", "cert_kind",
                     "witness_bound"};
  EnergyEvaluator ev(dom);
  for (const EnergyKind& kind : kinds) {
    const ConvexityCertificate c = ev.certify(kind);
    rep.rows.push_back({kind.alpha, energy_name(kind.tag), c.lambda, 0.0,
                        0.0, 0.0});
    rep.csv_rows.push_back(
        {energy_name(kind.tag), num17(kind.alpha), std::to_string(kind.sign),
         num17(c.lambda),
         c.kind == CertKind::Positivity ? "positivity" : "convexity",
         num17(c.witness_bound)});
  }
}

// ---------------------------------------------------------------------------
// Output files.

void write_csv(const SweepReport& rep) {
  std::ofstream f(rep.out_path);
  if (!f) throw std::runtime_error("cannot write output file " + rep.out_path);
  for (const std::string& m : rep.csv_meta) f << "# " << m << "\n";
  f << "# columns: ";
  for (std::size_t i = 0; i < rep.csv_columns.size(); ++i) {
    if (i) f << ",";
    f << rep.csv_columns[i];
  }
  f << "\n";
  for (const auto& row : rep.csv_rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) f << ",";
      f << row[i];
    }
    f << "\n";
  }
  if (!f) throw std::runtime_error("write failure on " + rep.out_path);
}

void write_plot(const SweepReport& rep) {
  int xi = 1, yi = 5;
  if (rep.experiment == "fourier-check") {
    xi = 1; yi = 4;
  } else if (rep.experiment == "grad-check") {
    xi = 3; yi = 4;
  } else if (rep.experiment == "counterexample") {
    xi = 1; yi = 5;
  } else if (rep.experiment == "certify") {
    xi = 2; yi = 4;
  }
  const std::string path = rep.out_path + ".gp";
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write plot script " + path);
  f << "# gnuplot script for " << rep.experiment << "\n";
  f << "set datafile separator \",\"\n";
  f << "set xlabel \"" << rep.csv_columns[xi - 1] << "\"\n";
  f << "set ylabel \"" << rep.csv_columns[yi - 1] << "\"\n";
  f << "plot \"" << rep.out_path << "\" using " << xi << ":" << yi
    << " with linespoints title \"" << rep.experiment << "\"\n";
}

} // namespace

const char* version_string() { return "riesz-flow 0.1.0"; }

ExperimentConfig parse_config(const std::vector<std::string>& args) {
  std::map<std::string, std::string> flags;
  std::string positional;
  std::string config_path;

  for (std::size_t i = 0; i < args.size(); ++i) {
    const std::string& a = args[i];
    if (a.rfind("--", 0) == 0) {
      std::string key = a.substr(2);
      for (char& c : key) {
        if (c == '-') c = '_';
      }
      if (key == "plot") {
        if (flags.count("plot")) {
          throw UsageError("conflicting flags: --plot given twice");
        }
        flags["plot"] = "1";
        continue;
      }
      if (key == "config") {
        if (!config_path.empty()) {
          throw UsageError("conflicting flags: --config given twice");
        }
        if (i + 1 >= args.size()) throw UsageError("missing value for --config");
        config_path = args[++i];
        continue;
      }
      if (!config_keys().count(key)) {
        throw UsageError("unknown flag --" + a.substr(2));
      }
      if (i + 1 >= args.size()) throw UsageError("missing value for --" + key);
      if (flags.count(key)) {
        throw UsageError("conflicting flags: --" + key + " given twice");
      }
      flags[key] = args[++i];
    } else {
      if (!positional.empty()) {
        throw UsageError("unexpected extra positional argument: " + a);
      }
      positional = a;
    }
  }

  std::map<std::string, std::string> merged;
  if (!config_path.empty()) {
    std::ifstream f(config_path);
    if (!f) throw UsageError("cannot open config file " + config_path);
    std::string line;
    int lineno = 0;
    while (std::getline(f, line)) {
      ++lineno;
      const std::string t = trim(line);
      if (t.empty() || t[0] == '#') continue;
      const auto eq = t.find('=');
      if (eq == std::string::npos) {
        throw UsageError("config parse error at line " +
                         std::to_string(lineno) + ": expected key=value");
      }
      const std::string key = trim(t.substr(0, eq));
      const std::string val = trim(t.substr(eq + 1));
      if (!config_keys().count(key)) {
        throw UsageError("config parse error at line " +
                         std::to_string(lineno) + ": unknown key '" + key + "'");
      }
      if (merged.count(key)) {
        throw UsageError("config parse error at line " +
                         std::to_string(lineno) + ": duplicate key '" + key +
                         "'");
      }
      merged[key] = val;
    }
  }
  for (const auto& [k, v] : flags) merged[k] = v;  // flags override the file
  if (!positional.empty()) merged["experiment"] = positional;

  ExperimentConfig cfg;
  if (auto it = merged.find("experiment"); it != merged.end()) {
    cfg.experiment = it->second;
  }
  if (cfg.experiment.empty()) {
    throw UsageError("missing experiment name (see --help)");
  }
  if (!experiment_names().count(cfg.experiment)) {
    throw UsageError("unknown experiment '" + cfg.experiment + "'");
  }
  if (auto it = merged.find("dim"); it != merged.end()) {
    cfg.dim = parse_int(it->second, "dim");
    if (cfg.dim != 1 && cfg.dim != 2) throw UsageError("dim must be 1 or 2");
  }
  if (auto it = merged.find("n"); it != merged.end()) {
    cfg.n = parse_int(it->second, "n");
    if (cfg.n < 2) throw UsageError("n must be >= 2");
  }
  if (auto it = merged.find("box"); it != merged.end()) {
    const auto pairs = split(it->second, ';');
    if (static_cast<int>(pairs.size()) != cfg.dim) {
      throw UsageError("box must give one lo,hi range per dimension");
    }
    for (std::size_t ax = 0; ax < pairs.size(); ++ax) {
      const auto lh = split(pairs[ax], ',');
      if (lh.size() != 2) throw UsageError("box range must be 'lo,hi'");
      cfg.box_lo[ax] = parse_double(lh[0], "box");
      cfg.box_hi[ax] = parse_double(lh[1], "box");
      if (!(cfg.box_lo[ax] < cfg.box_hi[ax])) {
        throw UsageError("box range must satisfy lo < hi");
      }
    }
    cfg.box_set = true;
  }
  if (auto it = merged.find("alphas"); it != merged.end()) {
    for (const std::string& s : split(it->second, ',')) {
      cfg.alphas.push_back(parse_double(trim(s), "alphas"));
    }
  }
  if (auto it = merged.find("sign"); it != merged.end()) {
    cfg.sign = parse_sign(it->second);
  }
  if (auto it = merged.find("tau"); it != merged.end()) {
    cfg.tau = parse_double(it->second, "tau");
    if (!(cfg.tau > 0.0)) throw UsageError("tau must be > 0");
  }
  if (auto it = merged.find("T"); it != merged.end()) {
    cfg.T = parse_double(it->second, "T");
    if (!(cfg.T > 0.0)) throw UsageError("T must be > 0");
  }
  if (auto it = merged.find("u0"); it != merged.end()) cfg.u0_source = it->second;
  if (auto it = merged.find("out"); it != merged.end()) cfg.out = it->second;
  if (auto it = merged.find("tol"); it != merged.end()) {
    cfg.tol = parse_double(it->second, "tol");
    if (!(cfg.tol > 0.0)) throw UsageError("tol must be > 0");
  }
  if (auto it = merged.find("record_every"); it != merged.end()) {
    cfg.record_every = parse_int(it->second, "record_every");
    if (cfg.record_every < 1) throw UsageError("record_every must be >= 1");
  }
  if (auto it = merged.find("quad_n"); it != merged.end()) {
    cfg.quad_n = parse_int(it->second, "quad_n");
    if (cfg.quad_n < 1) throw UsageError("quad_n must be >= 1");
  }
  if (auto it = merged.find("scheme"); it != merged.end()) {
    cfg.scheme = it->second;
    if (cfg.scheme != "mm" && cfg.scheme != "euler") {
      throw UsageError("scheme must be 'mm' or 'euler'");
    }
  }
  if (auto it = merged.find("plot"); it != merged.end()) {
    cfg.plot = parse_bool(it->second, "plot");
  }
  return cfg;
}

GridField make_initial_datum(const std::string& source,
                             std::shared_ptr<const Domain> dom) {
  if (source == "indicator") return indicator_field(dom);
  if (source == "gaussian") {
    return make_field(dom, [&](double x, double y) {
      double v = 1.0;
      const double x0 = (x - dom->lo[0]) / (dom->hi[0] - dom->lo[0]);
      v *= std::exp(-64.0 * (x0 - 0.5) * (x0 - 0.5));
      if (dom->dim == 2) {
        const double x1 = (y - dom->lo[1]) / (dom->hi[1] - dom->lo[1]);
        v *= std::exp(-64.0 * (x1 - 0.5) * (x1 - 0.5));
      }
      return v;
    });
  }
  if (source == "two-bump" || source == "twobump") {
    return make_field(dom, [&](double x, double y) {
      const double x0 = (x - dom->lo[0]) / (dom->hi[0] - dom->lo[0]);
      const double b1 = (x0 - 0.3) / 0.08;
      const double b2 = (x0 - 0.7) / 0.08;
      double v = 0.8 * (std::exp(-b1 * b1) - std::exp(-b2 * b2));
      if (dom->dim == 2) {
        const double x1 = (y - dom->lo[1]) / (dom->hi[1] - dom->lo[1]);
        const double g = 8.0 * (x1 - 0.5);
        v *= std::exp(-g * g);
      }
      return v;
    });
  }
  GridField u;
  try {
    u = load_field(source);
  } catch (const std::exception& e) {
    throw UsageError(std::string("u0 file: ") + e.what());
  }
  if (!same_domain(*u.domain, *dom)) {
    throw UsageError("u0 file grid does not match the configured domain");
  }
  u.domain = dom;
  return u;
}

SweepReport run(const ExperimentConfig& cfg0) {
  ExperimentConfig cfg = cfg0;
  if (!experiment_names().count(cfg.experiment)) {
    throw UsageError("unknown experiment '" + cfg.experiment + "'");
  }
  if (cfg.n == 0) {
    cfg.n = cfg.experiment == "grad-check" ? 64 : (cfg.dim == 1 ? 1024 : 128);
  }
  if (cfg.alphas.empty()) cfg.alphas = default_alphas(cfg.experiment, cfg.dim);
  if (cfg.sign == 0) {
    cfg.sign = (cfg.experiment == "flow-d-plain" ||
                cfg.experiment == "flow-d-renorm")
                   ? -1
                   : +1;
  }
  if (cfg.tol == 0.0) cfg.tol = default_tol(cfg.experiment);
  if (cfg.out.empty()) cfg.out = cfg.experiment + ".csv";
  validate_alphas(cfg);
  if (cfg.experiment == "fourier-check" && cfg.dim != 1) {
    throw UsageError("fourier-check runs in d = 1");
  }

  SweepReport rep;
  rep.experiment = cfg.experiment;
  rep.dim = cfg.dim;
  rep.out_path = cfg.out;

  const bool needs_domain = cfg.experiment != "fourier-check" &&
                            cfg.experiment != "counterexample";
  std::shared_ptr<const Domain> dom;
  GridField u0;
  if (needs_domain) {
    std::array<double, 2> lo = cfg.box_lo, hi = cfg.box_hi;
    if (!cfg.box_set) {
      lo = {0.0, 0.0};
      hi = {1.0, 1.0};
    }
    dom = build_domain(cfg.dim, lo, hi, cfg.n, MaskSpec::full_box());
    rep.n = cfg.n;
    rep.h = dom->h[0];
    u0 = make_initial_datum(cfg.u0_source, dom);
  }
  common_meta(rep, cfg);

  const bool is_flow = cfg.experiment.rfind("flow-", 0) == 0;
  if (is_flow) {
    rep.csv_meta.push_back("sign=" + std::to_string(cfg.sign) +
                           " T=" + num17(cfg.T) + " scheme=" + cfg.scheme);
  }

  Timer total;
  if (cfg.experiment == "sweep-zero") {
    run_sweep_zero(cfg, rep, dom, u0);
  } else if (cfg.experiment == "sweep-d") {
    run_sweep_d(cfg, rep, dom, u0);
  } else if (cfg.experiment == "flow-zero-scaled") {
    run_flow_family(
        cfg, rep, dom, u0,
        [](double a) { return OperatorKind::grad_scaled_j(a); },
        [&](double, FlowSolver&, double, const FlowTrajectory& traj) {
          return closed_form_decay_trajectory(u0, traj.times);
        },
        false);
  } else if (cfg.experiment == "flow-zero-renorm") {
    run_flow_family(
        cfg, rep, dom, u0,
        [](double a) { return OperatorKind::grad_jhat(a); },
        [&](double, FlowSolver& fs, double tau, const FlowTrajectory&) {
          FlowProblem p{OperatorKind::grad_jhat0(), u0, cfg.T, tau,
                        scheme_of(cfg), cfg.record_every};
          return fs.solve(p);
        },
        true);
  } else if (cfg.experiment == "flow-d-plain") {
    run_flow_family(
        cfg, rep, dom, u0,
        [&](double a) { return OperatorKind::grad_j(a, cfg.sign); },
        [&](double, FlowSolver&, double, const FlowTrajectory& traj) {
          return closed_form_average_trajectory(u0, traj.times, cfg.sign);
        },
        false);
  } else if (cfg.experiment == "flow-d-renorm") {
    run_flow_family(
        cfg, rep, dom, u0,
        [&](double a) { return OperatorKind::grad_jtilde(a, cfg.sign); },
        [&](double, FlowSolver& fs, double tau, const FlowTrajectory&) {
          FlowProblem p{OperatorKind::grad_jtilde_d(cfg.sign), u0, cfg.T, tau,
                        scheme_of(cfg), cfg.record_every};
          return fs.solve(p);
        },
        true);
  } else if (cfg.experiment == "fourier-check") {
    run_fourier(cfg, rep);
  } else if (cfg.experiment == "grad-check") {
    run_grad_check(cfg, rep, dom);
  } else if (cfg.experiment == "counterexample") {
    run_counterexample(cfg, rep);
  } else {  // certify
    run_certify(cfg, rep, dom);
  }

  write_csv(rep);
  if (cfg.plot) write_plot(rep);

  for (const SweepRow& r : rep.rows) {
    std::printf("  alpha=%-8g %-16s value=%- .10g err=%- .4g (%.1f ms)\n",
                r.alpha, r.quantity.c_str(), r.value, r.abs_error,
                r.runtime_ms);
  }
  std::printf("%s: total %.1f ms, wrote %s\n", rep.experiment.c_str(),
              total.ms(), rep.out_path.c_str());
  return rep;
}

std::string usage_text() {
  std::ostringstream o;
  o << version_string() << "\n\n"
    << "usage: riesz-flow <experiment> [flags]\n"
    << "       riesz-flow --config <file> [flags]\n\n"
    << "experiments:\n"
    << "  sweep-zero        -alpha J^alpha and Jhat^alpha against their alpha->0 limits\n"
    << "  sweep-d           J^alpha and Jtilde^alpha against their alpha->d limits\n"
    << "  flow-zero-scaled  MM flow of -alpha J^alpha vs the exponential-decay limit flow\n"
    << "  flow-zero-renorm  MM flow of Jhat^alpha vs the flow of the 0-order operator\n"
    << "  flow-d-plain      MM flow of sign*J^alpha vs the averaged-growth limit flow\n"
    << "  flow-d-renorm     MM flow of sign*Jtilde^alpha vs the log-potential flow\n"
    << "  fourier-check     quadrature check of the Riesz kernel Fourier identity (d=1)\n"
    << "  grad-check        directional-derivative defects for every energy kind\n"
    << "  counterexample    concentration scan: small L2 norm with large G1 energy\n"
    << "  certify           lambda-convexity/positivity certificates for all energies\n\n"
    << "flags (defaults in parentheses):\n"
    << "  --dim {1,2}        spatial dimension (1)\n"
    << "  --n INT            cells per axis (1024 in d=1, 128 in d=2, 64 for grad-check)\n"
    << "  --box lo,hi[;lo,hi] domain box (0,1 per axis)\n"
    << "  --alphas a,b,...   alpha list (per-experiment default)\n"
    << "  --sign {+1,-1}     energy sign for flow-d-* (-1 there, +1 elsewhere)\n"
    << "  --tau REAL         time step (min(1e-3, 0.1/lambda))\n"
    << "  --T REAL           final time (0.5)\n"
    << "  --u0 SRC           indicator | gaussian | two-bump | field file (indicator)\n"
    << "  --scheme {mm,euler} time scheme (mm = minimizing movements)\n"
    << "  --record-every INT record interval in steps (1)\n"
    << "  --quad-n INT       quadrature effort for fourier-check (4096)\n"
    << "  --tol REAL         pass tolerance (per-experiment default)\n"
    << "  --out PATH         output CSV path (<experiment>.csv)\n"
    << "  --plot             also write a gnuplot script next to the CSV\n"
    << "  --config PATH      key=value config file; flags override the file\n\n"
    << "CSV: '#'-prefixed metadata lines, then '# columns: ...', then data rows\n"
    << "(17 significant digits; identical configs produce byte-identical files).\n"
    << "columns per experiment:\n"
    << "  sweep-*, flow-*:  alpha,quantity,value,limit_value,abs_error\n"
    << "  fourier-check:    alpha,lhs,rhs,rel_error\n"
    << "  grad-check:       kind,alpha,t,defect,defect_over_t\n"
    << "  counterexample:   n,alpha,l2_norm_sq,l2_norm,g1\n"
    << "  certify:          kind,alpha,sign,lambda,cert_kind,witness_bound\n\n"
    << "pass rules: sweeps and flows need the error/gap monotone along the\n"
    << "alpha family and the final value within --tol; fourier-check and\n"
    << "grad-check need every defect within --tol; counterexample needs some\n"
    << "row with l2_norm_sq <= 0.5 and g1 >= 10; certify always passes.\n\n"
    << "exit codes: 0 pass, 1 usage error, 2 numeric failure, 3 tolerance failure\n";
  return o.str();
}

} // namespace riesz
