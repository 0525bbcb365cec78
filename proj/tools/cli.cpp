#include "cli.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "advrisk/certify.hpp"
#include "advrisk/dualsolve.hpp"
#include "advrisk/error.hpp"
#include "advrisk/io.hpp"
#include "advrisk/parallel.hpp"
#include "advrisk/pipeline.hpp"
#include "advrisk/primalsolve.hpp"
#include "json.hpp"

namespace advrisk::cli {

namespace {

struct Shared {
  double tol = 0.0;  // 0: per-loss default
  std::uint64_t seed = 0;
  unsigned threads = 1;
  std::string loss = "exp";
  std::string out;
  std::string format = "text";
  CLI::Option* seed_option = nullptr;
};

void add_shared(CLI::App* sub, Shared& s) {
  sub->add_option("--tol", s.tol, "Certificate tolerance, relative to total mass")
      ->check(CLI::PositiveNumber);
  s.seed_option = sub->add_option("--seed", s.seed, "Seed recorded in solver configs");
  sub->add_option("--threads", s.threads, "Worker threads, 0 for all cores");
  sub->add_option("--loss", s.loss, "exp, logistic, hinge or zero-one")
      ->check(CLI::IsMember({"exp", "logistic", "hinge", "zero-one"}));
  sub->add_option("--out", s.out, "Output path");
  sub->add_option("--format", s.format, "Stdout format")->check(CLI::IsMember({"text", "json"}));
}

std::string num(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 10);
  return std::string(buf, res.ptr);
}

double tolerance_for(const Shared& s, LossKind kind) {
  return s.tol > 0.0 ? s.tol : default_tolerance(kind);
}

io::Instance load(const std::string& path, const Shared& s) {
  io::Instance inst = io::load_instance(path);
  if (s.seed_option && s.seed_option->count() > 0) {
    inst.primal.seed = s.seed;
    inst.dual.seed = s.seed;
  }
  return inst;
}

std::vector<LossKind> certificate_losses(LossKind requested) {
  std::vector<LossKind> losses{LossKind::kExponential};
  if (requested != LossKind::kExponential) losses.push_back(requested);
  return losses;
}

void summary_line(std::ostream& out, const Certificate& c, bool ok) {
  out << c.loss << ": primal=" << num(c.primal) << " dual=" << num(c.dual)
      << " gap=" << num(c.gap) << " r1=" << num(c.slack_sup_r1) << " r0=" << num(c.slack_sup_r0)
      << " r_pt=" << num(c.slack_pointwise) << " support=" << num(c.support_violation) << ' '
      << (c.diagnostic_only ? "DIAGNOSTIC" : (ok ? "CERTIFIED" : "NOT-CERTIFIED")) << '\n';
}

int cmd_solve(const std::string& path, const Shared& s, bool timing, std::ostream& out,
              std::ostream& err) {
  const auto start = std::chrono::steady_clock::now();
  const io::Instance inst = load(path, s);
  const io::Problem problem = io::prepare(inst);
  const LossKind requested = parse_loss(s.loss);
  const std::vector<LossKind> losses = certificate_losses(requested);
  const PipelineResult run = run_pipeline(problem.ground, problem.measure, inst.primal, inst.dual, losses);
  io::Provenance prov{inst.dual.seed, run.primal.iterations, run.dual.iterations,
                      run.primal.converged, run.dual.converged, -1.0};
  if (timing) {
    prov.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  }
  const io::Result result = io::make_result(run, requested, inst.epsilon, prov);
  const std::string text = io::dump_result(result);
  io::write_text_file(s.out.empty() ? "result.json" : s.out, text);

  const double total = problem.measure.total();
  int code = kOk;
  for (const Certificate& c : run.certificates) {
    const bool ok = certified(c, tolerance_for(s, parse_loss(c.loss)), total);
    if (s.format == "text") summary_line(out, c, ok);
    if (c.loss == loss_name(requested)) {
      if (c.diagnostic_only) {
        err << "warning: zero-one certificates are diagnostic only\n";
      } else if (!ok) {
        code = kNotCertified;
      }
    }
  }
  if (s.format == "json") out << text;
  if (code == kNotCertified) {
    err << "error: certificate for " << s.loss << " exceeds tolerance "
        << num(tolerance_for(s, requested)) << " (primal converged=" << run.primal.converged
        << ", dual converged=" << run.dual.converged << ")\n";
  }
  return code;
}

// Every comma-separated entry must be a complete number.
std::optional<std::vector<double>> parse_grid(const std::vector<std::string>& items) {
  std::vector<double> grid;
  for (const std::string& item : items) {
    double v = 0.0;
    const auto [end, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
    if (item.empty() || ec != std::errc() || end != item.data() + item.size()) return std::nullopt;
    grid.push_back(v);
  }
  return grid;
}

int cmd_sweep(const std::string& path, const std::vector<std::string>& items, const std::string& svg,
              const Shared& s, std::ostream& out, std::ostream& err) {
  const auto parsed = parse_grid(items);
  if (!parsed) {
    err << "error: --eps expects comma-separated numbers\n";
    return kUsageOrInput;
  }
  std::vector<double> grid = *parsed;
  if (grid.empty()) {
    err << "error: the epsilon grid is empty\n";
    return kUsageOrInput;
  }
  for (double e : grid) {
    if (!std::isfinite(e) || e < 0.0) {
      err << "error: epsilon values must be finite and non-negative\n";
      return kUsageOrInput;
    }
  }
  std::sort(grid.begin(), grid.end());
  const auto last = std::unique(grid.begin(), grid.end());
  if (last != grid.end()) {
    err << "warning: removed " << (grid.end() - last) << " duplicate epsilon value(s)\n";
    grid.erase(last, grid.end());
  }
  const io::Instance inst = load(path, s);
  const io::Problem problem = io::prepare(inst);
  const LossKind requested = parse_loss(s.loss);
  const std::vector<LossKind> losses{requested};
  std::vector<io::SweepRow> rows;
  int code = kOk;
  for (double eps : grid) {
    io::SweepRow row;
    row.eps = eps;
    row.loss = std::string(loss_name(requested));
    const auto start = std::chrono::steady_clock::now();
    try {
      const GroundSet g = problem.ground.with_epsilon(eps);
      const PipelineResult run = run_pipeline(g, problem.measure, inst.primal, inst.dual, losses);
      const Certificate& c = run.certificates.front();
      row.primal = c.primal;
      row.dual = c.dual;
      row.gap = c.gap;
      row.iters = run.primal.iterations + run.dual.iterations;
      if (!c.diagnostic_only && !certified(c, tolerance_for(s, requested), problem.measure.total())) {
        code = kNotCertified;
      }
    } catch (const Error& e) {
      row.failed = true;
      code = kNotCertified;
      err << "error: eps=" << num(eps) << ": " << e.what() << '\n';
    }
    row.runtime_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    rows.push_back(row);
  }
  if (s.out.empty()) {
    io::write_sweep_csv(out, rows);
  } else {
    std::ostringstream csv;
    io::write_sweep_csv(csv, rows);
    io::write_text_file(s.out, csv.str());
  }
  if (!svg.empty()) {
    std::ostringstream chart;
    io::write_sweep_svg(chart, rows);
    io::write_text_file(svg, chart.str());
  }
  return code;
}

int cmd_winf(const std::string& path, const std::string& result_path, const Shared& s,
             std::ostream& out, std::ostream& err) {
  const io::Instance inst = load(path, s);
  const io::Problem problem = io::prepare(inst);
  const GroundSet& g = problem.ground;
  const TwoClassMeasure& mu = problem.measure;
  nlohmann::json report;
  int code = kOk;
  if (result_path.empty()) {
    const double d = winf_distance(g, mu.mass0, mu.mass1);
    report["winf_p0_p1"] = d;
    if (s.format == "text") out << "W_inf(p0, p1) = " << num(d) << '\n';
  } else {
    const io::Result r = io::load_result(result_path);
    if (r.m0.size() != g.size()) {
      err << "mismatch: result has " << r.m0.size() << " points, instance has " << g.size() << '\n';
      return kVerifyMismatch;
    }
    const double d0 = winf_distance(g, mu.mass0, r.m0);
    const double d1 = winf_distance(g, mu.mass1, r.m1);
    const bool ok0 = winf_feasible(g, mu.mass0, r.m0, g.epsilon());
    const bool ok1 = winf_feasible(g, mu.mass1, r.m1, g.epsilon());
    report = {{"winf_p0_m0", d0}, {"winf_p1_m1", d1}, {"epsilon", g.epsilon()},
              {"feasible0", ok0}, {"feasible1", ok1}};
    if (s.format == "text") {
      out << "W_inf(p0, m0) = " << num(d0) << (ok0 ? " <= " : " > ") << "eps\n"
          << "W_inf(p1, m1) = " << num(d1) << (ok1 ? " <= " : " > ") << "eps\n";
    }
    if (!ok0 || !ok1) code = kVerifyMismatch;
  }
  if (s.format == "json") out << report.dump(2) << '\n';
  return code;
}

int cmd_attack(const std::string& path, const Shared& s, std::ostream& out, std::ostream& err) {
  const io::Instance inst = load(path, s);
  const io::Problem problem = io::prepare(inst);
  const LossKind requested = parse_loss(s.loss);
  const LossKind exp[] = {LossKind::kExponential};
  const PipelineResult run = run_pipeline(problem.ground, problem.measure, inst.primal, inst.dual, exp);
  const std::string text = io::dump_attack(run.dual, requested);
  if (s.out.empty()) {
    out << text;
  } else {
    io::write_text_file(s.out, text);
    if (s.format == "text") {
      out << "attack: " << run.dual.coupling0.entries.size() << " class-0 and "
          << run.dual.coupling1.entries.size() << " class-1 transports, objective "
          << num(dual_objective(Loss{requested}, run.dual.m0, run.dual.m1)) << '\n';
    }
  }
  if (!certified(run.certificates.front(), tolerance_for(s, LossKind::kExponential),
                 problem.measure.total())) {
    err << "error: the exponential certificate exceeds tolerance\n";
    return kNotCertified;
  }
  return kOk;
}

bool matches(double stored, double recomputed) {
  if (std::isinf(stored) || std::isinf(recomputed)) return stored == recomputed;
  return std::abs(stored - recomputed) <= 1e-9 * std::max(1.0, std::abs(recomputed));
}

bool matches(std::span<const double> stored, std::span<const double> recomputed) {
  if (stored.size() != recomputed.size()) return false;
  for (std::size_t i = 0; i < stored.size(); ++i) {
    if (!matches(stored[i], recomputed[i])) return false;
  }
  return true;
}

int cmd_verify(const std::string& path, const std::string& result_path, const Shared& s,
               std::ostream& out, std::ostream& err) {
  const io::Instance inst = load(path, s);
  const io::Problem problem = io::prepare(inst);
  const io::Result r = io::load_result(result_path);
  const GroundSet& g = problem.ground;
  const TwoClassMeasure& mu = problem.measure;
  auto fail = [&](const std::string& what) {
    err << "mismatch: " << what << '\n';
    return kVerifyMismatch;
  };
  if (r.f_exp.size() != g.size()) return fail("ground set size");
  if (!matches(r.epsilon, g.epsilon())) return fail("epsilon");
  const Loss exp{LossKind::kExponential};
  DualSolution dual;
  try {
    dual = make_dual_solution(exp, g.size(), r.coupling0, r.coupling1);
    if (!matches(r.m0, dual.m0)) return fail("m0");
    if (!matches(r.m1, dual.m1)) return fail("m1");
    check_dual_feasible(dual, g, mu);
  } catch (const Error& e) {
    return fail(e.what());
  }
  if (!matches(r.primal_exp, risk_adv(exp, r.f_exp, g, mu))) return fail("primal_exp");
  if (!matches(r.dual_exp, dual.objective)) return fail("dual_exp");
  if (!matches(r.eta, eta_hat(r.f_exp))) return fail("eta_hat");
  const double total = mu.total();
  for (const io::CertificateRecord& rec : r.certificates) {
    const Certificate& c = rec.certificate;
    LossKind kind;
    try {
      kind = parse_loss(c.loss);
    } catch (const Error&) {
      return fail("unknown loss " + c.loss);
    }
    const Loss loss{kind};
    if (!matches(rec.f, universal_field(loss, r.eta))) return fail(c.loss + ".f");
    Certificate again;
    try {
      again = certify(loss, rec.f, r.eta, dual, g, mu);
    } catch (const Error& e) {
      return fail(c.loss + ": " + e.what());
    }
    const std::pair<const char*, std::pair<double, double>> numbers[] = {
        {"primal", {c.primal, again.primal}},
        {"dual", {c.dual, again.dual}},
        {"gap", {c.gap, again.gap}},
        {"slack_sup_r1", {c.slack_sup_r1, again.slack_sup_r1}},
        {"slack_sup_r0", {c.slack_sup_r0, again.slack_sup_r0}},
        {"slack_pointwise", {c.slack_pointwise, again.slack_pointwise}},
        {"support_violation", {c.support_violation, again.support_violation}}};
    for (const auto& [name, values] : numbers) {
      if (!matches(values.first, values.second)) return fail(c.loss + "." + name);
    }
    if (c.winf_ok0 != again.winf_ok0) return fail(c.loss + ".winf_ok0");
    if (c.winf_ok1 != again.winf_ok1) return fail(c.loss + ".winf_ok1");
    if (c.diagnostic_only != again.diagnostic_only) return fail(c.loss + ".diagnostic_only");
    const bool ok = certified(again, tolerance_for(s, kind), total);
    if (!c.diagnostic_only && !ok) return fail(c.loss + " residual thresholds");
    if (s.format == "text") summary_line(out, again, ok);
  }
  if (s.format == "text") out << "verified " << r.certificates.size() << " certificate(s)\n";
  return kOk;
}

int cmd_oracle(const std::string& path, int grid_steps, double primal_step, const Shared& s,
               std::ostream& out) {
  const io::Instance inst = load(path, s);
  const io::Problem problem = io::prepare(inst);
  const Loss loss{parse_loss(s.loss)};
  nlohmann::json report;
  report["loss"] = s.loss;
  const double dual = brute_dual(loss, problem.ground, problem.measure, grid_steps);
  report["brute_dual"] = dual;
  std::optional<double> primal;
  if (problem.ground.size() <= 3 && loss.kind != LossKind::kZeroOne) {
    primal = brute_primal(loss, problem.ground, problem.measure,
                          default_primal_candidates(4.0, primal_step));
    report["brute_primal"] = *primal;
  }
  if (s.format == "json") {
    out << report.dump(2) << '\n';
  } else {
    out << s.loss << ": brute_dual=" << num(dual);
    if (primal) out << " brute_primal=" << num(*primal);
    out << '\n';
  }
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Adversarial surrogate risk: primal/dual solver and certificates", "advrisk"};
  app.require_subcommand(1);

  Shared s;
  std::string instance, result_path, svg;
  std::vector<std::string> grid;
  bool timing = false;
  int grid_steps = 100;
  double primal_step = 0.02;

  CLI::App* solve = app.add_subcommand("solve", "Solve, certify and write a result file");
  solve->add_option("instance", instance, "Instance JSON")->required();
  solve->add_flag("--timing", timing, "Record wall time in the result file");
  add_shared(solve, s);

  CLI::App* sweep = app.add_subcommand("sweep", "Primal and dual values over an epsilon grid (CSV)");
  sweep->add_option("instance", instance, "Instance JSON")->required();
  sweep->add_option("--eps", grid, "Comma-separated epsilon values")->delimiter(',')->required();
  sweep->add_option("--svg", svg, "Also write a line chart");
  add_shared(sweep, s);

  CLI::App* winf = app.add_subcommand("winf", "W-infinity distances between class measures");
  winf->add_option("instance", instance, "Instance JSON")->required();
  winf->add_option("--result", result_path, "Compare p_i with the result's m_i instead");
  add_shared(winf, s);

  CLI::App* attack = app.add_subcommand("attack", "Emit the optimal attack couplings");
  attack->add_option("instance", instance, "Instance JSON")->required();
  add_shared(attack, s);

  CLI::App* verify = app.add_subcommand("verify", "Recompute every certificate in a result file");
  verify->add_option("instance", instance, "Instance JSON")->required();
  verify->add_option("result", result_path, "Result JSON")->required();
  add_shared(verify, s);

  CLI::App* oracle = app.add_subcommand("oracle", "Brute-force dual (and primal) values for tiny instances");
  oracle->add_option("instance", instance, "Instance JSON")->required();
  oracle->add_option("--grid-steps", grid_steps, "Coupling grid subdivisions")->check(CLI::PositiveNumber);
  oracle->add_option("--primal-step", primal_step, "Score grid spacing")->check(CLI::PositiveNumber);
  add_shared(oracle, s);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsageOrInput;
  }

  parallel::set_max_threads(s.threads);
  try {
    if (*solve) return cmd_solve(instance, s, timing, out, err);
    if (*sweep) return cmd_sweep(instance, grid, svg, s, out, err);
    if (*winf) return cmd_winf(instance, result_path, s, out, err);
    if (*attack) return cmd_attack(instance, s, out, err);
    if (*verify) return cmd_verify(instance, result_path, s, out, err);
    if (*oracle) return cmd_oracle(instance, grid_steps, primal_step, s, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kUsageOrInput;
  }
  return kUsageOrInput;
}

}  // namespace advrisk::cli
