// ncsplit command-line front end: experiment drivers, parameter checking,
// one-off solves from JSON problem files, and the divergence-cycle replay.

#include <atomic>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ncsplit/ncsplit.hpp"

namespace {

using nlohmann::json;
using namespace ncsplit;

// ---------------------------------------------------------------------------
// Small utilities
// ---------------------------------------------------------------------------

void write_output(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(out_path, std::ios::binary);
  if (!f) throw contract_error("cannot open output file: " + out_path);
  f << text;
}

std::uint64_t resolve_seed(std::optional<std::uint64_t> cli_seed) {
  if (cli_seed) return *cli_seed;
  if (const char* env = std::getenv("NCSPLIT_SEED")) {
    try {
      return std::stoull(env);
    } catch (const std::exception&) {
      throw contract_error("NCSPLIT_SEED is not an unsigned integer");
    }
  }
  return 1;
}

// Fans fn(0..count-1) over up to `jobs` worker threads; results keep their
// index order, so multi-seed output is byte-stable regardless of scheduling.
template <typename Result, typename Fn>
std::vector<Result> run_indexed(std::size_t count, unsigned jobs, Fn fn) {
  std::vector<Result> results(count);
  if (jobs <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) results[i] = fn(i);
    return results;
  }
  std::vector<std::exception_ptr> errors(count);
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        results[i] = fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  const unsigned n_workers = std::min<unsigned>(jobs, static_cast<unsigned>(count));
  pool.reserve(n_workers);
  for (unsigned w = 0; w < n_workers; ++w) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return results;
}

json vector_to_json(const Vector& v) { return json(v); }

json residuals_to_json(const StationarityResiduals& r) {
  return json{{"grad", r.grad}, {"feas", r.feas}, {"prox_fixed_point", r.prox_fixed_point}};
}

const char* to_string(AdmmTermination t) {
  switch (t) {
    case AdmmTermination::converged: return "converged";
    case AdmmTermination::max_iter: return "max_iter";
    case AdmmTermination::merit_violation: return "merit_violation";
  }
  return "max_iter";
}

const char* to_string(PgTermination t) {
  switch (t) {
    case PgTermination::converged: return "converged";
    case PgTermination::max_iter: return "max_iter";
    case PgTermination::descent_violation: return "descent_violation";
  }
  return "max_iter";
}

// ---------------------------------------------------------------------------
// JSON problem-file parsing (dense matrices as row-major arrays plus dims)
// ---------------------------------------------------------------------------

Vector vector_from_json(const json& j, const char* what) {
  if (!j.is_array()) throw contract_error(std::string(what) + ": expected an array");
  return j.get<Vector>();
}

DenseMatrix matrix_from_json(const json& j, const char* what) {
  if (!j.contains("rows") || !j.contains("cols") || !j.contains("data"))
    throw contract_error(std::string(what) + ": expected {rows, cols, data}");
  DenseMatrix m(j["rows"].get<std::size_t>(), j["cols"].get<std::size_t>());
  m.data = j["data"].get<Vector>();
  if (m.data.size() != m.rows * m.cols)
    throw contract_error(std::string(what) + ": data length != rows*cols");
  return m;
}

LinearOperator operator_from_json(const json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "identity") return LinearOperator::identity(j.at("n").get<std::size_t>());
  if (kind == "first_difference")
    return LinearOperator::first_difference(j.at("n").get<std::size_t>());
  if (kind == "dense") {
    DenseMatrix m = matrix_from_json(j, "M");
    return LinearOperator::dense(m.rows, m.cols, std::move(m.data));
  }
  throw contract_error("M.kind must be identity, first_difference or dense");
}

SmoothModel smooth_from_json(const json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "proximity") return SmoothModel::proximity(vector_from_json(j.at("x_hat"), "h.x_hat"));
  if (kind == "least_squares" || kind == "negated_least_squares") {
    DenseMatrix a = matrix_from_json(j.at("A"), "h.A");
    LinearOperator op = LinearOperator::dense(a.rows, a.cols, std::move(a.data));
    Vector b = vector_from_json(j.at("b"), "h.b");
    return kind == "least_squares" ? SmoothModel::least_squares(std::move(op), std::move(b))
                                   : SmoothModel::negated_least_squares(std::move(op), std::move(b));
  }
  if (kind == "indefinite_quadratic")
    return SmoothModel::indefinite_quadratic(matrix_from_json(j.at("Q"), "h.Q"),
                                             vector_from_json(j.at("c"), "h.c"));
  throw contract_error("h.kind not recognized: " + kind);
}

ProxOperator prox_from_json(const json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "indicator_l0_ball")
    return ProxOperator::indicator_l0_ball(vector_from_json(j.at("center"), "P.center"),
                                           j.at("budget").get<std::size_t>());
  if (kind == "indicator_card") return ProxOperator::indicator_card(j.at("budget").get<std::size_t>());
  if (kind == "l0_penalty") return ProxOperator::l0_penalty(j.at("lambda").get<double>());
  if (kind == "l1_penalty" || kind == "l_half_penalty") {
    Vector center;
    if (j.contains("center")) center = vector_from_json(j["center"], "P.center");
    const double lambda = j.at("lambda").get<double>();
    return kind == "l1_penalty" ? ProxOperator::l1_penalty(lambda, std::move(center))
                                : ProxOperator::l_half_penalty(lambda, std::move(center));
  }
  if (kind == "indicator_l1_ball")
    return ProxOperator::indicator_l1_ball(j.at("radius").get<double>());
  if (kind == "indicator_linf_ball")
    return ProxOperator::indicator_linf_ball(j.at("radius").get<double>());
  if (kind == "indicator_finite_set") {
    std::vector<Vector> pts;
    for (const auto& p : j.at("points")) pts.push_back(vector_from_json(p, "P.points[i]"));
    return ProxOperator::indicator_finite_set(std::move(pts));
  }
  throw contract_error("P.kind not recognized: " + kind);
}

// ---------------------------------------------------------------------------
// cpv subcommand
// ---------------------------------------------------------------------------

struct CpvOptions {
  std::size_t m = 50, n = 200, r = 10;
  std::optional<std::uint64_t> seed;
  std::size_t seeds = 1;
  std::string mode = "all";
  double tol = 1e-8;
  unsigned jobs = 1;
  std::string format = "csv";
  std::string out;
};

int run_cpv_command(const CpvOptions& opt) {
  const std::uint64_t seed0 = resolve_seed(opt.seed);
  struct Entry {
    CpvRow l0, l1, warm;
    std::uint64_t seed;
  };
  auto one = [&](std::size_t i) {
    Entry e;
    e.seed = seed0 + i;
    const CpvInstance inst = gen_cpv(opt.m, opt.n, opt.r, e.seed);
    if (opt.mode == "all" || opt.mode == "l0") e.l0 = run_cpv(inst, CpvMode::l0_cold, opt.tol).row;
    if (opt.mode == "all" || opt.mode == "l1") e.l1 = run_cpv(inst, CpvMode::l1_baseline, opt.tol).row;
    if (opt.mode == "all" || opt.mode == "warm") e.warm = run_cpv(inst, CpvMode::l0_warm, opt.tol).row;
    return e;
  };
  const auto entries = run_indexed<Entry>(opt.seeds, opt.jobs, one);

  std::ostringstream body;
  double cpu_total = 0.0;
  if (opt.format == "json") {
    json rows = json::array();
    for (const auto& e : entries) {
      json row{{"seed", e.seed}, {"r", opt.r}, {"n", opt.n}};
      auto put = [&row](const char* name, const CpvRow& r) {
        row[name] = {{"iter", r.iter}, {"vio", r.vio}, {"dist", r.dist}};
      };
      if (opt.mode == "all" || opt.mode == "l0") put("l0", e.l0);
      if (opt.mode == "all" || opt.mode == "l1") put("l1", e.l1);
      if (opt.mode == "all" || opt.mode == "warm") put("l0_warm", e.warm);
      rows.push_back(row);
      cpu_total += e.l0.cpu_s + e.l1.cpu_s + e.warm.cpu_s;
    }
    body << rows.dump(2) << "\n";
  } else {
    body << (opt.mode == "all" ? cpv_all_csv_header() : cpv_csv_header()) << "\n";
    for (const auto& e : entries) {
      if (opt.mode == "all") {
        body << cpv_all_csv_row(opt.r, opt.n, e.l0, e.l1, e.warm) << "\n";
      } else {
        const CpvRow& r = opt.mode == "l0" ? e.l0 : (opt.mode == "l1" ? e.l1 : e.warm);
        body << cpv_csv_row(opt.r, opt.n, r) << "\n";
      }
      cpu_total += e.l0.cpu_s + e.l1.cpu_s + e.warm.cpu_s;
    }
  }
  write_output(body.str(), opt.out);
  std::cerr << "cpv: " << entries.size() << " instance(s), cpu " << format_g17(cpu_total) << " s\n";
  return 0;
}

// ---------------------------------------------------------------------------
// pcf subcommand
// ---------------------------------------------------------------------------

struct PcfOptions {
  std::size_t n = 1000, r = 20;
  double tau = 0.0;
  std::optional<std::uint64_t> seed;
  std::size_t seeds = 1;
  double tol = 1e-8;
  unsigned jobs = 1;
  std::string format = "csv";
  std::string out;
};

int run_pcf_command(const PcfOptions& opt) {
  const std::uint64_t seed0 = resolve_seed(opt.seed);
  struct Entry {
    PcfRow row;
    std::uint64_t seed;
  };
  auto one = [&](std::size_t i) {
    Entry e;
    e.seed = seed0 + i;
    const PcfInstance inst = gen_pcf(opt.n, opt.r, opt.tau, e.seed);
    e.row = run_pcf(inst, opt.tol).row;
    return e;
  };
  const auto entries = run_indexed<Entry>(opt.seeds, opt.jobs, one);

  std::ostringstream body;
  double cpu_total = 0.0;
  if (opt.format == "json") {
    json rows = json::array();
    for (const auto& e : entries) {
      rows.push_back({{"seed", e.seed},
                      {"tau", opt.tau},
                      {"r", opt.r},
                      {"n", opt.n},
                      {"iter", e.row.iter},
                      {"card", e.row.card},
                      {"err", e.row.err}});
      cpu_total += e.row.cpu_s;
    }
    body << rows.dump(2) << "\n";
  } else {
    body << pcf_csv_header() << "\n";
    for (const auto& e : entries) {
      body << pcf_csv_row(opt.tau, opt.r, opt.n, e.row) << "\n";
      cpu_total += e.row.cpu_s;
    }
  }
  write_output(body.str(), opt.out);
  std::cerr << "pcf: " << entries.size() << " instance(s), cpu " << format_g17(cpu_total) << " s\n";
  return 0;
}

// ---------------------------------------------------------------------------
// concave subcommand
// ---------------------------------------------------------------------------

struct ConcaveOptions {
  std::size_t m = 100, n = 300;
  std::optional<std::uint64_t> seed;
  std::size_t seeds = 1;
  std::string ball = "l1";
  std::vector<double> multipliers = {1.0, 2.0, 10.0, 50.0};
  double tol = 1e-8;
  unsigned jobs = 1;
  std::string format = "csv";
  std::string out;
};

int run_concave_command(const ConcaveOptions& opt) {
  const std::uint64_t seed0 = resolve_seed(opt.seed);
  const BallKind ball = opt.ball == "linf" ? BallKind::linf : BallKind::l1;
  struct Entry {
    ConcaveRunResult result;
    std::uint64_t seed;
  };
  auto one = [&](std::size_t i) {
    Entry e;
    e.seed = seed0 + i;
    const ConcaveInstance inst = gen_concave(opt.m, opt.n, e.seed, ball);
    e.result = run_concave(inst, opt.multipliers, opt.tol);
    return e;
  };
  const auto entries = run_indexed<Entry>(opt.seeds, opt.jobs, one);

  std::ostringstream body;
  if (opt.format == "json") {
    json rows = json::array();
    for (const auto& e : entries)
      for (const auto& r : e.result.rows)
        rows.push_back({{"seed", e.seed},
                        {"n", opt.n},
                        {"lambda_max", e.result.lambda_max},
                        {"beta_mult", r.beta_mult},
                        {"iter", r.iter},
                        {"fval", r.fval}});
    body << rows.dump(2) << "\n";
  } else {
    body << concave_csv_header() << "\n";
    for (const auto& e : entries)
      for (const auto& r : e.result.rows) body << concave_csv_row(opt.n, e.result.lambda_max, r) << "\n";
  }
  write_output(body.str(), opt.out);
  return 0;
}

// ---------------------------------------------------------------------------
// cycle subcommand
// ---------------------------------------------------------------------------

struct CycleOptions {
  double eta = 1.0;
  double beta = 1.0;
  std::size_t steps = 80;
  std::string format = "text";
  std::string out;
};

int run_cycle_command(const CycleOptions& opt) {
  const CycleTrace trace = cycle_run(opt.eta, opt.beta, opt.steps);
  const CycleVerdict verdict = cycle_check(trace);

  if (opt.format == "json") {
    json states = json::array();
    for (std::size_t t = 0; t < trace.iterates.size(); ++t) {
      const auto& s = trace.iterates[t];
      states.push_back({{"t", t + 1},
                        {"y1", vector_to_json(s.y1)},
                        {"y2", vector_to_json(s.y2)},
                        {"x", vector_to_json(s.x)},
                        {"z1", vector_to_json(s.z1)},
                        {"z2", vector_to_json(s.z2)}});
    }
    json doc{{"eta", trace.eta},
             {"beta", trace.beta},
             {"steps", opt.steps},
             {"verdict", verdict.pass ? "PASS" : "FAIL"},
             {"period", verdict.period},
             {"message", verdict.message},
             {"iterates", states}};
    write_output(doc.dump(2) + "\n", opt.out);
  } else if (opt.format == "csv") {
    std::ostringstream body;
    body << "t,y1_1,y1_2,y2_1,y2_2,x_1,x_2,z1_1,z1_2,z2_1,z2_2\n";
    for (std::size_t t = 0; t < trace.iterates.size(); ++t) {
      const auto& s = trace.iterates[t];
      body << join_csv({std::to_string(t + 1), format_g17(s.y1[0]), format_g17(s.y1[1]),
                        format_g17(s.y2[0]), format_g17(s.y2[1]), format_g17(s.x[0]),
                        format_g17(s.x[1]), format_g17(s.z1[0]), format_g17(s.z1[1]),
                        format_g17(s.z2[0]), format_g17(s.z2[1])})
           << "\n";
    }
    write_output(body.str(), opt.out);
  }
  std::cout << "period=" << verdict.period << " verdict=" << (verdict.pass ? "PASS" : "FAIL") << "\n";
  return verdict.pass ? 0 : 1;
}

// ---------------------------------------------------------------------------
// check subcommand
// ---------------------------------------------------------------------------

struct CheckOptions {
  std::string problem_file;
  std::string pattern = "strongly-convex-surjective";
  std::size_t m = 50, n = 200;
  std::optional<std::uint64_t> seed;
  std::string beta = "auto";
  std::optional<double> gamma;
  std::string prox = "none";
  double lambda = 1.0;
  double radius = 1.0;
  std::size_t budget = 1;
  std::string out;
};

int run_check_command(const CheckOptions& opt) {
  std::optional<SmoothModel> h;
  std::optional<LinearOperator> m;
  ProximalTermSpec phi;
  std::optional<double> beta_from_file;

  if (!opt.problem_file.empty()) {
    std::ifstream f(opt.problem_file);
    if (!f) throw contract_error("cannot open problem file: " + opt.problem_file);
    json doc = json::parse(f);
    h = smooth_from_json(doc.at("h"));
    m = operator_from_json(doc.at("M"));
    if (doc.contains("admm")) {
      const json& a = doc["admm"];
      if (a.contains("phi") && a["phi"].get<std::string>() == "l_smoothing")
        phi = ProximalTermSpec::l_smoothing(
            a.contains("smoothing_l") ? a["smoothing_l"].get<double>() : h->hessian_bounds().lipschitz,
            *h);
      else
        phi = ProximalTermSpec::zero(*h);
      if (a.contains("beta") && a["beta"].is_number()) beta_from_file = a["beta"].get<double>();
    } else {
      phi = ProximalTermSpec::zero(*h);
    }
  } else {
    RngStream rng(resolve_seed(opt.seed));
    if (opt.pattern == "strongly-convex-surjective") {
      m = LinearOperator::dense(opt.m, opt.n, randn_vector(rng, opt.m * opt.n));
      h = SmoothModel::proximity(randn_vector(rng, opt.n));
      phi = ProximalTermSpec::zero(*h);
    } else if (opt.pattern == "identity-least-squares" || opt.pattern == "linearized-identity") {
      LinearOperator a = LinearOperator::dense(opt.m, opt.n, randn_vector(rng, opt.m * opt.n));
      Vector b = randn_vector(rng, opt.m);
      h = SmoothModel::least_squares(std::move(a), std::move(b));
      m = LinearOperator::identity(opt.n);
      phi = opt.pattern == "linearized-identity"
                ? ProximalTermSpec::l_smoothing(h->hessian_bounds().lipschitz, *h)
                : ProximalTermSpec::zero(*h);
    } else {
      throw contract_error("unknown pattern: " + opt.pattern);
    }
  }

  const BetaSuggestion suggestion = suggest_beta(*h, *m, phi);
  double beta = suggestion.beta;
  if (!opt.problem_file.empty() && beta_from_file) beta = *beta_from_file;
  if (opt.beta != "auto") {
    try {
      beta = std::stod(opt.beta);
    } catch (const std::exception&) {
      throw contract_error("--beta must be a number or 'auto'");
    }
  }

  AssumptionReport rep = check_assumption(*h, *m, phi, beta, opt.gamma);
  rep.suggested_beta = suggestion.beta;
  rep.rule = suggestion.rule;

  std::optional<ProxOperator> p;
  if (opt.prox == "l1") p = ProxOperator::l1_penalty(opt.lambda);
  else if (opt.prox == "l_half") p = ProxOperator::l_half_penalty(opt.lambda);
  else if (opt.prox == "l0") p = ProxOperator::l0_penalty(opt.lambda);
  else if (opt.prox == "l0_ball") p = ProxOperator::indicator_l0_ball(zeros(m->rows()), opt.budget);
  else if (opt.prox == "card") p = ProxOperator::indicator_card(opt.budget);
  else if (opt.prox == "l1_ball") p = ProxOperator::indicator_l1_ball(opt.radius);
  else if (opt.prox == "linf_ball") p = ProxOperator::indicator_linf_ball(opt.radius);
  else if (opt.prox != "none") throw contract_error("unknown prox kind: " + opt.prox);

  if (p) {
    const BoundednessVerdict bv = check_boundedness(*h, *p, *m, beta, rep.gamma_used);
    rep.bounded_ok = bv.ok;
    rep.bounded_reason = bv.reason;
  } else {
    rep.bounded_reason = "not_checked";
  }

  json doc{{"sigma", rep.sigma},
           {"delta", rep.delta},
           {"gamma", rep.gamma_used},
           {"margin", rep.margin},
           {"assumption_ok", rep.assumption_ok},
           {"beta", beta},
           {"suggested_beta", rep.suggested_beta},
           {"rule", to_string(rep.rule)},
           {"bounded_ok", rep.bounded_ok},
           {"bounded_reason", rep.bounded_reason}};
  write_output(doc.dump(2) + "\n", opt.out);
  return 0;
}

// ---------------------------------------------------------------------------
// solve subcommand
// ---------------------------------------------------------------------------

struct SolveOptions {
  std::string problem_file;
  std::string out;
};

int run_solve_command(const SolveOptions& opt) {
  std::ifstream f(opt.problem_file);
  if (!f) throw contract_error("cannot open problem file: " + opt.problem_file);
  const json doc = json::parse(f);

  const std::string algorithm = doc.at("algorithm").get<std::string>();
  const SmoothModel h = smooth_from_json(doc.at("h"));
  const ProxOperator p = prox_from_json(doc.at("P"));

  if (algorithm == "admm") {
    const LinearOperator m = operator_from_json(doc.at("M"));
    AdmmConfig cfg;
    bool beta_auto = true;
    if (doc.contains("admm")) {
      const json& a = doc["admm"];
      if (a.contains("phi") && a["phi"].get<std::string>() == "l_smoothing")
        cfg.phi = ProximalTermSpec::l_smoothing(
            a.contains("smoothing_l") ? a["smoothing_l"].get<double>() : h.hessian_bounds().lipschitz,
            h);
      if (a.contains("beta") && a["beta"].is_number()) {
        cfg.beta = a["beta"].get<double>();
        beta_auto = false;
      }
      if (a.contains("gamma")) cfg.gamma = a["gamma"].get<double>();
      if (a.contains("tol")) cfg.tol = a["tol"].get<double>();
      if (a.contains("max_iter")) cfg.max_iter = a["max_iter"].get<std::size_t>();
      if (a.contains("record_history")) cfg.record_history = a["record_history"].get<bool>();
      if (a.contains("heuristic")) {
        const json& hj = a["heuristic"];
        BetaHeuristic heur;
        if (hj.contains("beta0")) heur.beta0 = hj["beta0"].get<double>();
        if (hj.contains("growth")) heur.growth = hj["growth"].get<double>();
        if (hj.contains("cap_factor")) heur.cap_factor = hj["cap_factor"].get<double>();
        if (hj.contains("blowup_norm")) heur.blowup_norm = hj["blowup_norm"].get<double>();
        if (hj.contains("step_slack")) heur.step_slack = hj["step_slack"].get<double>();
        cfg.beta_heuristic = heur;
        beta_auto = false;
      }
    }
    if (beta_auto) {
      const BetaSuggestion s = suggest_beta(h, m, cfg.phi);
      cfg.beta = s.beta;
      if (!cfg.gamma) cfg.gamma = s.gamma;
    }
    AdmmInit init{zeros(m.cols()), zeros(m.rows()), zeros(m.rows())};
    if (doc.contains("init")) {
      const json& ij = doc["init"];
      if (ij.contains("x")) init.x = vector_from_json(ij["x"], "init.x");
      if (ij.contains("y")) init.y = vector_from_json(ij["y"], "init.y");
      if (ij.contains("z")) init.z = vector_from_json(ij["z"], "init.z");
    }
    const AdmmReport rep = admm_solve(h, p, m, cfg, init);
    json out{{"algorithm", "admm"},
             {"termination", to_string(rep.termination)},
             {"iters", rep.iters},
             {"objective", rep.objective},
             {"final_beta", rep.final_beta},
             {"residuals", residuals_to_json(rep.residuals)},
             {"x_final", vector_to_json(rep.x_final)},
             {"y_final", vector_to_json(rep.y_final)},
             {"z_final", vector_to_json(rep.z_final)}};
    write_output(out.dump(2) + "\n", opt.out);
    return rep.termination == AdmmTermination::converged ? 0 : 1;
  }

  if (algorithm == "pg") {
    PgConfig cfg;
    std::optional<double> requested_ell;
    if (doc.contains("pg")) {
      const json& g = doc["pg"];
      if (g.contains("ell") && g["ell"].is_number()) requested_ell = g["ell"].get<double>();
      if (g.contains("beta")) cfg.beta = g["beta"].get<double>();
      if (g.contains("tol")) cfg.tol = g["tol"].get<double>();
      if (g.contains("max_iter")) cfg.max_iter = g["max_iter"].get<std::size_t>();
      if (g.contains("record_history")) cfg.record_history = g["record_history"].get<bool>();
    }
    const EllEstimate ell = estimate_ell(h, requested_ell);
    cfg.ell = ell.ell;
    if (!(cfg.beta > 0.0)) cfg.beta = 0.99 / cfg.ell;
    Vector x0 = zeros(h.dim());
    if (doc.contains("init") && doc["init"].contains("x"))
      x0 = vector_from_json(doc["init"]["x"], "init.x");
    const PgReport rep = pg_solve(h, p, cfg, x0);
    json out{{"algorithm", "pg"},
             {"termination", to_string(rep.termination)},
             {"iters", rep.iters},
             {"objective", rep.objective},
             {"residual", rep.residual},
             {"ell", cfg.ell},
             {"ell_certificate", ell.certificate},
             {"beta", cfg.beta},
             {"x_final", vector_to_json(rep.x_final)}};
    write_output(out.dump(2) + "\n", opt.out);
    return rep.termination == PgTermination::converged ? 0 : 1;
  }

  throw contract_error("algorithm must be admm or pg");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ncsplit: splitting methods for nonconvex composite problems"};
  app.require_subcommand(1);

  CpvOptions cpv;
  auto* cpv_cmd = app.add_subcommand("cpv", "closest point with bounded equation violations");
  cpv_cmd->add_option("--m", cpv.m, "number of equations");
  cpv_cmd->add_option("--n", cpv.n, "dimension");
  cpv_cmd->add_option("--r", cpv.r, "violation budget");
  cpv_cmd->add_option("--seed", cpv.seed, "instance seed (env NCSPLIT_SEED, then 1)");
  cpv_cmd->add_option("--seeds", cpv.seeds, "number of consecutive seeds");
  cpv_cmd->add_option("--mode", cpv.mode, "all|l0|l1|warm")
      ->check(CLI::IsMember({"all", "l0", "l1", "warm"}));
  cpv_cmd->add_option("--tol", cpv.tol, "termination tolerance");
  cpv_cmd->add_option("--jobs", cpv.jobs, "worker threads over seeds");
  cpv_cmd->add_option("--format", cpv.format, "csv|json")->check(CLI::IsMember({"csv", "json"}));
  cpv_cmd->add_option("--out", cpv.out, "output path (default stdout)");

  PcfOptions pcf;
  auto* pcf_cmd = app.add_subcommand("pcf", "piecewise-constant fitting");
  pcf_cmd->add_option("--n", pcf.n, "signal length");
  pcf_cmd->add_option("--r", pcf.r, "number of pieces");
  pcf_cmd->add_option("--tau", pcf.tau, "noise level");
  pcf_cmd->add_option("--seed", pcf.seed, "instance seed");
  pcf_cmd->add_option("--seeds", pcf.seeds, "number of consecutive seeds");
  pcf_cmd->add_option("--tol", pcf.tol, "termination tolerance");
  pcf_cmd->add_option("--jobs", pcf.jobs, "worker threads over seeds");
  pcf_cmd->add_option("--format", pcf.format, "csv|json")->check(CLI::IsMember({"csv", "json"}));
  pcf_cmd->add_option("--out", pcf.out, "output path");

  ConcaveOptions conc;
  auto* conc_cmd = app.add_subcommand("concave", "concave minimization over a norm ball");
  conc_cmd->add_option("--m", conc.m, "rows of A");
  conc_cmd->add_option("--n", conc.n, "dimension");
  conc_cmd->add_option("--seed", conc.seed, "instance seed");
  conc_cmd->add_option("--seeds", conc.seeds, "number of consecutive seeds");
  conc_cmd->add_option("--ball", conc.ball, "l1|linf")->check(CLI::IsMember({"l1", "linf"}));
  conc_cmd->add_option("--multipliers", conc.multipliers, "step-size multipliers over 1/lambda_max")
      ->delimiter(',');
  conc_cmd->add_option("--tol", conc.tol, "termination tolerance");
  conc_cmd->add_option("--jobs", conc.jobs, "worker threads over seeds");
  conc_cmd->add_option("--format", conc.format, "csv|json")->check(CLI::IsMember({"csv", "json"}));
  conc_cmd->add_option("--out", conc.out, "output path");

  CycleOptions cyc;
  auto* cyc_cmd = app.add_subcommand("cycle", "replay the period-8 divergence example");
  cyc_cmd->add_option("--eta", cyc.eta, "set parameter in (0, 1]");
  cyc_cmd->add_option("--beta", cyc.beta, "penalty parameter");
  cyc_cmd->add_option("--steps", cyc.steps, "iterations to simulate");
  cyc_cmd->add_option("--format", cyc.format, "text|csv|json")
      ->check(CLI::IsMember({"text", "csv", "json"}));
  cyc_cmd->add_option("--out", cyc.out, "trace output path");

  CheckOptions chk;
  auto* chk_cmd = app.add_subcommand("check", "verify convergence conditions for a problem");
  chk_cmd->add_option("--problem", chk.problem_file, "JSON problem file");
  chk_cmd->add_option("--pattern", chk.pattern,
                      "strongly-convex-surjective|identity-least-squares|linearized-identity")
      ->check(CLI::IsMember(
          {"strongly-convex-surjective", "identity-least-squares", "linearized-identity"}));
  chk_cmd->add_option("--m", chk.m, "rows");
  chk_cmd->add_option("--n", chk.n, "dimension");
  chk_cmd->add_option("--seed", chk.seed, "instance seed");
  chk_cmd->add_option("--beta", chk.beta, "penalty parameter or 'auto'");
  chk_cmd->add_option("--gamma", chk.gamma, "split parameter in (0,1)");
  chk_cmd->add_option("--prox", chk.prox,
                      "none|l1|l_half|l0|l0_ball|card|l1_ball|linf_ball (for boundedness)");
  chk_cmd->add_option("--lambda", chk.lambda, "penalty weight");
  chk_cmd->add_option("--radius", chk.radius, "ball radius");
  chk_cmd->add_option("--budget", chk.budget, "sparsity budget");
  chk_cmd->add_option("--out", chk.out, "output path");

  SolveOptions slv;
  auto* slv_cmd = app.add_subcommand("solve", "one solver run from a JSON problem file");
  slv_cmd->add_option("--problem", slv.problem_file, "JSON problem file")->required();
  slv_cmd->add_option("--out", slv.out, "output path");

  try {
    app.parse(argc, argv);
    if (*cpv_cmd) return run_cpv_command(cpv);
    if (*pcf_cmd) return run_pcf_command(pcf);
    if (*conc_cmd) return run_concave_command(conc);
    if (*cyc_cmd) return run_cycle_command(cyc);
    if (*chk_cmd) return run_check_command(chk);
    if (*slv_cmd) return run_solve_command(slv);
    return 2;
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  } catch (const contract_error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const json::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "solver error: " << e.what() << "\n";
    return 1;
  }
}
