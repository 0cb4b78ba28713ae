#include "boolrr/app.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

#include <CLI11.hpp>

#include "boolrr/errors.hpp"
#include "boolrr/families.hpp"
#include "boolrr/fourier.hpp"
#include "boolrr/hyperc.hpp"
#include "boolrr/measures.hpp"
#include "boolrr/process.hpp"
#include "boolrr/restriction.hpp"

#ifndef BOOLRR_VERSION
#define BOOLRR_VERSION "0.0.0"
#endif
#ifndef BOOLRR_GIT_REV
#define BOOLRR_GIT_REV "unknown"
#endif

namespace boolrr {

using nlohmann::json;

std::string version_string() { return std::string(BOOLRR_VERSION) + "+" + BOOLRR_GIT_REV; }

namespace {

constexpr double kExactTol = 1e-9;

json to_json(const Estimate& e) { return {{"value", e.value}, {"std_error", e.std_error}, {"trials", e.trials}}; }

std::vector<int> mask_to_coords(std::uint64_t mask) {
  std::vector<int> out;
  for (int i = 0; mask != 0; ++i, mask >>= 1) {
    if (mask & 1U) out.push_back(i);
  }
  return out;
}

FunctionPtr need_fn(const ExperimentConfig& cfg) {
  if (cfg.fn.empty()) throw CLI::ValidationError("--fn", "a function spec is required");
  return make_family(cfg.fn);
}

// --- subcommands ------------------------------------------------------------

void do_analyze(const ExperimentConfig& cfg, RunRecord& rec) {
  rec.config = {{"fn", cfg.fn}};
  const FunctionPtr f = need_fn(cfg);
  const auto flip = influences(*f, InfluenceKind::kFlip);
  const auto spec = influences(*f, InfluenceKind::kSpectral);
  const double var = variance(*f);
  const double minf_flip = flip.empty() ? 0.0 : *std::max_element(flip.begin(), flip.end());
  const double minf_spec = spec.empty() ? 0.0 : *std::max_element(spec.begin(), spec.end());
  double as = 0.0;
  for (double v : flip) as += v;
  const Level1Report l1 = level1(*f);
  json r = {{"arity", f->arity()},
            {"describe", f->describe()},
            {"mean", f->mean()},
            {"variance", var},
            {"influences_flip", flip},
            {"influences_spectral", spec},
            {"max_influence_flip", minf_flip},
            {"max_influence_spectral", minf_spec},
            {"average_sensitivity", as},
            {"variance_le_total_influence", var <= as + 1e-12},
            {"level1", {{"alpha", l1.alpha}, {"grad_norm_sq", l1.grad_norm_sq}, {"ratio", l1.ratio}}}};
  // Average sensitivity against ln(Var / mINF), reported only.
  const double arg = minf_flip > 0.0 && var > 0.0 ? std::log(var / minf_flip) : 0.0;
  r["kkl_log_var_over_minf"] = arg;
  r["kkl_ratio"] = arg > 0.0 ? as / arg : 0.0;
  if (auto known = f->known_monotone(); known.has_value()) {
    r["monotone"] = *known;
  } else if (f->arity() <= kMaxBlockSearchArity) {
    r["monotone"] = is_monotone(f->materialize());
  }
  if (const TruthTable* t = f->table()) {
    const FourierCoefficients c = wht(*t);
    r["parseval_residual"] = std::abs(c.weight() - t->mean());
  }
  rec.results = r;
  if (var > as + 1e-12) rec.exit_code = 2;
}

void do_restrict_scan(const ExperimentConfig& cfg, RunRecord& rec) {
  if (cfg.mode != "fixed" && cfg.mode != "indep") throw CLI::ValidationError("--mode", "must be fixed or indep");
  std::vector<double> grid = cfg.rho.empty() ? std::vector<double>{0.5} : cfg.rho;
  rec.config = {{"fn", cfg.fn}, {"rho", grid}, {"trials", cfg.trials}, {"seed", cfg.seed}, {"mode", cfg.mode}};
  const FunctionPtr f = need_fn(cfg);
  const auto res = scan(*f, grid, cfg.trials, cfg.seed, cfg.mode == "fixed" ? ScanMode::kFixed : ScanMode::kIndependent);
  json rows = json::array();
  for (const auto& s : res) {
    rows.push_back({{"rho", s.rho},
                    {"mode", cfg.mode},
                    {"trials", s.trials},
                    {"seed", s.seed},
                    {"alive_count", s.alive_count},
                    {"p_constant", to_json(s.p_constant)},
                    {"p_constant_one", to_json(s.p_constant_one)},
                    {"mean_restricted", to_json(s.mean_restricted)},
                    {"var_min", s.var_min},
                    {"var_q05", s.var_q05},
                    {"var_q50", s.var_q50},
                    {"var_q95", s.var_q95}});
  }
  rec.results = {{"arity", f->arity()}, {"mean", f->mean()}, {"rows", rows}};
}

PiConfig pi_config(const ExperimentConfig& cfg) {
  if (!cfg.eps || !cfg.delta) throw CLI::ValidationError("--eps/--delta", "both are required");
  PiConfig pc;
  pc.epsilon = *cfg.eps;
  pc.delta = *cfg.delta;
  pc.complement = cfg.complement;
  pc.m = cfg.m;
  pc.seed = cfg.seed;
  return pc;
}

json audit_json(const KLAudit& a) {
  return {{"m", a.m},
          {"tau_prime", a.tau_prime},
          {"sum_z", a.sum_z},
          {"sum_step_kl", a.sum_step_kl},
          {"terminal_kl", a.terminal_kl},
          {"kl_total", a.kl_total},
          {"lambda_unit", a.lambda_unit},
          {"z_ratio", a.z_ratio},
          {"composite", a.composite},
          {"max_z_over_eps_sq", a.max_z_over_eps_sq},
          {"entries_ok", a.entries_ok}};
}

void do_pi_run(const ExperimentConfig& cfg, RunRecord& rec) {
  const PiConfig pc = pi_config(cfg);
  rec.config = {{"fn", cfg.fn}, {"eps", pc.epsilon}, {"delta", pc.delta}, {"seed", cfg.seed},
                {"m", cfg.m},   {"complement", cfg.complement}, {"emit_path", cfg.emit_path}};
  const FunctionPtr f = pi_target(need_fn(cfg), pc);
  const PiRun run = run_controlled(*f, pc);
  const KLAudit a = kl_ledger_audit(run, run.m);
  std::vector<int> T;
  for (int t = 1; t <= run.n; ++t) {
    if (run.inputs.controlled[static_cast<std::size_t>(t - 1)]) T.push_back(t);
  }
  json r = {{"n", run.n},
            {"m", run.m},
            {"tau", run.tau},
            {"tau1", run.tau1},
            {"tau2", run.tau2},
            {"tau_prime", run.tau_prime},
            {"terminal_kl", run.terminal_kl},
            {"clamped", run.clamped},
            {"clamp_step", run.clamp_step},
            {"max_mixture_residual", run.max_mixture_residual},
            {"pi", run.inputs.pi},
            {"control_times", T},
            {"z", run.inputs.z},
            {"audit", audit_json(a)}};
  if (cfg.emit_path) {
    json ledger = json::array();
    for (const auto& e : run.ledger) {
      ledger.push_back({{"t", e.t}, {"controlled", e.controlled}, {"ratio", e.ratio}, {"step_kl", e.step_kl}, {"z", e.z}});
    }
    r["y_values"] = run.y.values;
    r["x_values"] = run.x.values;
    r["f_path"] = run.f_path;
    r["ledger"] = ledger;
  }
  rec.results = r;
  if (!a.entries_ok || run.max_mixture_residual > 1e-12) rec.exit_code = 2;
}

void do_pi_stats(const ExperimentConfig& cfg, RunRecord& rec) {
  const FunctionPtr base = need_fn(cfg);
  PiConfig pc;
  pc.complement = cfg.complement;
  pc.m = cfg.m;
  pc.seed = cfg.seed;
  json defaults = nullptr;
  const FunctionPtr f = pi_target(base, pc);
  if (cfg.eps && cfg.delta) {
    pc.epsilon = *cfg.eps;
    pc.delta = *cfg.delta;
  } else {
    if (cfg.rho.size() != 1) throw CLI::ValidationError("--rho", "give --eps and --delta, or a single --rho with --p");
    const DefaultParameters d = default_parameters(cfg.rho[0], cfg.p, *f);
    pc.epsilon = d.epsilon;
    pc.delta = d.delta;
    defaults = {{"rho", cfg.rho[0]}, {"p", cfg.p}, {"epsilon", d.epsilon}, {"delta", d.delta}, {"m", d.m},
                {"variance", d.variance}, {"max_influence", d.max_influence},
                {"eps_condition", d.eps_condition}, {"delta_condition", d.delta_condition}};
  }
  rec.config = {{"fn", cfg.fn}, {"eps", pc.epsilon}, {"delta", pc.delta}, {"trials", cfg.trials},
                {"seed", cfg.seed}, {"complement", cfg.complement}};
  const StoppingStats s = stopping_stats(*f, pc, cfg.trials);
  rec.results = {{"defaults", defaults},
                 {"threshold", s.threshold},
                 {"p_early", to_json(s.p_early)},
                 {"p_early_tau1", to_json(s.p_early_tau1)},
                 {"p_early_tau2", to_json(s.p_early_tau2)},
                 {"bound", s.bound},
                 {"holds", s.holds},
                 {"clamped_runs", s.clamped_runs},
                 {"f0", s.mean_f0},
                 {"max_influence", s.max_influence},
                 {"eps_condition_lhs", s.eps_condition_lhs},
                 {"eps_condition_rhs", s.eps_condition_rhs},
                 {"eps_condition", s.eps_condition},
                 {"delta_condition_rhs", s.delta_condition_rhs},
                 {"delta_condition", s.delta_condition},
                 {"mean_sum_z", to_json(s.mean_sum_z)},
                 {"mean_sum_step_kl", to_json(s.mean_sum_step_kl)},
                 {"mean_terminal_kl", to_json(s.mean_terminal_kl)}};
}

void do_kl_audit(const ExperimentConfig& cfg, RunRecord& rec) {
  PiConfig pc = pi_config(cfg);
  const FunctionPtr f = pi_target(need_fn(cfg), pc);
  const int m = cfg.m < 0 ? default_horizon(f->arity(), pc.epsilon) : cfg.m;
  pc.m = m;
  rec.config = {{"fn", cfg.fn}, {"eps", pc.epsilon}, {"delta", pc.delta}, {"m", m}, {"trials", cfg.trials},
                {"seed", cfg.seed}, {"exhaustive", cfg.exhaustive}, {"complement", cfg.complement}};
  json rows = json::array();
  double worst = 0.0;
  bool ledger_ok = true;
  for (std::int64_t k = 0; k < cfg.trials; ++k) {
    Rng rng = make_stream(cfg.seed, {0x6b6c6175ULL, static_cast<std::uint64_t>(k)});
    const PiInputs in = sample_pi_inputs(f->arity(), pc.epsilon, rng);
    const PiRun run = run_controlled(*f, pc, in, rng);
    const KLAudit a = kl_ledger_audit(run, m);
    ledger_ok = ledger_ok && a.entries_ok;
    json row = {{"instance", k}, {"tau", run.tau}, {"ledger", audit_json(a)}};
    if (cfg.exhaustive) {
      const KLExact e = kl_exact_small_n(*f, pc.epsilon, pc.delta, in, m);
      const double resid = std::abs(e.kl - e.chain_rule);
      worst = std::max(worst, resid);
      row["kl"] = e.kl;
      row["chain_rule"] = e.chain_rule;
      row["residual"] = resid;
      row["expected_step_kl"] = e.expected_step_kl;
      row["expected_terminal"] = e.expected_terminal;
      row["endpoints"] = e.endpoints;
      row["free_coordinates"] = e.free_coordinates;
    }
    rows.push_back(row);
  }
  rec.results = {{"instances", cfg.trials}, {"max_residual", worst}, {"ledger_ok", ledger_ok}, {"rows", rows}};
  if (worst > kExactTol || !ledger_ok) rec.exit_code = 2;
}

void do_bs(const ExperimentConfig& cfg, RunRecord& rec) {
  rec.config = {{"fn", cfg.fn}, {"x", cfg.x}, {"exact", cfg.exact}, {"partition", cfg.M}, {"trials", cfg.trials},
                {"seed", cfg.seed}};
  const FunctionPtr f = need_fn(cfg);
  const int n = f->arity();
  if (cfg.M > 0) {
    const BsPartitionResult b = bs_partition_estimate(*f, cfg.M, cfg.trials, cfg.seed);
    rec.results = {{"M", b.M},
                   {"histogram", b.histogram},
                   {"mean_count", to_json(b.mean_count)},
                   {"p_below_half", to_json(b.p_below_half)},
                   {"p_block_constant", to_json(b.p_block_constant)},
                   {"lhs", b.lhs},
                   {"rhs", b.rhs},
                   {"double_counting_holds", b.double_counting_holds}};
    if (!b.double_counting_holds) rec.exit_code = 2;
    return;
  }
  if (n > 64) throw CLI::ValidationError("--x", "points need n <= 64");
  BitPoint x(n);
  if (cfg.x == "random") {
    Rng rng = make_stream(cfg.seed, {0x62737878ULL});
    for (int i = 0; i < n; ++i) x.set_sign(i, random_sign(rng));
  } else {
    std::size_t used = 0;
    const std::uint64_t k = std::stoull(cfg.x, &used, 16);
    if (used != cfg.x.size() || (n < 64 && (k >> n) != 0)) throw CLI::ValidationError("--x", "bad hex point index");
    x = BitPoint::from_index(n, k);
  }
  json r = {{"x_index", n <= 64 ? x.index() : 0}, {"sensitivity", sensitivity(*f, x)}};
  const BlockSensitivity b = bs_exact(*f, x);
  json blocks = json::array();
  for (auto m : b.certificate.blocks) blocks.push_back(mask_to_coords(m));
  r["block_sensitivity"] = b.value;
  r["certificate"] = blocks;
  r["minimal_blocks"] = b.minimal_blocks;
  r["certificate_verified"] = b.certificate.verify(*f);
  rec.results = r;
  if (!b.certificate.verify(*f) || b.value < sensitivity(*f, x)) rec.exit_code = 2;
}

void do_dt(const ExperimentConfig& cfg, RunRecord& rec) {
  rec.config = {{"fn", cfg.fn}};
  const FunctionPtr f = need_fn(cfg);
  rec.results = {{"arity", f->arity()}, {"dt", dt_exact(*f)}};
}

void do_osss(const ExperimentConfig& cfg, RunRecord& rec) {
  if (cfg.influence != "flip" && cfg.influence != "spectral") {
    throw CLI::ValidationError("--influence", "must be flip or spectral");
  }
  rec.config = {{"fn", cfg.fn}, {"influence", cfg.influence}};
  const FunctionPtr f = need_fn(cfg);
  const bool flip = cfg.influence == "flip";
  const OsssCheck c = osss_check(*f, flip ? InfluenceKind::kFlip : InfluenceKind::kSpectral);
  rec.results = {{"max_influence", c.max_influence}, {"dt", c.depth}, {"lhs", c.lhs}, {"rhs", c.rhs}, {"holds", c.holds}};
  if (flip && !c.holds) rec.exit_code = 2;
}

void do_hc_check(const ExperimentConfig& cfg, RunRecord& rec) {
  rec.config = {{"n", cfg.n}, {"trials", cfg.trials}, {"grid", cfg.grid}, {"seed", cfg.seed},
                {"exhaustive", cfg.exhaustive}};
  if (cfg.n < 0 || cfg.n > kMaxMultilinearArity) throw CLI::ValidationError("--n", "must lie in [0, 12]");
  if (cfg.exhaustive && cfg.n > 4) throw CLI::ValidationError("--exhaustive", "needs n <= 4");
  const std::int64_t count = cfg.exhaustive ? (std::int64_t{1} << (std::int64_t{1} << cfg.n)) : cfg.trials;
  std::vector<HcCheck> worst(static_cast<std::size_t>(count));
  std::vector<double> grad_slack(worst.size()), coord_slack(worst.size());
  const std::vector<double> ts = {0.0, 0.25, 0.5, 0.9};
  for_each_index(Exec::kParallel, count, [&](std::int64_t k) {
    MultilinearFunction g = [&] {
      if (cfg.exhaustive) {
        const int n = cfg.n;
        return MultilinearFunction::from_table(TruthTable::from_predicate(n, [&](std::uint64_t i) {
          return ((static_cast<std::uint64_t>(k) >> i) & 1U) != 0;
        }));
      }
      Rng rng = make_stream(cfg.seed, {0x68637263ULL, static_cast<std::uint64_t>(k)});
      return MultilinearFunction::random(cfg.n, rng);
    }();
    const auto u = static_cast<std::size_t>(k);
    worst[u] = hc_grid_min(g, cfg.grid);
    grad_slack[u] = INFINITY;
    coord_slack[u] = INFINITY;
    for (double t : ts) {
      const GradientBoundCheck p = gradient_bound_check(g, t);
      grad_slack[u] = std::min(grad_slack[u], p.grad_slack);
      coord_slack[u] = std::min(coord_slack[u], p.coord_slack);
    }
  });
  std::size_t arg = 0;
  std::int64_t violations = 0;
  for (std::size_t u = 0; u < worst.size(); ++u) {
    if (worst[u].margin < worst[arg].margin) arg = u;
    violations += worst[u].margin < -kExactTol || grad_slack[u] < -kExactTol || coord_slack[u] < -kExactTol ? 1 : 0;
  }
  const double g = worst.empty() ? 0.0 : *std::min_element(grad_slack.begin(), grad_slack.end());
  const double c = worst.empty() ? 0.0 : *std::min_element(coord_slack.begin(), coord_slack.end());
  rec.results = {{"functions", count},
                 {"min_margin", worst.empty() ? 0.0 : worst[arg].margin},
                 {"argmin_function", arg},
                 {"argmin_t", worst.empty() ? 0.0 : worst[arg].t},
                 {"argmin_T", worst.empty() ? 0.0 : worst[arg].T},
                 {"min_grad_slack", g},
                 {"min_coord_slack", c},
                 {"violations", violations}};
  if (violations > 0) rec.exit_code = 2;
}

void do_prop51(const ExperimentConfig& cfg, RunRecord& rec) {
  const std::vector<double> ts = cfg.t.empty() ? std::vector<double>{0.0, 0.25, 0.5, 0.9} : cfg.t;
  rec.config = {{"fn", cfg.fn}, {"t", ts}};
  const FunctionPtr f = need_fn(cfg);
  if (f->arity() > kMaxMultilinearArity) throw CLI::ValidationError("--fn", "prop51 needs n <= 12");
  const MultilinearFunction g = MultilinearFunction::from_table(f->materialize());
  json rows = json::array();
  for (double t : ts) {
    const GradientBoundCheck p = gradient_bound_check(g, t);
    rows.push_back({{"t", t},
                    {"grad_norm_sq", p.grad_norm_sq},
                    {"grad_norm_sq_series", p.grad_norm_sq_series},
                    {"sup_norm", p.sup_norm},
                    {"grad_bound", p.grad_bound},
                    {"grad_slack", p.grad_slack},
                    {"coord_expect", p.coord_expect},
                    {"coord_bound", p.coord_bound},
                    {"coord_slack", p.coord_slack}});
    if (p.grad_slack < -kExactTol || p.coord_slack < -kExactTol) rec.exit_code = 2;
  }
  rec.results = {{"rows", rows}};
}

json tail_json(const BetaTailResult& r) {
  return {{"t", r.t},
          {"epsilon", r.epsilon},
          {"theta", r.theta},
          {"max_influence", r.max_influence},
          {"tail", to_json(r.tail)},
          {"tail_star", to_json(r.tail_star)},
          {"bound", r.bound},
          {"holds", r.holds},
          {"precondition", r.precondition},
          {"precondition_lhs", r.precondition_lhs},
          {"precondition_rhs", r.precondition_rhs},
          {"sharp_bound", r.sharp_bound},
          {"sharp_applicable", r.sharp_applicable},
          {"star_exceeds_beta", r.star_exceeds_beta}};
}

void do_beta_tail(const ExperimentConfig& cfg, RunRecord& rec) {
  const FunctionPtr f = need_fn(cfg);
  if (cfg.discrete) {
    if (!cfg.eps) throw CLI::ValidationError("--eps", "required with --discrete");
    rec.config = {{"fn", cfg.fn}, {"eps", *cfg.eps}, {"theta", cfg.theta}, {"trials", cfg.trials},
                  {"seed", cfg.seed}, {"discrete", true}};
    const BetaTailResult r = discrete_beta_tail(*f, *cfg.eps, cfg.theta, cfg.trials, cfg.seed);
    const CouplingStats c = coupling_stats(*f, *cfg.eps, cfg.trials, cfg.seed);
    json res = tail_json(r);
    res["coupling"] = {{"p_short", to_json(c.p_short)}, {"bound", c.bound}, {"holds", c.holds},
                       {"endpoint_mean", to_json(c.endpoint_mean)}, {"f0", c.f0}, {"orders_agree", c.orders_agree}};
    rec.results = res;
    if (r.star_exceeds_beta > 0 || !c.orders_agree) rec.exit_code = 2;
    return;
  }
  const double t = cfg.t.empty() ? 0.5 : cfg.t.front();
  rec.config = {{"fn", cfg.fn}, {"t", t}, {"theta", cfg.theta}, {"trials", cfg.trials}, {"seed", cfg.seed},
                {"discrete", false}};
  const BetaTailResult r = beta_tail(*f, t, cfg.theta, cfg.trials, cfg.seed);
  rec.results = tail_json(r);
  if (r.star_exceeds_beta > 0) rec.exit_code = 2;
}

void do_level1(const ExperimentConfig& cfg, RunRecord& rec) {
  rec.config = {{"fn", cfg.fn}};
  const FunctionPtr f = need_fn(cfg);
  const Level1Report l = level1(*f);
  rec.results = {{"alpha", l.alpha}, {"grad_norm_sq", l.grad_norm_sq}, {"ratio", l.ratio}};
}

// --- CSV --------------------------------------------------------------------

void flatten(const json& j, const std::string& prefix, std::map<std::string, std::string>& out) {
  if (j.is_object()) {
    for (auto it = j.begin(); it != j.end(); ++it) flatten(it.value(), prefix.empty() ? it.key() : prefix + "." + it.key(), out);
  } else if (j.is_array()) {
    for (std::size_t i = 0; i < j.size(); ++i) flatten(j[i], prefix + "." + std::to_string(i), out);
  } else if (j.is_string()) {
    out[prefix] = j.get<std::string>();
  } else {
    out[prefix] = j.dump();
  }
}

std::string csv_cell(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
  return q + "\"";
}

}  // namespace

RunRecord run(const ExperimentConfig& cfg) {
  RunRecord rec;
  rec.command = cfg.command;
  rec.version = version_string();
  const auto start = std::chrono::steady_clock::now();
  static const std::map<std::string, void (*)(const ExperimentConfig&, RunRecord&)> table = {
      {"analyze", do_analyze},   {"restrict-scan", do_restrict_scan}, {"pi-run", do_pi_run},
      {"pi-stats", do_pi_stats}, {"kl-audit", do_kl_audit},           {"bs", do_bs},
      {"dt", do_dt},             {"osss", do_osss},                   {"hc-check", do_hc_check},
      {"prop51", do_prop51},     {"beta-tail", do_beta_tail},         {"level1", do_level1}};
  const auto it = table.find(cfg.command);
  if (it == table.end()) throw CLI::ValidationError("command", "unknown subcommand '" + cfg.command + "'");
  it->second(cfg, rec);
  if (!rec.config.contains("seed")) rec.config["seed"] = cfg.seed;
  rec.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rec;
}

std::string emit(const RunRecord& record, OutputFormat format) {
  if (format == OutputFormat::kJson) {
    const json j = {{"command", record.command},
                    {"version", record.version},
                    {"wall_time_s", record.wall_time_s},
                    {"exit_code", record.exit_code},
                    {"config", record.config},
                    {"results", record.results}};
    return j.dump() + "\n";
  }
  std::ostringstream os;
  os << "# command: " << record.command << "\n";
  os << "# version: " << record.version << "\n";
  os << "# wall_time_s: " << record.wall_time_s << "\n";
  os << "# config: " << record.config.dump() << "\n";
  // Rows come from results.rows when present; other result fields repeat on each row.
  std::vector<std::map<std::string, std::string>> rows;
  json shared = record.results;
  if (shared.is_object() && shared.contains("rows") && shared["rows"].is_array()) {
    const json list = shared["rows"];
    shared.erase("rows");
    for (const auto& r : list) {
      std::map<std::string, std::string> flat;
      flatten(shared, "", flat);
      flatten(r, "", flat);
      rows.push_back(flat);
    }
  } else {
    std::map<std::string, std::string> flat;
    flatten(shared, "", flat);
    rows.push_back(flat);
  }
  std::set<std::string> columns;
  for (const auto& r : rows) {
    for (const auto& [k, v] : r) columns.insert(k);
  }
  bool first = true;
  for (const auto& c : columns) {
    os << (first ? "" : ",") << csv_cell(c);
    first = false;
  }
  os << "\n";
  for (const auto& r : rows) {
    first = true;
    for (const auto& c : columns) {
      const auto it = r.find(c);
      os << (first ? "" : ",") << (it == r.end() ? std::string() : csv_cell(it->second));
      first = false;
    }
    os << "\n";
  }
  return os.str();
}

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Boolean functions under random restrictions"};
  app.require_subcommand(1);
  ExperimentConfig cfg;
  std::string format = "json";
  int threads = 0;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--seed", cfg.seed, "Base seed");
    sub->add_option("--trials", cfg.trials, "Monte Carlo trials or instances")->check(CLI::PositiveNumber);
    sub->add_option("--format", format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
    sub->add_option("--out", cfg.out, "Output file (default stdout)");
    sub->add_option("--threads", threads, "Worker threads (0 = OpenMP default)");
  };
  auto fn = [&](CLI::App* sub) { sub->add_option("--fn", cfg.fn, "Function spec, e.g. tribes:w=4")->required(); };

  auto* analyze = app.add_subcommand("analyze", "Mean, variance, influences, Level-1 ratio");
  fn(analyze);
  auto* rs = app.add_subcommand("restrict-scan", "Constancy and variance of f under random restrictions");
  fn(rs);
  rs->add_option("--rho", cfg.rho, "Alive fractions")->delimiter(',');
  rs->add_option("--mode", cfg.mode, "fixed or indep")->check(CLI::IsMember({"fixed", "indep"}));
  auto* pr = app.add_subcommand("pi-run", "One run of the controlled process");
  fn(pr);
  auto* ps = app.add_subcommand("pi-stats", "Stopping-time statistics of the controlled process");
  fn(ps);
  auto* kl = app.add_subcommand("kl-audit", "KL ledger audit; exact enumeration with --exhaustive");
  fn(kl);
  for (auto* sub : {pr, ps, kl}) {
    sub->add_option("--eps", cfg.eps, "Control probability");
    sub->add_option("--delta", cfg.delta, "Breaking threshold");
    sub->add_option("--m", cfg.m, "Ledger horizon (default floor((1-eps)n))");
    sub->add_flag("--complement", cfg.complement, "Run on 1 - f");
  }
  pr->add_flag("--emit-path", cfg.emit_path, "Include paths and ledger");
  ps->add_option("--rho", cfg.rho, "Derive eps, delta from rho and p")->delimiter(',');
  ps->add_option("--p", cfg.p, "Probability parameter for delta = p Var / 8");
  kl->add_flag("--exhaustive", cfg.exhaustive, "Enumerate all completions");
  auto* bs = app.add_subcommand("bs", "Sensitivity and block sensitivity");
  fn(bs);
  bs->add_option("--x", cfg.x, "Point index in hex, or 'random'");
  bs->add_flag("--exact", cfg.exact, "Exact block sensitivity at x (default)");
  bs->add_option("--partition", cfg.M, "Random-partition estimator with M blocks");
  auto* dt = app.add_subcommand("dt", "Exact decision-tree depth");
  fn(dt);
  auto* os = app.add_subcommand("osss", "mINF * DT >= Var");
  fn(os);
  os->add_option("--influence", cfg.influence, "flip or spectral")->check(CLI::IsMember({"flip", "spectral"}));
  auto* hc = app.add_subcommand("hc-check", "Hypercontractive inequality and gradient bounds over random or all functions");
  hc->add_option("--n", cfg.n, "Arity");
  hc->add_option("--grid", cfg.grid, "Grid step for (t, T)");
  hc->add_flag("--exhaustive", cfg.exhaustive, "All Boolean functions on n <= 4 variables");
  auto* p51 = app.add_subcommand("prop51", "Gradient bounds under the revelation process");
  fn(p51);
  p51->add_option("--t", cfg.t, "Times")->delimiter(',');
  auto* bt = app.add_subcommand("beta-tail", "Tail of the largest derivative along the revelation process");
  fn(bt);
  bt->add_option("--t", cfg.t, "Horizon");
  bt->add_option("--theta", cfg.theta, "Threshold");
  bt->add_flag("--discrete", cfg.discrete, "Use the discrete clock up to (1 - eps) n");
  bt->add_option("--eps", cfg.eps, "Discrete-clock epsilon");
  auto* l1 = app.add_subcommand("level1", "Level-1 ratio at the origin");
  fn(l1);
  for (auto* sub : app.get_subcommands({})) add_common(sub);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    std::ostringstream o, er;
    const int code = app.exit(e, o, er);
    out << o.str();
    err << er.str();
    return code == 0 ? 0 : 1;
  }
  cfg.command = app.get_subcommands().front()->get_name();
  cfg.format = format == "csv" ? OutputFormat::kCsv : OutputFormat::kJson;
  if (threads > 0) omp_set_num_threads(threads);

  try {
    const RunRecord rec = run(cfg);
    const std::string text = emit(rec, cfg.format);
    if (cfg.out.empty()) {
      out << text;
    } else {
      std::ofstream file(cfg.out);
      if (!file || !(file << text)) {
        err << "error: cannot write " << cfg.out << "\n";
        return 1;
      }
    }
    return rec.exit_code;
  } catch (const InvariantViolation& e) {
    err << "invariant violated: " << e.what() << "\n";
    return 2;
  } catch (const CLI::Error& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace boolrr
