#include "qthresh/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <fstream>
#include <optional>
#include <sstream>

#include "qthresh/audit.hpp"
#include "qthresh/family.hpp"
#include "qthresh/selector.hpp"
#include "qthresh/threshold.hpp"

namespace qthresh {

namespace {

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  std::string family;
  std::vector<std::string> families;
  std::string lambda;
  std::string tol = to_fraction(default_tolerance());
  std::optional<int> r;
  std::string p;
  std::optional<int> m;
  std::optional<int> n;
  std::string C;
  std::uint64_t trials = 10'000;
  std::uint64_t seed = 0;
  std::string budget = "1/2";
  std::string out;
  int threads = 1;
  std::vector<std::string> gen_args;
};

Rational rational_flag(const std::string& name, const std::string& text) {
  try {
    return parse_rational(text);
  } catch (const std::invalid_argument& e) {
    throw UsageError("--" + name + ": " + e.what());
  }
}

Restriction restriction_flag(const std::optional<int>& r) {
  if (!r) return kUnbounded;
  if (*r < 1) throw UsageError("--r must be a positive integer");
  return *r;
}

ThresholdOptions threshold_options(const RunConfig& cfg) {
  ThresholdOptions opt;
  opt.tol = rational_flag("tol", cfg.tol);
  if (sgn(opt.tol) <= 0) throw UsageError("--tol must be positive");
  opt.budget = rational_flag("budget", cfg.budget);
  if (sgn(opt.budget) <= 0) throw UsageError("--budget must be positive");
  return opt;
}

Rational p_flag(const RunConfig& cfg) {
  if (cfg.p.empty()) throw UsageError("--p is required");
  Rational p = rational_flag("p", cfg.p);
  if (sgn(p) <= 0 || p > 1) throw UsageError("--p must lie in (0, 1]");
  return p;
}

void write_output(const RunConfig& cfg, const std::string& text, std::ostream& out) {
  if (cfg.out.empty()) {
    out << text;
    return;
  }
  std::ofstream file(cfg.out, std::ios::binary);
  if (!file) throw UsageError("cannot write " + cfg.out);
  file << text;
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream file(path, std::ios::binary);
  if (!file) throw UsageError("cannot write " + path);
  file << text;
}

// Narrows [lower, upper] further until both ends print the same 12 digits.
template <typename Small>
std::string display_decimal(Rational lower, Rational upper, Small&& small) {
  for (int i = 0; i < 40 && to_decimal(lower) != to_decimal(upper); ++i) {
    Rational mid = (lower + upper) / 2;
    if (small(mid)) lower = mid;
    else upper = mid;
  }
  return to_decimal(lower);
}

int cmd_compute_q(const RunConfig& cfg, std::ostream& out) {
  const MinimalFamily family = load_family(cfg.family);
  const QResult q = q_threshold(family, threshold_options(cfg));
  const std::string cert_path = cfg.out.empty() ? cfg.family + ".cert" : cfg.out;
  write_file(cert_path, serialize_certificate(q.certificate));
  const Rational budget = threshold_options(cfg).budget;
  const std::string shown = display_decimal(q.lower, q.upper, [&](const Rational& p) {
    return min_cover_weight(family, p).weight <= budget;
  });
  out << "q=" << shown << "\n"
      << "lower=" << to_fraction(q.lower) << "\n"
      << "upper=" << to_fraction(q.upper) << "\n"
      << "certificate=" << cert_path << "\n";
  return kExitOk;
}

int cmd_compute_qf(const RunConfig& cfg, std::ostream& out) {
  const Restriction r = restriction_flag(cfg.r);
  const MinimalFamily family = load_family(cfg.family);
  const QfResult q = qf_threshold(family, r, threshold_options(cfg));
  const std::string cert_path = cfg.out.empty() ? cfg.family + ".cert" : cfg.out;
  write_file(cert_path, serialize_certificate(q.certificate));
  const Rational budget = threshold_options(cfg).budget;
  const std::string shown = display_decimal(q.lower, q.upper, [&](const Rational& p) {
    return lp_min_weight(family, p, r).value <= budget;
  });
  out << "qf=" << shown << "\n"
      << "r=" << to_string(r) << "\n"
      << "lower=" << to_fraction(q.lower) << "\n"
      << "upper=" << to_fraction(q.upper) << "\n"
      << "certificate=" << cert_path << "\n";
  return kExitOk;
}

AuditOptions audit_options(const RunConfig& cfg) {
  AuditOptions opt;
  opt.seed = cfg.seed;
  opt.trials = cfg.trials;
  opt.threads = cfg.threads;
  opt.budget = rational_flag("budget", cfg.budget);
  if (!cfg.C.empty()) opt.C_override = rational_flag("C", cfg.C);
  opt.m_override = cfg.m;
  return opt;
}

int cmd_audit(const RunConfig& cfg, std::ostream& out) {
  const int r = cfg.r.value_or(1);
  if (r < 1) throw UsageError("--r must be a positive integer");
  const Rational p = p_flag(cfg);
  const MinimalFamily family = load_family(cfg.family);
  AuditOptions opt = audit_options(cfg);
  if (opt.m_override && (*opt.m_override < 0 || *opt.m_override > family.n()))
    throw UsageError("--m must lie in 0..n");
  const AuditReport report = theorem_audit(family, p, r, opt);
  write_output(cfg, audit_csv(report), out);
  return report.contracts_hold() ? kExitOk : kExitContractFailure;
}

int cmd_ratio_table(const RunConfig& cfg, std::ostream& out) {
  std::vector<std::string> paths = cfg.families;
  if (!cfg.family.empty()) paths.insert(paths.begin(), cfg.family);
  if (paths.empty()) throw UsageError("ratio-table needs at least one family file");
  const Restriction r = restriction_flag(cfg.r);
  const ThresholdOptions opt = threshold_options(cfg);

  std::string csv = "family,n,q,qf_unbounded,qf_r,ratio_qf_over_q\n";
  bool ok = true;
  for (const auto& path : paths) {
    const MinimalFamily family = load_family(path);
    const Rational q = q_threshold(family, opt).lower;
    const Rational qf = qf_threshold(family, kUnbounded, opt).lower;
    const Rational qf_r = r ? qf_threshold(family, r, opt).lower : qf;
    // Both thresholds vanish only when {} is minimal; report ratio 1 there.
    const Rational ratio = sgn(q) == 0 ? Rational(1) : Rational(qf / q);
    if (ratio < 1 - opt.tol) ok = false;
    csv += path + "," + std::to_string(family.n()) + "," + to_decimal(q) + "," + to_decimal(qf) + "," +
           to_decimal(qf_r) + "," + to_decimal(ratio) + "\n";
  }
  write_output(cfg, csv, out);
  return ok ? kExitOk : kExitContractFailure;
}

SelectorConfig selector_config(const RunConfig& cfg, int n, const Rational& p, int r) {
  SelectorConfig sc = SelectorConfig::standard(n, p, r);
  if (!cfg.C.empty()) {
    const Rational C = rational_flag("C", cfg.C);
    if (sgn(C) <= 0) throw UsageError("--C must be positive");
    sc = sc.with_C(C);
  }
  if (cfg.m) {
    if (*cfg.m < 0 || *cfg.m > n) throw UsageError("--m must lie in 0..n");
    sc = sc.with_m(*cfg.m);
  }
  return sc;
}

int cmd_bmm_bound(const RunConfig& cfg, std::ostream& out) {
  const int r = cfg.r.value_or(1);
  if (r < 1) throw UsageError("--r must be a positive integer");
  const Rational p = p_flag(cfg);
  int n = 0;
  if (cfg.n) n = *cfg.n;
  else if (!cfg.family.empty()) n = load_family(cfg.family).n();
  else throw UsageError("bmm-bound needs --n or --family");
  if (n < 1) throw UsageError("--n must be positive");
  const SelectorConfig sc = selector_config(cfg, n, p, r);
  if (sc.m == 0) throw UsageError("sample size m is 0; the bound needs m >= 1");
  const BoundValue at_m = bmm_bound(sc);
  const BoundValue at_exact = bmm_bound(n, p, sc.m_exact(), sc.C);
  std::ostringstream text;
  text << "n=" << n << "\n"
       << "p=" << to_fraction(p) << "\n"
       << "r=" << r << "\n"
       << "C=" << to_decimal(sc.C) << "\n"
       << "J=" << to_decimal(sc.J) << "\n"
       << "m_exact=" << to_decimal(sc.m_exact()) << "\n"
       << "m=" << sc.m << (sc.m_capped ? " (capped at n)" : "") << "\n"
       << "x=" << to_decimal(sc.C * n * p / sc.m) << "\n"
       << "bound=" << to_decimal(at_m.value) << "\n"
       << "vacuous=" << (at_m.vacuous ? "true" : "false") << "\n"
       << "bound_at_m_exact=" << to_decimal(at_exact.value) << "\n";
  write_output(cfg, text.str(), out);
  return kExitOk;
}

int cmd_mc_bad_prob(const RunConfig& cfg, std::ostream& out) {
  const int r = cfg.r.value_or(1);
  if (r < 1) throw UsageError("--r must be a positive integer");
  if (cfg.threads < 1) throw UsageError("--threads must be >= 1");
  if (cfg.trials < 1) throw UsageError("--trials must be >= 1");
  const Rational p = p_flag(cfg);
  const MinimalFamily family = load_family(cfg.family);
  if (family.is_full()) throw UsageError("{} is minimal: μ weights are undefined");
  const SelectorConfig sc = selector_config(cfg, family.n(), p, r);

  Lambda lambda;
  if (!cfg.lambda.empty()) {
    LambdaFile file = load_lambda(cfg.lambda);
    if (file.n != family.n()) throw UsageError("λ file ground size differs from the family's");
    lambda = normalize_lambda(file.lambda);
  } else if (!family.empty()) {
    lambda = proof_lambda(family, sc.J * p, r).lambda;
  }

  MonteCarloOptions mc;
  mc.trials = cfg.trials;
  mc.seed = cfg.seed;
  mc.threads = cfg.threads;
  const MonteCarloEstimate est = bad_prob_monte_carlo(family, lambda, sc, mc);
  std::string exact = "nan";
  if (binomial(family.n(), sc.m) <= kExactEnumerationCap)
    exact = to_decimal(bad_prob_exact(family, lambda, sc).prob);

  std::ostringstream csv;
  csv << "n,m,c,trials,partitions,seed,bad,estimate,std_error,exact\n";
  char est_buf[64];
  char se_buf[64];
  std::snprintf(est_buf, sizeof est_buf, "%.12g", est.estimate);
  std::snprintf(se_buf, sizeof se_buf, "%.12g", est.std_error);
  csv << family.n() << "," << sc.m << "," << to_decimal(sc.c) << "," << est.trials << "," << est.partitions
      << "," << cfg.seed << "," << est.bad << "," << est_buf << "," << se_buf << "," << exact << "\n";
  write_output(cfg, csv.str(), out);
  return kExitOk;
}

int parse_int_arg(const std::string& text) {
  try {
    std::size_t used = 0;
    int v = std::stoi(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw UsageError("expected an integer, got '" + text + "'");
  }
}

int cmd_gen(const RunConfig& cfg, std::ostream& out) {
  const auto& a = cfg.gen_args;
  if (a.empty()) throw UsageError("gen needs a kind: single | k_uniform | singletons | triangles");
  auto need = [&](std::size_t count) {
    if (a.size() != count + 1) throw UsageError("gen " + a[0] + ": wrong number of parameters");
  };
  std::optional<MinimalFamily> family;
  try {
    if (a[0] == "single") {
      if (a.size() < 2) throw UsageError("gen single <n> <elements...>");
      const int n = parse_int_arg(a[1]);
      std::vector<int> elements;
      for (std::size_t i = 2; i < a.size(); ++i) elements.push_back(parse_int_arg(a[i]));
      for (int e : elements)
        if (e < 1 || e > n) throw UsageError("element outside 1..n");
      family = gen_single(n, Subset::of(elements));
    } else if (a[0] == "k_uniform") {
      need(2);
      family = gen_k_uniform(parse_int_arg(a[1]), parse_int_arg(a[2]));
    } else if (a[0] == "singletons") {
      need(1);
      family = gen_singletons(parse_int_arg(a[1]));
    } else if (a[0] == "triangles") {
      need(1);
      family = gen_triangles(parse_int_arg(a[1]));
    } else {
      throw UsageError("unknown generator '" + a[0] + "'");
    }
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  write_output(cfg, serialize_family(*family), out);
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Expectation thresholds and fractional expectation thresholds of increasing families", "qthresh"};
  app.require_subcommand(1);
  RunConfig cfg;

  auto add_family = [&](CLI::App* sub, bool required) {
    auto* opt = sub->add_option("--family", cfg.family, "Family file (.fam)");
    if (required) opt->required();
  };
  auto add_out = [&](CLI::App* sub) { sub->add_option("--out", cfg.out, "Output path"); };
  auto add_tol = [&](CLI::App* sub) {
    sub->add_option("--tol", cfg.tol, "Bisection tolerance (rational)");
    sub->add_option("--budget", cfg.budget, "Smallness budget (default 1/2)");
  };
  auto add_selector = [&](CLI::App* sub) {
    sub->add_option("--p", cfg.p, "p (rational)");
    sub->add_option("--r", cfg.r, "Support restriction r");
    sub->add_option("--m", cfg.m, "Sample size override");
    sub->add_option("--C", cfg.C, "Override C = (2er)^2");
  };
  auto add_mc = [&](CLI::App* sub) {
    sub->add_option("--trials", cfg.trials, "Monte Carlo trials");
    sub->add_option("--seed", cfg.seed, "Seed (default 0)");
    sub->add_option("--threads", cfg.threads, "Worker threads (default 1)");
  };

  auto* q = app.add_subcommand("compute-q", "Expectation threshold q(F)");
  add_family(q, true);
  add_tol(q);
  add_out(q);
  q->add_option("--threads", cfg.threads, "Accepted for uniformity; the search is sequential");

  auto* qf = app.add_subcommand("compute-qf", "Fractional expectation threshold q_f(F)");
  add_family(qf, true);
  add_tol(qf);
  add_out(qf);
  qf->add_option("--r", cfg.r, "Support restriction r (omit for unbounded)");
  qf->add_option("--threads", cfg.threads, "Accepted for uniformity; the LP is sequential");

  auto* audit = app.add_subcommand("audit", "Run the proof pipeline on one instance (CSV)");
  add_family(audit, true);
  add_selector(audit);
  add_mc(audit);
  add_out(audit);
  audit->add_option("--budget", cfg.budget, "Smallness budget (default 1/2)");

  auto* ratio = app.add_subcommand("ratio-table", "q, q_f and q_f/q for several families (CSV)");
  ratio->add_option("files", cfg.families, "Family files");
  add_family(ratio, false);
  add_tol(ratio);
  add_out(ratio);
  ratio->add_option("--r", cfg.r, "Support restriction r for the qf_r column");
  ratio->add_option("--threads", cfg.threads, "Accepted for uniformity");

  auto* bmm = app.add_subcommand("bmm-bound", "Evaluate 2 Σ_t (Cnp/m)^t");
  add_family(bmm, false);
  bmm->add_option("--n", cfg.n, "Ground set size (instead of --family)");
  add_selector(bmm);
  add_out(bmm);

  auto* mc = app.add_subcommand("mc-bad-prob", "Monte Carlo probability that W is c-bad (CSV)");
  add_family(mc, true);
  mc->add_option("--lambda", cfg.lambda, "λ file (.lam); default: the LP optimum at Jp");
  add_selector(mc);
  add_mc(mc);
  add_out(mc);

  auto* gen = app.add_subcommand("gen", "Emit a generator family (.fam)");
  gen->add_option("args", cfg.gen_args, "single <n> <elements...> | k_uniform <n> <k> | singletons <n> | triangles <v>");
  add_out(gen);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (*q) return cmd_compute_q(cfg, out);
    if (*qf) return cmd_compute_qf(cfg, out);
    if (*audit) return cmd_audit(cfg, out);
    if (*ratio) return cmd_ratio_table(cfg, out);
    if (*bmm) return cmd_bmm_bound(cfg, out);
    if (*mc) return cmd_mc_bad_prob(cfg, out);
    if (*gen) return cmd_gen(cfg, out);
  } catch (const CapExceeded& e) {
    err << "cap exceeded: " << e.what() << "\n";
    return kExitCap;
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ContractError& e) {
    err << "contract failure: " << e.what() << "\n";
    return kExitContractFailure;
  } catch (const std::invalid_argument& e) {
    err << "invalid input: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}

}  // namespace qthresh
