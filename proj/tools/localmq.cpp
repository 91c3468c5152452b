// localmq command-line driver. Every subcommand prints one JSON document.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "localmq/eta_search.hpp"
#include "localmq/generators.hpp"
#include "localmq/learners.hpp"
#include "localmq/reduction.hpp"
#include "localmq/separation.hpp"
#include "localmq/suites.hpp"

using namespace localmq;
using nlohmann::json;

namespace {

enum Exit { kOk = 0, kFailed = 1, kUsage = 2, kContract = 3, kConfig = 4, kRetry = 5 };

Domain parse_domain(const std::string& s) {
  if (s == "pm" || s == "plus_minus") return Domain::plus_minus;
  if (s == "01" || s == "zero_one") return Domain::zero_one;
  throw ConfigError("unknown domain '" + s + "' (use pm or 01)");
}

json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path);
  return json::parse(in);
}

// --out wins; otherwise LOCALMQ_OUT_DIR/<name>.json; otherwise stdout.
void emit(const json& j, const std::string& out, const std::string& name) {
  std::string path = out;
  if (path.empty())
    if (const char* dir = std::getenv("LOCALMQ_OUT_DIR"); dir && *dir)
      path = (std::filesystem::path(dir) / (name + ".json")).string();
  if (path.empty()) {
    std::cout << j.dump(2) << '\n';
    return;
  }
  std::ofstream os(path);
  if (!os) throw ConfigError("cannot write " + path);
  os << j.dump(2) << '\n';
}

struct Common {
  std::uint64_t seed = 1;
  std::string out;
};

void add_common(CLI::App* app, Common& c) {
  app->add_option("--seed", c.seed, "master seed");
  app->add_option("--out", c.out, "output path (default: stdout or $LOCALMQ_OUT_DIR)");
}

// ---------------------------------------------------------------------------

struct TargetArgs {
  std::string kind = "tree";
  int n = 16;
  std::string domain = "pm";
  int t = 8, B = 1, max_degree = 3;
  int leaves = 8, depth = 4;
  int s = 4, width = 3;
};

TargetFunction make_target(const TargetArgs& a, std::uint64_t seed) {
  SplitMix64 rng(derive_seed(seed, 0));
  const Domain dom = parse_domain(a.domain);
  if (a.kind == "sparse") return random_sparse_polynomial(a.n, dom, a.t, a.max_degree, a.B, rng);
  if (a.kind == "tree") return random_tree(a.n, dom, a.leaves, a.depth, rng);
  if (a.kind == "path-tree") return random_path_tree(a.n, dom, a.depth, rng);
  if (a.kind == "dnf") return random_dnf(a.n, dom, a.s, a.width, rng);
  throw ConfigError("unknown target kind '" + a.kind + "'");
}

void add_target_options(CLI::App* app, TargetArgs& a) {
  app->add_option("--n", a.n, "dimension");
  app->add_option("--domain", a.domain, "pm or 01");
  app->add_option("--B", a.B, "coefficient bound (sparse)");
  app->add_option("--max-degree", a.max_degree, "monomial degree bound (sparse)");
  app->add_option("--leaves", a.leaves, "leaf count (tree)");
  app->add_option("--width", a.width, "term width (dnf)");
}

struct DistArgs {
  std::string kind = "uniform";
  int n = 10;
  std::string domain = "pm";
  double alpha = 1.5;
  double mu_bound = 0.4;
};

Distribution make_dist(const DistArgs& a, std::uint64_t seed) {
  SplitMix64 rng(derive_seed(seed, 1));
  const Domain dom = parse_domain(a.domain);
  if (a.kind == "uniform") return Distribution::uniform(a.n, dom);
  if (a.kind == "product") return Distribution::product(random_means(a.n, a.mu_bound, rng), dom);
  if (a.kind == "smooth") return random_smooth_table(a.n, dom, a.alpha, rng);
  throw ConfigError("unknown distribution kind '" + a.kind + "'");
}

// ---------------------------------------------------------------------------

struct LearnArgs {
  std::string algo;
  std::string target_path, dist_path, trail;
  TargetArgs gen;
  LearnerConfig cfg;
  double c = 0;
  double eta = 0;
  bool eta_unknown = false;
  int r = -1;
  bool timing = false;
};

int run_learn(const LearnArgs& a, const Common& c) {
  LearnerConfig cfg = a.cfg;
  TargetArgs gen = a.gen;
  gen.t = cfg.t;
  gen.s = cfg.s;
  gen.depth = a.algo == "logdepth-tree" ? cfg.depth : gen.depth;
  if (a.algo == "sparse-poly") gen.kind = "sparse";
  else if (a.algo == "dnf") gen.kind = "dnf";
  else if (a.algo == "logdepth-tree") gen.kind = "tree", gen.leaves = cfg.t;
  else if (a.algo == "tree-uniform" || a.algo == "tree-product") gen.kind = "tree", gen.leaves = cfg.t;
  else throw ConfigError("unknown algorithm '" + a.algo + "'");
  if (a.algo == "sparse-poly" && gen.domain == "pm") gen.domain = "01";

  const TargetFunction f = a.target_path.empty() ? make_target(gen, c.seed) : target_from_json(read_json(a.target_path));
  const int n = dimension(f);
  const Domain dom = domain_of(f);
  std::optional<Distribution> dist;
  if (!a.dist_path.empty()) dist = distribution_from_json(read_json(a.dist_path));
  else if (a.algo == "tree-product") {
    SplitMix64 rng(derive_seed(c.seed, 1));
    dist = Distribution::product(random_means(n, 0.4, rng), dom);
  } else dist = Distribution::uniform(n, dom);
  if (a.c > 0) cfg.c = a.c;

  int r = a.r;
  if (r < 0) {
    if (a.algo == "sparse-poly") r = default_params_sparse(cfg.t, cfg.B, cfg.epsilon, cfg.alpha).d;
    else if (a.algo == "logdepth-tree") r = cfg.depth;
    else if (a.algo == "tree-uniform") r = default_params_tree_uniform(cfg.t, cfg.epsilon).d;
    else if (a.algo == "tree-product") {
      double cc = cfg.c.value_or(1.0);
      if (!cfg.c)
        for (double m : dist->means()) cc = std::min(cc, 1.0 - std::abs(m));
      r = default_params_tree_product(cfg.t, cfg.epsilon, cc).d;
    } else r = default_params_dnf(cfg.s, cfg.epsilon).d;
  }
  std::optional<NoiseWrapper> noise;
  if (a.eta > 0) {
    noise.emplace(a.eta, derive_seed(c.seed, 3), !a.eta_unknown);
    if (!a.eta_unknown) cfg.eta = a.eta;
  }
  OracleSession session(f, *dist, r, derive_seed(c.seed, 2), noise, SessionOptions{!a.trail.empty(), true});

  json result;
  if (a.algo == "logdepth-tree" && a.eta_unknown) {
    const auto res = eta_binary_search(session, learn_logdepth_tree, cfg);
    result = res.to_json();
    if (!a.timing) result["outcome"].erase("wall_ms");
  } else {
    LearnOutcome out;
    if (a.algo == "sparse-poly") out = learn_sparse_poly(session, cfg);
    else if (a.algo == "logdepth-tree") out = learn_logdepth_tree(session, cfg);
    else if (a.algo == "tree-uniform") out = learn_tree_uniform(session, cfg);
    else if (a.algo == "tree-product") out = learn_tree_product(session, cfg);
    else out = learn_dnf(session, cfg);
    result = out.to_json(a.timing);
  }
  result["run"] = {{"algo", a.algo}, {"seed", c.seed}, {"locality", r}, {"eta", a.eta},
                   {"eta_known", a.eta > 0 && !a.eta_unknown}, {"target", to_json(f)}};
  if (!a.trail.empty()) {
    std::ofstream os(a.trail);
    if (!os) throw ConfigError("cannot write " + a.trail);
    session.write_trail(os);
  }
  emit(result, c.out, "learn");
  return kOk;
}

// ---------------------------------------------------------------------------

int run_verify(const std::string& suite, const SuiteParams& p, const Common& c) {
  json reports = json::array();
  bool ok = true;
  const auto ids = suite == "all" ? suite_names() : std::vector<std::string>{suite};
  for (const auto& id : ids) {
    const auto r = run_lemma_suite(id, p);
    ok = ok && r.pass();
    reports.push_back(r.to_json());
  }
  emit(ids.size() == 1 ? reports[0] : json{{"suites", reports}, {"pass", ok}}, c.out, "verify");
  return ok ? kOk : kFailed;
}

struct ReduceArgs {
  int n = 6, k = 1;
  std::string family = "auto";
  std::size_t samples = 100000;
  std::string target_path;
  bool pad = true;
};

int run_reduce(const ReduceArgs& a, const Common& c) {
  SplitMix64 rng(derive_seed(c.seed, 0));
  const TargetFunction f = a.target_path.empty() ? TargetFunction(random_tree(a.n, Domain::plus_minus, 6, 3, rng))
                                                 : target_from_json(read_json(a.target_path));
  const int n = dimension(f);
  auto code = build_code(n, a.k, a.family, derive_seed(c.seed, 4));
  if (a.pad) code = pad_for_sampling(code);
  const EmbeddedFunction emb(f, code, derive_seed(c.seed, 5));
  OracleSession base(f, Distribution::uniform(n, domain_of(f)), 0, derive_seed(c.seed, 6));
  EmbeddingSimulator sim(emb, base);
  OracleSession simulated(sim.oracle(), code.radius(), derive_seed(c.seed, 7), SessionOptions{false, false});
  const int m = code.length();
  std::vector<std::uint64_t> hist(std::size_t{1} << m);
  std::size_t mismatch = 0, queries = 0;
  for (std::size_t j = 0; j < a.samples; ++j) {
    const auto ex = simulated.draw_example();
    ++hist[ex.bits];
    if (ex.label != emb.label(ex.bits)) ++mismatch;
    if (j < 1000)
      for (int i = 0; i < m; ++i, ++queries) simulated.local_query(ex.bits ^ (std::uint32_t{1} << i), ex.index);
  }
  double tv = 0;
  for (auto h : hist) tv += std::abs(static_cast<double>(h) / static_cast<double>(a.samples) - std::ldexp(1.0, -m));
  json out{{"code", code.to_json()},
           {"target", to_json(f)},
           {"samples", a.samples},
           {"tv_to_uniform", tv / 2},
           {"label_mismatches", mismatch},
           {"simulated_queries", queries},
           {"simulator", sim.report()},
           {"base_audit", base.audit_report().to_json()},
           {"simulated_audit", simulated.audit_report().to_json()}};
  if (n <= 12 && m <= 20) {
    SplitMix64 grng(derive_seed(c.seed, 8));
    const TargetFunction g = random_tree(n, domain_of(f), 6, 3, grng);
    const auto cr = correlation_check(f, g, code);
    out["correlation_residual"] = cr.residual();
  }
  emit(out, c.out, "reduce");
  return kOk;
}

struct SeparationArgs {
  int n = 8;
  int trials = 50;
  std::size_t budget = 200;
  int baseline_n = 16;
  std::size_t train = 2000, heldout = 4000;
};

int run_separation(const SeparationArgs& a, const Common& c) {
  json trials = json::array();
  int recovered = 0;
  AuditSummary total;
  for (int k = 0; k < a.trials; ++k) {
    SplitMix64 rng(derive_seed(c.seed, static_cast<std::uint64_t>(k)));
    const auto secret = static_cast<std::uint32_t>(uniform_below(rng, std::uint64_t{1} << a.n));
    const PrfTarget g(a.n, secret, PrfVariant::g, derive_seed(c.seed, 1000 + static_cast<std::uint64_t>(k)));
    OracleSession s(g.as_target(), Distribution::uniform(a.n + 1, Domain::zero_one), 1,
                    derive_seed(c.seed, 2000 + static_cast<std::uint64_t>(k)));
    bool ok = false;
    try {
      ok = learn_g_onelocal(s, a.n, a.budget).secret == secret;
    } catch (const RetryableError&) {
    }
    recovered += ok;
    const auto au = s.audit_report();
    total.ex_count += au.ex_count;
    total.mq_count += au.mq_count;
    total.max_locality_used = std::max(total.max_locality_used, au.max_locality_used);
    total.violations += au.violations;
    trials.push_back({{"trial", k}, {"recovered", ok}, {"examples", au.ex_count}, {"queries", au.mq_count}});
  }
  json base = json::array();
  for (auto v : {PrfVariant::g, PrfVariant::g_prime}) {
    SplitMix64 rng(derive_seed(c.seed, v == PrfVariant::g ? 3000 : 3001));
    const auto secret = static_cast<std::uint32_t>(uniform_below(rng, std::uint64_t{1} << a.baseline_n));
    const PrfTarget g(a.baseline_n, secret, v, derive_seed(c.seed, v == PrfVariant::g ? 3002 : 3003));
    const auto dist = Distribution::uniform(g.dimension(), Domain::zero_one);
    OracleSession pac(g.as_target(), dist, 0, derive_seed(c.seed, 3004));
    OracleSession loc(g.as_target(), dist, 2, derive_seed(c.seed, 3005));
    base.push_back({{"variant", to_string(v)},
                    {"pac", pac_baseline(pac, a.train, a.heldout).to_json()},
                    {"local2", local_baseline(loc, 2, a.train / 20, a.heldout).to_json()}});
  }
  emit({{"n", a.n},
        {"trials", trials},
        {"recovery_rate", a.trials ? static_cast<double>(recovered) / a.trials : 0.0},
        {"audit", total.to_json()},
        {"baselines", base}},
       c.out, "demo-separation");
  return kOk;
}

// Re-checks a JSONL trail: every query lies within r of its anchor and the
// recorded distance matches.
int run_audit(const std::string& path, int r, const Common& c) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path);
  std::vector<std::string> drawn;
  AuditSummary s;
  std::uint64_t bad_dist = 0, bad_anchor = 0, bad_seq = 0, line_no = 0;
  std::string line;
  json first_problem = nullptr;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto j = json::parse(line);
    if (j.at("seq").get<std::uint64_t>() != line_no) ++bad_seq;
    ++line_no;
    const auto point = j.at("point").get<std::string>();
    if (j.at("op") == "ex") {
      drawn.push_back(point);
      ++s.ex_count;
      continue;
    }
    ++s.mq_count;
    const auto anchor = j.at("anchor").get<std::int64_t>();
    if (anchor < 0 || static_cast<std::size_t>(anchor) >= drawn.size() || drawn[anchor].size() != point.size()) {
      ++bad_anchor;
      if (first_problem.is_null()) first_problem = j;
      continue;
    }
    int d = 0;
    for (std::size_t i = 0; i < point.size(); ++i) d += point[i] != drawn[anchor][i];
    if (d != j.at("dist").get<int>()) ++bad_dist;
    if (d > r) ++s.violations;
    if ((d != j.at("dist").get<int>() || d > r) && first_problem.is_null()) first_problem = j;
    s.max_locality_used = std::max(s.max_locality_used, d);
  }
  const bool ok = s.violations == 0 && bad_dist == 0 && bad_anchor == 0 && bad_seq == 0;
  emit({{"trail", path},
        {"locality", r},
        {"summary", s.to_json()},
        {"distance_mismatches", bad_dist},
        {"bad_anchors", bad_anchor},
        {"sequence_gaps", bad_seq},
        {"first_problem", first_problem},
        {"pass", ok}},
       c.out, "audit");
  return ok ? kOk : kFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"localmq: learning with r-local membership queries"};
  app.require_subcommand(1);

  Common common;

  TargetArgs tg;
  auto* gt = app.add_subcommand("gen-target", "random target function");
  add_common(gt, common);
  gt->add_option("--kind", tg.kind, "sparse | tree | path-tree | dnf")->required();
  add_target_options(gt, tg);
  gt->add_option("--t", tg.t, "sparsity (sparse)");
  gt->add_option("--depth", tg.depth, "depth bound (tree, path-tree)");
  gt->add_option("--s", tg.s, "term count (dnf)");

  DistArgs dg;
  auto* gd = app.add_subcommand("gen-dist", "distribution over the cube");
  add_common(gd, common);
  gd->add_option("--kind", dg.kind, "uniform | product | smooth");
  gd->add_option("--n", dg.n, "dimension");
  gd->add_option("--domain", dg.domain, "pm or 01");
  gd->add_option("--alpha", dg.alpha, "smoothness bound (smooth)");
  gd->add_option("--mu-bound", dg.mu_bound, "largest |mean| (product)");

  LearnArgs la;
  auto* lr = app.add_subcommand("learn", "run a learner against a target");
  add_common(lr, common);
  lr->add_option("--algo", la.algo, "sparse-poly | logdepth-tree | tree-uniform | tree-product | dnf")->required();
  lr->add_option("--target", la.target_path, "target JSON (default: random, from --seed)");
  lr->add_option("--dist", la.dist_path, "distribution JSON (default: uniform)");
  add_target_options(lr, la.gen);
  lr->add_option("--t", la.cfg.t, "sparsity or leaf count");
  lr->add_option("--s", la.cfg.s, "DNF size");
  lr->add_option("--depth", la.cfg.depth, "depth bound (logdepth-tree)");
  lr->add_option("--eps", la.cfg.epsilon, "accuracy");
  lr->add_option("--delta", la.cfg.delta, "confidence");
  lr->add_option("--alpha", la.cfg.alpha, "smoothness bound");
  lr->add_option("--c", la.c, "product-mean margin (tree-product)");
  lr->add_option("--eta", la.eta, "persistent label-noise rate");
  lr->add_flag("--eta-unknown", la.eta_unknown, "hide eta and search for it (logdepth-tree)");
  lr->add_option("--r", la.r, "locality radius (default: from the parameter formulas)");
  lr->add_option("--trail", la.trail, "write the JSONL audit trail here");
  lr->add_flag("--with-timing", la.timing, "include wall time");

  std::string suite = "all";
  SuiteParams sp;
  auto* vf = app.add_subcommand("verify", "run invariant suites by enumeration");
  add_common(vf, common);
  vf->add_option("--suite", suite, "suite id or 'all'");
  vf->add_option("--n", sp.n, "dimension");
  vf->add_option("--alpha", sp.alpha, "smoothness bound");
  vf->add_option("--t", sp.t, "sparsity / leaves");
  vf->add_option("--instances", sp.instances, "random instances per suite");

  ReduceArgs ra;
  auto* rd = app.add_subcommand("reduce", "embedding reduction: code, simulator, correlation");
  add_common(rd, common);
  rd->add_option("--n", ra.n, "message length");
  rd->add_option("--k", ra.k, "locality to simulate");
  rd->add_option("--family", ra.family, "auto | hamming | bch | random");
  rd->add_option("--samples", ra.samples, "simulated examples");
  rd->add_option("--target", ra.target_path, "target JSON on the message cube");
  rd->add_flag("!--no-pad", ra.pad, "skip padding the code for efficient sampling");

  SeparationArgs sa;
  auto* ds = app.add_subcommand("demo-separation", "1-local learner vs. baselines on the PRF targets");
  add_common(ds, common);
  ds->add_option("--n", sa.n, "secret length");
  ds->add_option("--trials", sa.trials, "recovery trials");
  ds->add_option("--budget", sa.budget, "examples per recovery trial");
  ds->add_option("--baseline-n", sa.baseline_n, "secret length for the baselines");
  ds->add_option("--train", sa.train, "baseline training examples");
  ds->add_option("--heldout", sa.heldout, "baseline held-out examples");

  std::string trail;
  int audit_r = 0;
  auto* au = app.add_subcommand("audit", "re-check a JSONL audit trail");
  add_common(au, common);
  au->add_option("--trail", trail, "trail written by learn --trail")->required();
  au->add_option("--r", audit_r, "locality radius to enforce")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  if (const char* dir = std::getenv("LOCALMQ_OUT_DIR"); dir && *dir) std::filesystem::create_directories(dir);
  sp.seed = common.seed;
  try {
    if (*gt) {
      emit(to_json(make_target(tg, common.seed)), common.out, "target");
      return kOk;
    }
    if (*gd) {
      emit(to_json(make_dist(dg, common.seed)), common.out, "dist");
      return kOk;
    }
    if (*lr) return run_learn(la, common);
    if (*vf) return run_verify(suite, sp, common);
    if (*rd) return run_reduce(ra, common);
    if (*ds) return run_separation(sa, common);
    if (*au) return run_audit(trail, audit_r, common);
  } catch (const LocalityViolation& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kContract;
  } catch (const ContractViolation& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kContract;
  } catch (const BudgetExceeded& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConfig;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConfig;
  } catch (const RetryableError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kRetry;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: bad JSON: " << e.what() << '\n';
    return kConfig;
  }
  return kUsage;
}
