// labcli: validation suites, simulation campaigns and phase-diagram grids.
//
// Exit codes: 0 ok, 2 validation failure, 3 numerical degeneracy, 64 usage.

#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "sticklab/asymptotics.hpp"
#include "sticklab/clusters.hpp"
#include "sticklab/stats.hpp"
#include "sticklab/validation.hpp"

using namespace sticklab;
using json = nlohmann::json;

namespace {

constexpr int exit_ok = 0, exit_violation = 2, exit_degenerate = 3, exit_usage = 64;

// ---- rows and output ---------------------------------------------------

using Value = std::variant<double, std::int64_t, std::string>;

struct Row {
  std::string id;
  json params;
  std::string stat;
  Value value;
  std::optional<double> se;
  std::optional<std::uint64_t> n;
};

std::string num(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto r = std::to_chars(buf, buf + sizeof buf, v);
  return {buf, r.ptr};
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string o = "\"";
  for (char c : s) {
    if (c == '"') o += '"';
    o += c;
  }
  return o + "\"";
}

std::string value_text(const Value& v) {
  if (auto d = std::get_if<double>(&v)) return num(*d);
  if (auto i = std::get_if<std::int64_t>(&v)) return std::to_string(*i);
  return std::get<std::string>(v);
}

void write_csv(std::ostream& os, const std::vector<Row>& rows) {
  os << "experiment_id,param_json,stat,value,stderr,n\r\n";
  for (const auto& r : rows) {
    os << csv_field(r.id) << ',' << csv_field(r.params.dump()) << ',' << csv_field(r.stat) << ','
       << csv_field(value_text(r.value)) << ',' << (r.se ? num(*r.se) : "") << ','
       << (r.n ? std::to_string(*r.n) : "") << "\r\n";
  }
}

void write_json(std::ostream& os, const std::vector<Row>& rows) {
  json out = json::array();
  for (const auto& r : rows) {
    json j;
    j["experiment_id"] = r.id;
    j["params"] = r.params;
    j["stat"] = r.stat;
    std::visit([&](const auto& v) { j["value"] = v; }, r.value);
    j["stderr"] = r.se ? json(*r.se) : json(nullptr);
    j["n"] = r.n ? json(*r.n) : json(nullptr);
    out.push_back(j);
  }
  os << out.dump(1) << '\n';
}

struct Emitter {
  std::vector<Row> rows;
  std::string id;
  json params;

  void add(const std::string& stat, Value v, std::optional<double> se = {}, std::optional<std::uint64_t> n = {}) {
    rows.push_back({id, params, stat, std::move(v), se, n});
  }
};

// ---- configuration -----------------------------------------------------

enum class Kind { UInt, Num, NumList, Str, StrList, Bool, Range, Object, ObjectList };
using Schema = std::map<std::string, Kind>;

std::string where(const std::string& key) { return "config key '" + key + "'"; }

void check_kind(const std::string& key, const json& v, Kind k) {
  auto bad = [&](const char* want) { throw ConfigError(where(key) + " must be " + want); };
  switch (k) {
    case Kind::UInt:
      if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0))
        bad("a non-negative integer");
      break;
    case Kind::Num:
      if (!v.is_number()) bad("a number");
      break;
    case Kind::NumList:
      if (!v.is_array()) bad("a list of numbers");
      for (const auto& e : v)
        if (!e.is_number()) bad("a list of numbers");
      break;
    case Kind::Str:
      if (!v.is_string()) bad("a string");
      break;
    case Kind::StrList:
      if (!v.is_array()) bad("a list of strings");
      for (const auto& e : v)
        if (!e.is_string()) bad("a list of strings");
      break;
    case Kind::Bool:
      if (!v.is_boolean()) bad("a boolean");
      break;
    case Kind::Range:
      if (!v.is_object()) bad("an object {min, max, n}");
      for (const auto& [kk, e] : v.items()) {
        if (kk != "min" && kk != "max" && kk != "n") throw ConfigError("unknown key '" + kk + "' in " + where(key));
        check_kind(key + "." + kk, e, kk == "n" ? Kind::UInt : Kind::Num);
      }
      if (!v.contains("min") || !v.contains("max") || !v.contains("n"))
        throw ConfigError(where(key) + " needs min, max and n");
      break;
    case Kind::Object:
      if (!v.is_object()) bad("an object");
      break;
    case Kind::ObjectList:
      if (!v.is_array()) bad("a list of objects");
      for (const auto& e : v)
        if (!e.is_object()) bad("a list of objects");
      break;
  }
}

void check_schema(const json& cfg, Schema s, const std::string& mode) {
  s["seed"] = Kind::UInt;
  s["workers"] = Kind::UInt;
  s["id"] = Kind::Str;
  s["mode"] = Kind::Str;
  for (const auto& [k, v] : cfg.items()) {
    auto it = s.find(k);
    if (it == s.end()) throw ConfigError("unknown config key '" + k + "' for " + mode);
    check_kind(k, v, it->second);
  }
  if (cfg.contains("mode") && cfg["mode"].get<std::string>() != mode)
    throw ConfigError("config mode '" + cfg["mode"].get<std::string>() + "' does not match subcommand " + mode);
}

void check_object(const std::string& key, const json& obj, const std::vector<std::string>& required) {
  for (const auto& [k, v] : obj.items()) {
    if (std::find(required.begin(), required.end(), k) == required.end())
      throw ConfigError("unknown key '" + k + "' in " + where(key));
    check_kind(key + "." + k, v, Kind::Num);
  }
  for (const auto& k : required)
    if (!obj.contains(k)) throw ConfigError(where(key) + " is missing '" + k + "'");
}

template <class T>
T get(const json& cfg, const std::string& key, T dflt) {
  return cfg.contains(key) ? cfg[key].get<T>() : dflt;
}

void require(bool ok, const std::string& msg) {
  if (!ok) throw ConfigError(msg);
}

struct Common {
  std::uint64_t seed;
  unsigned workers;
  std::string id;
};

Common common(const json& cfg, const std::string& mode) {
  Common c{get<std::uint64_t>(cfg, "seed", 1), unsigned(get<std::uint64_t>(cfg, "workers", 1)),
           get<std::string>(cfg, "id", mode)};
  require(c.workers >= 1 && c.workers <= 256, "workers must lie in [1, 256]");
  return c;
}

// ---- two-orientation law ----------------------------------------------

struct TwoLaw {
  double p, alpha, R0, Ra;
  MarkLaw law() const { return two_stick_law(p, alpha, R0, Ra); }
};

TwoLaw two_law(const json& cfg) {
  TwoLaw t{get<double>(cfg, "p", 0.5), get<double>(cfg, "alpha", std::numbers::pi / 2), get<double>(cfg, "R0", 0.5),
           get<double>(cfg, "Ra", 0.5)};
  require(t.p > 0 && t.p < 1, "p must lie in (0, 1)");
  require(t.alpha > 0 && t.alpha < std::numbers::pi, "alpha must lie in (0, pi)");
  require(t.R0 > 0 && t.Ra > 0, "R0 and Ra must be positive");
  return t;
}

std::vector<double> ladder(const json& cfg, std::vector<double> dflt) {
  auto v = get<std::vector<double>>(cfg, "ladder", dflt);
  require(!v.empty(), "ladder must not be empty");
  for (double x : v) require(x > 0 && std::isfinite(x), "ladder entries must be positive");
  std::sort(v.begin(), v.end());
  return v;
}

std::string comp_key(int k, int l) { return "[" + std::to_string(k) + "," + std::to_string(l) + "]"; }

// ---- validate-geometry -------------------------------------------------

const std::vector<std::string> all_suites{"neighborhood", "lemma3.1", "lemma4.1", "lemma4.2", "lemma4.3", "lemma4.4"};

int cmd_validate(const json& cfg, Emitter& em) {
  check_schema(cfg,
               {{"trials", Kind::UInt}, {"suites", Kind::StrList}, {"fixtures", Kind::ObjectList},
                {"exact_fallback", Kind::Bool}},
               "validate-geometry");
  const auto c = common(cfg, "validate-geometry");
  const auto trials = get<std::uint64_t>(cfg, "trials", 1000);
  require(trials >= 1, "trials must be at least 1");
  const auto suites = get<std::vector<std::string>>(cfg, "suites", all_suites);
  for (const auto& s : suites)
    require(std::find(all_suites.begin(), all_suites.end(), s) != all_suites.end(), "unknown suite '" + s + "'");
  std::vector<FrameFixture> fixtures;
  if (cfg.contains("fixtures"))
    for (const auto& f : cfg["fixtures"]) {
      check_object("fixtures[]", f, {"alpha", "beta", "H0", "Ha", "Hb"});
      FrameFixture x{f["alpha"], f["beta"], f["H0"], f["Ha"], f["Hb"]};
      require(x.alpha > 0 && x.alpha < x.beta && x.beta < std::numbers::pi, "fixture needs 0 < alpha < beta < pi");
      require(x.H0 > 0 && x.Ha > 0 && x.Hb > 0, "fixture H-values must be positive");
      fixtures.push_back(x);
    }
  OracleOptions opt;
  opt.exact_fallback = get<bool>(cfg, "exact_fallback", true);

  em.id = c.id;
  em.params = {{"trials", trials}, {"seed", c.seed}, {"fixtures", fixtures.size()}};
  bool failed = false;
  for (const auto& name : suites) {
    SuiteReport r;
    if (name == "neighborhood") r = neighborhood_suite(trials, c.seed);
    else if (name == "lemma3.1") r = lemma31_suite(trials, c.seed, opt);
    else if (name == "lemma4.1") r = lemma41_suite(trials, c.seed, fixtures, opt);
    else if (name == "lemma4.2") r = lemma42_suite(trials, c.seed, fixtures, opt);
    else if (name == "lemma4.3") r = lemma43_suite(trials, c.seed, opt);
    else r = lemma44_suite(trials, c.seed, opt);
    failed |= !r.passed();
    em.params["suite"] = name;
    em.add("trials", std::int64_t(r.trials), {}, r.trials);
    em.add("violations", std::int64_t(r.violations), {}, r.trials);
    em.add("max_error", r.max_error, {}, r.trials);
    em.add("exact_fallbacks", std::int64_t(r.exact_fallbacks), {}, r.trials);
    for (const auto& [k, n] : r.cases) {
      em.add("cases[" + k + "]", std::int64_t(n), {}, r.trials);
      const auto it = r.case_violations.find(k);
      em.add("violations[" + k + "]", std::int64_t(it == r.case_violations.end() ? 0 : it->second), {}, n);
    }
    std::cerr << name << ": " << r.trials << " trials, " << r.violations << " violations, max error " << r.max_error
              << ", " << r.exact_fallbacks << " exact fallbacks (" << r.seconds << " s)\n";
  }
  return failed ? exit_violation : exit_ok;
}

// ---- simulate-composition ----------------------------------------------

SimWindow window_for(const json& cfg, const MarkLaw& law, int m) {
  if (!cfg.contains("window")) return auto_window(law, m);
  const double w = cfg["window"].get<double>();
  require(w > 0, "window must be positive");
  return {w};
}

Histogram run_rung(const MarkLaw& law, double lb, SimWindow win, int m, const Common& c, std::uint64_t base,
                   std::uint64_t min_hits, std::uint64_t batch, std::uint64_t max_rep) {
  HistogramRequest rq{law, lambda_for_effective(law, lb), win, m, base, 0, c.seed, c.workers};
  return histogram_until(rq, min_hits, batch, max_rep);
}

void emit_pmf(Emitter& em, const Histogram& h, double p, int m, std::uint64_t min_hits) {
  em.add("replicates", std::int64_t(h.replicates), {}, h.replicates);
  em.add("finite_hits", std::int64_t(h.finite_hits), {}, h.replicates);
  em.add("censored", std::int64_t(h.censored), {}, h.replicates);
  em.add("oversize", std::int64_t(h.oversize), {}, h.replicates);
  const std::uint64_t n = h.finite_hits;
  double tv = 0, tv_se = 0;
  auto lim = p_m_limit(p, 1 - p, m);
  std::reverse(lim.begin(), lim.end());  // ascending composition key
  for (const auto& e : lim) {
    const double f = h.pmf({e.k, e.l});
    const double se = n ? std::sqrt(f * (1 - f) / double(n)) : NAN;
    const auto ci = h.ci({e.k, e.l});
    em.add("pmf" + comp_key(e.k, e.l), f, se, n);
    em.add("ci95_lo" + comp_key(e.k, e.l), ci.lo, {}, n);
    em.add("ci95_hi" + comp_key(e.k, e.l), ci.hi, {}, n);
    em.add("limit" + comp_key(e.k, e.l), e.prob);
    tv += std::abs(f - e.prob) / 2;
    tv_se += se / 2;
  }
  // the stderr of tv is the conservative sum of the per-cell errors
  em.add("tv", n ? tv : NAN, tv_se, n);
  if (n < min_hits) em.add("warn", std::string("insufficient_hits"), {}, n);
}

int cmd_simulate(const json& cfg, Emitter& em) {
  check_schema(cfg,
               {{"p", Kind::Num}, {"alpha", Kind::Num}, {"R0", Kind::Num}, {"Ra", Kind::Num}, {"m_target", Kind::UInt},
                {"ladder", Kind::NumList}, {"min_hits", Kind::UInt}, {"batch", Kind::UInt},
                {"max_replicates", Kind::UInt}, {"window", Kind::Num}, {"compare", Kind::Object}},
               "simulate-composition");
  const auto c = common(cfg, "simulate-composition");
  const TwoLaw A = two_law(cfg);
  const int m = int(get<std::uint64_t>(cfg, "m_target", 3));
  require(m >= 2 && m <= 60, "m_target must lie in [2, 60]");
  const auto lad = ladder(cfg, {2, 4, 8});
  const auto min_hits = get<std::uint64_t>(cfg, "min_hits", 2000);
  const auto batch = get<std::uint64_t>(cfg, "batch", 65536);
  const auto max_rep = get<std::uint64_t>(cfg, "max_replicates", 10'000'000);
  require(batch >= 1 && max_rep >= 1, "batch and max_replicates must be positive");
  std::optional<TwoLaw> B;
  if (cfg.contains("compare")) {
    check_object("compare", cfg["compare"], {"alpha", "R0", "Ra"});
    json merged = cfg["compare"];
    merged["p"] = A.p;
    B = two_law(merged);
  }

  const auto lawA = A.law();
  const SimWindow winA = window_for(cfg, lawA, m);
  auto echo = [&](const TwoLaw& t, double lb, SimWindow w) {
    return json{{"p", t.p},  {"alpha", t.alpha}, {"R0", t.R0},     {"Ra", t.Ra},         {"m", m},
                {"lambda_B", lb}, {"lambda", lambda_for_effective(t.law(), lb)}, {"W", w.halfwidth}, {"seed", c.seed}};
  };
  std::vector<Histogram> ha, hb;
  em.id = c.id;
  for (double lb : lad) {
    ha.push_back(run_rung(lawA, lb, winA, m, c, 0, min_hits, batch, max_rep));
    em.params = echo(A, lb, winA);
    emit_pmf(em, ha.back(), A.p, m, min_hits);
  }
  if (B) {
    const auto lawB = B->law();
    const SimWindow winB = cfg.contains("window") ? winA : auto_window(lawB, m);
    em.id = c.id + "/compare";
    for (std::size_t i = 0; i < lad.size(); ++i) {
      // replicate indices disjoint from the first law's
      hb.push_back(run_rung(lawB, lad[i], winB, m, c, std::uint64_t(1) << 40, min_hits, batch, max_rep));
      em.params = echo(*B, lad[i], winB);
      emit_pmf(em, hb.back(), B->p, m, min_hits);
      const auto x = chi2_homogeneity({ha[i].counts, hb[i].counts});
      em.add("chi2", x.stat, {}, ha[i].finite_hits + hb[i].finite_hits);
      em.add("chi2_dof", std::int64_t(x.dof));
      em.add("chi2_p", x.p_value, {}, ha[i].finite_hits + hb[i].finite_hits);
    }
    // pooled over rungs; both laws see the same rung mix
    std::map<Composition, std::uint64_t> pool_a, pool_b;
    std::uint64_t n = 0;
    for (std::size_t i = 0; i < lad.size(); ++i) {
      for (const auto& [k, v] : ha[i].counts) pool_a[k] += v, n += v;
      for (const auto& [k, v] : hb[i].counts) pool_b[k] += v, n += v;
    }
    const auto x = chi2_homogeneity({pool_a, pool_b});
    em.params = json{{"p", A.p}, {"m", m}, {"ladder", lad}, {"seed", c.seed}};
    em.add("chi2_pooled", x.stat, {}, n);
    em.add("chi2_pooled_dof", std::int64_t(x.dof));
    em.add("chi2_pooled_p", x.p_value, {}, n);
  }
  return exit_ok;
}

// ---- rate-trend --------------------------------------------------------

int cmd_rate_trend(const json& cfg, Emitter& em) {
  check_schema(cfg,
               {{"p", Kind::Num}, {"alpha", Kind::Num}, {"R0", Kind::Num}, {"Ra", Kind::Num}, {"m_target", Kind::UInt},
                {"ladder", Kind::NumList}, {"replicates", Kind::UInt}, {"min_hits", Kind::UInt}, {"window", Kind::Num}},
               "rate-trend");
  const auto c = common(cfg, "rate-trend");
  const TwoLaw A = two_law(cfg);
  const int m = int(get<std::uint64_t>(cfg, "m_target", 2));
  require(m == 2 || m == 3, "m_target must be 2 or 3");
  const auto lad = ladder(cfg, {2, 4, 6, 8});
  const auto reps = get<std::uint64_t>(cfg, "replicates", 1'000'000);
  require(reps >= 1, "replicates must be at least 1");
  const auto min_hits = get<std::uint64_t>(cfg, "min_hits", 100);
  const auto law = A.law();
  const SimWindow win = window_for(cfg, law, m);
  const TwoStickParams P{A.p, 1 - A.p, A.alpha, A.R0, A.Ra};
  em.id = c.id;
  for (double lb : lad) {
    const double lambda = lambda_for_effective(law, lb);
    const auto h = composition_histogram(HistogramRequest{law, lambda, win, m, 0, reps, c.seed, c.workers});
    em.params = json{{"p", A.p}, {"alpha", A.alpha}, {"R0", A.R0}, {"Ra", A.Ra}, {"m", m},
                     {"lambda_B", lb}, {"lambda", lambda}, {"W", win.halfwidth}, {"seed", c.seed}};
    em.add("replicates", std::int64_t(h.replicates), {}, h.replicates);
    em.add("censored", std::int64_t(h.censored), {}, h.replicates);
    for (int k = 1; k < m; ++k) {
      const int l = m - k;
      const auto it = h.counts.find({k, l});
      const std::uint64_t hits = it == h.counts.end() ? 0 : it->second;
      const double est = double(hits) / double(reps);
      const double se = std::sqrt(est * (1 - est) / double(reps));
      const double asym = thm21_asymptotic(P, k, l, lb / P.area_B());
      em.add("mc" + comp_key(k, l), est, se, reps);
      em.add("asymptotic" + comp_key(k, l), asym);
      em.add("ratio" + comp_key(k, l), est / asym, se / asym, hits);
      if (hits < min_hits) em.add("warn" + comp_key(k, l), std::string("low_hits"), {}, hits);
    }
  }
  return exit_ok;
}

// ---- gk ----------------------------------------------------------------

int cmd_gk(const json& cfg, Emitter& em) {
  check_schema(cfg, {{"k", Kind::UInt}, {"c1", Kind::Num}, {"c2", Kind::Num}, {"c3", Kind::Num}, {"samples", Kind::UInt}},
               "gk");
  const auto c = common(cfg, "gk");
  const int k = int(get<std::uint64_t>(cfg, "k", 2));
  const double c1 = get<double>(cfg, "c1", 1), c2 = get<double>(cfg, "c2", 1), c3 = get<double>(cfg, "c3", 1);
  const auto samples = get<std::uint64_t>(cfg, "samples", 10'000'000);
  const auto r = gk_integral(k, c1, c2, c3, samples, c.seed);
  em.id = c.id;
  em.params = json{{"k", k}, {"c1", c1}, {"c2", c2}, {"c3", c3}, {"samples", samples}, {"seed", c.seed}};
  const bool mc = r.method == "monte-carlo";
  em.add("G", r.value, r.stderr_, mc ? std::optional<std::uint64_t>(samples) : std::nullopt);
  em.add("method", r.method);
  return exit_ok;
}

// ---- classify / phase-diagram ------------------------------------------

void emit_phase(Emitter& em, const ThreeStickParams& P, bool diagonal) {
  em.params = json{{"a", P.a}, {"b", P.b}, {"p0", P.p0}, {"pa", P.pa}, {"pb", P.pb}};
  const auto o = classify_phase(P);
  em.add("case", o.case_label);
  em.add("theorem_case", std::int64_t(o.reduction.theorem_case));
  em.add("observation", std::string(1, o.reduction.observation));
  em.add("pairs", pairs_string(o.pairs));
  em.add("occurs", std::int64_t(o.occurs()));
  em.add("fixation", std::int64_t(o.fixation));
  em.add("consistent", std::int64_t(o.consistent));
  for (Pair pr : all_pairs) {
    em.add(std::string("rate[") + name(pr) + "]", o.rates.rate[int(pr)]);
    em.add(std::string("prefactor[") + name(pr) + "]", prefactor_label(o.rates.prefactor[int(pr)]));
  }
  const double l1 = threshold_l1(P.p0, P.pa, P.pb), l2 = threshold_l2(P.p0, P.pa, P.pb);
  em.add("l1", l1);
  em.add("l2", l2);
  if (diagonal) em.add("boundary", l1 <= 1 ? l1 : l2);
}

ThreeStickParams three(const json& cfg) {
  ThreeStickParams P{get<double>(cfg, "a", 1), get<double>(cfg, "b", 1), get<double>(cfg, "p0", 1.0 / 3),
                     get<double>(cfg, "pa", 1.0 / 3), get<double>(cfg, "pb", 1.0 / 3)};
  P.validate();
  return P;
}

int cmd_classify(const json& cfg, Emitter& em) {
  check_schema(cfg, {{"a", Kind::Num}, {"b", Kind::Num}, {"p0", Kind::Num}, {"pa", Kind::Num}, {"pb", Kind::Num}},
               "classify");
  const auto c = common(cfg, "classify");
  em.id = c.id;
  emit_phase(em, three(cfg), false);
  return exit_ok;
}

std::vector<double> grid(const json& r, const std::string& key) {
  const double lo = r["min"], hi = r["max"];
  const auto n = r["n"].get<std::uint64_t>();
  require(n >= 2, "grid resolution for '" + key + "' must be at least 2");
  require(n <= 1'000'000, "grid for '" + key + "' too large");
  require(lo <= hi, "grid '" + key + "' needs min <= max");
  std::vector<double> v;
  for (std::uint64_t i = 0; i < n; ++i) v.push_back(lo + (hi - lo) * double(i) / double(n - 1));
  return v;
}

int cmd_phase(const json& cfg, Emitter& em) {
  check_schema(cfg, {{"a", Kind::Range}, {"b", Kind::Range}, {"p", Kind::NumList}, {"pb", Kind::Num}, {"p0", Kind::Range}},
               "phase-diagram");
  const auto c = common(cfg, "phase-diagram");
  require(cfg.contains("a"), "phase-diagram needs an 'a' grid");
  const auto as = grid(cfg["a"], "a");
  const bool diagonal = !cfg.contains("b");
  const auto bs = diagonal ? std::vector<double>{} : grid(cfg["b"], "b");
  std::vector<std::array<double, 3>> ps;
  if (cfg.contains("p")) {
    require(!cfg.contains("p0") && !cfg.contains("pb"), "give either 'p' or 'pb' with a 'p0' sweep");
    const auto p = cfg["p"].get<std::vector<double>>();
    require(p.size() == 3, "'p' must list p0, pa, pb");
    ps.push_back({p[0], p[1], p[2]});
  } else {
    require(cfg.contains("pb") && cfg.contains("p0"), "phase-diagram needs 'p' or 'pb' with a 'p0' sweep");
    const double pb = cfg["pb"];
    for (double p0 : grid(cfg["p0"], "p0")) ps.push_back({p0, 1 - p0 - pb, pb});
  }
  for (const auto& p : ps) ThreeStickParams{1, 1, p[0], p[1], p[2]}.validate();
  for (double a : as) require(a > 0, "grid values of a must be positive");
  for (double b : bs) require(b > 0, "grid values of b must be positive");

  em.id = c.id;
  for (const auto& p : ps)
    for (double a : as) {
      if (diagonal) {
        emit_phase(em, {a, a, p[0], p[1], p[2]}, true);
      } else {
        for (double b : bs) emit_phase(em, {a, b, p[0], p[1], p[2]}, false);
      }
    }
  return exit_ok;
}

json read_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  return j;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"labcli: stick-percolation validation and simulation harness"};
  app.require_subcommand(1);
  std::string config_path, out_path, format = "csv";
  std::optional<std::uint64_t> seed, workers;
  app.add_option("--config", config_path, "JSON config file");
  app.add_option("--seed", seed, "64-bit master seed");
  app.add_option("--workers", workers, "worker threads");
  app.add_option("--out", out_path, "output path (default stdout)");
  app.add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));

  std::map<std::string, std::pair<CLI::App*, int (*)(const json&, Emitter&)>> cmds;
  auto sub = [&](const char* name, const char* help, int (*fn)(const json&, Emitter&)) {
    auto* s = app.add_subcommand(name, help);
    s->fallthrough();
    cmds[name] = {s, fn};
    return s;
  };
  // per-command flags overlay the config file
  std::map<std::string, std::optional<double>> nums;
  std::map<std::string, std::optional<std::uint64_t>> ints;
  std::optional<std::string> suites;

  auto* v = sub("validate-geometry", "oracle-equivalence and inequality suites", cmd_validate);
  v->add_option("--trials", ints["trials"], "trials per suite");
  v->add_option("--suites", suites, "comma-separated suite names");
  auto* s = sub("simulate-composition", "conditional composition pmf along an intensity ladder", cmd_simulate);
  auto* r = sub("rate-trend", "simulated cluster probabilities against the asymptotic formula", cmd_rate_trend);
  for (auto* x : {s, r}) {
    x->add_option("--p", nums["p"], "probability of the horizontal orientation");
    x->add_option("--m", ints["m_target"], "target cluster size");
  }
  sub("phase-diagram", "classifier over a parameter grid", cmd_phase);
  auto* g = sub("gk", "evaluate the G^k integral", cmd_gk);
  g->add_option("--k", ints["k"]);
  for (const char* k : {"c1", "c2", "c3"}) g->add_option(std::string("--") + k, nums[k]);
  g->add_option("--samples", ints["samples"]);
  auto* c = sub("classify", "single-point phase classification", cmd_classify);
  for (const char* k : {"a", "b", "p0", "pa", "pb"}) c->add_option(std::string("--") + k, nums[k]);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return exit_usage;
  }

  std::string mode;
  for (const auto& [name, entry] : cmds)
    if (entry.first->parsed()) mode = name;

  try {
    json cfg = config_path.empty() ? json::object() : read_config(config_path);
    if (seed) cfg["seed"] = *seed;
    if (workers) cfg["workers"] = *workers;
    for (const auto& [k, val] : nums)
      if (val) cfg[k] = *val;
    for (const auto& [k, val] : ints)
      if (val) cfg[k] = *val;
    if (suites) {
      std::vector<std::string> list;
      std::stringstream ss(*suites);
      for (std::string item; std::getline(ss, item, ',');)
        if (!item.empty()) list.push_back(item);
      cfg["suites"] = list;
    }

    Emitter em;
    const int code = cmds[mode].second(cfg, em);
    std::ofstream file;
    if (!out_path.empty()) {
      file.open(out_path, std::ios::binary);
      if (!file) throw ConfigError("cannot open output file " + out_path);
    }
    std::ostream& os = out_path.empty() ? std::cout : file;
    if (format == "json") write_json(os, em.rows);
    else write_csv(os, em.rows);
    return code;
  } catch (const NumericalDegeneracy& e) {
    std::cerr << "labcli: numerical degeneracy: " << e.what() << '\n';
    return exit_degenerate;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "labcli: config: " << e.what() << '\n';
    return exit_usage;
  } catch (const std::invalid_argument& e) {
    // config errors, out-of-regime parameters, unsupported k
    std::cerr << "labcli: " << e.what() << '\n';
    return exit_usage;
  }
}
