// psb: command-line front end for the Beatty / Piatetski-Shapiro toolkit.
//
// Subcommands: seq, count, verify, discrepancy, harmonic, vaughan, expsum,
// suite. Reports are self-describing JSON (schema_version embedded); --format
// csv emits a flat projection for sweeps. A config file passed via
// --config <path> holds the same flags as key=value lines. Exit codes:
// 0 success, 1 a verification or acceptance check failed, 2 usage or
// parameter error, 3 precision budget exhausted.

#include <algorithm>
#include <cinttypes>
#include <complex>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "psbeatty/acceptance.hpp"

namespace {

using psb::json;

struct Global {
  std::string format = "json";
  int threads = 0;
};

void emit_json(const json& j) { std::cout << j.dump(2) << "\n"; }

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

uint64_t parse_count_arg(const std::string& s, const char* what) {
  if (s.empty()) throw psb::InvalidInput(std::string(what) + " is empty");
  bool plain = s.find_first_not_of("0123456789") == std::string::npos;
  try {
    if (plain) return std::stoull(s);
    size_t used = 0;
    double v = std::stod(s, &used);  // accepts 1e6 style
    if (used != s.size() || v < 0 || v > 1.8e18 || v != std::floor(v))
      throw std::invalid_argument(s);
    return static_cast<uint64_t>(v);
  } catch (const std::exception&) {
    throw psb::InvalidInput(std::string(what) + ": cannot parse '" + s +
                            "' as a whole number");
  }
}

mpq_class parse_rat(const std::string& s, const char* what) {
  try {
    mpq_class q(s);
    if (q.get_den() == 0)
      throw psb::InvalidInput(std::string(what) + ": zero denominator");
    q.canonicalize();
    return q;
  } catch (const std::invalid_argument&) {
    throw psb::InvalidInput(std::string(what) + ": cannot parse '" + s +
                            "' as p/q");
  }
}

void parse_gamma(const std::string& s, unsigned& num_out, unsigned& den_out) {
  mpq_class q = parse_rat(s, "gamma");
  if (!(q > 0 && q < 1) || q.get_den() > 64)
    throw psb::InvalidInput("gamma must be p/q in (0,1) with q <= 64");
  num_out = static_cast<unsigned>(q.get_num().get_ui());
  den_out = static_cast<unsigned>(q.get_den().get_ui());
}

psb::WeightKind parse_weight(const std::string& s) {
  if (s == "unit") return psb::WeightKind::Unit;
  if (s == "lambda") return psb::WeightKind::Lambda;
  if (s == "mobius") return psb::WeightKind::Mobius;
  if (s == "log") return psb::WeightKind::Log;
  throw psb::InvalidInput("weight must be unit|lambda|mobius|log");
}

psb::CoeffKind parse_coeff(const std::string& s) {
  if (s == "unit") return psb::CoeffKind::Unit;
  if (s == "mobius") return psb::CoeffKind::Mobius;
  if (s == "lambda-norm") return psb::CoeffKind::LambdaNorm;
  throw psb::InvalidInput("coefficients must be unit|mobius|lambda-norm");
}

psb::BeattyParams make_beatty(const std::string& alpha,
                              const std::string& beta) {
  return psb::BeattyParams(psb::RealSpec::parse(alpha),
                           psb::RealSpec::parse(beta));
}

psb::PSParams make_ps(const std::string& c) {
  return psb::PSParams::from_rational(parse_rat(c, "c"));
}

// Expands `--config <path>` into the flags it stands for. Lines are
// key=value (or a bare flag name); '#' starts a comment. Keys are flag
// names without dashes; unknown keys are rejected downstream by the parser.
std::vector<std::string> expand_config(int argc, char** argv) {
  std::vector<std::string> args;
  std::optional<std::string> path;
  for (int i = 1; i < argc; ++i) {
    std::string tok = argv[i];
    if (tok == "--config") {
      if (i + 1 >= argc) throw psb::InvalidInput("--config needs a path");
      if (path) throw psb::InvalidInput("--config given twice");
      path = argv[++i];
    } else if (tok.rfind("--config=", 0) == 0) {
      if (path) throw psb::InvalidInput("--config given twice");
      path = tok.substr(9);
    } else {
      args.push_back(std::move(tok));
    }
  }
  if (!path) return args;

  std::ifstream in(*path);
  if (!in) throw psb::InvalidInput("cannot open config file " + *path);
  auto trim = [](std::string s) {
    size_t a = s.find_first_not_of(" \t\r");
    size_t b = s.find_last_not_of(" \t\r");
    return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
  };
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    size_t eq = line.find('=');
    std::string key = trim(eq == std::string::npos ? line : line.substr(0, eq));
    if (key.empty())
      throw psb::InvalidInput(*path + ":" + std::to_string(lineno) +
                              ": missing key");
    if (key.rfind("--", 0) != 0) key = "--" + key;
    if (eq == std::string::npos) {
      args.push_back(key);
    } else {
      args.push_back(key + "=" + trim(line.substr(eq + 1)));
    }
  }
  return args;
}

int env_threads() {
  const char* s = std::getenv("PSB_THREADS");
  if (!s || !*s) return 0;
  char* end = nullptr;
  long v = std::strtol(s, &end, 10);
  if (*end || v < 0 || v > 512) return 0;
  return static_cast<int>(v);
}

// ---------------------------------------------------------------- seq

int run_seq(const Global& g, const std::string& kind,
            const std::string& alpha, const std::string& beta,
            const std::string& c, uint64_t terms, uint64_t max) {
  if ((terms == 0) == (max == 0))
    throw psb::InvalidInput("give exactly one of --terms and --max");
  if (terms > 1000000) throw psb::InvalidInput("--terms capped at 10^6");
  if (max > 10000000) throw psb::InvalidInput("--max capped at 10^7");
  if (kind == "intersection" && terms)
    throw psb::InvalidInput("intersection supports --max only");

  std::optional<psb::BeattyParams> B;
  std::optional<psb::PSParams> P;
  json params;
  if (kind == "beatty" || kind == "intersection") {
    B = make_beatty(alpha, beta);
    params["alpha"] = B->alpha_spec().str();
    params["beta"] = B->beta_spec().str();
  }
  if (kind == "ps" || kind == "intersection") {
    P = make_ps(c);
    params["c"] = P->str();
  }

  std::vector<std::pair<uint64_t, uint64_t>> rows;  // (index, value)
  if (terms) {
    for (uint64_t n = 1; n <= terms; ++n) {
      mpz_class v = B ? psb::beatty_term(*B, n) : psb::ps_term(*P, n);
      if (!v.fits_ulong_p())
        throw psb::InvalidInput("term exceeds 64-bit output range");
      rows.emplace_back(n, mpz_get_ui(v.get_mpz_t()));
    }
  } else {
    uint64_t idx = 0;
    for (uint64_t m = 1; m <= max; ++m) {
      bool in_b = !B || psb::beatty_contains(*B, m) == 1;
      bool in_p = !P || psb::ps_indicator(*P, m) == 1;
      if (in_b && in_p) rows.emplace_back(++idx, m);
    }
  }

  if (g.format == "csv") {
    std::cout << "n,term\n";
    for (auto [i, v] : rows) std::cout << i << "," << v << "\n";
    return 0;
  }
  json values = json::array();
  for (auto [i, v] : rows) values.push_back(v);
  emit_json(json{{"schema_version", psb::kSchemaVersion},
                 {"kind", kind},
                 {"params", params},
                 {"mode", terms ? "terms" : "members"},
                 {"limit", terms ? terms : max},
                 {"count", rows.size()},
                 {"values", values}});
  return 0;
}

// ---------------------------------------------------------------- count

int run_count(const Global& g, const std::string& kind,
              const std::string& alpha, const std::string& beta,
              const std::string& c, uint64_t d, uint64_t a,
              const std::vector<std::string>& xs) {
  psb::CountOptions opt;
  opt.threads = g.threads;
  std::vector<psb::CountReport> reports;
  for (const auto& xs_i : xs) {
    uint64_t x = parse_count_arg(xs_i, "--x");
    if (kind == "ps") {
      reports.push_back(psb::count_ps_primes(make_ps(c), x, opt));
    } else if (kind == "beatty") {
      reports.push_back(
          psb::count_beatty_primes(make_beatty(alpha, beta), x, opt));
    } else if (kind == "intersection") {
      reports.push_back(psb::count_intersection(make_beatty(alpha, beta),
                                                make_ps(c), x, opt));
    } else {  // ap
      reports.push_back(psb::count_ps_in_ap(make_ps(c), d, a, x, opt));
    }
  }

  if (g.format == "csv") {
    std::cout << "kind,x,count,main_term,ratio,error_budget\n";
    for (const auto& r : reports)
      std::cout << r.kind << "," << r.x << "," << r.count << ","
                << num(r.main_term) << "," << num(r.ratio) << ","
                << num(r.error_budget) << "\n";
    return 0;
  }
  if (reports.size() == 1) {
    emit_json(reports.front().to_json());
  } else {
    json rows = json::array();
    for (const auto& r : reports) rows.push_back(r.to_json());
    emit_json(json{{"schema_version", psb::kSchemaVersion},
                   {"reports", rows}});
  }
  return 0;
}

// ---------------------------------------------------------------- verify

int emit_verify(const Global& g, json j, const char* metric, double value,
                double threshold, bool pass) {
  j["pass"] = pass;
  if (g.format == "csv") {
    std::cout << "check,metric,value,threshold,pass\n"
              << j["check"].get<std::string>() << "," << metric << ","
              << num(value) << "," << num(threshold) << ","
              << (pass ? "true" : "false") << "\n";
  } else {
    emit_json(j);
  }
  return pass ? 0 : 1;
}

int run_verify_vaughan(const Global& g, uint64_t max_n, double U, double V) {
  if (max_n < 2 || max_n > 10000000)
    throw psb::InvalidInput("--max must be in [2, 10^7]");
  psb::VaughanParams vp(U, V);  // validates
  double worst = 0.0;
  bool exact = true;
  uint64_t lo = vp.u_floor();
  for (uint64_t n = lo + 1; n <= max_n; ++n) {
    psb::VaughanTerms t = psb::vaughan_terms(n, U, V);
    worst = std::max(worst, std::fabs(t.t1 + t.t2 + t.t3 - t.lambda));
    exact = exact && t.exact_match;
  }
  bool pass = worst <= 1e-10 && exact;
  json j{{"schema_version", psb::kSchemaVersion}, {"check", "vaughan"},
         {"max", max_n},                          {"U", U},
         {"V", V},                                {"worst_residual", worst},
         {"tolerance", 1e-10},                    {"exact_match", exact}};
  return emit_verify(g, std::move(j), "worst_residual", worst, 1e-10, pass);
}

int run_verify_vaaler(const Global& g, long H, uint64_t grid) {
  psb::MajorantCheck mc =
      psb::majorant_check(psb::vaaler_approx(H), grid, g.threads);
  bool pass = mc.max_violation <= 1e-12;
  json j = mc.to_json();
  j["check"] = "vaaler";
  j["tolerance"] = 1e-12;
  return emit_verify(g, std::move(j), "max_violation", mc.max_violation,
                     1e-12, pass);
}

int run_verify_vinogradov(const Global& g, double a, double delta, long K,
                          uint64_t grid) {
  if (grid < 2 || grid > 100000000)
    throw psb::InvalidInput("--grid must be in [2, 10^8]");
  psb::TrigPolynomial T = psb::vinogradov_indicator(a, delta, K);
  double tail = psb::vinogradov_tail(delta, K);
  bool g0_exact = T.g[0].real() == a && T.g[0].imag() == 0.0;
  bool coeff_ok = true;
  for (long k = 1; k <= K; ++k) {
    double cap = std::min(1.0 / (psb::kPi * k),
                          4.0 / (psb::kPi * psb::kPi * k * double(k) * delta));
    if (std::abs(T.g[static_cast<size_t>(k)]) > cap * (1.0 + 1e-12))
      coeff_ok = false;
  }
  double worst_outside = 0.0, worst_collar_free = 0.0;
  for (uint64_t j = 0; j < grid; ++j) {
    double t = (static_cast<double>(j) + 0.5) / static_cast<double>(grid);
    double v = psb::trig_eval(T, t);
    worst_outside = std::max(worst_outside, std::max(-v, v - 1.0));
    double x = -1.0;
    if (t >= delta + 1e-9 && t <= a - delta - 1e-9)
      x = 1.0;
    else if (t >= a + delta + 1e-9 && t <= 1.0 - delta - 1e-9)
      x = 0.0;
    if (x >= 0.0)
      worst_collar_free = std::max(worst_collar_free, std::fabs(v - x));
  }
  double worst = std::max(worst_outside, worst_collar_free);
  bool pass = g0_exact && coeff_ok && worst <= tail;
  json j{{"schema_version", psb::kSchemaVersion},
         {"check", "vinogradov"},
         {"a", a},
         {"delta", delta},
         {"K", K},
         {"grid", grid},
         {"tail_budget", tail},
         {"g0_exact", g0_exact},
         {"coefficient_bound_ok", coeff_ok},
         {"worst_outside_unit", worst_outside},
         {"worst_collar_free", worst_collar_free}};
  return emit_verify(g, std::move(j), "worst_error", worst, tail, pass);
}

int run_verify_bilinear(const Global& g, uint64_t N, uint64_t N2, long long k,
                        long h, const std::string& alpha,
                        const std::string& beta, const std::string& c,
                        double U, double V) {
  if (N2 == 0) N2 = 2 * N;
  psb::VaughanParams vp =
      (U > 0 && V > 0) ? psb::VaughanParams(U, V)
                       : psb::VaughanParams::from_range(N);
  psb::BilinearSplit bs = psb::bilinear_split(
      N, N2, vp, k, h, make_beatty(alpha, beta), make_ps(c), g.threads);
  const psb::SumEvaluation &s1 = bs.find("S1"), &s4 = bs.find("S4"),
                           &s5 = bs.find("S5");
  bool slicing = (s4.value + s5.value) == s1.value;
  bool pass = bs.ok && slicing;
  json j = bs.to_json();
  j["check"] = "bilinear";
  j["slicing_exact"] = slicing;
  return emit_verify(g, std::move(j), "residual", bs.residual, bs.tolerance,
                     pass);
}

int run_verify_discrepancy(const Global& g, const std::string& theta,
                           const std::string& mu, uint64_t M) {
  std::vector<double> pts = psb::weyl_points(psb::RealSpec::parse(theta),
                                             psb::RealSpec::parse(mu), M);
  psb::DiscrepancyResult ex = psb::discrepancy_exact(pts);
  psb::RatInterval b = psb::discrepancy_bounds(pts);
  bool pass = ex.deviation >= b.lo && ex.deviation <= b.hi;
  json j{{"schema_version", psb::kSchemaVersion},
         {"check", "discrepancy"},
         {"theta", psb::RealSpec::parse(theta).str()},
         {"mu", psb::RealSpec::parse(mu).str()},
         {"M", M},
         {"deviation", ex.deviation.get_d()},
         {"deviation_exact", ex.deviation.get_str()},
         {"lower", b.lo.get_d()},
         {"upper", b.hi.get_d()}};
  return emit_verify(g, std::move(j), "deviation", ex.deviation.get_d(),
                     b.hi.get_d(), pass);
}

// ----------------------------------------------------------- discrepancy

int run_disc_exact(const Global& g, const std::string& theta,
                   const std::string& mu, uint64_t M) {
  std::vector<double> pts = psb::weyl_points(psb::RealSpec::parse(theta),
                                             psb::RealSpec::parse(mu), M);
  psb::DiscrepancyResult ex = psb::discrepancy_exact(pts);
  psb::RatInterval b = psb::discrepancy_bounds(pts);
  if (g.format == "csv") {
    std::cout << "m,deviation,lower,upper\n"
              << M << "," << num(ex.deviation.get_d()) << ","
              << num(b.lo.get_d()) << "," << num(b.hi.get_d()) << "\n";
    return 0;
  }
  emit_json(json{{"schema_version", psb::kSchemaVersion},
                 {"kind", "discrepancy-exact"},
                 {"theta", psb::RealSpec::parse(theta).str()},
                 {"mu", psb::RealSpec::parse(mu).str()},
                 {"M", M},
                 {"deviation", ex.deviation.get_d()},
                 {"deviation_exact", ex.deviation.get_str()},
                 {"witness_lo", ex.witness_lo},
                 {"witness_hi", ex.witness_hi},
                 {"lower", b.lo.get_d()},
                 {"upper", b.hi.get_d()}});
  return 0;
}

int run_disc_profile(const Global& g, const std::string& theta,
                     const std::string& mu,
                     const std::vector<std::string>& Ms_raw) {
  std::vector<uint64_t> Ms;
  for (const auto& s : Ms_raw) Ms.push_back(parse_count_arg(s, "--M"));
  psb::DiscrepancyProfile prof = psb::discrepancy_profile(
      psb::RealSpec::parse(theta), psb::RealSpec::parse(mu), Ms);
  if (g.format == "csv") {
    std::cout << "m,lower,upper,ref_inv_tau,d_m_tau,d_m_over_log\n";
    for (const auto& r : prof.rows)
      std::cout << r.m_count << "," << num(r.lower.get_d()) << ","
                << num(r.upper.get_d()) << "," << num(r.ref_inv_tau) << ","
                << num(r.d_times_m_tau) << "," << num(r.d_times_m_over_log)
                << "\n";
    return 0;
  }
  json rows = json::array();
  for (const auto& r : prof.rows)
    rows.push_back(json{{"m", r.m_count},
                        {"lower", r.lower.get_d()},
                        {"upper", r.upper.get_d()},
                        {"ref_inv_tau", r.ref_inv_tau},
                        {"d_times_m_tau", r.d_times_m_tau},
                        {"d_times_m_over_log", r.d_times_m_over_log}});
  emit_json(json{{"schema_version", psb::kSchemaVersion},
                 {"kind", "discrepancy-profile"},
                 {"theta", psb::RealSpec::parse(theta).str()},
                 {"mu", psb::RealSpec::parse(mu).str()},
                 {"tau_hat", prof.tau_hat},
                 {"rows", rows}});
  return 0;
}

// ------------------------------------------------------------- harmonic

int run_harmonic_vaaler(const Global& g, long H) {
  psb::VaalerApprox V = psb::vaaler_approx(H);
  if (g.format == "csv") {
    std::cout << "k,re,im,bound\n";
    for (long h = 0; h <= H; ++h)
      std::cout << h << "," << num(V.a[static_cast<size_t>(h)].real()) << ","
                << num(V.a[static_cast<size_t>(h)].imag()) << ","
                << num(V.b[static_cast<size_t>(h)]) << "\n";
    return 0;
  }
  json rows = json::array();
  for (long h = 0; h <= H; ++h)
    rows.push_back(json{{"k", h},
                        {"re", V.a[static_cast<size_t>(h)].real()},
                        {"im", V.a[static_cast<size_t>(h)].imag()},
                        {"bound", V.b[static_cast<size_t>(h)]}});
  emit_json(json{{"schema_version", psb::kSchemaVersion},
                 {"kind", "vaaler"},
                 {"H", H},
                 {"coefficients", rows}});
  return 0;
}

int run_harmonic_vinogradov(const Global& g, double a, double delta, long K) {
  psb::TrigPolynomial T = psb::vinogradov_indicator(a, delta, K);
  auto bound_of = [&](long k) {
    if (k == 0) return a;
    return std::min(1.0 / (psb::kPi * k),
                    4.0 / (psb::kPi * psb::kPi * k * double(k) * delta));
  };
  if (g.format == "csv") {
    std::cout << "k,re,im,bound\n";
    for (long k = 0; k <= K; ++k)
      std::cout << k << "," << num(T.g[static_cast<size_t>(k)].real()) << ","
                << num(T.g[static_cast<size_t>(k)].imag()) << ","
                << num(bound_of(k)) << "\n";
    return 0;
  }
  json rows = json::array();
  for (long k = 0; k <= K; ++k)
    rows.push_back(json{{"k", k},
                        {"re", T.g[static_cast<size_t>(k)].real()},
                        {"im", T.g[static_cast<size_t>(k)].imag()},
                        {"bound", bound_of(k)}});
  emit_json(json{{"schema_version", psb::kSchemaVersion},
                 {"kind", "vinogradov"},
                 {"a", a},
                 {"delta", delta},
                 {"K", K},
                 {"tail_budget", psb::vinogradov_tail(delta, K)},
                 {"coefficients", rows}});
  return 0;
}

// -------------------------------------------------------------- vaughan

int run_vaughan_terms(const Global& g, uint64_t n, double U, double V) {
  psb::VaughanTerms t = psb::vaughan_terms(n, U, V);
  double residual = std::fabs(t.t1 + t.t2 + t.t3 - t.lambda);
  if (g.format == "csv") {
    std::cout << "n,t1,t2,t3,lambda,residual\n"
              << n << "," << num(t.t1) << "," << num(t.t2) << "," << num(t.t3)
              << "," << num(t.lambda) << "," << num(residual) << "\n";
    return 0;
  }
  emit_json(json{{"schema_version", psb::kSchemaVersion},
                 {"kind", "vaughan-terms"},
                 {"n", n},
                 {"U", U},
                 {"V", V},
                 {"t1", t.t1},
                 {"t2", t.t2},
                 {"t3", t.t3},
                 {"lambda", t.lambda},
                 {"residual", residual},
                 {"exact_match", t.exact_match}});
  return 0;
}

int run_vaughan_split(const Global& g, uint64_t N, uint64_t N2, long long k,
                      long h, const std::string& alpha,
                      const std::string& beta, const std::string& c, double U,
                      double V) {
  if (N2 == 0) N2 = 2 * N;
  psb::VaughanParams vp =
      (U > 0 && V > 0) ? psb::VaughanParams(U, V)
                       : psb::VaughanParams::from_range(N);
  psb::BilinearSplit bs = psb::bilinear_split(
      N, N2, vp, k, h, make_beatty(alpha, beta), make_ps(c), g.threads);
  if (g.format == "csv") {
    std::cout << "label,re,im,terms\n";
    for (const auto& s : bs.sums)
      std::cout << s.label << "," << num(s.value.real()) << ","
                << num(s.value.imag()) << "," << s.term_count << "\n";
    return 0;
  }
  emit_json(bs.to_json());
  return 0;
}

// --------------------------------------------------------------- expsum

int emit_ratios(const Global& g, const std::vector<psb::BoundRatio>& rows,
                const std::vector<std::string>& labels) {
  if (g.format == "csv") {
    std::cout << "param,measured,bound,ratio\n";
    for (size_t i = 0; i < rows.size(); ++i)
      std::cout << labels[i] << "," << num(rows[i].measured) << ","
                << num(rows[i].bound) << "," << num(rows[i].ratio) << "\n";
    return 0;
  }
  if (rows.size() == 1) {
    emit_json(rows.front().to_json());
  } else {
    json arr = json::array();
    for (const auto& r : rows) arr.push_back(r.to_json());
    emit_json(json{{"schema_version", psb::kSchemaVersion},
                   {"reports", arr}});
  }
  return 0;
}

struct ExpPhaseFlags {
  std::string phase = "linear";
  std::string theta;
  long long h = 1;
  std::string scale = "1";
  std::string gamma = "1/2";
  long long k = 1;
  std::string alpha, beta;
};

psb::ExpSumSpec build_exp_spec(const ExpPhaseFlags& f, uint64_t lo,
                               uint64_t hi, psb::WeightKind w) {
  unsigned gn = 1, gd = 2;
  if (f.phase == "linear" || f.phase == "quadratic") {
    if (f.theta.empty()) throw psb::InvalidInput("--theta required");
    psb::RealSpec th = psb::RealSpec::parse(f.theta);
    return f.phase == "linear" ? psb::ExpSumSpec::linear(th, lo, hi, w)
                               : psb::ExpSumSpec::quadratic(th, lo, hi, w);
  }
  parse_gamma(f.gamma, gn, gd);
  if (f.phase == "power")
    return psb::ExpSumSpec::power(f.h, gn, gd, lo, hi, w,
                                  parse_rat(f.scale, "--scale"));
  if (f.phase == "mixed") {
    if (f.alpha.empty()) throw psb::InvalidInput("--alpha required for mixed");
    return psb::ExpSumSpec::mixed(f.k, make_beatty(f.alpha, f.beta), f.h, gn,
                                  gd, lo, hi, w);
  }
  throw psb::InvalidInput("phase must be linear|quadratic|power|mixed");
}

int run_expsum_eval(const Global& g, const ExpPhaseFlags& f,
                    const std::string& lo_s, const std::string& hi_s,
                    const std::string& weight) {
  uint64_t lo = parse_count_arg(lo_s, "--lo");
  uint64_t hi = parse_count_arg(hi_s, "--hi");
  psb::ExpSumSpec spec = build_exp_spec(f, lo, hi, parse_weight(weight));
  psb::ExpSumResult r = psb::exp_sum(spec, g.threads);
  if (g.format == "csv") {
    std::cout << "re,im,terms\n"
              << num(r.value.real()) << "," << num(r.value.imag()) << ","
              << r.terms << "\n";
    return 0;
  }
  emit_json(json{{"schema_version", psb::kSchemaVersion},
                 {"kind", "exp-sum"},
                 {"params", spec.params_json()},
                 {"re", r.value.real()},
                 {"im", r.value.imag()},
                 {"abs", std::abs(r.value)},
                 {"terms", r.terms}});
  return 0;
}

int run_expsum_vdc(const Global& g, const ExpPhaseFlags& f,
                   const std::vector<std::string>& Ns) {
  std::vector<psb::BoundRatio> rows;
  std::vector<std::string> labels;
  for (const auto& s : Ns) {
    uint64_t N = parse_count_arg(s, "--N");
    psb::ExpSumSpec spec = build_exp_spec(f, 0, 1, psb::WeightKind::Unit);
    rows.push_back(psb::vdc_ratio(spec, N, g.threads));
    labels.push_back(std::to_string(N));
  }
  return emit_ratios(g, rows, labels);
}

int run_expsum_type(const Global& g, int type, uint64_t K,
                    const std::vector<std::string>& Ns, uint64_t m,
                    const std::string& gamma, long h, uint64_t d,
                    const std::string& ak, const std::string& bl) {
  unsigned gn, gd;
  parse_gamma(gamma, gn, gd);
  std::vector<psb::BoundRatio> rows;
  std::vector<std::string> labels;
  for (const auto& s : Ns) {
    uint64_t N = parse_count_arg(s, "--N");
    uint64_t Kn = K;
    if (Kn == 0)
      Kn = static_cast<uint64_t>(std::pow(static_cast<double>(N),
                                          type == 1 ? 3.0 / 7.0 : 0.45));
    if (type == 1)
      rows.push_back(psb::type1_ratio(Kn, N, 2 * N, m, gn, gd, h, d,
                                      parse_coeff(ak), g.threads));
    else
      rows.push_back(psb::type2_ratio(Kn, N, 2 * N, m, gn, gd, h, d,
                                      parse_coeff(ak), parse_coeff(bl),
                                      g.threads));
    labels.push_back(std::to_string(N));
  }
  return emit_ratios(g, rows, labels);
}

int run_expsum_twisted(const Global& g, uint64_t q, uint64_t a,
                       const std::string& theta, long long k,
                       const std::vector<std::string>& Ms) {
  std::vector<psb::TwistedSum> rows;
  for (const auto& s : Ms)
    rows.push_back(psb::lambda_twisted(q, a, psb::RealSpec::parse(theta), k,
                                       parse_count_arg(s, "--M"), g.threads));
  if (g.format == "csv") {
    std::cout << "M,abs,exponent,terms\n";
    for (const auto& r : rows)
      std::cout << r.M << "," << num(std::abs(r.value)) << ","
                << num(r.exponent) << "," << r.terms << "\n";
    return 0;
  }
  if (rows.size() == 1) {
    emit_json(rows.front().to_json());
  } else {
    json arr = json::array();
    for (const auto& r : rows) arr.push_back(r.to_json());
    emit_json(json{{"schema_version", psb::kSchemaVersion},
                   {"reports", arr}});
  }
  return 0;
}

int run_expsum_prime_reduce(const Global& g, const std::string& theta,
                            const std::vector<std::string>& Ns, uint64_t N2) {
  std::vector<psb::BoundRatio> rows;
  std::vector<std::string> labels;
  for (const auto& s : Ns) {
    uint64_t N = parse_count_arg(s, "--N");
    rows.push_back(psb::prime_reduction_check(psb::RealSpec::parse(theta), N,
                                              N2 ? N2 : 2 * N, g.threads));
    labels.push_back(std::to_string(N));
  }
  return emit_ratios(g, rows, labels);
}

// ---------------------------------------------------------------- suite

int run_suite_cmd(const Global& g, const std::string& scale_s,
                  std::vector<int> ids) {
  psb::SuiteScale scale;
  if (scale_s == "full")
    scale = psb::SuiteScale::Full;
  else if (scale_s == "ci")
    scale = psb::SuiteScale::Ci;
  else
    throw psb::InvalidInput("--scale must be full|ci");

  psb::SuiteReport rep;
  rep.scale = scale;
  rep.threads = g.threads;
  for (const auto& entry : psb::acceptance_criteria()) {
    if (!ids.empty() &&
        std::find(ids.begin(), ids.end(), entry.id) == ids.end())
      continue;
    psb::CriterionResult r = entry.fn(scale, g.threads);
    std::fprintf(stderr, "[%s] %2d %-24s %8.0f ms  %s\n",
                 r.pass ? "PASS" : "FAIL", r.id, r.name.c_str(), r.elapsed_ms,
                 r.details.c_str());
    rep.all_pass = rep.all_pass && r.pass;
    rep.results.push_back(std::move(r));
  }
  if (rep.results.empty()) throw psb::InvalidInput("no matching criteria");

  if (g.format == "csv") {
    std::cout << "id,name,pass,elapsed_ms\n";
    for (const auto& r : rep.results)
      std::cout << r.id << "," << r.name << "," << (r.pass ? "true" : "false")
                << "," << num(r.elapsed_ms) << "\n";
  } else {
    emit_json(rep.to_json());
  }
  return rep.all_pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<std::string> args;
  try {
    args = expand_config(argc, argv);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }

  Global g;
  g.threads = env_threads();
  int rc = 0;

  CLI::App app{"Primes in Beatty and Piatetski-Shapiro sequences", "psb"};
  app.set_help_flag("--help", "Print help and exit");
  app.require_subcommand(1);
  // Keeps --h free for frequency parameters: no -h short flag anywhere.
  auto sub = [](CLI::App* parent, const std::string& name,
                const std::string& desc) {
    CLI::App* s = parent->add_subcommand(name, desc);
    s->set_help_flag("--help", "Print help and exit");
    s->fallthrough();
    return s;
  };
  app.add_option("--format", g.format, "Output format: json|csv")
      ->check(CLI::IsMember({"json", "csv"}));
  app.add_option("--threads", g.threads,
                 "Worker threads (0 = hardware; env PSB_THREADS)")
      ->check(CLI::Range(0, 512));
  app.set_version_flag("--version", std::string(psb::kVersion));

  // seq
  CLI::App* seq = sub(&app, "seq", "Emit sequence terms or members");
  seq->require_subcommand(1);
  struct {
    std::string alpha = "sqrt2", beta = "rat:0/1", c = "3/2";
    uint64_t terms = 0, max = 0;
  } sq;
  for (const char* kind : {"beatty", "ps", "intersection"}) {
    CLI::App* s = sub(seq, kind, std::string("The ") + kind + " sequence");
    if (std::string(kind) != "ps") {
      s->add_option("--alpha", sq.alpha, "Beatty slope (RealSpec)");
      s->add_option("--beta", sq.beta, "Beatty intercept (RealSpec)");
    }
    if (std::string(kind) != "beatty")
      s->add_option("--c", sq.c, "PS exponent p/q in (1,2)");
    if (std::string(kind) != "intersection")
      s->add_option("--terms", sq.terms, "Emit the first N terms");
    s->add_option("--max", sq.max, "Emit members <= max");
    std::string k = kind;
    s->callback([&, k] {
      rc = run_seq(g, k, sq.alpha, sq.beta, sq.c, sq.terms, sq.max);
    });
  }

  // count
  CLI::App* count = sub(&app, "count", "Prime counting reports");
  count->require_subcommand(1);
  struct {
    std::string alpha = "sqrt2", beta = "rat:0/1", c = "3/2";
    uint64_t d = 4, a = 1;
    std::vector<std::string> xs;
  } ct;
  for (const char* kind : {"ps", "beatty", "intersection", "ap"}) {
    CLI::App* s = sub(count, kind,
                      std::string("Primes counted in the ") + kind +
                          " setting");
    if (std::string(kind) == "beatty" || std::string(kind) == "intersection") {
      s->add_option("--alpha", ct.alpha, "Beatty slope (RealSpec)");
      s->add_option("--beta", ct.beta, "Beatty intercept (RealSpec)");
    }
    if (std::string(kind) != "beatty")
      s->add_option("--c", ct.c, "PS exponent p/q in (1,2)");
    if (std::string(kind) == "ap") {
      s->add_option("--d", ct.d, "AP modulus");
      s->add_option("--a", ct.a, "AP residue");
    }
    s->add_option("--x", ct.xs, "Count primes <= x (repeatable)")
        ->required()
        ->expected(-1);
    std::string k = kind;
    s->callback(
        [&, k] { rc = run_count(g, k, ct.alpha, ct.beta, ct.c, ct.d, ct.a,
                                ct.xs); });
  }

  // verify
  CLI::App* verify = sub(&app, "verify", "Pass/fail verification checks");
  verify->require_subcommand(1);
  struct {
    uint64_t max = 1000, grid = 10000, N = 1000, N2 = 0, M = 512;
    double U = 5, V = 10, a = 0.3, delta = 0.02;
    long H = 100, K = 200;
    long long k = 1;
    long h = 1;
    std::string alpha = "sqrt2", beta = "rat:3/10", c = "21/20";
    std::string theta = "sqrt2", mu = "rat:0/1";
    double bU = 0, bV = 0;
  } vf;
  {
    CLI::App* s = sub(verify, "vaughan", "Identity residual sweep");
    s->add_option("--max", vf.max, "Check every n in (U, max]");
    s->add_option("--U", vf.U, "Vaughan U");
    s->add_option("--V", vf.V, "Vaughan V");
    s->callback([&] { rc = run_verify_vaughan(g, vf.max, vf.U, vf.V); });
  }
  {
    CLI::App* s = sub(verify, "vaaler", "Majorant inequality on a grid");
    s->add_option("--H", vf.H, "Degree");
    s->add_option("--grid", vf.grid, "Grid points");
    s->callback([&] { rc = run_verify_vaaler(g, vf.H, vf.grid); });
  }
  {
    CLI::App* s = sub(verify, "vinogradov", "Indicator polynomial properties");
    s->add_option("--a", vf.a, "Interval length a in (0,1)");
    s->add_option("--delta", vf.delta, "Smoothing width");
    s->add_option("--K", vf.K, "Truncation degree");
    s->add_option("--grid", vf.grid, "Grid points");
    s->callback(
        [&] { rc = run_verify_vinogradov(g, vf.a, vf.delta, vf.K, vf.grid); });
  }
  {
    CLI::App* s = sub(verify, "bilinear", "Decomposition reassembles the direct sum");
    s->add_option("--N", vf.N, "Range start, sum over (N, N2]");
    s->add_option("--N2", vf.N2, "Range end (default 2N)");
    s->add_option("--k", vf.k, "Linear frequency");
    s->add_option("--h", vf.h, "Power frequency");
    s->add_option("--alpha", vf.alpha, "Beatty slope (RealSpec)");
    s->add_option("--beta", vf.beta, "Beatty intercept (RealSpec)");
    s->add_option("--c", vf.c, "PS exponent p/q in (1,2)");
    s->add_option("--U", vf.bU, "Vaughan U (default N^{1/7})");
    s->add_option("--V", vf.bV, "Vaughan V (default N^{3/7})");
    s->callback([&] {
      rc = run_verify_bilinear(g, vf.N, vf.N2, vf.k, vf.h, vf.alpha, vf.beta,
                               vf.c, vf.bU, vf.bV);
    });
  }
  {
    CLI::App* s = sub(verify, "discrepancy", "Exact value inside [D*, 2D*]");
    s->add_option("--theta", vf.theta, "Rotation (RealSpec)");
    s->add_option("--mu", vf.mu, "Offset (RealSpec)");
    s->add_option("--M", vf.M, "Point count");
    s->callback(
        [&] { rc = run_verify_discrepancy(g, vf.theta, vf.mu, vf.M); });
  }

  // discrepancy
  CLI::App* disc = sub(&app, "discrepancy", "Discrepancy data");
  disc->require_subcommand(1);
  struct {
    std::string theta = "golden", mu = "rat:0/1";
    uint64_t M = 512;
    std::vector<std::string> Ms;
  } dc;
  {
    CLI::App* s = sub(disc, "exact", "Exact star discrepancy");
    s->add_option("--theta", dc.theta, "Rotation (RealSpec)");
    s->add_option("--mu", dc.mu, "Offset (RealSpec)");
    s->add_option("--M", dc.M, "Point count");
    s->callback([&] { rc = run_disc_exact(g, dc.theta, dc.mu, dc.M); });
  }
  {
    CLI::App* s = sub(disc, "profile", "Bound profile over several M");
    s->add_option("--theta", dc.theta, "Rotation (RealSpec)");
    s->add_option("--mu", dc.mu, "Offset (RealSpec)");
    s->add_option("--M", dc.Ms, "Point counts (repeatable)")
        ->required()
        ->expected(-1);
    s->callback([&] { rc = run_disc_profile(g, dc.theta, dc.mu, dc.Ms); });
  }

  // harmonic
  CLI::App* harm = sub(&app, "harmonic", "Coefficient tables");
  harm->require_subcommand(1);
  struct {
    long H = 10, K = 200;
    double a = 0.3, delta = 0.02;
  } hm;
  {
    CLI::App* s = sub(harm, "vaaler", "Majorant coefficients");
    s->add_option("--H", hm.H, "Degree");
    s->callback([&] { rc = run_harmonic_vaaler(g, hm.H); });
  }
  {
    CLI::App* s = sub(harm, "vinogradov", "Indicator coefficients");
    s->add_option("--a", hm.a, "Interval length a in (0,1)");
    s->add_option("--delta", hm.delta, "Smoothing width");
    s->add_option("--K", hm.K, "Truncation degree");
    s->callback([&] { rc = run_harmonic_vinogradov(g, hm.a, hm.delta, hm.K); });
  }

  // vaughan
  CLI::App* vgh = sub(&app, "vaughan", "Identity decomposition data");
  vgh->require_subcommand(1);
  struct {
    uint64_t n = 100, N = 1000, N2 = 0, max = 1000;
    double U = 5, V = 10, bU = 0, bV = 0;
    long long k = 1;
    long h = 1;
    std::string alpha = "sqrt2", beta = "rat:3/10", c = "21/20";
  } vg;
  {
    CLI::App* s = sub(vgh, "terms", "T1, T2, T3 for one n");
    s->add_option("--n", vg.n, "Argument");
    s->add_option("--U", vg.U, "Vaughan U");
    s->add_option("--V", vg.V, "Vaughan V");
    s->callback([&] { rc = run_vaughan_terms(g, vg.n, vg.U, vg.V); });
  }
  {
    CLI::App* s = sub(vgh, "split", "Bilinear decomposition S1..S5");
    s->add_option("--N", vg.N, "Range start, sum over (N, N2]");
    s->add_option("--N2", vg.N2, "Range end (default 2N)");
    s->add_option("--k", vg.k, "Linear frequency");
    s->add_option("--h", vg.h, "Power frequency");
    s->add_option("--alpha", vg.alpha, "Beatty slope (RealSpec)");
    s->add_option("--beta", vg.beta, "Beatty intercept (RealSpec)");
    s->add_option("--c", vg.c, "PS exponent p/q in (1,2)");
    s->add_option("--U", vg.bU, "Vaughan U (default N^{1/7})");
    s->add_option("--V", vg.bV, "Vaughan V (default N^{3/7})");
    s->callback([&] {
      rc = run_vaughan_split(g, vg.N, vg.N2, vg.k, vg.h, vg.alpha, vg.beta,
                             vg.c, vg.bU, vg.bV);
    });
  }
  {
    CLI::App* s = sub(vgh, "verify", "Identity residual sweep");
    s->add_option("--max", vg.max, "Check every n in (U, max]");
    s->add_option("--U", vg.U, "Vaughan U");
    s->add_option("--V", vg.V, "Vaughan V");
    s->callback([&] { rc = run_verify_vaughan(g, vg.max, vg.U, vg.V); });
  }

  // expsum
  CLI::App* exps = sub(&app, "expsum", "Exponential sums and bounds");
  exps->require_subcommand(1);
  ExpPhaseFlags ef;
  struct {
    std::string lo = "0", hi = "1000", weight = "unit";
    std::vector<std::string> Ns, Ms;
    uint64_t K = 0, m = 1, d = 1, q = 1, a = 0, N2 = 0;
    long h = 1;
    long long k = 1;
    std::string gamma = "12/13", ak = "unit", bl = "unit";
    std::string theta = "sqrt2";
  } ex;
  auto add_phase_flags = [&](CLI::App* s, bool with_range) {
    s->add_option("--phase", ef.phase, "linear|quadratic|power|mixed");
    s->add_option("--theta", ef.theta, "Linear/quadratic coefficient");
    s->add_option("--h", ef.h, "Power multiplier");
    s->add_option("--scale", ef.scale, "Extra rational factor (power)");
    s->add_option("--gamma", ef.gamma, "Power exponent p/q in (0,1)");
    s->add_option("--k", ef.k, "Linear multiplier (mixed)");
    s->add_option("--alpha", ef.alpha, "Beatty slope (mixed)");
    s->add_option("--beta", ef.beta, "Beatty intercept (mixed)");
    if (with_range) {
      s->add_option("--lo", ex.lo, "Sum over (lo, hi]");
      s->add_option("--hi", ex.hi, "Sum over (lo, hi]");
      s->add_option("--weight", ex.weight, "unit|lambda|mobius|log");
    }
  };
  {
    CLI::App* s = sub(exps, "eval", "Evaluate one sum directly");
    ef.beta = "rat:0/1";
    add_phase_flags(s, true);
    s->callback([&] { rc = run_expsum_eval(g, ef, ex.lo, ex.hi, ex.weight); });
  }
  {
    CLI::App* s = sub(exps, "vdc", "Second-derivative bound ratio");
    add_phase_flags(s, false);
    s->add_option("--N", ex.Ns, "Range starts, sums over (N, 2N]")
        ->required()
        ->expected(-1);
    s->callback([&] { rc = run_expsum_vdc(g, ef, ex.Ns); });
  }
  for (int type : {1, 2}) {
    CLI::App* s = sub(exps, type == 1 ? "type1" : "type2",
                      type == 1 ? "Type I bilinear bound ratio"
                                : "Type II bilinear bound ratio");
    s->add_option("--K", ex.K, "Outer range start (0 = canonical)");
    s->add_option("--N", ex.Ns, "Range starts (repeatable)")
        ->required()
        ->expected(-1);
    s->add_option("--m", ex.m, "Frequency multiplier");
    s->add_option("--gamma", ex.gamma, "Power exponent p/q in (0,1)");
    s->add_option("--h", ex.h, "Rational frequency numerator");
    s->add_option("--d", ex.d, "Rational frequency denominator");
    s->add_option("--coeff-k", ex.ak, "Outer coefficients");
    if (type == 2) s->add_option("--coeff-l", ex.bl, "Inner coefficients");
    s->callback([&, type] {
      rc = run_expsum_type(g, type, ex.K, ex.Ns, ex.m, ex.gamma, ex.h, ex.d,
                           ex.ak, type == 2 ? ex.bl : "unit");
    });
  }
  {
    CLI::App* s = sub(exps, "twisted", "Lambda sum along an AP with a twist");
    s->add_option("--q", ex.q, "AP modulus");
    s->add_option("--a", ex.a, "AP residue");
    s->add_option("--theta", ex.theta, "Twist rotation (RealSpec)");
    s->add_option("--k", ex.k, "Twist frequency");
    s->add_option("--M", ex.Ms, "Term counts (repeatable)")
        ->required()
        ->expected(-1);
    s->callback(
        [&] { rc = run_expsum_twisted(g, ex.q, ex.a, ex.theta, ex.k, ex.Ms); });
  }
  {
    CLI::App* s = sub(exps, "prime-reduce", "Prime sum vs Lambda grid maximum");
    s->add_option("--theta", ex.theta, "Rotation (RealSpec)");
    s->add_option("--N", ex.Ns, "Range starts, sums over (N, N2]")
        ->required()
        ->expected(-1);
    s->add_option("--N2", ex.N2, "Range end (default 2N)");
    s->callback(
        [&] { rc = run_expsum_prime_reduce(g, ex.theta, ex.Ns, ex.N2); });
  }

  // suite
  CLI::App* suite = sub(&app, "suite", "Run the acceptance battery");
  struct {
    std::string scale = "full";
    std::vector<int> ids;
  } su;
  suite->add_option("--scale", su.scale, "full|ci")
      ->check(CLI::IsMember({"full", "ci"}));
  suite->add_option("--criteria", su.ids, "Criterion ids to run (default all)")
      ->expected(-1);
  suite->callback([&] { rc = run_suite_cmd(g, su.scale, su.ids); });

  try {
    std::reverse(args.begin(), args.end());
    app.parse(std::move(args));
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const psb::PrecisionExhausted& e) {
    std::cerr << "error: precision exhausted: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return rc;
}
