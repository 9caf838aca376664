#include "relscat/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "parallel.hpp"
#include "relscat/bk.hpp"
#include "relscat/formsphere.hpp"
#include "relscat/hodgealg.hpp"
#include "relscat/mie.hpp"
#include "relscat/specfun.hpp"
#include "relscat/zeros.hpp"

namespace relscat::cli {

namespace {

using nlohmann::json;

constexpr const char* kSynopsis =
    "usage: relscat [--threads N] [--config FILE] [--out PATH] [--format csv|json] <subcommand> [options]\n"
    "subcommands: specfun, zeros, harmonics verify, tstar verify, phases, eigenvalues, bk-channel, bk-full\n"
    "run 'relscat <subcommand> --help' for the options of one subcommand\n";

class UsageError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Non-finite doubles become strings so the JSON stays valid.
json num(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

struct Globals {
  int threads = 1;
  std::string out;
  std::string format;
  std::string config;
};

json envelope(const std::string& subcommand, const json& config) {
  json j;
  j["schema"] = 1;
  j["tool"] = {{"name", kToolName}, {"version", kVersion}};
  j["subcommand"] = subcommand;
  j["config"] = config;
  return j;
}

class Csv {
public:
  Csv(const json& config, std::vector<std::string> header) : header_(std::move(header)) {
    os_ << "# " << kToolName << " " << kVersion << "\n";
    os_ << "# schema: 1\n";
    os_ << "# config: " << config.dump() << "\n";
  }
  void comment(const std::string& line) { os_ << "# " << line << "\n"; }
  void row(const std::vector<std::string>& cells) {
    if (!header_written_) {
      write_line(header_);
      header_written_ = true;
    }
    write_line(cells);
  }
  std::string str() {
    if (!header_written_) {
      write_line(header_);
      header_written_ = true;
    }
    return os_.str();
  }

private:
  void write_line(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) os_ << (i ? "," : "") << cells[i];
    os_ << "\n";
  }
  std::vector<std::string> header_;
  std::ostringstream os_;
  bool header_written_ = false;
};

std::vector<double> parse_list(const std::string& text, const char* what) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      while (used < item.size() && std::isspace(static_cast<unsigned char>(item[used]))) ++used;
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw UsageError(std::string("bad number '") + item + "' in " + what);
    }
  }
  if (out.empty()) throw UsageError(std::string("empty list for ") + what);
  return out;
}

json list_json(const std::vector<double>& v) {
  json j = json::array();
  for (double x : v) j.push_back(num(x));
  return j;
}

// Test-function options shared by the bk subcommands.
struct TestFunctionOpts {
  double sigma = 1.0;
  std::string coeffs = "1";
  double amplitude = 1.0;

  void attach(CLI::App* app) {
    app->add_option("--sigma", sigma, "Gaussian width")->capture_default_str();
    app->add_option("--coeffs", coeffs, "even polynomial prefactor c0,c1,... in lambda^2")->capture_default_str();
    app->add_option("--amplitude", amplitude, "overall factor (0 gives f = 0)")->capture_default_str();
  }
  TestFunction build() const {
    try {
      return TestFunction::gaussian(sigma, parse_list(coeffs, "--coeffs"), amplitude);
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
  }
  json echo() const {
    return {{"sigma", num(sigma)}, {"coeffs", list_json(parse_list(coeffs, "--coeffs"))}, {"amplitude", num(amplitude)}};
  }
};

// ---------------------------------------------------------------------------

struct SpecfunOpts {
  int dim = 3;
  int lmin = 0;
  int lmax = 3;
  double xmin = 0.1;
  double xmax = 10.0;
  int n = 100;
};

std::string run_specfun(const SpecfunOpts& o, const std::string& format) {
  if (o.lmin < 0 || o.lmax < o.lmin) throw UsageError("specfun: need 0 <= lmin <= lmax");
  if (!(o.xmin > 0.0) || !(o.xmax >= o.xmin)) throw UsageError("specfun: need 0 < xmin <= xmax");
  if (o.n < 1) throw UsageError("specfun: --n must be >= 1");
  if (o.dim < 3 || o.dim % 2 == 0) throw UsageError("specfun: --dim must be odd and >= 3");

  const json config = {{"dim", o.dim}, {"lmin", o.lmin}, {"lmax", o.lmax}, {"xmin", num(o.xmin)},
                       {"xmax", num(o.xmax)}, {"n", o.n},     {"format", format}};
  Csv csv(config, {"l", "x", "j", "y", "h1_re", "h1_im"});
  json rows = json::array();
  for (int l = o.lmin; l <= o.lmax; ++l) {
    const RadialOrder order(o.dim, l);
    for (int i = 0; i < o.n; ++i) {
      const double x = o.n == 1 ? o.xmin : o.xmin + (o.xmax - o.xmin) * i / (o.n - 1);
      const double j = j_dl(order, x);
      const double y = y_dl(order, x);
      const std::complex<double> h = hankel1_dl(order, x);
      csv.row({std::to_string(l), fmt(x), fmt(j), fmt(y), fmt(h.real()), fmt(h.imag())});
      rows.push_back({{"l", l}, {"x", num(x)}, {"j", num(j)}, {"y", num(y)}, {"h1_re", num(h.real())},
                      {"h1_im", num(h.imag())}});
    }
  }
  if (format == "csv") return csv.str();
  json out = envelope("specfun", config);
  out["provenance"] = {{"j", "riccati-recurrence"}, {"y", "riccati-recurrence"}, {"h1", "closed-form-sum"}};
  out["result"] = {{"rows", rows}};
  return out.dump(2) + "\n";
}

struct ZerosOpts {
  std::string kind = "psi";
  int l = 1;
  double max = 20.0;
  double scale = 1.0;
};

std::string run_zeros(const ZerosOpts& o, const std::string& format) {
  if (o.kind != "psi" && o.kind != "dpsi") throw UsageError("zeros: --kind must be psi or dpsi");
  if (o.l < 0) throw UsageError("zeros: --l must be >= 0");
  if (!(o.max > 0.0) || !(o.scale > 0.0)) throw UsageError("zeros: --max and --scale must be positive");

  const ZeroTarget target = o.kind == "psi" ? riccati_psi_target(o.l, o.scale) : riccati_dpsi_target(o.l, o.scale);
  const ZeroList z = find_zeros(target, 0.0, o.max, 0.25 / o.scale);
  const json config = {{"kind", o.kind}, {"l", o.l}, {"max", num(o.max)}, {"scale", num(o.scale)}, {"format", format}};

  if (format == "csv") {
    Csv csv(config, {"l", "index", "x"});
    for (double a : z.anomalies) csv.comment("anomaly near " + fmt(a));
    for (std::size_t k = 0; k < z.values.size(); ++k) csv.row({std::to_string(o.l), std::to_string(k + 1), fmt(z.values[k])});
    return csv.str();
  }
  json out = envelope("zeros", config);
  out["provenance"] = {{"zeros", "grid-bracketing+bisection"}};
  out["result"] = {{"target", z.target}, {"tolerance", num(z.tolerance)}, {"zeros", list_json(z.values)},
                   {"anomalies", list_json(z.anomalies)}};
  return out.dump(2) + "\n";
}

struct HarmonicsOpts {
  int dmin = 2;
  int dmax = 5;
  int lmin = 0;
  int lmax = 8;
};

std::string run_harmonics(const HarmonicsOpts& o, const std::string& format, int threads, bool& passed) {
  if (o.dmin < 2 || o.dmax < o.dmin || o.dmax > 8) throw UsageError("harmonics: need 2 <= dmin <= dmax <= 8");
  if (o.lmin < 0 || o.lmax < o.lmin) throw UsageError("harmonics: need 0 <= lmin <= lmax");

  struct Cell {
    int d;
    int l;
    std::vector<DegreeShiftReport> reports;
  };
  std::vector<Cell> cells;
  for (int d = o.dmin; d <= o.dmax; ++d)
    for (int l = o.lmin; l <= o.lmax; ++l) cells.push_back({d, l, {}});
  const auto errors = detail::parallel_for(cells.size(), threads, [&](std::size_t i) {
    Cell& c = cells[i];
    const std::vector<Polynomial> basis = harmonic_basis(c.d, c.l);
    for (int p = 0; p <= c.d; ++p) c.reports.push_back(degree_shift_check(c.d, p, c.l, basis));
  });
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);

  const json config = {{"dmin", o.dmin}, {"dmax", o.dmax}, {"lmin", o.lmin}, {"lmax", o.lmax}, {"format", format}};
  passed = true;
  Csv csv(config, {"d", "p", "l", "harmonic_dim", "basis_size", "degrees", "reassembly_exact", "components_harmonic", "passed"});
  json list = json::array();
  for (const auto& c : cells)
    for (const auto& r : c.reports) {
      passed = passed && r.passed;
      std::string degrees;
      for (int k : r.occurring_degrees) degrees += (degrees.empty() ? "" : " ") + std::to_string(k);
      csv.row({std::to_string(r.dim), std::to_string(r.p), std::to_string(r.degree), std::to_string(r.harmonic_dim),
               std::to_string(r.basis_size), degrees, r.reassembly_exact ? "1" : "0", r.components_harmonic ? "1" : "0",
               r.passed ? "1" : "0"});
      json cell = {{"d", r.dim},
                   {"p", r.p},
                   {"l", r.degree},
                   {"harmonic_dim", r.harmonic_dim},
                   {"basis_size", r.basis_size},
                   {"occurring_degrees", std::vector<int>(r.occurring_degrees.begin(), r.occurring_degrees.end())},
                   {"reassembly_exact", r.reassembly_exact},
                   {"components_harmonic", r.components_harmonic},
                   {"passed", r.passed}};
      if (!r.failure.empty()) cell["failure"] = r.failure;
      list.push_back(cell);
    }
  if (format == "csv") return csv.str();
  json out = envelope("harmonics verify", config);
  out["provenance"] = {{"arithmetic", "exact-rational"}};
  out["result"] = {{"cells", list}, {"cells_checked", list.size()}, {"all_pass", passed}};
  return out.dump(2) + "\n";
}

struct TstarOpts {
  int seeds = 100;
  int max_dim = 64;
  std::uint64_t first_seed = 0;
};

std::string run_tstar(const TstarOpts& o, const std::string& format, int threads, bool& passed) {
  if (o.seeds < 1) throw UsageError("tstar: --seeds must be >= 1");
  if (o.max_dim < 2 || o.max_dim > 64) throw UsageError("tstar: --max-dim must be in [2, 64]");

  struct Item {
    int n1 = 0;
    int n2 = 0;
    TStarReport r;
    bool ok = false;
  };
  std::vector<Item> items(o.seeds);
  const auto errors = detail::parallel_for(items.size(), threads, [&](std::size_t i) {
    const NilpotentModel m = random_model(o.first_seed + i, o.max_dim);
    items[i].n1 = m.n1;
    items[i].n2 = m.n2;
    items[i].r = verify_tstar(m);
    items[i].ok = items[i].r.within_contract(1e-11, 1e-11, 1e-12);
  });
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);

  const json config = {{"seeds", o.seeds}, {"max_dim", o.max_dim}, {"first_seed", o.first_seed}, {"format", format}};
  passed = true;
  Csv csv(config, {"seed", "n1", "n2", "t_norm_sq", "self_adjoint", "square", "nilpotency", "commutator", "norm_tt_star",
                   "norm_t_star_t", "spectrum", "passed"});
  json list = json::array();
  double worst_rel = 0.0;
  double worst_comm = 0.0;
  double worst_norm = 0.0;
  for (std::size_t i = 0; i < items.size(); ++i) {
    const auto& it = items[i];
    const auto& r = it.r;
    passed = passed && it.ok;
    const double scale = std::max(r.t_norm_sq, 1e-300);
    worst_rel = std::max({worst_rel, r.self_adjoint_residual / scale, r.square_residual / scale});
    worst_comm = std::max(worst_comm, r.resolvent_commutator);
    worst_norm = std::max({worst_norm, r.norm_tt_star, r.norm_t_star_t});
    const std::uint64_t seed = o.first_seed + i;
    csv.row({std::to_string(seed), std::to_string(it.n1), std::to_string(it.n2), fmt(r.t_norm_sq),
             fmt(r.self_adjoint_residual), fmt(r.square_residual), fmt(r.nilpotency_residual),
             fmt(r.resolvent_commutator), fmt(r.norm_tt_star), fmt(r.norm_t_star_t), fmt(r.spectrum_residual),
             it.ok ? "1" : "0"});
    list.push_back({{"seed", seed},
                    {"n1", it.n1},
                    {"n2", it.n2},
                    {"t_norm_sq", num(r.t_norm_sq)},
                    {"self_adjoint_residual", num(r.self_adjoint_residual)},
                    {"square_residual", num(r.square_residual)},
                    {"nilpotency_residual", num(r.nilpotency_residual)},
                    {"resolvent_commutator", num(r.resolvent_commutator)},
                    {"norm_tt_star", num(r.norm_tt_star)},
                    {"norm_t_star_t", num(r.norm_t_star_t)},
                    {"spectrum_residual", num(r.spectrum_residual)},
                    {"passed", it.ok}});
  }
  if (format == "csv") return csv.str();
  json out = envelope("tstar verify", config);
  out["provenance"] = {{"models", "mt19937_64 seeded, Haar frame"}, {"norms", "jacobi-svd"}};
  out["result"] = {{"models", list},
                   {"worst_relative_residual", num(worst_rel)},
                   {"worst_commutator", num(worst_comm)},
                   {"worst_norm", num(worst_norm)},
                   {"tolerances", {{"relative", 1e-11}, {"commutator", 1e-11}, {"norm_slack", 1e-12}}},
                   {"all_pass", passed}};
  return out.dump(2) + "\n";
}

struct PhasesOpts {
  int p = 1;
  double a = 1.0;
  int lmin = 0;
  int lmax = 10;
  double lambda_max = 20.0;
  int n = 200;
  std::string pol = "all";
};

std::string run_phases(const PhasesOpts& o, const std::string& format, int threads) {
  if (o.p != 0 && o.p != 1) throw UsageError("phases: --p must be 0 or 1");
  if (!(o.a > 0.0) || !(o.lambda_max > 0.0)) throw UsageError("phases: --a and --lambda-max must be positive");
  if (o.lmin < 0 || o.lmax < o.lmin) throw UsageError("phases: need 0 <= lmin <= lmax");
  if (o.n < 1) throw UsageError("phases: --n must be >= 1");

  std::vector<Polarization> pols;
  if (o.pol == "all") {
    if (o.p == 0)
      pols = {Polarization::Dirichlet};
    else
      pols = {Polarization::Dirichlet, Polarization::TM, Polarization::Normal};
  } else {
    try {
      pols = {parse_polarization(o.pol)};
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
  }
  std::vector<Channel> channels;
  for (Polarization pol : pols)
    for (int l = o.lmin; l <= o.lmax; ++l) {
      if (o.p == 1 && pol != Polarization::Normal && l < 1) continue;
      try {
        channels.push_back(make_channel(o.p, l, pol, o.a));
      } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
      }
    }

  std::vector<double> grid(o.n);
  for (int i = 0; i < o.n; ++i) grid[i] = o.lambda_max * (i + 1) / o.n;
  std::vector<PhaseShiftCurve> curves(channels.size());
  const auto errors = detail::parallel_for(channels.size(), threads,
                                           [&](std::size_t i) { curves[i] = trace_phase_shift(channels[i], grid); });
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);

  const json config = {{"p", o.p},       {"a", num(o.a)},  {"lmin", o.lmin},  {"lmax", o.lmax},
                       {"lambda_max", num(o.lambda_max)}, {"n", o.n}, {"pol", o.pol}, {"format", format}};
  Csv csv(config, {"channel", "pol", "l", "lambda", "delta", "ddelta", "re_s", "im_s"});
  json list = json::array();
  for (const auto& curve : curves) {
    json samples = json::array();
    for (const auto& s : curve.samples) {
      const std::complex<double> S = s_value(curve.channel, s.lambda);
      csv.row({curve.channel.label(), to_string(curve.channel.pol), std::to_string(curve.channel.degree), fmt(s.lambda),
               fmt(s.delta), fmt(s.derivative), fmt(S.real()), fmt(S.imag())});
      samples.push_back({num(s.lambda), num(s.delta), num(s.derivative), num(S.real()), num(S.imag())});
    }
    list.push_back({{"channel", curve.channel.label()},
                    {"pol", to_string(curve.channel.pol)},
                    {"l", curve.channel.degree},
                    {"multiplicity", curve.channel.multiplicity},
                    {"columns", {"lambda", "delta", "ddelta", "re_s", "im_s"}},
                    {"samples", samples}});
  }
  if (format == "csv") return csv.str();
  json out = envelope("phases", config);
  out["provenance"] = {{"delta", "unwrapped-from-zero"}, {"ddelta", "wronskian-closed-form"}, {"s", "riccati-ratio"}};
  out["result"] = {{"curves", list}};
  return out.dump(2) + "\n";
}

struct EigenOpts {
  std::string family = "maxwell-te";
  double a = 1.0;
  double max = 30.0;
};

std::string run_eigenvalues(const EigenOpts& o, const std::string& format) {
  CavityFamily fam;
  try {
    fam = parse_cavity_family(o.family);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  if (!(o.a > 0.0) || !(o.max > 0.0)) throw UsageError("eigenvalues: --a and --max must be positive");
  const InteriorSpectrum sp = interior_eigenvalues(fam, o.a, o.max);

  const json config = {{"family", to_string(fam)}, {"a", num(o.a)}, {"max", num(o.max)}, {"format", format}};
  Csv csv(config, {"l", "mu", "mult"});
  json list = json::array();
  for (const auto& m : sp.modes) {
    csv.row({std::to_string(m.degree), fmt(m.mu), std::to_string(m.multiplicity)});
    list.push_back({{"l", m.degree}, {"mu", num(m.mu)}, {"mult", m.multiplicity}});
  }
  if (format == "csv") return csv.str();
  json out = envelope("eigenvalues", config);
  out["provenance"] = {{"mu", "riccati-zeros, interlacing-checked"}};
  out["result"] = {{"modes", list}, {"count", list.size()}};
  return out.dump(2) + "\n";
}

json oracle_json(const OracleResult& o) {
  std::vector<std::size_t> ec(o.exterior_counts.begin(), o.exterior_counts.end());
  std::vector<std::size_t> fc(o.free_counts.begin(), o.free_counts.end());
  return {{"value", num(o.value)},
          {"error_estimate", num(o.error_estimate)},
          {"source", "box-oracle"},
          {"box_radii", list_json(o.box_radii)},
          {"raw", list_json(o.raw)},
          {"exterior_counts", ec},
          {"free_counts", fc},
          {"monotone", o.monotone}};
}

struct BkChannelOpts {
  std::string pol = "dirichlet";
  int l = 0;
  int p = -1;
  double a = 1.0;
  std::string boxes = "100,200,400";
  TestFunctionOpts tf;
};

std::string run_bk_channel(const BkChannelOpts& o, const std::string& format, bool& passed) {
  Polarization pol;
  try {
    pol = parse_polarization(o.pol);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  int p = o.p;
  if (p < 0) p = (pol == Polarization::Dirichlet && o.pol != "te") ? 0 : 1;
  if (!(o.a > 0.0)) throw UsageError("bk-channel: --a must be positive");
  Channel c;
  try {
    c = make_channel(p, o.l, pol, o.a);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  std::vector<double> boxes = parse_list(o.boxes, "--boxes");
  for (double& b : boxes) b *= o.a;
  const TestFunction f = o.tf.build();

  json config = {{"pol", o.pol}, {"l", o.l}, {"p", p}, {"a", num(o.a)}, {"boxes", list_json(parse_list(o.boxes, "--boxes"))},
                 {"test_function", o.tf.echo()}, {"format", format}};

  double rhs = 0.0;
  OracleResult lhs;
  try {
    rhs = rhs_channel_integral(c, f);
    lhs = lhs_oracle_channel(c, f, boxes);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  const double residual = std::fabs(lhs.value - rhs);
  const double tolerance = std::max(1e-3 * std::fabs(rhs), 1e-5);
  passed = residual <= tolerance;

  if (format == "csv") {
    Csv csv(config, {"channel", "multiplicity", "lhs", "lhs_error", "rhs", "residual", "tolerance", "passed"});
    csv.row({c.label(), std::to_string(c.multiplicity), fmt(lhs.value), fmt(lhs.error_estimate), fmt(rhs), fmt(residual),
             fmt(tolerance), passed ? "1" : "0"});
    return csv.str();
  }
  json out = envelope("bk-channel", config);
  out["provenance"] = {{"lhs", "box-oracle, Richardson in 1/L"}, {"rhs", "phase-integral, closed-form delta'"}};
  out["result"] = {{"channel", c.label()},
                   {"multiplicity", c.multiplicity},
                   {"lhs", oracle_json(lhs)},
                   {"rhs", {{"value", num(rhs)}, {"source", "phase-integral"}}},
                   {"residual", num(residual)},
                   {"tolerance", num(tolerance)},
                   {"passed", passed},
                   {"diagnostics",
                    {{"integration_limit", num(f.integration_limit())},
                     {"test_function", f.describe()},
                     {"multiplicity_applied", false}}}};
  return out.dump(2) + "\n";
}

struct BkFullOpts {
  std::string mode = "forms";
  int p = 1;
  std::string q = "delta-d";
  double a = 1.0;
  double tail_tol = 1e-6;
  std::string boxes = "100,200,400";
  std::optional<int> lmax;
  std::string rows;
  TestFunctionOpts tf;
};

json report_json(const BKReport& r) {
  json rows = json::array();
  for (const auto& row : r.rows)
    rows.push_back({{"channel", row.channel.label()},
                    {"pol", to_string(row.channel.pol)},
                    {"l", row.channel.degree},
                    {"multiplicity", row.channel.multiplicity},
                    {"rhs", {{"value", num(row.integral)}, {"source", "phase-integral"}}},
                    {"lhs", oracle_json(row.oracle)},
                    {"residual", num(row.residual)},
                    {"tolerance", num(row.tolerance)},
                    {"passed", row.passed}});
  json interior = json::array();
  for (const auto& term : r.interior) {
    json modes = json::array();
    for (const auto& m : term.spectrum.modes) modes.push_back({{"l", m.degree}, {"mu", num(m.mu)}, {"mult", m.multiplicity}});
    interior.push_back({{"family", to_string(term.spectrum.family)},
                        {"cutoff", num(term.spectrum.cutoff)},
                        {"sum", num(term.sum)},
                        {"source", "cavity-zeros"},
                        {"modes", modes}});
  }
  json j = {{"mode", r.mode},
            {"p", r.p},
            {"q", to_string(r.q)},
            {"a", num(r.radius)},
            {"test_function", r.test_function},
            {"tail_tol", num(r.tail_tol)},
            {"lmax", r.lmax},
            {"lmax_overridden", r.lmax_overridden},
            {"support", num(r.support)},
            {"integration_limit", num(r.integration_limit)},
            {"box_radii", list_json(r.box_radii)},
            {"lhs_exterior", {{"value", num(r.lhs_exterior)}, {"error_estimate", num(r.lhs_error)}, {"source", "box-oracle"}}},
            {"rhs_scattering", {{"value", num(r.rhs_scattering)}, {"source", "phase-integral"}}},
            {"tail_bound", num(r.tail_bound)},
            {"interior", interior},
            {"interior_sum", num(r.interior_sum)},
            {"interior_note", r.interior_note},
            {"lhs_total", num(r.lhs_total)},
            {"rhs_total", num(r.rhs_total)},
            {"scattering_residual", num(r.scattering_residual)},
            {"residual", num(r.residual)},
            {"tolerance", num(r.tolerance)},
            {"passed", r.passed},
            {"channels", rows}};
  if (!r.failure.empty()) j["failure"] = r.failure;
  return j;
}

std::string report_csv(const BKReport& r, const json& config) {
  Csv csv(config, {"channel", "pol", "l", "multiplicity", "rhs", "lhs", "lhs_error", "residual", "tolerance", "monotone",
                   "passed"});
  csv.comment("lhs_exterior " + fmt(r.lhs_exterior) + " rhs_scattering " + fmt(r.rhs_scattering) + " residual " +
              fmt(r.scattering_residual));
  for (const auto& row : r.rows)
    csv.row({row.channel.label(), to_string(row.channel.pol), std::to_string(row.channel.degree),
             std::to_string(row.channel.multiplicity), fmt(row.integral), fmt(row.oracle.value),
             fmt(row.oracle.error_estimate), fmt(row.residual), fmt(row.tolerance), row.oracle.monotone ? "1" : "0",
             row.passed ? "1" : "0"});
  return csv.str();
}

std::string run_bk_full(const BkFullOpts& o, const std::string& format, int threads, const std::string& out_path,
                        bool& passed) {
  if (o.mode != "forms" && o.mode != "maxwell") throw UsageError("bk-full: --mode must be forms or maxwell");
  Operator q;
  try {
    q = parse_operator(o.q);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  if (o.p != 0 && o.p != 1) throw UsageError("bk-full: --p must be 0 or 1");
  if (o.mode == "maxwell" && (o.p != 1 || q != Operator::DeltaD))
    throw UsageError("bk-full: maxwell mode is the p = 1, delta-d identity");
  if (!(o.a > 0.0)) throw UsageError("bk-full: --a must be positive");
  if (!(o.tail_tol > 0.0)) throw UsageError("bk-full: --tail-tol must be positive");
  if (o.lmax && *o.lmax < 0) throw UsageError("bk-full: --lmax must be >= 0");
  std::vector<double> boxes = parse_list(o.boxes, "--boxes");
  for (double& b : boxes) b *= o.a;
  const TestFunction f = o.tf.build();

  json config = {{"mode", o.mode},
                 {"p", o.p},
                 {"q", to_string(q)},
                 {"a", num(o.a)},
                 {"tail_tol", num(o.tail_tol)},
                 {"boxes", list_json(parse_list(o.boxes, "--boxes"))},
                 {"lmax", o.lmax ? json(*o.lmax) : json(nullptr)},
                 {"test_function", o.tf.echo()},
                 {"threads", threads},
                 {"format", format}};

  BKOptions opts;
  opts.lmax = o.lmax;
  opts.threads = threads;
  BKReport r;
  try {
    r = o.mode == "maxwell" ? theorem_b2_check(o.a, f, o.tail_tol, boxes, opts)
                            : theorem_main_check(o.p, q, o.a, f, o.tail_tol, boxes, opts);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  passed = r.passed;

  std::string rows_path = o.rows;
  if (rows_path.empty() && !out_path.empty() && format == "json") rows_path = out_path + ".channels.csv";
  if (!rows_path.empty()) {
    std::ofstream rows(rows_path, std::ios::binary);
    if (!rows) throw std::runtime_error("cannot open " + rows_path);
    rows << report_csv(r, config);
  }
  if (format == "csv") return report_csv(r, config);
  json out = envelope("bk-full", config);
  out["provenance"] = {{"lhs_exterior", "box-oracle, Richardson in 1/L"},
                       {"rhs_scattering", "phase-integral, closed-form delta'"},
                       {"interior", "cavity-zeros, same sum on both sides"},
                       {"tail_bound", "low-energy power law, safety factor 2"}};
  out["result"] = report_json(r);
  if (!r.failure.empty()) out["result"]["failure"] = r.failure;
  return out.dump(2) + "\n";
}

// ---------------------------------------------------------------------------

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

struct ConfigPair {
  std::string key;
  std::string value;
};

std::vector<ConfigPair> read_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read config file " + path);
  std::vector<ConfigPair> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw UsageError(path + ":" + std::to_string(lineno) + ": expected 'key = value'");
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"') value = value.substr(1, value.size() - 2);
    while (!key.empty() && key.front() == '-') key.erase(0, 1);
    std::replace(key.begin(), key.end(), '_', '-');
    if (key.empty()) throw UsageError(path + ":" + std::to_string(lineno) + ": empty key");
    out.push_back({key, value});
  }
  return out;
}

bool is_global_key(const std::string& key) { return key == "threads" || key == "out" || key == "format"; }

// Splices config pairs into the argument list: global keys go first, the
// rest right after the subcommand path, so explicit flags (which come later)
// take precedence.
std::vector<std::string> expand_config(std::vector<std::string> args) {
  std::string path;
  std::vector<std::string> kept;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config") {
      if (i + 1 >= args.size()) throw UsageError("--config needs a file");
      path = args[++i];
    } else if (args[i].rfind("--config=", 0) == 0) {
      path = args[i].substr(9);
    } else {
      kept.push_back(args[i]);
    }
  }
  if (path.empty()) return kept;
  const std::vector<ConfigPair> pairs = read_config(path);

  static const std::vector<std::string> names = {"specfun",     "zeros",      "harmonics", "tstar",
                                                 "phases",      "eigenvalues", "bk-channel", "bk-full"};
  std::size_t insert_at = kept.size();
  for (std::size_t i = 0; i < kept.size(); ++i) {
    const std::string& a = kept[i];
    if ((a == "--threads" || a == "--out" || a == "--format") && i + 1 < kept.size()) {
      ++i;
      continue;
    }
    if (std::find(names.begin(), names.end(), a) != names.end()) {
      insert_at = i + 1;
      if ((a == "harmonics" || a == "tstar") && i + 1 < kept.size() && kept[i + 1] == "verify") insert_at = i + 2;
      break;
    }
  }
  std::vector<std::string> globals;
  std::vector<std::string> locals;
  for (const auto& [key, value] : pairs) (is_global_key(key) ? globals : locals).push_back("--" + key + "=" + value);

  std::vector<std::string> out = globals;
  out.insert(out.end(), kept.begin(), kept.begin() + static_cast<long>(insert_at));
  out.insert(out.end(), locals.begin(), locals.end());
  out.insert(out.end(), kept.begin() + static_cast<long>(insert_at), kept.end());
  return out;
}

void write_output(const std::string& text, const std::string& path, std::ostream& out) {
  if (path.empty()) {
    out << text;
    return;
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) throw std::runtime_error("cannot open " + path + " for writing");
  file << text;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  if (argc <= 1) {
    err << kSynopsis;
    return 2;
  }

  Globals g;
  SpecfunOpts specfun;
  ZerosOpts zeros;
  HarmonicsOpts harmonics;
  TstarOpts tstar;
  PhasesOpts phases;
  EigenOpts eigen;
  BkChannelOpts bkc;
  BkFullOpts bkf;

  CLI::App app{"Scattering-phase and relative-trace toolkit for the ball obstacle", kToolName};
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.fallthrough();
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);
  app.add_option("--threads", g.threads, "worker threads")->check(CLI::Range(1, 1024))->capture_default_str();
  app.add_option("--out", g.out, "write the artifact here instead of stdout");
  app.add_option("--format", g.format, "csv or json (default depends on the subcommand)")
      ->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--config", g.config, "file of 'key = value' lines; explicit flags win");

  auto* s_specfun = app.add_subcommand("specfun", "tabulate j, y, h1 for odd dimension d");
  s_specfun->add_option("--dim", specfun.dim, "odd dimension")->capture_default_str();
  s_specfun->add_option("--lmin", specfun.lmin)->capture_default_str();
  s_specfun->add_option("--lmax", specfun.lmax)->capture_default_str();
  s_specfun->add_option("--xmin", specfun.xmin)->capture_default_str();
  s_specfun->add_option("--xmax", specfun.xmax)->capture_default_str();
  s_specfun->add_option("--n", specfun.n, "points per degree")->capture_default_str();

  auto* s_zeros = app.add_subcommand("zeros", "zeros of psi_l(s x) or psi_l'(s x) on (0, max]");
  s_zeros->add_option("--kind", zeros.kind, "psi or dpsi")->capture_default_str();
  s_zeros->add_option("--l", zeros.l)->capture_default_str();
  s_zeros->add_option("--max", zeros.max)->capture_default_str();
  s_zeros->add_option("--scale", zeros.scale, "s")->capture_default_str();

  auto* s_harm = app.add_subcommand("harmonics", "exact spherical-harmonic checks");
  s_harm->require_subcommand(1);
  auto* s_harm_v = s_harm->add_subcommand("verify", "degree-shift check over a (d, p, l) range");
  s_harm_v->add_option("--dmin", harmonics.dmin)->capture_default_str();
  s_harm_v->add_option("--dmax", harmonics.dmax)->capture_default_str();
  s_harm_v->add_option("--lmin", harmonics.lmin)->capture_default_str();
  s_harm_v->add_option("--lmax", harmonics.lmax)->capture_default_str();

  auto* s_tstar = app.add_subcommand("tstar", "finite-dimensional T + T* checks");
  s_tstar->require_subcommand(1);
  auto* s_tstar_v = s_tstar->add_subcommand("verify", "random nilpotent models");
  s_tstar_v->add_option("--seeds", tstar.seeds, "number of models")->capture_default_str();
  s_tstar_v->add_option("--max-dim", tstar.max_dim)->capture_default_str();
  s_tstar_v->add_option("--first-seed", tstar.first_seed)->capture_default_str();

  auto* s_phases = app.add_subcommand("phases", "phase shifts, derivatives and S-values on a lambda grid");
  s_phases->add_option("--p", phases.p)->capture_default_str();
  s_phases->add_option("--a", phases.a, "obstacle radius")->capture_default_str();
  s_phases->add_option("--lmin", phases.lmin)->capture_default_str();
  s_phases->add_option("--lmax", phases.lmax)->capture_default_str();
  s_phases->add_option("--lambda-max", phases.lambda_max)->capture_default_str();
  s_phases->add_option("--n", phases.n, "grid points")->capture_default_str();
  s_phases->add_option("--pol", phases.pol, "all, dirichlet, te, tm or normal")->capture_default_str();

  auto* s_eigen = app.add_subcommand("eigenvalues", "interior cavity eigenvalue parameters");
  s_eigen->add_option("--family", eigen.family, "dirichlet, maxwell-te or maxwell-tm")->capture_default_str();
  s_eigen->add_option("--a", eigen.a)->capture_default_str();
  s_eigen->add_option("--max", eigen.max)->capture_default_str();

  auto* s_bkc = app.add_subcommand("bk-channel", "box oracle against the phase integral for one channel");
  s_bkc->add_option("--pol", bkc.pol, "dirichlet, te, tm or normal")->capture_default_str();
  s_bkc->add_option("--l", bkc.l)->capture_default_str();
  s_bkc->add_option("--p", bkc.p, "form degree (default 0 for dirichlet, 1 otherwise)");
  s_bkc->add_option("--a", bkc.a)->capture_default_str();
  s_bkc->add_option("--boxes", bkc.boxes, "box radii in units of a")->capture_default_str();
  bkc.tf.attach(s_bkc);

  auto* s_bkf = app.add_subcommand("bk-full", "full relative-trace identity over all channels");
  s_bkf->add_option("--mode", bkf.mode, "forms or maxwell")->capture_default_str();
  s_bkf->add_option("--p", bkf.p)->capture_default_str();
  s_bkf->add_option("--q", bkf.q, "delta-d or d-delta")->capture_default_str();
  s_bkf->add_option("--a", bkf.a)->capture_default_str();
  s_bkf->add_option("--tail-tol", bkf.tail_tol)->capture_default_str();
  s_bkf->add_option("--boxes", bkf.boxes, "box radii in units of a")->capture_default_str();
  s_bkf->add_option("--lmax", bkf.lmax, "override the channel cutoff");
  s_bkf->add_option("--rows", bkf.rows, "per-channel CSV path");
  bkf.tf.attach(s_bkf);

  try {
    std::vector<std::string> args(argv + 1, argv + argc);
    args = expand_config(std::move(args));
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::CallForVersion&) {
    out << kVersion << "\n";
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n" << kSynopsis;
    return 2;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n" << kSynopsis;
    return 2;
  }

  auto fmt_or = [&](const char* fallback) { return g.format.empty() ? std::string(fallback) : g.format; };

  try {
    bool passed = true;
    std::string text;
    if (*s_specfun) {
      text = run_specfun(specfun, fmt_or("csv"));
    } else if (*s_zeros) {
      text = run_zeros(zeros, fmt_or("csv"));
    } else if (*s_harm_v) {
      text = run_harmonics(harmonics, fmt_or("json"), g.threads, passed);
    } else if (*s_tstar_v) {
      text = run_tstar(tstar, fmt_or("json"), g.threads, passed);
    } else if (*s_phases) {
      text = run_phases(phases, fmt_or("csv"), g.threads);
    } else if (*s_eigen) {
      text = run_eigenvalues(eigen, fmt_or("csv"));
    } else if (*s_bkc) {
      text = run_bk_channel(bkc, fmt_or("json"), passed);
    } else if (*s_bkf) {
      text = run_bk_full(bkf, fmt_or("json"), g.threads, g.out, passed);
    } else {
      err << kSynopsis;
      return 2;
    }
    write_output(text, g.out, out);
    if (!passed) {
      err << "contract violated: residuals over tolerance (see output)\n";
      return 1;
    }
    return 0;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n" << kSynopsis;
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace relscat::cli
