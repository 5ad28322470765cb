// Command line front end: each subcommand reads a JSON experiment config,
// writes CSV/SVG artifacts plus a machine-readable report.json, and uses
// exit codes 0 (ok), 1 (a check failed), 2 (bad configuration).

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "starkg/config.hpp"
#include "starkg/csv.hpp"
#include "starkg/errors.hpp"
#include "starkg/evolution.hpp"
#include "starkg/netfunc.hpp"
#include "starkg/parallel.hpp"
#include "starkg/report.hpp"
#include "starkg/resolvent.hpp"
#include "starkg/spectral_kernel.hpp"
#include "starkg/spectral_measure.hpp"
#include "starkg/svg.hpp"
#include "starkg/transform.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace {

using namespace starkg;

struct CommonOpts {
  std::string config_path;
  std::string out_dir = ".";
  int threads = 0;
  bool serial = false;

  [[nodiscard]] ExecPolicy policy() const {
    return serial ? ExecPolicy::serial : ExecPolicy::parallel;
  }
  [[nodiscard]] std::string path(const std::string& name) const {
    return (std::filesystem::path(out_dir) / name).string();
  }
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
  cmd->add_option("--config", opts.config_path, "experiment config (JSON)")
      ->required();
  cmd->add_option("--out", opts.out_dir, "output directory");
  cmd->add_option("--threads", opts.threads,
                  "worker threads (0 = runtime default)");
  cmd->add_flag("--serial", opts.serial,
                "run the reference serial code paths");
}

void apply_threads(const CommonOpts& opts) {
#ifdef _OPENMP
  if (opts.threads > 0) omp_set_num_threads(opts.threads);
#else
  (void)opts;
#endif
  std::filesystem::create_directories(opts.out_dir);
}

cplx lambda_from(const nlohmann::json& doc, const char* key,
                 cplx fallback = {2.5, 0.0}) {
  if (!doc.contains(key)) return fallback;
  const auto& v = doc.at(key);
  if (v.is_number()) return {v.get<double>(), 0.0};
  if (v.is_array() && v.size() == 2)
    return {v.at(0).get<double>(), v.at(1).get<double>()};
  throw ConfigError(std::string(key) + " must be a number or [re, im]");
}

NetworkFunction data_from(const ExperimentConfig& cfg, const char* key,
                          bool required) {
  if (!cfg.raw.contains(key)) {
    if (required)
      throw ConfigError(std::string("config needs a \"") + key +
                        "\" function spec");
    return NetworkFunction::zero(cfg.net.n());
  }
  return function_from_json(cfg.raw.at(key), cfg.net);
}

// Maximum pointwise defect of the branch ODE at sampled points, relative to
// the amplitude scale of u.
double ode_residual(const NetworkFunction& u, cplx lambda,
                    const StarNetwork& net, double x_max) {
  double scale = 0.0, worst = 0.0;
  for (int k = 1; k <= net.n(); ++k)
    for (int i = 0; i <= 40; ++i) {
      const double x = x_max * i / 40.0;
      const cplx val = u.eval(k, x);
      scale = std::max(scale, std::abs(val));
      const cplx lhs =
          -net.c_at(k) * u.deriv(k, x, 2) + net.a_at(k) * val - lambda * val;
      worst = std::max(worst, std::abs(lhs));
    }
  return worst / (scale > 0.0 ? scale : 1.0);
}

int cmd_eigen(const CommonOpts& opts) {
  apply_threads(opts);
  const ExperimentConfig cfg = load_config(opts.config_path);
  const nlohmann::json& doc = cfg.raw;
  EigenfunctionSpec spec;
  spec.lambda = lambda_from(doc, "lambda");
  spec.j = doc.value("family", 1);
  spec.sign = doc.value("sign", -1);
  const double L = doc.value("L", 10.0);
  const double h = doc.value("h", 0.01);
  const NetworkFunction u = make_eigenfunction(spec, cfg.net, L + 1.0);

  CsvTable table;
  table.header.push_back("x");
  for (int k = 1; k <= cfg.net.n(); ++k) {
    table.header.push_back("branch" + std::to_string(k) + "_re");
    table.header.push_back("branch" + std::to_string(k) + "_im");
  }
  const auto steps = static_cast<int>(std::round(L / h));
  for (int i = 0; i <= steps; ++i) {
    std::vector<double> row{i * h};
    for (int k = 1; k <= cfg.net.n(); ++k) {
      const cplx v = u.eval(k, i * h);
      row.push_back(v.real());
      row.push_back(v.imag());
    }
    table.rows.push_back(std::move(row));
  }
  write_csv(opts.path("eigenfunction.csv"), table);

  const TransmissionDefects td = check_transmission(u, cfg.net);
  std::vector<CheckRecord> checks;
  checks.push_back(make_check("branch ODE residual",
                              ode_residual(u, spec.lambda, cfg.net, L),
                              doc.value("ode_tolerance", 1e-10)));
  checks.push_back(make_check("vertex value continuity", td.t0_defect,
                              doc.value("vertex_tolerance", 1e-12)));
  checks.push_back(make_check("vertex weighted derivative balance",
                              td.t1_defect,
                              doc.value("vertex_tolerance", 1e-12)));
  write_report(opts.path("report.json"), checks);
  if (!all_pass(checks)) throw CheckFailure("eigen: defects exceed tolerance");
  return 0;
}

int cmd_resolvent(const CommonOpts& opts) {
  apply_threads(opts);
  const ExperimentConfig cfg = load_config(opts.config_path);
  const nlohmann::json& doc = cfg.raw;
  const cplx lambda = lambda_from(doc, "lambda", {2.0, 1.0});
  const NetworkFunction f = data_from(cfg, "f", true);
  OutputGrid grid{doc.value("L", 12.0), doc.value("h", 0.005)};
  const NetworkFunction u = apply_resolvent(f, lambda, cfg.net, grid);

  CsvTable table;
  table.header.push_back("x");
  for (int k = 1; k <= cfg.net.n(); ++k) {
    table.header.push_back("branch" + std::to_string(k) + "_re");
    table.header.push_back("branch" + std::to_string(k) + "_im");
  }
  const auto steps = static_cast<int>(std::round(grid.L / grid.h));
  for (int i = 0; i <= steps; ++i) {
    std::vector<double> row{i * grid.h};
    for (int k = 1; k <= cfg.net.n(); ++k) {
      const cplx v = u.eval(k, i * grid.h);
      row.push_back(v.real());
      row.push_back(v.imag());
    }
    table.rows.push_back(std::move(row));
  }
  write_csv(opts.path("resolvent.csv"), table);

  // Defect of (lambda - A)u - f on interior nodes by second differences;
  // the vertex and far cut are excluded (one-sided stencils are only O(h)).
  double num = 0.0, den = 0.0;
  for (int k = 1; k <= cfg.net.n(); ++k) {
    const GridSamples& g = u.samples(k);
    for (std::size_t i = 1; i + 1 < g.values.size(); ++i) {
      const double x = static_cast<double>(i) * g.h;
      const cplx d2 =
          (g.values[i + 1] - 2.0 * g.values[i] + g.values[i - 1]) /
          (g.h * g.h);
      const cplx res = lambda * g.values[i] -
                       (-cfg.net.c_at(k) * d2 + cfg.net.a_at(k) * g.values[i]) -
                       f.eval(k, x);
      num += std::norm(res) * g.h;
      den += std::norm(f.eval(k, x)) * g.h;
    }
  }
  const double rel = std::sqrt(num / (den > 0.0 ? den : 1.0));
  std::vector<CheckRecord> checks;
  checks.push_back(make_check("resolvent defect (interior second differences)",
                              rel, doc.value("tolerance", 1e-3)));
  write_report(opts.path("report.json"), checks);
  if (!all_pass(checks))
    throw CheckFailure("resolvent: defect exceeds tolerance");
  return 0;
}

int cmd_measure(const CommonOpts& opts) {
  apply_threads(opts);
  const ExperimentConfig cfg = load_config(opts.config_path);
  const nlohmann::json& doc = cfg.raw;
  const double lo = doc.value("lambda_lo", cfg.net.a_min() + 0.05);
  const double hi = doc.value("lambda_hi", cfg.net.a_max() + 5.0);
  const int count = doc.value("count", 200);
  if (!(lo < hi) || count < 2)
    throw ConfigError("measure: need lambda_lo < lambda_hi and count >= 2");

  CsvTable table;
  table.header.push_back("lambda");
  for (int l = 1; l <= cfg.net.n(); ++l)
    table.header.push_back("q" + std::to_string(l));
  std::vector<SvgSeries> series(static_cast<std::size_t>(cfg.net.n()));
  const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c",
                           "#9467bd", "#ff7f0e", "#8c564b"};
  for (int l = 1; l <= cfg.net.n(); ++l) {
    series[static_cast<std::size_t>(l - 1)].color = palette[(l - 1) % 6];
    series[static_cast<std::size_t>(l - 1)].label =
        "channel " + std::to_string(l);
  }
  for (int i = 0; i < count; ++i) {
    const double lam = lo + (hi - lo) * i / (count - 1.0);
    if (cfg.net.at_threshold(lam)) continue;
    std::vector<double> row{lam};
    const WeightMatrix wm = weights_diagonal(lam, cfg.net);
    for (int l = 1; l <= cfg.net.n(); ++l) {
      row.push_back(wm.at(l, l));
      series[static_cast<std::size_t>(l - 1)].x.push_back(lam);
      series[static_cast<std::size_t>(l - 1)].y.push_back(wm.at(l, l));
    }
    table.rows.push_back(std::move(row));
  }
  write_csv(opts.path("measure.csv"), table);
  write_svg_plot(opts.path("measure.svg"), series,
                 "spectral weights by channel", "lambda", "q_l(lambda)");

  // Route consistency at a few interior points of the top band.
  std::vector<double> x_samples;
  if (doc.contains("x_samples"))
    x_samples = doc.at("x_samples").get<std::vector<double>>();
  else
    for (int j = 2; j <= cfg.net.n(); ++j)
      x_samples.push_back(0.7 + 0.35 * (j - 2));
  double worst = 0.0;
  const double base = cfg.net.a_max() + 0.5;
  const double top = std::max(hi, base + 2.0);
  for (int i = 0; i < 3; ++i) {
    const double lam = base + (top - base) * (i + 0.5) / 3.0;
    const WeightMatrix diag = weights_diagonal(lam, cfg.net);
    const WeightMatrix full = weights_matrix(lam, x_samples, cfg.net);
    double scale = 0.0;
    for (int l = 1; l <= cfg.net.n(); ++l)
      scale = std::max(scale, std::abs(diag.at(l, l)));
    for (int l = 1; l <= cfg.net.n(); ++l)
      for (int m = 1; m <= cfg.net.n(); ++m)
        worst = std::max(worst, std::abs(full.at(l, m) - diag.at(l, m)) /
                                    (scale > 0.0 ? scale : 1.0));
  }
  std::vector<CheckRecord> checks;
  checks.push_back(make_check("sampling-matrix route matches diagonal weights",
                              worst, doc.value("tolerance", 1e-10)));
  write_report(opts.path("report.json"), checks);
  if (!all_pass(checks))
    throw CheckFailure("measure: weight routes disagree");
  return 0;
}

int cmd_transform(const CommonOpts& opts) {
  apply_threads(opts);
  const ExperimentConfig cfg = load_config(opts.config_path);
  const nlohmann::json& doc = cfg.raw;
  const NetworkFunction f = data_from(cfg, "f", true);
  const AutoTransform at = transform_V_auto(
      f, cfg.net, {}, doc.value("tail_tolerance", 1e-8), 0.0, opts.policy());

  CsvTable table;
  table.header = {"component", "lambda", "sigma", "re", "im"};
  for (std::size_t k = 0; k < at.vf.values.size(); ++k) {
    const ComponentGrid& cg = at.grid->comp[k];
    for (std::size_t i = 0; i < cg.g.size(); ++i)
      table.rows.push_back({static_cast<double>(k + 1), cg.g.node[i],
                            cg.sigma[i], at.vf.values[k][i].real(),
                            at.vf.values[k][i].imag()});
  }
  write_csv(opts.path("transform.csv"), table);

  const double lhs = norm_sigma(at.vf, cfg.net);
  const double rhs = norm_H(f, cfg.net);
  const double rel = std::abs(lhs - rhs) / (rhs > 0.0 ? rhs : 1.0);
  std::vector<CheckRecord> checks;
  checks.push_back(
      make_check("norm identity |Vf| = |f|", rel, doc.value("tolerance", 1e-4)));
  checks.push_back(make_check("spectral tail fraction", at.tail_fraction,
                              doc.value("tail_tolerance", 1e-8) * 10.0));
  write_report(opts.path("report.json"), checks);
  if (!all_pass(checks))
    throw CheckFailure("transform: norm identity violated");
  return 0;
}

int cmd_evolve(const CommonOpts& opts) {
  apply_threads(opts);
  const ExperimentConfig cfg = load_config(opts.config_path);
  const nlohmann::json& doc = cfg.raw;
  const NetworkFunction u0 = data_from(cfg, "u0", true);
  const NetworkFunction v0 = data_from(cfg, "v0", false);
  std::vector<double> times = doc.value("times", std::vector<double>{1.0});
  if (times.empty()) throw ConfigError("evolve: times must not be empty");

  EvolveParams params;
  params.out = OutputGrid{doc.value("L", 20.0), doc.value("h", 0.01)};
  params.policy = opts.policy();
  const std::vector<WaveState> states =
      evolve_many(u0, v0, times, cfg.net, params);

  const auto steps = static_cast<int>(std::round(params.out.L / params.out.h));
  for (std::size_t s = 0; s < states.size(); ++s) {
    CsvTable table;
    table.header.push_back("x");
    for (int k = 1; k <= cfg.net.n(); ++k) {
      const std::string b = "branch" + std::to_string(k);
      table.header.push_back(b + "_u_re");
      table.header.push_back(b + "_u_im");
      table.header.push_back(b + "_v_re");
      table.header.push_back(b + "_v_im");
    }
    for (int i = 0; i <= steps; ++i) {
      std::vector<double> row{i * params.out.h};
      for (int k = 1; k <= cfg.net.n(); ++k) {
        const cplx uv = states[s].u.eval(k, i * params.out.h);
        const cplx vv = states[s].v.eval(k, i * params.out.h);
        row.insert(row.end(), {uv.real(), uv.imag(), vv.real(), vv.imag()});
      }
      table.rows.push_back(std::move(row));
    }
    char name[64];
    std::snprintf(name, sizeof name, "evolve_%03zu.csv", s);
    write_csv(opts.path(name), table);
  }

  // Energy of the reconstructed states versus the initial data.
  WaveState initial;
  initial.u = u0;
  initial.v = v0;
  const double e0 = wave_energy(initial, cfg.net, {}, opts.policy());
  CsvTable etab;
  etab.header = {"t", "energy"};
  etab.rows.push_back({0.0, e0});
  double drift = 0.0;
  for (const WaveState& st : states) {
    const double e = wave_energy(st, cfg.net, {}, opts.policy());
    etab.rows.push_back({st.t, e});
    drift = std::max(drift, std::abs(e - e0) / (e0 > 0.0 ? e0 : 1.0));
  }
  write_csv(opts.path("energy.csv"), etab);

  std::vector<SvgSeries> series;
  const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c",
                           "#9467bd", "#ff7f0e", "#8c564b"};
  for (int k = 1; k <= cfg.net.n(); ++k) {
    SvgSeries sr;
    sr.color = palette[(k - 1) % 6];
    sr.label = "branch " + std::to_string(k);
    for (int i = 0; i <= steps; ++i) {
      sr.x.push_back(i * params.out.h);
      sr.y.push_back(std::abs(states.back().u.eval(k, i * params.out.h)));
    }
    series.push_back(std::move(sr));
  }
  write_svg_plot(opts.path("evolve.svg"), series,
                 "field magnitude at the final time", "x", "|u(t, x)|");

  std::vector<CheckRecord> checks;
  checks.push_back(make_check("relative energy drift", drift,
                              doc.value("energy_tolerance", 1e-4)));
  if (!states.front().conforming)
    std::cerr << "warning: initial data violates the vertex coupling; the "
                 "evolution solves the equation only away from the vertex\n";
  write_report(opts.path("report.json"), checks);
  if (!all_pass(checks)) throw CheckFailure("evolve: energy drift too large");
  return 0;
}

int cmd_verify(const CommonOpts& opts) {
  apply_threads(opts);
  const ExperimentConfig cfg = load_config(opts.config_path);
  const StarNetwork& net = cfg.net;
  const nlohmann::json& doc = cfg.raw;
  std::vector<CheckRecord> checks;

  // Sample spectral parameters: one per band plus one above all thresholds.
  std::vector<double> bands;
  const auto th = net.thresholds();
  for (std::size_t i = 0; i + 1 < th.size(); ++i)
    if (th[i + 1] - th[i] > 1e-9) bands.push_back(0.5 * (th[i] + th[i + 1]));
  bands.push_back(net.a_max() + 1.7);

  // 1. Generalized eigenfunctions solve the ODE and the vertex coupling.
  double ode_worst = 0.0, vertex_worst = 0.0;
  for (double lam : bands)
    for (int j = 1; j <= net.n(); ++j) {
      const EigenfunctionSpec spec{cplx(lam, 0.3), j, j % 2 ? -1 : 1};
      const NetworkFunction u = make_eigenfunction(spec, net, 9.0);
      ode_worst = std::max(ode_worst, ode_residual(u, spec.lambda, net, 8.0));
      const TransmissionDefects td = check_transmission(u, net);
      vertex_worst =
          std::max({vertex_worst, td.t0_defect, td.t1_defect});
    }
  checks.push_back(make_check("eigenfunction ODE residual", ode_worst, 1e-10));
  checks.push_back(
      make_check("eigenfunction vertex defects", vertex_worst, 1e-12));

  // 2/3. Kernel conjugation symmetry and argument symmetry off the axis.
  double conj_worst = 0.0, sym_worst = 0.0;
  for (double lam : bands)
    for (int j = 1; j <= net.n(); ++j)
      for (int k = 1; k <= net.n(); ++k) {
        const KernelQuery q{{j, 0.8 + 0.1 * j}, {k, 1.3 + 0.2 * k},
                            cplx(lam, 0.45)};
        const cplx a = kernel_K(q, net);
        KernelQuery qc = q;
        qc.lambda = std::conj(q.lambda);
        const cplx b = kernel_K(qc, net);
        conj_worst = std::max(conj_worst, std::abs(b - std::conj(a)));
        KernelQuery qs{q.x_prime, q.x, q.lambda};
        sym_worst = std::max(sym_worst, std::abs(kernel_K(qs, net) - a));
      }
  checks.push_back(
      make_check("kernel conjugation identity", conj_worst, 1e-13));
  checks.push_back(make_check("kernel argument symmetry", sym_worst, 1e-13));

  // 4. Diagonal weights against the sampling-matrix route.
  std::vector<double> x_samples;
  for (int j = 2; j <= net.n(); ++j) x_samples.push_back(0.9 + 0.3 * (j - 2));
  double weight_worst = 0.0;
  for (int i = 0; i < 2; ++i) {
    const double lam = net.a_max() + 0.9 + 1.1 * i;
    const WeightMatrix diag = weights_diagonal(lam, net);
    const WeightMatrix full = weights_matrix(lam, x_samples, net);
    double scale = 0.0;
    for (int l = 1; l <= net.n(); ++l)
      scale = std::max(scale, std::abs(diag.at(l, l)));
    for (int l = 1; l <= net.n(); ++l)
      for (int m = 1; m <= net.n(); ++m)
        weight_worst =
            std::max(weight_worst,
                     std::abs(full.at(l, m) - diag.at(l, m)) / scale);
  }
  checks.push_back(
      make_check("weight matrix route consistency", weight_worst, 1e-10));

  // 5. The coefficient systems defining the weights.
  double system_worst = 0.0;
  for (double lam : bands)
    system_worst =
        std::max(system_worst, verify_weight_systems(lam, net).max_residual);
  checks.push_back(
      make_check("eigenfunction product weight systems", system_worst, 1e-12));

  // 6. Norm identity for a canned two-bump function.
  nlohmann::json fspec = nlohmann::json::array();
  fspec.push_back({{"branch", 1}, {"center", 1.4}, {"width", 0.5}});
  fspec.push_back({{"branch", std::min(2, net.n())},
                   {"center", 2.0},
                   {"width", 0.7},
                   {"amplitude", 0.6}});
  const NetworkFunction f = function_from_json(fspec, net);
  const AutoTransform at =
      transform_V_auto(f, net, {}, 1e-9, 0.0, opts.policy());
  const double rel = std::abs(norm_sigma(at.vf, net) - norm_H(f, net)) /
                     norm_H(f, net);
  checks.push_back(make_check("norm identity |Vf| = |f|", rel,
                              doc.value("tolerance", 1e-4)));

  write_report(opts.path("report.json"), checks);
  for (const auto& c : checks)
    std::printf("%-55s %11.3e  (tol %.1e)  %s\n", c.check.c_str(), c.residual,
                c.tolerance, c.pass ? "PASS" : "FAIL");
  if (!all_pass(checks))
    throw CheckFailure("verify: at least one identity check failed");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"spectral solver for the wave operator on a star network"};
  app.require_subcommand(1);

  CommonOpts eigen_o, resolvent_o, measure_o, transform_o, evolve_o, verify_o;
  add_common(app.add_subcommand("eigen", "sample a generalized eigenfunction"),
             eigen_o);
  add_common(
      app.add_subcommand("resolvent", "apply the resolvent to bump data"),
      resolvent_o);
  add_common(app.add_subcommand("measure", "tabulate the spectral weights"),
             measure_o);
  add_common(app.add_subcommand("transform",
                                "forward transform and norm identity"),
             transform_o);
  add_common(app.add_subcommand("evolve", "propagate initial data"), evolve_o);
  add_common(app.add_subcommand("verify", "run the identity checks"),
             verify_o);

  try {
    app.parse(argc, argv);
    if (app.got_subcommand("eigen")) return cmd_eigen(eigen_o);
    if (app.got_subcommand("resolvent")) return cmd_resolvent(resolvent_o);
    if (app.got_subcommand("measure")) return cmd_measure(measure_o);
    if (app.got_subcommand("transform")) return cmd_transform(transform_o);
    if (app.got_subcommand("evolve")) return cmd_evolve(evolve_o);
    if (app.got_subcommand("verify")) return cmd_verify(verify_o);
    return 2;
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const ConfigError& e) {
    std::cerr << e.what() << '\n';
    return 2;
  } catch (const CheckFailure& e) {
    std::cerr << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << e.what() << '\n';
    return 1;
  }
}
