#include "floquet/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

#include "floquet/errors.hpp"
#include "floquet/parallel.hpp"
#include "floquet/resonance.hpp"
#include "floquet/scatter.hpp"
#include "floquet/wavepacket.hpp"

namespace floquet::cli {

using nlohmann::json;

namespace {

class IoError : public Error {
 public:
  using Error::Error;
};

const char* error_kind(const std::exception& e) {
  if (dynamic_cast<const OutOfBandError*>(&e)) return "out_of_band";
  if (dynamic_cast<const NoRootError*>(&e)) return "no_root";
  if (dynamic_cast<const ValidationError*>(&e)) return "validation";
  if (dynamic_cast<const SingularMatrixError*>(&e)) return "singular_matrix";
  if (dynamic_cast<const BranchJumpError*>(&e)) return "branch_jump";
  if (dynamic_cast<const ConvergenceError*>(&e)) return "non_convergence";
  if (dynamic_cast<const NumericalError*>(&e)) return "numerical";
  if (dynamic_cast<const IoError*>(&e)) return "io";
  return "internal";
}

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const ValidationError*>(&e)) return kValidation;
  if (dynamic_cast<const NumericalError*>(&e)) return kNumerical;
  if (dynamic_cast<const IoError*>(&e)) return kIo;
  return kNumerical;
}

Format parse_format(const std::string& name) {
  if (name == "csv") return Format::csv;
  if (name == "json") return Format::json;
  throw ValidationError("unknown format '" + name + "' (expected csv or json)");
}

void emit(const std::string& text, const std::string& path, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
    return;
  }
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw IoError("cannot open output file " + path);
  file << text;
  file.close();
  if (!file) throw IoError("failed writing output file " + path);
}

// Shared flags. Couplings and momenta are dimensionless on the command line.
struct CommonArgs {
  double g0 = 0.0;
  double g1 = 0.0;
  double omega = 1.0;
  int n_max = 32;
  std::string format = "csv";
  std::string out;
  int jobs = 1;

  Couplings couplings() const {
    const double s = std::sqrt(omega);
    return {g0 * s, g1 * s, omega};
  }
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--g0", args.g0, "static coupling g0/sqrt(omega)");
  cmd->add_option("--g1", args.g1, "drive coupling g1/sqrt(omega)");
  cmd->add_option("--omega", args.omega, "drive frequency (energy scale)");
  cmd->add_option("--format", args.format, "csv or json");
  cmd->add_option("--out", args.out, "output path (default stdout)");
  cmd->add_option("--jobs", args.jobs, "worker threads");
}

json inputs_json(const CommonArgs& args) {
  return {{"g0_over_sqrt_omega", args.g0},
          {"g1_over_sqrt_omega", args.g1},
          {"omega", args.omega}};
}

// ---------------------------------------------------------------- resonance

std::string resonance_report(const CommonArgs& args, Format format) {
  const Couplings c = args.couplings();
  c.validate();
  const double s = std::sqrt(c.omega);

  json results = json::object();
  json diagnostics = {{"warnings", json::array()}};
  const auto prediction_json = [](const ZtpPrediction& z) {
    json j = {{"order", to_string(z.order)},
              {"p_over_sqrt_omega", z.p_over_sqrt_omega},
              {"p_squared_over_omega", z.p_squared_over_omega}};
    if (z.bound_state_energy) j["bound_state_energy"] = *z.bound_state_energy;
    return j;
  };

  if (c.g0 < 0.0) {
    results["ztp_leading"] = prediction_json(ztp_leading(c.g0, c.omega));
    if (c.g1 > 0.0) results["ztp_corrected"] = prediction_json(ztp_corrected(c.g0, c.g1, c.omega));
  } else if (c.g0 == 0.0) {
    results["ztp_driven_only"] = prediction_json(ztp_driven_only(c.g1, c.omega));
  } else {
    diagnostics["warnings"].push_back("g0 > 0: no static bound state, no ZTP prediction");
  }

  if (c.g0 < 0.0 && c.g1 > 0.0) {
    PoleSearchOptions options;
    options.n_max = args.n_max;
    const ResonancePole pole = find_pole(c, std::nullopt, options);
    const cplx formula = pole_formula(c);
    results["pole"] = {
        {"p_squared_over_omega_re", pole.p_squared.real() / c.omega},
        {"p_squared_over_omega_im", pole.p_squared.imag() / c.omega},
        {"formula_re", formula.real() / c.omega},
        {"formula_im", formula.imag() / c.omega},
        {"gamma_over_omega", pole.gamma / c.omega},
        {"gamma_ratio", pole.gamma / (c.g1 * c.g1 * std::abs(c.g0) / s)},
        {"residual", pole.residual},
        {"iterations", pole.iterations}};
  } else {
    diagnostics["warnings"].push_back("pole search skipped: needs g0 < 0 and g1 > 0");
  }

  if (format == Format::json) {
    json report = {{"inputs", inputs_json(args)}, {"results", results}, {"diagnostics", diagnostics}};
    report["inputs"]["n_max"] = args.n_max;
    return report.dump(2) + "\n";
  }
  std::ostringstream os;
  os << "quantity,value\n";
  for (const char* key : {"ztp_leading", "ztp_corrected", "ztp_driven_only"}) {
    if (!results.contains(key)) continue;
    os << key << ".p_over_sqrt_omega,"
       << format_double(results[key]["p_over_sqrt_omega"].get<double>()) << "\n";
    os << key << ".p_squared_over_omega,"
       << format_double(results[key]["p_squared_over_omega"].get<double>()) << "\n";
  }
  if (results.contains("pole")) {
    for (const auto& [key, value] : results["pole"].items()) {
      os << "pole." << key << ","
         << (value.is_number_integer() ? std::to_string(value.get<int>())
                                       : format_double(value.get<double>()))
         << "\n";
    }
  }
  for (const auto& w : diagnostics["warnings"]) os << "# " << w.get<std::string>() << "\n";
  return os.str();
}

// ---------------------------------------------------------------- overlap

struct OverlapArgs {
  double p0 = std::nan("");
  double delta = 0.01;
  double t_max = 600.0;
  int t_steps = 400;
  bool fit = false;
  std::optional<double> fit_start;
  std::optional<double> fit_end;
};

std::string overlap_report(const CommonArgs& args, const OverlapArgs& o, Format format,
                           std::ostream& err) {
  const Couplings c = args.couplings();
  c.validate();
  const double s = std::sqrt(c.omega);
  double p0 = o.p0;
  if (std::isnan(p0)) p0 = ztp_leading(c.g0, c.omega).p_over_sqrt_omega;
  const WavePacket packet{p0 * s, o.delta * c.omega};

  std::vector<double> times = uniform_times(o.t_max / c.omega, o.t_steps);
  OverlapOptions options;
  options.jobs = args.jobs;
  const OverlapSeries series = overlap_trace(c, packet, times, options);
  for (const auto& w : series.warnings) err << "warning: " << w << "\n";

  std::optional<DecayFit> fit;
  if (o.fit) {
    FitWindow window;
    if (o.fit_start && o.fit_end) {
      window = {*o.fit_start / c.omega, *o.fit_end / c.omega};
    } else {
      const double guess = c.g1 * c.g1 * std::abs(c.g0) / (8.0 * s);
      window = default_fit_window(series, guess);
      if (o.fit_start) window.t_start = *o.fit_start / c.omega;
      if (o.fit_end) window.t_end = *o.fit_end / c.omega;
    }
    fit = fit_decay(series, window);
    for (const auto& w : fit->warnings) err << "warning: " << w << "\n";
  }
  const double rate_scale = c.g1 * c.g1 * std::abs(c.g0) / s;

  if (format == Format::json) {
    json omega_t = json::array(), f_sq = json::array();
    for (std::size_t i = 0; i < times.size(); ++i) {
      omega_t.push_back(times[i] * c.omega);
      f_sq.push_back(series.values[i]);
    }
    json results = {{"omega_t", omega_t}, {"F_sq", f_sq}};
    if (fit) {
      results["fit"] = {{"gamma_over_omega", fit->gamma / c.omega},
                        {"gamma_ratio", rate_scale > 0.0 ? fit->gamma / rate_scale : 0.0},
                        {"omega_t_start", fit->window.t_start * c.omega},
                        {"omega_t_end", fit->window.t_end * c.omega},
                        {"r_squared", fit->r_squared},
                        {"samples", fit->samples},
                        {"accepted", fit->accepted}};
    }
    json inputs = inputs_json(args);
    inputs["p0_over_sqrt_omega"] = p0;
    inputs["delta_over_omega"] = o.delta;
    inputs["t_max"] = o.t_max;
    inputs["t_steps"] = o.t_steps;
    json warnings = series.warnings;
    if (fit)
      for (const auto& w : fit->warnings) warnings.push_back(w);
    json report = {{"inputs", inputs},
                   {"results", results},
                   {"diagnostics",
                    {{"quadrature_nodes", series.nodes},
                     {"n_max", series.n_max},
                     {"quadrature_error", series.quadrature_error},
                     {"warnings", warnings}}}};
    return report.dump(2) + "\n";
  }

  std::string text = "omega_t,F_sq\n";
  for (std::size_t i = 0; i < times.size(); ++i)
    text += format_double(times[i] * c.omega) + "," + format_double(series.values[i]) + "\n";
  if (fit) {
    text += "# fit gamma_over_omega=" + format_double(fit->gamma / c.omega) +
            " gamma_ratio=" + format_double(rate_scale > 0.0 ? fit->gamma / rate_scale : 0.0) +
            " omega_t_start=" + format_double(fit->window.t_start * c.omega) +
            " omega_t_end=" + format_double(fit->window.t_end * c.omega) +
            " r_squared=" + format_double(fit->r_squared) +
            " samples=" + std::to_string(fit->samples) +
            " accepted=" + (fit->accepted ? "true" : "false") + "\n";
  }
  return text;
}

// ---------------------------------------------------------------- converge

std::string converge_report(const CommonArgs& args, double p, double tol, Format format) {
  const Couplings c = args.couplings();
  const ScatteringParams params = make_params(c, p * std::sqrt(c.omega), args.n_max);
  const ConvergedAmplitudes result = converge_amplitudes(params, tol);
  if (format == Format::json) {
    json levels = json::array();
    for (const auto& step : result.history)
      levels.push_back({{"n_max", step.n_max}, {"B0_sq", step.reflection}, {"change", step.change}});
    json inputs = inputs_json(args);
    inputs["p_over_sqrt_omega"] = p;
    inputs["tol"] = tol;
    inputs["n_max"] = args.n_max;
    json report = {{"inputs", inputs},
                   {"results",
                    {{"levels", levels},
                     {"n_max", result.n_max},
                     {"B0_sq", result.amplitudes.reflection()}}},
                   {"diagnostics",
                    {{"flux_residual", result.amplitudes.flux_residual() / params.p}}}};
    return report.dump(2) + "\n";
  }
  std::string text = "n_max,B0_sq,change\n";
  for (const auto& step : result.history)
    text += std::to_string(step.n_max) + "," + format_double(step.reflection) + "," +
            format_double(step.change) + "\n";
  return text;
}

}  // namespace

// ---------------------------------------------------------------- scan

void ScanConfig::validate() const {
  couplings().validate();
  if (!(p_min > 0.0) || !(p_max > p_min) || !std::isfinite(p_max))
    throw ValidationError("scan range needs 0 < p_min < p_max");
  if (steps < 2) throw ValidationError("scan needs at least 2 steps");
  if (n_max < 1) throw ValidationError("n_max must be at least 1");
  if (tol && !(*tol > 0.0)) throw ValidationError("tolerance must be positive");
}

Couplings ScanConfig::couplings() const {
  const double s = std::sqrt(omega);
  return {g0 * s, g1 * s, omega};
}

std::vector<ScanRow> run_scan(const ScanConfig& config) {
  config.validate();
  const Couplings c = config.couplings();
  const double s = std::sqrt(c.omega);
  std::vector<ScanRow> rows(static_cast<std::size_t>(config.steps));
  parallel_for(rows.size(), config.jobs, [&](std::size_t i) {
    const double x =
        config.p_min + (config.p_max - config.p_min) * static_cast<double>(i) / (config.steps - 1);
    const ScatteringParams params = make_params(c, x * s, config.n_max);
    AmplitudeSet amps;
    int used = config.n_max;
    if (config.tol) {
      ConvergedAmplitudes conv = converge_amplitudes(params, *config.tol);
      amps = std::move(conv.amplitudes);
      used = conv.n_max;
    } else {
      amps = solve_amplitudes(params);
    }
    ScanRow& row = rows[i];
    row.p_over_sqrt_omega = x;
    row.b0_sq = amps.reflection();
    row.n_max_used = used;
    for (int n = -config.n_max; n <= config.n_max; ++n) {
      row.reflect.push_back(amps.reflect_prob[amps.index(n)]);
      row.transmit.push_back(amps.transmit_prob[amps.index(n)]);
    }
    row.flux_residual = amps.flux_residual() / params.p;
  });
  return rows;
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string scan_csv(const ScanConfig& config, const std::vector<ScanRow>& rows) {
  std::string text = "p_over_sqrt_omega,B0_sq";
  for (int n = -config.n_max; n <= config.n_max; ++n) text += ",refl_" + std::to_string(n);
  for (int n = -config.n_max; n <= config.n_max; ++n) text += ",trans_" + std::to_string(n);
  text += ",flux_residual\n";
  for (const auto& row : rows) {
    text += format_double(row.p_over_sqrt_omega) + "," + format_double(row.b0_sq);
    for (double v : row.reflect) text += "," + format_double(v);
    for (double v : row.transmit) text += "," + format_double(v);
    text += "," + format_double(row.flux_residual) + "\n";
  }
  return text;
}

std::string scan_json(const ScanConfig& config, const std::vector<ScanRow>& rows) {
  json channels = json::array();
  for (int n = -config.n_max; n <= config.n_max; ++n) channels.push_back(n);
  json out_rows = json::array();
  double worst = 0.0;
  int largest_n_max = 0;
  for (const auto& row : rows) {
    out_rows.push_back({{"p_over_sqrt_omega", row.p_over_sqrt_omega},
                        {"B0_sq", row.b0_sq},
                        {"refl", row.reflect},
                        {"trans", row.transmit},
                        {"flux_residual", row.flux_residual}});
    worst = std::max(worst, row.flux_residual);
    largest_n_max = std::max(largest_n_max, row.n_max_used);
  }
  json inputs = {{"g0_over_sqrt_omega", config.g0}, {"g1_over_sqrt_omega", config.g1},
                 {"omega", config.omega},           {"p_min", config.p_min},
                 {"p_max", config.p_max},           {"steps", config.steps},
                 {"n_max", config.n_max}};
  if (config.tol) inputs["tol"] = *config.tol;
  json report = {{"inputs", inputs},
                 {"results", {{"channels", channels}, {"rows", out_rows}}},
                 {"diagnostics",
                  {{"max_flux_residual", worst},
                   {"largest_n_max_used", largest_n_max},
                   {"flux_audit_passed", worst <= kFluxAuditThreshold}}}};
  return report.dump(2) + "\n";
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Floquet scattering off a driven delta potential", "floquet"};
  app.require_subcommand(1);

  CommonArgs common;
  ScanConfig scan;
  double p_min = 0.0, p_max = 0.0;
  int steps = 0;
  double tol = 0.0;
  OverlapArgs overlap;
  double p = 0.0;
  double converge_tol = 1e-10;

  auto* scan_cmd = app.add_subcommand("scan", "reflection scan over p/sqrt(omega)");
  add_common(scan_cmd, common);
  scan_cmd->add_option("--p-min", p_min, "lower p/sqrt(omega)")->required();
  scan_cmd->add_option("--p-max", p_max, "upper p/sqrt(omega)")->required();
  scan_cmd->add_option("--steps", steps, "grid points including both ends")->required();
  scan_cmd->add_option("--nmax", common.n_max, "truncation order (start level with --tol)");
  auto* tol_opt = scan_cmd->add_option("--tol", tol, "auto-converge |B_0|^2 to this tolerance");

  auto* res_cmd = app.add_subcommand("resonance", "ZTP predictions and the complex pole");
  add_common(res_cmd, common);
  res_cmd->add_option("--nmax", common.n_max, "truncation order for the pole search");

  auto* ov_cmd = app.add_subcommand("overlap", "bound-state overlap |F(t)|^2 of a wave packet");
  add_common(ov_cmd, common);
  ov_cmd->add_option("--p0", overlap.p0, "packet centre p0/sqrt(omega) (default: leading ZTP)");
  ov_cmd->add_option("--delta", overlap.delta, "packet width Delta/omega");
  ov_cmd->add_option("--t-max", overlap.t_max, "last omega*t sample");
  ov_cmd->add_option("--t-steps", overlap.t_steps, "number of time samples");
  ov_cmd->add_flag("--fit", overlap.fit, "fit an exponential decay after the peak");
  double fit_start = 0.0, fit_end = 0.0;
  auto* fs = ov_cmd->add_option("--fit-start", fit_start, "fit window start (omega*t)");
  auto* fe = ov_cmd->add_option("--fit-end", fit_end, "fit window end (omega*t)");

  auto* cv_cmd = app.add_subcommand("converge", "|B_0|^2 against doubling n_max");
  add_common(cv_cmd, common);
  cv_cmd->add_option("--p", p, "incoming p/sqrt(omega)")->required();
  cv_cmd->add_option("--nmax", common.n_max, "first truncation level");
  cv_cmd->add_option("--tol", converge_tol, "convergence tolerance on |B_0|^2");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kValidation;
  }

  Format format = Format::csv;
  try {
    format = parse_format(common.format);
    if (common.jobs < 1) throw ValidationError("--jobs must be at least 1");

    if (scan_cmd->parsed()) {
      scan.g0 = common.g0;
      scan.g1 = common.g1;
      scan.omega = common.omega;
      scan.p_min = p_min;
      scan.p_max = p_max;
      scan.steps = steps;
      scan.n_max = common.n_max;
      scan.jobs = common.jobs;
      if (*tol_opt) scan.tol = tol;
      scan.validate();
      const auto rows = run_scan(scan);
      emit(format == Format::json ? scan_json(scan, rows) : scan_csv(scan, rows), common.out, out);
      double worst = 0.0;
      for (const auto& row : rows) worst = std::max(worst, row.flux_residual);
      if (worst > kFluxAuditThreshold) {
        err << "error: flux audit failed, max residual " << format_double(worst) << "\n";
        return kNumerical;
      }
      return kOk;
    }
    if (res_cmd->parsed()) {
      emit(resonance_report(common, format), common.out, out);
      return kOk;
    }
    if (ov_cmd->parsed()) {
      if (*fs) overlap.fit_start = fit_start;
      if (*fe) overlap.fit_end = fit_end;
      emit(overlap_report(common, overlap, format, err), common.out, out);
      return kOk;
    }
    if (cv_cmd->parsed()) {
      emit(converge_report(common, p, converge_tol, format), common.out, out);
      return kOk;
    }
  } catch (const std::exception& e) {
    if (format == Format::json) {
      json report = {{"error", {{"type", error_kind(e)}, {"message", e.what()}}}};
      err << report.dump(2) << "\n";
    } else {
      err << "error: " << error_kind(e) << ": " << e.what() << "\n";
    }
    return exit_code_for(e);
  }
  return kValidation;
}

}  // namespace floquet::cli
