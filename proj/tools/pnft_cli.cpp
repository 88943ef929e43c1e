// Command-line front end: parameter computation, waveform synthesis,
// round-trip verification, NFAM link simulation, genus demo and channel
// propagation.

#include <cstdlib>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "pnft/io.hpp"
#include "pnft/modulation.hpp"

using namespace pnft;
using nlohmann::json;

namespace {

double env_tol(const char* name, double fallback) {
  const char* v = std::getenv(name);
  if (!v) return fallback;
  try {
    return std::stod(v);
  } catch (...) {
    throw input_error(std::string(name) + " is not a number: " + v);
  }
}

void emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty())
    std::cout << text << "\n";
  else
    io::atomic_write(out_path, text + "\n");
}

FiberParams fiber_from_config(const json& j) {
  FiberParams f;
  if (j.contains("alpha_db_per_km")) f.alpha_db_per_km = j.at("alpha_db_per_km");
  if (j.contains("beta2_ps2_per_km")) f.beta2_ps2_per_km = j.at("beta2_ps2_per_km");
  if (j.contains("gamma_per_w_km")) f.gamma_per_w_km = j.at("gamma_per_w_km");
  if (j.contains("span_km")) f.span_km = j.at("span_km");
  if (j.contains("noise_figure_db")) f.noise_figure_db = j.at("noise_figure_db");
  if (j.contains("spans")) f.spans = j.at("spans");
  return f;
}

struct Cli {
  double quad_tol = env_tol("PNFT_QUAD_TOL", kQuadTol);
  double theta_tol = env_tol("PNFT_THETA_TOL", kThetaTol);

  std::string spectrum_file;
  std::string out_path;
  std::string config_file;

  int run_params() {
    MainSpectrum spec =
        io::spectrum_from_json(io::load_json(spectrum_file));
    ThetaParams p = compute_params(spec, {quad_tol});
    emit(io::params_to_json(p).dump(2), out_path);
    return 0;
  }

  double t0 = 0.0, t1 = 1.0, z = 0.0;
  int n_samples = 512;
  int run_synth() {
    MainSpectrum spec =
        io::spectrum_from_json(io::load_json(spectrum_file));
    ThetaParams p = compute_params(spec, {quad_tol});
    Waveform w = sample_waveform(p, t0, t1, n_samples, z, theta_tol);
    if (out_path.empty())
      std::cout << io::waveform_to_csv(w);
    else
      io::atomic_write(out_path, io::waveform_to_csv(w));
    return 0;
  }

  double period_override = 0.0;
  int run_roundtrip() {
    MainSpectrum spec =
        io::spectrum_from_json(io::load_json(spectrum_file));
    RoundtripReport rep =
        roundtrip_report(spec, n_samples, period_override);
    emit(io::roundtrip_to_json(rep).dump(2), out_path);
    return 0;
  }

  int sim_symbols = 64;
  double distance_km = 0.0;
  std::uint64_t seed = 1;
  std::string cache_dir = "pnft_cache";
  bool no_noise = false;
  int run_nfam() {
    NfamSimConfig sim;
    if (!config_file.empty()) {
      const json j = io::load_json(config_file);
      sim.fiber = fiber_from_config(j);
      if (j.contains("design_period_s"))
        sim.design_period_s = j.at("design_period_s");
      if (j.contains("bandwidth_ghz")) sim.bandwidth_ghz = j.at("bandwidth_ghz");
      if (j.contains("samples_per_period"))
        sim.samples_per_period = j.at("samples_per_period");
      if (j.contains("prefix_periods")) sim.prefix_periods = j.at("prefix_periods");
      if (j.contains("dz")) sim.dz = j.at("dz");
    }
    sim.n_symbols = sim_symbols;
    sim.distance_km = distance_km;
    sim.seed = seed;
    sim.noise = !no_noise;
    sim.cache_dir = cache_dir;
    Constellation c = build_constellation({}, cache_dir);
    NfamSimReport rep = run_nfam_sim(sim, c);
    json out{{"n_symbols", rep.n_symbols},
             {"bits_total", rep.bits_total},
             {"bit_errors", rep.bit_errors},
             {"erasures", rep.erasures},
             {"ber", rep.ber},
             {"mean_power_dbm", rep.mean_power_dbm},
             {"distance_km", distance_km},
             {"seed", seed},
             {"noise", !no_noise}};
    emit(out.dump(2), out_path);
    return 0;
  }

  int max_genus = 5;
  int run_genus_demo() {
    FiberParams fiber;
    if (!config_file.empty())
      fiber = fiber_from_config(io::load_json(config_file));
    const double period = 2 * M_PI / 40.0;
    UnitMap units = UnitMap::from_period(0.5e-9, period, fiber);
    json rows = json::array();
    for (const MainSpectrum& spec : genus_constellation(max_genus)) {
      ThetaParams p = periodize(compute_params(spec, {quad_tol}), 40.0);
      Waveform w = transmit_symbol(p, period, 512);
      json spectrum = json::array();
      for (const Complex& pt : spec.upper)
        spectrum.push_back(io::complex_to_json(pt));
      rows.push_back(json{{"genus", p.genus()},
                          {"spectrum", spectrum},
                          {"K0_abs", p.K0_abs},
                          {"local_maxima", count_local_maxima(w)},
                          {"power_dbm", symbol_power_dbm(w, units)}});
    }
    emit(json{{"symbols", rows}}.dump(2), out_path);
    return 0;
  }

  std::string waveform_file;
  double dz = 1e-4;
  bool channel_no_noise = false;
  int run_channel() {
    Waveform w = io::waveform_from_csv(io::load_text(waveform_file));
    FiberParams fiber;
    double design_period_s = 0.5e-9;
    if (!config_file.empty()) {
      const json j = io::load_json(config_file);
      fiber = fiber_from_config(j);
      if (j.contains("design_period_s")) design_period_s = j.at("design_period_s");
    }
    // the waveform grid is its own period reference
    UnitMap units =
        UnitMap::from_period(design_period_s, w.duration(), fiber);
    PropagateOptions opts;
    opts.dz = dz;
    opts.noise = !channel_no_noise;
    opts.seed = seed;
    Waveform out = propagate(w, fiber, units, opts);
    if (out_path.empty())
      std::cout << io::waveform_to_csv(out);
    else
      io::atomic_write(out_path, io::waveform_to_csv(out));
    return 0;
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Finite-gap solutions of the focusing NLSE: exact inverse periodic "
      "nonlinear Fourier transform, verification and channel tools"};
  app.footer(
      "Environment overrides: PNFT_QUAD_TOL (contour quadrature tolerance, "
      "default 1e-11), PNFT_THETA_TOL (theta truncation tolerance, default "
      "1e-12).\nExit codes: 0 ok, 2 input error, 3 numerical failure, 4 "
      "validation failure.");
  app.require_subcommand(1);

  Cli cli;

  CLI::App* params = app.add_subcommand(
      "params", "Compute the theta-function parameters of a spectrum");
  params->add_option("spectrum", cli.spectrum_file, "Spectrum JSON file")
      ->required();
  params->add_option("-o,--out", cli.out_path, "Write JSON here");

  CLI::App* synth =
      app.add_subcommand("synth", "Sample the waveform q(t, z) to CSV");
  synth->add_option("spectrum", cli.spectrum_file, "Spectrum JSON file")
      ->required();
  synth->add_option("--t0", cli.t0, "Start time");
  synth->add_option("--t1", cli.t1, "End time")->required();
  synth->add_option("-n,--samples", cli.n_samples, "Sample count");
  synth->add_option("--z", cli.z, "Propagation distance (dimensionless)");
  synth->add_option("-o,--out", cli.out_path, "Write CSV here");

  CLI::App* roundtrip = app.add_subcommand(
      "roundtrip", "Synthesize one period and recover the spectrum");
  roundtrip->add_option("spectrum", cli.spectrum_file, "Spectrum JSON file")
      ->required();
  roundtrip->add_option("-n,--samples", cli.n_samples, "Samples per period");
  roundtrip->add_option("--period", cli.period_override,
                        "Period override (required for genus 0)");
  roundtrip->add_option("-o,--out", cli.out_path, "Write report JSON here");

  CLI::App* nfam = app.add_subcommand(
      "nfam-sim", "Desk-scale NFAM transmission: BER at a fixed seed");
  nfam->add_option("--symbols", cli.sim_symbols, "Number of symbols");
  nfam->add_option("--distance-km", cli.distance_km,
                   "Link length (integer number of spans)");
  nfam->add_option("--seed", cli.seed, "RNG seed");
  nfam->add_option("--config", cli.config_file, "Fiber config JSON");
  nfam->add_option("--cache", cli.cache_dir, "Constellation cache directory");
  nfam->add_flag("--no-noise", cli.no_noise, "Disable ASE loading");
  nfam->add_option("-o,--out", cli.out_path, "Write report JSON here");

  CLI::App* genus = app.add_subcommand(
      "genus-demo", "Genus-modulation constellation summary");
  genus->add_option("--max-genus", cli.max_genus, "Largest genus");
  genus->add_option("--config", cli.config_file, "Fiber config JSON");
  genus->add_option("-o,--out", cli.out_path, "Write JSON here");

  CLI::App* channel = app.add_subcommand(
      "channel", "Propagate a waveform CSV through the fiber model");
  channel->add_option("waveform", cli.waveform_file, "Waveform CSV")
      ->required();
  channel->add_option("--config", cli.config_file, "Fiber config JSON");
  channel->add_option("--dz", cli.dz, "Split-step size (dimensionless)");
  channel->add_option("--seed", cli.seed, "Noise seed");
  channel->add_flag("--no-noise", cli.channel_no_noise, "Disable ASE loading");
  channel->add_option("-o,--out", cli.out_path, "Write CSV here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (params->parsed()) return cli.run_params();
    if (synth->parsed()) return cli.run_synth();
    if (roundtrip->parsed()) return cli.run_roundtrip();
    if (nfam->parsed()) return cli.run_nfam();
    if (genus->parsed()) return cli.run_genus_demo();
    if (channel->parsed()) return cli.run_channel();
  } catch (const input_error& e) {
    std::cerr << json{{"error", {{"type", "input"}, {"message", e.what()}}}}
              << "\n";
    return 2;
  } catch (const validation_error& e) {
    std::cerr << json{{"error", {{"type", "validation"}, {"message", e.what()}}}}
              << "\n";
    return 4;
  } catch (const numerical_error& e) {
    std::cerr << json{{"error", {{"type", "numerical"}, {"message", e.what()}}}}
              << "\n";
    return 3;
  }
  return 0;
}
