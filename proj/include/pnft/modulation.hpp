#pragma once

#include <array>
#include <cstdint>
#include <future>
#include <optional>

#include "pnft/channel.hpp"
#include "pnft/forward_nft.hpp"
#include "pnft/io.hpp"
#include "pnft/synthesis.hpp"

namespace pnft {

struct NfamConfig {
  std::array<double, 4> real_parts{-30.0, -10.0, 10.0, 30.0};
  std::array<double, 4> levels{5.0, 7.0, 9.0, 11.0};
  double snap_base = 40.0;

  void validate() const {
    for (int i = 0; i + 1 < 4; ++i) {
      if (!(real_parts[i] < real_parts[i + 1]))
        throw validation_error("real parts must be strictly increasing");
      if (!(levels[i] < levels[i + 1]))
        throw validation_error("levels must be strictly increasing");
    }
  }
};

namespace detail {

// Canonical 2-bit Gray sequence 00, 01, 11, 10 mapped onto ascending levels.
inline int gray_to_index(int two_bits) { return two_bits ^ (two_bits >> 1); }

inline int index_to_gray(int index) {
  for (int v = 0; v < 4; ++v)
    if (gray_to_index(v) == index) return v;
  return 0;
}

}  // namespace detail

// Bits are consumed MSB first, two per position: bits 7..6 select g1 (the
// smallest real part), bits 1..0 select g4.
inline MainSpectrum nfam_encode(std::uint8_t bits, const NfamConfig& cfg = {}) {
  cfg.validate();
  std::vector<Complex> pts;
  for (int j = 0; j < 4; ++j) {
    const int two = (bits >> (6 - 2 * j)) & 0x3;
    pts.emplace_back(cfg.real_parts[j], cfg.levels[detail::gray_to_index(two)]);
  }
  return make_main_spectrum(std::move(pts));
}

// Demap a recovered point set: keep the 4 points of largest imaginary part,
// order by real part, quantize each level, invert the Gray map. Fewer than 4
// usable points is a symbol erasure (empty result).
inline std::optional<std::uint8_t> nfam_demap(std::vector<Complex> recovered,
                                              const NfamConfig& cfg = {}) {
  cfg.validate();
  if (recovered.size() < 4) return std::nullopt;
  std::sort(recovered.begin(), recovered.end(), [](Complex a, Complex b) {
    if (a.imag() != b.imag()) return a.imag() > b.imag();
    return std::abs(a.real()) < std::abs(b.real());
  });
  recovered.resize(4);
  std::sort(recovered.begin(), recovered.end(),
            [](Complex a, Complex b) { return a.real() < b.real(); });
  std::uint8_t bits = 0;
  for (int j = 0; j < 4; ++j) {
    int best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (int l = 0; l < 4; ++l) {
      const double d = std::abs(recovered[j].imag() - cfg.levels[l]);
      if (d < best_d) {
        best_d = d;
        best = l;
      }
    }
    bits = static_cast<std::uint8_t>((bits << 2) | detail::index_to_gray(best));
  }
  return bits;
}

// Genus-modulation constellation: lambda_k = 20k + 5i, lowest g+1 points for
// the genus-g symbol.
inline std::vector<MainSpectrum> genus_constellation(int g_max) {
  if (g_max < 1) throw input_error("genus constellation needs g_max >= 1");
  std::vector<MainSpectrum> out;
  for (int g = 1; g <= g_max; ++g) {
    std::vector<Complex> pts;
    for (int k = 1; k <= g + 1; ++k) pts.emplace_back(20.0 * k, 5.0);
    out.push_back(make_main_spectrum(std::move(pts)));
  }
  return out;
}

// Mean power of one period in dBm under the unit map.
inline double symbol_power_dbm(const Waveform& one_period,
                               const UnitMap& units) {
  double acc = 0.0;
  for (const Complex& q : one_period.samples) acc += std::norm(q);
  const double watts = units.p0_w * acc / one_period.size();
  return 10.0 * std::log10(watts / 1e-3);
}

// The synthesized solution carries exp(i omega0 t); with it the snapped
// waveform is only periodic up to a phase, which breaks the windowed forward
// transform. The transmitter therefore sends the bare theta ratio - a pure
// spectral recentering by omega0/2 that the demapping is invariant to - so
// the symbol is exactly periodic and cyclic prefixes are true continuations.
inline Waveform transmit_symbol(const ThetaParams& params, double period,
                                int n_samples) {
  ThetaParams baseband = params;
  baseband.omega0 = 0.0;
  Waveform w = sample_period(baseband, period, n_samples, 0.0);
  w.period_hint = period;
  return w;
}

// Power-weighted mean angular frequency of the sampled field.
inline double center_frequency(const Waveform& w) {
  Eigen::FFT<double> fft;
  std::vector<Complex> spec(w.samples.size());
  std::vector<Complex> in = w.samples;
  fft.fwd(spec, in);
  const int n = static_cast<int>(spec.size());
  double num = 0.0, den = 0.0;
  for (int i = 0; i < n; ++i) {
    const int k = i <= n / 2 ? i : i - n;
    const double wk = 2.0 * M_PI * k / (n * w.dt);
    num += wk * std::norm(spec[i]);
    den += std::norm(spec[i]);
  }
  return den > 0.0 ? num / den : 0.0;
}

struct ConstellationEntry {
  std::uint8_t bits = 0;
  ThetaParams params;  // periodized
};

struct Constellation {
  NfamConfig cfg;
  std::vector<ConstellationEntry> entries;  // indexed by the 8-bit pattern

  double period() const { return 2.0 * M_PI / cfg.snap_base; }
};

namespace detail {

inline std::string config_hash(const NfamConfig& cfg) {
  nlohmann::json j{{"real_parts", cfg.real_parts},
                   {"levels", cfg.levels},
                   {"snap_base", cfg.snap_base}};
  const std::string s = j.dump();
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace detail

// Parameter computation is the expensive step, so the 256-symbol table is
// cached on disk keyed by the config hash.
inline Constellation build_constellation(const NfamConfig& cfg = {},
                                         const std::string& cache_dir = "",
                                         int workers = 0) {
  cfg.validate();
  namespace fs = std::filesystem;
  std::string cache_file;
  if (!cache_dir.empty()) {
    fs::create_directories(cache_dir);
    cache_file = (fs::path(cache_dir) /
                  ("nfam_" + detail::config_hash(cfg) + ".json"))
                     .string();
    if (fs::exists(cache_file)) {
      const nlohmann::json j = io::load_json(cache_file);
      Constellation c;
      c.cfg = cfg;
      c.entries.resize(256);
      for (const nlohmann::json& e : j.at("symbols")) {
        const int bits = e.at("bits").get<int>();
        c.entries[bits].bits = static_cast<std::uint8_t>(bits);
        c.entries[bits].params = io::params_from_json(e.at("params"));
      }
      return c;
    }
  }

  Constellation c;
  c.cfg = cfg;
  c.entries.resize(256);
  const auto make_entry = [&](int bits) {
    ConstellationEntry e;
    e.bits = static_cast<std::uint8_t>(bits);
    // The strongest symbols push omega past the default proximity bound of
    // the snap; they still sit clearly nearest their multiple of the base.
    e.params = periodize(
        compute_params(nfam_encode(static_cast<std::uint8_t>(bits), cfg)),
        cfg.snap_base, 0.35);
    return e;
  };

  if (workers > 1) {
    std::vector<std::future<ConstellationEntry>> futures(256);
    for (int bits = 0; bits < 256; ++bits)
      futures[bits] =
          std::async(std::launch::async, [&, bits] { return make_entry(bits); });
    for (int bits = 0; bits < 256; ++bits) c.entries[bits] = futures[bits].get();
  } else {
    for (int bits = 0; bits < 256; ++bits) c.entries[bits] = make_entry(bits);
  }

  if (!cache_file.empty()) {
    nlohmann::json symbols = nlohmann::json::array();
    for (const ConstellationEntry& e : c.entries)
      symbols.push_back(nlohmann::json{
          {"bits", static_cast<int>(e.bits)},
          {"params", io::params_to_json(e.params)}});
    io::atomic_write(cache_file,
                     nlohmann::json{{"config_hash", detail::config_hash(cfg)},
                                    {"symbols", symbols}}
                         .dump());
  }
  return c;
}

struct ReceiveResult {
  std::optional<std::uint8_t> bits;
  std::vector<Complex> recovered;  // upper points, shift removed
  double lambda_shift = 0.0;
};

// Full receiver for one frame of n_periods + 1 periods: strip to the middle
// period, locate the constellation along the real axis from the linear
// center frequency (detection does not depend on the absolute position of
// the spectrum), search around the shifted grid and demap.
inline ReceiveResult nfam_receive(const Waveform& frame, int n_periods,
                                  const NfamConfig& cfg = {},
                                  const FindOptions& find_opts = {}) {
  Waveform full = frame;
  if (!full.period_hint)
    full.period_hint = frame.duration() / (n_periods + 1);
  const Waveform window = strip_prefix(full, n_periods);

  // A spectral point at Re(lambda) = R rides at angular frequency -2R; a
  // Re-centered constellation therefore sits near shift = -mean_frequency/2.
  // The one-period spectrum is bin-quantized, so the estimate can be off by
  // a few units; widen the seed grid until four points emerge.
  const double shift = -0.5 * center_frequency(window);

  ReceiveResult out;
  out.lambda_shift = shift;
  for (const std::vector<double>& offsets :
       {std::vector<double>{0.0}, std::vector<double>{-8, -4, 4, 8}}) {
    std::vector<Complex> seeds;
    for (double off : offsets)
      for (double re : cfg.real_parts)
        for (double lv : cfg.levels) seeds.emplace_back(re + shift + off, lv);
    const SpectrumSearch found = find_main_spectrum(window, seeds, find_opts);
    for (const Complex& p : found.points) {
      if (p.imag() <= 0.0) continue;
      bool dup = false;
      for (const Complex& q : out.recovered)
        if (std::abs(q - (p - shift)) < find_opts.dedup_tol) dup = true;
      if (!dup) out.recovered.push_back(p - shift);
    }
    if (out.recovered.size() >= 4) break;
  }
  std::sort(out.recovered.begin(), out.recovered.end(),
            [](Complex a, Complex b) { return a.real() < b.real(); });
  out.bits = nfam_demap(out.recovered, cfg);
  return out;
}

// Local maxima of |q| over one period, with cyclic wrap.
inline int count_local_maxima(const Waveform& w) {
  const int n = w.size();
  int count = 0;
  for (int i = 0; i < n; ++i) {
    const double prev = std::abs(w.samples[(i + n - 1) % n]);
    const double cur = std::abs(w.samples[i]);
    const double next = std::abs(w.samples[(i + 1) % n]);
    if (cur > prev && cur >= next) ++count;
  }
  return count;
}

struct NfamSimConfig {
  NfamConfig constellation;
  FiberParams fiber;
  double distance_km = 0.0;
  int n_symbols = 64;
  std::uint64_t seed = 1;
  int samples_per_period = 1024;
  int prefix_periods = 3;
  double design_period_s = 0.5e-9;
  double bandwidth_ghz = 12.0;  // receiver band-pass (full width)
  bool noise = true;
  double dz = 1e-4;
  std::string cache_dir;
};

struct NfamSimReport {
  int n_symbols = 0;
  long bits_total = 0;
  long bit_errors = 0;
  int erasures = 0;
  double ber = 0.0;
  double mean_power_dbm = 0.0;
};

// Desk-scale transmission loop: encode pseudo-random bits, synthesize from
// the cached constellation, prefix, propagate, receive, demap, count.
// Per-symbol RNG streams keep the report independent of evaluation order.
inline NfamSimReport run_nfam_sim(const NfamSimConfig& sim,
                                  const Constellation& constellation) {
  FiberParams fiber = sim.fiber;
  const double spans_d = sim.distance_km / fiber.span_km;
  fiber.spans = static_cast<int>(std::lround(spans_d));
  if (std::abs(spans_d - fiber.spans) > 1e-9)
    throw input_error("distance must be an integer number of spans");

  const double period = constellation.period();
  const UnitMap units =
      UnitMap::from_period(sim.design_period_s, period, fiber);

  NfamSimReport report;
  report.n_symbols = sim.n_symbols;
  double power_acc = 0.0;
  std::mt19937_64 bitgen(sim.seed);
  for (int i = 0; i < sim.n_symbols; ++i) {
    const std::uint8_t tx_bits = static_cast<std::uint8_t>(bitgen() & 0xff);
    const ConstellationEntry& entry = constellation.entries[tx_bits];
    Waveform sym =
        transmit_symbol(entry.params, period, sim.samples_per_period);
    power_acc += symbol_power_dbm(sym, units);
    Waveform frame = add_prefix(sym, sim.prefix_periods);
    if (fiber.spans > 0) {
      PropagateOptions opts;
      opts.dz = sim.dz;
      opts.noise = sim.noise;
      opts.seed = sim.seed ^ (0x9e3779b97f4a7c15ull * (i + 1));
      frame = propagate(frame, fiber, units, opts);
      // The ASE is loaded over the whole sampled band; the receiver admits
      // a band around the signal. Pure dispersion/nonlinearity needs no
      // filtering, so noiseless runs skip it.
      if (sim.noise)
        frame = low_pass(frame, M_PI * sim.bandwidth_ghz * 1e9 * units.t0_s,
                         center_frequency(frame));
    }
    ReceiveResult rx;
    try {
      rx = nfam_receive(frame, sim.prefix_periods, constellation.cfg);
    } catch (const numerical_error&) {
      rx.bits.reset();
    }
    report.bits_total += 8;
    if (!rx.bits) {
      ++report.erasures;
      report.bit_errors += 8;  // an erased symbol loses all its bits
      continue;
    }
    const std::uint8_t diff = *rx.bits ^ tx_bits;
    for (int b = 0; b < 8; ++b) report.bit_errors += (diff >> b) & 1;
  }
  report.ber =
      report.bits_total ? static_cast<double>(report.bit_errors) /
                              static_cast<double>(report.bits_total)
                        : 0.0;
  report.mean_power_dbm = sim.n_symbols ? power_acc / sim.n_symbols : 0.0;
  return report;
}

}  // namespace pnft
