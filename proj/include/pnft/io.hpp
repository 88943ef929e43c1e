#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"
#include "pnft/channel.hpp"
#include "pnft/forward_nft.hpp"
#include "pnft/synthesis.hpp"

namespace pnft::io {

using nlohmann::json;

inline json complex_to_json(const Complex& z) {
  return json{{"re", z.real()}, {"im", z.imag()}};
}

inline Complex complex_from_json(const json& j) {
  if (!j.is_object() || !j.contains("re") || !j.contains("im"))
    throw input_error("expected {\"re\": ..., \"im\": ...}");
  return Complex(j.at("re").get<double>(), j.at("im").get<double>());
}

// Spectrum file: {"points": [{"re": ..., "im": ...}, ...]}, upper half only.
inline json spectrum_to_json(const MainSpectrum& spec) {
  json pts = json::array();
  for (const Complex& p : spec.upper) pts.push_back(complex_to_json(p));
  return json{{"points", pts}};
}

inline MainSpectrum spectrum_from_json(const json& j) {
  if (!j.contains("points") || !j.at("points").is_array())
    throw input_error("spectrum file needs a \"points\" array");
  std::vector<Complex> pts;
  for (const json& p : j.at("points")) pts.push_back(complex_from_json(p));
  return make_main_spectrum(std::move(pts));
}

inline json vector_to_json(const Eigen::VectorXd& v) {
  json out = json::array();
  for (int i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

inline json cvector_to_json(const Eigen::VectorXcd& v) {
  json out = json::array();
  for (int i = 0; i < v.size(); ++i) out.push_back(complex_to_json(v(i)));
  return out;
}

inline json matrix_to_json(const Eigen::MatrixXcd& m) {
  json out = json::array();
  for (int i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (int j = 0; j < m.cols(); ++j) row.push_back(complex_to_json(m(i, j)));
    out.push_back(row);
  }
  return out;
}

inline json params_to_json(const ThetaParams& p) {
  json spec_pts = json::array();
  for (const Complex& pt : p.spectrum.points)
    spec_pts.push_back(complex_to_json(pt));
  return json{{"K0_abs", p.K0_abs},
              {"omega0", p.omega0},
              {"k0", p.k0},
              {"omega", vector_to_json(p.omega)},
              {"k", vector_to_json(p.k)},
              {"delta_plus", vector_to_json(p.delta_plus)},
              {"delta_minus", cvector_to_json(p.delta_minus)},
              {"tau", matrix_to_json(p.tau)},
              {"spectrum", json{{"points", spec_pts}}}};
}

inline ThetaParams params_from_json(const json& j) {
  ThetaParams p;
  p.K0_abs = j.at("K0_abs").get<double>();
  p.omega0 = j.at("omega0").get<double>();
  p.k0 = j.at("k0").get<double>();
  const auto read_vec = [](const json& arr) {
    Eigen::VectorXd v(arr.size());
    for (std::size_t i = 0; i < arr.size(); ++i) v(i) = arr[i].get<double>();
    return v;
  };
  p.omega = read_vec(j.at("omega"));
  p.k = read_vec(j.at("k"));
  p.delta_plus = read_vec(j.at("delta_plus"));
  const json& dm = j.at("delta_minus");
  p.delta_minus.resize(dm.size());
  for (std::size_t i = 0; i < dm.size(); ++i)
    p.delta_minus(i) = complex_from_json(dm[i]);
  const json& tj = j.at("tau");
  p.tau.resize(tj.size(), tj.size());
  for (std::size_t i = 0; i < tj.size(); ++i)
    for (std::size_t k = 0; k < tj[i].size(); ++k)
      p.tau(i, k) = complex_from_json(tj[i][k]);
  for (const json& pt : j.at("spectrum").at("points"))
    p.spectrum.points.push_back(complex_from_json(pt));
  return p;
}

inline json roundtrip_to_json(const RoundtripReport& r) {
  json rows = json::array();
  for (const RoundtripRow& row : r.rows)
    rows.push_back(json{{"nominal", complex_to_json(row.nominal)},
                        {"recovered", complex_to_json(row.recovered)},
                        {"abs_error", row.abs_error}});
  return json{{"points", rows},
              {"max_error", r.max_error},
              {"failed_seeds", r.failed_seeds}};
}

// Homology debug dump: waypoints and sheet-change positions per cycle.
inline json basis_to_json(const HomologyBasis& basis,
                          const OrderedSpectrum& spec) {
  const auto path_json = [&](const SheetedPath& p) {
    json wps = json::array();
    for (const Complex& w : p.waypoints) wps.push_back(complex_to_json(w));
    json ch = json::array();
    for (int k = 0; k < p.segment_count(); ++k)
      for (double s : p.changes[k]) ch.push_back(complex_to_json(p.point(k, s)));
    return json{{"waypoints", wps},
                {"initial_sheet", p.initial_sheet},
                {"sheet_changes", ch}};
  };
  json a = json::array(), b = json::array();
  for (const SheetedPath& p : basis.a) a.push_back(path_json(p));
  for (const SheetedPath& p : basis.b) b.push_back(path_json(p));
  json spc = json::array();
  for (const Complex& p : spec.points) spc.push_back(complex_to_json(p));
  return json{{"spectrum", spc},
              {"epsilon", basis.eps},
              {"M", basis.m},
              {"a_cycles", a},
              {"b_cycles", b},
              {"infinity_path", path_json(basis.infinity_path)}};
}

// Write-then-rename so failures never leave partial outputs behind.
inline void atomic_write(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  const fs::path tmp = target.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw input_error("cannot open " + tmp.string() + " for writing");
    out << content;
    if (!out) throw input_error("short write to " + tmp.string());
  }
  fs::rename(tmp, target);
}

inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline std::string waveform_to_csv(const Waveform& w) {
  std::ostringstream out;
  out << "t,re,im\n";
  for (int i = 0; i < w.size(); ++i)
    out << format_double(w.t(i)) << ',' << format_double(w.samples[i].real())
        << ',' << format_double(w.samples[i].imag()) << '\n';
  return out.str();
}

inline Waveform waveform_from_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line.rfind("t,re,im", 0) != 0)
    throw input_error("waveform CSV must start with the header t,re,im");
  std::vector<double> ts;
  std::vector<Complex> samples;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    double t = 0, re = 0, im = 0;
    if (std::sscanf(line.c_str(), "%lf,%lf,%lf", &t, &re, &im) != 3)
      throw input_error("malformed waveform CSV row: " + line);
    ts.push_back(t);
    samples.emplace_back(re, im);
  }
  if (ts.size() < 2) throw input_error("waveform CSV needs at least two rows");
  Waveform w;
  w.t0 = ts.front();
  w.dt = (ts.back() - ts.front()) / (ts.size() - 1);
  w.samples = std::move(samples);
  return w;
}

inline json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw input_error("cannot read " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw input_error("parse error in " + path + ": " + e.what());
  }
  return j;
}

inline std::string load_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw input_error("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace pnft::io
