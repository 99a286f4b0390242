#include "sptq/run_config.hpp"

#include "sptq/calibration.hpp"
#include "sptq/fit.hpp"
#include "sptq/version.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>

namespace sptq {

namespace {

using nlohmann::json;

constexpr double kDegToRad = std::numbers::pi / 180.0;
constexpr double kRadToDeg = 180.0 / std::numbers::pi;

const char* const kExperiments[] = {"truth-table", "pol-scan", "ifo-scan",
                                    "visibility-curve", "swap", "ghz", "momentum-check"};

bool known_experiment(const std::string& name) {
  return std::find(std::begin(kExperiments), std::end(kExperiments), name) !=
         std::end(kExperiments);
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void check_keys(const json& obj, const std::string& path,
                std::initializer_list<const char*> allowed) {
  for (const auto& [key, value] : obj.items()) {
    (void)value;
    if (std::find_if(allowed.begin(), allowed.end(),
                     [&](const char* a) { return key == a; }) == allowed.end())
      throw ConfigError(path.empty() ? key : path + "." + key, "unknown field");
  }
}

std::string joined(const std::string& path, const char* key) {
  return path.empty() ? key : path + "." + key;
}

double get_num(const json& obj, const std::string& path, const char* key, double fallback) {
  const auto it = obj.find(key);
  if (it == obj.end()) return fallback;
  if (!it->is_number()) throw ConfigError(joined(path, key), "expected a number");
  return it->get<double>();
}

int get_int(const json& obj, const std::string& path, const char* key, int fallback) {
  const auto it = obj.find(key);
  if (it == obj.end()) return fallback;
  if (!it->is_number_integer()) throw ConfigError(joined(path, key), "expected an integer");
  return it->get<int>();
}

std::uint64_t get_u64(const json& obj, const std::string& path, const char* key,
                      std::uint64_t fallback) {
  const auto it = obj.find(key);
  if (it == obj.end()) return fallback;
  if (!it->is_number_integer() || (it->is_number_integer() && it->get<long long>() < 0 &&
                                   !it->is_number_unsigned()))
    throw ConfigError(joined(path, key), "expected a non-negative integer");
  return it->get<std::uint64_t>();
}

bool get_bool(const json& obj, const std::string& path, const char* key, bool fallback) {
  const auto it = obj.find(key);
  if (it == obj.end()) return fallback;
  if (!it->is_boolean()) throw ConfigError(joined(path, key), "expected a boolean");
  return it->get<bool>();
}

std::string get_str(const json& obj, const std::string& path, const char* key,
                    const std::string& fallback) {
  const auto it = obj.find(key);
  if (it == obj.end()) return fallback;
  if (!it->is_string()) throw ConfigError(joined(path, key), "expected a string");
  return it->get<std::string>();
}

ImperfectionSet parse_imperfections(const json& obj) {
  const std::string path = "imperfections";
  check_keys(obj, path,
             {"preset", "pbs_transmission_h", "plate_transmission_h", "plate_transmission_v",
              "bs_reflectivity", "coherence_length_m", "gate_error_mean",
              "gate_error_asymmetry", "envelope_contrast"});
  ImperfectionSet imp;
  const std::string preset = get_str(obj, path, "preset", "ideal");
  if (preset == "paper") {
    imp = paper_imperfections();
  } else if (preset != "ideal") {
    throw ConfigError("imperfections.preset", "expected 'ideal' or 'paper', got '" + preset + "'");
  }
  imp.pbs_transmission_h = get_num(obj, path, "pbs_transmission_h", imp.pbs_transmission_h);
  imp.plate_transmission_h = get_num(obj, path, "plate_transmission_h", imp.plate_transmission_h);
  imp.plate_transmission_v = get_num(obj, path, "plate_transmission_v", imp.plate_transmission_v);
  imp.bs_reflectivity = get_num(obj, path, "bs_reflectivity", imp.bs_reflectivity);
  if (const auto it = obj.find("coherence_length_m"); it != obj.end()) {
    if (it->is_string() && it->get<std::string>() == "infinite")
      imp.coherence_length = std::numeric_limits<double>::infinity();
    else if (it->is_number())
      imp.coherence_length = it->get<double>();
    else
      throw ConfigError("imperfections.coherence_length_m",
                        "expected a number or \"infinite\"");
  }
  imp.gate_error_mean = get_num(obj, path, "gate_error_mean", imp.gate_error_mean);
  imp.gate_error_asymmetry = get_num(obj, path, "gate_error_asymmetry", imp.gate_error_asymmetry);
  imp.envelope_contrast = get_num(obj, path, "envelope_contrast", imp.envelope_contrast);
  try {
    imp.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError("imperfections", e.what());
  }
  return imp;
}

CountingConfig parse_counting(const json& obj) {
  const std::string path = "counting";
  check_keys(obj, path,
             {"pair_rate_hz", "detection_efficiency", "integration_time_s",
              "coincidence_window_s", "singles_rate_signal_hz", "singles_rate_idler_hz",
              "rng_seed"});
  CountingConfig cfg;
  cfg.pair_rate = get_num(obj, path, "pair_rate_hz", cfg.pair_rate);
  cfg.detection_efficiency = get_num(obj, path, "detection_efficiency", cfg.detection_efficiency);
  cfg.integration_time = get_num(obj, path, "integration_time_s", cfg.integration_time);
  cfg.coincidence_window = get_num(obj, path, "coincidence_window_s", cfg.coincidence_window);
  cfg.singles_rate_signal = get_num(obj, path, "singles_rate_signal_hz", cfg.singles_rate_signal);
  cfg.singles_rate_idler = get_num(obj, path, "singles_rate_idler_hz", cfg.singles_rate_idler);
  cfg.rng_seed = get_u64(obj, path, "rng_seed", cfg.rng_seed);
  try {
    cfg.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError("counting", e.what());
  }
  return cfg;
}

std::string normalize_blocked(std::string v) {
  std::transform(v.begin(), v.end(), v.begin(),
                 [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  if (v == "NONE") return "none";
  if (v == "T" || v == "B") return v;
  throw ConfigError("scan.blocked", "expected 'T', 'B' or 'none'");
}

std::vector<double> linspace_deg(double start_deg, double stop_deg, int n) {
  std::vector<double> out(n);
  for (int i = 0; i < n; ++i)
    out[i] = (start_deg + (stop_deg - start_deg) * i / (n - 1)) * kDegToRad;
  return out;
}

json fit_to_json(const FitResult& fit) {
  return json{{"alpha", fit.alpha},           {"beta", fit.beta},
              {"delta", fit.delta},           {"gamma", fit.gamma},
              {"alpha_err", fit.alpha_err},   {"beta_err", fit.beta_err},
              {"delta_err", fit.delta_err},   {"gamma_err", fit.gamma_err},
              {"rss", fit.rss},               {"converged", fit.converged},
              {"degenerate", fit.degenerate}, {"iterations", fit.iterations}};
}

json config_echo(const RunConfig& cfg) {
  json imp{{"pbs_transmission_h", cfg.imperfections.pbs_transmission_h},
           {"plate_transmission_h", cfg.imperfections.plate_transmission_h},
           {"plate_transmission_v", cfg.imperfections.plate_transmission_v},
           {"bs_reflectivity", cfg.imperfections.bs_reflectivity},
           {"gate_error_mean", cfg.imperfections.gate_error_mean},
           {"gate_error_asymmetry", cfg.imperfections.gate_error_asymmetry},
           {"envelope_contrast", cfg.imperfections.envelope_contrast}};
  if (std::isinf(cfg.imperfections.coherence_length))
    imp["coherence_length_m"] = "infinite";
  else
    imp["coherence_length_m"] = cfg.imperfections.coherence_length;

  return json{
      {"experiment", cfg.experiment},
      {"exact", cfg.exact},
      {"output_dir", cfg.output_dir},
      {"imperfections", imp},
      {"counting",
       {{"pair_rate_hz", cfg.counting.pair_rate},
        {"detection_efficiency", cfg.counting.detection_efficiency},
        {"integration_time_s", cfg.counting.integration_time},
        {"coincidence_window_s", cfg.counting.coincidence_window},
        {"singles_rate_signal_hz", cfg.counting.singles_rate_signal},
        {"singles_rate_idler_hz", cfg.counting.singles_rate_idler},
        {"rng_seed", cfg.counting.rng_seed}}},
      {"scan",
       {{"theta_start_deg", cfg.theta_start_deg},
        {"theta_stop_deg", cfg.theta_stop_deg},
        {"theta_points", cfg.theta_points},
        {"momentum_port", cfg.momentum_port},
        {"theta_a_deg", cfg.theta_a_deg},
        {"velocity_m_per_s", cfg.ifo.scan_velocity},
        {"time_start_s", cfg.ifo.time_start},
        {"time_stop_s", cfg.ifo.time_stop},
        {"time_points", cfg.ifo.time_points},
        {"wavelength_m", cfg.ifo.wavelength},
        {"curve_theta_start_deg", cfg.curve_theta_start_deg},
        {"curve_theta_stop_deg", cfg.curve_theta_stop_deg},
        {"curve_theta_points", cfg.curve_theta_points},
        {"blocked", cfg.blocked}}}};
}

class CsvWriter {
 public:
  explicit CsvWriter(const std::string& path) : out_(path, std::ios::binary) {
    if (!out_) throw IoError("cannot open '" + path + "' for writing");
  }
  void row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out_ << ',';
      out_ << cells[i];
    }
    out_ << '\n';
  }
  void close(const std::string& path) {
    out_.flush();
    if (!out_) throw IoError("write failure on '" + path + "'");
    out_.close();
  }

 private:
  std::ofstream out_;
};

std::string count_cell(const std::optional<long long>& c) {
  return c ? std::to_string(*c) : std::string();
}

std::string bits_label(int index, int width) {
  std::string s(width, '0');
  for (int b = 0; b < width; ++b)
    if (index & (1 << (width - 1 - b))) s[b] = '1';
  return s;
}

// Fit a scan trace: ordinates are sampled counts when present, total
// detection probabilities otherwise.
std::pair<std::vector<double>, std::vector<double>> trace_xy(const ScanTrace& trace) {
  std::vector<double> xs, ys;
  for (const ScanPoint& pt : trace.points) {
    xs.push_back(pt.control);
    ys.push_back(pt.count ? static_cast<double>(*pt.count)
                          : pt.probability * pt.success_probability);
  }
  return {std::move(xs), std::move(ys)};
}

json visibility_or_null(const FitResult& fit) {
  if (fit.degenerate || !fit.converged) return nullptr;
  const Visibility v = visibility(fit);
  return json{{"value", v.value}, {"std_error", v.std_error}};
}

}  // namespace

std::vector<double> RunConfig::polarization_angles() const {
  return linspace_deg(theta_start_deg, theta_stop_deg, theta_points);
}

std::vector<double> RunConfig::curve_angles() const {
  return linspace_deg(curve_theta_start_deg, curve_theta_stop_deg, curve_theta_points);
}

RunConfig parse_config(const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError("<document>", e.what());
  }
  if (!root.is_object()) throw ConfigError("<document>", "config must be a JSON object");
  check_keys(root, "", {"experiment", "imperfections", "exact", "counting", "scan",
                        "output_dir"});

  RunConfig cfg;
  cfg.experiment = get_str(root, "", "experiment", "");
  if (!cfg.experiment.empty() && !known_experiment(cfg.experiment))
    throw ConfigError("experiment", "unknown experiment '" + cfg.experiment + "'");
  cfg.exact = get_bool(root, "", "exact", false);
  if (cfg.exact && root.contains("counting"))
    throw ConfigError("exact", "exact mode and a counting section are mutually exclusive");
  if (root.contains("imperfections")) {
    if (!root["imperfections"].is_object())
      throw ConfigError("imperfections", "expected an object");
    cfg.imperfections = parse_imperfections(root["imperfections"]);
  }
  if (root.contains("counting")) {
    if (!root["counting"].is_object()) throw ConfigError("counting", "expected an object");
    cfg.counting = parse_counting(root["counting"]);
  }
  cfg.output_dir = get_str(root, "", "output_dir", cfg.output_dir);

  if (root.contains("scan")) {
    const json& scan = root["scan"];
    if (!scan.is_object()) throw ConfigError("scan", "expected an object");
    const std::string path = "scan";
    check_keys(scan, path,
               {"theta_start_deg", "theta_stop_deg", "theta_points", "momentum_port",
                "theta_a_deg", "velocity_m_per_s", "time_start_s", "time_stop_s",
                "time_points", "wavelength_m", "curve_theta_start_deg",
                "curve_theta_stop_deg", "curve_theta_points", "blocked"});
    cfg.theta_start_deg = get_num(scan, path, "theta_start_deg", cfg.theta_start_deg);
    cfg.theta_stop_deg = get_num(scan, path, "theta_stop_deg", cfg.theta_stop_deg);
    cfg.theta_points = get_int(scan, path, "theta_points", cfg.theta_points);
    cfg.momentum_port = get_int(scan, path, "momentum_port", cfg.momentum_port);
    cfg.theta_a_deg = get_num(scan, path, "theta_a_deg", cfg.theta_a_deg);
    cfg.ifo.scan_velocity = get_num(scan, path, "velocity_m_per_s", cfg.ifo.scan_velocity);
    cfg.ifo.time_start = get_num(scan, path, "time_start_s", cfg.ifo.time_start);
    cfg.ifo.time_stop = get_num(scan, path, "time_stop_s", cfg.ifo.time_stop);
    cfg.ifo.time_points = get_int(scan, path, "time_points", cfg.ifo.time_points);
    cfg.ifo.wavelength = get_num(scan, path, "wavelength_m", cfg.ifo.wavelength);
    cfg.curve_theta_start_deg =
        get_num(scan, path, "curve_theta_start_deg", cfg.curve_theta_start_deg);
    cfg.curve_theta_stop_deg =
        get_num(scan, path, "curve_theta_stop_deg", cfg.curve_theta_stop_deg);
    cfg.curve_theta_points = get_int(scan, path, "curve_theta_points", cfg.curve_theta_points);
    if (scan.contains("blocked"))
      cfg.blocked = normalize_blocked(get_str(scan, path, "blocked", cfg.blocked));
  }

  if (cfg.theta_points < 5)
    throw ConfigError("scan.theta_points", "need at least 5 scan angles");
  if (cfg.momentum_port != 0 && cfg.momentum_port != 1)
    throw ConfigError("scan.momentum_port", "expected 0 or 1");
  if (cfg.curve_theta_points < 5)
    throw ConfigError("scan.curve_theta_points", "need at least 5 analysis angles");
  try {
    cfg.ifo.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError("scan", e.what());
  }
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

RunOutput run_experiment(const RunConfig& cfg) {
  if (!known_experiment(cfg.experiment))
    throw ConfigError("experiment", "unknown experiment '" + cfg.experiment + "'");
  try {
    cfg.imperfections.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError("imperfections", e.what());
  }
  try {
    cfg.counting.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError("counting", e.what());
  }

  std::error_code ec;
  std::filesystem::create_directories(cfg.output_dir, ec);
  if (ec) throw IoError("cannot create output directory '" + cfg.output_dir + "'");

  const std::string base = cfg.output_dir + "/" + cfg.experiment;
  RunOutput out{base + "_result.json", base + "_table.csv"};
  const std::optional<CountingConfig> counting =
      cfg.exact ? std::nullopt : std::optional<CountingConfig>(cfg.counting);

  json results;
  CsvWriter csv(out.table_path);

  try {
    if (cfg.experiment == "truth-table") {
      const TruthTable table = truth_table(cfg.imperfections);
      csv.row({"input_index", "input_label", "output_index", "output_label", "probability"});
      for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
          csv.row({std::to_string(i), bits_label(i, 2), std::to_string(j), bits_label(j, 2),
                   fmt(table.probabilities(i, j))});
      json rows = json::array();
      for (int i = 0; i < 4; ++i) {
        json r = json::array();
        for (int j = 0; j < 4; ++j) r.push_back(table.probabilities(i, j));
        rows.push_back(r);
      }
      const auto err = table.row_error();
      results = {{"probabilities", rows},
                 {"row_error", {err[0], err[1], err[2], err[3]}}};
    } else if (cfg.experiment == "pol-scan") {
      const std::vector<double> angles = cfg.polarization_angles();
      const ScanTrace trace =
          polarization_scan(angles, cfg.momentum_port, cfg.imperfections, counting);
      csv.row({"point_index", "theta_a_deg", "probability", "success_probability", "count"});
      for (std::size_t i = 0; i < trace.points.size(); ++i) {
        const ScanPoint& pt = trace.points[i];
        csv.row({std::to_string(i), fmt(pt.control * kRadToDeg), fmt(pt.probability),
                 fmt(pt.success_probability), count_cell(pt.count)});
      }
      const auto [xs, ys] = trace_xy(trace);
      const FitResult fit = fit_malus(xs, ys);
      results = {{"momentum_port", cfg.momentum_port},
                 {"fit", fit_to_json(fit)},
                 {"visibility", visibility_or_null(fit)}};
    } else if (cfg.experiment == "ifo-scan") {
      const ScanTrace trace = interferometer_scan(cfg.theta_a_deg * kDegToRad, cfg.ifo,
                                                  cfg.imperfections, counting);
      csv.row({"point_index", "time_s", "phase_rad", "path_mismatch_m", "probability",
               "success_probability", "count"});
      for (std::size_t i = 0; i < trace.points.size(); ++i) {
        const ScanPoint& pt = trace.points[i];
        const double mismatch = cfg.ifo.scan_velocity * pt.control;
        const double phase = 2.0 * std::numbers::pi * mismatch / cfg.ifo.wavelength;
        csv.row({std::to_string(i), fmt(pt.control), fmt(phase), fmt(mismatch),
                 fmt(pt.probability), fmt(pt.success_probability), count_cell(pt.count)});
      }
      const auto [xs, ys] = trace_xy(trace);
      const FitResult fit = fit_sin_squared(xs, ys);
      results = {{"theta_a_deg", cfg.theta_a_deg},
                 {"fit", fit_to_json(fit)},
                 {"visibility", visibility_or_null(fit)}};
    } else if (cfg.experiment == "visibility-curve") {
      const VisibilityCurve curve =
          visibility_curve(cfg.curve_angles(), cfg.imperfections, cfg.ifo, counting);
      csv.row({"point_index", "theta_a_deg", "fit_max", "fit_min", "max_err", "min_err",
               "visibility", "visibility_err"});
      for (std::size_t i = 0; i < curve.points.size(); ++i) {
        const FringePoint& pt = curve.points[i];
        csv.row({std::to_string(i), fmt(pt.theta * kRadToDeg), fmt(pt.fit_max),
                 fmt(pt.fit_min), fmt(pt.max_err), fmt(pt.min_err), fmt(pt.visibility),
                 fmt(pt.visibility_err)});
      }
      results = {{"peak_angle_deg", curve.peak_angle * kRadToDeg},
                 {"trough_angle_deg", curve.trough_angle * kRadToDeg},
                 {"crossing_angle_deg", curve.crossing_angle * kRadToDeg},
                 {"crossing_shift_deg", curve.crossing_shift * kRadToDeg},
                 {"maxima_fit", fit_to_json(curve.maxima_fit)},
                 {"minima_fit", fit_to_json(curve.minima_fit)}};
    } else if (cfg.experiment == "swap" || cfg.experiment == "ghz") {
      const Vector state = (cfg.experiment == "swap") ? swap_experiment() : ghz_experiment();
      Vector target = Vector::Zero(16);
      if (cfg.experiment == "swap") {
        target(0b1001) = 1.0 / std::numbers::sqrt2;
        target(0b0011) = 1.0 / std::numbers::sqrt2;
      } else {
        target(0b1110) = 1.0 / std::numbers::sqrt2;
        target(0b0001) = 1.0 / std::numbers::sqrt2;
      }
      csv.row({"basis_index", "label", "re_amplitude", "im_amplitude"});
      for (int i = 0; i < 16; ++i)
        csv.row({std::to_string(i), bits_label(i, 4), fmt(state(i).real()),
                 fmt(state(i).imag())});
      results = {{"fidelity_to_target", fidelity(state, target)}};
    } else {  // momentum-check
      std::optional<int> blocked;
      if (cfg.blocked == "T")
        blocked = 0;
      else if (cfg.blocked == "B")
        blocked = 1;
      const MomentumCheck check = momentum_correlation(blocked);
      csv.row({"quantity", "value"});
      csv.row({"p_signal_top", fmt(check.p_signal_top)});
      csv.row({"p_signal_bottom", fmt(check.p_signal_bottom)});
      csv.row({"coincidence_probability", fmt(check.coincidence_probability)});
      results = {{"blocked", cfg.blocked},
                 {"p_signal_top", check.p_signal_top},
                 {"p_signal_bottom", check.p_signal_bottom},
                 {"coincidence_probability", check.coincidence_probability}};
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const IoError&) {
    throw;
  } catch (const std::exception& e) {
    throw ExperimentError(e.what());
  }

  csv.close(out.table_path);

  json doc{{"experiment", cfg.experiment},
           {"library_version", kVersion},
           {"rng_algorithm", kRngAlgorithm},
           {"seed", cfg.counting.rng_seed},
           {"exact", cfg.exact},
           {"config", config_echo(cfg)},
           {"results", results}};
  std::ofstream jf(out.result_path, std::ios::binary);
  if (!jf) throw IoError("cannot open '" + out.result_path + "' for writing");
  jf << doc.dump(2) << '\n';
  jf.flush();
  if (!jf) throw IoError("write failure on '" + out.result_path + "'");
  return out;
}

}  // namespace sptq
