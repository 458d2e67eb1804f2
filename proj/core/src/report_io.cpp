#include "wvsim/report_io.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace wvsim {

std::string format_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void atomic_write_file(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    out << content;
    if (!out.good()) throw std::runtime_error("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

const char* const kSweepCsvHeader =
    "protocol,xi,shots_x,shots_y,shots_z,reps,est_re,est_im,bias_re,bias_im,"
    "emp_std,mean_stderr,success_prob,seed";

std::string sweep_csv(const std::vector<SweepRow>& rows) {
  std::string out = kSweepCsvHeader;
  out += '\n';
  for (const SweepRow& r : rows) {
    out += r.protocol;
    out += ',' + format_g17(r.xi);
    out += ',' + std::to_string(r.shots_x);
    out += ',' + std::to_string(r.shots_y);
    out += ',' + std::to_string(r.shots_z);
    out += ',' + std::to_string(r.reps);
    out += ',' + format_g17(r.mean_estimate.real());
    out += ',' + format_g17(r.mean_estimate.imag());
    out += ',' + format_g17(r.empirical_bias.real());
    out += ',' + format_g17(r.empirical_bias.imag());
    out += ',' + format_g17(r.empirical_std);
    out += ',' + format_g17(r.mean_stderr);
    out += ',' + format_g17(r.success_probability);
    out += ',' + std::to_string(r.seed);
    out += '\n';
  }
  return out;
}

namespace {

nlohmann::json complex_json(Complex c) { return {{"re", c.real()}, {"im", c.imag()}}; }

}  // namespace

std::string estimate_report_json(const EstimateReport& report, const std::string& protocol,
                                 std::optional<double> xi, std::optional<std::uint64_t> seed) {
  nlohmann::json j;
  j["protocol"] = protocol;
  if (xi) j["xi"] = *xi;
  j["estimate"] = complex_json(report.estimate);
  j["exact_target"] = complex_json(report.exact_target);
  j["bias"] = report.bias ? complex_json(*report.bias) : nlohmann::json(nullptr);
  j["stderr"] = report.std_error ? nlohmann::json(*report.std_error) : nlohmann::json(nullptr);
  j["success_probability"] = report.success_probability;
  if (report.shots_used[0] || report.shots_used[1] || report.shots_used[2]) {
    nlohmann::json shots;
    if (report.shots_used[0]) shots["x"] = *report.shots_used[0];
    if (report.shots_used[1]) shots["y"] = *report.shots_used[1];
    if (report.shots_used[2]) shots["z"] = *report.shots_used[2];
    j["shots_used"] = shots;
  } else {
    j["shots_used"] = nullptr;
  }
  if (seed) j["seed"] = *seed;
  return j.dump(2) + "\n";
}

const char* const kWavefunctionCsvHeader =
    "x,c_re,c_im,psi_true_re,psi_true_im,psi_rec_re,psi_rec_im";

std::string wavefunction_csv(const DirectMeasResult& result, const GridState& truth) {
  std::string out = kWavefunctionCsvHeader;
  out += '\n';
  for (std::size_t x = 0; x < truth.n(); ++x) {
    out += std::to_string(x);
    out += ',' + format_g17(result.raw[x].real());
    out += ',' + format_g17(result.raw[x].imag());
    out += ',' + format_g17(truth[x].real());
    out += ',' + format_g17(truth[x].imag());
    out += ',' + format_g17(result.recovered[x].real());
    out += ',' + format_g17(result.recovered[x].imag());
    out += '\n';
  }
  return out;
}

std::string wavefunction_summary_json(const DirectMeasResult& result,
                                      std::optional<std::uint64_t> seed) {
  nlohmann::json j;
  j["method"] = method_name(result.method);
  j["n"] = result.recovered.n();
  j["shots"] = result.total_shots;
  j["fidelity"] = result.fidelity;
  if (seed) j["seed"] = *seed;
  return j.dump(2) + "\n";
}

std::string efficiency_json(const EfficiencyComparison& cmp, double target_fidelity,
                            double xi_scan, std::uint64_t seed) {
  nlohmann::json j;
  j["target_fidelity"] = target_fidelity;
  j["xi_scan"] = xi_scan;
  j["seed"] = seed;
  j["scanning"] = {{"reached", cmp.scanning_reached},
                   {"shots", cmp.shots_scanning},
                   {"floor_fidelity", cmp.scanning_floor_fidelity}};
  j["scan_free"] = {{"reached", cmp.scan_free_reached}, {"shots", cmp.shots_scan_free}};
  if (cmp.scanning_reached && cmp.scan_free_reached)
    j["ratio"] = cmp.ratio;
  else
    j["ratio"] = nullptr;
  return j.dump(2) + "\n";
}

}  // namespace wvsim
