#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "wvsim/protocols.hpp"
#include "wvsim/sampling.hpp"
#include "wvsim/wavefunction.hpp"

namespace wvsim {

/// 17 significant digits; round-trips doubles exactly.
std::string format_g17(double v);

/// Write via a temp file in the same directory, then rename into place.
void atomic_write_file(const std::filesystem::path& path, const std::string& content);

extern const char* const kSweepCsvHeader;
std::string sweep_csv(const std::vector<SweepRow>& rows);

std::string estimate_report_json(const EstimateReport& report, const std::string& protocol,
                                 std::optional<double> xi, std::optional<std::uint64_t> seed);

extern const char* const kWavefunctionCsvHeader;
std::string wavefunction_csv(const DirectMeasResult& result, const GridState& truth);

std::string wavefunction_summary_json(const DirectMeasResult& result,
                                      std::optional<std::uint64_t> seed);

std::string efficiency_json(const EfficiencyComparison& cmp, double target_fidelity,
                            double xi_scan, std::uint64_t seed);

}  // namespace wvsim
