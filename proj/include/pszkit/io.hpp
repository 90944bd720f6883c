#pragma once

// On-disk formats: transfer-set archives (checksummed text), filter banks,
// metric-curve CSVs, ablation reports (CSV family and JSON), loudspeaker
// impulse-response inputs (WAV or text), and an output-directory lock.

#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "pszkit/ablation.hpp"

namespace pszkit {

// Shortest exact decimal round-trip formatting used by every text format.
std::string format_g17(double v);

// --- transfer-set archive ------------------------------------------------
void save_atf_archive(const AtfSet& atf, const std::filesystem::path& path);
AtfSet load_atf_archive(const std::filesystem::path& path);

// --- filter bank ----------------------------------------------------------
void save_filter_bank(const FilterBank& bank,
                      const std::filesystem::path& path);
FilterBank load_filter_bank(const std::filesystem::path& path);

// --- metric curves ----------------------------------------------------------
void write_metric_curve_csv(
    const MetricCurve& curve, const std::filesystem::path& path,
    const std::vector<std::pair<std::string, std::string>>& metadata = {});
MetricCurve read_metric_curve_csv(const std::filesystem::path& path);

// --- ablation reports -------------------------------------------------------
enum class ReportFormat { csv, json };

// CSV form writes <plan>_summary.csv, <plan>_deltas.csv and one
// <plan>_<stage>_listener<k>_<metric>.csv per curve; JSON form writes
// <plan>_report.json.  The directory is created if needed.
void emit_report(const AblationReport& report,
                 const std::filesystem::path& out_dir, ReportFormat format);

std::string report_to_json(const AblationReport& report);
AblationReport report_from_json(const std::string& text);
AblationReport load_report_json(const std::filesystem::path& path);
AblationReport load_report_csv(const std::filesystem::path& dir,
                               const std::string& plan_id);

// --- impulse-response inputs -------------------------------------------------
// Dispatches on the extension: .wav reads mono PCM16/24/32 or float32/64;
// anything else is the text format (comment lines start with '#', first
// data line is the sample rate, then one sample per line).
std::pair<std::vector<double>, double> load_impulse_response(
    const std::filesystem::path& path);

void save_impulse_response_text(const std::filesystem::path& path,
                                std::span<const double> samples,
                                double sample_rate);
void save_impulse_response_wav(const std::filesystem::path& path,
                               std::span<const double> samples,
                               double sample_rate);

// --- output lock ---------------------------------------------------------
// Creates <dir>/.lock exclusively; throws std::runtime_error if another run
// holds it.  Removed on destruction.
class DirLock {
 public:
  explicit DirLock(const std::filesystem::path& dir);
  ~DirLock();
  DirLock(const DirLock&) = delete;
  DirLock& operator=(const DirLock&) = delete;

 private:
  std::filesystem::path lock_path_;
};

}  // namespace pszkit
