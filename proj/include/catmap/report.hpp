#pragma once

// Text artifacts: CSV tables, JSON records, JSON-lines reports and the SVG
// scatter of new-form sup norms. All writers are deterministic for equal input.

#include <json.hpp>
#include <ostream>
#include <string>
#include <vector>

#include "catmap/analysis.hpp"
#include "catmap/expsum.hpp"
#include "catmap/hecke.hpp"

namespace catmap {

/// N, p, k, C, C_tilde, eigenphase, oldform_level, vpm_tag, sup_norm, entropy
inline const std::vector<std::string> kRecordFields = {"N", "p", "k", "C", "C_tilde", "eigenphase",
                                                       "oldform_level", "vpm_tag", "sup_norm", "entropy"};

void write_records_csv(std::ostream& os, const std::vector<EigenRecord>& records);
/// Array of objects with the fields of kRecordFields, in that order.
nlohmann::ordered_json records_json(const std::vector<EigenRecord>& records);

/// row, col, re, im for every entry.
void write_operator_csv(std::ostream& os, const OperatorMatrix& U);

nlohmann::ordered_json report_json(const VerificationReport& r);
/// One report per line, sorted.
void write_reports_jsonl(std::ostream& os, std::vector<VerificationReport> reports);
/// theorem, N, reports, passed, failed, worst_violation
void write_summary_csv(std::ostream& os, const std::vector<VerificationReport>& reports);

/// index, eigenphase, sup_norm, band_label
void write_figure_csv(std::ostream& os, const BandSummary& bands);
void write_figure_svg(std::ostream& os, const BandSummary& bands, const std::string& title);

struct ExpsumRow {
  Int p = 0;
  int n = 0;
  Int alpha = 1;
  double a_constant = 0.0;  ///< A_{alpha,1} or A_{alpha,2} as used by the closed form (0 when n = 0 mod 3)
  double sup = 0.0;
  double brute_sup = 0.0;
};
/// p, n, alpha_class, A, sup, brute_sup
void write_expsum_csv(std::ostream& os, const std::vector<ExpsumRow>& rows);

/// Fixed 12-significant-digit formatting used in every CSV.
std::string fmt(double v);

}  // namespace catmap
