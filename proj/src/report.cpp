#include "catmap/report.hpp"

#include <algorithm>
#include <map>
#include <cmath>
#include <cstdio>
#include <numbers>

namespace catmap {

std::string fmt(double v) {
  if (v == 0.0) v = 0.0;  // no negative zero in output
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

void write_records_csv(std::ostream& os, const std::vector<EigenRecord>& records) {
  for (std::size_t i = 0; i < kRecordFields.size(); ++i) os << (i ? "," : "") << kRecordFields[i];
  os << '\n';
  for (const auto& r : records)
    os << r.N << ',' << r.p << ',' << r.k << ',' << r.C << ',' << r.C_tilde << ',' << fmt(r.eigenphase) << ','
       << r.oldform_level << ',' << to_string(r.vpm_tag) << ',' << fmt(r.sup_norm) << ',' << fmt(r.entropy)
       << '\n';
}

nlohmann::ordered_json records_json(const std::vector<EigenRecord>& records) {
  auto arr = nlohmann::ordered_json::array();
  for (const auto& r : records) {
    nlohmann::ordered_json o;
    o["N"] = r.N;
    o["p"] = r.p;
    o["k"] = r.k;
    o["C"] = r.C;
    o["C_tilde"] = r.C_tilde;
    o["eigenphase"] = r.eigenphase;
    o["oldform_level"] = r.oldform_level;
    o["vpm_tag"] = to_string(r.vpm_tag);
    o["sup_norm"] = r.sup_norm;
    o["entropy"] = r.entropy;
    arr.push_back(std::move(o));
  }
  return arr;
}

void write_operator_csv(std::ostream& os, const OperatorMatrix& U) {
  os << "row,col,re,im\n";
  for (Eigen::Index i = 0; i < U.rows(); ++i)
    for (Eigen::Index j = 0; j < U.cols(); ++j)
      os << i << ',' << j << ',' << fmt(U(i, j).real()) << ',' << fmt(U(i, j).imag()) << '\n';
}

nlohmann::ordered_json report_json(const VerificationReport& r) {
  nlohmann::ordered_json o;
  o["theorem"] = r.theorem;
  o["N"] = r.N;
  o["p"] = r.p;
  o["k"] = r.k;
  o["d_class"] = r.d_class;
  o["c_class"] = r.c_class;
  o["subject"] = r.subject;
  o["predicted"] = {{"lo", r.lo ? nlohmann::ordered_json(*r.lo) : nlohmann::ordered_json()},
                    {"hi", r.hi ? nlohmann::ordered_json(*r.hi) : nlohmann::ordered_json()}};
  o["measured"] = r.measured;
  o["tolerance"] = r.tolerance;
  o["pass"] = r.pass;
  o["runtime_s"] = r.runtime_s;
  if (!r.note.empty()) o["note"] = r.note;
  return o;
}

void write_reports_jsonl(std::ostream& os, std::vector<VerificationReport> reports) {
  sort_reports(reports);
  for (const auto& r : reports) os << report_json(r).dump() << '\n';
}

void write_summary_csv(std::ostream& os, const std::vector<VerificationReport>& reports) {
  struct Row {
    Int total = 0, passed = 0;
    double worst = 0.0;
  };
  std::map<std::pair<std::string, Int>, Row> rows;
  for (const auto& r : reports) {
    auto& row = rows[{r.theorem, r.N}];
    ++row.total;
    row.passed += r.pass;
    row.worst = std::max(row.worst, r.violation());
  }
  os << "theorem,N,reports,passed,failed,worst_violation\n";
  for (const auto& [key, row] : rows)
    os << key.first << ',' << key.second << ',' << row.total << ',' << row.passed << ',' << row.total - row.passed
       << ',' << fmt(row.worst) << '\n';
}

void write_figure_csv(std::ostream& os, const BandSummary& bands) {
  os << "index,eigenphase,sup_norm,band_label\n";
  for (std::size_t i = 0; i < bands.points.size(); ++i) {
    const auto& pt = bands.points[i];
    os << i << ',' << fmt(pt.eigenphase) << ',' << fmt(pt.sup_norm) << ',' << pt.label << '\n';
  }
}

namespace {

const char* band_color(const std::string& label) {
  if (label == "sup1") return "#1f77b4";
  if (label == "supformel") return "#d62728";
  if (label == "last") return "#2ca02c";
  if (label == "ramified") return "#9467bd";
  return "#7f7f7f";
}

}  // namespace

void write_figure_svg(std::ostream& os, const BandSummary& bands, const std::string& title) {
  if (bands.points.empty()) throw std::invalid_argument("figure: no new forms to plot");
  const double W = 720, H = 440, left = 60, right = 150, top = 40, bottom = 50;
  const double pw = W - left - right, ph = H - top - bottom;
  double ymax = 0.0;
  for (const auto& pt : bands.points) ymax = std::max(ymax, pt.sup_norm);
  for (const auto& [name, v] : bands.predicted) ymax = std::max(ymax, v);
  ymax = std::ceil(ymax * 1.1 * 2.0) / 2.0;
  const double pi = std::numbers::pi;
  auto X = [&](double phase) { return left + (phase + pi) / (2 * pi) * pw; };
  auto Y = [&](double v) { return top + ph - v / ymax * ph; };

  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << left << "\" y=\"24\" font-family=\"sans-serif\" font-size=\"14\">" << title << "</text>\n";
  os << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << pw << "\" height=\"" << ph
     << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int t = 0; t <= 4; ++t) {
    const double phase = -pi + t * pi / 2;
    os << "<text x=\"" << fmt(X(phase)) << "\" y=\"" << H - bottom + 18
       << "\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"middle\">" << fmt(phase) << "</text>\n";
  }
  for (int t = 0; t <= static_cast<int>(ymax * 2); ++t) {
    const double v = t * 0.5;
    os << "<text x=\"" << left - 6 << "\" y=\"" << fmt(Y(v) + 4)
       << "\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"end\">" << fmt(v) << "</text>\n";
  }
  os << "<text x=\"" << left + pw / 2 << "\" y=\"" << H - 10
     << "\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\">eigenphase</text>\n";
  for (const auto& [name, v] : bands.predicted) {
    os << "<line x1=\"" << left << "\" x2=\"" << left + pw << "\" y1=\"" << fmt(Y(v)) << "\" y2=\"" << fmt(Y(v))
       << "\" stroke=\"#bbbbbb\" stroke-dasharray=\"4 3\"/>\n";
    os << "<text x=\"" << left + pw + 6 << "\" y=\"" << fmt(Y(v) + 4)
       << "\" font-family=\"sans-serif\" font-size=\"10\">" << name << " " << fmt(std::round(v * 1e4) / 1e4)
       << "</text>\n";
  }
  for (const auto& pt : bands.points)
    os << "<circle cx=\"" << fmt(X(pt.eigenphase)) << "\" cy=\"" << fmt(Y(pt.sup_norm)) << "\" r=\"1.6\" fill=\""
       << band_color(pt.label) << "\"/>\n";
  os << "</svg>\n";
}

void write_expsum_csv(std::ostream& os, const std::vector<ExpsumRow>& rows) {
  os << "p,n,alpha_class,A,sup,brute_sup\n";
  for (const auto& r : rows)
    os << r.p << ',' << r.n << ',' << r.alpha << ',' << fmt(r.a_constant) << ',' << fmt(r.sup) << ','
       << fmt(r.brute_sup) << '\n';
}

}  // namespace catmap
