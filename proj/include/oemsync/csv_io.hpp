#pragma once

// CSV output. Layout:
//
//   # <resolved config, one key=value or [section] per line>
//   # ## <run metadata that is not part of the config>
//   t,sx,sy,sz,q,p,re_a,im_a,n_cav,n_mech,phi,theta,psi,drive_phase,branch,jump_flag[,extra...]
//   <rows>
//
// Floats are written as the shortest decimal that reads back bitwise; an
// undefined phase is an empty field. Stripping the leading "# " from the
// header lines yields a config that reproduces the run.

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "oemsync/analysis.hpp"
#include "oemsync/records.hpp"

namespace oemsync {

inline constexpr const char* kCsvColumns[] = {"t",    "sx",   "sy",    "sz",     "q",   "p",
                                              "re_a", "im_a", "n_cav", "n_mech", "phi", "theta",
                                              "psi",  "drive_phase", "branch", "jump_flag"};

struct CsvRow {
  double t = 0.0;
  Sample s;
  std::optional<double> phi, theta, psi;
  double drive_phase = 0.0;
  Branch branch = Branch::transit;
  int jump_flag = 0;
  std::vector<double> appended;

  friend bool operator==(const CsvRow&, const CsvRow&) = default;
};

struct CsvDocument {
  std::vector<std::string> header_lines;  // without the leading "# "
  std::vector<std::string> appended_columns;
  std::vector<CsvRow> rows;
};

/// Rows for a single record. `labels` and `jumps` may be empty.
std::vector<CsvRow> make_rows(const ObservableSeries& obs, double omega, const std::vector<Branch>& labels,
                              const std::vector<int>& jumps);

/// Appends <name>_mean / <name>_stderr columns for the nine observables.
void append_ensemble_columns(CsvDocument& doc, const ObservableSeries& mean, const ObservableSeries& std_error);

std::string format_csv(const CsvDocument& doc);
CsvDocument parse_csv(std::string_view text);

void write_csv(const CsvDocument& doc, const std::string& path);
CsvDocument read_csv(const std::string& path);

/// The config portion of a CSV header (lines starting with exactly "# ").
std::string config_text_from_header(const CsvDocument& doc);

}  // namespace oemsync
