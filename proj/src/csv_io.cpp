#include "oemsync/csv_io.hpp"

#include <array>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "oemsync/config.hpp"

namespace oemsync {

namespace {

constexpr std::array<const char*, 9> kObservableNames = {"sx", "sy", "sz", "q", "p", "re_a", "im_a", "n_cav", "n_mech"};

std::array<const std::vector<double>*, 9> fields(const ObservableSeries& s) {
  return {&s.sx, &s.sy, &s.sz, &s.q, &s.p, &s.re_a, &s.im_a, &s.n_cav, &s.n_mech};
}

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const auto p = line.find(sep, start);
    out.push_back(line.substr(start, p == std::string_view::npos ? std::string_view::npos : p - start));
    if (p == std::string_view::npos) break;
    start = p + 1;
  }
  return out;
}

double to_double(std::string_view s) {
  double v = 0.0;
  if (!parse_double(s, v)) throw std::runtime_error("csv: bad number '" + std::string(s) + "'");
  return v;
}

std::optional<double> to_phase(std::string_view s) {
  if (s.empty()) return std::nullopt;
  return to_double(s);
}

Branch to_branch(std::string_view s) {
  if (s == "blue") return Branch::blue;
  if (s == "red") return Branch::red;
  if (s == "transit") return Branch::transit;
  throw std::runtime_error("csv: bad branch label '" + std::string(s) + "'");
}

}  // namespace

std::vector<CsvRow> make_rows(const ObservableSeries& obs, double omega, const std::vector<Branch>& labels,
                              const std::vector<int>& jumps) {
  const PhaseRecord ph = phase_record(obs, omega);
  std::vector<CsvRow> rows(obs.size());
  for (std::size_t k = 0; k < obs.size(); ++k) {
    CsvRow& r = rows[k];
    r.t = obs.times[k];
    r.s = obs.at(k);
    r.phi = ph.phi[k];
    r.theta = ph.theta[k];
    r.psi = ph.psi[k];
    r.drive_phase = ph.drive_phase[k];
    r.branch = labels.empty() ? Branch::transit : labels[k];
    r.jump_flag = (!jumps.empty() && jumps[k] > 0) ? 1 : 0;
  }
  return rows;
}

void append_ensemble_columns(CsvDocument& doc, const ObservableSeries& mean, const ObservableSeries& std_error) {
  const auto m = fields(mean);
  const auto e = fields(std_error);
  for (std::size_t f = 0; f < kObservableNames.size(); ++f) {
    doc.appended_columns.push_back(std::string(kObservableNames[f]) + "_mean");
    doc.appended_columns.push_back(std::string(kObservableNames[f]) + "_stderr");
  }
  for (std::size_t k = 0; k < doc.rows.size(); ++k)
    for (std::size_t f = 0; f < kObservableNames.size(); ++f) {
      doc.rows[k].appended.push_back((*m[f])[k]);
      doc.rows[k].appended.push_back((*e[f])[k]);
    }
}

std::string format_csv(const CsvDocument& doc) {
  std::string out;
  for (const auto& h : doc.header_lines) out += "# " + h + "\n";
  for (std::size_t c = 0; c < std::size(kCsvColumns); ++c) {
    if (c) out += ',';
    out += kCsvColumns[c];
  }
  for (const auto& a : doc.appended_columns) out += "," + a;
  out += '\n';

  const auto num = [&out](double v) { out += format_double(v); };
  const auto phase = [&out](const std::optional<double>& v) {
    if (v) out += format_double(*v);
  };
  for (const auto& r : doc.rows) {
    num(r.t);
    for (double v : {r.s.sx, r.s.sy, r.s.sz, r.s.q, r.s.p, r.s.re_a, r.s.im_a, r.s.n_cav, r.s.n_mech}) {
      out += ',';
      num(v);
    }
    out += ',';
    phase(r.phi);
    out += ',';
    phase(r.theta);
    out += ',';
    phase(r.psi);
    out += ',';
    num(r.drive_phase);
    out += ',' + to_string(r.branch) + ',' + std::to_string(r.jump_flag);
    for (double v : r.appended) {
      out += ',';
      num(v);
    }
    out += '\n';
  }
  return out;
}

CsvDocument parse_csv(std::string_view text) {
  CsvDocument doc;
  bool have_columns = false;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const auto nl = text.find('\n', pos);
    auto line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() : nl + 1;
    if (line.empty()) continue;
    if (line.front() == '#') {
      line.remove_prefix(1);
      if (!line.empty() && line.front() == ' ') line.remove_prefix(1);
      doc.header_lines.emplace_back(line);
      continue;
    }
    const auto cells = split(line, ',');
    if (!have_columns) {
      if (cells.size() < std::size(kCsvColumns)) throw std::runtime_error("csv: missing columns");
      for (std::size_t c = 0; c < std::size(kCsvColumns); ++c)
        if (cells[c] != kCsvColumns[c]) throw std::runtime_error("csv: unexpected column " + std::string(cells[c]));
      for (std::size_t c = std::size(kCsvColumns); c < cells.size(); ++c) doc.appended_columns.emplace_back(cells[c]);
      have_columns = true;
      continue;
    }
    if (cells.size() != std::size(kCsvColumns) + doc.appended_columns.size()) {
      throw std::runtime_error("csv: row has the wrong number of fields");
    }
    CsvRow r;
    r.t = to_double(cells[0]);
    r.s = {to_double(cells[1]), to_double(cells[2]), to_double(cells[3]), to_double(cells[4]), to_double(cells[5]),
           to_double(cells[6]), to_double(cells[7]), to_double(cells[8]), to_double(cells[9])};
    r.phi = to_phase(cells[10]);
    r.theta = to_phase(cells[11]);
    r.psi = to_phase(cells[12]);
    r.drive_phase = to_double(cells[13]);
    r.branch = to_branch(cells[14]);
    r.jump_flag = cells[15] == "1" ? 1 : 0;
    for (std::size_t c = std::size(kCsvColumns); c < cells.size(); ++c) r.appended.push_back(to_double(cells[c]));
    doc.rows.push_back(std::move(r));
  }
  return doc;
}

void write_csv(const CsvDocument& doc, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << format_csv(doc);
  if (!out) throw std::runtime_error("error while writing " + path);
}

CsvDocument read_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_csv(ss.str());
}

std::string config_text_from_header(const CsvDocument& doc) {
  std::string out;
  for (const auto& h : doc.header_lines) {
    if (!h.empty() && h.front() == '#') continue;  // "## metadata"
    out += h + "\n";
  }
  return out;
}

}  // namespace oemsync
