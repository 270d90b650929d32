#include "oemsync/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <stdexcept>

namespace oemsync {

namespace {

constexpr const char* kBlue = "#1f4fd8";
constexpr const char* kRed = "#d62728";
constexpr const char* kGrey = "#8c8c8c";
constexpr const char* kBlack = "#222222";

constexpr double kPanelW = 420.0;
constexpr double kPanelH = 320.0;
constexpr double kMarginL = 60.0;
constexpr double kMarginR = 20.0;
constexpr double kMarginT = 34.0;
constexpr double kMarginB = 46.0;
constexpr double kTitleH = 30.0;

std::string color_of(Branch b) {
  switch (b) {
    case Branch::blue: return kBlue;
    case Branch::red: return kRed;
    case Branch::transit: return kGrey;
  }
  return kGrey;
}

std::vector<std::string> colors_for(const FigureInput& in, const std::vector<std::size_t>& idx) {
  if (in.labels.empty()) return {kBlack};
  std::vector<std::string> out;
  out.reserve(idx.size());
  for (std::size_t k : idx) out.push_back(color_of(in.labels[k]));
  return out;
}

void fit_range(Panel& p, double pad = 0.05) {
  double x0 = INFINITY, x1 = -INFINITY, y0 = INFINITY, y1 = -INFINITY;
  for (const auto& s : p.series) {
    for (double v : s.x) x0 = std::min(x0, v), x1 = std::max(x1, v);
    for (double v : s.y) y0 = std::min(y0, v), y1 = std::max(y1, v);
    for (double v : s.y_low) y0 = std::min(y0, v), y1 = std::max(y1, v);
  }
  if (!std::isfinite(x0)) x0 = 0.0, x1 = 1.0;
  if (!std::isfinite(y0)) y0 = 0.0, y1 = 1.0;
  if (x1 - x0 < 1e-12) x0 -= 0.5, x1 += 0.5;
  if (y1 - y0 < 1e-12) y0 -= 0.5, y1 += 0.5;
  const double dx = (x1 - x0) * pad;
  const double dy = (y1 - y0) * pad;
  p.x_min = x0 - dx;
  p.x_max = x1 + dx;
  p.y_min = y0 - dy;
  p.y_max = y1 + dy;
}

void require(bool ok, const std::string& what) {
  if (!ok) throw std::invalid_argument("figure input is missing " + what);
}

std::vector<std::size_t> all_indices(std::size_t n) {
  std::vector<std::size_t> idx(n);
  for (std::size_t k = 0; k < n; ++k) idx[k] = k;
  return idx;
}

Panel phase_panel(const std::string& title, const std::string& xl, const std::string& yl, const PhaseSeries& xs,
                  const PhaseSeries& ys, const FigureInput& in) {
  PlotSeries s;
  std::vector<std::size_t> idx;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    if (!xs[k] || !ys[k]) continue;
    s.x.push_back(*xs[k]);
    s.y.push_back(*ys[k]);
    idx.push_back(k);
  }
  s.colors = colors_for(in, idx);
  Panel p{title, xl, yl, -std::numbers::pi, std::numbers::pi, -std::numbers::pi, std::numbers::pi, {std::move(s)}};
  return p;
}

PhaseSeries as_phase(const std::vector<double>& v) {
  PhaseSeries out(v.size());
  for (std::size_t k = 0; k < v.size(); ++k) out[k] = v[k] > std::numbers::pi ? v[k] - 2 * std::numbers::pi : v[k];
  return out;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

std::string tick(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3g", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

FigureKind parse_figure_kind(const std::string& s) {
  if (s == "timeseries_sx") return FigureKind::timeseries_sx;
  if (s == "timeseries_q") return FigureKind::timeseries_q;
  if (s == "bloch_projection") return FigureKind::bloch_projection;
  if (s == "phase_portrait") return FigureKind::phase_portrait;
  if (s == "phase_vs_phase") return FigureKind::phase_vs_phase;
  if (s == "ensemble_decay") return FigureKind::ensemble_decay;
  throw std::invalid_argument("unknown figure kind '" + s + "'");
}

std::string to_string(FigureKind k) {
  switch (k) {
    case FigureKind::timeseries_sx: return "timeseries_sx";
    case FigureKind::timeseries_q: return "timeseries_q";
    case FigureKind::bloch_projection: return "bloch_projection";
    case FigureKind::phase_portrait: return "phase_portrait";
    case FigureKind::phase_vs_phase: return "phase_vs_phase";
    case FigureKind::ensemble_decay: return "ensemble_decay";
  }
  return "timeseries_sx";
}

Figure build_figure(FigureKind kind, const FigureInput& in) {
  const ObservableSeries& o = in.obs;
  require(!in.labels.size() || in.labels.size() == o.size(), "branch labels matching the samples");
  Figure fig;
  fig.title = to_string(kind);
  const auto idx = all_indices(o.size());

  switch (kind) {
    case FigureKind::timeseries_sx:
    case FigureKind::timeseries_q: {
      const bool sx = kind == FigureKind::timeseries_sx;
      require(o.size() > 0 && (sx ? o.sx.size() : o.q.size()) == o.size(), sx ? "<sigma_x>" : "q");
      Panel p{sx ? "qubit polarization" : "mechanical quadrature", "t", sx ? "<sigma_x>" : "q", 0, 1, 0, 1, {}};
      p.series.push_back({PlotSeries::Style::points, o.times, sx ? o.sx : o.q, {}, colors_for(in, idx)});
      fit_range(p, 0.02);
      fig.panels.push_back(std::move(p));
      break;
    }
    case FigureKind::bloch_projection: {
      require(o.size() > 0 && o.sy.size() == o.size() && o.sz.size() == o.size(), "<sigma_y>, <sigma_z>");
      Panel p{"Bloch vector, y-z projection", "<sigma_y>", "<sigma_z>", -1.05, 1.05, -1.05, 1.05, {}};
      p.series.push_back({PlotSeries::Style::points, o.sy, o.sz, {}, colors_for(in, idx)});
      fig.panels.push_back(std::move(p));
      Panel q{"Bloch vector, x-y projection", "<sigma_x>", "<sigma_y>", -1.05, 1.05, -1.05, 1.05, {}};
      q.series.push_back({PlotSeries::Style::points, o.sx, o.sy, {}, colors_for(in, idx)});
      fig.panels.push_back(std::move(q));
      break;
    }
    case FigureKind::phase_portrait: {
      require(o.size() > 0 && o.q.size() == o.size() && o.p.size() == o.size(), "quadratures q, p");
      Panel p{"mechanical phase space", "q", "p", 0, 1, 0, 1, {}};
      p.series.push_back({PlotSeries::Style::points, o.q, o.p, {}, colors_for(in, idx)});
      fit_range(p);
      // square aspect around the data
      const double half = std::max(p.x_max - p.x_min, p.y_max - p.y_min) / 2;
      const double cx = (p.x_max + p.x_min) / 2, cy = (p.y_max + p.y_min) / 2;
      p.x_min = cx - half, p.x_max = cx + half, p.y_min = cy - half, p.y_max = cy + half;
      fig.panels.push_back(std::move(p));
      break;
    }
    case FigureKind::phase_vs_phase: {
      require(in.phases.has_value(), "phase record");
      const PhaseRecord& ph = *in.phases;
      require(ph.phi.size() == o.size() || in.labels.empty(), "phases matching the samples");
      const PhaseSeries drive = as_phase(ph.drive_phase);
      fig.panels.push_back(phase_panel("phi vs psi", "psi", "phi", ph.psi, ph.phi, in));
      fig.panels.push_back(phase_panel("theta vs psi", "psi", "theta", ph.psi, ph.theta, in));
      fig.panels.push_back(phase_panel("phi vs drive", "drive phase", "phi", drive, ph.phi, in));
      fig.panels.push_back(phase_panel("psi vs drive", "drive phase", "psi", drive, ph.psi, in));
      break;
    }
    case FigureKind::ensemble_decay: {
      require(o.size() > 0 && o.sx.size() == o.size(), "<sigma_x>");
      Panel p{"ensemble mean polarization", "t", "<sigma_x>", 0, 1, 0, 1, {}};
      if (in.std_error && in.std_error->sx.size() == o.size()) {
        PlotSeries band{PlotSeries::Style::band, o.times, {}, {}, {"#9fb7f0"}};
        for (std::size_t k = 0; k < o.size(); ++k) {
          band.y.push_back(o.sx[k] + in.std_error->sx[k]);
          band.y_low.push_back(o.sx[k] - in.std_error->sx[k]);
        }
        p.series.push_back(std::move(band));
      }
      p.series.push_back({PlotSeries::Style::line, o.times, o.sx, {}, {kBlue}});
      fit_range(p, 0.02);
      fig.panels.push_back(std::move(p));
      break;
    }
  }
  return fig;
}

std::string to_svg(const Figure& fig) {
  const std::size_t cols = fig.panels.size() > 1 ? 2 : 1;
  const std::size_t rows = (fig.panels.size() + cols - 1) / cols;
  const double width = kPanelW * static_cast<double>(cols);
  const double height = kTitleH + kPanelH * static_cast<double>(rows);

  std::string s;
  s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fmt(width) + "\" height=\"" + fmt(height) +
       "\" viewBox=\"0 0 " + fmt(width) + " " + fmt(height) + "\" font-family=\"sans-serif\">\n";
  s += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  s += "<text x=\"" + fmt(width / 2) + "\" y=\"20\" text-anchor=\"middle\" font-size=\"15\">" + escape(fig.title) +
       "</text>\n";

  for (std::size_t i = 0; i < fig.panels.size(); ++i) {
    const Panel& p = fig.panels[i];
    const double ox = kPanelW * static_cast<double>(i % cols);
    const double oy = kTitleH + kPanelH * static_cast<double>(i / cols);
    const double px0 = ox + kMarginL, px1 = ox + kPanelW - kMarginR;
    const double py0 = oy + kPanelH - kMarginB, py1 = oy + kMarginT;
    const auto X = [&](double v) { return px0 + (v - p.x_min) / (p.x_max - p.x_min) * (px1 - px0); };
    const auto Y = [&](double v) { return py0 + (v - p.y_min) / (p.y_max - p.y_min) * (py1 - py0); };

    s += "<g>\n";
    s += "<text x=\"" + fmt((px0 + px1) / 2) + "\" y=\"" + fmt(oy + 22) +
         "\" text-anchor=\"middle\" font-size=\"13\">" + escape(p.title) + "</text>\n";
    s += "<rect x=\"" + fmt(px0) + "\" y=\"" + fmt(py1) + "\" width=\"" + fmt(px1 - px0) + "\" height=\"" +
         fmt(py0 - py1) + "\" fill=\"none\" stroke=\"#444\"/>\n";
    for (int t = 0; t <= 4; ++t) {
      const double xv = p.x_min + (p.x_max - p.x_min) * t / 4.0;
      const double yv = p.y_min + (p.y_max - p.y_min) * t / 4.0;
      s += "<text x=\"" + fmt(X(xv)) + "\" y=\"" + fmt(py0 + 16) + "\" text-anchor=\"middle\" font-size=\"10\">" +
           tick(xv) + "</text>\n";
      s += "<text x=\"" + fmt(px0 - 6) + "\" y=\"" + fmt(Y(yv) + 3) + "\" text-anchor=\"end\" font-size=\"10\">" +
           tick(yv) + "</text>\n";
    }
    s += "<text x=\"" + fmt((px0 + px1) / 2) + "\" y=\"" + fmt(py0 + 34) +
         "\" text-anchor=\"middle\" font-size=\"12\">" + escape(p.x_label) + "</text>\n";
    s += "<text x=\"" + fmt(ox + 14) + "\" y=\"" + fmt((py0 + py1) / 2) + "\" text-anchor=\"middle\" font-size=\"12\"" +
         " transform=\"rotate(-90 " + fmt(ox + 14) + " " + fmt((py0 + py1) / 2) + ")\">" + escape(p.y_label) +
         "</text>\n";

    for (const auto& ser : p.series) {
      const auto color = [&](std::size_t k) -> const std::string& {
        return ser.colors.size() == ser.x.size() ? ser.colors[k] : ser.colors.front();
      };
      switch (ser.style) {
        case PlotSeries::Style::points:
          for (std::size_t k = 0; k < ser.x.size(); ++k) {
            s += "<circle cx=\"" + fmt(X(ser.x[k])) + "\" cy=\"" + fmt(Y(ser.y[k])) + "\" r=\"1.6\" fill=\"" +
                 color(k) + "\"/>\n";
          }
          break;
        case PlotSeries::Style::line: {
          s += "<polyline fill=\"none\" stroke=\"" + ser.colors.front() + "\" stroke-width=\"1.2\" points=\"";
          for (std::size_t k = 0; k < ser.x.size(); ++k) s += (k ? " " : "") + fmt(X(ser.x[k])) + "," + fmt(Y(ser.y[k]));
          s += "\"/>\n";
          break;
        }
        case PlotSeries::Style::band: {
          s += "<polygon stroke=\"none\" fill=\"" + ser.colors.front() + "\" points=\"";
          for (std::size_t k = 0; k < ser.x.size(); ++k) s += fmt(X(ser.x[k])) + "," + fmt(Y(ser.y[k])) + " ";
          for (std::size_t k = ser.x.size(); k-- > 0;) s += fmt(X(ser.x[k])) + "," + fmt(Y(ser.y_low[k])) + " ";
          s += "\"/>\n";
          break;
        }
      }
    }
    s += "</g>\n";
  }
  s += "</svg>\n";
  return s;
}

void emit_figure(FigureKind kind, const FigureInput& in, const std::string& path) {
  const std::string svg = to_svg(build_figure(kind, in));
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << svg;
}

}  // namespace oemsync
