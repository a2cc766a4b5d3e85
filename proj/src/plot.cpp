#include "microdl/plot.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#include "microdl/error.hpp"

namespace microdl {

namespace {

constexpr double kPanelW = 420.0;
constexpr double kPanelH = 300.0;
constexpr double kMarginL = 50.0;
constexpr double kMarginR = 20.0;
constexpr double kMarginT = 36.0;
constexpr double kMarginB = 56.0;

const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};

struct MetricField {
  const char* label;
  double MetricSet::*field;
};
const MetricField kMetrics[] = {{"Accuracy", &MetricSet::accuracy},
                                {"Jaccard index", &MetricSet::jaccard},
                                {"FM index", &MetricSet::fm},
                                {"Rand index", &MetricSet::rand}};

// Fixed two-decimal coordinates keep the output byte-stable.
std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", x);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out += c;
    }
  }
  return out;
}

template <typename T>
void push_unique(std::vector<T>& v, const T& x) {
  if (std::find(v.begin(), v.end(), x) == v.end()) v.push_back(x);
}

void header(std::ostream& out, double w, double h, const std::string& title) {
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(w) << "\" height=\""
      << num(h) << "\" viewBox=\"0 0 " << num(w) << ' ' << num(h) << "\">\n"
      << "<title>" << escape(title) << "</title>\n"
      << "<rect x=\"0\" y=\"0\" width=\"" << num(w) << "\" height=\"" << num(h)
      << "\" fill=\"white\"/>\n"
      << "<style>text{font-family:sans-serif;font-size:11px}</style>\n";
}

// Frame, title and a 0..1 y axis with ticks for one panel at (x0, y0).
void axes(std::ostream& out, double x0, double y0, const std::string& title) {
  const double left = x0 + kMarginL;
  const double bottom = y0 + kPanelH - kMarginB;
  const double top = y0 + kMarginT;
  const double right = x0 + kPanelW - kMarginR;
  out << "<text x=\"" << num(x0 + kPanelW / 2) << "\" y=\"" << num(y0 + 20)
      << "\" text-anchor=\"middle\" font-weight=\"bold\">" << escape(title) << "</text>\n";
  for (int t = 0; t <= 5; ++t) {
    const double v = t / 5.0;
    const double y = bottom - v * (bottom - top);
    out << "<line x1=\"" << num(left) << "\" y1=\"" << num(y) << "\" x2=\"" << num(right)
        << "\" y2=\"" << num(y) << "\" stroke=\"#dddddd\"/>\n"
        << "<text x=\"" << num(left - 6) << "\" y=\"" << num(y + 4)
        << "\" text-anchor=\"end\">" << num(v) << "</text>\n";
  }
  out << "<line x1=\"" << num(left) << "\" y1=\"" << num(top) << "\" x2=\"" << num(left)
      << "\" y2=\"" << num(bottom) << "\" stroke=\"black\"/>\n"
      << "<line x1=\"" << num(left) << "\" y1=\"" << num(bottom) << "\" x2=\"" << num(right)
      << "\" y2=\"" << num(bottom) << "\" stroke=\"black\"/>\n";
}

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

void grouped_bars(std::ostream& out, const std::vector<ResultSummary>& all) {
  std::vector<std::string> datasets, algorithms;
  std::map<std::pair<std::string, std::string>, MetricSet> mean;
  for (const auto& s : all) {
    if (s.group != "main" || s.runs == 0) continue;
    push_unique(datasets, s.dataset);
    push_unique(algorithms, s.algorithm);
    mean[{s.dataset, s.algorithm}] = s.mean;
  }
  if (datasets.empty()) throw DataError("grouped-bars plot: no successful main results");

  const double legend_h = 18.0 * static_cast<double>(algorithms.size()) + 10.0;
  const double width = 2 * kPanelW;
  const double height = 2 * kPanelH + legend_h;
  header(out, width, height, "Clustering performance by method");
  for (std::size_t p = 0; p < 4; ++p) {
    const double x0 = kPanelW * static_cast<double>(p % 2);
    const double y0 = kPanelH * static_cast<double>(p / 2);
    out << "<g class=\"panel\" data-metric=\"" << escape(kMetrics[p].label) << "\">\n";
    axes(out, x0, y0, kMetrics[p].label);
    const double left = x0 + kMarginL;
    const double bottom = y0 + kPanelH - kMarginB;
    const double plot_h = kPanelH - kMarginT - kMarginB;
    const double group_w = (kPanelW - kMarginL - kMarginR) / static_cast<double>(datasets.size());
    const double bar_w = group_w * 0.8 / static_cast<double>(algorithms.size());
    for (std::size_t d = 0; d < datasets.size(); ++d) {
      const double gx = left + group_w * static_cast<double>(d) + group_w * 0.1;
      out << "<g class=\"bar-group\" data-dataset=\"" << escape(datasets[d]) << "\">\n";
      for (std::size_t a = 0; a < algorithms.size(); ++a) {
        const auto it = mean.find({datasets[d], algorithms[a]});
        if (it == mean.end()) continue;
        const double v = clamp01(it->second.*kMetrics[p].field);
        out << "<rect class=\"bar\" x=\"" << num(gx + bar_w * static_cast<double>(a))
            << "\" y=\"" << num(bottom - v * plot_h) << "\" width=\"" << num(bar_w)
            << "\" height=\"" << num(v * plot_h) << "\" fill=\"" << kPalette[a % 8]
            << "\"><title>" << escape(algorithms[a]) << ": " << num(v) << "</title></rect>\n";
      }
      out << "<text x=\"" << num(gx + group_w * 0.4) << "\" y=\"" << num(bottom + 16)
          << "\" text-anchor=\"middle\">" << escape(datasets[d]) << "</text>\n";
      out << "</g>\n";
    }
    out << "</g>\n";
  }
  for (std::size_t a = 0; a < algorithms.size(); ++a) {
    const double y = 2 * kPanelH + 6 + 18.0 * static_cast<double>(a);
    out << "<rect x=\"" << num(kMarginL) << "\" y=\"" << num(y) << "\" width=\"12\" height=\"12\" fill=\""
        << kPalette[a % 8] << "\"/>\n"
        << "<text x=\"" << num(kMarginL + 18) << "\" y=\"" << num(y + 10) << "\">"
        << escape(algorithms[a]) << "</text>\n";
  }
  out << "</svg>\n";
}

void alpha_curve(std::ostream& out, const std::vector<ResultSummary>& all) {
  std::vector<std::string> datasets;
  std::map<std::string, std::map<double, MetricSet>> curve;
  for (const auto& s : all) {
    if (s.group != "sweep" || s.runs == 0) continue;
    push_unique(datasets, s.dataset);
    curve[s.dataset][s.alpha] = s.mean;
  }
  if (datasets.empty()) throw DataError("alpha-curve plot: no successful sweep results");

  const double legend_h = 18.0 * 4 + 10.0;
  const double width = kPanelW;
  const double height = kPanelH * static_cast<double>(datasets.size()) + legend_h;
  header(out, width, height, "Effect of the scale coefficient");
  for (std::size_t d = 0; d < datasets.size(); ++d) {
    const double y0 = kPanelH * static_cast<double>(d);
    out << "<g class=\"panel\" data-dataset=\"" << escape(datasets[d]) << "\">\n";
    axes(out, 0.0, y0, datasets[d]);
    const auto& pts = curve.at(datasets[d]);
    const double lo = pts.begin()->first;
    const double hi = pts.rbegin()->first;
    const double left = kMarginL;
    const double right = kPanelW - kMarginR;
    const double bottom = y0 + kPanelH - kMarginB;
    const double plot_h = kPanelH - kMarginT - kMarginB;
    auto xpos = [&](double a) {
      return hi > lo ? left + (a - lo) / (hi - lo) * (right - left) : 0.5 * (left + right);
    };
    for (const auto& [a, m] : pts) {
      (void)m;
      out << "<text x=\"" << num(xpos(a)) << "\" y=\"" << num(bottom + 16)
          << "\" text-anchor=\"middle\">" << num(a) << "</text>\n";
    }
    out << "<text x=\"" << num(0.5 * (left + right)) << "\" y=\"" << num(bottom + 34)
        << "\" text-anchor=\"middle\">alpha</text>\n";
    for (std::size_t k = 0; k < 4; ++k) {
      out << "<polyline class=\"curve\" data-metric=\"" << escape(kMetrics[k].label)
          << "\" fill=\"none\" stroke=\"" << kPalette[k] << "\" stroke-width=\"2\" points=\"";
      bool first = true;
      for (const auto& [a, m] : pts) {
        out << (first ? "" : " ") << num(xpos(a)) << ','
            << num(bottom - clamp01(m.*kMetrics[k].field) * plot_h);
        first = false;
      }
      out << "\"/>\n";
    }
    out << "</g>\n";
  }
  for (std::size_t k = 0; k < 4; ++k) {
    const double y = kPanelH * static_cast<double>(datasets.size()) + 6 + 18.0 * static_cast<double>(k);
    out << "<rect x=\"" << num(kMarginL) << "\" y=\"" << num(y) << "\" width=\"12\" height=\"12\" fill=\""
        << kPalette[k] << "\"/>\n"
        << "<text x=\"" << num(kMarginL + 18) << "\" y=\"" << num(y + 10) << "\">"
        << kMetrics[k].label << "</text>\n";
  }
  out << "</svg>\n";
}

}  // namespace

PlotKind plot_kind_from_string(const std::string& s) {
  if (s == "grouped-bars") return PlotKind::kGroupedBars;
  if (s == "alpha-curve") return PlotKind::kAlphaCurve;
  throw ConfigError("unknown plot kind '" + s + "' (expected grouped-bars or alpha-curve)");
}

void render_svg(std::ostream& out, const ResultsTable& table, PlotKind kind) {
  if (table.empty()) throw DataError("cannot plot an empty results table");
  const auto summary = table.summarize();
  if (kind == PlotKind::kGroupedBars) {
    grouped_bars(out, summary);
  } else {
    alpha_curve(out, summary);
  }
}

void render_plots(const ResultsTable& table, PlotKind kind, const std::string& path) {
  std::ostringstream buf;
  render_svg(buf, table, kind);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write '" + path + "'");
  out << buf.str();
}

}  // namespace microdl
