#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>

#include "poth/error.hpp"
#include "poth_cli/cli.hpp"

namespace poth::cli {

namespace {

// Canvas and plot-area geometry, in SVG user units.
constexpr double kWidth = 800.0;
constexpr double kHeight = 500.0;
constexpr double kLeft = 80.0;
constexpr double kRight = 30.0;
constexpr double kTop = 50.0;
constexpr double kBottom = 90.0;
constexpr double kPlotW = kWidth - kLeft - kRight;
constexpr double kPlotH = kHeight - kTop - kBottom;

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

std::string px(double v) { return fmt("%.2f", v); }

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

// Smallest of {1, 2, 2.5, 5} x 10^k not below v; v > 0.
double nice_ceil(double v) {
  const double mag = std::pow(10.0, std::floor(std::log10(v)));
  for (double m : {1.0, 2.0, 2.5, 5.0, 10.0}) {
    if (m * mag >= v * (1.0 - 1e-12)) return m * mag;
  }
  return 10.0 * mag;
}

class Canvas {
 public:
  Canvas(double ymin, double ymax) : ymin_(ymin), ymax_(ymax) {}

  double y(double v) const { return kTop + (ymax_ - v) / (ymax_ - ymin_) * kPlotH; }

  void header(const std::string& title, const std::string& ylabel) {
    s_ += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    s_ += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" height=\"500\" "
          "viewBox=\"0 0 800 500\" font-family=\"sans-serif\" font-size=\"12\">\n";
    s_ += "<rect x=\"0\" y=\"0\" width=\"800\" height=\"500\" fill=\"white\"/>\n";
    text(kWidth / 2, 28, escape(title), "middle", "font-size=\"15\"");
    s_ += "<text x=\"20\" y=\"" + px(kTop + kPlotH / 2) +
          "\" text-anchor=\"middle\" transform=\"rotate(-90 20 " + px(kTop + kPlotH / 2) + ")\">" +
          escape(ylabel) + "</text>\n";
  }

  void y_axis(int ticks, const char* label_fmt) {
    s_ += "<g class=\"y-axis\" stroke=\"#888\">\n";
    for (int t = 0; t <= ticks; ++t) {
      const double v = ymin_ + (ymax_ - ymin_) * t / ticks;
      line(kLeft - 5, y(v), kLeft + kPlotW, y(v), t == 0 ? "#444" : "#ddd");
    }
    s_ += "</g>\n";
    for (int t = 0; t <= ticks; ++t) {
      const double v = ymin_ + (ymax_ - ymin_) * t / ticks;
      text(kLeft - 9, y(v) + 4, fmt(label_fmt, v), "end");
    }
    line(kLeft, kTop, kLeft, kTop + kPlotH, "#444");
  }

  void x_label(double x, const std::string& label) {
    s_ += "<text x=\"" + px(x) + "\" y=\"" + px(kTop + kPlotH + 16) +
          "\" text-anchor=\"end\" transform=\"rotate(-40 " + px(x) + " " + px(kTop + kPlotH + 16) +
          ")\">" + escape(label) + "</text>\n";
  }

  void line(double x1, double y1, double x2, double y2, const std::string& stroke,
            const std::string& extra = "") {
    s_ += "<line x1=\"" + px(x1) + "\" y1=\"" + px(y1) + "\" x2=\"" + px(x2) + "\" y2=\"" + px(y2) +
          "\" stroke=\"" + stroke + "\"" + (extra.empty() ? "" : " " + extra) + "/>\n";
  }

  void text(double x, double y, const std::string& body, const char* anchor,
            const std::string& extra = "") {
    s_ += "<text x=\"" + px(x) + "\" y=\"" + px(y) + "\" text-anchor=\"" + anchor + "\"" +
          (extra.empty() ? "" : " " + extra) + ">" + body + "</text>\n";
  }

  void raw(const std::string& s) { s_ += s; }

  std::string finish() { return s_ + "</svg>\n"; }

 private:
  double ymin_, ymax_;
  std::string s_;
};

std::string title(const HierarchyReport& r, const char* what) {
  return std::string(what) + " (POTH = " + fmt("%.3f", r.poth) + ", n = " +
         std::to_string(r.scores.size()) + ")";
}

void bars(Canvas& c, const std::vector<std::string>& labels, const std::vector<double>& values,
          double base, const std::string& fill) {
  const double slot = kPlotW / static_cast<double>(values.size());
  const double w = slot * 0.6;
  c.raw("<g class=\"bars\" fill=\"" + fill + "\">\n");
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double x = kLeft + slot * (static_cast<double>(i) + 0.2);
    const double top = std::min(c.y(values[i]), c.y(base));
    const double h = std::abs(c.y(values[i]) - c.y(base));
    c.raw("<rect x=\"" + px(x) + "\" y=\"" + px(top) + "\" width=\"" + px(w) + "\" height=\"" +
          px(h) + "\"/>\n");
  }
  c.raw("</g>\n");
  for (std::size_t i = 0; i < labels.size(); ++i) {
    c.x_label(kLeft + slot * (static_cast<double>(i) + 0.5), labels[i]);
  }
}

std::string plot_residuals(const HierarchyReport& r) {
  if (!r.residuals) throw ValidationError("report has no residuals to plot");
  double extent = 0.0;
  for (double v : *r.residuals) extent = std::max(extent, std::abs(v));
  extent = extent > 0.0 ? nice_ceil(extent) : 0.1;

  Canvas c(-extent, extent);
  c.header(title(r, "POTH residuals"), "POTH residual");
  c.y_axis(4, "%.3g");
  bars(c, r.scores.treatments().labels(), *r.residuals, 0.0, "#4a7ab5");
  c.line(kLeft, c.y(0.0), kLeft + kPlotW, c.y(0.0), "#000", "class=\"zero\"");
  return c.finish();
}

std::string plot_scores(const HierarchyReport& r) {
  Canvas c(0.0, 1.0);
  c.header(title(r, r.scores.kind() == ScoreKind::pscore ? "P-scores" : "SUCRA"),
           r.scores.kind() == ScoreKind::pscore ? "P-score" : "SUCRA");
  c.y_axis(5, "%.1f");
  bars(c, r.scores.treatments().labels(), r.scores.values(), 0.0, "#5a9e6f");
  c.line(kLeft, c.y(0.5), kLeft + kPlotW, c.y(0.5), "#b55", "stroke-dasharray=\"6 4\"");
  return c.finish();
}

std::string plot_cumulative(const HierarchyReport& r) {
  if (!r.cumulative) throw ValidationError("report has no cumulative series to plot");
  const auto& values = *r.cumulative;
  const auto order = best_first_order(r.scores);
  const auto& labels = r.scores.treatments().labels();

  Canvas c(0.0, 1.0);
  c.header(title(r, "Cumulative POTH"), "POTH of the best k");
  c.y_axis(5, "%.1f");

  const double slot = kPlotW / static_cast<double>(values.size());
  auto x = [&](std::size_t i) { return kLeft + slot * (static_cast<double>(i) + 0.5); };

  std::string points;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) points += ' ';
    points += px(x(i)) + "," + px(c.y(values[i]));
  }
  c.raw("<polyline fill=\"none\" stroke=\"#4a7ab5\" stroke-width=\"2\" points=\"" + points + "\"/>\n");
  c.raw("<g class=\"markers\" fill=\"#4a7ab5\">\n");
  for (std::size_t i = 0; i < values.size(); ++i) {
    c.raw("<circle cx=\"" + px(x(i)) + "\" cy=\"" + px(c.y(values[i])) + "\" r=\"4\"/>\n");
  }
  c.raw("</g>\n");
  for (std::size_t i = 0; i < values.size(); ++i) {
    const std::size_t k = i + 2;
    std::string added = labels[order[k - 1]];
    if (k == 2) added = labels[order[0]] + ", " + added;
    c.x_label(x(i), "k=" + std::to_string(k) + " +" + added);
  }
  return c.finish();
}

}  // namespace

const char* to_string(PlotKind k) noexcept {
  switch (k) {
    case PlotKind::residuals: return "residuals";
    case PlotKind::cumulative: return "cumulative";
    case PlotKind::scores: return "scores";
  }
  return "?";
}

PlotKind parse_plot_kind(std::string_view s) {
  if (s == "residuals") return PlotKind::residuals;
  if (s == "cumulative") return PlotKind::cumulative;
  if (s == "scores") return PlotKind::scores;
  throw ValidationError("unknown plot kind '" + std::string(s) +
                        "' (expected residuals, cumulative or scores)");
}

std::string render_svg(const HierarchyReport& report, PlotKind kind) {
  switch (kind) {
    case PlotKind::residuals: return plot_residuals(report);
    case PlotKind::cumulative: return plot_cumulative(report);
    case PlotKind::scores: return plot_scores(report);
  }
  throw ValidationError("unknown plot kind");
}

}  // namespace poth::cli
