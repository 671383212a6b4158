#include "curvimg/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

#include "curvimg/errors.hpp"

namespace curvimg {

namespace {

std::string fmt(const char* pattern, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), pattern, v);
  return buf;
}

std::string num(double v) { return fmt("%.15g", v); }

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path);
  out << content;
  if (!out) throw IoError("write failed: " + path);
}

// Minimal SVG assembly; every coordinate goes through one fixed format so
// the output is byte-stable.
struct Svg {
  std::string body;
  double width, height;

  Svg(double w, double h) : width(w), height(h) {}

  static std::string coord(double v) { return fmt("%.2f", v); }

  void open_tag(const std::string& tag) { body += tag + "\n"; }

  void line(double x1, double y1, double x2, double y2, const std::string& stroke,
            double w = 1.0) {
    body += "<line x1=\"" + coord(x1) + "\" y1=\"" + coord(y1) + "\" x2=\"" + coord(x2) +
            "\" y2=\"" + coord(y2) + "\" stroke=\"" + stroke + "\" stroke-width=\"" +
            coord(w) + "\"/>\n";
  }

  void rect(double x, double y, double w, double h, const std::string& stroke) {
    body += "<rect x=\"" + coord(x) + "\" y=\"" + coord(y) + "\" width=\"" + coord(w) +
            "\" height=\"" + coord(h) + "\" fill=\"none\" stroke=\"" + stroke + "\"/>\n";
  }

  void polyline(const std::vector<std::pair<double, double>>& pts,
                const std::string& stroke, double w, bool close = false) {
    if (pts.size() < 2) return;
    body += close ? "<polygon points=\"" : "<polyline points=\"";
    for (size_t i = 0; i < pts.size(); ++i) {
      if (i) body += " ";
      body += coord(pts[i].first) + "," + coord(pts[i].second);
    }
    body += "\" fill=\"none\" stroke=\"" + stroke + "\" stroke-width=\"" + coord(w) +
            "\"/>\n";
  }

  void text(double x, double y, const std::string& s, const std::string& fill,
            int size = 12) {
    body += "<text x=\"" + coord(x) + "\" y=\"" + coord(y) + "\" font-size=\"" +
            std::to_string(size) + "\" font-family=\"monospace\" fill=\"" + fill +
            "\">" + s + "</text>\n";
  }

  std::string finish() const {
    return "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" +
           coord(width) + "\" height=\"" + coord(height) + "\" viewBox=\"0 0 " +
           coord(width) + " " + coord(height) + "\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n" +
           body + "</svg>\n";
  }
};

std::string shade(int index, int count) {
  // Light gray for early snapshots, saturated blue for the final one.
  const double t = count > 1 ? double(index) / double(count - 1) : 1.0;
  const int r = int(200 + t * (25 - 200));
  const int g = int(200 + t * (90 - 200));
  const int b = int(200 + t * (170 - 200));
  char buf[16];
  std::snprintf(buf, sizeof(buf), "#%02x%02x%02x", r, g, b);
  return buf;
}

const char* kPalette[6] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728",
                           "#9467bd", "#8c564b"};

struct Series {
  std::string label;
  std::vector<std::pair<double, double>> points;  // (iter, value), finite only
};

// One framed panel with polylines, min/max axis labels, and a legend row.
void draw_panel(Svg& svg, double x0, double y0, double w, double h,
                const std::vector<Series>& series, const std::string& title) {
  svg.rect(x0, y0, w, h, "#888888");
  double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
  double ymin = xmin, ymax = -xmin;
  for (const auto& s : series) {
    for (const auto& [px, py] : s.points) {
      xmin = std::min(xmin, px), xmax = std::max(xmax, px);
      ymin = std::min(ymin, py), ymax = std::max(ymax, py);
    }
  }
  if (!(xmin <= xmax)) {
    svg.text(x0 + 8, y0 + h / 2, "no finite data", "#888888");
    return;
  }
  if (xmax - xmin < 1) xmax = xmin + 1;
  const double pad = std::max((ymax - ymin) * 0.05, 1e-12);
  ymin -= pad, ymax += pad;

  const auto sx = [&](double v) { return x0 + (v - xmin) / (xmax - xmin) * w; };
  const auto sy = [&](double v) { return y0 + h - (v - ymin) / (ymax - ymin) * h; };

  double lx = x0 + 8;
  svg.text(lx, y0 - 6, title, "#333333");
  lx += 8.0 * (title.size() + 2);
  for (size_t i = 0; i < series.size(); ++i) {
    const std::string color = kPalette[i % 6];
    std::vector<std::pair<double, double>> pts;
    double prev_x = std::numeric_limits<double>::quiet_NaN();
    for (const auto& [px, py] : series[i].points) {
      // Break the line across gaps left by skipped (non-finite) rows.
      if (!pts.empty() && px != prev_x + 1) {
        svg.polyline(pts, color, 1.5);
        pts.clear();
      }
      pts.emplace_back(sx(px), sy(py));
      prev_x = px;
    }
    svg.polyline(pts, color, 1.5);
    svg.text(lx, y0 - 6, series[i].label, color);
    lx += 8.0 * (series[i].label.size() + 2);
  }
  svg.text(x0 + 2, y0 + h + 14, fmt("%.6g", xmin), "#555555");
  svg.text(x0 + w - 60, y0 + h + 14, fmt("%.6g", xmax), "#555555");
  svg.text(x0 - 2 + 4, y0 + h - 4, fmt("%.6g", ymin), "#555555");
  svg.text(x0 - 2 + 4, y0 + 12, fmt("%.6g", ymax), "#555555");
}

}  // namespace

const char* status_name(RunStatus s) {
  switch (s) {
    case RunStatus::kConverged: return "converged";
    case RunStatus::kMaxIter: return "max_iter";
    case RunStatus::kError: return "error";
  }
  return "error";
}

void write_trace_csv(const std::string& path, const IterationTrace& trace) {
  std::string out =
      "iter,volume,A_p,B_p,Omega_p,vol_product,hausdorff_step,residual,vol_ratio,"
      "h_min,h_max,ms\n";
  for (const TraceRow& r : trace.rows) {
    out += std::to_string(r.iter);
    for (double v : {r.volume, r.a_p, r.b_p, r.omega_p, r.vol_product,
                     r.hausdorff_step, r.residual, r.vol_ratio, r.h_min, r.h_max}) {
      out += "," + num(v);
    }
    out += "," + fmt("%.3f", r.ms) + "\n";
  }
  write_file(path, out);
}

void write_snapshot_csv(const std::string& path, const Body2D& k) {
  const SphereGrid& grid = *k.grid();
  const Eigen::VectorXd& h = k.support_samples();
  const Eigen::VectorXd f = k.curvature_samples();
  std::string out = "theta,h,f\n";
  for (int i = 0; i < grid.count(); ++i)
    out += num(grid.theta[i]) + "," + num(h[i]) + "," + num(f[i]) + "\n";
  write_file(path, out);
}

void write_snapshot_csv(const std::string& path, const Polytope3D& k) {
  const SphereGrid& grid = k.grid();
  const Eigen::VectorXd& h = k.support_numbers();
  const Eigen::VectorXd& a = k.facet_areas();
  std::string out = "ux,uy,uz,h,A\n";
  for (int i = 0; i < grid.count(); ++i) {
    out += num(grid.nodes(i, 0)) + "," + num(grid.nodes(i, 1)) + "," +
           num(grid.nodes(i, 2)) + "," + num(h[i]) + "," + num(a[i]) + "\n";
  }
  write_file(path, out);
}

void write_off(const std::string& path, const Polytope3D& k) {
  const auto& verts = k.vertices();
  const auto& cycles = k.facet_cycles();
  int faces = 0;
  for (const auto& c : cycles)
    if (c.size() >= 3) ++faces;
  std::string out = "OFF\n" + std::to_string(verts.size()) + " " +
                    std::to_string(faces) + " 0\n";
  for (const auto& v : verts)
    out += num(v[0]) + " " + num(v[1]) + " " + num(v[2]) + "\n";
  for (const auto& c : cycles) {
    if (c.size() < 3) continue;
    out += std::to_string(c.size());
    for (int id : c) out += " " + std::to_string(id);
    out += "\n";
  }
  write_file(path, out);
}

void write_outlines_svg(const std::string& path,
                        const std::vector<std::pair<int, Body2D>>& snapshots) {
  const double size = 640, margin = 30;
  Svg svg(size, size);
  double radius = 1e-12;
  std::vector<std::vector<std::pair<double, double>>> outlines;
  for (const auto& [iter, body] : snapshots) {
    std::vector<std::pair<double, double>> pts;
    const int samples = 512;
    for (int i = 0; i < samples; ++i) {
      const double theta = 2.0 * M_PI * i / samples;
      const Eigen::Vector2d x = body.boundary_point(theta);
      radius = std::max({radius, std::abs(x[0]), std::abs(x[1])});
      pts.emplace_back(x[0], x[1]);
    }
    outlines.push_back(std::move(pts));
  }
  const double scale = (size / 2 - margin) / radius;
  const auto sx = [&](double v) { return size / 2 + scale * v; };
  const auto sy = [&](double v) { return size / 2 - scale * v; };
  svg.line(sx(-radius), sy(0), sx(radius), sy(0), "#dddddd");
  svg.line(sx(0), sy(-radius), sx(0), sy(radius), "#dddddd");
  for (size_t s = 0; s < outlines.size(); ++s) {
    std::vector<std::pair<double, double>> pts;
    pts.reserve(outlines[s].size());
    for (const auto& [x, y] : outlines[s]) pts.emplace_back(sx(x), sy(y));
    const bool last = s + 1 == outlines.size();
    svg.polyline(pts, shade(int(s), int(outlines.size())), last ? 2.0 : 1.0, true);
    svg.text(10, 18 + 14 * double(s), "step " + std::to_string(snapshots[s].first),
             shade(int(s), int(outlines.size())));
  }
  write_file(path, svg.finish());
}

void write_curves_svg(const std::string& path, const IterationTrace& trace) {
  const double w = 880, h = 300, mx = 60, my = 40;
  Svg svg(w + 2 * mx, 2 * (h + 2 * my));

  const auto collect = [&](const char* label, auto&& get, bool log10) {
    Series s;
    s.label = label;
    double base = std::numeric_limits<double>::quiet_NaN();
    for (const TraceRow& r : trace.rows) {
      double v = get(r);
      if (!std::isfinite(v)) continue;
      if (log10) {
        if (v <= 0) continue;
        v = std::log10(v);
      } else {
        if (std::isnan(base)) base = v;
        v = base != 0 ? v / base : v;
      }
      s.points.emplace_back(double(r.iter), v);
    }
    return s;
  };

  std::vector<Series> top = {
      collect("volume", [](const TraceRow& r) { return r.volume; }, false),
      collect("A_p", [](const TraceRow& r) { return r.a_p; }, false),
      collect("B_p", [](const TraceRow& r) { return r.b_p; }, false),
      collect("Omega_p", [](const TraceRow& r) { return r.omega_p; }, false),
      collect("vol_product", [](const TraceRow& r) { return r.vol_product; }, false),
  };
  std::vector<Series> bottom = {
      collect("log10 residual", [](const TraceRow& r) { return r.residual; }, true),
      collect("log10 step", [](const TraceRow& r) { return r.hausdorff_step; }, true),
  };
  draw_panel(svg, mx, my, w, h, top, "relative");
  draw_panel(svg, mx, h + 3 * my, w, h, bottom, "decay");
  write_file(path, svg.finish());
}

}  // namespace curvimg
