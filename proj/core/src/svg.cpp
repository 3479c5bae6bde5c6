#include "lsmo/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace lsmo {

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4f", v);
  return buf;
}

// blue -> cyan -> yellow -> red ramp for v in [0, 1]
std::string heat_color(double v) {
  v = std::clamp(v, 0.0, 1.0);
  double r, g, b;
  if (v < 1.0 / 3) {
    const double t = v * 3.0;
    r = 0.1, g = 0.2 + 0.6 * t, b = 0.9;
  } else if (v < 2.0 / 3) {
    const double t = (v - 1.0 / 3) * 3.0;
    r = 0.1 + 0.85 * t, g = 0.8 + 0.15 * t, b = 0.9 * (1.0 - t);
  } else {
    const double t = (v - 2.0 / 3) * 3.0;
    r = 0.95, g = 0.95 * (1.0 - t), b = 0.0;
  }
  char buf[8];
  std::snprintf(buf, sizeof(buf), "#%02x%02x%02x", static_cast<int>(r * 255),
                static_cast<int>(g * 255), static_cast<int>(b * 255));
  return buf;
}

std::string fan_color(int idx, int total) {
  const double t = total > 1 ? static_cast<double>(idx) / (total - 1) : 0.5;
  char buf[8];
  std::snprintf(buf, sizeof(buf), "#%02x%02x%02x", static_cast<int>(40 + 200 * t), 60,
                static_cast<int>(240 - 200 * t));
  return buf;
}

std::ofstream open_svg(const std::string& path, double width, double height) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("svg: cannot write " + path);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
      << height << "\" viewBox=\"0 0 " << width << " " << height << "\">\n";
  return out;
}

}  // namespace

void emit_heatmap_plot(const ObjectiveFn& objective, int resolution,
                       const Eigen::MatrixXd& points, const std::string& path) {
  if (resolution < 2) throw std::invalid_argument("emit_heatmap_plot: resolution >= 2");
  if (objective.dim != 2) throw std::invalid_argument("emit_heatmap_plot: needs a 2-D objective");
  const double size = 600.0;
  auto out = open_svg(path, size, size);

  Eigen::MatrixXd values(resolution, resolution);
  double vmin = std::numeric_limits<double>::max();
  double vmax = std::numeric_limits<double>::lowest();
  for (int i = 0; i < resolution; ++i) {
    for (int j = 0; j < resolution; ++j) {
      Eigen::Vector2d x(
          objective.lo(0) + (objective.hi(0) - objective.lo(0)) * (i + 0.5) / resolution,
          objective.lo(1) + (objective.hi(1) - objective.lo(1)) * (j + 0.5) / resolution);
      values(i, j) = objective.eval(x);
      vmin = std::min(vmin, values(i, j));
      vmax = std::max(vmax, values(i, j));
    }
  }
  const double span = vmax > vmin ? vmax - vmin : 1.0;
  const double cell = size / resolution;
  for (int i = 0; i < resolution; ++i) {
    for (int j = 0; j < resolution; ++j) {
      // SVG y axis points down; x2 increases upwards
      out << "<rect x=\"" << fmt(i * cell) << "\" y=\"" << fmt(size - (j + 1) * cell)
          << "\" width=\"" << fmt(cell + 0.5) << "\" height=\"" << fmt(cell + 0.5)
          << "\" fill=\"" << heat_color((values(i, j) - vmin) / span) << "\"/>\n";
    }
  }
  for (Eigen::Index p = 0; p < points.rows(); ++p) {
    const double px = (points(p, 0) - objective.lo(0)) / (objective.hi(0) - objective.lo(0));
    const double py = (points(p, 1) - objective.lo(1)) / (objective.hi(1) - objective.lo(1));
    out << "<circle cx=\"" << fmt(px * size) << "\" cy=\"" << fmt(size - py * size)
        << "\" r=\"4\" fill=\"red\" stroke=\"white\" stroke-width=\"1\"/>\n";
  }
  out << "</svg>\n";
}

void emit_world_plot(const World2D& world, const std::vector<Trajectory>& trajectories,
                     const std::vector<double>& z_values, const std::string& path) {
  if (!z_values.empty() && z_values.size() != trajectories.size()) {
    throw std::invalid_argument("emit_world_plot: z label count mismatch");
  }
  const double size = 600.0;
  const Eigen::Vector2d span = world.hi - world.lo;
  auto to_px = [&](const Eigen::Vector2d& p) {
    return Eigen::Vector2d((p(0) - world.lo(0)) / span(0) * size,
                           size - (p(1) - world.lo(1)) / span(1) * size);
  };
  const double scale = size / span(0);

  auto out = open_svg(path, size, size);
  out << "<rect x=\"0\" y=\"0\" width=\"" << size << "\" height=\"" << size
      << "\" fill=\"#f8f8f4\"/>\n";
  for (const Obstacle& obs : world.obstacles) {
    const Eigen::Vector2d c = to_px(obs.center);
    out << "<circle cx=\"" << fmt(c(0)) << "\" cy=\"" << fmt(c(1)) << "\" r=\""
        << fmt((obs.radius + world.margin) * scale)
        << "\" fill=\"none\" stroke=\"#c0c0c0\" stroke-dasharray=\"4 3\"/>\n";
    out << "<circle cx=\"" << fmt(c(0)) << "\" cy=\"" << fmt(c(1)) << "\" r=\""
        << fmt(obs.radius * scale) << "\" fill=\"#707070\"/>\n";
  }
  const int total = static_cast<int>(trajectories.size());
  for (int i = 0; i < total; ++i) {
    out << "<polyline fill=\"none\" stroke=\"" << fan_color(i, total)
        << "\" stroke-width=\"2\" points=\"";
    const Eigen::MatrixXd seq = trajectories[i].sequence();
    for (Eigen::Index t = 0; t < seq.rows(); ++t) {
      const Eigen::Vector2d p = to_px(seq.row(t).transpose());
      out << fmt(p(0)) << "," << fmt(p(1)) << (t + 1 < seq.rows() ? " " : "");
    }
    out << "\"";
    if (!z_values.empty()) out << " data-z=\"" << fmt(z_values[i]) << "\"";
    out << "/>\n";
  }
  const Eigen::Vector2d s = to_px(world.start);
  const Eigen::Vector2d g = to_px(world.goal);
  out << "<circle cx=\"" << fmt(s(0)) << "\" cy=\"" << fmt(s(1))
      << "\" r=\"6\" fill=\"#2060d0\"/>\n";
  out << "<circle cx=\"" << fmt(g(0)) << "\" cy=\"" << fmt(g(1))
      << "\" r=\"6\" fill=\"#d03030\"/>\n";
  out << "</svg>\n";
}

void emit_curves_plot(const TrainReport& report, const std::string& path) {
  const double w = 800.0, h = 400.0, pad = 40.0;
  const std::size_t epochs = report.loss.size();
  if (epochs < 2) throw std::invalid_argument("emit_curves_plot: need >= 2 epochs");

  auto out = open_svg(path, w, h);
  out << "<rect x=\"0\" y=\"0\" width=\"" << w << "\" height=\"" << h
      << "\" fill=\"white\"/>\n";
  out << "<line x1=\"" << pad << "\" y1=\"" << h - pad << "\" x2=\"" << w - pad
      << "\" y2=\"" << h - pad << "\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << pad << "\" y1=\"" << pad << "\" x2=\"" << pad << "\" y2=\""
      << h - pad << "\" stroke=\"black\"/>\n";

  auto draw_series = [&](const std::vector<double>& ys, const std::string& color) {
    const double lo = *std::min_element(ys.begin(), ys.end());
    const double hi = *std::max_element(ys.begin(), ys.end());
    const double span = hi > lo ? hi - lo : 1.0;
    out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t e = 0; e < ys.size(); ++e) {
      const double x = pad + (w - 2 * pad) * e / (ys.size() - 1);
      const double y = h - pad - (h - 2 * pad) * (ys[e] - lo) / span;
      out << fmt(x) << "," << fmt(y) << (e + 1 < ys.size() ? " " : "");
    }
    out << "\"/>\n";
  };

  draw_series(report.loss, "#d03030");
  for (Eigen::Index c = 0; c < report.kl_per_channel.cols(); ++c) {
    std::vector<double> kl(epochs);
    for (std::size_t e = 0; e < epochs; ++e) {
      kl[e] = report.kl_per_channel(static_cast<Eigen::Index>(e), c);
    }
    draw_series(kl, c == 0 ? "#2060d0" : "#20a060");
  }
  out << "</svg>\n";
}

}  // namespace lsmo
