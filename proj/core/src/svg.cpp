#include "ctc/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "ctc/errors.hpp"

namespace ctc {

namespace {

constexpr int kWidth = 820;
constexpr int kHeight = 520;
constexpr int kMarginLeft = 70;
constexpr int kMarginRight = 20;
constexpr int kMarginTop = 40;
constexpr int kMarginBottom = 50;

const char* kPalette[6] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

struct Series {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
};

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

/// Tick step of the form {1,2,5}*10^k giving 4-8 ticks over the span.
double tick_step(double span) {
    if (!(span > 0.0)) return 1.0;
    const double raw = span / 5.0;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    for (double mult : {1.0, 2.0, 5.0, 10.0}) {
        if (raw <= mult * mag) return mult * mag;
    }
    return 10.0 * mag;
}

void write_plot(const std::string& path, const std::string& title,
                const std::string& x_label, const std::string& y_label,
                const std::vector<Series>& series) {
    double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
    double ymin = xmin, ymax = -xmin;
    for (const Series& s : series) {
        for (double v : s.x) {
            xmin = std::min(xmin, v);
            xmax = std::max(xmax, v);
        }
        for (double v : s.y) {
            ymin = std::min(ymin, v);
            ymax = std::max(ymax, v);
        }
    }
    if (!(xmax > xmin)) xmax = xmin + 1.0;
    if (!(ymax > ymin)) {
        ymin -= 0.5;
        ymax += 0.5;
    }
    const double ypad = 0.05 * (ymax - ymin);
    ymin -= ypad;
    ymax += ypad;

    const double plot_w = kWidth - kMarginLeft - kMarginRight;
    const double plot_h = kHeight - kMarginTop - kMarginBottom;
    const auto sx = [&](double v) { return kMarginLeft + (v - xmin) / (xmax - xmin) * plot_w; };
    const auto sy = [&](double v) { return kMarginTop + (ymax - v) / (ymax - ymin) * plot_h; };

    std::ofstream out(path);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
        << kHeight << "\" viewBox=\"0 0 " << kWidth << " " << kHeight << "\">\n";
    out << "<rect width=\"" << kWidth << "\" height=\"" << kHeight << "\" fill=\"white\"/>\n";
    out << "<text x=\"" << kWidth / 2 << "\" y=\"22\" text-anchor=\"middle\" "
           "font-family=\"sans-serif\" font-size=\"15\">"
        << title << "</text>\n";

    // Frame and ticks.
    out << "<rect x=\"" << kMarginLeft << "\" y=\"" << kMarginTop << "\" width=\"" << plot_w
        << "\" height=\"" << plot_h << "\" fill=\"none\" stroke=\"#333\"/>\n";
    const double xstep = tick_step(xmax - xmin);
    for (double v = std::ceil(xmin / xstep) * xstep; v <= xmax + 1e-12 * xstep; v += xstep) {
        out << "<line x1=\"" << num(sx(v)) << "\" y1=\"" << kMarginTop + plot_h << "\" x2=\""
            << num(sx(v)) << "\" y2=\"" << kMarginTop + plot_h + 5 << "\" stroke=\"#333\"/>\n";
        out << "<text x=\"" << num(sx(v)) << "\" y=\"" << kMarginTop + plot_h + 20
            << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">"
            << num(v) << "</text>\n";
    }
    const double ystep = tick_step(ymax - ymin);
    for (double v = std::ceil(ymin / ystep) * ystep; v <= ymax + 1e-12 * ystep; v += ystep) {
        out << "<line x1=\"" << kMarginLeft - 5 << "\" y1=\"" << num(sy(v)) << "\" x2=\""
            << kMarginLeft << "\" y2=\"" << num(sy(v)) << "\" stroke=\"#333\"/>\n";
        out << "<text x=\"" << kMarginLeft - 8 << "\" y=\"" << num(sy(v) + 4)
            << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" << num(v)
            << "</text>\n";
    }
    out << "<text x=\"" << kMarginLeft + plot_w / 2 << "\" y=\"" << kHeight - 12
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">" << x_label
        << "</text>\n";
    out << "<text x=\"16\" y=\"" << kMarginTop + plot_h / 2
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\" "
           "transform=\"rotate(-90 16 "
        << kMarginTop + plot_h / 2 << ")\">" << y_label << "</text>\n";

    for (size_t i = 0; i < series.size(); ++i) {
        const Series& s = series[i];
        out << "<polyline fill=\"none\" stroke=\"" << kPalette[i % 6]
            << "\" stroke-width=\"1.4\" points=\"";
        for (size_t j = 0; j < s.x.size(); ++j) {
            if (j) out << ' ';
            out << num(sx(s.x[j])) << ',' << num(sy(s.y[j]));
        }
        out << "\"/>\n";
        out << "<text x=\"" << kMarginLeft + 10 << "\" y=\"" << kMarginTop + 16 + 16 * i
            << "\" font-family=\"sans-serif\" font-size=\"12\" fill=\"" << kPalette[i % 6]
            << "\">" << s.label << "</text>\n";
    }
    out << "</svg>\n";
    out.flush();
    if (!out) throw IoError("write failed for '" + path + "'");
}

std::vector<double> curve_samples(const Curve& curve, int axis, double smin, double smax) {
    std::vector<double> out;
    const int n = 400;
    out.reserve(n);
    for (int i = 0; i < n; ++i) {
        const double s = smin + (smax - smin) * i / (n - 1);
        out.push_back(curve.at(s).p[axis]);
    }
    return out;
}

}  // namespace

std::vector<std::string> write_plots(const SimLog& log, const Curve& curve,
                                     const std::string& dir) {
    if (log.size() == 0) throw IoError("write_plots: empty log");
    std::vector<std::string> written;

    // Deviation traces.
    {
        Series e1{"e1 [m]", log.t, {}};
        Series e2{"e2 [m]", log.t, {}};
        Series dist{"dist [m]", log.t, {}};
        Series dphi{"delta_phi [rad]", log.t, {}};
        for (size_t i = 0; i < log.size(); ++i) {
            e1.y.push_back(log.dev[i].e1);
            e2.y.push_back(log.dev[i].e2);
            dist.y.push_back(log.dist[i]);
            dphi.y.push_back(log.dev[i].delta_phi);
        }
        const std::string path = dir + "/deviation_vs_time.svg";
        write_plot(path, "Deviations from the reference curve", "t [s]", "deviation",
                   {e1, e2, dist, dphi});
        written.push_back(path);
    }

    // Path projections with the reference curve.
    double smin = log.dev.front().s, smax = smin;
    for (const DeviationState& d : log.dev) {
        smin = std::min(smin, d.s);
        smax = std::max(smax, d.s);
    }
    if (!(smax > smin)) smax = smin + 1.0;
    for (const auto& [file, ax1, ax2, title] :
         {std::tuple{std::string("path_xy.svg"), 0, 1, std::string("Path, XY projection")},
          std::tuple{std::string("path_xz.svg"), 0, 2, std::string("Path, XZ projection")}}) {
        Series ref{"reference", curve_samples(curve, ax1, smin, smax),
                   curve_samples(curve, ax2, smin, smax)};
        Series robot{"robot", {}, {}};
        for (size_t i = 0; i < log.size(); ++i) {
            robot.x.push_back(log.quad[i].position[ax1]);
            robot.y.push_back(log.quad[i].position[ax2]);
        }
        const std::string path = dir + "/" + file;
        write_plot(path, title, ax1 == 0 ? "x [m]" : "y [m]", ax2 == 1 ? "y [m]" : "z [m]",
                   {ref, robot});
        written.push_back(path);
    }

    // Control traces.
    {
        Series u1{"u1 [m/s^2]", log.t, {}};
        Series u2{"u2 [rad/s^2]", log.t, {}};
        Series u3{"u3 [rad/s^2]", log.t, {}};
        Series u4{"u4 [rad/s^2]", log.t, {}};
        for (size_t i = 0; i < log.size(); ++i) {
            u1.y.push_back(log.controls[i].u[0]);
            u2.y.push_back(log.controls[i].u[1]);
            u3.y.push_back(log.controls[i].u[2]);
            u4.y.push_back(log.controls[i].u[3]);
        }
        const std::string path = dir + "/controls.svg";
        write_plot(path, "Applied virtual controls", "t [s]", "control", {u1, u2, u3, u4});
        written.push_back(path);
    }
    return written;
}

}  // namespace ctc
