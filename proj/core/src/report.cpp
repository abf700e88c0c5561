#include <algorithm>
#include <cmath>
#include <filesystem>
#include <string>
#include <vector>

#include "ortholap/errors.hpp"
#include "ortholap/format.hpp"
#include "ortholap/harness.hpp"

namespace ortholap {

namespace {

// ------------------------------------------------------------------ SVG plot

constexpr int kWidth = 640;
constexpr int kHeight = 480;
constexpr int kLeft = 70;
constexpr int kRight = 20;
constexpr int kTop = 20;
constexpr int kBottom = 50;

struct LogWindow {
    double lo = 0.0;
    double hi = 1.0;
    double span() const { return hi - lo; }
};

LogWindow padded_window(double lo, double hi) {
    if (hi <= lo) return {lo - 0.5, lo + 0.5};
    const double pad = 0.05 * (hi - lo);
    return {lo - pad, hi + pad};
}

std::string svg_line(double x1, double y1, double x2, double y2, const std::string& style) {
    return "<line x1=\"" + fmt_g12(x1) + "\" y1=\"" + fmt_g12(y1) + "\" x2=\"" + fmt_g12(x2) +
           "\" y2=\"" + fmt_g12(y2) + "\" " + style + "/>\n";
}

std::string svg_text(double x, double y, const std::string& anchor, const std::string& body,
                     const std::string& extra = "") {
    return "<text x=\"" + fmt_g12(x) + "\" y=\"" + fmt_g12(y) + "\" font-size=\"12\" " +
           "font-family=\"sans-serif\" text-anchor=\"" + anchor + "\"" +
           (extra.empty() ? "" : " " + extra) + ">" + body + "</text>\n";
}

// Log-log scatter with an optional fitted line and an optional dashed guide
// line of prescribed slope anchored at the data midpoint.
std::string render_plot(const ReportInputs::PlotSeries& series) {
    require(!series.points.empty(), "DomainError",
            "a plot for '" + series.probe + "' needs at least one point");
    std::vector<double> lx, ly;
    for (const auto& [x, y] : series.points) {
        require(x > 0.0 && y > 0.0, "DomainError",
                "log-log plot for '" + series.probe + "' needs positive coordinates");
        lx.push_back(std::log10(x));
        ly.push_back(std::log10(y));
    }
    const LogWindow wx = padded_window(*std::min_element(lx.begin(), lx.end()),
                                       *std::max_element(lx.begin(), lx.end()));
    const LogWindow wy = padded_window(*std::min_element(ly.begin(), ly.end()),
                                       *std::max_element(ly.begin(), ly.end()));
    const double plot_w = kWidth - kLeft - kRight;
    const double plot_h = kHeight - kTop - kBottom;
    auto px = [&](double v) { return kLeft + (v - wx.lo) / wx.span() * plot_w; };
    auto py = [&](double v) { return kTop + plot_h - (v - wy.lo) / wy.span() * plot_h; };

    std::string svg;
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(kWidth) +
           "\" height=\"" + std::to_string(kHeight) + "\" viewBox=\"0 0 " +
           std::to_string(kWidth) + " " + std::to_string(kHeight) + "\">\n";
    svg += "<defs><clipPath id=\"plot\"><rect x=\"" + std::to_string(kLeft) + "\" y=\"" +
           std::to_string(kTop) + "\" width=\"" + fmt_g12(plot_w) + "\" height=\"" +
           fmt_g12(plot_h) + "\"/></clipPath></defs>\n";
    svg += "<rect x=\"0\" y=\"0\" width=\"" + std::to_string(kWidth) + "\" height=\"" +
           std::to_string(kHeight) + "\" fill=\"white\"/>\n";

    // Frame and ticks (5 per axis, linear in the log scale).
    svg += svg_line(kLeft, kTop, kLeft, kTop + plot_h, "stroke=\"black\"");
    svg += svg_line(kLeft, kTop + plot_h, kLeft + plot_w, kTop + plot_h, "stroke=\"black\"");
    for (int k = 0; k < 5; ++k) {
        const double tx = wx.lo + k * wx.span() / 4.0;
        const double ty = wy.lo + k * wy.span() / 4.0;
        const double sx = px(tx);
        const double sy = py(ty);
        svg += svg_line(sx, kTop + plot_h, sx, kTop + plot_h + 5, "stroke=\"black\"");
        svg += svg_text(sx, kTop + plot_h + 18, "middle", fmt_g12(std::pow(10.0, tx)));
        svg += svg_line(kLeft - 5, sy, kLeft, sy, "stroke=\"black\"");
        svg += svg_text(kLeft - 8, sy + 4, "end", fmt_g12(std::pow(10.0, ty)));
    }
    svg += svg_text(kLeft + plot_w / 2.0, kHeight - 8, "middle", series.x_label);
    svg += svg_text(16, kTop + plot_h / 2.0, "middle", series.y_label,
                    "transform=\"rotate(-90 16 " + fmt_g12(kTop + plot_h / 2.0) + ")\"");

    // Fitted and guide lines clipped to the plot area.
    svg += "<g clip-path=\"url(#plot)\">\n";
    if (series.fit) {
        const double y1 = series.fit->intercept + series.fit->slope * wx.lo;
        const double y2 = series.fit->intercept + series.fit->slope * wx.hi;
        svg += svg_line(px(wx.lo), py(y1), px(wx.hi), py(y2),
                        "stroke=\"#d62728\" stroke-width=\"1.5\"");
    }
    if (series.guide_slope) {
        double mx = 0.0, my = 0.0;
        for (std::size_t i = 0; i < lx.size(); ++i) {
            mx += lx[i];
            my += ly[i];
        }
        mx /= static_cast<double>(lx.size());
        my /= static_cast<double>(ly.size());
        const double s = *series.guide_slope;
        const double y1 = my + s * (wx.lo - mx);
        const double y2 = my + s * (wx.hi - mx);
        svg += svg_line(px(wx.lo), py(y1), px(wx.hi), py(y2),
                        "stroke=\"#2ca02c\" stroke-width=\"1.5\" stroke-dasharray=\"6 4\"");
    }
    svg += "</g>\n";

    // One marker per data point.
    for (std::size_t i = 0; i < lx.size(); ++i) {
        svg += "<circle cx=\"" + fmt_g12(px(lx[i])) + "\" cy=\"" + fmt_g12(py(ly[i])) +
               "\" r=\"4\" fill=\"#1f77b4\"/>\n";
    }

    // Legend in the upper-right corner of the plot area.
    double legend_y = kTop + 16;
    const double legend_x = kLeft + plot_w - 8;
    svg += svg_text(legend_x, legend_y, "end", series.probe);
    legend_y += 16;
    if (series.fit) {
        svg += svg_text(legend_x, legend_y, "end",
                        "fit slope = " + fmt_g12(series.fit->slope) +
                            ", R2 = " + fmt_g12(series.fit->r2));
        legend_y += 16;
    }
    if (series.guide_slope && !series.guide_label.empty()) {
        svg += svg_text(legend_x, legend_y, "end", series.guide_label);
        legend_y += 16;
    }
    svg += "</svg>\n";
    return svg;
}

// ------------------------------------------------------------------- tables

std::string fit_table(const std::vector<ReportInputs::FitRow>& rows) {
    std::string csv = "probe,slope,intercept,r2,n_points,status\n";
    for (const auto& row : rows) {
        if (row.fit) {
            csv += row.probe + "," + fmt_g12(row.fit->slope) + "," + fmt_g12(row.fit->intercept) +
                   "," + fmt_g12(row.fit->r2) + "," + std::to_string(row.fit->n_points) + "," +
                   row.status + "\n";
        } else {
            csv += row.probe + ",,,,0," + row.status + "\n";
        }
    }
    return csv;
}

std::string record_table(const std::vector<ReportInputs::RecordRow>& rows) {
    std::string csv = "probe,eps,max_err,bulk_err,boundary_err,n_vertices,solver_iters\n";
    for (const auto& row : rows) {
        csv += row.probe + "," + fmt_g12(row.eps) + "," + fmt_g12(row.max_err) + "," +
               fmt_g12(row.bulk_err) + "," + fmt_g12(row.boundary_err) + "," +
               std::to_string(row.n_vertices) + "," + std::to_string(row.solver_iters) + "\n";
    }
    return csv;
}

}  // namespace

std::vector<std::string> emit_report(const ReportInputs& in, const std::string& outdir) {
    require(!outdir.empty(), "DomainError", "the report needs an output directory");

    std::vector<std::pair<std::string, std::string>> files;
    files.emplace_back("fit.csv", fit_table(in.fits));
    if (!in.records.empty()) files.emplace_back("records.csv", record_table(in.records));
    for (const auto& extra : in.extras) {
        require(!extra.name.empty(), "DomainError", "extra report files need a name");
        files.emplace_back(extra.name, extra.content);
    }
    for (const auto& plot : in.plots) files.emplace_back("plot_" + plot.probe + ".svg",
                                                         render_plot(plot));
    if (!in.metadata.empty()) files.emplace_back("metadata.txt", join(in.metadata, "\n") + "\n");

    std::sort(files.begin(), files.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    for (std::size_t i = 1; i < files.size(); ++i)
        require(files[i].first != files[i - 1].first, "DomainError",
                "duplicate report file name '" + files[i].first + "'");

    std::vector<std::string> manifest;
    manifest.reserve(files.size());
    for (const auto& [name, content] : files) {
        write_text_file((std::filesystem::path(outdir) / name).string(), content);
        manifest.push_back(fnv1a64_hex(content) + "  " + name);
    }
    write_text_file((std::filesystem::path(outdir) / "manifest.txt").string(),
                    join(manifest, "\n") + "\n");
    return manifest;
}

}  // namespace ortholap
