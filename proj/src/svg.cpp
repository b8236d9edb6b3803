#include "rvk/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace rvk {

namespace {

constexpr double kW = 720, kH = 480;
constexpr double kLeft = 60, kRight = 160, kTop = 40, kBottom = 50;
constexpr double kPlotW = kW - kLeft - kRight;
constexpr double kPlotH = kH - kTop - kBottom;

const char* kPalette[10] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                            "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

void open_svg(std::ostringstream& out, const std::string& title) {
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kW << "\" height=\"" << kH
        << "\" viewBox=\"0 0 " << kW << ' ' << kH << "\">\n";
    out << "<rect width=\"" << kW << "\" height=\"" << kH << "\" fill=\"white\"/>\n";
    out << "<text x=\"" << kLeft << "\" y=\"24\" font-family=\"sans-serif\" font-size=\"16\">"
        << title << "</text>\n";
}

void axes(std::ostringstream& out) {
    out << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << kPlotW
        << "\" height=\"" << kPlotH << "\" fill=\"none\" stroke=\"#444\"/>\n";
}

void legend_entry(std::ostringstream& out, size_t i, const std::string& label,
                  const char* color) {
    const double y = kTop + 14 + 18.0 * double(i);
    out << "<rect x=\"" << kW - kRight + 12 << "\" y=\"" << y - 9
        << "\" width=\"12\" height=\"12\" fill=\"" << color << "\"/>\n";
    out << "<text x=\"" << kW - kRight + 30 << "\" y=\"" << y + 2
        << "\" font-family=\"sans-serif\" font-size=\"11\">" << label << "</text>\n";
}

}  // namespace

std::string svg_roc(const std::string& title, const std::vector<RocCurve>& curves) {
    std::ostringstream out;
    open_svg(out, title);
    axes(out);
    const auto px = [](double fpr) { return kLeft + fpr * kPlotW; };
    const auto py = [](double tpr) { return kTop + (1.0 - tpr) * kPlotH; };

    out << "<line x1=\"" << px(0) << "\" y1=\"" << py(0) << "\" x2=\"" << px(1) << "\" y2=\""
        << py(1) << "\" stroke=\"#bbb\" stroke-dasharray=\"4 4\"/>\n";
    for (int t = 0; t <= 4; ++t) {
        const double v = t / 4.0;
        out << "<text x=\"" << fmt(px(v) - 8) << "\" y=\"" << kH - kBottom + 18
            << "\" font-family=\"sans-serif\" font-size=\"10\">" << fmt(v) << "</text>\n";
        out << "<text x=\"" << kLeft - 34 << "\" y=\"" << fmt(py(v) + 4)
            << "\" font-family=\"sans-serif\" font-size=\"10\">" << fmt(v) << "</text>\n";
    }
    out << "<text x=\"" << kLeft + kPlotW / 2 - 60 << "\" y=\"" << kH - 14
        << "\" font-family=\"sans-serif\" font-size=\"12\">false positive rate</text>\n";

    for (size_t i = 0; i < curves.size(); ++i) {
        const char* color = kPalette[i % 10];
        out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
        for (const RocPoint& p : curves[i].points)
            out << fmt(px(p.fpr)) << ',' << fmt(py(p.tpr)) << ' ';
        out << "\"/>\n";
        legend_entry(out, i, curves[i].label, color);
    }
    out << "</svg>\n";
    return out.str();
}

std::string svg_bars(const std::string& title, const std::vector<std::string>& groups,
                     const std::vector<std::string>& series,
                     const std::vector<std::vector<double>>& values, double reference) {
    double top = reference;
    for (const auto& row : values)
        for (double v : row) top = std::max(top, v);
    top *= 1.1;
    if (top <= 0.0) top = 1.0;

    std::ostringstream out;
    open_svg(out, title);
    axes(out);
    const auto py = [&](double v) { return kTop + (1.0 - v / top) * kPlotH; };

    const double group_w = kPlotW / double(groups.size());
    const double bar_w = group_w * 0.8 / double(std::max<size_t>(1, series.size()));
    for (size_t g = 0; g < groups.size(); ++g) {
        for (size_t s = 0; s < series.size(); ++s) {
            const double v = std::min(values[g][s], top);
            const double x = kLeft + group_w * double(g) + group_w * 0.1 + bar_w * double(s);
            out << "<rect x=\"" << fmt(x) << "\" y=\"" << fmt(py(v)) << "\" width=\""
                << fmt(bar_w) << "\" height=\"" << fmt(py(0) - py(v)) << "\" fill=\""
                << kPalette[s % 10] << "\"/>\n";
        }
        out << "<text x=\"" << fmt(kLeft + group_w * (double(g) + 0.5) - 24) << "\" y=\""
            << kH - kBottom + 18 << "\" font-family=\"sans-serif\" font-size=\"10\">" << groups[g]
            << "</text>\n";
    }
    out << "<line x1=\"" << kLeft << "\" y1=\"" << fmt(py(reference)) << "\" x2=\""
        << kLeft + kPlotW << "\" y2=\"" << fmt(py(reference))
        << "\" stroke=\"#d62728\" stroke-dasharray=\"6 4\"/>\n";
    out << "<text x=\"" << kLeft + 4 << "\" y=\"" << fmt(py(reference) - 4)
        << "\" font-family=\"sans-serif\" font-size=\"10\" fill=\"#d62728\">threshold "
        << fmt(reference) << "</text>\n";
    for (size_t s = 0; s < series.size(); ++s) legend_entry(out, s, series[s], kPalette[s % 10]);
    out << "</svg>\n";
    return out.str();
}

std::string svg_box(const std::string& title, const std::vector<std::string>& labels,
                    const std::vector<std::vector<double>>& samples) {
    std::ostringstream out;
    open_svg(out, title);
    axes(out);
    const auto py = [](double v) { return kTop + (1.0 - v) * kPlotH; };  // y in [0, 1]
    for (int t = 0; t <= 4; ++t) {
        const double v = t / 4.0;
        out << "<text x=\"" << kLeft - 34 << "\" y=\"" << fmt(py(v) + 4)
            << "\" font-family=\"sans-serif\" font-size=\"10\">" << fmt(v) << "</text>\n";
    }

    const double slot = kPlotW / double(std::max<size_t>(1, labels.size()));
    for (size_t i = 0; i < labels.size(); ++i) {
        std::vector<double> v(samples[i]);
        if (v.empty()) continue;
        std::sort(v.begin(), v.end());
        const auto quantile = [&](double q) {
            const double pos = q * double(v.size() - 1);
            const size_t lo = size_t(pos);
            const size_t hi = std::min(lo + 1, v.size() - 1);
            return v[lo] + (pos - double(lo)) * (v[hi] - v[lo]);
        };
        const double q1 = quantile(0.25), q2 = quantile(0.5), q3 = quantile(0.75);
        const double cx = kLeft + slot * (double(i) + 0.5);
        const double half = std::min(28.0, slot * 0.3);
        const char* color = kPalette[i % 10];

        out << "<line x1=\"" << fmt(cx) << "\" y1=\"" << fmt(py(v.front())) << "\" x2=\""
            << fmt(cx) << "\" y2=\"" << fmt(py(v.back())) << "\" stroke=\"" << color << "\"/>\n";
        out << "<rect x=\"" << fmt(cx - half) << "\" y=\"" << fmt(py(q3)) << "\" width=\""
            << fmt(2 * half) << "\" height=\"" << fmt(py(q1) - py(q3)) << "\" fill=\"" << color
            << "\" fill-opacity=\"0.35\" stroke=\"" << color << "\"/>\n";
        out << "<line x1=\"" << fmt(cx - half) << "\" y1=\"" << fmt(py(q2)) << "\" x2=\""
            << fmt(cx + half) << "\" y2=\"" << fmt(py(q2)) << "\" stroke=\"" << color
            << "\" stroke-width=\"2\"/>\n";
        out << "<text x=\"" << fmt(cx - 24) << "\" y=\"" << kH - kBottom + 18
            << "\" font-family=\"sans-serif\" font-size=\"10\">" << labels[i] << "</text>\n";
    }
    out << "</svg>\n";
    return out.str();
}

}  // namespace rvk
