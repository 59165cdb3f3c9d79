#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "faircompose/experiments.hpp"

namespace faircompose {

namespace {

// Fixed formatting so identical inputs give byte-identical files.
std::string fmt(double value) {
    char buffer[40];
    std::snprintf(buffer, sizeof buffer, "%.9g", value);
    return buffer;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    return out;
}

}  // namespace

void write_report_csv(const std::string& path, const std::vector<ReportRow>& rows) {
    std::ofstream out = open_out(path);
    out << "composition_type,task,pct_pairs_violating,avg_violation,max_violation\n";
    for (const ReportRow& row : rows) {
        out << row.composition_type << ',' << row.task << ',';
        if (row.dash)
            out << "-,-,-\n";
        else
            out << fmt(row.pct_pairs_violating) << ',' << fmt(row.avg_violation) << ','
                << fmt(row.max_violation) << '\n';
    }
}

void write_pairs_csv(const std::string& path, const std::vector<PairRecord>& pairs) {
    std::ofstream out = open_out(path);
    out << "composition_type,task,universe,u,v,observed,allowed,excess\n";
    for (const PairRecord& record : pairs) {
        out << record.composition_type << ',' << record.task << ',' << record.universe << ','
            << record.u << ',' << record.v << ',' << fmt(record.observed) << ','
            << fmt(record.allowed) << ',' << fmt(record.excess) << '\n';
    }
}

void write_heat_scatter_svg(const std::string& path, const ScatterPlot& plot) {
    if (plot.x.size() != plot.y.size() || plot.x.size() != plot.intensity.size())
        throw std::invalid_argument("heat scatter: size mismatch");
    constexpr int kSize = 420;
    constexpr int kMargin = 40;
    constexpr double kSpan = kSize - 2 * kMargin;
    std::ofstream out = open_out(path);
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kSize << "\" height=\""
        << kSize << "\" viewBox=\"0 0 " << kSize << " " << kSize << "\">\n";
    out << "  <rect width=\"" << kSize << "\" height=\"" << kSize
        << "\" fill=\"white\" stroke=\"#444\"/>\n";
    out << "  <text x=\"" << kSize / 2 << "\" y=\"20\" text-anchor=\"middle\" "
        << "font-family=\"sans-serif\" font-size=\"13\">" << plot.name << "</text>\n";
    // axes: x = first task qualification, y = second task qualification
    out << "  <line x1=\"" << kMargin << "\" y1=\"" << kSize - kMargin << "\" x2=\""
        << kSize - kMargin << "\" y2=\"" << kSize - kMargin << "\" stroke=\"#888\"/>\n";
    out << "  <line x1=\"" << kMargin << "\" y1=\"" << kMargin << "\" x2=\"" << kMargin
        << "\" y2=\"" << kSize - kMargin << "\" stroke=\"#888\"/>\n";
    for (std::size_t i = 0; i < plot.x.size(); ++i) {
        const double cx = kMargin + kSpan * std::clamp(plot.x[i], 0.0, 1.0);
        const double cy = kSize - kMargin - kSpan * std::clamp(plot.y[i], 0.0, 1.0);
        out << "  <circle cx=\"" << fmt(cx) << "\" cy=\"" << fmt(cy) << "\" r=\"5\" fill=\""
            << plot.color << "\" fill-opacity=\"" << fmt(std::clamp(plot.intensity[i], 0.0, 1.0))
            << "\"/>\n";
    }
    out << "</svg>\n";
}

}  // namespace faircompose
