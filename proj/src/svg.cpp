#include "charseq/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "charseq/error.hpp"

namespace charseq::io {

namespace {

constexpr double kWidth = 640, kHeight = 400;
constexpr double kLeft = 64, kRight = 576, kTop = 40, kBottom = 352;
constexpr double kLogFloor = -18.0;  // zero chords are clamped here

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

double log_chord(double hi) {
    if (hi <= 0) return kLogFloor;
    return std::max(kLogFloor, std::log10(hi));
}

}  // namespace

std::string decay_chart_svg(const oracle::DecayTable& table) {
    if (table.rows.empty()) throw DomainError("decay_chart_svg: empty table");

    const long k0 = table.rows.front().k;
    const long k1 = table.rows.back().k;
    double gap_max = 1.0;
    double log_lo = 0.0, log_hi = kLogFloor + 1;
    for (const oracle::DecayRow& r : table.rows) {
        gap_max = std::max(gap_max, r.gap.get_d());
        double lg = log_chord(r.chord.hi);
        log_lo = std::min(log_lo, lg);
        log_hi = std::max(log_hi, lg);
    }
    log_hi = std::max(log_hi, log_lo + 1.0);

    auto x_of = [&](long k) {
        if (k0 == k1) return (kLeft + kRight) / 2;
        return kLeft + (kRight - kLeft) * static_cast<double>(k - k0) /
                           static_cast<double>(k1 - k0);
    };
    auto y_gap = [&](double g) { return kBottom - (kBottom - kTop) * g / gap_max; };
    auto y_chord = [&](double hi) {
        return kBottom - (kBottom - kTop) * (log_chord(hi) - log_lo) / (log_hi - log_lo);
    };

    std::ostringstream gap_pts, chord_pts;
    for (const oracle::DecayRow& r : table.rows) {
        gap_pts << fmt(x_of(r.k)) << ',' << fmt(y_gap(r.gap.get_d())) << ' ';
        chord_pts << fmt(x_of(r.k)) << ',' << fmt(y_chord(r.chord.hi)) << ' ';
    }

    std::ostringstream out;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
        << kHeight << "\" viewBox=\"0 0 " << kWidth << " " << kHeight << "\">\n"
        << "  <rect width=\"" << kWidth << "\" height=\"" << kHeight << "\" fill=\"white\"/>\n"
        << "  <line x1=\"" << kLeft << "\" y1=\"" << kBottom << "\" x2=\"" << kRight
        << "\" y2=\"" << kBottom << "\" stroke=\"black\"/>\n"
        << "  <line x1=\"" << kLeft << "\" y1=\"" << kTop << "\" x2=\"" << kLeft << "\" y2=\""
        << kBottom << "\" stroke=\"black\"/>\n"
        << "  <line x1=\"" << kRight << "\" y1=\"" << kTop << "\" x2=\"" << kRight
        << "\" y2=\"" << kBottom << "\" stroke=\"black\"/>\n"
        << "  <polyline fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"2\" points=\""
        << gap_pts.str() << "\"/>\n"
        << "  <polyline fill=\"none\" stroke=\"#d62728\" stroke-width=\"2\" points=\""
        << chord_pts.str() << "\"/>\n"
        << "  <text x=\"" << (kLeft + kRight) / 2 << "\" y=\"" << kHeight - 12
        << "\" text-anchor=\"middle\" font-size=\"14\">k = " << k0 << " .. " << k1
        << "</text>\n"
        << "  <text x=\"18\" y=\"" << (kTop + kBottom) / 2
        << "\" text-anchor=\"middle\" font-size=\"14\" transform=\"rotate(-90 18 "
        << (kTop + kBottom) / 2 << ")\" fill=\"#1f77b4\">gap (0 .. " << fmt(gap_max)
        << ")</text>\n"
        << "  <text x=\"" << kWidth - 14 << "\" y=\"" << (kTop + kBottom) / 2
        << "\" text-anchor=\"middle\" font-size=\"14\" transform=\"rotate(90 " << kWidth - 14
        << " " << (kTop + kBottom) / 2 << ")\" fill=\"#d62728\">chord hi (log10 "
        << fmt(log_lo) << " .. " << fmt(log_hi) << ")</text>\n"
        << "</svg>\n";
    return out.str();
}

void emit_chart(const oracle::DecayTable& table, const std::string& path) {
    std::string svg = decay_chart_svg(table);
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("emit_chart: cannot open '" + path + "' for writing");
    f << svg;
    f.flush();
    if (!f) throw std::runtime_error("emit_chart: write to '" + path + "' failed");
}

}  // namespace charseq::io
