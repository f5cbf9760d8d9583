#include "carbospec/plot/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "carbospec/errors.hpp"

namespace carbospec {
namespace {

constexpr int kMarginLeft = 60;
constexpr int kMarginRight = 20;
constexpr int kMarginTop = 30;
constexpr int kMarginBottom = 40;

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

struct Frame {
    double x0, x1, y0, y1; // data ranges
    int width, height;

    double px(double x) const {
        return kMarginLeft + (x - x0) / (x1 - x0) * (width - kMarginLeft - kMarginRight);
    }
    double py(double y) const {
        return height - kMarginBottom -
               (y - y0) / (y1 - y0) * (height - kMarginTop - kMarginBottom);
    }
};

Frame makeFrame(const std::vector<double>& xs, const std::vector<double>& ys,
                const SvgOptions& options) {
    const auto [xMinIt, xMaxIt] = std::minmax_element(xs.begin(), xs.end());
    const auto [yMinIt, yMaxIt] = std::minmax_element(ys.begin(), ys.end());
    double yLo = *yMinIt;
    double yHi = *yMaxIt;
    if (!(yHi > yLo)) {
        yLo -= 0.5;
        yHi += 0.5;
    }
    const double pad = 0.05 * (yHi - yLo);
    return {*xMinIt, *xMaxIt, yLo - pad, yHi + pad, options.width, options.height};
}

void openSvg(std::ostringstream& out, const SvgOptions& options) {
    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
        << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << options.width << "\" height=\""
        << options.height << "\" viewBox=\"0 0 " << options.width << ' ' << options.height
        << "\">\n"
        << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    if (!options.title.empty()) {
        out << "<text x=\"" << options.width / 2 << "\" y=\"18\" text-anchor=\"middle\" "
            << "font-family=\"sans-serif\" font-size=\"14\">" << options.title << "</text>\n";
    }
}

void drawAxes(std::ostringstream& out, const Frame& frame) {
    out << "<line x1=\"" << kMarginLeft << "\" y1=\"" << frame.height - kMarginBottom
        << "\" x2=\"" << frame.width - kMarginRight << "\" y2=\"" << frame.height - kMarginBottom
        << "\" stroke=\"black\"/>\n"
        << "<line x1=\"" << kMarginLeft << "\" y1=\"" << kMarginTop << "\" x2=\"" << kMarginLeft
        << "\" y2=\"" << frame.height - kMarginBottom << "\" stroke=\"black\"/>\n";
    for (int i = 0; i <= 4; ++i) {
        const double x = frame.x0 + (frame.x1 - frame.x0) * i / 4.0;
        const double y = frame.y0 + (frame.y1 - frame.y0) * i / 4.0;
        out << "<text x=\"" << num(frame.px(x)) << "\" y=\"" << frame.height - kMarginBottom + 16
            << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"10\">" << num(x)
            << "</text>\n"
            << "<text x=\"" << kMarginLeft - 6 << "\" y=\"" << num(frame.py(y) + 3)
            << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"10\">" << num(y)
            << "</text>\n";
    }
}

std::string polylinePoints(const Frame& frame, const std::vector<double>& xs,
                           const std::vector<double>& ys) {
    std::ostringstream pts;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (i) pts << ' ';
        pts << num(frame.px(xs[i])) << ',' << num(frame.py(ys[i]));
    }
    return pts.str();
}

// Red (high) to light blue (low).
std::string saliencyColor(double t) {
    const int r = static_cast<int>(std::lround(173 + (220 - 173) * t));
    const int g = static_cast<int>(std::lround(216 + (40 - 216) * t));
    const int b = static_cast<int>(std::lround(230 + (30 - 230) * t));
    char buf[16];
    std::snprintf(buf, sizeof(buf), "#%02x%02x%02x", r, g, b);
    return buf;
}

} // namespace

std::string spectrumSvg(const std::vector<double>& wavelengthsNm,
                        const std::vector<double>& values, bool drawBandMarkers,
                        const SvgOptions& options) {
    if (wavelengthsNm.size() != values.size() || wavelengthsNm.empty()) {
        throw Error(ErrorCode::LengthMismatch, "wavelengths and values must align");
    }
    const Frame frame = makeFrame(wavelengthsNm, values, options);
    std::ostringstream out;
    openSvg(out, options);
    drawAxes(out, frame);
    if (drawBandMarkers) {
        for (const BandMarker& marker : carbonateBandMarkers()) {
            if (marker.wavelengthNm < frame.x0 || marker.wavelengthNm > frame.x1) continue;
            const double x = frame.px(marker.wavelengthNm);
            out << "<line x1=\"" << num(x) << "\" y1=\"" << kMarginTop << "\" x2=\"" << num(x)
                << "\" y2=\"" << frame.height - kMarginBottom
                << "\" stroke=\"gray\" stroke-dasharray=\"4 3\"/>\n"
                << "<text x=\"" << num(x) << "\" y=\"" << kMarginTop - 4
                << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"9\">"
                << marker.label << "</text>\n";
        }
    }
    out << "<polyline fill=\"none\" stroke=\"black\" stroke-width=\"1\" points=\""
        << polylinePoints(frame, wavelengthsNm, values) << "\"/>\n</svg>\n";
    return out.str();
}

std::string saliencySvg(const std::vector<double>& wavelengthsNm,
                        const std::vector<double>& values, const SaliencyMap& saliency,
                        const SvgOptions& options) {
    if (wavelengthsNm.size() != values.size() ||
        saliency.magnitudes.size() != wavelengthsNm.size() || wavelengthsNm.empty()) {
        throw Error(ErrorCode::LengthMismatch, "wavelengths, values and saliency must align");
    }
    const Frame frame = makeFrame(wavelengthsNm, values, options);
    const auto [loIt, hiIt] = std::minmax_element(saliency.magnitudes.begin(), saliency.magnitudes.end());
    const double lo = *loIt;
    const double hi = *hiIt;
    const double spread = hi > lo ? hi - lo : 1.0;

    std::ostringstream out;
    openSvg(out, options);
    drawAxes(out, frame);
    for (std::size_t i = 0; i + 1 < wavelengthsNm.size(); ++i) {
        const double t = (saliency.magnitudes[i] - lo) / spread;
        out << "<line x1=\"" << num(frame.px(wavelengthsNm[i])) << "\" y1=\""
            << num(frame.py(values[i])) << "\" x2=\"" << num(frame.px(wavelengthsNm[i + 1]))
            << "\" y2=\"" << num(frame.py(values[i + 1])) << "\" stroke=\"" << saliencyColor(t)
            << "\" stroke-width=\"1.5\"/>\n";
    }
    out << "<text x=\"" << frame.width - kMarginRight
        << "\" y=\"" << kMarginTop
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"10\">top peaks (nm)"
        << "</text>\n";
    const std::size_t shown = std::min<std::size_t>(saliency.peaks.size(), 8);
    for (std::size_t i = 0; i < shown; ++i) {
        out << "<text x=\"" << frame.width - kMarginRight << "\" y=\"" << kMarginTop + 12 * (i + 1)
            << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"10\">"
            << num(saliency.peaks[i].wavelengthNm) << " : " << num(saliency.peaks[i].magnitude)
            << "</text>\n";
    }
    out << "</svg>\n";
    return out.str();
}

} // namespace carbospec
