#include "tsexam/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>

#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>
#include <opencv2/imgproc.hpp>

#include "tsexam/errors.hpp"

namespace tsexam::harness {

namespace {

const cv::Scalar kWhite(255, 255, 255);
const cv::Scalar kBlack(0, 0, 0);
const cv::Scalar kGrey(160, 160, 160);
const cv::Scalar kLine(180, 90, 30);  // BGR steel blue

std::string tick_text(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4g", v);
    return buf;
}

void draw_panel(cv::Mat& canvas, const TimeSeries& ts, int panel_top, const PlotStyle& style,
                const std::string& label) {
    const int x0 = style.margin_left;
    const int x1 = style.panel_width - style.margin_right;
    const int y0 = panel_top + style.margin_top;
    const int y1 = panel_top + style.panel_height - style.margin_bottom;
    const auto& v = ts.values();
    const std::size_t n = v.size();

    double lo = *std::min_element(v.begin(), v.end());
    double hi = *std::max_element(v.begin(), v.end());
    if (lo == hi) {
        lo -= 1.0;
        hi += 1.0;
    } else {
        const double pad = 0.05 * (hi - lo);
        lo -= pad;
        hi += pad;
    }

    auto px = [&](std::size_t t) {
        const double frac = n > 1 ? static_cast<double>(t) / static_cast<double>(n - 1) : 0.5;
        return x0 + static_cast<int>(std::lround(frac * (x1 - x0)));
    };
    auto py = [&](double val) {
        const double frac = (val - lo) / (hi - lo);
        return y1 - static_cast<int>(std::lround(frac * (y1 - y0)));
    };

    cv::rectangle(canvas, cv::Point(x0, y0), cv::Point(x1, y1), kBlack, 1, cv::LINE_8);

    for (int k = 0; k < style.y_ticks; ++k) {
        const double frac = static_cast<double>(k) / (style.y_ticks - 1);
        const double val = lo + frac * (hi - lo);
        const int y = py(val);
        cv::line(canvas, cv::Point(x0 - 4, y), cv::Point(x0, y), kBlack, 1, cv::LINE_8);
        if (k > 0 && k < style.y_ticks - 1) {
            cv::line(canvas, cv::Point(x0, y), cv::Point(x1, y), kGrey, 1, cv::LINE_8);
        }
        const std::string text = tick_text(val);
        const auto size = cv::getTextSize(text, cv::FONT_HERSHEY_SIMPLEX, style.font_scale, 1, nullptr);
        cv::putText(canvas, text, cv::Point(x0 - 8 - size.width, y + size.height / 2),
                    cv::FONT_HERSHEY_SIMPLEX, style.font_scale, kBlack, 1, cv::LINE_8);
    }
    for (int k = 0; k < style.x_ticks; ++k) {
        const std::size_t t = n <= 1 ? 0
                                     : static_cast<std::size_t>(std::lround(
                                           static_cast<double>(k) * static_cast<double>(n - 1) /
                                           (style.x_ticks - 1)));
        const int x = px(t);
        cv::line(canvas, cv::Point(x, y1), cv::Point(x, y1 + 4), kBlack, 1, cv::LINE_8);
        const std::string text = std::to_string(t);
        const auto size = cv::getTextSize(text, cv::FONT_HERSHEY_SIMPLEX, style.font_scale, 1, nullptr);
        cv::putText(canvas, text, cv::Point(x - size.width / 2, y1 + 8 + size.height),
                    cv::FONT_HERSHEY_SIMPLEX, style.font_scale, kBlack, 1, cv::LINE_8);
    }

    for (std::size_t t = 1; t < n; ++t) {
        cv::line(canvas, cv::Point(px(t - 1), py(v[t - 1])), cv::Point(px(t), py(v[t])), kLine,
                 style.line_thickness, cv::LINE_8);
    }

    if (!label.empty()) {
        cv::putText(canvas, label, cv::Point(x0 + 8, y0 + 18), cv::FONT_HERSHEY_SIMPLEX,
                    style.font_scale + 0.1, kBlack, 1, cv::LINE_8);
    }
}

}  // namespace

std::vector<std::uint8_t> render_plot(const std::vector<TimeSeries>& series,
                                      const PlotStyle& style) {
    if (series.empty() || series.size() > 2) {
        throw ConfigError("render_plot: expected 1 or 2 series, got " +
                          std::to_string(series.size()));
    }
    for (std::size_t i = 0; i < series.size(); ++i) {
        series[i].validate("render_plot input " + std::to_string(i));
    }

    const int panels = static_cast<int>(series.size());
    cv::Mat canvas(style.panel_height * panels, style.panel_width, CV_8UC3, kWhite);
    for (int p = 0; p < panels; ++p) {
        const std::string label = panels == 2 ? "Time Series " + std::to_string(p + 1) : "";
        draw_panel(canvas, series[static_cast<std::size_t>(p)], p * style.panel_height, style,
                   label);
    }

    std::vector<std::uint8_t> png;
    if (!cv::imencode(".png", canvas, png)) {
        throw IoError("render_plot: PNG encoding failed");
    }
    return png;
}

}  // namespace tsexam::harness
