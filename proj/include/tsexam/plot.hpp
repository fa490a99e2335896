#pragma once

#include <cstdint>
#include <vector>

#include "tsexam/time_series.hpp"

namespace tsexam::harness {

// Pinned rendering style; every field participates in byte reproducibility.
struct PlotStyle {
    int panel_width = 800;
    int panel_height = 400;
    int margin_left = 64;
    int margin_right = 16;
    int margin_top = 24;
    int margin_bottom = 44;
    int x_ticks = 5;
    int y_ticks = 5;
    double font_scale = 0.4;
    int line_thickness = 1;
};

// Line plot as PNG bytes. One series fills a single panel; two series are
// stacked in separate panels labeled "Time Series 1" and "Time Series 2".
// No title is drawn. Identical inputs give identical bytes.
std::vector<std::uint8_t> render_plot(const std::vector<TimeSeries>& series,
                                      const PlotStyle& style = {});

}  // namespace tsexam::harness
