#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace binbo::svg
{
  struct Series
  {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
  };

  struct Chart
  {
    std::string title;
    std::string x_label;
    std::string y_label;
    bool log_x = false;
    /// Draw as a right-continuous step function instead of straight segments.
    bool steps = false;
    std::vector<Series> series;
  };

  /*
   * Fixed layout: 760x480 canvas, plot area inset 80/30/40/70 px
   * (left/right/top/bottom), five ticks per axis, legend in the top right.
   * Every series is a <polyline> whose data-values attribute holds the
   * plotted (x, y) pairs as "x y;x y;..." in round-trip decimal, which is
   * what verification reads back.
   */
  std::string render(const Chart& chart);

  /// Series recovered from the data-values attributes of a rendered chart.
  std::vector<Series> read_series(std::string_view svg_text);
}
