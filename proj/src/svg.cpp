#include "binbo/svg.hpp"

#include "binbo/csv.hpp"
#include "binbo/errors.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

namespace binbo::svg
{
  namespace
  {
    constexpr double width = 760, height = 480;
    constexpr double left = 80, right = 30, top = 40, bottom = 70;
    constexpr std::array<std::string_view, 8> palette = {
      "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf"};

    std::string escape(std::string_view s)
    {
      std::string out;
      for (char c : s)
      {
        switch (c)
        {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        default: out += c;
        }
      }
      return out;
    }

    struct Axis
    {
      double lo, hi;
      bool log;

      double map(double v) const
      {
        const double t = log ? std::log10(v) : v;
        const double a = log ? std::log10(lo) : lo;
        const double b = log ? std::log10(hi) : hi;
        return b > a ? (t - a) / (b - a) : 0.5;
      }
    };

    Axis make_axis(const std::vector<Series>& series, bool use_x, bool log)
    {
      double lo = std::numeric_limits<double>::infinity();
      double hi = -lo;
      for (const auto& s : series)
        for (double v : use_x ? s.x : s.y)
          if (std::isfinite(v) && (!log || v > 0.0))
          {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
          }
      if (!std::isfinite(lo))
      {
        lo = log ? 1.0 : 0.0;
        hi = log ? 10.0 : 1.0;
      }
      if (hi == lo)
      {
        const double pad = lo == 0.0 ? 1.0 : std::fabs(lo) * 0.1;
        hi = lo + pad;
        if (!log)
          lo -= pad;
      }
      return {lo, hi, log};
    }
  }

  std::string render(const Chart& chart)
  {
    const Axis ax = make_axis(chart.series, true, chart.log_x);
    const Axis ay = make_axis(chart.series, false, false);
    const double pw = width - left - right;
    const double ph = height - top - bottom;
    auto px = [&](double v) { return left + ax.map(v) * pw; };
    auto py = [&](double v) { return top + (1.0 - ay.map(v)) * ph; };

    std::string out;
    out += fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" viewBox=\"0 0 {} {}\" "
      "font-family=\"sans-serif\" font-size=\"12\">\n",
      width, height, width, height);
    out += fmt::format("<rect width=\"{}\" height=\"{}\" fill=\"white\"/>\n", width, height);
    out += fmt::format("<text x=\"{}\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">{}</text>\n",
                       width / 2, escape(chart.title));
    out += fmt::format("<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"#444\"/>\n",
                       left, top, pw, ph);

    for (int i = 0; i <= 4; ++i)
    {
      const double f = i / 4.0;
      const double xv = ax.log ? std::pow(10.0, std::log10(ax.lo) + f * (std::log10(ax.hi) - std::log10(ax.lo)))
                               : ax.lo + f * (ax.hi - ax.lo);
      const double yv = ay.lo + f * (ay.hi - ay.lo);
      const double x = left + f * pw;
      const double y = top + (1.0 - f) * ph;
      out += fmt::format("<line x1=\"{:.2f}\" y1=\"{}\" x2=\"{:.2f}\" y2=\"{}\" stroke=\"#ddd\"/>\n", x, top, x, top + ph);
      out += fmt::format("<line x1=\"{}\" y1=\"{:.2f}\" x2=\"{}\" y2=\"{:.2f}\" stroke=\"#ddd\"/>\n", left, y, left + pw, y);
      out += fmt::format("<text x=\"{:.2f}\" y=\"{}\" text-anchor=\"middle\">{:.4g}</text>\n", x, top + ph + 18, xv);
      out += fmt::format("<text x=\"{}\" y=\"{:.2f}\" text-anchor=\"end\">{:.4g}</text>\n", left - 6, y + 4, yv);
    }
    out += fmt::format("<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{}</text>\n", left + pw / 2,
                       height - 20, escape(chart.x_label));
    out += fmt::format("<text x=\"18\" y=\"{}\" text-anchor=\"middle\" transform=\"rotate(-90 18 {})\">{}</text>\n",
                       top + ph / 2, top + ph / 2, escape(chart.y_label));

    for (std::size_t s = 0; s < chart.series.size(); ++s)
    {
      const auto& series = chart.series[s];
      if (series.x.size() != series.y.size())
        throw InvalidInput("svg::render: series '" + series.label + "' has mismatched x/y");
      const auto colour = palette[s % palette.size()];
      std::string points;
      std::string values;
      for (std::size_t i = 0; i < series.x.size(); ++i)
      {
        if (chart.steps && i > 0)
          points += fmt::format("{:.2f},{:.2f} ", px(series.x[i]), py(series.y[i - 1]));
        points += fmt::format("{:.2f},{:.2f} ", px(series.x[i]), py(series.y[i]));
        if (i)
          values += ';';
        values += csv::format_double(series.x[i]) + ' ' + csv::format_double(series.y[i]);
      }
      out += fmt::format("<polyline class=\"series\" data-label=\"{}\" data-values=\"{}\" "
                         "fill=\"none\" stroke=\"{}\" stroke-width=\"1.8\" points=\"{}\"/>\n",
                         escape(series.label), values, colour, points);
      const double ly = top + 16 + 18 * static_cast<double>(s);
      out += fmt::format("<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"{}\" stroke-width=\"3\"/>\n",
                         left + pw - 170, ly - 4, left + pw - 150, ly - 4, colour);
      out += fmt::format("<text x=\"{}\" y=\"{}\">{}</text>\n", left + pw - 144, ly, escape(series.label));
    }
    out += "</svg>\n";
    return out;
  }

  namespace
  {
    std::string attribute(std::string_view tag, std::string_view name)
    {
      const std::string key = std::string(name) + "=\"";
      const auto pos = tag.find(key);
      if (pos == std::string_view::npos)
        throw IoError("svg: attribute " + std::string(name) + " missing");
      const auto start = pos + key.size();
      const auto end = tag.find('"', start);
      return std::string(tag.substr(start, end - start));
    }

    std::string unescape(std::string s)
    {
      const std::pair<std::string_view, std::string_view> map[] = {
        {"&lt;", "<"}, {"&gt;", ">"}, {"&quot;", "\""}, {"&amp;", "&"}};
      for (const auto& [from, to] : map)
      {
        std::size_t pos = 0;
        while ((pos = s.find(from, pos)) != std::string::npos)
        {
          s.replace(pos, from.size(), to);
          pos += to.size();
        }
      }
      return s;
    }
  }

  std::vector<Series> read_series(std::string_view svg_text)
  {
    std::vector<Series> out;
    std::size_t pos = 0;
    while ((pos = svg_text.find("<polyline class=\"series\"", pos)) != std::string_view::npos)
    {
      const auto end = svg_text.find("/>", pos);
      const auto tag = svg_text.substr(pos, end - pos);
      Series s;
      s.label = unescape(attribute(tag, "data-label"));
      const auto values = attribute(tag, "data-values");
      std::size_t i = 0;
      while (i < values.size())
      {
        auto semi = values.find(';', i);
        if (semi == std::string::npos)
          semi = values.size();
        const auto pair = values.substr(i, semi - i);
        const auto space = pair.find(' ');
        s.x.push_back(std::stod(pair.substr(0, space)));
        s.y.push_back(std::stod(pair.substr(space + 1)));
        i = semi + 1;
      }
      out.push_back(std::move(s));
      pos = end;
    }
    return out;
  }
}
