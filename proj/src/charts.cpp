#include "shmm/charts.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "shmm/errors.hpp"
#include "shmm/evaluation.hpp"
#include "shmm/io.hpp"

namespace shmm {

namespace {

constexpr double kWidth = 720.0;
constexpr double kHeight = 440.0;
constexpr double kLeft = 80.0;
constexpr double kRight = 190.0;
constexpr double kTop = 44.0;
constexpr double kBottom = 56.0;

const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
                                "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

std::string label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3g", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

struct Range {
  double lo = 0.0;
  double hi = 1.0;
};

Range pad(double lo, double hi) {
  if (!(hi > lo)) {
    const double d = std::abs(lo) > 0 ? std::abs(lo) * 0.1 : 0.5;
    return {lo - d, hi + d};
  }
  const double d = (hi - lo) * 0.05;
  return {lo - d, hi + d};
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t k = v.size() / 2;
  return v.size() % 2 ? v[k] : 0.5 * (v[k - 1] + v[k]);
}

ChartPoint summarize(double x, const std::vector<double>& ys) {
  std::vector<double> finite;
  for (double y : ys)
    if (std::isfinite(y)) finite.push_back(y);
  if (finite.empty()) return {x, NAN, NAN, NAN};
  const auto [lo, hi] = std::minmax_element(finite.begin(), finite.end());
  return {x, median(finite), *lo, *hi};
}

// Groups (key, x) -> ys and turns each key into a series of median points.
template <typename Key>
std::vector<ChartSeries> series_from(const std::map<Key, std::map<double, std::vector<double>>>& groups,
                                     const std::function<std::string(const Key&)>& name) {
  std::vector<ChartSeries> out;
  for (const auto& [key, by_x] : groups) {
    ChartSeries s{name(key), {}};
    for (const auto& [x, ys] : by_x) s.points.push_back(summarize(x, ys));
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<std::vector<std::string>> read_rows(std::istream& in, std::size_t columns) {
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string f;
    while (std::getline(ss, f, ',')) fields.push_back(f);
    if (fields.size() != columns)
      throw ValidationError("csv row has " + std::to_string(fields.size()) + " fields, expected " +
                            std::to_string(columns));
    rows.push_back(std::move(fields));
  }
  return rows;
}

double to_number(const std::string& s) {
  if (s == "-inf") return -INFINITY;
  if (s == "inf") return INFINITY;
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw ValidationError("bad number '" + s + "'");
    return v;
  } catch (const std::logic_error&) {
    throw ValidationError("bad number '" + s + "'");
  }
}

using Output = std::vector<std::pair<std::filesystem::path, std::string>>;

void metrics_charts(std::istream& in, const std::filesystem::path& dir, Output& out) {
  const auto records = read_metrics_csv(in);
  if (records.empty()) throw ValidationError("metrics csv has no data rows");
  std::vector<std::string> ids;
  for (const auto& r : records)
    if (std::find(ids.begin(), ids.end(), r.experiment_id) == ids.end()) ids.push_back(r.experiment_id);

  for (const auto& id : ids) {
    std::map<int, std::map<double, std::vector<double>>> l1, neg;
    std::map<std::pair<int, int>, std::map<double, std::vector<double>>> cmp;  // (learner order, m)
    for (const auto& r : records) {
      if (r.experiment_id != id) continue;
      const auto x = static_cast<double>(r.N);
      if (r.learner == "spectral") {
        l1[r.m_hyper][x].push_back(r.l1);
        neg[r.m_hyper][x].push_back(r.neg_prop);
        cmp[{0, r.m_hyper}][x].push_back(r.l1);
      } else if (r.learner == "em") {
        cmp[{1, r.m_hyper}][x].push_back(r.l1);
      }
    }
    const std::function<std::string(const int&)> rank_name = [](const int& m) { return "rank " + std::to_string(m); };
    const std::function<std::string(const std::pair<int, int>&)> cmp_name = [](const std::pair<int, int>& k) {
      return (k.first == 0 ? "spectral m=" : "EM m=") + std::to_string(k.second);
    };

    if (!l1.empty()) {
      LineChart c{id + ": normalized L1 error", "training sequences N", "L1 (median, min/max)", true, true,
                  series_from(l1, rank_name)};
      out.emplace_back(dir / (id + "_l1.svg"), render_svg(c));
      LineChart d{id + ": proportion of negative probabilities", "training sequences N", "NEG_PROP", true, true,
                  series_from(neg, rank_name)};
      out.emplace_back(dir / (id + "_neg_prop.svg"), render_svg(d));
    }
    const bool has_em = std::any_of(cmp.begin(), cmp.end(), [](const auto& kv) { return kv.first.first == 1; });
    if (has_em) {
      LineChart c{id + ": EM vs spectral", "training sequences N", "L1 (median, min/max)", true, true,
                  series_from(cmp, cmp_name)};
      out.emplace_back(dir / (id + "_em_vs_spectral.svg"), render_svg(c));
    }
  }
}

void curve_charts(std::istream& in, const std::filesystem::path& dir, const std::string& stem, Output& out) {
  const auto rows = read_rows(in, 3);
  if (rows.empty()) throw ValidationError("curve csv has no data rows");
  // A curve ends where theta stops increasing or t changes.
  std::vector<std::pair<int, std::vector<ChartPoint>>> curves;
  for (const auto& f : rows) {
    const double theta = to_number(f[0]);
    const double y = to_number(f[1]);
    const int t = static_cast<int>(to_number(f[2]));
    if (curves.empty() || curves.back().first != t || !(theta > curves.back().second.back().x))
      curves.emplace_back(t, std::vector<ChartPoint>{});
    curves.back().second.push_back({theta, y, y, y});
  }
  LineChart c{"Unnormalized likelihood curves (scaled to peak)", "theta", "Pr(data | theta) / max", false, false, {}};
  for (auto& [t, pts] : curves) {
    double peak = 0.0;
    for (const auto& p : pts) peak = std::max(peak, p.y);
    if (peak > 0.0)
      for (auto& p : pts) p.y = p.y_min = p.y_max = p.y / peak;
    c.series.push_back({"t = " + std::to_string(t), std::move(pts)});
  }
  out.emplace_back(dir / (stem + "_curves.svg"), render_svg(c));
}

void consistency_charts(std::istream& in, const std::filesystem::path& dir, const std::string& stem, Output& out) {
  const auto rows = read_rows(in, 5);
  if (rows.empty()) throw ValidationError("consistency csv has no data rows");
  std::map<int, std::map<double, std::vector<double>>> groups;
  for (const auto& f : rows) {
    const double N = to_number(f[0]);
    groups[0][N].push_back(to_number(f[3]) / N);
    groups[1][N].push_back(to_number(f[4]) / N);
  }
  const std::function<std::string(const int&)> name = [](const int& k) {
    return k == 0 ? std::string("EM solution") : std::string("true parameters");
  };
  LineChart c{"Log likelihood comparison", "training sequences N", "training log-likelihood / N", true, true,
              series_from(groups, name)};
  out.emplace_back(dir / (stem + "_loglik.svg"), render_svg(c));
}

}  // namespace

std::string render_svg(const LineChart& chart) {
  const double plot_w = kWidth - kLeft - kRight;
  const double plot_h = kHeight - kTop - kBottom;
  const auto tx = [&](double x) { return chart.log_x ? std::log10(x) : x; };

  double xlo = INFINITY, xhi = -INFINITY, ylo = INFINITY, yhi = -INFINITY;
  for (const auto& s : chart.series)
    for (const auto& p : s.points) {
      if (!std::isfinite(p.y) || (chart.log_x && !(p.x > 0))) continue;
      xlo = std::min(xlo, tx(p.x));
      xhi = std::max(xhi, tx(p.x));
      ylo = std::min({ylo, p.y, chart.whiskers ? p.y_min : p.y});
      yhi = std::max({yhi, p.y, chart.whiskers ? p.y_max : p.y});
    }
  if (!std::isfinite(xlo)) xlo = 0, xhi = 1, ylo = 0, yhi = 1;
  const Range xr = chart.log_x ? Range{xlo - 0.15, xhi + 0.15} : pad(xlo, xhi);
  const Range yr = pad(ylo, yhi);
  const auto px = [&](double x) { return kLeft + (tx(x) - xr.lo) / (xr.hi - xr.lo) * plot_w; };
  const auto py = [&](double y) { return kTop + (1.0 - (y - yr.lo) / (yr.hi - yr.lo)) * plot_h; };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(kWidth) << "\" height=\"" << num(kHeight)
      << "\" viewBox=\"0 0 " << num(kWidth) << ' ' << num(kHeight) << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg << "<text x=\"" << num(kWidth / 2) << "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">"
      << escape(chart.title) << "</text>\n";
  svg << "<rect x=\"" << num(kLeft) << "\" y=\"" << num(kTop) << "\" width=\"" << num(plot_w) << "\" height=\""
      << num(plot_h) << "\" fill=\"none\" stroke=\"#333\"/>\n";

  // y ticks
  for (int i = 0; i <= 5; ++i) {
    const double y = yr.lo + (yr.hi - yr.lo) * i / 5.0;
    svg << "<line x1=\"" << num(kLeft - 4) << "\" y1=\"" << num(py(y)) << "\" x2=\"" << num(kLeft + plot_w)
        << "\" y2=\"" << num(py(y)) << "\" stroke=\"#ddd\"/>\n";
    svg << "<text x=\"" << num(kLeft - 8) << "\" y=\"" << num(py(y) + 4) << "\" text-anchor=\"end\">" << label(y)
        << "</text>\n";
  }
  // x ticks
  std::vector<double> xticks;
  if (chart.log_x) {
    for (double d = std::ceil(xr.lo); d <= xr.hi; d += 1.0) xticks.push_back(std::pow(10.0, d));
  } else {
    for (int i = 0; i <= 5; ++i) xticks.push_back(xr.lo + (xr.hi - xr.lo) * i / 5.0);
  }
  for (double x : xticks) {
    svg << "<line x1=\"" << num(px(x)) << "\" y1=\"" << num(kTop) << "\" x2=\"" << num(px(x)) << "\" y2=\""
        << num(kTop + plot_h + 4) << "\" stroke=\"#ddd\"/>\n";
    svg << "<text x=\"" << num(px(x)) << "\" y=\"" << num(kTop + plot_h + 18) << "\" text-anchor=\"middle\">"
        << label(x) << "</text>\n";
  }
  svg << "<text x=\"" << num(kLeft + plot_w / 2) << "\" y=\"" << num(kHeight - 14) << "\" text-anchor=\"middle\">"
      << escape(chart.x_label) << "</text>\n";
  svg << "<text transform=\"translate(18," << num(kTop + plot_h / 2) << ") rotate(-90)\" text-anchor=\"middle\">"
      << escape(chart.y_label) << "</text>\n";

  for (std::size_t k = 0; k < chart.series.size(); ++k) {
    const auto& s = chart.series[k];
    const char* color = kPalette[k % std::size(kPalette)];
    std::string path;
    for (const auto& p : s.points) {
      if (!std::isfinite(p.y) || (chart.log_x && !(p.x > 0))) continue;
      path += (path.empty() ? "M" : " L") + num(px(p.x)) + ',' + num(py(p.y));
    }
    if (!path.empty())
      svg << "<path d=\"" << path << "\" fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.8\"/>\n";
    for (const auto& p : s.points) {
      if (!std::isfinite(p.y) || (chart.log_x && !(p.x > 0))) continue;
      if (chart.whiskers && p.y_max > p.y_min)
        svg << "<line x1=\"" << num(px(p.x)) << "\" y1=\"" << num(py(p.y_min)) << "\" x2=\"" << num(px(p.x))
            << "\" y2=\"" << num(py(p.y_max)) << "\" stroke=\"" << color << "\"/>\n";
      svg << "<circle cx=\"" << num(px(p.x)) << "\" cy=\"" << num(py(p.y)) << "\" r=\"3\" fill=\"" << color
          << "\"/>\n";
    }
    const double ly = kTop + 10 + 18.0 * static_cast<double>(k);
    const double lx = kLeft + plot_w + 16;
    svg << "<line x1=\"" << num(lx) << "\" y1=\"" << num(ly) << "\" x2=\"" << num(lx + 20) << "\" y2=\"" << num(ly)
        << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
    svg << "<text x=\"" << num(lx + 26) << "\" y=\"" << num(ly + 4) << "\">" << escape(s.name) << "</text>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

std::vector<std::filesystem::path> render_charts(const std::filesystem::path& csv_path,
                                                 const std::filesystem::path& output_dir) {
  const std::string text = read_text_file(csv_path);
  std::istringstream in(text);
  std::string header;
  std::getline(in, header);
  if (!header.empty() && header.back() == '\r') header.pop_back();

  Output charts;
  const std::string stem = csv_path.stem().string();
  if (header == kMetricsHeader) {
    std::istringstream whole(text);
    metrics_charts(whole, output_dir, charts);
  } else if (header == "theta,likelihood,t") {
    curve_charts(in, output_dir, stem, charts);
  } else if (header == "N,trial,seed,em_loglik,true_loglik") {
    consistency_charts(in, output_dir, stem, charts);
  } else {
    throw ValidationError("render: unrecognised csv columns '" + header + "'");
  }

  // Everything is rendered before the first write, so a bad file leaves no output.
  std::vector<std::filesystem::path> written;
  for (const auto& [path, svg] : charts) {
    write_text_file(path, svg);
    written.push_back(path);
  }
  return written;
}

}  // namespace shmm
