#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "equinav/imitate/imitate.hpp"

namespace equinav {

// Percentage of time the vehicle drove itself, given n interventions of six
// seconds each over `elapsed_s` seconds of driving.
inline double metric_autonomy(int interventions, double elapsed_s) {
  require(elapsed_s > 0, "metric_autonomy: elapsed time must be positive");
  return (1.0 - double(interventions) * kTakeoverSeconds / elapsed_s) * 100.0;
}

// Mean cross-track error over the steps the policy was in control.
inline double metric_cte(const TrajectoryLog& log) {
  double sum = 0;
  long n = 0;
  for (const auto& r : log.rows)
    if (!r.expert_in_control) {
      sum += r.cte;
      ++n;
    }
  require(n > 0, "metric_cte: no policy-controlled steps");
  return sum / double(n);
}

// Interventions recomputed from the control column: rising edges of
// expert_in_control.
inline int metric_interventions(const TrajectoryLog& log) {
  int count = 0;
  bool prev = false;
  for (const auto& r : log.rows) {
    if (r.expert_in_control && !prev) ++count;
    prev = r.expert_in_control;
  }
  return count;
}

inline void write_trajectory_csv(const TrajectoryLog& log,
                                 const std::filesystem::path& path) {
  std::ofstream f(path);
  require(f.good(), "cannot open " + path.string());
  const std::size_t k = log.rows.empty() ? 0 : log.rows[0].action.size();
  f << "step,time,x,y,z,yaw";
  for (std::size_t i = 0; i < k; ++i) f << ",action" << i;
  f << ",cte,in_control,intervention_flag\n";
  char buf[64];
  for (const auto& r : log.rows) {
    f << r.step;
    for (double v : {r.time, r.x, r.y, r.z, r.yaw}) {
      std::snprintf(buf, sizeof(buf), ",%.6f", v);
      f << buf;
    }
    for (double a : r.action) {
      std::snprintf(buf, sizeof(buf), ",%.6f", a);
      f << buf;
    }
    std::snprintf(buf, sizeof(buf), ",%.6f", r.cte);
    f << buf << (r.expert_in_control ? ",expert" : ",policy")
      << (r.intervention ? ",1\n" : ",0\n");
  }
}

struct ResultRow {
  std::string strategy;
  int iteration = 0;
  std::uint64_t seed = 0;
  double mean_cte_m = 0;
  int interventions = 0;
  double elapsed_s = 0;
  double autonomy_pct = 0;
  std::string world_id;
  bool ood = false;

  std::tuple<std::string, int, std::uint64_t, std::string, bool> key() const {
    return {strategy, iteration, seed, world_id, ood};
  }
};

inline void write_results_csv(const std::vector<ResultRow>& rows,
                              const std::filesystem::path& path) {
  std::ofstream f(path);
  require(f.good(), "cannot open " + path.string());
  f << "strategy,iteration,seed,mean_cte_m,interventions,elapsed_s,"
       "autonomy_pct,world_id,ood_flag\n";
  char buf[128];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof(buf),
                  "%s,%d,%llu,%.12g,%d,%.12g,%.14g,%s,%d\n",
                  r.strategy.c_str(), r.iteration,
                  (unsigned long long)r.seed, r.mean_cte_m, r.interventions,
                  r.elapsed_s, r.autonomy_pct, r.world_id.c_str(),
                  r.ood ? 1 : 0);
    f << buf;
  }
}

inline std::vector<ResultRow> read_results_csv(
    const std::filesystem::path& path) {
  std::vector<ResultRow> rows;
  std::ifstream f(path);
  if (!f.good()) return rows;
  std::string line;
  std::getline(f, line);  // header
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string field;
    std::vector<std::string> fields;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    require(fields.size() == 9, "results.csv: malformed row: " + line);
    ResultRow r;
    r.strategy = fields[0];
    r.iteration = std::stoi(fields[1]);
    r.seed = std::stoull(fields[2]);
    r.mean_cte_m = std::stod(fields[3]);
    r.interventions = std::stoi(fields[4]);
    r.elapsed_s = std::stod(fields[5]);
    r.autonomy_pct = std::stod(fields[6]);
    r.world_id = fields[7];
    r.ood = fields[8] == "1";
    rows.push_back(std::move(r));
  }
  return rows;
}

struct RunKey {
  std::string strategy;
  int iteration = 0;
  std::uint64_t seed = 0;
  std::string world_id;
  bool ood = false;
};

// Executes every requested run that is not already present in results.csv,
// appending and re-writing after each run so an interrupted matrix resumes
// where it stopped.
template <typename RunFn>
inline std::vector<ResultRow> run_matrix(const std::vector<RunKey>& runs,
                                         const std::filesystem::path& csv,
                                         RunFn&& execute) {
  std::vector<ResultRow> rows = read_results_csv(csv);
  std::map<std::tuple<std::string, int, std::uint64_t, std::string, bool>,
           bool>
      done;
  for (const auto& r : rows) done[r.key()] = true;
  for (const auto& k : runs) {
    const std::tuple<std::string, int, std::uint64_t, std::string, bool> key{
        k.strategy, k.iteration, k.seed, k.world_id, k.ood};
    if (done.count(key)) continue;
    ResultRow r = execute(k);
    require(r.key() == key, "run produced a row for the wrong key");
    rows.push_back(std::move(r));
    done[key] = true;
    write_results_csv(rows, csv);
  }
  return rows;
}

// --- Minimal grayscale plotting -------------------------------------------

namespace plot_detail {

inline void put(Image& img, int x, int y, std::uint8_t v) {
  if (x >= 0 && x < img.width && y >= 0 && y < img.height)
    img.pixels[std::size_t(y) * std::size_t(img.width) + std::size_t(x)] = v;
}

inline void line(Image& img, int x0, int y0, int x1, int y1,
                 std::uint8_t v) {
  const int dx = std::abs(x1 - x0), dy = -std::abs(y1 - y0);
  const int sx = x0 < x1 ? 1 : -1, sy = y0 < y1 ? 1 : -1;
  int err = dx + dy;
  for (;;) {
    put(img, x0, y0, v);
    if (x0 == x1 && y0 == y1) break;
    const int e2 = 2 * err;
    if (e2 >= dy) {
      err += dy;
      x0 += sx;
    }
    if (e2 <= dx) {
      err += dx;
      y0 += sy;
    }
  }
}

}  // namespace plot_detail

struct Series {
  std::string label;
  std::vector<double> x, y;
};

// Line chart as a PGM-ready image: white background, dark axes, one gray
// level per series.
inline Image plot_lines(const std::vector<Series>& series, int w = 480,
                        int h = 320) {
  Image img;
  img.width = w;
  img.height = h;
  img.pixels.assign(std::size_t(w) * std::size_t(h), 255);
  const int m = 24;  // margin
  plot_detail::line(img, m, h - m, w - m, h - m, 0);
  plot_detail::line(img, m, m, m, h - m, 0);
  double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
  for (const auto& s : series)
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      xmin = std::min(xmin, s.x[i]);
      xmax = std::max(xmax, s.x[i]);
      ymin = std::min(ymin, s.y[i]);
      ymax = std::max(ymax, s.y[i]);
    }
  if (!(xmax > xmin)) xmax = xmin + 1;
  if (!(ymax > ymin)) ymax = ymin + 1;
  auto px = [&](double x) {
    return m + int((x - xmin) / (xmax - xmin) * (w - 2 * m));
  };
  auto py = [&](double y) {
    return h - m - int((y - ymin) / (ymax - ymin) * (h - 2 * m));
  };
  for (std::size_t si = 0; si < series.size(); ++si) {
    const std::uint8_t shade =
        std::uint8_t(30 + (si * 160) / std::max<std::size_t>(series.size(), 1));
    const auto& s = series[si];
    for (std::size_t i = 1; i < s.x.size(); ++i)
      plot_detail::line(img, px(s.x[i - 1]), py(s.y[i - 1]), px(s.x[i]),
                        py(s.y[i]), shade);
  }
  return img;
}

// Bar chart, one bar per labeled value.
inline Image plot_bars(const std::vector<std::pair<std::string, double>>& bars,
                       int w = 480, int h = 320) {
  Image img;
  img.width = w;
  img.height = h;
  img.pixels.assign(std::size_t(w) * std::size_t(h), 255);
  const int m = 24;
  plot_detail::line(img, m, h - m, w - m, h - m, 0);
  plot_detail::line(img, m, m, m, h - m, 0);
  if (bars.empty()) return img;
  double vmax = 0;
  for (const auto& b : bars) vmax = std::max(vmax, std::abs(b.second));
  if (vmax == 0) vmax = 1;
  const int span = (w - 2 * m) / int(bars.size());
  for (std::size_t i = 0; i < bars.size(); ++i) {
    const int x0 = m + int(i) * span + span / 6;
    const int x1 = m + int(i) * span + span - span / 6;
    const int top =
        h - m - int(std::abs(bars[i].second) / vmax * double(h - 2 * m));
    const std::uint8_t shade = std::uint8_t(40 + (i * 150) / bars.size());
    for (int x = x0; x <= x1; ++x)
      plot_detail::line(img, x, h - m - 1, x, top, shade);
  }
  return img;
}

// Writes results.csv plus summary plots: autonomy across iterations per
// strategy, and final-iteration autonomy per strategy.
inline void emit_report(const std::vector<ResultRow>& rows,
                        const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  write_results_csv(rows, dir / "results.csv");

  std::map<std::string, std::map<int, std::pair<double, int>>> acc;
  for (const auto& r : rows) {
    auto& cell = acc[r.strategy][r.iteration];
    cell.first += r.autonomy_pct;
    cell.second += 1;
  }
  std::vector<Series> series;
  std::vector<std::pair<std::string, double>> finals;
  for (const auto& [strategy, by_iter] : acc) {
    Series s;
    s.label = strategy;
    for (const auto& [iter, cell] : by_iter) {
      s.x.push_back(iter);
      s.y.push_back(cell.first / cell.second);
    }
    finals.emplace_back(strategy, s.y.back());
    series.push_back(std::move(s));
  }
  write_pgm(plot_lines(series), dir / "autonomy_by_iteration.pgm");
  write_pgm(plot_bars(finals), dir / "final_autonomy.pgm");
}

}  // namespace equinav
