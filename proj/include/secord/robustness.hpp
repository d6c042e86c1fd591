#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <istream>
#include <limits>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "secord/attack.hpp"
#include "secord/error.hpp"

namespace secord {

// Shortest representation that round-trips.
inline std::string format_double(double x) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, end);
}

// ---------------------------------------------------------------------------
// Areas

// Trapezoid area under the polyline through `points` after anchoring it with
// (0, 0) and (max x, max y). Points are sorted by x then y, so coincident x
// values form vertical segments.
inline double trapezoid_auc(std::vector<std::pair<double, double>> points) {
  if (points.empty()) throw InvalidInput("trapezoid_auc needs at least one point");
  double max_x = 0, max_y = 0;
  for (const auto& [x, y] : points) {
    if (!std::isfinite(x) || !std::isfinite(y)) throw InvalidInput("non-finite curve point");
    max_x = std::max(max_x, x);
    max_y = std::max(max_y, y);
  }
  points.emplace_back(0.0, 0.0);
  points.emplace_back(max_x, max_y);
  std::sort(points.begin(), points.end());
  double area = 0;
  for (std::size_t i = 1; i < points.size(); ++i)
    area += (points[i].first - points[i - 1].first) * (points[i].second + points[i - 1].second) / 2;
  return area;
}

struct CurvePoint {
  double epsilon;
  double first_order_rate;
  double second_order_rate;
};

struct RobustnessCurve {
  std::vector<CurvePoint> points;  // strictly increasing epsilon
  double max_first_order_rate = 0;
  double max_second_order_rate = 0;
  bool non_monotone = false;

  // Run metadata.
  double vacuous_epsilon = 0;
  std::size_t gamma = kDefaultGamma;
  std::uint64_t seed = 0;
  std::size_t sample_size = 0;
  std::string scorer_id;
};

// Rates should fall as epsilon rises and never exceed the vacuous-threshold
// maxima. Measured rates are kept as-is; this only reports a violation.
inline bool detect_non_monotone(const RobustnessCurve& c) {
  for (std::size_t i = 0; i < c.points.size(); ++i) {
    const auto& p = c.points[i];
    if (p.first_order_rate > c.max_first_order_rate ||
        p.second_order_rate > c.max_second_order_rate)
      return true;
    if (i > 0 && (p.first_order_rate > c.points[i - 1].first_order_rate ||
                  p.second_order_rate > c.points[i - 1].second_order_rate))
      return true;
  }
  return false;
}

// Area under the constraint robustness curve (x = second-order rate,
// y = first-order rate), normalized by the product of the maximum rates.
inline double accs(const RobustnessCurve& curve) {
  if (!(curve.max_first_order_rate > 0) || !(curve.max_second_order_rate > 0))
    throw UndefinedMetric("ACCS is undefined when a maximum success rate is zero (first-order " +
                          format_double(curve.max_first_order_rate) + ", second-order " +
                          format_double(curve.max_second_order_rate) + ")");
  std::vector<std::pair<double, double>> pts;
  for (const auto& p : curve.points) pts.emplace_back(p.second_order_rate, p.first_order_rate);
  pts.emplace_back(curve.max_second_order_rate, curve.max_first_order_rate);
  return trapezoid_auc(std::move(pts)) /
         (curve.max_second_order_rate * curve.max_first_order_rate);
}

// ---------------------------------------------------------------------------
// ROC

struct ScoredPair {
  double score;
  bool positive;
};

// Probability that a random positive outscores a random negative, ties
// counted as one half (Mann-Whitney rank statistic).
inline double roc_auc(std::span<const ScoredPair> pairs) {
  std::vector<std::size_t> order(pairs.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return pairs[a].score < pairs[b].score; });
  double positives = 0, rank_sum = 0;
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j < order.size() && pairs[order[j]].score == pairs[order[i]].score) ++j;
    const double avg_rank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2;
    for (std::size_t k = i; k < j; ++k) {
      if (pairs[order[k]].positive) {
        rank_sum += avg_rank;
        positives += 1;
      }
    }
    i = j;
  }
  const double negatives = static_cast<double>(pairs.size()) - positives;
  if (positives == 0 || negatives == 0)
    throw UndefinedMetric("ROC AUC needs at least one positive and one negative pair");
  return (rank_sum - positives * (positives + 1) / 2) / (positives * negatives);
}

struct RocPoint {
  double threshold;
  double fpr;
  double tpr;
};

// Operating points for "positive iff score >= threshold", from the strictest
// threshold (+inf) down to the lowest observed score.
inline std::vector<RocPoint> roc_curve(std::span<const ScoredPair> pairs) {
  std::vector<ScoredPair> sorted(pairs.begin(), pairs.end());
  std::sort(sorted.begin(), sorted.end(),
            [](const auto& a, const auto& b) { return a.score > b.score; });
  double pos = 0, neg = 0;
  for (const auto& p : sorted) (p.positive ? pos : neg) += 1;
  if (pos == 0 || neg == 0)
    throw UndefinedMetric("ROC curve needs at least one positive and one negative pair");
  std::vector<RocPoint> out{{std::numeric_limits<double>::infinity(), 0, 0}};
  double tp = 0, fp = 0;
  for (std::size_t i = 0; i < sorted.size();) {
    std::size_t j = i;
    for (; j < sorted.size() && sorted[j].score == sorted[i].score; ++j)
      (sorted[j].positive ? tp : fp) += 1;
    out.push_back({sorted[i].score, fp / neg, tp / pos});
    i = j;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Sweep

inline void validate_grid(std::span<const double> grid) {
  if (grid.empty()) throw ConfigError("epsilon grid is empty");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!std::isfinite(grid[i])) throw ConfigError("epsilon grid has a non-finite value");
    if (i > 0 && !(grid[i] > grid[i - 1]))
      throw ConfigError("epsilon grid must be strictly increasing");
  }
}

// start, start + step, ... up to stop inclusive. Values are computed as
// start + i * step and rounded to 10 decimals so grid points print cleanly.
inline std::vector<double> make_grid(double start, double stop, double step) {
  if (!(step > 0)) throw ConfigError("grid step must be positive");
  if (stop < start) throw ConfigError("grid stop is below start");
  const auto n = static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9)) + 1;
  std::vector<double> out;
  for (std::size_t i = 0; i < n; ++i)
    out.push_back(std::round((start + static_cast<double>(i) * step) * 1e10) / 1e10);
  return out;
}

// Runs both attacks at every epsilon of the grid, plus once at the scorer's
// minimum (the vacuous threshold) to obtain the maximum rates. The same
// seeded sample is used everywhere.
inline RobustnessCurve sweep(const AttackConfig& first_order, const AttackConfig& second_order,
                             std::span<const double> grid, std::span<const Example> dataset,
                             std::size_t sample_size, std::uint64_t seed, std::size_t jobs = 1) {
  if (first_order.goal != GoalKind::kFirstOrder || second_order.goal != GoalKind::kSecondOrder)
    throw ConfigError("sweep needs one first-order and one second-order attack config");
  if (first_order.stack.similarity != second_order.stack.similarity)
    throw ConfigError("first- and second-order attacks must share one similarity scorer");
  first_order.validate();
  second_order.validate();
  validate_grid(grid);

  RobustnessCurve curve;
  curve.vacuous_epsilon = first_order.stack.similarity->range().min;
  curve.gamma = second_order.gamma;
  curve.seed = seed;
  curve.scorer_id = first_order.stack.similarity->id();

  auto rates = [&](double eps) {
    auto a = run_attack_set(first_order.with_epsilon(eps), dataset, sample_size, seed, jobs);
    auto b = run_attack_set(second_order.with_epsilon(eps), dataset, sample_size, seed, jobs);
    curve.sample_size = a.sample.size();
    return std::pair(a.success_rate, b.success_rate);
  };
  std::tie(curve.max_first_order_rate, curve.max_second_order_rate) = rates(curve.vacuous_epsilon);
  for (double eps : grid) {
    auto [f, s] = rates(eps);
    curve.points.push_back({eps, f, s});
  }
  curve.non_monotone = detect_non_monotone(curve);
  return curve;
}

// ---------------------------------------------------------------------------
// Curve files

inline constexpr std::string_view kCurveCsvHeader = "epsilon,first_order_rate,second_order_rate";

inline void write_curve_csv(std::ostream& out, const RobustnessCurve& curve) {
  out << kCurveCsvHeader << '\n';
  for (const auto& p : curve.points)
    out << format_double(p.epsilon) << ',' << format_double(p.first_order_rate) << ','
        << format_double(p.second_order_rate) << '\n';
}

inline std::vector<CurvePoint> read_curve_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError("curve CSV is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kCurveCsvHeader) throw ParseError("unexpected curve CSV header '" + line + "'", 1);
  std::vector<CurvePoint> out;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    double v[3];
    std::size_t start = 0;
    for (int f = 0; f < 3; ++f) {
      std::size_t comma = line.find(',', start);
      if ((f < 2) != (comma != std::string::npos))
        throw ParseError("expected 3 comma-separated fields", line_no);
      const std::string field = line.substr(start, comma - start);
      auto [end, ec] = std::from_chars(field.data(), field.data() + field.size(), v[f]);
      if (ec != std::errc() || end != field.data() + field.size())
        throw ParseError("bad number '" + field + "'", line_no);
      start = comma + 1;
    }
    out.push_back({v[0], v[1], v[2]});
  }
  return out;
}

inline nlohmann::ordered_json curve_metadata(const RobustnessCurve& curve) {
  nlohmann::ordered_json meta;
  meta["max_first_order_rate"] = curve.max_first_order_rate;
  meta["max_second_order_rate"] = curve.max_second_order_rate;
  meta["vacuous_epsilon"] = curve.vacuous_epsilon;
  meta["gamma"] = curve.gamma;
  meta["seed"] = curve.seed;
  meta["sample_size"] = curve.sample_size;
  meta["scorer"] = curve.scorer_id;
  meta["non_monotone"] = curve.non_monotone;
  try {
    meta["accs"] = accs(curve);
  } catch (const UndefinedMetric& e) {
    meta["accs"] = nullptr;
    meta["accs_error"] = e.what();
  }
  return meta;
}

// Rebuilds a curve from its CSV rows and metadata.
inline RobustnessCurve curve_from_files(std::vector<CurvePoint> points,
                                        const nlohmann::json& meta) {
  RobustnessCurve c;
  c.points = std::move(points);
  try {
    c.max_first_order_rate = meta.at("max_first_order_rate").get<double>();
    c.max_second_order_rate = meta.at("max_second_order_rate").get<double>();
    if (meta.contains("gamma")) c.gamma = meta["gamma"].get<std::size_t>();
    if (meta.contains("seed")) c.seed = meta["seed"].get<std::uint64_t>();
    if (meta.contains("scorer")) c.scorer_id = meta["scorer"].get<std::string>();
    if (meta.contains("vacuous_epsilon")) c.vacuous_epsilon = meta["vacuous_epsilon"].get<double>();
    if (meta.contains("sample_size")) c.sample_size = meta["sample_size"].get<std::size_t>();
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("bad curve metadata: ") + e.what());
  }
  c.non_monotone = detect_non_monotone(c);
  return c;
}

// Normalized curve in the unit box as a standalone SVG document.
inline std::string render_curve_svg(const RobustnessCurve& curve, int size = 400) {
  const double sx = curve.max_second_order_rate > 0 ? curve.max_second_order_rate : 1.0;
  const double sy = curve.max_first_order_rate > 0 ? curve.max_first_order_rate : 1.0;
  std::vector<std::pair<double, double>> pts{{0, 0}};
  for (const auto& p : curve.points) pts.emplace_back(p.second_order_rate / sx, p.first_order_rate / sy);
  pts.emplace_back(curve.max_second_order_rate / sx, curve.max_first_order_rate / sy);
  std::sort(pts.begin(), pts.end());

  const int pad = 40;
  const int w = size + 2 * pad;
  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << w
      << "\" viewBox=\"0 0 " << w << ' ' << w << "\">\n";
  svg << "  <rect x=\"" << pad << "\" y=\"" << pad << "\" width=\"" << size << "\" height=\""
      << size << "\" fill=\"none\" stroke=\"#888\"/>\n";
  svg << "  <line x1=\"" << pad << "\" y1=\"" << pad + size << "\" x2=\"" << pad + size
      << "\" y2=\"" << pad << "\" stroke=\"#ccc\" stroke-dasharray=\"4 4\"/>\n";
  svg << "  <polyline fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"2\" points=\"";
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (i) svg << ' ';
    svg << format_double(pad + pts[i].first * size) << ','
        << format_double(pad + size - pts[i].second * size);
  }
  svg << "\"/>\n";
  svg << "  <text x=\"" << pad + size / 2 << "\" y=\"" << w - 10
      << "\" text-anchor=\"middle\" font-size=\"12\">second-order rate (normalized)</text>\n";
  svg << "  <text x=\"12\" y=\"" << pad + size / 2 << "\" text-anchor=\"middle\" font-size=\"12\""
      << " transform=\"rotate(-90 12 " << pad + size / 2
      << ")\">first-order rate (normalized)</text>\n";
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace secord
