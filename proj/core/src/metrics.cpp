#include "posefuse/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "posefuse/error.hpp"

namespace posefuse {

std::string_view to_string(PrecisionFormula formula) {
  return formula == PrecisionFormula::MeanOffset ? "mean-offset" : "as-printed";
}

double max_offset(std::span<const PpsPose> poses) {
  if (poses.empty()) {
    throw Error(ErrorCode::EmptyInput, "max_offset of an empty pose set");
  }
  double worst = 0.0;
  for (const PpsPose& p : poses) {
    worst = std::max(worst, std::hypot(p.estimate.x - p.truth.x, p.estimate.y - p.truth.y));
  }
  return worst;
}

AccuracyResult accuracy(std::span<const PpsPose> poses) {
  if (poses.empty()) {
    throw Error(ErrorCode::EmptyInput, "accuracy of an empty pose set");
  }
  double sx = 0.0, sy = 0.0;
  for (const PpsPose& p : poses) {
    sx += p.estimate.x - p.truth.x;
    sy += p.estimate.y - p.truth.y;
  }
  const double n = static_cast<double>(poses.size());
  AccuracyResult r;
  r.mean_offset = {sx / n, sy / n};
  r.accuracy = std::hypot(r.mean_offset.x, r.mean_offset.y);
  return r;
}

double precision(std::span<const PpsPose> poses, PrecisionFormula formula) {
  if (poses.size() < 2) {
    throw Error(ErrorCode::NeedTwoPoses, "precision needs at least two poses");
  }
  const PlanarPoint mu = accuracy(poses).mean_offset;
  double sum = 0.0;
  for (const PpsPose& p : poses) {
    double dx, dy;
    if (formula == PrecisionFormula::MeanOffset) {
      dx = p.estimate.x - p.truth.x - mu.x;
      dy = p.estimate.y - p.truth.y - mu.y;
    } else {
      dx = p.estimate.x - mu.x;
      dy = p.estimate.y - mu.y;
    }
    sum += dx * dx + dy * dy;
  }
  return std::sqrt(sum / static_cast<double>(poses.size() - 1));
}

MetricsReport evaluate(std::span<const PpsPose> poses, PrecisionFormula formula) {
  MetricsReport r;
  r.max_offset = max_offset(poses);
  const AccuracyResult acc = accuracy(poses);
  r.accuracy = acc.accuracy;
  r.mean_offset = acc.mean_offset;
  r.precision = precision(poses, formula);
  r.n = poses.size();
  return r;
}

Improvements improvements(const MetricsReport& fused, const MetricsReport& gnss) {
  auto pct = [](double f, double g, const char* name) {
    if (g == 0.0) {
      throw Error(ErrorCode::DivisionByZeroMetric, std::string("GNSS ") + name + " is zero");
    }
    return 100.0 * (g - f) / g;
  };
  return {pct(fused.max_offset, gnss.max_offset, "max offset"), pct(fused.accuracy, gnss.accuracy, "accuracy"),
          pct(fused.precision, gnss.precision, "precision")};
}

PpsMatch match_pps(std::span<const TimedPoint> estimates, std::span<const TimedPoint> truth, double tolerance) {
  PpsMatch out;
  std::size_t j = 0;
  for (const TimedPoint& e : estimates) {
    while (j + 1 < truth.size() && std::abs(truth[j + 1].t - e.t) <= std::abs(truth[j].t - e.t)) {
      ++j;
    }
    if (!truth.empty() && std::abs(truth[j].t - e.t) <= tolerance) {
      out.poses.push_back(PpsPose{e.t, e.p, truth[j].p});
    } else {
      ++out.unmatched;
    }
  }
  return out;
}

}  // namespace posefuse
