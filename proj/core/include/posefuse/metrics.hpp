#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace posefuse {

struct PlanarPoint {
  double x = 0.0;
  double y = 0.0;
};

/// An estimate and its ground truth at one PPS instant.
struct PpsPose {
  double t = 0.0;
  PlanarPoint estimate;
  PlanarPoint truth;
};

/// Which dispersion definition precision() uses.
///  - MeanOffset: D_i is the distance of offset_i from the mean offset.
///  - AsPrinted: D_i is the distance of the estimate coordinates from the
///    mean offset, literally as the formula is typeset. Frame dependent.
enum class PrecisionFormula { MeanOffset, AsPrinted };

std::string_view to_string(PrecisionFormula formula);

struct Improvements {
  double max_percent = 0.0;
  double acc_percent = 0.0;
  double prec_percent = 0.0;
};

struct MetricsReport {
  double max_offset = 0.0;
  double accuracy = 0.0;
  double precision = 0.0;
  PlanarPoint mean_offset;
  std::size_t n = 0;
  double rejection_rate = 0.0;
  Improvements improvement_vs_gnss;
};

/// Largest euclidean offset. Throws EmptyInput on an empty set.
double max_offset(std::span<const PpsPose> poses);

struct AccuracyResult {
  double accuracy = 0.0;
  PlanarPoint mean_offset;
};

/// Norm of the signed mean offset (estimate - truth). Throws EmptyInput.
AccuracyResult accuracy(std::span<const PpsPose> poses);

/// sqrt(sum D_i^2 / (n - 1)). Throws NeedTwoPoses for n < 2.
double precision(std::span<const PpsPose> poses, PrecisionFormula formula = PrecisionFormula::MeanOffset);

/// Max/Acc/Prec plus mean offset and count. Needs n >= 2.
MetricsReport evaluate(std::span<const PpsPose> poses, PrecisionFormula formula = PrecisionFormula::MeanOffset);

/// 100 (gnss - fused) / gnss per metric, positive when fused is better.
/// Throws DivisionByZeroMetric when a GNSS metric is zero.
Improvements improvements(const MetricsReport& fused, const MetricsReport& gnss);

struct TimedPoint {
  double t = 0.0;
  PlanarPoint p;
};

struct PpsMatch {
  std::vector<PpsPose> poses;
  std::size_t unmatched = 0;
};

/// Pairs each estimate with the nearest-in-time truth record within
/// `tolerance` seconds; both inputs must be time sorted.
PpsMatch match_pps(std::span<const TimedPoint> estimates, std::span<const TimedPoint> truth,
                   double tolerance = 0.05);

}  // namespace posefuse
