#pragma once

// Change-point inference for object time series.
//
// The single change-point statistics scan every admissible cut k, comparing
// the scaled gap between the left and right subsample Frechet variances
// (variant sn1) and additionally the gap between contaminated and pooled
// variances (variant sn2, which also reacts to pure mean shifts).  Each cut's
// value is self-normalized by the same contrasts evaluated on the sub-windows
// to its left and right, so no nuisance long-run variance enters.  The maximum
// over k is compared against the simulated "seta" reference distribution with
// matching trimming parameters (eta1 for the outer scan, eta2 for the inner
// normalizer windows).
//
// Multiple change points are located by wild binary segmentation: random
// intervals are scored once per series with the sn2 curve, a data-free
// Gaussian calibration supplies the detection threshold, and segments are
// split recursively at the best interval's argmax while the score clears the
// threshold.

#include "objsn/null_dist.hpp"
#include "objsn/series.hpp"

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace objsn {

enum class CpVariant { sn1, sn2 };

const char* cp_variant_name(CpVariant variant);

// Scaled variance-gap contrast for a split of the window (a, b] at r, in
// fractional positions (windows are (floor(n*a), floor(n*r)] and
// (floor(n*r), floor(n*b)]).  var_gap carries the between-variance contrast;
// contam_gap carries the contaminated-minus-pooled contrast and is always
// nonnegative.
struct WindowContrast {
    double var_gap = 0.0;
    double contam_gap = 0.0;
};

WindowContrast window_contrast(const PrefixStats& prefix, double r, double a,
                               double b);

// Self-normalized statistic profile over all admissible cuts.
struct ContrastCurve {
    int n = 0;
    double eta1 = 0.0;
    double eta2 = 0.0;
    CpVariant variant = CpVariant::sn2;
    int k_min = 0; // first admissible cut, floor(n*eta1)
    int k_max = 0; // last admissible cut, n - floor(n*eta1)
    std::vector<double> values;   // indexed k - k_min; 0 where degenerate
    std::vector<char> degenerate; // per-cut zero-normalizer flags

    double value_at(int k) const { return values.at(k - k_min); }
    bool degenerate_at(int k) const { return degenerate.at(k - k_min) != 0; }
    // Largest curve value (0 when every cut is degenerate).
    double max_value() const;
    // Smallest cut attaining max_value(); k_min when every cut is degenerate.
    int argmax_cut() const;
    bool all_degenerate() const;
};

ContrastCurve contrast_curve(const ObjectSeries& series, double eta1,
                             double eta2, CpVariant variant);

// Both variants from one sweep over (k, l) pairs; cheaper than two calls when
// sn1 and sn2 are wanted together.  `offset` and `length` select the
// subseries of objects offset+1 .. offset+length, so wild binary segmentation
// can score many intervals against one prefix/Gram pair.
std::pair<ContrastCurve, ContrastCurve> contrast_curve_pair(
    const PrefixStats& prefix, const PrefixGram& gram, int offset, int length,
    double eta1, double eta2);

struct ChangePointReport {
    std::string method; // "cp-test"
    std::string variant;
    double statistic = 0.0;
    bool degenerate = false;
    int k_hat = 0;
    double tau_hat = 0.0;
    double eta1 = 0.0;
    double eta2 = 0.0;
    double alpha = 0.0;
    double critical_value = 0.0;
    double p_value = 1.0;
    bool reject = false;
    int n = 0;
    NullSpec null_spec;
    std::string null_source;
};

// Max-over-cuts test against a "seta" null sample simulated with the same
// (eta1, eta2); k_hat is the smallest maximizing cut and tau_hat = k_hat/n.
ChangePointReport run_cp_test(const ObjectSeries& series, double eta1,
                              double eta2, double alpha, CpVariant variant,
                              const NullSampleSet& null_set);

// Wild binary segmentation configuration.
struct WbsConfig {
    int num_intervals = 100; // random intervals scored per series
    int calib_reps = 200;    // Gaussian replicates behind the threshold
    int min_len = 20;        // shortest usable interval/segment, in objects
    double eta1 = 0.15;
    double eta2 = 0.05;
    double quantile = 0.95; // calibration quantile used as threshold
    std::uint64_t seed = 1;

    // min_len must be at least max(4, ceil(1/eta2)) so every interval of
    // that length admits nonempty normalizer windows.
    void validate() const;
};

// Half-open object range (lo, hi]: the subseries objects lo+1 .. hi.
struct WbsInterval {
    int lo = 0;
    int hi = 0;
};

struct WbsCalibration {
    WbsConfig config;
    int n = 0;
    std::vector<WbsInterval> intervals;
    double threshold = 0.0;
    std::vector<double> calib_stats; // sorted calibration maxima
};

// Draws the interval set and computes the detection threshold as the
// configured quantile of max-over-intervals sn2 statistics on calib_reps
// standard normal scalar series of length n.  The interval set is part of
// the result because detection must reuse exactly these intervals.
WbsCalibration wbs_threshold(int n, const WbsConfig& cfg);

struct Segmentation {
    std::vector<int> breakpoints; // strictly increasing, each in 1..n-1
};

// Recursive detection: within a segment, restrict to intervals fully inside
// it, pick the interval with the largest sn2 curve maximum, and if that
// maximum clears the threshold record its argmax cut and recurse on both
// sides.  Ties break toward the earliest interval / smallest cut.
Segmentation wbs_detect(const ObjectSeries& series, const WbsConfig& cfg,
                        double threshold,
                        const std::vector<WbsInterval>& intervals);

inline Segmentation wbs_detect(const ObjectSeries& series,
                               const WbsCalibration& calibration) {
    return wbs_detect(series, calibration.config, calibration.threshold,
                      calibration.intervals);
}

} // namespace objsn
