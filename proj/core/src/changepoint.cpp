#include "objsn/changepoint.hpp"

#include "objsn/rng.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace objsn {

namespace {

void check_etas(double eta1, double eta2) {
    if (!(eta1 > 0.0 && eta1 < 0.5))
        throw std::invalid_argument("eta1 must lie in (0, 1/2)");
    if (!(eta2 > 0.0 && eta1 > 2.0 * eta2))
        throw std::invalid_argument("need eta2 > 0 and eta1 > 2*eta2");
}

// O(1) contrast evaluator over cut triples (a, l, b], all indices already
// shifted into the parent series.  Mean squared quantities come from the
// squared-norm prefix and the prefix Gram matrix.
struct CutEngine {
    const std::vector<double>& q;
    const PrefixGram& gram;
    double w;

    WindowContrast eval(int a, int l, int b, double factor) const {
        const double ml = l - a;
        const double mr = b - l;
        const double ql = (q[l] - q[a]) / ml;
        const double qr = (q[b] - q[l]) / mr;
        const double gll = gram.window_dot(a, l, a, l) / (ml * ml);
        const double grr = gram.window_dot(l, b, l, b) / (mr * mr);
        const double glr = gram.window_dot(a, l, l, b) / (ml * mr);
        const double vl = w * std::max(0.0, ql - gll);
        const double vr = w * std::max(0.0, qr - grr);
        // Contaminated-minus-plain variance sums collapse exactly to twice
        // the squared mean gap; this form is nonnegative and vanishes
        // exactly (not just approximately) when the windows agree.
        return {factor * (vl - vr),
                factor * 2.0 * w * std::max(0.0, gll - 2.0 * glr + grr)};
    }
};

} // namespace

const char* cp_variant_name(CpVariant variant) {
    return variant == CpVariant::sn1 ? "sn1" : "sn2";
}

WindowContrast window_contrast(const PrefixStats& prefix, double r, double a,
                               double b) {
    if (!(0.0 <= a && a < r && r < b && b <= 1.0))
        throw std::invalid_argument(
            "window_contrast: need 0 <= a < r < b <= 1");
    const int n = prefix.n();
    const int ia = static_cast<int>(std::floor(n * a));
    const int il = static_cast<int>(std::floor(n * r));
    const int ib = static_cast<int>(std::floor(n * b));
    if (il <= ia || ib <= il)
        throw std::invalid_argument("window_contrast: empty window");

    const auto& p = prefix.centered_prefix();
    const auto& q = prefix.centered_sq_prefix();
    const double w = prefix.weight();
    const double ml = il - ia;
    const double mr = ib - il;
    const Eigen::RowVectorXd sl = p.row(il) - p.row(ia);
    const Eigen::RowVectorXd sr = p.row(ib) - p.row(il);
    const double ql = (q[il] - q[ia]) / ml;
    const double qr = (q[ib] - q[il]) / mr;
    const double gll = sl.squaredNorm() / (ml * ml);
    const double grr = sr.squaredNorm() / (mr * mr);
    const double vl = w * std::max(0.0, ql - gll);
    const double vr = w * std::max(0.0, qr - grr);
    const double factor = (r - a) * (b - r) / (b - a);
    // Same exact mean-gap decomposition as the curve engine.
    return {factor * (vl - vr),
            factor * 2.0 * w * (sl / ml - sr / mr).squaredNorm()};
}

double ContrastCurve::max_value() const {
    double best = 0.0;
    for (double v : values) best = std::max(best, v);
    return best;
}

int ContrastCurve::argmax_cut() const {
    const double best = max_value();
    for (std::size_t i = 0; i < values.size(); ++i)
        if (degenerate[i] == 0 && values[i] == best)
            return k_min + static_cast<int>(i);
    return k_min;
}

bool ContrastCurve::all_degenerate() const {
    for (char d : degenerate)
        if (d == 0) return false;
    return true;
}

std::pair<ContrastCurve, ContrastCurve> contrast_curve_pair(
    const PrefixStats& prefix, const PrefixGram& gram, int offset, int length,
    double eta1, double eta2) {
    check_etas(eta1, eta2);
    if (offset < 0 || length < 2 || offset + length > prefix.n())
        throw std::invalid_argument("contrast_curve: window out of range");
    const int h1 = static_cast<int>(std::floor(length * eta1));
    const int h2 = static_cast<int>(std::floor(length * eta2));
    if (h2 < 1)
        throw std::invalid_argument(
            "contrast_curve: series too short for eta2 (floor(n*eta2) < 1)");
    const int k_min = h1;
    const int k_max = length - h1;
    if (h1 < 1 || k_min > k_max)
        throw std::invalid_argument(
            "contrast_curve: series too short for eta1 (empty cut range)");

    ContrastCurve sn1;
    sn1.n = length;
    sn1.eta1 = eta1;
    sn1.eta2 = eta2;
    sn1.variant = CpVariant::sn1;
    sn1.k_min = k_min;
    sn1.k_max = k_max;
    sn1.values.resize(k_max - k_min + 1);
    sn1.degenerate.resize(k_max - k_min + 1);
    ContrastCurve sn2 = sn1;
    sn2.variant = CpVariant::sn2;

    const CutEngine engine{prefix.centered_sq_prefix(), gram,
                           prefix.weight()};
    const double len = length;
    for (int k = k_min; k <= k_max; ++k) {
        const double full_factor =
            static_cast<double>(k) * (length - k) / (len * len);
        const WindowContrast full =
            engine.eval(offset, offset + k, offset + length, full_factor);
        const double num1 = len * full.var_gap * full.var_gap;
        const double num2 =
            num1 + len * full.contam_gap * full.contam_gap;

        double den1 = 0.0, den2 = 0.0;
        for (int l = h2; l <= k - h2; ++l) {
            const double factor =
                static_cast<double>(l) * (k - l) / (len * k);
            const WindowContrast c =
                engine.eval(offset, offset + l, offset + k, factor);
            den1 += c.var_gap * c.var_gap;
            den2 += c.var_gap * c.var_gap + c.contam_gap * c.contam_gap;
        }
        for (int l = k + h2; l <= length - h2; ++l) {
            const double factor = static_cast<double>(l - k) * (length - l) /
                                  (len * (length - k));
            const WindowContrast c =
                engine.eval(offset + k, offset + l, offset + length, factor);
            den1 += c.var_gap * c.var_gap;
            den2 += c.var_gap * c.var_gap + c.contam_gap * c.contam_gap;
        }

        const int idx = k - k_min;
        sn1.degenerate[idx] = den1 == 0.0 ? 1 : 0;
        sn1.values[idx] = den1 == 0.0 ? 0.0 : num1 / den1;
        sn2.degenerate[idx] = den2 == 0.0 ? 1 : 0;
        sn2.values[idx] = den2 == 0.0 ? 0.0 : num2 / den2;
    }
    return {std::move(sn1), std::move(sn2)};
}

ContrastCurve contrast_curve(const ObjectSeries& series, double eta1,
                             double eta2, CpVariant variant) {
    const PrefixStats prefix(series);
    const PrefixGram gram(prefix);
    auto pair =
        contrast_curve_pair(prefix, gram, 0, series.size(), eta1, eta2);
    return variant == CpVariant::sn1 ? std::move(pair.first)
                                     : std::move(pair.second);
}

ChangePointReport run_cp_test(const ObjectSeries& series, double eta1,
                              double eta2, double alpha, CpVariant variant,
                              const NullSampleSet& null_set) {
    if (null_set.spec().family != NullFamily::seta)
        throw std::invalid_argument(
            "run_cp_test: null set is not from the seta family");
    if (null_set.spec().eta1 != eta1 || null_set.spec().eta2 != eta2)
        throw std::invalid_argument(
            "run_cp_test: null set simulated with different trimming");
    if (!(alpha > 0.0 && alpha < 1.0))
        throw std::invalid_argument("alpha must lie in (0,1)");

    const ContrastCurve curve = contrast_curve(series, eta1, eta2, variant);

    ChangePointReport report;
    report.method = "cp-test";
    report.variant = cp_variant_name(variant);
    report.statistic = curve.max_value();
    report.degenerate = curve.all_degenerate();
    report.k_hat = curve.argmax_cut();
    report.tau_hat =
        static_cast<double>(report.k_hat) / static_cast<double>(curve.n);
    report.eta1 = eta1;
    report.eta2 = eta2;
    report.alpha = alpha;
    report.critical_value = null_set.quantile(1.0 - alpha);
    report.p_value =
        report.degenerate ? 1.0 : null_set.pvalue(report.statistic);
    report.reject =
        !report.degenerate && report.statistic > report.critical_value;
    report.n = curve.n;
    report.null_spec = null_set.spec();
    report.null_source = null_set.source();
    return report;
}

void WbsConfig::validate() const {
    if (num_intervals < 1 || calib_reps < 1)
        throw std::invalid_argument(
            "WbsConfig: need num_intervals >= 1 and calib_reps >= 1");
    check_etas(eta1, eta2);
    if (!(quantile > 0.0 && quantile < 1.0))
        throw std::invalid_argument("WbsConfig: quantile must lie in (0,1)");
    const int needed =
        std::max(4, static_cast<int>(std::ceil(1.0 / eta2)));
    if (min_len < needed) {
        std::ostringstream os;
        os << "WbsConfig: min_len must be >= " << needed
           << " so length-min_len intervals admit nonempty normalizer "
              "windows (got "
           << min_len << ")";
        throw std::invalid_argument(os.str());
    }
}

namespace {

// Quantile convention shared with NullSampleSet: order statistic at
// ceil(q * count), clamped to [1, count], on an ascending-sorted vector.
double sorted_quantile(const std::vector<double>& sorted, double q) {
    const int count = static_cast<int>(sorted.size());
    int rank = static_cast<int>(std::ceil(q * count));
    rank = std::clamp(rank, 1, count);
    return sorted[rank - 1];
}

struct IntervalScore {
    double max = 0.0;
    int cut = 0; // global cut index of the smallest argmax
};

IntervalScore score_interval(const PrefixStats& prefix, const PrefixGram& gram,
                             const WbsInterval& iv, const WbsConfig& cfg) {
    const auto curves = contrast_curve_pair(prefix, gram, iv.lo,
                                            iv.hi - iv.lo, cfg.eta1, cfg.eta2);
    const ContrastCurve& sn2 = curves.second;
    return {sn2.max_value(), iv.lo + sn2.argmax_cut()};
}

void check_intervals(const std::vector<WbsInterval>& intervals, int n,
                     int min_len) {
    for (const WbsInterval& iv : intervals)
        if (iv.lo < 0 || iv.hi > n || iv.hi - iv.lo < min_len)
            throw std::invalid_argument(
                "wbs_detect: interval outside the series or shorter than "
                "min_len");
}

} // namespace

WbsCalibration wbs_threshold(int n, const WbsConfig& cfg) {
    cfg.validate();
    if (n < cfg.min_len)
        throw std::invalid_argument(
            "wbs_threshold: series shorter than min_len admits no intervals");

    WbsCalibration out;
    out.config = cfg;
    out.n = n;

    Rng interval_rng(derive_seed(cfg.seed, 0));
    out.intervals.reserve(cfg.num_intervals);
    while (static_cast<int>(out.intervals.size()) < cfg.num_intervals) {
        const int lo = static_cast<int>(interval_rng.below(n + 1));
        const int hi = static_cast<int>(interval_rng.below(n + 1));
        if (hi - lo >= cfg.min_len) out.intervals.push_back({lo, hi});
    }

    const SpaceDescriptor scalar = SpaceDescriptor::scalar();
    out.calib_stats.reserve(cfg.calib_reps);
    for (int j = 0; j < cfg.calib_reps; ++j) {
        Rng rng(derive_seed(cfg.seed, 1 + static_cast<std::uint64_t>(j)));
        std::vector<MetricObject> objects;
        objects.reserve(n);
        for (int t = 0; t < n; ++t)
            objects.push_back(MetricObject::scalar(rng.normal()));
        const ObjectSeries series = ObjectSeries::from_objects(std::move(objects));
        const PrefixStats prefix(series);
        const PrefixGram gram(prefix);
        double xi = 0.0;
        for (const WbsInterval& iv : out.intervals)
            xi = std::max(xi, score_interval(prefix, gram, iv, cfg).max);
        out.calib_stats.push_back(xi);
    }
    std::sort(out.calib_stats.begin(), out.calib_stats.end());
    out.threshold = sorted_quantile(out.calib_stats, cfg.quantile);
    return out;
}

Segmentation wbs_detect(const ObjectSeries& series, const WbsConfig& cfg,
                        double threshold,
                        const std::vector<WbsInterval>& intervals) {
    cfg.validate();
    const int n = series.size();
    if (n < cfg.min_len) return {};
    check_intervals(intervals, n, cfg.min_len);

    const PrefixStats prefix(series);
    const PrefixGram gram(prefix);
    std::vector<IntervalScore> scores;
    scores.reserve(intervals.size());
    for (const WbsInterval& iv : intervals)
        scores.push_back(score_interval(prefix, gram, iv, cfg));

    std::vector<int> found;
    // Iterative segment stack; each split strictly shrinks both children.
    std::vector<std::pair<int, int>> stack{{0, n}};
    while (!stack.empty()) {
        const auto [s, e] = stack.back();
        stack.pop_back();
        if (e - s < cfg.min_len) continue;
        int best = -1;
        for (std::size_t m = 0; m < intervals.size(); ++m) {
            if (intervals[m].lo < s || intervals[m].hi > e) continue;
            if (best < 0 || scores[m].max > scores[best].max) {
                best = static_cast<int>(m);
            }
        }
        if (best < 0 || !(scores[best].max > threshold)) continue;
        const int cut = scores[best].cut;
        found.push_back(cut);
        stack.emplace_back(cut, e);
        stack.emplace_back(s, cut);
    }
    std::sort(found.begin(), found.end());

    Segmentation out;
    out.breakpoints = std::move(found);
    return out;
}

} // namespace objsn
