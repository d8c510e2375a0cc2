#include "objsn/two_sample.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace objsn {

namespace {

// First-floor(r*n_i) window length for pooled cut k of n; exact in integer
// arithmetic.
int sample_window(long k, long ni, long n) {
    return static_cast<int>((k * ni) / n);
}

void check_eta(double eta) {
    if (!(eta > 0.0 && eta < 1.0))
        throw std::invalid_argument("eta must lie in (0,1)");
}

void check_windows(double eta, const std::vector<int>& sizes, long n) {
    const long k_min = static_cast<long>(std::floor(n * eta));
    if (k_min < 1)
        throw std::invalid_argument("eta too small: floor(n*eta) < 1");
    for (int ni : sizes) {
        if (static_cast<long>(std::floor(eta * ni)) < 1 ||
            sample_window(k_min, ni, n) < 1) {
            std::ostringstream os;
            os << "window collapse: eta = " << eta
               << " leaves an empty subsample for a sample of length " << ni;
            throw std::invalid_argument(os.str());
        }
    }
}

} // namespace

TwoSampleProfiles two_sample_profiles(const ObjectSeries& sample1,
                                      const ObjectSeries& sample2,
                                      double eta) {
    if (!(sample1.descriptor == sample2.descriptor))
        throw std::invalid_argument(
            "two_sample_profiles: samples live in different spaces");
    check_eta(eta);
    const int n1 = sample1.size(), n2 = sample2.size();
    const long n = static_cast<long>(n1) + n2;
    check_windows(eta, {n1, n2}, n);

    const PrefixStats ps1(sample1), ps2(sample2);

    TwoSampleProfiles out;
    out.n1 = n1;
    out.n2 = n2;
    out.n = static_cast<int>(n);
    out.eta = eta;
    out.k_min = static_cast<int>(std::floor(n * eta));
    out.var_gap.reserve(out.n - out.k_min + 1);
    out.contam_gap.reserve(out.n - out.k_min + 1);

    for (int k = out.k_min; k <= out.n; ++k) {
        const int m1 = sample_window(k, n1, n);
        const int m2 = sample_window(k, n2, n);
        const double r = static_cast<double>(k) / static_cast<double>(n);

        const Eigen::VectorXd mean1 = ps1.window_mean_embedded(1, m1);
        const Eigen::VectorXd mean2 = ps2.window_mean_embedded(1, m2);
        const double v1 = ps1.subsample_variance(1, m1);
        const double v2 = ps2.subsample_variance(1, m2);

        out.var_gap.push_back(r * (v1 - v2));
        // Contaminated gap: each contaminated variance decomposes exactly as
        // own variance plus squared mean distance, so the four-term sum
        // collapses to 2w|mean1 - mean2|^2. Computing it in that form keeps
        // the gap nonnegative and makes it vanish exactly for identical
        // windows instead of leaving cancellation noise.
        out.contam_gap.push_back(
            r * 2.0 * ps1.weight() * (mean1 - mean2).squaredNorm());
    }
    return out;
}

SnValue d1_statistic(const TwoSampleProfiles& p) {
    const double t_full = p.var_gap_full();
    double denom = 0.0;
    for (std::size_t i = 0; i < p.var_gap.size(); ++i) {
        const double r = static_cast<double>(p.k_min + static_cast<int>(i)) /
                         static_cast<double>(p.n);
        const double dev = p.var_gap[i] - r * t_full;
        denom += dev * dev;
    }
    if (denom == 0.0) return {0.0, true};
    return {p.n * t_full * t_full / denom, false};
}

SnValue d2_statistic(const TwoSampleProfiles& p) {
    const double t_full = p.var_gap_full();
    const double tc_full = p.contam_gap_full();
    double denom = 0.0;
    for (std::size_t i = 0; i < p.var_gap.size(); ++i) {
        const double r = static_cast<double>(p.k_min + static_cast<int>(i)) /
                         static_cast<double>(p.n);
        const double dev_t = p.var_gap[i] - r * t_full;
        const double dev_tc = p.contam_gap[i] - r * tc_full;
        denom += dev_t * dev_t + dev_tc * dev_tc;
    }
    if (denom == 0.0) return {0.0, true};
    return {p.n * (t_full * t_full + tc_full * tc_full) / denom, false};
}

NSampleValue n_sample_statistics(const std::vector<ObjectSeries>& samples,
                                 double eta) {
    const int count = static_cast<int>(samples.size());
    if (count < 2)
        throw std::invalid_argument("n_sample_statistics: need >= 2 samples");
    check_eta(eta);
    const SpaceDescriptor& desc = samples.front().descriptor;
    long n = 0;
    std::vector<int> sizes;
    for (const ObjectSeries& s : samples) {
        if (!(s.descriptor == desc))
            throw std::invalid_argument(
                "n_sample_statistics: samples live in different spaces");
        sizes.push_back(s.size());
        n += s.size();
    }
    check_windows(eta, sizes, n);

    std::vector<PrefixStats> prefix;
    prefix.reserve(count);
    for (const ObjectSeries& s : samples) prefix.emplace_back(s);

    const int k_min = static_cast<int>(std::floor(n * eta));
    const int k_count = static_cast<int>(n) - k_min + 1;
    const int pairs = count * (count - 1) / 2;
    // Per-pair profiles, pair (i,j), i<j, packed in lexicographic order.
    std::vector<std::vector<double>> t(pairs), tc(pairs);
    for (auto& v : t) v.resize(k_count);
    for (auto& v : tc) v.resize(k_count);

    std::vector<Eigen::VectorXd> means(count);
    std::vector<double> variances(count);
    for (int idx = 0; idx < k_count; ++idx) {
        const int k = k_min + idx;
        const double r = static_cast<double>(k) / static_cast<double>(n);
        std::vector<int> m(count);
        for (int i = 0; i < count; ++i) {
            m[i] = sample_window(k, sizes[i], n);
            means[i] = prefix[i].window_mean_embedded(1, m[i]);
            variances[i] = prefix[i].subsample_variance(1, m[i]);
        }
        int pair = 0;
        for (int i = 0; i < count; ++i) {
            for (int j = i + 1; j < count; ++j, ++pair) {
                t[pair][idx] = r * (variances[i] - variances[j]);
                // Same exact decomposition as the two-sample profile.
                tc[pair][idx] = r * 2.0 * prefix[i].weight() *
                                (means[i] - means[j]).squaredNorm();
            }
        }
    }

    double num1 = 0.0, num2 = 0.0, den1 = 0.0, den2 = 0.0;
    for (int pair = 0; pair < pairs; ++pair) {
        const double t_full = t[pair].back();
        const double tc_full = tc[pair].back();
        num1 += t_full * t_full;
        num2 += t_full * t_full + tc_full * tc_full;
        for (int idx = 0; idx < k_count; ++idx) {
            const double r = static_cast<double>(k_min + idx) /
                             static_cast<double>(n);
            const double dev_t = t[pair][idx] - r * t_full;
            const double dev_tc = tc[pair][idx] - r * tc_full;
            den1 += dev_t * dev_t;
            den2 += dev_t * dev_t + dev_tc * dev_tc;
        }
    }

    NSampleValue out;
    out.n = static_cast<int>(n);
    out.dn1 = den1 == 0.0 ? SnValue{0.0, true}
                          : SnValue{n * num1 / den1, false};
    out.dn2 = den2 == 0.0 ? SnValue{0.0, true}
                          : SnValue{n * num2 / den2, false};
    return out;
}

const char* two_sample_variant_name(TwoSampleVariant variant) {
    return variant == TwoSampleVariant::d1 ? "d1" : "d2";
}

TestReport run_two_sample_test(const ObjectSeries& sample1,
                               const ObjectSeries& sample2, double eta,
                               double alpha, TwoSampleVariant variant,
                               const NullSampleSet& null_set) {
    if (null_set.spec().family != NullFamily::deta)
        throw std::invalid_argument(
            "run_two_sample_test: null set is not from the deta family");
    if (null_set.spec().eta != eta)
        throw std::invalid_argument(
            "run_two_sample_test: null set simulated with a different eta");
    if (!(alpha > 0.0 && alpha < 1.0))
        throw std::invalid_argument("alpha must lie in (0,1)");

    const TwoSampleProfiles profiles =
        two_sample_profiles(sample1, sample2, eta);
    const SnValue stat = variant == TwoSampleVariant::d1
                             ? d1_statistic(profiles)
                             : d2_statistic(profiles);

    TestReport report;
    report.method = "two-sample";
    report.variant = two_sample_variant_name(variant);
    report.statistic = stat.value;
    report.degenerate = stat.degenerate;
    report.eta = eta;
    report.alpha = alpha;
    report.critical_value = null_set.quantile(1.0 - alpha);
    report.p_value = stat.degenerate ? 1.0 : null_set.pvalue(stat.value);
    report.reject = !stat.degenerate && stat.value > report.critical_value;
    report.n1 = sample1.size();
    report.n2 = sample2.size();
    report.unequal_sizes_caveat = sample1.size() != sample2.size();
    report.null_spec = null_set.spec();
    report.null_source = null_set.source();
    return report;
}

Eigen::MatrixXd pairwise_pvalue_matrix(const std::vector<ObjectSeries>& samples,
                                       double eta, TwoSampleVariant variant,
                                       const NullSampleSet& null_set) {
    const int count = static_cast<int>(samples.size());
    if (count < 2)
        throw std::invalid_argument("pairwise_pvalue_matrix: need >= 2 samples");
    if (null_set.spec().family != NullFamily::deta)
        throw std::invalid_argument(
            "pairwise_pvalue_matrix: null set is not from the deta family");
    if (null_set.spec().eta != eta)
        throw std::invalid_argument(
            "pairwise_pvalue_matrix: null set simulated with a different eta");
    Eigen::MatrixXd p = Eigen::MatrixXd::Ones(count, count);
    for (int i = 0; i < count; ++i) {
        for (int j = i + 1; j < count; ++j) {
            const TwoSampleProfiles profiles =
                two_sample_profiles(samples[i], samples[j], eta);
            const SnValue stat = variant == TwoSampleVariant::d1
                                     ? d1_statistic(profiles)
                                     : d2_statistic(profiles);
            p(i, j) = p(j, i) =
                stat.degenerate ? 1.0 : null_set.pvalue(stat.value);
        }
    }
    return p;
}

} // namespace objsn
