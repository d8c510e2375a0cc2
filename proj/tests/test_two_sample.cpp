#include "objsn/dgp.hpp"
#include "objsn/rng.hpp"
#include "objsn/two_sample.hpp"

#include "oracles.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

using namespace objsn;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

ObjectSeries scalar_series(const std::vector<double>& values) {
    std::vector<MetricObject> objects;
    for (double v : values) objects.push_back(MetricObject::scalar(v));
    return ObjectSeries::from_objects(std::move(objects));
}

ObjectSeries ramp(int n, double offset) {
    std::vector<double> values;
    for (int t = 1; t <= n; ++t) values.push_back(t + offset);
    return scalar_series(values);
}

NullSampleSet small_null(double eta) {
    return simulate_null(NullSpec::make_deta(eta, 300, 400, 7));
}

ObjectSeries scale_embeddings(const ObjectSeries& s, double c) {
    std::vector<MetricObject> objects;
    for (const MetricObject& obj : s.objects)
        objects.push_back(unembed(obj.descriptor(), c * embed(obj).coords));
    return ObjectSeries::from_objects(std::move(objects));
}

ObjectSeries translate_embeddings(const ObjectSeries& s,
                                  const Eigen::VectorXd& shift) {
    std::vector<MetricObject> objects;
    for (const MetricObject& obj : s.objects)
        objects.push_back(unembed(obj.descriptor(), embed(obj).coords + shift));
    return ObjectSeries::from_objects(std::move(objects));
}

} // namespace

TEST_CASE("profiles match the naive route") {
    SECTION("equal scalar lengths") {
        const ObjectSeries s1 = testing::random_series(SpaceKind::scalar, 15, 21);
        const ObjectSeries s2 = testing::random_series(SpaceKind::scalar, 15, 22);
        const TwoSampleProfiles got = two_sample_profiles(s1, s2, 0.15);
        const testing::NaiveProfiles want = testing::naive_profiles(s1, s2, 0.15);
        REQUIRE(got.k_min == want.k_min);
        REQUIRE(got.var_gap.size() == want.t.size());
        for (std::size_t i = 0; i < want.t.size(); ++i) {
            REQUIRE_THAT(got.var_gap[i], WithinAbs(want.t[i], 1e-10));
            REQUIRE_THAT(got.contam_gap[i], WithinAbs(want.tc[i], 1e-10));
            REQUIRE(got.contam_gap[i] >= -1e-12);
        }
    }
    SECTION("unequal lengths and non-scalar spaces") {
        for (SpaceKind kind : {SpaceKind::wasserstein_1d,
                               SpaceKind::log_euclidean_spd,
                               SpaceKind::graph_laplacian}) {
            INFO("space: " << space_kind_name(kind));
            const ObjectSeries s1 =
                testing::random_series(kind, 13, 5 + static_cast<int>(kind));
            const ObjectSeries s2 =
                testing::random_series(kind, 17, 55 + static_cast<int>(kind));
            const TwoSampleProfiles got = two_sample_profiles(s1, s2, 0.12);
            const testing::NaiveProfiles want =
                testing::naive_profiles(s1, s2, 0.12);
            for (std::size_t i = 0; i < want.t.size(); ++i) {
                REQUIRE_THAT(got.var_gap[i], WithinAbs(want.t[i], 1e-8));
                REQUIRE_THAT(got.contam_gap[i], WithinAbs(want.tc[i], 1e-8));
            }
        }
    }
}

TEST_CASE("statistics match the naive route") {
    const ObjectSeries s1 = testing::random_series(SpaceKind::scalar, 30, 31);
    const ObjectSeries s2 = testing::random_series(SpaceKind::scalar, 30, 32);
    const TwoSampleProfiles profiles = two_sample_profiles(s1, s2, 0.15);
    const testing::NaiveProfiles naive = testing::naive_profiles(s1, s2, 0.15);
    const SnValue d1 = d1_statistic(profiles);
    const SnValue d2 = d2_statistic(profiles);
    REQUIRE_FALSE(d1.degenerate);
    REQUIRE_FALSE(d2.degenerate);
    REQUIRE_THAT(d1.value, WithinRel(testing::naive_d1(naive).value, 1e-10));
    REQUIRE_THAT(d2.value, WithinRel(testing::naive_d2(naive).value, 1e-10));

    const ObjectSeries w1 =
        testing::random_series(SpaceKind::frobenius_matrix, 40, 41);
    const ObjectSeries w2 =
        testing::random_series(SpaceKind::frobenius_matrix, 40, 42);
    const TwoSampleProfiles mp = two_sample_profiles(w1, w2, 0.15);
    const testing::NaiveProfiles mn = testing::naive_profiles(w1, w2, 0.15);
    REQUIRE_THAT(d1_statistic(mp).value,
                 WithinRel(testing::naive_d1(mn).value, 1e-10));
    REQUIRE_THAT(d2_statistic(mp).value,
                 WithinRel(testing::naive_d2(mn).value, 1e-10));
}

TEST_CASE("parallel shifted ramps are exactly degenerate") {
    const ObjectSeries s1 = ramp(20, 0.0);
    const ObjectSeries s2 = ramp(20, 5.0);
    const TwoSampleProfiles profiles = two_sample_profiles(s1, s2, 0.15);
    // A pure shift leaves every window variance equal, so the variance
    // profile is identically zero; the contaminated gap is a constant
    // 2*(5^2) = 50 per unit r, whose bridge deviations also vanish.  Both
    // statistics must then take the 0/0 branch rather than emit noise.
    for (double t : profiles.var_gap) REQUIRE(t == 0.0);
    for (std::size_t i = 0; i < profiles.contam_gap.size(); ++i) {
        const double r = static_cast<double>(profiles.k_min +
                                             static_cast<int>(i)) /
                         profiles.n;
        REQUIRE_THAT(profiles.contam_gap[i], WithinRel(50.0 * r, 1e-12));
    }
    REQUIRE(d1_statistic(profiles).degenerate);
    REQUIRE(d2_statistic(profiles).degenerate);

    // Breaking the parallel structure restores a healthy d2 that both
    // routes agree on.
    std::vector<MetricObject> bent;
    for (int t = 1; t <= 20; ++t)
        bent.push_back(MetricObject::scalar(5.0 + 1.3 * t + 0.01 * t * t));
    const ObjectSeries s3 = ObjectSeries::from_objects(std::move(bent));
    const TwoSampleProfiles bent_profiles = two_sample_profiles(s1, s3, 0.15);
    const testing::NaiveProfiles naive = testing::naive_profiles(s1, s3, 0.15);
    REQUIRE_FALSE(d2_statistic(bent_profiles).degenerate);
    REQUIRE_THAT(d2_statistic(bent_profiles).value,
                 WithinRel(testing::naive_d2(naive).value, 1e-8));
}

TEST_CASE("identical samples are degenerate with zero profiles") {
    const ObjectSeries s = testing::random_series(SpaceKind::wasserstein_1d, 12, 77);
    const TwoSampleProfiles profiles = two_sample_profiles(s, s, 0.15);
    for (std::size_t i = 0; i < profiles.var_gap.size(); ++i) {
        REQUIRE_THAT(profiles.var_gap[i], WithinAbs(0.0, 1e-12));
        REQUIRE_THAT(profiles.contam_gap[i], WithinAbs(0.0, 1e-12));
    }
    REQUIRE(d1_statistic(profiles).degenerate);
    REQUIRE(d2_statistic(profiles).degenerate);
    REQUIRE(d1_statistic(profiles).value == 0.0);
}

TEST_CASE("swapping equal-length samples leaves the statistics unchanged") {
    const ObjectSeries s1 = testing::random_series(SpaceKind::l2_function, 18, 3);
    const ObjectSeries s2 = testing::random_series(SpaceKind::l2_function, 18, 4);
    const TwoSampleProfiles ab = two_sample_profiles(s1, s2, 0.15);
    const TwoSampleProfiles ba = two_sample_profiles(s2, s1, 0.15);
    REQUIRE(d1_statistic(ab).value == d1_statistic(ba).value);
    REQUIRE(d2_statistic(ab).value == d2_statistic(ba).value);
}

TEST_CASE("statistics are scale and translation invariant") {
    const ObjectSeries s1 = testing::random_series(SpaceKind::l2_function, 16, 13);
    const ObjectSeries s2 = testing::random_series(SpaceKind::l2_function, 16, 14);
    const double d1_base = d1_statistic(two_sample_profiles(s1, s2, 0.15)).value;
    const double d2_base = d2_statistic(two_sample_profiles(s1, s2, 0.15)).value;

    const ObjectSeries c1 = scale_embeddings(s1, 3.7);
    const ObjectSeries c2 = scale_embeddings(s2, 3.7);
    REQUIRE_THAT(d1_statistic(two_sample_profiles(c1, c2, 0.15)).value,
                 WithinRel(d1_base, 1e-8));
    REQUIRE_THAT(d2_statistic(two_sample_profiles(c1, c2, 0.15)).value,
                 WithinRel(d2_base, 1e-8));

    Eigen::VectorXd shift = Eigen::VectorXd::Constant(8, 2.25);
    const ObjectSeries t1 = translate_embeddings(s1, shift);
    const ObjectSeries t2 = translate_embeddings(s2, shift);
    REQUIRE_THAT(d1_statistic(two_sample_profiles(t1, t2, 0.15)).value,
                 WithinRel(d1_base, 1e-8));
    REQUIRE_THAT(d2_statistic(two_sample_profiles(t1, t2, 0.15)).value,
                 WithinRel(d2_base, 1e-8));
}

TEST_CASE("d2 collapses to d1 when the contaminated profile vanishes") {
    const ObjectSeries s1 = testing::random_series(SpaceKind::scalar, 20, 61);
    const ObjectSeries s2 = testing::random_series(SpaceKind::scalar, 20, 62);
    TwoSampleProfiles profiles = two_sample_profiles(s1, s2, 0.15);
    std::fill(profiles.contam_gap.begin(), profiles.contam_gap.end(), 0.0);
    REQUIRE(d1_statistic(profiles).value == d2_statistic(profiles).value);
}

TEST_CASE("window collapse raises a descriptive error") {
    const ObjectSeries s1 = testing::random_series(SpaceKind::scalar, 4, 1);
    const ObjectSeries s2 = testing::random_series(SpaceKind::scalar, 40, 2);
    try {
        two_sample_profiles(s1, s2, 0.05);
        FAIL("expected an error");
    } catch (const std::invalid_argument& e) {
        REQUIRE_THAT(e.what(), Catch::Matchers::ContainsSubstring("window"));
    }
    const ObjectSeries w =
        testing::random_series(SpaceKind::wasserstein_1d, 10, 3);
    const ObjectSeries f = testing::random_series(SpaceKind::l2_function, 10, 3);
    REQUIRE_THROWS_AS(two_sample_profiles(w, f, 0.15), std::invalid_argument);
}

TEST_CASE("n-sample statistics reduce to and extend the two-sample case") {
    const ObjectSeries s1 = testing::random_series(SpaceKind::scalar, 14, 81);
    const ObjectSeries s2 = testing::random_series(SpaceKind::scalar, 14, 82);
    const ObjectSeries s3 = testing::random_series(SpaceKind::scalar, 10, 83);

    SECTION("two samples give exactly (d1, d2)") {
        const NSampleValue value = n_sample_statistics({s1, s2}, 0.15);
        const TwoSampleProfiles profiles = two_sample_profiles(s1, s2, 0.15);
        REQUIRE_THAT(value.dn1.value,
                     WithinAbs(d1_statistic(profiles).value, 1e-12));
        REQUIRE_THAT(value.dn2.value,
                     WithinAbs(d2_statistic(profiles).value, 1e-12));
    }
    SECTION("three samples match the naive pairwise aggregation") {
        const NSampleValue value = n_sample_statistics({s1, s2, s3}, 0.15);
        const auto [dn1, dn2] = testing::naive_n_sample({s1, s2, s3}, 0.15);
        REQUIRE_THAT(value.dn1.value, WithinRel(dn1.value, 1e-10));
        REQUIRE_THAT(value.dn2.value, WithinRel(dn2.value, 1e-10));
        REQUIRE(value.n == 38);
    }
    SECTION("three identical samples are degenerate") {
        const NSampleValue value = n_sample_statistics({s1, s1, s1}, 0.15);
        REQUIRE(value.dn1.degenerate);
        REQUIRE(value.dn2.degenerate);
    }
}

TEST_CASE("test runner wires statistics to the simulated null") {
    const NullSampleSet null_set = small_null(0.15);
    const ObjectSeries s1 = testing::random_series(SpaceKind::scalar, 30, 91);
    const ObjectSeries s2 = testing::random_series(SpaceKind::scalar, 30, 92);

    const TestReport report = run_two_sample_test(s1, s2, 0.15, 0.05,
                                                  TwoSampleVariant::d2, null_set);
    REQUIRE(report.method == "two-sample");
    REQUIRE(report.variant == "d2");
    REQUIRE(report.n1 == 30);
    REQUIRE_FALSE(report.unequal_sizes_caveat);
    REQUIRE(report.p_value >= 0.0);
    REQUIRE(report.p_value <= 1.0);
    REQUIRE_THAT(report.critical_value, WithinAbs(null_set.quantile(0.95), 1e-12));
    REQUIRE(report.reject == (report.statistic > report.critical_value));
    REQUIRE(report.null_source == "simulated");

    SECTION("eta mismatch is rejected") {
        REQUIRE_THROWS_AS(run_two_sample_test(s1, s2, 0.10, 0.05,
                                              TwoSampleVariant::d1, null_set),
                          std::invalid_argument);
    }
    SECTION("unequal sizes set the caveat flag") {
        const ObjectSeries s3 = testing::random_series(SpaceKind::scalar, 22, 93);
        const TestReport r = run_two_sample_test(s1, s3, 0.15, 0.05,
                                                 TwoSampleVariant::d1, null_set);
        REQUIRE(r.unequal_sizes_caveat);
    }
    SECTION("degenerate inputs never reject and report p = 1") {
        const TestReport r = run_two_sample_test(s1, s1, 0.15, 0.05,
                                                 TwoSampleVariant::d2, null_set);
        REQUIRE(r.degenerate);
        REQUIRE_FALSE(r.reject);
        REQUIRE(r.p_value == 1.0);
    }
    SECTION("a statistic below every draw lands in the top p band") {
        // Degenerate-free but tiny statistic: two near-identical samples.
        const TestReport r = run_two_sample_test(s1, s2, 0.15, 0.05,
                                                 TwoSampleVariant::d1, null_set);
        if (r.statistic < null_set.draws().front())
            REQUIRE(r.p_value >= 1.0 - 1.0 / (null_set.draws().size() + 1.0));
    }
}

TEST_CASE("pairwise p-value matrix is symmetric with unit diagonal") {
    const NullSampleSet null_set = small_null(0.15);
    const std::vector<ObjectSeries> samples = {
        testing::random_series(SpaceKind::scalar, 20, 1),
        testing::random_series(SpaceKind::scalar, 20, 2),
        testing::random_series(SpaceKind::scalar, 20, 3),
    };
    const Eigen::MatrixXd p =
        pairwise_pvalue_matrix(samples, 0.15, TwoSampleVariant::d2, null_set);
    REQUIRE(p.rows() == 3);
    REQUIRE((p - p.transpose()).norm() == 0.0);
    for (int i = 0; i < 3; ++i) REQUIRE(p(i, i) == 1.0);
    for (int i = 0; i < 3; ++i) {
        for (int j = i + 1; j < 3; ++j) {
            const TestReport r =
                run_two_sample_test(samples[i], samples[j], 0.15, 0.05,
                                    TwoSampleVariant::d2, null_set);
            REQUIRE_THAT(p(i, j), WithinAbs(r.p_value, 1e-15));
        }
    }

    SECTION("identical pairs get p = 1") {
        const Eigen::MatrixXd q = pairwise_pvalue_matrix(
            {samples[0], samples[0]}, 0.15, TwoSampleVariant::d1, null_set);
        REQUIRE(q(0, 1) == 1.0);
    }
}

TEST_CASE("size calibration: iid scalar samples reject near the nominal level") {
    // d1's size is already nominal at moderate n; d2 approaches the level
    // from below as n grows (its contaminated term inflates the denominator
    // slightly in small samples), so calibrate both at n = 400 per sample.
    const NullSampleSet null_set =
        simulate_null(NullSpec::make_deta(0.15, 5000, 10000, 1));
    const double crit = null_set.quantile(0.95);
    int rejections1 = 0;
    int rejections2 = 0;
    const int reps = 2000;
    const int n = 400;
    for (int r = 0; r < reps; ++r) {
        const std::uint64_t seed = derive_seed(123456, r);
        Rng rng(seed);
        std::vector<MetricObject> o1, o2;
        for (int t = 0; t < n; ++t) o1.push_back(MetricObject::scalar(rng.normal()));
        for (int t = 0; t < n; ++t) o2.push_back(MetricObject::scalar(rng.normal()));
        const TwoSampleProfiles profiles =
            two_sample_profiles(ObjectSeries::from_objects(std::move(o1)),
                                ObjectSeries::from_objects(std::move(o2)), 0.15);
        const SnValue d1 = d1_statistic(profiles);
        const SnValue d2 = d2_statistic(profiles);
        if (!d1.degenerate && d1.value > crit) ++rejections1;
        if (!d2.degenerate && d2.value > crit) ++rejections2;
    }
    const double rate1 = static_cast<double>(rejections1) / reps;
    const double rate2 = static_cast<double>(rejections2) / reps;
    REQUIRE(rate1 >= 0.03);
    REQUIRE(rate1 <= 0.07);
    REQUIRE(rate2 >= 0.03);
    REQUIRE(rate2 <= 0.07);
}
