#include "objsn/dgp.hpp"

#include "objsn/rng.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace objsn {

namespace {

constexpr int kDefaultBurnIn = 200;

// Scalar AR(1) with N(0,1) innovations, zero start, burn-in discard.
std::vector<double> gen_ar1(double rho, int n, std::uint64_t seed,
                            int burn_in = kDefaultBurnIn) {
    Rng rng(seed);
    std::vector<double> out;
    out.reserve(n);
    double x = 0.0;
    for (int t = -burn_in; t < n; ++t) {
        x = rho * x + rng.normal();
        if (t >= 0) out.push_back(x);
    }
    return out;
}

MetricObject gaussian_object(const SpaceDescriptor& desc, double u, double d1,
                             double d2) {
    const double mean = std::atan(u) + d1;
    const double sd = d2 * (std::atan(u * u) + 1.0);
    return MetricObject::from_values(desc,
                                     gaussian_quantiles(desc.grid_size, mean, sd));
}

MetricObject laplacian_object(const SpaceDescriptor& desc, double u,
                              double u_prime, double d1, double d2) {
    const int nodes = desc.matrix_dim;
    const int c1 = (2 * nodes) / 5; // floor(0.4 * nodes)
    const double w1 = d2 * (0.4 + std::atan(u * u));
    const double w2 = d2 * (0.2 + std::atan(u_prime * u_prime));
    const double wb = 0.1 + d1;

    Eigen::MatrixXd weights(nodes, nodes);
    for (int i = 0; i < nodes; ++i) {
        for (int j = 0; j < nodes; ++j) {
            if (i == j)
                weights(i, j) = 0.0;
            else if (i < c1 && j < c1)
                weights(i, j) = w1;
            else if (i >= c1 && j >= c1)
                weights(i, j) = w2;
            else
                weights(i, j) = wb;
        }
    }
    Eigen::MatrixXd lap = -weights;
    for (int i = 0; i < nodes; ++i) lap(i, i) = weights.row(i).sum();
    return MetricObject::from_matrix(desc, lap);
}

MetricObject covariance_object(const SpaceDescriptor& desc,
                               const std::array<double, 9>& u, double d1,
                               double d2) {
    Eigen::Matrix3d z;
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c)
            z(r, c) = d1 + d2 * std::atan(u[3 * r + c]);
    const Eigen::Matrix3d m = 2.0 * Eigen::Matrix3d::Identity() + z;
    return MetricObject::from_matrix(desc, m * m.transpose());
}

int latent_streams(DgpKind kind) {
    switch (kind) {
        case DgpKind::gaussian_dist: return 1;
        case DgpKind::graph_laplacian: return 2;
        case DgpKind::covariance_matrix: return 9;
    }
    throw std::logic_error("latent_streams: unknown kind");
}

SpaceDescriptor dgp_descriptor(DgpKind kind, int grid_size, int nodes) {
    switch (kind) {
        case DgpKind::gaussian_dist:
            return SpaceDescriptor::wasserstein(grid_size);
        case DgpKind::graph_laplacian:
            return SpaceDescriptor::laplacian(nodes);
        case DgpKind::covariance_matrix:
            return SpaceDescriptor::log_euclidean(3);
    }
    throw std::logic_error("dgp_descriptor: unknown kind");
}

void check_rho_a(double rho, double a) {
    if (!(std::abs(rho) < 1.0))
        throw std::invalid_argument("need |rho| < 1");
    if (!(a >= 0.0 && a < 1.0))
        throw std::invalid_argument("need cross-correlation a in [0,1)");
}

void check_family_params(DgpKind kind, double delta2, int grid_size,
                         int nodes) {
    if (!(delta2 > 0.0))
        throw std::invalid_argument("need delta2 > 0");
    if (kind == DgpKind::gaussian_dist && grid_size < 2)
        throw std::invalid_argument("need grid_size >= 2");
    if (kind == DgpKind::graph_laplacian) {
        const int c1 = (2 * nodes) / 5;
        if (c1 < 1 || nodes - c1 < 1)
            throw std::invalid_argument(
                "need nodes >= 3 so both communities are nonempty");
    }
}

// One object at latent position t of the stream bundle, with transform
// parameters (d1, d2).
MetricObject build_object(DgpKind kind, const SpaceDescriptor& desc,
                          const std::vector<std::vector<double>>& streams,
                          int t, double d1, double d2) {
    switch (kind) {
        case DgpKind::gaussian_dist:
            return gaussian_object(desc, streams[0][t], d1, d2);
        case DgpKind::graph_laplacian:
            return laplacian_object(desc, streams[0][t], streams[1][t], d1, d2);
        case DgpKind::covariance_matrix: {
            std::array<double, 9> u;
            for (int j = 0; j < 9; ++j) u[j] = streams[j][t];
            return covariance_object(desc, u, d1, d2);
        }
    }
    throw std::logic_error("build_object: unknown kind");
}

} // namespace

const char* dgp_kind_name(DgpKind kind) {
    switch (kind) {
        case DgpKind::gaussian_dist: return "gaussian_dist";
        case DgpKind::graph_laplacian: return "graph_laplacian";
        case DgpKind::covariance_matrix: return "covariance_matrix";
    }
    return "unknown";
}

void LatentVarProcess::validate() const {
    check_rho_a(rho, a);
    if (n < 1) throw std::invalid_argument("LatentVarProcess: need n >= 1");
    if (burn_in < 0)
        throw std::invalid_argument("LatentVarProcess: need burn_in >= 0");
}

LatentPair gen_var1(const LatentVarProcess& proc) {
    proc.validate();
    Rng rng(proc.seed);
    const double mix = std::sqrt(1.0 - proc.a * proc.a);
    LatentPair out;
    out.u1.reserve(proc.n);
    out.u2.reserve(proc.n);
    double x1 = 0.0, x2 = 0.0;
    for (int t = -proc.burn_in; t < proc.n; ++t) {
        const double z1 = rng.normal();
        const double z2 = rng.normal();
        x1 = proc.rho * x1 + z1;
        x2 = proc.rho * x2 + (proc.a * z1 + mix * z2);
        if (t >= 0) {
            out.u1.push_back(x1);
            out.u2.push_back(x2);
        }
    }
    return out;
}

void DgpSpec::validate() const {
    check_rho_a(rho, a);
    check_family_params(dgp, delta2, grid_size, nodes);
    if (n1 < 1 || n2 < 1)
        throw std::invalid_argument("DgpSpec: need n1, n2 >= 1");
    if (delta1 < 0.0)
        throw std::invalid_argument("DgpSpec: need delta1 >= 0");
}

std::pair<ObjectSeries, ObjectSeries> gen_two_samples(const DgpSpec& spec) {
    spec.validate();
    const SpaceDescriptor desc =
        dgp_descriptor(spec.dgp, spec.grid_size, spec.nodes);
    const int len = std::max(spec.n1, spec.n2);
    const int n_streams = latent_streams(spec.dgp);

    // Stream j yields the coupled pair (component 1 -> sample 1, component 2
    // -> sample 2), so a > 0 makes the samples cross-dependent.
    std::vector<std::vector<double>> s1_streams(n_streams),
        s2_streams(n_streams);
    for (int j = 0; j < n_streams; ++j) {
        LatentVarProcess proc;
        proc.rho = spec.rho;
        proc.a = spec.a;
        proc.n = len;
        proc.seed = derive_seed(spec.seed, j);
        LatentPair pair = gen_var1(proc);
        s1_streams[j] = std::move(pair.u1);
        s2_streams[j] = std::move(pair.u2);
    }

    std::vector<MetricObject> obj1, obj2;
    obj1.reserve(spec.n1);
    obj2.reserve(spec.n2);
    for (int t = 0; t < spec.n1; ++t)
        obj1.push_back(build_object(spec.dgp, desc, s1_streams, t, 0.0, 1.0));
    for (int t = 0; t < spec.n2; ++t)
        obj2.push_back(build_object(spec.dgp, desc, s2_streams, t, spec.delta1,
                                    spec.delta2));
    return {ObjectSeries::from_objects(std::move(obj1)),
            ObjectSeries::from_objects(std::move(obj2))};
}

void CpDgpSpec::validate() const {
    check_rho_a(rho, 0.0);
    check_family_params(dgp, delta2, grid_size, nodes);
    if (n < 2) throw std::invalid_argument("CpDgpSpec: need n >= 2");
    if (!(tau > 0.0 && tau < 1.0))
        throw std::invalid_argument("CpDgpSpec: need tau in (0,1)");
}

ObjectSeries gen_cp_series(const CpDgpSpec& spec) {
    spec.validate();
    const SpaceDescriptor desc =
        dgp_descriptor(spec.dgp, spec.grid_size, spec.nodes);
    const int n_streams = latent_streams(spec.dgp);
    std::vector<std::vector<double>> streams(n_streams);
    for (int j = 0; j < n_streams; ++j)
        streams[j] = gen_ar1(spec.rho, spec.n, derive_seed(spec.seed, j));

    const int boundary = static_cast<int>(std::floor(spec.n * spec.tau));
    std::vector<MetricObject> objects;
    objects.reserve(spec.n);
    for (int t = 0; t < spec.n; ++t) {
        const bool post = (t + 1) > boundary;
        objects.push_back(build_object(spec.dgp, desc, streams, t,
                                       post ? spec.delta1 : 0.0,
                                       post ? spec.delta2 : 1.0));
    }
    return ObjectSeries::from_objects(std::move(objects));
}

MultiCpSpec MultiCpSpec::for_case(MultiCpModel model, int case_id, double rho,
                                  std::uint64_t seed) {
    MultiCpSpec spec;
    spec.model = model;
    spec.case_id = case_id;
    spec.rho = rho;
    spec.seed = seed;
    if (model == MultiCpModel::gaussian_dist) {
        switch (case_id) {
            case 1:
                spec.delta1 = {0.0, 0.7, 0.0, 0.8};
                spec.delta2 = {1.0, 1.5, 0.7, 1.4};
                break;
            case 2:
                spec.delta1 = {0.0, 0.2, 0.0, 0.3};
                spec.delta2 = {0.5, 1.5, 0.4, 1.4};
                break;
            case 3:
                spec.delta1 = {0.0, 0.5, 1.5, 3.3};
                spec.delta2 = {0.2, 1.5, 3.8, 6.5};
                break;
            default:
                throw std::invalid_argument("MultiCpSpec: case_id must be 1..3");
        }
    } else {
        switch (case_id) {
            case 1:
                spec.delta1 = {0.0, 1.2, 0.0, 1.3};
                spec.delta2 = {0.8, 1.5, 0.7, 1.6};
                break;
            case 2:
                spec.delta1 = {0.0, 1.0, 0.0, 1.0};
                spec.delta2 = {0.5, 2.0, 0.4, 1.9};
                break;
            case 3:
                spec.delta1 = {0.0, 2.0, 3.9, 5.7};
                spec.delta2 = {0.2, 0.7, 1.3, 2.0};
                break;
            default:
                throw std::invalid_argument("MultiCpSpec: case_id must be 1..3");
        }
    }
    return spec;
}

void MultiCpSpec::validate() const {
    if (!(std::abs(rho) < 1.0))
        throw std::invalid_argument("MultiCpSpec: need |rho| < 1");
    if (n < 2) throw std::invalid_argument("MultiCpSpec: need n >= 2");
    if (model == MultiCpModel::gaussian_dist && grid_size < 2)
        throw std::invalid_argument("MultiCpSpec: need grid_size >= 2");
    int prev = 0;
    for (int cp : change_points) {
        if (cp <= prev || cp >= n)
            throw std::invalid_argument(
                "MultiCpSpec: change points must be strictly increasing "
                "inside (0, n)");
        prev = cp;
    }
    for (double d2 : delta2)
        if (!(d2 > 0.0))
            throw std::invalid_argument("MultiCpSpec: need delta2 > 0");
    if (case_id != 0) {
        const MultiCpSpec ref = for_case(model, case_id, rho, seed);
        if (delta1 != ref.delta1 || delta2 != ref.delta2)
            throw std::invalid_argument(
                "MultiCpSpec: coefficient vectors do not match the standard "
                "case; use case_id = 0 for custom coefficients");
    }
}

Segmentation MultiCpSpec::true_segmentation() const {
    Segmentation seg;
    seg.breakpoints.assign(change_points.begin(), change_points.end());
    return seg;
}

ObjectSeries gen_multicp_series(const MultiCpSpec& spec) {
    spec.validate();
    const DgpKind kind = spec.model == MultiCpModel::gaussian_dist
                             ? DgpKind::gaussian_dist
                             : DgpKind::covariance_matrix;
    const SpaceDescriptor desc = dgp_descriptor(kind, spec.grid_size, 0);
    const int n_streams = latent_streams(kind);
    std::vector<std::vector<double>> streams(n_streams);
    for (int j = 0; j < n_streams; ++j)
        streams[j] = gen_ar1(spec.rho, spec.n, derive_seed(spec.seed, j));

    std::vector<MetricObject> objects;
    objects.reserve(spec.n);
    for (int t = 1; t <= spec.n; ++t) {
        int regime = 0;
        while (regime < 3 && t > spec.change_points[regime]) ++regime;
        objects.push_back(build_object(kind, desc, streams, t - 1,
                                       spec.delta1[regime],
                                       spec.delta2[regime]));
    }
    return ObjectSeries::from_objects(std::move(objects));
}

namespace {

double comb2(double m) { return m * (m - 1.0) / 2.0; }

// Cut positions 0 = b_0 < b_1 < ... < b_k = n delimiting the blocks.
std::vector<int> partition_bounds(const Segmentation& seg, int n) {
    std::vector<int> bounds{0};
    for (int b : seg.breakpoints) {
        if (b <= bounds.back() || b >= n)
            throw std::invalid_argument(
                "adjusted_rand_index: breakpoints must be strictly "
                "increasing inside (0, n)");
        bounds.push_back(b);
    }
    bounds.push_back(n);
    return bounds;
}

double pair_count_sum(const std::vector<int>& bounds) {
    double s = 0.0;
    for (std::size_t i = 1; i < bounds.size(); ++i)
        s += comb2(bounds[i] - bounds[i - 1]);
    return s;
}

} // namespace

double adjusted_rand_index(const Segmentation& seg1, const Segmentation& seg2,
                           int n) {
    if (n < 1) throw std::invalid_argument("adjusted_rand_index: need n >= 1");
    const std::vector<int> b1 = partition_bounds(seg1, n);
    const std::vector<int> b2 = partition_bounds(seg2, n);

    const double sum1 = pair_count_sum(b1);
    const double sum2 = pair_count_sum(b2);

    // Blocks are intervals, so each contingency cell is the single interval
    // between consecutive merged cuts.
    std::vector<int> merged;
    merged.reserve(b1.size() + b2.size());
    std::merge(b1.begin(), b1.end(), b2.begin(), b2.end(),
               std::back_inserter(merged));
    merged.erase(std::unique(merged.begin(), merged.end()), merged.end());
    double cells = 0.0;
    for (std::size_t i = 1; i < merged.size(); ++i)
        cells += comb2(merged[i] - merged[i - 1]);

    const double expected = sum1 * sum2 / comb2(n);
    const double denom = 0.5 * (sum1 + sum2) - expected;
    if (denom == 0.0) return 1.0;
    return (cells - expected) / denom;
}

const char* experiment_kind_name(ExperimentKind kind) {
    switch (kind) {
        case ExperimentKind::two_sample: return "two_sample";
        case ExperimentKind::change_point: return "change_point";
        case ExperimentKind::wbs: return "wbs";
    }
    return "unknown";
}

void ExperimentDesign::validate() const {
    switch (kind) {
        case ExperimentKind::two_sample: {
            check_rho_a(rho, a);
            check_family_params(dgp, delta2, grid_size, nodes);
            if (n1 < 1 || n2 < 1)
                throw std::invalid_argument("design: need n1, n2 >= 1");
            if (!(eta > 0.0 && eta < 1.0))
                throw std::invalid_argument("design: need eta in (0,1)");
            break;
        }
        case ExperimentKind::change_point: {
            check_rho_a(rho, 0.0);
            check_family_params(dgp, delta2, grid_size, nodes);
            if (n < 2) throw std::invalid_argument("design: need n >= 2");
            if (!(tau > 0.0 && tau < 1.0))
                throw std::invalid_argument("design: need tau in (0,1)");
            break;
        }
        case ExperimentKind::wbs: {
            multicp.validate();
            wbs.validate();
            break;
        }
    }
}

NullSpec ExperimentDesign::null_spec() const {
    if (kind == ExperimentKind::two_sample)
        return NullSpec::make_deta(eta, null_grid, null_reps, null_seed);
    if (kind == ExperimentKind::change_point)
        return NullSpec::make_seta(eta1, eta2, null_grid, null_reps,
                                   null_seed);
    throw std::invalid_argument(
        "null_spec: the wbs kind uses its own calibration, not a null "
        "sample set");
}

namespace {

void finalize_rates(ExperimentResult& result, const std::array<int, 2>& rejects,
                    int replications) {
    for (int i = 0; i < 2; ++i) {
        const double p =
            static_cast<double>(rejects[i]) / static_cast<double>(replications);
        result.reject_rate[i] = p;
        result.std_error[i] =
            std::sqrt(p * (1.0 - p) / static_cast<double>(replications));
    }
}

ExperimentResult run_two_sample_experiment(const ExperimentDesign& design,
                                           int replications, double alpha,
                                           std::uint64_t seed,
                                           const NullSampleSet& null_set) {
    if (null_set.spec().family != NullFamily::deta ||
        null_set.spec().eta != design.eta)
        throw std::invalid_argument(
            "size_power_experiment: null set does not match the design's "
            "two-sample trimming");
    const double crit = null_set.quantile(1.0 - alpha);

    ExperimentResult result;
    std::array<int, 2> rejects{0, 0};
    for (int r = 0; r < replications; ++r) {
        DgpSpec gen;
        gen.dgp = design.dgp;
        gen.delta1 = design.delta1;
        gen.delta2 = design.delta2;
        gen.n1 = design.n1;
        gen.n2 = design.n2;
        gen.rho = design.rho;
        gen.a = design.a;
        gen.seed = derive_seed(seed, r);
        gen.grid_size = design.grid_size;
        gen.nodes = design.nodes;
        const auto samples = gen_two_samples(gen);
        const TwoSampleProfiles profiles =
            two_sample_profiles(samples.first, samples.second, design.eta);
        const std::array<SnValue, 2> stats{d1_statistic(profiles),
                                           d2_statistic(profiles)};
        for (int i = 0; i < 2; ++i) {
            result.statistics[i].push_back(stats[i].value);
            if (stats[i].degenerate)
                ++result.degenerate_count[i];
            else if (stats[i].value > crit)
                ++rejects[i];
        }
    }
    finalize_rates(result, rejects, replications);
    return result;
}

ExperimentResult run_change_point_experiment(const ExperimentDesign& design,
                                             int replications, double alpha,
                                             std::uint64_t seed,
                                             const NullSampleSet& null_set) {
    if (null_set.spec().family != NullFamily::seta ||
        null_set.spec().eta1 != design.eta1 ||
        null_set.spec().eta2 != design.eta2)
        throw std::invalid_argument(
            "size_power_experiment: null set does not match the design's "
            "change-point trimming");
    const double crit = null_set.quantile(1.0 - alpha);

    ExperimentResult result;
    std::array<int, 2> rejects{0, 0};
    for (int r = 0; r < replications; ++r) {
        CpDgpSpec gen;
        gen.dgp = design.dgp;
        gen.delta1 = design.delta1;
        gen.delta2 = design.delta2;
        gen.tau = design.tau;
        gen.n = design.n;
        gen.rho = design.rho;
        gen.seed = derive_seed(seed, r);
        gen.grid_size = design.grid_size;
        gen.nodes = design.nodes;
        const ObjectSeries series = gen_cp_series(gen);
        const PrefixStats prefix(series);
        const PrefixGram gram(prefix);
        const auto curves = contrast_curve_pair(prefix, gram, 0, series.size(),
                                                design.eta1, design.eta2);
        const std::array<const ContrastCurve*, 2> both{&curves.first,
                                                       &curves.second};
        for (int i = 0; i < 2; ++i) {
            const ContrastCurve& curve = *both[i];
            const double stat = curve.max_value();
            result.statistics[i].push_back(stat);
            result.tau_hat[i].push_back(static_cast<double>(curve.argmax_cut()) /
                                        static_cast<double>(curve.n));
            if (curve.all_degenerate())
                ++result.degenerate_count[i];
            else if (stat > crit)
                ++rejects[i];
        }
    }
    finalize_rates(result, rejects, replications);
    return result;
}

ExperimentResult run_wbs_experiment(const ExperimentDesign& design,
                                    int replications, std::uint64_t seed) {
    const WbsCalibration calibration =
        wbs_threshold(design.multicp.n, design.wbs);
    const Segmentation truth = design.multicp.true_segmentation();
    const int true_count = static_cast<int>(truth.breakpoints.size());

    ExperimentResult result;
    result.wbs_threshold_value = calibration.threshold;
    int correct = 0;
    double ari_sum = 0.0;
    for (int r = 0; r < replications; ++r) {
        MultiCpSpec gen = design.multicp;
        gen.seed = derive_seed(seed, r);
        const ObjectSeries series = gen_multicp_series(gen);
        const Segmentation found = wbs_detect(series, calibration);
        const double ari = adjusted_rand_index(found, truth, design.multicp.n);
        result.aris.push_back(ari);
        result.detected_counts.push_back(
            static_cast<int>(found.breakpoints.size()));
        ari_sum += ari;
        if (static_cast<int>(found.breakpoints.size()) == true_count)
            ++correct;
    }
    result.mean_ari = ari_sum / static_cast<double>(replications);
    result.correct_count_rate =
        static_cast<double>(correct) / static_cast<double>(replications);
    return result;
}

void check_run_args(int replications, double alpha) {
    if (replications < 1)
        throw std::invalid_argument(
            "size_power_experiment: need replications >= 1");
    if (!(alpha > 0.0 && alpha < 1.0))
        throw std::invalid_argument(
            "size_power_experiment: alpha must lie in (0,1)");
}

} // namespace

ExperimentResult size_power_experiment(const ExperimentDesign& design,
                                       int replications, double alpha,
                                       std::uint64_t seed) {
    design.validate();
    check_run_args(replications, alpha);
    ExperimentResult result;
    if (design.kind == ExperimentKind::wbs) {
        result = run_wbs_experiment(design, replications, seed);
    } else {
        const NullSampleSet null_set =
            obtain_null(design.null_spec(), design.null_cache_dir);
        result = design.kind == ExperimentKind::two_sample
                     ? run_two_sample_experiment(design, replications, alpha,
                                                 seed, null_set)
                     : run_change_point_experiment(design, replications, alpha,
                                                   seed, null_set);
    }
    result.design = design;
    result.replications = replications;
    result.alpha = alpha;
    return result;
}

ExperimentResult size_power_experiment(const ExperimentDesign& design,
                                       int replications, double alpha,
                                       std::uint64_t seed,
                                       const NullSampleSet& null_set) {
    design.validate();
    check_run_args(replications, alpha);
    if (design.kind == ExperimentKind::wbs)
        throw std::invalid_argument(
            "size_power_experiment: the wbs kind does not take a null sample "
            "set");
    ExperimentResult result =
        design.kind == ExperimentKind::two_sample
            ? run_two_sample_experiment(design, replications, alpha, seed,
                                        null_set)
            : run_change_point_experiment(design, replications, alpha, seed,
                                          null_set);
    result.design = design;
    result.replications = replications;
    result.alpha = alpha;
    return result;
}

double empirical_critical_value(const std::vector<double>& null_statistics,
                                double alpha) {
    if (null_statistics.empty())
        throw std::invalid_argument(
            "empirical_critical_value: no statistics given");
    if (!(alpha > 0.0 && alpha < 1.0))
        throw std::invalid_argument(
            "empirical_critical_value: alpha must lie in (0,1)");
    std::vector<double> sorted = null_statistics;
    std::sort(sorted.begin(), sorted.end());
    const int count = static_cast<int>(sorted.size());
    int rank = static_cast<int>(std::ceil((1.0 - alpha) * count));
    rank = std::clamp(rank, 1, count);
    return sorted[rank - 1];
}

} // namespace objsn
