#pragma once

// Synthetic object-series generators and the Monte Carlo experiment harness.
//
// Three object families share one latent driver: a bivariate VAR(1) process
// with autoregression rho and innovation cross-correlation a.  Component 1
// feeds the first sample, component 2 the second, so the two samples can be
// made dependent through a.  Single-series designs (change-point tests) use
// scalar AR(1) streams with piecewise-constant transform parameters, so a
// change point alters the marginal transform while the latent path stays
// continuous across the boundary.
//
// Families:
//   gaussian_dist     1-D Gaussian distributions as quantile functions,
//                     mean arctan(U) + d1, sd d2 * (arctan(U^2) + 1)
//   graph_laplacian   two-community complete weighted graphs; within-community
//                     weights d2*(0.4 + arctan(U^2)) and d2*(0.2 + arctan(U'^2))
//                     with an independent second stream U', between-community
//                     weight 0.1 + d1
//   covariance_matrix Y = (2I3 + Z)(2I3 + Z)^T, each of the 9 entries of Z an
//                     independent stream, entry = d1 + d2 * arctan(U)
//
// (d1, d2) = (0, 1) is the no-difference configuration in every family.
// All generators are deterministic functions of (spec, seed) on every
// platform; replication r of an experiment uses derive_seed(seed, r).

#include "objsn/changepoint.hpp"
#include "objsn/null_dist.hpp"
#include "objsn/series.hpp"
#include "objsn/two_sample.hpp"

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace objsn {

enum class DgpKind { gaussian_dist, graph_laplacian, covariance_matrix };

const char* dgp_kind_name(DgpKind kind);

// Bivariate VAR(1): U_t = rho * U_{t-1} + eps_t with eps_t iid N(0, [[1,a],[a,1]]),
// started at zero and advanced burn_in steps before recording.
struct LatentVarProcess {
    double rho = 0.0;
    double a = 0.0;
    int n = 0;
    std::uint64_t seed = 1;
    int burn_in = 200;

    void validate() const;
};

struct LatentPair {
    std::vector<double> u1, u2;
};

LatentPair gen_var1(const LatentVarProcess& proc);

// Two-sample design.
struct DgpSpec {
    DgpKind dgp = DgpKind::gaussian_dist;
    double delta1 = 0.0; // location offset in sample 2
    double delta2 = 1.0; // scale factor in sample 2
    int n1 = 100;
    int n2 = 100;
    double rho = 0.0;
    double a = 0.0;
    std::uint64_t seed = 1;
    int grid_size = 100; // quantile grid (gaussian_dist)
    int nodes = 10;      // graph size (graph_laplacian)

    void validate() const;
};

std::pair<ObjectSeries, ObjectSeries> gen_two_samples(const DgpSpec& spec);

// Single series with one change point at floor(n * tau): transform parameters
// are (0, 1) before the boundary and (delta1, delta2) after it.
struct CpDgpSpec {
    DgpKind dgp = DgpKind::gaussian_dist;
    double delta1 = 0.0;
    double delta2 = 1.0;
    double tau = 0.5;
    int n = 400;
    double rho = 0.0;
    std::uint64_t seed = 1;
    int grid_size = 100;
    int nodes = 5;

    void validate() const;
};

ObjectSeries gen_cp_series(const CpDgpSpec& spec);

// Multiple change points: length-n series with per-regime (delta1, delta2).
enum class MultiCpModel { gaussian_dist, covariance_matrix };

struct MultiCpSpec {
    MultiCpModel model = MultiCpModel::gaussian_dist;
    int case_id = 1; // 1..3 select the standard coefficient sets; 0 = custom
    int n = 500;
    std::array<int, 3> change_points{110, 250, 370};
    std::array<double, 4> delta1{0.0, 0.0, 0.0, 0.0};
    std::array<double, 4> delta2{1.0, 1.0, 1.0, 1.0};
    double rho = 0.0;
    std::uint64_t seed = 1;
    int grid_size = 100;

    // Fills the coefficient vectors for the requested standard case.
    static MultiCpSpec for_case(MultiCpModel model, int case_id, double rho,
                                std::uint64_t seed);
    void validate() const;
    Segmentation true_segmentation() const;
};

ObjectSeries gen_multicp_series(const MultiCpSpec& spec);

// Adjusted Rand index between the partitions of 1..n induced by two
// breakpoint sets.  1.0 for identical partitions (including both empty).
double adjusted_rand_index(const Segmentation& seg1, const Segmentation& seg2,
                           int n);

// ---------------------------------------------------------------------------
// Experiment harness
// ---------------------------------------------------------------------------

enum class ExperimentKind { two_sample, change_point, wbs };

const char* experiment_kind_name(ExperimentKind kind);

struct ExperimentDesign {
    ExperimentKind kind = ExperimentKind::two_sample;

    // Generation (two_sample / change_point kinds).
    DgpKind dgp = DgpKind::gaussian_dist;
    double delta1 = 0.0;
    double delta2 = 1.0;
    double rho = 0.0;
    double a = 0.0; // two_sample only
    int n1 = 100;
    int n2 = 100;      // two_sample
    int n = 400;       // change_point
    double tau = 0.5;  // change_point
    int grid_size = 100;
    int nodes = 10;

    // Inference settings.
    double eta = 0.15;  // two_sample trim
    double eta1 = 0.15; // change_point trims
    double eta2 = 0.05;

    // Reference-distribution settings (ignored for kind == wbs).
    int null_grid = 5000;
    int null_reps = 10000;
    std::uint64_t null_seed = 1;
    std::optional<std::filesystem::path> null_cache_dir;

    // Multiple change-point settings (kind == wbs).
    MultiCpSpec multicp;
    WbsConfig wbs;

    void validate() const;
    NullSpec null_spec() const; // for two_sample / change_point kinds
};

struct ExperimentResult {
    ExperimentDesign design;
    int replications = 0;
    double alpha = 0.0;

    // Index 0 = d1/sn1, index 1 = d2/sn2 (two_sample / change_point kinds).
    std::array<double, 2> reject_rate{0.0, 0.0};
    std::array<double, 2> std_error{0.0, 0.0}; // binomial
    std::array<int, 2> degenerate_count{0, 0};
    std::array<std::vector<double>, 2> statistics; // per replication
    std::array<std::vector<double>, 2> tau_hat;    // change_point kind

    // kind == wbs.
    double mean_ari = 0.0;
    std::vector<double> aris;
    std::vector<int> detected_counts; // breakpoints found per replication
    double correct_count_rate = 0.0;  // share matching the true count
    double wbs_threshold_value = 0.0;
};

// Runs `replications` independent draws of the design and aggregates
// rejection rates (two_sample / change_point) or segmentation accuracy (wbs).
// The first overload simulates or loads the matching reference distribution
// itself; the second uses the provided one (two_sample / change_point only).
ExperimentResult size_power_experiment(const ExperimentDesign& design,
                                       int replications, double alpha,
                                       std::uint64_t seed);
ExperimentResult size_power_experiment(const ExperimentDesign& design,
                                       int replications, double alpha,
                                       std::uint64_t seed,
                                       const NullSampleSet& null_set);

// Empirical (1 - alpha) quantile of per-replication statistics collected
// under a matching null design: the size-adjusted critical value recipe.
double empirical_critical_value(const std::vector<double>& null_statistics,
                                double alpha);

} // namespace objsn
