// objsn: self-normalized inference for object-valued time series.
//
// Subcommands: two-sample, n-sample, cp-test, wbs, simulate-null,
// experiment, pairwise-matrix.  Reports are JSON (stable key order);
// profiles, curves, and experiment tables are CSV.  Exit codes:
// 0 = completed, 2 = completed but a requested statistic was degenerate,
// 1 = error.

#include <CLI11.hpp>
#include <json.hpp>

#include "objsn/changepoint.hpp"
#include "objsn/dgp.hpp"
#include "objsn/null_dist.hpp"
#include "objsn/series_io.hpp"
#include "objsn/two_sample.hpp"

#include <cctype>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace {

using nlohmann::json;
using namespace objsn;

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitDegenerate = 2;

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

void write_text(const std::string& target, const std::string& content) {
    if (target.empty() || target == "-") {
        std::cout << content;
        return;
    }
    std::ofstream out(target);
    if (!out) throw std::runtime_error("cannot open output file: " + target);
    out << content;
    if (!out) throw std::runtime_error("failed writing output file: " + target);
}

// ---------------------------------------------------------------------------
// Shared option blocks
// ---------------------------------------------------------------------------

struct HintOptions {
    std::string kind;
    std::string payload;
    int grid = 0;
    int dim = 0;

    SeriesParseHints to_hints() const {
        SeriesParseHints h;
        if (!kind.empty()) h.kind = space_kind_from_name(kind);
        if (!payload.empty()) h.payload = payload;
        if (grid > 0) h.grid_size = grid;
        if (dim > 0) h.matrix_dim = dim;
        return h;
    }
};

void add_hint_options(CLI::App* cmd, HintOptions& opts) {
    cmd->add_option("--kind", opts.kind,
                    "space kind for headerless files (scalar, l2_function, "
                    "wasserstein_1d, frobenius_matrix, log_euclidean_spd, "
                    "graph_laplacian)");
    cmd->add_option("--grid", opts.grid, "grid size hint for headerless files");
    cmd->add_option("--dim", opts.dim,
                    "matrix dimension hint for headerless files");
    cmd->add_option("--payload", opts.payload,
                    "payload hint (values, quantiles, samples, matrix)");
}

struct NullOptions {
    int grid = 5000;
    int reps = 10000;
    std::uint64_t seed = 1;
    std::string cache_dir;

    std::optional<std::filesystem::path> cache() const {
        if (cache_dir.empty()) return std::nullopt;
        return std::filesystem::path(cache_dir);
    }
};

void add_null_options(CLI::App* cmd, NullOptions& opts) {
    cmd->add_option("--null-grid", opts.grid,
                    "path grid for the simulated reference distribution")
        ->capture_default_str();
    cmd->add_option("--null-reps", opts.reps,
                    "Monte Carlo draws for the reference distribution")
        ->capture_default_str();
    cmd->add_option("--null-seed", opts.seed, "reference simulation seed")
        ->capture_default_str();
    cmd->add_option("--cache-dir", opts.cache_dir,
                    "directory for reference-distribution cache files")
        ->envname("OBJSN_NULL_CACHE");
}

json null_to_json(const NullSpec& spec, const std::string& source) {
    json j;
    j["family"] = null_family_name(spec.family);
    if (spec.family == NullFamily::deta) {
        j["eta"] = spec.eta;
    } else {
        j["eta1"] = spec.eta1;
        j["eta2"] = spec.eta2;
    }
    j["grid"] = spec.grid;
    j["reps"] = spec.reps;
    j["seed"] = spec.seed;
    j["source"] = source;
    return j;
}

json report_to_json(const TestReport& r) {
    json j;
    j["method"] = r.method;
    j["variant"] = r.variant;
    j["statistic"] = r.statistic;
    j["degenerate"] = r.degenerate;
    j["eta"] = r.eta;
    j["alpha"] = r.alpha;
    j["critical_value"] = r.critical_value;
    j["p_value"] = r.p_value;
    j["reject"] = r.reject;
    j["n1"] = r.n1;
    j["n2"] = r.n2;
    j["unequal_sizes_caveat"] = r.unequal_sizes_caveat;
    j["null"] = null_to_json(r.null_spec, r.null_source);
    return j;
}

json report_to_json(const ChangePointReport& r) {
    json j;
    j["method"] = r.method;
    j["variant"] = r.variant;
    j["statistic"] = r.statistic;
    j["degenerate"] = r.degenerate;
    j["k_hat"] = r.k_hat;
    j["tau_hat"] = r.tau_hat;
    j["eta1"] = r.eta1;
    j["eta2"] = r.eta2;
    j["alpha"] = r.alpha;
    j["critical_value"] = r.critical_value;
    j["p_value"] = r.p_value;
    j["reject"] = r.reject;
    j["n"] = r.n;
    j["null"] = null_to_json(r.null_spec, r.null_source);
    return j;
}

void emit_report(const std::string& target, const json& j) {
    write_text(target, j.dump(2) + "\n");
}

// ---------------------------------------------------------------------------
// two-sample
// ---------------------------------------------------------------------------

struct TwoSampleArgs {
    std::string sample1, sample2;
    HintOptions hints;
    double eta = 0.15;
    double alpha = 0.05;
    std::string variant = "both";
    NullOptions null_opts;
    std::string report = "-";
    std::string profile_csv;
};

int run_two_sample(const TwoSampleArgs& args) {
    const SeriesParseHints hints = args.hints.to_hints();
    const ObjectSeries s1 = parse_series(args.sample1, hints);
    const ObjectSeries s2 = parse_series(args.sample2, hints);
    const NullSampleSet null_set = obtain_null(
        NullSpec::make_deta(args.eta, args.null_opts.grid, args.null_opts.reps,
                            args.null_opts.seed),
        args.null_opts.cache());

    json out;
    out["method"] = "two-sample";
    out["sample1"] = args.sample1;
    out["sample2"] = args.sample2;
    bool degenerate = false;
    for (const auto& [name, variant] :
         {std::pair{"d1", TwoSampleVariant::d1},
          std::pair{"d2", TwoSampleVariant::d2}}) {
        if (args.variant != "both" && args.variant != name) continue;
        const TestReport rep = run_two_sample_test(s1, s2, args.eta, args.alpha,
                                                   variant, null_set);
        degenerate = degenerate || rep.degenerate;
        out["reports"][name] = report_to_json(rep);
    }

    if (!args.profile_csv.empty()) {
        const TwoSampleProfiles p = two_sample_profiles(s1, s2, args.eta);
        std::ostringstream csv;
        csv << "k,r,var_gap,contam_gap\n";
        for (std::size_t i = 0; i < p.var_gap.size(); ++i) {
            const int k = p.k_min + static_cast<int>(i);
            csv << k << "," << fmt(static_cast<double>(k) / p.n) << ","
                << fmt(p.var_gap[i]) << "," << fmt(p.contam_gap[i]) << "\n";
        }
        write_text(args.profile_csv, csv.str());
    }

    emit_report(args.report, out);
    return degenerate ? kExitDegenerate : kExitOk;
}

// ---------------------------------------------------------------------------
// n-sample
// ---------------------------------------------------------------------------

struct NSampleArgs {
    std::vector<std::string> samples;
    HintOptions hints;
    double eta = 0.15;
    double alpha = 0.05;
    NullOptions null_opts;
    std::string report = "-";
};

int run_n_sample(const NSampleArgs& args) {
    const SeriesParseHints hints = args.hints.to_hints();
    std::vector<ObjectSeries> samples;
    samples.reserve(args.samples.size());
    for (const std::string& path : args.samples)
        samples.push_back(parse_series(path, hints));

    const NSampleValue value = n_sample_statistics(samples, args.eta);

    json out;
    out["method"] = "n-sample";
    out["samples"] = args.samples;
    out["sample_count"] = samples.size();
    out["eta"] = args.eta;
    out["n_total"] = value.n;
    out["dn1"] = {{"value", value.dn1.value},
                  {"degenerate", value.dn1.degenerate}};
    out["dn2"] = {{"value", value.dn2.value},
                  {"degenerate", value.dn2.degenerate}};

    if (samples.size() == 2) {
        const NullSampleSet null_set =
            obtain_null(NullSpec::make_deta(args.eta, args.null_opts.grid,
                                            args.null_opts.reps,
                                            args.null_opts.seed),
                        args.null_opts.cache());
        out["reports"]["d1"] = report_to_json(run_two_sample_test(
            samples[0], samples[1], args.eta, args.alpha, TwoSampleVariant::d1,
            null_set));
        out["reports"]["d2"] = report_to_json(run_two_sample_test(
            samples[0], samples[1], args.eta, args.alpha, TwoSampleVariant::d2,
            null_set));
    } else {
        out["note"] =
            "statistics only: no tabulated reference distribution is "
            "provided for more than two samples";
    }

    emit_report(args.report, out);
    return value.dn1.degenerate || value.dn2.degenerate ? kExitDegenerate
                                                        : kExitOk;
}

// ---------------------------------------------------------------------------
// cp-test
// ---------------------------------------------------------------------------

struct CpTestArgs {
    std::string series;
    HintOptions hints;
    double eta1 = 0.15;
    double eta2 = 0.05;
    double alpha = 0.05;
    std::string variant = "both";
    NullOptions null_opts;
    std::string report = "-";
    std::string curve_csv;
};

int run_cp_test(const CpTestArgs& args) {
    const ObjectSeries series = parse_series(args.series, args.hints.to_hints());
    const NullSampleSet null_set = obtain_null(
        NullSpec::make_seta(args.eta1, args.eta2, args.null_opts.grid,
                            args.null_opts.reps, args.null_opts.seed),
        args.null_opts.cache());

    json out;
    out["method"] = "cp-test";
    out["series"] = args.series;
    bool degenerate = false;
    for (const auto& [name, variant] : {std::pair{"sn1", CpVariant::sn1},
                                        std::pair{"sn2", CpVariant::sn2}}) {
        if (args.variant != "both" && args.variant != name) continue;
        const ChangePointReport rep = run_cp_test(
            series, args.eta1, args.eta2, args.alpha, variant, null_set);
        degenerate = degenerate || rep.degenerate;
        out["reports"][name] = report_to_json(rep);
    }

    if (!args.curve_csv.empty()) {
        const PrefixStats prefix(series);
        const PrefixGram gram(prefix);
        const auto curves = contrast_curve_pair(prefix, gram, 0, series.size(),
                                                args.eta1, args.eta2);
        std::ostringstream csv;
        csv << "k,tau,sn1,sn1_degenerate,sn2,sn2_degenerate\n";
        for (int k = curves.first.k_min; k <= curves.first.k_max; ++k) {
            csv << k << ","
                << fmt(static_cast<double>(k) / curves.first.n) << ","
                << fmt(curves.first.value_at(k)) << ","
                << (curves.first.degenerate_at(k) ? 1 : 0) << ","
                << fmt(curves.second.value_at(k)) << ","
                << (curves.second.degenerate_at(k) ? 1 : 0) << "\n";
        }
        write_text(args.curve_csv, csv.str());
    }

    emit_report(args.report, out);
    return degenerate ? kExitDegenerate : kExitOk;
}

// ---------------------------------------------------------------------------
// wbs
// ---------------------------------------------------------------------------

struct WbsArgs {
    std::string series;
    HintOptions hints;
    WbsConfig cfg;
    std::string report = "-";
};

int run_wbs(const WbsArgs& args) {
    const ObjectSeries series = parse_series(args.series, args.hints.to_hints());
    const WbsCalibration calibration = wbs_threshold(series.size(), args.cfg);
    const Segmentation seg = wbs_detect(series, calibration);

    json out;
    out["method"] = "wbs";
    out["series"] = args.series;
    out["n"] = series.size();
    out["config"] = {{"intervals", args.cfg.num_intervals},
                     {"calib_reps", args.cfg.calib_reps},
                     {"min_len", args.cfg.min_len},
                     {"eta1", args.cfg.eta1},
                     {"eta2", args.cfg.eta2},
                     {"quantile", args.cfg.quantile},
                     {"seed", args.cfg.seed}};
    out["threshold"] = calibration.threshold;
    out["breakpoints"] = seg.breakpoints;
    json fractions = json::array();
    for (int b : seg.breakpoints)
        fractions.push_back(static_cast<double>(b) / series.size());
    out["breakpoint_fractions"] = fractions;
    out["detected"] = seg.breakpoints.size();

    emit_report(args.report, out);
    return kExitOk;
}

// ---------------------------------------------------------------------------
// simulate-null
// ---------------------------------------------------------------------------

struct SimulateNullArgs {
    std::string family = "deta";
    double eta = 0.15;
    double eta1 = 0.15;
    double eta2 = 0.05;
    NullOptions null_opts;
    std::vector<double> levels{0.90, 0.95, 0.99, 0.995};
    std::string report = "-";
};

int run_simulate_null(const SimulateNullArgs& args) {
    std::string family = args.family;
    for (char& c : family) c = static_cast<char>(std::tolower(c));
    NullSpec spec;
    if (family == "deta")
        spec = NullSpec::make_deta(args.eta, args.null_opts.grid,
                                   args.null_opts.reps, args.null_opts.seed);
    else if (family == "seta")
        spec = NullSpec::make_seta(args.eta1, args.eta2, args.null_opts.grid,
                                   args.null_opts.reps, args.null_opts.seed);
    else
        throw std::runtime_error("unknown family '" + args.family +
                                 "' (expected deta or seta)");

    const NullSampleSet set = obtain_null(spec, args.null_opts.cache());

    json out;
    out["method"] = "simulate-null";
    out["null"] = null_to_json(spec, set.source());
    out["redraws"] = set.redraws();
    json quantiles;
    for (double level : args.levels) quantiles[fmt(level)] = set.quantile(level);
    out["quantiles"] = quantiles;
    json criticals;
    for (const auto& [alpha, value] :
         critical_value_table(set, {0.10, 0.05, 0.01, 0.005}).rows)
        criticals[fmt(alpha)] = value;
    out["critical_values"] = criticals;
    if (args.null_opts.cache())
        out["cache_file"] =
            (*args.null_opts.cache() / cache_filename(spec)).string();

    emit_report(args.report, out);
    return kExitOk;
}

// ---------------------------------------------------------------------------
// experiment
// ---------------------------------------------------------------------------

struct ExperimentArgs {
    std::string config;
    std::string out = "-";
    std::string stats_csv;
    int replications_override = 0;
    std::uint64_t seed_override = 0;
    bool has_seed_override = false;
    double alpha_override = 0.0;
};

DgpKind dgp_kind_from_name(const std::string& name) {
    if (name == "gaussian_dist") return DgpKind::gaussian_dist;
    if (name == "graph_laplacian") return DgpKind::graph_laplacian;
    if (name == "covariance_matrix") return DgpKind::covariance_matrix;
    throw std::runtime_error("unknown dgp '" + name + "'");
}

ExperimentDesign design_from_json(const json& j) {
    ExperimentDesign d;
    const std::string kind = j.value("kind", std::string("two_sample"));
    if (kind == "two_sample")
        d.kind = ExperimentKind::two_sample;
    else if (kind == "change_point")
        d.kind = ExperimentKind::change_point;
    else if (kind == "wbs")
        d.kind = ExperimentKind::wbs;
    else
        throw std::runtime_error("unknown experiment kind '" + kind + "'");

    if (j.contains("dgp")) d.dgp = dgp_kind_from_name(j["dgp"].get<std::string>());
    d.delta1 = j.value("delta1", d.delta1);
    d.delta2 = j.value("delta2", d.delta2);
    d.rho = j.value("rho", d.rho);
    d.a = j.value("a", d.a);
    d.n1 = j.value("n1", d.n1);
    d.n2 = j.value("n2", d.n2);
    d.n = j.value("n", d.n);
    d.tau = j.value("tau", d.tau);
    d.grid_size = j.value("grid_size", d.grid_size);
    d.nodes = j.value("nodes", d.nodes);
    d.eta = j.value("eta", d.eta);
    d.eta1 = j.value("eta1", d.eta1);
    d.eta2 = j.value("eta2", d.eta2);
    d.null_grid = j.value("null_grid", d.null_grid);
    d.null_reps = j.value("null_reps", d.null_reps);
    d.null_seed = j.value("null_seed", d.null_seed);
    if (j.contains("null_cache_dir"))
        d.null_cache_dir =
            std::filesystem::path(j["null_cache_dir"].get<std::string>());

    if (d.kind == ExperimentKind::wbs) {
        const json& mc = j.at("multicp");
        const std::string model = mc.value("model", std::string("gaussian_dist"));
        const MultiCpModel m = model == "covariance_matrix"
                                   ? MultiCpModel::covariance_matrix
                                   : MultiCpModel::gaussian_dist;
        if (model != "gaussian_dist" && model != "covariance_matrix")
            throw std::runtime_error("unknown multicp model '" + model + "'");
        d.multicp = MultiCpSpec::for_case(
            m, mc.value("case", 1), mc.value("rho", 0.0),
            mc.value("seed", std::uint64_t{1}));
        d.multicp.grid_size = mc.value("grid_size", d.multicp.grid_size);
        if (j.contains("wbs")) {
            const json& wb = j["wbs"];
            d.wbs.num_intervals = wb.value("intervals", d.wbs.num_intervals);
            d.wbs.calib_reps = wb.value("calib_reps", d.wbs.calib_reps);
            d.wbs.min_len = wb.value("min_len", d.wbs.min_len);
            d.wbs.eta1 = wb.value("eta1", d.wbs.eta1);
            d.wbs.eta2 = wb.value("eta2", d.wbs.eta2);
            d.wbs.quantile = wb.value("quantile", d.wbs.quantile);
            d.wbs.seed = wb.value("seed", d.wbs.seed);
        }
    }
    return d;
}

int run_experiment(const ExperimentArgs& args) {
    std::ifstream in(args.config);
    if (!in)
        throw std::runtime_error("cannot open experiment config: " +
                                 args.config);
    json doc;
    try {
        in >> doc;
    } catch (const std::exception& e) {
        throw std::runtime_error("invalid experiment config JSON: " +
                                 std::string(e.what()));
    }

    std::vector<json> design_docs;
    if (doc.contains("designs"))
        design_docs.assign(doc["designs"].begin(), doc["designs"].end());
    else
        design_docs.push_back(doc);

    std::ostringstream csv;
    csv << "design,kind,dgp,model,case,n1,n2,n,tau,rho,a,delta1,delta2,"
           "replications,alpha,rate_d1,rate_d2,se_d1,se_d2,degenerate_d1,"
           "degenerate_d2,mean_ari,correct_count_rate,threshold\n";
    std::ostringstream stats;
    stats << "design,rep,stat_1,stat_2,tau_hat_1,tau_hat_2,ari,detected\n";

    for (std::size_t idx = 0; idx < design_docs.size(); ++idx) {
        const json& dj = design_docs[idx];
        const ExperimentDesign design = design_from_json(dj);
        int replications = args.replications_override > 0
                               ? args.replications_override
                               : dj.value("replications",
                                          doc.value("replications", 500));
        double alpha = args.alpha_override > 0.0
                           ? args.alpha_override
                           : dj.value("alpha", doc.value("alpha", 0.05));
        std::uint64_t seed =
            args.has_seed_override
                ? args.seed_override
                : dj.value("seed", doc.value("seed", std::uint64_t{1}));

        const ExperimentResult res =
            size_power_experiment(design, replications, alpha, seed);

        csv << idx << "," << experiment_kind_name(design.kind) << ",";
        if (design.kind == ExperimentKind::wbs) {
            csv << (design.multicp.model == MultiCpModel::gaussian_dist
                        ? "gaussian_dist"
                        : "covariance_matrix")
                << "," << "multicp" << "," << design.multicp.case_id << ",,,"
                << design.multicp.n << ",," << fmt(design.multicp.rho)
                << ",,,," << replications << "," << fmt(alpha) << ",,,,,,,"
                << fmt(res.mean_ari) << "," << fmt(res.correct_count_rate)
                << "," << fmt(res.wbs_threshold_value) << "\n";
        } else {
            const bool ts = design.kind == ExperimentKind::two_sample;
            csv << dgp_kind_name(design.dgp) << ",,,";
            if (ts)
                csv << design.n1 << "," << design.n2 << ",,,";
            else
                csv << ",," << design.n << "," << fmt(design.tau) << ",";
            csv << fmt(design.rho) << "," << (ts ? fmt(design.a) : "") << ","
                << fmt(design.delta1) << "," << fmt(design.delta2) << ","
                << replications << "," << fmt(alpha) << ","
                << fmt(res.reject_rate[0]) << "," << fmt(res.reject_rate[1])
                << "," << fmt(res.std_error[0]) << "," << fmt(res.std_error[1])
                << "," << res.degenerate_count[0] << ","
                << res.degenerate_count[1] << ",,,\n";
        }

        if (!args.stats_csv.empty()) {
            for (int r = 0; r < replications; ++r) {
                stats << idx << "," << r << ",";
                if (design.kind == ExperimentKind::wbs) {
                    stats << ",,,," << fmt(res.aris[r]) << ","
                          << res.detected_counts[r] << "\n";
                } else {
                    stats << fmt(res.statistics[0][r]) << ","
                          << fmt(res.statistics[1][r]) << ",";
                    if (design.kind == ExperimentKind::change_point)
                        stats << fmt(res.tau_hat[0][r]) << ","
                              << fmt(res.tau_hat[1][r]);
                    else
                        stats << ",";
                    stats << ",,\n";
                }
            }
        }
    }

    write_text(args.out, csv.str());
    if (!args.stats_csv.empty()) write_text(args.stats_csv, stats.str());
    return kExitOk;
}

// ---------------------------------------------------------------------------
// pairwise-matrix
// ---------------------------------------------------------------------------

struct PairwiseArgs {
    std::vector<std::string> samples;
    HintOptions hints;
    double eta = 0.15;
    std::string variant = "d2";
    NullOptions null_opts;
    std::string out = "-";
};

int run_pairwise(const PairwiseArgs& args) {
    const SeriesParseHints hints = args.hints.to_hints();
    std::vector<ObjectSeries> samples;
    samples.reserve(args.samples.size());
    for (const std::string& path : args.samples)
        samples.push_back(parse_series(path, hints));

    const TwoSampleVariant variant =
        args.variant == "d1" ? TwoSampleVariant::d1 : TwoSampleVariant::d2;
    if (args.variant != "d1" && args.variant != "d2")
        throw std::runtime_error("unknown variant '" + args.variant +
                                 "' (expected d1 or d2)");
    const NullSampleSet null_set = obtain_null(
        NullSpec::make_deta(args.eta, args.null_opts.grid, args.null_opts.reps,
                            args.null_opts.seed),
        args.null_opts.cache());

    const Eigen::MatrixXd p =
        pairwise_pvalue_matrix(samples, args.eta, variant, null_set);
    std::ostringstream csv;
    csv << "sample";
    for (const std::string& path : args.samples) csv << "," << path;
    csv << "\n";
    for (int i = 0; i < p.rows(); ++i) {
        csv << args.samples[i];
        for (int j = 0; j < p.cols(); ++j) csv << "," << fmt(p(i, j));
        csv << "\n";
    }
    write_text(args.out, csv.str());
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "self-normalized two-sample and change-point inference for "
        "object-valued time series"};
    app.require_subcommand(1);
    app.set_config("--config", "",
                   "read option defaults from a config file "
                   "(command-line flags win)");

    int rc = kExitOk;

    TwoSampleArgs ts;
    {
        CLI::App* cmd = app.add_subcommand(
            "two-sample", "test whether two object samples share one law");
        cmd->add_option("--sample1", ts.sample1, "first sample file")
            ->required();
        cmd->add_option("--sample2", ts.sample2, "second sample file")
            ->required();
        add_hint_options(cmd, ts.hints);
        cmd->add_option("--eta", ts.eta, "trimming fraction")
            ->capture_default_str();
        cmd->add_option("--alpha", ts.alpha, "significance level")
            ->capture_default_str();
        cmd->add_option("--variant", ts.variant, "d1, d2, or both")
            ->capture_default_str();
        add_null_options(cmd, ts.null_opts);
        cmd->add_option("--report", ts.report, "report path (default stdout)");
        cmd->add_option("--profile-csv", ts.profile_csv,
                        "write the contrast profiles as CSV");
        cmd->callback([&]() { rc = run_two_sample(ts); });
    }

    NSampleArgs ns;
    {
        CLI::App* cmd = app.add_subcommand(
            "n-sample", "pooled statistics across several object samples");
        cmd->add_option("--samples", ns.samples, "sample files (two or more)")
            ->required()
            ->expected(2, std::numeric_limits<int>::max());
        add_hint_options(cmd, ns.hints);
        cmd->add_option("--eta", ns.eta, "trimming fraction")
            ->capture_default_str();
        cmd->add_option("--alpha", ns.alpha, "significance level")
            ->capture_default_str();
        add_null_options(cmd, ns.null_opts);
        cmd->add_option("--report", ns.report, "report path (default stdout)");
        cmd->callback([&]() { rc = run_n_sample(ns); });
    }

    CpTestArgs cp;
    {
        CLI::App* cmd = app.add_subcommand(
            "cp-test", "test for a single change point in an object series");
        cmd->add_option("--series", cp.series, "series file")->required();
        add_hint_options(cmd, cp.hints);
        cmd->add_option("--eta1", cp.eta1, "outer trimming fraction")
            ->capture_default_str();
        cmd->add_option("--eta2", cp.eta2, "normalizer trimming fraction")
            ->capture_default_str();
        cmd->add_option("--alpha", cp.alpha, "significance level")
            ->capture_default_str();
        cmd->add_option("--variant", cp.variant, "sn1, sn2, or both")
            ->capture_default_str();
        add_null_options(cmd, cp.null_opts);
        cmd->add_option("--report", cp.report, "report path (default stdout)");
        cmd->add_option("--curve-csv", cp.curve_csv,
                        "write both contrast curves as CSV");
        cmd->callback([&]() { rc = run_cp_test(cp); });
    }

    WbsArgs wbs;
    {
        CLI::App* cmd = app.add_subcommand(
            "wbs", "detect multiple change points by wild binary segmentation");
        cmd->add_option("--series", wbs.series, "series file")->required();
        add_hint_options(cmd, wbs.hints);
        cmd->add_option("--intervals", wbs.cfg.num_intervals,
                        "number of random intervals")
            ->capture_default_str();
        cmd->add_option("--calib-reps", wbs.cfg.calib_reps,
                        "Gaussian calibration replicates")
            ->capture_default_str();
        cmd->add_option("--min-len", wbs.cfg.min_len,
                        "minimum interval/segment length")
            ->capture_default_str();
        cmd->add_option("--eta1", wbs.cfg.eta1, "outer trimming fraction")
            ->capture_default_str();
        cmd->add_option("--eta2", wbs.cfg.eta2, "normalizer trimming fraction")
            ->capture_default_str();
        cmd->add_option("--quantile", wbs.cfg.quantile,
                        "calibration quantile used as threshold")
            ->capture_default_str();
        cmd->add_option("--seed", wbs.cfg.seed, "calibration seed")
            ->capture_default_str();
        cmd->add_option("--report", wbs.report, "report path (default stdout)");
        cmd->callback([&]() { rc = run_wbs(wbs); });
    }

    SimulateNullArgs sn;
    {
        CLI::App* cmd = app.add_subcommand(
            "simulate-null",
            "simulate a reference distribution and report critical values");
        cmd->add_option("--family", sn.family, "deta or seta")
            ->capture_default_str();
        cmd->add_option("--eta", sn.eta, "trimming fraction (deta)")
            ->capture_default_str();
        cmd->add_option("--eta1", sn.eta1, "outer trimming fraction (seta)")
            ->capture_default_str();
        cmd->add_option("--eta2", sn.eta2, "normalizer trimming fraction (seta)")
            ->capture_default_str();
        add_null_options(cmd, sn.null_opts);
        cmd->add_option("--levels", sn.levels,
                        "quantile levels to report")
            ->expected(1, std::numeric_limits<int>::max());
        cmd->add_option("--report", sn.report, "report path (default stdout)");
        cmd->callback([&]() { rc = run_simulate_null(sn); });
    }

    ExperimentArgs ex;
    {
        CLI::App* cmd = app.add_subcommand(
            "experiment", "run Monte Carlo experiments from a JSON config");
        cmd->add_option("--config-file", ex.config,
                        "experiment design file (JSON)")
            ->required();
        cmd->add_option("--out", ex.out, "summary CSV path (default stdout)");
        cmd->add_option("--stats-csv", ex.stats_csv,
                        "per-replication statistics CSV path");
        cmd->add_option("--replications", ex.replications_override,
                        "override the configured replication count");
        cmd->add_option("--alpha", ex.alpha_override,
                        "override the configured significance level");
        auto* seed_opt = cmd->add_option("--seed", ex.seed_override,
                                         "override the configured seed");
        cmd->callback([&, seed_opt]() {
            ex.has_seed_override = seed_opt->count() > 0;
            rc = run_experiment(ex);
        });
    }

    PairwiseArgs pw;
    {
        CLI::App* cmd = app.add_subcommand(
            "pairwise-matrix",
            "p-value matrix of pairwise two-sample tests");
        cmd->add_option("--samples", pw.samples, "sample files (two or more)")
            ->required()
            ->expected(2, std::numeric_limits<int>::max());
        add_hint_options(cmd, pw.hints);
        cmd->add_option("--eta", pw.eta, "trimming fraction")
            ->capture_default_str();
        cmd->add_option("--variant", pw.variant, "d1 or d2")
            ->capture_default_str();
        add_null_options(cmd, pw.null_opts);
        cmd->add_option("--out", pw.out, "matrix CSV path (default stdout)");
        cmd->callback([&]() { rc = run_pairwise(pw); });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitError;
    }
    return rc;
}
