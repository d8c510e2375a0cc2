#pragma once

// Simulated limiting null distributions for the self-normalized statistics.
//
// Two families are tabulated from standardized Gaussian partial-sum paths
// (B(j/G) = G^{-1/2} sum_{t<=j} Z_t):
//
//   deta  — B(1)^2 / integral_eta^1 (B(r) - r B(1))^2 dr,
//           the two-sample null;
//   seta  — sup over r in [eta1, 1-eta1] of (B(r) - r B(1))^2 / V(r),
//           the change-point null, where V(r) integrates squared forward and
//           backward bridge residuals over [eta2, r-eta2] and
//           [r+eta2, 1-eta2].
//
// Integrals are left-endpoint Riemann sums on the path grid.  Draw sets are
// sorted, carry full provenance, and can be cached on disk (text format,
// atomic write) keyed by family, parameters, grid, replications, and seed.

#include "objsn/rng.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace objsn {

enum class NullFamily { deta, seta };

const char* null_family_name(NullFamily family);

struct NullSpec {
    NullFamily family = NullFamily::deta;
    double eta = 0.0;          // deta only
    double eta1 = 0.0, eta2 = 0.0; // seta only
    int grid = 5000;
    int reps = 10000;
    std::uint64_t seed = 1;

    static NullSpec make_deta(double eta, int grid = 5000, int reps = 10000,
                              std::uint64_t seed = 1);
    static NullSpec make_seta(double eta1, double eta2, int grid = 5000,
                              int reps = 10000, std::uint64_t seed = 1);
    void validate() const;
};

class NullSampleSet {
  public:
    NullSampleSet(NullSpec spec, std::vector<double> sorted_draws,
                  long redraws, std::string source);

    const NullSpec& spec() const { return spec_; }
    const std::vector<double>& draws() const { return draws_; }
    // Number of degenerate-denominator paths that were redrawn.
    long redraws() const { return redraws_; }
    // "simulated" or "cache:<filename>".
    const std::string& source() const { return source_; }

    // Right-continuous empirical quantile: the ceil(q*R)-th order statistic.
    double quantile(double q) const;
    // Right-tail p-value with finite-sample correction (#{>= x}+1)/(R+1).
    double pvalue(double x) const;

  private:
    NullSpec spec_;
    std::vector<double> draws_;
    long redraws_ = 0;
    std::string source_;
};

struct CriticalValueTable {
    NullSpec spec;
    // (alpha, critical value) rows; quantiles nonincreasing in alpha.
    std::vector<std::pair<double, double>> rows;
};

CriticalValueTable critical_value_table(const NullSampleSet& set,
                                        const std::vector<double>& alphas);

// Path of B(j/G) for j = 1..G.
std::vector<double> simulate_brownian_path(int grid, Rng& rng);

// Single-path functionals; return +infinity when every admissible
// denominator falls below 1e-300 (caller redraws).
double deta_functional(const std::vector<double>& path, double eta);
double seta_functional(const std::vector<double>& path, double eta1, double eta2);

// Monte Carlo simulation with one derived seed per replication.
NullSampleSet simulate_null(const NullSpec& spec);

// Disk cache.  Filename is derived from the spec; loading verifies that the
// file's header matches the requested spec and throws on mismatch.
std::string cache_filename(const NullSpec& spec);
std::filesystem::path cache_store(const NullSampleSet& set,
                                  const std::filesystem::path& dir);
std::optional<NullSampleSet> cache_load(const NullSpec& spec,
                                        const std::filesystem::path& dir);
// Reads a cache file without knowing the spec in advance.
NullSampleSet read_null_cache(const std::filesystem::path& file);

// Cache hit, else simulate (and store when dir is provided).
NullSampleSet obtain_null(const NullSpec& spec,
                          const std::optional<std::filesystem::path>& cache_dir);

} // namespace objsn
