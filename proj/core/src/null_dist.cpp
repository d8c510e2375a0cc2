#include "objsn/null_dist.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include <unistd.h>

namespace objsn {

namespace {

constexpr double kDenomFloor = 1e-300;
constexpr int kMaxRedrawsPerDraw = 100;

void fail(const std::string& msg) { throw std::runtime_error(msg); }

std::string format_param(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

std::string format_full(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace

const char* null_family_name(NullFamily family) {
    return family == NullFamily::deta ? "deta" : "seta";
}

NullSpec NullSpec::make_deta(double eta, int grid, int reps,
                             std::uint64_t seed) {
    NullSpec s;
    s.family = NullFamily::deta;
    s.eta = eta;
    s.grid = grid;
    s.reps = reps;
    s.seed = seed;
    s.validate();
    return s;
}

NullSpec NullSpec::make_seta(double eta1, double eta2, int grid, int reps,
                             std::uint64_t seed) {
    NullSpec s;
    s.family = NullFamily::seta;
    s.eta1 = eta1;
    s.eta2 = eta2;
    s.grid = grid;
    s.reps = reps;
    s.seed = seed;
    s.validate();
    return s;
}

void NullSpec::validate() const {
    if (grid < 100) throw std::invalid_argument("NullSpec: grid must be >= 100");
    if (reps < 1) throw std::invalid_argument("NullSpec: reps must be >= 1");
    if (family == NullFamily::deta) {
        if (!(eta > 0.0 && eta < 1.0))
            throw std::invalid_argument("NullSpec: eta must lie in (0,1)");
    } else {
        if (!(eta1 > 0.0 && eta1 < 0.5))
            throw std::invalid_argument("NullSpec: eta1 must lie in (0,1/2)");
        if (!(eta2 > 0.0 && eta1 > 2.0 * eta2))
            throw std::invalid_argument(
                "NullSpec: need eta2 > 0 and eta1 > 2*eta2");
    }
}

NullSampleSet::NullSampleSet(NullSpec spec, std::vector<double> sorted_draws,
                             long redraws, std::string source)
    : spec_(spec), draws_(std::move(sorted_draws)), redraws_(redraws),
      source_(std::move(source)) {
    if (static_cast<int>(draws_.size()) != spec_.reps)
        throw std::invalid_argument("NullSampleSet: draw count != reps");
    for (std::size_t i = 0; i < draws_.size(); ++i) {
        if (!std::isfinite(draws_[i]) || draws_[i] < 0.0)
            throw std::invalid_argument("NullSampleSet: invalid draw value");
        if (i > 0 && draws_[i] < draws_[i - 1])
            throw std::invalid_argument("NullSampleSet: draws not sorted");
    }
}

double NullSampleSet::quantile(double q) const {
    if (!(q >= 0.0 && q <= 1.0))
        throw std::invalid_argument("quantile level must lie in [0,1]");
    const auto r = static_cast<long>(draws_.size());
    long idx = static_cast<long>(std::ceil(q * static_cast<double>(r)));
    idx = std::clamp(idx, 1l, r);
    return draws_[idx - 1];
}

double NullSampleSet::pvalue(double x) const {
    const auto first_ge = std::lower_bound(draws_.begin(), draws_.end(), x);
    const auto count_ge = static_cast<double>(draws_.end() - first_ge);
    return (count_ge + 1.0) / (static_cast<double>(draws_.size()) + 1.0);
}

CriticalValueTable critical_value_table(const NullSampleSet& set,
                                        const std::vector<double>& alphas) {
    CriticalValueTable table;
    table.spec = set.spec();
    for (double a : alphas) {
        if (!(a > 0.0 && a < 1.0))
            throw std::invalid_argument("alpha must lie in (0,1)");
        table.rows.emplace_back(a, set.quantile(1.0 - a));
    }
    return table;
}

std::vector<double> simulate_brownian_path(int grid, Rng& rng) {
    std::vector<double> path(grid);
    const double scale = 1.0 / std::sqrt(static_cast<double>(grid));
    double sum = 0.0;
    for (int j = 0; j < grid; ++j) {
        sum += rng.normal();
        path[j] = sum * scale;
    }
    return path;
}

double deta_functional(const std::vector<double>& path, double eta) {
    const int g = static_cast<int>(path.size());
    const double b1 = path[g - 1];
    const int k0 = std::max(1, static_cast<int>(std::floor(g * eta)));
    double acc = 0.0;
    for (int j = k0; j <= g; ++j) {
        const double bridge = path[j - 1] - (static_cast<double>(j) / g) * b1;
        acc += bridge * bridge;
    }
    const double denom = acc / g;
    if (denom < kDenomFloor) return std::numeric_limits<double>::infinity();
    return b1 * b1 / denom;
}

double seta_functional(const std::vector<double>& path, double eta1,
                       double eta2) {
    const int g = static_cast<int>(path.size());
    const double b1 = path[g - 1];
    const int k1 = std::max(1, static_cast<int>(std::floor(g * eta1)));
    const int k2 = std::max(1, static_cast<int>(std::floor(g * eta2)));

    // Prefix sums making each V(r) O(1): the left integrand is
    // (b_l - (l/k) b_k)^2 and the right integrand is affine in (b_l, l),
    // so both expand over sums of b_l, b_l^2, l*b_l (l-moments are closed
    // form).
    std::vector<double> pb(g + 1, 0.0), pb2(g + 1, 0.0), plb(g + 1, 0.0);
    for (int l = 1; l <= g; ++l) {
        const double b = path[l - 1];
        pb[l] = pb[l - 1] + b;
        pb2[l] = pb2[l - 1] + b * b;
        plb[l] = plb[l - 1] + static_cast<double>(l) * b;
    }
    auto sum_l = [](long lo, long hi) {
        return 0.5 * static_cast<double>(hi * (hi + 1) - (lo - 1) * lo);
    };
    auto sum_l2 = [](long lo, long hi) {
        auto f = [](long m) {
            return static_cast<double>(m) * (m + 1) * (2 * m + 1) / 6.0;
        };
        return f(hi) - f(lo - 1);
    };

    double best = -1.0;
    for (int k = k1; k <= g - k1; ++k) {
        const double bk = path[k - 1];
        const double bridge = bk - (static_cast<double>(k) / g) * b1;
        double v = 0.0;
        {
            const int lo = k2, hi = k - k2;
            if (lo <= hi) {
                const double s = bk / k;
                v += (pb2[hi] - pb2[lo - 1]) - 2.0 * s * (plb[hi] - plb[lo - 1]) +
                     s * s * sum_l2(lo, hi);
            }
        }
        {
            const int lo = k + k2, hi = g - k2;
            if (lo <= hi) {
                const double c = (b1 - bk) / (1.0 - static_cast<double>(k) / g);
                const double a = b1 - c;
                const double d = c / g;
                const double cnt = hi - lo + 1;
                v += cnt * a * a + (pb2[hi] - pb2[lo - 1]) +
                     d * d * sum_l2(lo, hi) - 2.0 * a * (pb[hi] - pb[lo - 1]) +
                     2.0 * a * d * sum_l(lo, hi) - 2.0 * d * (plb[hi] - plb[lo - 1]);
            }
        }
        v /= g;
        if (v < kDenomFloor) continue;
        best = std::max(best, bridge * bridge / v);
    }
    if (best < 0.0) return std::numeric_limits<double>::infinity();
    return best;
}

NullSampleSet simulate_null(const NullSpec& spec) {
    spec.validate();
    std::vector<double> draws(spec.reps);
    long redraws = 0;
    for (int r = 0; r < spec.reps; ++r) {
        Rng rng(derive_seed(spec.seed, static_cast<std::uint64_t>(r)));
        double value = std::numeric_limits<double>::infinity();
        for (int attempt = 0; attempt < kMaxRedrawsPerDraw; ++attempt) {
            const std::vector<double> path = simulate_brownian_path(spec.grid, rng);
            value = spec.family == NullFamily::deta
                        ? deta_functional(path, spec.eta)
                        : seta_functional(path, spec.eta1, spec.eta2);
            if (std::isfinite(value)) break;
            ++redraws;
        }
        if (!std::isfinite(value))
            fail("simulate_null: persistent degenerate denominator");
        draws[r] = value;
    }
    std::sort(draws.begin(), draws.end());
    return NullSampleSet(spec, std::move(draws), redraws, "simulated");
}

std::string cache_filename(const NullSpec& spec) {
    std::ostringstream os;
    os << null_family_name(spec.family) << "_";
    if (spec.family == NullFamily::deta)
        os << format_param(spec.eta);
    else
        os << format_param(spec.eta1) << "_" << format_param(spec.eta2);
    os << "_g" << spec.grid << "_r" << spec.reps << "_s" << spec.seed
       << ".nullcache";
    return os.str();
}

std::filesystem::path cache_store(const NullSampleSet& set,
                                  const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    const std::filesystem::path final_path = dir / cache_filename(set.spec());
    const std::filesystem::path tmp_path =
        final_path.string() + ".tmp." + std::to_string(::getpid());

    {
        std::ofstream out(tmp_path);
        if (!out) fail("cache_store: cannot open " + tmp_path.string());
        const NullSpec& s = set.spec();
        out << "objsn-null 1\n";
        out << "family " << null_family_name(s.family) << "\n";
        if (s.family == NullFamily::deta) {
            out << "eta " << format_full(s.eta) << "\n";
        } else {
            out << "eta1 " << format_full(s.eta1) << "\n";
            out << "eta2 " << format_full(s.eta2) << "\n";
        }
        out << "grid " << s.grid << "\n";
        out << "reps " << s.reps << "\n";
        out << "seed " << s.seed << "\n";
        out << "redraws " << set.redraws() << "\n";
        out << "count " << set.draws().size() << "\n";
        for (double d : set.draws()) out << format_full(d) << "\n";
        if (!out) fail("cache_store: write failed for " + tmp_path.string());
    }
    std::filesystem::rename(tmp_path, final_path);
    return final_path;
}

NullSampleSet read_null_cache(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) fail("null cache: cannot open " + file.string());
    const std::string where = " in " + file.string();

    std::string magic;
    int version = 0;
    if (!(in >> magic >> version) || magic != "objsn-null")
        fail("null cache: bad magic" + where);
    if (version != 1) fail("null cache: unsupported version" + where);

    NullSpec spec;
    long redraws = 0;
    long count = -1;
    bool have_eta = false, have_eta1 = false, have_eta2 = false;
    std::string key;
    while (in >> key) {
        if (key == "family") {
            std::string fam;
            in >> fam;
            if (fam == "deta") spec.family = NullFamily::deta;
            else if (fam == "seta") spec.family = NullFamily::seta;
            else fail("null cache: unknown family '" + fam + "'" + where);
        } else if (key == "eta") {
            in >> spec.eta; have_eta = true;
        } else if (key == "eta1") {
            in >> spec.eta1; have_eta1 = true;
        } else if (key == "eta2") {
            in >> spec.eta2; have_eta2 = true;
        } else if (key == "grid") {
            in >> spec.grid;
        } else if (key == "reps") {
            in >> spec.reps;
        } else if (key == "seed") {
            in >> spec.seed;
        } else if (key == "redraws") {
            in >> redraws;
        } else if (key == "count") {
            in >> count;
            break;
        } else {
            fail("null cache: unknown header key '" + key + "'" + where);
        }
        if (!in) fail("null cache: truncated header" + where);
    }
    if (count < 0) fail("null cache: missing count" + where);
    if (spec.family == NullFamily::deta ? !have_eta : !(have_eta1 && have_eta2))
        fail("null cache: missing parameters" + where);
    spec.validate();
    if (count != spec.reps) fail("null cache: count/reps mismatch" + where);

    std::vector<double> draws(count);
    for (long i = 0; i < count; ++i)
        if (!(in >> draws[i])) fail("null cache: truncated draws" + where);
    return NullSampleSet(spec, std::move(draws), redraws,
                         "cache:" + file.filename().string());
}

namespace {

bool specs_match(const NullSpec& a, const NullSpec& b) {
    return a.family == b.family && a.eta == b.eta && a.eta1 == b.eta1 &&
           a.eta2 == b.eta2 && a.grid == b.grid && a.reps == b.reps &&
           a.seed == b.seed;
}

} // namespace

std::optional<NullSampleSet> cache_load(const NullSpec& spec,
                                        const std::filesystem::path& dir) {
    spec.validate();
    const std::filesystem::path file = dir / cache_filename(spec);
    if (!std::filesystem::exists(file)) return std::nullopt;
    NullSampleSet set = read_null_cache(file);
    if (!specs_match(set.spec(), spec))
        fail("null cache: header of " + file.string() +
             " does not match the requested parameters");
    return set;
}

NullSampleSet obtain_null(const NullSpec& spec,
                          const std::optional<std::filesystem::path>& cache_dir) {
    if (cache_dir) {
        if (auto cached = cache_load(spec, *cache_dir)) return *std::move(cached);
        NullSampleSet set = simulate_null(spec);
        cache_store(set, *cache_dir);
        return set;
    }
    return simulate_null(spec);
}

} // namespace objsn
