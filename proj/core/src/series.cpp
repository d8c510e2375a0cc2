#include "objsn/series.hpp"

#include <cmath>
#include <stdexcept>

namespace objsn {

ObjectSeries ObjectSeries::from_objects(std::vector<MetricObject> objects) {
    if (objects.empty())
        throw std::invalid_argument("ObjectSeries: empty object list");
    const SpaceDescriptor desc = objects.front().descriptor();
    for (const MetricObject& obj : objects)
        if (!(obj.descriptor() == desc))
            throw std::invalid_argument("ObjectSeries: descriptor mismatch");
    return ObjectSeries{desc, std::move(objects)};
}

PrefixStats::PrefixStats(const ObjectSeries& series) {
    if (series.objects.empty())
        throw std::invalid_argument("PrefixStats: empty series");
    desc_ = series.descriptor;
    weight_ = desc_.quadrature_weight();
    n_ = series.size();
    const int dim = desc_.embedding_dim();

    std::vector<Eigen::VectorXd> emb;
    emb.reserve(n_);
    center_ = Eigen::VectorXd::Zero(dim);
    for (const MetricObject& obj : series.objects) {
        if (!(obj.descriptor() == desc_))
            throw std::invalid_argument("PrefixStats: descriptor mismatch");
        emb.push_back(embed(obj).coords);
        center_ += emb.back();
    }
    center_ /= static_cast<double>(n_);

    // Kahan-compensated running sums: downstream O(n^2) scans amplify any
    // construction-time rounding, so pay the 4x flops once here.
    prefix_.setZero(n_ + 1, dim);
    sq_prefix_.assign(n_ + 1, 0.0);
    Eigen::VectorXd sum = Eigen::VectorXd::Zero(dim);
    Eigen::VectorXd comp = Eigen::VectorXd::Zero(dim);
    double sq_sum = 0.0, sq_comp = 0.0;
    for (int t = 1; t <= n_; ++t) {
        const Eigen::VectorXd centered = emb[t - 1] - center_;
        for (int d = 0; d < dim; ++d) {
            const double y = centered[d] - comp[d];
            const double s = sum[d] + y;
            comp[d] = (s - sum[d]) - y;
            sum[d] = s;
        }
        const double y = centered.squaredNorm() - sq_comp;
        const double s = sq_sum + y;
        sq_comp = (s - sq_sum) - y;
        sq_sum = s;

        prefix_.row(t) = sum;
        sq_prefix_[t] = sq_sum;
    }
}

void PrefixStats::check_window(int lo, int hi) const {
    if (lo < 1 || hi > n_ || lo > hi)
        throw std::invalid_argument("PrefixStats: empty or out-of-range window");
}

Eigen::VectorXd PrefixStats::window_mean_embedded(int lo, int hi) const {
    check_window(lo, hi);
    const double m = hi - lo + 1;
    return (prefix_.row(hi) - prefix_.row(lo - 1)).transpose() / m + center_;
}

MetricObject PrefixStats::subsample_mean(int lo, int hi) const {
    return unembed(desc_, window_mean_embedded(lo, hi));
}

double PrefixStats::subsample_variance(int lo, int hi) const {
    check_window(lo, hi);
    const double m = hi - lo + 1;
    const double mean_sq = (sq_prefix_[hi] - sq_prefix_[lo - 1]) / m;
    const double mean_norm2 =
        (prefix_.row(hi) - prefix_.row(lo - 1)).squaredNorm() / (m * m);
    // Nonnegative by construction; clip the cancellation dust.
    return weight_ * std::max(0.0, mean_sq - mean_norm2);
}

double PrefixStats::contaminated_window_mean(int lo, int hi,
                                             const MetricObject& omega) const {
    if (!(omega.descriptor() == desc_))
        throw std::invalid_argument(
            "contaminated_window_mean: descriptor mismatch");
    return contaminated_window_mean(lo, hi, embed(omega).coords);
}

double PrefixStats::contaminated_window_mean(
    int lo, int hi, const Eigen::VectorXd& omega_coords) const {
    check_window(lo, hi);
    if (omega_coords.size() != desc_.embedding_dim())
        throw std::invalid_argument(
            "contaminated_window_mean: coordinate length mismatch");
    const double m = hi - lo + 1;
    const Eigen::VectorXd omega_centered = omega_coords - center_;
    const double mean_sq = (sq_prefix_[hi] - sq_prefix_[lo - 1]) / m;
    const double cross =
        (prefix_.row(hi) - prefix_.row(lo - 1)).dot(omega_centered) / m;
    return weight_ *
           std::max(0.0, mean_sq - 2.0 * cross + omega_centered.squaredNorm());
}

PrefixGram::PrefixGram(const PrefixStats& stats) {
    const auto& p = stats.centered_prefix();
    gram_.noalias() = p * p.transpose();
}

} // namespace objsn
