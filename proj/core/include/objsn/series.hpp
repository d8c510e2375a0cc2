#pragma once

// Object time series and the prefix-statistics engine.
//
// PrefixStats stores cumulative sums of object embeddings plus cumulative
// squared norms, so any window's Frechet mean, Frechet variance, and mean
// squared distance to an arbitrary reference point cost O(embedding dim).
// Internally the embeddings are centered at the global mean before summing
// (all downstream statistics are translation invariant in embedding
// coordinates, and centering suppresses cancellation in long series); public
// accessors add the center back.
//
// PrefixGram additionally tabulates inner products of all prefix-sum pairs,
// making window/window inner products O(1) — the contrast-curve scans in the
// change-point module are O(n^2) window pairs and would otherwise pay
// O(embedding dim) each.

#include "objsn/space.hpp"

#include <Eigen/Core>

#include <vector>

namespace objsn {

struct ObjectSeries {
    SpaceDescriptor descriptor;
    std::vector<MetricObject> objects;

    int size() const { return static_cast<int>(objects.size()); }

    // Validates nonemptiness and a shared descriptor.
    static ObjectSeries from_objects(std::vector<MetricObject> objects);
};

class PrefixStats {
  public:
    explicit PrefixStats(const ObjectSeries& series);

    int n() const { return n_; }
    const SpaceDescriptor& descriptor() const { return desc_; }
    double weight() const { return weight_; }

    // Windows are 1-based inclusive index ranges [lo, hi], 1 <= lo <= hi <= n.
    // Mean of embeddings over the window, in raw (uncentered) coordinates.
    Eigen::VectorXd window_mean_embedded(int lo, int hi) const;
    MetricObject subsample_mean(int lo, int hi) const;
    // Mean squared distance of window objects to their own Frechet mean.
    double subsample_variance(int lo, int hi) const;
    // Mean squared distance of window objects to an arbitrary point omega,
    // given either as an object or as raw embedding coordinates.
    double contaminated_window_mean(int lo, int hi, const MetricObject& omega) const;
    double contaminated_window_mean(int lo, int hi,
                                    const Eigen::VectorXd& omega_coords) const;

    // Centered internals used by the statistic engines and PrefixGram.
    // Row k of centered_prefix() is sum_{t<=k} (embed(Y_t) - center()).
    using RowMajorMatrix =
        Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
    const RowMajorMatrix& centered_prefix() const { return prefix_; }
    const std::vector<double>& centered_sq_prefix() const { return sq_prefix_; }
    const Eigen::VectorXd& center() const { return center_; }

  private:
    void check_window(int lo, int hi) const;

    SpaceDescriptor desc_;
    double weight_ = 1.0;
    int n_ = 0;
    Eigen::VectorXd center_;
    RowMajorMatrix prefix_;         // (n+1) x dim, row 0 = 0
    std::vector<double> sq_prefix_; // length n+1, entry 0 = 0
};

// Gram matrix of centered prefix sums: g(i,j) = <P_i, P_j> where P_k is row k
// of PrefixStats::centered_prefix().
class PrefixGram {
  public:
    explicit PrefixGram(const PrefixStats& stats);

    // <sum of centered embeddings over (a,b], same over (c,d]> in O(1);
    // cut indices satisfy 0 <= a <= b <= n, 0 <= c <= d <= n.
    double window_dot(int a, int b, int c, int d) const {
        return gram_(b, d) - gram_(b, c) - gram_(a, d) + gram_(a, c);
    }

  private:
    Eigen::MatrixXd gram_;
};

} // namespace objsn
