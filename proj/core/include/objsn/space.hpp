#pragma once

// Metric spaces of random objects and their Hilbert embeddings.
//
// Supported spaces: scalars, square-integrable functions on a fixed grid,
// one-dimensional distributions represented by quantile functions on the
// midpoint grid p_j = (j-1/2)/M (2-Wasserstein metric), symmetric matrices
// under the Frobenius metric, SPD matrices under the log-Euclidean metric,
// and graph Laplacians under the Frobenius metric.
//
// Every supported metric embeds isometrically into a weighted Euclidean
// space: d(x,y)^2 == weight * |embed(x) - embed(y)|^2.  Quantile/function
// values embed as themselves with weight 1/M (midpoint quadrature); matrix
// kinds embed entry-wise with weight 1; SPD matrices embed via the matrix
// logarithm.  The Frechet mean is unembed(mean of embeddings) in all cases.

#include <Eigen/Core>

#include <vector>

namespace objsn {

enum class SpaceKind {
    scalar,            // real line, absolute distance
    l2_function,       // functions tabulated on M grid cells, L2 distance
    wasserstein_1d,    // distributions as quantile values on M grid cells
    frobenius_matrix,  // symmetric p x p matrices, Frobenius distance
    log_euclidean_spd, // SPD p x p matrices, Frobenius distance between logs
    graph_laplacian,   // weighted-graph Laplacians, Frobenius distance
};

const char* space_kind_name(SpaceKind kind);

struct SpaceDescriptor {
    SpaceKind kind = SpaceKind::scalar;
    int grid_size = 0;        // M, grid kinds only
    int matrix_dim = 0;       // p, matrix kinds only
    double spd_floor = 1e-10; // smallest admissible eigenvalue, SPD kind only

    static SpaceDescriptor scalar();
    static SpaceDescriptor l2_function(int grid_size);
    static SpaceDescriptor wasserstein(int grid_size);
    static SpaceDescriptor frobenius(int matrix_dim);
    static SpaceDescriptor log_euclidean(int matrix_dim, double spd_floor = 1e-10);
    static SpaceDescriptor laplacian(int matrix_dim);

    bool is_grid_kind() const;   // payload is a vector of values
    bool is_matrix_kind() const; // payload is a symmetric matrix
    int embedding_dim() const;   // 1, M, or p*p
    // w such that d^2 = w * |embed difference|^2 (1/M for grid kinds, else 1).
    double quadrature_weight() const;
    // Throws std::invalid_argument when sizes are inconsistent with the kind.
    void validate() const;

    bool operator==(const SpaceDescriptor&) const = default;
};

// A point of a metric space together with its descriptor.  Grid kinds store a
// value vector, matrix kinds a symmetric matrix.  Factories validate the
// space invariants (monotone quantiles, symmetry, Laplacian structure,
// eigenvalue floor) and throw std::invalid_argument / std::domain_error on
// violation.
class MetricObject {
  public:
    MetricObject() = default;

    static MetricObject scalar(double value);
    // scalar/l2_function/wasserstein_1d payloads
    static MetricObject from_values(const SpaceDescriptor& desc,
                                    Eigen::VectorXd values);
    // frobenius/log_euclidean/laplacian payloads
    static MetricObject from_matrix(const SpaceDescriptor& desc,
                                    const Eigen::MatrixXd& matrix);

    const SpaceDescriptor& descriptor() const { return desc_; }
    // Grid kinds: the value vector.  Matrix kinds: entries in row-major order.
    const Eigen::VectorXd& values() const { return values_; }
    // Matrix view of the payload (matrix kinds only).
    Eigen::MatrixXd matrix() const;

  private:
    SpaceDescriptor desc_;
    Eigen::VectorXd values_;
};

struct EmbeddedVector {
    Eigen::VectorXd coords;
    double weight = 1.0;
};

// Isometric embedding: identity on grid values and matrix entries, matrix
// logarithm for the SPD kind (throws std::domain_error when an eigenvalue
// falls below spd_floor).
EmbeddedVector embed(const MetricObject& x);

// Inverse of embed with projection back onto the valid set: quantile vectors
// are sorted when monotonicity is violated by more than 1e-12, SPD
// coordinates pass through the matrix exponential, Laplacians are
// symmetrized and their diagonals recentered so rows sum to zero.
MetricObject unembed(const SpaceDescriptor& desc, const Eigen::VectorXd& coords);

double distance_squared(const MetricObject& x, const MetricObject& y);
double distance(const MetricObject& x, const MetricObject& y);

// Weighted Frechet mean: unembed of the weighted mean of embeddings, which
// attains the minimum of sum_t w_t d^2(Y_t, .) in every supported space.
MetricObject frechet_mean(const std::vector<MetricObject>& objects);
MetricObject frechet_mean(const std::vector<MetricObject>& objects,
                          const std::vector<double>& weights);

// Mean squared distance to `center` (the Frechet variance when `center` is
// the Frechet mean).
double frechet_variance(const std::vector<MetricObject>& objects,
                        const MetricObject& center);

// Midpoint probability grid p_j = (j - 1/2) / M, j = 1..M.
Eigen::VectorXd midpoint_grid(int grid_size);

// Quantile values of N(mean, sd^2) on the midpoint grid.
Eigen::VectorXd gaussian_quantiles(int grid_size, double mean, double sd);

// Symmetric matrix log / exp via eigendecomposition (shared with series_io).
Eigen::MatrixXd sym_matrix_log(const Eigen::MatrixXd& m, double eig_floor);
Eigen::MatrixXd sym_matrix_exp(const Eigen::MatrixXd& m);

} // namespace objsn
