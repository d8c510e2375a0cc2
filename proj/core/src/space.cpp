#include "objsn/space.hpp"

#include "objsn/rng.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace objsn {

namespace {

void require(bool ok, const std::string& msg) {
    if (!ok) throw std::invalid_argument(msg);
}

// Symmetry gate used by object factories; parse-time repair of sloppier
// inputs (up to 1e-6) happens in series_io before objects are built.
constexpr double kSymmetryTol = 1e-9;
constexpr double kMonotoneTol = 1e-12;
constexpr double kRowSumTol = 1e-9;

} // namespace

const char* space_kind_name(SpaceKind kind) {
    switch (kind) {
        case SpaceKind::scalar: return "scalar";
        case SpaceKind::l2_function: return "l2_function";
        case SpaceKind::wasserstein_1d: return "wasserstein_1d";
        case SpaceKind::frobenius_matrix: return "frobenius_matrix";
        case SpaceKind::log_euclidean_spd: return "log_euclidean_spd";
        case SpaceKind::graph_laplacian: return "graph_laplacian";
    }
    return "unknown";
}

SpaceDescriptor SpaceDescriptor::scalar() {
    return {SpaceKind::scalar, 0, 0, 1e-10};
}
SpaceDescriptor SpaceDescriptor::l2_function(int grid_size) {
    SpaceDescriptor d{SpaceKind::l2_function, grid_size, 0, 1e-10};
    d.validate();
    return d;
}
SpaceDescriptor SpaceDescriptor::wasserstein(int grid_size) {
    SpaceDescriptor d{SpaceKind::wasserstein_1d, grid_size, 0, 1e-10};
    d.validate();
    return d;
}
SpaceDescriptor SpaceDescriptor::frobenius(int matrix_dim) {
    SpaceDescriptor d{SpaceKind::frobenius_matrix, 0, matrix_dim, 1e-10};
    d.validate();
    return d;
}
SpaceDescriptor SpaceDescriptor::log_euclidean(int matrix_dim, double spd_floor) {
    SpaceDescriptor d{SpaceKind::log_euclidean_spd, 0, matrix_dim, spd_floor};
    d.validate();
    return d;
}
SpaceDescriptor SpaceDescriptor::laplacian(int matrix_dim) {
    SpaceDescriptor d{SpaceKind::graph_laplacian, 0, matrix_dim, 1e-10};
    d.validate();
    return d;
}

bool SpaceDescriptor::is_grid_kind() const {
    return kind == SpaceKind::scalar || kind == SpaceKind::l2_function ||
           kind == SpaceKind::wasserstein_1d;
}

bool SpaceDescriptor::is_matrix_kind() const { return !is_grid_kind(); }

int SpaceDescriptor::embedding_dim() const {
    if (kind == SpaceKind::scalar) return 1;
    if (is_grid_kind()) return grid_size;
    return matrix_dim * matrix_dim;
}

double SpaceDescriptor::quadrature_weight() const {
    if (kind == SpaceKind::scalar) return 1.0;
    if (is_grid_kind()) return 1.0 / static_cast<double>(grid_size);
    return 1.0;
}

void SpaceDescriptor::validate() const {
    if (kind == SpaceKind::l2_function || kind == SpaceKind::wasserstein_1d)
        require(grid_size >= 2, "grid kinds need grid_size >= 2");
    if (is_matrix_kind())
        require(matrix_dim >= 1, "matrix kinds need matrix_dim >= 1");
    if (kind == SpaceKind::log_euclidean_spd)
        require(spd_floor > 0.0, "spd_floor must be positive");
}

MetricObject MetricObject::scalar(double value) {
    MetricObject o;
    o.desc_ = SpaceDescriptor::scalar();
    o.values_ = Eigen::VectorXd::Constant(1, value);
    return o;
}

MetricObject MetricObject::from_values(const SpaceDescriptor& desc,
                                       Eigen::VectorXd values) {
    desc.validate();
    require(desc.is_grid_kind(), "from_values: grid kinds only");
    require(values.size() == desc.embedding_dim(),
            "from_values: payload length does not match descriptor");
    if (desc.kind == SpaceKind::wasserstein_1d) {
        for (int j = 1; j < values.size(); ++j) {
            if (values[j] < values[j - 1] - kMonotoneTol) {
                std::ostringstream os;
                os << "quantile values decrease at position " << j << " ("
                   << values[j - 1] << " -> " << values[j] << ")";
                throw std::invalid_argument(os.str());
            }
        }
    }
    MetricObject o;
    o.desc_ = desc;
    o.values_ = std::move(values);
    return o;
}

MetricObject MetricObject::from_matrix(const SpaceDescriptor& desc,
                                       const Eigen::MatrixXd& matrix) {
    desc.validate();
    require(desc.is_matrix_kind(), "from_matrix: matrix kinds only");
    const int p = desc.matrix_dim;
    require(matrix.rows() == p && matrix.cols() == p,
            "from_matrix: matrix size does not match descriptor");

    const double asym = (matrix - matrix.transpose()).cwiseAbs().maxCoeff();
    if (asym > kSymmetryTol) {
        std::ostringstream os;
        os << "matrix not symmetric (max asymmetry " << asym << ")";
        throw std::invalid_argument(os.str());
    }
    Eigen::MatrixXd m = 0.5 * (matrix + matrix.transpose());

    if (desc.kind == SpaceKind::graph_laplacian) {
        for (int i = 0; i < p; ++i) {
            double off = 0.0;
            for (int j = 0; j < p; ++j) {
                if (j == i) continue;
                if (m(i, j) > kMonotoneTol) {
                    std::ostringstream os;
                    os << "Laplacian off-diagonal (" << i << "," << j
                       << ") is positive: " << m(i, j);
                    throw std::invalid_argument(os.str());
                }
                m(i, j) = std::min(m(i, j), 0.0);
                off += m(i, j);
            }
            if (std::fabs(m.row(i).sum()) > kRowSumTol) {
                std::ostringstream os;
                os << "Laplacian row " << i << " sums to " << m.row(i).sum();
                throw std::invalid_argument(os.str());
            }
            m(i, i) = -off; // rows now sum to zero exactly
        }
    }
    if (desc.kind == SpaceKind::log_euclidean_spd) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m,
                                                          Eigen::EigenvaluesOnly);
        const double lambda_min = es.eigenvalues().minCoeff();
        if (lambda_min < desc.spd_floor) {
            std::ostringstream os;
            os << "matrix eigenvalue " << lambda_min << " below spd floor "
               << desc.spd_floor
               << "; if this is intended data, add a small ridge (e.g. 1e-6*I)";
            throw std::domain_error(os.str());
        }
    }

    MetricObject o;
    o.desc_ = desc;
    o.values_ = Eigen::Map<const Eigen::VectorXd>(m.data(), p * p);
    // Eigen stores column-major; symmetric payload makes row/column order
    // indistinguishable, so the flattening is well defined.
    return o;
}

Eigen::MatrixXd MetricObject::matrix() const {
    require(desc_.is_matrix_kind(), "matrix(): object is not matrix-valued");
    const int p = desc_.matrix_dim;
    return Eigen::Map<const Eigen::MatrixXd>(values_.data(), p, p);
}

Eigen::MatrixXd sym_matrix_log(const Eigen::MatrixXd& m, double eig_floor) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
    const Eigen::VectorXd& ev = es.eigenvalues();
    if (ev.minCoeff() < eig_floor) {
        std::ostringstream os;
        os << "matrix eigenvalue " << ev.minCoeff() << " below spd floor "
           << eig_floor
           << "; if this is intended data, add a small ridge (e.g. 1e-6*I)";
        throw std::domain_error(os.str());
    }
    return es.eigenvectors() * ev.array().log().matrix().asDiagonal() *
           es.eigenvectors().transpose();
}

Eigen::MatrixXd sym_matrix_exp(const Eigen::MatrixXd& m) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
    return es.eigenvectors() *
           es.eigenvalues().array().exp().matrix().asDiagonal() *
           es.eigenvectors().transpose();
}

EmbeddedVector embed(const MetricObject& x) {
    const SpaceDescriptor& d = x.descriptor();
    if (d.kind == SpaceKind::log_euclidean_spd) {
        Eigen::MatrixXd lg = sym_matrix_log(x.matrix(), d.spd_floor);
        const int p = d.matrix_dim;
        return {Eigen::Map<const Eigen::VectorXd>(lg.data(), p * p), 1.0};
    }
    return {x.values(), d.quadrature_weight()};
}

MetricObject unembed(const SpaceDescriptor& desc, const Eigen::VectorXd& coords) {
    desc.validate();
    require(coords.size() == desc.embedding_dim(),
            "unembed: coordinate length does not match descriptor");
    switch (desc.kind) {
        case SpaceKind::scalar:
        case SpaceKind::l2_function:
            return MetricObject::from_values(desc, coords);
        case SpaceKind::wasserstein_1d: {
            double worst = 0.0;
            for (int j = 1; j < coords.size(); ++j)
                worst = std::max(worst, coords[j - 1] - coords[j]);
            if (worst > kMonotoneTol) {
                Eigen::VectorXd sorted = coords;
                std::sort(sorted.data(), sorted.data() + sorted.size());
                return MetricObject::from_values(desc, std::move(sorted));
            }
            return MetricObject::from_values(desc, coords);
        }
        case SpaceKind::frobenius_matrix:
        case SpaceKind::graph_laplacian: {
            const int p = desc.matrix_dim;
            Eigen::MatrixXd m =
                Eigen::Map<const Eigen::MatrixXd>(coords.data(), p, p);
            m = (0.5 * (m + m.transpose())).eval();
            if (desc.kind == SpaceKind::graph_laplacian) {
                for (int i = 0; i < p; ++i) {
                    double off = 0.0;
                    for (int j = 0; j < p; ++j)
                        if (j != i) {
                            m(i, j) = std::min(m(i, j), 0.0);
                            off += m(i, j);
                        }
                    m(i, i) = -off;
                }
            }
            return MetricObject::from_matrix(desc, m);
        }
        case SpaceKind::log_euclidean_spd: {
            const int p = desc.matrix_dim;
            Eigen::MatrixXd m =
                Eigen::Map<const Eigen::MatrixXd>(coords.data(), p, p);
            return MetricObject::from_matrix(desc,
                                             sym_matrix_exp(0.5 * (m + m.transpose())));
        }
    }
    throw std::logic_error("unembed: unhandled space kind");
}

double distance_squared(const MetricObject& x, const MetricObject& y) {
    require(x.descriptor() == y.descriptor(),
            "distance: objects live in different spaces");
    if (x.descriptor().kind == SpaceKind::log_euclidean_spd) {
        EmbeddedVector ex = embed(x), ey = embed(y);
        return (ex.coords - ey.coords).squaredNorm();
    }
    return x.descriptor().quadrature_weight() *
           (x.values() - y.values()).squaredNorm();
}

double distance(const MetricObject& x, const MetricObject& y) {
    return std::sqrt(distance_squared(x, y));
}

MetricObject frechet_mean(const std::vector<MetricObject>& objects) {
    return frechet_mean(objects,
                        std::vector<double>(objects.size(), 1.0));
}

MetricObject frechet_mean(const std::vector<MetricObject>& objects,
                          const std::vector<double>& weights) {
    require(!objects.empty(), "frechet_mean: empty input");
    require(weights.size() == objects.size(),
            "frechet_mean: weight count does not match object count");
    const SpaceDescriptor& desc = objects.front().descriptor();
    double total = 0.0;
    Eigen::VectorXd acc = Eigen::VectorXd::Zero(desc.embedding_dim());
    for (std::size_t t = 0; t < objects.size(); ++t) {
        require(objects[t].descriptor() == desc,
                "frechet_mean: descriptor mismatch within input");
        require(weights[t] >= 0.0, "frechet_mean: negative weight");
        if (weights[t] == 0.0) continue;
        acc += weights[t] * embed(objects[t]).coords;
        total += weights[t];
    }
    require(total > 0.0, "frechet_mean: weights sum to zero");
    return unembed(desc, acc / total);
}

double frechet_variance(const std::vector<MetricObject>& objects,
                        const MetricObject& center) {
    require(!objects.empty(), "frechet_variance: empty input");
    const EmbeddedVector ec = embed(center);
    double acc = 0.0;
    for (const MetricObject& obj : objects) {
        require(obj.descriptor() == center.descriptor(),
                "frechet_variance: descriptor mismatch");
        acc += (embed(obj).coords - ec.coords).squaredNorm();
    }
    return ec.weight * acc / static_cast<double>(objects.size());
}

Eigen::VectorXd midpoint_grid(int grid_size) {
    Eigen::VectorXd p(grid_size);
    for (int j = 0; j < grid_size; ++j)
        p[j] = (j + 0.5) / static_cast<double>(grid_size);
    return p;
}

Eigen::VectorXd gaussian_quantiles(int grid_size, double mean, double sd) {
    Eigen::VectorXd q(grid_size);
    for (int j = 0; j < grid_size; ++j)
        q[j] = mean + sd * normal_quantile((j + 0.5) / grid_size);
    return q;
}

} // namespace objsn
