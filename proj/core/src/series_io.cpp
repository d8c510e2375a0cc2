#include "objsn/series_io.hpp"

#include <json.hpp>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace objsn {

namespace {

constexpr double kIoSymmetryTol = 1e-6;

[[noreturn]] void fail_at(const std::string& name, int row,
                          const std::string& msg) {
    std::ostringstream os;
    os << name;
    if (row > 0) os << ": row " << row;
    os << ": " << msg;
    throw std::runtime_error(os.str());
}

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    std::size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::vector<double> parse_numbers(const std::string& line,
                                  const std::string& name, int row) {
    std::vector<double> out;
    std::size_t pos = 0;
    while (pos < line.size()) {
        std::size_t next = line.find(',', pos);
        const std::string field =
            trim(line.substr(pos, next == std::string::npos ? std::string::npos
                                                            : next - pos));
        if (field.empty()) fail_at(name, row, "empty numeric field");
        char* end = nullptr;
        const double v = std::strtod(field.c_str(), &end);
        if (end != field.c_str() + field.size())
            fail_at(name, row, "not a number: '" + field + "'");
        if (!std::isfinite(v))
            fail_at(name, row, "non-finite value: '" + field + "'");
        out.push_back(v);
        if (next == std::string::npos) break;
        pos = next + 1;
    }
    if (out.empty()) fail_at(name, row, "empty row");
    return out;
}

// Empirical quantile of a sorted sample at probability p, midpoint
// (Hazen) convention: order statistic k sits at probability (k - 1/2)/m.
double hazen_quantile(const std::vector<double>& sorted, double p) {
    const int m = static_cast<int>(sorted.size());
    const double h = p * m + 0.5;
    if (h <= 1.0) return sorted.front();
    if (h >= m) return sorted.back();
    const int lo = static_cast<int>(std::floor(h));
    const double frac = h - lo;
    return sorted[lo - 1] + frac * (sorted[lo] - sorted[lo - 1]);
}

// Piecewise-linear interpolation of (probs, values) at p with flat
// extrapolation beyond the observed probability range.
double interp_quantile(const std::vector<double>& probs,
                       const std::vector<double>& values, double p) {
    if (p <= probs.front()) return values.front();
    if (p >= probs.back()) return values.back();
    const auto it = std::upper_bound(probs.begin(), probs.end(), p);
    const std::size_t i = static_cast<std::size_t>(it - probs.begin());
    const double t = (p - probs[i - 1]) / (probs[i] - probs[i - 1]);
    return values[i - 1] + t * (values[i] - values[i - 1]);
}

struct FileHeader {
    std::optional<std::string> kind;
    std::optional<std::string> payload;
    std::optional<int> grid;
    std::optional<int> dim;
    std::optional<std::vector<double>> probs;
};

int parse_positive_int(const std::string& value, const std::string& name,
                       const std::string& key) {
    try {
        const int v = std::stoi(value);
        if (v < 1) throw std::invalid_argument("not positive");
        return v;
    } catch (const std::exception&) {
        fail_at(name, 0, "header key '" + key + "' needs a positive integer, "
                         "got '" + value + "'");
    }
}

void apply_header_line(FileHeader& header, const std::string& body,
                       const std::string& name) {
    const std::size_t space = body.find_first_of(" \t");
    const std::string key =
        space == std::string::npos ? body : body.substr(0, space);
    const std::string value =
        space == std::string::npos ? "" : trim(body.substr(space + 1));
    if (value.empty()) fail_at(name, 0, "header key '" + key + "' has no value");
    if (key == "kind")
        header.kind = value;
    else if (key == "payload")
        header.payload = value;
    else if (key == "grid")
        header.grid = parse_positive_int(value, name, key);
    else if (key == "dim")
        header.dim = parse_positive_int(value, name, key);
    else if (key == "probs")
        header.probs = parse_numbers(value, name, 0);
    else
        fail_at(name, 0, "unknown header key '" + key + "'");
}

ObjectSeries build_series(const FileHeader& header,
                          const std::vector<std::vector<double>>& rows,
                          const std::string& name,
                          const SeriesParseHints& hints) {
    if (rows.empty()) fail_at(name, 0, "no object rows");

    SpaceKind kind;
    if (header.kind)
        kind = space_kind_from_name(*header.kind);
    else if (hints.kind)
        kind = *hints.kind;
    else
        fail_at(name, 0,
                "object kind not specified: add '# kind <name>' to the file "
                "or pass a hint");

    const bool matrix_kind = kind == SpaceKind::frobenius_matrix ||
                             kind == SpaceKind::log_euclidean_spd ||
                             kind == SpaceKind::graph_laplacian;

    std::string payload;
    if (header.payload)
        payload = *header.payload;
    else if (hints.payload)
        payload = *hints.payload;
    else
        payload = matrix_kind ? "matrix" : "values";
    if (payload == "quantiles") {
        if (kind != SpaceKind::wasserstein_1d)
            fail_at(name, 0, "payload 'quantiles' needs kind wasserstein_1d");
        payload = "values";
    }

    const std::size_t row_len = rows.front().size();
    for (std::size_t r = 1; r < rows.size(); ++r)
        if (rows[r].size() != row_len)
            fail_at(name, static_cast<int>(r + 1),
                    "ragged rows: expected " + std::to_string(row_len) +
                        " fields, got " + std::to_string(rows[r].size()));

    SpaceDescriptor desc = SpaceDescriptor::scalar();
    switch (kind) {
        case SpaceKind::scalar: {
            if (payload != "values")
                fail_at(name, 0, "kind scalar supports only payload 'values'");
            if (row_len != 1)
                fail_at(name, 0, "kind scalar needs one value per row");
            break;
        }
        case SpaceKind::l2_function:
        case SpaceKind::wasserstein_1d: {
            if (payload != "values" && payload != "samples")
                fail_at(name, 0, "unsupported payload '" + payload + "'");
            if (payload == "samples" && kind != SpaceKind::wasserstein_1d)
                fail_at(name, 0, "payload 'samples' needs kind wasserstein_1d");
            int grid = 0;
            if (header.grid)
                grid = *header.grid;
            else if (hints.grid_size)
                grid = *hints.grid_size;
            else if (payload == "samples")
                fail_at(name, 0,
                        "payload 'samples' needs an explicit '# grid <M>'");
            else if (header.probs)
                grid = static_cast<int>(header.probs->size());
            else
                grid = static_cast<int>(row_len);
            desc = kind == SpaceKind::l2_function
                       ? SpaceDescriptor::l2_function(grid)
                       : SpaceDescriptor::wasserstein(grid);
            break;
        }
        case SpaceKind::frobenius_matrix:
        case SpaceKind::log_euclidean_spd:
        case SpaceKind::graph_laplacian: {
            if (payload != "matrix")
                fail_at(name, 0, "matrix kinds support only payload 'matrix'");
            int dim = 0;
            if (header.dim)
                dim = *header.dim;
            else if (hints.matrix_dim)
                dim = *hints.matrix_dim;
            else {
                dim = static_cast<int>(std::lround(std::sqrt(
                    static_cast<double>(row_len))));
                if (static_cast<std::size_t>(dim) * dim != row_len)
                    fail_at(name, 0,
                            "row length " + std::to_string(row_len) +
                                " is not a squared matrix dimension");
            }
            if (static_cast<std::size_t>(dim) * dim != row_len)
                fail_at(name, 0,
                        "rows carry " + std::to_string(row_len) +
                            " entries but dim " + std::to_string(dim) +
                            " needs " + std::to_string(dim * dim));
            switch (kind) {
                case SpaceKind::frobenius_matrix:
                    desc = SpaceDescriptor::frobenius(dim);
                    break;
                case SpaceKind::log_euclidean_spd:
                    desc = SpaceDescriptor::log_euclidean(dim);
                    break;
                default:
                    desc = SpaceDescriptor::laplacian(dim);
                    break;
            }
            break;
        }
    }

    std::optional<std::vector<double>> probs = header.probs;
    if (probs) {
        if (payload != "values" || matrix_kind || kind == SpaceKind::scalar)
            fail_at(name, 0, "'probs' applies only to value/quantile rows");
        if (probs->size() != row_len)
            fail_at(name, 0, "probs length does not match row length");
        double prev = 0.0;
        for (double p : *probs) {
            if (!(p > prev && p < 1.0))
                fail_at(name, 0,
                        "probs must be strictly increasing inside (0,1)");
            prev = p;
        }
    }

    std::vector<MetricObject> objects;
    objects.reserve(rows.size());
    const bool grid_kind = desc.kind == SpaceKind::l2_function ||
                           desc.kind == SpaceKind::wasserstein_1d;
    const Eigen::VectorXd targets =
        grid_kind ? midpoint_grid(desc.grid_size) : Eigen::VectorXd();
    for (std::size_t r = 0; r < rows.size(); ++r) {
        const int row_no = static_cast<int>(r + 1);
        const std::vector<double>& row = rows[r];
        try {
            if (desc.kind == SpaceKind::scalar) {
                objects.push_back(MetricObject::scalar(row[0]));
            } else if (matrix_kind) {
                const int dim = desc.matrix_dim;
                Eigen::MatrixXd m(dim, dim);
                for (int i = 0; i < dim; ++i)
                    for (int j = 0; j < dim; ++j) m(i, j) = row[i * dim + j];
                const double asym = (m - m.transpose()).cwiseAbs().maxCoeff();
                if (asym > kIoSymmetryTol) {
                    std::ostringstream os;
                    os << "matrix asymmetric by " << asym << " (tolerance "
                       << kIoSymmetryTol << ")";
                    fail_at(name, row_no, os.str());
                }
                m = ((m + m.transpose()) / 2.0).eval();
                objects.push_back(MetricObject::from_matrix(desc, m));
            } else if (payload == "samples") {
                std::vector<double> sorted = row;
                std::sort(sorted.begin(), sorted.end());
                Eigen::VectorXd values(desc.grid_size);
                for (int j = 0; j < desc.grid_size; ++j)
                    values[j] = hazen_quantile(sorted, targets[j]);
                objects.push_back(MetricObject::from_values(desc, values));
            } else if (probs) {
                Eigen::VectorXd values(desc.grid_size);
                for (int j = 0; j < desc.grid_size; ++j)
                    values[j] = interp_quantile(*probs, row, targets[j]);
                objects.push_back(MetricObject::from_values(desc, values));
            } else {
                Eigen::VectorXd values(static_cast<int>(row.size()));
                for (std::size_t j = 0; j < row.size(); ++j)
                    values[static_cast<int>(j)] = row[j];
                objects.push_back(MetricObject::from_values(desc, values));
            }
        } catch (const std::runtime_error&) {
            throw;
        } catch (const std::exception& e) {
            fail_at(name, row_no, e.what());
        }
    }
    return ObjectSeries::from_objects(std::move(objects));
}

ObjectSeries parse_json_container(const std::string& text,
                                  const std::string& name,
                                  const SeriesParseHints& hints) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const std::exception& e) {
        fail_at(name, 0, std::string("invalid JSON: ") + e.what());
    }
    if (!doc.is_object()) fail_at(name, 0, "JSON root must be an object");

    FileHeader header;
    try {
        if (doc.contains("kind")) header.kind = doc["kind"].get<std::string>();
        if (doc.contains("payload"))
            header.payload = doc["payload"].get<std::string>();
        if (doc.contains("grid")) header.grid = doc["grid"].get<int>();
        if (doc.contains("dim")) header.dim = doc["dim"].get<int>();
        if (doc.contains("probs"))
            header.probs = doc["probs"].get<std::vector<double>>();
        if (!doc.contains("objects"))
            fail_at(name, 0, "JSON container needs an 'objects' array");
        const auto rows = doc["objects"].get<std::vector<std::vector<double>>>();
        for (const auto& row : rows)
            for (double v : row)
                if (!std::isfinite(v)) fail_at(name, 0, "non-finite value");
        return build_series(header, rows, name, hints);
    } catch (const std::runtime_error&) {
        throw;
    } catch (const std::exception& e) {
        fail_at(name, 0, std::string("malformed JSON container: ") + e.what());
    }
}

} // namespace

SpaceKind space_kind_from_name(const std::string& name) {
    static const std::pair<const char*, SpaceKind> table[] = {
        {"scalar", SpaceKind::scalar},
        {"l2_function", SpaceKind::l2_function},
        {"wasserstein_1d", SpaceKind::wasserstein_1d},
        {"frobenius_matrix", SpaceKind::frobenius_matrix},
        {"log_euclidean_spd", SpaceKind::log_euclidean_spd},
        {"graph_laplacian", SpaceKind::graph_laplacian},
    };
    for (const auto& [n, k] : table)
        if (name == n) return k;
    throw std::invalid_argument(
        "unknown space kind '" + name +
        "' (expected scalar, l2_function, wasserstein_1d, frobenius_matrix, "
        "log_euclidean_spd, or graph_laplacian)");
}

ObjectSeries parse_series_text(const std::string& text, const std::string& name,
                               const SeriesParseHints& hints) {
    const std::size_t first = text.find_first_not_of(" \t\r\n");
    if (first == std::string::npos) fail_at(name, 0, "empty input");
    if (text[first] == '{') return parse_json_container(text, name, hints);

    FileHeader header;
    std::vector<std::vector<double>> rows;
    std::istringstream in(text);
    std::string line;
    bool saw_magic = false;
    bool in_data = false;
    while (std::getline(in, line)) {
        const std::string t = trim(line);
        if (t.empty()) continue;
        if (t[0] == '#') {
            if (in_data)
                fail_at(name, static_cast<int>(rows.size()),
                        "header line after data rows");
            const std::string body = trim(t.substr(1));
            if (!saw_magic) {
                if (body != "objsn-series 1")
                    fail_at(name, 0,
                            "first header line must be '# objsn-series 1'");
                saw_magic = true;
                continue;
            }
            apply_header_line(header, body, name);
            continue;
        }
        in_data = true;
        rows.push_back(
            parse_numbers(t, name, static_cast<int>(rows.size()) + 1));
    }
    return build_series(header, rows, name, hints);
}

ObjectSeries parse_series(const std::filesystem::path& path,
                          const SeriesParseHints& hints) {
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open series file: " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_series_text(buffer.str(), path.string(), hints);
}

std::string format_series(const ObjectSeries& series) {
    const SpaceDescriptor& desc = series.descriptor;
    std::ostringstream out;
    out << "# objsn-series 1\n";
    out << "# kind " << space_kind_name(desc.kind) << "\n";
    const bool matrix_kind = desc.kind == SpaceKind::frobenius_matrix ||
                             desc.kind == SpaceKind::log_euclidean_spd ||
                             desc.kind == SpaceKind::graph_laplacian;
    if (matrix_kind) {
        out << "# dim " << desc.matrix_dim << "\n";
        out << "# payload matrix\n";
    } else if (desc.kind != SpaceKind::scalar) {
        out << "# grid " << desc.grid_size << "\n";
        out << "# payload "
            << (desc.kind == SpaceKind::wasserstein_1d ? "quantiles" : "values")
            << "\n";
    }

    char buf[40];
    for (const MetricObject& obj : series.objects) {
        if (matrix_kind) {
            const Eigen::MatrixXd m = obj.matrix();
            const int dim = desc.matrix_dim;
            for (int i = 0; i < dim; ++i)
                for (int j = 0; j < dim; ++j) {
                    std::snprintf(buf, sizeof buf, "%.17g", m(i, j));
                    out << (i == 0 && j == 0 ? "" : ",") << buf;
                }
        } else {
            const Eigen::VectorXd& v = obj.values();
            for (int j = 0; j < v.size(); ++j) {
                std::snprintf(buf, sizeof buf, "%.17g", v[j]);
                out << (j == 0 ? "" : ",") << buf;
            }
        }
        out << "\n";
    }
    return out.str();
}

void write_series(const ObjectSeries& series,
                  const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot open series file for writing: " +
                                 path.string());
    out << format_series(series);
    if (!out)
        throw std::runtime_error("failed writing series file: " +
                                 path.string());
}

} // namespace objsn
