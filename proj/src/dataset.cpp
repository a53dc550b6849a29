#include "cdnots/dataset.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

namespace cdnots {

namespace {

std::string trim(std::string_view s) {
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && (s[b] == ' ' || s[b] == '\t' || s[b] == '\r')) ++b;
    while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\r')) --e;
    return std::string(s.substr(b, e - b));
}

std::vector<std::string> split(const std::string& line, char delim) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = line.find(delim, start);
        if (pos == std::string::npos) {
            out.push_back(trim(std::string_view(line).substr(start)));
            break;
        }
        out.push_back(trim(std::string_view(line).substr(start, pos - start)));
        start = pos + 1;
    }
    return out;
}

std::string unquote(std::string s) {
    if (s.size() >= 2 && s.front() == '"' && s.back() == '"') return s.substr(1, s.size() - 2);
    return s;
}

}  // namespace

TimeSeriesDataset::TimeSeriesDataset(Eigen::MatrixXd values, std::vector<std::string> names)
    : values_(std::move(values)), names_(std::move(names)) {
    if (static_cast<Eigen::Index>(names_.size()) != values_.cols()) {
        throw std::invalid_argument("dataset: " + std::to_string(names_.size()) + " names for " +
                                    std::to_string(values_.cols()) + " columns");
    }
    std::unordered_set<std::string> seen;
    for (const auto& n : names_) {
        if (n.empty()) throw std::invalid_argument("dataset: empty variable name");
        if (!seen.insert(n).second) throw std::invalid_argument("dataset: duplicate variable name '" + n + "'");
    }
    for (Eigen::Index j = 0; j < values_.cols(); ++j) {
        for (Eigen::Index i = 0; i < values_.rows(); ++i) {
            if (!std::isfinite(values_(i, j))) {
                throw std::invalid_argument("dataset: non-finite value at row " + std::to_string(i) +
                                            ", column '" + names_[static_cast<std::size_t>(j)] + "'");
            }
        }
    }
}

std::optional<Eigen::Index> TimeSeriesDataset::index_of(const std::string& name) const {
    for (std::size_t i = 0; i < names_.size(); ++i) {
        if (names_[i] == name) return static_cast<Eigen::Index>(i);
    }
    return std::nullopt;
}

TimeSeriesDataset parse_csv(std::istream& in, const CsvOptions& options) {
    std::string line;
    std::vector<std::string> names;
    std::vector<std::vector<double>> rows;
    std::size_t line_no = 0;
    std::size_t width = 0;

    if (options.header) {
        while (std::getline(in, line)) {
            ++line_no;
            if (!trim(line).empty()) break;
        }
        if (trim(line).empty()) throw std::runtime_error("csv: missing header row");
        for (auto& n : split(line, options.delimiter)) names.push_back(unquote(n));
        width = names.size();
    }

    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        auto cells = split(line, options.delimiter);
        if (width == 0) width = cells.size();
        if (cells.size() != width) {
            throw std::runtime_error("csv: line " + std::to_string(line_no) + " has " + std::to_string(cells.size()) +
                                     " fields, expected " + std::to_string(width));
        }
        std::vector<double> row(width);
        for (std::size_t c = 0; c < width; ++c) {
            const std::string& cell = cells[c];
            double v = 0.0;
            const char* first = cell.data();
            const char* last = cell.data() + cell.size();
            if (!cell.empty() && *first == '+') ++first;
            auto [ptr, ec] = std::from_chars(first, last, v);
            const std::string where = "line " + std::to_string(line_no) + ", column " + std::to_string(c + 1) +
                                      (names.empty() ? "" : " ('" + names[c] + "')");
            if (cell.empty() || ec != std::errc() || ptr != last) {
                throw std::runtime_error("csv: cannot parse '" + cell + "' at " + where);
            }
            if (!std::isfinite(v)) throw std::runtime_error("csv: non-finite value '" + cell + "' at " + where);
            row[c] = v;
        }
        rows.push_back(std::move(row));
    }

    if (names.empty()) {
        for (std::size_t c = 0; c < width; ++c) names.push_back("x" + std::to_string(c));
    }
    Eigen::MatrixXd values(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(names.size()));
    for (std::size_t r = 0; r < rows.size(); ++r) {
        for (std::size_t c = 0; c < names.size(); ++c) {
            values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
        }
    }
    return TimeSeriesDataset(std::move(values), std::move(names));
}

TimeSeriesDataset load_csv(const std::filesystem::path& path, const CsvOptions& options) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("csv: cannot open " + path.string());
    return parse_csv(in, options);
}

void write_csv(const TimeSeriesDataset& ds, std::ostream& out, char delimiter) {
    for (Eigen::Index c = 0; c < ds.cols(); ++c) {
        if (c) out << delimiter;
        out << ds.name(c);
    }
    out << '\n';
    char buf[64];
    for (Eigen::Index r = 0; r < ds.rows(); ++r) {
        for (Eigen::Index c = 0; c < ds.cols(); ++c) {
            if (c) out << delimiter;
            auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), ds.values()(r, c));
            out.write(buf, ptr - buf);
        }
        out << '\n';
    }
}

void write_csv(const TimeSeriesDataset& ds, const std::filesystem::path& path, char delimiter) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("csv: cannot write " + path.string());
    write_csv(ds, out, delimiter);
}

TimeSeriesDataset standardize(const TimeSeriesDataset& ds) {
    Eigen::MatrixXd z = ds.values();
    const double n = static_cast<double>(z.rows());
    for (Eigen::Index c = 0; c < z.cols(); ++c) {
        const double mean = z.col(c).mean();
        z.col(c).array() -= mean;
        const double sd = std::sqrt(z.col(c).squaredNorm() / n);
        if (!(sd > 1e-12 * (std::fabs(mean) + 1e-300))) {
            throw std::invalid_argument("standardize: column '" + ds.name(c) + "' is constant");
        }
        z.col(c) /= sd;
    }
    return TimeSeriesDataset(std::move(z), ds.names());
}

LaggedDesignMatrix::LaggedDesignMatrix(Eigen::MatrixXd columns, int n_vars, int max_lag)
    : columns_(std::move(columns)), n_vars_(n_vars), max_lag_(max_lag) {
    if (columns_.cols() != static_cast<Eigen::Index>(n_vars) * (max_lag + 1) + 1) {
        throw std::invalid_argument("design matrix: column count does not match N*(L+1)+1");
    }
}

Eigen::Index LaggedDesignMatrix::column_of(const LaggedNode& node) const {
    if (node.is_time()) return columns_.cols() - 1;
    if (node.var < 0 || node.var >= n_vars_ || node.lag < 0 || node.lag > max_lag_) {
        throw std::out_of_range("design matrix: node (" + std::to_string(node.var) + ", lag " +
                                std::to_string(node.lag) + ") outside the embedding");
    }
    return static_cast<Eigen::Index>(node.var) * (max_lag_ + 1) + node.lag;
}

LaggedNode LaggedDesignMatrix::node_at(Eigen::Index column) const {
    if (column == columns_.cols() - 1) return LaggedNode::time();
    return LaggedNode::variable(static_cast<int>(column / (max_lag_ + 1)), static_cast<int>(column % (max_lag_ + 1)));
}

Eigen::Ref<const Eigen::VectorXd> LaggedDesignMatrix::column(const LaggedNode& node) const {
    return columns_.col(column_of(node));
}

Eigen::Ref<const Eigen::VectorXd> LaggedDesignMatrix::time_index() const { return columns_.col(columns_.cols() - 1); }

Eigen::MatrixXd LaggedDesignMatrix::gather(const std::vector<LaggedNode>& nodes) const {
    Eigen::MatrixXd out(rows(), static_cast<Eigen::Index>(nodes.size()));
    for (std::size_t k = 0; k < nodes.size(); ++k) out.col(static_cast<Eigen::Index>(k)) = column(nodes[k]);
    return out;
}

Eigen::VectorXd time_index_column(Eigen::Index m) {
    if (m < 2) throw std::invalid_argument("time index needs at least two rows");
    return Eigen::VectorXd::LinSpaced(m, 0.0, 1.0);
}

LaggedDesignMatrix lag_embed(const TimeSeriesDataset& ds, int max_lag) {
    if (max_lag < 0) throw std::invalid_argument("lag_embed: max lag must be non-negative");
    const Eigen::Index t = ds.rows();
    if (t <= max_lag + 2) {
        throw std::invalid_argument("lag_embed: max lag " + std::to_string(max_lag) + " too large for " +
                                    std::to_string(t) + " time points");
    }
    const int n = static_cast<int>(ds.cols());
    const Eigen::Index m = t - max_lag;
    Eigen::MatrixXd cols(m, static_cast<Eigen::Index>(n) * (max_lag + 1) + 1);
    for (int i = 0; i < n; ++i) {
        for (int l = 0; l <= max_lag; ++l) {
            cols.col(static_cast<Eigen::Index>(i) * (max_lag + 1) + l) = ds.values().col(i).segment(max_lag - l, m);
        }
    }
    cols.col(cols.cols() - 1) = time_index_column(m);
    return LaggedDesignMatrix(std::move(cols), n, max_lag);
}

std::optional<std::string> sample_size_warning(Eigen::Index t, Eigen::Index n, int max_lag) {
    const Eigen::Index want = 3 * (max_lag + 1) * n;
    if (t >= want) return std::nullopt;
    std::ostringstream os;
    os << "only " << t << " time points for " << n << " series at max lag " << max_lag << " (recommended >= " << want
       << ")";
    return os.str();
}

std::string node_label(const LaggedNode& node, const std::string& var_name) {
    if (node.is_time()) return "T";
    if (node.lag == 0) return var_name + "(t)";
    return var_name + "(t-" + std::to_string(node.lag) + ")";
}

}  // namespace cdnots
