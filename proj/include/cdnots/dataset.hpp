#pragma once

#include <Eigen/Dense>

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "cdnots/node.hpp"

namespace cdnots {

struct CsvOptions {
    char delimiter = ',';
    bool header = true;
};

// T x N observations, one column per named series. Immutable once built; the
// constructor rejects non-finite values and empty or duplicate names.
class TimeSeriesDataset {
public:
    TimeSeriesDataset(Eigen::MatrixXd values, std::vector<std::string> names);

    Eigen::Index rows() const { return values_.rows(); }
    Eigen::Index cols() const { return values_.cols(); }
    const Eigen::MatrixXd& values() const { return values_; }
    const std::vector<std::string>& names() const { return names_; }
    const std::string& name(Eigen::Index i) const { return names_[static_cast<std::size_t>(i)]; }
    std::optional<Eigen::Index> index_of(const std::string& name) const;

private:
    Eigen::MatrixXd values_;
    std::vector<std::string> names_;
};

TimeSeriesDataset parse_csv(std::istream& in, const CsvOptions& options = {});
TimeSeriesDataset load_csv(const std::filesystem::path& path, const CsvOptions& options = {});

// Shortest round-trip decimal representation, header first.
void write_csv(const TimeSeriesDataset& ds, std::ostream& out, char delimiter = ',');
void write_csv(const TimeSeriesDataset& ds, const std::filesystem::path& path, char delimiter = ',');

// Per-column z-score with the population standard deviation.
TimeSeriesDataset standardize(const TimeSeriesDataset& ds);

// Columns for every (variable, lag) pair plus the normalised time index.
//
// Row r corresponds to time point r + L of the source; the column for
// (i, l) holds values[r + L - l, i]. Columns are ordered variable-major,
// (0,0), (0,1), ..., (0,L), (1,0), ..., with the time column last.
class LaggedDesignMatrix {
public:
    LaggedDesignMatrix(Eigen::MatrixXd columns, int n_vars, int max_lag);

    int n_vars() const { return n_vars_; }
    int max_lag() const { return max_lag_; }
    Eigen::Index rows() const { return columns_.rows(); }
    Eigen::Index n_columns() const { return columns_.cols(); }
    const Eigen::MatrixXd& columns() const { return columns_; }

    Eigen::Index column_of(const LaggedNode& node) const;
    LaggedNode node_at(Eigen::Index column) const;
    Eigen::Ref<const Eigen::VectorXd> column(const LaggedNode& node) const;
    Eigen::Ref<const Eigen::VectorXd> time_index() const;

    // Stacks the requested nodes' columns.
    Eigen::MatrixXd gather(const std::vector<LaggedNode>& nodes) const;

private:
    Eigen::MatrixXd columns_;
    int n_vars_;
    int max_lag_;
};

LaggedDesignMatrix lag_embed(const TimeSeriesDataset& ds, int max_lag);

// Normalised time index 0, 1/(m-1), ..., 1 for m rows.
Eigen::VectorXd time_index_column(Eigen::Index m);

// Advice when the series is short for the number of lagged columns.
std::optional<std::string> sample_size_warning(Eigen::Index t, Eigen::Index n, int max_lag);

}  // namespace cdnots
