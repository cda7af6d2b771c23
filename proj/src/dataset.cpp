#include "anfis/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <charconv>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>

#include "anfis/errors.hpp"

namespace anfis {

namespace {

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::stringstream ss(line);
    while (std::getline(ss, field, ',')) {
        // trim surrounding whitespace / CR
        const auto b = field.find_first_not_of(" \t\r");
        const auto e = field.find_last_not_of(" \t\r");
        fields.push_back(b == std::string::npos
                             ? std::string()
                             : field.substr(b, e - b + 1));
    }
    if (!line.empty() && line.back() == ',') fields.emplace_back();
    return fields;
}

double parse_cell(const std::string& cell, std::size_t row,
                  const std::string& column) {
    double value = 0.0;
    const char* first = cell.data();
    const char* last = cell.data() + cell.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last)
        throw IngestError("row " + std::to_string(row) + ", column '" + column +
                          "': cannot parse '" + cell + "' as a real number");
    if (!std::isfinite(value))
        throw IngestError("row " + std::to_string(row) + ", column '" + column +
                          "': non-finite value");
    return value;
}

Dataset take_rows(const Dataset& ds, const std::vector<Eigen::Index>& idx) {
    Dataset out;
    out.input_names = ds.input_names;
    out.target_name = ds.target_name;
    out.inputs.resize(static_cast<Eigen::Index>(idx.size()), ds.num_inputs());
    out.targets.resize(static_cast<Eigen::Index>(idx.size()));
    for (std::size_t r = 0; r < idx.size(); ++r) {
        out.inputs.row(static_cast<Eigen::Index>(r)) = ds.inputs.row(idx[r]);
        out.targets(static_cast<Eigen::Index>(r)) = ds.targets(idx[r]);
    }
    return out;
}

} // namespace

void validate_dataset(const Dataset& ds) {
    if (ds.inputs.rows() != ds.targets.size())
        throw ShapeError("dataset: input rows != target length");
    if (static_cast<Eigen::Index>(ds.input_names.size()) != ds.inputs.cols())
        throw ShapeError("dataset: column name count != input columns");
    if (!ds.inputs.allFinite() || !ds.targets.allFinite())
        throw NumericError("dataset: non-finite values");
}

Dataset load_csv(const std::string& path,
                 const std::vector<std::string>& input_columns,
                 const std::string& target_column) {
    std::ifstream in(path);
    if (!in) throw IngestError("cannot open file: " + path);

    std::string line;
    if (!std::getline(in, line)) throw IngestError("empty file: " + path);
    const auto header = split_line(line);

    auto column_index = [&](const std::string& name) {
        const auto it = std::find(header.begin(), header.end(), name);
        if (it == header.end())
            throw IngestError("column '" + name + "' not found in " + path);
        return static_cast<std::size_t>(it - header.begin());
    };

    std::vector<std::size_t> in_idx;
    for (const auto& name : input_columns) in_idx.push_back(column_index(name));
    const std::size_t tgt_idx = column_index(target_column);

    std::vector<std::vector<double>> rows;
    std::size_t row_no = 1;
    while (std::getline(in, line)) {
        ++row_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        const auto fields = split_line(line);
        if (fields.size() != header.size())
            throw IngestError("row " + std::to_string(row_no) + ": expected " +
                              std::to_string(header.size()) + " fields, got " +
                              std::to_string(fields.size()));
        std::vector<double> row;
        row.reserve(in_idx.size() + 1);
        for (std::size_t j = 0; j < in_idx.size(); ++j)
            row.push_back(
                parse_cell(fields[in_idx[j]], row_no, input_columns[j]));
        row.push_back(parse_cell(fields[tgt_idx], row_no, target_column));
        rows.push_back(std::move(row));
    }

    Dataset ds;
    ds.input_names = input_columns;
    ds.target_name = target_column;
    const auto p = static_cast<Eigen::Index>(rows.size());
    const auto n = static_cast<Eigen::Index>(input_columns.size());
    ds.inputs.resize(p, n);
    ds.targets.resize(p);
    for (Eigen::Index r = 0; r < p; ++r) {
        for (Eigen::Index c = 0; c < n; ++c) ds.inputs(r, c) = rows[r][c];
        ds.targets(r) = rows[r][n];
    }
    return ds;
}

Eigen::MatrixXd load_input_csv(const std::string& path,
                               const std::vector<std::string>& input_columns) {
    std::ifstream in(path);
    if (!in) throw IngestError("cannot open file: " + path);

    std::string line;
    if (!std::getline(in, line)) throw IngestError("empty file: " + path);
    const auto header = split_line(line);

    std::vector<std::size_t> in_idx;
    for (const auto& name : input_columns) {
        const auto it = std::find(header.begin(), header.end(), name);
        if (it == header.end())
            throw IngestError("column '" + name + "' not found in " + path);
        in_idx.push_back(static_cast<std::size_t>(it - header.begin()));
    }

    std::vector<std::vector<double>> rows;
    std::size_t row_no = 1;
    while (std::getline(in, line)) {
        ++row_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        const auto fields = split_line(line);
        if (fields.size() != header.size())
            throw IngestError("row " + std::to_string(row_no) +
                              ": wrong field count");
        std::vector<double> row;
        for (std::size_t j = 0; j < in_idx.size(); ++j)
            row.push_back(
                parse_cell(fields[in_idx[j]], row_no, input_columns[j]));
        rows.push_back(std::move(row));
    }

    Eigen::MatrixXd X(static_cast<Eigen::Index>(rows.size()),
                      static_cast<Eigen::Index>(input_columns.size()));
    for (Eigen::Index r = 0; r < X.rows(); ++r)
        for (Eigen::Index c = 0; c < X.cols(); ++c)
            X(r, c) = rows[static_cast<std::size_t>(r)]
                          [static_cast<std::size_t>(c)];
    return X;
}

void save_csv(const Dataset& ds, const std::string& path) {
    validate_dataset(ds);
    std::ofstream out(path);
    if (!out) throw IoError("cannot write file: " + path);
    out.precision(17);
    for (std::size_t j = 0; j < ds.input_names.size(); ++j)
        out << ds.input_names[j] << ',';
    out << ds.target_name << '\n';
    for (Eigen::Index r = 0; r < ds.rows(); ++r) {
        for (Eigen::Index c = 0; c < ds.num_inputs(); ++c)
            out << ds.inputs(r, c) << ',';
        out << ds.targets(r) << '\n';
    }
    if (!out) throw IoError("write failed: " + path);
}

std::pair<Dataset, Dataset> split(const Dataset& ds, double train_fraction,
                                  std::uint64_t seed) {
    validate_dataset(ds);
    if (ds.rows() == 0) throw ConfigError("split: empty dataset");
    if (!(train_fraction > 0.0 && train_fraction < 1.0))
        throw ConfigError("split: fraction must lie in (0, 1)");

    std::vector<Eigen::Index> idx(static_cast<std::size_t>(ds.rows()));
    std::iota(idx.begin(), idx.end(), Eigen::Index{0});

    // Fisher-Yates with explicit modulo draws; stable across stdlibs.
    std::mt19937_64 rng(seed);
    for (std::size_t i = idx.size() - 1; i > 0; --i) {
        const std::size_t j = static_cast<std::size_t>(rng() % (i + 1));
        std::swap(idx[i], idx[j]);
    }

    const auto train_rows = static_cast<std::size_t>(
        std::floor(train_fraction * static_cast<double>(ds.rows())));
    std::vector<Eigen::Index> train_idx(idx.begin(), idx.begin() + train_rows);
    std::vector<Eigen::Index> check_idx(idx.begin() + train_rows, idx.end());
    return {take_rows(ds, train_idx), take_rows(ds, check_idx)};
}

std::pair<Dataset, Dataset> split_sequential(const Dataset& ds,
                                             Eigen::Index train_rows) {
    validate_dataset(ds);
    if (train_rows < 0 || train_rows > ds.rows())
        throw ConfigError("split_sequential: train_rows out of range");
    std::vector<Eigen::Index> train_idx, check_idx;
    for (Eigen::Index r = 0; r < ds.rows(); ++r)
        (r < train_rows ? train_idx : check_idx).push_back(r);
    return {take_rows(ds, train_idx), take_rows(ds, check_idx)};
}

Dataset head(const Dataset& ds, Eigen::Index limit) {
    validate_dataset(ds);
    if (limit <= 0 || limit >= ds.rows()) return ds;
    std::vector<Eigen::Index> idx;
    for (Eigen::Index r = 0; r < limit; ++r) idx.push_back(r);
    return take_rows(ds, idx);
}

} // namespace anfis
