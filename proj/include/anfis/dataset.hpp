#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace anfis {

// Immutable input matrix plus target column with named columns.
struct Dataset {
    std::vector<std::string> input_names;
    std::string target_name;
    Eigen::MatrixXd inputs;  // P x n
    Eigen::VectorXd targets; // P

    Eigen::Index rows() const { return inputs.rows(); }
    Eigen::Index num_inputs() const { return inputs.cols(); }
};

// Throws ShapeError / NumericError if dimensions disagree or values are
// non-finite.
void validate_dataset(const Dataset& ds);

Dataset load_csv(const std::string& path,
                 const std::vector<std::string>& input_columns,
                 const std::string& target_column);

// Input columns only, for prediction on unlabeled data.
Eigen::MatrixXd load_input_csv(const std::string& path,
                               const std::vector<std::string>& input_columns);

void save_csv(const Dataset& ds, const std::string& path);

// Deterministic Fisher-Yates shuffle driven by a seeded mt19937_64, then an
// exact head/tail partition: floor(fraction * P) rows to train.
std::pair<Dataset, Dataset> split(const Dataset& ds, double train_fraction,
                                  std::uint64_t seed);

// Head/tail partition in stored row order, no shuffling.
std::pair<Dataset, Dataset> split_sequential(const Dataset& ds,
                                             Eigen::Index train_rows);

// First `limit` rows (all rows if limit <= 0 or beyond the end).
Dataset head(const Dataset& ds, Eigen::Index limit);

} // namespace anfis
