#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "anfis/dataset.hpp"
#include "anfis/mf.hpp"

namespace anfis {

enum class SugenoOrder { ZeroOrder, FirstOrder };

// Full-grid Takagi-Sugeno rule base. The rule enumeration is canonical:
// the last input's MF index varies fastest. Consequents are stored R x (n+1)
// with the constant term in the last column; zero-order models keep the
// non-constant columns at zero.
struct AnfisModel {
    std::vector<FuzzyVariable> inputs;
    SugenoOrder order = SugenoOrder::FirstOrder;
    Eigen::MatrixXd consequents;

    int num_inputs() const { return static_cast<int>(inputs.size()); }
    int rule_count() const;
    // MF index chosen by rule `rule` for each input, in input order.
    std::vector<int> rule_mf_indices(int rule) const;

    // Flattened premise parameters: inputs in order, MFs in order, params in
    // declared family order.
    int premise_param_count() const;
    Eigen::VectorXd premise_params() const;
    void set_premise_params(const Eigen::VectorXd& theta);
};

// Grid model with init_grid MFs per input and zeroed consequents.
AnfisModel make_grid_model(const std::vector<std::string>& input_names,
                           const std::vector<std::pair<double, double>>& ranges,
                           int mfs_per_input, MfFamily family,
                           SugenoOrder order);

// Ranges taken from the data columns (min/max per input).
AnfisModel make_grid_model_for(const Dataset& ds, int mfs_per_input,
                               MfFamily family, SugenoOrder order);

struct ForwardRecord {
    Eigen::VectorXd firing;       // w
    Eigen::VectorXd normalized;   // w-bar
    Eigen::VectorXd rule_outputs; // f
    double output = 0.0;
};

Eigen::VectorXd firing_strengths(const AnfisModel& model,
                                 const Eigen::VectorXd& x);

// w-bar = w / sum(w); falls back to uniform 1/R when the total underflows
// the 1e-12 guard.
Eigen::VectorXd normalize(const Eigen::VectorXd& w);

ForwardRecord forward(const AnfisModel& model, const Eigen::VectorXd& x);

// LSE design row: per rule, w-bar * (x, 1) for first order, w-bar for zero
// order. Its dot product with the flattened consequents is the forward output.
Eigen::VectorXd design_row(const AnfisModel& model, const Eigen::VectorXd& x);

// Columns of the design matrix per model (R*(n+1) or R).
int design_width(const AnfisModel& model);

Eigen::VectorXd flatten_consequents(const AnfisModel& model);
void set_consequents_from_solution(AnfisModel& model,
                                   const Eigen::VectorXd& theta);

Eigen::VectorXd predict_batch(const AnfisModel& model,
                              const Eigen::MatrixXd& X);

// Human-readable structured text (JSON) with round-trip-exact floats.
void save_model(const AnfisModel& model, const std::string& path);
AnfisModel load_model(const std::string& path);
std::string model_to_string(const AnfisModel& model);
AnfisModel model_from_string(const std::string& text);

} // namespace anfis
