#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "anfis/dataset.hpp"
#include "anfis/model.hpp"

namespace anfis {

enum class EtaPolicyKind { Fixed, StepDecay, JangAdaptive };

struct EtaPolicy {
    EtaPolicyKind kind = EtaPolicyKind::Fixed;
    // StepDecay: eta *= decay_factor every decay_every epochs.
    double decay_factor = 0.2;
    int decay_every = 5;
    // JangAdaptive: scale after qualifying error patterns.
    double up_factor = 1.1;
    double down_factor = 0.9;
};

struct TrainConfig {
    double eta0 = 0.001;
    EtaPolicy eta_policy;
    int max_epochs = 100;
    // Stop once the Eq1-form training error drops below this.
    double error_goal = 1e-5;
    int check_every = 10;
    // Early stopping fires after this many consecutive check-RMSE rises;
    // absent = never stop early.
    std::optional<int> patience;
    std::uint64_t seed = 0;
    double sigma_min_scale = 1e-4;
};

void validate_config(const TrainConfig& config);

enum class StopReason { ErrorGoal, MaxEpochs, EarlyStop, Diverged };

struct EpochRecord {
    int epoch = 0;
    double train_rmse_eq1 = 0.0;
    double train_rmse_std = 0.0;
    std::optional<double> check_rmse_std;
    double eta = 0.0;
    double seconds = 0.0;
};

struct TrainTrace {
    std::vector<EpochRecord> records;
    int best_epoch = 0;
    StopReason stopped_reason = StopReason::MaxEpochs;
};

const char* stop_reason_name(StopReason reason);

// CSV `epoch,train_rmse,check_rmse,eta,seconds`; RMSE columns carry the
// conventional (1/P) form, check cells empty on non-evaluation epochs.
void save_trace_csv(const TrainTrace& trace, const std::string& path);

// Minimum-norm least-squares solution of design * theta ~= targets via a
// complete orthogonal decomposition.
Eigen::VectorXd lse_solve(const Eigen::MatrixXd& design,
                          const Eigen::VectorXd& targets);

// Gradient of the cost E = sqrt(sse / (2P)) w.r.t. all premise
// parameters, chained through the product and normalization layers. Returns
// zero when E underflows the square-root guard.
Eigen::VectorXd premise_gradient(const AnfisModel& model, const Dataset& data);

// theta -= eta * grad, then per-variable repair: width-type parameters are
// clamped to sigma_min = sigma_min_scale * (hi - lo) and ordering constraints
// are restored by sorting.
void gd_step(AnfisModel& model, const Eigen::VectorXd& grad, double eta,
             double sigma_min_scale = 1e-4);

struct EpochResult {
    double train_rmse_eq1 = 0.0;
    // Model state after the LSE solve, before the gradient step; this is the
    // state the reported RMSE was measured on.
    AnfisModel post_lse;
};

EpochResult train_epoch(AnfisModel& model, const Dataset& train, double eta,
                        double sigma_min_scale = 1e-4);

// Jang's pattern rule over the error history recorded since the last
// adjustment: four successive strict declines scale eta up, two consecutive
// (up, down) pairs scale it down; anything else leaves it unchanged.
double adapt_eta(const std::vector<double>& history, double eta,
                 const EtaPolicy& policy);

struct FitResult {
    AnfisModel best_model;
    TrainTrace trace;
};

FitResult fit(AnfisModel model, const Dataset& train, const Dataset& check,
              const TrainConfig& config);

} // namespace anfis
