#include "anfis/trainer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <thread>

#include "anfis/errors.hpp"
#include "anfis/metrics.hpp"

namespace anfis {

namespace {

constexpr double kErrorGuard = 1e-12;
constexpr double kSumGuard = 1e-12;

int worker_count() {
    if (const char* env = std::getenv("ANFIS_WORKERS")) {
        const int n = std::atoi(env);
        if (n >= 1) return n;
    }
    return 1;
}

// Rows are independent, so any worker count gives identical output.
template <typename Fn>
void for_each_row(Eigen::Index rows, Fn&& fn) {
    const int workers = std::min<Eigen::Index>(worker_count(), rows);
    if (workers <= 1) {
        for (Eigen::Index r = 0; r < rows; ++r) fn(r);
        return;
    }
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w)
        pool.emplace_back([&, w] {
            for (Eigen::Index r = w; r < rows; r += workers) fn(r);
        });
    for (auto& t : pool) t.join();
}

Eigen::MatrixXd build_design(const AnfisModel& model, const Dataset& data) {
    Eigen::MatrixXd design(data.rows(), design_width(model));
    for_each_row(data.rows(), [&](Eigen::Index r) {
        design.row(r) =
            design_row(model, data.inputs.row(r).transpose()).transpose();
    });
    return design;
}

bool model_is_finite(const AnfisModel& model) {
    return model.premise_params().allFinite() && model.consequents.allFinite();
}

void repair_mf(MembershipFunction& mf, double sigma_min) {
    auto& p = mf.params;
    switch (mf.family) {
        case MfFamily::Gaussian:
            p[1] = std::max(p[1], sigma_min);
            break;
        case MfFamily::Triangular:
            std::sort(p.begin(), p.end());
            if (p[2] - p[0] < sigma_min) {
                const double m = p[1];
                p[0] = m - 0.5 * sigma_min;
                p[2] = m + 0.5 * sigma_min;
                p[1] = m;
            }
            break;
        case MfFamily::Trapezoidal:
        case MfFamily::PiShaped:
            std::sort(p.begin(), p.end());
            if (p[3] - p[0] < sigma_min) {
                const double m = 0.5 * (p[1] + p[2]);
                p[0] = m - 0.5 * sigma_min;
                p[3] = m + 0.5 * sigma_min;
                p[1] = std::clamp(p[1], p[0], p[3]);
                p[2] = std::clamp(p[2], p[1], p[3]);
            }
            break;
        case MfFamily::GeneralizedBell:
            p[0] = std::max(p[0], sigma_min);
            p[1] = std::max(p[1], 0.05);
            break;
        case MfFamily::SigmoidDifference:
        case MfFamily::SigmoidProduct:
            break;
        case MfFamily::TwoSidedGaussian:
            p[0] = std::max(p[0], sigma_min);
            p[2] = std::max(p[2], sigma_min);
            if (p[1] > p[3]) {
                const double m = 0.5 * (p[1] + p[3]);
                p[1] = p[3] = m;
            }
            break;
    }
}

} // namespace

void validate_config(const TrainConfig& config) {
    if (!(config.eta0 >= 0.0)) throw ConfigError("eta0 must be >= 0");
    if (config.max_epochs < 1) throw ConfigError("max_epochs must be >= 1");
    if (config.error_goal < 0.0) throw ConfigError("error_goal must be >= 0");
    if (config.check_every < 1) throw ConfigError("check_every must be >= 1");
    if (!(config.sigma_min_scale > 0.0))
        throw ConfigError("sigma_min_scale must be > 0");
    const auto& p = config.eta_policy;
    if (p.kind == EtaPolicyKind::StepDecay) {
        if (!(p.decay_factor > 0.0 && p.decay_factor < 1.0))
            throw ConfigError("StepDecay factor must lie in (0, 1)");
        if (p.decay_every < 1) throw ConfigError("StepDecay period must be >= 1");
    }
    if (p.kind == EtaPolicyKind::JangAdaptive) {
        if (!(p.up_factor > 1.0))
            throw ConfigError("JangAdaptive up_factor must be > 1");
        if (!(p.down_factor > 0.0 && p.down_factor < 1.0))
            throw ConfigError("JangAdaptive down_factor must lie in (0, 1)");
    }
}

const char* stop_reason_name(StopReason reason) {
    switch (reason) {
        case StopReason::ErrorGoal: return "ErrorGoal";
        case StopReason::MaxEpochs: return "MaxEpochs";
        case StopReason::EarlyStop: return "EarlyStop";
        case StopReason::Diverged: return "Diverged";
    }
    return "?";
}

void save_trace_csv(const TrainTrace& trace, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write trace file: " + path);
    out.precision(17);
    out << "epoch,train_rmse,check_rmse,eta,seconds\n";
    for (const auto& rec : trace.records) {
        out << rec.epoch << ',' << rec.train_rmse_std << ',';
        if (rec.check_rmse_std) out << *rec.check_rmse_std;
        out << ',' << rec.eta << ',' << rec.seconds << '\n';
    }
    if (!out) throw IoError("trace write failed: " + path);
}

Eigen::VectorXd lse_solve(const Eigen::MatrixXd& design,
                          const Eigen::VectorXd& targets) {
    if (design.rows() != targets.size())
        throw ShapeError("lse_solve: row count mismatch");
    if (design.rows() < 1 || design.cols() < 1)
        throw ShapeError("lse_solve: empty system");
    if (!design.allFinite() || !targets.allFinite())
        throw NumericError("lse_solve: non-finite entries");
    return design.completeOrthogonalDecomposition().solve(targets);
}

Eigen::VectorXd premise_gradient(const AnfisModel& model, const Dataset& data) {
    validate_dataset(data);
    if (data.rows() < 1) throw ShapeError("premise_gradient: empty dataset");
    if (data.num_inputs() != model.num_inputs())
        throw ShapeError("premise_gradient: input dimension mismatch");

    const int n = model.num_inputs();
    const int r = model.rule_count();
    const double p_count = static_cast<double>(data.rows());

    std::vector<std::vector<int>> rule_idx(r);
    for (int i = 0; i < r; ++i) rule_idx[i] = model.rule_mf_indices(i);

    Eigen::VectorXd accum = Eigen::VectorXd::Zero(model.premise_param_count());
    double sse = 0.0;

    std::vector<std::vector<double>> mu(n);
    std::vector<std::vector<double>> dy_dmu(n); // per input, per MF index
    for (int j = 0; j < n; ++j) {
        mu[j].resize(model.inputs[j].mfs.size());
        dy_dmu[j].resize(model.inputs[j].mfs.size());
    }

    for (Eigen::Index k = 0; k < data.rows(); ++k) {
        const Eigen::VectorXd x = data.inputs.row(k).transpose();
        for (int j = 0; j < n; ++j)
            for (std::size_t m = 0; m < mu[j].size(); ++m)
                mu[j][m] = eval_mf(model.inputs[j].mfs[m], x(j));

        Eigen::VectorXd w(r), f(r);
        for (int i = 0; i < r; ++i) {
            double prod = 1.0;
            for (int j = 0; j < n; ++j) prod *= mu[j][rule_idx[i][j]];
            w(i) = prod;
            f(i) = model.consequents(i, n);
            if (model.order == SugenoOrder::FirstOrder)
                f(i) += model.consequents.row(i).head(n).dot(x);
        }
        const double total = w.sum();
        const double y = total < kSumGuard ? f.mean() : w.dot(f) / total;
        const double err = data.targets(k) - y;
        sse += err * err;
        if (total < kSumGuard) continue; // uniform fallback: y is premise-free

        for (int j = 0; j < n; ++j)
            std::fill(dy_dmu[j].begin(), dy_dmu[j].end(), 0.0);
        for (int i = 0; i < r; ++i) {
            const double share = (f(i) - y) / total;
            for (int j = 0; j < n; ++j) {
                // product over the other inputs' memberships
                double wex = 1.0;
                for (int l = 0; l < n; ++l)
                    if (l != j) wex *= mu[l][rule_idx[i][l]];
                dy_dmu[j][rule_idx[i][j]] += share * wex;
            }
        }

        Eigen::Index t = 0;
        for (int j = 0; j < n; ++j)
            for (std::size_t m = 0; m < model.inputs[j].mfs.size(); ++m) {
                const auto g =
                    mf_param_gradients(model.inputs[j].mfs[m], x(j));
                for (double gp : g) accum(t++) += err * dy_dmu[j][m] * gp;
            }
    }

    const double cost = std::sqrt(sse / (2.0 * p_count));
    if (cost < kErrorGuard)
        return Eigen::VectorXd::Zero(model.premise_param_count());
    return -accum / (2.0 * p_count * cost);
}

void gd_step(AnfisModel& model, const Eigen::VectorXd& grad, double eta,
             double sigma_min_scale) {
    if (grad.size() != model.premise_param_count())
        throw ShapeError("gd_step: gradient length mismatch");
    model.set_premise_params(model.premise_params() - eta * grad);
    for (auto& var : model.inputs) {
        const double sigma_min = sigma_min_scale * (var.hi - var.lo);
        for (auto& mf : var.mfs) repair_mf(mf, sigma_min);
    }
}

EpochResult train_epoch(AnfisModel& model, const Dataset& train, double eta,
                        double sigma_min_scale) {
    validate_dataset(train);
    if (train.rows() < 1) throw ShapeError("train_epoch: empty training set");

    const Eigen::MatrixXd design = build_design(model, train);
    const Eigen::VectorXd theta = lse_solve(design, train.targets);
    set_consequents_from_solution(model, theta);

    EpochResult result;
    result.train_rmse_eq1 =
        rmse(train.targets, design * theta, RmseForm::Eq1);
    result.post_lse = model;

    const Eigen::VectorXd grad = premise_gradient(model, train);
    gd_step(model, grad, eta, sigma_min_scale);
    return result;
}

double adapt_eta(const std::vector<double>& history, double eta,
                 const EtaPolicy& policy) {
    if (history.size() < 5) return eta;
    const std::size_t last = history.size() - 1;
    double delta[4];
    for (int i = 0; i < 4; ++i)
        delta[i] = history[last - 3 + i] - history[last - 4 + i];

    const bool four_down =
        delta[0] < 0 && delta[1] < 0 && delta[2] < 0 && delta[3] < 0;
    const bool up_down_twice =
        delta[0] > 0 && delta[1] < 0 && delta[2] > 0 && delta[3] < 0;
    if (four_down) return eta * policy.up_factor;
    if (up_down_twice) return eta * policy.down_factor;
    return eta;
}

FitResult fit(AnfisModel model, const Dataset& train, const Dataset& check,
              const TrainConfig& config) {
    validate_config(config);
    if (train.rows() < 1 || check.rows() < 1)
        throw ConfigError("fit: train and check sets must be nonempty");

    FitResult result;
    result.trace.stopped_reason = StopReason::MaxEpochs;

    double eta = config.eta0;
    std::vector<double> error_window;
    double best_check = std::numeric_limits<double>::infinity();
    bool have_best = false;
    double prev_check = std::numeric_limits<double>::quiet_NaN();
    int consecutive_rises = 0;
    AnfisModel last_post_lse = model;
    int last_epoch = 0;

    for (int epoch = 1; epoch <= config.max_epochs; ++epoch) {
        if (config.eta_policy.kind == EtaPolicyKind::StepDecay && epoch > 1 &&
            (epoch - 1) % config.eta_policy.decay_every == 0)
            eta *= config.eta_policy.decay_factor;

        const auto t0 = std::chrono::steady_clock::now();
        const EpochResult res =
            train_epoch(model, train, eta, config.sigma_min_scale);
        last_post_lse = res.post_lse;
        last_epoch = epoch;

        EpochRecord rec;
        rec.epoch = epoch;
        rec.train_rmse_eq1 = res.train_rmse_eq1;
        rec.train_rmse_std = res.train_rmse_eq1 * std::sqrt(2.0);
        rec.eta = eta;

        if (!std::isfinite(res.train_rmse_eq1) || !model_is_finite(model)) {
            rec.seconds = std::chrono::duration<double>(
                              std::chrono::steady_clock::now() - t0)
                              .count();
            result.trace.records.push_back(rec);
            result.trace.stopped_reason = StopReason::Diverged;
            break;
        }

        bool early_stop = false;
        if (epoch % config.check_every == 0) {
            const Eigen::VectorXd yhat =
                predict_batch(res.post_lse, check.inputs);
            const double check_rmse =
                rmse(check.targets, yhat, RmseForm::Standard);
            rec.check_rmse_std = check_rmse;
            if (check_rmse < best_check) {
                best_check = check_rmse;
                result.best_model = res.post_lse;
                result.trace.best_epoch = epoch;
                have_best = true;
            }
            if (std::isfinite(prev_check) && check_rmse > prev_check)
                ++consecutive_rises;
            else
                consecutive_rises = 0;
            prev_check = check_rmse;
            if (config.patience &&
                consecutive_rises >= std::max(*config.patience, 1))
                early_stop = true;
        }

        rec.seconds = std::chrono::duration<double>(
                          std::chrono::steady_clock::now() - t0)
                          .count();
        result.trace.records.push_back(rec);

        if (early_stop) {
            result.trace.stopped_reason = StopReason::EarlyStop;
            break;
        }
        if (res.train_rmse_eq1 < config.error_goal) {
            result.trace.stopped_reason = StopReason::ErrorGoal;
            break;
        }

        if (config.eta_policy.kind == EtaPolicyKind::JangAdaptive) {
            error_window.push_back(res.train_rmse_eq1);
            const double next = adapt_eta(error_window, eta, config.eta_policy);
            if (next != eta) {
                eta = next;
                error_window.assign(1, res.train_rmse_eq1);
            }
        }
    }

    if (!have_best) {
        result.best_model = last_post_lse;
        result.trace.best_epoch = last_epoch;
    }
    return result;
}

} // namespace anfis
