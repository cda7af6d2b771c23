// Command-line front end: dataset preparation, training, prediction, and the
// study-style sweeps (membership-family table, learning-rate comparison,
// overfitting trace).

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "anfis/dataset.hpp"
#include "anfis/errors.hpp"
#include "anfis/mackey_glass.hpp"
#include "anfis/metrics.hpp"
#include "anfis/model.hpp"
#include "anfis/trainer.hpp"

namespace {

using namespace anfis;

std::vector<std::string> split_names(const std::string& csv) {
    std::vector<std::string> out;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(item);
    return out;
}

std::vector<int> split_ints(const std::string& csv) {
    std::vector<int> out;
    for (const auto& s : split_names(csv)) out.push_back(std::stoi(s));
    return out;
}

std::vector<double> split_doubles(const std::string& csv) {
    std::vector<double> out;
    for (const auto& s : split_names(csv)) out.push_back(std::stod(s));
    return out;
}

struct DataOptions {
    std::string path;
    std::string inputs;
    std::string target;
    long limit = 0;
    double split_fraction = 0.8;
    std::uint64_t seed = 42;
    bool sequential = false;
};

void add_data_options(CLI::App* cmd, DataOptions& opt) {
    cmd->add_option("--data", opt.path, "Dataset CSV path")->required();
    cmd->add_option("--inputs", opt.inputs, "Comma-separated input columns")
        ->required();
    cmd->add_option("--target", opt.target, "Target column")->required();
    cmd->add_option("--limit", opt.limit, "Use only the first N rows");
    cmd->add_option("--split", opt.split_fraction,
                    "Train fraction (default 0.8)");
    cmd->add_option("--seed", opt.seed, "Shuffle seed (default 42)");
    cmd->add_flag("--sequential", opt.sequential,
                  "Head/tail split without shuffling");
}

std::pair<Dataset, Dataset> load_and_split(const DataOptions& opt) {
    Dataset ds = load_csv(opt.path, split_names(opt.inputs), opt.target);
    ds = head(ds, opt.limit);
    if (opt.sequential) {
        const auto train_rows = static_cast<Eigen::Index>(
            std::floor(opt.split_fraction * static_cast<double>(ds.rows())));
        return split_sequential(ds, train_rows);
    }
    return split(ds, opt.split_fraction, opt.seed);
}

struct ModelOptions {
    std::string family = "gaussmf";
    int mfs_per_input = 3;
    int order = 1;
};

void add_model_options(CLI::App* cmd, ModelOptions& opt) {
    cmd->add_option("--mf-family", opt.family,
                    "MF family (MATLAB notation, default gaussmf)");
    cmd->add_option("--mfs-per-input", opt.mfs_per_input,
                    "MFs per input (default 3)");
    cmd->add_option("--order", opt.order, "Sugeno order, 0 or 1 (default 1)")
        ->check(CLI::Range(0, 1));
}

AnfisModel build_model(const ModelOptions& opt, const Dataset& train) {
    return make_grid_model_for(train, opt.mfs_per_input,
                               family_from_name(opt.family),
                               opt.order == 1 ? SugenoOrder::FirstOrder
                                              : SugenoOrder::ZeroOrder);
}

struct TrainOptions {
    double eta = 0.002;
    std::string policy = "fixed";
    double decay_factor = 0.2;
    int decay_every = 5;
    double up_factor = 1.1;
    double down_factor = 0.9;
    int epochs = 100;
    double error_goal = 1e-5;
    int check_every = 10;
    int patience = 5;
};

void add_train_options(CLI::App* cmd, TrainOptions& opt) {
    cmd->add_option("--eta", opt.eta, "Initial learning rate (default 0.002)");
    cmd->add_option("--eta-policy", opt.policy,
                    "fixed | step | jang (default fixed)");
    cmd->add_option("--decay-factor", opt.decay_factor,
                    "StepDecay multiplier (default 0.2)");
    cmd->add_option("--decay-every", opt.decay_every,
                    "StepDecay period in epochs (default 5)");
    cmd->add_option("--up-factor", opt.up_factor,
                    "JangAdaptive up factor (default 1.1)");
    cmd->add_option("--down-factor", opt.down_factor,
                    "JangAdaptive down factor (default 0.9)");
    cmd->add_option("--epochs", opt.epochs, "Epoch budget (default 100)");
    cmd->add_option("--error-goal", opt.error_goal,
                    "Stop when the training error drops below this "
                    "(default 1e-5)");
    cmd->add_option("--check-every", opt.check_every,
                    "Check-set evaluation cadence (default 10)");
    cmd->add_option("--patience", opt.patience,
                    "Consecutive check-RMSE rises before stopping "
                    "(default 5, -1 disables)");
}

TrainConfig to_config(const TrainOptions& opt, std::uint64_t seed) {
    TrainConfig cfg;
    cfg.eta0 = opt.eta;
    if (opt.policy == "fixed")
        cfg.eta_policy.kind = EtaPolicyKind::Fixed;
    else if (opt.policy == "step")
        cfg.eta_policy.kind = EtaPolicyKind::StepDecay;
    else if (opt.policy == "jang")
        cfg.eta_policy.kind = EtaPolicyKind::JangAdaptive;
    else
        throw ConfigError("unknown --eta-policy: " + opt.policy);
    cfg.eta_policy.decay_factor = opt.decay_factor;
    cfg.eta_policy.decay_every = opt.decay_every;
    cfg.eta_policy.up_factor = opt.up_factor;
    cfg.eta_policy.down_factor = opt.down_factor;
    cfg.max_epochs = opt.epochs;
    cfg.error_goal = opt.error_goal;
    cfg.check_every = opt.check_every;
    if (opt.patience >= 0) cfg.patience = opt.patience;
    cfg.seed = seed;
    return cfg;
}

void print_report(const FitResult& fit_result, const Dataset& train,
                  const Dataset& check) {
    const auto& trace = fit_result.trace;
    const Eigen::VectorXd yhat_train =
        predict_batch(fit_result.best_model, train.inputs);
    const Eigen::VectorXd yhat_check =
        predict_batch(fit_result.best_model, check.inputs);
    const EvalReport train_rep = evaluate(train.targets, yhat_train);
    const EvalReport check_rep = evaluate(check.targets, yhat_check);

    Eigen::VectorXd all_obs(train.rows() + check.rows());
    Eigen::VectorXd all_hat(train.rows() + check.rows());
    all_obs << train.targets, check.targets;
    all_hat << yhat_train, yhat_check;
    const double r2_all = r_squared(all_obs, all_hat);

    double total_seconds = 0.0;
    for (const auto& rec : trace.records) total_seconds += rec.seconds;

    std::cout << "epochs_run: " << trace.records.size() << '\n'
              << "stopped: " << stop_reason_name(trace.stopped_reason) << '\n'
              << "best_epoch: " << trace.best_epoch << '\n'
              << "train_rmse_std: " << train_rep.rmse_std << '\n'
              << "train_rmse_eq1: " << train_rep.rmse_eq1 << '\n'
              << "check_rmse_std: " << check_rep.rmse_std << '\n'
              << "check_rmse_eq1: " << check_rep.rmse_eq1 << '\n'
              << "train_r2: " << train_rep.r2 << '\n'
              << "check_r2: " << check_rep.r2 << '\n'
              << "combined_r2: " << r2_all << '\n'
              << "mean_epoch_seconds: "
              << total_seconds / std::max<std::size_t>(1, trace.records.size())
              << '\n';
}

int cmd_train(const DataOptions& data_opt, const ModelOptions& model_opt,
              const TrainOptions& train_opt, const std::string& out_model,
              const std::string& out_trace, const std::string& out_parity) {
    const auto [train, check] = load_and_split(data_opt);
    AnfisModel model = build_model(model_opt, train);
    const FitResult result =
        fit(std::move(model), train, check, to_config(train_opt, data_opt.seed));

    if (!out_model.empty()) save_model(result.best_model, out_model);
    if (!out_trace.empty()) save_trace_csv(result.trace, out_trace);
    if (!out_parity.empty()) {
        Eigen::VectorXd all_obs(train.rows() + check.rows());
        Eigen::VectorXd all_hat(train.rows() + check.rows());
        all_obs << train.targets, check.targets;
        all_hat << predict_batch(result.best_model, train.inputs),
            predict_batch(result.best_model, check.inputs);
        parity_export(all_obs, all_hat, out_parity);
    }
    print_report(result, train, check);
    return 0;
}

int cmd_compare_mfs(const DataOptions& data_opt, const TrainOptions& train_opt,
                    int mfs_per_input, const std::string& out) {
    const auto [train, check] = load_and_split(data_opt);
    std::ofstream table(out);
    if (!table) throw IoError("cannot write table: " + out);
    table.precision(10);
    table << "family,order,train_rmse_std\n";
    for (MfFamily family : all_families()) {
        for (int order : {1, 0}) {
            AnfisModel model = make_grid_model_for(
                train, mfs_per_input, family,
                order == 1 ? SugenoOrder::FirstOrder : SugenoOrder::ZeroOrder);
            TrainConfig cfg = to_config(train_opt, data_opt.seed);
            cfg.patience.reset(); // identical budget for every cell
            table << family_name(family) << ',' << order << ',';
            try {
                const FitResult result = fit(std::move(model), train, check, cfg);
                const auto& last = result.trace.records.back();
                if (result.trace.stopped_reason == StopReason::Diverged)
                    table << "diverged";
                else
                    table << last.train_rmse_std;
            } catch (const Error&) {
                table << "diverged";
            }
            table << '\n';
            table.flush();
        }
    }
    return 0;
}

int cmd_lr_sweep(const DataOptions& data_opt, const ModelOptions& model_opt,
                 const TrainOptions& train_opt, const std::string& etas_csv,
                 bool include_adaptive, const std::string& out) {
    if (etas_csv.empty() && !include_adaptive)
        throw ConfigError("lr-sweep: provide --etas and/or --adaptive");
    const auto [train, check] = load_and_split(data_opt);

    std::ofstream curves(out);
    if (!curves) throw IoError("cannot write curves: " + out);
    curves.precision(10);
    curves << "eta_label,epoch,train_rmse\n";

    auto run_one = [&](const std::string& label, TrainConfig cfg) {
        AnfisModel model = build_model(model_opt, train);
        cfg.patience.reset();
        const FitResult result = fit(std::move(model), train, check, cfg);
        for (const auto& rec : result.trace.records) {
            curves << label << ',' << rec.epoch << ',';
            if (std::isfinite(rec.train_rmse_std))
                curves << rec.train_rmse_std;
            else
                curves << "diverged";
            curves << '\n';
        }
    };

    if (!etas_csv.empty())
        for (double eta : split_doubles(etas_csv)) {
            TrainConfig cfg = to_config(train_opt, data_opt.seed);
            cfg.eta0 = eta;
            cfg.eta_policy.kind = EtaPolicyKind::Fixed;
            std::ostringstream label;
            label << "eta=" << eta;
            run_one(label.str(), cfg);
        }
    if (include_adaptive) {
        TrainConfig cfg = to_config(train_opt, data_opt.seed);
        cfg.eta_policy.kind = EtaPolicyKind::JangAdaptive;
        run_one("jang", cfg);
    }
    return 0;
}

int cmd_overfit_trace(const DataOptions& data_opt, const ModelOptions& model_opt,
                      TrainOptions train_opt, const std::string& out_trace) {
    const auto [train, check] = load_and_split(data_opt);
    AnfisModel model = build_model(model_opt, train);
    train_opt.patience = -1; // early stopping disabled for the full curve
    const FitResult result =
        fit(std::move(model), train, check, to_config(train_opt, data_opt.seed));
    if (!out_trace.empty()) save_trace_csv(result.trace, out_trace);

    double best_check = std::numeric_limits<double>::infinity();
    int best_epoch = 0;
    for (const auto& rec : result.trace.records)
        if (rec.check_rmse_std && *rec.check_rmse_std < best_check) {
            best_check = *rec.check_rmse_std;
            best_epoch = rec.epoch;
        }
    std::cout << "epochs_run: " << result.trace.records.size() << '\n'
              << "best_epoch: " << best_epoch << '\n'
              << "best_check_rmse_std: " << best_check << '\n'
              << "final_train_rmse_std: "
              << result.trace.records.back().train_rmse_std << '\n';
    return 0;
}

int cmd_predict(const std::string& model_path, const std::string& data_path,
                const std::string& inputs_csv, const std::string& out) {
    const AnfisModel model = load_model(model_path);
    std::vector<std::string> columns;
    if (!inputs_csv.empty())
        columns = split_names(inputs_csv);
    else
        for (const auto& var : model.inputs) columns.push_back(var.name);
    const Eigen::MatrixXd X = load_input_csv(data_path, columns);
    const Eigen::VectorXd y = predict_batch(model, X);

    std::ofstream file(out);
    if (!file) throw IoError("cannot write predictions: " + out);
    file.precision(17);
    file << "row,prediction\n";
    for (Eigen::Index r = 0; r < y.size(); ++r)
        file << r << ',' << y(r) << '\n';
    return 0;
}

int cmd_evaluate(const std::string& model_path, const std::string& data_path,
                 const std::string& inputs_csv, const std::string& target,
                 const std::string& out_parity) {
    const AnfisModel model = load_model(model_path);
    std::vector<std::string> columns;
    if (!inputs_csv.empty())
        columns = split_names(inputs_csv);
    else
        for (const auto& var : model.inputs) columns.push_back(var.name);
    const Dataset ds = load_csv(data_path, columns, target);
    const Eigen::VectorXd yhat = predict_batch(model, ds.inputs);
    const EvalReport rep = evaluate(ds.targets, yhat);
    std::cout << "n: " << rep.n << '\n'
              << "rmse_std: " << rep.rmse_std << '\n'
              << "rmse_eq1: " << rep.rmse_eq1 << '\n'
              << "r2: " << rep.r2 << '\n';
    if (!out_parity.empty()) parity_export(ds.targets, yhat, out_parity);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Takagi-Sugeno neuro-fuzzy regression with hybrid "
                 "LSE/gradient training"};
    app.require_subcommand(1);
    std::cout.precision(10);

    // gen-mg
    auto* gen_mg = app.add_subcommand("gen-mg", "Generate a Mackey-Glass series");
    double mg_tau = 17.0, mg_horizon = 2000.0, mg_step = 0.1, mg_x0 = 1.2;
    std::string mg_out;
    gen_mg->add_option("--tau", mg_tau, "Delay (default 17)");
    gen_mg->add_option("--horizon", mg_horizon, "Final time (default 2000)");
    gen_mg->add_option("--step", mg_step, "RK4 step (default 0.1)");
    gen_mg->add_option("--x0", mg_x0, "Initial value (default 1.2)");
    gen_mg->add_option("--out", mg_out, "Output CSV `t,x`")->required();

    // embed
    auto* embed_cmd =
        app.add_subcommand("embed", "Lag-embed a series into a dataset");
    std::string embed_series, embed_out, embed_lags = "-12,-6,0";
    int embed_ahead = 6;
    embed_cmd->add_option("--series", embed_series, "Series CSV from gen-mg")
        ->required();
    embed_cmd->add_option("--lags", embed_lags,
                          "Comma-separated lags (default -12,-6,0)");
    embed_cmd->add_option("--ahead", embed_ahead,
                          "Prediction horizon (default 6)");
    embed_cmd->add_option("--out", embed_out, "Output dataset CSV")->required();

    // gen-synth
    auto* gen_synth = app.add_subcommand(
        "gen-synth", "Sample the three-variable benchmark function on a grid");
    double synth_lo = 1.0, synth_hi = 6.0;
    int synth_points = 6;
    std::string synth_out;
    gen_synth->add_option("--lo", synth_lo, "Lower bound (default 1)");
    gen_synth->add_option("--hi", synth_hi, "Upper bound (default 6)");
    gen_synth->add_option("--points", synth_points,
                          "Points per dimension (default 6)");
    gen_synth->add_option("--out", synth_out, "Output dataset CSV")->required();

    // train
    auto* train_cmd = app.add_subcommand("train", "Train a model");
    DataOptions train_data;
    ModelOptions train_model;
    TrainOptions train_train;
    std::string out_model, out_trace, out_parity;
    add_data_options(train_cmd, train_data);
    add_model_options(train_cmd, train_model);
    add_train_options(train_cmd, train_train);
    train_cmd->add_option("--out-model", out_model, "Serialized best model");
    train_cmd->add_option("--out-trace", out_trace, "Per-epoch trace CSV");
    train_cmd->add_option("--out-parity", out_parity, "Parity CSV");

    // compare-mfs
    auto* compare_cmd = app.add_subcommand(
        "compare-mfs", "Train every MF family at both Sugeno orders");
    DataOptions compare_data;
    TrainOptions compare_train;
    compare_train.epochs = 300;
    int compare_mfs_per_input = 3;
    std::string compare_out;
    add_data_options(compare_cmd, compare_data);
    add_train_options(compare_cmd, compare_train);
    compare_cmd->add_option("--mfs-per-input", compare_mfs_per_input,
                            "MFs per input (default 3)");
    compare_cmd->add_option("--out", compare_out, "Table CSV")->required();

    // lr-sweep
    auto* sweep_cmd =
        app.add_subcommand("lr-sweep", "Training curves per learning rate");
    DataOptions sweep_data;
    ModelOptions sweep_model;
    TrainOptions sweep_train;
    std::string sweep_etas, sweep_out;
    bool sweep_adaptive = false;
    add_data_options(sweep_cmd, sweep_data);
    add_model_options(sweep_cmd, sweep_model);
    add_train_options(sweep_cmd, sweep_train);
    sweep_cmd->add_option("--etas", sweep_etas, "Comma-separated eta values");
    sweep_cmd->add_flag("--adaptive", sweep_adaptive,
                        "Also run the adaptive-eta policy");
    sweep_cmd->add_option("--out", sweep_out, "Long-format curves CSV")
        ->required();

    // overfit-trace
    auto* overfit_cmd = app.add_subcommand(
        "overfit-trace", "Long run with early stopping disabled");
    DataOptions overfit_data;
    ModelOptions overfit_model;
    TrainOptions overfit_train;
    std::string overfit_out;
    add_data_options(overfit_cmd, overfit_data);
    add_model_options(overfit_cmd, overfit_model);
    add_train_options(overfit_cmd, overfit_train);
    overfit_cmd->add_option("--out-trace", overfit_out, "Trace CSV");

    // predict
    auto* predict_cmd = app.add_subcommand("predict", "Predict with a model");
    std::string predict_model, predict_data, predict_inputs, predict_out;
    predict_cmd->add_option("--model", predict_model, "Model file")->required();
    predict_cmd->add_option("--data", predict_data, "Input CSV")->required();
    predict_cmd->add_option("--inputs", predict_inputs,
                            "Input columns (default: model's)");
    predict_cmd->add_option("--out", predict_out, "Predictions CSV")
        ->required();

    // evaluate
    auto* eval_cmd = app.add_subcommand("evaluate", "Evaluate a model");
    std::string eval_model, eval_data, eval_inputs, eval_target, eval_parity;
    eval_cmd->add_option("--model", eval_model, "Model file")->required();
    eval_cmd->add_option("--data", eval_data, "Labeled CSV")->required();
    eval_cmd->add_option("--inputs", eval_inputs,
                         "Input columns (default: model's)");
    eval_cmd->add_option("--target", eval_target, "Target column")->required();
    eval_cmd->add_option("--out-parity", eval_parity, "Parity CSV");

    CLI11_PARSE(app, argc, argv);

    try {
        if (gen_mg->parsed()) {
            save_mg_csv(mackey_glass(mg_tau, mg_horizon, mg_step, mg_x0),
                        mg_out);
            return 0;
        }
        if (embed_cmd->parsed()) {
            const Dataset ds = embed(load_mg_csv(embed_series),
                                     split_ints(embed_lags), embed_ahead);
            save_csv(ds, embed_out);
            return 0;
        }
        if (gen_synth->parsed()) {
            save_csv(synth_benchmark(synth_lo, synth_hi, synth_points),
                     synth_out);
            return 0;
        }
        if (train_cmd->parsed())
            return cmd_train(train_data, train_model, train_train, out_model,
                             out_trace, out_parity);
        if (compare_cmd->parsed())
            return cmd_compare_mfs(compare_data, compare_train,
                                   compare_mfs_per_input, compare_out);
        if (sweep_cmd->parsed())
            return cmd_lr_sweep(sweep_data, sweep_model, sweep_train,
                                sweep_etas, sweep_adaptive, sweep_out);
        if (overfit_cmd->parsed())
            return cmd_overfit_trace(overfit_data, overfit_model, overfit_train,
                                     overfit_out);
        if (predict_cmd->parsed())
            return cmd_predict(predict_model, predict_data, predict_inputs,
                               predict_out);
        if (eval_cmd->parsed())
            return cmd_evaluate(eval_model, eval_data, eval_inputs, eval_target,
                                eval_parity);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
