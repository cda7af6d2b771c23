#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "anfis/errors.hpp"
#include "anfis/metrics.hpp"
#include "anfis/trainer.hpp"

using namespace anfis;

namespace {

Eigen::MatrixXd random_matrix(int rows, int cols, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> d(-2.0, 2.0);
    Eigen::MatrixXd m(rows, cols);
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c) m(r, c) = d(rng);
    return m;
}

// Normal equations solved in extended precision; independent of the
// orthogonal-factorization path under test.
Eigen::VectorXd normal_equations_solve(const Eigen::MatrixXd& a,
                                       const Eigen::VectorXd& b) {
    const int m = static_cast<int>(a.cols());
    std::vector<std::vector<long double>> ata(m, std::vector<long double>(m, 0));
    std::vector<long double> atb(m, 0);
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < m; ++j)
            for (int k = 0; k < a.rows(); ++k)
                ata[i][j] += static_cast<long double>(a(k, i)) * a(k, j);
        for (int k = 0; k < a.rows(); ++k)
            atb[i] += static_cast<long double>(a(k, i)) * b(k);
    }
    // Gaussian elimination with partial pivoting
    for (int col = 0; col < m; ++col) {
        int pivot = col;
        for (int r = col + 1; r < m; ++r)
            if (std::abs(static_cast<double>(ata[r][col])) >
                std::abs(static_cast<double>(ata[pivot][col])))
                pivot = r;
        std::swap(ata[col], ata[pivot]);
        std::swap(atb[col], atb[pivot]);
        for (int r = col + 1; r < m; ++r) {
            const long double factor = ata[r][col] / ata[col][col];
            for (int c = col; c < m; ++c) ata[r][c] -= factor * ata[col][c];
            atb[r] -= factor * atb[col];
        }
    }
    Eigen::VectorXd theta(m);
    for (int r = m - 1; r >= 0; --r) {
        long double acc = atb[r];
        for (int c = r + 1; c < m; ++c) acc -= ata[r][c] * theta(c);
        theta(r) = static_cast<double>(acc / ata[r][r]);
    }
    return theta;
}

AnfisModel small_model(int mfs_per_input, SugenoOrder order,
                       std::mt19937_64& rng) {
    std::uniform_real_distribution<double> jitter(-0.3, 0.3);
    AnfisModel model = make_grid_model({"u", "v"}, {{-1.0, 1.0}, {-1.0, 1.0}},
                                       mfs_per_input, MfFamily::Gaussian, order);
    for (auto& var : model.inputs)
        for (auto& mf : var.mfs) {
            mf.params[0] += jitter(rng);
            mf.params[1] *= 1.0 + 0.3 * jitter(rng);
        }
    std::uniform_real_distribution<double> coeff(-2.0, 2.0);
    for (Eigen::Index i = 0; i < model.consequents.rows(); ++i)
        for (Eigen::Index c = 0; c < model.consequents.cols(); ++c)
            model.consequents(i, c) =
                (order == SugenoOrder::ZeroOrder && c + 1 < model.consequents.cols())
                    ? 0.0
                    : coeff(rng);
    return model;
}

Dataset random_samples(const AnfisModel& model, int rows, std::mt19937_64& rng,
                       double noise = 0.3) {
    std::uniform_real_distribution<double> xs(-1.0, 1.0);
    std::normal_distribution<double> eps(0.0, noise);
    Dataset ds;
    for (const auto& var : model.inputs) ds.input_names.push_back(var.name);
    ds.target_name = "y";
    ds.inputs.resize(rows, model.num_inputs());
    ds.targets.resize(rows);
    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < model.num_inputs(); ++c) ds.inputs(r, c) = xs(rng);
        ds.targets(r) =
            forward(model, ds.inputs.row(r).transpose()).output + eps(rng);
    }
    return ds;
}

// sqrt(sse/(2P)) cost evaluated through the public forward pass only.
double cost_of(const AnfisModel& model, const Dataset& ds) {
    return rmse(ds.targets, predict_batch(model, ds.inputs), RmseForm::Eq1);
}

} // namespace

TEST_CASE("lse_solve: identity and exact line fit") {
    Eigen::VectorXd targets(3);
    targets << 1, 2, 3;
    const Eigen::VectorXd id_sol =
        lse_solve(Eigen::MatrixXd::Identity(3, 3), targets);
    CHECK((id_sol - targets).cwiseAbs().maxCoeff() <= 1e-14);

    Eigen::MatrixXd line(3, 2);
    line << 1, 1, 1, 2, 1, 3;
    const Eigen::VectorXd sol = lse_solve(line, targets);
    CHECK(sol(0) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(sol(1) == doctest::Approx(1.0).epsilon(1e-12));

    Eigen::MatrixXd bad = Eigen::MatrixXd::Ones(2, 2);
    bad(0, 0) = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(lse_solve(bad, Eigen::VectorXd::Ones(2)), NumericError);
}

TEST_CASE("lse_solve matches the extended-precision normal equations") {
    std::mt19937_64 rng(21);
    for (int trial = 0; trial < 10; ++trial) {
        const Eigen::MatrixXd a = random_matrix(50, 10, rng);
        Eigen::VectorXd b(50);
        std::uniform_real_distribution<double> d(-3.0, 3.0);
        for (int i = 0; i < 50; ++i) b(i) = d(rng);

        const double res_cod = (a * lse_solve(a, b) - b).norm();
        const double res_ne = (a * normal_equations_solve(a, b) - b).norm();
        CHECK(std::abs(res_cod - res_ne) <= 1e-8);
        CHECK(res_cod <= res_ne + 1e-10); // never worse than the oracle
    }
}

TEST_CASE("lse_solve residual cannot be improved by perturbation") {
    std::mt19937_64 rng(22);
    const Eigen::MatrixXd a = random_matrix(60, 8, rng);
    Eigen::VectorXd b(60);
    std::uniform_real_distribution<double> d(-3.0, 3.0);
    for (int i = 0; i < 60; ++i) b(i) = d(rng);
    const Eigen::VectorXd theta = lse_solve(a, b);
    const double base = (a * theta - b).squaredNorm();
    std::normal_distribution<double> g(0.0, 1.0);
    for (int trial = 0; trial < 100; ++trial) {
        Eigen::VectorXd delta(8);
        for (int i = 0; i < 8; ++i) delta(i) = g(rng);
        delta *= 1e-3 / delta.norm();
        CHECK((a * (theta + delta) - b).squaredNorm() >= base - 1e-15);
    }
}

TEST_CASE("premise_gradient matches finite differences of the rooted cost") {
    std::mt19937_64 rng(23);
    for (int trial = 0; trial < 20; ++trial) {
        const AnfisModel model =
            small_model(2, trial % 2 ? SugenoOrder::FirstOrder
                                     : SugenoOrder::ZeroOrder, rng);
        const Dataset ds = random_samples(model, 50, rng, 0.5);

        const Eigen::VectorXd analytic = premise_gradient(model, ds);
        Eigen::VectorXd fd(analytic.size());
        const Eigen::VectorXd theta = model.premise_params();
        for (Eigen::Index p = 0; p < theta.size(); ++p) {
            const double h = 1e-6 * std::max(1.0, std::abs(theta(p)));
            AnfisModel lo = model, hi = model;
            Eigen::VectorXd tl = theta, th = theta;
            tl(p) -= h;
            th(p) += h;
            lo.set_premise_params(tl);
            hi.set_premise_params(th);
            fd(p) = (cost_of(hi, ds) - cost_of(lo, ds)) / (2.0 * h);
        }
        const double rel =
            (analytic - fd).norm() / std::max(fd.norm(), 1e-12);
        CHECK(rel < 1e-4);
    }
}

TEST_CASE("premise_gradient edge behaviour") {
    std::mt19937_64 rng(24);
    const AnfisModel model = small_model(2, SugenoOrder::FirstOrder, rng);

    SUBCASE("exact reproduction gives the zero vector") {
        Dataset ds = random_samples(model, 30, rng, 0.0);
        ds.targets = predict_batch(model, ds.inputs);
        CHECK(premise_gradient(model, ds).cwiseAbs().maxCoeff() == 0.0);
    }
    SUBCASE("duplicating the dataset leaves the gradient unchanged") {
        const Dataset ds = random_samples(model, 25, rng, 0.4);
        Dataset doubled = ds;
        doubled.inputs.resize(50, ds.num_inputs());
        doubled.targets.resize(50);
        doubled.inputs << ds.inputs, ds.inputs;
        doubled.targets << ds.targets, ds.targets;
        const Eigen::VectorXd g1 = premise_gradient(model, ds);
        const Eigen::VectorXd g2 = premise_gradient(model, doubled);
        CHECK((g1 - g2).cwiseAbs().maxCoeff() <= 1e-13);
    }
    SUBCASE("dimension mismatch raises a shape error") {
        Dataset ds = random_samples(model, 5, rng);
        ds.input_names.pop_back();
        Eigen::MatrixXd narrower = ds.inputs.leftCols(1);
        ds.inputs = narrower;
        CHECK_THROWS_AS(premise_gradient(model, ds), ShapeError);
    }
}

TEST_CASE("gd_step semantics and clamping") {
    std::mt19937_64 rng(25);
    AnfisModel model = small_model(2, SugenoOrder::FirstOrder, rng);
    const Eigen::VectorXd before = model.premise_params();

    SUBCASE("eta = 0 leaves the model unchanged") {
        gd_step(model, Eigen::VectorXd::Ones(before.size()), 0.0);
        CHECK((model.premise_params() - before).cwiseAbs().maxCoeff() == 0.0);
    }
    SUBCASE("zero gradient leaves the model unchanged") {
        gd_step(model, Eigen::VectorXd::Zero(before.size()), 0.7);
        CHECK((model.premise_params() - before).cwiseAbs().maxCoeff() == 0.0);
    }
    SUBCASE("single-parameter update is exact") {
        Eigen::VectorXd grad = Eigen::VectorXd::Zero(before.size());
        grad(0) = 0.25; // center of the first MF: no clamp interference
        gd_step(model, grad, 0.1);
        CHECK(model.premise_params()(0) ==
              doctest::Approx(before(0) - 0.025).epsilon(1e-15));
    }
    SUBCASE("sigma clamps to sigma_min_scale times the variable span") {
        Eigen::VectorXd grad = Eigen::VectorXd::Zero(before.size());
        grad(1) = 1e9; // drives the first sigma strongly negative
        gd_step(model, grad, 1.0, 1e-4);
        const double span = model.inputs[0].hi - model.inputs[0].lo;
        CHECK(model.inputs[0].mfs[0].params[1] ==
              doctest::Approx(1e-4 * span));
    }
}

TEST_CASE("train_epoch: LSE floor and idempotence at eta = 0") {
    std::mt19937_64 rng(26);
    AnfisModel truth = small_model(2, SugenoOrder::FirstOrder, rng);
    const Dataset ds = random_samples(truth, 80, rng, 0.2);

    AnfisModel model = make_grid_model({"u", "v"}, {{-1.0, 1.0}, {-1.0, 1.0}},
                                       2, MfFamily::Gaussian,
                                       SugenoOrder::FirstOrder);
    const EpochResult first = train_epoch(model, ds, 0.0);
    const EpochResult second = train_epoch(model, ds, 0.0);
    CHECK(first.train_rmse_eq1 == second.train_rmse_eq1);
}

TEST_CASE("first-order consequents represent an affine target exactly") {
    Dataset ds;
    ds.input_names = {"x"};
    ds.target_name = "y";
    ds.inputs.resize(21, 1);
    ds.targets.resize(21);
    for (int i = 0; i <= 20; ++i) {
        ds.inputs(i, 0) = i / 20.0;
        ds.targets(i) = 2.0 * ds.inputs(i, 0);
    }
    AnfisModel model = make_grid_model({"x"}, {{0.0, 1.0}}, 2,
                                       MfFamily::Gaussian,
                                       SugenoOrder::FirstOrder);
    const EpochResult res = train_epoch(model, ds, 0.0);
    CHECK(res.train_rmse_eq1 < 1e-8);
}

TEST_CASE("adapt_eta pattern rules") {
    EtaPolicy policy;
    policy.kind = EtaPolicyKind::JangAdaptive;
    policy.up_factor = 1.1;
    policy.down_factor = 0.9;

    CHECK(adapt_eta({5, 4, 3, 2, 1}, 0.01, policy) ==
          doctest::Approx(0.011));
    CHECK(adapt_eta({1, 2, 1.5, 2.5, 2}, 0.01, policy) ==
          doctest::Approx(0.009));
    CHECK(adapt_eta({3, 3, 3}, 0.01, policy) == 0.01);
    CHECK(adapt_eta({5, 4, 3, 3, 2}, 0.01, policy) == 0.01);
    CHECK(adapt_eta({}, 0.01, policy) == 0.01);
}

TEST_CASE("fit: stop reasons, best model, determinism") {
    std::mt19937_64 rng(27);
    AnfisModel truth = small_model(3, SugenoOrder::FirstOrder, rng);
    const Dataset train = random_samples(truth, 60, rng, 0.3);
    const Dataset check = random_samples(truth, 30, rng, 0.3);

    AnfisModel model = make_grid_model({"u", "v"}, {{-1.0, 1.0}, {-1.0, 1.0}},
                                       2, MfFamily::Gaussian,
                                       SugenoOrder::FirstOrder);
    TrainConfig cfg;
    cfg.eta0 = 0.01;
    cfg.max_epochs = 25;
    cfg.error_goal = 0.0;
    cfg.check_every = 5;

    SUBCASE("epoch budget exhausts with MaxEpochs") {
        const FitResult res = fit(model, train, check, cfg);
        CHECK(res.trace.stopped_reason == StopReason::MaxEpochs);
        CHECK(res.trace.records.size() == 25);
    }
    SUBCASE("best model attains the minimal recorded check RMSE") {
        const FitResult res = fit(model, train, check, cfg);
        double min_check = std::numeric_limits<double>::infinity();
        for (const auto& rec : res.trace.records)
            if (rec.check_rmse_std)
                min_check = std::min(min_check, *rec.check_rmse_std);
        const double best_rmse =
            rmse(check.targets, predict_batch(res.best_model, check.inputs),
                 RmseForm::Standard);
        CHECK(best_rmse == doctest::Approx(min_check).epsilon(1e-12));
    }
    SUBCASE("identical config gives bitwise-identical traces") {
        const FitResult a = fit(model, train, check, cfg);
        const FitResult b = fit(model, train, check, cfg);
        REQUIRE(a.trace.records.size() == b.trace.records.size());
        for (std::size_t i = 0; i < a.trace.records.size(); ++i) {
            CHECK(a.trace.records[i].train_rmse_eq1 ==
                  b.trace.records[i].train_rmse_eq1);
            CHECK(a.trace.records[i].eta == b.trace.records[i].eta);
        }
    }
    SUBCASE("eta = 0 freezes premises and the RMSE sequence") {
        TrainConfig frozen = cfg;
        frozen.eta0 = 0.0;
        const FitResult res = fit(model, train, check, frozen);
        const Eigen::VectorXd before = model.premise_params();
        CHECK((res.best_model.premise_params() - before).cwiseAbs().maxCoeff() ==
              0.0);
        for (const auto& rec : res.trace.records)
            CHECK(rec.train_rmse_eq1 == res.trace.records[0].train_rmse_eq1);
    }
    SUBCASE("sigma floor holds after every epoch") {
        TrainConfig aggressive = cfg;
        aggressive.eta0 = 5.0;
        aggressive.max_epochs = 40;
        const FitResult res = fit(model, train, check, aggressive);
        for (const auto& var : res.best_model.inputs) {
            const double floor = 1e-4 * (var.hi - var.lo);
            for (const auto& mf : var.mfs)
                CHECK(mf.params[1] >= floor - 1e-15);
        }
    }
    SUBCASE("empty datasets are rejected") {
        Dataset empty;
        empty.input_names = train.input_names;
        empty.target_name = train.target_name;
        empty.inputs.resize(0, 2);
        empty.targets.resize(0);
        CHECK_THROWS_AS(fit(model, empty, check, cfg), ConfigError);
        CHECK_THROWS_AS(fit(model, train, empty, cfg), ConfigError);
    }
}

TEST_CASE("fit stops early once the check error keeps rising") {
    // Small noisy training set with a flexible model and a large step size:
    // the premises chase the noise and the held-out error climbs.
    std::mt19937_64 rng(28);
    Dataset train, check;
    train.input_names = check.input_names = {"x"};
    train.target_name = check.target_name = "y";
    std::normal_distribution<double> noise(0.0, 0.2);
    train.inputs.resize(25, 1);
    train.targets.resize(25);
    for (int i = 0; i < 25; ++i) {
        train.inputs(i, 0) = i / 24.0;
        train.targets(i) = std::sin(3.0 * train.inputs(i, 0)) + noise(rng);
    }
    check.inputs.resize(40, 1);
    check.targets.resize(40);
    for (int i = 0; i < 40; ++i) {
        check.inputs(i, 0) = i / 39.0;
        check.targets(i) = std::sin(3.0 * check.inputs(i, 0)) + noise(rng);
    }

    AnfisModel model = make_grid_model({"x"}, {{0.0, 1.0}}, 4,
                                       MfFamily::Gaussian,
                                       SugenoOrder::FirstOrder);
    TrainConfig cfg;
    cfg.eta0 = 0.8;
    cfg.max_epochs = 400;
    cfg.error_goal = 0.0;
    cfg.check_every = 1;
    cfg.patience = 3;
    const FitResult res = fit(model, train, check, cfg);
    CHECK(res.trace.stopped_reason == StopReason::EarlyStop);
    CHECK(res.trace.best_epoch <
          static_cast<int>(res.trace.records.size()));
}

TEST_CASE("config validation") {
    TrainConfig cfg;
    cfg.eta0 = -1.0;
    CHECK_THROWS_AS(validate_config(cfg), ConfigError);
    cfg.eta0 = 0.01;
    cfg.max_epochs = 0;
    CHECK_THROWS_AS(validate_config(cfg), ConfigError);
    cfg.max_epochs = 10;
    cfg.eta_policy.kind = EtaPolicyKind::JangAdaptive;
    cfg.eta_policy.up_factor = 0.9;
    CHECK_THROWS_AS(validate_config(cfg), ConfigError);
    cfg.eta_policy.up_factor = 1.1;
    cfg.eta_policy.down_factor = 1.5;
    CHECK_THROWS_AS(validate_config(cfg), ConfigError);
    cfg.eta_policy.down_factor = 0.9;
    CHECK_NOTHROW(validate_config(cfg));
}
