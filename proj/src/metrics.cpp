#include "anfis/metrics.hpp"

#include <cmath>
#include <fstream>

#include "anfis/errors.hpp"

namespace anfis {

namespace {

void check_pair(const Eigen::VectorXd& y_obs, const Eigen::VectorXd& y_model) {
    if (y_obs.size() != y_model.size())
        throw ShapeError("metrics: vector length mismatch");
    if (y_obs.size() == 0) throw ShapeError("metrics: empty vectors");
}

} // namespace

double rmse(const Eigen::VectorXd& y_obs, const Eigen::VectorXd& y_model,
            RmseForm form) {
    check_pair(y_obs, y_model);
    const double sse = (y_obs - y_model).squaredNorm();
    const double p = static_cast<double>(y_obs.size());
    const double denom = form == RmseForm::Eq1 ? 2.0 * p : p;
    return std::sqrt(sse / denom);
}

double r_squared(const Eigen::VectorXd& y_obs, const Eigen::VectorXd& y_model) {
    check_pair(y_obs, y_model);
    if (y_obs.size() < 2) throw ShapeError("r_squared: need at least 2 points");
    const double mean = y_obs.mean();
    const double ss_tot = (y_obs.array() - mean).matrix().squaredNorm();
    if (ss_tot <= 0.0)
        throw NumericError("r_squared: observed values are constant");
    const double ss_res = (y_obs - y_model).squaredNorm();
    return (ss_tot - ss_res) / ss_tot;
}

EvalReport evaluate(const Eigen::VectorXd& y_obs,
                    const Eigen::VectorXd& y_model) {
    EvalReport rep;
    rep.n = y_obs.size();
    rep.rmse_std = rmse(y_obs, y_model, RmseForm::Standard);
    rep.rmse_eq1 = rmse(y_obs, y_model, RmseForm::Eq1);
    rep.r2 = r_squared(y_obs, y_model);
    return rep;
}

void parity_export(const Eigen::VectorXd& y_obs, const Eigen::VectorXd& y_model,
                   const std::string& path) {
    check_pair(y_obs, y_model);
    std::ofstream out(path);
    if (!out) throw IoError("cannot write parity file: " + path);
    out.precision(17);
    out << "# r_squared=" << r_squared(y_obs, y_model) << '\n';
    out << "observed,predicted\n";
    for (Eigen::Index i = 0; i < y_obs.size(); ++i)
        out << y_obs(i) << ',' << y_model(i) << '\n';
    if (!out) throw IoError("parity write failed: " + path);
}

} // namespace anfis
