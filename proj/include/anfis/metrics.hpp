#pragma once

#include <Eigen/Dense>
#include <string>

namespace anfis {

// Eq1 carries the 1/(2P) factor inside the root and equals Standard / sqrt(2).
enum class RmseForm { Eq1, Standard };

double rmse(const Eigen::VectorXd& y_obs, const Eigen::VectorXd& y_model,
            RmseForm form);

// Fraction of the observed variance removed by the model; negative for fits
// worse than the mean.
double r_squared(const Eigen::VectorXd& y_obs, const Eigen::VectorXd& y_model);

struct EvalReport {
    double rmse_eq1 = 0.0;
    double rmse_std = 0.0;
    double r2 = 0.0;
    Eigen::Index n = 0;
};

EvalReport evaluate(const Eigen::VectorXd& y_obs,
                    const Eigen::VectorXd& y_model);

// CSV `observed,predicted` preceded by a metadata comment line carrying R^2.
void parity_export(const Eigen::VectorXd& y_obs, const Eigen::VectorXd& y_model,
                   const std::string& path);

} // namespace anfis
