#pragma once

#include <string>
#include <vector>

#include "anfis/dataset.hpp"

namespace anfis {

// Delay series sampled on the uniform grid t = 0, h, 2h, ...
struct MgSeries {
    double step = 0.1;
    double tau = 17.0;
    double x0 = 1.2;
    std::vector<double> values;

    double horizon() const { return step * (values.size() - 1); }
    // x at integer time t (t * step must land on the grid).
    double at_time(double t) const;
};

// Integrates dx/dt = 0.2 x(t - tau) / (1 + x(t - tau)^10) - 0.1 x(t) with
// classical RK4; the delayed value is read from the stored grid, linearly
// interpolated at half-steps. History is x(t) = x0 for t <= 0.
MgSeries mackey_glass(double tau = 17.0, double horizon = 2000.0,
                      double h = 0.1, double x0 = 1.2);

// CSV `t,x` at integer t.
void save_mg_csv(const MgSeries& series, const std::string& path);
MgSeries load_mg_csv(const std::string& path);

// One row per valid integer t: inputs x(t + lag) per lag, target
// x(t + horizon); rows in increasing t.
Dataset embed(const MgSeries& series, const std::vector<int>& lags = {-12, -6, 0},
              int horizon = 6);

// Cartesian grid sampling of f(x,y,z) = (1 + x^0.5 + 1/y + z^-1.5)^2, a
// stand-in three-variable benchmark on positive bounds.
Dataset synth_benchmark(double lo, double hi, int points_per_dim);

} // namespace anfis
