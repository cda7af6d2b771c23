#include "anfis/mackey_glass.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "anfis/errors.hpp"

namespace anfis {

namespace {

double mg_rhs(double x_delayed, double x) {
    const double d10 = std::pow(x_delayed, 10.0);
    return 0.2 * x_delayed / (1.0 + d10) - 0.1 * x;
}

bool near_integer(double v, double tol = 1e-9) {
    return std::abs(v - std::round(v)) < tol;
}

} // namespace

double MgSeries::at_time(double t) const {
    const double idx = t / step;
    if (!near_integer(idx))
        throw ConfigError("time does not land on the series grid");
    const auto i = static_cast<std::size_t>(std::llround(idx));
    if (i >= values.size()) throw ConfigError("time beyond series horizon");
    return values[i];
}

MgSeries mackey_glass(double tau, double horizon, double h, double x0) {
    if (h <= 0.0 || !near_integer(1.0 / h))
        throw ConfigError("mackey_glass: h must divide 1");
    if (!near_integer(tau / h) || tau <= 0.0)
        throw ConfigError("mackey_glass: tau/h must be a positive integer");
    if (horizon <= 0.0) throw ConfigError("mackey_glass: horizon must be > 0");

    const auto steps = static_cast<std::size_t>(std::ceil(horizon / h - 1e-9));
    MgSeries series;
    series.step = h;
    series.tau = tau;
    series.x0 = x0;
    series.values.resize(steps + 1);
    series.values[0] = x0;

    // Delayed value at continuous time t; constant history before t = 0.
    auto delayed = [&](double t) {
        const double td = t - tau;
        if (td <= 0.0) return x0;
        const double pos = td / h;
        const auto lo = static_cast<std::size_t>(std::floor(pos + 1e-9));
        const double frac = pos - static_cast<double>(lo);
        if (frac < 1e-9) return series.values[lo];
        return (1.0 - frac) * series.values[lo] + frac * series.values[lo + 1];
    };

    for (std::size_t i = 0; i < steps; ++i) {
        const double t = static_cast<double>(i) * h;
        const double x = series.values[i];
        const double k1 = mg_rhs(delayed(t), x);
        const double k2 = mg_rhs(delayed(t + 0.5 * h), x + 0.5 * h * k1);
        const double k3 = mg_rhs(delayed(t + 0.5 * h), x + 0.5 * h * k2);
        const double k4 = mg_rhs(delayed(t + h), x + h * k3);
        series.values[i + 1] = x + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        if (!std::isfinite(series.values[i + 1]))
            throw NumericError("mackey_glass: integration diverged");
    }
    return series;
}

void save_mg_csv(const MgSeries& series, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write series file: " + path);
    out.precision(17);
    out << "t,x\n";
    const auto stride = static_cast<std::size_t>(std::llround(1.0 / series.step));
    for (std::size_t i = 0; i < series.values.size(); i += stride)
        out << i / stride << ',' << series.values[i] << '\n';
    if (!out) throw IoError("series write failed: " + path);
}

MgSeries load_mg_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IngestError("cannot open series file: " + path);
    std::string line;
    if (!std::getline(in, line) || line.rfind("t,x", 0) != 0)
        throw IngestError("series file missing 't,x' header: " + path);
    MgSeries series;
    series.step = 1.0;
    std::size_t expected_t = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string t_cell, x_cell;
        if (!std::getline(ss, t_cell, ',') || !std::getline(ss, x_cell))
            throw IngestError("malformed series row: " + line);
        if (std::stoull(t_cell) != expected_t)
            throw IngestError("series rows must carry consecutive integer t");
        series.values.push_back(std::stod(x_cell));
        ++expected_t;
    }
    if (series.values.empty()) throw IngestError("empty series file: " + path);
    series.x0 = series.values.front();
    return series;
}

Dataset embed(const MgSeries& series, const std::vector<int>& lags,
              int horizon) {
    if (lags.empty()) throw ConfigError("embed: need at least one lag");
    if (horizon <= 0) throw ConfigError("embed: horizon must be positive");
    const auto stride = static_cast<std::size_t>(std::llround(1.0 / series.step));
    if (!near_integer(1.0 / series.step))
        throw ConfigError("embed: series step must divide 1");
    const int t_max =
        static_cast<int>((series.values.size() - 1) / stride);
    const int min_lag = *std::min_element(lags.begin(), lags.end());
    const int max_lag = *std::max_element(lags.begin(), lags.end());
    const int first_t = std::max(0, -min_lag);
    const int last_t = t_max - std::max(horizon, max_lag);
    if (last_t < first_t)
        throw ConfigError("embed: series too short for requested lags");

    auto name_for = [](int offset) {
        std::ostringstream os;
        os << "x(t";
        if (offset < 0) os << offset;
        if (offset > 0) os << '+' << offset;
        os << ')';
        return os.str();
    };

    Dataset ds;
    for (int lag : lags) ds.input_names.push_back(name_for(lag));
    ds.target_name = name_for(horizon);
    const Eigen::Index rows = last_t - first_t + 1;
    ds.inputs.resize(rows, static_cast<Eigen::Index>(lags.size()));
    ds.targets.resize(rows);
    for (int t = first_t; t <= last_t; ++t) {
        const Eigen::Index r = t - first_t;
        for (std::size_t j = 0; j < lags.size(); ++j)
            ds.inputs(r, static_cast<Eigen::Index>(j)) =
                series.values[static_cast<std::size_t>(t + lags[j]) * stride];
        ds.targets(r) = series.values[static_cast<std::size_t>(t + horizon) * stride];
    }
    return ds;
}

Dataset synth_benchmark(double lo, double hi, int points_per_dim) {
    if (!(lo > 0.0) || !(hi > lo))
        throw ConfigError("synth_benchmark: bounds must satisfy 0 < lo < hi");
    if (points_per_dim < 2)
        throw ConfigError("synth_benchmark: need at least 2 points per dim");

    auto f = [](double x, double y, double z) {
        const double s = 1.0 + std::sqrt(x) + 1.0 / y + std::pow(z, -1.5);
        return s * s;
    };

    const int n = points_per_dim;
    const double d = (hi - lo) / (n - 1);
    Dataset ds;
    ds.input_names = {"x", "y", "z"};
    ds.target_name = "f";
    const Eigen::Index rows = static_cast<Eigen::Index>(n) * n * n;
    ds.inputs.resize(rows, 3);
    ds.targets.resize(rows);
    Eigen::Index r = 0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k) {
                const double x = lo + i * d;
                const double y = lo + j * d;
                const double z = lo + k * d;
                ds.inputs(r, 0) = x;
                ds.inputs(r, 1) = y;
                ds.inputs(r, 2) = z;
                ds.targets(r) = f(x, y, z);
                ++r;
            }
    return ds;
}

} // namespace anfis
