#include "anfis/mf.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>

#include "anfis/errors.hpp"

namespace anfis {

namespace {

constexpr double kDegenerateWidth = 1e-300;

double sigmoid(double a, double c, double x) {
    return 1.0 / (1.0 + std::exp(-a * (x - c)));
}

// MATLAB smf-style half spline rising from 0 at a to 1 at b.
double s_shape(double x, double a, double b) {
    if (b - a < kDegenerateWidth) return x >= 0.5 * (a + b) ? 1.0 : 0.0;
    if (x <= a) return 0.0;
    if (x >= b) return 1.0;
    const double m = 0.5 * (a + b);
    if (x <= m) {
        const double r = (x - a) / (b - a);
        return 2.0 * r * r;
    }
    const double s = (x - b) / (b - a);
    return 1.0 - 2.0 * s * s;
}

// (dS/da, dS/db); 0 at spline joints and outside [a, b].
void s_shape_grads(double x, double a, double b, double& da, double& db) {
    da = db = 0.0;
    if (b - a < kDegenerateWidth) return;
    if (x <= a || x >= b) return;
    const double m = 0.5 * (a + b);
    const double w2 = (b - a) * (b - a);
    if (x == m) return;
    if (x < m) {
        const double r = (x - a) / (b - a);
        da = 4.0 * r * (x - b) / w2;
        db = -4.0 * r * (x - a) / w2;
    } else {
        const double s = (x - b) / (b - a);
        da = -4.0 * s * (x - b) / w2;
        db = 4.0 * s * (x - a) / w2;
    }
}

double ramp_up(double x, double a, double b) {
    // 0 at a rising to 1 at b; step behaviour for degenerate width.
    if (b - a < kDegenerateWidth) return x >= b ? 1.0 : 0.0;
    return (x - a) / (b - a);
}

double gauss(double x, double c, double sigma) {
    const double z = (x - c) / sigma;
    return std::exp(-0.5 * z * z);
}

} // namespace

const char* family_name(MfFamily family) {
    switch (family) {
        case MfFamily::Gaussian: return "gaussmf";
        case MfFamily::Triangular: return "trimf";
        case MfFamily::Trapezoidal: return "trapmf";
        case MfFamily::GeneralizedBell: return "gbellmf";
        case MfFamily::PiShaped: return "pimf";
        case MfFamily::SigmoidDifference: return "dsigmf";
        case MfFamily::SigmoidProduct: return "psigmf";
        case MfFamily::TwoSidedGaussian: return "gauss2mf";
    }
    throw ParamError("unknown membership family");
}

MfFamily family_from_name(std::string_view name) {
    for (MfFamily f : all_families())
        if (name == family_name(f)) return f;
    throw ParamError("unknown membership family name: " + std::string(name));
}

int family_arity(MfFamily family) {
    switch (family) {
        case MfFamily::Gaussian: return 2;
        case MfFamily::Triangular:
        case MfFamily::GeneralizedBell: return 3;
        default: return 4;
    }
}

const std::vector<MfFamily>& all_families() {
    static const std::vector<MfFamily> fams = {
        MfFamily::Gaussian,          MfFamily::Triangular,
        MfFamily::Trapezoidal,       MfFamily::GeneralizedBell,
        MfFamily::PiShaped,          MfFamily::SigmoidDifference,
        MfFamily::SigmoidProduct,    MfFamily::TwoSidedGaussian,
    };
    return fams;
}

void validate_mf(const MembershipFunction& mf) {
    const auto& p = mf.params;
    if (static_cast<int>(p.size()) != family_arity(mf.family))
        throw ParamError(std::string(family_name(mf.family)) + ": expected " +
                         std::to_string(family_arity(mf.family)) +
                         " parameters, got " + std::to_string(p.size()));
    for (double v : p)
        if (!std::isfinite(v)) throw ParamError("non-finite MF parameter");

    switch (mf.family) {
        case MfFamily::Gaussian:
            if (p[1] <= 0.0) throw ParamError("gaussmf: sigma must be > 0");
            break;
        case MfFamily::Triangular:
            if (!(p[0] <= p[1] && p[1] <= p[2]) || !(p[0] < p[2]))
                throw ParamError("trimf: requires a <= b <= c, a < c");
            break;
        case MfFamily::Trapezoidal:
            if (!(p[0] <= p[1] && p[1] <= p[2] && p[2] <= p[3]) || !(p[0] < p[3]))
                throw ParamError("trapmf: requires a <= b <= c <= d, a < d");
            break;
        case MfFamily::GeneralizedBell:
            if (p[0] <= 0.0) throw ParamError("gbellmf: a must be > 0");
            if (p[1] <= 0.0) throw ParamError("gbellmf: b must be > 0");
            break;
        case MfFamily::PiShaped:
            if (!(p[0] <= p[1] && p[1] <= p[2] && p[2] <= p[3]))
                throw ParamError("pimf: requires a <= b <= c <= d");
            break;
        case MfFamily::SigmoidDifference:
        case MfFamily::SigmoidProduct:
            break;
        case MfFamily::TwoSidedGaussian:
            if (p[0] <= 0.0 || p[2] <= 0.0)
                throw ParamError("gauss2mf: sigmas must be > 0");
            if (p[1] > p[3]) throw ParamError("gauss2mf: requires c1 <= c2");
            break;
    }
}

double eval_mf(const MembershipFunction& mf, double x) {
    validate_mf(mf);
    const auto& p = mf.params;
    switch (mf.family) {
        case MfFamily::Gaussian:
            return gauss(x, p[0], p[1]);
        case MfFamily::Triangular: {
            const double a = p[0], b = p[1], c = p[2];
            if (x <= a || x >= c) return x == b ? 1.0 : 0.0;
            if (x <= b) return ramp_up(x, a, b);
            return 1.0 - ramp_up(x, b, c);
        }
        case MfFamily::Trapezoidal: {
            const double a = p[0], b = p[1], c = p[2], d = p[3];
            if (x <= a || x >= d) return (x >= b && x <= c) ? 1.0 : 0.0;
            if (x < b) return ramp_up(x, a, b);
            if (x <= c) return 1.0;
            return 1.0 - ramp_up(x, c, d);
        }
        case MfFamily::GeneralizedBell: {
            const double a = p[0], b = p[1], c = p[2];
            const double u = ((x - c) / a) * ((x - c) / a);
            return 1.0 / (1.0 + std::pow(u, b));
        }
        case MfFamily::PiShaped:
            return s_shape(x, p[0], p[1]) * (1.0 - s_shape(x, p[2], p[3]));
        case MfFamily::SigmoidDifference: {
            const double v = sigmoid(p[0], p[1], x) - sigmoid(p[2], p[3], x);
            return std::clamp(v, 0.0, 1.0);
        }
        case MfFamily::SigmoidProduct:
            return sigmoid(p[0], p[1], x) * sigmoid(p[2], p[3], x);
        case MfFamily::TwoSidedGaussian: {
            const double left = x < p[1] ? gauss(x, p[1], p[0]) : 1.0;
            const double right = x > p[3] ? gauss(x, p[3], p[2]) : 1.0;
            return left * right;
        }
    }
    throw ParamError("unknown membership family");
}

std::vector<double> mf_param_gradients(const MembershipFunction& mf, double x) {
    validate_mf(mf);
    const auto& p = mf.params;
    std::vector<double> g(p.size(), 0.0);
    switch (mf.family) {
        case MfFamily::Gaussian: {
            const double c = p[0], s = p[1];
            const double mu = gauss(x, c, s);
            g[0] = mu * (x - c) / (s * s);
            g[1] = mu * (x - c) * (x - c) / (s * s * s);
            break;
        }
        case MfFamily::Triangular: {
            const double a = p[0], b = p[1], c = p[2];
            if (x > a && x < b) {
                const double w2 = (b - a) * (b - a);
                g[0] = (x - b) / w2;
                g[1] = -(x - a) / w2;
            } else if (x > b && x < c) {
                const double w2 = (c - b) * (c - b);
                g[1] = (c - x) / w2;
                g[2] = (x - b) / w2;
            }
            break;
        }
        case MfFamily::Trapezoidal: {
            const double a = p[0], b = p[1], c = p[2], d = p[3];
            if (x > a && x < b) {
                const double w2 = (b - a) * (b - a);
                g[0] = (x - b) / w2;
                g[1] = -(x - a) / w2;
            } else if (x > c && x < d) {
                const double w2 = (d - c) * (d - c);
                g[2] = (d - x) / w2;
                g[3] = (x - c) / w2;
            }
            break;
        }
        case MfFamily::GeneralizedBell: {
            const double a = p[0], b = p[1], c = p[2];
            const double u = ((x - c) / a) * ((x - c) / a);
            if (u <= 0.0) break; // peak: all partials vanish
            const double ub = std::pow(u, b);
            const double mu = 1.0 / (1.0 + ub);
            g[0] = 2.0 * b * ub * mu * mu / a;
            g[1] = -mu * mu * ub * std::log(u);
            g[2] = 2.0 * b * std::pow(u, b - 1.0) * (x - c) / (a * a) * mu * mu;
            break;
        }
        case MfFamily::PiShaped: {
            const double rise = s_shape(x, p[0], p[1]);
            const double fall = 1.0 - s_shape(x, p[2], p[3]);
            double da, db, dc, dd;
            s_shape_grads(x, p[0], p[1], da, db);
            s_shape_grads(x, p[2], p[3], dc, dd);
            g[0] = da * fall;
            g[1] = db * fall;
            g[2] = -rise * dc;
            g[3] = -rise * dd;
            break;
        }
        case MfFamily::SigmoidDifference: {
            const double g1 = sigmoid(p[0], p[1], x);
            const double g2 = sigmoid(p[2], p[3], x);
            if (g1 - g2 < 0.0) break; // clamped region
            g[0] = g1 * (1.0 - g1) * (x - p[1]);
            g[1] = -p[0] * g1 * (1.0 - g1);
            g[2] = -g2 * (1.0 - g2) * (x - p[3]);
            g[3] = p[2] * g2 * (1.0 - g2);
            break;
        }
        case MfFamily::SigmoidProduct: {
            const double g1 = sigmoid(p[0], p[1], x);
            const double g2 = sigmoid(p[2], p[3], x);
            g[0] = g1 * (1.0 - g1) * (x - p[1]) * g2;
            g[1] = -p[0] * g1 * (1.0 - g1) * g2;
            g[2] = g1 * g2 * (1.0 - g2) * (x - p[3]);
            g[3] = -g1 * p[2] * g2 * (1.0 - g2);
            break;
        }
        case MfFamily::TwoSidedGaussian: {
            const double s1 = p[0], c1 = p[1], s2 = p[2], c2 = p[3];
            const double left = x < c1 ? gauss(x, c1, s1) : 1.0;
            const double right = x > c2 ? gauss(x, c2, s2) : 1.0;
            if (x < c1) {
                g[0] = left * (x - c1) * (x - c1) / (s1 * s1 * s1) * right;
                g[1] = left * (x - c1) / (s1 * s1) * right;
            }
            if (x > c2) {
                g[2] = left * right * (x - c2) * (x - c2) / (s2 * s2 * s2);
                g[3] = left * right * (x - c2) / (s2 * s2);
            }
            break;
        }
    }
    return g;
}

namespace {

// Offset o such that the symmetric sigmoid pair centered at +-o reaches
// degree 0.5 at distance half from the center. Monotone in o, bisected.
double solve_sigmoid_offset(double slope, double half, bool product) {
    auto value_at_crossover = [&](double o) {
        const double x = -half; // relative to center
        if (product)
            return sigmoid(slope, -o, x) * sigmoid(-slope, o, x);
        return sigmoid(slope, -o, x) - sigmoid(slope, o, x);
    };
    double lo = half, hi = 4.0 * half;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (value_at_crossover(mid) < 0.5)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

} // namespace

std::vector<MembershipFunction> init_grid(double lo, double hi, int count,
                                          MfFamily family) {
    if (count < 2) throw ConfigError("init_grid: need at least 2 MFs");
    if (!(lo < hi)) throw ConfigError("init_grid: requires lo < hi");
    const double d = (hi - lo) / (count - 1);

    std::vector<MembershipFunction> out;
    out.reserve(count);
    for (int k = 0; k < count; ++k) {
        const double c = lo + k * d;
        MembershipFunction mf;
        mf.family = family;
        switch (family) {
            case MfFamily::Gaussian:
                // exp(-(d/2)^2 / (2 sigma^2)) = 0.5
                mf.params = {c, d / (2.0 * std::sqrt(2.0 * std::log(2.0)))};
                break;
            case MfFamily::Triangular:
                mf.params = {c - d, c, c + d};
                break;
            case MfFamily::Trapezoidal:
                // ramp midpoints sit at c +- d/2
                mf.params = {c - 0.75 * d, c - 0.25 * d, c + 0.25 * d,
                             c + 0.75 * d};
                break;
            case MfFamily::GeneralizedBell:
                // half-width at half height is the first parameter
                mf.params = {0.5 * d, 2.0, c};
                break;
            case MfFamily::PiShaped:
                mf.params = {c - 0.75 * d, c - 0.25 * d, c + 0.25 * d,
                             c + 0.75 * d};
                break;
            case MfFamily::SigmoidDifference: {
                const double a = 9.0 / d;
                const double o = solve_sigmoid_offset(a, 0.5 * d, false);
                mf.params = {a, c - o, a, c + o};
                break;
            }
            case MfFamily::SigmoidProduct: {
                const double a = 9.0 / d;
                const double o = solve_sigmoid_offset(a, 0.5 * d, true);
                mf.params = {a, c - o, -a, c + o};
                break;
            }
            case MfFamily::TwoSidedGaussian: {
                // plateau of width d/2, tails crossing at 0.5 at c +- d/2
                const double s = 0.25 * d / std::sqrt(2.0 * std::log(2.0));
                mf.params = {s, c - 0.25 * d, s, c + 0.25 * d};
                break;
            }
        }
        validate_mf(mf);
        out.push_back(std::move(mf));
    }
    return out;
}

} // namespace anfis
