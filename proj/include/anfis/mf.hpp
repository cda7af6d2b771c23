#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace anfis {

// Families named after the MATLAB fuzzy-toolbox notations used for
// serialization and CLI flags.
enum class MfFamily {
    Gaussian,          // gaussmf   (c, sigma)
    Triangular,        // trimf     (a, b, c)
    Trapezoidal,       // trapmf    (a, b, c, d)
    GeneralizedBell,   // gbellmf   (a, b, c)
    PiShaped,          // pimf      (a, b, c, d)
    SigmoidDifference, // dsigmf    (a1, c1, a2, c2)
    SigmoidProduct,    // psigmf    (a1, c1, a2, c2)
    TwoSidedGaussian,  // gauss2mf  (sigma1, c1, sigma2, c2)
};

const char* family_name(MfFamily family);
MfFamily family_from_name(std::string_view name);
int family_arity(MfFamily family);
const std::vector<MfFamily>& all_families();

struct MembershipFunction {
    MfFamily family = MfFamily::Gaussian;
    std::vector<double> params;
};

// Throws ParamError on wrong arity or violated ordering constraints.
void validate_mf(const MembershipFunction& mf);

// Membership degree, guaranteed in [0, 1] for valid parameters.
double eval_mf(const MembershipFunction& mf, double x);

// Partial derivatives of eval_mf w.r.t. each parameter, in declared order.
// Kinks (triangular peak, trapezoid corners, spline joints) return the
// subgradient choice 0.
std::vector<double> mf_param_gradients(const MembershipFunction& mf, double x);

struct FuzzyVariable {
    std::string name;
    double lo = 0.0;
    double hi = 1.0;
    std::vector<MembershipFunction> mfs;
};

// Equally spaced centers over [lo, hi]; widths chosen so adjacent functions
// cross at degree 0.5 halfway between centers, which gives epsilon-
// completeness with epsilon = 0.5 over the whole range.
std::vector<MembershipFunction> init_grid(double lo, double hi, int count,
                                          MfFamily family);

} // namespace anfis
