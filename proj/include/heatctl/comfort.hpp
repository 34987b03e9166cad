#pragma once

namespace heatctl {

struct ComfortInputs {
    double air_temp_c;
    double radiant_temp_c;
    double rel_humidity_pct;
    double air_speed_ms;
    double met;  // metabolic rate, met
    double clo;  // clothing insulation, clo

    void validate() const;
};

/// Fanger predicted mean vote via the standard heat-balance iteration for
/// the clothing surface temperature. Throws std::runtime_error if the
/// iteration has not converged after 150 steps.
double pmv(const ComfortInputs& in);

/// Predicted percentage dissatisfied:
/// 100 - 95 exp(-(0.03353 pmv^4 + 0.2179 pmv^2)). Minimum 5% at pmv = 0.
double ppd(double pmv_value);

}  // namespace heatctl
