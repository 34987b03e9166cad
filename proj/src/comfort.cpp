#include "heatctl/comfort.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace heatctl {

void ComfortInputs::validate() const {
    if (!(met >= 0.8 && met <= 4.0))
        throw std::invalid_argument("ComfortInputs: met must be in [0.8, 4]");
    if (!(clo >= 0.0 && clo <= 2.0))
        throw std::invalid_argument("ComfortInputs: clo must be in [0, 2]");
    if (!(air_speed_ms >= 0.0))
        throw std::invalid_argument("ComfortInputs: air speed must be >= 0");
    if (!(rel_humidity_pct >= 0.0 && rel_humidity_pct <= 100.0))
        throw std::invalid_argument("ComfortInputs: relative humidity must be in [0, 100]");
}

double pmv(const ComfortInputs& in) {
    in.validate();
    const double ta = in.air_temp_c;
    const double tr = in.radiant_temp_c;

    // Water vapour partial pressure, Pa.
    const double pa = in.rel_humidity_pct * 10.0 * std::exp(16.6536 - 4030.183 / (ta + 235.0));

    const double icl = 0.155 * in.clo;  // clothing resistance, m2K/W
    const double m = in.met * 58.15;    // metabolic rate, W/m2
    const double mw = m;                // no external work
    const double fcl = icl <= 0.078 ? 1.0 + 1.29 * icl : 1.05 + 0.645 * icl;
    const double hcf = 12.1 * std::sqrt(in.air_speed_ms);  // forced convection
    const double taa = ta + 273.0;
    const double tra = tr + 273.0;

    // Clothing surface temperature by substitution iteration.
    double tcla = taa + (35.5 - ta) / (3.5 * icl + 0.1);
    const double p1 = icl * fcl;
    const double p2 = p1 * 3.96;
    const double p3 = p1 * 100.0;
    const double p4 = p1 * taa;
    const double p5 = 308.7 - 0.028 * mw + p2 * std::pow(tra / 100.0, 4);
    double xn = tcla / 100.0;
    double xf = tcla / 50.0;
    double hc = hcf;
    int iterations = 0;
    while (std::abs(xn - xf) > 0.00015) {
        xf = 0.5 * (xf + xn);
        const double hcn = 2.38 * std::pow(std::abs(100.0 * xf - taa), 0.25);
        hc = std::max(hcf, hcn);
        xn = (p5 + p4 * hc - p2 * xf * xf * xf * xf) / (100.0 + p3 * hc);
        if (++iterations > 150)
            throw std::runtime_error("pmv: clothing temperature iteration did not converge");
    }
    const double tcl = 100.0 * xn - 273.0;

    const double hl1 = 3.05e-3 * (5733.0 - 6.99 * mw - pa);        // skin diffusion
    const double hl2 = mw > 58.15 ? 0.42 * (mw - 58.15) : 0.0;     // sweating
    const double hl3 = 1.7e-5 * m * (5867.0 - pa);                  // latent respiration
    const double hl4 = 0.0014 * m * (34.0 - ta);                    // dry respiration
    const double hl5 = 3.96 * fcl * (xn * xn * xn * xn - std::pow(tra / 100.0, 4));  // radiation
    const double hl6 = fcl * hc * (tcl - ta);                       // convection

    const double sensitivity = 0.303 * std::exp(-0.036 * m) + 0.028;
    return sensitivity * (mw - hl1 - hl2 - hl3 - hl4 - hl5 - hl6);
}

double ppd(double pmv_value) {
    const double p2 = pmv_value * pmv_value;
    return 100.0 - 95.0 * std::exp(-(0.03353 * p2 * p2 + 0.2179 * p2));
}

}  // namespace heatctl
