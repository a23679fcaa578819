#include "unimorph/material.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace unimorph {

namespace {

// Fraction of the martensite that survives heating to T, measured from As.
double heating_shape(double t, const TransitionBand& band) {
    const double width = band.austenite_finish - band.austenite_start;
    const double u = std::clamp((t - band.austenite_start) / width, 0.0, 1.0);
    return 0.5 * (1.0 + std::cos(std::numbers::pi * u));
}

// Fraction of the austenite that survives cooling to T, measured from Ms.
double cooling_shape(double t, const TransitionBand& band) {
    const double width = band.martensite_start - band.martensite_finish;
    const double u = std::clamp((band.martensite_start - t) / width, 0.0, 1.0);
    return 0.5 * (1.0 + std::cos(std::numbers::pi * u));
}

} // namespace

void MaterialParams::validate() const {
    if (!(martensite_finish_0 < martensite_start_0 && martensite_start_0 <= austenite_start_0 &&
          austenite_start_0 < austenite_finish_0)) {
        throw std::invalid_argument("material: transformation temperatures must satisfy "
                                    "Mf < Ms <= As < Af");
    }
    if (!(max_recoverable_strain > 0.0 && max_recoverable_strain < 0.1)) {
        throw std::invalid_argument("material: max_recoverable_strain must lie in (0, 0.1)");
    }
    if (!(stress_coeff_austenite > 0.0 && stress_coeff_martensite > 0.0)) {
        throw std::invalid_argument("material: stress coefficients must be positive");
    }
    if (latent_heat < 0.0) {
        throw std::invalid_argument("material: latent_heat must be non-negative");
    }
    if (!(density > 0.0 && specific_heat > 0.0 && wire_resistivity > 0.0)) {
        throw std::invalid_argument("material: density, specific_heat and resistivity must be positive");
    }
}

bool TransitionBand::ordered() const {
    return martensite_finish < martensite_start && martensite_start <= austenite_start &&
           austenite_start < austenite_finish;
}

PhaseState PhaseState::at_rest(double temperature) {
    PhaseState s;
    s.martensite_fraction = 1.0;
    s.last_temperature = temperature;
    s.branch = Branch::idle;
    s.branch_entry_fraction = 1.0;
    s.branch_entry_temperature = temperature;
    return s;
}

TransitionBand transition_band(const MaterialParams& params, double stress_mpa) {
    if (stress_mpa < 0.0) {
        throw std::invalid_argument("transition_band: stress must be non-negative");
    }
    const double shift_a = stress_mpa / params.stress_coeff_austenite;
    const double shift_m = stress_mpa / params.stress_coeff_martensite;
    return TransitionBand{params.austenite_start_0 + shift_a, params.austenite_finish_0 + shift_a,
                          params.martensite_start_0 + shift_m, params.martensite_finish_0 + shift_m};
}

PhaseState update_phase_fraction(const PhaseState& state, double new_temperature,
                                 const TransitionBand& band) {
    PhaseState next = state;
    const double dt = new_temperature - state.last_temperature;
    double xi = state.martensite_fraction;

    if (dt > 0.0) {
        if (state.branch != Branch::heating) {
            next.branch = Branch::heating;
            next.branch_entry_fraction = xi;
            next.branch_entry_temperature = state.last_temperature;
        }
        if (new_temperature > band.austenite_start) {
            const double entry_t = std::max(next.branch_entry_temperature, band.austenite_start);
            const double reference = heating_shape(entry_t, band);
            if (reference > 0.0) {
                const double target =
                    next.branch_entry_fraction * heating_shape(new_temperature, band) / reference;
                xi = std::min(xi, target);
            } else {
                xi = 0.0;
            }
        }
    } else if (dt < 0.0) {
        if (state.branch != Branch::cooling) {
            next.branch = Branch::cooling;
            next.branch_entry_fraction = xi;
            next.branch_entry_temperature = state.last_temperature;
        }
        if (new_temperature < band.martensite_start) {
            const double entry_t = std::min(next.branch_entry_temperature, band.martensite_start);
            const double reference = cooling_shape(entry_t, band);
            if (reference > 0.0) {
                const double target = 1.0 - (1.0 - next.branch_entry_fraction) *
                                                 cooling_shape(new_temperature, band) / reference;
                xi = std::max(xi, target);
            } else {
                xi = 1.0;
            }
        }
    }

    if (new_temperature >= band.austenite_finish) {
        xi = 0.0;
    } else if (new_temperature <= band.martensite_finish) {
        xi = 1.0;
    }
    next.martensite_fraction = std::clamp(xi, 0.0, 1.0);
    next.last_temperature = new_temperature;
    return next;
}

double wire_contraction(const PhaseState& state, double rest_length, const MaterialParams& params) {
    if (!(rest_length > 0.0)) {
        throw std::invalid_argument("wire_contraction: rest_length must be positive");
    }
    return params.max_recoverable_strain * rest_length * (1.0 - state.martensite_fraction);
}

} // namespace unimorph
