#pragma once

// Hysteretic phase kinetics and strain law for an SMA wire held under a
// constant bias stress. Temperatures in degrees Celsius, stress in MPa.

namespace unimorph {

struct MaterialParams {
    // Zero-stress transformation temperatures.
    double austenite_start_0 = 39.0;
    double austenite_finish_0 = 68.0;
    double martensite_start_0 = 37.0;
    double martensite_finish_0 = 13.0;
    double stress_coeff_austenite = 8.0;  // MPa / degC
    double stress_coeff_martensite = 8.0; // MPa / degC
    double max_recoverable_strain = 0.013;
    double latent_heat = 0.0;     // J / kg
    double density = 6450.0;      // kg / m^3
    double specific_heat = 837.0; // J / (kg degC)
    double wire_resistivity = 3.7e-7; // Ohm m

    /// Throws std::invalid_argument when an invariant is violated.
    void validate() const;
};

/// Stress-shifted transformation temperatures.
struct TransitionBand {
    double austenite_start = 0.0;
    double austenite_finish = 0.0;
    double martensite_start = 0.0;
    double martensite_finish = 0.0;

    [[nodiscard]] bool ordered() const;
};

enum class Branch { idle, heating, cooling };

/// Martensite fraction and the bookkeeping needed for minor loops.
/// xi = 1 is fully detwinned martensite (wire at rest length), xi = 0 is
/// austenite (fully contracted).
struct PhaseState {
    double martensite_fraction = 1.0;
    double last_temperature = 22.0;
    Branch branch = Branch::idle;
    double branch_entry_fraction = 1.0;
    double branch_entry_temperature = 22.0;

    static PhaseState at_rest(double temperature);
};

/// Linear Clausius-Clapeyron shift T_x(sigma) = T_x0 + sigma / C_x.
TransitionBand transition_band(const MaterialParams& params, double stress_mpa);

/// Advances the phase state to a new wire temperature using cosine kinetics.
/// A reversal of the temperature direction restarts the active branch from
/// the current fraction so that minor loops stay continuous.
PhaseState update_phase_fraction(const PhaseState& state, double new_temperature,
                                 const TransitionBand& band);

/// Contraction of the wire from its rest length, in metres.
double wire_contraction(const PhaseState& state, double rest_length,
                        const MaterialParams& params);

} // namespace unimorph
