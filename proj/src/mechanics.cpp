#include "unimorph/mechanics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace unimorph {

void BeamGeometry::update_gain() { geometric_gain = beam_length / (2.0 * wire_offset); }

void BeamGeometry::validate() const {
    if (!(beam_length > 0.0 && beam_width > 0.0 && beam_thickness > 0.0 && wire_offset > 0.0 &&
          load_compliance > 0.0)) {
        throw std::invalid_argument("beam: geometry and compliance must be positive");
    }
    const double expected = beam_length / (2.0 * wire_offset);
    if (std::abs(geometric_gain - expected) > 1e-9 * expected) {
        throw std::invalid_argument("beam: geometric_gain inconsistent with length and offset");
    }
}

void SpringBias::validate() const {
    if (!(bias_stress > 0.0 && constant_force_threshold > 0.0)) {
        throw std::invalid_argument("bias: stress and threshold must be positive");
    }
}

void LoadSchedule::validate() const {
    if (!(hook_thread_weight >= 0.0 && first_bead_weight > 0.0 && increment_weight > 0.0)) {
        throw std::invalid_argument("loads: weights must be positive");
    }
    if (std::abs(hook_thread_weight + first_bead_weight - increment_weight) >
        1e-9 * increment_weight) {
        throw std::invalid_argument("loads: hook/thread plus first bead must equal one increment");
    }
    if (max_beads < 0) {
        throw std::invalid_argument("loads: max_beads must be non-negative");
    }
}

double tip_deflection(double contraction, double load, const BeamGeometry& geom) {
    if (contraction < 0.0 || load < 0.0) {
        throw std::invalid_argument("tip_deflection: contraction and load must be non-negative");
    }
    return std::max(0.0, geom.geometric_gain * contraction - geom.load_compliance * load);
}

double wire_stress(double load, const SpringBias& bias, const BeamGeometry& geom,
                   double wire_area_total) {
    if (load < 0.0 || !(wire_area_total > 0.0)) {
        throw std::invalid_argument("wire_stress: load must be >= 0 and area positive");
    }
    return bias.bias_stress + load * geom.geometric_gain / wire_area_total * 1e-6;
}

double load_for_beads(int n, const LoadSchedule& schedule) {
    if (n < 0 || n > schedule.max_beads) {
        throw std::out_of_range("load_for_beads: " + std::to_string(n) +
                                " beads is outside the protocol (max " +
                                std::to_string(schedule.max_beads) + ")");
    }
    // The first bead is trimmed so that bead n always totals n increments.
    return n * schedule.increment_weight;
}

} // namespace unimorph
