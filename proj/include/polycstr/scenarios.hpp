#pragma once

// The three benchmark control scenarios. Each one starts the reactor at an
// equilibrium and asks the controller to move to (or hold) new setpoints.

#include <optional>
#include <stdexcept>
#include <string>

#include "polycstr/reactor.hpp"

namespace polycstr {

struct ScenarioConfig {
    std::string name;

    // Setpoints the episode tracks.
    double c_p_setpoint = 0.0;  // kg/m3
    double t_setpoint = 0.0;    // K

    // Where the episode starts: either an explicit control pair whose steady
    // state is the initial condition, or a previous operating point given as
    // (polymer, temperature) targets.
    std::optional<ControlInputs> init_controls;
    std::optional<std::pair<double, double>> init_operating_point;

    void validate() const {
        if (name.empty()) throw std::invalid_argument("scenario: empty name");
        if (!(c_p_setpoint >= 0.0) || !(t_setpoint > 0.0))
            throw std::invalid_argument("scenario: bad setpoints");
        if (!init_controls && !init_operating_point)
            throw std::invalid_argument("scenario: no initial condition given");
    }

    // Initial equilibrium (controls + state) for the given reactor.
    OperatingPoint initial_equilibrium(const ReactorParams& p) const {
        validate();
        if (init_operating_point) {
            return find_operating_point(init_operating_point->first,
                                        init_operating_point->second, p);
        }
        // Closed-form dilution state as the guess, then polish.
        ReactorState guess;
        const double f_vol = p.flow_volumetric(init_controls->F_I);
        guess.C_M = p.F_M / f_vol;
        guess.C_I = init_controls->F_I / f_vol;
        guess.C_R = 0.0;
        guess.C_P = 0.0;
        const double f = p.dilution_rate(init_controls->F_I);
        const double ua = p.jacket_rate();
        guess.T = (f * p.T_f + ua * init_controls->T_c) / (f + ua);
        return {*init_controls, solve_steady_state(*init_controls, p, guess)};
    }
};

// Startup: clean reactor, no initiator flow, bring polymer from 0 to
// 100 kg/m3 holding 350 K.
inline ScenarioConfig scenario_startup() {
    ScenarioConfig c;
    c.name = "startup";
    c.c_p_setpoint = 100.0;
    c.t_setpoint = 350.0;
    c.init_controls = ControlInputs{0.0, 350.0};
    return c;
}

// Grade change down: from the (100 kg/m3, 350 K) operating point to
// (90 kg/m3, 355 K).
inline ScenarioConfig scenario_grade_down() {
    ScenarioConfig c;
    c.name = "grade_down";
    c.c_p_setpoint = 90.0;
    c.t_setpoint = 355.0;
    c.init_operating_point = {{100.0, 350.0}};
    return c;
}

// Grade change up: the reverse move.
inline ScenarioConfig scenario_grade_up() {
    ScenarioConfig c;
    c.name = "grade_up";
    c.c_p_setpoint = 100.0;
    c.t_setpoint = 350.0;
    c.init_operating_point = {{90.0, 355.0}};
    return c;
}

inline ScenarioConfig scenario_by_name(const std::string& name) {
    if (name == "startup") return scenario_startup();
    if (name == "grade_down") return scenario_grade_down();
    if (name == "grade_up") return scenario_grade_up();
    throw std::invalid_argument("unknown scenario: " + name);
}

}  // namespace polycstr
