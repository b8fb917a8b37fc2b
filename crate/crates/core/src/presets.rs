//! Default parameter sets, initial states and evaluation windows per case.
//!
//! The defaults put every conditional family on its linearizability locus
//! (the "unless ..." parameter relation) with an initial state that realizes
//! the matching integration constants; the negative-control presets move the
//! parameters generically off that locus while keeping the trajectory inside
//! the domain guards.

use crate::systems::{Params, State, SystemId};

/// Default (preset) parameters for a family.
pub fn default_params(id: SystemId) -> Params {
    match id {
        SystemId::PerlickI => Params::of(id, &[("k", 0.8), ("A", 0.3)]),
        // B = 2 w^2 (lambda^2 - delta^2) with the preset w = 1
        SystemId::PerlickII => Params::of(id, &[("lambda", 0.5), ("delta", 0.3), ("B", 0.32)]),
        SystemId::TaubNut => Params::of(id, &[("eta", 0.7), ("alpha", 0.4)]),
        // w0 = 0 preset makes the closure constant vanish alongside b2 = 0
        SystemId::DI1 => Params::of(id, &[("b1", -1.0), ("b2", 0.0), ("b3", -1.0)]),
        // a1 + a2 w0 = 0 with w0 = 2
        SystemId::DI2 => Params::of(id, &[("a1", -2.0), ("a2", 1.0), ("a3", -0.5)]),
        // 4a + w0^2 = 0 with w0 = 2
        SystemId::DI3 => Params::of(id, &[("a", -1.0)]),
        SystemId::DIIA => Params::of(id, &[("a1", 1.0), ("a2", 0.4), ("a3", 2.0)]),
        // alt-reduction condition b2 = 2 (b1 - b3) w0 - b1 with w0 = 3
        SystemId::DIIB => Params::of(id, &[("b1", 1.3), ("b2", 4.1), ("b3", 0.4)]),
        SystemId::DIIC => Params::of(id, &[("a1", 0.5), ("a2", 0.8), ("a3", 0.6)]),
        // d = -w0^2 with w0 = 1
        SystemId::DIID => Params::of(id, &[("d", -1.0)]),
        SystemId::DIIIA => Params::of(id, &[("a1", 0.4), ("a2", 1.0), ("a3", 0.5)]),
        SystemId::DIIIB => Params::of(id, &[("b1", 0.7), ("b2", 0.5), ("b3", 0.3)]),
        SystemId::DIIIC => Params::of(id, &[("c1", 0.9), ("c2", 0.5), ("c3", 0.4)]),
        SystemId::DIIID => Params::of(id, &[("d1", 0.6), ("d2", 0.8), ("d3", 0.5)]),
        SystemId::DIIIE => Params::of(id, &[("c", 0.7)]),
        SystemId::DIVA => Params::of(id, &[("a", 5.0), ("a1", 0.4), ("a2", 0.3), ("a3", 0.6)]),
        SystemId::DIVB => Params::of(id, &[("a", 5.0), ("b1", 0.5), ("b2", 0.3), ("b3", 0.7)]),
        SystemId::DIVC => Params::of(id, &[("a", 5.0), ("c1", 0.4), ("c2", 0.3), ("c3", 0.2)]),
        SystemId::DIVD => Params::of(id, &[("a", 5.0), ("d", 0.4)]),
    }
}

/// Default initial state (interior, reduction coordinate monotone on the span).
pub fn default_initial_state(id: SystemId) -> State {
    match id {
        SystemId::PerlickI => State::new(1.0, 0.0, 0.2, 1.2),
        SystemId::PerlickII => State::new(1.0, 0.0, 0.1, 1.0),
        SystemId::TaubNut => State::new(1.2, 0.0, 0.1, 1.1),
        // p_v chosen so the closure constant matches the preset w0
        SystemId::DI1 => State::new(1.0, 1.0, 0.2, (5.0f64).sqrt()),
        SystemId::DI2 => State::new(1.0, 1.0, 0.3, (6.0f64).sqrt()),
        SystemId::DI3 => State::new(1.0, 0.0, 0.2, 2.0),
        SystemId::DIIA => State::new(1.0, 0.5, 1.5, 0.3),
        // w4 realizes the closure constant w0 = 3 at w2 = 1
        SystemId::DIIB => State::new(1.1, 1.0, 0.4, 3.7f64.sqrt()),
        SystemId::DIIC => State::new(1.1, 1.0, 0.6, 1.0),
        SystemId::DIID => State::new(1.1, 0.2, 0.4, 1.0),
        SystemId::DIIIA => State::new(0.8, 0.5, 1.0, 1.2),
        SystemId::DIIIB => State::new(1.0, 0.9, 0.8, 1.1),
        SystemId::DIIIC => State::new(1.2, 0.5, 0.7, 0.9),
        SystemId::DIIID => State::new(1.2, 0.5, 0.7, 0.9),
        SystemId::DIIIE => State::new(0.8, 0.5, 1.0, 1.2),
        SystemId::DIVA => State::new(1.0, 0.9, 0.5, 0.8),
        SystemId::DIVB => State::new(0.7, 0.8, 0.5, 0.9),
        SystemId::DIVC => State::new(0.7, 0.8, 0.5, 0.9),
        SystemId::DIVD => State::new(1.0, 0.9, 0.5, 0.8),
    }
}
