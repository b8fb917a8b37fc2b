//! Catalog of the nineteen superintegrable Hamiltonians.
//!
//! Each family carries its Hamiltonian (written once, generically, so the
//! same formula evaluates on `f64` and on jets), explicit Hamilton equations,
//! a parameter schema, domain guards, and the conserved momentum (plain
//! cyclic momentum or the closure constant that replaces it).
//!
//! The explicit right-hand sides are cross-checked against the jet
//! symplectic gradient (q̇ = ∂H/∂p, ṗ = −∂H/∂q) in the test suite; that
//! comparison doubles as a transcription test of every Hamilton system.

use crate::jet::{Jet, Real};
use std::collections::BTreeMap;

/// The nineteen systems, in catalog order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SystemId {
    PerlickI,
    PerlickII,
    TaubNut,
    DI1,
    DI2,
    DI3,
    DIIA,
    DIIB,
    DIIC,
    DIID,
    DIIIA,
    DIIIB,
    DIIIC,
    DIIID,
    DIIIE,
    DIVA,
    DIVB,
    DIVC,
    DIVD,
}

pub const ALL_SYSTEMS: [SystemId; 19] = [
    SystemId::PerlickI,
    SystemId::PerlickII,
    SystemId::TaubNut,
    SystemId::DI1,
    SystemId::DI2,
    SystemId::DI3,
    SystemId::DIIA,
    SystemId::DIIB,
    SystemId::DIIC,
    SystemId::DIID,
    SystemId::DIIIA,
    SystemId::DIIIB,
    SystemId::DIIIC,
    SystemId::DIIID,
    SystemId::DIIIE,
    SystemId::DIVA,
    SystemId::DIVB,
    SystemId::DIVC,
    SystemId::DIVD,
];

/// Ordered list of the nineteen system ids.
pub fn list_systems() -> Vec<SystemId> {
    ALL_SYSTEMS.to_vec()
}

#[derive(Debug, Clone, thiserror::Error)]
pub enum SystemError {
    #[error("unknown system id `{0}`")]
    UnknownId(String),
    #[error("parameter `{0}` missing for system {1}")]
    MissingParam(String, String),
    #[error("unexpected parameter `{0}` for system {1}")]
    UnknownParam(String, String),
    #[error("state violates domain guard: {0}")]
    DomainViolation(String),
    #[error("{0} has no plain cyclic momentum; use the momentum closure instead")]
    NoCyclicMomentum(String),
}

impl SystemId {
    /// Stable key used by the CLI, config files and reports.
    pub fn key(&self) -> &'static str {
        match self {
            SystemId::PerlickI => "perlick_i",
            SystemId::PerlickII => "perlick_ii",
            SystemId::TaubNut => "taub_nut",
            SystemId::DI1 => "dI_1",
            SystemId::DI2 => "dI_2",
            SystemId::DI3 => "dI_3",
            SystemId::DIIA => "dII_a",
            SystemId::DIIB => "dII_b",
            SystemId::DIIC => "dII_c",
            SystemId::DIID => "dII_d",
            SystemId::DIIIA => "dIII_a",
            SystemId::DIIIB => "dIII_b",
            SystemId::DIIIC => "dIII_c",
            SystemId::DIIID => "dIII_d",
            SystemId::DIIIE => "dIII_e",
            SystemId::DIVA => "dIV_a",
            SystemId::DIVB => "dIV_b",
            SystemId::DIVC => "dIV_c",
            SystemId::DIVD => "dIV_d",
        }
    }

    pub fn from_key(key: &str) -> Result<SystemId, SystemError> {
        ALL_SYSTEMS
            .iter()
            .copied()
            .find(|s| s.key() == key)
            .ok_or_else(|| SystemError::UnknownId(key.to_string()))
    }

    /// Parameter schema (order fixed per family).
    pub fn param_names(&self) -> &'static [&'static str] {
        match self {
            SystemId::PerlickI => &["k", "A"],
            SystemId::PerlickII => &["lambda", "delta", "B"],
            SystemId::TaubNut => &["eta", "alpha"],
            SystemId::DI1 => &["b1", "b2", "b3"],
            SystemId::DI2 => &["a1", "a2", "a3"],
            SystemId::DI3 => &["a"],
            SystemId::DIIA => &["a1", "a2", "a3"],
            SystemId::DIIB => &["b1", "b2", "b3"],
            SystemId::DIIC => &["a1", "a2", "a3"],
            SystemId::DIID => &["d"],
            SystemId::DIIIA => &["a1", "a2", "a3"],
            SystemId::DIIIB => &["b1", "b2", "b3"],
            SystemId::DIIIC => &["c1", "c2", "c3"],
            SystemId::DIIID => &["d1", "d2", "d3"],
            SystemId::DIIIE => &["c"],
            SystemId::DIVA => &["a", "a1", "a2", "a3"],
            SystemId::DIVB => &["a", "b1", "b2", "b3"],
            SystemId::DIVC => &["a", "c1", "c2", "c3"],
            SystemId::DIVD => &["a", "d"],
        }
    }

    /// Coordinate and momentum labels, for trace headers.
    pub fn coord_names(&self) -> [&'static str; 4] {
        match self {
            SystemId::PerlickI | SystemId::PerlickII => ["r", "theta", "p_r", "p_theta"],
            SystemId::TaubNut => ["r", "phi", "p_r", "p_phi"],
            SystemId::DI1 | SystemId::DI2 | SystemId::DI3 => ["u", "v", "p_u", "p_v"],
            _ => ["w1", "w2", "w3", "w4"],
        }
    }
}

/// Phase-space point: two coordinates, two conjugate momenta.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct State {
    pub q: [f64; 2],
    pub p: [f64; 2],
}

impl State {
    pub fn new(q1: f64, q2: f64, p1: f64, p2: f64) -> State {
        State { q: [q1, q2], p: [p1, p2] }
    }

    pub fn to_vec(&self) -> [f64; 4] {
        [self.q[0], self.q[1], self.p[0], self.p[1]]
    }

    pub fn from_slice(v: &[f64]) -> State {
        State { q: [v[0], v[1]], p: [v[2], v[3]] }
    }
}

/// Named parameter set, validated against a family schema.
#[derive(Debug, Clone, PartialEq)]
pub struct Params {
    values: BTreeMap<String, f64>,
}

impl Params {
    pub fn new(id: SystemId, values: BTreeMap<String, f64>) -> Result<Params, SystemError> {
        let names = id.param_names();
        for n in names {
            if !values.contains_key(*n) {
                return Err(SystemError::MissingParam(n.to_string(), id.key().to_string()));
            }
        }
        for k in values.keys() {
            if !names.contains(&k.as_str()) {
                return Err(SystemError::UnknownParam(k.clone(), id.key().to_string()));
            }
        }
        Ok(Params { values })
    }

    pub fn of(id: SystemId, vals: &[(&str, f64)]) -> Params {
        let map = vals.iter().map(|(k, v)| (k.to_string(), *v)).collect();
        Params::new(id, map).expect("bad parameter set")
    }

    pub fn get(&self, name: &str) -> f64 {
        *self.values.get(name).unwrap_or_else(|| panic!("parameter `{name}` not bound"))
    }

    pub fn values(&self) -> &BTreeMap<String, f64> {
        &self.values
    }

    /// Parameters in schema order.
    pub fn resolve(&self, id: SystemId) -> Vec<f64> {
        id.param_names().iter().map(|n| self.get(n)).collect()
    }
}

fn sinh<T: Real>(x: &T) -> T {
    (x.exp() - (-x.clone()).exp()) * 0.5
}

fn cosh<T: Real>(x: &T) -> T {
    (x.exp() + (-x.clone()).exp()) * 0.5
}

/// Generic Hamiltonian evaluation; `pv` in schema order.
pub fn hamiltonian_generic<T: Real>(id: SystemId, pv: &[f64], q1: T, q2: T, p1: T, p2: T) -> T {
    let kin = p1.clone() * p1.clone() + p2.clone() * p2.clone();
    match id {
        SystemId::PerlickI => {
            let (k, a) = (pv[0], pv[1]);
            let r2 = q1.clone() * q1.clone();
            let conf = (r2.clone() * k + 1.0).powi(2);
            conf * 0.5 * (p1.clone() * p1 + p2.clone() * p2 / r2.clone())
                + (r2 * (-k) + 1.0) / q1 * a
        }
        SystemId::PerlickII => {
            let (lam, del, b) = (pv[0], pv[1], pv[2]);
            let r2 = q1.clone() * q1;
            let r4 = r2.clone() * r2.clone();
            let f = r4.clone() * (-lam * lam) + 1.0;
            let g = r4 * (lam * lam) - r2.clone() * (2.0 * del) + 1.0;
            f.clone() * f / g.clone() * 0.5 * (p1.clone() * p1 + p2.clone() * p2 / r2.clone())
                + r2 / g * b
        }
        SystemId::TaubNut => {
            let (eta, alpha) = (pv[0], pv[1]);
            let r2 = q1.clone() * q1.clone();
            q1.clone() / (q1.clone() + eta) * 0.5 * (p1.clone() * p1 + p2.clone() * p2 / r2)
                - (q1 + eta).recip() * alpha
        }
        SystemId::DI1 => {
            let (b1, b2, b3) = (pv[0], pv[1], pv[2]);
            let v2 = q2.clone() * q2;
            kin / (q1.clone() * 4.0)
                + (q1.clone() * q1.clone() * 4.0 + v2.clone()) / (q1.clone() * 4.0) * b1
                + q1.clone().recip() * b2
                + (q1 * v2).recip() * b3
        }
        SystemId::DI2 => {
            let (a1, a2, a3) = (pv[0], pv[1], pv[2]);
            kin / (q1.clone() * 4.0)
                + q1.clone().recip() * a1
                + q2.clone() / q1.clone() * a2
                + (q1.clone() * q1.clone() + q2.clone() * q2) / q1 * a3
        }
        SystemId::DI3 => {
            let a = pv[0];
            kin / (q1.clone() * 4.0) + q1.recip() * a
        }
        SystemId::DIIA => {
            let (a1, a2, a3) = (pv[0], pv[1], pv[2]);
            let w1s = q1.clone() * q1;
            w1s.clone() / (w1s.clone() + 1.0)
                * (kin
                    + (w1s.clone() * 0.25 + q2.clone() * q2.clone()) * a1
                    + q2 * a2
                    + w1s.recip() * a3)
        }
        SystemId::DIIB => {
            let (b1, b2, b3) = (pv[0], pv[1], pv[2]);
            let w1s = q1.clone() * q1;
            let w2s = q2.clone() * q2;
            w1s.clone() / (w1s.clone() + 1.0)
                * (kin + (w1s.clone() + w2s.clone()) * b1 + w1s.recip() * b2 + w2s.recip() * b3)
        }
        SystemId::DIIC => {
            let (a1, a2, a3) = (pv[0], pv[1], pv[2]);
            let w1s = q1.clone() * q1;
            let w2s = q2.clone() * q2;
            (kin + w1s.clone().recip() * a2 + w2s.clone().recip() * a3 + a1)
                / (w1s.clone() + w2s.clone() + w1s.recip() + w2s.recip())
        }
        SystemId::DIID => {
            let d = pv[0];
            let w1s = q1.clone() * q1;
            w1s.clone() / (w1s + 1.0) * (kin + d)
        }
        SystemId::DIIIA => {
            let (a1, a2, a3) = (pv[0], pv[1], pv[2]);
            (kin + q1.clone() * a1 + q2.clone() * a2 + a3)
                / (q1.clone() * q1 + q2.clone() * q2 + 4.0)
        }
        SystemId::DIIIB => {
            let (b1, b2, b3) = (pv[0], pv[1], pv[2]);
            let w1s = q1.clone() * q1;
            let w2s = q2.clone() * q2;
            (kin + w1s.clone().recip() * b1 + w2s.clone().recip() * b2 + b3) / (w1s + w2s + 4.0)
        }
        SystemId::DIIIC => {
            let (c1, c2, c3) = (pv[0], pv[1], pv[2]);
            let w1s = q1.clone() * q1.clone();
            let w2s = q2.clone() * q2.clone();
            let num = w1s.clone() * p1.clone() * p1 - w2s.clone() * p2.clone() * p2
                + (q1.clone() + q2.clone()) * c1
                + (q1.clone() + q2.clone()) / (q1.clone() * q2.clone()) * c2
                + (w1s.clone() - w2s.clone()) / (w1s * w2s) * c3;
            num / ((q1.clone() + q2.clone()) * (q1 - q2 + 2.0))
        }
        SystemId::DIIID => {
            let (d1, d2, d3) = (pv[0], pv[1], pv[2]);
            let num = q1.clone() * q1.clone() * p1.clone() * p1
                - q2.clone() * q2.clone() * p2.clone() * p2
                + q1.clone() * d1
                + q2.clone() * d2
                + (q1.clone() * q1.clone() + q2.clone() * q2.clone()) * d3;
            num / ((q1.clone() + q2.clone()) * (q1 - q2 + 2.0))
        }
        SystemId::DIIIE => {
            let c = pv[0];
            (kin + c) / (q1.clone() * q1 + q2.clone() * q2 + 4.0)
        }
        SystemId::DIVA => {
            let (a, a1, a2, a3) = (pv[0], pv[1], pv[2], pv[3]);
            let w1s = q1.clone() * q1;
            let w2s = q2.clone() * q2;
            let num = kin
                + (w1s.clone().recip() + w2s.clone().recip()) * a2
                + (w1s.clone() + w2s.clone()) * a3
                + a1;
            -(w1s.clone() * w2s.clone() * num) * 4.0 / (w1s * (a + 2.0) + w2s * (a - 2.0))
        }
        SystemId::DIVB => {
            let (a, b1, b2, b3) = (pv[0], pv[1], pv[2], pv[3]);
            let s2 = (q1.clone() * 2.0).sin();
            let c2 = (q1 * 2.0).cos();
            let sh = sinh(&q2);
            let ch = cosh(&q2);
            let num = s2.clone() * s2
                * (kin + (sh.clone() * sh).recip() * b2 + (ch.clone() * ch).recip() * b3)
                + b1;
            -num / (c2 * 2.0 + a)
        }
        SystemId::DIVC => {
            let (a, c1, c2, c3) = (pv[0], pv[1], pv[2], pv[3]);
            let sw = q1.sin();
            let cw = q1.cos();
            let ch = cosh(&q2);
            let sh = sinh(&q2);
            let s2w2 = sinh(&(q2 * 2.0));
            let s2w1 = (q1 * 2.0).sin();
            let num = kin
                + (cw.clone() * cw).recip() * c1
                + (ch.clone() * ch).recip() * c2
                + ((sw.clone() * sw).recip() - (sh.clone() * sh).recip()) * c3;
            let den = (s2w2.clone() * s2w2).recip() * (a + 2.0) + (s2w1.clone() * s2w1).recip() * (a - 2.0);
            -num / den
        }
        SystemId::DIVD => {
            let (a, d) = (pv[0], pv[1]);
            let w1s = q1.clone() * q1;
            let w2s = q2.clone() * q2;
            let num = kin + (w1s.clone().recip() + w2s.clone().recip()) * d;
            -(w1s.clone() * w2s.clone() * num) * 4.0 / (w1s * (a + 2.0) + w2s * (a - 2.0))
        }
    }
}

/// Evaluate the Hamiltonian at a state.
pub fn hamiltonian(id: SystemId, params: &Params, s: &State) -> f64 {
    let pv = params.resolve(id);
    hamiltonian_generic(id, &pv, s.q[0], s.q[1], s.p[0], s.p[1])
}

/// Symplectic gradient through jets: (q̇₁, q̇₂, ṗ₁, ṗ₂) = (H_p1, H_p2, −H_q1, −H_q2).
pub fn hamilton_rhs_via_jets(id: SystemId, params: &Params, s: &State) -> [f64; 4] {
    let pv = params.resolve(id);
    let q1 = Jet::seed(0, s.q[0], 4, 1);
    let q2 = Jet::seed(1, s.q[1], 4, 1);
    let p1 = Jet::seed(2, s.p[0], 4, 1);
    let p2 = Jet::seed(3, s.p[1], 4, 1);
    let h = hamiltonian_generic(id, &pv, q1, q2, p1, p2);
    [
        h.partial(&[0, 0, 1, 0]),
        h.partial(&[0, 0, 0, 1]),
        -h.partial(&[1, 0, 0, 0]),
        -h.partial(&[0, 1, 0, 0]),
    ]
}

/// Explicit Hamilton equations.
///
/// These are the displayed right-hand sides of each Hamilton system, with the
/// handful of misprints fixed so that they agree with the symplectic gradient
/// (the test suite asserts the agreement, and separately flags the misprinted
/// displays). The two trigonometric/hyperbolic families carry no displayed
/// Hamilton system, so the jet gradient is used directly there.
pub fn hamilton_rhs(id: SystemId, params: &Params, s: &State) -> [f64; 4] {
    let pv = params.resolve(id);
    let [q1, q2, p1, p2] = [s.q[0], s.q[1], s.p[0], s.p[1]];
    match id {
        SystemId::PerlickI => {
            let (k, a) = (pv[0], pv[1]);
            let r = q1;
            let conf = 1.0 + k * r * r;
            [
                p1 * conf * conf,
                p2 * conf * conf / (r * r),
                ((1.0 - k * r * r) * p2 * p2 - 2.0 * k * r.powi(4) * p1 * p1 + a * r) * conf / r.powi(3),
                0.0,
            ]
        }
        SystemId::PerlickII => {
            let (lam, del, b) = (pv[0], pv[1], pv[2]);
            let r = q1;
            let r2 = r * r;
            let r4 = r2 * r2;
            let f = 1.0 - lam * lam * r4;
            let g = 1.0 + lam * lam * r4 - 2.0 * del * r2;
            let lam_blk = lam.powi(4) * r2 * r4 + 3.0 * lam * lam * r2 - del - 3.0 * del * lam * lam * r4;
            let sig_blk = 1.0 + lam.powi(4) * r4 * r4 + 6.0 * lam * lam * r4
                - 4.0 * del * lam * lam * r4 * r2
                - 4.0 * del * r2;
            [
                p1 * f * f / g,
                p2 * f * f / (r2 * g),
                // displayed prefactor carries 2r^2 p_r^2; the gradient gives 2r^4 p_r^2
                f / (r.powi(3) * g * g) * (2.0 * r4 * p1 * p1 * lam_blk + p2 * p2 * sig_blk - 2.0 * b * r4),
                0.0,
            ]
        }
        SystemId::TaubNut => {
            let (eta, alpha) = (pv[0], pv[1]);
            let r = q1;
            [
                r * p1 / (eta + r),
                p2 / ((eta + r) * r),
                -(2.0 * (alpha * r - p2 * p2) * r + eta * (r * r * p1 * p1 - p2 * p2))
                    / (2.0 * (eta + r) * (eta + r) * r * r),
                0.0,
            ]
        }
        SystemId::DI1 => {
            let (b1, b2, b3) = (pv[0], pv[1], pv[2]);
            let (u, v) = (q1, q2);
            [
                p1 / (2.0 * u),
                p2 / (2.0 * u),
                (v * v * (p1 * p1 + p2 * p2) + b1 * v * v * (v * v - 4.0 * u * u) + 4.0 * b2 * v * v + 4.0 * b3)
                    / (4.0 * u * u * v * v),
                (4.0 * b3 - b1 * v.powi(4)) / (2.0 * u * v.powi(3)),
            ]
        }
        SystemId::DI2 => {
            let (a1, a2, a3) = (pv[0], pv[1], pv[2]);
            let (u, v) = (q1, q2);
            [
                p1 / (2.0 * u),
                p2 / (2.0 * u),
                // displayed shows 4 a2 v^2; the gradient gives 4 a2 v
                (p1 * p1 + p2 * p2 + 4.0 * a1 + 4.0 * a2 * v - 4.0 * a3 * (u * u - v * v)) / (4.0 * u * u),
                -(a2 + 2.0 * a3 * v) / u,
            ]
        }
        SystemId::DI3 => {
            let a = pv[0];
            let u = q1;
            [
                p1 / (2.0 * u),
                p2 / (2.0 * u),
                (4.0 * a + p1 * p1 + p2 * p2) / (4.0 * u * u),
                0.0,
            ]
        }
        SystemId::DIIA => {
            let (a1, a2, a3) = (pv[0], pv[1], pv[2]);
            let (w1, w2) = (q1, q2);
            let d = w1 * w1 + 1.0;
            [
                2.0 * w1 * w1 * p1 / d,
                2.0 * w1 * w1 * p2 / d,
                -w1 * (4.0 * p1 * p1 + 4.0 * p2 * p2
                    + a1 * w1.powi(4)
                    + 2.0 * a1 * w1 * w1
                    + 4.0 * a1 * w2 * w2
                    + 4.0 * a2 * w2
                    - 4.0 * a3)
                    / (2.0 * d * d),
                -w1 * w1 * (2.0 * a1 * w2 + a2) / d,
            ]
        }
        SystemId::DIIB => {
            let (b1, b2, b3) = (pv[0], pv[1], pv[2]);
            let (w1, w2) = (q1, q2);
            let d = w1 * w1 + 1.0;
            [
                2.0 * w1 * w1 * p1 / d,
                2.0 * w1 * w1 * p2 / d,
                -2.0 * w1
                    * (w2 * w2 * p1 * p1 + w2 * w2 * p2 * p2
                        + b1 * w1.powi(4) * w2 * w2
                        + 2.0 * b1 * w1 * w1 * w2 * w2
                        + b1 * w2.powi(4)
                        - b2 * w2 * w2
                        + b3)
                    / (w2 * w2 * d * d),
                -2.0 * w1 * w1 * (b1 * w2.powi(4) - b3) / (w2.powi(3) * d),
            ]
        }
        SystemId::DIIC => {
            let (a1, a2, a3) = (pv[0], pv[1], pv[2]);
            let (w1, w2) = (q1, q2);
            let m = w1 * w1 * w2 * w2 + 1.0;
            let sq = w1 * w1 + w2 * w2;
            let kin = p1 * p1 + p2 * p2;
            [
                2.0 * w1 * w1 * w2 * w2 * p1 / (m * sq),
                2.0 * w1 * w1 * w2 * w2 * p2 / (m * sq),
                2.0 * w1 * w2 * w2
                    * ((a1 * w2 * w2 + a3 + kin * w2 * w2) * (w1.powi(4) - 1.0)
                        + (w2.powi(4) + 1.0 + 2.0 * w1 * w1 * w2 * w2) * a2)
                    / (m * m * sq * sq),
                2.0 * w1 * w1 * w2
                    * ((a1 * w1 * w1 + a2 + kin * w1 * w1) * (w2.powi(4) - 1.0)
                        + (w1.powi(4) + 2.0 * w1 * w1 * w2 * w2 + 1.0) * a3)
                    / (m * m * sq * sq),
            ]
        }
        SystemId::DIID => {
            let d = pv[0];
            let w1 = q1;
            let den = w1 * w1 + 1.0;
            [
                2.0 * w1 * w1 * p1 / den,
                2.0 * w1 * w1 * p2 / den,
                -2.0 * w1 * (p1 * p1 + p2 * p2 + d) / (den * den),
                0.0,
            ]
        }
        SystemId::DIIIA => {
            let (a1, a2, a3) = (pv[0], pv[1], pv[2]);
            let (w1, w2) = (q1, q2);
            let d = w1 * w1 + w2 * w2 + 4.0;
            let kin = p1 * p1 + p2 * p2;
            [
                2.0 * p1 / d,
                2.0 * p2 / d,
                (2.0 * a2 * w1 * w2 + a1 * (w1 * w1 - w2 * w2 - 4.0) + 2.0 * a3 * w1 + 2.0 * w1 * kin) / (d * d),
                // displayed shows -a2 (w1^2 - w2^2 - 4); the gradient gives -a2 (w1^2 - w2^2 + 4)
                (2.0 * a1 * w1 * w2 - a2 * (w1 * w1 - w2 * w2 + 4.0) + 2.0 * a3 * w2 + 2.0 * w2 * kin) / (d * d),
            ]
        }
        SystemId::DIIIB => {
            let (b1, b2, b3) = (pv[0], pv[1], pv[2]);
            let (w1, w2) = (q1, q2);
            let d = w1 * w1 + w2 * w2 + 4.0;
            let kin = p1 * p1 + p2 * p2;
            [
                2.0 * p1 / d,
                2.0 * p2 / d,
                2.0 * ((b2 + b3 * w2 * w2 + kin * w2 * w2) * w1.powi(4)
                    + (w2 * w2 + 4.0 + 2.0 * w1 * w1) * b1 * w2 * w2)
                    / (d * d * w1.powi(3) * w2 * w2),
                2.0 * ((b1 + b3 * w1 * w1 + kin * w1 * w1) * w2.powi(4)
                    + (2.0 * (w2 * w2 + 2.0) + w1 * w1) * b2 * w1 * w1)
                    / (d * d * w1 * w1 * w2.powi(3)),
            ]
        }
        SystemId::DIIIC => {
            let (c1, c2, c3) = (pv[0], pv[1], pv[2]);
            let (w1, w2) = (q1, q2);
            let s = w1 + w2;
            let t = 2.0 + w1 - w2;
            let kin1 = p1 * p1;
            let kin2 = p2 * p2;
            [
                2.0 * w1 * w1 * p1 / (s * t),
                -2.0 * w2 * w2 * p2 / (s * t),
                2.0 * ((kin1 - kin2) * w1 * w2 * w2 - 2.0 * kin1 * w1 * w2 - w1 * w1 * kin1 - w2 * w2 * kin2)
                    / (s * s * t * t)
                    + c1 / (t * t)
                    + c2 * (2.0 * w1 - w2 + 2.0) / (t * t * w1 * w1 * w2)
                    + 2.0 * c3 * (w1 * w1 - 2.0 * w1 * w2 + w1 + w2 * w2 - 2.0 * w2)
                        / (t * t * w1.powi(3) * w2 * w2),
                -2.0 * ((kin1 - kin2) * w1 * w1 * w2 - kin1 * w1 * w1 - (2.0 * w1 + w2) * w2 * kin2)
                    / (s * s * t * t)
                    - c1 / (t * t)
                    + c2 * (w1 - 2.0 * w2 + 2.0) / (t * t * w1 * w2 * w2)
                    + 2.0 * c3 * (w1 * w1 - 2.0 * w1 * w2 + 2.0 * w1 + w2 * w2 - w2)
                        / (t * t * w1 * w1 * w2.powi(3)),
            ]
        }
        SystemId::DIIID => {
            let (d1, d2, d3) = (pv[0], pv[1], pv[2]);
            let (w1, w2) = (q1, q2);
            let s = w1 + w2;
            let t = 2.0 + w1 - w2;
            let kin1 = p1 * p1;
            let kin2 = p2 * p2;
            [
                2.0 * w1 * w1 * p1 / (s * t),
                -2.0 * w2 * w2 * p2 / (s * t),
                (2.0 * (w1 * w2 * w2 * (kin1 - kin2) - 2.0 * w1 * w2 * kin1 - w2 * w2 * kin2 - w1 * w1 * kin1)
                    + d1 * (w1 * w1 + w2 * w2 - 2.0 * w2)
                    + 2.0 * d2 * w2 * (w1 + 1.0)
                    + 2.0 * d3 * (w2 * w2 - w1 * w1 + 2.0 * w1 * w2 * w2 - 2.0 * w1 * w2))
                    / (s * s * t * t),
                (2.0 * (w1 * w1 * w2 * (kin2 - kin1) + 2.0 * w1 * w2 * kin2 + w2 * w2 * kin2 + w1 * w1 * kin1)
                    + 2.0 * d1 * w1 * (1.0 - w2)
                    - d2 * (w1 * w1 + w2 * w2 + 2.0 * w1)
                    - 2.0 * d3 * (w2 * w2 - w1 * w1 + 2.0 * w1 * w1 * w2 + 2.0 * w1 * w2))
                    / (s * s * t * t),
            ]
        }
        SystemId::DIIIE => {
            let c = pv[0];
            let (w1, w2) = (q1, q2);
            let d = w1 * w1 + w2 * w2 + 4.0;
            [
                2.0 * p1 / d,
                2.0 * p2 / d,
                2.0 * w1 * (c + p1 * p1 + p2 * p2) / (d * d),
                2.0 * w2 * (c + p1 * p1 + p2 * p2) / (d * d),
            ]
        }
        SystemId::DIVA => {
            let (a, a1, a2, a3) = (pv[0], pv[1], pv[2], pv[3]);
            let (w1, w2) = (q1, q2);
            let den = a * (w1 * w1 + w2 * w2) + 2.0 * (w1 * w1 - w2 * w2);
            let kin = p1 * p1 + p2 * p2;
            let sq = w1 * w1 + w2 * w2;
            [
                -8.0 * w1 * w1 * w2 * w2 * p1 / den,
                -8.0 * w1 * w1 * w2 * w2 * p2 / den,
                8.0 * w1 * w2 * w2 / (den * den)
                    * (a * a3 * sq * sq + a * w2 * w2 * kin + a1 * w2 * w2 * (a - 2.0) - 4.0 * a2
                        + 2.0 * a3 * (w1.powi(4) - w2.powi(4) - 2.0 * w1 * w1 * w2 * w2)
                        - 2.0 * w2 * w2 * kin),
                8.0 * w1 * w1 * w2 / (den * den)
                    * (a * a3 * sq * sq + a * w1 * w1 * kin + a1 * w1 * w1 * (a + 2.0) + 4.0 * a2
                        + 2.0 * a3 * (w1.powi(4) - w2.powi(4) + 2.0 * w1 * w1 * w2 * w2)
                        + 2.0 * w1 * w1 * kin),
            ]
        }
        SystemId::DIVB | SystemId::DIVC => hamilton_rhs_via_jets(id, params, s),
        SystemId::DIVD => {
            let (a, d) = (pv[0], pv[1]);
            let (w1, w2) = (q1, q2);
            let den = a * (w1 * w1 + w2 * w2) + 2.0 * (w1 * w1 - w2 * w2);
            let kin = p1 * p1 + p2 * p2;
            [
                -8.0 * w1 * w1 * w2 * w2 * p1 / den,
                -8.0 * w1 * w1 * w2 * w2 * p2 / den,
                8.0 * w1 * w2 * w2 / (den * den) * (a * w2 * w2 * kin - 4.0 * d - 2.0 * w2 * w2 * kin),
                8.0 * w1 * w1 * w2 / (den * den) * (a * w1 * w1 * kin + 4.0 * d + 2.0 * w1 * w1 * kin),
            ]
        }
    }
}

const GUARD_MARGIN: f64 = 1e-9;

/// Check the family's domain constraints; `Some(reason)` on violation.
pub fn domain_violation(id: SystemId, params: &Params, s: &State) -> Option<String> {
    let pv = params.resolve(id);
    let [q1, q2, _, _] = [s.q[0], s.q[1], s.p[0], s.p[1]];
    let bad = |what: &str, v: f64| Some(format!("{what} = {v:.3e} inside guard margin"));
    match id {
        SystemId::PerlickI => {
            if q1 <= GUARD_MARGIN {
                return bad("r", q1);
            }
        }
        SystemId::PerlickII => {
            let (lam, del) = (pv[0], pv[1]);
            let r2 = q1 * q1;
            if q1 <= GUARD_MARGIN {
                return bad("r", q1);
            }
            let f = 1.0 - lam * lam * r2 * r2;
            if f.abs() <= GUARD_MARGIN {
                return bad("1 - lambda^2 r^4", f);
            }
            let g = 1.0 + lam * lam * r2 * r2 - 2.0 * del * r2;
            if g.abs() <= GUARD_MARGIN {
                return bad("1 + lambda^2 r^4 - 2 delta r^2", g);
            }
        }
        SystemId::TaubNut => {
            if q1 <= GUARD_MARGIN {
                return bad("r", q1);
            }
            if (pv[0] + q1).abs() <= GUARD_MARGIN {
                return bad("eta + r", pv[0] + q1);
            }
        }
        SystemId::DI1 | SystemId::DI2 | SystemId::DI3 => {
            if q1.abs() <= GUARD_MARGIN {
                return bad("u", q1);
            }
            if id == SystemId::DI1 && q2.abs() <= GUARD_MARGIN {
                return bad("v", q2);
            }
        }
        SystemId::DIIA | SystemId::DIIB | SystemId::DIIC | SystemId::DIID => {
            if q1.abs() <= GUARD_MARGIN {
                return bad("w1", q1);
            }
            if matches!(id, SystemId::DIIB | SystemId::DIIC) && q2.abs() <= GUARD_MARGIN {
                return bad("w2", q2);
            }
        }
        SystemId::DIIIA | SystemId::DIIIE => {}
        SystemId::DIIIB => {
            if q1.abs() <= GUARD_MARGIN || q2.abs() <= GUARD_MARGIN {
                return bad("w1 w2", q1 * q2);
            }
        }
        SystemId::DIIIC | SystemId::DIIID => {
            if q1.abs() <= GUARD_MARGIN || q2.abs() <= GUARD_MARGIN {
                return bad("w1 w2", q1 * q2);
            }
            if (q1 + q2).abs() <= GUARD_MARGIN {
                return bad("w1 + w2", q1 + q2);
            }
            if (2.0 + q1 - q2).abs() <= GUARD_MARGIN {
                return bad("2 + w1 - w2", 2.0 + q1 - q2);
            }
        }
        SystemId::DIVA | SystemId::DIVD => {
            let a = pv[0];
            if q1.abs() <= GUARD_MARGIN || q2.abs() <= GUARD_MARGIN {
                return bad("w1 w2", q1 * q2);
            }
            let den = a * (q1 * q1 + q2 * q2) + 2.0 * (q1 * q1 - q2 * q2);
            if den.abs() <= GUARD_MARGIN {
                return bad("metric denominator", den);
            }
        }
        SystemId::DIVB => {
            let a = pv[0];
            let s2 = (2.0 * q1).sin();
            if s2.abs() <= GUARD_MARGIN {
                return bad("sin(2 w1)", s2);
            }
            let den = 2.0 * (2.0 * q1).cos() + a;
            if den.abs() <= GUARD_MARGIN {
                return bad("a + 2 cos(2 w1)", den);
            }
            if q2.abs() <= GUARD_MARGIN {
                return bad("w2", q2);
            }
        }
        SystemId::DIVC => {
            let s2 = (2.0 * q1).sin();
            if s2.abs() <= GUARD_MARGIN {
                return bad("sin(2 w1)", s2);
            }
            if q1.cos().abs() <= GUARD_MARGIN {
                return bad("cos(w1)", q1.cos());
            }
            if q2.abs() <= GUARD_MARGIN {
                return bad("sinh(w2)", q2);
            }
        }
    }
    None
}

/// Conserved momentum: the plain cyclic momentum where one exists, or the
/// closure integration constant for the families whose reduction integrates
/// one momentum equation directly. Errors for the families that route
/// through the energy-based momentum closure instead.
pub fn cyclic_momentum(id: SystemId, params: &Params, s: &State) -> Result<f64, SystemError> {
    let pv = params.resolve(id);
    match id {
        SystemId::PerlickI | SystemId::PerlickII | SystemId::TaubNut => Ok(s.p[1]),
        SystemId::DI3 => Ok(s.p[1]),
        SystemId::DIID => Ok(s.p[1]),
        SystemId::DI1 => {
            // p_v^2 = 2 w0 (b1 - 4 b3) - b1 v^2 - 4 b3 / v^2
            let (b1, b3) = (pv[0], pv[2]);
            let v = s.q[1];
            let c = s.p[1] * s.p[1] + b1 * v * v + 4.0 * b3 / (v * v);
            Ok(c / (2.0 * (b1 - 4.0 * b3)))
        }
        SystemId::DI2 => {
            // p_v^2 = 4 (a2 w0 - a2 v - a3 v^2)
            let (a2, a3) = (pv[1], pv[2]);
            let v = s.q[1];
            Ok((s.p[1] * s.p[1] + 4.0 * a2 * v + 4.0 * a3 * v * v) / (4.0 * a2))
        }
        SystemId::DIIIE => {
            // w4^2 = h0 (w2^2 - 2 w0)
            let h0 = hamiltonian(id, params, s);
            Ok((s.q[1] * s.q[1] - s.p[1] * s.p[1] / h0) / 2.0)
        }
        SystemId::DIVD => {
            // r4 = (4 r0 y - (a+2) h0 - 4 d) / (4 y), y = w2^2, r4 = w4^2
            let (a, d) = (pv[0], pv[1]);
            let h0 = hamiltonian(id, params, s);
            let y = s.q[1] * s.q[1];
            Ok(s.p[1] * s.p[1] + ((a + 2.0) * h0 + 4.0 * d) / (4.0 * y))
        }
        _ => Err(SystemError::NoCyclicMomentum(id.key().to_string())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nineteen_systems_in_order() {
        let all = list_systems();
        assert_eq!(all.len(), 19);
        assert_eq!(all[0], SystemId::PerlickI);
        assert_eq!(all[0].key(), "perlick_i");
        assert_eq!(all[18], SystemId::DIVD);
        assert_eq!(all[18].key(), "dIV_d");
    }

    #[test]
    fn key_roundtrip() {
        for id in ALL_SYSTEMS {
            assert_eq!(SystemId::from_key(id.key()).unwrap(), id);
        }
        assert!(SystemId::from_key("nope").is_err());
    }

    #[test]
    fn perlick_i_free_particle_value() {
        let p = Params::of(SystemId::PerlickI, &[("k", 0.0), ("A", 0.0)]);
        let s = State::new(1.0, 0.0, 0.0, 1.0);
        assert_eq!(hamiltonian(SystemId::PerlickI, &p, &s), 0.5);
    }

    #[test]
    fn perlick_i_annihilated_potential() {
        // kinetic term zero and 1 - k r^2 = 0 kills the potential
        let p = Params::of(SystemId::PerlickI, &[("k", 1.0), ("A", 2.0)]);
        let s = State::new(1.0, 0.0, 0.0, 0.0);
        assert_eq!(hamiltonian(SystemId::PerlickI, &p, &s), 0.0);
    }

    #[test]
    fn taub_nut_degenerate_prefactor() {
        let p = Params::of(SystemId::TaubNut, &[("eta", 0.0), ("alpha", 0.0)]);
        let s = State::new(1.0, 0.0, 0.0, 1.0);
        assert_eq!(hamiltonian(SystemId::TaubNut, &p, &s), 0.5);
    }

    #[test]
    fn perlick_i_ptheta_dot_vanishes() {
        let p = Params::of(SystemId::PerlickI, &[("k", 0.7), ("A", 1.3)]);
        let s = State::new(1.2, 0.4, 0.3, 0.9);
        let rhs = hamilton_rhs(SystemId::PerlickI, &p, &s);
        assert_eq!(rhs[3], 0.0);
    }

    #[test]
    fn dii_d_w4_dot_vanishes() {
        let p = Params::of(SystemId::DIID, &[("d", 0.8)]);
        let s = State::new(1.1, 0.2, 0.4, 0.6);
        let rhs = hamilton_rhs(SystemId::DIID, &p, &s);
        assert_eq!(rhs[3], 0.0);
    }

    #[test]
    fn cyclic_momentum_reads_p_theta() {
        let p = Params::of(SystemId::PerlickI, &[("k", 0.7), ("A", 1.3)]);
        let s = State::new(1.0, 0.0, 0.0, 3.0);
        assert_eq!(cyclic_momentum(SystemId::PerlickI, &p, &s).unwrap(), 3.0);
    }

    #[test]
    fn di3_cyclic_reads_p_v() {
        let p = Params::of(SystemId::DI3, &[("a", -1.0)]);
        let s = State::new(1.0, 0.0, 0.0, 2.0);
        assert_eq!(cyclic_momentum(SystemId::DI3, &p, &s).unwrap(), 2.0);
    }

    #[test]
    fn dii_a_has_no_plain_cyclic_momentum() {
        let p = Params::of(SystemId::DIIA, &[("a1", 1.0), ("a2", 0.5), ("a3", 2.0)]);
        let s = State::new(1.0, 0.5, 1.5, 0.3);
        assert!(matches!(
            cyclic_momentum(SystemId::DIIA, &p, &s),
            Err(SystemError::NoCyclicMomentum(_))
        ));
    }

    #[test]
    fn missing_param_rejected() {
        let mut m = BTreeMap::new();
        m.insert("k".to_string(), 1.0);
        assert!(matches!(
            Params::new(SystemId::PerlickI, m),
            Err(SystemError::MissingParam(..))
        ));
    }

    /// Interior sample states per family, used by the gradient oracle test.
    pub(crate) fn sample_state(id: SystemId, rng: &mut impl rand::Rng) -> State {
        let u = |rng: &mut dyn rand::RngCore, lo: f64, hi: f64| lo + (hi - lo) * rand::Rng::gen::<f64>(rng);
        match id {
            SystemId::PerlickI | SystemId::TaubNut => {
                State::new(u(rng, 0.6, 1.6), u(rng, -1.0, 1.0), u(rng, -0.8, 0.8), u(rng, 0.5, 1.5))
            }
            SystemId::PerlickII => {
                State::new(u(rng, 0.6, 1.1), u(rng, -1.0, 1.0), u(rng, -0.8, 0.8), u(rng, 0.5, 1.5))
            }
            SystemId::DI1 | SystemId::DI2 | SystemId::DI3 => {
                State::new(u(rng, 0.6, 1.6), u(rng, 0.5, 1.5), u(rng, -0.8, 0.8), u(rng, 0.5, 1.5))
            }
            SystemId::DIIIC | SystemId::DIIID => {
                State::new(u(rng, 0.8, 1.6), u(rng, 0.3, 0.7), u(rng, -0.8, 0.8), u(rng, 0.4, 1.2))
            }
            SystemId::DIVB | SystemId::DIVC => {
                State::new(u(rng, 0.4, 1.1), u(rng, 0.4, 1.2), u(rng, -0.8, 0.8), u(rng, 0.4, 1.2))
            }
            _ => State::new(u(rng, 0.6, 1.6), u(rng, 0.4, 1.4), u(rng, -0.8, 0.8), u(rng, 0.4, 1.2)),
        }
    }

    #[test]
    fn rhs_matches_symplectic_gradient_samples() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for id in ALL_SYSTEMS {
            let params = crate::presets::default_params(id);
            for _ in 0..50 {
                let s = sample_state(id, &mut rng);
                if domain_violation(id, &params, &s).is_some() {
                    continue;
                }
                let a = hamilton_rhs(id, &params, &s);
                let b = hamilton_rhs_via_jets(id, &params, &s);
                for k in 0..4 {
                    let scale = 1.0f64.max(b[k].abs());
                    assert!(
                        (a[k] - b[k]).abs() / scale <= 1e-10,
                        "{} component {k}: {} vs {}",
                        id.key(),
                        a[k],
                        b[k]
                    );
                }
            }
        }
    }
}
