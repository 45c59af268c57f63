use crate::ode::Params;
use crate::Real;

/// Smallest threshold on `b + lambda` treated as an integration regime.
/// Below it, `b + lambda` is not resolvable next to any `lambda` of
/// practical size.
pub const PRACTICAL_B_FLOOR: f64 = 1e-20;

/// `ln` of `sqrt(1 / (16 pi e^{36 n}))`, the small-height threshold of the
/// slope, axis-crossing and graph-ratio estimates.
pub fn ln_small_b_threshold(n: u32) -> f64 {
    -0.5 * (16.0 * std::f64::consts::PI).ln() - 18.0 * f64::from(n)
}

/// `ln` of `sqrt(1 / (4 pi e^{64 n}))`, the threshold on `b + lambda` under
/// which the second-branch window estimates are stated.
pub fn ln_bbar_threshold(n: u32) -> f64 {
    -0.5 * (4.0 * std::f64::consts::PI).ln() - 32.0 * f64::from(n)
}

/// Outcome of a hypothesis gate.
#[derive(Debug, Clone, PartialEq)]
pub enum Gate {
    Open,
    Closed(String),
}

impl Gate {
    pub fn is_open(&self) -> bool {
        matches!(self, Gate::Open)
    }

    pub(crate) fn and(self, other: impl FnOnce() -> Gate) -> Gate {
        match self {
            Gate::Open => other(),
            closed => closed,
        }
    }

    pub(crate) fn when(cond: bool, reason: impl FnOnce() -> String) -> Gate {
        if cond {
            Gate::Open
        } else {
            Gate::Closed(reason())
        }
    }
}

/// `-(4n+1) lambda < b` and `b + lambda < e^{ln_g}`, evaluated without
/// forming `e^{ln_g}` unless it is representable.
pub(crate) fn height_gate<T: Real>(ln_g: f64, b: T, p: &Params<T>, what: &str) -> Gate {
    if ln_g < PRACTICAL_B_FLOOR.ln() {
        return Gate::Closed(format!(
            "{what}: threshold on b + lambda is e^({ln_g:.3}) = {:e}, below the practical floor {PRACTICAL_B_FLOOR:e}",
            ln_g.exp()
        ));
    }
    if !p.in_launch_regime(b) {
        return Gate::Closed(format!("{what}: b = {b} is not above -(4n+1) lambda"));
    }
    let shifted = (b + p.lambda).f64();
    if shifted <= 0.0 || shifted.ln() < ln_g {
        Gate::Open
    } else {
        Gate::Closed(format!("{what}: ln(b + lambda) = {:.3} is not below {ln_g:.3}", shifted.ln()))
    }
}
