use serde::{Deserialize, Serialize};

use super::{ShootError, ShotReport, Terminal};
use crate::ode::{series_state, CurveState, DenseBranch, ExactCurve, Params};
use crate::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ProfileSource {
    /// Closed from a shot whose second vertical tangent sits on the z-axis.
    Shot,
    /// The round sphere, closed analytically through the top of the circle.
    Sphere,
}

/// A closed profile from `(b0, 0)` to `(-b0, 0)`: the traced half up to the
/// junction on the z-axis followed by its mirror image `(-x, z)` run
/// backwards.
///
/// The closed curve is parametrised by arc length `u` in
/// `[0, total_length()]`. The angle of the mirrored half is
/// `2 theta_J - theta`, where `theta_J` is the junction angle, so `theta`
/// stays continuous through the junction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClosedProfile<T> {
    pub source: ProfileSource,
    pub params: Params<T>,
    pub b0: T,
    pub first: DenseBranch<T>,
    pub second: Option<DenseBranch<T>>,
    /// Arc length of the first vertical tangent.
    pub s1: T,
    /// Arc length of the horizontal tangent on the second branch.
    pub sm: Option<T>,
    /// Arc length from the pole to the junction.
    pub half_length: T,
    /// Junction state with `x` set to zero.
    pub junction: CurveState<T>,
    /// `x` at the junction before snapping.
    pub x_junction_raw: T,
    /// Height at which the first branch crosses the z-axis.
    pub z0: Option<T>,
}

/// Reflects a shot whose second vertical tangent lies within `tol_f` of the
/// z-axis into a closed profile.
pub fn close_profile<T: Real>(shot: &ShotReport<T>, p: &Params<T>, tol_f: T) -> Result<ClosedProfile<T>, ShootError> {
    if shot.terminal != Terminal::SecondVerticalTangent {
        return Err(ShootError::NotClosable(format!("shot at b = {} ended with {:?}", shot.b, shot.terminal)));
    }
    let (Some(s1), Some(s2), Some(second)) = (shot.s1, shot.s2, shot.second.clone()) else {
        return Err(ShootError::NotClosable("missing a vertical tangent".into()));
    };
    if !(s2.state.x.abs() <= tol_f) {
        return Err(ShootError::JunctionMismatch { x_s2: s2.state.x.f64(), tol: tol_f.f64() });
    }
    let mut junction = s2.state;
    junction.x = T::zero();
    Ok(ClosedProfile {
        source: ProfileSource::Shot,
        params: *p,
        b0: shot.b,
        first: shot.first.clone(),
        second: Some(second),
        s1: s1.s,
        sm: shot.sm.map(|e| e.s),
        half_length: s2.s,
        junction,
        x_junction_raw: s2.state.x,
        z0: shot.z0.map(|e| e.state.z),
    })
}

impl<T: Real> ClosedProfile<T> {
    /// The round sphere solution as a closed profile, junction at the top.
    pub fn sphere(p: &Params<T>) -> Self {
        let curve = ExactCurve::sphere(p);
        let a = p.sphere_radius();
        let quarter = a * T::FRAC_PI_2();
        let first = DenseBranch::analytic(curve, T::zero(), quarter);
        let mut junction = first.end;
        junction.x = T::zero();
        ClosedProfile {
            source: ProfileSource::Sphere,
            params: *p,
            b0: a,
            first,
            second: None,
            s1: quarter,
            sm: None,
            half_length: quarter,
            x_junction_raw: T::zero(),
            junction,
            z0: Some(a),
        }
    }

    pub fn total_length(&self) -> T {
        self.half_length * T::two()
    }

    /// Angle at the junction.
    pub fn theta_junction(&self) -> T {
        self.junction.theta()
    }

    fn half_state(&self, u: T) -> CurveState<T> {
        if u >= self.half_length {
            return self.junction;
        }
        if u < self.first.s_start() {
            return series_state(self.b0, u, &self.params);
        }
        match &self.second {
            Some(sec) if u > self.first.s_end() => sec.eval(u),
            _ => self.first.eval(u),
        }
    }

    /// State at arc length `u` along the closed curve, clamped to range.
    pub fn eval(&self, u: T) -> CurveState<T> {
        let u = u.max(T::zero()).min(self.total_length());
        if u <= self.half_length {
            let mut st = self.half_state(u);
            st.s = u;
            return st;
        }
        let st = self.half_state(self.total_length() - u);
        CurveState::new(u, -st.x, st.z, T::two() * self.junction.turn - st.turn)
    }

    /// Arc lengths that resampling keeps exactly: the poles, both copies of
    /// the first vertical tangent, and the junction.
    pub fn anchors(&self) -> Vec<T> {
        let total = self.total_length();
        let mut v = vec![T::zero(), self.s1, self.half_length, total - self.s1, total];
        v.sort_by(|a, b| a.partial_cmp(b).expect("finite anchors"));
        v.dedup_by(|a, b| (*a - *b).abs() <= T::epsilon() * total);
        v
    }

    /// Net rotation of the tangent from the first pole to the second.
    pub fn total_turning(&self) -> T {
        self.eval(self.total_length()).turn - self.eval(T::zero()).turn
    }
}
