use super::{Region, Which};
use crate::error::Result;
use crate::linalg::dense::{CVec, C64};
use crate::linalg::krylov::RitzSelector;

/// Orders shift-and-invert Ritz values `θ` by the eigenvalue they represent,
/// `λ = map(σ + 1/θ)`, putting values inside the region first.
pub struct ShiftInvertSelector<'a, M, A>
where
    M: Fn(C64) -> C64,
    A: FnMut(C64, &CVec, f64) -> Result<bool>,
{
    pub shift: C64,
    pub map: M,
    pub target: C64,
    pub which: Which,
    pub region: Option<(&'a Region, f64)>,
    pub accept: A,
}

impl<M, A> ShiftInvertSelector<'_, M, A>
where
    M: Fn(C64) -> C64,
    A: FnMut(C64, &CVec, f64) -> Result<bool>,
{
    pub fn eigenvalue(&self, theta: C64) -> Option<C64> {
        if theta.norm() == 0.0 {
            return None;
        }
        let l = (self.map)(self.shift + 1.0 / theta);
        (l.re.is_finite() && l.im.is_finite()).then_some(l)
    }
}

impl<M, A> RitzSelector for ShiftInvertSelector<'_, M, A>
where
    M: Fn(C64) -> C64,
    A: FnMut(C64, &CVec, f64) -> Result<bool>,
{
    fn key(&self, theta: C64) -> (bool, f64) {
        match self.eigenvalue(theta) {
            None => (false, f64::INFINITY),
            Some(l) => {
                let inside = self.region.map_or(true, |(r, m)| r.contains_relaxed(l, m));
                (inside, self.which.key(l, self.target))
            }
        }
    }

    fn accept(&mut self, theta: C64, x: &CVec, est: f64) -> Result<bool> {
        match self.eigenvalue(theta) {
            None => Ok(false),
            Some(l) => (self.accept)(l, x, est),
        }
    }
}
