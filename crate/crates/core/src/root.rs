//! Bracketed scalar root refinement.
//!
//! The functions solved here are only defined on part of their bracket: past
//! a feasibility boundary they have no value at all. `Bracket` therefore
//! allows the far end to be "infeasible", which is treated as carrying the
//! sign opposite to the feasible end.

use crate::error::Result;

/// A bracket `[near, far]` (in either order on the real line) with `near`
/// feasible and `far` either of opposite sign or infeasible.
#[derive(Debug, Clone, Copy)]
pub struct Bracket {
    pub near: f64,
    pub f_near: f64,
    pub far: f64,
    pub f_far: Option<f64>,
}

#[derive(Debug, Clone, Copy)]
pub struct Root {
    pub x: f64,
    pub fx: f64,
    pub iterations: usize,
    /// Final far end of the bracket.
    pub other: f64,
    /// The far end was still infeasible when the bracket collapsed, i.e. the
    /// sign change is a feasibility boundary rather than a zero.
    pub hit_boundary: bool,
}

/// Bisection safeguarding a secant step.
///
/// `f` returns `Ok(None)` where the function is undefined. Iterates until the
/// bracket is narrower than `x_tol` or an exact zero is met.
pub fn refine<F>(mut f: F, bracket: Bracket, x_tol: f64, max_iter: usize) -> Result<Root>
where
    F: FnMut(f64) -> Result<Option<f64>>,
{
    let Bracket {
        mut near,
        mut f_near,
        mut far,
        mut f_far,
    } = bracket;
    debug_assert!(f_near != 0.0);
    let mut last_width = (far - near).abs();
    let mut slow_steps = 0;
    let mut iterations = 0;

    while (far - near).abs() > x_tol && iterations < max_iter {
        iterations += 1;
        let mid = 0.5 * (near + far);
        let candidate = match f_far {
            Some(ff) if slow_steps < 2 => {
                let s = far - ff * (far - near) / (ff - f_near);
                let (lo, hi) = if near < far { (near, far) } else { (far, near) };
                let margin = 1e-3 * (hi - lo);
                if s.is_finite() && s > lo + margin && s < hi - margin {
                    s
                } else {
                    mid
                }
            }
            _ => mid,
        };
        if candidate == near || candidate == far {
            break;
        }
        match f(candidate)? {
            Some(0.0) => {
                return Ok(Root {
                    x: candidate,
                    fx: 0.0,
                    iterations,
                    other: candidate,
                    hit_boundary: false,
                });
            }
            Some(v) if v.signum() == f_near.signum() => {
                near = candidate;
                f_near = v;
            }
            other => {
                far = candidate;
                f_far = other;
            }
        }
        let width = (far - near).abs();
        if width > 0.5 * last_width {
            slow_steps += 1;
        } else {
            slow_steps = 0;
        }
        last_width = width;
    }

    match f_far {
        Some(ff) if ff.abs() < f_near.abs() => Ok(Root {
            x: far,
            fx: ff,
            iterations,
            other: near,
            hit_boundary: false,
        }),
        Some(_) => Ok(Root {
            x: near,
            fx: f_near,
            iterations,
            other: far,
            hit_boundary: false,
        }),
        None => Ok(Root {
            x: near,
            fx: f_near,
            iterations,
            other: far,
            hit_boundary: true,
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_cubic_root() {
        let f = |x: f64| Ok(Some(x * x * x - 2.0));
        let r = refine(
            f,
            Bracket {
                near: 0.0,
                f_near: -2.0,
                far: 3.0,
                f_far: Some(25.0),
            },
            1e-14,
            200,
        )
        .unwrap();
        assert!((r.x - 2f64.cbrt()).abs() < 1e-13);
        assert!(!r.hit_boundary);
    }

    #[test]
    fn handles_infeasible_far_end() {
        // defined on x < 1 only, root at 0.5
        let f = |x: f64| Ok(if x < 1.0 { Some(0.5 - x) } else { None });
        let r = refine(
            f,
            Bracket {
                near: 0.0,
                f_near: 0.5,
                far: 4.0,
                f_far: None,
            },
            1e-14,
            200,
        )
        .unwrap();
        assert!((r.x - 0.5).abs() < 1e-13);
    }

    #[test]
    fn reports_boundary_without_zero() {
        let f = |x: f64| Ok(if x < 1.0 { Some(1.0 + x) } else { None });
        let r = refine(
            f,
            Bracket {
                near: 0.0,
                f_near: 1.0,
                far: 2.0,
                f_far: None,
            },
            1e-12,
            200,
        )
        .unwrap();
        assert!(r.hit_boundary);
        assert!((r.x - 1.0).abs() < 1e-11);
    }

    #[test]
    fn descending_bracket() {
        let f = |x: f64| Ok(Some((x - 1.5).tanh()));
        let r = refine(
            f,
            Bracket {
                near: 3.0,
                f_near: 1.5f64.tanh(),
                far: 1.0,
                f_far: Some((-0.5f64).tanh()),
            },
            1e-14,
            200,
        )
        .unwrap();
        assert!((r.x - 1.5).abs() < 1e-13);
    }
}
