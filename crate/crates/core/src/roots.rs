//! Safeguarded Newton iteration for strictly increasing scalar functions.

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Root {
    pub x: f64,
    /// |g(x)| at the returned point.
    pub residual: f64,
    pub iterations: usize,
}

/// Finds the zero of a strictly increasing `g` inside the bracket `[lo, hi]`.
///
/// `g` returns the value and derivative. Newton steps that leave the current
/// bracket are replaced by bisection. Iteration stops once the step is below
/// `x_tol` or the bracket has collapsed; the result is accepted only if
/// `|g| <= g_tol`.
pub fn newton_bracketed<G>(
    mut g: G,
    mut lo: f64,
    mut hi: f64,
    start: f64,
    g_tol: f64,
    x_tol: f64,
    max_iter: usize,
) -> Result<Root>
where
    G: FnMut(f64) -> Result<(f64, f64)>,
{
    if !(lo < hi) {
        return Err(Error::Root(format!("empty bracket [{lo}, {hi}]")));
    }
    let mut x = start.clamp(lo, hi);
    let mut best = (f64::INFINITY, x);
    for it in 1..=max_iter {
        let (v, d) = g(x)?;
        if v.abs() < best.0 {
            best = (v.abs(), x);
        }
        if v == 0.0 {
            return Ok(Root {
                x,
                residual: 0.0,
                iterations: it,
            });
        }
        if v < 0.0 {
            lo = x;
        } else {
            hi = x;
        }
        let newton = x - v / d;
        let next = if d > 0.0 && newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
        let step = (next - x).abs();
        x = next;
        if step <= x_tol || hi - lo <= x_tol {
            let (v, _) = g(x)?;
            let (res, x) = if v.abs() <= best.0 {
                (v.abs(), x)
            } else {
                best
            };
            if res <= g_tol {
                return Ok(Root {
                    x,
                    residual: res,
                    iterations: it + 1,
                });
            }
            return Err(Error::Root(format!(
                "stalled at {x} with residual {res:e} above {g_tol:e}"
            )));
        }
    }
    if best.0 <= g_tol {
        return Ok(Root {
            x: best.1,
            residual: best.0,
            iterations: max_iter,
        });
    }
    Err(Error::Root(format!(
        "no convergence in {max_iter} iterations (residual {:e})",
        best.0
    )))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cubic_root() {
        let r = newton_bracketed(
            |x| Ok((x * x * x + x - 1.0, 3.0 * x * x + 1.0)),
            0.0,
            1.0,
            0.0,
            1e-14,
            1e-15,
            100,
        )
        .unwrap();
        assert!((r.x - 0.682_327_803_828_019_3).abs() < 1e-15);
        assert!(r.iterations <= 12, "{:?}", r);
    }

    #[test]
    fn bad_derivative_falls_back_to_bisection() {
        // derivative deliberately wrong: bisection must still converge
        let r =
            newton_bracketed(|x| Ok((x - 0.3, -1.0)), -1.0, 1.0, 0.9, 1e-12, 1e-14, 200).unwrap();
        assert!((r.x - 0.3).abs() < 1e-12);
    }

    #[test]
    fn empty_bracket() {
        assert!(newton_bracketed(|x| Ok((x, 1.0)), 1.0, 0.0, 0.5, 1e-12, 1e-14, 10).is_err());
    }
}
