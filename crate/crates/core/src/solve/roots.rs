//! Root isolation on an interval: sign scan plus safeguarded Newton.

use crate::config::SolverConfig;
use crate::error::{Result, SweepError};

/// Depth below which a sign-preserving dip counts as a tangential root.
pub const TANGENTIAL_THRESHOLD: f64 = 1e-7;

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Roots1d {
    /// Transversal roots, ascending.
    pub roots: Vec<f64>,
    /// Suspected double roots: local minima of `|phi|` below the threshold
    /// without a sign change.
    pub tangential: Vec<f64>,
}

/// All roots of `phi` on `[a, b]`. The closure returns the value and the
/// derivative.
pub fn roots_1d<F>(mut phi: F, a: f64, b: f64, cfg: &SolverConfig) -> Result<Roots1d>
where
    F: FnMut(f64) -> Result<(f64, f64)>,
{
    let n = cfg.boundary_scan_density.max(2);
    let xs: Vec<f64> = (0..=n).map(|k| if k == n { b } else { a + (b - a) * k as f64 / n as f64 }).collect();
    let mut fs = Vec::with_capacity(n + 1);
    for &x in &xs {
        fs.push(phi(x)?.0);
    }
    let mut out = Roots1d::default();
    let dedupe = 1e-9 * (b - a).abs().max(1e-300);
    let push = |r: f64, out: &mut Roots1d| {
        if out.roots.last().is_none_or(|&l| (r - l).abs() > dedupe) {
            out.roots.push(r);
        }
    };
    for k in 0..=n {
        if fs[k] == 0.0 {
            push(xs[k], &mut out);
        } else if k < n && fs[k] * fs[k + 1] < 0.0 {
            let r = polish_bracketed(&mut phi, xs[k], xs[k + 1], fs[k], cfg)?;
            push(r, &mut out);
        }
    }
    for k in 1..n {
        let (l, m, r) = (fs[k - 1], fs[k], fs[k + 1]);
        let dip = m != 0.0 && m.abs() <= l.abs() && m.abs() <= r.abs() && l * m > 0.0 && m * r > 0.0;
        if dip {
            let (x, v) = golden_min_abs(&mut phi, xs[k - 1], xs[k + 1])?;
            if v < TANGENTIAL_THRESHOLD {
                out.tangential.push(x);
            }
        }
    }
    Ok(out)
}

/// Newton with bisection fallback inside a sign-change bracket.
pub fn polish_bracketed<F>(phi: &mut F, mut lo: f64, mut hi: f64, f_lo: f64, cfg: &SolverConfig) -> Result<f64>
where
    F: FnMut(f64) -> Result<(f64, f64)>,
{
    let lo_sign = f_lo.signum();
    let mut x = 0.5 * (lo + hi);
    for _ in 0..cfg.max_newton_iters + 80 {
        let (fx, dfx) = phi(x)?;
        if fx.abs() <= cfg.newton_tol || fx == 0.0 {
            return Ok(x);
        }
        if fx.signum() == lo_sign {
            lo = x;
        } else {
            hi = x;
        }
        let newton = x - fx / dfx;
        let (a, b) = (lo.min(hi), lo.max(hi));
        x = if newton.is_finite() && newton > a && newton < b { newton } else { 0.5 * (lo + hi) };
        if (hi - lo).abs() <= 4.0 * f64::EPSILON * x.abs().max(1.0) {
            let (fx, _) = phi(x)?;
            if fx.abs() <= cfg.newton_tol {
                return Ok(x);
            }
            break;
        }
    }
    Err(SweepError::NoConvergence { location: format!("root bracket [{lo}, {hi}]") })
}

fn golden_min_abs<F>(phi: &mut F, mut a: f64, mut b: f64) -> Result<(f64, f64)>
where
    F: FnMut(f64) -> Result<(f64, f64)>,
{
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let mut fc = phi(c)?.0.abs();
    let mut fd = phi(d)?.0.abs();
    for _ in 0..80 {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = phi(c)?.0.abs();
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = phi(d)?.0.abs();
        }
    }
    Ok(if fc < fd { (c, fc) } else { (d, fd) })
}
