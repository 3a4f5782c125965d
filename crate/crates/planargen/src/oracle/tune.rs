//! Singularity location and parameter tuning (fast f64 lane).
//!
//! The radius of convergence of the connected series is bracketed by
//! bisection on the convergence of the G1' fixed point. The classification
//! runs in f64 regardless of the requested table precision, so tables built
//! at different precisions share bit-identical tuning parameters; the
//! bracket's lower end is returned, keeping x_n strictly inside.

use super::series::g1_prime_fixed_point;
use super::OracleError;

/// Relative bracket width for the singularity search. A square-root branch
/// point cannot be classified much more finely by finite iteration.
pub const RHO_REL_WIDTH: f64 = 1e-12;

const PROBE_TOL: f64 = 1e-13;

fn probe_converges(x: f64, y: f64) -> Result<bool, OracleError> {
    match g1_prime_fixed_point(x, y, PROBE_TOL) {
        Ok(_) => Ok(true),
        Err(OracleError::BeyondSingularity) | Err(OracleError::OutsideDomain) => Ok(false),
        Err(e) => Err(e),
    }
}

/// Radius of convergence of x -> G(x,y) (same singular points as the
/// connected series). Returns the lower end of the final bracket.
pub fn rho_g(y: f64, hint: Option<(f64, f64)>) -> Result<f64, OracleError> {
    if y <= 0.0 {
        return Err(OracleError::Parameter("rho_g needs y > 0".into()));
    }
    let (mut lo, mut hi) = hint.unwrap_or((0.005, 0.08));
    // grow/shrink the initial bracket until it straddles the boundary
    let mut guard = 0;
    while !probe_converges(lo, y)? {
        lo *= 0.5;
        guard += 1;
        if guard > 60 {
            return Err(OracleError::Instability("no convergent lower probe".into()));
        }
    }
    guard = 0;
    while probe_converges(hi, y)? {
        hi *= 1.5;
        guard += 1;
        if guard > 60 {
            return Err(OracleError::Instability("no divergent upper probe".into()));
        }
    }
    while hi - lo > RHO_REL_WIDTH * lo {
        let mid = 0.5 * (lo + hi);
        if probe_converges(mid, y)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo)
}

/// Edge-parameter map mu(y) = -y d(ln rho_G)/dy, by centered differences.
pub fn mu_of_y(y: f64, cache: &mut RhoCache) -> Result<f64, OracleError> {
    let h = 1e-4 * y;
    let rp = cache.rho(y + h)?;
    let rm = cache.rho(y - h)?;
    Ok(-y * (rp.ln() - rm.ln()) / (2.0 * h))
}

/// Inverse of mu(y) on (1,3), by bisection on y (mu is strictly increasing).
pub fn y_of_mu(mu: f64) -> Result<f64, OracleError> {
    if !(1.0 < mu && mu < 3.0) {
        return Err(OracleError::Parameter(format!(
            "edge ratio mu = {mu} outside (1,3)"
        )));
    }
    let mut cache = RhoCache::default();
    let (mut lo, mut hi) = (1.0f64, 1.0f64);
    // expand a bracket around y = 1
    let m1 = mu_of_y(1.0, &mut cache)?;
    if mu >= m1 {
        while mu_of_y(hi, &mut cache)? < mu {
            hi *= 1.5;
            if hi > 200.0 {
                return Err(OracleError::Instability("mu bracket ran away".into()));
            }
        }
    } else {
        while mu_of_y(lo, &mut cache)? > mu {
            lo *= 0.6;
            if lo < 1e-4 {
                return Err(OracleError::Instability("mu bracket ran away".into()));
            }
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let m = mu_of_y(mid, &mut cache)?;
        if (m - mu).abs() < 1e-6 {
            return Ok(mid);
        }
        if m < mu {
            lo = mid;
        } else {
            hi = mid;
        }
        if (hi - lo) < 1e-12 * hi {
            return Ok(0.5 * (lo + hi));
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Memo of rho values with warm-started brackets; mu search probes nearby
/// y repeatedly.
#[derive(Default)]
pub struct RhoCache {
    entries: Vec<(f64, f64)>, // (y, rho)
}

impl RhoCache {
    pub fn rho(&mut self, y: f64) -> Result<f64, OracleError> {
        if let Some((_, r)) = self
            .entries
            .iter()
            .find(|(yy, _)| (yy - y).abs() < 1e-15 * y.abs())
        {
            return Ok(*r);
        }
        // warm hint: rho is decreasing in y; nearest cached value brackets it
        let hint = self
            .entries
            .iter()
            .min_by(|a, b| {
                (a.0 - y)
                    .abs()
                    .partial_cmp(&(b.0 - y).abs())
                    .unwrap_or(std::cmp::Ordering::Equal)
            })
            .map(|&(_, r)| (r * 0.9, r * 1.1));
        let r = rho_g(y, hint)?;
        self.entries.push((y, r));
        Ok(r)
    }
}
