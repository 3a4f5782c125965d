//! Numeric oracle: evaluation of every generating function the samplers
//! consult, singularity location, Boltzmann-parameter tuning, and
//! persistence of the evaluated constants.

pub mod io;
pub mod series;
pub mod tune;

use crate::real::Real;
use series::{connected_values, g3_dir, network_solve, planar_values, tree_aux, tree_solve,
    two_connected_values};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum OracleError {
    #[error("parameters outside the convergence domain")]
    OutsideDomain,
    #[error("parameter x beyond the singularity")]
    BeyondSingularity,
    #[error("precision failure: {0}")]
    Precision(String),
    #[error("numeric instability: {0}")]
    Instability(String),
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("corrupt oracle table: {0}")]
    CorruptTable(String),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

/// Tuned Boltzmann parameters for a target size.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TuningResult {
    pub n: u64,
    pub mu: Option<f64>,
    pub rho: f64,
    pub x_n: f64,
    pub y: f64,
}

/// Every generating-function value the samplers consult, evaluated at the
/// tuned parameters. Immutable once built; safely shareable.
#[derive(Debug, Clone)]
pub struct OracleTable<R> {
    pub n: u64,
    pub mu: Option<f64>,
    pub digits: u32,
    pub rho: R,
    pub x: R,
    pub y: R,
    /// z = x G1'(x,y)
    pub z: R,
    /// w = D(z,y)
    pub w: R,
    // rooted binary trees at (z,w)
    pub r_black: R,
    pub r_white: R,
    pub r_black_hat: R,
    pub r_white_hat: R,
    pub r_black_as: R,
    pub r_white_as: R,
    pub k_rooted: R,
    /// unrooted asymmetric trees, by quadrature of the rooted series
    pub k_unrooted: R,
    pub k_derived: R,
    // edge-rooted 3-connected planar graphs at (z,w)
    pub g3_dir: R,
    pub g3_dir_dz: R,
    pub g3_dir_dw: R,
    // networks at (z,y)
    pub d: R,
    pub s: R,
    pub p: R,
    pub h: R,
    pub d1: R,
    pub s1: R,
    pub p1: R,
    pub h1: R,
    // 2-connected at (z,y)
    pub g2_dir: R,
    pub g2_dir_prime: R,
    pub g2_under: R,
    pub g2_under_prime: R,
    pub g2_prime: R,
    pub g2_second: R,
    // connected at (x,y)
    pub g1: R,
    pub g1_prime: R,
    pub g1_second: R,
    // planar at (x,y)
    pub g: R,
    pub g_prime: R,
    pub g_second: R,
}

/// Resolve tuning (in the f64 lane) and evaluate all table entries at the
/// requested precision.
pub fn build_table<R: Real>(
    n: u64,
    mu: Option<f64>,
    digits: u32,
) -> Result<(TuningResult, OracleTable<R>), OracleError> {
    if n < 1 {
        return Err(OracleError::Parameter("target size n must be >= 1".into()));
    }
    let digits = digits.min(R::DIGITS);
    let y64 = match mu {
        None => 1.0,
        Some(m) => tune::y_of_mu(m)?,
    };
    let rho = tune::rho_g(y64, None)?;
    let x64 = (1.0 - 1.0 / (2.0 * n as f64)) * rho;
    let tuning = TuningResult {
        n,
        mu,
        rho,
        x_n: x64,
        y: y64,
    };
    let table = evaluate_table(n, mu, digits, rho, x64, y64)?;
    Ok((tuning, table))
}

/// Evaluate all entries at explicit (x, y); used by build and by tests.
pub fn evaluate_table<R: Real>(
    n: u64,
    mu: Option<f64>,
    digits: u32,
    rho: f64,
    x64: f64,
    y64: f64,
) -> Result<OracleTable<R>, OracleError> {
    let tol = pow10::<R>(-(digits as i32));
    let x = R::from_f64(x64);
    let y = R::from_f64(y64);

    let conn = connected_values(x, y, tol)?;
    let z = conn.z;
    let nv = network_solve(z, y, tol)?;
    let w = nv.d;
    let tc = two_connected_values(z, y, tol)?;
    let tv = tree_solve(z, w, tol)?;
    let aux = tree_aux(&tv);
    let g3 = g3_dir(&tv);
    // unrooted tree series by quadrature in the leaf variable:
    // K(z,w) = int_0^w Kder(z,t) dt, K'(z,w) = int_0^w dz Kder(z,t) dt
    let k_unrooted = series::integrate_to_edge(
        |t| Ok(tree_aux(&tree_solve(z, t, tol)?).k_rooted.v),
        w,
        tol,
    )?;
    let k_derived = series::integrate_to_edge(
        |t| Ok(tree_aux(&tree_solve(z, t, tol)?).k_rooted.dz),
        w,
        tol,
    )?;
    let pv = planar_values(&conn);

    let table = OracleTable {
        n,
        mu,
        digits,
        rho: R::from_f64(rho),
        x,
        y,
        z,
        w,
        r_black: tv.r_black.v,
        r_white: tv.r_white.v,
        r_black_hat: aux.r_black_hat.v,
        r_white_hat: aux.r_white_hat.v,
        r_black_as: aux.r_black_as.v,
        r_white_as: aux.r_white_as.v,
        k_rooted: aux.k_rooted.v,
        k_unrooted,
        k_derived,
        g3_dir: g3.v,
        g3_dir_dz: g3.dz,
        g3_dir_dw: g3.dw,
        d: nv.d,
        s: nv.s,
        p: nv.p,
        h: nv.h,
        d1: nv.d1,
        s1: nv.s1,
        p1: nv.p1,
        h1: nv.h1,
        g2_dir: tc.g2_dir,
        g2_dir_prime: tc.g2_dir_prime,
        g2_under: tc.g2_under,
        g2_under_prime: tc.g2_under_prime,
        g2_prime: tc.g2_prime,
        g2_second: tc.g2_second,
        g1: conn.g1,
        g1_prime: conn.g1_prime,
        g1_second: conn.g1_second,
        g: pv.g,
        g_prime: pv.g_prime,
        g_second: pv.g_second,
    };
    table.consistency_check()?;
    Ok(table)
}

fn pow10<R: Real>(e: i32) -> R {
    R::from_i32(10).powi(e)
}

/// Weights for the tree-level samplers at an arbitrary admissible (z,w):
/// the tree block plus the unrooted-series quadratures. Entries of the
/// other blocks are zeroed; only tree and dissection samplers may consume
/// the result.
pub fn tree_sampler_weights(z: f64, w: f64) -> Result<SamplerWeights, OracleError> {
    let tol = 1e-14;
    let tv = tree_solve(z, w, tol)?;
    let aux = tree_aux(&tv);
    let g3 = g3_dir(&tv);
    let k_unrooted = series::integrate_to_edge(
        |t| Ok(tree_aux(&tree_solve(z, t, tol)?).k_rooted.v),
        w,
        tol,
    )?;
    let k_derived = series::integrate_to_edge(
        |t| Ok(tree_aux(&tree_solve(z, t, tol)?).k_rooted.dz),
        w,
        tol,
    )?;
    Ok(SamplerWeights {
        z,
        w,
        r_black: tv.r_black.v,
        r_white: tv.r_white.v,
        r_black_hat: aux.r_black_hat.v,
        r_white_hat: aux.r_white_hat.v,
        r_black_as: aux.r_black_as.v,
        r_white_as: aux.r_white_as.v,
        k_rooted: aux.k_rooted.v,
        k_unrooted,
        k_derived,
        g3_dir: g3.v,
        g3_dir_dz: g3.dz,
        g3_dir_dw: g3.dw,
        ..Default::default()
    })
}

/// Full sampler weights at an arbitrary admissible network point (z,y):
/// resolves the x with x G1'(x,y) = z and evaluates the whole table there.
pub fn network_sampler_weights(z: f64, y: f64) -> Result<SamplerWeights, OracleError> {
    let tol = 1e-13;
    let g2p = series::g2_prime_value(z, y, tol)?;
    let x = z * (-g2p).exp();
    let table = evaluate_table::<f64>(1, None, 13, 0.0, x, y)?;
    Ok(table.weights())
}

impl<R: Real> OracleTable<R> {
    /// Verify the algebraic identities the table must satisfy, to relative
    /// error 10^(-digits/2).
    pub fn consistency_check(&self) -> Result<(), OracleError> {
        let tol = pow10::<R>(-(self.digits as i32) / 2);
        let one = R::one();
        let two = R::from_i32(2);
        let close = |a: R, b: R, what: &str| -> Result<(), OracleError> {
            let scale = one + a.abs() + b.abs();
            if !((a - b).abs() <= tol * scale) {
                return Err(OracleError::CorruptTable(format!(
                    "identity failed: {what}: {a:?} vs {b:?}"
                )));
            }
            Ok(())
        };
        for (v, name) in [
            (self.x, "x"),
            (self.y, "y"),
            (self.z, "z"),
            (self.w, "w"),
            (self.k_rooted, "K_rooted"),
            (self.d, "D"),
            (self.g1_prime, "G1'"),
            (self.g, "G"),
        ] {
            if !(v.is_finite_val() && v >= R::zero()) {
                return Err(OracleError::CorruptTable(format!("non-finite or negative {name}")));
            }
        }
        let u = self.s + self.h;
        let e1 = u.exp() - one;
        close(self.d, self.y + self.s + self.p + self.h, "D = y+S+P+H")?;
        close(
            self.s,
            (self.y + self.p + self.h) * self.z * self.d,
            "S = (y+P+H) z D",
        )?;
        close(self.p, self.y * e1 + (e1 - u), "P = y exp>=1 + exp>=2")?;
        close(self.h, self.g3_dir, "H = G3dir(z, D)")?;
        close(self.w, self.d, "w = D(z,y)")?;
        close(
            self.g2_dir * (one + self.y),
            one + self.d,
            "G2dir = (1+D)/(1+y)",
        )?;
        close(
            two * self.g2_under,
            self.z * self.z * self.g2_dir,
            "2 G2under = z^2 G2dir",
        )?;
        close(
            two * self.g2_under_prime,
            self.z * self.z * self.g2_dir_prime + two * self.z * self.g2_dir,
            "2 G2under' = z^2 G2dir' + 2 z G2dir",
        )?;
        close(
            self.g2_dir_prime * (one + self.y),
            self.d1,
            "G2dir' = D'/(1+y)",
        )?;
        close(self.d1, self.s1 + self.p1 + self.h1, "D' = S'+P'+H'")?;
        close(self.k_rooted, self.r_black_as + self.r_white_as, "Kder")?;
        close(
            self.g1_prime,
            self.g2_prime.exp(),
            "G1' = exp(G2'(z,y))",
        )?;
        close(self.z, self.x * self.g1_prime, "z = x G1'")?;
        close(self.g, self.g1.exp(), "G = exp(G1)")?;
        close(self.g_prime, self.g1_prime * self.g, "G' = G1' G")?;
        close(
            self.g_second,
            self.g1_second * self.g + self.g1_prime * self.g_prime,
            "G'' = G1'' G + G1' G'",
        )?;
        Ok(())
    }

    /// Downcast every entry to f64 for the samplers.
    pub fn weights(&self) -> SamplerWeights {
        SamplerWeights {
            n: self.n,
            x: self.x.to_f64(),
            y: self.y.to_f64(),
            z: self.z.to_f64(),
            w: self.w.to_f64(),
            r_black: self.r_black.to_f64(),
            r_white: self.r_white.to_f64(),
            r_black_hat: self.r_black_hat.to_f64(),
            r_white_hat: self.r_white_hat.to_f64(),
            r_black_as: self.r_black_as.to_f64(),
            r_white_as: self.r_white_as.to_f64(),
            k_rooted: self.k_rooted.to_f64(),
            k_unrooted: self.k_unrooted.to_f64(),
            k_derived: self.k_derived.to_f64(),
            g3_dir: self.g3_dir.to_f64(),
            g3_dir_dz: self.g3_dir_dz.to_f64(),
            g3_dir_dw: self.g3_dir_dw.to_f64(),
            d: self.d.to_f64(),
            s: self.s.to_f64(),
            p: self.p.to_f64(),
            h: self.h.to_f64(),
            d1: self.d1.to_f64(),
            s1: self.s1.to_f64(),
            p1: self.p1.to_f64(),
            h1: self.h1.to_f64(),
            g2_dir: self.g2_dir.to_f64(),
            g2_dir_prime: self.g2_dir_prime.to_f64(),
            g2_under: self.g2_under.to_f64(),
            g2_under_prime: self.g2_under_prime.to_f64(),
            g2_prime: self.g2_prime.to_f64(),
            g2_second: self.g2_second.to_f64(),
            g1: self.g1.to_f64(),
            g1_prime: self.g1_prime.to_f64(),
            g1_second: self.g1_second.to_f64(),
            g: self.g.to_f64(),
            g_prime: self.g_prime.to_f64(),
            g_second: self.g_second.to_f64(),
        }
    }
}

/// f64 snapshot of the table, the only thing samplers see.
#[derive(Debug, Clone, Copy, Default)]
pub struct SamplerWeights {
    pub n: u64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
    pub w: f64,
    pub r_black: f64,
    pub r_white: f64,
    pub r_black_hat: f64,
    pub r_white_hat: f64,
    pub r_black_as: f64,
    pub r_white_as: f64,
    pub k_rooted: f64,
    pub k_unrooted: f64,
    pub k_derived: f64,
    pub g3_dir: f64,
    pub g3_dir_dz: f64,
    pub g3_dir_dw: f64,
    pub d: f64,
    pub s: f64,
    pub p: f64,
    pub h: f64,
    pub d1: f64,
    pub s1: f64,
    pub p1: f64,
    pub h1: f64,
    pub g2_dir: f64,
    pub g2_dir_prime: f64,
    pub g2_under: f64,
    pub g2_under_prime: f64,
    pub g2_prime: f64,
    pub g2_second: f64,
    pub g1: f64,
    pub g1_prime: f64,
    pub g1_second: f64,
    pub g: f64,
    pub g_prime: f64,
    pub g_second: f64,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn build_small_table_f64() {
        let (tuning, table) = build_table::<f64>(100, None, 15).unwrap();
        assert!((tuning.rho - 0.03672841).abs() < 1e-6);
        assert!((tuning.x_n - tuning.rho * (1.0 - 1.0 / 200.0)).abs() < 1e-18);
        assert!(tuning.x_n < tuning.rho);
        assert_eq!(tuning.y, 1.0);
        table.consistency_check().unwrap();
        // n = 1: x = rho/2
        let (t1, _) = build_table::<f64>(1, None, 13).unwrap();
        assert!((t1.x_n - t1.rho / 2.0).abs() < 1e-18);
    }

    #[test]
    fn table_lanes_agree() {
        use crate::real::Dd;
        let (_, t16) = build_table::<f64>(50, None, 15).unwrap();
        let (_, t30) = build_table::<Dd>(50, None, 30).unwrap();
        let pairs = [
            (t16.z, t30.z.to_f64()),
            (t16.w, t30.w.to_f64()),
            (t16.d, t30.d.to_f64()),
            (t16.d1, t30.d1.to_f64()),
            (t16.g2_prime, t30.g2_prime.to_f64()),
            (t16.g1_prime, t30.g1_prime.to_f64()),
            (t16.g1, t30.g1.to_f64()),
            (t16.g1_second, t30.g1_second.to_f64()),
            (t16.g, t30.g.to_f64()),
            (t16.g_second, t30.g_second.to_f64()),
            (t16.k_unrooted, t30.k_unrooted.to_f64()),
            (t16.g3_dir, t30.g3_dir.to_f64()),
        ];
        for (a, b) in pairs {
            assert!(
                ((a - b) / b.abs().max(1e-30)).abs() < 1e-12,
                "{a} vs {b}"
            );
        }
    }
}
