//! Generating-function evaluators, generic over the scalar type.
//!
//! The chain mirrors the decomposition: the rooted-binary-tree system feeds
//! a rational expression for edge-rooted 3-connected planar graphs, the
//! network system feeds the 2-connected series, a fixed point with change
//! of variable z = x*G1'(x,y) feeds the connected series, and exp feeds the
//! planar series. First derivatives come from implicit differentiation
//! (never finite differences); second derivatives from one further
//! implicit differentiation, propagated through rational expressions by
//! second-order jets.

use crate::jet::Jet2;
use crate::real::Real;
use super::OracleError;

/// Bound beyond which monotone iterates are declared divergent.
const ITERATE_BOUND: f64 = 1.0e4;

/// Tree-system solution at (z,w) with first and second partials.
#[derive(Clone, Copy, Debug)]
pub struct TreeVals<R> {
    pub z: R,
    pub w: R,
    pub r_black: Jet2<R>,
    pub r_white: Jet2<R>,
}

/// Solve R_black = z (w + R_white)^2, R_white = (w + R_black)^2 by monotone
/// iteration from 0 with safeguarded Newton polish; partials by implicit
/// differentiation of the system.
pub fn tree_solve<R: Real>(z: R, w: R, tol: R) -> Result<TreeVals<R>, OracleError> {
    if z < R::zero() || w < R::zero() {
        return Err(OracleError::Parameter("tree series need z,w >= 0".into()));
    }
    let bound = R::from_f64(ITERATE_BOUND);
    let one = R::one();
    let two = R::from_i32(2);
    let four = R::from_i32(4);
    let mut rb = R::zero();
    let mut rw = R::zero();
    let cap = 400_000u32;
    let mut converged = false;
    let mut i = 0u32;
    while i < cap {
        i += 1;
        let a = w + rw;
        let b = w + rb;
        let nrb = z * a * a;
        let nrw = b * b;
        if nrb > bound || nrw > bound {
            return Err(OracleError::OutsideDomain);
        }
        let moved = (nrb - rb).abs() + (nrw - rw).abs();
        rb = nrb;
        rw = nrw;
        if moved < tol * (one + rb + rw) && i > 5 {
            converged = true;
            break;
        }
        // Newton polish attempt from the monotone lower iterate
        if i >= 8 && i % 8 == 0 {
            let (mut pb, mut pw) = (rb, rw);
            let mut ok = false;
            for _ in 0..80 {
                let a = w + pw;
                let b = w + pb;
                let delta = one - four * z * a * b;
                if delta <= R::zero() || pb > bound || pw > bound {
                    break;
                }
                let f1 = pb - z * a * a;
                let f2 = pw - b * b;
                let drb = (-f1 - two * z * a * f2) / delta;
                let drw = (-f2 - two * b * f1) / delta;
                pb += drb;
                pw += drw;
                if pb < -tol || pw < -tol {
                    break;
                }
                if drb.abs() + drw.abs() < tol * (one + pb.abs() + pw.abs()) {
                    ok = true;
                    break;
                }
            }
            if ok {
                let a = w + pw;
                let b = w + pb;
                let resid = (pb - z * a * a).abs() + (pw - b * b).abs();
                if resid < tol * (one + pb + pw) * R::from_i32(100)
                    && one - four * z * a * b > R::zero()
                    && pb >= R::zero()
                    && pw >= R::zero()
                {
                    rb = pb;
                    rw = pw;
                    converged = true;
                    break;
                }
            }
        }
    }
    if !converged {
        return Err(OracleError::OutsideDomain);
    }
    let a = w + rw;
    let b = w + rb;
    let delta = one - four * z * a * b;
    if delta <= R::zero() {
        return Err(OracleError::OutsideDomain);
    }
    // first partials
    let rb_z = a * a / delta;
    let rw_z = two * b * rb_z;
    let rb_w = two * z * a * (one + two * b) / delta;
    let rw_w = two * b * (one + rb_w);
    // second partials: differentiate the linearized system once more;
    // a_X = dR_white/dX, b_X = dR_black/dX
    let (a_z, a_w) = (rw_z, one + rw_w);
    let (b_z, b_w) = (rb_z, one + rb_w);
    let second = |c1: R, bx: R, by: R| -> (R, R) {
        let rb_xy = (c1 + four * z * a * bx * by) / delta;
        let rw_xy = two * bx * by + two * b * rb_xy;
        (rb_xy, rw_xy)
    };
    let (rb_zz, rw_zz) = second(four * a * a_z + two * z * a_z * a_z, b_z, b_z);
    let (rb_zw, rw_zw) = second(two * a * a_w + two * z * a_z * a_w, b_z, b_w);
    let (rb_ww, rw_ww) = second(two * z * a_w * a_w, b_w, b_w);
    Ok(TreeVals {
        z,
        w,
        r_black: Jet2::lifted(rb, rb_z, rb_w, rb_zz, rb_zw, rb_ww),
        r_white: Jet2::lifted(rw, rw_z, rw_w, rw_zz, rw_zw, rw_ww),
    })
}

/// The auxiliary rooted-tree series of the grammar, as jets in (z,w).
#[derive(Clone, Copy, Debug)]
pub struct TreeAux<R> {
    pub r_black_hat: Jet2<R>,
    pub r_white_hat: Jet2<R>,
    pub r_black_as: Jet2<R>,
    pub r_white_as: Jet2<R>,
    /// series of leaf-rooted trees with class-asymmetric underlying tree
    pub k_rooted: Jet2<R>,
}

pub fn tree_aux<R: Real>(t: &TreeVals<R>) -> TreeAux<R> {
    let z = Jet2::var_z(t.z);
    let w = Jet2::var_w(t.w);
    let two = Jet2::constant(R::from_i32(2));
    let rb = t.r_black;
    let rw = t.r_white;
    let r_white_hat = w + two * w * rb + rb * rb;
    let r_black_hat = two * z * w * w * r_white_hat + z * r_white_hat * r_white_hat;
    let r_black_as = two * z * w * rw + z * rw * rw;
    let r_white_as = two * w * r_black_hat + rb * rb;
    TreeAux {
        r_black_hat,
        r_white_hat,
        r_black_as,
        r_white_as,
        k_rooted: r_black_as + r_white_as,
    }
}

/// Edge-rooted 3-connected planar graph series (and partials) at (z,w): the
/// rational expression in the tree series, via the quadrangulation
/// correspondence. Validated against the small 3-connected counts.
pub fn g3_dir<R: Real>(t: &TreeVals<R>) -> Jet2<R> {
    let one = Jet2::constant(R::one());
    let half = Jet2::constant(R::from_f64(0.5));
    let z = Jet2::var_z(t.z);
    let w = Jet2::var_w(t.w);
    if t.w == R::zero() {
        return Jet2::constant(R::zero());
    }
    let u = t.r_black / w;
    let v = t.r_white / w;
    let e = (one + z * w).recip() + (one + w).recip()
        - one
        - (one + u).powi(2) * (one + v).powi(2) * (one + u + v).powi(3).recip();
    half * w * e
}

// ---------------------------------------------------------------------------
// quadrature
// ---------------------------------------------------------------------------

/// Gauss-Legendre nodes/weights on [-1,1], computed once per scalar type by
/// Newton refinement of f64 seeds (so they are accurate to the full working
/// precision).
fn gauss_legendre<R: Real>(n: usize) -> (Vec<R>, Vec<R>) {
    let mut nodes = Vec::with_capacity(n);
    let mut weights = Vec::with_capacity(n);
    for i in 0..n {
        let seed = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut x = R::from_f64(seed);
        for _ in 0..4 {
            // Legendre P_n(x) and P_n'(x) by recurrence
            let mut p0 = R::one();
            let mut p1 = x;
            for k in 2..=n {
                let kf = R::from_i32(k as i32);
                let p2 = ((R::from_i32(2 * k as i32 - 1)) * x * p1
                    - (kf - R::one()) * p0)
                    / kf;
                p0 = p1;
                p1 = p2;
            }
            let dp = R::from_i32(n as i32) * (x * p1 - p0) / (x * x - R::one());
            x -= p1 / dp;
        }
        // weight = 2 / ((1-x^2) P_n'(x)^2)
        let mut p0 = R::one();
        let mut p1 = x;
        for k in 2..=n {
            let kf = R::from_i32(k as i32);
            let p2 = ((R::from_i32(2 * k as i32 - 1)) * x * p1 - (kf - R::one()) * p0) / kf;
            p0 = p1;
            p1 = p2;
        }
        let dp = R::from_i32(n as i32) * (x * p1 - p0) / (x * x - R::one());
        weights.push(R::from_i32(2) / ((R::one() - x * x) * dp * dp));
        nodes.push(x);
    }
    (nodes, weights)
}

/// Adaptive Gauss-Legendre quadrature. Each panel gets a 16-point value;
/// the error estimate is the disagreement between a panel and the sum of
/// its halves, with the error budget distributed proportionally to panel
/// width. Splitting converges geometrically for integrands analytic near
/// the interval.
pub fn integrate<R: Real>(
    mut f: impl FnMut(R) -> Result<R, OracleError>,
    a: R,
    b: R,
    rel_tol: R,
) -> Result<R, OracleError> {
    if b == a {
        return Ok(R::zero());
    }
    let (n16, w16) = gauss_legendre::<R>(16);
    let half = R::from_f64(0.5);
    let gl16 = |lo: R, hi: R, f: &mut dyn FnMut(R) -> Result<R, OracleError>| {
        let c = (lo + hi) * half;
        let h = (hi - lo) * half;
        let mut s = R::zero();
        let mut fmax = R::zero();
        for (x, wt) in n16.iter().zip(&w16) {
            let v = f(c + h * *x)?;
            fmax = fmax.maxv(v.abs());
            s += *wt * v;
        }
        Ok::<(R, R), OracleError>((s * h, fmax))
    };
    let (whole, _) = gl16(a, b, &mut f)?;
    let scale = whole.abs().maxv(R::from_f64(1e-6));
    let budget_per_width = rel_tol * scale / (b - a).abs();
    // integrands with sharp interior peaks cannot be resolved below the
    // representation's roundoff on the peak values
    let roundoff = R::eps() * R::from_f64(64.0);
    // (lo, hi, value-of-whole-panel, parent error, depth)
    let inf = R::from_f64(f64::MAX);
    let mut stack = vec![(a, b, whole, inf, 0u32)];
    let mut total = R::zero();
    let mut panels = 0usize;
    while let Some((lo, hi, val, parent_err, depth)) = stack.pop() {
        panels += 1;
        if panels > 200_000 {
            return Err(OracleError::Precision(
                "quadrature failed to reach tolerance (panel cap)".into(),
            ));
        }
        let mid = (lo + hi) * half;
        let (left, fmax_l) = gl16(lo, mid, &mut f)?;
        let (right, fmax_r) = gl16(mid, hi, &mut f)?;
        let err = (left + right - val).abs();
        let width = (hi - lo).abs();
        let floor = roundoff * fmax_l.maxv(fmax_r) * width;
        // once halving stops reducing the error estimate by a decisive
        // factor, the panel is limited by the integrand's own evaluation
        // noise (series solves near their singular curve); refining further
        // cannot help
        let noise_plateau = depth >= 16 && err >= parent_err * R::from_f64(0.45);
        if err <= budget_per_width * width + floor || noise_plateau {
            total += left + right;
        } else if depth >= 60 {
            return Err(OracleError::Precision(
                "quadrature failed to reach tolerance (depth cap)".into(),
            ));
        } else {
            stack.push((lo, mid, left, err, depth + 1));
            stack.push((mid, hi, right, err, depth + 1));
        }
    }
    Ok(total)
}

// ---------------------------------------------------------------------------
// networks
// ---------------------------------------------------------------------------

/// Network series at (z,y): values, first z-derivatives, and the second
/// z-derivative of D (needed for the 2-connected second derivative).
#[derive(Clone, Copy, Debug)]
pub struct NetVals<R> {
    pub d: R,
    pub s: R,
    pub p: R,
    pub h: R,
    pub d1: R,
    pub s1: R,
    pub p1: R,
    pub h1: R,
    pub d2: R,
    /// 3-connected series with partials, evaluated at (z, D(z,y))
    pub g3: Jet2<R>,
}

/// Solve D = y + S + P + H with S = zD^2/(1+zD), P = y exp>=1(S+H) +
/// exp>=2(S+H), H = G3dir(z, D): monotone iteration from 0 on the reduced
/// scalar equation, with Newton acceleration; then two linear solves for
/// the derived series (same matrix, different right-hand sides).
pub fn network_solve<R: Real>(z: R, y: R, tol: R) -> Result<NetVals<R>, OracleError> {
    if z < R::zero() || y < R::zero() {
        return Err(OracleError::Parameter("network series need z,y >= 0".into()));
    }
    let one = R::one();
    let bound = R::from_f64(ITERATE_BOUND);
    let rhs = |d: R| -> Result<(R, R, R, Jet2<R>), OracleError> {
        let s = z * d * d / (one + z * d);
        let g3 = if d > R::zero() {
            g3_dir(&tree_solve(z, d, tol)?)
        } else {
            Jet2::constant(R::zero())
        };
        let h = g3.v;
        let u = s + h;
        let e1 = u.exp() - one;
        let p = y * e1 + (e1 - u);
        Ok((s, p, h, g3))
    };
    let mut d = R::zero();
    let mut state = None;
    let cap = 400_000u32;
    let mut i = 0u32;
    while i < cap {
        i += 1;
        let (s, p, h, g3) = rhs(d)?;
        let nd = y + s + p + h;
        if nd > bound {
            return Err(OracleError::OutsideDomain);
        }
        let moved = (nd - d).abs();
        // Newton acceleration on g(D) = rhs(D) - D once moving slowly
        if i > 4 && moved > tol * (one + nd) {
            let ds_dd = z * d * (R::from_i32(2) + z * d) / ((one + z * d) * (one + z * d));
            let u = s + h;
            let e0 = u.exp();
            let dp_du = y * e0 + e0 - one;
            let dh_dd = g3.dw;
            let gprime = ds_dd + dp_du * (ds_dd + dh_dd) + dh_dd - one;
            if gprime < -R::from_f64(1e-14) {
                let cand = d - (nd - d) / gprime;
                // keep Newton only if it stays ahead of the monotone iterate
                // and inside the domain probe
                if cand > nd && cand < bound {
                    if let Ok((s2, p2, h2, _)) = rhs(cand) {
                        let nd2 = y + s2 + p2 + h2;
                        if (nd2 - cand).abs() < moved {
                            d = cand;
                            continue;
                        }
                    }
                }
            }
        }
        if moved < tol * (one + nd) && i > 3 {
            d = nd;
            state = Some(rhs(d)?);
            break;
        }
        d = nd;
    }
    let Some((s, p, h, g3)) = state else {
        return Err(OracleError::OutsideDomain);
    };

    // derived series: mechanical derivative of the grammar in the L
    // variable. Unknowns (D',S',P',H'):
    //   D' = S' + P' + H'
    //   S' = (P'+H') z D + c D + c z D'          with c = y + P + H
    //   P' = (S'+H') Q                           with Q = y e^u + (e^u - 1)
    //   H' = dz_G3 + D' dw_G3                    at (z, D)
    let u = s + h;
    let e0 = u.exp();
    let q = y * e0 + (e0 - one);
    let c = y + p + h;
    let zero = R::zero();
    let a = [
        [one, -one, -one, -one],
        [-c * z, one, -z * d, -z * d],
        [zero, -q, one, -q],
        [-g3.dw, zero, zero, one],
    ];
    let b1 = [zero, c * d, zero, g3.dz];
    let x1 = solve4(a, b1)?;
    let (d1, s1, p1, h1) = (x1[0], x1[1], x1[2], x1[3]);

    // second derivative: same matrix, new right-hand side
    let cp = d1 - s1;
    let u1 = s1 + h1;
    let two = R::from_i32(2);
    let b2 = [
        zero,
        (p1 + h1) * (d + z * d1) + cp * d + two * c * d1 + cp * z * d1,
        u1 * u1 * (one + y) * e0,
        g3.dzz + two * g3.dzw * d1 + g3.dww * d1 * d1,
    ];
    let x2 = solve4(a, b2)?;
    Ok(NetVals {
        d,
        s,
        p,
        h,
        d1,
        s1,
        p1,
        h1,
        d2: x2[0],
        g3,
    })
}

fn solve4<R: Real>(a: [[R; 4]; 4], b: [R; 4]) -> Result<[R; 4], OracleError> {
    let mut m = [[R::zero(); 5]; 4];
    for i in 0..4 {
        m[i][..4].copy_from_slice(&a[i]);
        m[i][4] = b[i];
    }
    for col in 0..4 {
        let piv = (col..4)
            .max_by(|&i, &j| {
                m[i][col]
                    .abs()
                    .partial_cmp(&m[j][col].abs())
                    .unwrap_or(std::cmp::Ordering::Equal)
            })
            .unwrap();
        if m[piv][col].abs() == R::zero() {
            return Err(OracleError::Instability("singular derived-system matrix".into()));
        }
        m.swap(col, piv);
        for row in col + 1..4 {
            let f = m[row][col] / m[col][col];
            for k in col..5 {
                let t = m[col][k];
                m[row][k] -= f * t;
            }
        }
    }
    let mut x = [R::zero(); 4];
    for i in (0..4).rev() {
        let mut acc = m[i][4];
        for k in i + 1..4 {
            acc -= m[i][k] * x[k];
        }
        x[i] = acc / m[i][i];
    }
    Ok(x)
}

// ---------------------------------------------------------------------------
// 2-connected
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug)]
pub struct TwoConnVals<R> {
    pub g2_dir: R,
    pub g2_dir_prime: R,
    pub g2_under: R,
    pub g2_under_prime: R,
    pub g2_prime: R,
    pub g2_second: R,
}

/// Integrate f over [0, b] where f may behave like a + c (t* - t)^(1/2)
/// with t* at or just beyond b (the network series near their singular
/// curve): the substitution t = b - s^2 turns the fractional power into a
/// function analytic on a far larger neighbourhood, so panel splitting
/// converges geometrically again.
pub fn integrate_to_edge<R: Real>(
    mut f: impl FnMut(R) -> Result<R, OracleError>,
    b: R,
    tol: R,
) -> Result<R, OracleError> {
    if b == R::zero() {
        return Ok(R::zero());
    }
    let two = R::from_i32(2);
    integrate(
        |s| {
            let t = (b - s * s).maxv(R::zero());
            Ok(f(t)? * two * s)
        },
        R::zero(),
        b.sqrt(),
        tol,
    )
}

/// Derivative of G2' in y is [z(1+D) + z^2 D'/2]/(1+y); integrate from 0.
pub fn g2_prime_value<R: Real>(z: R, y: R, tol: R) -> Result<R, OracleError> {
    if z == R::zero() {
        return Ok(R::zero());
    }
    let one = R::one();
    let half = R::from_f64(0.5);
    integrate_to_edge(
        |t| {
            if t == R::zero() {
                return Ok(z); // D(z,0) = 0, D'(z,0) = 0
            }
            let nv = network_solve(z, t, tol)?;
            Ok((z * (one + nv.d) + z * z * nv.d1 * half) / (one + t))
        },
        y,
        tol,
    )
}

pub fn two_connected_values<R: Real>(z: R, y: R, tol: R) -> Result<TwoConnVals<R>, OracleError> {
    let one = R::one();
    let two = R::from_i32(2);
    let half = R::from_f64(0.5);
    let nv = network_solve(z, y, tol)?;
    let g2_dir = (one + nv.d) / (one + y);
    let g2_dir_prime = nv.d1 / (one + y);
    let g2_under = z * z * g2_dir * half;
    let g2_under_prime = (z * z * g2_dir_prime + two * z * g2_dir) * half;
    let g2_prime = g2_prime_value(z, y, tol)?;
    let g2_second = g2_second_value(z, y, tol)?;
    Ok(TwoConnVals {
        g2_dir,
        g2_dir_prime,
        g2_under,
        g2_under_prime,
        g2_prime,
        g2_second,
    })
}

// ---------------------------------------------------------------------------
// connected / planar
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug)]
pub struct ConnVals<R> {
    pub g1: R,
    pub g1_prime: R,
    pub g1_second: R,
    /// induced parameter z = x G1'(x,y)
    pub z: R,
    pub g2_prime_at_z: R,
    pub g2_second_at_z: R,
}

/// G1'(x,y) solves G1' = exp(G2'(x G1', y)). Monotone iteration from 1
/// with a geometric-tail (Aitken) finish; the map's contraction factor
/// x G1' G2'' stays small on the whole admissible range, so convergence is
/// fast. Divergence signals x beyond the singularity.
pub fn g1_prime_fixed_point<R: Real>(x: R, y: R, tol: R) -> Result<R, OracleError> {
    if x == R::zero() {
        return Ok(R::one());
    }
    let one = R::one();
    let beyond = |e: OracleError| match e {
        OracleError::OutsideDomain => OracleError::BeyondSingularity,
        other => other,
    };
    let mut g = one;
    let mut prev_delta: Option<R> = None;
    for _ in 0..5_000 {
        let z = x * g;
        let gp = g2_prime_value(z, y, tol).map_err(beyond)?;
        let phi = gp.exp();
        let delta = phi - g;
        g = phi;
        if delta.abs() < tol * (one + g) {
            return Ok(g);
        }
        if g > R::from_f64(1e6) {
            return Err(OracleError::BeyondSingularity);
        }
        if let Some(pd) = prev_delta {
            if delta > R::zero() && pd > R::zero() {
                let q = delta / pd;
                if q < R::from_f64(0.999) {
                    let remaining = delta * q / (one - q);
                    if remaining < tol * (one + g) {
                        return Ok(g + remaining);
                    }
                }
            }
        }
        prev_delta = Some(delta);
    }
    Err(OracleError::BeyondSingularity)
}

/// d/dy of G2'' integrand form: G2''(z,y) = int_0^y [(1+D) + 2zD' +
/// z^2 D''/2] / (1+t) dt.
pub fn g2_second_value<R: Real>(z: R, y: R, tol: R) -> Result<R, OracleError> {
    let one = R::one();
    let two = R::from_i32(2);
    let half = R::from_f64(0.5);
    integrate_to_edge(
        |t| {
            if t == R::zero() {
                return Ok(one);
            }
            let nv = network_solve(z, t, tol)?;
            Ok((one + nv.d + two * z * nv.d1 + z * z * nv.d2 * half) / (one + t))
        },
        y,
        tol,
    )
}

pub fn connected_values<R: Real>(x: R, y: R, tol: R) -> Result<ConnVals<R>, OracleError> {
    let one = R::one();
    let two = R::from_i32(2);
    let g1p = g1_prime_fixed_point(x, y, tol)?;
    let z = x * g1p;
    let tc = two_connected_values(z, y, tol)?;
    let denom = one - x * g1p * tc.g2_second;
    if denom <= R::zero() {
        return Err(OracleError::BeyondSingularity);
    }
    let g1_second = g1p * g1p * tc.g2_second / denom;
    // G1(x,y) = int_0^x G1' dx. With the change of variable x = t e^{-G2'},
    // integration by parts turns this into Z - Z G2'(Z,y) + G2(Z,y), and
    // the 2-connected value has the single-quadrature form
    // G2(Z,y) = int_0^y Z^2 (1 + D(Z,t)) / (2(1+t)) dt.
    let g2_value = integrate_to_edge(
        |t| {
            if t == R::zero() {
                return Ok(z * z / two);
            }
            let nv = network_solve(z, t, tol)?;
            Ok(z * z * (one + nv.d) / (two * (one + t)))
        },
        y,
        tol,
    )?;
    let g1 = z - z * tc.g2_prime + g2_value;
    Ok(ConnVals {
        g1,
        g1_prime: g1p,
        g1_second,
        z,
        g2_prime_at_z: tc.g2_prime,
        g2_second_at_z: tc.g2_second,
    })
}

#[derive(Clone, Copy, Debug)]
pub struct PlanarVals<R> {
    pub g: R,
    pub g_prime: R,
    pub g_second: R,
}

pub fn planar_values<R: Real>(conn: &ConnVals<R>) -> PlanarVals<R> {
    let g = conn.g1.exp();
    let g_prime = conn.g1_prime * g;
    let g_second = conn.g1_second * g + conn.g1_prime * g_prime;
    PlanarVals {
        g,
        g_prime,
        g_second,
    }
}
