//! Oracle table persistence: UTF-8 text, one `key = decimal-value` per
//! line, decimal values at full stored precision. Header lines carry n,
//! mu, digits, y, rho. Saving a loaded table reproduces the file
//! byte-for-byte.

use super::{OracleError, OracleTable};
use crate::real::{format_decimal, Real};
use std::io::Write;
use std::path::Path;

const MAGIC: &str = "planargen-oracle-v1";

/// Fixed key order; the file is exactly MAGIC + these lines.
const KEYS: [&str; 37] = [
    "rho",
    "x",
    "y",
    "z",
    "w",
    "R_black",
    "R_white",
    "R_black_hat",
    "R_white_hat",
    "R_black_as",
    "R_white_as",
    "K_rooted",
    "K",
    "K_prime",
    "G3_dir",
    "G3_dir_dz",
    "G3_dir_dw",
    "D",
    "S",
    "P",
    "H",
    "D_prime",
    "S_prime",
    "P_prime",
    "H_prime",
    "G2_dir",
    "G2_dir_prime",
    "G2_under",
    "G2_under_prime",
    "G2_prime",
    "G2_second",
    "G1",
    "G1_prime",
    "G1_second",
    "G",
    "G_prime",
    "G_second",
];

fn values_of<R: Real>(t: &OracleTable<R>) -> [R; 37] {
    [
        t.rho,
        t.x,
        t.y,
        t.z,
        t.w,
        t.r_black,
        t.r_white,
        t.r_black_hat,
        t.r_white_hat,
        t.r_black_as,
        t.r_white_as,
        t.k_rooted,
        t.k_unrooted,
        t.k_derived,
        t.g3_dir,
        t.g3_dir_dz,
        t.g3_dir_dw,
        t.d,
        t.s,
        t.p,
        t.h,
        t.d1,
        t.s1,
        t.p1,
        t.h1,
        t.g2_dir,
        t.g2_dir_prime,
        t.g2_under,
        t.g2_under_prime,
        t.g2_prime,
        t.g2_second,
        t.g1,
        t.g1_prime,
        t.g1_second,
        t.g,
        t.g_prime,
        t.g_second,
    ]
}

pub fn render<R: Real>(t: &OracleTable<R>) -> String {
    let sig = R::DIGITS as usize + 6;
    let mut out = String::new();
    out.push_str(MAGIC);
    out.push('\n');
    out.push_str(&format!("n = {}\n", t.n));
    match t.mu {
        None => out.push_str("mu = none\n"),
        Some(m) => out.push_str(&format!("mu = {}\n", format_decimal(m, 21))),
    }
    out.push_str(&format!("digits = {}\n", t.digits));
    for (k, v) in KEYS.iter().zip(values_of(t)) {
        out.push_str(&format!("{k} = {}\n", format_decimal(v, sig)));
    }
    out
}

pub fn save<R: Real>(t: &OracleTable<R>, path: &Path) -> Result<(), OracleError> {
    let mut f = std::fs::File::create(path)?;
    f.write_all(render(t).as_bytes())?;
    Ok(())
}

pub fn parse<R: Real>(text: &str) -> Result<OracleTable<R>, OracleError> {
    let bad = |m: &str| OracleError::CorruptTable(m.to_string());
    let mut lines = text.lines();
    if lines.next() != Some(MAGIC) {
        return Err(bad("missing header"));
    }
    let mut kv = std::collections::HashMap::new();
    for line in lines {
        if line.trim().is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| bad(&format!("malformed line `{line}`")))?;
        kv.insert(k.trim().to_string(), v.trim().to_string());
    }
    let n: u64 = kv
        .get("n")
        .ok_or_else(|| bad("missing n"))?
        .parse()
        .map_err(|_| bad("bad n"))?;
    let mu = match kv.get("mu").map(|s| s.as_str()) {
        Some("none") | None => None,
        Some(s) => Some(
            f64::from_decimal(s).map_err(|_| bad("bad mu"))?,
        ),
    };
    let digits: u32 = kv
        .get("digits")
        .ok_or_else(|| bad("missing digits"))?
        .parse()
        .map_err(|_| bad("bad digits"))?;
    let mut vals = [R::zero(); 37];
    for (i, k) in KEYS.iter().enumerate() {
        let s = kv
            .get(*k)
            .ok_or_else(|| bad(&format!("missing field {k}")))?;
        vals[i] = R::from_decimal(s).map_err(|_| bad(&format!("bad decimal for {k}")))?;
    }
    let [rho, x, y, z, w, r_black, r_white, r_black_hat, r_white_hat, r_black_as, r_white_as, k_rooted, k_unrooted, k_derived, g3v, g3z, g3w, d, s, p, h, d1, s1, p1, h1, g2_dir, g2_dir_prime, g2_under, g2_under_prime, g2_prime, g2_second, g1, g1_prime, g1_second, g, g_prime, g_second] =
        vals;
    let table = OracleTable {
        n,
        mu,
        digits,
        rho,
        x,
        y,
        z,
        w,
        r_black,
        r_white,
        r_black_hat,
        r_white_hat,
        r_black_as,
        r_white_as,
        k_rooted,
        k_unrooted,
        k_derived,
        g3_dir: g3v,
        g3_dir_dz: g3z,
        g3_dir_dw: g3w,
        d,
        s,
        p,
        h,
        d1,
        s1,
        p1,
        h1,
        g2_dir,
        g2_dir_prime,
        g2_under,
        g2_under_prime,
        g2_prime,
        g2_second,
        g1,
        g1_prime,
        g1_second,
        g,
        g_prime,
        g_second,
    };
    table.consistency_check()?;
    Ok(table)
}

pub fn load<R: Real>(path: &Path) -> Result<OracleTable<R>, OracleError> {
    let text = std::fs::read_to_string(path)?;
    parse(&text)
}
