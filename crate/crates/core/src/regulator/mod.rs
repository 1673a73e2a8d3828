//! Dilogarithm regulator of Bloch elements, Borel volume and the index report.

pub mod dilog;
pub mod zeta;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::{Real, Q};
use crate::bloch::PreBloch;
use crate::error::{Error, Result};
use crate::field::NumberField;

pub use dilog::bloch_wigner;
pub use zeta::{borel_volume, residue_degrees, tail_bound, zeta_f_2, Schedule, ZetaValue};

/// A certified real as decimal midpoint and radius.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct Interval {
    pub mid: String,
    pub rad: String,
}

impl From<&Real> for Interval {
    fn from(x: &Real) -> Self {
        let (mid, rad) = x.to_decimal();
        Interval { mid, rad }
    }
}

/// Σ n_k D(σ(x_k)) for the complex embedding σ (0-based among the r₂).
pub fn regulator_entry(f: &NumberField, beta: &PreBloch, sigma: usize, prec: u32) -> Result<Real> {
    if sigma >= f.r2 {
        return Err(Error::Invalid(format!("complex embedding {sigma} out of range (r2 = {})", f.r2)));
    }
    let k = f.r1 + sigma;
    let terms: Vec<_> = beta.terms.iter().collect();
    let vals: Vec<Real> = terms
        .par_iter()
        .map(|(x, &n)| Ok(bloch_wigner(&f.embed(x, k, prec + 16)?, prec + 8).mul_i64(n)))
        .collect::<Result<_>>()?;
    Ok(vals.iter().fold(Real::zero(prec + 8), |a, v| a.add(v)))
}

#[derive(Clone, Debug)]
pub struct RegulatorMatrix {
    /// rows[i][j] = reg over σ_j of β_i.
    pub rows: Vec<Vec<Real>>,
}

impl RegulatorMatrix {
    pub fn new(f: &NumberField, betas: &[PreBloch], prec: u32) -> Result<Self> {
        if betas.len() != f.r2 {
            return Err(Error::Unsupported(format!("{} Bloch elements for r2 = {}; the matrix must be square", betas.len(), f.r2)));
        }
        let rows = betas.iter().map(|b| (0..f.r2).map(|j| regulator_entry(f, b, j, prec)).collect()).collect::<Result<_>>()?;
        Ok(RegulatorMatrix { rows })
    }

    pub fn det(&self) -> Real {
        let n = self.rows.len();
        let prec = self.rows[0][0].prec();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut total = Real::zero(prec);
        permute(&mut perm, 0, 1, &mut |p, s| {
            let mut t = Real::from_i64(s, prec);
            for (i, &j) in p.iter().enumerate() {
                t = t.mul(&self.rows[i][j]);
            }
            total = total.add(&t);
        });
        total
    }
}

fn permute(p: &mut Vec<usize>, k: usize, sign: i64, visit: &mut impl FnMut(&[usize], i64)) {
    if k == p.len() {
        visit(p, sign);
        return;
    }
    for i in k..p.len() {
        p.swap(k, i);
        permute(p, k + 1, if i == k { sign } else { -sign }, visit);
        p.swap(k, i);
    }
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
}

/// Bounds on |a − b|/|b| over the balls, and the verdict against tol.
pub fn relative_gap(a: &Real, b: &Real, tol: f64) -> (f64, f64, Verdict) {
    let diff = (a.to_f64() - b.to_f64()).abs();
    let rad = a.rad_f64() + b.rad_f64();
    let bm = b.to_f64().abs();
    let hi = (diff + rad) / (bm - b.rad_f64()).max(0.0);
    let lo = (diff - rad).max(0.0) / (bm + b.rad_f64());
    let v = if hi <= tol {
        Verdict::Pass
    } else if lo > tol {
        Verdict::Fail
    } else {
        Verdict::Inconclusive
    };
    (lo, hi, v)
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct ZetaReport {
    pub value: Interval,
    pub schedule: Schedule,
    pub euler_bound: u64,
    pub primes: usize,
    pub tail: f64,
    pub target_met: bool,
    pub cross_schedule: Schedule,
    pub cross_value: Interval,
    pub cross_bound: u64,
    pub consistent: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct IndexReport {
    pub r2: usize,
    pub n: u64,
    pub k2: u64,
    pub k3tor: u64,
    pub precision: u32,
    pub tolerance: f64,
    pub entries: Vec<Vec<Interval>>,
    pub det_m: Interval,
    pub zeta: ZetaReport,
    pub volume: Interval,
    /// (2N)^{r₂}·vol.
    pub volume_target: Interval,
    pub volume_gap: (f64, f64),
    pub volume_verdict: Verdict,
    /// |det M|/(2π)^{r₂}.
    pub raw_constant: Interval,
    /// 2^{1+r₂}N^{r₂}|K₂|/|K₃tor|.
    pub full_index: String,
    /// |K₂| alone.
    pub k2_index: String,
    pub raw_matches: String,
    pub constant_verdict: Verdict,
    /// R₂ recovered from ζ_F(2) through ζ*_F(−1) and the K-group orders.
    pub r2_analytic: Interval,
    pub normalized_constant: Interval,
    pub normalized_matches: String,
    pub warnings: Vec<String>,
}

impl IndexReport {
    /// Exit status of the numerical identity: the volume check decides.
    pub fn status(&self) -> Verdict {
        if !self.zeta.consistent {
            return Verdict::Fail;
        }
        self.volume_verdict
    }
}

/// Which of the two candidate index constants x agrees with.
fn which(x: &Real, cor: &Q, ex: &Q, tol: f64) -> String {
    let w = x.prec();
    let (_, _, a) = relative_gap(x, &Real::from_q(cor, w), tol);
    let (_, _, b) = relative_gap(x, &Real::from_q(ex, w), tol);
    match (a, b) {
        (Verdict::Pass, Verdict::Pass) => "both",
        (Verdict::Pass, _) => "full_index",
        (_, Verdict::Pass) => "k2_index",
        (Verdict::Fail, Verdict::Fail) => "neither",
        _ => "inconclusive",
    }
    .into()
}

pub struct ReportInput {
    pub n: u64,
    pub k2: u64,
    pub k3tor: u64,
    pub precision: u32,
    pub tolerance: f64,
    /// Largest Euler-product bound B.
    pub euler_cap: u64,
}

pub fn index_report(f: &NumberField, m: &RegulatorMatrix, inp: &ReportInput) -> Result<IndexReport> {
    if inp.k2 == 0 || inp.k3tor == 0 {
        return Err(Error::Invalid("k2 and k3tor must be positive".into()));
    }
    let prec = inp.precision;
    let r2 = f.r2 as u32;
    let mut warnings = Vec::new();
    let det = m.det();
    let det_abs = det.abs();
    let z = zeta_f_2(f, prec, Schedule::Quartic, inp.euler_cap)?;
    let z2 = zeta_f_2(f, prec, Schedule::Decimal, inp.euler_cap)?;
    if !z.target_met {
        warnings.push(format!("Euler product stopped at B = {} with relative tail {:.2e}, above 2^-{prec}", z.bound, z.tail));
    }
    let vol = borel_volume(f, &z.value);
    let w = vol.prec();
    let two_n = Real::from_i64(2 * inp.n as i64, w).pow(r2);
    let target = two_n.mul(&vol);
    let (lo, hi, volume_verdict) = relative_gap(&det_abs.with_prec(w), &target, inp.tolerance);
    let two_pi_r2 = Real::pi(w).mul_i64(2).pow(r2);
    let raw = det_abs.with_prec(w).div(&two_pi_r2).expect("π > 0");
    let cor = Q::from_integer((num_bigint::BigInt::from(2).pow(1 + r2) * num_bigint::BigInt::from(inp.n).pow(r2) * inp.k2).into())
        / Q::from_integer(inp.k3tor.into());
    let ex = Q::from_integer(inp.k2.into());
    let (_, _, constant_verdict) = relative_gap(&raw, &Real::from_q(&cor, w), inp.tolerance);
    // ζ*(−1) = |Δ|^{3/2}ζ_F(2)/(2π)^{3r₂} = 2^{r₂} R₂ |K₂|/|K₃tor|
    let d = num_bigint::BigInt::from(f.discriminant.magnitude().clone());
    let d32 = Real::from_int(&d.pow(3), w).sqrt();
    let zstar = d32.mul(&z.value.with_prec(w)).div(&two_pi_r2.pow(3)).expect("π > 0");
    let r2_an = zstar.mul_q(&(Q::from_integer(inp.k3tor.into()) / Q::from_integer((num_bigint::BigInt::from(2).pow(r2) * inp.k2).into())));
    let normalized = raw.div(&r2_an).ok_or_else(|| Error::Inconsistent("R2 interval contains zero".into()))?;
    Ok(IndexReport {
        r2: f.r2,
        n: inp.n,
        k2: inp.k2,
        k3tor: inp.k3tor,
        precision: prec,
        tolerance: inp.tolerance,
        entries: m.rows.iter().map(|r| r.iter().map(Interval::from).collect()).collect(),
        det_m: Interval::from(&det),
        zeta: ZetaReport {
            value: Interval::from(&z.value),
            schedule: z.schedule,
            euler_bound: z.bound,
            primes: z.primes,
            tail: z.tail,
            target_met: z.target_met,
            cross_schedule: z2.schedule,
            cross_value: Interval::from(&z2.value),
            cross_bound: z2.bound,
            consistent: z.value.overlaps(&z2.value),
        },
        volume: Interval::from(&vol),
        volume_target: Interval::from(&target),
        volume_gap: (lo, hi),
        volume_verdict,
        raw_constant: Interval::from(&raw),
        full_index: crate::arith::rat::fmt_q(&cor),
        k2_index: crate::arith::rat::fmt_q(&ex),
        raw_matches: which(&raw, &cor, &ex, inp.tolerance),
        constant_verdict,
        r2_analytic: Interval::from(&r2_an),
        normalized_matches: which(&normalized, &cor, &ex, inp.tolerance),
        normalized_constant: Interval::from(&normalized),
        warnings,
    })
}

#[cfg(test)]
mod tests;
