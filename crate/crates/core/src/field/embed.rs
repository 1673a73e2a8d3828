//! Root isolation for the minimal polynomial and certified embeddings.

use num_traits::{One, Signed, Zero};

use super::{Elem, NumberField};
use crate::arith::rat::{q, Q};
use crate::arith::{Complex, QPoly, Real};
use crate::error::{Error, Result};

/// Approximate roots in canonical embedding order: real roots ascending,
/// then one root per conjugate pair (positive imaginary part) by ascending
/// real part.
#[derive(Clone, Debug)]
pub struct RootSet {
    approx: Vec<(f64, f64)>,
    r1: usize,
}

type C64 = (f64, f64);

fn cmul(a: C64, b: C64) -> C64 {
    (a.0 * b.0 - a.1 * b.1, a.0 * b.1 + a.1 * b.0)
}

fn cdiv(a: C64, b: C64) -> C64 {
    let d = b.0 * b.0 + b.1 * b.1;
    ((a.0 * b.0 + a.1 * b.1) / d, (a.1 * b.0 - a.0 * b.1) / d)
}

fn horner64(c: &[f64], z: C64) -> C64 {
    c.iter().rev().fold((0.0, 0.0), |acc, &k| {
        let m = cmul(acc, z);
        (m.0 + k, m.1)
    })
}

/// All complex roots by Durand–Kerner iteration in f64.
fn durand_kerner(poly: &QPoly) -> Vec<C64> {
    let monic = poly.monic();
    let c: Vec<f64> = monic.0.iter().map(crate::arith::rat::to_f64).collect();
    let n = c.len() - 1;
    let bound = 1.0 + c[..n].iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let mut z: Vec<C64> = (0..n)
        .map(|k| {
            let t = 2.0 * std::f64::consts::PI * (k as f64 + 0.25) / n as f64 + 0.4;
            (0.5 * bound * t.cos(), 0.5 * bound * t.sin())
        })
        .collect();
    for _ in 0..2000 {
        let mut delta = 0.0f64;
        for i in 0..n {
            let num = horner64(&c, z[i]);
            let mut den = (1.0, 0.0);
            for j in 0..n {
                if i != j {
                    den = cmul(den, (z[i].0 - z[j].0, z[i].1 - z[j].1));
                }
            }
            let step = cdiv(num, den);
            z[i] = (z[i].0 - step.0, z[i].1 - step.1);
            delta = delta.max(step.0.abs() + step.1.abs());
        }
        if delta < 1e-15 * bound {
            break;
        }
    }
    z
}

fn eval_ball(poly: &QPoly, z: &Complex) -> Complex {
    let p = z.prec();
    poly.0.iter().rev().fold(Complex::zero(p), |acc, c| acc.mul(z).add(&Complex::real(Real::from_q(c, p))))
}

/// Newton refinement to precision w followed by the n|f/f'| inclusion radius.
fn refine(poly: &QPoly, start: C64, real: bool, w: u32) -> Result<Complex> {
    let n = poly.degree() as i64;
    let d = poly.derivative();
    let mut z = Complex::from_f64(start.0, if real { 0.0 } else { start.1 }, w);
    let mut iters = 0;
    loop {
        let fz = eval_ball(poly, &z);
        let dz = eval_ball(&d, &z);
        let step = fz.div(&dz).ok_or_else(|| Error::Field("root refinement hit a critical point".into()))?;
        let nz = z.sub(&step);
        z = Complex::new(nz.re.midpoint(), if real { Real::zero(w) } else { nz.im.midpoint() });
        iters += 1;
        let small = step.re.mag_q() + step.im.mag_q();
        if small < Q::new(1.into(), num_bigint::BigInt::one() << (w - 8)) || iters > 200 {
            break;
        }
    }
    let fz = eval_ball(poly, &z);
    let dz = eval_ball(&d, &z);
    let num = fz.abs().upper_q();
    let den = dz.abs().lower_q();
    if !den.is_positive() {
        return Err(Error::Field("root isolation failed: derivative vanishes".into()));
    }
    let r = Q::from_integer(n.into()) * num / den;
    Ok(Complex::new(z.re.add_error(&r), if real { Real::zero(w) } else { z.im.add_error(&r) }))
}

impl RootSet {
    pub fn isolate(poly: &QPoly, r1: usize) -> Result<RootSet> {
        let n = poly.degree() as usize;
        let mut z = durand_kerner(poly);
        z.sort_by(|a, b| a.1.abs().partial_cmp(&b.1.abs()).unwrap());
        let (reals, cplx) = z.split_at(r1);
        let mut reals: Vec<C64> = reals.iter().map(|r| (r.0, 0.0)).collect();
        reals.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        let mut pos: Vec<C64> = cplx.iter().filter(|c| c.1 > 0.0).cloned().collect();
        pos.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then(a.1.partial_cmp(&b.1).unwrap()));
        if reals.len() + 2 * pos.len() != n {
            return Err(Error::Field("root isolation failed to separate conjugate pairs".into()));
        }
        let mut approx = reals;
        approx.extend(pos);
        let set = RootSet { approx, r1 };
        set.certify(poly)?;
        Ok(set)
    }

    /// Checks that the inclusion disks of all n roots are pairwise disjoint
    /// and that the real candidates bracket a sign change.
    fn certify(&self, poly: &QPoly) -> Result<()> {
        let w = 96;
        let mut all = Vec::new();
        for (k, &a) in self.approx.iter().enumerate() {
            let real = k < self.r1;
            let z = refine(poly, a, real, w)?;
            if real {
                let lo = z.re.lower_q();
                let hi = z.re.upper_q();
                let (fl, fh) = (poly.eval(&lo), poly.eval(&hi));
                if !(fl.is_negative() && fh.is_positive() || fl.is_positive() && fh.is_negative()) {
                    return Err(Error::Field("could not certify a real root".into()));
                }
                all.push(z);
            } else {
                all.push(z.conj());
                all.push(z);
            }
        }
        for i in 0..all.len() {
            for j in 0..i {
                let (a, b) = (&all[i], &all[j]);
                let apart = !a.re.overlaps(&b.re) || !a.im.overlaps(&b.im);
                if !apart {
                    return Err(Error::Field("root inclusion disks overlap".into()));
                }
            }
        }
        Ok(())
    }

    /// Root balls for the r1 + r2 embeddings at working precision w.
    pub fn at(&self, poly: &QPoly, w: u32) -> Result<Vec<Complex>> {
        self.approx.iter().enumerate().map(|(k, &a)| refine(poly, a, k < self.r1, w)).collect()
    }

    pub fn approx(&self) -> &[(f64, f64)] {
        &self.approx
    }
}

impl NumberField {
    /// Number of non-conjugate embeddings r1 + r2.
    pub fn embedding_count(&self) -> usize {
        self.r1 + self.r2
    }

    fn roots_at(&self, w: u32) -> Result<Vec<Complex>> {
        if let Some(v) = self.root_cache.lock().unwrap().get(&w) {
            return Ok(v.clone());
        }
        let v = self.roots.at(&self.poly, w)?;
        self.root_cache.lock().unwrap().insert(w, v.clone());
        Ok(v)
    }

    fn embed_at(&self, x: &Elem, k: usize, w: u32) -> Result<Complex> {
        let roots = self.roots_at(w)?;
        let theta = &roots[k];
        let p = self.to_power_poly(x);
        Ok(eval_ball(&p, theta))
    }

    /// Certified ball for σ_k(x) (k is 0-based) with width at most
    /// 2^(1-prec)·max(1, |σ_k(x)|).
    pub fn embed(&self, x: &Elem, k: usize, prec: u32) -> Result<Complex> {
        if k >= self.embedding_count() {
            return Err(Error::Invalid(format!("embedding index {k} out of range")));
        }
        let mut w = prec + 24;
        loop {
            let v = self.embed_at(x, k, w)?;
            let mag = v.re.mag_q() + v.im.mag_q();
            let scale = if mag > Q::one() { mag } else { Q::one() };
            let width = (v.re.rad_q() + v.im.rad_q()) * q(2);
            let bound = scale * Q::new(2.into(), num_bigint::BigInt::one() << prec);
            if width <= bound {
                return Ok(v.with_prec(prec + 8));
            }
            if w > 16 * prec + 4096 {
                return Err(Error::Inconsistent("embedding precision escalation did not converge".into()));
            }
            w *= 2;
        }
    }

    /// All non-conjugate embeddings of x.
    pub fn embed_all(&self, x: &Elem, prec: u32) -> Result<Vec<Complex>> {
        (0..self.embedding_count()).map(|k| self.embed(x, k, prec)).collect()
    }

    /// All n complex embeddings (each complex one followed by its conjugate), f64.
    pub fn embed_all_f64(&self, x: &Elem) -> Vec<(f64, f64)> {
        let p = self.to_power_poly(x);
        let c: Vec<f64> = p.0.iter().map(crate::arith::rat::to_f64).collect();
        let mut out = Vec::new();
        for (k, &r) in self.roots.approx().iter().enumerate() {
            let v = horner64(&c, r);
            out.push(v);
            if k >= self.r1 {
                out.push((v.0, -v.1));
            }
        }
        out
    }

    /// Balls of all n complex embeddings, conjugates included, at precision w.
    pub fn embed_all_full(&self, x: &Elem, w: u32) -> Result<Vec<Complex>> {
        let roots = self.roots_at(w)?;
        let p = self.to_power_poly(x);
        let mut out = Vec::new();
        for (k, r) in roots.iter().enumerate() {
            let v = eval_ball(&p, r);
            if k >= self.r1 {
                out.push(v.clone());
                out.push(v.conj());
            } else {
                out.push(v);
            }
        }
        Ok(out)
    }

    pub(crate) fn root_balls(&self, w: u32) -> Result<Vec<Complex>> {
        self.roots_at(w)
    }
}

pub(crate) fn eval_poly_ball(poly: &QPoly, z: &Complex) -> Complex {
    eval_ball(poly, z)
}

#[allow(dead_code)]
fn is_zero_q(x: &Q) -> bool {
    x.is_zero()
}
