//! Number fields given by a monic minimal polynomial and an integral basis.

mod embed;
mod invariants;
pub mod spec;

use std::collections::HashMap;
use std::sync::Mutex;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::arith::rat::{fmt_q, q, qi, Q};
use crate::arith::{Complex, QMat, QPoly};
use crate::error::{Error, Result};

pub use embed::RootSet;
pub use invariants::{LevelOutcome, TwoSquares};
pub(crate) use invariants::small_elements;

/// An element of F by coordinates in the integral basis.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Elem(pub Vec<Q>);

impl Elem {
    pub fn coords(&self) -> &[Q] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|x| x.is_zero())
    }

    pub fn is_integral_coords(&self) -> bool {
        self.0.iter().all(|x| x.is_integer())
    }

    pub fn int_coords(&self) -> Option<Vec<BigInt>> {
        self.is_integral_coords().then(|| self.0.iter().map(|x| x.to_integer()).collect())
    }

    pub fn to_strings(&self) -> Vec<String> {
        self.0.iter().map(fmt_q).collect()
    }
}

#[derive(Debug)]
pub struct NumberField {
    /// Integer coefficients c0..cn of the monic minimal polynomial.
    pub min_poly: Vec<BigInt>,
    poly: QPoly,
    pub n: usize,
    /// Row i holds the power-basis coefficients of the i-th basis element.
    basis_power: QMat,
    power_to_basis: QMat,
    /// mult[i][j] = coordinates of a_i * a_j.
    mult: Vec<Vec<Vec<Q>>>,
    traces: Vec<Q>,
    one: Elem,
    pub r1: usize,
    pub r2: usize,
    pub discriminant: BigInt,
    /// True when the power basis was installed without a maximality check.
    pub maximality_unverified: bool,
    /// Matrix of complex conjugation on coordinates (column vectors), when
    /// conjugation is a field automorphism (totally real or CM).
    conj: Option<QMat>,
    pub mu_order: usize,
    pub mu_gen: Elem,
    roots: RootSet,
    root_cache: Mutex<HashMap<u32, Vec<Complex>>>,
}

fn parse_min_poly(min_poly: &[BigInt]) -> Result<QPoly> {
    if min_poly.len() < 2 {
        return Err(Error::Field("degree must be at least 1".into()));
    }
    if !min_poly.last().unwrap().is_one() {
        return Err(Error::Field("minimal polynomial must be monic".into()));
    }
    Ok(QPoly::new(min_poly.iter().map(qi).collect()))
}

impl NumberField {
    /// Builds a field. Without an explicit basis the power basis is used,
    /// except for imaginary quadratic fields which get {1, ω}.
    pub fn new(min_poly: Vec<BigInt>, basis: Option<Vec<QPoly>>) -> Result<NumberField> {
        let poly = parse_min_poly(&min_poly)?;
        let n = poly.degree() as usize;
        if !poly.is_squarefree() {
            return Err(Error::Field("reducible polynomial (repeated factor)".into()));
        }
        let r1 = poly.count_real_roots();
        let r2 = (n - r1) / 2;
        let mut maximality_unverified = false;
        let basis = match basis {
            Some(b) => b,
            None if n == 2 && r1 == 0 => imaginary_quadratic_basis(&min_poly),
            None => {
                maximality_unverified = n > 1;
                (0..n).map(|i| {
                    let mut c = vec![Q::zero(); i + 1];
                    c[i] = Q::one();
                    QPoly::new(c)
                }).collect()
            }
        };
        if basis.len() != n {
            return Err(Error::Field(format!("integral basis has {} elements, degree is {n}", basis.len())));
        }
        let mut basis_power = QMat::zeros(n, n);
        for (i, b) in basis.iter().enumerate() {
            let r = b.rem(&poly);
            for j in 0..n {
                basis_power[(i, j)] = r.coeff(j);
            }
        }
        let power_to_basis = basis_power
            .inverse()
            .ok_or_else(|| Error::Field("integral basis is linearly dependent".into()))?;
        let roots = RootSet::isolate(&poly, r1)?;
        let mut f = NumberField {
            min_poly,
            poly,
            n,
            basis_power,
            power_to_basis,
            mult: Vec::new(),
            traces: Vec::new(),
            one: Elem(Vec::new()),
            r1,
            r2,
            discriminant: BigInt::zero(),
            maximality_unverified,
            conj: None,
            mu_order: 2,
            mu_gen: Elem(Vec::new()),
            roots,
            root_cache: Mutex::new(HashMap::new()),
        };
        f.one = f.from_power_poly(&QPoly::one());
        if !f.one.is_integral_coords() {
            return Err(Error::Field("basis ℤ-span does not contain 1".into()));
        }
        let mut mult = vec![vec![Vec::new(); n]; n];
        for i in 0..n {
            for j in 0..n {
                let p = f.row_poly(i).mul(&f.row_poly(j)).rem(&f.poly);
                let c = f.from_power_poly(&p);
                if !c.is_integral_coords() {
                    return Err(Error::Field("supplied basis not closed under multiplication into its own ℤ-span".into()));
                }
                mult[i][j] = c.0;
            }
        }
        f.mult = mult;
        f.traces = (0..n).map(|j| (0..n).map(|i| f.mult[j][i][i].clone()).sum()).collect();
        let mut gram = QMat::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                gram[(i, j)] = f.trace(&Elem(f.mult[i][j].clone()));
            }
        }
        f.discriminant = gram.det().to_integer();
        if n > 1 && !invariants::is_irreducible(&f)? {
            return Err(Error::Field("reducible polynomial".into()));
        }
        f.conj = invariants::find_conjugation(&f)?;
        let (ord, gen) = invariants::roots_of_unity(&f)?;
        f.mu_order = ord;
        f.mu_gen = gen;
        Ok(f)
    }

    pub fn from_i64_poly(c: &[i64]) -> Result<NumberField> {
        NumberField::new(c.iter().map(|&x| BigInt::from(x)).collect(), None)
    }

    /// The rational field as a degree-one field.
    pub fn rationals() -> NumberField {
        NumberField::from_i64_poly(&[0, 1]).expect("ℚ")
    }

    pub fn degree(&self) -> usize {
        self.n
    }

    pub fn poly(&self) -> &QPoly {
        &self.poly
    }

    pub fn is_rational(&self) -> bool {
        self.n == 1
    }

    pub fn is_totally_real(&self) -> bool {
        self.r2 == 0
    }

    pub fn is_cm(&self) -> bool {
        self.r1 == 0 && self.conj.is_some()
    }

    pub fn has_conjugation(&self) -> bool {
        self.conj.is_some()
    }

    pub fn is_imaginary_quadratic(&self) -> bool {
        self.n == 2 && self.r1 == 0
    }

    fn row_poly(&self, i: usize) -> QPoly {
        QPoly::new(self.basis_power.row(i).to_vec())
    }

    /// Basis element i as a polynomial in the generator θ.
    pub fn basis_poly(&self, i: usize) -> QPoly {
        self.row_poly(i)
    }

    pub fn from_power_poly(&self, p: &QPoly) -> Elem {
        let r = p.rem(&self.poly);
        let v: Vec<Q> = (0..self.n).map(|j| r.coeff(j)).collect();
        // coords * basis_power = v
        Elem(self.power_to_basis.transpose().mul_vec(&v))
    }

    pub fn to_power_poly(&self, x: &Elem) -> QPoly {
        QPoly::new(self.basis_power.transpose().mul_vec(&x.0))
    }

    /// The generator θ.
    pub fn theta(&self) -> Elem {
        self.from_power_poly(&QPoly::x())
    }

    pub fn zero(&self) -> Elem {
        Elem(vec![Q::zero(); self.n])
    }

    pub fn one(&self) -> Elem {
        self.one.clone()
    }

    pub fn from_q(&self, c: &Q) -> Elem {
        Elem(self.one.0.iter().map(|x| x * c).collect())
    }

    pub fn from_int(&self, c: i64) -> Elem {
        self.from_q(&q(c))
    }

    pub fn basis_elem(&self, i: usize) -> Elem {
        let mut v = vec![Q::zero(); self.n];
        v[i] = Q::one();
        Elem(v)
    }

    pub fn elem_from_ints(&self, c: &[BigInt]) -> Elem {
        Elem(c.iter().map(qi).collect())
    }

    pub fn elem_from_i64(&self, c: &[i64]) -> Elem {
        Elem(c.iter().map(|&x| q(x)).collect())
    }

    pub fn add(&self, a: &Elem, b: &Elem) -> Elem {
        Elem(a.0.iter().zip(&b.0).map(|(x, y)| x + y).collect())
    }

    pub fn sub(&self, a: &Elem, b: &Elem) -> Elem {
        Elem(a.0.iter().zip(&b.0).map(|(x, y)| x - y).collect())
    }

    pub fn neg(&self, a: &Elem) -> Elem {
        Elem(a.0.iter().map(|x| -x).collect())
    }

    pub fn scale(&self, a: &Elem, c: &Q) -> Elem {
        Elem(a.0.iter().map(|x| x * c).collect())
    }

    pub fn mul(&self, a: &Elem, b: &Elem) -> Elem {
        let n = self.n;
        let mut out = vec![Q::zero(); n];
        for i in 0..n {
            if a.0[i].is_zero() {
                continue;
            }
            for j in 0..n {
                if b.0[j].is_zero() {
                    continue;
                }
                let c = &a.0[i] * &b.0[j];
                for (k, m) in self.mult[i][j].iter().enumerate() {
                    if !m.is_zero() {
                        out[k] += &c * m;
                    }
                }
            }
        }
        Elem(out)
    }

    /// Matrix of y ↦ x·y acting on coordinate columns.
    pub fn mul_matrix(&self, x: &Elem) -> QMat {
        let n = self.n;
        let mut m = QMat::zeros(n, n);
        for j in 0..n {
            let col = self.mul(x, &self.basis_elem(j));
            for i in 0..n {
                m[(i, j)] = col.0[i].clone();
            }
        }
        m
    }

    pub fn inv(&self, a: &Elem) -> Result<Elem> {
        if a.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let m = self.mul_matrix(a);
        m.solve(&self.one.0).map(Elem).ok_or(Error::DivisionByZero)
    }

    pub fn div(&self, a: &Elem, b: &Elem) -> Result<Elem> {
        Ok(self.mul(a, &self.inv(b)?))
    }

    pub fn pow(&self, a: &Elem, mut e: u64) -> Elem {
        let mut base = a.clone();
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            e >>= 1;
        }
        acc
    }

    pub fn pow_i(&self, a: &Elem, e: i64) -> Result<Elem> {
        if e >= 0 {
            Ok(self.pow(a, e as u64))
        } else {
            Ok(self.pow(&self.inv(a)?, (-e) as u64))
        }
    }

    pub fn trace(&self, a: &Elem) -> Q {
        a.0.iter().zip(&self.traces).map(|(x, t)| x * t).sum()
    }

    pub fn norm(&self, a: &Elem) -> Q {
        self.mul_matrix(a).det()
    }

    pub fn is_one(&self, a: &Elem) -> bool {
        a == &self.one
    }

    /// Whether a lies in the order spanned by the basis.
    pub fn is_integral(&self, a: &Elem) -> bool {
        a.is_integral_coords()
    }

    /// Integral with norm ±1.
    pub fn is_unit(&self, a: &Elem) -> bool {
        a.is_integral_coords() && self.norm(a).abs().is_one()
    }

    /// Complex conjugation; identity on totally real fields.
    pub fn conj(&self, a: &Elem) -> Elem {
        match &self.conj {
            Some(c) => Elem(c.mul_vec(&a.0)),
            None => panic!("field has no complex conjugation automorphism"),
        }
    }

    /// Rational value of an element lying in ℚ.
    pub fn as_rational(&self, a: &Elem) -> Option<Q> {
        let p = self.to_power_poly(a);
        (p.degree() <= 0).then(|| p.coeff(0))
    }

    /// Trace-form Gram matrix Tr(a_i a_j).
    pub fn trace_gram(&self) -> QMat {
        let mut g = QMat::zeros(self.n, self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                g[(i, j)] = self.trace(&Elem(self.mult[i][j].clone()));
            }
        }
        g
    }

    /// Gram matrix of T2(x) = Tr(x x̄) on coordinates (rational when
    /// conjugation is an automorphism).
    pub fn t2_gram(&self) -> Option<QMat> {
        self.conj.as_ref()?;
        let mut g = QMat::zeros(self.n, self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                let x = self.mul(&self.basis_elem(i), &self.conj(&self.basis_elem(j)));
                g[(i, j)] = self.trace(&x);
            }
        }
        // symmetrise: Tr(a_i conj a_j) is the real part pairing
        let gt = g.transpose();
        Some(g.add(&gt).scale(&Q::new(1.into(), 2.into())))
    }

    pub fn mult_table(&self) -> &Vec<Vec<Vec<Q>>> {
        &self.mult
    }

    /// Least common denominator of the coordinates.
    pub fn denominator(&self, a: &Elem) -> BigInt {
        a.0.iter().fold(BigInt::one(), |l, x| l.lcm(x.denom()))
    }

    pub fn fmt_elem(&self, a: &Elem) -> String {
        let parts: Vec<String> = a.0.iter().map(fmt_q).collect();
        format!("[{}]", parts.join(", "))
    }
}

/// {1, ω} for x² + bx + c with negative discriminant.
fn imaginary_quadratic_basis(c: &[BigInt]) -> Vec<QPoly> {
    let (c0, b) = (&c[0], &c[1]);
    let disc: BigInt = b * b - c0 * 4;
    // disc = f² d0 with d0 squarefree
    let mut d0 = disc.clone();
    let mut f = BigInt::one();
    let mut p = BigInt::from(2);
    while &p * &p <= d0.abs() {
        let pp = &p * &p;
        while (&d0 % &pp).is_zero() {
            d0 /= &pp;
            f *= &p;
        }
        p += 1;
    }
    // √disc = 2θ + b, √d0 = (2θ + b) / f
    let sqrt_d0 = QPoly::new(vec![Q::new(b.clone(), f.clone()), Q::new(BigInt::from(2), f.clone())]);
    let m4: BigInt = ((&d0 % 4) + 4) % 4;
    let omega = if m4.is_one() {
        // (1 + √d0) / 2
        QPoly::one().add(&sqrt_d0).scale(&Q::new(1.into(), 2.into()))
    } else {
        sqrt_d0
    };
    vec![QPoly::one(), omega]
}

#[cfg(test)]
mod tests;
