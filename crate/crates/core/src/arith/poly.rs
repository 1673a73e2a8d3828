use num_traits::{One, Signed, Zero};

use super::rat::Q;

/// Dense rational polynomial, coefficients from the constant term up.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QPoly(pub Vec<Q>);

impl QPoly {
    pub fn new(mut c: Vec<Q>) -> Self {
        while c.last().is_some_and(|x| x.is_zero()) {
            c.pop();
        }
        QPoly(c)
    }

    pub fn zero() -> Self {
        QPoly(Vec::new())
    }

    pub fn one() -> Self {
        QPoly(vec![Q::one()])
    }

    pub fn x() -> Self {
        QPoly(vec![Q::zero(), Q::one()])
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    /// Degree; -1 for the zero polynomial.
    pub fn degree(&self) -> isize {
        self.0.len() as isize - 1
    }

    pub fn lead(&self) -> Q {
        self.0.last().cloned().unwrap_or_else(Q::zero)
    }

    pub fn coeff(&self, i: usize) -> Q {
        self.0.get(i).cloned().unwrap_or_else(Q::zero)
    }

    pub fn add(&self, o: &QPoly) -> QPoly {
        let n = self.0.len().max(o.0.len());
        QPoly::new((0..n).map(|i| self.coeff(i) + o.coeff(i)).collect())
    }

    pub fn sub(&self, o: &QPoly) -> QPoly {
        let n = self.0.len().max(o.0.len());
        QPoly::new((0..n).map(|i| self.coeff(i) - o.coeff(i)).collect())
    }

    pub fn scale(&self, c: &Q) -> QPoly {
        QPoly::new(self.0.iter().map(|x| x * c).collect())
    }

    pub fn mul(&self, o: &QPoly) -> QPoly {
        if self.is_zero() || o.is_zero() {
            return QPoly::zero();
        }
        let mut r = vec![Q::zero(); self.0.len() + o.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.0.iter().enumerate() {
                r[i + j] += a * b;
            }
        }
        QPoly::new(r)
    }

    pub fn divrem(&self, d: &QPoly) -> (QPoly, QPoly) {
        assert!(!d.is_zero(), "polynomial division by zero");
        let mut r = self.0.clone();
        let dd = d.0.len() - 1;
        if r.len() <= dd {
            return (QPoly::zero(), self.clone());
        }
        let mut qv = vec![Q::zero(); r.len() - dd];
        let lc = d.lead();
        for k in (0..qv.len()).rev() {
            let c = &r[k + dd] / &lc;
            if !c.is_zero() {
                for (j, b) in d.0.iter().enumerate() {
                    r[k + j] -= &c * b;
                }
            }
            qv[k] = c;
        }
        r.truncate(dd);
        (QPoly::new(qv), QPoly::new(r))
    }

    pub fn rem(&self, d: &QPoly) -> QPoly {
        self.divrem(d).1
    }

    pub fn monic(&self) -> QPoly {
        if self.is_zero() {
            return self.clone();
        }
        self.scale(&(Q::one() / self.lead()))
    }

    pub fn gcd(&self, o: &QPoly) -> QPoly {
        let (mut a, mut b) = (self.clone(), o.clone());
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    pub fn derivative(&self) -> QPoly {
        QPoly::new(self.0.iter().enumerate().skip(1).map(|(i, c)| c * Q::from_integer(i.into())).collect())
    }

    pub fn eval(&self, x: &Q) -> Q {
        self.0.iter().rev().fold(Q::zero(), |acc, c| acc * x + c)
    }

    pub fn is_squarefree(&self) -> bool {
        self.gcd(&self.derivative()).degree() == 0
    }

    /// Number of distinct real roots via a Sturm sequence.
    pub fn count_real_roots(&self) -> usize {
        let mut seq = vec![self.clone(), self.derivative()];
        loop {
            let n = seq.len();
            let r = seq[n - 2].rem(&seq[n - 1]);
            if r.is_zero() {
                break;
            }
            seq.push(r.scale(&-Q::one()));
        }
        let changes = |signs: Vec<i32>| {
            let s: Vec<i32> = signs.into_iter().filter(|&x| x != 0).collect();
            s.windows(2).filter(|w| w[0] != w[1]).count()
        };
        let sign_lead = |p: &QPoly, neg: bool| {
            let s = if p.lead().is_positive() { 1 } else { -1 };
            if neg && p.degree() % 2 == 1 {
                -s
            } else {
                s
            }
        };
        let at_neg = changes(seq.iter().map(|p| sign_lead(p, true)).collect());
        let at_pos = changes(seq.iter().map(|p| sign_lead(p, false)).collect());
        at_neg - at_pos
    }
}
