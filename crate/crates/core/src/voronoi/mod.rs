//! Voronoi's algorithm: graph traversal over (T-)perfect forms.

pub mod equiv;
mod neighbor;
pub mod strategy;

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::time::Instant;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::arith::rat::{fmt_q, primitive, q, qf, Q};
use crate::arith::strs;
use crate::arith::QMat;
use crate::error::{Error, Result};
use crate::field::NumberField;
use crate::forms::{minimum, HermitianForm, TSubspace};
use crate::polyhedra::{dd_convert, HRep};

pub use equiv::{find_isometry, isometries, Coordinates, Prepared};
pub use neighbor::{initial_t_perfect, neighbor_rho, Neighbor};
pub use strategy::{equivalence_groups, traversal_orders, EquivalenceGroup, TraversalOrder};

/// Gram matrix of Σxᵢ² − Σxᵢxᵢ₊₁ (the A_m root form), minimum 1.
pub fn first_perfect_form(m: usize) -> QMat {
    let mut g = QMat::identity(m);
    for i in 0..m.saturating_sub(1) {
        g[(i, i + 1)] = qf(-1, 2);
        g[(i + 1, i)] = qf(-1, 2);
    }
    g
}

/// (|Min|, det, multiset of |A(v,w)| over pairs) condensed to a string.
pub fn invariant_key(gram: &QMat, vectors: &[Vec<BigInt>]) -> String {
    let mut prods: Vec<Q> = Vec::new();
    for i in 0..vectors.len() {
        for j in i + 1..vectors.len() {
            let x = gram.bilinear_int(&vectors[i], &vectors[j]);
            prods.push(if x < Q::zero() { -x } else { x });
        }
    }
    prods.sort();
    let mut h = Sha256::new();
    for p in &prods {
        h.update(fmt_q(p).as_bytes());
        h.update(b",");
    }
    let digest = h.finalize();
    let hex: String = digest.iter().take(8).map(|b| format!("{b:02x}")).collect();
    format!("{}:{}:{}", vectors.len(), fmt_q(&gram.det()), hex)
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct PerfectClass {
    /// Representative in trace coordinates, minimum 1.
    pub gram: QMat,
    #[serde(with = "strs::ivecs")]
    pub vectors: Vec<Vec<BigInt>>,
    #[serde(with = "strs::q")]
    pub det: Q,
    pub key: String,
    /// (parent class, ray index) this class was first reached from.
    pub parent: Option<(usize, usize)>,
    pub processed: bool,
    pub rays: usize,
    pub dead_ends: Vec<usize>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct Edge {
    pub from: usize,
    pub ray: usize,
    pub to: usize,
    #[serde(with = "strs::q")]
    pub rho: Q,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct VoronoiGraph {
    pub m: usize,
    pub group: String,
    pub order: String,
    pub classes: Vec<PerfectClass>,
    pub edges: Vec<Edge>,
    pub complete: bool,
}

impl VoronoiGraph {
    pub fn keys(&self) -> BTreeSet<String> {
        self.classes.iter().map(|c| c.key.clone()).collect()
    }
}

pub struct Engine<'a> {
    pub f: &'a NumberField,
    pub m: usize,
    pub t: TSubspace,
    pub co: Coordinates<'a>,
    pub group: Box<dyn EquivalenceGroup>,
    pub order: Box<dyn TraversalOrder>,
    /// Node limit for a single equivalence search.
    pub equiv_budget: u64,
}

impl<'a> Engine<'a> {
    pub fn new(f: &'a NumberField, m: usize, group: &str, order: &str) -> Result<Engine<'a>> {
        let t = TSubspace::new(f, m)?;
        Ok(Engine {
            f,
            m,
            t,
            co: Coordinates::new(f, m),
            group: equivalence_groups().get(group)?,
            order: traversal_orders().get(order)?,
            equiv_budget: 50_000_000,
        })
    }

    /// Hermitian matrix over F of a form in T.
    pub fn hermitian(&self, gram: &QMat) -> Result<HermitianForm> {
        let c = self.t.coords_of(gram).ok_or_else(|| Error::Invalid("form not in T".into()))?;
        let mut h = HermitianForm::zero(self.f, self.m);
        for (x, b) in c.iter().zip(&self.t.hermitian) {
            if !x.is_zero() {
                h = h.add(self.f, &b.scale(self.f, x));
            }
        }
        Ok(h)
    }

    /// A T-perfect starting form of minimum 1: the first perfect form over ℚ,
    /// otherwise the descent from the trace form of the identity.
    pub fn start_form(&self) -> Result<QMat> {
        let g = if self.f.is_rational() { first_perfect_form(self.m) } else { initial_t_perfect(&self.t.identity_form(self.f), &self.t)? };
        let md = minimum(&g)?;
        Ok(g.scale(&(Q::one() / md.min)))
    }

    fn class_of(&self, gram: QMat, vectors: Vec<Vec<BigInt>>, parent: Option<(usize, usize)>) -> PerfectClass {
        let key = invariant_key(&gram, &vectors);
        PerfectClass { det: gram.det(), gram, vectors, key, parent, processed: false, rays: 0, dead_ends: vec![] }
    }

    pub fn new_graph(&self, start: &QMat) -> Result<VoronoiGraph> {
        let md = minimum(start)?;
        if md.min != q(1) {
            return Err(Error::Invalid("starting form must have minimum 1".into()));
        }
        if crate::forms::perfection_rank(&md, &self.t) != self.t.dim() {
            return Err(Error::Invalid("starting form is not T-perfect".into()));
        }
        Ok(VoronoiGraph {
            m: self.m,
            group: self.group.name().into(),
            order: self.order.name().into(),
            classes: vec![self.class_of(start.clone(), md.vectors, None)],
            edges: vec![],
            complete: false,
        })
    }

    /// Extreme rays of P_T(A) in T-coordinates.
    pub fn cone_rays(&self, c: &PerfectClass) -> Vec<Vec<BigInt>> {
        let fun: BTreeSet<Vec<BigInt>> = c.vectors.iter().map(|v| primitive(&self.t.functional(v))).collect();
        let h = HRep::new(self.t.dim(), fun.into_iter().collect(), vec![]);
        let v = dd_convert(&h);
        debug_assert!(v.lineality.is_empty(), "perfect forms give pointed cones");
        v.rays
    }

    /// Index of a class equivalent to (gram, vectors), if any.
    fn lookup(&self, prepared: &[Prepared], by_key: &HashMap<String, Vec<usize>>, key: &str, cand: &Prepared) -> Result<Option<usize>> {
        for &j in by_key.get(key).map(|v| v.as_slice()).unwrap_or(&[]) {
            if find_isometry(&self.co, self.group.as_ref(), &prepared[j], cand, self.equiv_budget)?.is_some() {
                return Ok(Some(j));
            }
        }
        Ok(None)
    }

    /// Continues the traversal until every class is processed or the class
    /// budget is hit. Returns whether the graph is complete.
    pub fn enumerate(&self, g: &mut VoronoiGraph, budget: Option<usize>) -> Result<bool> {
        if g.m != self.m {
            return Err(Error::Invalid("graph dimension does not match".into()));
        }
        let mut prepared: Vec<Prepared> = g.classes.iter().map(|c| Prepared::new(&c.gram, &c.vectors)).collect();
        let mut by_key: HashMap<String, Vec<usize>> = HashMap::new();
        for (i, c) in g.classes.iter().enumerate() {
            by_key.entry(c.key.clone()).or_default().push(i);
        }
        let mut queue: VecDeque<usize> = (0..g.classes.len()).filter(|&i| !g.classes[i].processed).collect();
        let one = q(1);
        while let Some(i) = self.order.pop(&mut queue) {
            if g.classes[i].processed {
                continue;
            }
            let start = Instant::now();
            g.edges.retain(|e| e.from != i);
            let cls = g.classes[i].clone();
            let rays = self.cone_rays(&cls);
            let steps: Vec<Result<Option<Neighbor>>> = rays
                .par_iter()
                .map(|ray| {
                    let r = self.t.from_int_coords(ray);
                    if r.is_positive_semidefinite() {
                        return Ok(None);
                    }
                    neighbor_rho(&cls.gram, &one, &cls.vectors, &r).map(Some)
                })
                .collect();
            let mut dead = Vec::new();
            for (ri, step) in steps.into_iter().enumerate() {
                let Some(nb) = step? else {
                    log::warn!("class {i}: ray {ri} is positive semidefinite (dead end)");
                    dead.push(ri);
                    continue;
                };
                let key = invariant_key(&nb.gram, &nb.vectors);
                let cand = Prepared::new(&nb.gram, &nb.vectors);
                let to = match self.lookup(&prepared, &by_key, &key, &cand)? {
                    Some(j) => j,
                    None => {
                        if budget.is_some_and(|b| g.classes.len() >= b) {
                            g.complete = false;
                            return Ok(false);
                        }
                        let j = g.classes.len();
                        g.classes.push(self.class_of(nb.gram.clone(), nb.vectors.clone(), Some((i, ri))));
                        prepared.push(cand);
                        by_key.entry(key).or_default().push(j);
                        queue.push_back(j);
                        log::info!("class {j} found from {i} (|Min| = {})", nb.vectors.len());
                        j
                    }
                };
                g.edges.push(Edge { from: i, ray: ri, to, rho: nb.rho });
            }
            let c = &mut g.classes[i];
            c.rays = rays.len();
            c.dead_ends = dead;
            c.processed = true;
            log::info!("class {i}: {} rays in {:?}", rays.len(), start.elapsed());
        }
        g.complete = true;
        Ok(true)
    }
}

#[cfg(test)]
mod tests;
