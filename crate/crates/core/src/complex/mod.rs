//! The PSL₂(O_F)-tessellation of ℍ₃ by ideal polytopes coming from perfect
//! cones, its orbit complex, homology and the weighted top-dimensional cycle.
//!
//! Only imaginary quadratic fields whose cusps are all represented by
//! unimodular vectors are handled (class number one in practice).

pub mod group;
mod homology;
pub mod strategy;
mod tri;

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::rat::{primitive, Q};
use crate::arith::snf::solve_integer;
use crate::arith::{strs, QMat};
use crate::error::{Error, Result};
use crate::field::spec::FieldSpec;
use crate::field::NumberField;
use crate::forms::{field_to_vector, vector_to_field, TSubspace};
use crate::polyhedra::{cone_hull, face_lattice, rank_of, IVec};
use crate::voronoi::{equivalence_groups, isometries, Coordinates, Prepared, VoronoiGraph};

use group::{carrying_elements, cusp_of, from_cols, mat_inv, mat_key, mat_mul, units, vertex_map, Cusp, Mat2, Vec2};
pub use homology::{cyclic_orders, n_bound, Homology, NBound};
pub use strategy::{vertex_orders, VertexOrder};
pub use tri::{OrientedSimplex, TopCycle};

/// Link from a cell to the orbit representative of one of its facets.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct FacetLink {
    /// Facet vertices as indices into the owning cell.
    pub vertices: Vec<usize>,
    pub rep: usize,
    /// Facet vertex i goes to rep vertex map[i] under the witness.
    pub map: Vec<usize>,
    /// g ∈ SL₂(O_F) with g·facet = rep, entries flattened row-major.
    #[serde(with = "strs::ivec")]
    pub witness: Vec<BigInt>,
    /// Coefficient of the rep in the boundary of the owning cell.
    pub sign: i64,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct Cell {
    pub dim: usize,
    /// Sorted by the vertex order in force.
    pub vertices: Vec<Cusp>,
    /// Vertices whose rays fix the orientation.
    pub frame: Vec<usize>,
    /// Order in PSL₂(O_F); 0 stands for an infinite (cusp) stabilizer.
    pub stabilizer_order: usize,
    /// All elements, flattened row-major, when finite.
    #[serde(with = "strs::ivecs")]
    pub stabilizer: Vec<Vec<BigInt>>,
    pub orientable: bool,
    pub facets: Vec<FacetLink>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct Descent {
    pub class: usize,
    /// SL₂(O_F)-equivalence of A with its twist by diag(1, μ_F).
    pub twist_equivalent: bool,
    pub top_cells: Vec<usize>,
}

/// Sparse d_k : C_k → C_{k−1} over the orientable cells, (row, col, value).
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct Boundary {
    pub k: usize,
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<(usize, usize, i64)>,
}

impl Boundary {
    pub fn dense(&self) -> Vec<Vec<BigInt>> {
        let mut m = vec![vec![BigInt::zero(); self.cols]; self.rows];
        for &(r, c, v) in &self.entries {
            m[r][c] += v;
        }
        m
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct VoronoiComplex {
    pub field: FieldSpec,
    pub vertex_order: String,
    /// cells[k]: orbit representatives of k-cells.
    pub cells: Vec<Vec<Cell>>,
    /// chain[k][i]: position of cells[k][i] in the chain basis, None when the
    /// cell carries an orientation-reversing stabilizer element.
    pub chain: Vec<Vec<Option<usize>>>,
    pub descent: Vec<Descent>,
    pub boundary: Vec<Boundary>,
    pub homology: Homology,
    pub n_observed: u64,
    pub n_bound: NBound,
    pub n: u64,
    pub cycle: TopCycle,
    pub warnings: Vec<String>,
}

/// How the weight N is chosen.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NPolicy {
    /// lcm of the stabilizer orders that actually occur.
    Observed,
    /// The bound from the classification of finite subgroups of PGL₂(F).
    Bound,
}

pub struct Builder<'a> {
    pub f: &'a NumberField,
    pub t: TSubspace,
    pub order: Box<dyn VertexOrder>,
    pub n_policy: NPolicy,
    pub equiv_budget: u64,
    units: Vec<crate::field::Elem>,
    rays: BTreeMap<Cusp, IVec>,
}

fn sign_of(q: &Q) -> i64 {
    if q.is_positive() {
        1
    } else if q.is_negative() {
        -1
    } else {
        0
    }
}

impl<'a> Builder<'a> {
    pub fn new(f: &'a NumberField, order: &str) -> Result<Self> {
        if !f.is_imaginary_quadratic() {
            return Err(Error::Unsupported("the ℍ₃ complex is built for imaginary quadratic fields only".into()));
        }
        Ok(Builder {
            f,
            t: TSubspace::new(f, 2)?,
            order: vertex_orders().get(order)?,
            n_policy: NPolicy::Observed,
            equiv_budget: 5_000_000,
            units: units(f),
            rays: BTreeMap::new(),
        })
    }

    pub fn cusp(&self, v: &Vec2) -> Result<Cusp> {
        cusp_of(self.f, &self.units, v)
    }

    /// The ray q(v) of a cusp, in T-coordinates (as the functional X ↦ X[v]).
    fn ray(&mut self, c: &Cusp) -> IVec {
        if let Some(r) = self.rays.get(c) {
            return r.clone();
        }
        let r = primitive(&self.t.functional(&field_to_vector(&c.vector(self.f))));
        self.rays.insert(c.clone(), r.clone());
        r
    }

    fn sort_vertices(&self, vs: &mut [Cusp]) {
        vs.sort_by(|a, b| self.order.cmp(a, b));
    }

    fn frame(&mut self, vs: &[Cusp], k: usize) -> Result<Vec<usize>> {
        let d = self.t.dim();
        let mut rows: Vec<IVec> = Vec::new();
        let mut frame = Vec::new();
        for (i, c) in vs.iter().enumerate() {
            let r = self.ray(c);
            rows.push(r);
            let refs: Vec<&IVec> = rows.iter().collect();
            if rank_of(&refs, d) == rows.len() {
                frame.push(i);
                if frame.len() == k + 1 {
                    return Ok(frame);
                }
            } else {
                rows.pop();
            }
        }
        Err(Error::Inconsistent(format!("cell with {} vertices does not span a {}-dimensional cone", vs.len(), k + 1)))
    }

    /// Sign of det of `vecs` written in the basis `basis` (same span).
    fn relative_sign(&self, vecs: &[IVec], basis: &[IVec]) -> Result<i64> {
        let d = self.t.dim();
        let k = basis.len();
        let m = QMat::from_rows((0..d).map(|i| basis.iter().map(|b| Q::from_integer(b[i].clone())).collect()).collect());
        let mut c = QMat::zeros(k, k);
        for (j, v) in vecs.iter().enumerate() {
            let rhs: Vec<Q> = v.iter().map(|x| Q::from_integer(x.clone())).collect();
            let x = m.solve(&rhs).ok_or_else(|| Error::Inconsistent("vector outside the span of its cell".into()))?;
            if m.mul_vec(&x) != rhs {
                return Err(Error::Inconsistent("vector outside the span of its cell".into()));
            }
            for i in 0..k {
                c[(i, j)] = x[i].clone();
            }
        }
        Ok(sign_of(&c.det()))
    }

    fn frame_rays(&mut self, cell: &Cell) -> Vec<IVec> {
        cell.frame.iter().map(|&i| self.ray(&cell.vertices[i])).collect::<Vec<_>>()
    }

    fn new_cell(&mut self, dim: usize, mut vs: Vec<Cusp>) -> Result<Cell> {
        self.sort_vertices(&mut vs);
        let frame = self.frame(&vs, dim)?;
        let mut cell = Cell { dim, vertices: vs, frame, stabilizer_order: 0, stabilizer: vec![], orientable: true, facets: vec![] };
        if dim >= 1 {
            let stab = carrying_elements(self.f, &self.units, &cell.vertices, &cell.vertices, true)?;
            let base = self.frame_rays(&cell);
            for g in &stab {
                let map = vertex_map(self.f, &self.units, g, &cell.vertices, &cell.vertices)?;
                let img: Vec<IVec> = cell.frame.iter().map(|&b| self.ray(&cell.vertices[map[b]])).collect();
                if self.relative_sign(&img, &base)? < 0 {
                    cell.orientable = false;
                }
            }
            cell.stabilizer_order = stab.len();
            cell.stabilizer = stab.iter().map(mat_key).collect();
        }
        Ok(cell)
    }

    /// Facets of a cell as vertex index sets, from the face lattice of its cone.
    fn facet_sets(&mut self, cell: &Cell) -> Result<Vec<Vec<usize>>> {
        if cell.dim == 0 {
            return Ok(vec![]);
        }
        let d = self.t.dim();
        let gens: Vec<IVec> = cell.vertices.iter().map(|c| self.ray(c)).collect();
        let (h, v, reps) = cone_hull(&gens, d);
        if reps.len() != gens.len() || !v.lineality.is_empty() {
            return Err(Error::Inconsistent("a cusp ray is not extreme in its cell".into()));
        }
        let lat = face_lattice(d, &v.rays, &v.lineality, &h.ineqs);
        if lat.dim != cell.dim + 1 {
            return Err(Error::Inconsistent("cell cone has the wrong dimension".into()));
        }
        let mut out: Vec<Vec<usize>> = lat
            .of_dim(cell.dim)
            .iter()
            .map(|f| {
                let mut s: Vec<usize> = f.iter().map(|&i| reps[i]).collect();
                s.sort();
                s
            })
            .collect();
        out.sort();
        Ok(out)
    }

    /// Some g ∈ SL₂(O_F) with g·v = u·w, u a unit.
    fn cusp_witness(&self, v: &Cusp, w: &Cusp) -> Result<Mat2> {
        let sv = self.completion(&v.vector(self.f))?;
        let sw = self.completion(&w.vector(self.f))?;
        Ok(mat_mul(self.f, &sw, &mat_inv(self.f, &sv)?))
    }

    /// [v, w] with det 1 and w integral.
    fn completion(&self, v: &Vec2) -> Result<Mat2> {
        let f = self.f;
        let n = f.degree();
        // α·x + β·y = 1 with α, β ∈ O_F: unknown coordinates (α, β)
        let mut a = vec![vec![BigInt::zero(); 2 * n]; n];
        for (blk, x) in v.iter().enumerate() {
            for k in 0..n {
                let c = f.mul(x, &f.basis_elem(k)).int_coords().expect("integral cusp");
                for i in 0..n {
                    a[i][blk * n + k] = c[i].clone();
                }
            }
        }
        let one = f.one().int_coords().expect("1 is integral");
        let sol = solve_integer(&a, 2 * n, &one).ok_or_else(|| Error::Unsupported("cusp vector is not unimodular".into()))?;
        let alpha = f.elem_from_ints(&sol[..n]);
        let beta = f.elem_from_ints(&sol[n..]);
        // det [v, (−β, α)] = xα + yβ = 1
        Ok(from_cols(v, &[f.neg(&beta), alpha]))
    }

    /// Finds the representative of `vs` among `reps`, or None.
    fn locate(&self, reps: &[Cell], vs: &[Cusp]) -> Result<Option<(usize, Mat2)>> {
        for (i, r) in reps.iter().enumerate() {
            if r.vertices.len() != vs.len() {
                continue;
            }
            if vs.len() == 1 {
                return Ok(Some((i, self.cusp_witness(&vs[0], &r.vertices[0])?)));
            }
            if let Some(g) = carrying_elements(self.f, &self.units, vs, &r.vertices, false)?.into_iter().next() {
                return Ok(Some((i, g)));
            }
        }
        Ok(None)
    }

    /// Top cells from the GL₂(O_F)-classes, split into PSL₂(O_F)-orbits.
    fn top_cells(&mut self, graph: &VoronoiGraph) -> Result<(Vec<Cell>, Vec<Descent>)> {
        let f = self.f;
        if graph.m != 2 {
            return Err(Error::Invalid("the cell complex needs binary forms".into()));
        }
        if !graph.complete {
            return Err(Error::Invalid("perfect form enumeration is incomplete".into()));
        }
        if graph.group != "gl-of" {
            return Err(Error::Invalid(format!("classes must be up to gl-of, got {}", graph.group)));
        }
        let co = Coordinates::new(f, 2);
        let sl = equivalence_groups().get("sl-of")?;
        let mu = f.mu_gen.clone();
        let mu_inv = f.inv(&mu)?;
        let d_mat = vec![vec![f.one(), f.zero()], vec![f.zero(), mu.clone()]];
        let dc = co.from_field_matrix(&d_mat);
        let dc_inv = dc.inverse().expect("invertible");
        let mut tops: Vec<Cell> = Vec::new();
        let mut descent = Vec::new();
        for (ci, class) in graph.classes.iter().enumerate() {
            let mut cusps: Vec<Cusp> = Vec::new();
            let mut twisted: Vec<Cusp> = Vec::new();
            for v in &class.vectors {
                let fv = vector_to_field(v, f);
                let vv: Vec2 = [fv[0].clone(), fv[1].clone()];
                cusps.push(self.cusp(&vv)?);
                twisted.push(self.cusp(&[vv[0].clone(), f.mul(&mu_inv, &vv[1])])?);
            }
            cusps.sort();
            cusps.dedup();
            twisted.sort();
            twisted.dedup();
            // A' = D*·A·D has Min(A') = D⁻¹·Min(A)
            let gram2 = dc.transpose().mul(&class.gram).mul(&dc);
            let vecs2: Vec<Vec<BigInt>> = class
                .vectors
                .iter()
                .map(|v| {
                    let x = dc_inv.mul_vec(&v.iter().map(|c| Q::from_integer(c.clone())).collect::<Vec<_>>());
                    x.iter().map(|c| c.to_integer()).collect()
                })
                .collect();
            let pa = Prepared::new(&class.gram, &class.vectors);
            let pb = Prepared::new(&gram2, &vecs2);
            let twist_equivalent = !isometries(&co, sl.as_ref(), &pa, &pb, self.equiv_budget, false)?.is_empty();
            let cells_equivalent = !carrying_elements(f, &self.units, &cusps, &twisted, false)?.is_empty();
            if twist_equivalent != cells_equivalent {
                return Err(Error::Inconsistent(format!("class {ci}: twist test and vertex-set test disagree")));
            }
            let mut idx = vec![tops.len()];
            let first = if twisted < cusps && twist_equivalent { twisted.clone() } else { cusps.clone() };
            tops.push(self.new_cell(3, first)?);
            if !twist_equivalent {
                idx.push(tops.len());
                tops.push(self.new_cell(3, twisted)?);
            }
            descent.push(Descent { class: ci, twist_equivalent, top_cells: idx });
        }
        Ok((tops, descent))
    }

    /// Fills in facet links of `upper` and returns the representatives one
    /// level down.
    fn descend_level(&mut self, upper: &mut [Cell], k: usize) -> Result<Vec<Cell>> {
        let mut cands: Vec<(Vec<Cusp>, usize, Vec<usize>)> = Vec::new();
        for (ci, c) in upper.iter().enumerate() {
            for s in self.facet_sets(c)? {
                let mut key: Vec<Cusp> = s.iter().map(|&i| c.vertices[i].clone()).collect();
                key.sort();
                cands.push((key, ci, s));
            }
        }
        // canonical representatives: least vertex list first
        cands.sort();
        let mut reps: Vec<Cell> = Vec::new();
        let mut links: Vec<(usize, FacetLink)> = Vec::new();
        for (_, ci, s) in cands {
            let vs: Vec<Cusp> = s.iter().map(|&i| upper[ci].vertices[i].clone()).collect();
            let (rep, g) = match self.locate(&reps, &vs)? {
                Some(x) => x,
                None => {
                    reps.push(self.new_cell(k, vs.clone())?);
                    let r = reps.len() - 1;
                    let id = from_cols(&[self.f.one(), self.f.zero()], &[self.f.zero(), self.f.one()]);
                    (r, id)
                }
            };
            let map = vertex_map(self.f, &self.units, &g, &vs, &reps[rep].vertices)?;
            links.push((ci, FacetLink { vertices: s, rep, map, witness: mat_key(&g), sign: 0 }));
        }
        for (ci, mut link) in links {
            link.sign = self.incidence(&upper[ci], &link, &reps[link.rep])?;
            upper[ci].facets.push(link);
        }
        for c in upper.iter_mut() {
            c.facets.sort_by(|a, b| a.vertices.cmp(&b.vertices));
        }
        Ok(reps)
    }

    /// Coefficient of the rep in ∂cell: outward-first induced orientation
    /// compared with the rep frame through the witness.
    fn incidence(&mut self, cell: &Cell, link: &FacetLink, rep: &Cell) -> Result<i64> {
        let fverts: Vec<Cusp> = link.vertices.iter().map(|&i| cell.vertices[i].clone()).collect();
        let fframe = self.frame(&fverts, cell.dim - 1)?;
        let inner = (0..cell.vertices.len()).find(|i| !link.vertices.contains(i)).expect("proper facet");
        let mut v = vec![self.ray(&cell.vertices[inner])];
        v.extend(fframe.iter().map(|&b| self.ray(&fverts[b])));
        let base = self.frame_rays(cell);
        let s = self.relative_sign(&v, &base)?;
        let img: Vec<IVec> = fframe.iter().map(|&b| self.ray(&rep.vertices[link.map[b]])).collect();
        let rbase = self.frame_rays(rep);
        let eps = self.relative_sign(&img, &rbase)?;
        if s == 0 || eps == 0 {
            return Err(Error::Inconsistent("degenerate orientation frame".into()));
        }
        Ok(-s * eps)
    }

    pub fn build(&mut self, graph: &VoronoiGraph) -> Result<VoronoiComplex> {
        let f = self.f;
        let mut warnings = Vec::new();
        let (mut tops, descent) = self.top_cells(graph)?;
        let mut twos = self.descend_level(&mut tops, 2)?;
        let mut ones = self.descend_level(&mut twos, 1)?;
        let zeros = self.descend_level(&mut ones, 0)?;
        let cells = vec![zeros, ones, twos, tops];
        for (k, level) in cells.iter().enumerate() {
            for (i, c) in level.iter().enumerate() {
                if !c.orientable {
                    warnings.push(format!("{k}-cell {i} has an orientation-reversing stabilizer; dropped from the chain complex"));
                }
            }
        }
        let chain: Vec<Vec<Option<usize>>> = cells
            .iter()
            .map(|level| {
                let mut next = 0;
                level
                    .iter()
                    .map(|c| {
                        c.orientable.then(|| {
                            next += 1;
                            next - 1
                        })
                    })
                    .collect()
            })
            .collect();
        let mut boundary = Vec::new();
        for k in 1..=3 {
            let rows = chain[k - 1].iter().flatten().count();
            let cols = chain[k].iter().flatten().count();
            let mut acc: BTreeMap<(usize, usize), i64> = BTreeMap::new();
            for (i, c) in cells[k].iter().enumerate() {
                let Some(col) = chain[k][i] else { continue };
                for l in &c.facets {
                    if let Some(row) = chain[k - 1][l.rep] {
                        *acc.entry((row, col)).or_default() += l.sign;
                    }
                }
            }
            let entries = acc.into_iter().filter(|&(_, v)| v != 0).map(|((r, c), v)| (r, c, v)).collect();
            boundary.push(Boundary { k, rows, cols, entries });
        }
        homology::check_dd(&boundary)?;
        let homology = Homology::compute(&boundary, &chain)?;
        if homology.betti[3] != f.r2 {
            return Err(Error::Inconsistent(format!("H_3 has rank {}, expected {}", homology.betti[3], f.r2)));
        }
        let n_observed = homology::lcm_orders(&cells);
        let n_bound = n_bound(f)?;
        if let Some(b) = n_bound.value {
            if b % n_observed != 0 {
                return Err(Error::Inconsistent(format!("observed stabilizer lcm {n_observed} does not divide the bound {b}")));
            }
        } else {
            warnings.push(format!("N uncertain ({}); using observed lcm", n_bound.note));
        }
        let n = match (self.n_policy, n_bound.value) {
            (NPolicy::Bound, Some(b)) => b,
            _ => n_observed,
        };
        let weights = homology::cycle_weights(&homology, &cells[3], &chain[3], n)?;
        let cycle = tri::top_cycle(self, &cells, &weights, &mut warnings)?;
        Ok(VoronoiComplex {
            field: f.spec(),
            vertex_order: self.order.name().into(),
            cells,
            chain,
            descent,
            boundary,
            homology,
            n_observed,
            n_bound,
            n,
            cycle,
            warnings,
        })
    }
}

pub fn build_complex(f: &NumberField, graph: &VoronoiGraph, order: &str, n_policy: NPolicy) -> Result<VoronoiComplex> {
    let mut b = Builder::new(f, order)?;
    b.n_policy = n_policy;
    b.build(graph)
}

#[cfg(test)]
mod tests;
