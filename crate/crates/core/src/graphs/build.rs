//! Construction of the hermitian-matrix graphs and queries that use the
//! matrix labels of their vertices.

use std::collections::HashMap;

use fixedbitset::FixedBitSet;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{GraphHandle, GraphMeta};
use crate::error::{Error, Result};
use crate::gf::{Fe, Field};
use crate::hermat::{congruence_diagonalize, enumerate_hermitian, hermitian_count, HermMatrix, Matrix};
use crate::varpolar::{projective_point_count, projective_points, variety_cardinality};

/// Size caps checked before any enumeration starts.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BuildBudget {
    pub max_vertices: u128,
    pub max_edges: u128,
}

impl Default for BuildBudget {
    fn default() -> Self {
        BuildBudget { max_vertices: 1_000_000, max_edges: 1_000_000_000 }
    }
}

impl BuildBudget {
    fn check(&self, vertices: u128, edges: u128) -> Result<()> {
        if vertices > self.max_vertices {
            return Err(Error::Budget {
                what: "vertices".into(),
                required: vertices,
                budget: self.max_vertices,
            });
        }
        if edges > self.max_edges {
            return Err(Error::Budget { what: "edges".into(), required: edges, budget: self.max_edges });
        }
        Ok(())
    }
}

/// Number of invertible hermitian `n x n` matrices over GF(q^2):
/// `q^(n(n-1)/2) prod_{i=1..n} (q^i + (-1)^i)`.
pub fn hgl_vertex_count(q: u32, n: usize) -> u128 {
    let q = q as i128;
    let mut count = q.pow((n * (n - 1) / 2) as u32);
    for i in 1..=n as u32 {
        let sign = if i % 2 == 0 { 1 } else { -1 };
        count *= q.pow(i) + sign;
    }
    count as u128
}

/// Common degree of the invertible-matrix graph: `N (q-1) + (P - N)(q-2)`
/// with `N` isotropic points of a nondegenerate form and `P` all points.
pub fn hgl_degree(q: u32, n: usize) -> u128 {
    let isotropic = variety_cardinality(n, n, q).expect("rank n is in range");
    let points = projective_point_count(q, n);
    isotropic * (q as u128 - 1) + (points - isotropic) * (q as u128 - 2)
}

/// The graph on invertible hermitian `n x n` matrices.
pub fn build_hgl(field: &Field, n: usize, budget: &BuildBudget) -> Result<GraphHandle> {
    let q = field.q();
    let vertices = hgl_vertex_count(q, n);
    budget.check(vertices, vertices * hgl_degree(q, n) / 2)?;
    build(field, n, true)
}

/// The graph on all hermitian `n x n` matrices, singular ones included.
pub fn build_h(field: &Field, n: usize, budget: &BuildBudget) -> Result<GraphHandle> {
    let q = field.q();
    let vertices = hermitian_count(q, n);
    let degree = projective_point_count(q, n) * (q as u128 - 1);
    budget.check(vertices, vertices * degree / 2)?;
    build(field, n, false)
}

pub fn build_h2(field: &Field, budget: &BuildBudget) -> Result<GraphHandle> {
    build_h(field, 2, budget)
}

fn build(field: &Field, n: usize, invertible_only: bool) -> Result<GraphHandle> {
    if n == 0 {
        return Err(Error::Precondition("n must be positive".into()));
    }
    let matrices: Vec<HermMatrix> =
        enumerate_hermitian(field, n).filter(|a| !invertible_only || a.is_invertible()).collect();
    let labels: Vec<Vec<u8>> = matrices.iter().map(|a| a.encode()).collect();
    let index: HashMap<&[u8], usize> = labels.iter().enumerate().map(|(i, l)| (l.as_slice(), i)).collect();
    let points = projective_points(field, n);
    let scalars = field.fixed_nonzero();
    let order = matrices.len();
    let rows: Vec<FixedBitSet> = matrices
        .par_iter()
        .map(|a| {
            let mut row = FixedBitSet::with_capacity(order);
            for p in &points {
                for &lambda in scalars {
                    let b = HermMatrix::new(a.rank_one_update(p.coords(), lambda))
                        .expect("rank-one update keeps hermitian");
                    if let Some(&j) = index.get(b.encode().as_slice()) {
                        row.insert(j);
                    }
                }
            }
            row
        })
        .collect();
    let meta = GraphMeta {
        family: if invertible_only { "HGL" } else { "H" }.into(),
        q: Some(field.q()),
        n: Some(n),
    };
    GraphHandle::from_rows(rows, meta)?.with_labels(labels)
}

/// Matrix carried by vertex `v` of a graph built by this module.
pub fn vertex_matrix(g: &GraphHandle, field: &Field, v: usize) -> Result<HermMatrix> {
    let n = g.meta().n.ok_or_else(|| Error::Invalid("graph has no matrix dimension".into()))?;
    let label = g.label(v).ok_or_else(|| Error::Invalid("graph has no vertex labels".into()))?;
    HermMatrix::decode(field, n, label)
}

fn check_field(g: &GraphHandle, field: &Field) -> Result<()> {
    match g.meta().q {
        Some(q) if q == field.q() => Ok(()),
        Some(q) => Err(Error::WrongQ { required: q, actual: field.q() }),
        None => Err(Error::Invalid("graph carries no field size".into())),
    }
}

/// Invertible `P` with `P A P* = B`, for hermitian `A`, `B` of equal rank.
pub fn congruence_witness(a: &HermMatrix, b: &HermMatrix) -> Result<Matrix> {
    let ca = congruence_diagonalize(a);
    let cb = congruence_diagonalize(b);
    if ca.rank != cb.rank {
        return Err(Error::Precondition(format!("ranks differ ({} vs {})", ca.rank, cb.rank)));
    }
    cb.p.mul(&ca.p.inverse()?)
}

/// Vertex permutation induced by `X -> P X P*`, if it is an automorphism.
pub fn is_congruence_automorphism(g: &GraphHandle, field: &Field, p: &Matrix) -> Result<Option<Vec<usize>>> {
    check_field(g, field)?;
    let mut perm = Vec::with_capacity(g.order());
    let mut hit = FixedBitSet::with_capacity(g.order());
    for v in 0..g.order() {
        let image = vertex_matrix(g, field, v)?.congruence(p)?;
        let Some(w) = g.index_of(&image.encode()) else {
            return Ok(None);
        };
        if hit.contains(w) {
            return Ok(None);
        }
        hit.insert(w);
        perm.push(w);
    }
    let ok = (0..g.order())
        .all(|u| (u + 1..g.order()).all(|v| g.is_adjacent(u, v) == g.is_adjacent(perm[u], perm[v])));
    Ok(ok.then_some(perm))
}

/// Orbits of the congruence action of a generating set of `GL_n(q^2)`:
/// `diag(g, 1, ..)`, `I + E_12`, the transposition `(1 2)` and the cycle
/// `(1 2 .. n)`.
pub fn congruence_orbits(g: &GraphHandle, field: &Field) -> Result<Vec<Vec<usize>>> {
    check_field(g, field)?;
    let n = g.meta().n.ok_or_else(|| Error::Invalid("graph has no matrix dimension".into()))?;
    let mut gens = Vec::new();
    let mut d = vec![Fe::ONE; n];
    d[0] = field.generator();
    gens.push(Matrix::diagonal(field, &d));
    if n >= 2 {
        let mut t = Matrix::identity(field, n);
        t.set(0, 1, Fe::ONE);
        gens.push(t);
        gens.push(Matrix::from_fn(field, n, n, |i, j| {
            let s = match i {
                0 => 1,
                1 => 0,
                k => k,
            };
            if j == s {
                Fe::ONE
            } else {
                Fe::ZERO
            }
        }));
        gens.push(Matrix::from_fn(field, n, n, |i, j| if j == (i + 1) % n { Fe::ONE } else { Fe::ZERO }));
    }
    let mut parent: Vec<usize> = (0..g.order()).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for p in &gens {
        let perm = is_congruence_automorphism(g, field, p)?
            .ok_or_else(|| Error::Invalid("congruence generator is not an automorphism".into()))?;
        for (v, &w) in perm.iter().enumerate() {
            let (a, b) = (find(&mut parent, v), find(&mut parent, w));
            if a != b {
                parent[a.max(b)] = a.min(b);
            }
        }
    }
    let mut orbits: HashMap<usize, Vec<usize>> = HashMap::new();
    for v in 0..g.order() {
        let r = find(&mut parent, v);
        orbits.entry(r).or_default().push(v);
    }
    let mut out: Vec<Vec<usize>> = orbits.into_values().collect();
    out.sort();
    Ok(out)
}

/// Induced subgraph on one determinant class with its connectivity.
#[derive(Clone, Debug)]
pub struct DetClass {
    pub lambda: Fe,
    /// Indices into the parent graph, increasing.
    pub vertices: Vec<usize>,
    pub graph: GraphHandle,
    pub components: usize,
}

impl DetClass {
    pub fn is_connected(&self) -> bool {
        self.components <= 1
    }
}

pub fn det_class_subgraph(g: &GraphHandle, field: &Field, lambda: Fe) -> Result<DetClass> {
    check_field(g, field)?;
    field.fixed(lambda)?;
    if lambda.is_zero() {
        return Err(Error::ZeroScalar("lambda"));
    }
    let mut vertices = Vec::new();
    for v in 0..g.order() {
        if vertex_matrix(g, field, v)?.det()? == lambda {
            vertices.push(v);
        }
    }
    let graph = g.induced(&vertices)?;
    let components = graph.components().len();
    Ok(DetClass { lambda, vertices, graph, components })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hermat::adjacent;

    #[test]
    fn vertex_count_formula_matches_enumeration() {
        for (q, n) in [(2, 2), (3, 2), (4, 2), (2, 3), (3, 3)] {
            let f = Field::new(q).unwrap();
            let count = enumerate_hermitian(&f, n).filter(|a| a.is_invertible()).count();
            assert_eq!(count as u128, hgl_vertex_count(q, n), "q={q} n={n}");
        }
        assert_eq!(hgl_vertex_count(2, 2), 10);
        assert_eq!(hgl_vertex_count(3, 2), 60);
        assert_eq!(hgl_vertex_count(4, 2), 204);
        for q in 2..8 {
            let q128 = q as u128;
            assert_eq!(hgl_degree(q, 2), q128.pow(3) - 2 * q128 * q128 + 2 * q128 - 1);
        }
    }

    #[test]
    fn build_matches_rank_oracle() {
        for q in [2, 3] {
            let f = Field::new(q).unwrap();
            let g = build_hgl(&f, 2, &BuildBudget::default()).unwrap();
            let mats: Vec<HermMatrix> = (0..g.order()).map(|v| vertex_matrix(&g, &f, v).unwrap()).collect();
            for u in 0..g.order() {
                for v in 0..g.order() {
                    assert_eq!(g.is_adjacent(u, v), adjacent(&mats[u], &mats[v]).unwrap());
                }
            }
            assert_eq!(g.regular_degree().map(|d| d as u128), Some(hgl_degree(q, 2)));
        }
    }

    #[test]
    fn h2_sizes() {
        for q in [2, 3] {
            let f = Field::new(q).unwrap();
            let g = build_h2(&f, &BuildBudget::default()).unwrap();
            let k = q.pow(3) - q * q + q - 1;
            assert_eq!(g.order(), q.pow(4) as usize);
            assert_eq!(g.regular_degree(), Some(k as usize));
            // neighbours of the zero matrix are exactly the rank-one matrices
            let zero = g.index_of(&HermMatrix::zeros(&f, 2).encode()).unwrap();
            for v in g.neighbors(zero) {
                assert_eq!(vertex_matrix(&g, &f, v).unwrap().rank(), 1);
            }
        }
    }

    #[test]
    fn budget_refuses_before_building() {
        let f = Field::new(4).unwrap();
        let tiny = BuildBudget { max_vertices: 100, max_edges: 1 << 40 };
        match build_hgl(&f, 2, &tiny) {
            Err(Error::Budget { required, .. }) => assert_eq!(required, 204),
            other => panic!("expected budget error, got {other:?}"),
        }
    }

    #[test]
    fn congruence_action_is_transitive() {
        for q in [2, 3] {
            let f = Field::new(q).unwrap();
            let g = build_hgl(&f, 2, &BuildBudget::default()).unwrap();
            assert_eq!(congruence_orbits(&g, &f).unwrap().len(), 1);
            let a = vertex_matrix(&g, &f, 0).unwrap();
            let b = vertex_matrix(&g, &f, g.order() - 1).unwrap();
            let p = congruence_witness(&a, &b).unwrap();
            assert_eq!(a.congruence(&p).unwrap(), b);
            assert!(is_congruence_automorphism(&g, &f, &p).unwrap().is_some());
        }
    }

    #[test]
    fn det_classes() {
        let f = Field::new(3).unwrap();
        let g = build_hgl(&f, 2, &BuildBudget::default()).unwrap();
        for &l in f.fixed_nonzero() {
            let c = det_class_subgraph(&g, &f, l).unwrap();
            assert_eq!(c.vertices.len(), 30);
        }
        assert!(det_class_subgraph(&g, &f, Fe::ZERO).is_err());
        let f2 = Field::new(2).unwrap();
        let p = build_hgl(&f2, 2, &BuildBudget::default()).unwrap();
        let c = det_class_subgraph(&p, &f2, Fe::ONE).unwrap();
        assert_eq!(c.vertices.len(), 10);
        assert!(c.is_connected());
    }
}
