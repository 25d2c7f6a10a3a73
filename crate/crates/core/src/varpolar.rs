//! Hermitian varieties, totally isotropic subspaces, and polar point graphs.
//!
//! Convention: the variety of `A` here is `{ <x> : x* A x = 0 }`. Under the
//! transpose form `x^T A conj(x) = 0` the same set belongs to `conj(A)`;
//! [`variety_points_transpose_form`] evaluates that form directly so the two
//! can be compared.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf::{Fe, Field};
use crate::graphs::{GraphHandle, GraphMeta};
use crate::hermat::{combine, entry_width, is_zero_vec, normalize_projective, HermMatrix, Matrix};

/// Name of the form whose zeros define a variety, recorded in certificates.
pub const FORM: &str = "x* A x";

/// A point of projective space, stored with first nonzero coordinate one.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ProjectivePoint(Vec<Fe>);

impl ProjectivePoint {
    pub fn new(field: &Field, x: &[Fe]) -> Result<ProjectivePoint> {
        normalize_projective(field, x).map(ProjectivePoint).ok_or(Error::ZeroVector)
    }

    pub fn coords(&self) -> &[Fe] {
        &self.0
    }

    pub fn into_coords(self) -> Vec<Fe> {
        self.0
    }

    /// Coordinates as big-endian element indices.
    pub fn encode(&self, field: &Field) -> Vec<u8> {
        let width = entry_width(field);
        self.0.iter().flat_map(|v| v.index().to_be_bytes()[4 - width..].to_vec()).collect()
    }
}

/// `(Q^n - 1) / (Q - 1)` with `Q = q^2`.
pub fn projective_point_count(q: u32, n: usize) -> u128 {
    let big_q = (q as u128) * (q as u128);
    (big_q.pow(n as u32) - 1) / (big_q - 1)
}

/// All points of `PG(n-1, q^2)`, sorted.
pub fn projective_points(field: &Field, n: usize) -> Vec<ProjectivePoint> {
    let order = field.order();
    let mut out = Vec::with_capacity(projective_point_count(field.q(), n) as usize);
    for lead in 0..n {
        let free = n - lead - 1;
        let total = (order as u64).pow(free as u32);
        for mut k in 0..total {
            let mut x = vec![Fe::ZERO; n];
            x[lead] = Fe::ONE;
            for slot in x.iter_mut().rev().take(free) {
                *slot = field.element((k % order as u64) as u32).expect("in range");
                k /= order as u64;
            }
            out.push(ProjectivePoint(x));
        }
    }
    out.sort();
    out
}

/// Points with `x* A x = 0`.
pub fn variety_points(a: &HermMatrix) -> Vec<ProjectivePoint> {
    projective_points(a.field(), a.n())
        .into_iter()
        .filter(|p| a.form(p.coords(), p.coords()).is_zero())
        .collect()
}

/// Points with `x^T A conj(x) = 0`; equals `variety_points(conj(A))`.
pub fn variety_points_transpose_form(a: &HermMatrix) -> Vec<ProjectivePoint> {
    let f = a.field();
    projective_points(f, a.n())
        .into_iter()
        .filter(|p| {
            let x = p.coords();
            let xc: Vec<Fe> = x.iter().map(|&v| f.conj(v)).collect();
            let ax = a.mul_vec(&xc).expect("dimensions agree");
            x.iter().zip(&ax).fold(Fe::ZERO, |acc, (&u, &v)| f.add(acc, f.mul(u, v))).is_zero()
        })
        .collect()
}

/// Closed-form size of the variety of a rank-`r` hermitian form on `n`
/// coordinates: `(q^(2n-1) + (-1)^r (q-1) q^(2n-r-1) - 1) / (q^2 - 1)`.
///
/// `r = 0` is accepted and yields every projective point.
pub fn variety_cardinality(n: usize, r: usize, q: u32) -> Result<u128> {
    if n == 0 {
        return Err(Error::Precondition("n must be positive".into()));
    }
    if r > n {
        return Err(Error::Precondition(format!("rank {r} exceeds n = {n}")));
    }
    let q = q as i128;
    let sign = if r.is_multiple_of(2) { 1 } else { -1 };
    let num = q.pow((2 * n - 1) as u32) + sign * (q - 1) * q.pow((2 * n - r - 1) as u32) - 1;
    let den = q * q - 1;
    if num % den != 0 {
        return Err(Error::Invalid(format!("variety formula not integral for n={n}, r={r}, q={q}")));
    }
    Ok((num / den) as u128)
}

/// A totally isotropic subspace given by a basis.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IsotropicSubspace {
    pub basis: Vec<Vec<Fe>>,
}

impl IsotropicSubspace {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// All `Q^d - 1` nonzero vectors of the span.
    pub fn nonzero_vectors(&self, field: &Field) -> Vec<Vec<Fe>> {
        let d = self.basis.len();
        let order = field.order() as u64;
        let total = order.pow(d as u32);
        (1..total)
            .map(|mut k| {
                let coeffs: Vec<Fe> = (0..d)
                    .map(|_| {
                        let c = field.element((k % order) as u32).expect("in range");
                        k /= order;
                        c
                    })
                    .collect();
                let terms: Vec<(Fe, &[Fe])> =
                    coeffs.iter().zip(&self.basis).map(|(&c, b)| (c, b.as_slice())).collect();
                combine(field, &terms)
            })
            .collect()
    }
}

/// Checks independence, that every nonzero vector of the span is isotropic,
/// and that `x* A y = 0` for all basis pairs.
pub fn verify_isotropic_subspace(a: &HermMatrix, u: &IsotropicSubspace) -> bool {
    let f = a.field();
    if u.basis.is_empty() {
        return true;
    }
    let m = match Matrix::from_rows(f, &u.basis) {
        Ok(m) => m,
        Err(_) => return false,
    };
    if m.rank() != u.dim() {
        return false;
    }
    let polar = u.basis.iter().all(|x| u.basis.iter().all(|y| a.form(x, y).is_zero()));
    polar && u.nonzero_vectors(f).iter().all(|v| !is_zero_vec(v) && a.form(v, v).is_zero())
}

/// Depth-first search for a `d`-dimensional subspace inside the variety of
/// `A`, adding one variety point at a time in increasing order and keeping
/// only points orthogonal to all chosen ones and outside their span.
pub fn isotropic_subspace_search(a: &HermMatrix, d: usize) -> Result<Option<IsotropicSubspace>> {
    let n = a.n();
    if d == 0 || d > n {
        return Err(Error::Precondition(format!("dimension {d} outside 1..={n}")));
    }
    if !a.is_invertible() {
        return Err(Error::Singular);
    }
    let points: Vec<Vec<Fe>> = variety_points(a).into_iter().map(|p| p.into_coords()).collect();
    let mut chosen: Vec<usize> = Vec::new();
    let found = extend(a, &points, d, 0, &mut chosen);
    Ok(found.then(|| IsotropicSubspace { basis: chosen.iter().map(|&i| points[i].clone()).collect() }))
}

fn extend(a: &HermMatrix, points: &[Vec<Fe>], d: usize, start: usize, chosen: &mut Vec<usize>) -> bool {
    if chosen.len() == d {
        return true;
    }
    let f = a.field();
    for i in start..points.len() {
        let x = &points[i];
        if !chosen.iter().all(|&j| a.form(&points[j], x).is_zero()) {
            continue;
        }
        let mut rows: Vec<Vec<Fe>> = chosen.iter().map(|&j| points[j].clone()).collect();
        rows.push(x.clone());
        if Matrix::from_rows(f, &rows).expect("equal lengths").rank() != rows.len() {
            continue;
        }
        chosen.push(i);
        if extend(a, points, d, i + 1, chosen) {
            return true;
        }
        chosen.pop();
    }
    false
}

/// Point graph of the polar space of an invertible form: variety points,
/// distinct points adjacent when `x* A y = 0`.
#[derive(Clone, Debug)]
pub struct PolarGraph {
    pub base: HermMatrix,
    pub points: Vec<ProjectivePoint>,
    pub graph: GraphHandle,
}

impl PolarGraph {
    pub fn complement(&self) -> GraphHandle {
        self.graph.complement()
    }
}

pub fn polar_point_graph(a: &HermMatrix) -> Result<PolarGraph> {
    if !a.is_invertible() {
        return Err(Error::Singular);
    }
    let f = a.field();
    let points = variety_points(a);
    let mut edges = Vec::new();
    for (i, x) in points.iter().enumerate() {
        for (j, y) in points.iter().enumerate().skip(i + 1) {
            if a.form(x.coords(), y.coords()).is_zero() {
                edges.push((i, j));
            }
        }
    }
    let meta = GraphMeta { family: "polar".into(), q: Some(f.q()), n: Some(a.n()) };
    let labels = points.iter().map(|p| p.encode(f)).collect();
    let graph = GraphHandle::from_edges(points.len(), &edges, meta)?.with_labels(labels)?;
    Ok(PolarGraph { base: a.clone(), points, graph })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hermat::enumerate_hermitian;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn closed_form_values() {
        assert_eq!(variety_cardinality(2, 2, 2).unwrap(), 3);
        for q in [2, 3, 4, 5, 7] {
            assert_eq!(variety_cardinality(2, 1, q).unwrap(), 1);
            assert_eq!(variety_cardinality(2, 2, q).unwrap(), q as u128 + 1);
            assert_eq!(variety_cardinality(3, 0, q).unwrap(), projective_point_count(q, 3));
        }
        assert_eq!(variety_cardinality(4, 4, 2).unwrap(), 45);
        assert!(variety_cardinality(2, 3, 2).is_err());
    }

    #[test]
    fn point_enumeration() {
        let f = Field::new(2).unwrap();
        let pts = projective_points(&f, 3);
        assert_eq!(pts.len() as u128, projective_point_count(2, 3));
        assert!(pts.windows(2).all(|w| w[0] < w[1]));
        assert!(ProjectivePoint::new(&f, &[Fe::ZERO, Fe::ZERO]).is_err());
    }

    #[test]
    fn enumerated_size_matches_formula_exhaustively() {
        for q in [2, 3] {
            let f = Field::new(q).unwrap();
            for n in [2, 3] {
                for a in enumerate_hermitian(&f, n) {
                    let r = a.rank();
                    assert_eq!(variety_points(&a).len() as u128, variety_cardinality(n, r, q).unwrap());
                }
            }
        }
    }

    #[test]
    fn transpose_form_is_conjugate_variety() {
        let f = Field::new(3).unwrap();
        for a in enumerate_hermitian(&f, 2) {
            let conj = HermMatrix::new(a.conj()).unwrap();
            assert_eq!(variety_points_transpose_form(&a), variety_points(&conj));
        }
    }

    #[test]
    fn isotropic_dimension_bound() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for q in [2, 3] {
            let f = Field::new(q).unwrap();
            for _ in 0..3 {
                let a = HermMatrix::random_invertible(&f, 3, &mut rng);
                assert!(isotropic_subspace_search(&a, 2).unwrap().is_none());
                let u = isotropic_subspace_search(&a, 1).unwrap().unwrap();
                assert!(verify_isotropic_subspace(&a, &u));
            }
        }
        let f = Field::new(2).unwrap();
        let i4 = HermMatrix::identity(&f, 4);
        let u = isotropic_subspace_search(&i4, 2).unwrap().unwrap();
        assert!(verify_isotropic_subspace(&i4, &u));
        assert_eq!(u.nonzero_vectors(&f).len(), 15);
        assert!(isotropic_subspace_search(&i4, 3).unwrap().is_none());
        assert!(isotropic_subspace_search(&i4, 5).is_err());
    }

    #[test]
    fn polar_graph_size_and_symmetry() {
        let f = Field::new(2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..3 {
            let a = HermMatrix::random_invertible(&f, 4, &mut rng);
            let pg = polar_point_graph(&a).unwrap();
            assert_eq!(pg.graph.order(), 45);
            let c = pg.complement();
            for u in 0..45 {
                for v in 0..45 {
                    assert_eq!(pg.graph.is_adjacent(u, v), pg.graph.is_adjacent(v, u));
                    if u != v {
                        assert_ne!(pg.graph.is_adjacent(u, v), c.is_adjacent(u, v));
                    }
                }
            }
        }
        assert!(polar_point_graph(&HermMatrix::zeros(&f, 4)).is_err());
    }
}
