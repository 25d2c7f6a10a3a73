//! Walks between invertible hermitian matrices of equal determinant that
//! stay inside the determinant class.
//!
//! The walk is built in three layers. A scaffold `B_0 = A1, .., B_2m = A2`
//! changes one rank-one term at a time, with every even entry in the class.
//! Each even-odd-even hop is then replaced by real edges: directly, through
//! the odd entry when it lies in the class, or by moving the problem with
//! `X -> P^-1 X P^-*` (where `B = P P*`) to matrices `I + (l - 1) y y*` with
//! `y* y = 1`, which are joined explicitly.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf::{Fe, Field};
use crate::hermat::{
    adjacent, combine, congruence_diagonalize, dot, rank_one_factor, scale_vec, unit_vector, HermMatrix,
    Matrix,
};

/// How a hop of the walk was produced.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum HopKind {
    /// Consecutive scaffold entries that are already adjacent.
    Direct,
    /// Through an odd scaffold entry lying in the class.
    ViaScaffold,
    /// Unit directions with `y1* y2 = 0`.
    Orthogonal,
    /// Unit directions with `N(y1* y2)` outside `{0, 1}`.
    Skew,
    /// As [`HopKind::Orthogonal`], on a detour through `e1`.
    OrthogonalDetour,
    /// As [`HopKind::Skew`], on a detour through `e1`.
    SkewDetour,
}

#[derive(Clone, Debug, PartialEq)]
pub struct WalkCertificate {
    pub vertices: Vec<HermMatrix>,
    pub det_class: Fe,
    /// `hops[i]` joins `vertices[i]` and `vertices[i + 1]`.
    pub hops: Vec<HopKind>,
    /// Length of the rank-one scaffold the walk was derived from.
    pub scaffold_len: usize,
}

impl WalkCertificate {
    /// Number of edges.
    pub fn len(&self) -> usize {
        self.hops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.hops.is_empty()
    }

    /// Rechecks adjacency of consecutive vertices and every determinant.
    pub fn verify(&self) -> bool {
        self.hops.len() + 1 == self.vertices.len()
            && self.vertices.iter().all(|v| v.det().is_ok_and(|d| d == self.det_class))
            && self.vertices.windows(2).all(|w| adjacent(&w[0], &w[1]).unwrap_or(false))
    }

    /// Vertices as hex encodings, with the field recorded.
    pub fn to_json(&self, f: &Field) -> serde_json::Value {
        serde_json::json!({
            "q": f.q(),
            "modulus": f.spec().modulus_string(),
            "det_class": self.det_class.index(),
            "length": self.len(),
            "scaffold_len": self.scaffold_len,
            "vertices": self.vertices.iter().map(|v| v.encode_hex()).collect::<Vec<_>>(),
            "hops": self.hops,
            "valid": self.verify(),
        })
    }
}

#[derive(Clone, Debug)]
struct Path {
    vertices: Vec<HermMatrix>,
    hops: Vec<HopKind>,
}

impl Path {
    fn start(a: HermMatrix) -> Path {
        Path { vertices: vec![a], hops: Vec::new() }
    }

    fn push(&mut self, v: HermMatrix, kind: HopKind) {
        if self.vertices.last() != Some(&v) {
            self.vertices.push(v);
            self.hops.push(kind);
        }
    }

    fn append(&mut self, other: Path) {
        debug_assert_eq!(self.vertices.last(), other.vertices.first());
        for (v, k) in other.vertices.into_iter().skip(1).zip(other.hops) {
            self.push(v, k);
        }
    }

    fn reversed(mut self) -> Path {
        self.vertices.reverse();
        self.hops.reverse();
        self
    }

    fn detour(mut self) -> Path {
        for h in &mut self.hops {
            *h = match *h {
                HopKind::Orthogonal => HopKind::OrthogonalDetour,
                HopKind::Skew => HopKind::SkewDetour,
                other => other,
            };
        }
        self
    }

    fn congruence(self, p: &Matrix) -> Result<Path> {
        Ok(Path {
            vertices: self.vertices.iter().map(|v| v.congruence(p)).collect::<Result<_>>()?,
            hops: self.hops,
        })
    }
}

/// `I + (l - 1) y y*`.
fn unit_matrix(f: &Field, l: Fe, y: &[Fe]) -> Result<HermMatrix> {
    HermMatrix::identity(f, y.len()).update(y, f.sub(l, Fe::ONE))
}

fn search_failed(what: &str) -> Error {
    Error::Invalid(format!("no admissible {what} found"))
}

/// Joins `I + (l-1) y1 y1*` to `I + (l-1) y2 y2*` for unit vectors with
/// `N(y1* y2) != 1`.
fn pair_walk(f: &Field, l: Fe, y1: &[Fe], y2: &[Fe]) -> Result<Path> {
    let a1m = unit_matrix(f, l, y1)?;
    let a2m = unit_matrix(f, l, y2)?;
    let mut path = Path::start(a1m.clone());
    if a1m == a2m {
        return Ok(path);
    }
    let s = dot(f, y1, y2);
    if s.is_zero() {
        let a1 = f.norm_root(f.neg(l)).expect("fixed");
        let a2 = Fe::ONE;
        let w = combine(f, &[(a1, y1), (a2, y2)]);
        let b1 = a1m.update(&w, Fe::ONE)?;
        let c = f.norm_root(f.inv(l).expect("nonzero")).expect("fixed");
        let v = combine(f, &[(f.mul(a1, c), y1), (f.mul(a2, f.conj(f.inv(c).expect("nonzero"))), y2)]);
        let b2 = a2m.update(&v, Fe::ONE)?;
        for m in [b1, b2, a2m] {
            path.push(m, HopKind::Orthogonal);
        }
    } else {
        let a2 = f.inv(s).expect("nonzero");
        let n2 = f.norm(a2);
        let target = f.mul(l, f.sub(Fe::ONE, n2));
        let a1 = f
            .norm_fiber(target)
            .into_iter()
            .map(|u| f.sub(u, Fe::ONE))
            .find(|&a1| f.norm(a1) != n2)
            .ok_or_else(|| search_failed("coefficient"))?;
        let mu = f.div(f.sub(l, Fe::ONE), f.sub(n2, f.norm(a1)));
        let w = combine(f, &[(a1, y1), (a2, y2)]);
        let b = a1m.update(&w, mu)?;
        path.push(b, HopKind::Skew);
        path.push(a2m, HopKind::Skew);
    }
    Ok(path)
}

/// Joins `I + (l-1) y y*` to `I + (l-1) e1 e1*`.
fn to_first_axis(f: &Field, l: Fe, y: &[Fe]) -> Result<Path> {
    let n = y.len();
    let e1 = unit_vector(n, 0);
    if f.norm(y[0]) != Fe::ONE {
        return Ok(pair_walk(f, l, y, &e1)?.detour());
    }
    if unit_matrix(f, l, y)? == unit_matrix(f, l, &e1)? {
        return Ok(Path::start(unit_matrix(f, l, y)?));
    }
    let k = (1..n).find(|&k| !y[k].is_zero()).expect("unit vector with N(y1) = 1 is not a multiple of e1");
    let rest = (1..n).filter(|&i| i != k).fold(Fe::ZERO, |acc, i| f.add(acc, f.norm(y[i])));
    let nsum = f.add(f.norm(y[0]), f.norm(y[k]));
    let forbidden = f.neg(f.div(rest, f.conj(y[0])));
    let v1 = f
        .elements()
        .find(|&v| {
            let nv = f.norm(v);
            nv != Fe::ONE && nv != nsum && v != forbidden
        })
        .ok_or_else(|| search_failed("first coordinate"))?;
    let base = f.add(f.mul(v1, f.conj(y[0])), rest);
    let v2 = f
        .norm_fiber(f.sub(nsum, f.norm(v1)))
        .into_iter()
        .find(|&v2| f.norm(f.add(base, f.mul(v2, f.conj(y[k])))) != Fe::ONE)
        .ok_or_else(|| search_failed("second coordinate"))?;
    let mut z = y.to_vec();
    z[0] = v1;
    z[k] = v2;
    let mut path = pair_walk(f, l, y, &z)?;
    path.append(pair_walk(f, l, &z, &e1)?);
    Ok(path.detour())
}

/// Joins `I + (l-1) y1 y1*` to `I + (l-1) y2 y2*` for unit vectors.
fn unit_walk(f: &Field, l: Fe, y1: &[Fe], y2: &[Fe]) -> Result<Path> {
    if unit_matrix(f, l, y1)? == unit_matrix(f, l, y2)? {
        return Ok(Path::start(unit_matrix(f, l, y1)?));
    }
    if f.norm(dot(f, y1, y2)) != Fe::ONE {
        return pair_walk(f, l, y1, y2);
    }
    let mut path = to_first_axis(f, l, y1)?;
    path.append(to_first_axis(f, l, y2)?.reversed());
    Ok(path)
}

/// Joins `X` and `Z` of determinant `l` that are both adjacent to `B`.
fn through_pivot(l: Fe, x: &HermMatrix, b: &HermMatrix, z: &HermMatrix) -> Result<Path> {
    let f = x.field();
    let p = congruence_diagonalize(b).p;
    let pi = p.inverse()?;
    let lp = f.div(l, b.det()?);
    let unit = |m: &HermMatrix| -> Result<Vec<Fe>> {
        let d = m.congruence(&pi)?.sub(&HermMatrix::identity(f, m.n()))?;
        let (mu, v) = rank_one_factor(&d)?;
        let xv = scale_vec(f, f.norm_root(mu).expect("fixed"), &v);
        let c = f.norm_root(f.inv(f.sub(lp, Fe::ONE)).ok_or(Error::Singular)?).expect("fixed");
        Ok(scale_vec(f, c, &xv))
    };
    let path = unit_walk(f, lp, &unit(x)?, &unit(z)?)?.congruence(&p)?;
    if path.vertices.first() != Some(x) || path.vertices.last() != Some(z) {
        return Err(Error::Invalid("pivot walk has wrong endpoints".into()));
    }
    Ok(path)
}

fn weighted_sum(f: &Field, coefs: &[Fe], vs: &[Vec<Fe>]) -> Result<HermMatrix> {
    let n = vs[0].len();
    let mut m = HermMatrix::zeros(f, n);
    for (c, v) in coefs.iter().zip(vs) {
        m = m.update(v, *c)?;
    }
    Ok(m)
}

fn is_basis(f: &Field, vs: &[&Vec<Fe>]) -> Result<bool> {
    let cols: Vec<Vec<Fe>> = vs.iter().map(|v| (*v).clone()).collect();
    let m = Matrix::from_columns(f, &cols)?;
    Ok(m.rows() == m.cols() && m.rank() == m.rows())
}

/// Matrices `B_0 = A1, .., B_2m = A2` with rank-one or zero steps, every
/// entry invertible and every even entry of determinant `l`.
fn scaffold(a1: &HermMatrix, a2: &HermMatrix, l: Fe) -> Result<Vec<HermMatrix>> {
    let f = a1.field();
    let n = a1.n();
    let ys = congruence_diagonalize(a2).rank_one_terms();
    let mut zs = congruence_diagonalize(a1).rank_one_terms();
    let mut alphas: Vec<Fe> = Vec::with_capacity(n);
    let mut b = a1.clone();
    let mut out = vec![b.clone()];
    for s in 0..n {
        let y = &ys[s];
        let drop = (0..zs.len())
            .find(|&d| {
                let mut vs: Vec<&Vec<Fe>> =
                    zs.iter().enumerate().filter(|&(i, _)| i != d).map(|(_, v)| v).collect();
                vs.extend(&ys[..=s]);
                is_basis(f, &vs).unwrap_or(false)
            })
            .ok_or_else(|| search_failed("exchange vector"))?;
        let last = zs.len() == 1;
        let ti = if last { drop } else { usize::from(drop == 0) };
        let t = zs[ti].clone();
        let binv = b.inverse()?;
        let alpha = f
            .fixed_nonzero()
            .iter()
            .copied()
            .find(|&mu| {
                let upd = f.add(Fe::ONE, f.mul(mu, binv.form(y, y)));
                !upd.is_zero()
                    && b.update(y, mu).and_then(|m| m.inverse()).is_ok_and(|inv| !inv.form(&t, &t).is_zero())
            })
            .ok_or_else(|| search_failed("scalar"))?;
        let b1 = b.update(y, alpha)?;
        let st = b1.inverse()?.form(&t, &t);
        let eta = f.add(Fe::ONE, f.div(f.sub(f.div(l, b1.det()?), Fe::ONE), st));
        let b2 = b1.update(&t, f.sub(eta, Fe::ONE))?;
        alphas.push(alpha);
        out.push(b1);
        out.push(b2.clone());
        if eta.is_zero() {
            zs.remove(ti);
            out.push(b2.clone());
            out.push(b2.clone());
            b = b2;
            continue;
        }
        let (b3, b4);
        if last {
            b3 = b2.update(&t, f.neg(eta))?;
            alphas[s] = f.mul(alpha, f.div(l, b3.det()?));
            b4 = weighted_sum(f, &alphas, &ys[..=s])?;
            zs.clear();
        } else {
            b3 = b2.update(&zs[drop], f.neg(Fe::ONE))?;
            let nu = f.mul(eta, f.div(l, b3.det()?));
            b4 = b3.update(&t, f.sub(nu, eta))?;
            let c = f.norm_root(nu).expect("fixed");
            zs[ti] = scale_vec(f, c, &t);
            zs.remove(drop);
        }
        out.push(b3);
        out.push(b4.clone());
        b = b4;
    }
    let product = alphas.iter().fold(Fe::ONE, |acc, &a| f.mul(acc, a));
    if product != Fe::ONE {
        return Err(Error::Invalid("scaffold coefficients do not multiply to one".into()));
    }
    // replace alpha_i by 1 one index at a time, pushing the product forward
    let mut running = alphas[0];
    for k in 1..n {
        let mut odd = vec![Fe::ONE; n];
        odd[k..].copy_from_slice(&alphas[k..]);
        running = f.mul(running, alphas[k]);
        let mut even = odd.clone();
        even[k] = running;
        out.push(weighted_sum(f, &odd, &ys)?);
        out.push(weighted_sum(f, &even, &ys)?);
    }
    if out.last() != Some(a2) {
        return Err(Error::Invalid("scaffold does not end at the target".into()));
    }
    Ok(out)
}

/// A walk from `a1` to `a2` through matrices of the same determinant.
/// Needs `q >= 4`.
pub fn equal_det_walk(a1: &HermMatrix, a2: &HermMatrix) -> Result<WalkCertificate> {
    let f = a1.field();
    if f.q() < 4 {
        return Err(Error::Precondition(format!("walk construction needs q >= 4, got {}", f.q())));
    }
    if a1.n() != a2.n() {
        return Err(Error::DimensionMismatch("matrix sizes differ".into()));
    }
    let l = a1.det()?;
    if l.is_zero() {
        return Err(Error::Singular);
    }
    if a2.det()? != l {
        return Err(Error::Precondition("determinants differ".into()));
    }
    let mut path = Path::start(a1.clone());
    let mut scaffold_len = 0;
    if a1 != a2 {
        let s = scaffold(a1, a2, l)?;
        scaffold_len = s.len() - 1;
        for w in s.windows(3).step_by(2) {
            let (x, y, z) = (&w[0], &w[1], &w[2]);
            if x == z {
                continue;
            }
            if adjacent(x, z)? {
                path.push(z.clone(), HopKind::Direct);
            } else if y.det()? == l {
                path.push(y.clone(), HopKind::ViaScaffold);
                path.push(z.clone(), HopKind::ViaScaffold);
            } else {
                path.append(through_pivot(l, x, y, z)?);
            }
        }
    }
    let cert = WalkCertificate { vertices: path.vertices, det_class: l, hops: path.hops, scaffold_len };
    if !cert.verify() {
        return Err(Error::Invalid("constructed walk failed verification".into()));
    }
    Ok(cert)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::{build_hgl, det_class_subgraph, vertex_matrix, BuildBudget};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn random_unit(f: &Field, n: usize, rng: &mut ChaCha8Rng) -> Vec<Fe> {
        loop {
            let y: Vec<Fe> = (0..n).map(|_| f.random(rng)).collect();
            if dot(f, &y, &y) == Fe::ONE {
                return y;
            }
        }
    }

    fn check(path: &Path, l: Fe) {
        for v in &path.vertices {
            assert_eq!(v.det().unwrap(), l);
        }
        for w in path.vertices.windows(2) {
            assert!(adjacent(&w[0], &w[1]).unwrap());
        }
    }

    #[test]
    fn unit_walks_cover_all_branches() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut seen = std::collections::BTreeSet::new();
        for q in [4, 5] {
            let f = Field::new(q).unwrap();
            for n in [2, 3, 4] {
                for _ in 0..150 {
                    let l = f.random_fixed(&mut rng);
                    if l.is_zero() || l == Fe::ONE {
                        continue;
                    }
                    let y1 = random_unit(&f, n, &mut rng);
                    let y2 = random_unit(&f, n, &mut rng);
                    let p = unit_walk(&f, l, &y1, &y2).unwrap();
                    assert_eq!(p.vertices[0], unit_matrix(&f, l, &y1).unwrap());
                    assert_eq!(*p.vertices.last().unwrap(), unit_matrix(&f, l, &y2).unwrap());
                    check(&p, l);
                    seen.extend(p.hops.iter().map(|h| format!("{h:?}")));
                }
            }
        }
        for kind in ["Orthogonal", "Skew", "OrthogonalDetour", "SkewDetour"] {
            assert!(seen.contains(kind), "{kind} never exercised");
        }
    }

    #[test]
    fn whole_class_gf16() {
        let f = Field::new(4).unwrap();
        let g = build_hgl(&f, 2, &BuildBudget::default()).unwrap();
        for &l in f.fixed_nonzero() {
            let class = det_class_subgraph(&g, &f, l).unwrap();
            assert_eq!(class.vertices.len(), 68);
            assert!(class.is_connected());
            let mats: Vec<HermMatrix> =
                class.vertices.iter().map(|&v| vertex_matrix(&g, &f, v).unwrap()).collect();
            for (i, a) in mats.iter().enumerate().step_by(if l == Fe::ONE { 1 } else { 5 }) {
                for b in &mats[i..] {
                    let w = equal_det_walk(a, b).unwrap();
                    assert!(w.verify());
                    assert_eq!((&w.vertices[0], w.vertices.last().unwrap()), (a, b));
                }
            }
        }
    }

    #[test]
    fn random_pairs_larger() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for (q, n) in [(4, 3), (5, 3), (4, 4), (7, 2), (8, 3), (9, 2)] {
            let f = Field::new(q).unwrap();
            for _ in 0..25 {
                let a = HermMatrix::random_invertible(&f, n, &mut rng);
                let b0 = HermMatrix::random_invertible(&f, n, &mut rng);
                // rescale one diagonal term so the determinants agree
                let ratio = f.div(a.det().unwrap(), b0.det().unwrap());
                let c = f.norm_root(ratio).unwrap();
                let mut d = vec![Fe::ONE; n];
                d[0] = c;
                let b = b0.congruence(&Matrix::diagonal(&f, &d)).unwrap();
                let w = equal_det_walk(&a, &b).unwrap();
                assert!(w.verify());
            }
        }
    }

    #[test]
    fn rejects_bad_input() {
        let f = Field::new(3).unwrap();
        let i = HermMatrix::identity(&f, 2);
        assert!(equal_det_walk(&i, &i).is_err());
        let f = Field::new(4).unwrap();
        let i = HermMatrix::identity(&f, 2);
        let w = equal_det_walk(&i, &i).unwrap();
        assert!(w.is_empty());
        let other = HermMatrix::diagonal(&f, &[f.fixed_nonzero()[1], Fe::ONE]).unwrap();
        assert!(equal_det_walk(&i, &other).is_err());
    }
}
