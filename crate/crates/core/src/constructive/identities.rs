//! The isotropic-quadruple solver, the matrix identities over GF(16) used
//! when absorbing lines into a clique image, and the rook-graph model with
//! its cyclic colouring.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf::{solve_special_quartic, Fe, Field};
use crate::graphs::{rook_graph, GraphHandle, GraphMeta};
use crate::hermat::{combine, dot, is_zero_vec, HermMatrix, Matrix};
use crate::varpolar::variety_points;

/// `(a2, a3, a4)`, not all zero, such that for every `a1` the combination
/// `a1 x1 + .. + a4 x4` is isotropic and orthogonal to `x1`.
pub fn isotropic_quadruple_solve(f: &Field, xs: [&[Fe]; 4]) -> Result<(Fe, Fe, Fe)> {
    let n = xs[0].len();
    if xs.iter().any(|x| x.len() != n) {
        return Err(Error::DimensionMismatch("vectors of different lengths".into()));
    }
    if xs.iter().any(|x| !dot(f, x, x).is_zero()) {
        return Err(Error::Precondition("all four vectors must be isotropic".into()));
    }
    let d = |i: usize, j: usize| dot(f, xs[i - 1], xs[j - 1]);
    let d14 = d(1, 4);
    if d14.is_zero() {
        return Err(Error::Precondition("x1* x4 must be nonzero".into()));
    }
    let d41 = d(4, 1);
    let m11 = f.neg(f.trace(f.div(f.mul(d(1, 2), d(2, 4)), d14)));
    let m22 = f.neg(f.trace(f.div(f.mul(d(1, 3), d(3, 4)), d14)));
    let m12 = f.sub(f.sub(d(2, 3), f.div(f.mul(d(4, 3), d(2, 1)), d41)), f.div(f.mul(d(1, 3), d(2, 4)), d14));
    let m21 = f.sub(f.sub(d(3, 2), f.div(f.mul(d(3, 4), d(1, 2)), d14)), f.div(f.mul(d(3, 1), d(4, 2)), d41));
    let m = HermMatrix::new(Matrix::from_rows(f, &[vec![m11, m12], vec![m21, m22]])?)?;
    let point = variety_points(&m)
        .into_iter()
        .next()
        .ok_or_else(|| Error::Invalid("empty variety of a 2x2 form".into()))?;
    let (a2, a3) = (point.coords()[0], point.coords()[1]);
    let a4 = f.neg(f.div(f.add(f.mul(a2, d(1, 2)), f.mul(a3, d(1, 3))), d14));
    Ok((a2, a3, a4))
}

/// Whether `(a2, a3, a4)` works for the given `a1`.
pub fn quadruple_holds(f: &Field, xs: [&[Fe]; 4], a1: Fe, (a2, a3, a4): (Fe, Fe, Fe)) -> bool {
    let v = combine(f, &[(a1, xs[0]), (a2, xs[1]), (a3, xs[2]), (a4, xs[3])]);
    dot(f, &v, &v).is_zero() && dot(f, xs[0], &v).is_zero()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AbsorptionIdentityReport {
    /// Root `t` of `Tr(t)^2 + Tr(t) + N(t) = 0` that produced `a1`.
    pub t: u32,
    /// `w* w` for `w = a1 x1 + a2 x2`.
    pub combined_norm: u32,
    /// `w* w = N(a2) x2* x2 (Tr(t) + 1)` and it is nonzero.
    pub combined_norm_formula: bool,
    /// Singularity of `M1, M2, M3`.
    pub m_singular: [bool; 3],
    /// Singularity of `N1, N2, N3`.
    pub n_singular: [bool; 3],
    pub rank_n2_m3: usize,
    pub rank_n3_m2: usize,
    pub holds: bool,
}

/// Builds the six matrices `M_k = I + eta s_k w w*` and
/// `N_k = I + mu x2 x2* + eta s_k N(a1) x1 x1*`, `s = (i^2, i, 1)`, over
/// GF(16) and checks which are singular and which pairs are adjacent.
pub fn verify_absorption_identities(
    f: &Field,
    x1: &[Fe],
    x2: &[Fe],
    a1: Fe,
    a2: Fe,
) -> Result<AbsorptionIdentityReport> {
    if f.q() != 4 {
        return Err(Error::WrongQ { required: 4, actual: f.q() });
    }
    if is_zero_vec(x1) || is_zero_vec(x2) {
        return Err(Error::ZeroVector);
    }
    let x22 = dot(f, x2, x2);
    let x21 = dot(f, x2, x1);
    if !dot(f, x1, x1).is_zero() || x21.is_zero() || x22.is_zero() {
        return Err(Error::Precondition("need x1* x1 = 0, x1* x2 != 0 and x2* x2 != 0".into()));
    }
    if a2.is_zero() {
        return Err(Error::ZeroScalar("a2"));
    }
    let base = f.mul(a2, f.div(x22, x21));
    let t = solve_special_quartic(f)?
        .into_iter()
        .find(|&t| f.mul(base, t) == a1)
        .ok_or_else(|| Error::Precondition("a1 is not of the required form".into()))?;
    let n = x1.len();
    let w = combine(f, &[(a1, x1), (a2, x2)]);
    let ww = dot(f, &w, &w);
    let formula = f.mul(f.mul(f.norm(a2), x22), f.add(f.trace(t), Fe::ONE));
    let i = f.fixed_field()[2];
    let scalars = [f.mul(i, i), i, Fe::ONE];
    let eta = f.div(i, ww);
    let id = HermMatrix::identity(f, n);
    let ms = scalars.iter().map(|&s| id.update(&w, f.mul(eta, s))).collect::<Result<Vec<_>>>()?;
    let mu = f.mul(f.mul(eta, scalars[0]), f.norm(a2));
    let base_n = id.update(x2, mu)?;
    let ns = scalars
        .iter()
        .map(|&s| base_n.update(x1, f.mul(f.mul(eta, s), f.norm(a1))))
        .collect::<Result<Vec<_>>>()?;
    let sing = |m: &HermMatrix| !m.is_invertible();
    let m_singular = [sing(&ms[0]), sing(&ms[1]), sing(&ms[2])];
    let n_singular = [sing(&ns[0]), sing(&ns[1]), sing(&ns[2])];
    let rank_n2_m3 = ns[1].sub(&ms[2])?.rank();
    let rank_n3_m2 = ns[2].sub(&ms[1])?.rank();
    let combined_norm_formula = ww == formula && !ww.is_zero();
    let holds = combined_norm_formula
        && m_singular == [true, false, false]
        && n_singular == [true, false, false]
        && rank_n2_m3 == 1
        && rank_n3_m2 == 1;
    Ok(AbsorptionIdentityReport {
        t: t.index(),
        combined_norm: ww.index(),
        combined_norm_formula,
        m_singular,
        n_singular,
        rank_n2_m3,
        rank_n3_m2,
        holds,
    })
}

/// `q - 1` disjoint `q`-cliques with vertex `j` of every clique joined
/// across cliques, so each column forms a `(q - 1)`-clique.
#[derive(Clone, Debug)]
pub struct CliqueColumnGraph {
    pub q: u32,
    /// Vertex `(i, j)` (clique `i`, position `j`) has index `i q + j`.
    pub graph: GraphHandle,
    /// Colour `(j - i) mod q`.
    pub coloring: Vec<usize>,
    pub proper: bool,
}

pub fn clique_column_graph(q: u32) -> Result<CliqueColumnGraph> {
    if q < 3 {
        return Err(Error::Precondition(format!("needs q >= 3, got {q}")));
    }
    let (rows, cols) = (q as usize - 1, q as usize);
    let mut graph = rook_graph(rows, cols);
    graph = GraphHandle::from_rows(
        (0..graph.order()).map(|v| graph.row(v).clone()).collect(),
        GraphMeta { family: "clique-columns".into(), q: Some(q), n: None },
    )?;
    let coloring: Vec<usize> = (0..rows * cols)
        .map(|v| {
            let (i, j) = (v / cols, v % cols);
            (j + cols - i) % cols
        })
        .collect();
    let proper = graph.edges().all(|(u, v)| coloring[u] != coloring[v]);
    Ok(CliqueColumnGraph { q, graph, coloring, proper })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf::special_quartic_combinations;
    use crate::varpolar::projective_points;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn quadruples_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for (q, n) in [(2, 4), (3, 4), (4, 3), (5, 4)] {
            let f = Field::new(q).unwrap();
            let iso: Vec<Vec<Fe>> =
                variety_points(&HermMatrix::identity(&f, n)).into_iter().map(|p| p.into_coords()).collect();
            let mut done = 0;
            while done < 30 {
                use rand::seq::SliceRandom;
                let pick: Vec<&Vec<Fe>> = iso.choose_multiple(&mut rng, 4).collect();
                let xs = [&pick[0][..], &pick[1][..], &pick[2][..], &pick[3][..]];
                if dot(&f, xs[0], xs[3]).is_zero() {
                    continue;
                }
                let sol = isotropic_quadruple_solve(&f, xs).unwrap();
                assert!(sol != (Fe::ZERO, Fe::ZERO, Fe::ZERO));
                for a1 in f.elements().take(5) {
                    assert!(quadruple_holds(&f, xs, a1, sol));
                }
                done += 1;
            }
        }
    }

    #[test]
    fn quadruples_exhaustive_gf4() {
        let f = Field::new(2).unwrap();
        let iso: Vec<Vec<Fe>> =
            variety_points(&HermMatrix::identity(&f, 4)).into_iter().map(|p| p.into_coords()).collect();
        let mut count = 0;
        for x1 in &iso {
            for x4 in iso.iter().filter(|x4| !dot(&f, x1, x4).is_zero()) {
                for x2 in iso.iter().step_by(3) {
                    for x3 in iso.iter().step_by(5) {
                        let xs = [&x1[..], &x2[..], &x3[..], &x4[..]];
                        let sol = isotropic_quadruple_solve(&f, xs).unwrap();
                        assert!(f.elements().all(|a1| quadruple_holds(&f, xs, a1, sol)));
                        count += 1;
                    }
                }
            }
        }
        assert!(count > 1000);
    }

    #[test]
    fn absorption_identities_exhaustive_n2() {
        let f = Field::new(4).unwrap();
        let roots = solve_special_quartic(&f).unwrap();
        assert_eq!(special_quartic_combinations(&f, &roots).len(), 11);
        let pts = projective_points(&f, 2);
        let mut cases = 0;
        for x1 in pts.iter().filter(|p| dot(&f, p.coords(), p.coords()).is_zero()) {
            for x2 in &pts {
                let (u, v) = (x1.coords(), x2.coords());
                if dot(&f, u, v).is_zero() || dot(&f, v, v).is_zero() {
                    continue;
                }
                for a2 in f.nonzero_elements() {
                    for &t in &roots {
                        let a1 = f.mul(f.mul(a2, f.div(dot(&f, v, v), dot(&f, v, u))), t);
                        let r = verify_absorption_identities(&f, u, v, a1, a2).unwrap();
                        assert!(r.holds, "{r:?}");
                        cases += 1;
                    }
                }
            }
        }
        assert!(cases > 0);
        let x = [Fe::ONE, Fe::ZERO];
        assert!(verify_absorption_identities(&f, &x, &x, Fe::ONE, Fe::ONE).is_err());
    }

    #[test]
    fn clique_column_graphs() {
        for q in 3..8 {
            let c = clique_column_graph(q).unwrap();
            assert!(c.proper);
            assert_eq!(c.graph.order() as u32, q * (q - 1));
            assert_eq!(c.graph.regular_degree(), Some(2 * q as usize - 3));
            assert_eq!(*c.coloring.iter().max().unwrap() + 1, q as usize);
        }
        assert!(clique_column_graph(2).is_err());
    }
}
