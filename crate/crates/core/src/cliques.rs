//! Maximal cliques of the invertible-matrix graph.
//!
//! Every maximal clique through an invertible `A` is a line
//! `{A + l x x* : l fixed, l x* A^-1 x != -1}`. It has `q` members when
//! `x* A^-1 x = 0` and `q - 1` otherwise.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf::{Fe, Field};
use crate::hermat::{adjacent, is_zero_vec, rank_one_factor, HermMatrix};
use crate::varpolar::{projective_point_count, projective_points, variety_points, ProjectivePoint};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum CliqueKind {
    #[serde(rename = "q")]
    Q,
    #[serde(rename = "q-1")]
    QMinusOne,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CliqueDescriptor {
    pub base: HermMatrix,
    pub direction: ProjectivePoint,
    pub kind: CliqueKind,
    /// Members ordered by the fixed-field scalar, `base` included.
    pub members: Vec<HermMatrix>,
}

impl CliqueDescriptor {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, m: &HermMatrix) -> bool {
        self.members.contains(m)
    }
}

fn inverse_form(a: &HermMatrix, x: &[Fe], y: &[Fe]) -> Result<Fe> {
    if is_zero_vec(x) || is_zero_vec(y) {
        return Err(Error::ZeroVector);
    }
    Ok(a.inverse()?.form(x, y))
}

/// `q`-clique exactly when `x* A^-1 x = 0`.
pub fn classify(a: &HermMatrix, x: &[Fe]) -> Result<CliqueKind> {
    Ok(if inverse_form(a, x, x)?.is_zero() { CliqueKind::Q } else { CliqueKind::QMinusOne })
}

/// The maximal clique through `a` in direction `x`.
pub fn clique(a: &HermMatrix, x: &[Fe]) -> Result<CliqueDescriptor> {
    let f = a.field();
    let s = inverse_form(a, x, x)?;
    let direction = ProjectivePoint::new(f, x)?;
    let minus_one = f.neg(Fe::ONE);
    let mut members = Vec::with_capacity(f.q() as usize);
    for &l in f.fixed_field() {
        if f.mul(l, s) != minus_one {
            members.push(a.update(direction.coords(), l)?);
        }
    }
    Ok(CliqueDescriptor {
        base: a.clone(),
        direction,
        kind: if s.is_zero() { CliqueKind::Q } else { CliqueKind::QMinusOne },
        members,
    })
}

/// The unique maximal clique containing the edge `{a, b}`.
pub fn maximal_clique_through(a: &HermMatrix, b: &HermMatrix) -> Result<CliqueDescriptor> {
    if !a.is_invertible() || !b.is_invertible() {
        return Err(Error::Singular);
    }
    if !adjacent(a, b)? {
        return Err(Error::NotAdjacent);
    }
    let (_, x) = rank_one_factor(&b.sub(a)?)?;
    clique(a, &x)
}

/// All maximal cliques through `a`, one per projective point.
pub fn cliques_at(a: &HermMatrix) -> Result<Vec<CliqueDescriptor>> {
    projective_points(a.field(), a.n()).iter().map(|p| clique(a, p.coords())).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CliqueCounts {
    pub num_q: u128,
    pub num_q_minus_1: u128,
    pub degree: u128,
}

/// Clique counts at `a` from the isotropic points of `A^-1`.
pub fn clique_counts(a: &HermMatrix) -> Result<CliqueCounts> {
    let q = a.field().q() as u128;
    let num_q = variety_points(&a.inverse()?).len() as u128;
    let num_q_minus_1 = projective_point_count(q as u32, a.n()) - num_q;
    Ok(CliqueCounts { num_q, num_q_minus_1, degree: num_q * (q - 1) + num_q_minus_1 * (q - 2) })
}

/// `x* A^-1 y = 0`.
pub fn a_orthogonal(a: &HermMatrix, x: &[Fe], y: &[Fe]) -> Result<bool> {
    Ok(inverse_form(a, x, y)?.is_zero())
}

/// Determinants of the members, sorted by element index.
pub fn det_profile(c: &CliqueDescriptor) -> Result<Vec<Fe>> {
    let mut dets = c.members.iter().map(|m| m.det()).collect::<Result<Vec<_>>>()?;
    dets.sort();
    Ok(dets)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CliqueSummary {
    pub direction: Vec<u32>,
    pub kind: CliqueKind,
    pub size: usize,
    pub determinants: Vec<u32>,
}

/// Clique structure around one vertex, ready for JSON output.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CliqueCensus {
    pub q: u32,
    pub n: usize,
    pub vertex: String,
    /// Isotropy form used to split q- from (q-1)-cliques.
    pub form: String,
    pub counts: CliqueCounts,
    /// Number of cliques of each size.
    pub sizes: BTreeMap<usize, usize>,
    pub cliques: Vec<CliqueSummary>,
}

pub fn census(a: &HermMatrix) -> Result<CliqueCensus> {
    let counts = clique_counts(a)?;
    let mut sizes = BTreeMap::new();
    let mut cliques = Vec::new();
    for c in cliques_at(a)? {
        *sizes.entry(c.len()).or_insert(0) += 1;
        cliques.push(CliqueSummary {
            direction: c.direction.coords().iter().map(|v| v.index()).collect(),
            kind: c.kind,
            size: c.len(),
            determinants: det_profile(&c)?.iter().map(|v| v.index()).collect(),
        });
    }
    Ok(CliqueCensus {
        q: a.field().q(),
        n: a.n(),
        vertex: a.encode_hex(),
        form: crate::varpolar::FORM.to_string(),
        counts,
        sizes,
        cliques,
    })
}

/// Checks a census against the member-count and determinant rules.
pub fn census_consistent(field: &Field, c: &CliqueCensus) -> bool {
    let q = field.q() as usize;
    let fixed: Vec<u32> = {
        let mut v: Vec<u32> = field.fixed_nonzero().iter().map(|x| x.index()).collect();
        v.sort();
        v
    };
    c.cliques.iter().all(|s| match s.kind {
        CliqueKind::Q => s.size == q && s.determinants.windows(2).all(|w| w[0] == w[1]),
        CliqueKind::QMinusOne => s.size == q - 1 && s.determinants == fixed,
    }) && c.counts.num_q == c.cliques.iter().filter(|s| s.kind == CliqueKind::Q).count() as u128
}
