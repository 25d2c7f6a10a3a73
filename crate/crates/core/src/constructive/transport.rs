//! Unitary matrices (`P* P = I`) moving isotropic vectors and pairs of
//! isotropic vectors onto each other, and congruences between clique pairs.

use super::{Check, TransportCertificate};
use crate::error::{Error, Result};
use crate::gf::{Fe, Field};
use crate::hermat::{
    congruence_diagonalize, dot, is_zero_vec, scale_vec, sub_vec, unit_vector, HermMatrix, Matrix,
};
use crate::varpolar::ProjectivePoint;
use rand::Rng;

pub fn is_unitary(p: &Matrix) -> bool {
    p.is_square() && p.star().mul(p).is_ok_and(|m| m == Matrix::identity(p.field(), p.rows()))
}

pub fn is_orthonormal(f: &Field, xs: &[Vec<Fe>]) -> bool {
    xs.iter().enumerate().all(|(i, x)| {
        xs.iter().enumerate().all(|(j, y)| dot(f, x, y) == if i == j { Fe::ONE } else { Fe::ZERO })
    })
}

/// Extends orthonormal `xs` in `F^n` to an orthonormal basis.
pub fn orthonormal_complete(f: &Field, xs: &[Vec<Fe>], n: usize) -> Result<Vec<Vec<Fe>>> {
    if xs.iter().any(|x| x.len() != n) || xs.len() > n {
        return Err(Error::DimensionMismatch(format!("{} vectors for dimension {n}", xs.len())));
    }
    if !is_orthonormal(f, xs) {
        return Err(Error::Precondition("vectors are not orthonormal".into()));
    }
    let mut out = xs.to_vec();
    while out.len() < n {
        let starred: Vec<Vec<Fe>> = out.iter().map(|x| x.iter().map(|&v| f.conj(v)).collect()).collect();
        let kernel = if starred.is_empty() {
            (0..n).map(|i| unit_vector(n, i)).collect()
        } else {
            Matrix::from_rows(f, &starred)?.kernel()
        };
        let y = non_isotropic_in_span(f, &kernel)
            .ok_or_else(|| Error::Invalid("kernel is totally isotropic".into()))?;
        let a = f.norm_root(f.inv(dot(f, &y, &y)).expect("non-isotropic")).expect("norm is surjective");
        out.push(scale_vec(f, a, &y));
    }
    Ok(out)
}

/// A vector `v` in the span of `basis` with `v* v != 0`.
fn non_isotropic_in_span(f: &Field, basis: &[Vec<Fe>]) -> Option<Vec<Fe>> {
    if let Some(v) = basis.iter().find(|v| !dot(f, v, v).is_zero()) {
        return Some(v.clone());
    }
    // all isotropic: (u + c v)*(u + c v) = Tr(c u* v)
    for (i, u) in basis.iter().enumerate() {
        for v in &basis[i + 1..] {
            let s = dot(f, u, v);
            if !s.is_zero() {
                let c = f.div(f.trace_one(), s);
                return Some(crate::hermat::add_vec(f, u, &scale_vec(f, c, v)));
            }
        }
    }
    None
}

/// Fixed `a` with `N(a) = -1`.
fn minus_one_norm(f: &Field) -> Fe {
    f.norm_root(f.neg(Fe::ONE)).expect("-1 is fixed")
}

/// `(1, a, 0, .., 0)` for the `a` of [`minus_one_norm`].
fn standard_isotropic(f: &Field, n: usize) -> Vec<Fe> {
    let mut x = vec![Fe::ZERO; n];
    x[0] = Fe::ONE;
    x[1] = minus_one_norm(f);
    x
}

fn is_isotropic(f: &Field, x: &[Fe]) -> bool {
    dot(f, x, x).is_zero()
}

/// `z` with `z* z = 1` and `z* y = a` for isotropic nonzero `y`.
fn unit_partner(f: &Field, y: &[Fe], a: Fe) -> Result<Vec<Fe>> {
    let n = y.len();
    let mut z = vec![Fe::ZERO; n];
    if let Some(k) = y.iter().position(|v| v.is_zero()) {
        let m = y.iter().position(|v| !v.is_zero()).ok_or(Error::ZeroVector)?;
        z[m] = f.conj(f.div(a, y[m]));
        z[k] = f.norm_root(f.sub(Fe::ONE, f.norm(z[m]))).expect("fixed value");
    } else if let Some((i, j)) = (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .find(|&(i, j)| f.add(f.norm(y[i]), f.norm(y[j])).is_zero())
    {
        // Tr(z_j w) = c is solved by z_j = c t / w with Tr(t) = 1
        let w = f.mul(a, f.conj(y[j]));
        let c = f.sub(f.norm(y[j]), Fe::ONE);
        z[j] = f.div(f.mul(c, f.trace_one()), w);
        z[i] = f.div(f.sub(f.conj(a), f.mul(z[j], f.conj(y[j]))), f.conj(y[i]));
    } else {
        if n < 3 {
            return Err(Error::Invalid("isotropic vector of length 2 with no cancelling pair".into()));
        }
        let mut u = vec![Fe::ZERO; n - 2];
        u[0] = f.conj(f.div(a, y[2]));
        let uu = dot(f, &u, &u);
        let ratio = f.add(f.div(f.norm(y[1]), f.norm(y[0])), Fe::ONE);
        z[1] = f.norm_root(f.div(f.sub(Fe::ONE, uu), ratio)).expect("fixed value");
        z[0] = f.neg(f.mul(z[1], f.conj(f.div(y[1], y[0]))));
        z[2..].copy_from_slice(&u);
    }
    if dot(f, &z, &z) != Fe::ONE || dot(f, &z, y) != a {
        return Err(Error::Invalid("unit partner construction failed".into()));
    }
    Ok(z)
}

/// Unitary `P` with `P (1, a, 0, ..) = y`.
fn isotropic_frame(f: &Field, y: &[Fe]) -> Result<Matrix> {
    let a = minus_one_norm(f);
    let z = unit_partner(f, y, a)?;
    let x1 = sub_vec(f, y, &scale_vec(f, a, &z));
    let cols = orthonormal_complete(f, &[x1, z], y.len())?;
    Matrix::from_columns(f, &cols)
}

fn check_vector(f: &Field, x: &[Fe], n: usize, what: &str) -> Result<()> {
    if x.len() != n {
        return Err(Error::DimensionMismatch(format!("{what} has length {}", x.len())));
    }
    if is_zero_vec(x) {
        return Err(Error::ZeroVector);
    }
    if !is_isotropic(f, x) {
        return Err(Error::Precondition(format!("{what} is not isotropic")));
    }
    Ok(())
}

/// Unitary `P` with `P x = y` for nonzero isotropic `x`, `y`.
pub fn transport_isotropic(f: &Field, x: &[Fe], y: &[Fe]) -> Result<TransportCertificate> {
    let n = x.len();
    check_vector(f, x, n, "x")?;
    check_vector(f, y, n, "y")?;
    let p1 = isotropic_frame(f, y)?;
    let p2 = isotropic_frame(f, x)?;
    let p = p1.mul(&p2.star())?;
    let checks = vec![Check::new("P*P = I", is_unitary(&p)), Check::new("Px = y", p.mul_vec(x)? == y)];
    Ok(TransportCertificate { p, scale: Fe::ONE, checks })
}

fn require(cert: TransportCertificate) -> Result<TransportCertificate> {
    if cert.holds() {
        Ok(cert)
    } else {
        Err(Error::Invalid("intermediate transporter failed its checks".into()))
    }
}

fn independent(f: &Field, x: &[Fe], y: &[Fe]) -> Result<bool> {
    Ok(Matrix::from_columns(f, &[x.to_vec(), y.to_vec()])?.rank() == 2)
}

/// `x1 = x2 = e1 + a e2`, `y1 = e3 + a e4`.
fn orthogonal_base(f: &Field, y2: &[Fe]) -> Result<(Matrix, Fe)> {
    let n = y2.len();
    let a = minus_one_norm(f);
    let ca = f.conj(a);
    let (u2, u) = (y2[1], &y2[2..]);
    let id2 = Matrix::identity(f, 2);
    if u2.is_zero() {
        let r = require(transport_isotropic(f, &standard_isotropic(f, n - 2), u)?)?;
        return Ok((id2.direct_sum(&r.p), Fe::ONE));
    }
    let inv_u2 = f.inv(u2).expect("nonzero");
    let mut src = vec![Fe::ZERO; n - 2];
    src[0] = ca;
    src[1] = Fe::ONE;
    let r = require(transport_isotropic(f, &src, &scale_vec(f, inv_u2, u))?)?;
    let d = f.trace_one();
    let cd = f.conj(d);
    let z = Fe::ZERO;
    let two = f.from_int(2);
    let rows = vec![
        vec![f.sub(two, d), f.mul(ca, cd), f.neg(ca), z],
        vec![f.mul(a, cd), d, Fe::ONE, z],
        vec![z, z, z, f.neg(f.mul(ca, ca))],
        vec![a, f.neg(Fe::ONE), Fe::ONE, z],
    ];
    let q = Matrix::from_rows(f, &rows)?.direct_sum(&Matrix::identity(f, n - 4));
    Ok((id2.direct_sum(&r.p).mul(&q)?, inv_u2))
}

/// `x1 = x2 = e1 + a e2`.
fn orthogonal_fixed_standard(f: &Field, y1: &[Fe], y2: &[Fe]) -> Result<(Matrix, Fe)> {
    let (p1, b1) = orthogonal_base(f, y1)?;
    let (p2, b2) = orthogonal_base(f, y2)?;
    Ok((p2.mul(&p1.star())?, f.div(b2, b1)))
}

/// `x1 = x2`.
fn orthogonal_fixed(f: &Field, x: &[Fe], y1: &[Fe], y2: &[Fe]) -> Result<(Matrix, Fe)> {
    let q = require(transport_isotropic(f, x, &standard_isotropic(f, x.len()))?)?.p;
    let (r, b) = orthogonal_fixed_standard(f, &q.mul_vec(y1)?, &q.mul_vec(y2)?)?;
    Ok((q.star().mul(&r)?.mul(&q)?, b))
}

fn pair_checks(p: &Matrix, b: Fe, x1: &[Fe], y1: &[Fe], x2: &[Fe], y2: &[Fe]) -> Result<Vec<Check>> {
    let f = p.field();
    Ok(vec![
        Check::new("P*P = I", is_unitary(p)),
        Check::new("Px1 = x2", p.mul_vec(x1)? == x2),
        Check::new("Py1 = b y2", p.mul_vec(y1)? == scale_vec(f, b, y2)),
        Check::new("b != 0", !b.is_zero()),
    ])
}

fn check_pair(f: &Field, x: &[Fe], y: &[Fe], n: usize, orthogonal: bool) -> Result<()> {
    check_vector(f, x, n, "x")?;
    check_vector(f, y, n, "y")?;
    if !independent(f, x, y)? {
        return Err(Error::Precondition("pair is linearly dependent".into()));
    }
    if dot(f, x, y).is_zero() != orthogonal {
        return Err(Error::Precondition(if orthogonal {
            "pair is not orthogonal".into()
        } else {
            "pair is orthogonal".into()
        }));
    }
    Ok(())
}

/// Unitary `P` and `b != 0` with `P x1 = x2`, `P y1 = b y2`, for pairs of
/// mutually orthogonal isotropic vectors (requires `n >= 4`).
pub fn transport_pair_orthogonal(
    f: &Field,
    x1: &[Fe],
    y1: &[Fe],
    x2: &[Fe],
    y2: &[Fe],
) -> Result<TransportCertificate> {
    let n = x1.len();
    if n < 4 {
        return Err(Error::Precondition("orthogonal isotropic pairs need n >= 4".into()));
    }
    check_pair(f, x1, y1, n, true)?;
    check_pair(f, x2, y2, n, true)?;
    let q = require(transport_isotropic(f, x1, x2)?)?.p;
    let (r, b) = orthogonal_fixed(f, x2, &q.mul_vec(y1)?, y2)?;
    let p = r.mul(&q)?;
    let checks = pair_checks(&p, b, x1, y1, x2, y2)?;
    Ok(TransportCertificate { p, scale: b, checks })
}

/// Orthonormal frame sending `u = e1 + a e2` and `v` to multiples of the
/// pair, with the frame columns `t1, t2` followed by a completion.
fn nonorthogonal_frame(f: &Field, a: Fe, x: &[Fe], y: &[Fe]) -> Result<(Matrix, Vec<Vec<Fe>>)> {
    let s = dot(f, x, y);
    let (t1, t2) = if f.p() != 2 {
        let half = f.inv(f.from_int(2)).expect("odd characteristic");
        let ca = f.conj(a);
        let inv_s = f.inv(s).expect("nonzero");
        (
            crate::hermat::combine(f, &[(half, x), (inv_s, y)]),
            crate::hermat::combine(f, &[(f.mul(ca, half), x), (f.neg(f.mul(ca, inv_s)), y)]),
        )
    } else {
        let den = f.inv(f.add(Fe::ONE, f.mul(a, a))).expect("a != 1");
        let tr = f.trace(a);
        let ys = f.div(den, s);
        (
            crate::hermat::combine(f, &[(f.mul(tr, den), x), (f.mul(a, ys), y)]),
            crate::hermat::combine(f, &[(f.mul(f.mul(a, tr), den), x), (ys, y)]),
        )
    };
    let frame = vec![t1, t2];
    let cols = orthonormal_complete(f, &frame, x.len())?;
    Ok((Matrix::from_columns(f, &cols)?, frame))
}

/// Unitary `P` with `P x1 = x2`, `P y1 = b y2`, `b = (x1* y1) / (x2* y2)`,
/// for pairs of isotropic vectors that are not orthogonal.
pub fn transport_pair_nonorthogonal(
    f: &Field,
    x1: &[Fe],
    y1: &[Fe],
    x2: &[Fe],
    y2: &[Fe],
) -> Result<TransportCertificate> {
    let n = x1.len();
    check_pair(f, x1, y1, n, false)?;
    check_pair(f, x2, y2, n, false)?;
    let a = f
        .norm_fiber(f.neg(Fe::ONE))
        .into_iter()
        .find(|&a| a != Fe::ONE)
        .expect("norm fibres have q + 1 elements");
    let (r1, frame1) = nonorthogonal_frame(f, a, x1, y1)?;
    let (r2, frame2) = nonorthogonal_frame(f, a, x2, y2)?;
    let p = r2.mul(&r1.star())?;
    let b = f.div(dot(f, x1, y1), dot(f, x2, y2));
    let mut checks = pair_checks(&p, b, x1, y1, x2, y2)?;
    checks.push(Check::new(
        "frame vectors orthonormal",
        is_orthonormal(f, &frame1) && is_orthonormal(f, &frame2),
    ));
    Ok(TransportCertificate { p, scale: b, checks })
}

/// Invertible `P` with `P A1 P* = A2` carrying the cliques of `A1` in
/// directions `x1`, `y1` onto those of `A2` in directions `x2`, `y2`.
/// The two pairs must be distinct `q`-cliques, orthogonal with respect to
/// `A_i^-1` in both cases or in neither.
pub fn transport_cliques(
    a1: &HermMatrix,
    x1: &[Fe],
    y1: &[Fe],
    a2: &HermMatrix,
    x2: &[Fe],
    y2: &[Fe],
) -> Result<TransportCertificate> {
    let f = a1.field();
    let mut reduced = Vec::new();
    let mut orth = Vec::new();
    for (a, x, y) in [(a1, x1, y1), (a2, x2, y2)] {
        let inv = a.inverse()?;
        for v in [x, y] {
            if is_zero_vec(v) {
                return Err(Error::ZeroVector);
            }
            if !inv.form(v, v).is_zero() {
                return Err(Error::Precondition("direction does not give a q-clique".into()));
            }
        }
        if ProjectivePoint::new(f, x)? == ProjectivePoint::new(f, y)? {
            return Err(Error::Precondition("cliques coincide".into()));
        }
        orth.push(inv.form(x, y).is_zero());
        // A = Q Q*, directions pulled back by Q^-1
        let q = congruence_diagonalize(a).p;
        let qi = q.inverse()?;
        reduced.push((q, qi.mul_vec(x)?, qi.mul_vec(y)?));
    }
    if orth[0] != orth[1] {
        return Err(Error::Precondition("one clique pair is orthogonal and the other is not".into()));
    }
    let (q1, z1, w1) = &reduced[0];
    let (q2, z2, w2) = &reduced[1];
    let inner = if orth[0] {
        transport_pair_orthogonal(f, z1, w1, z2, w2)?
    } else {
        transport_pair_nonorthogonal(f, z1, w1, z2, w2)?
    };
    let inner = require(inner)?;
    let p = q2.mul(&inner.p)?.mul(&q1.inverse()?)?;
    let image = |a: &HermMatrix, v: &[Fe]| -> Result<Vec<HermMatrix>> {
        crate::cliques::clique(a, v)?.members.iter().map(|m| m.congruence(&p)).collect()
    };
    let same_set = |mut xs: Vec<HermMatrix>, mut ys: Vec<HermMatrix>| {
        let key = |m: &HermMatrix| m.encode();
        xs.sort_by_key(key);
        ys.sort_by_key(key);
        xs == ys
    };
    let checks = vec![
        Check::new("P A1 P* = A2", a1.congruence(&p)? == *a2),
        Check::new("P l(x1) P* = l(x2)", same_set(image(a1, x1)?, crate::cliques::clique(a2, x2)?.members)),
        Check::new("P l(y1) P* = l(y2)", same_set(image(a1, y1)?, crate::cliques::clique(a2, y2)?.members)),
    ];
    Ok(TransportCertificate { p, scale: inner.scale, checks })
}

/// Uniform nonzero isotropic vector by rejection sampling. Needs `n >= 2`.
pub fn random_isotropic<R: Rng + ?Sized>(f: &Field, n: usize, rng: &mut R) -> Vec<Fe> {
    assert!(n >= 2, "no nonzero isotropic vectors of length {n}");
    loop {
        let x: Vec<Fe> = (0..n).map(|_| f.random(rng)).collect();
        if !is_zero_vec(&x) && is_isotropic(f, &x) {
            return x;
        }
    }
}

/// Independent isotropic `(x, y)` with `x* y = 0` exactly when `orthogonal`.
pub fn random_isotropic_pair<R: Rng + ?Sized>(
    f: &Field,
    n: usize,
    orthogonal: bool,
    rng: &mut R,
) -> Result<(Vec<Fe>, Vec<Fe>)> {
    let least = if orthogonal { 4 } else { 2 };
    if n < least {
        return Err(Error::Precondition(format!("such pairs need n >= {least}")));
    }
    loop {
        let x = random_isotropic(f, n, rng);
        let y = random_isotropic(f, n, rng);
        if independent(f, &x, &y)? && dot(f, &x, &y).is_zero() == orthogonal {
            return Ok((x, y));
        }
    }
}
