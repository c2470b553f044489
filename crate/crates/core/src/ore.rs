//! Ore polynomials `L[T; Φ]` (twist rule `T·a = Φ(a)·T`) and the quotient
//! algebras `L[T; Φ]/(T^r − x)` for a central `x` (`Φ(x) = x`).
//!
//! The reduced norm of a quotient element is the determinant of the matrix of
//! right multiplication in the basis `(1, T, …, T^{r-1})`; it is computed by a
//! division-free determinant so the same path works over fields, truncated
//! Laurent products, and curve coordinate rings.

use thiserror::Error;

use crate::gf::{FieldTower, MatK};
use crate::ring::{det_berkowitz, CoeffRing};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum OreError {
    #[error("operands live over different coefficient rings")]
    MixedRings,
    #[error("operands have different quotient moduli")]
    MixedModuli,
    #[error("modulus element x is not central (Φ(x) != x)")]
    NotCentral,
    #[error("twisting element u is not invertible")]
    NonInvertibleU,
    #[error("operation requires the modulus x = 1")]
    ModulusNotOne,
}

/// Ore polynomial, little-endian in `T`; no trailing zero coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct OrePoly<R: CoeffRing> {
    pub coeffs: Vec<R::Elem>,
}

impl<R: CoeffRing> OrePoly<R> {
    pub fn new(ring: &R, mut coeffs: Vec<R::Elem>) -> OrePoly<R> {
        while coeffs.last().map(|c| ring.is_zero(c)) == Some(true) {
            coeffs.pop();
        }
        OrePoly { coeffs }
    }

    pub fn zero() -> OrePoly<R> {
        OrePoly { coeffs: Vec::new() }
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn add(&self, ring: &R, other: &OrePoly<R>) -> OrePoly<R> {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            let a = self.coeffs.get(i);
            let b = other.coeffs.get(i);
            out.push(match (a, b) {
                (Some(a), Some(b)) => ring.add(a, b),
                (Some(a), None) => a.clone(),
                (None, Some(b)) => b.clone(),
                (None, None) => unreachable!(),
            });
        }
        OrePoly::new(ring, out)
    }
}

/// `(Σ a_i T^i)(Σ b_j T^j) = Σ a_i Φ^i(b_j) T^{i+j}`.
pub fn ore_mul<R: CoeffRing>(ring: &R, f: &OrePoly<R>, g: &OrePoly<R>) -> OrePoly<R> {
    if f.is_zero() || g.is_zero() {
        return OrePoly::zero();
    }
    let n = f.coeffs.len() + g.coeffs.len() - 1;
    let mut out = vec![ring.zero(); n];
    for (i, a) in f.coeffs.iter().enumerate() {
        if ring.is_zero(a) {
            continue;
        }
        // Φ^i(g_j), advanced incrementally in i below would re-twist g for
        // every i; with the small degrees in play direct phi_pow is fine.
        for (j, b) in g.coeffs.iter().enumerate() {
            let t = ring.mul(a, &ring.phi_pow(b, i));
            out[i + j] = ring.add(&out[i + j], &t);
        }
    }
    OrePoly::new(ring, out)
}

/// Element of `L[T; Φ]/(T^r − x)`, stored as exactly `r` coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct QuotientElem<R: CoeffRing> {
    pub coeffs: Vec<R::Elem>,
    pub x: R::Elem,
}

impl<R: CoeffRing> QuotientElem<R> {
    /// Wraps `r` coefficients; rejects non-central moduli.
    pub fn new(ring: &R, coeffs: Vec<R::Elem>, x: R::Elem) -> Result<QuotientElem<R>, OreError> {
        assert!(!coeffs.is_empty(), "quotient degree r must be positive");
        if ring.phi(&x) != x {
            return Err(OreError::NotCentral);
        }
        Ok(QuotientElem { coeffs, x })
    }

    pub fn r(&self) -> usize {
        self.coeffs.len()
    }

    pub fn zero(ring: &R, r: usize, x: R::Elem) -> QuotientElem<R> {
        QuotientElem { coeffs: vec![ring.zero(); r], x }
    }

    pub fn scalar(ring: &R, a: R::Elem, r: usize, x: R::Elem) -> QuotientElem<R> {
        let mut coeffs = vec![ring.zero(); r];
        coeffs[0] = a;
        QuotientElem { coeffs, x }
    }

    /// The class of `T^i` (`0 <= i < r`).
    pub fn t_power(ring: &R, i: usize, r: usize, x: R::Elem) -> QuotientElem<R> {
        let mut coeffs = vec![ring.zero(); r];
        coeffs[i] = ring.one();
        QuotientElem { coeffs, x }
    }

    /// Reduce an Ore polynomial using `T^{r+i} ↦ x·T^i` (no twist: `x` is
    /// central and Φ-invariant).
    pub fn from_ore(ring: &R, poly: &OrePoly<R>, r: usize, x: R::Elem) -> QuotientElem<R> {
        let mut work = poly.coeffs.clone();
        let mut d = work.len();
        while d > r {
            d -= 1;
            let c = work[d].clone();
            if !ring.is_zero(&c) {
                let t = ring.mul(&c, &x);
                work[d - r] = ring.add(&work[d - r], &t);
            }
        }
        work.resize(r, ring.zero());
        QuotientElem { coeffs: work, x }
    }

    pub fn is_zero(&self, ring: &R) -> bool {
        self.coeffs.iter().all(|c| ring.is_zero(c))
    }

    pub fn add(&self, ring: &R, other: &QuotientElem<R>) -> Result<QuotientElem<R>, OreError> {
        check_compat(self, other)?;
        let coeffs =
            self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| ring.add(a, b)).collect();
        Ok(QuotientElem { coeffs, x: self.x.clone() })
    }

    pub fn sub(&self, ring: &R, other: &QuotientElem<R>) -> Result<QuotientElem<R>, OreError> {
        check_compat(self, other)?;
        let coeffs =
            self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| ring.sub(a, b)).collect();
        Ok(QuotientElem { coeffs, x: self.x.clone() })
    }

    /// Left multiplication by a degree-0 scalar.
    pub fn scale(&self, ring: &R, a: &R::Elem) -> QuotientElem<R> {
        QuotientElem {
            coeffs: self.coeffs.iter().map(|c| ring.mul(a, c)).collect(),
            x: self.x.clone(),
        }
    }
}

fn check_compat<R: CoeffRing>(a: &QuotientElem<R>, b: &QuotientElem<R>) -> Result<(), OreError> {
    if a.r() != b.r() {
        return Err(OreError::MixedRings);
    }
    if a.x != b.x {
        return Err(OreError::MixedModuli);
    }
    Ok(())
}

/// Product in the quotient: Ore product followed by `T^{r+i} ↦ x·T^i`.
pub fn quotient_mul<R: CoeffRing>(
    ring: &R,
    f: &QuotientElem<R>,
    g: &QuotientElem<R>,
) -> Result<QuotientElem<R>, OreError> {
    check_compat(f, g)?;
    let fp = OrePoly::new(ring, f.coeffs.clone());
    let gp = OrePoly::new(ring, g.coeffs.clone());
    let prod = ore_mul(ring, &fp, &gp);
    Ok(QuotientElem::from_ore(ring, &prod, f.r(), f.x.clone()))
}

/// Matrix of right multiplication `g ↦ g·f` in the basis `(1, T, …, T^{r-1})`
/// (row `u`, column `v`, 0-based):
/// `m[u][v] = Φ^v(a_{u-v})` for `u >= v`, else `x·Φ^v(a_{u-v+r})`.
pub fn nrd_matrix<R: CoeffRing>(ring: &R, f: &QuotientElem<R>) -> Vec<Vec<R::Elem>> {
    let r = f.r();
    let mut m = Vec::with_capacity(r);
    for u in 0..r {
        let mut row = Vec::with_capacity(r);
        for v in 0..r {
            let entry = if u >= v {
                ring.phi_pow(&f.coeffs[u - v], v)
            } else {
                ring.mul(&f.x, &ring.phi_pow(&f.coeffs[u + r - v], v))
            };
            row.push(entry);
        }
        m.push(row);
    }
    m
}

/// Reduced norm: determinant of [`nrd_matrix`]. Always Φ-invariant.
pub fn nrd<R: CoeffRing>(ring: &R, f: &QuotientElem<R>) -> R::Elem {
    det_berkowitz(ring, &nrd_matrix(ring, f))
}

/// The isomorphism `T ↦ u·T` onto the quotient with modulus `N(u)^{-1}·x`,
/// where `N(u) = u·Φ(u)⋯Φ^{r-1}(u)`. Coefficientwise:
/// `a_i T^i ↦ a_i · u·Φ(u)⋯Φ^{i-1}(u) · T^i`.
pub fn gamma_u<R: CoeffRing>(
    ring: &R,
    f: &QuotientElem<R>,
    u: &R::Elem,
) -> Result<QuotientElem<R>, OreError> {
    let r = f.r();
    let mut norm_u = u.clone();
    let mut cur = u.clone();
    for _ in 1..r {
        cur = ring.phi(&cur);
        norm_u = ring.mul(&norm_u, &cur);
    }
    let norm_inv = ring.inv(&norm_u).ok_or(OreError::NonInvertibleU)?;
    let new_x = ring.mul(&norm_inv, &f.x);

    let mut coeffs = Vec::with_capacity(r);
    let mut prefix = ring.one(); // u·Φ(u)⋯Φ^{i-1}(u)
    for (i, a) in f.coeffs.iter().enumerate() {
        if i > 0 {
            prefix = ring.mul(&prefix, &ring.phi_pow(u, i - 1));
        }
        coeffs.push(ring.mul(a, &prefix));
    }
    Ok(QuotientElem { coeffs, x: new_x })
}

/// For tower coefficients and modulus `x = 1`: the matrix over `k` of the
/// endomorphism `Σ a_i Φ^i` of `ℓ`, i.e. the image of `f` under `T ↦ Φ`.
pub fn epsilon(tower: &FieldTower, f: &QuotientElem<FieldTower>) -> Result<MatK, OreError> {
    if !tower.l_is_one(&f.x) {
        return Err(OreError::ModulusNotOne);
    }
    if f.r() != tower.r {
        return Err(OreError::MixedRings);
    }
    let mut out = MatK::zero(tower.r, tower.r, tower);
    for (i, a) in f.coeffs.iter().enumerate() {
        let m = tower.endo_matrix(a, i).expect("0 <= i < r by construction");
        out = out.add(&m, tower);
    }
    Ok(out)
}
