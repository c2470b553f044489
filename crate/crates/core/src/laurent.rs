//! Local models: truncated Laurent series over a residue field `F_{q^d}` and
//! the product ring `L = L_0^m`, `L_0 = F_{q^d}((t))`, with the shift
//! Frobenius
//!
//! `Φ(a_1, …, a_m) = (Φ_0(a_m), a_1, …, a_{m-1})`
//!
//! where `Φ_0` is the coefficientwise `q`-power Frobenius. `Φ` has order
//! `r = m·d` and fixed ring `K = k((t))` embedded diagonally with constant
//! coefficients.
//!
//! Precision model: a series stores a coefficient window starting at its
//! leading exponent plus an absolute precision `prec`; every exponent below
//! `prec` is known (window entries, zero elsewhere), exponents `>= prec` are
//! unknown. Exact series use the [`PREC_EXACT`] sentinel, and exactness is
//! preserved by ring operations on exact inputs. Queries never guess: an
//! empty window at finite precision certifies only "valuation >= prec" and
//! makes dependent queries fail with [`LaurentError::PrecisionExhausted`].

use num_rational::Rational64;
use thiserror::Error;

use crate::gf::{FieldTower, KElem, LElem, MatK};
use crate::ore::QuotientElem;
use crate::ring::CoeffRing;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LaurentError {
    #[error("block index {j} out of range for {m} blocks")]
    IndexOutOfRange { j: usize, m: usize },
    #[error("precision insufficient to certify the result")]
    PrecisionExhausted,
    #[error("element has a pole (negative valuation) where integrality is required")]
    NotIntegral,
    #[error("operation requires the modulus x = 1")]
    ModulusNotOne,
}

/// Sentinel precision for exactly-known series (all omitted coefficients are
/// truly zero). Kept far from `i64::MAX` so precision arithmetic cannot
/// overflow.
pub const PREC_EXACT: i64 = i64::MAX / 4;

/// Default number of known coefficient slots introduced when an operation
/// (series inversion) leaves the exact world.
pub const DEFAULT_PREC: i64 = 64;

fn prec_add(p: i64, v: i64) -> i64 {
    if p >= PREC_EXACT || v >= PREC_EXACT {
        PREC_EXACT
    } else {
        p + v
    }
}

/// Truncated Laurent series with coefficients in the residue field `F_{q^d}`
/// (elements of the degree-`d` tower over `k`).
#[derive(Debug, Clone, PartialEq)]
pub struct LaurentSeries {
    /// Exponent of `coeffs[0]`; meaningless when the window is empty.
    pub val: i64,
    /// Coefficient window; first entry nonzero when nonempty.
    pub coeffs: Vec<LElem>,
    /// Absolute precision: exponents `>= prec` are unknown.
    pub prec: i64,
}

/// What a series window certifies about its valuation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum WindowState {
    Known(i64),
    ZeroBelow(i64),
    ExactZero,
}

impl LaurentSeries {
    pub fn zero() -> LaurentSeries {
        LaurentSeries { val: 0, coeffs: Vec::new(), prec: PREC_EXACT }
    }

    /// Zero at finite precision: certifies only "valuation >= prec".
    pub fn zero_at(prec: i64) -> LaurentSeries {
        LaurentSeries { val: 0, coeffs: Vec::new(), prec }
    }

    /// Exact series from explicit coefficients starting at exponent `val`.
    pub fn from_coeffs(tw: &FieldTower, val: i64, coeffs: Vec<LElem>) -> LaurentSeries {
        normalize(tw, val, coeffs, PREC_EXACT)
    }

    pub fn monomial(tw: &FieldTower, c: &LElem, val: i64) -> LaurentSeries {
        LaurentSeries::from_coeffs(tw, val, vec![c.clone()])
    }

    pub fn one(tw: &FieldTower) -> LaurentSeries {
        LaurentSeries::monomial(tw, &tw.l_one(), 0)
    }

    pub fn is_exact(&self) -> bool {
        self.prec >= PREC_EXACT
    }

    /// Coefficient at `exp`, provided `exp < prec` (known region).
    pub fn coeff_at(&self, tw: &FieldTower, exp: i64) -> LElem {
        if self.coeffs.is_empty() || exp < self.val || exp >= self.val + self.coeffs.len() as i64 {
            tw.l_zero()
        } else {
            self.coeffs[(exp - self.val) as usize].clone()
        }
    }

    fn state(&self) -> WindowState {
        if !self.coeffs.is_empty() {
            WindowState::Known(self.val)
        } else if self.is_exact() {
            WindowState::ExactZero
        } else {
            WindowState::ZeroBelow(self.prec)
        }
    }

    /// Valuation lower bound (PREC_EXACT for the exact zero).
    fn val_lb(&self) -> i64 {
        match self.state() {
            WindowState::Known(v) => v,
            WindowState::ZeroBelow(p) => p,
            WindowState::ExactZero => PREC_EXACT,
        }
    }

    /// Exact valuation as a certified answer: `Ok(None)` means "+infinity"
    /// (exact zero).
    pub fn valuation(&self) -> Result<Option<i64>, LaurentError> {
        match self.state() {
            WindowState::Known(v) => Ok(Some(v)),
            WindowState::ExactZero => Ok(None),
            WindowState::ZeroBelow(_) => Err(LaurentError::PrecisionExhausted),
        }
    }

    /// Reduce the known region to `prec` (test aid for precision semantics).
    pub fn truncate(&self, tw: &FieldTower, prec: i64) -> LaurentSeries {
        normalize(tw, self.val, self.coeffs.clone(), prec.min(self.prec))
    }
}

fn normalize(tw: &FieldTower, mut val: i64, mut coeffs: Vec<LElem>, prec: i64) -> LaurentSeries {
    if prec < PREC_EXACT {
        let keep = (prec - val).clamp(0, coeffs.len() as i64) as usize;
        coeffs.truncate(keep);
    }
    let lead = coeffs.iter().position(|c| !tw.l_is_zero(c));
    match lead {
        None => LaurentSeries { val: 0, coeffs: Vec::new(), prec },
        Some(i) => {
            coeffs.drain(..i);
            val += i as i64;
            while tw.l_is_zero(coeffs.last().unwrap()) {
                coeffs.pop();
            }
            LaurentSeries { val, coeffs, prec }
        }
    }
}

pub fn ls_add(tw: &FieldTower, a: &LaurentSeries, b: &LaurentSeries) -> LaurentSeries {
    let prec = a.prec.min(b.prec);
    let nonempty: Vec<&LaurentSeries> =
        [a, b].into_iter().filter(|s| !s.coeffs.is_empty()).collect();
    if nonempty.is_empty() {
        return LaurentSeries::zero_at(prec);
    }
    let lo = nonempty.iter().map(|s| s.val).min().unwrap();
    let hi = nonempty.iter().map(|s| s.val + s.coeffs.len() as i64).max().unwrap().min(prec);
    if hi <= lo {
        return LaurentSeries::zero_at(prec);
    }
    let coeffs = (lo..hi).map(|e| tw.l_add(&a.coeff_at(tw, e), &b.coeff_at(tw, e))).collect();
    normalize(tw, lo, coeffs, prec)
}

pub fn ls_neg(tw: &FieldTower, a: &LaurentSeries) -> LaurentSeries {
    LaurentSeries {
        val: a.val,
        coeffs: a.coeffs.iter().map(|c| tw.l_neg(c)).collect(),
        prec: a.prec,
    }
}

pub fn ls_mul(tw: &FieldTower, a: &LaurentSeries, b: &LaurentSeries) -> LaurentSeries {
    let prec = prec_add(a.prec, b.val_lb()).min(prec_add(b.prec, a.val_lb()));
    if a.coeffs.is_empty() || b.coeffs.is_empty() {
        return LaurentSeries::zero_at(prec);
    }
    let n = a.coeffs.len() + b.coeffs.len() - 1;
    let mut conv = vec![tw.l_zero(); n];
    for (i, x) in a.coeffs.iter().enumerate() {
        if tw.l_is_zero(x) {
            continue;
        }
        for (j, y) in b.coeffs.iter().enumerate() {
            let t = tw.l_mul(x, y);
            conv[i + j] = tw.l_add(&conv[i + j], &t);
        }
    }
    normalize(tw, a.val + b.val, conv, prec)
}

/// Multiplicative inverse. `None` when the window is empty (not certifiably a
/// unit). Exact monomials invert exactly; otherwise the result carries
/// `DEFAULT_PREC` known slots (or the input's relative precision).
pub fn ls_inv(tw: &FieldTower, a: &LaurentSeries) -> Option<LaurentSeries> {
    if a.coeffs.is_empty() {
        return None;
    }
    let c0_inv = tw.l_inv(&a.coeffs[0]).expect("leading window entry is nonzero");
    if a.is_exact() && a.coeffs.len() == 1 {
        return Some(LaurentSeries {
            val: -a.val,
            coeffs: vec![c0_inv],
            prec: PREC_EXACT,
        });
    }
    let relprec = if a.is_exact() { DEFAULT_PREC } else { (a.prec - a.val).max(1) };
    let rel = relprec as usize;
    let mut unit = vec![tw.l_zero(); rel];
    for (i, c) in a.coeffs.iter().enumerate() {
        if i < rel {
            unit[i] = c.clone();
        }
    }
    let mut w = vec![tw.l_zero(); rel];
    w[0] = c0_inv.clone();
    for n in 1..rel {
        let mut acc = tw.l_zero();
        for i in 1..=n {
            let t = tw.l_mul(&unit[i], &w[n - i]);
            acc = tw.l_add(&acc, &t);
        }
        w[n] = tw.l_neg(&tw.l_mul(&c0_inv, &acc));
    }
    Some(normalize(tw, -a.val, w, -a.val + relprec))
}

/// Coefficientwise `q`-power Frobenius `Φ_0`.
pub fn ls_phi0(tw: &FieldTower, a: &LaurentSeries) -> LaurentSeries {
    LaurentSeries {
        val: a.val,
        coeffs: a.coeffs.iter().map(|c| tw.frobenius(c, 1)).collect(),
        prec: a.prec,
    }
}

/// Series with coefficients from the base field `k` (diagonal-friendly).
pub fn ls_from_k_coeffs(tw: &FieldTower, val: i64, coeffs: &[KElem]) -> LaurentSeries {
    LaurentSeries::from_coeffs(tw, val, coeffs.iter().map(|c| tw.l_from_k(c)).collect())
}

// ---------------------------------------------------------------------------
// The product ring L = L_0^m

/// Context for `L = L_0^m` with `L_0 = F_{q^d}((t))`; `r = m·d`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProductRing {
    /// Tower `k ⊂ F_{q^d}` (its extension degree is `d`).
    pub tower: FieldTower,
    pub m: usize,
}

/// Element of `L`: one series per block.
pub type ProductElem = Vec<LaurentSeries>;

impl ProductRing {
    pub fn new(p: u64, e: usize, d: usize, m: usize) -> Result<ProductRing, crate::gf::GfError> {
        assert!(m > 0, "the product ring needs at least one block");
        Ok(ProductRing { tower: FieldTower::new(p, e, d)?, m })
    }

    pub fn d(&self) -> usize {
        self.tower.r
    }

    /// `r = m·d`, the order of the shift Frobenius.
    pub fn order(&self) -> usize {
        self.m * self.d()
    }

    /// Embed a single series diagonally into all blocks.
    pub fn diagonal(&self, s: &LaurentSeries) -> ProductElem {
        vec![s.clone(); self.m]
    }

    /// The constant `1` and `t`-monomials of `K` embedded diagonally.
    pub fn k_monomial(&self, c: &KElem, val: i64) -> ProductElem {
        self.diagonal(&ls_from_k_coeffs(&self.tower, val, std::slice::from_ref(c)))
    }
}

impl CoeffRing for ProductRing {
    type Elem = ProductElem;

    fn zero(&self) -> ProductElem {
        vec![LaurentSeries::zero(); self.m]
    }
    fn one(&self) -> ProductElem {
        vec![LaurentSeries::one(&self.tower); self.m]
    }
    fn is_zero(&self, a: &ProductElem) -> bool {
        a.iter().all(|s| s.coeffs.is_empty())
    }
    fn add(&self, a: &ProductElem, b: &ProductElem) -> ProductElem {
        a.iter().zip(b).map(|(x, y)| ls_add(&self.tower, x, y)).collect()
    }
    fn neg(&self, a: &ProductElem) -> ProductElem {
        a.iter().map(|x| ls_neg(&self.tower, x)).collect()
    }
    fn mul(&self, a: &ProductElem, b: &ProductElem) -> ProductElem {
        a.iter().zip(b).map(|(x, y)| ls_mul(&self.tower, x, y)).collect()
    }
    /// The shift Frobenius: rotate blocks, `Φ_0` on the wrapped one.
    fn phi(&self, a: &ProductElem) -> ProductElem {
        let m = self.m;
        let mut out = Vec::with_capacity(m);
        out.push(ls_phi0(&self.tower, &a[m - 1]));
        for block in &a[..m - 1] {
            out.push(block.clone());
        }
        out
    }
    fn inv(&self, a: &ProductElem) -> Option<ProductElem> {
        a.iter().map(|s| ls_inv(&self.tower, s)).collect()
    }
}

pub fn shift_frobenius(ring: &ProductRing, a: &ProductElem) -> ProductElem {
    ring.phi(a)
}

/// The `t`-adic valuation of block `j`: `Ok(None)` is "+infinity".
pub fn v_jt(
    ring: &ProductRing,
    a: &ProductElem,
    j: usize,
) -> Result<Option<i64>, LaurentError> {
    if j >= ring.m {
        return Err(LaurentError::IndexOutOfRange { j, m: ring.m });
    }
    a[j].valuation()
}

/// Quotient elements over the product ring: `L[T; Φ]/(T^r − x)` with
/// `x ∈ K^×` diagonal.
pub type LocalOre = QuotientElem<ProductRing>;

/// `v_t(x)` for the (diagonal, Φ-invariant) modulus of `f`.
fn modulus_valuation(f: &LocalOre) -> Result<i64, LaurentError> {
    match f.x[0].valuation()? {
        Some(v) => Ok(v),
        None => Err(LaurentError::PrecisionExhausted),
    }
}

/// Block-`j` weight `w_{j,x}(f) = min_i ( v_{j,t}(a_i) + i·v_t(x)/r )`,
/// certified against the precision of every contributing term; `Ok(None)` is
/// "+infinity" (block identically zero).
pub fn w_jx(
    ring: &ProductRing,
    f: &LocalOre,
    j: usize,
) -> Result<Option<Rational64>, LaurentError> {
    if j >= ring.m {
        return Err(LaurentError::IndexOutOfRange { j, m: ring.m });
    }
    let r = f.r() as i64;
    let rho = Rational64::new(modulus_valuation(f)?, r);
    let mut certain: Option<Rational64> = None;
    let mut unknown_lbs: Vec<Rational64> = Vec::new();
    for (i, coeff) in f.coeffs.iter().enumerate() {
        let shift = rho * Rational64::from_integer(i as i64);
        match coeff[j].state() {
            WindowState::Known(v) => {
                let term = Rational64::from_integer(v) + shift;
                certain = Some(match certain {
                    None => term,
                    Some(cur) => cur.min(term),
                });
            }
            WindowState::ZeroBelow(p) => {
                unknown_lbs.push(Rational64::from_integer(p) + shift);
            }
            WindowState::ExactZero => {}
        }
    }
    match certain {
        Some(min) => {
            if unknown_lbs.iter().any(|lb| *lb < min) {
                Err(LaurentError::PrecisionExhausted)
            } else {
                Ok(Some(min))
            }
        }
        None => {
            if unknown_lbs.is_empty() {
                Ok(None)
            } else {
                Err(LaurentError::PrecisionExhausted)
            }
        }
    }
}

/// Membership in the lattice `Λ = {f : w_{j,x}(f) >= 0 for all j}`. Decides
/// by sign only, so it can succeed where the exact minimum is uncertain.
pub fn in_lambda(ring: &ProductRing, f: &LocalOre) -> Result<bool, LaurentError> {
    let r = f.r() as i64;
    let rho = Rational64::new(modulus_valuation(f)?, r);
    let zero = Rational64::from_integer(0);
    let mut uncertain = false;
    for j in 0..ring.m {
        for (i, coeff) in f.coeffs.iter().enumerate() {
            let shift = rho * Rational64::from_integer(i as i64);
            match coeff[j].state() {
                WindowState::Known(v) => {
                    if Rational64::from_integer(v) + shift < zero {
                        return Ok(false);
                    }
                }
                WindowState::ZeroBelow(p) => {
                    if Rational64::from_integer(p) + shift < zero {
                        uncertain = true;
                    }
                }
                WindowState::ExactZero => {}
            }
        }
    }
    if uncertain {
        Err(LaurentError::PrecisionExhausted)
    } else {
        Ok(true)
    }
}

/// Residue of one block at `t = 0`; requires certainty below exponent 1.
fn block_residue(tw: &FieldTower, s: &LaurentSeries) -> Result<LElem, LaurentError> {
    match s.state() {
        WindowState::Known(v) => {
            if v < 0 {
                Err(LaurentError::NotIntegral)
            } else {
                Ok(s.coeff_at(tw, 0))
            }
        }
        WindowState::ExactZero => Ok(tw.l_zero()),
        WindowState::ZeroBelow(p) => {
            if p >= 1 {
                Ok(tw.l_zero())
            } else {
                Err(LaurentError::PrecisionExhausted)
            }
        }
    }
}

/// For `x = 1`: the matrix over `k` of the induced action of `f` on the
/// residue ring `O_L/tO_L ≅ (F_{q^d})^m` (a `k`-space of dimension `r`).
/// Basis: block-major, power basis of `F_{q^d}` inside each block.
pub fn epsilon_bar(ring: &ProductRing, f: &LocalOre) -> Result<MatK, LaurentError> {
    let tw = &ring.tower;
    if f.x != ring.one() {
        return Err(LaurentError::ModulusNotOne);
    }
    let m = ring.m;
    let d = ring.d();
    let r = f.r();

    // Reduce every coefficient to its residue vector.
    let mut residues: Vec<Vec<LElem>> = Vec::with_capacity(r);
    for coeff in &f.coeffs {
        residues.push(
            coeff.iter().map(|s| block_residue(tw, s)).collect::<Result<Vec<_>, _>>()?,
        );
    }

    // Residue-level shift Frobenius.
    let phibar = |v: &[LElem]| -> Vec<LElem> {
        let mut out = Vec::with_capacity(m);
        out.push(tw.frobenius(&v[m - 1], 1));
        for b in &v[..m - 1] {
            out.push(b.clone());
        }
        out
    };

    let mut mat = MatK::zero(r, r, tw);
    for j in 0..m {
        for b in 0..d {
            let col = j * d + b;
            // Basis vector e_{j,b}, pushed through Σ_i residues_i ⊙ Φ̄^i.
            let mut v = vec![tw.l_zero(); m];
            v[j] = tw.l_basis(b);
            let mut out = vec![tw.l_zero(); m];
            for res in &residues {
                for blk in 0..m {
                    let t = tw.l_mul(&res[blk], &v[blk]);
                    out[blk] = tw.l_add(&out[blk], &t);
                }
                v = phibar(&v);
            }
            for (blk, coords) in out.iter().enumerate() {
                for (i, c) in coords.iter().enumerate() {
                    mat.set(blk * d + i, col, c.clone());
                }
            }
        }
    }
    Ok(mat)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ore::quotient_mul;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn ring_221() -> ProductRing {
        // k = F_2, d = 2, m = 1: r = 2.
        ProductRing::new(2, 1, 2, 1).unwrap()
    }

    fn rand_exact_series(ring: &ProductRing, rng: &mut ChaCha8Rng) -> LaurentSeries {
        let tw = &ring.tower;
        let val = rng.gen_range(-2..=2);
        let coeffs = (0..rng.gen_range(1..=3))
            .map(|_| tw.l_from_index(rng.gen_range(0..tw.l_size)))
            .collect();
        LaurentSeries::from_coeffs(tw, val, coeffs)
    }

    #[test]
    fn series_arithmetic_exact() {
        let ring = ring_221();
        let tw = &ring.tower;
        let one = tw.l_one();
        // (1 + t)(1 + t) = 1 + t^2 in characteristic 2, exactly.
        let f = LaurentSeries::from_coeffs(tw, 0, vec![one.clone(), one.clone()]);
        let sq = ls_mul(tw, &f, &f);
        assert!(sq.is_exact());
        assert_eq!(sq.val, 0);
        assert_eq!(sq.coeffs, vec![one.clone(), tw.l_zero(), one.clone()]);
        // Adding the negation gives the exact zero.
        let z = ls_add(tw, &sq, &ls_neg(tw, &sq));
        assert!(z.coeffs.is_empty() && z.is_exact());
    }

    #[test]
    fn inversion_precision() {
        let ring = ring_221();
        let tw = &ring.tower;
        let one = tw.l_one();
        // Exact monomial: exact inverse.
        let t3 = LaurentSeries::monomial(tw, &one, 3);
        let inv = ls_inv(tw, &t3).unwrap();
        assert!(inv.is_exact());
        assert_eq!(inv.val, -3);
        // 1/(1 + t) = 1 + t + t^2 + … to DEFAULT_PREC slots.
        let f = LaurentSeries::from_coeffs(tw, 0, vec![one.clone(), one.clone()]);
        let g = ls_inv(tw, &f).unwrap();
        assert_eq!(g.prec, DEFAULT_PREC);
        assert_eq!(g.coeffs.len() as i64, DEFAULT_PREC);
        assert!(g.coeffs.iter().all(|c| tw.l_is_one(c)));
        // f · f^{-1} = 1 up to the tracked precision.
        let prod = ls_mul(tw, &f, &g);
        assert_eq!(prod.val, 0);
        assert!(prod.coeffs.iter().skip(1).all(|c| tw.l_is_zero(c)));
        assert_eq!(prod.prec, DEFAULT_PREC);
    }

    #[test]
    fn multiplication_tracks_precision_pessimistically() {
        let ring = ring_221();
        let tw = &ring.tower;
        let fuzzy = LaurentSeries::zero_at(5);
        let t3 = LaurentSeries::monomial(tw, &tw.l_one(), 3);
        let prod = ls_mul(tw, &fuzzy, &t3);
        assert!(prod.coeffs.is_empty());
        assert_eq!(prod.prec, 8);
        assert_eq!(prod.valuation(), Err(LaurentError::PrecisionExhausted));
    }

    #[test]
    fn shift_frobenius_order_and_fixed_points() {
        // m = 3, d = 2 over F_3: order r = 6.
        let ring = ProductRing::new(3, 1, 2, 3).unwrap();
        let tw = &ring.tower;
        let mut rng = ChaCha8Rng::seed_from_u64(91);
        for _ in 0..20 {
            let a: ProductElem = (0..ring.m).map(|_| rand_exact_series(&ring, &mut rng)).collect();
            let mut cur = a.clone();
            for _ in 0..ring.order() {
                cur = shift_frobenius(&ring, &cur);
            }
            assert_eq!(cur, a);
        }
        // Diagonal series with k-coefficients are fixed.
        let diag = ring.k_monomial(&tw.k_from_u64(2), -1);
        assert_eq!(shift_frobenius(&ring, &diag), diag);
        // A diagonal with residue-field (non-k) coefficients is moved by Φ^m.
        let gen_diag = ring.diagonal(&LaurentSeries::monomial(tw, &tw.generator.clone(), 0));
        let mut cur = gen_diag.clone();
        for _ in 0..ring.m {
            cur = shift_frobenius(&ring, &cur);
        }
        assert_ne!(cur, gen_diag);
    }

    #[test]
    fn w_weight_worked_example() {
        // m = 1, d = 2, f = a·T with v(a) = 0 and v_t(x) = 1: w = 1/2.
        let ring = ring_221();
        let tw = &ring.tower;
        let x = ring.k_monomial(&tw.k_one(), 1); // x = t
        let a = ring.diagonal(&LaurentSeries::one(tw));
        let f = QuotientElem::new(&ring, vec![ring.zero(), a], x).unwrap();
        assert_eq!(w_jx(&ring, &f, 0).unwrap(), Some(Rational64::new(1, 2)));
        assert_eq!(v_jt(&ring, &f.coeffs[1], 0).unwrap(), Some(0));
        // The zero element has weight +infinity.
        let zero = QuotientElem::zero(&ring, 2, f.x.clone());
        assert_eq!(w_jx(&ring, &zero, 0).unwrap(), None);
        assert!(in_lambda(&ring, &f).unwrap());
    }

    #[test]
    fn w_weight_precision_exhaustion() {
        let ring = ring_221();
        let tw = &ring.tower;
        let x = ring.k_monomial(&tw.k_one(), 1);
        // A window-empty block at precision 0 could hide a negative-free term
        // below the certain minimum 1/2.
        let fuzzy = vec![LaurentSeries::zero_at(0)];
        let a = ring.diagonal(&LaurentSeries::one(tw));
        let f = QuotientElem::new(&ring, vec![fuzzy, a], x).unwrap();
        assert_eq!(w_jx(&ring, &f, 0), Err(LaurentError::PrecisionExhausted));
        // But raising the uncertain bound above the certain minimum decides it.
        let fuzzy_high = vec![LaurentSeries::zero_at(7)];
        let g = QuotientElem::new(&ring, vec![fuzzy_high, ring.diagonal(&LaurentSeries::one(&ring.tower))], f.x.clone()).unwrap();
        assert_eq!(w_jx(&ring, &g, 0).unwrap(), Some(Rational64::new(1, 2)));
    }

    #[test]
    fn index_bounds_checked() {
        let ring = ring_221();
        let a = ring.one();
        assert_eq!(
            v_jt(&ring, &a, 1).unwrap_err(),
            LaurentError::IndexOutOfRange { j: 1, m: 1 }
        );
    }

    #[test]
    fn epsilon_bar_of_t_is_frobenius() {
        // m = 1: the residue action of T is the Frobenius matrix over k.
        let ring = ring_221();
        let tw = &ring.tower;
        let one = ring.one();
        let f = QuotientElem::t_power(&ring, 1, 2, one);
        let mat = epsilon_bar(&ring, &f).unwrap();
        assert_eq!(mat, tw.endo_matrix(&tw.l_one(), 1).unwrap());
    }

    #[test]
    fn epsilon_bar_is_multiplicative() {
        for (m, d) in [(1, 2), (2, 1), (2, 2), (3, 1)] {
            let ring = ProductRing::new(2, 1, d, m).unwrap();
            let r = ring.order();
            let one = ring.one();
            let mut rng = ChaCha8Rng::seed_from_u64(101 + (m * 10 + d) as u64);
            for _ in 0..25 {
                let mk = |rng: &mut ChaCha8Rng| -> LocalOre {
                    let coeffs = (0..r)
                        .map(|_| {
                            (0..ring.m)
                                .map(|_| {
                                    // Integral series so the residue action exists.
                                    let tw = &ring.tower;
                                    let coeffs = (0..2)
                                        .map(|_| tw.l_from_index(rng.gen_range(0..tw.l_size)))
                                        .collect();
                                    LaurentSeries::from_coeffs(tw, rng.gen_range(0..=1), coeffs)
                                })
                                .collect()
                        })
                        .collect();
                    QuotientElem::new(&ring, coeffs, one.clone()).unwrap()
                };
                let f = mk(&mut rng);
                let g = mk(&mut rng);
                let ef = epsilon_bar(&ring, &f).unwrap();
                let eg = epsilon_bar(&ring, &g).unwrap();
                let efg = epsilon_bar(&ring, &quotient_mul(&ring, &f, &g).unwrap()).unwrap();
                assert_eq!(ef.mul(&eg, &ring.tower), efg);
            }
        }
    }

    #[test]
    fn epsilon_bar_rejects_poles_and_nonunit_modulus() {
        let ring = ring_221();
        let tw = &ring.tower;
        let one = ring.one();
        let pole = ring.diagonal(&LaurentSeries::monomial(tw, &tw.l_one(), -1));
        let f = QuotientElem::new(&ring, vec![pole, ring.zero()], one).unwrap();
        assert_eq!(epsilon_bar(&ring, &f), Err(LaurentError::NotIntegral));
        let x = ring.k_monomial(&tw.k_one(), 1);
        let g = QuotientElem::t_power(&ring, 1, 2, x);
        assert_eq!(epsilon_bar(&ring, &g), Err(LaurentError::ModulusNotOne));
    }
}
