//! Explicit finite field towers `F_p ⊂ k = F_{p^e} ⊂ ℓ = F_{q^r}` (q = p^e).
//!
//! Both extensions are represented by monic irreducible moduli found by
//! deterministic search, so a tower is reproducible from `(p, e, r)` alone:
//! * elements of `k` are little-endian coefficient vectors over `F_p` modulo
//!   `modulus_k`;
//! * elements of `ℓ` are little-endian coefficient vectors over `k` modulo
//!   `modulus_l`, i.e. coordinates in the power basis `(1, β, …, β^{r-1})`.
//!
//! The Frobenius `Φ: a ↦ a^q` generates `Gal(ℓ/k)`; it is `k`-linear, so a
//! single table of basis images makes repeated applications cheap.

use thiserror::Error;

use crate::ring::CoeffRing;

/// Element of `k`, as `e` little-endian coefficients over `F_p`.
pub type KElem = Vec<u64>;
/// Element of `ℓ`, as `r` little-endian coordinates over `k`.
pub type LElem = Vec<KElem>;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GfError {
    #[error("invalid tower parameter: {0}")]
    InvalidParameter(String),
    #[error("zero has no norm preimage in the unit group")]
    NormPreimageOfZero,
    #[error("twist exponent {j} out of range for extension degree {r}")]
    InvalidExponent { j: usize, r: usize },
}

/// Cap on `q^r`; keeps exhaustive unit-group scans and brute-force
/// enumerations feasible.
pub const MAX_L_SIZE: u64 = 1 << 20;

// ---------------------------------------------------------------------------
// Polynomials over F_p (used only for the base modulus search).

fn poly_fp_trim(a: &mut Vec<u64>) {
    while a.last() == Some(&0) {
        a.pop();
    }
}

fn poly_fp_rem(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    // b is monic.
    let mut rem: Vec<u64> = a.to_vec();
    poly_fp_trim(&mut rem);
    let db = b.len() - 1;
    while rem.len() > db {
        let lead = *rem.last().unwrap();
        let shift = rem.len() - 1 - db;
        if lead != 0 {
            for (i, bc) in b.iter().enumerate() {
                let idx = i + shift;
                rem[idx] = (rem[idx] + p - (lead * bc) % p) % p;
            }
        }
        rem.pop();
        poly_fp_trim(&mut rem);
        if rem.len() <= db {
            break;
        }
    }
    rem
}

fn poly_fp_is_irreducible(f: &[u64], p: u64) -> bool {
    let deg = f.len() - 1;
    if deg == 1 {
        return true;
    }
    // Trial division by every monic polynomial of degree 1..=deg/2.
    for d in 1..=deg / 2 {
        let count = p.pow(d as u32);
        for idx in 0..count {
            let mut g = index_digits(idx, p, d);
            g.push(1);
            if poly_fp_rem(f, &g, p).is_empty() {
                return false;
            }
        }
    }
    true
}

fn index_digits(mut idx: u64, base: u64, len: usize) -> Vec<u64> {
    let mut out = Vec::with_capacity(len);
    for _ in 0..len {
        out.push(idx % base);
        idx /= base;
    }
    out
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

// ---------------------------------------------------------------------------
// Tower

/// The tower `F_p ⊂ k = F_{p^e} ⊂ ℓ = F_{q^r}` with fixed moduli, a fixed
/// multiplicative generator of `ℓ^×`, and precomputed Frobenius basis images.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FieldTower {
    pub p: u64,
    pub e: usize,
    pub r: usize,
    /// `q = p^e = |k|`.
    pub q: u64,
    /// `|ℓ| = q^r`.
    pub l_size: u64,
    /// Monic irreducible of degree `e` over `F_p`, little-endian, length `e+1`.
    pub modulus_k: Vec<u64>,
    /// Monic irreducible of degree `r` over `k`, little-endian, length `r+1`.
    pub modulus_l: Vec<KElem>,
    /// `x^{e+j} mod modulus_k` for `j = 0..e-1`.
    red_k: Vec<Vec<u64>>,
    /// `β^{r+j} mod modulus_l` for `j = 0..r-1`.
    red_l: Vec<LElem>,
    /// `Φ(β^i)` for `i = 0..r`.
    frob_basis: Vec<LElem>,
    /// Smallest-index generator of `ℓ^×`.
    pub generator: LElem,
    /// `norm(generator)`, a generator of `k^×`.
    norm_gen: KElem,
}

impl FieldTower {
    pub fn new(p: u64, e: usize, r: usize) -> Result<FieldTower, GfError> {
        if !is_prime(p) {
            return Err(GfError::InvalidParameter(format!("p = {p} is not prime")));
        }
        if e == 0 || r == 0 {
            return Err(GfError::InvalidParameter("e and r must be positive".into()));
        }
        let q = (p as u128).checked_pow(e as u32).filter(|&v| v <= MAX_L_SIZE as u128);
        let q = q.ok_or_else(|| GfError::InvalidParameter("q = p^e too large".into()))? as u64;
        let l_size = (q as u128).checked_pow(r as u32).filter(|&v| v <= MAX_L_SIZE as u128);
        let l_size =
            l_size.ok_or_else(|| GfError::InvalidParameter("q^r exceeds supported size".into()))?
                as u64;

        // Smallest monic irreducible of degree e over F_p, by constant-first
        // lexicographic enumeration of coefficient vectors.
        let mut modulus_k = None;
        for idx in 0..q {
            let mut f = index_digits(idx, p, e);
            f.push(1);
            if poly_fp_is_irreducible(&f, p) {
                modulus_k = Some(f);
                break;
            }
        }
        let modulus_k = modulus_k.expect("irreducible polynomials of every degree exist");

        let mut tower = FieldTower {
            p,
            e,
            r,
            q,
            l_size,
            modulus_k,
            modulus_l: Vec::new(),
            red_k: Vec::new(),
            red_l: Vec::new(),
            frob_basis: Vec::new(),
            generator: Vec::new(),
            norm_gen: Vec::new(),
        };
        tower.red_k = tower.build_red_k();

        // Smallest monic irreducible of degree r over k, same enumeration with
        // coefficients indexed little-endian base p.
        let mut modulus_l = None;
        for idx in 0..l_size {
            let digits = index_digits(idx, q, r);
            let mut f: Vec<KElem> = digits.into_iter().map(|d| tower.k_from_index(d)).collect();
            f.push(tower.k_one());
            if tower.poly_k_is_irreducible(&f) {
                modulus_l = Some(f);
                break;
            }
        }
        tower.modulus_l = modulus_l.expect("irreducible polynomials of every degree exist");
        tower.red_l = tower.build_red_l();

        tower.frob_basis = (0..r).map(|i| tower.l_pow(&tower.l_basis(i), q)).collect();

        let unit_count = l_size - 1;
        let factors = prime_factors(unit_count);
        let mut generator = None;
        for idx in 1..l_size {
            let a = tower.l_from_index(idx);
            if factors.iter().all(|&pf| !tower.l_is_one(&tower.l_pow(&a, unit_count / pf))) {
                generator = Some(a);
                break;
            }
        }
        tower.generator = generator.expect("the unit group of a finite field is cyclic");
        tower.norm_gen = tower.norm_to_k(&tower.norm(&tower.generator.clone()));
        Ok(tower)
    }

    // -- k arithmetic -------------------------------------------------------

    pub fn k_zero(&self) -> KElem {
        vec![0; self.e]
    }

    pub fn k_one(&self) -> KElem {
        let mut v = vec![0; self.e];
        v[0] = 1;
        v
    }

    pub fn k_from_u64(&self, c: u64) -> KElem {
        let mut v = vec![0; self.e];
        v[0] = c % self.p;
        v
    }

    pub fn k_is_zero(&self, a: &KElem) -> bool {
        a.iter().all(|&c| c == 0)
    }

    pub fn k_add(&self, a: &KElem, b: &KElem) -> KElem {
        a.iter().zip(b).map(|(&x, &y)| (x + y) % self.p).collect()
    }

    pub fn k_neg(&self, a: &KElem) -> KElem {
        a.iter().map(|&x| (self.p - x) % self.p).collect()
    }

    pub fn k_sub(&self, a: &KElem, b: &KElem) -> KElem {
        self.k_add(a, &self.k_neg(b))
    }

    pub fn k_mul(&self, a: &KElem, b: &KElem) -> KElem {
        let e = self.e;
        let p = self.p;
        let mut conv = vec![0u64; 2 * e - 1];
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                conv[i + j] = (conv[i + j] + x * y) % p;
            }
        }
        // Fold x^{e+j} tails through the precomputed reductions.
        let mut out: Vec<u64> = conv[..e].to_vec();
        for j in 0..e.saturating_sub(1) {
            let c = conv[e + j];
            if c != 0 {
                for (i, &rc) in self.red_k[j].iter().enumerate() {
                    out[i] = (out[i] + c * rc) % p;
                }
            }
        }
        out
    }

    pub fn k_pow(&self, a: &KElem, mut exp: u64) -> KElem {
        let mut base = a.clone();
        let mut acc = self.k_one();
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.k_mul(&acc, &base);
            }
            base = self.k_mul(&base, &base);
            exp >>= 1;
        }
        acc
    }

    pub fn k_inv(&self, a: &KElem) -> Option<KElem> {
        if self.k_is_zero(a) {
            return None;
        }
        Some(self.k_pow(a, self.q - 2))
    }

    pub fn k_index(&self, a: &KElem) -> u64 {
        let mut idx = 0;
        for &c in a.iter().rev() {
            idx = idx * self.p + c;
        }
        idx
    }

    pub fn k_from_index(&self, idx: u64) -> KElem {
        index_digits(idx, self.p, self.e)
    }

    // -- polynomials over k (modulus search only) ---------------------------

    fn poly_k_rem(&self, a: &[KElem], b: &[KElem]) -> Vec<KElem> {
        // b is monic.
        let mut rem: Vec<KElem> = a.to_vec();
        let trim = |v: &mut Vec<KElem>, tw: &FieldTower| {
            while v.last().map(|c| tw.k_is_zero(c)) == Some(true) {
                v.pop();
            }
        };
        trim(&mut rem, self);
        let db = b.len() - 1;
        while rem.len() > db {
            let lead = rem.last().unwrap().clone();
            let shift = rem.len() - 1 - db;
            if !self.k_is_zero(&lead) {
                for (i, bc) in b.iter().enumerate() {
                    let t = self.k_mul(&lead, bc);
                    rem[i + shift] = self.k_sub(&rem[i + shift], &t);
                }
            }
            rem.pop();
            trim(&mut rem, self);
        }
        rem
    }

    fn poly_k_is_irreducible(&self, f: &[KElem]) -> bool {
        let deg = f.len() - 1;
        if deg == 1 {
            return true;
        }
        for d in 1..=deg / 2 {
            let count = (self.q as u128).pow(d as u32) as u64;
            for idx in 0..count {
                let digits = index_digits(idx, self.q, d);
                let mut g: Vec<KElem> = digits.into_iter().map(|i| self.k_from_index(i)).collect();
                g.push(self.k_one());
                if self.poly_k_rem(f, &g).is_empty() {
                    return false;
                }
            }
        }
        true
    }

    fn build_red_k(&self) -> Vec<Vec<u64>> {
        let e = self.e;
        let p = self.p;
        if e == 1 {
            return Vec::new();
        }
        // x^e ≡ -(lower part of modulus_k).
        let base: Vec<u64> = self.modulus_k[..e].iter().map(|&c| (p - c) % p).collect();
        let mut out = vec![base];
        for _ in 1..e - 1 {
            let prev = out.last().unwrap();
            // Multiply by x, then reduce the overflowing top coefficient.
            let mut next = vec![0u64; e];
            for i in 0..e - 1 {
                next[i + 1] = prev[i];
            }
            let top = prev[e - 1];
            if top != 0 {
                for i in 0..e {
                    next[i] = (next[i] + top * out[0][i]) % p;
                }
            }
            out.push(next);
        }
        out
    }

    fn build_red_l(&self) -> Vec<LElem> {
        let r = self.r;
        if r == 1 {
            return Vec::new();
        }
        let base: LElem = self.modulus_l[..r].iter().map(|c| self.k_neg(c)).collect();
        let mut out = vec![base];
        for _ in 1..r - 1 {
            let prev = out.last().unwrap().clone();
            let mut next = vec![self.k_zero(); r];
            for i in 0..r - 1 {
                next[i + 1] = prev[i].clone();
            }
            let top = prev[r - 1].clone();
            if !self.k_is_zero(&top) {
                for i in 0..r {
                    let t = self.k_mul(&top, &out[0][i]);
                    next[i] = self.k_add(&next[i], &t);
                }
            }
            out.push(next);
        }
        out
    }

    // -- ℓ arithmetic -------------------------------------------------------

    pub fn l_zero(&self) -> LElem {
        vec![self.k_zero(); self.r]
    }

    pub fn l_one(&self) -> LElem {
        self.l_basis(0)
    }

    /// `β^i` for `0 <= i < r`.
    pub fn l_basis(&self, i: usize) -> LElem {
        let mut v = vec![self.k_zero(); self.r];
        v[i] = self.k_one();
        v
    }

    /// Embed `c ∈ k` into `ℓ`.
    pub fn l_from_k(&self, c: &KElem) -> LElem {
        let mut v = vec![self.k_zero(); self.r];
        v[0] = c.clone();
        v
    }

    pub fn l_is_zero(&self, a: &LElem) -> bool {
        a.iter().all(|c| self.k_is_zero(c))
    }

    pub fn l_is_one(&self, a: &LElem) -> bool {
        *a == self.l_one()
    }

    /// `Some(c)` iff `a` lies in the subfield `k`.
    pub fn l_to_k(&self, a: &LElem) -> Option<KElem> {
        if a[1..].iter().all(|c| self.k_is_zero(c)) {
            Some(a[0].clone())
        } else {
            None
        }
    }

    pub fn l_add(&self, a: &LElem, b: &LElem) -> LElem {
        a.iter().zip(b).map(|(x, y)| self.k_add(x, y)).collect()
    }

    pub fn l_neg(&self, a: &LElem) -> LElem {
        a.iter().map(|x| self.k_neg(x)).collect()
    }

    pub fn l_sub(&self, a: &LElem, b: &LElem) -> LElem {
        self.l_add(a, &self.l_neg(b))
    }

    pub fn l_scale_k(&self, c: &KElem, a: &LElem) -> LElem {
        a.iter().map(|x| self.k_mul(c, x)).collect()
    }

    pub fn l_mul(&self, a: &LElem, b: &LElem) -> LElem {
        let r = self.r;
        if r == 1 {
            return vec![self.k_mul(&a[0], &b[0])];
        }
        let mut conv = vec![self.k_zero(); 2 * r - 1];
        for (i, x) in a.iter().enumerate() {
            if self.k_is_zero(x) {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                let t = self.k_mul(x, y);
                conv[i + j] = self.k_add(&conv[i + j], &t);
            }
        }
        let mut out: Vec<KElem> = conv[..r].to_vec();
        for j in 0..r - 1 {
            let c = conv[r + j].clone();
            if !self.k_is_zero(&c) {
                for i in 0..r {
                    let t = self.k_mul(&c, &self.red_l[j][i]);
                    out[i] = self.k_add(&out[i], &t);
                }
            }
        }
        out
    }

    pub fn l_pow(&self, a: &LElem, mut exp: u64) -> LElem {
        let mut base = a.clone();
        let mut acc = self.l_one();
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.l_mul(&acc, &base);
            }
            base = self.l_mul(&base, &base);
            exp >>= 1;
        }
        acc
    }

    pub fn l_inv(&self, a: &LElem) -> Option<LElem> {
        if self.l_is_zero(a) {
            return None;
        }
        Some(self.l_pow(a, self.l_size - 2))
    }

    pub fn l_index(&self, a: &LElem) -> u64 {
        let mut idx = 0;
        for c in a.iter().rev() {
            idx = idx * self.q + self.k_index(c);
        }
        idx
    }

    pub fn l_from_index(&self, idx: u64) -> LElem {
        index_digits(idx, self.q, self.r).into_iter().map(|d| self.k_from_index(d)).collect()
    }

    // -- Galois structure ---------------------------------------------------

    /// `Φ^j(a) = a^{q^j}`; any `j ≥ 0` is accepted and reduced mod `r`.
    pub fn frobenius(&self, a: &LElem, j: usize) -> LElem {
        let mut out = a.clone();
        for _ in 0..(j % self.r) {
            let mut next = self.l_zero();
            for (i, c) in out.iter().enumerate() {
                if !self.k_is_zero(c) {
                    let t = self.l_scale_k(c, &self.frob_basis[i]);
                    next = self.l_add(&next, &t);
                }
            }
            out = next;
        }
        out
    }

    /// `N_{ℓ/k}(a) = a · Φ(a) ⋯ Φ^{r-1}(a)`, returned as an element of `ℓ`
    /// (it always lies in the subfield `k`).
    pub fn norm(&self, a: &LElem) -> LElem {
        let mut acc = a.clone();
        let mut cur = a.clone();
        for _ in 1..self.r {
            cur = self.frobenius(&cur, 1);
            acc = self.l_mul(&acc, &cur);
        }
        acc
    }

    /// Norm as an element of `k`; panics if the argument is not Φ-invariant
    /// (the norm always is).
    pub fn norm_to_k(&self, n: &LElem) -> KElem {
        self.l_to_k(n).expect("norms lie in the base field")
    }

    /// Smallest generator power `g^i` (by exponent `i ≥ 0`) whose norm is `c`.
    pub fn norm_preimage(&self, c: &KElem) -> Result<LElem, GfError> {
        if self.k_is_zero(c) {
            return Err(GfError::NormPreimageOfZero);
        }
        let mut pow = self.k_one();
        for i in 0..self.q - 1 {
            if pow == *c {
                return Ok(self.l_pow(&self.generator, i));
            }
            pow = self.k_mul(&pow, &self.norm_gen);
        }
        unreachable!("the norm of a finite field extension is surjective onto k^×");
    }

    /// Matrix over `k` (in the power basis) of the `k`-linear endomorphism
    /// `v ↦ a · Φ^j(v)` of `ℓ`; requires `0 <= j < r`.
    pub fn endo_matrix(&self, a: &LElem, j: usize) -> Result<MatK, GfError> {
        if j >= self.r {
            return Err(GfError::InvalidExponent { j, r: self.r });
        }
        let r = self.r;
        let mut m = MatK::zero(r, r, self);
        for col in 0..r {
            let w = self.l_mul(a, &self.frobenius(&self.l_basis(col), j));
            for (row, c) in w.into_iter().enumerate() {
                m.set(row, col, c);
            }
        }
        Ok(m)
    }
}

/// `(ℓ, Φ)` as a coefficient ring for Ore polynomials.
impl CoeffRing for FieldTower {
    type Elem = LElem;

    fn zero(&self) -> LElem {
        self.l_zero()
    }
    fn one(&self) -> LElem {
        self.l_one()
    }
    fn is_zero(&self, a: &LElem) -> bool {
        self.l_is_zero(a)
    }
    fn add(&self, a: &LElem, b: &LElem) -> LElem {
        self.l_add(a, b)
    }
    fn neg(&self, a: &LElem) -> LElem {
        self.l_neg(a)
    }
    fn mul(&self, a: &LElem, b: &LElem) -> LElem {
        self.l_mul(a, b)
    }
    fn phi(&self, a: &LElem) -> LElem {
        self.frobenius(a, 1)
    }
    fn inv(&self, a: &LElem) -> Option<LElem> {
        self.l_inv(a)
    }
}

// ---------------------------------------------------------------------------
// Matrices over k

/// Dense row-major matrix over `k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatK {
    pub rows: usize,
    pub cols: usize,
    data: Vec<KElem>,
}

impl MatK {
    pub fn zero(rows: usize, cols: usize, tw: &FieldTower) -> MatK {
        MatK { rows, cols, data: vec![tw.k_zero(); rows * cols] }
    }

    pub fn identity(n: usize, tw: &FieldTower) -> MatK {
        let mut m = MatK::zero(n, n, tw);
        for i in 0..n {
            m.set(i, i, tw.k_one());
        }
        m
    }

    pub fn get(&self, row: usize, col: usize) -> &KElem {
        &self.data[row * self.cols + col]
    }

    pub fn set(&mut self, row: usize, col: usize, v: KElem) {
        self.data[row * self.cols + col] = v;
    }

    pub fn add(&self, other: &MatK, tw: &FieldTower) -> MatK {
        assert!(self.rows == other.rows && self.cols == other.cols);
        MatK {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| tw.k_add(a, b)).collect(),
        }
    }

    pub fn mul(&self, other: &MatK, tw: &FieldTower) -> MatK {
        assert_eq!(self.cols, other.rows);
        let mut out = MatK::zero(self.rows, other.cols, tw);
        for i in 0..self.rows {
            for kk in 0..self.cols {
                let a = self.get(i, kk);
                if tw.k_is_zero(a) {
                    continue;
                }
                for j in 0..other.cols {
                    let t = tw.k_mul(a, other.get(kk, j));
                    let cur = tw.k_add(out.get(i, j), &t);
                    out.set(i, j, cur);
                }
            }
        }
        out
    }

    pub fn is_zero(&self, tw: &FieldTower) -> bool {
        self.data.iter().all(|c| tw.k_is_zero(c))
    }

    /// Row echelon reduction; returns (rank, det-if-square).
    fn eliminate(&self, tw: &FieldTower) -> (usize, Option<KElem>) {
        let mut m = self.clone();
        let mut rank = 0;
        let mut det = tw.k_one();
        let mut swaps = 0usize;
        for col in 0..m.cols {
            if rank == m.rows {
                break;
            }
            let pivot = (rank..m.rows).find(|&row| !tw.k_is_zero(m.get(row, col)));
            let Some(pivot) = pivot else {
                det = tw.k_zero();
                continue;
            };
            if pivot != rank {
                for c in 0..m.cols {
                    let a = m.get(rank, c).clone();
                    let b = m.get(pivot, c).clone();
                    m.set(rank, c, b);
                    m.set(pivot, c, a);
                }
                swaps += 1;
            }
            let lead = m.get(rank, col).clone();
            det = tw.k_mul(&det, &lead);
            let lead_inv = tw.k_inv(&lead).unwrap();
            for row in rank + 1..m.rows {
                let factor = tw.k_mul(m.get(row, col), &lead_inv);
                if tw.k_is_zero(&factor) {
                    continue;
                }
                for c in col..m.cols {
                    let t = tw.k_mul(&factor, m.get(rank, c));
                    let v = tw.k_sub(m.get(row, c), &t);
                    m.set(row, c, v);
                }
            }
            rank += 1;
        }
        if rank < m.rows.min(m.cols) {
            det = tw.k_zero();
        }
        if swaps % 2 == 1 {
            det = tw.k_neg(&det);
        }
        let det = if m.rows == m.cols { Some(det) } else { None };
        (rank, det)
    }

    pub fn rank(&self, tw: &FieldTower) -> usize {
        self.eliminate(tw).0
    }

    /// Dimension over `k` of the kernel of the column action.
    pub fn kernel_dim(&self, tw: &FieldTower) -> usize {
        self.cols - self.rank(tw)
    }

    pub fn det(&self, tw: &FieldTower) -> KElem {
        assert_eq!(self.rows, self.cols, "determinant of a non-square matrix");
        self.eliminate(tw).1.unwrap()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn rand_l(tw: &FieldTower, rng: &mut ChaCha8Rng) -> LElem {
        tw.l_from_index(rng.gen_range(0..tw.l_size))
    }

    #[test]
    fn deterministic_moduli() {
        let t = FieldTower::new(2, 1, 3).unwrap();
        let again = FieldTower::new(2, 1, 3).unwrap();
        assert_eq!(t, again);
    }

    #[test]
    fn f8_modulus_is_smallest() {
        let t = FieldTower::new(2, 1, 3).unwrap();
        let coeffs: Vec<u64> = t.modulus_l.iter().map(|c| t.k_index(c)).collect();
        assert_eq!(coeffs, vec![1, 1, 0, 1]);
    }

    #[test]
    fn f4_frobenius_matrix() {
        let t = FieldTower::new(2, 1, 2).unwrap();
        let coeffs: Vec<u64> = t.modulus_l.iter().map(|c| t.k_index(c)).collect();
        assert_eq!(coeffs, vec![1, 1, 1]); // y^2 + y + 1
        let m = t.endo_matrix(&t.l_one(), 1).unwrap();
        let as_ints: Vec<Vec<u64>> = (0..2)
            .map(|i| (0..2).map(|j| t.k_index(m.get(i, j))).collect())
            .collect();
        assert_eq!(as_ints, vec![vec![1, 1], vec![0, 1]]);
    }

    #[test]
    fn f9_generator_and_norm() {
        let t = FieldTower::new(3, 1, 2).unwrap();
        let coeffs: Vec<u64> = t.modulus_l.iter().map(|c| t.k_index(c)).collect();
        assert_eq!(coeffs, vec![1, 0, 1]); // y^2 + 1
        assert_eq!(t.l_index(&t.generator), 4); // 1 + β
        let n = t.norm_to_k(&t.norm(&t.generator.clone()));
        assert_eq!(t.k_index(&n), 2);
        // Exhaustive oracle: every unit's norm equals the (q^r-1)/(q-1) power.
        for idx in 1..t.l_size {
            let a = t.l_from_index(idx);
            let via_product = t.norm(&a);
            let via_power = t.l_pow(&a, (t.l_size - 1) / (t.q - 1));
            assert_eq!(via_product, via_power);
        }
        let pre = t.norm_preimage(&t.k_from_u64(2)).unwrap();
        assert_eq!(pre, t.generator);
        let pre1 = t.norm_preimage(&t.k_one()).unwrap();
        assert!(t.l_is_one(&pre1));
        assert_eq!(t.norm_preimage(&t.k_zero()), Err(GfError::NormPreimageOfZero));
    }

    #[test]
    fn fixed_field_has_q_elements() {
        for (p, e, r) in [(2, 1, 2), (3, 1, 2), (2, 2, 2), (2, 1, 4)] {
            let t = FieldTower::new(p, e, r).unwrap();
            let fixed = (0..t.l_size)
                .filter(|&idx| {
                    let a = t.l_from_index(idx);
                    t.frobenius(&a, 1) == a
                })
                .count() as u64;
            assert_eq!(fixed, t.q, "tower ({p},{e},{r})");
        }
    }

    #[test]
    fn frobenius_order_r() {
        for (p, e, r) in [(2, 1, 4), (3, 1, 3), (2, 2, 2)] {
            let t = FieldTower::new(p, e, r).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(11);
            for _ in 0..50 {
                let a = rand_l(&t, &mut rng);
                assert_eq!(t.frobenius(&a, r), a);
            }
            // Φ has exact order r: a generator is moved by every proper power.
            for j in 1..r {
                assert_ne!(t.frobenius(&t.generator.clone(), j), t.generator);
            }
        }
    }

    #[test]
    fn norm_surjective_with_uniform_fibers() {
        for (p, e, r) in [(2, 1, 2), (3, 1, 2), (2, 2, 2), (5, 1, 2), (2, 1, 4)] {
            let t = FieldTower::new(p, e, r).unwrap();
            let mut counts = vec![0u64; t.q as usize];
            for idx in 1..t.l_size {
                let n = t.norm_to_k(&t.norm(&t.l_from_index(idx)));
                counts[t.k_index(&n) as usize] += 1;
            }
            assert_eq!(counts[0], 0);
            let fiber = (t.l_size - 1) / (t.q - 1);
            for c in 1..t.q as usize {
                assert_eq!(counts[c], fiber, "tower ({p},{e},{r}), value {c}");
            }
        }
    }

    #[test]
    fn norm_preimage_minimality() {
        // The returned preimage is the smallest generator power with that norm.
        let t = FieldTower::new(2, 2, 2).unwrap();
        for cidx in 1..t.q {
            let c = t.k_from_index(cidx);
            let pre = t.norm_preimage(&c).unwrap();
            let mut pow = t.l_one();
            for _ in 0..t.l_size {
                if t.norm_to_k(&t.norm(&pow)) == c {
                    assert_eq!(pow, pre);
                    break;
                }
                pow = t.l_mul(&pow, &t.generator);
            }
        }
    }

    #[test]
    fn endo_matrix_composition_rule() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for (p, e, r) in [(2, 1, 3), (3, 1, 2), (2, 2, 2)] {
            let t = FieldTower::new(p, e, r).unwrap();
            for _ in 0..100 {
                let a = rand_l(&t, &mut rng);
                let b = rand_l(&t, &mut rng);
                let i = rng.gen_range(0..r);
                let j = rng.gen_range(0..r);
                let lhs = t.endo_matrix(&a, i).unwrap().mul(&t.endo_matrix(&b, j).unwrap(), &t);
                let prod = t.l_mul(&a, &t.frobenius(&b, i));
                let rhs = t.endo_matrix(&prod, (i + j) % r).unwrap();
                assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn endo_matrix_of_unit_is_invertible() {
        let t = FieldTower::new(5, 1, 2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let a = rand_l(&t, &mut rng);
            let j = rng.gen_range(0..t.r);
            let m = t.endo_matrix(&a, j).unwrap();
            if t.l_is_zero(&a) {
                assert!(m.is_zero(&t));
            } else {
                assert_eq!(m.rank(&t), t.r);
                assert_eq!(m.kernel_dim(&t), 0);
                assert!(!t.k_is_zero(&m.det(&t)));
            }
        }
    }

    #[test]
    fn invalid_twist_exponent() {
        let t = FieldTower::new(2, 1, 2).unwrap();
        assert_eq!(
            t.endo_matrix(&t.l_one(), 2).unwrap_err(),
            GfError::InvalidExponent { j: 2, r: 2 }
        );
    }

    #[test]
    fn rank_invariant_under_invertible_factors() {
        let t = FieldTower::new(3, 1, 3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..40 {
            let n = t.r;
            let mut a = MatK::zero(n, n, &t);
            for i in 0..n {
                for j in 0..n {
                    a.set(i, j, t.k_from_index(rng.gen_range(0..t.q)));
                }
            }
            // Random invertible factor by rejection on the determinant.
            let p_mat = loop {
                let mut m = MatK::zero(n, n, &t);
                for i in 0..n {
                    for j in 0..n {
                        m.set(i, j, t.k_from_index(rng.gen_range(0..t.q)));
                    }
                }
                if !t.k_is_zero(&m.det(&t)) {
                    break m;
                }
            };
            assert_eq!(a.rank(&t), a.mul(&p_mat, &t).rank(&t));
            assert_eq!(a.rank(&t), p_mat.mul(&a, &t).rank(&t));
        }
    }

    #[test]
    fn parameter_validation() {
        assert!(FieldTower::new(4, 1, 2).is_err());
        assert!(FieldTower::new(2, 0, 2).is_err());
        assert!(FieldTower::new(2, 1, 0).is_err());
        assert!(FieldTower::new(2, 21, 1).is_err());
    }
}
