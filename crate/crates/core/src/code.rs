//! Evaluation codes in the sum-rank metric: elements of the lattice basis
//! are evaluated place-by-place into `k`-endomorphisms of `ℓ`, giving
//! `ℓ`-linear codes whose codewords are tuples of `r×r` matrices over `k`.
//!
//! For a basis element `φ·T^i` and an evaluation place `pl_j` with norm
//! lift `ū_j` (so `N(ū_j) = x(pl_j)`), the `j`-th block is the matrix of
//! `v ↦ φ(pl_j)·ū_j·Φ(ū_j)⋯Φ^{i−1}(ū_j)·Φ^i(v)`.
//!
//! The module also provides sum-rank weights and distances, a brute-force
//! minimum-distance search over projective message classes, restriction to
//! subspaces of the per-place domains, a parameter report, and a
//! deterministic JSON descriptor round-trip.

use num_rational::Rational64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::curve::{
    check_h1, check_h2, choose_x, dim_bound, lambda_basis, CurveError, CurveFunction, CurveKind,
    CurveModel, LambdaBasis, Monomial, Place, XFunction,
};
use crate::gf::{FieldTower, GfError, KElem, LElem, MatK};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CodeError {
    #[error("only {s} evaluation places for r = {r}, m = {m}: need s·r > m")]
    TooFewPlaces { s: usize, r: usize, m: u64 },
    #[error("hypothesis violated: {0}")]
    HypothesisFailed(String),
    #[error("expected {expected} entries, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("codeword shapes are incompatible")]
    ShapeMismatch,
    #[error("{classes} projective classes exceed the enumeration cap {cap}")]
    EnumerationTooLarge { classes: u128, cap: u64 },
    #[error("subspace dimension {w} at place {index} is outside 1..={r}")]
    InvalidSubspaceDim { index: usize, w: usize, r: usize },
    #[error("bad descriptor: {0}")]
    BadDescriptor(String),
    #[error(transparent)]
    Field(#[from] GfError),
    #[error(transparent)]
    Curve(#[from] CurveError),
}

/// Default cap on the number of projective classes brute force will visit.
pub const DEFAULT_ENUM_CAP: u64 = 1 << 24;

/// One codeword: per place, the matrix of a `k`-endomorphism (columns may
/// be fewer than `r` for restricted codes).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Codeword {
    pub blocks: Vec<MatK>,
}

impl Codeword {
    pub fn weight(&self, tw: &FieldTower) -> usize {
        self.blocks.iter().map(|b| b.rank(tw)).sum()
    }

    fn same_shape(&self, other: &Codeword) -> bool {
        self.blocks.len() == other.blocks.len()
            && self
                .blocks
                .iter()
                .zip(&other.blocks)
                .all(|(a, b)| a.rows == b.rows && a.cols == b.cols)
    }

    pub fn add(&self, other: &Codeword, tw: &FieldTower) -> Result<Codeword, CodeError> {
        if !self.same_shape(other) {
            return Err(CodeError::ShapeMismatch);
        }
        Ok(Codeword {
            blocks: self.blocks.iter().zip(&other.blocks).map(|(a, b)| a.add(b, tw)).collect(),
        })
    }

    /// Left action of `λ ∈ ℓ`: compose every block with multiplication by λ.
    pub fn scale(&self, lambda: &LElem, tw: &FieldTower) -> Result<Codeword, CodeError> {
        let mul = tw.endo_matrix(lambda, 0)?;
        Ok(Codeword { blocks: self.blocks.iter().map(|b| mul.mul(b, tw)).collect() })
    }
}

pub fn sumrank_weight(tw: &FieldTower, c: &Codeword) -> usize {
    c.weight(tw)
}

pub fn sumrank_distance(
    tw: &FieldTower,
    a: &Codeword,
    b: &Codeword,
) -> Result<usize, CodeError> {
    if !a.same_shape(b) {
        return Err(CodeError::ShapeMismatch);
    }
    let mut total = 0;
    for (x, y) in a.blocks.iter().zip(&b.blocks) {
        let mut diff = MatK::zero(x.rows, x.cols, tw);
        for i in 0..x.rows {
            for j in 0..x.cols {
                diff.set(i, j, tw.k_sub(x.get(i, j), y.get(i, j)));
            }
        }
        total += diff.rank(tw);
    }
    Ok(total)
}

/// Parameters of a constructed code; `n` counts `k`-dimensions of the
/// ambient space, `n_l` its length in `ℓ`-units (`Σ w_j`).
#[derive(Debug, Clone, PartialEq)]
pub struct ParameterReport {
    pub n: usize,
    pub n_l: usize,
    pub kappa_l: usize,
    /// Rational lower bound for the ℓ-dimension of the full lattice.
    pub kappa_l_lower: Rational64,
    /// Guaranteed minimum distance: `n_l − m`.
    pub d_lower: i64,
    pub d_upper_singleton: i64,
    /// Guaranteed bound on the Singleton defect:
    /// `n_l + 1 − κ_l − d_lower` (0 characterizes provably MSRD codes).
    pub defect_bound: Rational64,
    pub d_exact: Option<usize>,
    /// True when the generator basis provably spans the full lattice.
    pub exact_lambda: bool,
}

#[derive(Debug, Clone)]
pub struct LinearizedAGCode {
    /// Tower `k ⊂ ℓ = F_{q^r}` carrying the twist Φ.
    pub tower: FieldTower,
    pub curve: CurveModel,
    pub x: XFunction,
    pub m: u64,
    /// Affine coordinates of the evaluation places, canonical order.
    pub places: Vec<Vec<KElem>>,
    /// `ū_j` with `N(ū_j) = x(pl_j)`, smallest generator powers.
    pub norm_lifts: Vec<LElem>,
    pub lambda: LambdaBasis,
    /// Flattened basis `(φ, i)` in increasing twist degree.
    pub basis_elems: Vec<(CurveFunction, usize)>,
    /// One codeword per basis element.
    pub generators: Vec<Codeword>,
    /// Per-place domain dimension (`r` everywhere unless restricted).
    pub col_dims: Vec<usize>,
    pub d_exact: Option<usize>,
}

impl LinearizedAGCode {
    /// Canonical construction: choose `x`, evaluate at every rational place
    /// where `x` is a nonzero constant (truncated to `max_s`).
    pub fn construct(
        curve: CurveModel,
        r: usize,
        m: u64,
        max_s: Option<usize>,
    ) -> Result<LinearizedAGCode, CodeError> {
        let x = choose_x(&curve, r)?;
        let mut places: Vec<Vec<KElem>> = curve
            .rational_places()
            .into_iter()
            .filter(|pl| check_h2(&curve, &x, pl))
            .filter_map(|pl| match pl {
                Place::Affine(coords) => Some(coords),
                Place::Infinity => None,
            })
            .collect();
        if let Some(cap) = max_s {
            places.truncate(cap);
        }
        LinearizedAGCode::build_with_places(curve, x, r, m, places)
    }

    /// Core builder for an explicit evaluation-place list.
    pub fn build_with_places(
        curve: CurveModel,
        x: XFunction,
        r: usize,
        m: u64,
        places: Vec<Vec<KElem>>,
    ) -> Result<LinearizedAGCode, CodeError> {
        let tower = FieldTower::new(curve.tower.p, curve.tower.e, r)?;
        if !check_h1(&curve, &x, r) {
            return Err(CodeError::HypothesisFailed(
                "no place of supp(div x) has valuation coprime to r".into(),
            ));
        }
        let s = places.len();
        if s == 0 || s * r <= m as usize {
            return Err(CodeError::TooFewPlaces { s, r, m });
        }
        for (j, coords) in places.iter().enumerate() {
            if !check_h2(&curve, &x, &Place::Affine(coords.clone())) {
                return Err(CodeError::HypothesisFailed(format!(
                    "evaluation place {j} meets supp(div x)"
                )));
            }
            if places[j + 1..].contains(coords) {
                return Err(CodeError::HypothesisFailed(format!(
                    "evaluation place {j} is duplicated"
                )));
            }
        }
        let norm_lifts: Vec<LElem> = places
            .iter()
            .map(|coords| tower.norm_preimage(&x.f.eval_affine(&curve, coords)))
            .collect::<Result<_, _>>()?;
        // prefix[j][i] = ū_j·Φ(ū_j)⋯Φ^{i−1}(ū_j).
        let prefixes: Vec<Vec<LElem>> = norm_lifts
            .iter()
            .map(|u| {
                let mut acc = Vec::with_capacity(r);
                acc.push(tower.l_one());
                for i in 1..r {
                    let t = tower.frobenius(u, i - 1);
                    let prev: &LElem = &acc[i - 1];
                    acc.push(tower.l_mul(prev, &t));
                }
                acc
            })
            .collect();
        let lambda = lambda_basis(&curve, &x, m, r);
        let mut basis_elems = Vec::with_capacity(lambda.kappa);
        for (i, fns) in lambda.per_degree.iter().enumerate() {
            for f in fns {
                basis_elems.push((f.clone(), i));
            }
        }
        let mut generators = Vec::with_capacity(basis_elems.len());
        for (phi, i) in &basis_elems {
            let mut blocks = Vec::with_capacity(s);
            for (j, coords) in places.iter().enumerate() {
                let val = phi.eval_affine(&curve, coords);
                let a = tower.l_mul(&tower.l_from_k(&val), &prefixes[j][*i]);
                blocks.push(tower.endo_matrix(&a, *i)?);
            }
            generators.push(Codeword { blocks });
        }
        Ok(LinearizedAGCode {
            tower,
            curve,
            x,
            m,
            places,
            norm_lifts,
            lambda,
            basis_elems,
            generators,
            col_dims: vec![r; s],
            d_exact: None,
        })
    }

    pub fn s(&self) -> usize {
        self.places.len()
    }

    pub fn kappa(&self) -> usize {
        self.generators.len()
    }

    /// `ℓ`-linear encoding: `Σ_b message_b · generator_b`.
    pub fn encode(&self, message: &[LElem]) -> Result<Codeword, CodeError> {
        if message.len() != self.kappa() {
            return Err(CodeError::LengthMismatch {
                expected: self.kappa(),
                got: message.len(),
            });
        }
        let tw = &self.tower;
        let mut blocks: Vec<MatK> = self
            .col_dims
            .iter()
            .map(|w| MatK::zero(tw.r, *w, tw))
            .collect();
        for (lambda, gen) in message.iter().zip(&self.generators) {
            if tw.l_is_zero(lambda) {
                continue;
            }
            let scaled = gen.scale(lambda, tw)?;
            for (acc, b) in blocks.iter_mut().zip(&scaled.blocks) {
                *acc = acc.add(b, tw);
            }
        }
        Ok(Codeword { blocks })
    }

    /// Number of projective message classes `(q^{r·κ} − 1)/(q^r − 1)`.
    pub fn projective_class_count(&self) -> u128 {
        let qr = self.tower.l_size as u128;
        let mut acc: u128 = 0;
        for _ in 0..self.kappa() {
            acc = acc.saturating_mul(qr).saturating_add(1);
        }
        acc
    }

    /// The `idx`-th projective representative: first nonzero entry 1,
    /// later entries enumerated big-endian by field index.
    fn projective_message(&self, mut idx: u64) -> Vec<LElem> {
        let tw = &self.tower;
        let qr = tw.l_size;
        let kappa = self.kappa();
        let mut lead = 0;
        loop {
            let block = qr.pow((kappa - 1 - lead) as u32);
            if idx < block {
                break;
            }
            idx -= block;
            lead += 1;
        }
        let mut msg = vec![tw.l_zero(); kappa];
        msg[lead] = tw.l_one();
        for t in lead + 1..kappa {
            let block = qr.pow((kappa - 1 - t) as u32);
            msg[t] = tw.l_from_index(idx / block);
            idx %= block;
        }
        msg
    }

    /// Exact minimum sum-rank weight by enumerating one representative per
    /// `ℓ`-projective class (valid: left `ℓ`-scaling preserves block ranks).
    /// Asserts the guaranteed bracket `n_l − m ≤ d ≤ n_l − κ_l + 1`
    /// whenever the lower end is positive.
    pub fn min_distance_bruteforce(
        &mut self,
        cap: Option<u64>,
        jobs: usize,
    ) -> Result<usize, CodeError> {
        let cap = cap.unwrap_or(DEFAULT_ENUM_CAP);
        let classes = self.projective_class_count();
        if classes > cap as u128 {
            return Err(CodeError::EnumerationTooLarge { classes, cap });
        }
        let classes = classes as u64;
        let jobs = jobs.max(1) as u64;
        let chunk = classes.div_ceil(jobs);
        let code = &*self;
        let min = std::thread::scope(|scope| {
            let mut handles = Vec::new();
            for t in 0..jobs {
                let lo = t * chunk;
                let hi = ((t + 1) * chunk).min(classes);
                if lo >= hi {
                    continue;
                }
                handles.push(scope.spawn(move || {
                    let mut local = usize::MAX;
                    for idx in lo..hi {
                        let msg = code.projective_message(idx);
                        let cw = code.encode(&msg).expect("message length matches kappa");
                        local = local.min(cw.weight(&code.tower));
                    }
                    local
                }));
            }
            handles
                .into_iter()
                .map(|h| h.join().expect("brute-force worker panicked"))
                .min()
                .expect("at least one worker ran")
        });
        let report = self.params();
        if report.d_lower > 0 {
            assert!(
                min as i64 >= report.d_lower,
                "minimum weight {min} violates the guaranteed lower bound {}",
                report.d_lower
            );
            assert!(
                min as i64 <= report.d_upper_singleton,
                "minimum weight {min} violates the Singleton bound {}",
                report.d_upper_singleton
            );
        }
        self.d_exact = Some(min);
        Ok(min)
    }

    /// Restrict the per-place domains to the first `w_j` basis vectors:
    /// generator blocks keep their first `w_j` columns.
    pub fn construct_restricted(&self, dims: &[usize]) -> Result<LinearizedAGCode, CodeError> {
        if dims.len() != self.s() {
            return Err(CodeError::LengthMismatch { expected: self.s(), got: dims.len() });
        }
        let r = self.tower.r;
        for (index, w) in dims.iter().enumerate() {
            if *w == 0 || *w > r {
                return Err(CodeError::InvalidSubspaceDim { index, w: *w, r });
            }
        }
        let tw = &self.tower;
        let generators = self
            .generators
            .iter()
            .map(|gen| Codeword {
                blocks: gen
                    .blocks
                    .iter()
                    .zip(dims)
                    .map(|(b, w)| {
                        let mut out = MatK::zero(b.rows, *w, tw);
                        for i in 0..b.rows {
                            for j in 0..*w {
                                out.set(i, j, b.get(i, j).clone());
                            }
                        }
                        out
                    })
                    .collect(),
            })
            .collect();
        let mut out = self.clone();
        out.generators = generators;
        out.col_dims = dims.to_vec();
        out.d_exact = None;
        Ok(out)
    }

    pub fn params(&self) -> ParameterReport {
        let r = self.tower.r;
        let n_l: usize = self.col_dims.iter().sum();
        let n = r * n_l;
        let kappa_l = self.kappa();
        let kappa_l_lower = dim_bound(&self.curve, &self.x, self.m, r);
        let d_lower = n_l as i64 - self.m as i64;
        let d_upper_singleton = n_l as i64 - kappa_l as i64 + 1;
        let defect_bound =
            Rational64::from_integer(n_l as i64 + 1 - kappa_l as i64 - d_lower);
        ParameterReport {
            n,
            n_l,
            kappa_l,
            kappa_l_lower,
            d_lower,
            d_upper_singleton,
            defect_bound,
            d_exact: self.d_exact,
            exact_lambda: self.lambda.exact,
        }
    }

    /// Rank over `k` of the stacked generator matrix: equals `r·κ_l` iff
    /// the evaluation map is injective on the spanned lattice.
    pub fn generator_rank(&self) -> usize {
        let tw = &self.tower;
        let r = tw.r;
        let n: usize = self.col_dims.iter().map(|w| r * w).sum();
        let mut stacked = MatK::zero(r * self.kappa(), n, tw);
        let mut row = 0;
        for gen in &self.generators {
            for c in 0..r {
                let scaled = gen
                    .scale(&tw.l_basis(c), tw)
                    .expect("twist exponent 0 is always valid");
                let mut col = 0;
                for b in &scaled.blocks {
                    for i in 0..b.rows {
                        for j in 0..b.cols {
                            stacked.set(row, col + i * b.cols + j, b.get(i, j).clone());
                        }
                    }
                    col += b.rows * b.cols;
                }
                row += 1;
            }
        }
        stacked.rank(tw)
    }
}

// ---------------------------------------------------------------------------
// Deterministic JSON descriptor

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TowerDescriptor {
    pub p: u64,
    pub e: usize,
    pub r: usize,
    pub modulus_k: Vec<u64>,
    pub modulus_l: Vec<Vec<u64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveDescriptor {
    pub kind: String,
    pub q0: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TermDescriptor {
    pub a: u64,
    pub b: u64,
    pub coeff: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct XDescriptor {
    pub h: u64,
    pub terms: Vec<TermDescriptor>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportDescriptor {
    pub n: usize,
    pub n_l: usize,
    pub kappa_l: usize,
    pub kappa_l_lower: [i64; 2],
    pub d_lower: i64,
    pub d_upper_singleton: i64,
    pub defect_bound: [i64; 2],
    pub d_exact: Option<u64>,
    pub exact_lambda: bool,
}

/// Serialized form of a constructed code. Field coordinates appear as
/// base-`p` digit arrays; generator matrix entries as `k`-indices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Descriptor {
    pub version: u32,
    pub tower: TowerDescriptor,
    pub curve: CurveDescriptor,
    pub x: XDescriptor,
    pub m: u64,
    pub places: Vec<Vec<Vec<u64>>>,
    pub norm_lifts: Vec<Vec<Vec<u64>>>,
    pub generators: Vec<Vec<Vec<Vec<u64>>>>,
    pub report: ReportDescriptor,
}

pub const DESCRIPTOR_VERSION: u32 = 1;

fn rational_pair(r: &Rational64) -> [i64; 2] {
    [*r.numer(), *r.denom()]
}

fn report_descriptor(report: &ParameterReport) -> ReportDescriptor {
    ReportDescriptor {
        n: report.n,
        n_l: report.n_l,
        kappa_l: report.kappa_l,
        kappa_l_lower: rational_pair(&report.kappa_l_lower),
        d_lower: report.d_lower,
        d_upper_singleton: report.d_upper_singleton,
        defect_bound: rational_pair(&report.defect_bound),
        d_exact: report.d_exact.map(|d| d as u64),
        exact_lambda: report.exact_lambda,
    }
}

impl LinearizedAGCode {
    pub fn to_descriptor(&self) -> Descriptor {
        let tw = &self.tower;
        let kind = match self.curve.kind {
            CurveKind::ProjectiveLine => "projective_line".to_string(),
            CurveKind::Hermitian { .. } => "hermitian".to_string(),
        };
        let q0 = match self.curve.kind {
            CurveKind::ProjectiveLine => None,
            CurveKind::Hermitian { q0 } => Some(q0),
        };
        Descriptor {
            version: DESCRIPTOR_VERSION,
            tower: TowerDescriptor {
                p: tw.p,
                e: tw.e,
                r: tw.r,
                modulus_k: tw.modulus_k.clone(),
                modulus_l: tw.modulus_l.clone(),
            },
            curve: CurveDescriptor { kind, q0 },
            x: XDescriptor {
                h: self.x.h,
                terms: self
                    .x
                    .f
                    .terms
                    .iter()
                    .map(|(mono, c)| TermDescriptor { a: mono.a, b: mono.b, coeff: c.clone() })
                    .collect(),
            },
            m: self.m,
            places: self.places.clone(),
            norm_lifts: self.norm_lifts.clone(),
            generators: self
                .generators
                .iter()
                .map(|gen| {
                    gen.blocks
                        .iter()
                        .map(|b| {
                            (0..b.rows)
                                .map(|i| {
                                    (0..b.cols).map(|j| tw.k_index(b.get(i, j))).collect()
                                })
                                .collect()
                        })
                        .collect()
                })
                .collect(),
            report: report_descriptor(&self.params()),
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_descriptor())
            .expect("descriptor serialization cannot fail");
        s.push('\n');
        s
    }

    /// Rebuild a code from its descriptor, revalidating every derived
    /// field; mismatches indicate tampering or version drift.
    pub fn from_descriptor(desc: &Descriptor) -> Result<LinearizedAGCode, CodeError> {
        if desc.version != DESCRIPTOR_VERSION {
            return Err(CodeError::BadDescriptor(format!(
                "unsupported version {}",
                desc.version
            )));
        }
        let td = &desc.tower;
        let tower = FieldTower::new(td.p, td.e, td.r)?;
        if tower.modulus_k != td.modulus_k || tower.modulus_l != td.modulus_l {
            return Err(CodeError::BadDescriptor("tower moduli mismatch".into()));
        }
        let curve = match desc.curve.kind.as_str() {
            "projective_line" => CurveModel::projective_line(td.p, td.e)?,
            "hermitian" => {
                let q0 = desc
                    .curve
                    .q0
                    .ok_or_else(|| CodeError::BadDescriptor("hermitian curve needs q0".into()))?;
                let c = CurveModel::hermitian(q0)?;
                if c.tower.p != td.p || c.tower.e != td.e {
                    return Err(CodeError::BadDescriptor(
                        "curve constant field disagrees with tower".into(),
                    ));
                }
                c
            }
            other => {
                return Err(CodeError::BadDescriptor(format!("unknown curve kind {other:?}")))
            }
        };
        for place in &desc.places {
            for coord in place {
                if coord.len() != td.e || coord.iter().any(|d| *d >= td.p) {
                    return Err(CodeError::BadDescriptor("malformed place coordinate".into()));
                }
            }
        }
        let pairs = desc
            .x
            .terms
            .iter()
            .map(|t| (Monomial { a: t.a, b: t.b }, t.coeff.clone()))
            .collect();
        let x = XFunction::from_pairs(&curve, pairs)?;
        if x.h != desc.x.h {
            return Err(CodeError::BadDescriptor("pole order mismatch".into()));
        }
        let mut code =
            LinearizedAGCode::build_with_places(curve, x, td.r, desc.m, desc.places.clone())?;
        let widths: Option<Vec<usize>> = desc
            .generators
            .first()
            .map(|gen| gen.iter().map(|b| b.first().map(|row| row.len()).unwrap_or(0)).collect());
        if let Some(widths) = widths {
            if widths.iter().any(|w| *w != td.r) {
                code = code.construct_restricted(&widths)?;
            }
        }
        code.d_exact = desc.report.d_exact.map(|d| d as usize);
        let rebuilt = code.to_descriptor();
        if rebuilt != *desc {
            return Err(CodeError::BadDescriptor(
                "descriptor disagrees with deterministic reconstruction".into(),
            ));
        }
        Ok(code)
    }

    pub fn from_json(json: &str) -> Result<LinearizedAGCode, CodeError> {
        let desc: Descriptor = serde_json::from_str(json)
            .map_err(|e| CodeError::BadDescriptor(format!("JSON parse error: {e}")))?;
        LinearizedAGCode::from_descriptor(&desc)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn lin_rs_q3() -> LinearizedAGCode {
        let curve = CurveModel::projective_line(3, 1).unwrap();
        LinearizedAGCode::construct(curve, 2, 1, None).unwrap()
    }

    #[test]
    fn reed_solomon_instance_parameters() {
        let code = lin_rs_q3();
        assert_eq!(code.s(), 2); // the two nonzero values of t
        assert_eq!(code.kappa(), 2);
        let report = code.params();
        assert_eq!((report.n, report.n_l), (8, 4));
        assert_eq!(report.d_lower, 3);
        assert_eq!(report.d_upper_singleton, 3);
        assert_eq!(report.defect_bound, Rational64::from_integer(0)); // MSRD
        assert_eq!(report.kappa_l_lower, Rational64::from_integer(2));
        assert!(report.exact_lambda);
        // Basis element (1, 0): identity blocks.
        assert_eq!(code.basis_elems[0].1, 0);
        for b in &code.generators[0].blocks {
            assert_eq!(*b, MatK::identity(2, &code.tower));
        }
        // Basis element (1, 1): the matrix of v ↦ ū_j·Φ(v).
        assert_eq!(code.basis_elems[1].1, 1);
        for (j, b) in code.generators[1].blocks.iter().enumerate() {
            assert_eq!(*b, code.tower.endo_matrix(&code.norm_lifts[j], 1).unwrap());
        }
        // Injectivity: stacked rank r·κ.
        assert_eq!(code.generator_rank(), 4);
    }

    #[test]
    fn reed_solomon_instance_is_msrd() {
        let mut code = lin_rs_q3();
        assert_eq!(code.projective_class_count(), 10);
        let d = code.min_distance_bruteforce(None, 2).unwrap();
        assert_eq!(d, 3); // meets the Singleton bound
        assert_eq!(code.params().d_exact, Some(3));
    }

    #[test]
    fn encode_is_l_linear() {
        let code = lin_rs_q3();
        let tw = &code.tower;
        // Zero message, unit vectors.
        let zero = code.encode(&vec![tw.l_zero(); 2]).unwrap();
        assert_eq!(zero.weight(tw), 0);
        let e0 = code.encode(&[tw.l_one(), tw.l_zero()]).unwrap();
        assert_eq!(e0, code.generators[0]);
        // Random linearity checks.
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let m1: Vec<LElem> =
                (0..2).map(|_| tw.l_from_index(rng.gen_range(0..tw.l_size))).collect();
            let m2: Vec<LElem> =
                (0..2).map(|_| tw.l_from_index(rng.gen_range(0..tw.l_size))).collect();
            let lam = tw.l_from_index(rng.gen_range(0..tw.l_size));
            let combined: Vec<LElem> = m1
                .iter()
                .zip(&m2)
                .map(|(a, b)| tw.l_add(a, &tw.l_mul(&lam, b)))
                .collect();
            let lhs = code.encode(&combined).unwrap();
            let rhs = code
                .encode(&m1)
                .unwrap()
                .add(&code.encode(&m2).unwrap().scale(&lam, tw).unwrap(), tw)
                .unwrap();
            assert_eq!(lhs, rhs);
            // Nonzero scaling preserves blockwise ranks.
            if !tw.l_is_zero(&lam) {
                let base = code.encode(&m1).unwrap();
                let scaled = base.scale(&lam, tw).unwrap();
                for (a, b) in base.blocks.iter().zip(&scaled.blocks) {
                    assert_eq!(a.rank(tw), b.rank(tw));
                }
            }
        }
        // Length mismatch.
        assert_eq!(
            code.encode(&[tw.l_one()]).unwrap_err(),
            CodeError::LengthMismatch { expected: 2, got: 1 }
        );
    }

    #[test]
    fn weights_and_distances() {
        let code = lin_rs_q3();
        let tw = &code.tower;
        let zero = code.encode(&vec![tw.l_zero(); 2]).unwrap();
        let gen = &code.generators[0];
        assert_eq!(sumrank_weight(tw, gen), 4);
        assert_eq!(sumrank_distance(tw, gen, &zero).unwrap(), 4);
        assert_eq!(sumrank_distance(tw, gen, gen).unwrap(), 0);
        // Shape mismatch is rejected.
        let restricted = code.construct_restricted(&[1, 1]).unwrap();
        assert_eq!(
            sumrank_distance(tw, gen, &restricted.generators[0]).unwrap_err(),
            CodeError::ShapeMismatch
        );
    }

    #[test]
    fn twist_order_one_reduces_to_hamming() {
        // r = 1: blocks are 1×1, sum-rank weight = Hamming weight.
        let curve = CurveModel::projective_line(5, 1).unwrap();
        let mut code = LinearizedAGCode::construct(curve, 1, 1, None).unwrap();
        assert_eq!(code.s(), 4);
        assert_eq!(code.kappa(), 2);
        let tw = code.tower.clone();
        let cw = code.encode(&[tw.l_one(), tw.l_one()]).unwrap();
        let hamming = code
            .places
            .iter()
            .map(|c| &c[0])
            .filter(|t| !tw.k_is_zero(&tw.k_add(&tw.k_one(), t)))
            .count();
        assert_eq!(cw.weight(&tw), hamming);
        // Classical Reed–Solomon: d = s − m = 3.
        assert_eq!(code.min_distance_bruteforce(None, 1).unwrap(), 3);
    }

    #[test]
    fn hermitian_instance_honest_parameters() {
        let curve = CurveModel::hermitian(2).unwrap();
        let mut code = LinearizedAGCode::construct(curve, 2, 3, None).unwrap();
        assert_eq!(code.s(), 5); // 8 affine places minus 3 zeros of x
        let report = code.params();
        assert_eq!((report.n, report.n_l), (20, 10));
        assert_eq!(report.kappa_l, 2);
        assert_eq!(report.kappa_l_lower, Rational64::from_integer(1));
        assert_eq!(report.d_lower, 7);
        assert_eq!(report.d_upper_singleton, 9);
        assert_eq!(report.defect_bound, Rational64::from_integer(2));
        assert!(report.exact_lambda);
        assert_eq!(code.generator_rank(), 4);
        assert_eq!(code.projective_class_count(), 17);
        let d = code.min_distance_bruteforce(None, 1).unwrap();
        assert_eq!(d, 7); // meets the guaranteed lower bound exactly
    }

    #[test]
    fn full_length_code_has_distance_one() {
        // m = s·r − 1 forces κ_l = n_l and d = 1.
        let curve = CurveModel::projective_line(3, 1).unwrap();
        let mut code = LinearizedAGCode::construct(curve, 2, 3, None).unwrap();
        let report = code.params();
        assert_eq!(report.kappa_l, 4);
        assert_eq!(report.n_l, 4);
        assert_eq!(report.d_lower, 1);
        assert_eq!(report.d_upper_singleton, 1);
        assert_eq!(code.min_distance_bruteforce(None, 2).unwrap(), 1);
    }

    #[test]
    fn too_few_places_and_m_zero() {
        let curve = CurveModel::projective_line(3, 1).unwrap();
        assert_eq!(
            LinearizedAGCode::construct(curve.clone(), 2, 4, None).unwrap_err(),
            CodeError::TooFewPlaces { s: 2, r: 2, m: 4 }
        );
        // m = 0: constants only, full-weight generator.
        let code = LinearizedAGCode::construct(curve, 2, 0, None).unwrap();
        assert_eq!(code.kappa(), 1);
        let report = code.params();
        assert_eq!(report.d_lower, 4); // s·r
        assert_eq!(code.generators[0].weight(&code.tower), 4);
    }

    #[test]
    fn explicit_place_validation() {
        let curve = CurveModel::projective_line(3, 1).unwrap();
        let x = choose_x(&curve, 2).unwrap();
        let tw = curve.tower.clone();
        // A zero of x is rejected as an evaluation place.
        let err = LinearizedAGCode::build_with_places(
            curve.clone(),
            x.clone(),
            2,
            1,
            vec![vec![tw.k_zero()], vec![tw.k_one()]],
        )
        .unwrap_err();
        assert!(matches!(err, CodeError::HypothesisFailed(_)));
        // Duplicates are rejected.
        let err = LinearizedAGCode::build_with_places(
            curve,
            x,
            2,
            1,
            vec![vec![tw.k_one()], vec![tw.k_one()]],
        )
        .unwrap_err();
        assert!(matches!(err, CodeError::HypothesisFailed(_)));
    }

    #[test]
    fn restricted_codes() {
        let code = lin_rs_q3();
        let tw = &code.tower;
        // Full dims reproduce the code.
        let full = code.construct_restricted(&[2, 2]).unwrap();
        assert_eq!(full.generators, code.generators);
        // Width-1 domains: blocks are 2×1, weight at most s.
        let mut narrow = code.construct_restricted(&[1, 1]).unwrap();
        for gen in &narrow.generators {
            for b in &gen.blocks {
                assert_eq!((b.rows, b.cols), (2, 1));
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..30 {
            let msg: Vec<LElem> =
                (0..2).map(|_| tw.l_from_index(rng.gen_range(0..tw.l_size))).collect();
            assert!(narrow.encode(&msg).unwrap().weight(tw) <= 2);
        }
        // Restricted lower bound n_l − m = 1 still holds under brute force.
        let d = narrow.min_distance_bruteforce(None, 1).unwrap();
        assert!(d >= 1);
        // Bad dimensions.
        assert_eq!(
            code.construct_restricted(&[0, 2]).unwrap_err(),
            CodeError::InvalidSubspaceDim { index: 0, w: 0, r: 2 }
        );
        assert_eq!(
            code.construct_restricted(&[1]).unwrap_err(),
            CodeError::LengthMismatch { expected: 2, got: 1 }
        );
    }

    #[test]
    fn descriptor_round_trip_is_byte_identical() {
        let mut code = lin_rs_q3();
        code.min_distance_bruteforce(None, 1).unwrap();
        let json = code.to_json();
        // Determinism: a fresh construction serializes identically.
        let mut again = lin_rs_q3();
        again.min_distance_bruteforce(None, 2).unwrap();
        assert_eq!(json, again.to_json());
        // Round trip.
        let parsed = LinearizedAGCode::from_json(&json).unwrap();
        assert_eq!(parsed.to_json(), json);
        assert_eq!(parsed.d_exact, Some(3));
        // Tampering is caught.
        let mut desc = code.to_descriptor();
        desc.report.kappa_l = 3;
        assert!(matches!(
            LinearizedAGCode::from_descriptor(&desc).unwrap_err(),
            CodeError::BadDescriptor(_)
        ));
        let mut desc2 = code.to_descriptor();
        desc2.m = 2;
        assert!(LinearizedAGCode::from_descriptor(&desc2).is_err());
        // Restricted codes round-trip through their narrower blocks.
        let narrow = code.construct_restricted(&[1, 2]).unwrap();
        let njson = narrow.to_json();
        let nparsed = LinearizedAGCode::from_json(&njson).unwrap();
        assert_eq!(nparsed.to_json(), njson);
        assert_eq!(nparsed.col_dims, vec![1, 2]);
    }
}
