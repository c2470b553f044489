//! Counted, seeded invariant suites at desk scale. The integration tests
//! and the `selftest` CLI subcommand share these, so a shipped binary can
//! re-certify the algebra it was built with.

use std::time::Instant;

use num_rational::Rational64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bounds::{self, Extension};
use crate::code::LinearizedAGCode;
use crate::curve::{choose_x, degree_identity, dim_bound, lambda_basis, CurveModel};
use crate::gf::{FieldTower, KElem, LElem};
use crate::laurent::{
    epsilon_bar, in_lambda, v_jt, w_jx, LaurentSeries, ProductElem, ProductRing,
};
use crate::ore::{epsilon, gamma_u, nrd, quotient_mul, QuotientElem};
use crate::ring::CoeffRing;

macro_rules! ensure {
    ($cond:expr, $($arg:tt)*) => {
        if !$cond {
            return Err(format!($($arg)*));
        }
    };
}

#[derive(Debug, Clone)]
pub struct SuiteOutcome {
    pub name: &'static str,
    /// Cases exercised (0 when the suite failed early).
    pub cases: usize,
    pub millis: u128,
    pub error: Option<String>,
}

impl SuiteOutcome {
    pub fn passed(&self) -> bool {
        self.error.is_none()
    }
}

pub const SUITES: [(&str, fn() -> Result<usize, String>); 6] = [
    ("gf", suite_gf),
    ("ore", suite_ore_identities),
    ("laurent", suite_local_valuations),
    ("curve", suite_curve),
    ("code", suite_code),
    ("bounds", suite_bounds),
];

/// Run every suite, timing each; failures are collected, not fatal.
pub fn run_all() -> Vec<SuiteOutcome> {
    SUITES
        .iter()
        .map(|(name, suite)| {
            let start = Instant::now();
            let result = suite();
            let millis = start.elapsed().as_millis();
            match result {
                Ok(cases) => SuiteOutcome { name, cases, millis, error: None },
                Err(e) => SuiteOutcome { name, cases: 0, millis, error: Some(e) },
            }
        })
        .collect()
}

fn random_l(tw: &FieldTower, rng: &mut ChaCha8Rng) -> LElem {
    tw.l_from_index(rng.gen_range(0..tw.l_size))
}

fn random_l_nonzero(tw: &FieldTower, rng: &mut ChaCha8Rng) -> LElem {
    tw.l_from_index(rng.gen_range(1..tw.l_size))
}

fn random_k_nonzero(tw: &FieldTower, rng: &mut ChaCha8Rng) -> KElem {
    tw.k_from_index(rng.gen_range(1..tw.q))
}

/// Field-tower laws: ring axioms in `ℓ`, Frobenius structure, norm
/// multiplicativity and preimages, endomorphism-matrix composition.
pub fn suite_gf() -> Result<usize, String> {
    let towers = [(2, 1, 2), (2, 1, 3), (2, 2, 2), (3, 1, 2), (3, 2, 2), (5, 1, 2), (2, 2, 3)];
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let mut cases = 0;
    for (p, e, r) in towers {
        let tw = FieldTower::new(p, e, r).map_err(|er| er.to_string())?;
        for _ in 0..60 {
            let a = random_l(&tw, &mut rng);
            let b = random_l(&tw, &mut rng);
            let c = random_l(&tw, &mut rng);
            let tag = format!("tower p={p} e={e} r={r}");
            ensure!(
                tw.l_mul(&a, &tw.l_add(&b, &c))
                    == tw.l_add(&tw.l_mul(&a, &b), &tw.l_mul(&a, &c)),
                "distributivity failed ({tag})"
            );
            ensure!(
                tw.l_mul(&tw.l_mul(&a, &b), &c) == tw.l_mul(&a, &tw.l_mul(&b, &c)),
                "associativity failed ({tag})"
            );
            if !tw.l_is_zero(&a) {
                let inv = tw.l_inv(&a).expect("nonzero element");
                ensure!(tw.l_is_one(&tw.l_mul(&a, &inv)), "inverse failed ({tag})");
            }
            // Frobenius: k-algebra automorphism of order r.
            ensure!(
                tw.frobenius(&tw.l_add(&a, &b), 1)
                    == tw.l_add(&tw.frobenius(&a, 1), &tw.frobenius(&b, 1)),
                "Frobenius additivity failed ({tag})"
            );
            ensure!(
                tw.frobenius(&tw.l_mul(&a, &b), 1)
                    == tw.l_mul(&tw.frobenius(&a, 1), &tw.frobenius(&b, 1)),
                "Frobenius multiplicativity failed ({tag})"
            );
            ensure!(tw.frobenius(&a, tw.r) == a, "Frobenius order failed ({tag})");
            let kc = random_k_nonzero(&tw, &mut rng);
            ensure!(
                tw.frobenius(&tw.l_from_k(&kc), 1) == tw.l_from_k(&kc),
                "Frobenius must fix k ({tag})"
            );
            // Norm: multiplicative into k, with constructive preimages.
            ensure!(
                tw.norm(&tw.l_mul(&a, &b)) == tw.l_mul(&tw.norm(&a), &tw.norm(&b)),
                "norm multiplicativity failed ({tag})"
            );
            ensure!(tw.l_to_k(&tw.norm(&a)).is_some(), "norm left k ({tag})");
            let lift = tw.norm_preimage(&kc).map_err(|er| er.to_string())?;
            ensure!(tw.norm_to_k(&tw.norm(&lift)) == kc, "norm preimage failed ({tag})");
            // endo_matrix composes like a·Φ^i ∘ b·Φ^j = a·Φ^i(b)·Φ^{i+j}.
            let i = rng.gen_range(0..tw.r);
            let j = rng.gen_range(0..tw.r);
            let mi = tw.endo_matrix(&a, i).map_err(|er| er.to_string())?;
            let mj = tw.endo_matrix(&b, j).map_err(|er| er.to_string())?;
            let composed = tw
                .endo_matrix(&tw.l_mul(&a, &tw.frobenius(&b, i)), (i + j) % tw.r)
                .map_err(|er| er.to_string())?;
            ensure!(mi.mul(&mj, &tw) == composed, "endo_matrix composition failed ({tag})");
            cases += 1;
        }
    }
    Ok(cases)
}

/// Reduced-norm identities in `L[T;Φ]/(T^r − x)` over finite towers with
/// `q^r ≤ 256`: multiplicativity, invariance under the twists `γ_u`, and
/// agreement with the determinant of the `Φ`-action matrix when `x = 1`.
/// Each identity runs on every case (≥ 1000 cases).
pub fn suite_ore_identities() -> Result<usize, String> {
    let plan: [(u64, usize, usize, usize); 8] = [
        (2, 1, 2, 200),
        (2, 1, 3, 150),
        (2, 2, 2, 200),
        (3, 1, 2, 200),
        (5, 1, 2, 100),
        (2, 1, 4, 100),
        (3, 1, 3, 50),
        (2, 1, 8, 30),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(202);
    let mut cases = 0;
    for (p, e, r, count) in plan {
        let tw = FieldTower::new(p, e, r).map_err(|er| er.to_string())?;
        assert!(tw.l_size <= 256);
        for _ in 0..count {
            let tag = format!("tower p={p} e={e} r={r}");
            let x = tw.l_from_k(&random_k_nonzero(&tw, &mut rng));
            let coeffs_f: Vec<LElem> = (0..r).map(|_| random_l(&tw, &mut rng)).collect();
            let coeffs_g: Vec<LElem> = (0..r).map(|_| random_l(&tw, &mut rng)).collect();
            let f = QuotientElem::new(&tw, coeffs_f.clone(), x.clone())
                .map_err(|er| er.to_string())?;
            let g =
                QuotientElem::new(&tw, coeffs_g, x.clone()).map_err(|er| er.to_string())?;
            // Multiplicativity.
            let fg = quotient_mul(&tw, &f, &g).map_err(|er| er.to_string())?;
            ensure!(
                nrd(&tw, &fg) == tw.l_mul(&nrd(&tw, &f), &nrd(&tw, &g)),
                "nrd multiplicativity failed ({tag})"
            );
            // Twist invariance, and the reduced norm lands in k.
            let u = random_l_nonzero(&tw, &mut rng);
            let tf = gamma_u(&tw, &f, &u).map_err(|er| er.to_string())?;
            ensure!(nrd(&tw, &tf) == nrd(&tw, &f), "nrd twist invariance failed ({tag})");
            ensure!(tw.l_to_k(&nrd(&tw, &f)).is_some(), "nrd left k ({tag})");
            // det ∘ ε = nrd on the split algebra (x = 1).
            let f1 = QuotientElem::new(&tw, f.coeffs.clone(), tw.l_one())
                .map_err(|er| er.to_string())?;
            let mat = epsilon(&tw, &f1).map_err(|er| er.to_string())?;
            let expected = tw.l_to_k(&nrd(&tw, &f1)).expect("nrd lies in k");
            ensure!(mat.det(&tw) == expected, "det(epsilon) != nrd ({tag})");
            cases += 1;
        }
    }
    Ok(cases)
}

fn random_series(ring: &ProductRing, rng: &mut ChaCha8Rng, min_val: i64) -> LaurentSeries {
    let tw = &ring.tower;
    if rng.gen_range(0..4) == 0 {
        return LaurentSeries::zero();
    }
    let val = rng.gen_range(min_val..=min_val + 3);
    let len = rng.gen_range(1..=3);
    let mut coeffs: Vec<LElem> = (0..len).map(|_| random_l(tw, rng)).collect();
    coeffs[0] = random_l_nonzero(tw, rng);
    LaurentSeries::from_coeffs(tw, val, coeffs)
}

fn random_product(ring: &ProductRing, rng: &mut ChaCha8Rng, min_val: i64) -> ProductElem {
    (0..ring.m).map(|_| random_series(ring, rng, min_val)).collect()
}

/// Valuation bounds over `L = F_{q^d}((t))^m`: `v_t(Nrd f) ≥ d·Σ_j w_{j,x}(f)`
/// for central monomial moduli, and `v_t(Nrd f) ≥ dim_k ker ε̄(f)` for
/// integral `f` with `x = 1`. Inputs are exact, so every weight is certified.
pub fn suite_local_valuations() -> Result<usize, String> {
    let plan: [(u64, usize, usize, usize); 7] = [
        (2, 1, 1, 1),
        (2, 1, 1, 2),
        (2, 1, 2, 1),
        (2, 1, 2, 2),
        (2, 1, 3, 1),
        (3, 1, 2, 1),
        (3, 1, 1, 2),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(303);
    let mut cases = 0;
    for (p, e, m, d) in plan {
        let ring = ProductRing::new(p, e, d, m).map_err(|er| er.to_string())?;
        let tw = ring.tower.clone();
        let r = ring.order();
        for _ in 0..80 {
            let tag = format!("p={p} e={e} m={m} d={d}");
            // Modulus: diagonal monomial c·t^{v_x} with c ∈ k^×.
            let vx = rng.gen_range(-1..=2);
            let x = ring.k_monomial(&random_k_nonzero(&tw, &mut rng), vx);
            let coeffs: Vec<ProductElem> =
                (0..r).map(|_| random_product(&ring, &mut rng, -2)).collect();
            let f = QuotientElem::new(&ring, coeffs, x).map_err(|er| er.to_string())?;
            if f.is_zero(&ring) {
                continue;
            }
            let n = nrd(&ring, &f);
            let vn = v_jt(&ring, &n, 0).map_err(|er| er.to_string())?;
            let weights: Vec<Option<Rational64>> = (0..m)
                .map(|j| w_jx(&ring, &f, j))
                .collect::<Result<_, _>>()
                .map_err(|er| er.to_string())?;
            let weight_sum: Option<Rational64> = weights
                .iter()
                .try_fold(Rational64::from_integer(0), |acc, w| w.map(|w| acc + w));
            match (vn, weight_sum) {
                (Some(v), Some(ws)) => {
                    let bound = Rational64::from_integer(d as i64) * ws;
                    ensure!(
                        Rational64::from_integer(v) >= bound,
                        "v_t(Nrd) = {v} below d·Σw = {bound} ({tag})"
                    );
                }
                // An identically-zero block forces Nrd = 0.
                (Some(v), None) => {
                    return Err(format!("Nrd finite ({v}) with an infinite weight ({tag})"))
                }
                (None, _) => {}
            }
            // Membership in Λ is exactly "every block weight ≥ 0".
            let member = in_lambda(&ring, &f).map_err(|er| er.to_string())?;
            let all_nonneg =
                weights.iter().all(|w| w.map_or(true, |w| w >= Rational64::from_integer(0)));
            ensure!(member == all_nonneg, "in_lambda disagrees with weights ({tag})");
            // Integral f, x = 1: kernel dimension of the residue action.
            let coeffs1: Vec<ProductElem> =
                (0..r).map(|_| random_product(&ring, &mut rng, 0)).collect();
            let f1 = QuotientElem::new(&ring, coeffs1, ring.one())
                .map_err(|er| er.to_string())?;
            let n1 = nrd(&ring, &f1);
            let vn1 = v_jt(&ring, &n1, 0).map_err(|er| er.to_string())?;
            let ker = epsilon_bar(&ring, &f1).map_err(|er| er.to_string())?.kernel_dim(&tw);
            match vn1 {
                Some(v) => ensure!(
                    v >= ker as i64,
                    "v_t(Nrd) = {v} below dim ker ε̄ = {ker} ({tag})"
                ),
                None => {}
            }
            cases += 1;
        }
    }
    Ok(cases)
}

/// Curve bookkeeping: rational point counts, Riemann–Roch dimensions,
/// the floor-divisor degree identity, and lattice-dimension bounds.
pub fn suite_curve() -> Result<usize, String> {
    let mut cases = 0;
    let models = [
        CurveModel::projective_line(2, 2).map_err(|e| e.to_string())?,
        CurveModel::projective_line(3, 1).map_err(|e| e.to_string())?,
        CurveModel::hermitian(2).map_err(|e| e.to_string())?,
        CurveModel::hermitian(3).map_err(|e| e.to_string())?,
    ];
    for curve in &models {
        let g = curve.genus();
        let expected_places = match curve.kind {
            crate::curve::CurveKind::ProjectiveLine => curve.tower.q + 1,
            crate::curve::CurveKind::Hermitian { q0 } => q0 * q0 * q0 + 1,
        };
        ensure!(
            curve.rational_places().len() as u64 == expected_places,
            "rational place count off (genus {g})"
        );
        // dim L(c·P∞) = c + 1 − g for c ≥ 2g − 1; below that, gap count.
        for c in 0..=50u64 {
            let dim = curve.rr_dim(c) as i64;
            if c as i64 >= 2 * g as i64 - 1 {
                ensure!(
                    dim == c as i64 + 1 - g as i64,
                    "Riemann-Roch dimension failed at c={c} (genus {g})"
                );
            } else {
                ensure!(dim <= c as i64 + 1 - g as i64 + g as i64, "dim overshoot at c={c}");
            }
            cases += 1;
        }
        // Exact degree identity for the floor divisors, all m ≤ 3r.
        for r in [2usize, 3] {
            let x = choose_x(curve, r).map_err(|e| e.to_string())?;
            for m in 0..=(3 * r as u64) {
                if let Some((lhs, rhs)) = degree_identity(&x, m, r) {
                    ensure!(
                        lhs == rhs,
                        "degree identity failed: genus {g}, r={r}, m={m}: {lhs} != {rhs}"
                    );
                } else {
                    return Err(format!("chosen x has unknown zeros (genus {g}, r={r})"));
                }
                let basis = lambda_basis(curve, &x, m, r);
                if basis.exact {
                    let bound = dim_bound(curve, &x, m, r);
                    ensure!(
                        Rational64::from_integer(basis.kappa as i64) >= bound,
                        "kappa {} below its bound {bound} (genus {g}, r={r}, m={m})",
                        basis.kappa
                    );
                }
                cases += 1;
            }
        }
    }
    Ok(cases)
}

/// End-to-end code construction: MSRD recovery on the line, maximal-length
/// two-dimensional codes, evaluation-map injectivity, encode linearity,
/// and descriptor determinism.
pub fn suite_code() -> Result<usize, String> {
    let mut cases = 0;
    // Linearized Reed–Solomon instances are MSRD: d = n_l − κ_l + 1.
    for (q, r, s, m) in [(3u64, 2usize, 2usize, 1u64), (4, 2, 3, 2), (5, 2, 4, 3)] {
        let (p, e) = if q == 4 { (2, 2) } else { (q, 1) };
        let curve = CurveModel::projective_line(p, e).map_err(|e| e.to_string())?;
        let mut code =
            LinearizedAGCode::construct(curve, r, m, Some(s)).map_err(|e| e.to_string())?;
        ensure!(code.s() == s, "expected s={s} for q={q}");
        ensure!(code.kappa() as u64 == m + 1, "kappa != m+1 for q={q}");
        ensure!(code.generator_rank() == r * code.kappa(), "evaluation not injective q={q}");
        let report = code.params();
        let d = code.min_distance_bruteforce(None, 2).map_err(|e| e.to_string())?;
        ensure!(
            d as i64 == report.d_upper_singleton,
            "not MSRD: q={q} d={d} singleton={}",
            report.d_upper_singleton
        );
        cases += 1;
    }
    // κ_l = 2 at the maximal length s = q − 1: d = rs − 1 exactly.
    for q in [3u64, 4, 5] {
        let (p, e) = if q == 4 { (2, 2) } else { (q, 1) };
        let curve = CurveModel::projective_line(p, e).map_err(|e| e.to_string())?;
        let mut code = LinearizedAGCode::construct(curve, 2, 1, None).map_err(|e| e.to_string())?;
        ensure!(code.s() as u64 == q - 1, "admissible place count != q-1 for q={q}");
        let d = code.min_distance_bruteforce(None, 2).map_err(|e| e.to_string())?;
        ensure!(d as u64 == 2 * (q - 1) - 1, "d != rs-1 for q={q}");
        cases += 1;
    }
    // Genus-1 instance: honest parameters and exact distance.
    {
        let curve = CurveModel::hermitian(2).map_err(|e| e.to_string())?;
        let mut code = LinearizedAGCode::construct(curve, 2, 3, None).map_err(|e| e.to_string())?;
        let report = code.params();
        ensure!(
            (code.s(), report.n_l, report.kappa_l, report.d_lower) == (5, 10, 2, 7),
            "Hermitian instance parameters drifted"
        );
        let d = code.min_distance_bruteforce(None, 2).map_err(|e| e.to_string())?;
        ensure!(d == 7, "Hermitian instance distance changed: {d}");
        cases += 1;
    }
    // ℓ-linearity of encode on a seeded sample.
    {
        let curve = CurveModel::projective_line(3, 1).map_err(|e| e.to_string())?;
        let code = LinearizedAGCode::construct(curve, 2, 1, None).map_err(|e| e.to_string())?;
        let tw = code.tower.clone();
        let mut rng = ChaCha8Rng::seed_from_u64(404);
        for _ in 0..50 {
            let m1: Vec<LElem> = (0..2).map(|_| random_l(&tw, &mut rng)).collect();
            let m2: Vec<LElem> = (0..2).map(|_| random_l(&tw, &mut rng)).collect();
            let lam = random_l(&tw, &mut rng);
            let combined: Vec<LElem> =
                m1.iter().zip(&m2).map(|(a, b)| tw.l_add(a, &tw.l_mul(&lam, b))).collect();
            let lhs = code.encode(&combined).map_err(|e| e.to_string())?;
            let rhs = code
                .encode(&m1)
                .map_err(|e| e.to_string())?
                .add(
                    &code
                        .encode(&m2)
                        .map_err(|e| e.to_string())?
                        .scale(&lam, &tw)
                        .map_err(|e| e.to_string())?,
                    &tw,
                )
                .map_err(|e| e.to_string())?;
            ensure!(lhs == rhs, "encode is not l-linear");
            cases += 1;
        }
    }
    // Determinism and round-trip.
    {
        let curve = CurveModel::projective_line(3, 1).map_err(|e| e.to_string())?;
        let a = LinearizedAGCode::construct(curve.clone(), 2, 1, None).map_err(|e| e.to_string())?;
        let b = LinearizedAGCode::construct(curve, 2, 1, None).map_err(|e| e.to_string())?;
        ensure!(a.to_json() == b.to_json(), "construction is not deterministic");
        let back = LinearizedAGCode::from_json(&a.to_json()).map_err(|e| e.to_string())?;
        ensure!(back.params() == a.params(), "round-trip changed the report");
        cases += 1;
    }
    Ok(cases)
}

/// Bound numerics: γ_q references, anchor points, finite/asymptotic
/// consistency, and the square-field crossover.
pub fn suite_bounds() -> Result<usize, String> {
    let mut cases = 0;
    let gamma2 = bounds::gamma_q(2).map_err(|e| e.to_string())?;
    ensure!((gamma2 - 3.4627466195).abs() < 1e-9, "gamma_2 drifted: {gamma2}");
    let anchors = [
        (49u64, Extension::Finite(1), 5.0 / 6.0),
        (121, Extension::Finite(2), 0.85),
        (121, Extension::Infinite, 0.8),
    ];
    for (q, r, want) in anchors {
        let got = bounds::compgv(q, r, 0.0).map_err(|e| e.to_string())?;
        ensure!((got - want).abs() < 1e-4, "compgv anchor q={q} drifted: {got}");
        cases += 1;
    }
    for (q, r, delta) in [(49u64, 1u32, 0.3), (121, 2, 0.3)] {
        let fin = bounds::gv_finite(q, r, 10_000, delta).map_err(|e| e.to_string())?;
        let asym = bounds::gv_asymptotic(q, Extension::Finite(r), delta).map_err(|e| e.to_string())?;
        ensure!((fin - asym).abs() <= 0.01, "finite/asymptotic gap too large q={q}");
        cases += 1;
    }
    for r in [
        Extension::Finite(1),
        Extension::Finite(2),
        Extension::Finite(4),
        Extension::Finite(8),
        Extension::Infinite,
    ] {
        let found = (0..=100).map(|i| i as f64 * 0.01).any(|d| {
            bounds::compgv(121, r, d).unwrap() > bounds::gv_asymptotic(121, r, d).unwrap()
        });
        ensure!(found, "no crossover for q=121, r={r:?}");
        cases += 1;
    }
    Ok(cases)
}
