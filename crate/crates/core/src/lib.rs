//! Sum-rank metric codes built from quotients of Ore (twisted) polynomial rings.
//!
//! The crate is organized bottom-up:
//!
//! * [`gf`] — explicit finite field towers `F_p ⊂ k = F_q ⊂ ℓ = F_{q^r}` with
//!   Frobenius, norms, norm preimages, and matrices over `k`;
//! * [`ring`] — the minimal coefficient-ring interface shared by every Ore
//!   coefficient domain, plus a division-free determinant;
//! * [`ore`] — Ore polynomials `L[T; Φ]`, the quotient algebras
//!   `L[T; Φ]/(T^r − x)`, reduced norms, and the twisting isomorphisms;
//! * [`laurent`] — truncated Laurent series, the local product ring
//!   `L = L_0^m` with its shift Frobenius, valuations, and residue actions;
//! * [`curve`] — the two supported curve models (projective line, Hermitian),
//!   one-point Riemann-Roch spaces, and evaluation-function selection;
//! * [`code`] — code construction, encoding, sum-rank weights and distances,
//!   brute-force minimum distance, and the JSON descriptor format;
//! * [`bounds`] — Gilbert-Varshamov-style and competitor rate bounds (f64);
//! * [`selftest`] — the randomized invariant suites shared by `cargo test`
//!   and the CLI self test.

pub mod bounds;
pub mod code;
pub mod curve;
pub mod gf;
pub mod laurent;
pub mod ore;
pub mod ring;
pub mod selftest;

/// Ore polynomial with coefficients in the finite tower field `ℓ`.
pub type TowerOre = ore::OrePoly<gf::FieldTower>;
/// Quotient algebra element with coefficients in `ℓ` (modulus `T^r − x`, `x ∈ k`).
pub type TowerQuotient = ore::QuotientElem<gf::FieldTower>;
/// Quotient algebra element over the local product ring `L = F_{q^d}((t))^m`.
pub type LocalQuotient = ore::QuotientElem<laurent::ProductRing>;
/// Quotient algebra element over the affine coordinate ring of a curve.
pub type CurveQuotient = ore::QuotientElem<curve::CurveRing>;
