//! Minimal interface for the coefficient rings of Ore polynomials.
//!
//! Every coefficient domain used by [`crate::ore`] is a commutative ring `L`
//! carrying a distinguished automorphism `Φ`. The trait keeps exactly the
//! operations the Ore layer needs: ring arithmetic, `Φ`, zero tests, and a
//! partial inverse. Ring contexts are passed explicitly (field moduli, block
//! counts, curve equations live in the context, not in the elements).

/// Commutative ring with a distinguished automorphism `Φ`.
pub trait CoeffRing {
    /// Ring element representation.
    type Elem: Clone + PartialEq + std::fmt::Debug;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn is_zero(&self, a: &Self::Elem) -> bool;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    /// The automorphism `Φ` applied once.
    fn phi(&self, a: &Self::Elem) -> Self::Elem;
    /// Multiplicative inverse, `None` when `a` is not a unit (or cannot be
    /// certified to be one).
    fn inv(&self, a: &Self::Elem) -> Option<Self::Elem>;

    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        self.add(a, &self.neg(b))
    }

    /// `Φ^j` by iterated application.
    fn phi_pow(&self, a: &Self::Elem, j: usize) -> Self::Elem {
        let mut out = a.clone();
        for _ in 0..j {
            out = self.phi(&out);
        }
        out
    }
}

/// Determinant of a square matrix over any commutative ring, by the Berkowitz
/// division-free characteristic polynomial algorithm (O(n^4) ring products).
///
/// Entries are row-major: `mat[row][col]`. Division-freeness matters here:
/// coefficient rings include truncated-Laurent products with zero divisors,
/// where elimination-based determinants are unavailable.
pub fn det_berkowitz<R: CoeffRing>(ring: &R, mat: &[Vec<R::Elem>]) -> R::Elem {
    let n = mat.len();
    assert!(mat.iter().all(|row| row.len() == n), "matrix must be square");
    if n == 0 {
        return ring.one();
    }

    // `p` holds the characteristic polynomial of the leading i x i principal
    // submatrix, highest-degree coefficient first, starting with λ - a_00.
    let mut p = vec![ring.one(), ring.neg(&mat[0][0])];
    for i in 1..n {
        // Split the (i+1) x (i+1) principal block as [[m, row], [col, a_ii]]
        // where m is the previous i x i block.
        let a_ii = &mat[i][i];
        let row: Vec<&R::Elem> = (0..i).map(|j| &mat[i][j]).collect();
        let col: Vec<R::Elem> = (0..i).map(|j| mat[j][i].clone()).collect();

        // Toeplitz column: t_0 = 1, t_1 = -a_ii, t_{j+2} = -(row · m^j · col).
        let mut toeplitz = Vec::with_capacity(i + 2);
        toeplitz.push(ring.one());
        toeplitz.push(ring.neg(a_ii));
        let mut w = col;
        for _ in 0..i {
            let mut dot = ring.zero();
            for (rj, wj) in row.iter().zip(w.iter()) {
                dot = ring.add(&dot, &ring.mul(rj, wj));
            }
            toeplitz.push(ring.neg(&dot));
            // w := m · w for the next power.
            let mut next = Vec::with_capacity(i);
            for u in 0..i {
                let mut acc = ring.zero();
                for (v, wv) in w.iter().enumerate() {
                    acc = ring.add(&acc, &ring.mul(&mat[u][v], wv));
                }
                next.push(acc);
            }
            w = next;
        }

        let mut next_p = vec![ring.zero(); i + 2];
        for (u, tu) in toeplitz.iter().enumerate() {
            for (v, pv) in p.iter().enumerate() {
                if u + v <= i + 1 {
                    next_p[u + v] = ring.add(&next_p[u + v], &ring.mul(tu, pv));
                }
            }
        }
        next_p.truncate(i + 2);
        p = next_p;
    }

    // char(λ) = Π (λ - eigenvalue): constant term is (-1)^n det.
    let constant = p[n].clone();
    if n % 2 == 1 {
        ring.neg(&constant)
    } else {
        constant
    }
}
