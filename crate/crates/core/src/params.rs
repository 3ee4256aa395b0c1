use std::fmt;

use serde::{Deserialize, Serialize};

/// A `(v, k, λ, μ)` parameter tuple.
///
/// Signed so that degenerate formula outputs (e.g. `ℓ = 1`, `j` odd) can be
/// represented and reported instead of wrapping.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PdsParams {
    pub v: i64,
    pub k: i64,
    pub lambda: i64,
    pub mu: i64,
}

impl PdsParams {
    pub const fn new(v: i64, k: i64, lambda: i64, mu: i64) -> Self {
        PdsParams { v, k, lambda, mu }
    }

    /// Parameters of the lifted quadric set for `Q_{ℓ,j}`: negative Latin
    /// square type for `j` odd, Latin square type for `j` even.
    pub fn for_form(ell: usize, j: usize) -> Self {
        let q = 4i64;
        let l = ell as u32;
        let v = q.pow(2 * l);
        // q^{ℓ-1} and q^{2ℓ-2}; ℓ ≥ 1 is enforced by callers
        let r = q.pow(l - 1);
        let r2 = r * r;
        let ql = q.pow(l);
        if j % 2 == 1 {
            PdsParams::new(v, (ql + 1) * (r - 1), r2 - 3 * r - 2, r2 - r)
        } else {
            PdsParams::new(v, (ql - 1) * (r + 1), r2 + 3 * r - 2, r2 + r)
        }
    }

    /// `+1` (Latin square type) for `j` even, `-1` for `j` odd.
    pub fn epsilon_for_form(j: usize) -> i8 {
        if j % 2 == 1 {
            -1
        } else {
            1
        }
    }

    /// The counting identity `k(k − λ − 1) = (v − k − 1)μ`.
    pub fn satisfies_counting_identity(&self) -> bool {
        self.k * (self.k - self.lambda - 1) == (self.v - self.k - 1) * self.mu
    }

    /// Parameters of the complementary set / graph.
    pub fn complement(&self) -> Self {
        let PdsParams { v, k, lambda, mu } = *self;
        PdsParams::new(v, v - k - 1, v - 2 - 2 * k + mu, v - 2 * k + lambda)
    }

    pub fn as_array(&self) -> [i64; 4] {
        [self.v, self.k, self.lambda, self.mu]
    }
}

impl fmt::Display for PdsParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {}, {})", self.v, self.k, self.lambda, self.mu)
    }
}
