//! Exact arithmetic in GF(4) and in the Galois ring GR(4,2) = Z4[ξ]/(ξ² + ξ + 1).
//!
//! The residue map `π: GR(4,2) → GF(4)` is pinned by `π(ξ) = α`, and the
//! Teichmüller set is `T = {0, 1, ξ, ξ²}`. Every ring element has a unique
//! 2-adic form `β₁ + 2β₂` with `β₁, β₂ ∈ T`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex;

/// Exact Gaussian integer used for every character value and sum.
pub type Gaussian = Complex<i64>;

/// `i^e` for an exponent taken mod 4.
#[inline]
pub fn i_pow(e: u32) -> Gaussian {
    match e & 3 {
        0 => Complex::new(1, 0),
        1 => Complex::new(0, 1),
        2 => Complex::new(-1, 0),
        _ => Complex::new(0, -1),
    }
}

/// An element of GF(4) in the two-bit code `b₁·α + b₀`: 0, 1, α = 2, α² = 3.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Gf4(u8);

const fn gf4_mul_slow(x: u8, y: u8) -> u8 {
    // (x1 α + x0)(y1 α + y0) with α² = α + 1
    let (x0, x1) = (x & 1, (x >> 1) & 1);
    let (y0, y1) = (y & 1, (y >> 1) & 1);
    let hi = x1 & y1;
    let c0 = (x0 & y0) ^ hi;
    let c1 = (x0 & y1) ^ (x1 & y0) ^ hi;
    c0 | (c1 << 1)
}

const GF4_MUL: [[u8; 4]; 4] = {
    let mut t = [[0u8; 4]; 4];
    let mut x = 0;
    while x < 4 {
        let mut y = 0;
        while y < 4 {
            t[x][y] = gf4_mul_slow(x as u8, y as u8);
            y += 1;
        }
        x += 1;
    }
    t
};

impl Gf4 {
    pub const ZERO: Gf4 = Gf4(0);
    pub const ONE: Gf4 = Gf4(1);
    pub const ALPHA: Gf4 = Gf4(2);
    pub const ALPHA2: Gf4 = Gf4(3);
    pub const ALL: [Gf4; 4] = [Gf4(0), Gf4(1), Gf4(2), Gf4(3)];

    /// Builds an element from its two-bit code. Panics on codes above 3.
    #[inline]
    pub const fn from_code(code: u8) -> Gf4 {
        assert!(code < 4, "GF(4) code out of range");
        Gf4(code)
    }

    #[inline]
    pub const fn code(self) -> u8 {
        self.0
    }

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inverse(self) -> Option<Gf4> {
        match self.0 {
            0 => None,
            1 => Some(Gf4(1)),
            2 => Some(Gf4(3)),
            _ => Some(Gf4(2)),
        }
    }

    #[inline]
    pub fn square(self) -> Gf4 {
        self * self
    }

    /// Absolute trace `x + x²` into F₂.
    #[inline]
    pub fn tr(self) -> u8 {
        (self + self.square()).0
    }
}

/// Field multiplication.
#[inline]
pub fn gf4_mul(x: Gf4, y: Gf4) -> Gf4 {
    Gf4(GF4_MUL[x.0 as usize][y.0 as usize])
}

/// Absolute trace GF(4) → F₂.
#[inline]
pub fn gf4_tr(x: Gf4) -> u8 {
    x.tr()
}

impl Add for Gf4 {
    type Output = Gf4;
    #[inline]
    fn add(self, rhs: Gf4) -> Gf4 {
        #[allow(clippy::suspicious_arithmetic_impl)]
        Gf4(self.0 ^ rhs.0)
    }
}

impl Sub for Gf4 {
    type Output = Gf4;
    #[inline]
    fn sub(self, rhs: Gf4) -> Gf4 {
        #[allow(clippy::suspicious_arithmetic_impl)]
        Gf4(self.0 ^ rhs.0)
    }
}

impl Mul for Gf4 {
    type Output = Gf4;
    #[inline]
    fn mul(self, rhs: Gf4) -> Gf4 {
        gf4_mul(self, rhs)
    }
}

impl fmt::Debug for Gf4 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Gf4 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self.0 {
            0 => "0",
            1 => "1",
            2 => "α",
            _ => "α²",
        })
    }
}

/// An element `a + bξ` of GR(4,2), with `a, b ∈ Z4`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Gr42 {
    a: u8,
    b: u8,
}

const fn gr_mul_slow(x: u8, y: u8) -> u8 {
    // (a + bξ)(c + dξ) = ac + 3bd + (ad + bc + 3bd)ξ, using ξ² = 3 + 3ξ
    let (a, b) = (x & 3, x >> 2);
    let (c, d) = (y & 3, y >> 2);
    let lo = (a * c + 3 * b * d) & 3;
    let hi = (a * d + b * c + 3 * b * d) & 3;
    lo | (hi << 2)
}

const GR_MUL: [[u8; 16]; 16] = {
    let mut t = [[0u8; 16]; 16];
    let mut x = 0;
    while x < 16 {
        let mut y = 0;
        while y < 16 {
            t[x][y] = gr_mul_slow(x as u8, y as u8);
            y += 1;
        }
        x += 1;
    }
    t
};

impl Gr42 {
    pub const ZERO: Gr42 = Gr42 { a: 0, b: 0 };
    pub const ONE: Gr42 = Gr42 { a: 1, b: 0 };
    pub const TWO: Gr42 = Gr42 { a: 2, b: 0 };
    pub const XI: Gr42 = Gr42 { a: 0, b: 1 };
    pub const XI2: Gr42 = Gr42 { a: 3, b: 3 };
    /// The Teichmüller set, indexed by the GF(4) code of its image under `π`.
    pub const TEICHMULLER: [Gr42; 4] = [Gr42::ZERO, Gr42::ONE, Gr42::XI, Gr42::XI2];

    /// `a + bξ`, coefficients reduced mod 4.
    #[inline]
    pub const fn new(a: u8, b: u8) -> Gr42 {
        Gr42 { a: a & 3, b: b & 3 }
    }

    #[inline]
    pub const fn from_int(n: u8) -> Gr42 {
        Gr42::new(n, 0)
    }

    /// Packed 4-bit code `a | b << 2`.
    #[inline]
    pub const fn code(self) -> u8 {
        self.a | (self.b << 2)
    }

    #[inline]
    pub const fn from_code(code: u8) -> Gr42 {
        Gr42 {
            a: code & 3,
            b: (code >> 2) & 3,
        }
    }

    /// All 16 ring elements in code order.
    pub fn all() -> impl Iterator<Item = Gr42> {
        (0u8..16).map(Gr42::from_code)
    }

    #[inline]
    pub const fn a(self) -> u8 {
        self.a
    }

    #[inline]
    pub const fn b(self) -> u8 {
        self.b
    }

    pub fn is_teichmuller(self) -> bool {
        Gr42::TEICHMULLER.contains(&self)
    }

    /// Membership in the maximal ideal 2R.
    pub fn is_in_maximal_ideal(self) -> bool {
        self.a & 1 == 0 && self.b & 1 == 0
    }

    pub fn pow(self, mut e: u32) -> Gr42 {
        let mut base = self;
        let mut acc = Gr42::ONE;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base;
            }
            base = base * base;
            e >>= 1;
        }
        acc
    }
}

#[inline]
pub fn gr_mul(x: Gr42, y: Gr42) -> Gr42 {
    Gr42::from_code(GR_MUL[x.code() as usize][y.code() as usize])
}

#[inline]
pub fn gr_negate(x: Gr42) -> Gr42 {
    Gr42::new(4 - x.a, 4 - x.b)
}

/// Frobenius automorphism `β₁ + 2β₂ ↦ β₁² + 2β₂²`.
pub fn gr_frobenius(x: Gr42) -> Gr42 {
    let TeichPair { beta1, beta2 } = teich_decompose(x);
    beta1 * beta1 + Gr42::TWO * (beta2 * beta2)
}

/// Galois-ring trace `x + f(x)`, a residue mod 4.
pub fn gr_trace(x: Gr42) -> u8 {
    let t = x + gr_frobenius(x);
    debug_assert_eq!(t.b, 0, "trace must land in Z4");
    t.a
}

/// Reduction mod 2R with `π(ξ) = α`.
#[inline]
pub fn pi(x: Gr42) -> Gf4 {
    Gf4((x.a & 1) | ((x.b & 1) << 1))
}

/// Teichmüller lift `π_T^{-1}`.
#[inline]
pub fn teich_lift(x: Gf4) -> Gr42 {
    Gr42::TEICHMULLER[x.code() as usize]
}

/// The 2-adic components of a ring element.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TeichPair {
    pub beta1: Gr42,
    pub beta2: Gr42,
}

impl TeichPair {
    /// `beta1 + 2·beta2`.
    pub fn reconstruct(self) -> Gr42 {
        self.beta1 + Gr42::TWO * self.beta2
    }
}

pub fn teich_decompose(x: Gr42) -> TeichPair {
    let beta1 = teich_lift(pi(x));
    let diff = x - beta1;
    debug_assert!(diff.is_in_maximal_ideal());
    // any γ with 2γ = diff has the same residue
    let gamma = Gr42::new(diff.a >> 1, diff.b >> 1);
    TeichPair {
        beta1,
        beta2: teich_lift(pi(gamma)),
    }
}

impl Add for Gr42 {
    type Output = Gr42;
    #[inline]
    fn add(self, rhs: Gr42) -> Gr42 {
        Gr42::new(self.a + rhs.a, self.b + rhs.b)
    }
}

impl Sub for Gr42 {
    type Output = Gr42;
    #[inline]
    fn sub(self, rhs: Gr42) -> Gr42 {
        #[allow(clippy::suspicious_arithmetic_impl)]
        let d = self + gr_negate(rhs);
        d
    }
}

impl Neg for Gr42 {
    type Output = Gr42;
    #[inline]
    fn neg(self) -> Gr42 {
        gr_negate(self)
    }
}

impl Mul for Gr42 {
    type Output = Gr42;
    #[inline]
    fn mul(self, rhs: Gr42) -> Gr42 {
        gr_mul(self, rhs)
    }
}

impl fmt::Debug for Gr42 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Gr42 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}+{}ξ", self.a, self.b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn all_gf4() -> [Gf4; 4] {
        Gf4::ALL
    }

    #[test]
    fn gf4_products() {
        assert_eq!(gf4_mul(Gf4::ALPHA, Gf4::ALPHA), Gf4::ALPHA2);
        assert_eq!(gf4_mul(Gf4::ALPHA, Gf4::ALPHA2), Gf4::ONE);
        assert_eq!(gf4_mul(Gf4::ZERO, Gf4::ALPHA), Gf4::ZERO);
        assert_eq!(Gf4::ALPHA2, Gf4::ALPHA + Gf4::ONE);
    }

    #[test]
    fn gf4_field_axioms() {
        for x in all_gf4() {
            for y in all_gf4() {
                assert_eq!(x * y, y * x);
                for z in all_gf4() {
                    assert_eq!(x * (y + z), x * y + x * z);
                    assert_eq!((x * y) * z, x * (y * z));
                }
            }
            if let Some(inv) = x.inverse() {
                assert_eq!(x * inv, Gf4::ONE);
            } else {
                assert!(x.is_zero());
            }
        }
        // α generates the cyclic group of order 3
        let a = Gf4::ALPHA;
        assert_ne!(a, Gf4::ONE);
        assert_ne!(a * a, Gf4::ONE);
        assert_eq!(a * a * a, Gf4::ONE);
    }

    #[test]
    fn gf4_trace_values() {
        assert_eq!(gf4_tr(Gf4::ZERO), 0);
        assert_eq!(gf4_tr(Gf4::ONE), 0);
        assert_eq!(gf4_tr(Gf4::ALPHA), 1);
        assert_eq!(gf4_tr(Gf4::ALPHA2), 1);
    }

    #[test]
    fn gr_products() {
        assert_eq!(Gr42::XI * Gr42::XI, Gr42::new(3, 3));
        assert_eq!(Gr42::XI * Gr42::XI2, Gr42::ONE);
        assert_eq!(Gr42::TWO * Gr42::TWO, Gr42::ZERO);
        // ξ is a root of x² + x + 1
        assert_eq!(Gr42::XI * Gr42::XI + Gr42::XI + Gr42::ONE, Gr42::ZERO);
    }

    #[test]
    fn gr_ring_axioms() {
        for x in Gr42::all() {
            assert_eq!(x + (-x), Gr42::ZERO);
            for y in Gr42::all() {
                assert_eq!(x * y, y * x);
                for z in Gr42::all() {
                    assert_eq!(x * (y + z), x * y + x * z);
                    assert_eq!((x * y) * z, x * (y * z));
                }
            }
        }
    }

    #[test]
    fn xi_has_order_three() {
        assert_ne!(Gr42::XI, Gr42::ONE);
        assert_ne!(Gr42::XI.pow(2), Gr42::ONE);
        assert_eq!(Gr42::XI.pow(3), Gr42::ONE);
    }

    #[test]
    fn maximal_ideal_is_twice_the_ring() {
        let doubled: std::collections::BTreeSet<_> = Gr42::all().map(|x| Gr42::TWO * x).collect();
        let ideal: std::collections::BTreeSet<_> =
            Gr42::all().filter(|x| x.is_in_maximal_ideal()).collect();
        assert_eq!(doubled, ideal);
        assert_eq!(ideal.len(), 4);
        // elements outside 2R are units
        for x in Gr42::all().filter(|x| !x.is_in_maximal_ideal()) {
            assert!(Gr42::all().any(|y| x * y == Gr42::ONE), "{x} not a unit");
        }
    }

    #[test]
    fn frobenius_examples() {
        assert_eq!(gr_frobenius(Gr42::XI), Gr42::XI2);
        let x = Gr42::ONE + Gr42::TWO * Gr42::XI;
        assert_eq!(gr_frobenius(x), Gr42::ONE + Gr42::TWO * Gr42::XI2);
        assert_eq!(gr_frobenius(Gr42::TWO), Gr42::TWO);
    }

    #[test]
    fn frobenius_is_ring_automorphism_of_order_two() {
        for x in Gr42::all() {
            assert_eq!(gr_frobenius(gr_frobenius(x)), x);
            // agrees with the substitution ξ ↦ ξ²
            let sub = Gr42::from_int(x.a()) + Gr42::from_int(x.b()) * Gr42::XI2;
            assert_eq!(gr_frobenius(x), sub);
            for y in Gr42::all() {
                assert_eq!(gr_frobenius(x * y), gr_frobenius(x) * gr_frobenius(y));
                assert_eq!(gr_frobenius(x + y), gr_frobenius(x) + gr_frobenius(y));
            }
        }
    }

    #[test]
    fn trace_values() {
        assert_eq!(gr_trace(Gr42::ONE), 2);
        assert_eq!(gr_trace(Gr42::XI), 3);
        assert_eq!(gr_trace(Gr42::ZERO), 0);
        assert_eq!(gr_trace(Gr42::XI2), 3);
        let even: Vec<_> = Gr42::TEICHMULLER[1..]
            .iter()
            .filter(|t| gr_trace(**t).is_multiple_of(2))
            .collect();
        assert_eq!(even, vec![&Gr42::ONE]);
    }

    #[test]
    fn trace_commutes_with_reduction() {
        for x in Gr42::all() {
            assert_eq!(gf4_tr(pi(x)), gr_trace(x) & 1, "x = {x}");
        }
    }

    #[test]
    fn order_two_trace_character() {
        for x in Gr42::all() {
            let lhs = i_pow(gr_trace(Gr42::TWO * x) as u32);
            let rhs = if gf4_tr(pi(x)) == 0 { 1 } else { -1 };
            assert_eq!(lhs, Complex::new(rhs, 0));
        }
    }

    #[test]
    fn reduction_examples() {
        assert_eq!(pi(Gr42::XI), Gf4::ALPHA);
        // π(2) + π(3)·π(ξ) = 0 + α
        assert_eq!(pi(Gr42::new(2, 3)), Gf4::ALPHA);
        assert_eq!(pi(Gr42::new(0, 2)), Gf4::ZERO);
    }

    #[test]
    fn reduction_is_ring_homomorphism() {
        for x in Gr42::all() {
            for y in Gr42::all() {
                assert_eq!(pi(x + y), pi(x) + pi(y));
                assert_eq!(pi(x * y), pi(x) * pi(y));
            }
        }
    }

    #[test]
    fn lift_examples() {
        assert_eq!(teich_lift(Gf4::ALPHA), Gr42::XI);
        assert_eq!(teich_lift(Gf4::ALPHA2), Gr42::new(3, 3));
        assert_eq!(teich_lift(Gf4::ZERO), Gr42::ZERO);
        for x in Gf4::ALL {
            assert_eq!(pi(teich_lift(x)), x);
        }
    }

    #[test]
    fn teichmuller_units_are_cube_roots() {
        let mut roots: Vec<_> = Gr42::all().filter(|x| x.pow(3) == Gr42::ONE).collect();
        roots.sort();
        let mut expected = vec![Gr42::ONE, Gr42::XI, Gr42::XI2];
        expected.sort();
        assert_eq!(roots, expected);
    }

    #[test]
    fn decompose_examples() {
        let d = teich_decompose(Gr42::from_int(3));
        assert_eq!((d.beta1, d.beta2), (Gr42::ONE, Gr42::ONE));
        let d = teich_decompose(Gr42::new(2, 1));
        assert_eq!((d.beta1, d.beta2), (Gr42::XI, Gr42::ONE));
        let d = teich_decompose(Gr42::XI2);
        assert_eq!((d.beta1, d.beta2), (Gr42::XI2, Gr42::ZERO));
    }

    #[test]
    fn decompose_is_bijective() {
        for x in Gr42::all() {
            let d = teich_decompose(x);
            assert!(d.beta1.is_teichmuller() && d.beta2.is_teichmuller());
            assert_eq!(d.reconstruct(), x);
        }
        for beta1 in Gr42::TEICHMULLER {
            for beta2 in Gr42::TEICHMULLER {
                let pair = TeichPair { beta1, beta2 };
                assert_eq!(teich_decompose(pair.reconstruct()), pair);
            }
        }
    }

    #[test]
    fn negation() {
        assert_eq!(-Gr42::ONE, Gr42::from_int(3));
        assert_eq!(
            teich_decompose(-Gr42::ONE).reconstruct(),
            Gr42::ONE + Gr42::TWO
        );
        let two_xi = Gr42::TWO * Gr42::XI;
        assert_eq!(-two_xi, two_xi);
        let neg_xi = -Gr42::XI;
        assert_eq!(neg_xi, Gr42::XI + Gr42::TWO * teich_lift(pi(Gr42::XI)));
        assert_eq!(Gr42::XI + neg_xi, Gr42::ZERO);
    }

    #[test]
    fn negation_in_two_adic_form() {
        for x in Gr42::all() {
            let TeichPair { beta1, beta2 } = teich_decompose(x);
            let n = teich_decompose(-x);
            assert_eq!(n.beta1, beta1);
            assert_eq!(pi(n.beta2), pi(beta1) + pi(beta2));
        }
    }
}
