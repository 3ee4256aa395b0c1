//! The Teichmüller-lift bijection `F_k: GF(4)^{2ℓ} → GR(4,2)^k × GF(4)^{2ℓ−2k}`
//! and the lifted quadric sets `D_{ℓ,j,k}`.
//!
//! Group elements of `Z4^{2k} × Z2^{4ℓ−4k}` are packed little-endian: ring
//! coordinate `i` contributes the Z4 digits `(a, b)` of `a + bξ` as two 2-bit
//! lanes, each remaining field coordinate contributes its GF(4) code as two
//! Z2 bits. With `k = 0` the packing is the field-vector index itself.

use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algebra::{pi, teich_decompose, teich_lift, Gf4, Gr42};
use crate::error::{Error, Result};
use crate::forms::{equivalence_block_inverse, FieldVector, FormSpec};
use crate::params::PdsParams;

/// Largest supported `ℓ`; packed elements use `4ℓ` bits.
pub const MAX_ELL: usize = 8;

/// `Z4^{2k} × Z2^{4ℓ−4k}`, always of order `4^{2ℓ}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct GroupShape {
    ell: usize,
    k: usize,
}

impl GroupShape {
    pub fn new(ell: usize, k: usize) -> Result<Self> {
        if ell == 0 || ell > MAX_ELL {
            return Err(Error::Parameter(format!(
                "ℓ must lie in 1..={MAX_ELL}, got {ell}"
            )));
        }
        if k > ell {
            return Err(Error::Parameter(format!(
                "need k ≤ ℓ, got k = {k}, ℓ = {ell}"
            )));
        }
        Ok(GroupShape { ell, k })
    }

    pub fn ell(&self) -> usize {
        self.ell
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn order(&self) -> usize {
        1usize << (4 * self.ell)
    }

    pub fn z4_digits(&self) -> usize {
        2 * self.k
    }

    pub fn z2_digits(&self) -> usize {
        4 * self.ell - 4 * self.k
    }

    pub fn bits(&self) -> u32 {
        4 * self.ell as u32
    }

    /// Low bit of every Z4 lane.
    #[inline]
    fn z4_low_mask(&self) -> u32 {
        let lanes = (1u64 << (4 * self.k)) - 1;
        (lanes & 0x5555_5555_5555_5555) as u32
    }

    #[inline]
    pub fn add(&self, x: GroupElement, y: GroupElement) -> GroupElement {
        // Z4 lanes: carry from the low bit into the high bit; Z2 bits: xor
        let carry = (x.0 & y.0 & self.z4_low_mask()) << 1;
        GroupElement(x.0 ^ y.0 ^ carry)
    }

    #[inline]
    pub fn neg(&self, x: GroupElement) -> GroupElement {
        GroupElement(x.0 ^ ((x.0 & self.z4_low_mask()) << 1))
    }

    #[inline]
    pub fn sub(&self, x: GroupElement, y: GroupElement) -> GroupElement {
        self.add(x, self.neg(y))
    }

    /// Mixed-radix digits: `2k` base-4 digits then `4ℓ − 4k` base-2 digits.
    pub fn digits(&self, g: GroupElement) -> Vec<u8> {
        let mut out = Vec::with_capacity(self.z4_digits() + self.z2_digits());
        for i in 0..self.z4_digits() {
            out.push(((g.0 >> (2 * i)) & 3) as u8);
        }
        let base = 4 * self.k;
        for i in 0..self.z2_digits() {
            out.push(((g.0 >> (base + i)) & 1) as u8);
        }
        out
    }

    pub fn from_digits(&self, digits: &[u8]) -> Result<GroupElement> {
        let n = self.z4_digits() + self.z2_digits();
        if digits.len() != n {
            return Err(Error::Dimension {
                expected: n,
                got: digits.len(),
            });
        }
        let mut packed = 0u32;
        for (i, d) in digits[..self.z4_digits()].iter().enumerate() {
            if *d > 3 {
                return Err(Error::Domain(format!("Z4 digit {d} out of range")));
            }
            packed |= (*d as u32) << (2 * i);
        }
        let base = 4 * self.k;
        for (i, d) in digits[self.z4_digits()..].iter().enumerate() {
            if *d > 1 {
                return Err(Error::Domain(format!("Z2 digit {d} out of range")));
            }
            packed |= (*d as u32) << (base + i);
        }
        Ok(GroupElement(packed))
    }

    pub fn contains(&self, g: GroupElement) -> bool {
        (g.0 as usize) < self.order()
    }

    /// Display name such as `Z4^2 x Z2^4`.
    pub fn name(&self) -> String {
        match (self.z4_digits(), self.z2_digits()) {
            (0, b) => format!("Z2^{b}"),
            (a, 0) => format!("Z4^{a}"),
            (a, b) => format!("Z4^{a} x Z2^{b}"),
        }
    }
}

/// A packed element of a [`GroupShape`].
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct GroupElement(pub u32);

impl GroupElement {
    pub const IDENTITY: GroupElement = GroupElement(0);

    pub fn packed(self) -> u32 {
        self.0
    }
}

impl fmt::Debug for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "g{}", self.0)
    }
}

/// `F_k`.
pub fn f_k(shape: GroupShape, v: &FieldVector) -> Result<GroupElement> {
    if v.len() != 2 * shape.ell {
        return Err(Error::Dimension {
            expected: 2 * shape.ell,
            got: v.len(),
        });
    }
    Ok(f_k_slice(shape, v.coords()))
}

#[inline]
fn f_k_slice(shape: GroupShape, x: &[Gf4]) -> GroupElement {
    let mut packed = 0u32;
    for i in 0..shape.k {
        let beta = teich_lift(x[2 * i]) + Gr42::TWO * teich_lift(x[2 * i + 1]);
        packed |= (beta.code() as u32) << (4 * i);
    }
    for (m, c) in x.iter().enumerate().skip(2 * shape.k) {
        packed |= (c.code() as u32) << (2 * m);
    }
    GroupElement(packed)
}

/// `F_k` on a packed field-vector index (coordinate `m` in bits `2m..2m+2`).
#[inline]
pub fn f_k_index(shape: GroupShape, index: u32) -> GroupElement {
    let ring_bits = 4 * shape.k;
    let mut packed = if ring_bits >= 32 {
        0
    } else {
        index & !((1u32 << ring_bits) - 1)
    };
    for i in 0..shape.k {
        let x1 = Gf4::from_code(((index >> (4 * i)) & 3) as u8);
        let x2 = Gf4::from_code(((index >> (4 * i + 2)) & 3) as u8);
        let beta = teich_lift(x1) + Gr42::TWO * teich_lift(x2);
        packed |= (beta.code() as u32) << (4 * i);
    }
    GroupElement(packed)
}

/// `F_k^{-1}`: 2-adic decomposition of each ring coordinate, then `π` on both parts.
pub fn f_k_inverse(shape: GroupShape, g: GroupElement) -> Result<FieldVector> {
    if !shape.contains(g) {
        return Err(Error::Domain(format!(
            "element {} outside a group of order {}",
            g.0,
            shape.order()
        )));
    }
    let n = 2 * shape.ell;
    let mut out = Vec::with_capacity(n);
    for i in 0..shape.k {
        let beta = Gr42::from_code(((g.0 >> (4 * i)) & 0xf) as u8);
        let parts = teich_decompose(beta);
        out.push(pi(parts.beta1));
        out.push(pi(parts.beta2));
    }
    for m in 2 * shape.k..n {
        out.push(Gf4::from_code(((g.0 >> (2 * m)) & 3) as u8));
    }
    FieldVector::new(out)
}

/// A lifted quadric set `D_{ℓ,j,k}` together with the parameters it should have.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PdsCandidate {
    shape: GroupShape,
    j: usize,
    elements: Vec<GroupElement>,
    expected: PdsParams,
    epsilon: i8,
}

impl PdsCandidate {
    /// Builds a candidate from raw parts, enforcing the structural invariants
    /// (strictly ascending, in range). Symmetry and identity-freeness are
    /// verifier preconditions and are checked there.
    pub fn from_parts(
        shape: GroupShape,
        j: usize,
        elements: Vec<GroupElement>,
        expected: PdsParams,
        epsilon: i8,
    ) -> Result<Self> {
        if j > shape.ell {
            return Err(Error::Parameter(format!("need j ≤ ℓ, got j = {j}")));
        }
        if epsilon != 1 && epsilon != -1 {
            return Err(Error::Format(format!("epsilon must be ±1, got {epsilon}")));
        }
        if let Some(w) = elements.windows(2).find(|w| w[0] >= w[1]) {
            return Err(Error::Format(format!(
                "elements must be strictly ascending ({} then {})",
                w[0].0, w[1].0
            )));
        }
        if let Some(g) = elements.iter().find(|g| !shape.contains(**g)) {
            return Err(Error::Format(format!(
                "element {} outside a group of order {}",
                g.0,
                shape.order()
            )));
        }
        Ok(PdsCandidate {
            shape,
            j,
            elements,
            expected,
            epsilon,
        })
    }

    pub fn shape(&self) -> GroupShape {
        self.shape
    }

    pub fn j(&self) -> usize {
        self.j
    }

    pub fn elements(&self) -> &[GroupElement] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn expected_params(&self) -> PdsParams {
        self.expected
    }

    pub fn epsilon(&self) -> i8 {
        self.epsilon
    }

    /// Empty candidate whose parameter formula gives `k = 0`.
    pub fn is_degenerate(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn contains(&self, g: GroupElement) -> bool {
        self.elements.binary_search(&g).is_ok()
    }

    pub fn indicator(&self) -> Vec<bool> {
        let mut ind = vec![false; self.shape.order()];
        for g in &self.elements {
            ind[g.0 as usize] = true;
        }
        ind
    }

    /// Checks `0 ∉ D` and `D = −D`.
    pub fn check_symmetric(&self) -> Result<()> {
        if self.contains(GroupElement::IDENTITY) {
            return Err(Error::Precondition(
                "identity belongs to the set (witness 0)".into(),
            ));
        }
        if let Some(g) = self
            .elements
            .iter()
            .find(|g| !self.contains(self.shape.neg(**g)))
        {
            return Err(Error::Precondition(format!(
                "set is not closed under negation: {} present, {} missing (witness {})",
                g.0,
                self.shape.neg(*g).0,
                g.0
            )));
        }
        Ok(())
    }

    /// Same element set with a different claimed parameter set.
    pub fn with_elements(&self, elements: Vec<GroupElement>) -> Result<Self> {
        PdsCandidate::from_parts(self.shape, self.j, elements, self.expected, self.epsilon)
    }

    pub fn to_json(&self) -> String {
        let doc = CandidateDoc {
            ell: self.shape.ell,
            j: self.j,
            k: self.shape.k,
            epsilon: self.epsilon,
            expected_params: self.expected.as_array(),
            elements: self.elements.iter().map(|g| g.0).collect(),
        };
        let mut s = serde_json::to_string(&doc).expect("candidate serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: CandidateDoc =
            serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))?;
        let shape = GroupShape::new(doc.ell, doc.k)?;
        let [v, k, lambda, mu] = doc.expected_params;
        PdsCandidate::from_parts(
            shape,
            doc.j,
            doc.elements.into_iter().map(GroupElement).collect(),
            PdsParams::new(v, k, lambda, mu),
            doc.epsilon,
        )
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CandidateDoc {
    ell: usize,
    j: usize,
    k: usize,
    epsilon: i8,
    expected_params: [i64; 4],
    elements: Vec<u32>,
}

fn check_construction_range(ell: usize, j: usize, k: usize) -> Result<()> {
    if k > j || j > ell {
        return Err(Error::Parameter(format!(
            "need 0 ≤ k ≤ j ≤ ℓ, got ℓ = {ell}, j = {j}, k = {k}"
        )));
    }
    Ok(())
}

/// `D_{ℓ,j,k} = { F_k(x) : x ≠ 0, Q_{ℓ,j}(x) = 0 }`, sorted.
///
/// `k = 0` gives the classical set in the elementary abelian group. For
/// `ℓ = 1`, `j = 1` the set is empty (see [`PdsCandidate::is_degenerate`]).
pub fn build_d(ell: usize, j: usize, k: usize) -> Result<PdsCandidate> {
    check_construction_range(ell, j, k)?;
    let spec = FormSpec::new(ell, j)?;
    let shape = GroupShape::new(ell, k)?;
    let size = shape.order() as u32;
    let mut elements: Vec<GroupElement> = (1..size)
        .into_par_iter()
        .filter(|&i| spec.eval_index(i).is_zero())
        .map(|i| f_k_index(shape, i))
        .collect();
    elements.par_sort_unstable();
    PdsCandidate::from_parts(
        shape,
        j,
        elements,
        PdsParams::for_form(ell, j),
        PdsParams::epsilon_for_form(j),
    )
}

/// Applies the group automorphism `φ` induced by the equivalence
/// substitution, carrying `D_{ℓ,j,k}` onto `D_{ℓ,j−2,k}`.
///
/// `φ` moves only the field coordinates `x_{2j−3} … x_{2j}`, which are never
/// ring coordinates because `k ≤ j − 2`.
pub fn apply_phi(candidate: &PdsCandidate) -> Result<PdsCandidate> {
    let shape = candidate.shape;
    let j = candidate.j;
    if j < 2 || shape.k > j - 2 {
        return Err(Error::Parameter(format!(
            "φ needs k ≤ j − 2, got j = {j}, k = {}",
            shape.k
        )));
    }
    let elements: Vec<GroupElement> = candidate
        .elements
        .iter()
        .map(|g| phi_element(shape, j, *g))
        .collect();
    let mut elements = elements;
    elements.sort_unstable();
    PdsCandidate::from_parts(
        shape,
        j - 2,
        elements,
        PdsParams::for_form(shape.ell, j - 2),
        PdsParams::epsilon_for_form(j - 2),
    )
}

/// `φ` on a single element of the group of `candidate`'s shape.
pub fn phi_element(shape: GroupShape, j: usize, g: GroupElement) -> GroupElement {
    let start = 2 * (2 * j - 4);
    let code = |m: usize| Gf4::from_code(((g.0 >> (start + 2 * m)) & 3) as u8);
    let moved = equivalence_block_inverse(code(0), code(1), code(2), code(3));
    let mut packed = g.0 & !(0xffu32 << start);
    for (m, x) in moved.iter().enumerate() {
        packed |= (x.code() as u32) << (start + 2 * m);
    }
    debug_assert!(shape.contains(GroupElement(packed)));
    GroupElement(packed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forms::{equivalence_map_inverse, q_eval};
    use std::collections::BTreeSet;

    fn fv(codes: &[u8]) -> FieldVector {
        FieldVector::from_codes(codes).unwrap()
    }

    #[test]
    fn group_order_bookkeeping() {
        for ell in 1..=MAX_ELL {
            for k in 0..=ell {
                let s = GroupShape::new(ell, k).unwrap();
                let order = 4u128.pow(s.z4_digits() as u32) * 2u128.pow(s.z2_digits() as u32);
                assert_eq!(order, 4u128.pow(2 * ell as u32));
                assert_eq!(order, s.order() as u128);
            }
        }
        assert!(GroupShape::new(2, 3).is_err());
        assert!(GroupShape::new(0, 0).is_err());
    }

    #[test]
    fn packed_arithmetic_matches_digits() {
        let s = GroupShape::new(2, 1).unwrap();
        for x in 0..256u32 {
            for y in (0..256u32).step_by(3) {
                let (gx, gy) = (GroupElement(x), GroupElement(y));
                let dx = s.digits(gx);
                let dy = s.digits(gy);
                let sum: Vec<u8> = dx
                    .iter()
                    .zip(&dy)
                    .enumerate()
                    .map(|(i, (a, b))| {
                        if i < s.z4_digits() {
                            (a + b) % 4
                        } else {
                            (a + b) % 2
                        }
                    })
                    .collect();
                assert_eq!(s.add(gx, gy), s.from_digits(&sum).unwrap());
            }
            let gx = GroupElement(x);
            assert_eq!(s.add(gx, s.neg(gx)), GroupElement::IDENTITY);
            assert_eq!(s.from_digits(&s.digits(gx)).unwrap(), gx);
        }
    }

    #[test]
    fn f_k_examples() {
        let s = GroupShape::new(2, 1).unwrap();
        let g = f_k(s, &fv(&[2, 1, 0, 0])).unwrap();
        assert_eq!(s.digits(g), vec![2, 1, 0, 0, 0, 0]);
        let s0 = GroupShape::new(2, 0).unwrap();
        for i in 0..256 {
            let v = FieldVector::from_index(i, 4).unwrap();
            assert_eq!(f_k(s0, &v).unwrap(), GroupElement(i));
        }
        assert!(f_k(s, &fv(&[1, 0])).is_err());
    }

    #[test]
    fn f_k_is_bijective_and_inverted() {
        for ell in 1..=3 {
            for k in 0..=ell {
                let s = GroupShape::new(ell, k).unwrap();
                let mut seen = vec![false; s.order()];
                for i in 0..s.order() as u32 {
                    let v = FieldVector::from_index(i, 2 * ell).unwrap();
                    let g = f_k(s, &v).unwrap();
                    assert_eq!(g, f_k_index(s, i));
                    assert!(!seen[g.0 as usize]);
                    seen[g.0 as usize] = true;
                    assert_eq!(f_k_inverse(s, g).unwrap(), v);
                }
            }
        }
    }

    #[test]
    fn f_k_inverse_examples() {
        let s = GroupShape::new(1, 1).unwrap();
        assert!(f_k_inverse(s, GroupElement::IDENTITY).unwrap().is_zero());
        let g = s.from_digits(&[3, 0]).unwrap();
        assert_eq!(f_k_inverse(s, g).unwrap(), fv(&[1, 1]));
        assert!(f_k_inverse(s, GroupElement(16)).is_err());
    }

    #[test]
    fn build_examples() {
        let d = build_d(2, 1, 1).unwrap();
        assert_eq!(d.len(), 51);
        assert_eq!(d.shape().name(), "Z4^2 x Z2^4");
        assert_eq!(d.expected_params(), PdsParams::new(256, 51, 2, 12));
        assert_eq!(d.epsilon(), -1);

        let d = build_d(2, 2, 2).unwrap();
        assert_eq!(d.len(), 75);
        assert_eq!(d.shape().name(), "Z4^4");
        assert_eq!(d.expected_params(), PdsParams::new(256, 75, 26, 20));
        assert_eq!(d.epsilon(), 1);

        let d = build_d(1, 1, 1).unwrap();
        assert!(d.is_empty() && d.is_degenerate());
        assert_eq!(d.expected_params().k, 0);

        assert!(matches!(build_d(2, 1, 2), Err(Error::Parameter(_))));
        assert!(matches!(build_d(2, 3, 1), Err(Error::Parameter(_))));
    }

    #[test]
    fn candidates_are_symmetric_and_sized() {
        for ell in 1..=3 {
            for j in 0..=ell {
                for k in 0..=j {
                    let d = build_d(ell, j, k).unwrap();
                    d.check_symmetric().unwrap();
                    assert_eq!(d.len() as i64, d.expected_params().k, "ℓ={ell} j={j} k={k}");
                    assert!(d.elements().windows(2).all(|w| w[0] < w[1]));
                }
            }
        }
    }

    #[test]
    fn pulled_back_sets_coincide_with_baseline() {
        for ell in 1..=3 {
            for j in 0..=ell {
                let base: BTreeSet<FieldVector> = build_d(ell, j, 0)
                    .unwrap()
                    .elements()
                    .iter()
                    .map(|g| FieldVector::from_index(g.0, 2 * ell).unwrap())
                    .collect();
                for k in 1..=j {
                    let d = build_d(ell, j, k).unwrap();
                    let back: BTreeSet<FieldVector> = d
                        .elements()
                        .iter()
                        .map(|g| f_k_inverse(d.shape(), *g).unwrap())
                        .collect();
                    assert_eq!(back, base);
                }
            }
        }
    }

    #[test]
    fn phi_maps_between_equivalent_sets() {
        assert_eq!(
            apply_phi(&build_d(3, 3, 1).unwrap()).unwrap(),
            build_d(3, 1, 1).unwrap()
        );
        assert_eq!(
            apply_phi(&build_d(2, 2, 0).unwrap()).unwrap(),
            build_d(2, 0, 0).unwrap()
        );
        for ell in 2..=3 {
            for j in 2..=ell {
                for k in 0..=j - 2 {
                    let d = build_d(ell, j, k).unwrap();
                    let image = apply_phi(&d).unwrap();
                    assert_eq!(image.len(), d.len());
                    assert_eq!(image, build_d(ell, j - 2, k).unwrap());
                }
            }
        }
        assert!(apply_phi(&build_d(2, 2, 1).unwrap()).is_err());
        assert!(apply_phi(&build_d(2, 1, 0).unwrap()).is_err());
    }

    #[test]
    fn phi_is_additive_and_agrees_with_field_map() {
        let s = GroupShape::new(3, 1).unwrap();
        let spec = FormSpec::new(3, 3).unwrap();
        for x in (0..s.order() as u32).step_by(37) {
            let gx = GroupElement(x);
            let v = f_k_inverse(s, gx).unwrap();
            let w = equivalence_map_inverse(spec, &v).unwrap();
            assert_eq!(phi_element(s, 3, gx), f_k(s, &w).unwrap());
            assert_eq!(
                q_eval(FormSpec::new(3, 1).unwrap(), &w).unwrap(),
                q_eval(spec, &v).unwrap()
            );
            for y in (0..s.order() as u32).step_by(101) {
                let gy = GroupElement(y);
                assert_eq!(
                    phi_element(s, 3, s.add(gx, gy)),
                    s.add(phi_element(s, 3, gx), phi_element(s, 3, gy))
                );
            }
        }
    }

    #[test]
    fn json_is_canonical() {
        let d = build_d(2, 1, 1).unwrap();
        let text = d.to_json();
        assert!(text.starts_with(
            r#"{"ell":2,"j":1,"k":1,"epsilon":-1,"expected_params":[256,51,2,12],"elements":["#
        ));
        assert!(text.ends_with("]}\n"));
        let back = PdsCandidate::from_json(&text).unwrap();
        assert_eq!(back, d);
        assert_eq!(back.to_json(), text);
    }

    #[test]
    fn json_rejects_unsorted_or_out_of_range() {
        let bad =
            r#"{"ell":1,"j":0,"k":0,"epsilon":1,"expected_params":[16,6,2,2],"elements":[3,1]}"#;
        assert!(matches!(
            PdsCandidate::from_json(bad),
            Err(Error::Format(_))
        ));
        let bad =
            r#"{"ell":1,"j":0,"k":0,"epsilon":1,"expected_params":[16,6,2,2],"elements":[1,16]}"#;
        assert!(matches!(
            PdsCandidate::from_json(bad),
            Err(Error::Format(_))
        ));
        assert!(PdsCandidate::from_json("{").is_err());
    }

    #[test]
    fn symmetry_check_catches_violations() {
        let d = build_d(2, 1, 1).unwrap();
        let mut els = d.elements().to_vec();
        els.push(GroupElement::IDENTITY);
        els.sort();
        assert!(d.with_elements(els).unwrap().check_symmetric().is_err());
        // ring digit 1 has order 4, so {g} alone is not symmetric
        let g = GroupShape::new(2, 1)
            .unwrap()
            .from_digits(&[1, 0, 0, 0, 0, 0])
            .unwrap();
        assert!(d.with_elements(vec![g]).unwrap().check_symmetric().is_err());
    }
}
