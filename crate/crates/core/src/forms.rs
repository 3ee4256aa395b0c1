//! The quadratic forms `Q_{ℓ,j}` on GF(4)^{2ℓ}: `j` elliptic blocks
//! `αx² + xy + y²` followed by `ℓ − j` hyperbolic blocks `xy`.
//!
//! Also hosts the projective machinery used to check the two- and
//! three-intersection patterns of the associated quadrics.

use std::collections::BTreeMap;
use std::fmt;

use rayon::prelude::*;

use crate::algebra::Gf4;
use crate::error::{Error, Result};
use crate::params::PdsParams;

const Q: u64 = 4;

/// A vector over GF(4) of even length `2ℓ ≥ 2`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FieldVector(Vec<Gf4>);

impl FieldVector {
    pub fn new(coords: Vec<Gf4>) -> Result<Self> {
        if coords.len() < 2 || !coords.len().is_multiple_of(2) {
            return Err(Error::Domain(format!(
                "field vectors need an even length of at least 2, got {}",
                coords.len()
            )));
        }
        Ok(FieldVector(coords))
    }

    pub fn from_codes(codes: &[u8]) -> Result<Self> {
        if let Some(c) = codes.iter().find(|c| **c > 3) {
            return Err(Error::Domain(format!("GF(4) code {c} out of range")));
        }
        FieldVector::new(codes.iter().map(|c| Gf4::from_code(*c)).collect())
    }

    pub fn zero(len: usize) -> Result<Self> {
        FieldVector::new(vec![Gf4::ZERO; len])
    }

    /// Unit vector `e_i` (1-based, matching the coordinate names `x₁ … x_{2ℓ}`).
    pub fn unit(len: usize, i: usize) -> Result<Self> {
        let mut v = FieldVector::zero(len)?;
        if i == 0 || i > len {
            return Err(Error::Domain(format!("unit index {i} outside 1..={len}")));
        }
        v.0[i - 1] = Gf4::ONE;
        Ok(v)
    }

    /// Decodes the packed index used for enumeration: coordinate `m`
    /// (0-based) occupies bits `2m..2m+2`.
    pub fn from_index(index: u32, len: usize) -> Result<Self> {
        FieldVector::new(unpack(index, len))
    }

    pub fn to_index(&self) -> u32 {
        pack(&self.0)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn ell(&self) -> usize {
        self.0.len() / 2
    }

    pub fn coords(&self) -> &[Gf4] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|x| x.is_zero())
    }

    pub fn add(&self, other: &FieldVector) -> Result<FieldVector> {
        check_len(other.len(), self.len())?;
        Ok(FieldVector(
            self.0.iter().zip(&other.0).map(|(a, b)| *a + *b).collect(),
        ))
    }

    pub fn scale(&self, c: Gf4) -> FieldVector {
        FieldVector(self.0.iter().map(|x| c * *x).collect())
    }
}

impl fmt::Debug for FieldVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.0.iter()).finish()
    }
}

pub(crate) fn unpack(index: u32, len: usize) -> Vec<Gf4> {
    (0..len)
        .map(|m| Gf4::from_code(((index >> (2 * m)) & 3) as u8))
        .collect()
}

pub(crate) fn pack(coords: &[Gf4]) -> u32 {
    coords
        .iter()
        .enumerate()
        .fold(0u32, |acc, (m, x)| acc | ((x.code() as u32) << (2 * m)))
}

fn check_len(got: usize, expected: usize) -> Result<()> {
    if got != expected {
        Err(Error::Dimension { expected, got })
    } else {
        Ok(())
    }
}

/// Selects `Q_{ℓ,j}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct FormSpec {
    ell: usize,
    j: usize,
}

impl FormSpec {
    pub fn new(ell: usize, j: usize) -> Result<Self> {
        if ell == 0 {
            return Err(Error::Parameter("ℓ must be at least 1".into()));
        }
        if j > ell {
            return Err(Error::Parameter(format!(
                "need j ≤ ℓ, got j = {j}, ℓ = {ell}"
            )));
        }
        Ok(FormSpec { ell, j })
    }

    pub fn ell(&self) -> usize {
        self.ell
    }

    pub fn j(&self) -> usize {
        self.j
    }

    pub fn dim(&self) -> usize {
        2 * self.ell
    }

    /// Number of vectors in GF(4)^{2ℓ}.
    pub fn space_size(&self) -> u64 {
        Q.pow(self.dim() as u32)
    }

    /// Evaluates the form on raw coordinates; the caller guarantees the length.
    #[inline]
    pub(crate) fn eval_slice(&self, x: &[Gf4]) -> Gf4 {
        let mut acc = Gf4::ZERO;
        for (blk, pair) in x.chunks_exact(2).enumerate() {
            let (a, b) = (pair[0], pair[1]);
            acc = acc + a * b;
            if blk < self.j {
                acc = acc + Gf4::ALPHA * a.square() + b.square();
            }
        }
        acc
    }

    /// Evaluates the form on a packed index (see [`FieldVector::from_index`]).
    #[inline]
    pub fn eval_index(&self, index: u32) -> Gf4 {
        let mut acc = Gf4::ZERO;
        for blk in 0..self.ell {
            let a = Gf4::from_code(((index >> (4 * blk)) & 3) as u8);
            let b = Gf4::from_code(((index >> (4 * blk + 2)) & 3) as u8);
            acc = acc + a * b;
            if blk < self.j {
                acc = acc + Gf4::ALPHA * a.square() + b.square();
            }
        }
        acc
    }
}

/// `Q_{ℓ,j}(v)`.
pub fn q_eval(spec: FormSpec, v: &FieldVector) -> Result<Gf4> {
    check_len(v.len(), spec.dim())?;
    Ok(spec.eval_slice(v.coords()))
}

/// The polar form `B(u, v) = Q(u + v) − Q(u) − Q(v)`.
pub fn bilinear(spec: FormSpec, u: &FieldVector, v: &FieldVector) -> Result<Gf4> {
    check_len(u.len(), spec.dim())?;
    check_len(v.len(), spec.dim())?;
    let sum = u.add(v)?;
    Ok(q_eval(spec, &sum)? - q_eval(spec, u)? - q_eval(spec, v)?)
}

/// Closed-form symplectic pairing `Σ (x_{2i−1}x'_{2i} + x_{2i}x'_{2i−1})`.
pub fn symplectic(u: &FieldVector, v: &FieldVector) -> Result<Gf4> {
    check_len(v.len(), u.len())?;
    Ok(u.coords()
        .chunks_exact(2)
        .zip(v.coords().chunks_exact(2))
        .fold(Gf4::ZERO, |acc, (a, b)| acc + a[0] * b[1] + a[1] * b[0]))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FormType {
    Elliptic,
    Hyperbolic,
}

impl FormType {
    pub fn epsilon(self) -> i8 {
        match self {
            FormType::Elliptic => -1,
            FormType::Hyperbolic => 1,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            FormType::Elliptic => "elliptic",
            FormType::Hyperbolic => "hyperbolic",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Classification {
    pub form_type: FormType,
    /// Number of zeros in GF(4)^{2ℓ}, the zero vector included.
    pub zero_count: u64,
}

/// `q^{2ℓ−1} + ε(q−1)q^{ℓ−1}`.
pub fn expected_zero_count(ell: usize, form_type: FormType) -> u64 {
    let l = ell as u32;
    let main = Q.pow(2 * l - 1);
    let shift = (Q - 1) * Q.pow(l - 1);
    match form_type {
        FormType::Elliptic => main - shift,
        FormType::Hyperbolic => main + shift,
    }
}

/// Counts zeros of the form over the whole space.
pub fn zero_count(spec: FormSpec) -> u64 {
    let size = spec.space_size() as u32;
    (0..size)
        .into_par_iter()
        .filter(|&i| spec.eval_index(i).is_zero())
        .count() as u64
}

/// Type by parity of `j`, confirmed against an exhaustive zero count.
pub fn classify(spec: FormSpec) -> Result<Classification> {
    let by_parity = if spec.j % 2 == 1 {
        FormType::Elliptic
    } else {
        FormType::Hyperbolic
    };
    let zeros = zero_count(spec);
    if zeros != expected_zero_count(spec.ell, by_parity) {
        return Err(Error::ClassificationMismatch {
            ell: spec.ell,
            j: spec.j,
            by_parity: by_parity.name(),
            zero_count: zeros,
        });
    }
    Ok(Classification {
        form_type: by_parity,
        zero_count: zeros,
    })
}

fn block_range(spec: FormSpec) -> Result<usize> {
    if spec.j < 2 {
        return Err(Error::Domain(format!(
            "equivalence map needs j ≥ 2, got j = {}",
            spec.j
        )));
    }
    // 0-based index of x_{2j−3}
    Ok(2 * spec.j - 4)
}

/// The linear substitution `x = M x'` with `Q_{ℓ,j}(M x') = Q_{ℓ,j−2}(x')`.
///
/// Only `x_{2j−3} … x_{2j}` move:
/// `x_{2j−3} = x'_{2j−3} + x'_{2j−1} + x'_{2j}`, `x_{2j−2} = αx'_{2j−3} + x'_{2j−2}`,
/// `x_{2j−1} = x'_{2j−1} + x'_{2j}`, `x_{2j} = αx'_{2j−3} + x'_{2j−2} + x'_{2j}`.
pub fn equivalence_map(spec: FormSpec, v: &FieldVector) -> Result<FieldVector> {
    let s = block_range(spec)?;
    check_len(v.len(), spec.dim())?;
    let mut out = v.coords().to_vec();
    let [a, b, c, d]: [Gf4; 4] = v.coords()[s..s + 4].try_into().expect("4 coords");
    out[s..s + 4].copy_from_slice(&equivalence_block(a, b, c, d));
    Ok(FieldVector(out))
}

/// Inverse of [`equivalence_map`]: carries zeros of `Q_{ℓ,j}` to zeros of `Q_{ℓ,j−2}`.
pub fn equivalence_map_inverse(spec: FormSpec, v: &FieldVector) -> Result<FieldVector> {
    let s = block_range(spec)?;
    check_len(v.len(), spec.dim())?;
    let mut out = v.coords().to_vec();
    let [x1, x2, x3, x4]: [Gf4; 4] = v.coords()[s..s + 4].try_into().expect("4 coords");
    out[s..s + 4].copy_from_slice(&equivalence_block_inverse(x1, x2, x3, x4));
    Ok(FieldVector(out))
}

#[inline]
pub(crate) fn equivalence_block(a: Gf4, b: Gf4, c: Gf4, d: Gf4) -> [Gf4; 4] {
    let aa = Gf4::ALPHA * a;
    [a + c + d, aa + b, c + d, aa + b + d]
}

#[inline]
pub(crate) fn equivalence_block_inverse(x1: Gf4, x2: Gf4, x3: Gf4, x4: Gf4) -> [Gf4; 4] {
    let a = x1 + x3;
    let b = x2 + Gf4::ALPHA * a;
    let d = x4 + x2;
    let c = x3 + d;
    [a, b, c, d]
}

/// Replaces `x_{2i}` by `x_{2i−1} + x_{2i}` inside elliptic block `i` (1-based).
pub fn pair_flip(spec: FormSpec, v: &FieldVector, i: usize) -> Result<FieldVector> {
    if i == 0 || i > spec.j {
        return Err(Error::Domain(format!(
            "block index {i} outside 1..={}",
            spec.j
        )));
    }
    check_len(v.len(), spec.dim())?;
    let mut out = v.coords().to_vec();
    out[2 * i - 1] = out[2 * i - 2] + out[2 * i - 1];
    Ok(FieldVector(out))
}

/// Rank of a set of row vectors over GF(4).
pub fn rank_gf4(rows: &[Vec<Gf4>]) -> usize {
    let mut m: Vec<Vec<Gf4>> = rows.to_vec();
    let cols = m.first().map_or(0, |r| r.len());
    let mut rank = 0;
    for col in 0..cols {
        let Some(pivot) = (rank..m.len()).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(rank, pivot);
        let inv = m[rank][col].inverse().expect("nonzero pivot");
        for x in m[rank].iter_mut() {
            *x = *x * inv;
        }
        for r in 0..m.len() {
            if r != rank && !m[r][col].is_zero() {
                let f = m[r][col];
                let pivot_row = m[rank].clone();
                for (x, p) in m[r].iter_mut().zip(pivot_row) {
                    *x = *x + f * p;
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Dimension of the radical of the polar form, i.e. the kernel of `v ↦ B(v, ·)`.
pub fn radical_dimension(spec: FormSpec) -> Result<usize> {
    let n = spec.dim();
    let basis: Vec<FieldVector> = (1..=n)
        .map(|i| FieldVector::unit(n, i))
        .collect::<Result<_>>()?;
    let mut gram = Vec::with_capacity(n);
    for u in &basis {
        let row = basis
            .iter()
            .map(|v| bilinear(spec, u, v))
            .collect::<Result<Vec<_>>>()?;
        gram.push(row);
    }
    Ok(n - rank_gf4(&gram))
}

/// Zeros of `Q_{ℓ,j}(0, x₂, …, x_{2ℓ})` over GF(4)^{2ℓ−1}, zero vector included.
/// The section is parabolic only for `j ≥ 1`.
pub fn restricted_zero_count(spec: FormSpec) -> u64 {
    let size = Q.pow(spec.dim() as u32 - 1) as u32;
    (0..size)
        .into_par_iter()
        .filter(|&i| spec.eval_index(i << 2).is_zero())
        .count() as u64
}

/// A set of points of PG(m−1, 4), each stored as its normalized coordinate
/// vector (first nonzero coordinate equal to 1).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PointSet {
    dim: usize,
    points: Vec<Vec<Gf4>>,
}

impl PointSet {
    pub fn new(dim: usize, mut points: Vec<Vec<Gf4>>) -> Result<Self> {
        for p in points.iter_mut() {
            if p.len() != dim {
                return Err(Error::Dimension {
                    expected: dim,
                    got: p.len(),
                });
            }
            *p = normalize(p).ok_or_else(|| Error::Domain("zero vector is not a point".into()))?;
        }
        points.sort();
        points.dedup();
        Ok(PointSet { dim, points })
    }

    /// Vector-space dimension `m` of the ambient PG(m−1, 4).
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Vec<Gf4>] {
        &self.points
    }
}

/// Scales a nonzero vector so its first nonzero coordinate is 1. This is
/// also the lexicographically least of its nonzero scalar multiples.
pub fn normalize(v: &[Gf4]) -> Option<Vec<Gf4>> {
    let lead = v.iter().find(|x| !x.is_zero())?;
    let inv = lead.inverse()?;
    Some(v.iter().map(|x| inv * *x).collect())
}

/// All points of PG(m−1, 4) in canonical order.
pub fn projective_points(m: usize) -> Vec<Vec<Gf4>> {
    let size = Q.pow(m as u32) as u32;
    (1..size)
        .map(|i| unpack(i, m))
        .filter(|v| v.iter().find(|x| !x.is_zero()) == Some(&Gf4::ONE))
        .collect()
}

/// The quadric of `Q_{ℓ,j}` in PG(2ℓ−1, 4), or with `restrict_x1` the
/// parabolic section `x₁ = 0` viewed in PG(2ℓ−2, 4).
pub fn quadric(spec: FormSpec, restrict_x1: bool) -> PointSet {
    let m = if restrict_x1 {
        spec.dim() - 1
    } else {
        spec.dim()
    };
    let points = projective_points(m)
        .into_iter()
        .filter(|p| {
            if restrict_x1 {
                let mut full = Vec::with_capacity(m + 1);
                full.push(Gf4::ZERO);
                full.extend_from_slice(p);
                spec.eval_slice(&full).is_zero()
            } else {
                spec.eval_slice(p).is_zero()
            }
        })
        .collect();
    PointSet { dim: m, points }
}

/// How many hyperplanes meet a point set in each possible number of points.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HyperplaneProfile {
    pub dim: usize,
    pub histogram: BTreeMap<usize, usize>,
}

impl HyperplaneProfile {
    pub fn hyperplane_count(&self) -> usize {
        self.histogram.values().sum()
    }

    pub fn incidence_count(&self) -> usize {
        self.histogram.iter().map(|(s, m)| s * m).sum()
    }
}

/// Number of points (equivalently hyperplanes) of PG(m−1, 4).
pub fn projective_size(m: usize) -> u64 {
    (Q.pow(m as u32) - 1) / (Q - 1)
}

/// Intersects every hyperplane of PG(m−1, 4) with the point set.
///
/// Hyperplanes are indexed by normalized normal vectors in the same order as
/// [`projective_points`]; work is split across threads by hyperplane.
pub fn hyperplane_profile(set: &PointSet) -> HyperplaneProfile {
    let m = set.dim;
    let normals = projective_points(m);
    let histogram = normals
        .par_iter()
        .map(|h| {
            set.points
                .iter()
                .filter(|p| {
                    h.iter()
                        .zip(p.iter())
                        .fold(Gf4::ZERO, |acc, (a, b)| acc + *a * *b)
                        .is_zero()
                })
                .count()
        })
        .fold(BTreeMap::new, |mut acc, size| {
            *acc.entry(size).or_insert(0usize) += 1;
            acc
        })
        .reduce(BTreeMap::new, |mut a, b| {
            for (s, c) in b {
                *a.entry(s).or_insert(0) += c;
            }
            a
        });
    HyperplaneProfile { dim: m, histogram }
}

/// Which classical intersection pattern a quadric should show.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QuadricKind {
    Elliptic,
    Hyperbolic,
    Parabolic,
}

impl QuadricKind {
    pub fn name(self) -> &'static str {
        match self {
            QuadricKind::Elliptic => "elliptic",
            QuadricKind::Hyperbolic => "hyperbolic",
            QuadricKind::Parabolic => "parabolic",
        }
    }
}

/// Predicted intersection histogram for a nonsingular quadric in PG(2ℓ−1, 4)
/// (elliptic/hyperbolic) or PG(2ℓ−2, 4) (parabolic).
///
/// Elliptic sizes are `a` and `b`, hyperbolic sizes follow from the two
/// character values through `χ(Ω) = q·h − n`, and in both cases the
/// multiplicities are the unique solution of the hyperplane and incidence
/// totals. Parabolic sizes and multiplicities are closed form.
pub fn predicted_profile(kind: QuadricKind, ell: usize) -> Result<BTreeMap<usize, usize>> {
    let q = Q as i64;
    let l = ell as u32;
    let pw = |e: i64| -> Result<i64> {
        if e < 0 {
            Err(Error::Domain(format!(
                "ℓ = {ell} too small for the {} pattern",
                kind.name()
            )))
        } else {
            Ok(q.pow(e as u32))
        }
    };
    let li = ell as i64;
    let mut out = BTreeMap::new();
    match kind {
        QuadricKind::Parabolic => {
            if ell < 2 {
                return Err(Error::Domain("parabolic section needs ℓ ≥ 2".into()));
            }
            let t = (pw(2 * li - 3)? - 1) / (q - 1);
            let big_t = (pw(2 * li - 2)? - 1) / (q - 1);
            let e = t - pw(li - 2)?;
            let big_e = (pw(2 * li - 2)? - pw(li - 1)?) / 2;
            let h = t + pw(li - 2)?;
            let big_h = (pw(2 * li - 2)? + pw(li - 1)?) / 2;
            for (s, mlt) in [(t, big_t), (e, big_e), (h, big_h)] {
                if mlt > 0 {
                    *out.entry(s as usize).or_insert(0) += mlt as usize;
                }
            }
            return Ok(out);
        }
        QuadricKind::Elliptic | QuadricKind::Hyperbolic => {}
    }
    let m = 2 * l;
    let hyperplanes = projective_size(m as usize) as i64;
    let per_point = projective_size(m as usize - 1) as i64;
    let (n, sizes) = if kind == QuadricKind::Elliptic {
        let n = (pw(li)? + 1) * (pw(li - 1)? - 1) / (q - 1);
        if n == 0 {
            out.insert(0, hyperplanes as usize);
            return Ok(out);
        }
        let a = 1 + q * (pw(li - 1)? + 1) * (pw(li - 2)? - 1) / (q - 1);
        let b = (pw(2 * li - 2)? - 1) / (q - 1);
        (n, (a, b))
    } else {
        let n = (pw(li)? - 1) * (pw(li - 1)? + 1) / (q - 1);
        let chi_hi = pw(li)? - pw(li - 1)? - 1;
        let chi_lo = -(pw(li - 1)? + 1);
        (n, ((chi_hi + n) / q, (chi_lo + n) / q))
    };
    let (s1, s2) = sizes;
    // m1 + m2 = hyperplanes, s1·m1 + s2·m2 = n·per_point
    let incidences = n * per_point;
    let num = incidences - s2 * hyperplanes;
    let den = s1 - s2;
    if den == 0 || num % den != 0 {
        return Err(Error::Domain(
            "intersection sizes do not admit integral multiplicities".into(),
        ));
    }
    let m1 = num / den;
    let m2 = hyperplanes - m1;
    for (s, mlt) in [(s1, m1), (s2, m2)] {
        if mlt > 0 {
            *out.entry(s as usize).or_insert(0) += mlt as usize;
        }
    }
    Ok(out)
}

/// Converts a projective two-intersection set `(n, m, h₁, h₂)` in PG(m−1, q)
/// into the parameters of its vector set `Ω` as a partial difference set.
pub fn projective_to_pds_params(n: i64, m: u32, h1: i64, h2: i64, q: i64) -> Result<PdsParams> {
    if h1 == h2 {
        return Err(Error::Domain("intersection sizes must differ".into()));
    }
    let k = (q - 1) * n;
    let prod = (q * h1 - n) * (q * h2 - n);
    Ok(PdsParams::new(
        q.pow(m),
        k,
        k + prod + q * (h1 + h2) - 2 * n,
        k + prod,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn fv(codes: &[u8]) -> FieldVector {
        FieldVector::from_codes(codes).unwrap()
    }

    fn all_vectors(len: usize) -> impl Iterator<Item = FieldVector> {
        (0..Q.pow(len as u32) as u32).map(move |i| FieldVector::from_index(i, len).unwrap())
    }

    fn random_vector(rng: &mut impl Rng, len: usize) -> FieldVector {
        FieldVector::new(
            (0..len)
                .map(|_| Gf4::from_code(rng.gen_range(0..4)))
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn field_vector_validation() {
        assert!(FieldVector::from_codes(&[1]).is_err());
        assert!(FieldVector::from_codes(&[]).is_err());
        assert!(FieldVector::from_codes(&[1, 4]).is_err());
        assert!(FormSpec::new(0, 0).is_err());
        assert!(FormSpec::new(2, 3).is_err());
    }

    #[test]
    fn index_packing_round_trips() {
        for i in 0..256u32 {
            assert_eq!(FieldVector::from_index(i, 4).unwrap().to_index(), i);
        }
    }

    #[test]
    fn eval_examples() {
        let s = FormSpec::new(2, 1).unwrap();
        assert_eq!(q_eval(s, &fv(&[1, 0, 0, 0])).unwrap(), Gf4::ALPHA);
        assert_eq!(q_eval(s, &fv(&[0, 0, 1, 0])).unwrap(), Gf4::ZERO);
        let nonzero_zeros = all_vectors(4)
            .filter(|v| !v.is_zero() && q_eval(s, v).unwrap().is_zero())
            .count();
        assert_eq!(nonzero_zeros, 51);
        assert_eq!(nonzero_zeros as u64, (16 + 1) * (4 - 1));
        assert!(matches!(
            q_eval(s, &fv(&[1, 0])),
            Err(Error::Dimension {
                expected: 4,
                got: 2
            })
        ));
    }

    #[test]
    fn packed_eval_matches_slice_eval() {
        for ell in 1..=3 {
            for j in 0..=ell {
                let s = FormSpec::new(ell, j).unwrap();
                for v in all_vectors(2 * ell).step_by(7) {
                    assert_eq!(s.eval_index(v.to_index()), q_eval(s, &v).unwrap());
                }
            }
        }
    }

    #[test]
    fn quadratic_form_homogeneity() {
        let s = FormSpec::new(2, 1).unwrap();
        for v in all_vectors(4) {
            for c in Gf4::ALL {
                assert_eq!(
                    q_eval(s, &v.scale(c)).unwrap(),
                    c.square() * q_eval(s, &v).unwrap()
                );
            }
        }
    }

    #[test]
    fn bilinear_examples() {
        for (ell, j) in [(2, 0), (2, 1), (2, 2)] {
            let s = FormSpec::new(ell, j).unwrap();
            let e = |i| FieldVector::unit(4, i).unwrap();
            assert_eq!(bilinear(s, &e(1), &e(2)).unwrap(), Gf4::ONE);
            assert_eq!(bilinear(s, &e(1), &e(3)).unwrap(), Gf4::ZERO);
            for v in all_vectors(4) {
                assert_eq!(bilinear(s, &v, &v).unwrap(), Gf4::ZERO);
            }
        }
    }

    #[test]
    fn bilinear_is_symplectic_exhaustive_small() {
        for ell in 1..=2 {
            for j in 0..=ell {
                let s = FormSpec::new(ell, j).unwrap();
                let vs: Vec<_> = all_vectors(2 * ell).collect();
                for u in &vs {
                    for v in &vs {
                        assert_eq!(bilinear(s, u, v).unwrap(), symplectic(u, v).unwrap());
                    }
                }
            }
        }
    }

    #[test]
    fn bilinear_is_symplectic_sampled_large() {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
        for ell in 3..=4 {
            for j in 0..=ell {
                let s = FormSpec::new(ell, j).unwrap();
                for _ in 0..10_000 {
                    let u = random_vector(&mut rng, 2 * ell);
                    let v = random_vector(&mut rng, 2 * ell);
                    assert_eq!(bilinear(s, &u, &v).unwrap(), symplectic(&u, &v).unwrap());
                }
            }
        }
    }

    #[test]
    fn classification_examples() {
        let c = classify(FormSpec::new(2, 1).unwrap()).unwrap();
        assert_eq!((c.form_type, c.zero_count), (FormType::Elliptic, 52));
        let c = classify(FormSpec::new(2, 0).unwrap()).unwrap();
        assert_eq!((c.form_type, c.zero_count), (FormType::Hyperbolic, 76));
        let c = classify(FormSpec::new(1, 1).unwrap()).unwrap();
        assert_eq!((c.form_type, c.zero_count), (FormType::Elliptic, 1));
    }

    #[test]
    fn classification_by_zero_count_all_small() {
        for ell in 1..=3 {
            for j in 0..=ell {
                let c = classify(FormSpec::new(ell, j).unwrap()).unwrap();
                assert_eq!(c.form_type.epsilon(), PdsParams::epsilon_for_form(j));
            }
        }
    }

    #[test]
    fn equivalence_map_carries_forms_exhaustive() {
        for ell in 2..=3 {
            for j in 2..=ell {
                let hi = FormSpec::new(ell, j).unwrap();
                let lo = FormSpec::new(ell, j - 2).unwrap();
                for v in all_vectors(2 * ell) {
                    let w = equivalence_map(hi, &v).unwrap();
                    assert_eq!(q_eval(hi, &w).unwrap(), q_eval(lo, &v).unwrap());
                    assert_eq!(equivalence_map_inverse(hi, &w).unwrap(), v);
                }
            }
        }
    }

    #[test]
    fn equivalence_map_is_invertible_and_local() {
        for ell in 2..=4 {
            for j in 2..=ell {
                let s = FormSpec::new(ell, j).unwrap();
                let n = 2 * ell;
                let images: Vec<Vec<Gf4>> = (1..=n)
                    .map(|i| {
                        equivalence_map(s, &FieldVector::unit(n, i).unwrap())
                            .unwrap()
                            .coords()
                            .to_vec()
                    })
                    .collect();
                assert_eq!(rank_gf4(&images), n);
                for (i, img) in images.iter().enumerate() {
                    let moved = (2 * j - 4..2 * j).contains(&i);
                    if !moved {
                        assert_eq!(img, FieldVector::unit(n, i + 1).unwrap().coords());
                    }
                }
            }
        }
        assert!(equivalence_map(FormSpec::new(2, 1).unwrap(), &fv(&[0, 0, 0, 0])).is_err());
    }

    #[test]
    fn pair_flip_properties() {
        let s = FormSpec::new(2, 1).unwrap();
        for v in all_vectors(4) {
            let w = pair_flip(s, &v, 1).unwrap();
            assert_eq!(q_eval(s, &w).unwrap(), q_eval(s, &v).unwrap());
            assert_eq!(pair_flip(s, &w, 1).unwrap(), v);
            if v.coords()[0].is_zero() {
                assert_eq!(w, v);
            }
        }
        assert!(pair_flip(s, &fv(&[0, 0, 0, 0]), 2).is_err());
        assert!(pair_flip(s, &fv(&[0, 0, 0, 0]), 0).is_err());
    }

    #[test]
    fn nonsingular_radical_is_trivial() {
        for ell in 1..=3 {
            for j in 0..=ell {
                assert_eq!(
                    radical_dimension(FormSpec::new(ell, j).unwrap()).unwrap(),
                    0
                );
            }
        }
    }

    #[test]
    fn restriction_is_parabolic() {
        for ell in 2..=3 {
            for j in 1..=ell {
                let s = FormSpec::new(ell, j).unwrap();
                assert_eq!(restricted_zero_count(s), Q.pow(2 * ell as u32 - 2));
            }
            // with j = 0 the coordinate x₂ drops out and the section is a cone
            let s = FormSpec::new(ell, 0).unwrap();
            let rest = zero_count(FormSpec::new(ell - 1, 0).unwrap());
            assert_eq!(restricted_zero_count(s), 4 * rest);
        }
    }

    #[test]
    fn profile_of_elliptic_quadric() {
        let s = FormSpec::new(2, 1).unwrap();
        let quad = quadric(s, false);
        assert_eq!(quad.len(), 17);
        let prof = hyperplane_profile(&quad);
        assert_eq!(prof.histogram, BTreeMap::from([(1, 17), (5, 68)]));
        assert_eq!(
            prof.histogram,
            predicted_profile(QuadricKind::Elliptic, 2).unwrap()
        );
    }

    #[test]
    fn profile_of_parabolic_conic() {
        let s = FormSpec::new(2, 1).unwrap();
        let conic = quadric(s, true);
        assert_eq!(conic.len(), 5);
        let prof = hyperplane_profile(&conic);
        assert_eq!(prof.histogram, BTreeMap::from([(0, 6), (1, 5), (2, 10)]));
        assert_eq!(
            prof.histogram,
            predicted_profile(QuadricKind::Parabolic, 2).unwrap()
        );
    }

    #[test]
    fn profiles_match_predictions_up_to_ell_three() {
        for ell in 1..=3 {
            for j in 0..=ell {
                let s = FormSpec::new(ell, j).unwrap();
                let kind = if j % 2 == 1 {
                    QuadricKind::Elliptic
                } else {
                    QuadricKind::Hyperbolic
                };
                let quad = quadric(s, false);
                let prof = hyperplane_profile(&quad);
                let m = 2 * ell;
                assert_eq!(prof.hyperplane_count() as u64, projective_size(m));
                assert_eq!(
                    prof.incidence_count() as u64,
                    quad.len() as u64 * projective_size(m - 1)
                );
                assert_eq!(
                    prof.histogram,
                    predicted_profile(kind, ell).unwrap(),
                    "ℓ={ell} j={j}"
                );
                if ell >= 2 && j >= 1 {
                    let par = hyperplane_profile(&quadric(s, true));
                    assert_eq!(
                        par.histogram,
                        predicted_profile(QuadricKind::Parabolic, ell).unwrap()
                    );
                }
            }
        }
    }

    #[test]
    fn point_set_normalizes() {
        let p = PointSet::new(
            2,
            vec![vec![Gf4::ALPHA, Gf4::ONE], vec![Gf4::ONE, Gf4::ALPHA2]],
        )
        .unwrap();
        assert_eq!(p.len(), 1);
        assert!(PointSet::new(2, vec![vec![Gf4::ZERO, Gf4::ZERO]]).is_err());
        assert_eq!(projective_points(4).len(), 85);
    }

    #[test]
    fn two_intersection_parameters() {
        assert_eq!(
            projective_to_pds_params(17, 4, 1, 5, 4).unwrap(),
            PdsParams::new(256, 51, 2, 12)
        );
        assert_eq!(
            projective_to_pds_params(25, 4, 9, 5, 4).unwrap(),
            PdsParams::new(256, 75, 26, 20)
        );
        for (n, h1, h2) in [(17, 1, 5), (25, 9, 5)] {
            assert!(projective_to_pds_params(n, 4, h1, h2, 4)
                .unwrap()
                .satisfies_counting_identity());
        }
        assert!(projective_to_pds_params(17, 4, 5, 5, 4).is_err());
    }
}
