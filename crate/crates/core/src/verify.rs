//! Two independent partial-difference-set verifiers.
//!
//! * [`brute_force_verify`] counts the full difference multiset.
//! * [`spectral_verify`] computes every character sum with an exact
//!   mixed-radix transform and checks the two-eigenvalue criterion.
//!
//! Characters are labelled by plain mixed-radix digits laid out exactly like
//! group elements: a Z4 digit `x` under label `c` contributes `i^{cx}`, a Z2
//! digit `x` under label `w` contributes `(−1)^{wx}`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::time::Instant;

use num_complex::Complex;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::algebra::{gf4_tr, gr_trace, i_pow, pi, Gaussian, Gf4, Gr42};
use crate::lift::{GroupElement, GroupShape, PdsCandidate};
use crate::params::PdsParams;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Brute,
    Spectral,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Brute => "brute",
            Method::Spectral => "spectral",
        })
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum VerifyError {
    /// Empty candidate: the parameter formula gives `k = 0`, nothing to verify.
    #[error("degenerate candidate: empty set, verification is vacuous")]
    Degenerate,
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("{method} verification failed: {reason}")]
    Failed {
        method: Method,
        reason: String,
        witness: Option<u32>,
    },
    #[error("parameter set {0} has no integral two-eigenvalue spectrum")]
    NotTwoValued(PdsParams),
}

impl VerifyError {
    fn failed(method: Method, reason: impl Into<String>, witness: Option<u32>) -> Self {
        VerifyError::Failed {
            method,
            reason: reason.into(),
            witness,
        }
    }
}

/// A character label over a [`GroupShape`].
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CharLabel {
    shape: GroupShape,
    packed: u32,
}

impl CharLabel {
    pub fn principal(shape: GroupShape) -> Self {
        CharLabel { shape, packed: 0 }
    }

    /// Label from its packed index (the same layout as group elements).
    pub fn from_packed(shape: GroupShape, packed: u32) -> Option<Self> {
        shape
            .contains(GroupElement(packed))
            .then_some(CharLabel { shape, packed })
    }

    pub fn from_digits(shape: GroupShape, digits: &[u8]) -> crate::Result<Self> {
        Ok(CharLabel {
            shape,
            packed: shape.from_digits(digits)?.packed(),
        })
    }

    /// Converts the ring-native labelling `ψ_β ⊗ χ_w` (one `β ∈ GR(4,2)` per
    /// ring coordinate, one `w ∈ GF(4)` per field coordinate) to digits:
    /// `β ↦ (Tr(β), Tr(βξ))` and `w ↦ (tr(w), tr(wα))`.
    pub fn from_ring_labels(shape: GroupShape, betas: &[Gr42], ws: &[Gf4]) -> crate::Result<Self> {
        if betas.len() != shape.k() || ws.len() != 2 * (shape.ell() - shape.k()) {
            return Err(crate::Error::Dimension {
                expected: shape.k() + 2 * (shape.ell() - shape.k()),
                got: betas.len() + ws.len(),
            });
        }
        let mut digits = Vec::with_capacity(shape.z4_digits() + shape.z2_digits());
        for b in betas {
            let (c1, c2) = ring_label_digits(*b);
            digits.extend([c1, c2]);
        }
        for w in ws {
            let (d0, d1) = field_label_digits(*w);
            digits.extend([d0, d1]);
        }
        CharLabel::from_digits(shape, &digits)
    }

    pub fn shape(&self) -> GroupShape {
        self.shape
    }

    pub fn packed(&self) -> u32 {
        self.packed
    }

    pub fn digits(&self) -> Vec<u8> {
        self.shape.digits(GroupElement(self.packed))
    }

    pub fn is_principal(&self) -> bool {
        self.packed == 0
    }

    /// Character value at a group element.
    pub fn eval(&self, g: GroupElement) -> Gaussian {
        let ld = self.digits();
        let gd = self.shape.digits(g);
        let z4 = self.shape.z4_digits();
        let mut e = 0u32;
        for (i, (c, x)) in ld.iter().zip(&gd).enumerate() {
            let term = (*c as u32) * (*x as u32);
            e += if i < z4 { term } else { 2 * term };
        }
        i_pow(e)
    }
}

/// `(Tr(β), Tr(βξ))`: the digits of `x ↦ i^{Tr(βx)}` on `x = a + bξ`.
pub fn ring_label_digits(beta: Gr42) -> (u8, u8) {
    (gr_trace(beta), gr_trace(beta * Gr42::XI))
}

/// `(tr(w), tr(wα))`: the digits of `x ↦ (−1)^{tr(wx)}` on `x = b₀ + b₁α`.
pub fn field_label_digits(w: Gf4) -> (u8, u8) {
    (gf4_tr(w), gf4_tr(w * Gf4::ALPHA))
}

/// `Σ_{d ∈ D} χ(d)` computed term by term.
pub fn character_sum(candidate: &PdsCandidate, label: &CharLabel) -> Gaussian {
    candidate.elements().iter().map(|g| label.eval(*g)).sum()
}

/// For a label whose Z4 digits are all even, the GF(4)-character label on the
/// elementary abelian group (`k = 0`) it corresponds to under `F_k`.
///
/// The label `2β` on ring coordinate `i` becomes `χ_{π(β)}` on `x_{2i−1}` and
/// the trivial label on `x_{2i}`; field labels carry over unchanged.
pub fn order_two_field_label(label: &CharLabel) -> Option<CharLabel> {
    let shape = label.shape();
    let digits = label.digits();
    let z4 = shape.z4_digits();
    if digits[..z4].iter().any(|d| d % 2 == 1) {
        return None;
    }
    let base = GroupShape::new(shape.ell(), 0).ok()?;
    let mut out = Vec::with_capacity(base.z2_digits());
    for pair in digits[..z4].chunks_exact(2) {
        // 2·(Tr β', Tr β'ξ) with π(β') = w; the reduced pair is (tr w, tr wα)
        let beta = ring_label_from_digits(pair[0] / 2, pair[1] / 2);
        let w = pi(beta);
        let (d0, d1) = field_label_digits(w);
        out.extend([d0, d1, 0, 0]);
    }
    out.extend_from_slice(&digits[z4..]);
    CharLabel::from_digits(base, &out).ok()
}

fn ring_label_from_digits(c1: u8, c2: u8) -> Gr42 {
    Gr42::all()
        .find(|b| {
            let (t1, t2) = ring_label_digits(*b);
            t1 % 2 == c1 % 2 && t2 % 2 == c2 % 2
        })
        .expect("every residue pair is a trace pair")
}

/// Histogram of all character sums of a set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpectrumReport {
    /// Exact value `(re, im)` → number of characters attaining it.
    pub histogram: BTreeMap<(i64, i64), u64>,
    /// Sum at the principal character (`|D|`).
    pub principal_value: i64,
}

impl SpectrumReport {
    pub fn total(&self) -> u64 {
        self.histogram.values().sum()
    }

    /// Histogram keyed by rational integers, if every value is real.
    pub fn real_histogram(&self) -> Option<BTreeMap<i64, u64>> {
        self.histogram
            .iter()
            .map(|((re, im), m)| (*im == 0).then_some((*re, *m)))
            .collect()
    }

    /// `Σ |value|²` over all characters.
    pub fn parseval_sum(&self) -> i128 {
        self.histogram
            .iter()
            .map(|((re, im), m)| {
                (*re as i128 * *re as i128 + *im as i128 * *im as i128) * *m as i128
            })
            .sum()
    }

    /// JSON object `value → multiplicity`.
    pub fn histogram_json(&self) -> Value {
        let mut map = Map::new();
        for ((re, im), m) in &self.histogram {
            let key = match *im {
                0 => re.to_string(),
                i if i > 0 => format!("{re}+{i}i"),
                i => format!("{re}{i}i"),
            };
            map.insert(key, json!(m));
        }
        Value::Object(map)
    }
}

/// Every character sum of `candidate`, indexed by packed label.
///
/// Materializes the indicator of `D` and runs an in-place mixed-radix
/// transform: a radix-4 pass (powers of `i`) per Z4 digit and a radix-2 pass
/// per Z2 digit. Butterflies within a pass run in parallel.
pub fn fast_transform(candidate: &PdsCandidate) -> Vec<Gaussian> {
    let shape = candidate.shape();
    let mut data: Vec<Gaussian> = vec![Complex::new(0, 0); shape.order()];
    for g in candidate.elements() {
        data[g.packed() as usize] = Complex::new(1, 0);
    }
    for digit in 0..shape.z4_digits() {
        radix4_pass(&mut data, 1 << (2 * digit));
    }
    let base = 4 * shape.k();
    for digit in 0..shape.z2_digits() {
        radix2_pass(&mut data, 1 << (base + digit));
    }
    data
}

#[inline]
fn times_i(z: Gaussian) -> Gaussian {
    Complex::new(-z.im, z.re)
}

fn radix4_pass(data: &mut [Gaussian], stride: usize) {
    data.par_chunks_mut(4 * stride).for_each(|block| {
        for off in 0..stride {
            let a0 = block[off];
            let a1 = block[off + stride];
            let a2 = block[off + 2 * stride];
            let a3 = block[off + 3 * stride];
            let s02 = a0 + a2;
            let d02 = a0 - a2;
            let s13 = a1 + a3;
            let d13 = times_i(a1 - a3);
            // out[c] = Σ_x i^{cx} a_x
            block[off] = s02 + s13;
            block[off + stride] = d02 + d13;
            block[off + 2 * stride] = s02 - s13;
            block[off + 3 * stride] = d02 - d13;
        }
    });
}

fn radix2_pass(data: &mut [Gaussian], stride: usize) {
    data.par_chunks_mut(2 * stride).for_each(|block| {
        let (lo, hi) = block.split_at_mut(stride);
        for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
            let (x, y) = (*a, *b);
            *a = x + y;
            *b = x - y;
        }
    });
}

/// All character sums of `candidate` as a histogram.
pub fn fast_spectrum(candidate: &PdsCandidate) -> SpectrumReport {
    let values = fast_transform(candidate);
    spectrum_from_values(&values)
}

fn spectrum_from_values(values: &[Gaussian]) -> SpectrumReport {
    let histogram = values
        .par_chunks(4096)
        .fold(BTreeMap::new, |mut acc, chunk| {
            for z in chunk {
                *acc.entry((z.re, z.im)).or_insert(0u64) += 1;
            }
            acc
        })
        .reduce(BTreeMap::new, |mut a, b| {
            for (key, m) in b {
                *a.entry(key).or_insert(0) += m;
            }
            a
        });
    SpectrumReport {
        histogram,
        principal_value: values.first().map_or(0, |z| z.re),
    }
}

fn isqrt(n: i64) -> Option<i64> {
    if n < 0 {
        return None;
    }
    let mut r = (n as f64).sqrt() as i64;
    while r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    Some(r)
}

/// The two nonprincipal character values `((λ−μ) ± √((λ−μ)² + 4(k−μ)))/2`,
/// larger first.
pub fn expected_eigenvalues(params: PdsParams) -> Result<(i64, i64), VerifyError> {
    let diff = params.lambda - params.mu;
    let disc = diff * diff + 4 * (params.k - params.mu);
    let root = isqrt(disc).filter(|r| r * r == disc);
    match root {
        Some(r) if (diff + r) % 2 == 0 => Ok(((diff + r) / 2, (diff - r) / 2)),
        _ => Err(VerifyError::NotTwoValued(params)),
    }
}

/// Eigenvalues with multiplicities `(k, 1), (r, f), (s, g)` forced by
/// `1 + f + g = v` and `k + f·r + g·s = 0`.
pub fn eigenvalue_multiplicities(params: PdsParams) -> Result<[(i64, i64); 3], VerifyError> {
    let (r, s) = expected_eigenvalues(params)?;
    let n = params.v - 1;
    let num = -params.k - s * n;
    if r == s || num % (r - s) != 0 {
        return Err(VerifyError::NotTwoValued(params));
    }
    let f = num / (r - s);
    Ok([(params.k, 1), (r, f), (s, n - f)])
}

/// Outcome of a successful verification.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PdsCertificate {
    pub params: PdsParams,
    pub epsilon: i8,
    pub methods_passed: BTreeSet<Method>,
    pub spectrum: Option<SpectrumReport>,
    pub elapsed_ms: u128,
}

impl PdsCertificate {
    /// Merges two certificates for the same candidate; `None` if they disagree.
    pub fn merge(mut self, other: PdsCertificate) -> Option<PdsCertificate> {
        if self.params != other.params || self.epsilon != other.epsilon {
            return None;
        }
        self.methods_passed.extend(other.methods_passed);
        self.spectrum = self.spectrum.or(other.spectrum);
        self.elapsed_ms += other.elapsed_ms;
        Some(self)
    }

    pub fn to_json_value(&self) -> Value {
        json!({
            "params": self.params.as_array(),
            "epsilon": self.epsilon,
            "methods_passed": self.methods_passed.iter().map(|m| m.to_string()).collect::<Vec<_>>(),
            "spectrum_histogram": self.spectrum.as_ref().map(|s| s.histogram_json()),
            "elapsed_ms": self.elapsed_ms as u64,
        })
    }
}

fn preflight(candidate: &PdsCandidate) -> Result<(), VerifyError> {
    if candidate.is_degenerate() {
        return Err(VerifyError::Degenerate);
    }
    candidate.check_symmetric().map_err(|e| match e {
        crate::Error::Precondition(m) => VerifyError::Precondition(m),
        other => VerifyError::Precondition(other.to_string()),
    })
}

/// Counts every difference `d₁ − d₂` (`d₁ ≠ d₂`) and requires the counts to
/// be a constant `λ` on `D` and a constant `μ` off `D ∪ {0}`, matching the
/// candidate's expected parameters.
pub fn brute_force_verify(candidate: &PdsCandidate) -> Result<PdsCertificate, VerifyError> {
    preflight(candidate)?;
    let start = Instant::now();
    let shape = candidate.shape();
    let v = shape.order();
    let elements = candidate.elements();
    let counts = elements
        .par_chunks(64)
        .fold(
            || vec![0u32; v],
            |mut acc, chunk| {
                for &d1 in chunk {
                    for &d2 in elements {
                        if d1 != d2 {
                            acc[shape.sub(d1, d2).packed() as usize] += 1;
                        }
                    }
                }
                acc
            },
        )
        .reduce(
            || vec![0u32; v],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                a
            },
        );
    let indicator = candidate.indicator();
    let mut lambda: Option<u32> = None;
    let mut mu: Option<u32> = None;
    for (g, &c) in counts.iter().enumerate().skip(1) {
        let slot = if indicator[g] { &mut lambda } else { &mut mu };
        match *slot {
            None => *slot = Some(c),
            Some(prev) if prev != c => {
                let which = if indicator[g] { "λ" } else { "μ" };
                return Err(VerifyError::failed(
                    Method::Brute,
                    format!("{which} not constant: element {g} is hit {c} times, earlier elements {prev}"),
                    Some(g as u32),
                ));
            }
            Some(_) => {}
        }
    }
    let expected = candidate.expected_params();
    let observed = PdsParams::new(
        v as i64,
        elements.len() as i64,
        lambda.unwrap_or(0) as i64,
        mu.unwrap_or(0) as i64,
    );
    if observed != expected {
        return Err(VerifyError::failed(
            Method::Brute,
            format!("observed parameters {observed} differ from expected {expected}"),
            None,
        ));
    }
    Ok(PdsCertificate {
        params: observed,
        epsilon: candidate.epsilon(),
        methods_passed: BTreeSet::from([Method::Brute]),
        spectrum: None,
        elapsed_ms: start.elapsed().as_millis(),
    })
}

/// Two-eigenvalue criterion over the full character spectrum.
pub fn spectral_verify(candidate: &PdsCandidate) -> Result<PdsCertificate, VerifyError> {
    preflight(candidate)?;
    let start = Instant::now();
    let expected = candidate.expected_params();
    if expected.v != candidate.shape().order() as i64 {
        return Err(VerifyError::failed(
            Method::Spectral,
            format!(
                "expected v = {} but the group has order {}",
                expected.v,
                candidate.shape().order()
            ),
            None,
        ));
    }
    let (r, s) = expected_eigenvalues(expected)?;
    let values = fast_transform(candidate);
    let principal = values[0];
    if principal != Complex::new(expected.k, 0) || candidate.len() as i64 != expected.k {
        return Err(VerifyError::failed(
            Method::Spectral,
            format!("principal sum {principal} differs from k = {}", expected.k),
            Some(0),
        ));
    }
    let allowed = [Complex::new(r, 0), Complex::new(s, 0)];
    if let Some((label, z)) = values
        .par_iter()
        .enumerate()
        .skip(1)
        .find_first(|(_, z)| !allowed.contains(z))
    {
        return Err(VerifyError::failed(
            Method::Spectral,
            format!("character {label} has sum {z}, outside {{{r}, {s}}}"),
            Some(label as u32),
        ));
    }
    let spectrum = spectrum_from_values(&values);
    // λ − μ = r + s and k − μ = −rs whenever both values occur; with a single
    // value the expected pair is the only consistent reading
    let params = if spectrum.histogram.len() == 3 {
        let mu = expected.k + r * s;
        PdsParams::new(expected.v, expected.k, mu + r + s, mu)
    } else {
        expected
    };
    Ok(PdsCertificate {
        params,
        epsilon: candidate.epsilon(),
        methods_passed: BTreeSet::from([Method::Spectral]),
        spectrum: Some(spectrum),
        elapsed_ms: start.elapsed().as_millis(),
    })
}

/// Runs both verifiers and requires them to agree.
pub fn verify_both(candidate: &PdsCandidate) -> Result<PdsCertificate, VerifyError> {
    let brute = brute_force_verify(candidate);
    let spectral = spectral_verify(candidate);
    match (brute, spectral) {
        (Ok(b), Ok(s)) => {
            let params = b.params;
            b.merge(s).ok_or_else(|| {
                VerifyError::failed(
                    Method::Spectral,
                    format!("verifiers disagree on parameters (brute {params})"),
                    None,
                )
            })
        }
        (Ok(_), Err(e)) | (Err(e), Ok(_)) => Err(VerifyError::failed(
            match &e {
                VerifyError::Failed { method, .. } => *method,
                _ => Method::Spectral,
            },
            format!("verifiers disagree: {e}"),
            None,
        )),
        (Err(e), Err(_)) => Err(e),
    }
}
