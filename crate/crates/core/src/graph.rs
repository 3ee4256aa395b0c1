//! Cayley graphs of partial difference sets, direct strong-regularity checks,
//! invariant fingerprints, and export to graph6 / DIMACS / edge lists.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::lift::{GroupElement, GroupShape, PdsCandidate};
use crate::params::PdsParams;
use crate::verify::{eigenvalue_multiplicities, VerifyError};

/// Largest order stored as a bit matrix; larger Cayley graphs answer
/// adjacency queries from the connection set.
pub const BIT_MATRIX_LIMIT: usize = 4096;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("degenerate connection set: the Cayley graph has no edges")]
    Degenerate,
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("not strongly regular: {reason} (witness pair {u}, {w})")]
    NotStronglyRegular { u: usize, w: usize, reason: String },
    #[error("unsupported export format `{0}` (expected graph6, dimacs or edgelist)")]
    UnsupportedFormat(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Spectrum(#[from] VerifyError),
    #[error("triangle count mismatch: formula {formula}, counted {counted}")]
    TriangleMismatch { formula: u64, counted: u64 },
}

/// Square 0/1 matrix with `u64` rows.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BitMatrix {
    n: usize,
    words: usize,
    data: Vec<u64>,
}

impl BitMatrix {
    pub fn new(n: usize) -> Self {
        let words = n.div_ceil(64);
        BitMatrix {
            n,
            words,
            data: vec![0; n * words],
        }
    }

    #[inline]
    pub fn row(&self, u: usize) -> &[u64] {
        &self.data[u * self.words..(u + 1) * self.words]
    }

    #[inline]
    pub fn get(&self, u: usize, w: usize) -> bool {
        self.row(u)[w / 64] >> (w % 64) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, u: usize, w: usize) {
        self.data[u * self.words + w / 64] |= 1 << (w % 64);
    }

    #[inline]
    pub fn common(&self, u: usize, w: usize) -> usize {
        self.row(u)
            .iter()
            .zip(self.row(w))
            .map(|(a, b)| (a & b).count_ones() as usize)
            .sum()
    }

    pub fn row_count(&self, u: usize) -> usize {
        self.row(u).iter().map(|x| x.count_ones() as usize).sum()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Adjacency {
    Bits(BitMatrix),
    /// `u ~ w` iff `u − w ∈ D`, answered from the indicator of `D`.
    Implicit {
        shape: GroupShape,
        indicator: Vec<bool>,
    },
}

/// A simple undirected graph on `0..order`, usually the Cayley graph of a PDS.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    order: usize,
    adjacency: Adjacency,
    connection_set: Option<Vec<GroupElement>>,
}

/// Cayley graph `Cay(G, D)`: vertices are group elements, `u ~ w` iff `u − w ∈ D`.
pub fn cayley(candidate: &PdsCandidate) -> Result<Graph, GraphError> {
    if candidate.is_degenerate() {
        return Err(GraphError::Degenerate);
    }
    candidate
        .check_symmetric()
        .map_err(|e| GraphError::Precondition(e.to_string()))?;
    let shape = candidate.shape();
    let n = shape.order();
    let adjacency = if n <= BIT_MATRIX_LIMIT {
        let rows: Vec<Vec<u64>> = (0..n)
            .into_par_iter()
            .map(|u| {
                let mut row = vec![0u64; n.div_ceil(64)];
                for d in candidate.elements() {
                    let w = shape.add(GroupElement(u as u32), *d).packed() as usize;
                    row[w / 64] |= 1 << (w % 64);
                }
                row
            })
            .collect();
        let mut m = BitMatrix::new(n);
        m.data = rows.concat();
        Adjacency::Bits(m)
    } else {
        Adjacency::Implicit {
            shape,
            indicator: candidate.indicator(),
        }
    };
    Ok(Graph {
        order: n,
        adjacency,
        connection_set: Some(candidate.elements().to_vec()),
    })
}

impl Graph {
    /// Bit-matrix graph from an edge list. Loops and duplicates are rejected.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Graph, GraphError> {
        let mut m = BitMatrix::new(n);
        for &(u, w) in edges {
            if u >= n || w >= n {
                return Err(GraphError::Parse(format!("edge ({u}, {w}) outside 0..{n}")));
            }
            if u == w {
                return Err(GraphError::Parse(format!("loop at {u}")));
            }
            if m.get(u, w) {
                return Err(GraphError::Parse(format!("duplicate edge ({u}, {w})")));
            }
            m.set(u, w);
            m.set(w, u);
        }
        Ok(Graph {
            order: n,
            adjacency: Adjacency::Bits(m),
            connection_set: None,
        })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn connection_set(&self) -> Option<&[GroupElement]> {
        self.connection_set.as_deref()
    }

    pub fn is_bit_matrix(&self) -> bool {
        matches!(self.adjacency, Adjacency::Bits(_))
    }

    pub fn is_adjacent(&self, u: usize, w: usize) -> bool {
        match &self.adjacency {
            Adjacency::Bits(m) => m.get(u, w),
            Adjacency::Implicit { shape, indicator } => {
                indicator[shape
                    .sub(GroupElement(u as u32), GroupElement(w as u32))
                    .packed() as usize]
            }
        }
    }

    pub fn degree(&self, u: usize) -> usize {
        match &self.adjacency {
            Adjacency::Bits(m) => m.row_count(u),
            Adjacency::Implicit { .. } => self.connection_set.as_ref().map_or(0, |d| d.len()),
        }
    }

    /// Sorted neighbours of `u`.
    pub fn neighbors(&self, u: usize) -> Vec<usize> {
        match &self.adjacency {
            Adjacency::Bits(m) => (0..self.order).filter(|&w| m.get(u, w)).collect(),
            Adjacency::Implicit { shape, .. } => {
                let mut out: Vec<usize> = self
                    .connection_set
                    .iter()
                    .flatten()
                    .map(|d| shape.add(GroupElement(u as u32), *d).packed() as usize)
                    .collect();
                out.sort_unstable();
                out
            }
        }
    }

    pub fn common_neighbors(&self, u: usize, w: usize) -> usize {
        match &self.adjacency {
            Adjacency::Bits(m) => m.common(u, w),
            Adjacency::Implicit { shape, indicator } => {
                let diff = shape.sub(GroupElement(u as u32), GroupElement(w as u32));
                self.connection_set
                    .iter()
                    .flatten()
                    .filter(|d| indicator[shape.add(diff, **d).packed() as usize])
                    .count()
            }
        }
    }

    pub fn edge_count(&self) -> usize {
        (0..self.order)
            .into_par_iter()
            .map(|u| self.degree(u))
            .sum::<usize>()
            / 2
    }

    /// Edges `(u, w)` with `u < w` in lexicographic order.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        (0..self.order)
            .into_par_iter()
            .flat_map_iter(|u| {
                self.neighbors(u)
                    .into_iter()
                    .filter(move |&w| w > u)
                    .map(move |w| (u, w))
            })
            .collect()
    }

    /// Complement graph (bit-matrix graphs only).
    pub fn complement(&self) -> Result<Graph, GraphError> {
        let Adjacency::Bits(m) = &self.adjacency else {
            return Err(GraphError::Precondition(
                "complement needs a bit-matrix graph".into(),
            ));
        };
        let n = self.order;
        let mut c = BitMatrix::new(n);
        for u in 0..n {
            for w in 0..n {
                if u != w && !m.get(u, w) {
                    c.set(u, w);
                }
            }
        }
        Ok(Graph {
            order: n,
            adjacency: Adjacency::Bits(c),
            connection_set: None,
        })
    }
}

/// How many vertex pairs [`srg_check_with`] inspects.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PairCoverage {
    /// Every unordered pair.
    Full,
    /// Uniformly random pairs from a seeded generator.
    Sampled { pairs: usize, seed: u64 },
}

/// Default coverage: all pairs for bit-matrix graphs, 10⁶ sampled pairs otherwise.
pub fn default_coverage(g: &Graph) -> PairCoverage {
    if g.is_bit_matrix() {
        PairCoverage::Full
    } else {
        PairCoverage::Sampled {
            pairs: 1_000_000,
            seed: 0,
        }
    }
}

pub fn srg_check(g: &Graph) -> Result<PdsParams, GraphError> {
    srg_check_with(g, default_coverage(g))
}

/// Checks regularity and that common-neighbour counts are `λ` on edges and
/// `μ` on non-edges, returning `(v, k, λ, μ)`.
pub fn srg_check_with(g: &Graph, coverage: PairCoverage) -> Result<PdsParams, GraphError> {
    let n = g.order;
    if n < 2 {
        return Err(GraphError::Precondition(
            "graph needs at least two vertices".into(),
        ));
    }
    let k = g.degree(0);
    if let Some(u) = (0..n).into_par_iter().find_first(|&u| g.degree(u) != k) {
        return Err(GraphError::NotStronglyRegular {
            u: 0,
            w: u,
            reason: format!("not regular: degree {k} vs {}", g.degree(u)),
        });
    }
    let first_adj = (1..n).find(|&w| g.is_adjacent(0, w));
    let first_non = (1..n).find(|&w| !g.is_adjacent(0, w));
    let (Some(a), Some(b)) = (first_adj, first_non) else {
        return Err(GraphError::Precondition(
            "graph is empty or complete; λ and μ are not both defined".into(),
        ));
    };
    let lambda = g.common_neighbors(0, a);
    let mu = g.common_neighbors(0, b);
    let bad_pair = |u: usize, w: usize| -> Option<GraphError> {
        let c = g.common_neighbors(u, w);
        let (want, name) = if g.is_adjacent(u, w) {
            (lambda, "λ")
        } else {
            (mu, "μ")
        };
        (c != want).then(|| GraphError::NotStronglyRegular {
            u,
            w,
            reason: format!("{c} common neighbours, expected {name} = {want}"),
        })
    };
    let violation = match coverage {
        PairCoverage::Full => (0..n)
            .into_par_iter()
            .find_map_first(|u| (u + 1..n).find_map(|w| bad_pair(u, w))),
        PairCoverage::Sampled { pairs, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let sample: Vec<(usize, usize)> = (0..pairs)
                .map(|_| {
                    let u = rng.gen_range(0..n);
                    let mut w = rng.gen_range(0..n - 1);
                    if w >= u {
                        w += 1;
                    }
                    (u, w)
                })
                .collect();
            sample.par_iter().find_map_first(|&(u, w)| bad_pair(u, w))
        }
    };
    if let Some(e) = violation {
        return Err(e);
    }
    Ok(PdsParams::new(n as i64, k as i64, lambda as i64, mu as i64))
}

/// Parameter-level invariants of a strongly regular graph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SrgFingerprint {
    pub params: PdsParams,
    /// `(eigenvalue, multiplicity)`, the degree first.
    pub eigenvalues: [(i64, i64); 3],
    pub triangles: u64,
    /// Multiset of common-neighbour counts over the canonical pair sample.
    pub local_profile: BTreeMap<usize, usize>,
}

const PROFILE_ROWS: usize = 8;
const PROFILE_COLS: usize = 1024;
const TRIANGLE_SAMPLE: usize = 64;

/// Fingerprint of a graph that already passed [`srg_check`] with `params`.
///
/// The triangle count `v·k·λ/6` is cross-checked by direct counting: over
/// all edges for bit-matrix graphs, at a sample of vertices otherwise.
pub fn fingerprint(g: &Graph, params: PdsParams) -> Result<SrgFingerprint, GraphError> {
    let eigenvalues = eigenvalue_multiplicities(params)?;
    let formula = (params.v * params.k * params.lambda / 6) as u64;
    let n = g.order;
    if g.is_bit_matrix() {
        let counted: u64 = (0..n)
            .into_par_iter()
            .map(|u| {
                g.neighbors(u)
                    .into_iter()
                    .filter(|&w| w > u)
                    .map(|w| g.common_neighbors(u, w) as u64)
                    .sum::<u64>()
            })
            .sum::<u64>()
            / 3;
        if counted != formula {
            return Err(GraphError::TriangleMismatch { formula, counted });
        }
    } else {
        let local = (params.k * params.lambda / 2) as u64;
        for u in (0..n).step_by((n / TRIANGLE_SAMPLE).max(1)) {
            let counted: u64 = g
                .neighbors(u)
                .into_iter()
                .map(|w| g.common_neighbors(u, w) as u64)
                .sum::<u64>()
                / 2;
            if counted != local {
                return Err(GraphError::TriangleMismatch {
                    formula: local,
                    counted,
                });
            }
        }
    }
    let mut local_profile = BTreeMap::new();
    for u in 0..PROFILE_ROWS.min(n) {
        for w in u + 1..PROFILE_COLS.min(n) {
            *local_profile.entry(g.common_neighbors(u, w)).or_insert(0) += 1;
        }
    }
    Ok(SrgFingerprint {
        params,
        eigenvalues,
        triangles: formula,
        local_profile,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExportFormat {
    Graph6,
    Dimacs,
    EdgeList,
}

impl FromStr for ExportFormat {
    type Err = GraphError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "graph6" | "g6" => Ok(ExportFormat::Graph6),
            "dimacs" => Ok(ExportFormat::Dimacs),
            "edgelist" | "edges" => Ok(ExportFormat::EdgeList),
            other => Err(GraphError::UnsupportedFormat(other.to_string())),
        }
    }
}

impl fmt::Display for ExportFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ExportFormat::Graph6 => "graph6",
            ExportFormat::Dimacs => "dimacs",
            ExportFormat::EdgeList => "edgelist",
        })
    }
}

/// Serializes the graph; output is byte-deterministic.
pub fn export(g: &Graph, format: ExportFormat) -> Vec<u8> {
    match format {
        ExportFormat::Graph6 => to_graph6(g),
        ExportFormat::Dimacs => {
            let edges = g.edges();
            let mut out = format!("p edge {} {}\n", g.order, edges.len());
            for (u, w) in edges {
                out.push_str(&format!("e {} {}\n", u + 1, w + 1));
            }
            out.into_bytes()
        }
        ExportFormat::EdgeList => {
            let mut out = String::new();
            for (u, w) in g.edges() {
                out.push_str(&format!("{u} {w}\n"));
            }
            out.into_bytes()
        }
    }
}

fn graph6_size_header(n: usize) -> Vec<u8> {
    if n < 63 {
        vec![n as u8 + 63]
    } else if n <= 258_047 {
        let mut out = vec![126];
        out.extend((0..3).rev().map(|i| ((n >> (6 * i)) & 63) as u8 + 63));
        out
    } else {
        let mut out = vec![126, 126];
        out.extend((0..6).rev().map(|i| ((n >> (6 * i)) & 63) as u8 + 63));
        out
    }
}

fn to_graph6(g: &Graph) -> Vec<u8> {
    let n = g.order;
    let mut out = graph6_size_header(n);
    // upper triangle, column by column: x(0,1), x(0,2), x(1,2), x(0,3), ...
    let mut acc = 0u8;
    let mut filled = 0;
    for w in 1..n {
        for u in 0..w {
            acc = (acc << 1) | g.is_adjacent(u, w) as u8;
            filled += 1;
            if filled == 6 {
                out.push(acc + 63);
                acc = 0;
                filled = 0;
            }
        }
    }
    if filled > 0 {
        out.push((acc << (6 - filled)) + 63);
    }
    out.push(b'\n');
    out
}

/// Decodes a single graph6 record into its order and sorted edge list.
pub fn parse_graph6(bytes: &[u8]) -> Result<(usize, Vec<(usize, usize)>), GraphError> {
    let bytes = bytes.strip_suffix(b"\n").unwrap_or(bytes);
    let bytes = bytes.strip_prefix(b">>graph6<<").unwrap_or(bytes);
    let err = |m: &str| GraphError::Parse(format!("graph6: {m}"));
    if bytes.iter().any(|b| !(63..=126).contains(b)) {
        return Err(err("byte outside the printable range"));
    }
    let (n, rest) = match bytes {
        [126, 126, rest @ ..] if rest.len() >= 6 => (
            rest[..6]
                .iter()
                .fold(0usize, |a, b| (a << 6) | (b - 63) as usize),
            &rest[6..],
        ),
        [126, rest @ ..] if rest.len() >= 3 => (
            rest[..3]
                .iter()
                .fold(0usize, |a, b| (a << 6) | (b - 63) as usize),
            &rest[3..],
        ),
        [b, rest @ ..] if *b < 126 => ((b - 63) as usize, rest),
        _ => return Err(err("missing size header")),
    };
    let bits = n * n.saturating_sub(1) / 2;
    if rest.len() != bits.div_ceil(6) {
        return Err(err("body length does not match the order"));
    }
    let mut edges = Vec::new();
    let mut idx = 0;
    for w in 1..n {
        for u in 0..w {
            let byte = rest[idx / 6] - 63;
            if byte >> (5 - idx % 6) & 1 == 1 {
                edges.push((u, w));
            }
            idx += 1;
        }
    }
    edges.sort_unstable();
    Ok((n, edges))
}

/// Parses `u w` lines (0-based).
pub fn parse_edge_list(text: &str) -> Result<Vec<(usize, usize)>, GraphError> {
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| {
            let mut it = l.split_whitespace().map(|t| t.parse::<usize>());
            match (it.next(), it.next(), it.next()) {
                (Some(Ok(u)), Some(Ok(w)), None) => Ok((u, w)),
                _ => Err(GraphError::Parse(format!("bad edge line `{l}`"))),
            }
        })
        .collect()
}

/// Parses a DIMACS `p edge` file into its order and 0-based edges.
pub fn parse_dimacs(text: &str) -> Result<(usize, Vec<(usize, usize)>), GraphError> {
    let mut order = None;
    let mut edges = Vec::new();
    for line in text.lines() {
        let toks: Vec<&str> = line.split_whitespace().collect();
        match toks.as_slice() {
            [] | ["c", ..] => {}
            ["p", "edge", n, _m] => {
                order = Some(n.parse().map_err(|_| GraphError::Parse(line.into()))?);
            }
            ["e", u, w] => {
                let u: usize = u.parse().map_err(|_| GraphError::Parse(line.into()))?;
                let w: usize = w.parse().map_err(|_| GraphError::Parse(line.into()))?;
                if u == 0 || w == 0 {
                    return Err(GraphError::Parse("DIMACS vertices are 1-based".into()));
                }
                edges.push((u - 1, w - 1));
            }
            _ => return Err(GraphError::Parse(format!("bad DIMACS line `{line}`"))),
        }
    }
    let order = order.ok_or_else(|| GraphError::Parse("missing `p edge` header".into()))?;
    Ok((order, edges))
}
