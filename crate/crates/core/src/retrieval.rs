//! Static function retrieval over a mixed hypergraph.
//!
//! Every key is hashed to an edge of distinct cells; its value is the XOR of
//! those cells. Construction peels the key hypergraph and, when the 2-core is
//! empty, assigns cells in reverse peeling order so that each removed edge is
//! satisfied by the one cell it owned at removal time.

use alloc::vec::Vec;
use thiserror::Error;

use crate::hash::{derived, key_digest, reduce};
use crate::hypergraph::Hypergraph;
use crate::peel::peel;
use crate::threshold::{EdgeMix, ThresholdError};

const MAGIC: [u8; 4] = *b"MXRT";
const FORMAT_VERSION: u32 = 1;
const TWO_POW_64: f64 = 18_446_744_073_709_551_616.0;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RetrievalError {
    #[error("load factor {0} must lie in (0, 1)")]
    InvalidLoad(f64),
    #[error("cell width {0} must lie in [1, 64]")]
    InvalidWidth(u32),
    #[error("value {value:#x} of pair {index} does not fit in {r} bits")]
    ValueTooWide { index: usize, value: u64, r: u32 },
    #[error("{n} cells cannot hold an edge of size {k}")]
    TooFewCells { n: usize, k: u32 },
    #[error("non-empty 2-core in all {attempts} attempts; load is too close to the threshold")]
    BuildFailed { attempts: u32 },
    #[error("malformed serialized structure: {0}")]
    Corrupt(&'static str),
    #[error(transparent)]
    Mix(#[from] ThresholdError),
}

/// The edge a key is mapped to.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeAssignment {
    pub digest: u64,
    /// Index into the mixture's sizes; `0` is the small class.
    pub class: usize,
    pub nodes: Vec<u32>,
}

impl EdgeAssignment {
    pub fn is_small(&self) -> bool {
        self.class == 0
    }
}

fn class_of(digest: u64, mix: &EdgeMix) -> usize {
    let u = derived(digest, 0) as f64 / TWO_POW_64;
    let mut cumulative = 0.0;
    for (i, &alpha) in mix.fractions().iter().enumerate() {
        cumulative += alpha;
        if u < cumulative {
            return i;
        }
    }
    mix.len() - 1
}

/// Appends the `k` distinct cell ids derived from `digest` to `out`.
fn push_nodes(digest: u64, k: usize, n: usize, out: &mut Vec<u32>) {
    let start = out.len();
    let mut index = 1;
    while out.len() - start < k {
        let v = reduce(derived(digest, index), n as u64) as u32;
        index += 1;
        if !out[start..].contains(&v) {
            out.push(v);
        }
    }
}

/// Maps `key` to a size class and a set of distinct cells in `[0, n)`.
pub fn assign_edge(key: &[u8], seed: u64, mix: &EdgeMix, n: usize) -> Result<EdgeAssignment, RetrievalError> {
    if n < mix.max_size() as usize {
        return Err(RetrievalError::TooFewCells { n, k: mix.max_size() });
    }
    let digest = key_digest(key, seed);
    let class = class_of(digest, mix);
    let mut nodes = Vec::with_capacity(mix.sizes()[class] as usize);
    push_nodes(digest, mix.sizes()[class] as usize, n, &mut nodes);
    Ok(EdgeAssignment { digest, class, nodes })
}

/// A built retrieval structure.
#[derive(Debug, Clone, PartialEq)]
pub struct RetrievalStructure {
    cells: Vec<u64>,
    r: u32,
    mix: EdgeMix,
    n: usize,
    m: usize,
    seed: u64,
}

fn mask(r: u32) -> u64 {
    if r == 64 {
        u64::MAX
    } else {
        (1u64 << r) - 1
    }
}

impl RetrievalStructure {
    /// Builds the structure for `pairs` at load `c_build = m / n`.
    ///
    /// Keys must be distinct. On a non-empty 2-core the build is retried with
    /// `seed + 1`, `seed + 2`, … up to `max_retries` extra attempts.
    pub fn build<K: AsRef<[u8]>>(
        pairs: &[(K, u64)],
        c_build: f64,
        mix: &EdgeMix,
        r: u32,
        seed: u64,
        max_retries: u32,
    ) -> Result<Self, RetrievalError> {
        if !(c_build > 0.0 && c_build < 1.0) {
            return Err(RetrievalError::InvalidLoad(c_build));
        }
        if !(1..=64).contains(&r) {
            return Err(RetrievalError::InvalidWidth(r));
        }
        for (index, (_, value)) in pairs.iter().enumerate() {
            if value & !mask(r) != 0 {
                return Err(RetrievalError::ValueTooWide { index, value: *value, r });
            }
        }
        let m = pairs.len();
        if m == 0 {
            return Ok(Self { cells: Vec::new(), r, mix: mix.clone(), n: 0, m: 0, seed });
        }
        let n = (libm::ceil(m as f64 / c_build) as usize).max(mix.max_size() as usize);

        for attempt in 0..=max_retries {
            let attempt_seed = seed.wrapping_add(attempt as u64);
            let mut edges: Vec<Vec<u32>> = Vec::with_capacity(m);
            for (key, _) in pairs {
                edges.push(assign_edge(key.as_ref(), attempt_seed, mix, n)?.nodes);
            }
            let graph = Hypergraph::from_edges(n, &edges).expect("assigned cells are distinct and in range");
            drop(edges);
            let peeled = peel(&graph);
            if !peeled.is_core_empty() {
                continue;
            }
            let mut cells = alloc::vec![0u64; n];
            for &(v, e) in peeled.removed_pairs.iter().rev() {
                if let Some(e) = e {
                    let mut x = pairs[e as usize].1;
                    for &u in graph.edge(e as usize) {
                        if u != v {
                            x ^= cells[u as usize];
                        }
                    }
                    cells[v as usize] = x;
                }
            }
            return Ok(Self { cells, r, mix: mix.clone(), n, m, seed: attempt_seed });
        }
        Err(RetrievalError::BuildFailed { attempts: max_retries + 1 })
    }

    /// XOR of the cells of `key`'s edge. Keys outside the build set get an
    /// arbitrary `r`-bit value.
    pub fn query(&self, key: &[u8]) -> u64 {
        if self.n == 0 {
            return 0;
        }
        let digest = key_digest(key, self.seed);
        let k = self.mix.sizes()[class_of(digest, &self.mix)] as usize;
        let mut nodes = Vec::with_capacity(k);
        push_nodes(digest, k, self.n, &mut nodes);
        nodes.iter().fold(0, |acc, &v| acc ^ self.cells[v as usize])
    }

    /// `(bits per key, n / m)`, or `None` for an empty key set.
    pub fn space_report(&self) -> Option<(f64, f64)> {
        space_report(self.n, self.m, self.r)
    }

    pub fn cells(&self) -> &[u64] {
        &self.cells
    }

    pub fn cell_count(&self) -> usize {
        self.n
    }

    pub fn key_count(&self) -> usize {
        self.m
    }

    pub fn bits(&self) -> u32 {
        self.r
    }

    pub fn mix(&self) -> &EdgeMix {
        &self.mix
    }

    /// Fraction of keys assigned to the smallest edge size.
    pub fn alpha_star(&self) -> f64 {
        self.mix.fractions()[0]
    }

    /// Seed of the successful attempt.
    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Little-endian encoding: magic `MXRT`, version, `n`, `m`, `r`, `s`,
    /// sizes, fractions, seed, then the cells bit-packed at `r` bits each.
    pub fn to_bytes(&self) -> Vec<u8> {
        let s = self.mix.len();
        let packed_len = (self.n * self.r as usize).div_ceil(8);
        let mut out = Vec::with_capacity(40 + 12 * s + packed_len);
        out.extend_from_slice(&MAGIC);
        out.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
        out.extend_from_slice(&(self.n as u64).to_le_bytes());
        out.extend_from_slice(&(self.m as u64).to_le_bytes());
        out.extend_from_slice(&self.r.to_le_bytes());
        out.extend_from_slice(&(s as u32).to_le_bytes());
        for &k in self.mix.sizes() {
            out.extend_from_slice(&k.to_le_bytes());
        }
        for &f in self.mix.fractions() {
            out.extend_from_slice(&f.to_le_bytes());
        }
        out.extend_from_slice(&self.seed.to_le_bytes());

        let start = out.len();
        out.resize(start + packed_len, 0);
        let packed = &mut out[start..];
        let r = self.r as usize;
        for (i, &cell) in self.cells.iter().enumerate() {
            let mut bit = i * r;
            let mut remaining = r;
            let mut value = cell;
            while remaining > 0 {
                let offset = bit % 8;
                let take = (8 - offset).min(remaining);
                packed[bit / 8] |= ((value & ((1u64 << take) - 1)) as u8) << offset;
                value = value.checked_shr(take as u32).unwrap_or(0);
                bit += take;
                remaining -= take;
            }
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, RetrievalError> {
        let mut rd = Reader { bytes, pos: 0 };
        if rd.take(4)? != MAGIC {
            return Err(RetrievalError::Corrupt("bad magic"));
        }
        if rd.u32()? != FORMAT_VERSION {
            return Err(RetrievalError::Corrupt("unsupported version"));
        }
        let n = usize::try_from(rd.u64()?).map_err(|_| RetrievalError::Corrupt("cell count"))?;
        let m = usize::try_from(rd.u64()?).map_err(|_| RetrievalError::Corrupt("key count"))?;
        let r = rd.u32()?;
        if !(1..=64).contains(&r) {
            return Err(RetrievalError::Corrupt("cell width"));
        }
        let s = rd.u32()? as usize;
        if s == 0 || s > 1024 {
            return Err(RetrievalError::Corrupt("mixture length"));
        }
        let sizes = (0..s).map(|_| rd.u32()).collect::<Result<Vec<_>, _>>()?;
        let fractions = (0..s).map(|_| rd.u64().map(f64::from_bits)).collect::<Result<Vec<_>, _>>()?;
        let mix = EdgeMix::new(sizes, fractions)?;
        let seed = rd.u64()?;
        if n > 0 && n < mix.max_size() as usize {
            return Err(RetrievalError::Corrupt("fewer cells than the largest edge"));
        }
        let packed_len =
            n.checked_mul(r as usize).map(|b| b.div_ceil(8)).ok_or(RetrievalError::Corrupt("cell count"))?;
        let packed = rd.take(packed_len)?;
        if rd.pos != bytes.len() {
            return Err(RetrievalError::Corrupt("trailing bytes"));
        }

        let rr = r as usize;
        let mut cells = Vec::with_capacity(n);
        for i in 0..n {
            let mut bit = i * rr;
            let mut got = 0;
            let mut value = 0u64;
            while got < rr {
                let offset = bit % 8;
                let take = (8 - offset).min(rr - got);
                let chunk = (packed[bit / 8] >> offset) as u64 & ((1u64 << take) - 1);
                value |= chunk << got;
                got += take;
                bit += take;
            }
            cells.push(value);
        }
        Ok(Self { cells, r, mix, n, m, seed })
    }
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, len: usize) -> Result<&'a [u8], RetrievalError> {
        let end = self.pos.checked_add(len).filter(|&e| e <= self.bytes.len());
        let end = end.ok_or(RetrievalError::Corrupt("truncated"))?;
        let out = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(out)
    }

    fn u32(&mut self) -> Result<u32, RetrievalError> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().expect("4 bytes")))
    }

    fn u64(&mut self) -> Result<u64, RetrievalError> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().expect("8 bytes")))
    }
}

/// `(n·r / m, n / m)` for `m > 0`.
pub fn space_report(n: usize, m: usize, r: u32) -> Option<(f64, f64)> {
    if m == 0 {
        return None;
    }
    let overhead = n as f64 / m as f64;
    Some((overhead * r as f64, overhead))
}
