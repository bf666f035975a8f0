//! One- and two-bit gates acting on an [`MpsState`].
//!
//! A one-bit gate mixes the two matrices of a site through its 2x2 stochastic
//! transfer function and never changes a bond dimension. A two-bit gate on
//! neighbouring bits `j, j+1` first assembles the `2 D_{j-1} x 2 D_{j+1}`
//! block matrix whose block `(a', b')` holds every product `M_j^a M_{j+1}^b`
//! that the gate maps to `(a', b')`, then factors it back into two sites with
//! an SVD. The shared dimension of the factors is the new bond `D_j`.

use std::fmt;
use std::num::NonZeroUsize;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::linalg::thin_svd;
use crate::state::{MpsState, SiteMatrices};

/// Probabilistic one-bit gate: `0 -> 0` with probability `p`, `1 -> 1` with
/// probability `q`.
#[derive(Clone, Debug, PartialEq)]
pub struct OneBitGate {
    p: f64,
    q: f64,
    name: Option<&'static str>,
}

impl OneBitGate {
    pub fn new(p: f64, q: f64) -> Result<Self> {
        for (label, v) in [("p", p), ("q", q)] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::InvalidGate(format!("{label} = {v} is not a probability")));
            }
        }
        Ok(Self { p, q, name: None })
    }

    const fn named(p: f64, q: f64, name: &'static str) -> Self {
        Self { p, q, name: Some(name) }
    }

    pub const NOT: Self = Self::named(0.0, 0.0, "NOT");
    pub const RAND: Self = Self::named(0.5, 0.5, "RAND");
    /// Resets to 0.
    pub const RST: Self = Self::named(1.0, 0.0, "RST");
    /// Resets to 1.
    pub const SET: Self = Self::named(0.0, 1.0, "SET");

    pub const BUILTIN: [Self; 4] = [Self::NOT, Self::RAND, Self::RST, Self::SET];

    pub fn builtin(name: &str) -> Option<Self> {
        Self::BUILTIN.into_iter().find(|g| g.name == Some(name))
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    /// Built-in name, if this is one of [`BUILTIN`](Self::BUILTIN).
    pub fn name(&self) -> Option<&'static str> {
        self.name
    }

    /// `t^{out,input}`.
    pub fn transfer(&self, out: bool, input: bool) -> f64 {
        match (out, input) {
            (false, false) => self.p,
            (true, false) => 1.0 - self.p,
            (false, true) => 1.0 - self.q,
            (true, true) => self.q,
        }
    }

    pub fn is_deterministic(&self) -> bool {
        [self.p, self.q].iter().all(|&v| v == 0.0 || v == 1.0)
    }

    /// Output for a deterministic gate; `None` when the gate randomises.
    pub fn eval(&self, input: bool) -> Option<bool> {
        let stay = if input { self.q } else { self.p };
        if stay == 1.0 {
            Some(input)
        } else if stay == 0.0 {
            Some(!input)
        } else {
            None
        }
    }
}

/// Deterministic two-bit gate `(a, b) -> (A(a, b), B(a, b))`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TwoBitGate {
    name: String,
    /// Output pair for input `(a, b)`, indexed by `2a + b`.
    table: [(bool, bool); 4],
}

fn out_pairs(logic_a: [bool; 4], logic_b: [bool; 4]) -> [(bool, bool); 4] {
    std::array::from_fn(|k| (logic_a[k], logic_b[k]))
}

impl TwoBitGate {
    /// Builds a gate from the truth tables of `A` and `B`, each indexed by
    /// `2a + b`.
    pub fn from_tables(name: impl Into<String>, logic_a: [bool; 4], logic_b: [bool; 4]) -> Self {
        Self { name: name.into(), table: out_pairs(logic_a, logic_b) }
    }

    /// Keeps `a` and replaces `b` with `f(a, b)`.
    fn controlled(name: &str, f: impl Fn(bool, bool) -> bool) -> Self {
        let a = [false, false, true, true];
        let b = [false, true, false, true];
        Self::from_tables(name, a, std::array::from_fn(|k| f(a[k], b[k])))
    }

    pub fn identity() -> Self {
        Self::from_tables("ID", [false, false, true, true], [false, true, false, true])
    }

    pub fn swap() -> Self {
        Self::from_tables("SWAP", [false, true, false, true], [false, false, true, true])
    }

    pub fn cnand() -> Self {
        Self::controlled("CNAND", |a, b| !(a && b))
    }

    pub fn cand() -> Self {
        Self::controlled("CAND", |a, b| a && b)
    }

    pub fn cor() -> Self {
        Self::controlled("COR", |a, b| a || b)
    }

    pub fn cxor() -> Self {
        Self::controlled("CXOR", |a, b| a ^ b)
    }

    pub fn cnor() -> Self {
        Self::controlled("CNOR", |a, b| !(a || b))
    }

    pub const BUILTIN_NAMES: [&'static str; 7] = ["ID", "SWAP", "CNAND", "CAND", "COR", "CXOR", "CNOR"];

    pub fn builtin(name: &str) -> Option<Self> {
        Some(match name {
            "ID" => Self::identity(),
            "SWAP" => Self::swap(),
            "CNAND" => Self::cnand(),
            "CAND" => Self::cand(),
            "COR" => Self::cor(),
            "CXOR" => Self::cxor(),
            "CNOR" => Self::cnor(),
            _ => return None,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn apply(&self, a: bool, b: bool) -> (bool, bool) {
        self.table[2 * usize::from(a) + usize::from(b)]
    }

    /// `T^{a'b', ab}`: 1 if the gate sends `(a, b)` to `(a', b')`.
    pub fn transfer(&self, out: (bool, bool), input: (bool, bool)) -> u8 {
        u8::from(self.apply(input.0, input.1) == out)
    }

    /// The same logic seen with its operands swapped, for a gate whose first
    /// operand sits to the right of its second.
    pub fn mirrored(&self) -> Self {
        let table = std::array::from_fn(|k| {
            let (l, r) = (k >= 2, k % 2 == 1);
            let (a, b) = self.apply(r, l);
            (b, a)
        });
        Self { name: self.name.clone(), table }
    }

    /// Truth table in the `table2` layout: `A00B00 A01B01 A10B10 A11B11`.
    pub fn table_string(&self) -> String {
        let bit = |v: bool| if v { '1' } else { '0' };
        self.table.iter().map(|&(a, b)| format!("{}{}", bit(a), bit(b))).collect::<Vec<_>>().join(" ")
    }
}

impl fmt::Display for TwoBitGate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

/// Rank control for the SVD that splits a two-site block.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SvdConfig {
    /// Singular values at or below `rank_tol * sigma_max` are dropped.
    pub rank_tol: f64,
    /// Lossy cap on the kept rank. Off by default.
    pub trunc_max_rank: Option<NonZeroUsize>,
}

impl SvdConfig {
    pub const DEFAULT_RANK_TOL: f64 = 1e-12;

    pub fn new(rank_tol: f64, trunc_max_rank: Option<NonZeroUsize>) -> Result<Self> {
        if !rank_tol.is_finite() || rank_tol < 0.0 {
            return Err(Error::InvalidGate(format!("rank tolerance {rank_tol} must be finite and >= 0")));
        }
        Ok(Self { rank_tol, trunc_max_rank })
    }

    pub fn is_lossy(&self) -> bool {
        self.trunc_max_rank.is_some()
    }
}

impl Default for SvdConfig {
    fn default() -> Self {
        Self { rank_tol: Self::DEFAULT_RANK_TOL, trunc_max_rank: None }
    }
}

/// Block matrix for `gate` acting on two neighbouring sites. Row blocks are
/// indexed by the new left bit, column blocks by the new right bit.
pub fn assemble_gate_blocks(left: &SiteMatrices, right: &SiteMatrices, gate: &TwoBitGate) -> Result<DMatrix<f64>> {
    if left.right_dim() != right.left_dim() {
        return Err(Error::DimensionMismatch(format!(
            "cannot join sites over bonds {} and {}",
            left.right_dim(),
            right.left_dim()
        )));
    }
    let (dl, dr) = (left.left_dim(), right.right_dim());
    let mut blocks = DMatrix::zeros(2 * dl, 2 * dr);
    for a in [false, true] {
        for b in [false, true] {
            let (na, nb) = gate.apply(a, b);
            let mut dst = blocks.view_mut((usize::from(na) * dl, usize::from(nb) * dr), (dl, dr));
            dst.gemm(1.0, left.get(a), right.get(b), 1.0);
        }
    }
    Ok(blocks)
}

/// Factors a `2 D_l x 2 D_r` block matrix into two sites through an SVD,
/// splitting `sqrt(sigma)` into each side.
pub fn svd_split(blocks: DMatrix<f64>, cfg: &SvdConfig) -> Result<(SiteMatrices, SiteMatrices)> {
    let (rows, cols) = blocks.shape();
    if rows % 2 != 0 || cols % 2 != 0 || rows == 0 || cols == 0 {
        return Err(Error::DimensionMismatch(format!("block matrix {rows}x{cols} is not 2D_l x 2D_r")));
    }
    if blocks.iter().any(|v| !v.is_finite()) {
        return Err(Error::CorruptState("non-finite entry in gate block".into()));
    }
    let svd = thin_svd(&blocks)?;
    let sigma = &svd.s;
    let sigma_max = sigma[0];
    if sigma_max.is_nan() || sigma_max <= 0.0 {
        return Err(Error::CorruptState("gate block is identically zero".into()));
    }
    let cutoff = cfg.rank_tol * sigma_max;
    let mut rank = sigma.iter().take_while(|&&s| s > cutoff).count().max(1);
    if let Some(cap) = cfg.trunc_max_rank {
        rank = rank.min(cap.get());
    }

    let left = DMatrix::from_fn(rows, rank, |i, k| svd.u[(i, k)] * sigma[k].sqrt());
    let right = DMatrix::from_fn(rank, cols, |k, j| svd.vt[(k, j)] * sigma[k].sqrt());

    let (dl, dr) = (rows / 2, cols / 2);
    let left = SiteMatrices::from_parts_unchecked(left.rows(0, dl).into_owned(), left.rows(dl, dl).into_owned());
    let right =
        SiteMatrices::from_parts_unchecked(right.columns(0, dr).into_owned(), right.columns(dr, dr).into_owned());
    Ok((left, right))
}

impl MpsState {
    /// `M'^x = sum_{x'} t^{x,x'} M^{x'}` on bit `index`.
    pub fn apply_one_bit(&mut self, index: usize, gate: &OneBitGate) -> Result<()> {
        self.check_index(index)?;
        self.touch(index);
        let site = &mut self.sites[index - 1];
        let (m0, m1) = std::mem::replace(site, SiteMatrices::scalar(0.0, 0.0)).into_parts();
        let new0 = &m0 * gate.transfer(false, false) + &m1 * gate.transfer(false, true);
        let new1 = m0 * gate.transfer(true, false) + m1 * gate.transfer(true, true);
        *site = SiteMatrices::from_parts_unchecked(new0, new1);
        Ok(())
    }

    /// Applies `gate` to bits `left_index` (operand `a`) and `left_index + 1`
    /// (operand `b`).
    pub fn apply_two_bit(&mut self, left_index: usize, gate: &TwoBitGate, cfg: &SvdConfig) -> Result<()> {
        self.split_at(left_index, gate, cfg)?;
        self.profile.update_on_gate(left_index)?;
        self.sync_dims();
        Ok(())
    }

    fn split_at(&mut self, left_index: usize, gate: &TwoBitGate, cfg: &SvdConfig) -> Result<()> {
        let n = self.n_bits();
        if left_index == 0 || left_index >= n {
            return Err(Error::IndexOutOfRange { index: left_index, n });
        }
        self.orthonormalize_around(left_index, left_index + 1);
        let blocks = assemble_gate_blocks(&self.sites[left_index - 1], &self.sites[left_index], gate)?;
        let (l, r) = svd_split(blocks, cfg)?;
        self.sites[left_index - 1] = l;
        self.sites[left_index] = r;
        self.touch(left_index);
        self.touch(left_index + 1);
        if cfg.is_lossy() {
            self.approximate = true;
        }
        Ok(())
    }

    /// Identity gates on every cut left to right, then right to left. The
    /// distribution is unchanged; each bond drops to the numerical rank of
    /// the distribution across that cut. Heights are rebuilt from the new
    /// dimensions and every identity counts toward `n_g`.
    pub fn recompress_sweeps(&mut self, cfg: &SvdConfig) -> Result<()> {
        let n = self.n_bits();
        let id = TwoBitGate::identity();
        for cut in (1..n).chain((1..n).rev()) {
            self.split_at(cut, &id, cfg)?;
        }
        self.profile.count_gates(2 * (n as u64).saturating_sub(1));
        let dims = self.bond_dims();
        self.profile.recompute_from_dims(&dims);
        self.sync_dims();
        Ok(())
    }
}
