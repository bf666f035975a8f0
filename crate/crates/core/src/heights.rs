//! Worst-case entanglement heights.
//!
//! The height at cut `j` (between bits `j` and `j + 1`) is the base-2 log of
//! the largest bond dimension the chain could have reached there. Every
//! two-bit gate at cut `j` sets `h_j = min(h_{j-1}, h_{j+1}) + 1`, clamped to
//! `min(j, n - j)`. Starting from a product state (all heights zero) this rule
//! keeps neighbouring heights within one of each other, which in turn gives
//!
//! ```text
//! sum_j h_j <= 2 n_g,    max_j h_j <= min(floor(sqrt(2 n_g)), floor(n / 2))
//! ```
//!
//! for `n_g` two-bit gates. Actual SVD ranks are tracked alongside and must
//! never exceed `2^h_j`.

use serde::Serialize;

use crate::error::{Error, Result};

/// Snapshot of the chain after one logged operation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StepRecord {
    pub step: usize,
    pub op: String,
    /// `h_0..h_n`.
    pub heights: Vec<u32>,
    /// `D_0..D_n`.
    pub bond_dims: Vec<usize>,
    pub gate_count: u64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HeightProfile {
    heights: Vec<u32>,
    bond_dims: Vec<usize>,
    gate_count: u64,
    stale: bool,
    logging: bool,
    log: Vec<StepRecord>,
}

impl HeightProfile {
    /// All-zero profile for a fresh `n`-bit product state.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "a height profile needs at least one bit");
        Self {
            heights: vec![0; n + 1],
            bond_dims: vec![1; n + 1],
            gate_count: 0,
            stale: false,
            logging: false,
            log: Vec::new(),
        }
    }

    /// Profile with explicit heights `h_0..h_n`. Bond dimensions are taken to
    /// be `2^h_j`. Nothing is validated here; see [`check_bounds`](Self::check_bounds).
    pub fn from_heights(heights: Vec<u32>, gate_count: u64) -> Self {
        assert!(heights.len() >= 2, "a height profile needs at least one bit");
        let bond_dims = heights.iter().map(|&h| 1usize << h.min(63)).collect();
        Self { heights, bond_dims, gate_count, stale: false, logging: false, log: Vec::new() }
    }

    pub fn n_bits(&self) -> usize {
        self.heights.len() - 1
    }

    pub fn heights(&self) -> &[u32] {
        &self.heights
    }

    pub fn bond_dims(&self) -> &[usize] {
        &self.bond_dims
    }

    pub fn gate_count(&self) -> u64 {
        self.gate_count
    }

    /// True after a bit removal, until the next recompression sweep.
    pub fn is_stale(&self) -> bool {
        self.stale
    }

    pub fn log(&self) -> &[StepRecord] {
        &self.log
    }

    pub fn set_logging(&mut self, on: bool) {
        self.logging = on;
    }

    pub fn is_logging(&self) -> bool {
        self.logging
    }

    /// Applies the min+1 rule for a two-bit gate at `cut` and bumps `n_g`.
    pub fn update_on_gate(&mut self, cut: usize) -> Result<()> {
        let n = self.n_bits();
        if cut == 0 || cut >= n {
            return Err(Error::IndexOutOfRange { index: cut, n });
        }
        let grown = self.heights[cut - 1].min(self.heights[cut + 1]) + 1;
        self.heights[cut] = grown.min(edge_limit(cut, n));
        self.gate_count += 1;
        if !self.stale {
            for j in cut..=cut + 1 {
                if self.heights[j].abs_diff(self.heights[j - 1]) > 1 {
                    return Err(Error::HdcViolation { cut: j });
                }
            }
        }
        Ok(())
    }

    /// Counts gates that do not go through the min+1 rule (sweep identities).
    pub(crate) fn count_gates(&mut self, k: u64) {
        self.gate_count += k;
    }

    /// A new bit after bit `position` duplicates the height at that cut.
    pub(crate) fn on_insert(&mut self, position: usize) {
        let h = self.heights[position];
        self.heights.insert(position, h);
        let d = self.bond_dims[position];
        self.bond_dims.insert(position, d);
    }

    /// Drops the cut that disappears when `index` is absorbed, and marks the
    /// profile stale.
    pub(crate) fn on_remove(&mut self, index: usize, absorbed_left: bool) {
        let cut = if absorbed_left { index - 1 } else { index };
        self.heights.remove(cut);
        self.bond_dims.remove(cut);
        self.stale = true;
    }

    /// Rebuilds heights from actual bond dimensions: `ceil(log2 D_j)`, then
    /// raised where needed so neighbours differ by at most one. Raising
    /// never breaks dominance.
    pub(crate) fn recompute_from_dims(&mut self, dims: &[usize]) {
        let mut h: Vec<u32> = dims.iter().map(|&d| ceil_log2(d)).collect();
        // Upward closure over the interior cuts: h_j = max_i (h_i - |i - j|).
        let last = h.len() - 1;
        for j in 1..last {
            h[j] = h[j].max(h[j - 1].saturating_sub(1));
        }
        for j in (1..last).rev() {
            h[j] = h[j].max(h[j + 1].saturating_sub(1));
        }
        self.heights = h;
        self.stale = false;
        self.set_dims(dims);
    }

    pub(crate) fn set_dims(&mut self, dims: &[usize]) {
        self.bond_dims.clear();
        self.bond_dims.extend_from_slice(dims);
    }

    pub(crate) fn record(&mut self, op: impl Into<String>) {
        if !self.logging {
            return;
        }
        let step = self.log.len();
        self.log.push(StepRecord {
            step,
            op: op.into(),
            heights: self.heights.clone(),
            bond_dims: self.bond_dims.clone(),
            gate_count: self.gate_count,
        });
    }

    /// Evaluates every bound on the current profile.
    pub fn check_bounds(&self) -> BoundReport {
        let n = self.n_bits();
        let n_g = self.gate_count;
        let h_max = self.heights.iter().copied().max().unwrap_or(0);
        let height_sum: u64 = self.heights.iter().map(|&h| u64::from(h)).sum();
        let h_limit = height_limit(n, n_g);
        let peak = self.bond_dims.iter().copied().max().unwrap_or(1);
        let dim_limit = dim_limit(n, n_g);

        let mut violations = Vec::new();
        if self.heights[0] != 0 || self.heights[n] != 0 {
            violations.push("boundary heights are not zero".to_string());
        }
        for j in 1..=n {
            if self.heights[j].abs_diff(self.heights[j - 1]) > 1 {
                violations.push(format!("hdc fails between cuts {} and {j}", j - 1));
            }
        }
        for (j, &h) in self.heights.iter().enumerate() {
            if h > edge_limit(j, n) {
                violations.push(format!("h_{j} = {h} exceeds min(j, n-j)"));
            }
        }
        if u64::from(h_max) > u64::from(h_limit) {
            violations.push(format!("h_max = {h_max} exceeds {h_limit}"));
        }
        if height_sum > 2 * n_g {
            violations.push(format!("sum of heights {height_sum} exceeds 2 n_g = {}", 2 * n_g));
        }
        for (j, (&d, &h)) in self.bond_dims.iter().zip(&self.heights).enumerate() {
            if ceil_log2(d) > h {
                violations.push(format!("D_{j} = {d} exceeds 2^h_{j} = 2^{h}"));
            }
        }
        if peak as u128 > dim_limit {
            violations.push(format!("peak bond dimension {peak} exceeds {dim_limit}"));
        }

        BoundReport {
            n,
            gate_count: n_g,
            h_max,
            height_sum,
            h_limit,
            area_limit: 2 * n_g,
            peak_bond_dim: peak,
            dim_limit,
            stale: self.stale,
            passed: violations.is_empty(),
            violations,
        }
    }

    /// CSV with one row per logged step: `step,op,h_1..h_{N-1},D_1..D_{N-1},n_g`,
    /// where `N` is the widest chain seen. Narrower rows leave trailing height
    /// and dimension cells empty.
    pub fn export_csv(&self) -> String {
        let width = self.log.iter().map(|r| r.heights.len() - 1).chain([self.n_bits()]).max().unwrap_or(1);
        let cuts = width.saturating_sub(1);

        let mut wtr = csv::Writer::from_writer(Vec::new());
        let mut header = vec!["step".to_string(), "op".to_string()];
        header.extend((1..=cuts).map(|j| format!("h_{j}")));
        header.extend((1..=cuts).map(|j| format!("D_{j}")));
        header.push("n_g".to_string());
        wtr.write_record(&header).expect("writing to a Vec cannot fail");

        for r in &self.log {
            let inner = r.heights.len() - 2;
            let mut row = vec![r.step.to_string(), r.op.clone()];
            row.extend((1..=cuts).map(|j| if j <= inner { r.heights[j].to_string() } else { String::new() }));
            row.extend((1..=cuts).map(|j| if j <= inner { r.bond_dims[j].to_string() } else { String::new() }));
            row.push(r.gate_count.to_string());
            wtr.write_record(&row).expect("writing to a Vec cannot fail");
        }
        String::from_utf8(wtr.into_inner().expect("flushing a Vec cannot fail")).expect("csv output is UTF-8")
    }
}

/// Outcome of [`HeightProfile::check_bounds`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BoundReport {
    pub n: usize,
    pub gate_count: u64,
    pub h_max: u32,
    pub height_sum: u64,
    /// `min(floor(sqrt(2 n_g)), floor(n / 2))`.
    pub h_limit: u32,
    /// `2 n_g`.
    pub area_limit: u64,
    pub peak_bond_dim: usize,
    /// `2^h_limit`.
    pub dim_limit: u128,
    pub stale: bool,
    pub passed: bool,
    pub violations: Vec<String>,
}

/// `min(j, n - j)`.
pub fn edge_limit(j: usize, n: usize) -> u32 {
    j.min(n.saturating_sub(j)) as u32
}

/// `min(floor(sqrt(2 n_g)), floor(n / 2))`.
pub fn height_limit(n: usize, n_g: u64) -> u32 {
    let by_gates = (2 * n_g).isqrt();
    by_gates.min((n / 2) as u64) as u32
}

/// `min(2^floor(sqrt(2 n_g)), 2^floor(n / 2))`, saturating at `u128::MAX`.
pub fn dim_limit(n: usize, n_g: u64) -> u128 {
    let h = height_limit(n, n_g);
    1u128.checked_shl(h).unwrap_or(u128::MAX)
}

pub(crate) fn ceil_log2(d: usize) -> u32 {
    d.max(1).next_power_of_two().trailing_zeros()
}
