//! Matrix-product representation of a probability distribution over bit
//! strings.
//!
//! An `n`-bit state holds one [`SiteMatrices`] pair per bit. The probability
//! of a configuration `x_1 .. x_n` is the product
//!
//! ```text
//! P(x) = M_1^{x_1} M_2^{x_2} ... M_n^{x_n}
//! ```
//!
//! where `M_j^{x}` is `D_{j-1} x D_j` and `D_0 = D_n = 1`, so the product is a
//! scalar. Individual matrices may carry negative entries; only the contracted
//! products are probabilities. Marginals are obtained by substituting
//! `M_j^0 + M_j^1` for every unconstrained bit.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, RowDVector};

use crate::error::{Error, Result};
use crate::heights::HeightProfile;
use crate::linalg::thin_qr;

/// The pair `(M_j^0, M_j^1)` for one bit.
#[derive(Clone, Debug, PartialEq)]
pub struct SiteMatrices {
    m0: DMatrix<f64>,
    m1: DMatrix<f64>,
}

impl SiteMatrices {
    pub fn new(m0: DMatrix<f64>, m1: DMatrix<f64>) -> Result<Self> {
        if m0.shape() != m1.shape() {
            return Err(Error::DimensionMismatch(format!(
                "site matrices have shapes {:?} and {:?}",
                m0.shape(),
                m1.shape()
            )));
        }
        if m0.iter().chain(m1.iter()).any(|v| !v.is_finite()) {
            return Err(Error::CorruptState("non-finite site matrix entry".into()));
        }
        Ok(Self { m0, m1 })
    }

    /// A 1x1 site with weights `(w0, w1)`.
    pub fn scalar(w0: f64, w1: f64) -> Self {
        Self { m0: DMatrix::from_element(1, 1, w0), m1: DMatrix::from_element(1, 1, w1) }
    }

    /// A site pinned to `value` at a cut of dimension `dim`: identity for the
    /// pinned value, zero for the other.
    pub fn pinned(value: bool, dim: usize) -> Self {
        let id = DMatrix::identity(dim, dim);
        let zero = DMatrix::zeros(dim, dim);
        if value {
            Self { m0: zero, m1: id }
        } else {
            Self { m0: id, m1: zero }
        }
    }

    pub fn m0(&self) -> &DMatrix<f64> {
        &self.m0
    }

    pub fn m1(&self) -> &DMatrix<f64> {
        &self.m1
    }

    pub fn get(&self, value: bool) -> &DMatrix<f64> {
        if value {
            &self.m1
        } else {
            &self.m0
        }
    }

    pub fn left_dim(&self) -> usize {
        self.m0.nrows()
    }

    pub fn right_dim(&self) -> usize {
        self.m0.ncols()
    }

    /// `M^0 + M^1`, the matrix of a marginalised bit.
    pub fn summed(&self) -> DMatrix<f64> {
        &self.m0 + &self.m1
    }

    pub(crate) fn from_parts_unchecked(m0: DMatrix<f64>, m1: DMatrix<f64>) -> Self {
        debug_assert_eq!(m0.shape(), m1.shape());
        Self { m0, m1 }
    }

    pub(crate) fn into_parts(self) -> (DMatrix<f64>, DMatrix<f64>) {
        (self.m0, self.m1)
    }
}

/// Values for a subset of bits, keyed by 1-based bit index.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct BitAssignment(BTreeMap<usize, bool>);

impl BitAssignment {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds from `(index, value)` pairs; indices must be distinct and >= 1.
    pub fn from_pairs<I: IntoIterator<Item = (usize, bool)>>(pairs: I) -> Result<Self> {
        let mut out = Self::new();
        for (index, value) in pairs {
            if index == 0 {
                return Err(Error::InvalidAssignment("bit indices are 1-based".into()));
            }
            if out.0.insert(index, value).is_some() {
                return Err(Error::InvalidAssignment(format!("bit {index} assigned twice")));
            }
        }
        Ok(out)
    }

    /// Assigns `bits[k]` to `values[k]`.
    pub fn zip(bits: &[usize], values: &[bool]) -> Result<Self> {
        assert_eq!(bits.len(), values.len());
        Self::from_pairs(bits.iter().copied().zip(values.iter().copied()))
    }

    pub fn set(&mut self, index: usize, value: bool) -> Option<bool> {
        assert!(index >= 1, "bit indices are 1-based");
        self.0.insert(index, value)
    }

    pub fn get(&self, index: usize) -> Option<bool> {
        self.0.get(&index).copied()
    }

    pub fn remove(&mut self, index: usize) -> Option<bool> {
        self.0.remove(&index)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, index: usize) -> bool {
        self.0.contains_key(&index)
    }

    /// Iterates in increasing bit index.
    pub fn iter(&self) -> impl Iterator<Item = (usize, bool)> + '_ {
        self.0.iter().map(|(&k, &v)| (k, v))
    }

    pub fn indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.keys().copied()
    }

    /// Values of `bits` in the given order, as a `0`/`1` string.
    pub fn bit_string(&self, bits: &[usize]) -> Option<String> {
        bits.iter().map(|&b| self.get(b).map(|v| if v { '1' } else { '0' })).collect()
    }

    fn check_range(&self, n: usize) -> Result<()> {
        match self.0.keys().next_back() {
            Some(&index) if index > n => Err(Error::IndexOutOfRange { index, n }),
            _ => Ok(()),
        }
    }
}

impl FromIterator<(usize, bool)> for BitAssignment {
    fn from_iter<I: IntoIterator<Item = (usize, bool)>>(iter: I) -> Self {
        let mut out = Self::new();
        for (k, v) in iter {
            out.set(k, v);
        }
        out
    }
}

/// Parses `"1=0,3=1"`. The empty string is the empty assignment.
impl FromStr for BitAssignment {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = |part: &str| Error::InvalidAssignment(format!("expected <bit>=<0|1>, got {part:?}"));
        let mut pairs = Vec::new();
        for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (idx, val) = part.split_once('=').ok_or_else(|| bad(part))?;
            let idx: usize = idx.trim().parse().map_err(|_| bad(part))?;
            let val = match val.trim() {
                "0" => false,
                "1" => true,
                _ => return Err(bad(part)),
            };
            pairs.push((idx, val));
        }
        Self::from_pairs(pairs)
    }
}

impl fmt::Display for BitAssignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (k, v)) in self.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{k}={}", u8::from(v))?;
        }
        Ok(())
    }
}

/// An `n`-bit matrix-product state together with its height bookkeeping.
#[derive(Clone, Debug)]
pub struct MpsState {
    pub(crate) sites: Vec<SiteMatrices>,
    pub(crate) profile: HeightProfile,
    pub(crate) peak_bond_dim: usize,
    pub(crate) approximate: bool,
    /// Leading sites known to satisfy `sum_x M^x^T M^x = I`.
    pub(crate) left_canonical: usize,
    /// Trailing sites known to satisfy `sum_x M^x M^x^T = I`.
    pub(crate) right_canonical: usize,
}

impl MpsState {
    /// Product state with every bit uniform except those pinned in `fixed`.
    pub fn new(n: usize, fixed: &BitAssignment) -> Result<Self> {
        if n == 0 {
            return Err(Error::IndexOutOfRange { index: 0, n: 0 });
        }
        fixed.check_range(n)?;
        let sites = (1..=n)
            .map(|j| match fixed.get(j) {
                Some(false) => SiteMatrices::scalar(1.0, 0.0),
                Some(true) => SiteMatrices::scalar(0.0, 1.0),
                None => SiteMatrices::scalar(0.5, 0.5),
            })
            .collect();
        Ok(Self {
            sites,
            profile: HeightProfile::new(n),
            peak_bond_dim: 1,
            approximate: false,
            left_canonical: 0,
            right_canonical: 0,
        })
    }

    /// Uniform distribution over all `2^n` strings.
    pub fn uniform(n: usize) -> Result<Self> {
        Self::new(n, &BitAssignment::new())
    }

    /// Wraps explicit site matrices. Heights are derived from the actual bond
    /// dimensions.
    pub fn from_sites(sites: Vec<SiteMatrices>) -> Result<Self> {
        if sites.is_empty() {
            return Err(Error::IndexOutOfRange { index: 0, n: 0 });
        }
        let mut state = Self {
            profile: HeightProfile::new(sites.len()),
            sites,
            peak_bond_dim: 1,
            approximate: false,
            left_canonical: 0,
            right_canonical: 0,
        };
        state.validate()?;
        let dims = state.bond_dims();
        state.profile.recompute_from_dims(&dims);
        state.peak_bond_dim = dims.iter().copied().max().unwrap_or(1);
        Ok(state)
    }

    pub fn n_bits(&self) -> usize {
        self.sites.len()
    }

    pub fn sites(&self) -> &[SiteMatrices] {
        &self.sites
    }

    pub fn site(&self, index: usize) -> Result<&SiteMatrices> {
        self.check_index(index)?;
        Ok(&self.sites[index - 1])
    }

    /// Mutable access to a site, for fault injection in tests and tools.
    /// Shapes are re-validated on the next contraction.
    pub fn site_mut(&mut self, index: usize) -> Result<&mut SiteMatrices> {
        self.check_index(index)?;
        self.left_canonical = 0;
        self.right_canonical = 0;
        Ok(&mut self.sites[index - 1])
    }

    /// `D_0..D_n`.
    pub fn bond_dims(&self) -> Vec<usize> {
        let mut dims = Vec::with_capacity(self.sites.len() + 1);
        dims.push(self.sites[0].left_dim());
        dims.extend(self.sites.iter().map(SiteMatrices::right_dim));
        dims
    }

    pub fn max_bond_dim(&self) -> usize {
        self.sites.iter().map(SiteMatrices::right_dim).max().unwrap_or(1)
    }

    /// Largest bond dimension this state has had since initialisation.
    pub fn peak_bond_dim(&self) -> usize {
        self.peak_bond_dim
    }

    pub fn tracked_heights(&self) -> &[u32] {
        self.profile.heights()
    }

    /// Two-bit gates applied so far, sweep identities and routing swaps included.
    pub fn gate_count(&self) -> u64 {
        self.profile.gate_count()
    }

    pub fn profile(&self) -> &HeightProfile {
        &self.profile
    }

    pub fn profile_mut(&mut self) -> &mut HeightProfile {
        &mut self.profile
    }

    /// Set once any lossy truncation has been enabled on this state.
    pub fn is_approximate(&self) -> bool {
        self.approximate
    }

    pub(crate) fn check_index(&self, index: usize) -> Result<()> {
        let n = self.n_bits();
        if index == 0 || index > n {
            return Err(Error::IndexOutOfRange { index, n });
        }
        Ok(())
    }

    /// Records that site `index` changed, shrinking the canonical regions.
    pub(crate) fn touch(&mut self, index: usize) {
        self.left_canonical = self.left_canonical.min(index - 1);
        self.right_canonical = self.right_canonical.min(self.n_bits() - index);
    }

    /// Regauges sites `1..first` to be left-orthonormal and `last+1..=n` to
    /// be right-orthonormal with QR steps; the distribution is unchanged.
    /// Afterwards the singular values of any block on sites `first..=last`
    /// are the Schmidt values of `P` across the corresponding cut, so a
    /// relative rank cutoff there only discards rounding noise.
    pub(crate) fn orthonormalize_around(&mut self, first: usize, last: usize) {
        let n = self.n_bits();
        while self.left_canonical + 1 < first {
            let k = self.left_canonical;
            let (m0, m1) = std::mem::replace(&mut self.sites[k], SiteMatrices::scalar(0.0, 0.0)).into_parts();
            let dl = m0.nrows();
            let (q, r) =
                thin_qr(&DMatrix::from_fn(
                    2 * dl,
                    m0.ncols(),
                    |i, j| if i < dl { m0[(i, j)] } else { m1[(i - dl, j)] },
                ));
            self.sites[k] = SiteMatrices::from_parts_unchecked(q.rows(0, dl).into_owned(), q.rows(dl, dl).into_owned());
            let (n0, n1) = std::mem::replace(&mut self.sites[k + 1], SiteMatrices::scalar(0.0, 0.0)).into_parts();
            self.sites[k + 1] = SiteMatrices::from_parts_unchecked(&r * n0, &r * n1);
            self.left_canonical += 1;
            self.right_canonical = self.right_canonical.min(n - (k + 2));
        }
        while self.right_canonical + last < n {
            let k = n - 1 - self.right_canonical;
            let (m0, m1) = std::mem::replace(&mut self.sites[k], SiteMatrices::scalar(0.0, 0.0)).into_parts();
            let dr = m0.ncols();
            // [M^0 M^1] = R^T Q^T from the QR of its transpose
            let (q, r) =
                thin_qr(&DMatrix::from_fn(
                    2 * dr,
                    m0.nrows(),
                    |i, j| if i < dr { m0[(j, i)] } else { m1[(j, i - dr)] },
                ));
            let (q_t, r_t) = (q.transpose(), r.transpose());
            self.sites[k] =
                SiteMatrices::from_parts_unchecked(q_t.columns(0, dr).into_owned(), q_t.columns(dr, dr).into_owned());
            let (p0, p1) = std::mem::replace(&mut self.sites[k - 1], SiteMatrices::scalar(0.0, 0.0)).into_parts();
            self.sites[k - 1] = SiteMatrices::from_parts_unchecked(p0 * &r_t, p1 * &r_t);
            self.right_canonical += 1;
            self.left_canonical = self.left_canonical.min(k - 1);
        }
    }

    /// Checks boundary dimensions and that neighbouring sites chain up.
    pub fn validate(&self) -> Result<()> {
        let n = self.n_bits();
        for (j, s) in self.sites.iter().enumerate() {
            if s.m0.shape() != s.m1.shape() {
                return Err(Error::DimensionMismatch(format!("site {} has mismatched halves", j + 1)));
            }
        }
        if self.sites[0].left_dim() != 1 || self.sites[n - 1].right_dim() != 1 {
            return Err(Error::DimensionMismatch("boundary bond dimension is not 1".into()));
        }
        for (j, pair) in self.sites.windows(2).enumerate() {
            if pair[0].right_dim() != pair[1].left_dim() {
                return Err(Error::DimensionMismatch(format!(
                    "cut {}: {} vs {}",
                    j + 1,
                    pair[0].right_dim(),
                    pair[1].left_dim()
                )));
            }
        }
        Ok(())
    }

    pub(crate) fn sync_dims(&mut self) {
        let dims = self.bond_dims();
        self.peak_bond_dim = self.peak_bond_dim.max(dims.iter().copied().max().unwrap_or(1));
        self.profile.set_dims(&dims);
    }

    /// Marginal probability of the bits in `constraint`. Contracts a row
    /// vector left to right, so the cost is `O(n D^2)`.
    pub fn probability(&self, constraint: &BitAssignment) -> Result<f64> {
        constraint.check_range(self.n_bits())?;
        let mut row = RowDVector::from_element(1, 1.0);
        for (j, site) in self.sites.iter().enumerate() {
            if row.ncols() != site.left_dim() || site.m0.shape() != site.m1.shape() {
                return Err(Error::DimensionMismatch(format!("at site {}", j + 1)));
            }
            row = match constraint.get(j + 1) {
                Some(v) => &row * site.get(v),
                None => &row * &site.m0 + &row * &site.m1,
            };
        }
        if row.ncols() != 1 {
            return Err(Error::DimensionMismatch("right boundary is not 1".into()));
        }
        Ok(row[0])
    }

    /// `Z`, which is 1 for every well-formed state.
    pub fn normalization(&self) -> Result<f64> {
        self.probability(&BitAssignment::new())
    }

    /// Joint distribution of `bits` (all others marginalised). Entry `k` is
    /// the probability that `bits[0]` is the most significant bit of `k`,
    /// `bits[1]` the next, and so on.
    pub fn joint_distribution(&self, bits: &[usize]) -> Result<Vec<f64>> {
        let n = self.n_bits();
        let mut weight = vec![None; n + 1];
        for (pos, &b) in bits.iter().enumerate() {
            if b == 0 || b > n {
                return Err(Error::IndexOutOfRange { index: b, n });
            }
            if weight[b].replace(1usize << (bits.len() - 1 - pos)).is_some() {
                return Err(Error::InvalidAssignment(format!("bit {b} listed twice")));
            }
        }
        self.validate()?;

        // Marginalised sites are pre-summed once; each branch point then costs
        // one vector-matrix product per surviving prefix.
        let summed: Vec<Option<DMatrix<f64>>> =
            self.sites.iter().enumerate().map(|(j, s)| weight[j + 1].is_none().then(|| s.summed())).collect();

        let mut out = vec![0.0; 1usize << bits.len()];
        let mut frontier = vec![(0usize, RowDVector::from_element(1, 1.0))];
        for (j, site) in self.sites.iter().enumerate() {
            frontier = match (&summed[j], weight[j + 1]) {
                (Some(m), _) => frontier.into_iter().map(|(k, row)| (k, row * m)).collect(),
                (None, Some(w)) => frontier
                    .into_iter()
                    .flat_map(|(k, row)| {
                        let one = &row * &site.m1;
                        [(k, row * &site.m0), (k + w, one)]
                    })
                    .collect(),
                (None, None) => unreachable!(),
            };
        }
        for (k, row) in frontier {
            out[k] = row[0];
        }
        Ok(out)
    }

    /// All `2^n` probabilities, bit 1 most significant.
    pub fn full_distribution(&self) -> Result<Vec<f64>> {
        let bits: Vec<usize> = (1..=self.n_bits()).collect();
        self.joint_distribution(&bits)
    }

    /// Inserts a new bit pinned to `value` after bit `position` (0 prepends).
    /// The new site is the identity on the existing bond, so every marginal
    /// over the old bits is unchanged.
    pub fn insert_bit(&mut self, position: usize, value: bool) -> Result<()> {
        let n = self.n_bits();
        if position > n {
            return Err(Error::PositionOutOfRange { position, n });
        }
        let dim = if position == 0 { 1 } else { self.sites[position - 1].right_dim() };
        self.sites.insert(position, SiteMatrices::pinned(value, dim));
        self.touch(position + 1);
        self.profile.on_insert(position);
        self.sync_dims();
        Ok(())
    }

    /// Traces out bit `index`, folding `M^0 + M^1` into the right neighbour
    /// (the left one for the last bit). Leaves heights stale; follow with
    /// [`recompress_sweeps`](Self::recompress_sweeps).
    pub fn remove_bit(&mut self, index: usize) -> Result<()> {
        let n = self.n_bits();
        if n == 1 {
            return Err(Error::RemoveLastBit);
        }
        self.check_index(index)?;
        let removed = self.sites.remove(index - 1).summed();
        let absorbed_left = index == n;
        if absorbed_left {
            let (m0, m1) = self.sites.pop().expect("n >= 2").into_parts();
            self.sites.push(SiteMatrices::from_parts_unchecked(m0 * &removed, m1 * &removed));
        } else {
            let target = &mut self.sites[index - 1];
            let (m0, m1) = std::mem::replace(target, SiteMatrices::scalar(0.0, 0.0)).into_parts();
            *target = SiteMatrices::from_parts_unchecked(&removed * m0, &removed * m1);
        }
        self.touch(if absorbed_left { n - 1 } else { index });
        self.profile.on_remove(index, absorbed_left);
        self.sync_dims();
        Ok(())
    }
}
