//! PIP data model: raw instances, validation, row normalization and the
//! width/sparsity statistics that drive regime selection.

use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use std::fmt;
use std::path::Path;

/// Absolute tolerance for normalization identities (row scaling, width).
pub const NORM_TOL: f64 = 1e-12;
/// Absolute slack for all comparisons against capacities.
pub const CAP_TOL: f64 = 1e-9;

/// A packing integer program `max { c·x : Ax <= b, x in {0,1}^n }` with
/// nonnegative data.
///
/// The matrix is stored row-major as per-row lists of `(column, value)`
/// pairs sorted by column index; exact zeros are dropped on construction.
/// Construction enforces shape (dimensions, index ranges, duplicate
/// coordinates); value-level problems are reported by [`validate`].
///
/// [`validate`]: PipInstance::validate
#[derive(Debug, Clone, PartialEq)]
pub struct PipInstance {
    n: usize,
    m: usize,
    c: Vec<f64>,
    b: Vec<f64>,
    rows: Vec<Vec<(usize, f64)>>,
}

/// A [`PipInstance`] after row scaling: every constraint reads `A_i x <= W`,
/// entries lie in `[0,1]` and the largest entry equals 1.
#[derive(Debug, Clone)]
pub struct NormalizedInstance {
    base: PipInstance,
    width: f64,
    delta0: usize,
    delta1: f64,
    row_scale: Vec<f64>,
}

/// Structural shape errors raised at construction or file load.
#[derive(Debug, thiserror::Error, PartialEq)]
pub enum InstanceError {
    #[error("instance must have n >= 1 and m >= 1 (got n={n}, m={m})")]
    EmptyDims { n: usize, m: usize },
    #[error("{what} has length {got}, expected {expected}")]
    LengthMismatch {
        what: &'static str,
        got: usize,
        expected: usize,
    },
    #[error("matrix entry ({i},{j}) out of range for {m}x{n} instance")]
    IndexOutOfRange {
        i: usize,
        j: usize,
        m: usize,
        n: usize,
    },
    #[error("duplicate sparse entry at ({i},{j})")]
    DuplicateEntry { i: usize, j: usize },
    #[error("instance failed validation: {0:?}")]
    Invalid(Vec<Violation>),
    #[error("matrix has no positive entry")]
    AllZeroMatrix,
    #[error(
        "instance width {width} is below 1; drop items j with A_ij > b_i \
         (they can never be packed) and retry"
    )]
    WidthBelowOne { width: f64 },
    #[error("i/o error: {0}")]
    Io(String),
    #[error("parse error: {0}")]
    Parse(String),
}

/// A violated structural invariant, reported with its coordinates.
///
/// `AllZeroColumn` is a warning: such variables consume nothing and are set
/// to 1 in any solution, but real data may contain them.
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    NegativeEntry(usize, usize),
    NonFiniteEntry(usize, usize),
    NegativeCost(usize),
    NonFiniteCost(usize),
    NonpositiveCapacity(usize),
    NonFiniteCapacity(usize),
    AllZeroColumn(usize),
}

impl Violation {
    /// Warnings do not block normalization or solving.
    pub fn is_warning(&self) -> bool {
        matches!(self, Violation::AllZeroColumn(_))
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NegativeEntry(i, j) => write!(f, "negative matrix entry at ({i},{j})"),
            Violation::NonFiniteEntry(i, j) => write!(f, "non-finite matrix entry at ({i},{j})"),
            Violation::NegativeCost(j) => write!(f, "negative objective coefficient c[{j}]"),
            Violation::NonFiniteCost(j) => write!(f, "non-finite objective coefficient c[{j}]"),
            Violation::NonpositiveCapacity(i) => write!(f, "capacity b[{i}] must be > 0"),
            Violation::NonFiniteCapacity(i) => write!(f, "non-finite capacity b[{i}]"),
            Violation::AllZeroColumn(j) => write!(f, "column {j} is all zero (warning)"),
        }
    }
}

impl PipInstance {
    /// Build from dense rows. Zero entries are dropped from storage.
    pub fn from_dense(
        c: Vec<f64>,
        a: Vec<Vec<f64>>,
        b: Vec<f64>,
    ) -> Result<PipInstance, InstanceError> {
        let m = a.len();
        let n = c.len();
        if n == 0 || m == 0 {
            return Err(InstanceError::EmptyDims { n, m });
        }
        if b.len() != m {
            return Err(InstanceError::LengthMismatch {
                what: "b",
                got: b.len(),
                expected: m,
            });
        }
        let mut rows = Vec::with_capacity(m);
        for (i, dense_row) in a.iter().enumerate() {
            if dense_row.len() != n {
                return Err(InstanceError::LengthMismatch {
                    what: "matrix row",
                    got: dense_row.len(),
                    expected: n,
                });
            }
            let row: Vec<(usize, f64)> = dense_row
                .iter()
                .enumerate()
                .filter(|(_, &v)| v != 0.0)
                .map(|(j, &v)| (j, v))
                .collect();
            let _ = i;
            rows.push(row);
        }
        Ok(PipInstance { n, m, c, b, rows })
    }

    /// Build from coordinate triples `(row, col, value)`. Duplicate
    /// coordinates are an error; zero values are dropped.
    pub fn from_coords(
        n: usize,
        m: usize,
        c: Vec<f64>,
        b: Vec<f64>,
        triples: impl IntoIterator<Item = (usize, usize, f64)>,
    ) -> Result<PipInstance, InstanceError> {
        if n == 0 || m == 0 {
            return Err(InstanceError::EmptyDims { n, m });
        }
        if c.len() != n {
            return Err(InstanceError::LengthMismatch {
                what: "c",
                got: c.len(),
                expected: n,
            });
        }
        if b.len() != m {
            return Err(InstanceError::LengthMismatch {
                what: "b",
                got: b.len(),
                expected: m,
            });
        }
        let mut seen = BTreeSet::new();
        let mut rows = vec![Vec::new(); m];
        for (i, j, v) in triples {
            if i >= m || j >= n {
                return Err(InstanceError::IndexOutOfRange { i, j, m, n });
            }
            if !seen.insert((i, j)) {
                return Err(InstanceError::DuplicateEntry { i, j });
            }
            if v != 0.0 {
                rows[i].push((j, v));
            }
        }
        for row in &mut rows {
            row.sort_unstable_by_key(|&(j, _)| j);
        }
        Ok(PipInstance { n, m, c, b, rows })
    }

    pub fn num_vars(&self) -> usize {
        self.n
    }

    pub fn num_constraints(&self) -> usize {
        self.m
    }

    pub fn costs(&self) -> &[f64] {
        &self.c
    }

    pub fn capacities(&self) -> &[f64] {
        &self.b
    }

    /// Stored entries of row `i`, sorted by column index.
    pub fn row(&self, i: usize) -> &[(usize, f64)] {
        &self.rows[i]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[(usize, f64)]> {
        self.rows.iter().map(|r| r.as_slice())
    }

    /// Entry lookup; absent coordinates read as zero.
    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.rows[i]
            .binary_search_by_key(&j, |&(col, _)| col)
            .map(|pos| self.rows[i][pos].1)
            .unwrap_or(0.0)
    }

    /// Column indices whose stored entries are all zero (i.e. absent).
    pub fn zero_columns(&self) -> Vec<usize> {
        let mut nonzero = vec![false; self.n];
        for row in &self.rows {
            for &(j, v) in row {
                if v != 0.0 {
                    nonzero[j] = true;
                }
            }
        }
        (0..self.n).filter(|&j| !nonzero[j]).collect()
    }

    /// Report every violated structural invariant. Never mutates; an empty
    /// result (or warnings only) means the instance is usable.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        for (j, &cj) in self.c.iter().enumerate() {
            if !cj.is_finite() {
                out.push(Violation::NonFiniteCost(j));
            } else if cj < 0.0 {
                out.push(Violation::NegativeCost(j));
            }
        }
        for (i, &bi) in self.b.iter().enumerate() {
            if !bi.is_finite() {
                out.push(Violation::NonFiniteCapacity(i));
            } else if bi <= 0.0 {
                out.push(Violation::NonpositiveCapacity(i));
            }
        }
        for (i, row) in self.rows.iter().enumerate() {
            for &(j, v) in row {
                if !v.is_finite() {
                    out.push(Violation::NonFiniteEntry(i, j));
                } else if v < 0.0 {
                    out.push(Violation::NegativeEntry(i, j));
                }
            }
        }
        for j in self.zero_columns() {
            out.push(Violation::AllZeroColumn(j));
        }
        out
    }

    /// True when [`validate`](Self::validate) reports nothing but warnings.
    pub fn is_valid(&self) -> bool {
        self.validate().iter().all(Violation::is_warning)
    }

    /// Width `W = min { b_i / A_ij : A_ij > 0 }`.
    pub fn width(&self) -> Result<f64, InstanceError> {
        let mut w = f64::INFINITY;
        for (i, row) in self.rows.iter().enumerate() {
            for &(_, v) in row {
                if v > 0.0 {
                    w = w.min(self.b[i] / v);
                }
            }
        }
        if w.is_infinite() {
            Err(InstanceError::AllZeroMatrix)
        } else {
            Ok(w)
        }
    }

    /// Row-scale so that every constraint reads `A_i x <= W` with entries in
    /// `[0,1]`. The width is computed on the raw data and is unchanged by
    /// the scaling. Rejects instances with `W < 1`: items with `A_ij > b_i`
    /// can never be packed and should be dropped by the caller first.
    pub fn normalize(self) -> Result<NormalizedInstance, InstanceError> {
        let violations: Vec<Violation> = self
            .validate()
            .into_iter()
            .filter(|v| !v.is_warning())
            .collect();
        if !violations.is_empty() {
            return Err(InstanceError::Invalid(violations));
        }
        let width = self.width()?;
        if width < 1.0 - NORM_TOL {
            return Err(InstanceError::WidthBelowOne { width });
        }
        let row_scale: Vec<f64> = self.b.iter().map(|&bi| width / bi).collect();
        let mut rows = self.rows;
        for (row, &scale) in rows.iter_mut().zip(&row_scale) {
            for (_, v) in row.iter_mut() {
                let scaled = *v * scale;
                // Snap 1 +/- ulp artifacts of the division/multiplication
                // round trip back onto the exact normalization boundary.
                *v = if (scaled - 1.0).abs() <= NORM_TOL {
                    1.0
                } else {
                    scaled
                };
            }
        }
        let base = PipInstance {
            n: self.n,
            m: self.m,
            c: self.c,
            b: vec![width; self.m],
            rows,
        };
        let (delta0, delta1) = base.column_sparsity();
        Ok(NormalizedInstance {
            base,
            width,
            delta0,
            delta1,
            row_scale,
        })
    }

    /// `(Delta_0, Delta_1)`: max per-column nonzero count and max column sum.
    fn column_sparsity(&self) -> (usize, f64) {
        let mut counts = vec![0usize; self.n];
        let mut sums = vec![0.0f64; self.n];
        for row in &self.rows {
            for &(j, v) in row {
                counts[j] += 1;
                sums[j] += v;
            }
        }
        let delta0 = counts.iter().copied().max().unwrap_or(0);
        let delta1 = sums.iter().copied().fold(0.0, f64::max);
        (delta0, delta1)
    }

    /// Check `Ax <= b` componentwise with [`CAP_TOL`] slack.
    pub fn is_feasible(&self, x: &[bool]) -> bool {
        assert_eq!(x.len(), self.n);
        self.rows.iter().zip(&self.b).all(|(row, &bi)| {
            let load: f64 = row.iter().filter(|&&(j, _)| x[j]).map(|&(_, v)| v).sum();
            load <= bi + CAP_TOL
        })
    }

    /// Objective value of a boolean vector.
    pub fn value_of(&self, x: &[bool]) -> f64 {
        assert_eq!(x.len(), self.n);
        self.c
            .iter()
            .zip(x)
            .filter(|&(_, &on)| on)
            .map(|(&cj, _)| cj)
            .sum()
    }

    pub fn load(&self, x: &[bool]) -> Vec<f64> {
        self.rows
            .iter()
            .map(|row| row.iter().filter(|&&(j, _)| x[j]).map(|&(_, v)| v).sum())
            .collect()
    }

    /// Parse the JSON instance format.
    pub fn from_json(text: &str) -> Result<PipInstance, InstanceError> {
        let file: InstanceFile =
            serde_json::from_str(text).map_err(|e| InstanceError::Parse(e.to_string()))?;
        file.into_instance()
    }

    pub fn from_json_file(path: &Path) -> Result<PipInstance, InstanceError> {
        let text = std::fs::read_to_string(path).map_err(|e| InstanceError::Io(e.to_string()))?;
        Self::from_json(&text)
    }

    /// Serialize to the JSON instance format. Dense output for small
    /// instances, coordinate triples otherwise.
    pub fn to_json(&self, meta: Option<serde_json::Value>) -> String {
        let nnz: usize = self.rows.iter().map(Vec::len).sum();
        let a = if nnz * 3 >= self.n * self.m {
            let mut dense = vec![vec![0.0; self.n]; self.m];
            for (i, row) in self.rows.iter().enumerate() {
                for &(j, v) in row {
                    dense[i][j] = v;
                }
            }
            MatrixData::Dense(dense)
        } else {
            let mut triples = Vec::with_capacity(nnz);
            for (i, row) in self.rows.iter().enumerate() {
                for &(j, v) in row {
                    triples.push((i, j, v));
                }
            }
            MatrixData::Sparse(triples)
        };
        let file = InstanceFile {
            n: self.n,
            m: self.m,
            c: self.c.clone(),
            b: self.b.clone(),
            a,
            meta,
        };
        serde_json::to_string_pretty(&file).expect("instance serialization cannot fail")
    }
}

impl NormalizedInstance {
    pub fn base(&self) -> &PipInstance {
        &self.base
    }

    pub fn width(&self) -> f64 {
        self.width
    }

    pub fn delta0(&self) -> usize {
        self.delta0
    }

    pub fn delta1(&self) -> f64 {
        self.delta1
    }

    /// Multiplier `W / b_i` that was applied to each row.
    pub fn row_scale(&self) -> &[f64] {
        &self.row_scale
    }

    pub fn num_vars(&self) -> usize {
        self.base.n
    }

    pub fn num_constraints(&self) -> usize {
        self.base.m
    }
}

#[derive(Serialize, Deserialize)]
struct InstanceFile {
    n: usize,
    m: usize,
    c: Vec<f64>,
    b: Vec<f64>,
    #[serde(rename = "A")]
    a: MatrixData,
    #[serde(skip_serializing_if = "Option::is_none")]
    meta: Option<serde_json::Value>,
}

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum MatrixData {
    Dense(Vec<Vec<f64>>),
    Sparse(Vec<(usize, usize, f64)>),
}

impl InstanceFile {
    fn into_instance(self) -> Result<PipInstance, InstanceError> {
        if self.c.len() != self.n {
            return Err(InstanceError::LengthMismatch {
                what: "c",
                got: self.c.len(),
                expected: self.n,
            });
        }
        match self.a {
            MatrixData::Dense(rows) => {
                if rows.len() != self.m {
                    return Err(InstanceError::LengthMismatch {
                        what: "A",
                        got: rows.len(),
                        expected: self.m,
                    });
                }
                PipInstance::from_dense(self.c, rows, self.b)
            }
            MatrixData::Sparse(triples) => {
                PipInstance::from_coords(self.n, self.m, self.c, self.b, triples)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn validate_flags_negative_entry() {
        let inst =
            PipInstance::from_dense(vec![1.0, 1.0], vec![vec![1.0, -0.5]], vec![1.0]).unwrap();
        assert_eq!(inst.validate(), vec![Violation::NegativeEntry(0, 1)]);
        assert!(!inst.is_valid());
    }

    #[test]
    fn validate_accepts_valid_instance() {
        let inst = PipInstance::from_dense(
            vec![1.0, 2.0],
            vec![vec![1.0, 0.5], vec![0.25, 1.0]],
            vec![1.0, 2.0],
        )
        .unwrap();
        assert!(inst.validate().is_empty());
    }

    #[test]
    fn validate_flags_nonpositive_capacity() {
        let inst = PipInstance::from_dense(
            vec![1.0, 1.0],
            vec![vec![1.0, 1.0], vec![1.0, 1.0]],
            vec![0.0, 1.0],
        )
        .unwrap();
        assert_eq!(inst.validate(), vec![Violation::NonpositiveCapacity(0)]);
    }

    #[test]
    fn zero_column_is_warning_only() {
        let inst =
            PipInstance::from_dense(vec![1.0, 1.0], vec![vec![1.0, 0.0]], vec![1.0]).unwrap();
        let v = inst.validate();
        assert_eq!(v, vec![Violation::AllZeroColumn(1)]);
        assert!(inst.is_valid());
    }

    #[test]
    fn width_single_ratio() {
        let inst = PipInstance::from_dense(vec![1.0], vec![vec![0.5]], vec![1.0]).unwrap();
        assert_eq!(inst.width().unwrap(), 2.0);
    }

    #[test]
    fn width_min_of_ratios() {
        let inst =
            PipInstance::from_dense(vec![1.0, 1.0], vec![vec![1.0, 0.25]], vec![1.0]).unwrap();
        assert_eq!(inst.width().unwrap(), 1.0);
    }

    #[test]
    fn width_enumerated_ratios() {
        // ratios: 1/0.2 = 5, 1/0.1 = 10, 2/0.5 = 4
        let inst = PipInstance::from_dense(
            vec![1.0, 1.0],
            vec![vec![0.2, 0.1], vec![0.5, 0.0]],
            vec![1.0, 2.0],
        )
        .unwrap();
        assert_eq!(inst.width().unwrap(), 4.0);
    }

    #[test]
    fn width_all_zero_matrix_errors() {
        let inst = PipInstance::from_dense(vec![1.0], vec![vec![0.0]], vec![1.0]).unwrap();
        assert_eq!(inst.width().unwrap_err(), InstanceError::AllZeroMatrix);
    }

    #[test]
    fn normalize_identity_instance() {
        let inst = PipInstance::from_dense(vec![1.0], vec![vec![1.0]], vec![1.0]).unwrap();
        let norm = inst.normalize().unwrap();
        assert_eq!(norm.width(), 1.0);
        assert_eq!(norm.delta0(), 1);
        assert_eq!(norm.delta1(), 1.0);
        assert_eq!(norm.base().entry(0, 0), 1.0);
    }

    #[test]
    fn normalize_two_by_two() {
        // W = min(4/2, 4/1, 8/1, 8/4) = 2; scaled A = [[1, 0.5], [0.25, 1]].
        let inst = PipInstance::from_dense(
            vec![1.0, 1.0],
            vec![vec![2.0, 1.0], vec![1.0, 4.0]],
            vec![4.0, 8.0],
        )
        .unwrap();
        let norm = inst.normalize().unwrap();
        assert!(close(norm.width(), 2.0, NORM_TOL));
        assert!(close(norm.base().entry(0, 0), 1.0, NORM_TOL));
        assert!(close(norm.base().entry(0, 1), 0.5, NORM_TOL));
        assert!(close(norm.base().entry(1, 0), 0.25, NORM_TOL));
        assert!(close(norm.base().entry(1, 1), 1.0, NORM_TOL));
        assert!(close(norm.delta1(), 1.5, NORM_TOL));
        assert_eq!(norm.delta0(), 2);
        for &bi in norm.base().capacities() {
            assert_eq!(bi, 2.0);
        }
    }

    #[test]
    fn normalize_rejects_width_below_one() {
        let inst = PipInstance::from_dense(vec![1.0], vec![vec![2.0]], vec![1.0]).unwrap();
        match inst.normalize() {
            Err(InstanceError::WidthBelowOne { width }) => assert!(close(width, 0.5, NORM_TOL)),
            other => panic!("expected WidthBelowOne, got {other:?}"),
        }
    }

    #[test]
    fn normalize_rejects_invalid() {
        let inst = PipInstance::from_dense(vec![1.0], vec![vec![-1.0]], vec![1.0]).unwrap();
        assert!(matches!(inst.normalize(), Err(InstanceError::Invalid(_))));
    }

    #[test]
    fn normalize_preserves_width_and_is_idempotent() {
        let inst = PipInstance::from_dense(
            vec![3.0, 1.0, 2.0],
            vec![
                vec![2.0, 1.0, 0.0],
                vec![1.0, 4.0, 0.5],
                vec![0.0, 0.3, 0.9],
            ],
            vec![4.0, 8.0, 3.0],
        )
        .unwrap();
        let raw_width = inst.width().unwrap();
        let norm = inst.normalize().unwrap();
        assert!(close(norm.base().width().unwrap(), raw_width, NORM_TOL));

        let again = norm.base().clone().normalize().unwrap();
        assert!(close(again.width(), norm.width(), NORM_TOL));
        for i in 0..norm.base().num_constraints() {
            for &(j, v) in norm.base().row(i) {
                assert!(close(again.base().entry(i, j), v, NORM_TOL));
            }
        }
    }

    #[test]
    fn normalization_preserves_boolean_feasibility() {
        let inst = PipInstance::from_dense(
            vec![1.0, 2.0, 3.0, 0.5],
            vec![
                vec![2.0, 1.0, 0.7, 0.1],
                vec![1.0, 4.0, 0.0, 2.2],
                vec![0.4, 0.0, 1.9, 1.0],
            ],
            vec![4.0, 8.0, 3.0],
        )
        .unwrap();
        let norm = inst.clone().normalize().unwrap();
        let n = inst.num_vars();
        for mask in 0u32..(1 << n) {
            let x: Vec<bool> = (0..n).map(|j| mask >> j & 1 == 1).collect();
            assert_eq!(
                inst.is_feasible(&x),
                norm.base().is_feasible(&x),
                "feasibility flipped for mask {mask:#b}"
            );
        }
    }

    #[test]
    fn sparsity_stats_ordering() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(31);
        for _ in 0..30 {
            let n = rng.gen_range(1..15);
            let m = rng.gen_range(1..8);
            let inst = crate::generators::random_instance(n, m, 2.0, 0.5, rng.gen());
            let norm = inst.normalize().unwrap();
            assert!(norm.delta1() <= norm.delta0() as f64 + NORM_TOL);
            assert!(norm.delta1() >= 1.0 - NORM_TOL);
            assert!(norm.delta0() >= 1);
        }
    }

    #[test]
    fn normalize_handles_large_magnitudes() {
        // Capacities and entries spread over six orders of magnitude.
        let inst = PipInstance::from_dense(
            vec![1.0, 2.0, 3.0],
            vec![vec![2.0e6, 1.0e3, 0.0], vec![5.0, 1.0e-2, 7.5e2]],
            vec![4.0e6, 1.5e3],
        )
        .unwrap();
        let norm = inst.clone().normalize().unwrap();
        assert!((norm.base().width().unwrap() - norm.width()).abs() <= NORM_TOL * norm.width());
        let mut max_entry: f64 = 0.0;
        for i in 0..norm.base().num_constraints() {
            for &(_, v) in norm.base().row(i) {
                assert!(v > 0.0 && v <= 1.0);
                max_entry = max_entry.max(v);
            }
        }
        assert!((max_entry - 1.0).abs() <= NORM_TOL);
        for mask in 0u32..(1 << 3) {
            let x: Vec<bool> = (0..3).map(|j| mask >> j & 1 == 1).collect();
            assert_eq!(inst.is_feasible(&x), norm.base().is_feasible(&x));
        }
    }

    #[test]
    fn sparse_duplicate_rejected() {
        let err = PipInstance::from_coords(
            2,
            1,
            vec![1.0, 1.0],
            vec![1.0],
            vec![(0, 1, 0.5), (0, 1, 0.25)],
        )
        .unwrap_err();
        assert_eq!(err, InstanceError::DuplicateEntry { i: 0, j: 1 });
    }

    #[test]
    fn json_round_trip_dense_and_sparse() {
        let dense = r#"{"n":2,"m":1,"c":[1.0,2.0],"b":[2.0],"A":{"dense":[[1.0,0.5]]}}"#;
        let inst = PipInstance::from_json(dense).unwrap();
        assert_eq!(inst.entry(0, 1), 0.5);

        let sparse = r#"{"n":3,"m":2,"c":[1,1,1],"b":[1,1],
                         "A":{"sparse":[[0,0,1.0],[1,2,0.25]]},"meta":{"note":"x"}}"#;
        let inst = PipInstance::from_json(sparse).unwrap();
        assert_eq!(inst.entry(1, 2), 0.25);
        assert_eq!(inst.entry(0, 1), 0.0);

        let text = inst.to_json(None);
        let back = PipInstance::from_json(&text).unwrap();
        assert_eq!(back, inst);
    }

    #[test]
    fn json_rejects_bad_shapes() {
        let bad = r#"{"n":2,"m":1,"c":[1.0],"b":[2.0],"A":{"dense":[[1.0,0.5]]}}"#;
        assert!(PipInstance::from_json(bad).is_err());
        let bad = r#"{"n":1,"m":1,"c":[1.0],"b":[1.0],"A":{"sparse":[[0,5,1.0]]}}"#;
        assert!(PipInstance::from_json(bad).is_err());
    }
}
