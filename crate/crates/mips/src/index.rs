//! Query-independent index over the item matrix: per-column 1-norms, sorted
//! row permutations, and per-column alias tables. Built once in
//! O(d n log n) time, immutable and shareable afterwards.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;
use std::sync::Arc;

use rayon::prelude::*;

use crate::alias::AliasTable;
use crate::error::{Error, Result};
use crate::io::{read_exact, read_f64, read_u32, read_u64};
use crate::matrix::DataMatrix;

pub const INDEX_MAGIC: [u8; 4] = *b"WIDX";
pub const INDEX_VERSION: u32 = 1;

/// Immutable per-column index: everything the samplers need that does not
/// depend on the query.
#[derive(Debug, Clone)]
pub struct MipsIndex {
    data: Arc<DataMatrix>,
    /// c_j: 1-norm of column j's absolute values.
    col_norms: Vec<f64>,
    /// Rows of each column sorted by |x_ij| descending, ties by smaller row.
    abs_order: Vec<Vec<u32>>,
    /// Rows of each column sorted by signed x_ij descending, ties by smaller row.
    signed_order: Vec<Vec<u32>>,
    /// Row sampler per column, proportional to |x_ij|. `None` for all-zero
    /// columns, which carry no sampling mass.
    col_alias: Vec<Option<AliasTable>>,
    /// Contiguous copy of each column, indexed by row: column walks and
    /// per-draw sign lookups stay inside one column-sized block instead of
    /// striding the whole matrix.
    col_values: Vec<Vec<f32>>,
    /// Signed entries laid out in `abs_order` sequence, so the greedy walk
    /// streams them.
    walk_values: Vec<Vec<f32>>,
    /// K: largest absolute entry in the matrix.
    max_entry: f64,
}

struct ColumnIndex {
    norm: f64,
    abs_order: Vec<u32>,
    signed_order: Vec<u32>,
    alias: Option<AliasTable>,
    values: Vec<f32>,
    walk: Vec<f32>,
}

fn index_column(data: &DataMatrix, j: usize) -> ColumnIndex {
    let n = data.n();
    let values: Vec<f32> = data.column(j).collect();
    let abs: Vec<f64> = values.iter().map(|&v| (v as f64).abs()).collect();
    let norm: f64 = abs.iter().sum();

    let mut abs_order: Vec<u32> = (0..n as u32).collect();
    abs_order.sort_unstable_by(|&a, &b| {
        abs[b as usize]
            .total_cmp(&abs[a as usize])
            .then(a.cmp(&b))
    });
    let mut signed_order: Vec<u32> = (0..n as u32).collect();
    signed_order.sort_unstable_by(|&a, &b| {
        values[b as usize]
            .total_cmp(&values[a as usize])
            .then(a.cmp(&b))
    });

    let alias = if norm > 0.0 { AliasTable::new(&abs) } else { None };
    let walk = abs_order.iter().map(|&r| values[r as usize]).collect();
    ColumnIndex {
        norm,
        abs_order,
        signed_order,
        alias,
        values,
        walk,
    }
}

/// Builds the index. Columns are independent, so they are indexed in
/// parallel; the result is identical to a sequential build.
pub fn build_index(data: Arc<DataMatrix>) -> MipsIndex {
    let d = data.d();
    let columns: Vec<ColumnIndex> = (0..d)
        .into_par_iter()
        .map(|j| index_column(&data, j))
        .collect();

    let max_entry = data
        .values()
        .iter()
        .map(|&v| (v as f64).abs())
        .fold(0.0, f64::max);

    let mut col_norms = Vec::with_capacity(d);
    let mut abs_order = Vec::with_capacity(d);
    let mut signed_order = Vec::with_capacity(d);
    let mut col_alias = Vec::with_capacity(d);
    let mut col_values = Vec::with_capacity(d);
    let mut walk_values = Vec::with_capacity(d);
    for c in columns {
        col_norms.push(c.norm);
        abs_order.push(c.abs_order);
        signed_order.push(c.signed_order);
        col_alias.push(c.alias);
        col_values.push(c.values);
        walk_values.push(c.walk);
    }

    MipsIndex {
        data,
        col_norms,
        abs_order,
        signed_order,
        col_alias,
        col_values,
        walk_values,
        max_entry,
    }
}

impl MipsIndex {
    pub fn data(&self) -> &DataMatrix {
        &self.data
    }

    pub fn data_arc(&self) -> Arc<DataMatrix> {
        Arc::clone(&self.data)
    }

    pub fn n(&self) -> usize {
        self.data.n()
    }

    pub fn d(&self) -> usize {
        self.data.d()
    }

    #[inline]
    pub fn col_norm(&self, j: usize) -> f64 {
        self.col_norms[j]
    }

    pub fn col_norms(&self) -> &[f64] {
        &self.col_norms
    }

    pub fn abs_order(&self, j: usize) -> &[u32] {
        &self.abs_order[j]
    }

    pub fn signed_order(&self, j: usize) -> &[u32] {
        &self.signed_order[j]
    }

    pub fn col_alias(&self, j: usize) -> Option<&AliasTable> {
        self.col_alias[j].as_ref()
    }

    /// A column is sampleable iff it has nonzero mass.
    pub fn is_sampleable(&self, j: usize) -> bool {
        self.col_alias[j].is_some()
    }

    /// Column j as a contiguous row-indexed slice.
    #[inline]
    pub fn col_values(&self, j: usize) -> &[f32] {
        &self.col_values[j]
    }

    /// Column j's signed entries in `abs_order` sequence.
    #[inline]
    pub fn walk_values(&self, j: usize) -> &[f32] {
        &self.walk_values[j]
    }

    /// K: largest |x_ij| over the whole matrix.
    pub fn max_entry(&self) -> f64 {
        self.max_entry
    }

    /// Serializes the index: magic, version, n, d, column norms, both
    /// permutation families, alias tables (cell count then prob/alias pairs
    /// per column), and a trailing CRC32 over everything before it.
    pub fn save<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = CrcWriter::new(writer);
        w.write_all(&INDEX_MAGIC)?;
        w.write_all(&INDEX_VERSION.to_le_bytes())?;
        w.write_all(&(self.n() as u64).to_le_bytes())?;
        w.write_all(&(self.d() as u64).to_le_bytes())?;
        for &c in &self.col_norms {
            w.write_all(&c.to_le_bytes())?;
        }
        for order in self.abs_order.iter().chain(self.signed_order.iter()) {
            for &row in order {
                w.write_all(&row.to_le_bytes())?;
            }
        }
        for alias in &self.col_alias {
            match alias {
                None => w.write_all(&0u64.to_le_bytes())?,
                Some(t) => {
                    w.write_all(&(t.len() as u64).to_le_bytes())?;
                    for (prob, target) in t.cells() {
                        w.write_all(&prob.to_le_bytes())?;
                        w.write_all(&target.to_le_bytes())?;
                    }
                }
            }
        }
        let crc = w.finish();
        let mut inner = w.into_inner();
        inner.write_all(&crc.to_le_bytes())?;
        inner.flush()?;
        Ok(())
    }

    /// Loads a previously saved index and attaches it to its source matrix.
    /// Version mismatches, truncation, and checksum failures are reported
    /// distinctly. K is recomputed from the matrix (it is not stored).
    pub fn load<R: Read>(reader: R, data: Arc<DataMatrix>) -> Result<Self> {
        let mut r = CrcReader::new(reader);
        let mut magic = [0u8; 4];
        read_exact(&mut r, &mut magic, "index magic")?;
        if magic != INDEX_MAGIC {
            return Err(Error::BadMagic { expected: "WIDX" });
        }
        let version = read_u32(&mut r, "index version")?;
        if version != INDEX_VERSION {
            return Err(Error::BadVersion {
                kind: "index",
                found: version,
                expected: INDEX_VERSION,
            });
        }
        let n = read_u64(&mut r, "index row count")? as usize;
        let d = read_u64(&mut r, "index column count")? as usize;
        if n != data.n() || d != data.d() {
            return Err(Error::ShapeMismatch {
                expected_n: n,
                expected_d: d,
                actual_n: data.n(),
                actual_d: data.d(),
            });
        }

        let mut col_norms = Vec::with_capacity(d);
        for _ in 0..d {
            col_norms.push(read_f64(&mut r, "column norms")?);
        }
        let read_orders = |r: &mut CrcReader<R>| -> Result<Vec<Vec<u32>>> {
            let mut orders = Vec::with_capacity(d);
            for _ in 0..d {
                let mut order = Vec::with_capacity(n);
                for _ in 0..n {
                    order.push(read_u32(r, "row permutations")?);
                }
                orders.push(order);
            }
            Ok(orders)
        };
        let abs_order = read_orders(&mut r)?;
        let signed_order = read_orders(&mut r)?;

        let mut col_alias = Vec::with_capacity(d);
        for j in 0..d {
            let cells = read_u64(&mut r, "alias cell count")? as usize;
            if cells == 0 {
                col_alias.push(None);
                continue;
            }
            if cells != n {
                return Err(Error::InvalidParameter(format!(
                    "alias table for column {j} has {cells} cells, expected {n}"
                )));
            }
            let mut prob = Vec::with_capacity(cells);
            let mut alias = Vec::with_capacity(cells);
            for _ in 0..cells {
                prob.push(read_f64(&mut r, "alias cells")?);
                alias.push(read_u32(&mut r, "alias cells")?);
            }
            col_alias.push(Some(AliasTable::from_cells(prob, alias)));
        }

        let computed = r.crc();
        let stored = read_u32(&mut r, "index checksum")?;
        if stored != computed {
            return Err(Error::ChecksumMismatch { stored, computed });
        }

        let max_entry = data
            .values()
            .iter()
            .map(|&v| (v as f64).abs())
            .fold(0.0, f64::max);

        // Derived layouts are not stored; rebuild them from the matrix and
        // the loaded permutations.
        let col_values: Vec<Vec<f32>> = (0..d).map(|j| data.column(j).collect()).collect();
        let walk_values: Vec<Vec<f32>> = (0..d)
            .map(|j| {
                abs_order[j]
                    .iter()
                    .map(|&r| col_values[j][r as usize])
                    .collect()
            })
            .collect();

        Ok(Self {
            data,
            col_norms,
            abs_order,
            signed_order,
            col_alias,
            col_values,
            walk_values,
            max_entry,
        })
    }

    pub fn save_to_path(&self, path: &Path) -> Result<()> {
        self.save(BufWriter::new(File::create(path)?))
    }

    pub fn load_from_path(path: &Path, data: Arc<DataMatrix>) -> Result<Self> {
        Self::load(BufReader::new(File::open(path)?), data)
    }
}

struct CrcWriter<W: Write> {
    inner: W,
    hasher: crc32fast::Hasher,
}

impl<W: Write> CrcWriter<W> {
    fn new(inner: W) -> Self {
        Self {
            inner,
            hasher: crc32fast::Hasher::new(),
        }
    }

    fn finish(&self) -> u32 {
        self.hasher.clone().finalize()
    }

    fn into_inner(self) -> W {
        self.inner
    }
}

impl<W: Write> Write for CrcWriter<W> {
    fn write(&mut self, buf: &[u8]) -> std::io::Result<usize> {
        let written = self.inner.write(buf)?;
        self.hasher.update(&buf[..written]);
        Ok(written)
    }

    fn flush(&mut self) -> std::io::Result<()> {
        self.inner.flush()
    }
}

struct CrcReader<R: Read> {
    inner: R,
    hasher: crc32fast::Hasher,
}

impl<R: Read> CrcReader<R> {
    fn new(inner: R) -> Self {
        Self {
            inner,
            hasher: crc32fast::Hasher::new(),
        }
    }

    fn crc(&self) -> u32 {
        self.hasher.clone().finalize()
    }
}

impl<R: Read> Read for CrcReader<R> {
    fn read(&mut self, buf: &mut [u8]) -> std::io::Result<usize> {
        let read = self.inner.read(buf)?;
        self.hasher.update(&buf[..read]);
        Ok(read)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn matrix(rows: &[&[f32]]) -> Arc<DataMatrix> {
        Arc::new(DataMatrix::from_rows(rows.iter().map(|r| r.to_vec()).collect()).unwrap())
    }

    fn saved_bytes(index: &MipsIndex) -> Vec<u8> {
        let mut buf = Vec::new();
        index.save(&mut buf).unwrap();
        buf
    }

    #[test]
    fn norms_and_orders_on_small_matrix() {
        let index = build_index(matrix(&[&[1.0, 2.0], &[3.0, 4.0]]));
        assert_eq!(index.col_norms(), &[4.0, 6.0]);
        assert_eq!(index.abs_order(0), &[1, 0]);
        assert_eq!(index.abs_order(1), &[1, 0]);
        assert_eq!(index.max_entry(), 4.0);
    }

    #[test]
    fn signed_and_abs_orders_diverge_on_negative_entries() {
        let index = build_index(matrix(&[&[1.0, -2.0], &[3.0, 4.0]]));
        // Absolute values are unchanged by the sign flip.
        assert_eq!(index.col_norms(), &[4.0, 6.0]);
        assert_eq!(index.abs_order(1), &[1, 0]);
        assert_eq!(index.signed_order(1), &[1, 0]);
        // Column 0 of [[1], [3]] sorts the same both ways.
        assert_eq!(index.signed_order(0), &[1, 0]);
        // A column with a dominant negative entry splits the two orders.
        let index = build_index(matrix(&[&[-5.0], &[2.0]]));
        assert_eq!(index.abs_order(0), &[0, 1]);
        assert_eq!(index.signed_order(0), &[1, 0]);
    }

    #[test]
    fn zero_columns_are_unsampleable() {
        let index = build_index(matrix(&[&[0.0, 0.0], &[0.0, 0.0]]));
        assert_eq!(index.col_norms(), &[0.0, 0.0]);
        assert!(!index.is_sampleable(0));
        assert!(!index.is_sampleable(1));
    }

    #[test]
    fn alias_matches_column_distribution() {
        let index = build_index(matrix(&[&[1.0, 2.0], &[3.0, 4.0]]));
        let implied = index.col_alias(0).unwrap().implied_distribution();
        assert!((implied[0] - 0.25).abs() < 1e-15);
        assert!((implied[1] - 0.75).abs() < 1e-15);
    }

    #[test]
    fn sort_ties_break_on_smaller_row() {
        let index = build_index(matrix(&[&[2.0], &[2.0], &[1.0]]));
        assert_eq!(index.abs_order(0), &[0, 1, 2]);
        assert_eq!(index.signed_order(0), &[0, 1, 2]);
    }

    #[test]
    fn save_load_round_trip() {
        let data = matrix(&[&[1.0, 2.0], &[3.0, 4.0]]);
        let index = build_index(Arc::clone(&data));
        let bytes = saved_bytes(&index);
        let loaded = MipsIndex::load(bytes.as_slice(), data).unwrap();
        assert_eq!(saved_bytes(&loaded), bytes);
        assert_eq!(loaded.max_entry(), index.max_entry());
    }

    #[test]
    fn load_error_paths_are_distinct() {
        let data = matrix(&[&[1.0, 2.0], &[3.0, 4.0]]);
        let index = build_index(Arc::clone(&data));
        let bytes = saved_bytes(&index);

        let truncated = &bytes[..bytes.len() - 6];
        assert!(matches!(
            MipsIndex::load(truncated, Arc::clone(&data)),
            Err(Error::Truncated { .. })
        ));

        let mut wrong_version = bytes.clone();
        wrong_version[4] = 42;
        assert!(matches!(
            MipsIndex::load(wrong_version.as_slice(), Arc::clone(&data)),
            Err(Error::BadVersion { found: 42, .. })
        ));

        let mut corrupted = bytes.clone();
        let mid = bytes.len() / 2;
        corrupted[mid] ^= 0xff;
        assert!(matches!(
            MipsIndex::load(corrupted.as_slice(), Arc::clone(&data)),
            Err(Error::ChecksumMismatch { .. })
        ));

        let mut bad_magic = bytes.clone();
        bad_magic[0] = b'Z';
        assert!(matches!(
            MipsIndex::load(bad_magic.as_slice(), Arc::clone(&data)),
            Err(Error::BadMagic { .. })
        ));

        let other = matrix(&[&[1.0], &[2.0]]);
        assert!(matches!(
            MipsIndex::load(bytes.as_slice(), other),
            Err(Error::ShapeMismatch { .. })
        ));
    }

    #[test]
    fn zero_column_round_trips_as_unsampleable() {
        let data = matrix(&[&[1.0, 0.0], &[2.0, 0.0]]);
        let index = build_index(Arc::clone(&data));
        assert!(!index.is_sampleable(1));
        let bytes = saved_bytes(&index);
        let loaded = MipsIndex::load(bytes.as_slice(), data).unwrap();
        assert!(!loaded.is_sampleable(1));
        assert!(loaded.is_sampleable(0));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        // Column norms match a direct sum; permutations are bijections that
        // sort their keys; rebuilds are byte-identical.
        #[test]
        fn index_invariants(
            n in 1usize..24,
            d in 1usize..6,
            seed in any::<u64>(),
        ) {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let values: Vec<f32> = (0..n * d)
                .map(|_| {
                    if rng.random_bool(0.1) {
                        0.0
                    } else {
                        rng.random_range(-5.0f32..5.0)
                    }
                })
                .collect();
            let data = Arc::new(DataMatrix::from_vec(n, d, values).unwrap());
            let index = build_index(Arc::clone(&data));

            for j in 0..d {
                let direct: f64 = data.column(j).map(|v| (v as f64).abs()).sum();
                let c = index.col_norm(j);
                prop_assert!((c - direct).abs() <= 1e-9 * direct.max(1.0));
                prop_assert_eq!(index.is_sampleable(j), c > 0.0);

                // Bijectivity.
                let mut seen = vec![false; n];
                for &row in index.abs_order(j) {
                    prop_assert!(!seen[row as usize]);
                    seen[row as usize] = true;
                }
                prop_assert!(seen.iter().all(|&s| s));

                // Sortedness.
                let abs_keys: Vec<f64> = index
                    .abs_order(j)
                    .iter()
                    .map(|&r| (data.get(r as usize, j) as f64).abs())
                    .collect();
                prop_assert!(abs_keys.windows(2).all(|w| w[0] >= w[1]));
                let signed_keys: Vec<f64> = index
                    .signed_order(j)
                    .iter()
                    .map(|&r| data.get(r as usize, j) as f64)
                    .collect();
                prop_assert!(signed_keys.windows(2).all(|w| w[0] >= w[1]));

                // Alias table distribution is exact.
                if let Some(t) = index.col_alias(j) {
                    let implied = t.implied_distribution();
                    for i in 0..n {
                        let expected = (data.get(i, j) as f64).abs() / c;
                        prop_assert!((implied[i] - expected).abs() < 1e-12);
                    }
                }
            }

            let rebuilt = build_index(data);
            prop_assert_eq!(saved_bytes(&index), saved_bytes(&rebuilt));
        }
    }
}
