//! Univariate series: CSV ingestion, train-fitted standardization,
//! fractional splits and seeded synthetic generators.

use std::fmt;
use std::io::Write;
use std::ops::Range;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::export::fmt_f64;

/// Named split presets: (name, fractions). Month counts are turned into
/// fractions of whatever file is supplied.
pub const SPLIT_PRESETS: &[(&str, [f64; 3])] = &[
    ("ett-12-4-4", [12.0 / 20.0, 4.0 / 20.0, 4.0 / 20.0]),
    ("ecl-15-3-4", [15.0 / 22.0, 3.0 / 22.0, 4.0 / 22.0]),
];

pub fn split_preset(name: &str) -> Result<[f64; 3]> {
    SPLIT_PRESETS
        .iter()
        .find(|(k, _)| *k == name)
        .map(|(_, f)| *f)
        .ok_or_else(|| {
            let known: Vec<&str> = SPLIT_PRESETS.iter().map(|(k, _)| *k).collect();
            Error::Config(format!(
                "unknown split preset {name:?}; known presets: {known:?}"
            ))
        })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Slice {
    Train,
    Validation,
    Test,
}

impl fmt::Display for Slice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Slice::Train => "train",
            Slice::Validation => "validation",
            Slice::Test => "test",
        })
    }
}

/// Column picked by header name, or by zero-based position when no header
/// matches and the selector is an integer.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ColumnSelector(pub String);

impl ColumnSelector {
    fn resolve(&self, headers: &[String]) -> Result<usize> {
        if let Some(i) = headers.iter().position(|h| *h == self.0) {
            return Ok(i);
        }
        match self.0.parse::<usize>() {
            Ok(i) if i < headers.len() => Ok(i),
            _ => Err(Error::MissingColumn {
                requested: self.0.clone(),
                available: headers.to_vec(),
            }),
        }
    }
}

impl From<&str> for ColumnSelector {
    fn from(s: &str) -> Self {
        ColumnSelector(s.to_string())
    }
}

impl From<usize> for ColumnSelector {
    fn from(i: usize) -> Self {
        ColumnSelector(i.to_string())
    }
}

/// Reads one numeric column; lines starting with `#` are skipped. `row` in
/// errors is the zero-based data row (the header is not counted).
pub fn load_csv(path: &Path, column: &ColumnSelector) -> Result<Vec<f64>> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    read_csv(file, column)
}

pub fn read_csv<R: std::io::Read>(input: R, column: &ColumnSelector) -> Result<Vec<f64>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(input);
    let headers: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
    if headers.is_empty() || headers.iter().all(String::is_empty) {
        return Err(Error::Data {
            row: 0,
            message: "file is empty (no header row)".into(),
        });
    }
    let col = column.resolve(&headers)?;

    let mut values = Vec::new();
    for (row, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let cell = rec.get(col).ok_or_else(|| Error::Data {
            row,
            message: format!("row has {} fields, column index is {col}", rec.len()),
        })?;
        let v: f64 = cell.parse().map_err(|_| Error::Data {
            row,
            message: format!("cannot parse {cell:?} as a number"),
        })?;
        if !v.is_finite() {
            return Err(Error::Data {
                row,
                message: format!("non-finite value {cell:?}"),
            });
        }
        values.push(v);
    }
    if values.is_empty() {
        return Err(Error::InsufficientData {
            what: "csv column".into(),
            available: 0,
            required: 1,
        });
    }
    Ok(values)
}

/// Single-column CSV with 17 significant digits; reloads bit-exactly.
pub fn write_csv<W: Write>(out: W, header: &str, values: &[f64]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([header])?;
    for v in values {
        w.write_record([fmt_f64(*v)])?;
    }
    w.flush().map_err(|e| Error::io("<csv>", e))?;
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Standardization {
    pub mean: f64,
    pub std: f64,
}

impl Standardization {
    /// Population mean and standard deviation (divide by N).
    pub fn fit(xs: &[f64]) -> Result<Self> {
        if xs.is_empty() {
            return Err(Error::InsufficientData {
                what: "standardization sample".into(),
                available: 0,
                required: 1,
            });
        }
        let n = xs.len() as f64;
        let mean = xs.iter().sum::<f64>() / n;
        let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n;
        let std = var.sqrt();
        if std <= 0.0 || !std.is_finite() {
            return Err(Error::Precondition(format!(
                "training slice has standard deviation {std}; cannot standardize"
            )));
        }
        Ok(Self { mean, std })
    }

    pub fn apply(&self, x: f64) -> f64 {
        (x - self.mean) / self.std
    }

    pub fn invert(&self, z: f64) -> f64 {
        z * self.std + self.mean
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitRanges {
    pub train: Range<usize>,
    pub validation: Range<usize>,
    pub test: Range<usize>,
}

impl SplitRanges {
    /// Boundaries at `floor(N·cumulative fraction)`.
    pub fn from_fractions(len: usize, fractions: [f64; 3]) -> Result<Self> {
        if fractions.iter().any(|f| *f <= 0.0 || !f.is_finite()) {
            return Err(Error::Config(format!(
                "split fractions must be positive, got {fractions:?}"
            )));
        }
        let total: f64 = fractions.iter().sum();
        if total > 1.0 + 1e-12 {
            return Err(Error::Config(format!(
                "split fractions sum to {total}, must be at most 1"
            )));
        }
        // The small guard keeps e.g. 0.6+0.2 from landing one ulp under 0.8·N.
        let cut = |c: f64| (((c * len as f64) + 1e-9).floor() as usize).min(len);
        let a = cut(fractions[0]);
        let b = cut(fractions[0] + fractions[1]);
        let c = cut(total);
        Ok(Self {
            train: 0..a,
            validation: a..b,
            test: b..c,
        })
    }

    pub fn get(&self, s: Slice) -> Range<usize> {
        match s {
            Slice::Train => self.train.clone(),
            Slice::Validation => self.validation.clone(),
            Slice::Test => self.test.clone(),
        }
    }
}

/// Where a dataset came from; echoed into manifests.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum DataSource {
    File {
        path: PathBuf,
        column: String,
    },
    Synthetic {
        spec: SynthSpec,
        length: usize,
        seed: u64,
    },
    Memory,
}

/// Standardized series with its split.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeSeriesDataset {
    name: String,
    values: Vec<f64>,
    split: SplitRanges,
    standardization: Standardization,
    source: DataSource,
}

impl TimeSeriesDataset {
    pub fn name(&self) -> &str {
        &self.name
    }

    /// Standardized values over the whole series.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn split(&self) -> &SplitRanges {
        &self.split
    }

    pub fn standardization(&self) -> Standardization {
        self.standardization
    }

    pub fn source(&self) -> &DataSource {
        &self.source
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn with_source(mut self, source: DataSource) -> Self {
        self.source = source;
        self
    }

    pub fn slice(&self, s: Slice) -> &[f64] {
        &self.values[self.split.get(s)]
    }

    /// Every slice must hold at least `min_len` points.
    pub fn require_slice_len(&self, min_len: usize) -> Result<()> {
        for s in [Slice::Train, Slice::Validation, Slice::Test] {
            let available = self.split.get(s).len();
            if available < min_len {
                return Err(Error::InsufficientData {
                    what: format!("{s} slice of {:?}", self.name),
                    available,
                    required: min_len,
                });
            }
        }
        Ok(())
    }

    pub fn manifest(&self) -> DatasetManifest {
        DatasetManifest {
            name: self.name.clone(),
            length: self.len(),
            train: self.split.train.clone(),
            validation: self.split.validation.clone(),
            test: self.split.test.clone(),
            mean: self.standardization.mean,
            std: self.standardization.std,
            std_convention: "population".into(),
            standardization_fit: "train".into(),
            source: self.source.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetManifest {
    pub name: String,
    pub length: usize,
    pub train: Range<usize>,
    pub validation: Range<usize>,
    pub test: Range<usize>,
    pub mean: f64,
    pub std: f64,
    pub std_convention: String,
    pub standardization_fit: String,
    pub source: DataSource,
}

/// Splits by fraction, fits mean/std on the training slice and applies
/// them to the whole series.
pub fn split_standardize(raw: &[f64], fractions: [f64; 3]) -> Result<TimeSeriesDataset> {
    if let Some(row) = raw.iter().position(|x| !x.is_finite()) {
        return Err(Error::Data {
            row,
            message: format!("non-finite value {}", raw[row]),
        });
    }
    let split = SplitRanges::from_fractions(raw.len(), fractions)?;
    let standardization = Standardization::fit(&raw[split.train.clone()])?;
    let values = raw.iter().map(|&x| standardization.apply(x)).collect();
    Ok(TimeSeriesDataset {
        name: "series".into(),
        values,
        split,
        standardization,
        source: DataSource::Memory,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SynthKind {
    SumOfSines,
    NoisyAr,
    Square,
}

impl FromStr for SynthKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sum-of-sines" => Ok(SynthKind::SumOfSines),
            "noisy-ar" => Ok(SynthKind::NoisyAr),
            "square" => Ok(SynthKind::Square),
            _ => Err(Error::Config(format!(
                "unknown synthetic kind {s:?}; expected sum-of-sines, noisy-ar or square"
            ))),
        }
    }
}

impl fmt::Display for SynthKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SynthKind::SumOfSines => "sum-of-sines",
            SynthKind::NoisyAr => "noisy-ar",
            SynthKind::Square => "square",
        })
    }
}

/// Generative formulas, with `ε_i ~ N(0, 1)` drawn from ChaCha8 seeded by
/// `seed`:
///
/// * sum-of-sines: `x_i = Σ_k a_k·sin(2π·f_k·i) + σ·ε_i`
/// * noisy-ar: `x_0 = σ·ε_0`, `x_i = c·x_{i−1} + σ·ε_i`
/// * square: `x_i = a` for `i mod P < P/2`, else `−a`, plus `σ·ε_i`
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum SynthSpec {
    SumOfSines {
        frequencies: Vec<f64>,
        amplitudes: Vec<f64>,
        noise_std: f64,
    },
    NoisyAr {
        coefficient: f64,
        noise_std: f64,
    },
    Square {
        period: usize,
        amplitude: f64,
        noise_std: f64,
    },
}

impl SynthSpec {
    pub fn default_for(kind: SynthKind) -> Self {
        match kind {
            SynthKind::SumOfSines => SynthSpec::SumOfSines {
                frequencies: vec![1.0 / 24.0, 1.0 / 168.0, 1.0 / 12.0, 1.0 / 7.3],
                amplitudes: vec![1.0, 0.6, 0.4, 0.2],
                noise_std: 0.1,
            },
            SynthKind::NoisyAr => SynthSpec::NoisyAr {
                coefficient: 0.9,
                noise_std: 1.0,
            },
            SynthKind::Square => SynthSpec::Square {
                period: 48,
                amplitude: 1.0,
                noise_std: 0.05,
            },
        }
    }

    pub fn kind(&self) -> SynthKind {
        match self {
            SynthSpec::SumOfSines { .. } => SynthKind::SumOfSines,
            SynthSpec::NoisyAr { .. } => SynthKind::NoisyAr,
            SynthSpec::Square { .. } => SynthKind::Square,
        }
    }
}

pub fn synth(spec: &SynthSpec, length: usize, seed: u64) -> Result<Vec<f64>> {
    if length == 0 {
        return Err(Error::Precondition(
            "synthetic length must be at least 1".into(),
        ));
    }
    let noise_std = match spec {
        SynthSpec::SumOfSines { noise_std, .. }
        | SynthSpec::NoisyAr { noise_std, .. }
        | SynthSpec::Square { noise_std, .. } => *noise_std,
    };
    if noise_std < 0.0 || !noise_std.is_finite() {
        return Err(Error::Config(format!(
            "noise_std must be finite and >= 0, got {noise_std}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = Normal::new(0.0, 1.0).expect("unit normal");
    let eps: Vec<f64> = (0..length)
        .map(|_| noise_std * normal.sample(&mut rng))
        .collect();

    let out = match spec {
        SynthSpec::SumOfSines {
            frequencies,
            amplitudes,
            ..
        } => {
            if frequencies.len() != amplitudes.len() {
                return Err(Error::Config(format!(
                    "{} frequencies but {} amplitudes",
                    frequencies.len(),
                    amplitudes.len()
                )));
            }
            (0..length)
                .map(|i| {
                    let t = i as f64;
                    frequencies
                        .iter()
                        .zip(amplitudes)
                        .map(|(f, a)| a * (2.0 * std::f64::consts::PI * f * t).sin())
                        .sum::<f64>()
                        + eps[i]
                })
                .collect()
        }
        SynthSpec::NoisyAr { coefficient, .. } => {
            let mut x = Vec::with_capacity(length);
            let mut prev = 0.0;
            for e in &eps {
                prev = coefficient * prev + e;
                x.push(prev);
            }
            x
        }
        SynthSpec::Square {
            period, amplitude, ..
        } => {
            if *period < 2 {
                return Err(Error::Config("square period must be at least 2".into()));
            }
            (0..length)
                .map(|i| {
                    let level = if i % period < period / 2 {
                        *amplitude
                    } else {
                        -*amplitude
                    };
                    level + eps[i]
                })
                .collect()
        }
    };
    Ok(out)
}

/// Synthesizes, splits and standardizes in one go.
pub fn synthetic_dataset(
    spec: &SynthSpec,
    length: usize,
    seed: u64,
    fractions: [f64; 3],
) -> Result<TimeSeriesDataset> {
    let raw = synth(spec, length, seed)?;
    Ok(split_standardize(&raw, fractions)?
        .with_name(spec.kind().to_string())
        .with_source(DataSource::Synthetic {
            spec: spec.clone(),
            length,
            seed,
        }))
}

/// Loads a column from a file, then splits and standardizes it.
pub fn file_dataset(
    path: &Path,
    column: &ColumnSelector,
    fractions: [f64; 3],
) -> Result<TimeSeriesDataset> {
    let raw = load_csv(path, column)?;
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "series".into());
    Ok(split_standardize(&raw, fractions)?
        .with_name(name)
        .with_source(DataSource::File {
            path: path.to_path_buf(),
            column: column.0.clone(),
        }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn read(text: &str, col: &str) -> Result<Vec<f64>> {
        read_csv(text.as_bytes(), &ColumnSelector::from(col))
    }

    #[test]
    fn loads_named_and_indexed_columns() {
        let text = "date,OT\n2016-07-01,1\n2016-07-02,2\n2016-07-03,3\n";
        assert_eq!(read(text, "OT").unwrap(), vec![1.0, 2.0, 3.0]);
        assert_eq!(read(text, "1").unwrap(), vec![1.0, 2.0, 3.0]);
        assert_eq!(read("# run config\nOT\n4\n", "OT").unwrap(), vec![4.0]);
    }

    #[test]
    fn missing_column_lists_headers() {
        match read("a,b\n1,2\n", "OT") {
            Err(Error::MissingColumn {
                requested,
                available,
            }) => {
                assert_eq!(requested, "OT");
                assert_eq!(available, vec!["a", "b"]);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn bad_cells_report_their_row() {
        assert!(matches!(
            read("OT\n1\nNaN\n3\n", "OT"),
            Err(Error::Data { row: 1, .. })
        ));
        assert!(matches!(
            read("OT\n1\n2\nabc\n", "OT"),
            Err(Error::Data { row: 2, .. })
        ));
        assert!(matches!(
            read("OT\ninf\n", "OT"),
            Err(Error::Data { row: 0, .. })
        ));
    }

    #[test]
    fn empty_inputs_are_errors() {
        assert!(read("", "OT").is_err());
        assert!(matches!(
            read("OT\n", "OT"),
            Err(Error::InsufficientData { .. })
        ));
    }

    #[test]
    fn split_ten_points() {
        let raw: Vec<f64> = (0..10).map(|i| i as f64).collect();
        let d = split_standardize(&raw, [0.6, 0.2, 0.2]).unwrap();
        assert_eq!(d.split().train, 0..6);
        assert_eq!(d.split().validation, 6..8);
        assert_eq!(d.split().test, 8..10);
    }

    #[test]
    fn population_std_on_train_only() {
        // train = (0, 2, 4): mean 2, population std √(8/3)
        let raw = [0.0, 2.0, 4.0, 100.0, -50.0];
        let d = split_standardize(&raw, [0.6, 0.2, 0.2]).unwrap();
        let s = d.standardization();
        assert_eq!(s.mean, 2.0);
        assert!((s.std - (8.0f64 / 3.0).sqrt()).abs() < 1e-15);
        let z = d.slice(Slice::Train);
        let expect = 2.0 / (8.0f64 / 3.0).sqrt();
        assert!((z[0] + expect).abs() < 1e-15 && z[1] == 0.0 && (z[2] - expect).abs() < 1e-15);
        assert!((expect - 1.224744871391589).abs() < 1e-15);
        assert_eq!(d.slice(Slice::Validation)[0], s.apply(100.0));
    }

    #[test]
    fn constant_series_is_rejected() {
        assert!(matches!(
            split_standardize(&[3.0; 10], [0.6, 0.2, 0.2]),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn bad_fractions_are_config_errors() {
        let raw = [1.0, 2.0, 3.0];
        assert!(matches!(
            split_standardize(&raw, [0.0, 0.5, 0.5]),
            Err(Error::Config(_))
        ));
        assert!(matches!(
            split_standardize(&raw, [0.6, 0.3, 0.3]),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn short_slices_are_reported() {
        let raw: Vec<f64> = (0..100).map(|i| (i as f64).sin()).collect();
        let d = split_standardize(&raw, [0.6, 0.2, 0.2]).unwrap();
        assert!(d.require_slice_len(20).is_ok());
        match d.require_slice_len(21) {
            Err(Error::InsufficientData {
                available,
                required,
                ..
            }) => {
                assert_eq!((available, required), (20, 21));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn presets() {
        assert_eq!(split_preset("ett-12-4-4").unwrap(), [0.6, 0.2, 0.2]);
        assert!(matches!(split_preset("nope"), Err(Error::Config(_))));
    }

    #[test]
    fn quarter_period_sine() {
        let spec = SynthSpec::SumOfSines {
            frequencies: vec![0.25],
            amplitudes: vec![1.0],
            noise_std: 0.0,
        };
        let x = synth(&spec, 4, 7).unwrap();
        for (a, b) in x.iter().zip([0.0, 1.0, 0.0, -1.0]) {
            assert!((a - b).abs() < 1e-15, "{x:?}");
        }
    }

    #[test]
    fn synth_is_seeded() {
        for kind in [SynthKind::SumOfSines, SynthKind::NoisyAr, SynthKind::Square] {
            let spec = SynthSpec::default_for(kind);
            assert_eq!(synth(&spec, 300, 5).unwrap(), synth(&spec, 300, 5).unwrap());
            assert_ne!(synth(&spec, 300, 5).unwrap(), synth(&spec, 300, 6).unwrap());
        }
        assert!(synth(&SynthSpec::default_for(SynthKind::Square), 0, 1).is_err());
    }

    #[test]
    fn ar_follows_recursion() {
        let spec = SynthSpec::NoisyAr {
            coefficient: 0.9,
            noise_std: 1.0,
        };
        let x = synth(&spec, 50, 11).unwrap();
        // Same seed with zero coefficient gives the raw innovations.
        let e = synth(
            &SynthSpec::NoisyAr {
                coefficient: 0.0,
                noise_std: 1.0,
            },
            50,
            11,
        )
        .unwrap();
        assert_eq!(x[0], e[0]);
        for t in 1..50 {
            assert!((x[t] - (0.9 * x[t - 1] + e[t])).abs() < 1e-15);
        }
    }

    #[test]
    fn square_levels() {
        let spec = SynthSpec::Square {
            period: 4,
            amplitude: 2.0,
            noise_std: 0.0,
        };
        assert_eq!(
            synth(&spec, 6, 0).unwrap(),
            vec![2.0, 2.0, -2.0, -2.0, 2.0, 2.0]
        );
    }

    #[test]
    fn manifest_echoes_split() {
        let spec = SynthSpec::default_for(SynthKind::SumOfSines);
        let d = synthetic_dataset(&spec, 200, 3, [0.6, 0.2, 0.2]).unwrap();
        let m = d.manifest();
        assert_eq!(m.length, 200);
        assert_eq!(m.test, 160..200);
        assert_eq!(m.std_convention, "population");
        let json = serde_json::to_string(&m).unwrap();
        let back: DatasetManifest = serde_json::from_str(&json).unwrap();
        assert_eq!(back, m);
    }

    proptest! {
        #[test]
        fn csv_round_trip_is_bit_exact(xs in proptest::collection::vec(any::<f64>().prop_filter("finite", |x| x.is_finite()), 1..60)) {
            let mut buf = Vec::new();
            write_csv(&mut buf, "v", &xs).unwrap();
            let back = read_csv(buf.as_slice(), &ColumnSelector::from("v")).unwrap();
            prop_assert_eq!(back.len(), xs.len());
            for (a, b) in back.iter().zip(&xs) {
                prop_assert_eq!(a.to_bits(), b.to_bits());
            }
        }

        #[test]
        fn standardization_keeps_train_extrema(xs in proptest::collection::vec(-1e3f64..1e3, 10..80)) {
            prop_assume!(xs.iter().any(|x| *x != xs[0]));
            let d = match split_standardize(&xs, [0.6, 0.2, 0.2]) {
                Ok(d) => d,
                Err(_) => return Ok(()),
            };
            let raw = &xs[d.split().train.clone()];
            let z = d.slice(Slice::Train);
            let arg = |v: &[f64], max: bool| {
                let mut best = 0;
                for i in 1..v.len() {
                    if (max && v[i] > v[best]) || (!max && v[i] < v[best]) { best = i; }
                }
                best
            };
            prop_assert_eq!(arg(raw, true), arg(z, true));
            prop_assert_eq!(arg(raw, false), arg(z, false));
            let n = z.len() as f64;
            let mean = z.iter().sum::<f64>() / n;
            let var = z.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n;
            prop_assert!(mean.abs() < 1e-9);
            prop_assert!((var - 1.0).abs() < 1e-9);
        }
    }
}
