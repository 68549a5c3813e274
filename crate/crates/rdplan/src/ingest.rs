//! Hourly series ingestion and per-day feature construction.
//!
//! Loads hourly CSVs (`timestamp,value`), reshapes them into 365×24 day
//! matrices, derives per-unit net-load, and assembles the 72-value per-day
//! feature vectors (24 load + 24 wind + 24 net-load, each column min-max
//! normalized over the year) that the clustering stage consumes.

use crate::error::{Error, Result};
use std::fmt;
use std::path::Path;

pub const HOURS_PER_DAY: usize = 24;
pub const DAYS_PER_YEAR: usize = 365;
pub const HOURS_PER_YEAR: usize = DAYS_PER_YEAR * HOURS_PER_DAY;

/// Number of entries in one day's feature vector (load, wind, net-load blocks).
pub const FEATURES_PER_DAY: usize = 3 * HOURS_PER_DAY;

/// What an hourly file is expected to contain; drives value validation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeriesKind {
    /// Megawatts, must be non-negative.
    Load,
    /// Per-unit capacity factor, must lie in [0, 1] (1e-9 slack).
    Wind,
}

/// One year of hourly values, leap day removed.
#[derive(Debug, Clone, PartialEq)]
pub struct HourlySeries {
    pub values: Vec<f64>,
    pub label: String,
    pub year: i32,
}

impl HourlySeries {
    /// Wrap a pre-validated 8760-value vector.
    pub fn new(values: Vec<f64>, label: impl Into<String>, year: i32) -> Result<Self> {
        if values.len() != HOURS_PER_YEAR {
            return Err(Error::LengthMismatch {
                left: values.len(),
                right: HOURS_PER_YEAR,
            });
        }
        Ok(HourlySeries {
            values,
            label: label.into(),
            year,
        })
    }

    pub fn annual_max(&self) -> f64 {
        self.values.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Row-major day-by-hour matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DayMatrix {
    values: Vec<f64>,
    days: usize,
}

impl DayMatrix {
    pub fn from_flat(values: &[f64]) -> Result<Self> {
        if values.len() % HOURS_PER_DAY != 0 || values.is_empty() {
            return Err(Error::LengthMismatch {
                left: values.len(),
                right: HOURS_PER_DAY,
            });
        }
        Ok(DayMatrix {
            days: values.len() / HOURS_PER_DAY,
            values: values.to_vec(),
        })
    }

    pub fn days(&self) -> usize {
        self.days
    }

    pub fn get(&self, day: usize, hour: usize) -> f64 {
        self.values[day * HOURS_PER_DAY + hour]
    }

    pub fn day_row(&self, day: usize) -> &[f64] {
        &self.values[day * HOURS_PER_DAY..(day + 1) * HOURS_PER_DAY]
    }

    /// Inverse of [`DayMatrix::from_flat`].
    pub fn flatten(&self) -> &[f64] {
        &self.values
    }

    /// (day, hour) of the maximum entry; earliest wins ties.
    pub fn argmax(&self) -> (usize, usize) {
        let mut best = (0usize, 0usize);
        let mut best_val = f64::NEG_INFINITY;
        for d in 0..self.days {
            for h in 0..HOURS_PER_DAY {
                let v = self.get(d, h);
                if v > best_val {
                    best_val = v;
                    best = (d, h);
                }
            }
        }
        best
    }
}

/// Min-max record for one feature column.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct FeatureNorm {
    pub min: f64,
    pub max: f64,
}

impl FeatureNorm {
    pub fn normalize(&self, x: f64) -> f64 {
        if self.max > self.min {
            (x - self.min) / (self.max - self.min)
        } else {
            0.0
        }
    }

    pub fn denormalize(&self, n: f64) -> f64 {
        if self.max > self.min {
            self.min + n * (self.max - self.min)
        } else {
            // constant column: every day held the same value
            self.min
        }
    }
}

/// Per-day feature vectors plus everything needed to undo the normalization.
///
/// Columns 0..24 are load, 24..48 wind, 48..72 net-load. Production input is
/// a full year (365 days); smaller instances are allowed for testing and toy
/// studies.
#[derive(Debug, Clone)]
pub struct FeatureDays {
    features: Vec<f64>, // n_days × FEATURES_PER_DAY, row-major
    n_days: usize,
    pub raw_net_load: DayMatrix,
    pub norms: Vec<FeatureNorm>,
    /// Annual peak of the raw load series (MW); Lf profiles are per-unit of this.
    pub peak_load_mw: f64,
}

impl FeatureDays {
    /// Build features from day-shaped load (MW) and wind (capacity factor) data.
    pub fn from_day_profiles(load: &DayMatrix, wind: &DayMatrix, wind_scale: f64) -> Result<Self> {
        if load.days() != wind.days() {
            return Err(Error::LengthMismatch {
                left: load.days(),
                right: wind.days(),
            });
        }
        let n_days = load.days();
        let peak = load
            .flatten()
            .iter()
            .cloned()
            .fold(f64::NEG_INFINITY, f64::max);

        let net_flat: Vec<f64> = load
            .flatten()
            .iter()
            .zip(wind.flatten())
            .map(|(&l, &w)| l - wind_scale * w)
            .collect();
        let raw_net_load = DayMatrix::from_flat(&net_flat)?;

        // raw columns laid out block-wise before normalization
        let mut raw = vec![0.0; n_days * FEATURES_PER_DAY];
        for d in 0..n_days {
            for h in 0..HOURS_PER_DAY {
                raw[d * FEATURES_PER_DAY + h] = load.get(d, h);
                raw[d * FEATURES_PER_DAY + HOURS_PER_DAY + h] = wind.get(d, h);
                raw[d * FEATURES_PER_DAY + 2 * HOURS_PER_DAY + h] = raw_net_load.get(d, h);
            }
        }

        let mut norms = Vec::with_capacity(FEATURES_PER_DAY);
        for c in 0..FEATURES_PER_DAY {
            let mut lo = f64::INFINITY;
            let mut hi = f64::NEG_INFINITY;
            for d in 0..n_days {
                let v = raw[d * FEATURES_PER_DAY + c];
                lo = lo.min(v);
                hi = hi.max(v);
            }
            norms.push(FeatureNorm { min: lo, max: hi });
        }

        let mut features = raw;
        for d in 0..n_days {
            for c in 0..FEATURES_PER_DAY {
                let v = features[d * FEATURES_PER_DAY + c];
                features[d * FEATURES_PER_DAY + c] = norms[c].normalize(v);
            }
        }

        Ok(FeatureDays {
            features,
            n_days,
            raw_net_load,
            norms,
            peak_load_mw: peak,
        })
    }

    pub fn n_days(&self) -> usize {
        self.n_days
    }

    pub fn day(&self, d: usize) -> &[f64] {
        &self.features[d * FEATURES_PER_DAY..(d + 1) * FEATURES_PER_DAY]
    }

    /// Denormalize the load block of a 72-vector into a per-unit-of-peak profile.
    pub fn denormalize_load_pu(&self, vec72: &[f64]) -> Vec<f64> {
        let div = if self.peak_load_mw > 0.0 {
            self.peak_load_mw
        } else {
            1.0
        };
        (0..HOURS_PER_DAY)
            .map(|h| self.norms[h].denormalize(vec72[h]) / div)
            .collect()
    }

    /// Denormalize the wind block of a 72-vector, clamped back into [0, 1].
    pub fn denormalize_wind(&self, vec72: &[f64]) -> Vec<f64> {
        (0..HOURS_PER_DAY)
            .map(|h| {
                self.norms[HOURS_PER_DAY + h]
                    .denormalize(vec72[HOURS_PER_DAY + h])
                    .clamp(0.0, 1.0)
            })
            .collect()
    }
}

fn is_leap(year: i32) -> bool {
    (year % 4 == 0 && year % 100 != 0) || year % 400 == 0
}

fn days_in_month(year: i32, month: u32) -> u32 {
    match month {
        1 | 3 | 5 | 7 | 8 | 10 | 12 => 31,
        4 | 6 | 9 | 11 => 30,
        2 => {
            if is_leap(year) {
                29
            } else {
                28
            }
        }
        _ => 0,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Stamp {
    year: i32,
    month: u32,
    day: u32,
    hour: u32,
}

impl fmt::Display for Stamp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{:04}-{:02}-{:02}T{:02}:00",
            self.year, self.month, self.day, self.hour
        )
    }
}

impl Stamp {
    fn next_hour(mut self) -> Stamp {
        self.hour += 1;
        if self.hour == 24 {
            self.hour = 0;
            self.day += 1;
            if self.day > days_in_month(self.year, self.month) {
                self.day = 1;
                self.month += 1;
                if self.month > 12 {
                    self.month = 1;
                    self.year += 1;
                }
            }
        }
        self
    }
}

/// Accepts `YYYY-MM-DDTHH:MM[:SS]` with `T` or a space; minutes/seconds must be zero.
fn parse_stamp(s: &str) -> Option<Stamp> {
    let s = s.trim();
    let (date, time) = if let Some((d, t)) = s.split_once('T') {
        (d, t)
    } else {
        s.split_once(' ')?
    };
    let mut dp = date.split('-');
    let year: i32 = dp.next()?.parse().ok()?;
    let month: u32 = dp.next()?.parse().ok()?;
    let day: u32 = dp.next()?.parse().ok()?;
    if dp.next().is_some() {
        return None;
    }
    let mut tp = time.split(':');
    let hour: u32 = tp.next()?.parse().ok()?;
    let minute: u32 = tp.next()?.parse().ok()?;
    let second: u32 = match tp.next() {
        Some(sec) => sec.parse().ok()?,
        None => 0,
    };
    if tp.next().is_some() || minute != 0 || second != 0 {
        return None;
    }
    if month == 0 || month > 12 || day == 0 || day > days_in_month(year, month) || hour > 23 {
        return None;
    }
    Some(Stamp {
        year,
        month,
        day,
        hour,
    })
}

/// Load one hourly year from CSV, dropping Feb 29 rows on leap years.
///
/// Expects header `timestamp,value` and a gap-free hourly sequence starting
/// at Jan 1 00:00 of `expected_year`. Label is the file stem.
pub fn load_hourly_csv(
    path: impl AsRef<Path>,
    expected_year: i32,
    kind: SeriesKind,
) -> Result<HourlySeries> {
    let path = path.as_ref();
    let pstr = path.display().to_string();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(&pstr, e))?;
    parse_hourly_csv(&text, &pstr, expected_year, kind).map(|mut s| {
        s.label = path
            .file_stem()
            .map(|x| x.to_string_lossy().into_owned())
            .unwrap_or_else(|| "series".to_string());
        s
    })
}

/// Write one hourly year back out in the format [`load_hourly_csv`] reads.
///
/// Non-leap years only: the in-memory series has no Feb 29 rows to restore.
pub fn write_hourly_csv(series: &HourlySeries, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let pstr = path.display().to_string();
    if is_leap(series.year) {
        return Err(Error::WrongYear {
            path: pstr,
            expected: series.year + 1,
            found: series.year,
        });
    }
    let mut out = String::with_capacity(series.values.len() * 28);
    out.push_str("timestamp,value\n");
    let mut stamp = Stamp {
        year: series.year,
        month: 1,
        day: 1,
        hour: 0,
    };
    for v in &series.values {
        out.push_str(&format!("{stamp},{v}\n"));
        stamp = stamp.next_hour();
    }
    std::fs::write(path, out).map_err(|e| Error::io(&pstr, e))
}

fn parse_hourly_csv(
    text: &str,
    pstr: &str,
    expected_year: i32,
    kind: SeriesKind,
) -> Result<HourlySeries> {
    let total_hours = if is_leap(expected_year) { 8784 } else { 8760 };
    let mut lines = text.lines().enumerate();

    match lines.next() {
        Some((_, header)) if header.trim().eq_ignore_ascii_case("timestamp,value") => {}
        Some((_, header)) => {
            return Err(Error::BadValue {
                path: pstr.to_string(),
                row: 1,
                reason: format!("expected header 'timestamp,value', found '{}'", header.trim()),
            })
        }
        None => {
            return Err(Error::BadValue {
                path: pstr.to_string(),
                row: 1,
                reason: "empty file".to_string(),
            })
        }
    }

    let mut expected = Stamp {
        year: expected_year,
        month: 1,
        day: 1,
        hour: 0,
    };
    let mut values = Vec::with_capacity(total_hours);
    let mut rows_seen = 0usize;

    for (idx, line) in lines {
        let row = idx + 1;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let (ts, val) = line.split_once(',').ok_or_else(|| Error::BadValue {
            path: pstr.to_string(),
            row,
            reason: "expected 'timestamp,value'".to_string(),
        })?;
        let stamp = parse_stamp(ts).ok_or_else(|| Error::BadValue {
            path: pstr.to_string(),
            row,
            reason: format!("unparseable hour-start timestamp '{}'", ts.trim()),
        })?;
        if stamp.year != expected_year {
            return Err(Error::WrongYear {
                path: pstr.to_string(),
                expected: expected_year,
                found: stamp.year,
            });
        }
        if rows_seen == total_hours {
            return Err(Error::MissingHours {
                path: pstr.to_string(),
                row,
                expected: "end of file".to_string(),
                found: stamp.to_string(),
            });
        }
        if stamp != expected {
            return Err(Error::MissingHours {
                path: pstr.to_string(),
                row,
                expected: expected.to_string(),
                found: stamp.to_string(),
            });
        }
        let v: f64 = val.trim().parse().map_err(|_| Error::BadValue {
            path: pstr.to_string(),
            row,
            reason: format!("non-numeric value '{}'", val.trim()),
        })?;
        if !v.is_finite() {
            return Err(Error::BadValue {
                path: pstr.to_string(),
                row,
                reason: "non-finite value".to_string(),
            });
        }
        match kind {
            SeriesKind::Load if v < 0.0 => {
                return Err(Error::BadValue {
                    path: pstr.to_string(),
                    row,
                    reason: format!("negative load {}", v),
                })
            }
            SeriesKind::Wind if !(-1e-9..=1.0 + 1e-9).contains(&v) => {
                return Err(Error::BadValue {
                    path: pstr.to_string(),
                    row,
                    reason: format!("wind value {} outside [0, 1]", v),
                })
            }
            _ => {}
        }
        let v = match kind {
            SeriesKind::Wind => v.clamp(0.0, 1.0),
            SeriesKind::Load => v,
        };
        // keep the leap-day rows out right away
        if !(stamp.month == 2 && stamp.day == 29) {
            values.push(v);
        }
        rows_seen += 1;
        expected = expected.next_hour();
    }

    if expected.year == expected_year {
        return Err(Error::MissingHours {
            path: pstr.to_string(),
            row: 0,
            expected: expected.to_string(),
            found: "end of file".to_string(),
        });
    }

    HourlySeries::new(values, "series", expected_year)
}

/// Net load in source units: load minus `wind_scale` × wind availability,
/// where `wind_scale` is the candidate wind fleet's capacity in load units.
pub fn compute_net_load(
    load: &HourlySeries,
    wind: &HourlySeries,
    wind_scale: f64,
) -> Result<HourlySeries> {
    if load.values.len() != wind.values.len() {
        return Err(Error::LengthMismatch {
            left: load.values.len(),
            right: wind.values.len(),
        });
    }
    let values = load
        .values
        .iter()
        .zip(&wind.values)
        .map(|(&l, &w)| l - wind_scale * w)
        .collect();
    Ok(HourlySeries {
        values,
        label: format!("net({},{})", load.label, wind.label),
        year: load.year,
    })
}

/// Full-year feature construction from hourly series.
pub fn build_feature_days(
    load: &HourlySeries,
    wind: &HourlySeries,
    wind_scale: f64,
) -> Result<FeatureDays> {
    if load.values.len() != wind.values.len() {
        return Err(Error::LengthMismatch {
            left: load.values.len(),
            right: wind.values.len(),
        });
    }
    let load_m = DayMatrix::from_flat(&load.values)?;
    let wind_m = DayMatrix::from_flat(&wind.values)?;
    FeatureDays::from_day_profiles(&load_m, &wind_m, wind_scale)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn csv_for_year(year: i32, value: impl Fn(usize) -> f64) -> String {
        let mut out = String::from("timestamp,value\n");
        let mut stamp = Stamp {
            year,
            month: 1,
            day: 1,
            hour: 0,
        };
        let total = if is_leap(year) { 8784 } else { 8760 };
        for i in 0..total {
            out.push_str(&format!("{},{}\n", stamp, value(i)));
            stamp = stamp.next_hour();
        }
        out
    }

    #[test]
    fn constant_file_parses_to_ones() {
        let text = csv_for_year(2019, |_| 1.0);
        let s = parse_hourly_csv(&text, "mem", 2019, SeriesKind::Load).unwrap();
        assert_eq!(s.values.len(), HOURS_PER_YEAR);
        assert!(s.values.iter().all(|&v| v == 1.0));
    }

    #[test]
    fn label_comes_from_filename() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("load_demo.csv");
        std::fs::write(&path, csv_for_year(2019, |_| 2.5)).unwrap();
        let s = load_hourly_csv(&path, 2019, SeriesKind::Load).unwrap();
        assert_eq!(s.label, "load_demo");
    }

    #[test]
    fn csv_write_read_round_trip() {
        let values: Vec<f64> = (0..HOURS_PER_YEAR).map(|t| 10.0 + (t % 37) as f64).collect();
        let series = HourlySeries::new(values, "rt", 2023).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("rt.csv");
        write_hourly_csv(&series, &path).unwrap();
        let back = load_hourly_csv(&path, 2023, SeriesKind::Load).unwrap();
        assert_eq!(back.values, series.values);
    }

    #[test]
    fn csv_writer_rejects_leap_years() {
        let values = vec![1.0; HOURS_PER_YEAR];
        let series = HourlySeries::new(values, "leap", 2024).unwrap();
        let dir = tempfile::tempdir().unwrap();
        assert!(write_hourly_csv(&series, dir.path().join("x.csv")).is_err());
    }

    #[test]
    fn leap_year_drops_feb29() {
        // value = flat hour index so we can see exactly which rows were dropped
        let text = csv_for_year(2020, |i| i as f64);
        let s = parse_hourly_csv(&text, "mem", 2020, SeriesKind::Load).unwrap();
        assert_eq!(s.values.len(), HOURS_PER_YEAR);
        // Feb 29 2020 occupies flat hours 1416..1440
        assert_eq!(s.values[1415], 1415.0);
        assert_eq!(s.values[1416], 1440.0);
    }

    #[test]
    fn short_file_is_missing_hours() {
        let full = csv_for_year(2019, |_| 1.0);
        let truncated: String = full.lines().take(8760).map(|l| format!("{l}\n")).collect();
        let err = parse_hourly_csv(&truncated, "mem", 2019, SeriesKind::Load).unwrap_err();
        assert!(matches!(err, Error::MissingHours { .. }), "{err}");
    }

    #[test]
    fn gap_in_middle_is_missing_hours() {
        let full = csv_for_year(2019, |_| 1.0);
        let mut lines: Vec<&str> = full.lines().collect();
        lines.remove(100);
        let text: String = lines.iter().map(|l| format!("{l}\n")).collect();
        let err = parse_hourly_csv(&text, "mem", 2019, SeriesKind::Load).unwrap_err();
        assert!(matches!(err, Error::MissingHours { .. }));
    }

    #[test]
    fn wrong_year_detected() {
        let text = csv_for_year(2018, |_| 1.0);
        let err = parse_hourly_csv(&text, "mem", 2019, SeriesKind::Load).unwrap_err();
        assert!(matches!(err, Error::WrongYear { found: 2018, .. }));
    }

    #[test]
    fn wind_out_of_bounds_rejected() {
        let text = csv_for_year(2019, |i| if i == 7 { 1.5 } else { 0.5 });
        let err = parse_hourly_csv(&text, "mem", 2019, SeriesKind::Wind).unwrap_err();
        assert!(matches!(err, Error::BadValue { .. }));
    }

    fn series(vals: Vec<f64>) -> HourlySeries {
        HourlySeries {
            values: vals,
            label: "t".into(),
            year: 2019,
        }
    }

    #[test]
    fn net_load_constant_case() {
        let load = series(vec![1.0; HOURS_PER_YEAR]);
        let wind = series(vec![0.5; HOURS_PER_YEAR]);
        let net = compute_net_load(&load, &wind, 1.0).unwrap();
        assert!(net.values.iter().all(|&v| (v - 0.5).abs() < 1e-15));
    }

    #[test]
    fn net_load_zero_scale_is_identity() {
        let mut vals = vec![5.0; HOURS_PER_YEAR];
        vals[3] = 10.0;
        let load = series(vals);
        let wind = series(vec![0.9; HOURS_PER_YEAR]);
        let net = compute_net_load(&load, &wind, 0.0).unwrap();
        assert_eq!(net.values[3], 10.0);
        assert_eq!(net.values[0], 5.0);
    }

    #[test]
    fn net_load_direct_subtraction() {
        let mut l = vec![1.0; HOURS_PER_YEAR];
        l[1] = 0.8;
        let mut w = vec![0.0; HOURS_PER_YEAR];
        w[0] = 0.2;
        w[1] = 0.9;
        let net = compute_net_load(&series(l), &series(w), 1.0).unwrap();
        assert!((net.values[0] - 0.8).abs() < 1e-15);
        assert!((net.values[1] - (-0.1)).abs() < 1e-15);
    }

    #[test]
    fn net_load_length_mismatch() {
        let load = series(vec![1.0; HOURS_PER_YEAR]);
        let wind = HourlySeries {
            values: vec![0.0; 10],
            label: "w".into(),
            year: 2019,
        };
        assert!(matches!(
            compute_net_load(&load, &wind, 1.0),
            Err(Error::LengthMismatch { .. })
        ));
    }

    #[test]
    fn constant_inputs_normalize_to_zero() {
        let load = series(vec![3.0; HOURS_PER_YEAR]);
        let wind = series(vec![0.4; HOURS_PER_YEAR]);
        let f = build_feature_days(&load, &wind, 1.0).unwrap();
        for d in 0..f.n_days() {
            assert!(f.day(d).iter().all(|&v| v == 0.0));
        }
    }

    #[test]
    fn unique_max_cell_normalizes_to_one() {
        let mut vals = vec![1.0; HOURS_PER_YEAR];
        vals[10 * 24 + 12] = 50.0;
        let load = series(vals);
        let wind = series(vec![0.0; HOURS_PER_YEAR]);
        let f = build_feature_days(&load, &wind, 1.0).unwrap();
        assert_eq!(f.day(10)[12], 1.0);
        assert_eq!(f.day(9)[12], 0.0);
    }

    #[test]
    fn raw_net_load_argmax_matches_series() {
        let mut l = vec![1.0; HOURS_PER_YEAR];
        l[200 * 24 + 18] = 9.0;
        let load = series(l);
        let wind = series(vec![0.1; HOURS_PER_YEAR]);
        let net = compute_net_load(&load, &wind, 1.0).unwrap();
        let f = build_feature_days(&load, &wind, 1.0).unwrap();
        let (d, h) = f.raw_net_load.argmax();
        let flat_argmax = net
            .values
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
            .unwrap()
            .0;
        assert_eq!((d, h), (200, 18));
        assert_eq!(d * 24 + h, flat_argmax);
    }

    #[test]
    fn reshape_round_trip() {
        let vals: Vec<f64> = (0..HOURS_PER_YEAR).map(|i| i as f64 * 0.25).collect();
        let m = DayMatrix::from_flat(&vals).unwrap();
        assert_eq!(m.flatten(), &vals[..]);
        assert_eq!(m.get(100, 7), vals[100 * 24 + 7]);
    }

    #[test]
    fn features_within_unit_interval() {
        let load: Vec<f64> = (0..HOURS_PER_YEAR)
            .map(|i| 100.0 + 50.0 * ((i % 24) as f64))
            .collect();
        let wind: Vec<f64> = (0..HOURS_PER_YEAR)
            .map(|i| 0.5 + 0.5 * (((i / 24) % 2) as f64))
            .collect();
        let f = build_feature_days(&series(load), &series(wind), 1.0).unwrap();
        for d in 0..f.n_days() {
            for &v in f.day(d) {
                assert!((0.0..=1.0).contains(&v));
            }
        }
    }

    #[test]
    fn normalization_round_trip_tight() {
        let norm = FeatureNorm {
            min: -3.5,
            max: 12.25,
        };
        for &x in &[-3.5, -1.0, 0.0, 5.5, 12.25] {
            let back = norm.denormalize(norm.normalize(x));
            let rel = if x != 0.0 {
                ((back - x) / x).abs()
            } else {
                back.abs()
            };
            assert!(rel <= 1e-12, "x={x} back={back}");
        }
    }
}
