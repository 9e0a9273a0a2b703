use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::units::{check_positive, CorrelationCurve, ClickStream};

/// Coincidence counts versus delay t_b − t_a.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    pub bin_start: f64,
    pub bin_width: f64,
    pub counts: Vec<u64>,
    /// Expected counts per bin for uncorrelated streams.
    pub normalization: Option<f64>,
}

impl Histogram {
    pub fn new(bin_start: f64, bin_width: f64, counts: Vec<u64>, normalization: Option<f64>) -> Result<Self> {
        check_positive("bin_width", bin_width)?;
        if let Some(n) = normalization {
            check_positive("normalization", n)?;
        }
        Ok(Histogram {
            bin_start,
            bin_width,
            counts,
            normalization,
        })
    }

    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    pub fn bin_center(&self, i: usize) -> f64 {
        self.bin_start + (i as f64 + 0.5) * self.bin_width
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// counts / normalization on the bin centres, an estimate of g²(τ).
    pub fn normalized(&self) -> Result<CorrelationCurve> {
        let norm = self
            .normalization
            .ok_or_else(|| Error::param("normalization", "histogram has no normalization"))?;
        CorrelationCurve::new(
            self.bin_center(0),
            self.bin_width,
            self.counts.iter().map(|&c| c as f64 / norm).collect(),
        )
    }

    /// Poisson standard error of each normalised bin.
    pub fn normalized_errors(&self) -> Option<Vec<f64>> {
        let norm = self.normalization?;
        Some(self.counts.iter().map(|&c| (c.max(1) as f64).sqrt() / norm).collect())
    }
}

/// Integer bin layout: an odd number of bins with the centre bin on τ = 0.
#[derive(Debug, Clone, Copy)]
struct Bins {
    width: i64,
    count: usize,
    /// (2·half + 1)·width; delays satisfy −span/2 ≤ d < span/2.
    span: i64,
}

impl Bins {
    fn new(bin_width: u64, window: u64) -> Result<Self> {
        if bin_width == 0 {
            return Err(Error::param("bin_width", "must be positive"));
        }
        if window < bin_width {
            return Err(Error::param(
                "window",
                format!("window {window} ps is shorter than the bin width {bin_width} ps"),
            ));
        }
        let half = (window / bin_width) as i64;
        let width = bin_width as i64;
        Ok(Bins {
            width,
            count: (2 * half + 1) as usize,
            span: (2 * half + 1) * width,
        })
    }

    fn min_delay(&self) -> i64 {
        -(self.span / 2)
    }

    fn max_delay(&self) -> i64 {
        (self.span + 1) / 2 - 1
    }

    fn index(&self, delay: i64) -> usize {
        ((2 * delay + self.span) / (2 * self.width)) as usize
    }

    fn start(&self) -> f64 {
        -(self.span as f64) / 2.0
    }
}

const CHUNK: usize = 4096;

fn sweep(a: &[u64], b: &[u64], bins: Bins, skip_self: bool) -> Vec<u64> {
    let partials: Vec<Vec<u64>> = a
        .par_chunks(CHUNK)
        .enumerate()
        .map(|(chunk_index, chunk)| {
            let mut counts = vec![0u64; bins.count];
            let first = chunk[0] as i64 + bins.min_delay();
            let mut lo = b.partition_point(|&t| (t as i64) < first);
            for (k, &ta) in chunk.iter().enumerate() {
                let ta = ta as i64;
                while lo < b.len() && (b[lo] as i64) < ta + bins.min_delay() {
                    lo += 1;
                }
                let own = chunk_index * CHUNK + k;
                let mut j = lo;
                while j < b.len() {
                    let d = b[j] as i64 - ta;
                    if d > bins.max_delay() {
                        break;
                    }
                    if !(skip_self && j == own) {
                        counts[bins.index(d)] += 1;
                    }
                    j += 1;
                }
            }
            counts
        })
        .collect();
    let mut total = vec![0u64; bins.count];
    for part in partials {
        for (t, c) in total.iter_mut().zip(part) {
            *t += c;
        }
    }
    total
}

fn require_clicks(s: &ClickStream, name: &str) -> Result<()> {
    if s.is_empty() {
        Err(Error::EmptyStream(name.to_string()))
    } else {
        Ok(())
    }
}

/// Start-stop histogram of every delay t_b − t_a within the window.
///
/// Bins are `bin_width` wide with the centre bin on zero delay; the window
/// is rounded down to a whole number of bins either side of it. The
/// normalization N_a N_b w / T uses the shorter of the two durations.
pub fn correlate_clicks(a: &ClickStream, b: &ClickStream, bin_width: u64, window: u64) -> Result<Histogram> {
    require_clicks(a, "a")?;
    require_clicks(b, "b")?;
    let bins = Bins::new(bin_width, window)?;
    let counts = sweep(a.timestamps(), b.timestamps(), bins, false);
    let duration = a.duration().min(b.duration());
    let normalization = (duration > 0)
        .then(|| a.len() as f64 * b.len() as f64 * bin_width as f64 / duration as f64);
    Histogram::new(bins.start(), bin_width as f64, counts, normalization)
}

/// Correlate a stream with itself, excluding each click's pairing with itself.
pub fn autocorrelate_clicks(a: &ClickStream, bin_width: u64, window: u64) -> Result<Histogram> {
    require_clicks(a, "a")?;
    let bins = Bins::new(bin_width, window)?;
    let counts = sweep(a.timestamps(), a.timestamps(), bins, true);
    let n = a.len() as f64;
    let normalization = (a.duration() > 0 && a.len() > 1)
        .then(|| n * (n - 1.0) * bin_width as f64 / a.duration() as f64);
    Histogram::new(bins.start(), bin_width as f64, counts, normalization)
}
