//! Plain-text file formats.
//!
//! Click files hold one `timestamp_ps<TAB>channel` record per line under a
//! `# rfstat-clicks v1 duration_ps=<D>` header. Curves, spectra and
//! histograms are two-column CSV under a single `#` metadata line. Numbers
//! are written in the shortest form that parses back to the same value.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::hom::VisibilityCurve;
use crate::instrument::Histogram;
use crate::units::{ClickStream, CorrelationCurve, Spectrum};

pub const CLICKS_MAGIC: &str = "rfstat-clicks";
pub const CURVE_MAGIC: &str = "rfstat-curve";
pub const SPECTRUM_MAGIC: &str = "rfstat-spectrum";
pub const HISTOGRAM_MAGIC: &str = "rfstat-histogram";
pub const VISIBILITY_MAGIC: &str = "rfstat-visibility";
const VERSION: &str = "v1";

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

/// Parsed `# <magic> v1 key=value ...` line.
struct Header {
    fields: BTreeMap<String, String>,
}

impl Header {
    fn parse(line: &str, magic: &str) -> Result<Self> {
        let mut tokens = line.split_whitespace();
        if tokens.next() != Some("#") {
            return Err(parse_err(1, format!("expected `# {magic} {VERSION}` header")));
        }
        match tokens.next() {
            Some(m) if m == magic => {}
            Some(m) => return Err(parse_err(1, format!("expected a {magic} file, found {m}"))),
            None => return Err(parse_err(1, "header is missing the format name")),
        }
        if tokens.next() != Some(VERSION) {
            return Err(parse_err(1, format!("unsupported version, expected {VERSION}")));
        }
        let mut fields = BTreeMap::new();
        for tok in tokens {
            let (k, v) = tok
                .split_once('=')
                .ok_or_else(|| parse_err(1, format!("malformed header field `{tok}`")))?;
            fields.insert(k.to_string(), v.to_string());
        }
        Ok(Header { fields })
    }

    fn get<T: FromStr>(&self, key: &str) -> Result<T> {
        let raw = self
            .fields
            .get(key)
            .ok_or_else(|| parse_err(1, format!("header lacks `{key}`")))?;
        raw.parse()
            .map_err(|_| parse_err(1, format!("header field `{key}` has invalid value `{raw}`")))
    }
}

/// First non-empty line and the remaining data lines with their numbers.
fn split_lines(text: &str) -> Result<(&str, Vec<(usize, &str)>)> {
    let mut lines = text.lines().enumerate();
    let header = lines
        .next()
        .map(|(_, l)| l)
        .ok_or_else(|| parse_err(1, "file is empty"))?;
    let data = lines
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
        .collect();
    Ok((header, data))
}

fn field<T: FromStr>(raw: Option<&str>, line: usize, what: &str) -> Result<T> {
    let raw = raw.ok_or_else(|| parse_err(line, format!("missing {what}")))?;
    raw.trim()
        .parse()
        .map_err(|_| parse_err(line, format!("invalid {what} `{}`", raw.trim())))
}

fn read_to_string(mut r: impl Read) -> Result<String> {
    let mut s = String::new();
    r.read_to_string(&mut s)?;
    Ok(s)
}

// ---------------------------------------------------------------- clicks

pub fn write_clicks(mut w: impl Write, stream: &ClickStream) -> Result<()> {
    writeln!(w, "# {CLICKS_MAGIC} {VERSION} duration_ps={}", stream.duration())?;
    let ch = stream.channel();
    for t in stream.timestamps() {
        writeln!(w, "{t}\t{ch}")?;
    }
    Ok(())
}

/// Every channel found in a click file, keyed by channel number.
pub fn read_click_channels(r: impl Read) -> Result<BTreeMap<u8, ClickStream>> {
    let text = read_to_string(r)?;
    let (header, data) = split_lines(&text)?;
    let duration: u64 = Header::parse(header, CLICKS_MAGIC)?.get("duration_ps")?;
    let mut by_channel: BTreeMap<u8, Vec<u64>> = BTreeMap::new();
    let mut last: Option<u64> = None;
    for (index, (line, row)) in data.iter().enumerate() {
        let mut cols = row.split('\t');
        let t: u64 = field(cols.next(), *line, "timestamp")?;
        let ch: u8 = field(cols.next(), *line, "channel")?;
        if cols.next().is_some() {
            return Err(parse_err(*line, "expected two tab-separated columns"));
        }
        if last.is_some_and(|p| t < p) {
            return Err(Error::Unsorted { index });
        }
        if t > duration {
            return Err(Error::OutOfRange {
                index,
                timestamp: t,
                duration,
            });
        }
        last = Some(t);
        by_channel.entry(ch).or_default().push(t);
    }
    if by_channel.is_empty() {
        return Err(Error::EmptyStream("file contains no clicks".into()));
    }
    by_channel
        .into_iter()
        .map(|(ch, ts)| ClickStream::new(ch, ts, duration).map(|s| (ch, s)))
        .collect()
}

/// Single-channel click file.
pub fn read_clicks(r: impl Read) -> Result<ClickStream> {
    let mut channels = read_click_channels(r)?;
    if channels.len() > 1 {
        return Err(Error::param(
            "channel",
            format!("file mixes channels {:?}", channels.keys().collect::<Vec<_>>()),
        ));
    }
    Ok(channels.pop_first().map(|(_, s)| s).expect("non-empty"))
}

// ---------------------------------------------------------------- curves

fn write_pairs<'a>(
    mut w: impl Write,
    header: String,
    rows: impl Iterator<Item = (f64, String)> + 'a,
) -> Result<()> {
    let mut out = header;
    out.push('\n');
    for (x, y) in rows {
        let _ = writeln!(out, "{x},{y}");
    }
    w.write_all(out.as_bytes())?;
    Ok(())
}

fn read_pairs<'a, T: FromStr>(data: &[(usize, &'a str)], expected: usize, what: &str) -> Result<Vec<T>> {
    if data.len() != expected {
        let line = data.last().map(|d| d.0).unwrap_or(1);
        return Err(parse_err(
            line,
            format!("header announces {expected} rows, found {}", data.len()),
        ));
    }
    data.iter()
        .map(|(line, row)| {
            let mut cols = row.split(',');
            let _: f64 = field(cols.next(), *line, "abscissa")?;
            let v = field(cols.next(), *line, what)?;
            if cols.next().is_some() {
                return Err(parse_err(*line, "expected two comma-separated columns"));
            }
            Ok(v)
        })
        .collect()
}

pub fn write_curve(w: impl Write, curve: &CorrelationCurve) -> Result<()> {
    let header = format!(
        "# {CURVE_MAGIC} {VERSION} tau_start_ps={} tau_step_ps={} points={}",
        curve.tau_start(),
        curve.tau_step(),
        curve.len()
    );
    write_pairs(w, header, curve.taus().zip(curve.values().iter().map(|v| v.to_string())))
}

pub fn read_curve(r: impl Read) -> Result<CorrelationCurve> {
    let text = read_to_string(r)?;
    let (header, data) = split_lines(&text)?;
    let h = Header::parse(header, CURVE_MAGIC)?;
    let values = read_pairs(&data, h.get("points")?, "value")?;
    CorrelationCurve::new(h.get("tau_start_ps")?, h.get("tau_step_ps")?, values)
}

pub fn write_spectrum(w: impl Write, spectrum: &Spectrum) -> Result<()> {
    let header = format!(
        "# {SPECTRUM_MAGIC} {VERSION} omega_start_uev={} omega_step_uev={} points={}",
        spectrum.omega_start(),
        spectrum.omega_step(),
        spectrum.len()
    );
    write_pairs(
        w,
        header,
        spectrum.omegas().zip(spectrum.density().iter().map(|v| v.to_string())),
    )
}

pub fn read_spectrum(r: impl Read) -> Result<Spectrum> {
    let text = read_to_string(r)?;
    let (header, data) = split_lines(&text)?;
    let h = Header::parse(header, SPECTRUM_MAGIC)?;
    let density = read_pairs(&data, h.get("points")?, "density")?;
    Spectrum::new(h.get("omega_start_uev")?, h.get("omega_step_uev")?, density)
}

pub fn write_histogram(w: impl Write, hist: &Histogram) -> Result<()> {
    let norm = hist
        .normalization
        .map(|n| n.to_string())
        .unwrap_or_else(|| "none".into());
    let header = format!(
        "# {HISTOGRAM_MAGIC} {VERSION} bin_start_ps={} bin_width_ps={} bins={} normalization={norm}",
        hist.bin_start,
        hist.bin_width,
        hist.len()
    );
    write_pairs(
        w,
        header,
        (0..hist.len()).map(|i| (hist.bin_center(i), hist.counts[i].to_string())),
    )
}

pub fn read_histogram(r: impl Read) -> Result<Histogram> {
    let text = read_to_string(r)?;
    let (header, data) = split_lines(&text)?;
    let h = Header::parse(header, HISTOGRAM_MAGIC)?;
    let counts = read_pairs(&data, h.get("bins")?, "count")?;
    let raw_norm: String = h.get("normalization")?;
    let normalization = match raw_norm.as_str() {
        "none" => None,
        s => Some(
            s.parse()
                .map_err(|_| parse_err(1, format!("invalid normalization `{s}`")))?,
        ),
    };
    Histogram::new(h.get("bin_start_ps")?, h.get("bin_width_ps")?, counts, normalization)
}

pub fn write_visibility(w: impl Write, curve: &VisibilityCurve) -> Result<()> {
    let header = format!(
        "# {VISIBILITY_MAGIC} {VERSION} tau_start_ps={} tau_step_ps={} points={}",
        curve.tau_start,
        curve.tau_step,
        curve.values.len()
    );
    write_pairs(
        w,
        header,
        curve.values.iter().enumerate().map(|(i, v)| {
            (
                curve.tau(i),
                v.map(|x| x.to_string()).unwrap_or_else(|| "undefined".into()),
            )
        }),
    )
}

/// Format name of a file written by this module.
pub fn sniff_format(path: impl AsRef<Path>) -> Result<String> {
    let path = path.as_ref();
    let wrap = |e| Error::at_path(path, e);
    let file = File::open(path).map_err(|e| wrap(e.into()))?;
    let mut first = String::new();
    BufReader::new(file)
        .read_line(&mut first)
        .map_err(|e| wrap(e.into()))?;
    first
        .split_whitespace()
        .nth(1)
        .map(str::to_string)
        .ok_or_else(|| wrap(parse_err(1, "missing format header")))
}

// ---------------------------------------------------------------- paths

fn save_with(path: &Path, f: impl FnOnce(&mut BufWriter<File>) -> Result<()>) -> Result<()> {
    let run = || -> Result<()> {
        let mut w = BufWriter::new(File::create(path)?);
        f(&mut w)?;
        w.flush()?;
        Ok(())
    };
    run().map_err(|e| Error::at_path(path, e))
}

fn load_with<T>(path: &Path, f: impl FnOnce(File) -> Result<T>) -> Result<T> {
    File::open(path)
        .map_err(Error::from)
        .and_then(f)
        .map_err(|e| Error::at_path(path, e))
}

pub fn save_clicks(path: impl AsRef<Path>, stream: &ClickStream) -> Result<()> {
    save_with(path.as_ref(), |w| write_clicks(w, stream))
}

pub fn load_clicks(path: impl AsRef<Path>) -> Result<ClickStream> {
    load_with(path.as_ref(), read_clicks)
}

pub fn save_curve(path: impl AsRef<Path>, curve: &CorrelationCurve) -> Result<()> {
    save_with(path.as_ref(), |w| write_curve(w, curve))
}

pub fn load_curve(path: impl AsRef<Path>) -> Result<CorrelationCurve> {
    load_with(path.as_ref(), read_curve)
}

pub fn save_spectrum(path: impl AsRef<Path>, spectrum: &Spectrum) -> Result<()> {
    save_with(path.as_ref(), |w| write_spectrum(w, spectrum))
}

pub fn load_spectrum(path: impl AsRef<Path>) -> Result<Spectrum> {
    load_with(path.as_ref(), read_spectrum)
}

pub fn save_histogram(path: impl AsRef<Path>, hist: &Histogram) -> Result<()> {
    save_with(path.as_ref(), |w| write_histogram(w, hist))
}

pub fn load_histogram(path: impl AsRef<Path>) -> Result<Histogram> {
    load_with(path.as_ref(), read_histogram)
}

pub fn save_visibility(path: impl AsRef<Path>, curve: &VisibilityCurve) -> Result<()> {
    save_with(path.as_ref(), |w| write_visibility(w, curve))
}
