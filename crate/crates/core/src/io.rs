//! Text file formats.
//!
//! Kernels, envelopes and covariance elements are stored as JSON documents:
//!
//! ```text
//! { "group": "Z^2", "dim": 2,
//!   "entries": [ { "s": [1, 0], "t": [0, 0], "matrix": [[re, im], …] }, … ] }
//! { "group": "Z^2", "values": [ { "s": [1, 0], "value": 0.5 }, … ] }
//! { "group": "Z/5", "dim": 2,
//!   "entries": [ { "x": [1], "y": [3], "matrix": [[re, im], …] }, … ] }
//! ```
//!
//! Matrices are row-major lists of `d²` complex numbers. Decay reports are
//! written as a CSV table `radius,word_length,envelope_value` plus a JSON
//! summary record.

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::covariance::CovarianceElement;
use crate::error::{Error, Result};
use crate::group::{Group, GroupPoint};
use crate::kernel::{Envelope, Kernel};
use crate::linalg::{Mat, C64};
use crate::wiener::DecayReport;

#[derive(Serialize, Deserialize)]
struct KernelEntry {
    s: Vec<i64>,
    t: Vec<i64>,
    matrix: Vec<[f64; 2]>,
}

#[derive(Serialize, Deserialize)]
struct KernelFile {
    group: String,
    dim: usize,
    entries: Vec<KernelEntry>,
}

#[derive(Serialize, Deserialize)]
struct EnvelopeEntry {
    s: Vec<i64>,
    value: f64,
}

#[derive(Serialize, Deserialize)]
struct EnvelopeFile {
    group: String,
    values: Vec<EnvelopeEntry>,
}

#[derive(Serialize, Deserialize)]
struct CovarianceEntry {
    x: Vec<i64>,
    y: Vec<i64>,
    matrix: Vec<[f64; 2]>,
}

#[derive(Serialize, Deserialize)]
struct CovarianceFile {
    group: String,
    dim: usize,
    entries: Vec<CovarianceEntry>,
}

fn encode_matrix(m: &Mat) -> Vec<[f64; 2]> {
    let mut out = Vec::with_capacity(m.len());
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            let z = m[(i, j)];
            out.push([z.re, z.im]);
        }
    }
    out
}

fn decode_matrix(dim: usize, data: &[[f64; 2]]) -> Result<Mat> {
    if data.len() != dim * dim {
        return Err(Error::Parse(format!(
            "matrix has {} entries, expected {}",
            data.len(),
            dim * dim
        )));
    }
    if data.iter().flatten().any(|v| !v.is_finite()) {
        return Err(Error::Parse("matrix entries must be finite".into()));
    }
    Ok(Mat::from_row_iterator(
        dim,
        dim,
        data.iter().map(|[re, im]| C64::new(*re, *im)),
    ))
}

fn decode_point(g: &Group, coords: &[i64]) -> Result<GroupPoint> {
    let p = GroupPoint::new(coords);
    g.check(&p)?;
    Ok(p)
}

fn parse_header(group: &str, dim: usize) -> Result<Group> {
    if dim == 0 {
        return Err(Error::Parse("dim must be >= 1".into()));
    }
    group.parse()
}

pub fn kernel_to_string(k: &Kernel) -> String {
    let file = KernelFile {
        group: k.group().to_string(),
        dim: k.dim(),
        entries: k
            .entries()
            .map(|(s, t, m)| KernelEntry {
                s: s.coords().to_vec(),
                t: t.coords().to_vec(),
                matrix: encode_matrix(m),
            })
            .collect(),
    };
    serde_json::to_string_pretty(&file).expect("kernel serializes")
}

pub fn kernel_from_str(text: &str) -> Result<Kernel> {
    let file: KernelFile = serde_json::from_str(text)?;
    let g = parse_header(&file.group, file.dim)?;
    let mut k = Kernel::zero(g.clone(), file.dim);
    for e in file.entries {
        let s = decode_point(&g, &e.s)?;
        let t = decode_point(&g, &e.t)?;
        if k.entry(&s, &t).is_some() {
            return Err(Error::Parse(format!("duplicate entry at s={s:?}, t={t:?}")));
        }
        k.insert(s, t, decode_matrix(file.dim, &e.matrix)?);
    }
    Ok(k)
}

pub fn envelope_to_string(env: &Envelope) -> String {
    let file = EnvelopeFile {
        group: env.group().to_string(),
        values: env
            .iter()
            .map(|(s, value)| EnvelopeEntry {
                s: s.coords().to_vec(),
                value,
            })
            .collect(),
    };
    serde_json::to_string_pretty(&file).expect("envelope serializes")
}

pub fn envelope_from_str(text: &str) -> Result<Envelope> {
    let file: EnvelopeFile = serde_json::from_str(text)?;
    let g: Group = file.group.parse()?;
    let mut env = Envelope::new(g.clone());
    for e in file.values {
        if !(e.value.is_finite() && e.value >= 0.0) {
            return Err(Error::Parse(format!("invalid envelope value {}", e.value)));
        }
        env.set(decode_point(&g, &e.s)?, e.value);
    }
    Ok(env)
}

pub fn covariance_to_string(f: &CovarianceElement) -> String {
    let file = CovarianceFile {
        group: f.group().to_string(),
        dim: f.dim(),
        entries: f
            .entries()
            .map(|(x, y, m)| CovarianceEntry {
                x: x.coords().to_vec(),
                y: y.coords().to_vec(),
                matrix: encode_matrix(m),
            })
            .collect(),
    };
    serde_json::to_string_pretty(&file).expect("covariance element serializes")
}

pub fn covariance_from_str(text: &str) -> Result<CovarianceElement> {
    let file: CovarianceFile = serde_json::from_str(text)?;
    let g = parse_header(&file.group, file.dim)?;
    let mut f = CovarianceElement::zero(g.clone(), file.dim);
    for e in file.entries {
        let x = decode_point(&g, &e.x)?;
        let y = decode_point(&g, &e.y)?;
        f.insert(x, y, decode_matrix(file.dim, &e.matrix)?);
    }
    Ok(f)
}

pub fn read_kernel(path: &Path) -> Result<Kernel> {
    kernel_from_str(&std::fs::read_to_string(path)?)
}

pub fn write_kernel(path: &Path, k: &Kernel) -> Result<()> {
    std::fs::write(path, kernel_to_string(k))?;
    Ok(())
}

pub fn read_envelope(path: &Path) -> Result<Envelope> {
    envelope_from_str(&std::fs::read_to_string(path)?)
}

pub fn write_envelope(path: &Path, env: &Envelope) -> Result<()> {
    std::fs::write(path, envelope_to_string(env))?;
    Ok(())
}

pub fn read_covariance(path: &Path) -> Result<CovarianceElement> {
    covariance_from_str(&std::fs::read_to_string(path)?)
}

pub fn write_covariance(path: &Path, f: &CovarianceElement) -> Result<()> {
    std::fs::write(path, covariance_to_string(f))?;
    Ok(())
}

/// One row of the decay CSV. Rows hold the maximal envelope value per
/// word-length bucket, for each section radius.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayRow {
    pub radius: u32,
    pub word_length: u32,
    pub envelope_value: f64,
}

pub fn decay_rows(report: &DecayReport) -> Vec<DecayRow> {
    let mut rows = Vec::new();
    for (&radius, env) in &report.envelope_by_radius {
        let g = env.group();
        let mut buckets = std::collections::BTreeMap::<u32, f64>::new();
        for (s, v) in env.iter() {
            let slot = buckets.entry(g.word_length(s)).or_insert(0.0);
            *slot = slot.max(v);
        }
        rows.extend(buckets.into_iter().map(|(word_length, envelope_value)| DecayRow {
            radius,
            word_length,
            envelope_value,
        }));
    }
    rows
}

pub fn write_decay_csv<W: Write>(out: W, report: &DecayReport) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for row in decay_rows(report) {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_decay_csv(text: &str) -> Result<Vec<DecayRow>> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    r.deserialize().map(|row| row.map_err(Error::from)).collect()
}

/// Summary record of a decay study.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecaySummary {
    pub stabilized: bool,
    pub fitted_rate: Option<f64>,
    pub r2: Option<f64>,
    pub l1_partial_sums: Vec<f64>,
    pub residual: f64,
}

impl From<&DecayReport> for DecaySummary {
    fn from(r: &DecayReport) -> Self {
        DecaySummary {
            stabilized: r.stabilized,
            fitted_rate: r.fitted_rate,
            r2: r.r2,
            l1_partial_sums: r.l1_partial_sums.clone(),
            residual: r.residual,
        }
    }
}

pub fn decay_summary_to_string(report: &DecayReport) -> String {
    serde_json::to_string_pretty(&DecaySummary::from(report)).expect("summary serializes")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::{generate_kernel, random_covariance, rng, Profile};

    #[test]
    fn kernel_text_round_trip() {
        for g in [
            Group::zd(2),
            Group::heisenberg(),
            Group::cyclic(5),
            Group::heisenberg_mod(3),
        ] {
            let cols = g.ball(1);
            let k = generate_kernel(&g, 2, 3, Profile::Exponential { rate: 0.5, radius: 2 }, &cols)
                .unwrap()
                .kernel;
            assert_eq!(kernel_from_str(&kernel_to_string(&k)).unwrap(), k);
        }
    }

    #[test]
    fn envelope_and_covariance_round_trip() {
        let g = Group::cyclic(4);
        let els = g.elements().unwrap();
        let f = random_covariance(&mut rng(2), &g, 2, &els, &els, 0.5);
        assert_eq!(covariance_from_str(&covariance_to_string(&f)).unwrap(), f);
        let k = f.r_map();
        let env = k.min_envelope();
        assert_eq!(envelope_from_str(&envelope_to_string(&env)).unwrap(), env);
    }

    #[test]
    fn kernel_parse_errors() {
        let bad_group = r#"{"group":"Q","dim":1,"entries":[]}"#;
        assert!(kernel_from_str(bad_group).is_err());
        let bad_len = r#"{"group":"Z^1","dim":2,"entries":[{"s":[0],"t":[0],"matrix":[[1,0]]}]}"#;
        assert!(matches!(kernel_from_str(bad_len), Err(Error::Parse(_))));
        let bad_point = r#"{"group":"Z/3","dim":1,"entries":[{"s":[5],"t":[0],"matrix":[[1,0]]}]}"#;
        assert!(kernel_from_str(bad_point).is_err());
        let bad_arity = r#"{"group":"Z^2","dim":1,"entries":[{"s":[0],"t":[0,0],"matrix":[[1,0]]}]}"#;
        assert!(matches!(
            kernel_from_str(bad_arity),
            Err(Error::DimensionMismatch { .. })
        ));
        let dup = r#"{"group":"Z^1","dim":1,"entries":[
            {"s":[0],"t":[0],"matrix":[[1,0]]},{"s":[0],"t":[0],"matrix":[[2,0]]}]}"#;
        assert!(matches!(kernel_from_str(dup), Err(Error::Parse(_))));
    }

    #[test]
    fn matrix_is_row_major() {
        let text = r#"{"group":"Z^1","dim":2,"entries":[{"s":[1],"t":[0],
            "matrix":[[1,0],[2,0],[3,0],[4,-1]]}]}"#;
        let k = kernel_from_str(text).unwrap();
        let m = k.entry(&GroupPoint::new(&[1]), &GroupPoint::new(&[0])).unwrap();
        assert_eq!(m[(0, 1)], C64::new(2.0, 0.0));
        assert_eq!(m[(1, 0)], C64::new(3.0, 0.0));
        assert_eq!(m[(1, 1)], C64::new(4.0, -1.0));
    }
}
