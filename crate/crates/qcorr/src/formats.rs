//! JSON encodings of states, channels and optimizer settings.
//!
//! Complex numbers are always `[re, im]` pairs and matrices are row-major
//! lists of rows.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use qcorr_core::channel::zoo::{self, SpectrumPreserving};
use qcorr_core::discord::MeasurementClass;
use qcorr_core::{BipartiteState, CMatrix, DensityMatrix, KrausChannel, OptimizerConfig, PureState};

use crate::error::{CliError, CliResult};

pub type Entry = [f64; 2];
pub type MatrixJson = Vec<Vec<Entry>>;

pub fn encode_matrix(m: &CMatrix) -> MatrixJson {
    (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect()).collect()
}

pub fn decode_matrix(rows: &MatrixJson) -> CliResult<CMatrix> {
    let n = rows.len();
    let m = rows.first().map_or(0, Vec::len);
    if n == 0 || m == 0 {
        return Err(CliError::Usage("matrix must have at least one entry".into()));
    }
    if let Some((i, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != m) {
        return Err(CliError::Usage(format!("matrix row {i} has {} entries, expected {m}", r.len())));
    }
    Ok(CMatrix::from_fn(n, m, |i, j| num_complex::Complex64::new(rows[i][j][0], rows[i][j][1])))
}

/// Byte offset of a serde error reported at 1-based `line` and `column`.
fn byte_offset(text: &str, line: usize, column: usize) -> usize {
    let before: usize = text.split_inclusive('\n').take(line.saturating_sub(1)).map(str::len).sum();
    (before + column.saturating_sub(1)).min(text.len())
}

pub fn parse_json<T: serde::de::DeserializeOwned>(text: &str, source_name: &str) -> CliResult<T> {
    serde_json::from_str(text).map_err(|e| CliError::Parse {
        source_name: source_name.to_string(),
        offset: byte_offset(text, e.line(), e.column()),
        message: e.to_string(),
    })
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct StateFile {
    pub dim_a: usize,
    pub dim_b: usize,
    pub matrix: MatrixJson,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct PureStateFile {
    pub dim: usize,
    pub amplitudes: Vec<Entry>,
    /// Optional factorization `dim = dim_a * dim_b`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dim_a: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dim_b: Option<usize>,
}

impl StateFile {
    pub fn from_state(s: &BipartiteState) -> Self {
        Self { dim_a: s.dim_a(), dim_b: s.dim_b(), matrix: encode_matrix(s.matrix()) }
    }
}

/// Reads a state document: a density matrix with factor dimensions, or pure
/// amplitudes (a single factor unless `dim_a`/`dim_b` are given).
pub fn parse_state(text: &str, source_name: &str) -> CliResult<BipartiteState> {
    let doc: Value = parse_json(text, source_name)?;
    if doc.get("amplitudes").is_some() {
        let f: PureStateFile = parse_json(text, source_name)?;
        if f.amplitudes.len() != f.dim {
            return Err(CliError::Usage(format!("{source_name}: dim is {} but {} amplitudes given", f.dim, f.amplitudes.len())));
        }
        let amps: Vec<_> = f.amplitudes.iter().map(|e| num_complex::Complex64::new(e[0], e[1])).collect();
        let rho = qcorr_core::state::pure_to_density(&PureState::from_slice(&amps)?);
        let (da, db) = (f.dim_a.unwrap_or(f.dim), f.dim_b.unwrap_or(1));
        return Ok(BipartiteState::new(rho, da, db)?);
    }
    let f: StateFile = parse_json(text, source_name)?;
    let m = decode_matrix(&f.matrix)?;
    if m.nrows() != m.ncols() {
        return Err(qcorr_core::Error::NotSquare { rows: m.nrows(), cols: m.ncols() }.into());
    }
    Ok(BipartiteState::new(DensityMatrix::new(m)?, f.dim_a, f.dim_b)?)
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct KrausFile {
    pub dim_in: usize,
    pub dim_out: usize,
    pub kraus: Vec<MatrixJson>,
}

impl KrausFile {
    pub fn from_channel(ch: &KrausChannel) -> Self {
        Self { dim_in: ch.dim_in(), dim_out: ch.dim_out(), kraus: ch.kraus().iter().map(encode_matrix).collect() }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(rename_all = "lowercase")]
pub enum GammaName {
    Transpose,
    Identity,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(untagged)]
pub enum GammaJson {
    Named(GammaName),
    Unitary { unitary: MatrixJson },
}

/// A named channel from the zoo.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ZooFile {
    pub zoo: String,
    #[serde(default)]
    pub d: Option<usize>,
    #[serde(default)]
    pub p: Option<f64>,
    #[serde(default)]
    pub gamma: Option<GammaJson>,
    #[serde(default)]
    pub unitary: Option<MatrixJson>,
    /// Orthonormal basis as the columns of a matrix.
    #[serde(default)]
    pub basis: Option<MatrixJson>,
    #[serde(default)]
    pub prepared: Option<Vec<MatrixJson>>,
}

fn require<T: Clone>(v: &Option<T>, what: &str, zoo_name: &str) -> CliResult<T> {
    v.clone().ok_or_else(|| CliError::Usage(format!("zoo channel '{zoo_name}' needs '{what}'")))
}

impl ZooFile {
    pub fn build(&self) -> CliResult<KrausChannel> {
        let name = self.zoo.as_str();
        let dim_from = |m: &Option<MatrixJson>| m.as_ref().map(Vec::len);
        let d = || self.d.or(dim_from(&self.unitary)).or(dim_from(&self.basis)).ok_or_else(|| CliError::Usage(format!("zoo channel '{name}' needs 'd'")));
        Ok(match name {
            "identity" => zoo::identity(d()?),
            "unitary" => zoo::unitary(decode_matrix(&require(&self.unitary, "unitary", name)?)?)?,
            "depolarizing" => zoo::depolarizing(require(&self.p, "p", name)?, d()?)?,
            "decohering" | "completely_decohering" => {
                let basis = match &self.basis {
                    Some(b) => decode_matrix(b)?,
                    None => CMatrix::identity(d()?, d()?),
                };
                zoo::completely_decohering(&basis)?
            }
            "isotropic" => {
                let gamma = match require(&self.gamma, "gamma", name)? {
                    GammaJson::Named(GammaName::Transpose) => SpectrumPreserving::Transpose,
                    GammaJson::Named(GammaName::Identity) => SpectrumPreserving::Unitary(CMatrix::identity(d()?, d()?)),
                    GammaJson::Unitary { unitary } => SpectrumPreserving::Unitary(decode_matrix(&unitary)?),
                };
                let dim = match (&gamma, self.d) {
                    (_, Some(d)) => d,
                    (SpectrumPreserving::Unitary(u), None) => u.nrows(),
                    (SpectrumPreserving::Transpose, None) => d()?,
                };
                zoo::isotropic(require(&self.p, "p", name)?, &gamma, dim)?
            }
            "measure_and_prepare" => {
                let prepared = require(&self.prepared, "prepared", name)?
                    .iter()
                    .map(|m| Ok(DensityMatrix::new(decode_matrix(m)?)?))
                    .collect::<CliResult<Vec<_>>>()?;
                let basis = match &self.basis {
                    Some(b) => decode_matrix(b)?,
                    None => CMatrix::identity(prepared.len(), prepared.len()),
                };
                zoo::measure_and_prepare(&basis, &prepared)?
            }
            other => return Err(CliError::Usage(format!("unknown zoo channel '{other}'"))),
        })
    }
}

pub fn parse_channel(text: &str, source_name: &str) -> CliResult<KrausChannel> {
    let doc: Value = parse_json(text, source_name)?;
    if doc.get("zoo").is_some() {
        let z: ZooFile = parse_json(text, source_name)?;
        return z.build();
    }
    let f: KrausFile = parse_json(text, source_name)?;
    let kraus = f.kraus.iter().map(decode_matrix).collect::<CliResult<Vec<_>>>()?;
    let ch = KrausChannel::new(kraus)?;
    if ch.dim_in() != f.dim_in || ch.dim_out() != f.dim_out {
        return Err(CliError::Usage(format!(
            "{source_name}: declared {}->{} but Kraus operators are {}->{}",
            f.dim_in,
            f.dim_out,
            ch.dim_in(),
            ch.dim_out()
        )));
    }
    Ok(ch)
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct OptimizerJson {
    pub restarts: usize,
    pub seed: u64,
    pub max_iters: usize,
    pub ftol: f64,
    pub measurement_class: String,
}

impl From<&OptimizerConfig> for OptimizerJson {
    fn from(c: &OptimizerConfig) -> Self {
        Self { restarts: c.restarts, seed: c.seed, max_iters: c.max_iters, ftol: c.ftol, measurement_class: c.measurement_class.as_str().into() }
    }
}

impl TryFrom<&OptimizerJson> for OptimizerConfig {
    type Error = CliError;

    fn try_from(j: &OptimizerJson) -> CliResult<Self> {
        if j.measurement_class != MeasurementClass::Projective.as_str() {
            return Err(CliError::Usage(format!("unsupported measurement class '{}'", j.measurement_class)));
        }
        Ok(OptimizerConfig { restarts: j.restarts, seed: j.seed, max_iters: j.max_iters, ftol: j.ftol, measurement_class: MeasurementClass::Projective })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn byte_offsets_from_line_and_column() {
        let text = "{\n  \"a\": 1,\n  oops\n}";
        let err = parse_json::<Value>(text, "t").unwrap_err();
        match err {
            CliError::Parse { offset, .. } => assert_eq!(&text[offset..offset + 4], "oops"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn state_round_trip() {
        let s = BipartiteState::werner(0.3).unwrap();
        let text = serde_json::to_string(&StateFile::from_state(&s)).unwrap();
        assert_eq!(parse_state(&text, "t").unwrap(), s);
    }

    #[test]
    fn pure_state_document() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let text = format!(r#"{{"dim": 4, "dim_a": 2, "dim_b": 2, "amplitudes": [[{h},0],[0,0],[0,0],[{h},0]]}}"#);
        let s = parse_state(&text, "t").unwrap();
        assert!(qcorr_core::linalg::max_abs(&(s.matrix() - BipartiteState::bell().matrix())) < 1e-15);
    }

    #[test]
    fn channel_documents() {
        let dep = parse_channel(r#"{"zoo": "depolarizing", "p": 0.5, "d": 2}"#, "t").unwrap();
        assert_eq!(dep.dim_in(), 2);
        let iso = parse_channel(r#"{"zoo": "isotropic", "p": 0.5, "gamma": {"unitary": [[[1,0],[0,0]],[[0,0],[1,0]]]}, "d": 2}"#, "t").unwrap();
        assert!(iso.is_unital(1e-12));
        let err = parse_channel(r#"{"zoo": "isotropic", "p": 0.9, "gamma": "transpose", "d": 2}"#, "t").unwrap_err();
        assert!(matches!(err, CliError::Domain(qcorr_core::Error::NotCompletelyPositive { .. })));
        let k = KrausFile::from_channel(&dep);
        let back = parse_channel(&serde_json::to_string(&k).unwrap(), "t").unwrap();
        assert!(qcorr_core::linalg::max_abs(&(back.superoperator_matrix() - dep.superoperator_matrix())) < 1e-15);
    }

    #[test]
    fn optimizer_round_trip() {
        let c = OptimizerConfig::default().with_seed(9);
        let j = OptimizerJson::from(&c);
        assert_eq!(OptimizerConfig::try_from(&j).unwrap(), c);
        assert_eq!(serde_json::to_string(&j).unwrap(), r#"{"restarts":32,"seed":9,"max_iters":500,"ftol":1e-10,"measurement_class":"projective"}"#);
    }
}
