//! Scenario files: a preparation, target observables, an apparatus and the
//! values assigned to its outcomes, stored as JSON.
//!
//! Complex numbers are `[re, im]` pairs (a bare number is read as real),
//! matrices are row-major nested arrays.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::instrument::{IndirectModel, Instrument, KrausSet, ValueAssignment};
use crate::operator::{check_dim, ComplexMatrix, ComplexVector, Density, Hermitian, C64};

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(untagged)]
enum RawComplex {
    Pair([f64; 2]),
    Real(f64),
}

impl RawComplex {
    fn value(self) -> C64 {
        match self {
            RawComplex::Pair([re, im]) => C64::new(re, im),
            RawComplex::Real(re) => C64::new(re, 0.0),
        }
    }
}

type RawMatrix = Vec<Vec<RawComplex>>;
type RawVector = Vec<RawComplex>;

#[derive(Debug, Clone, Serialize, Deserialize)]
struct RawOutcome {
    label: String,
    kraus: Vec<RawMatrix>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
enum RawApparatus {
    Kraus {
        outcomes: Vec<RawOutcome>,
    },
    Indirect {
        unitary: RawMatrix,
        detector_state: RawMatrix,
        readout_basis: Vec<RawVector>,
        labels: Vec<String>,
    },
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Meta {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScenario {
    dimension: usize,
    state: RawMatrix,
    #[serde(rename = "observable_A")]
    observable_a: RawMatrix,
    #[serde(rename = "observable_B", default, skip_serializing_if = "Option::is_none")]
    observable_b: Option<RawMatrix>,
    apparatus: RawApparatus,
    values_m: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    values_m2: Option<BTreeMap<String, f64>>,
    #[serde(rename = "values_mB", default, skip_serializing_if = "Option::is_none")]
    values_mb: Option<BTreeMap<String, f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    meta: Option<Meta>,
}

fn matrix_from_raw(raw: &RawMatrix, what: &str) -> Result<ComplexMatrix> {
    let rows = raw.len();
    let cols = raw.first().map_or(0, Vec::len);
    if rows == 0 || raw.iter().any(|r| r.len() != cols) {
        return Err(Error::Parse(format!(
            "{what}: rows must be non-empty and of equal length"
        )));
    }
    Ok(ComplexMatrix::from_fn(rows, cols, |i, j| raw[i][j].value()))
}

fn matrix_to_raw(m: &ComplexMatrix) -> RawMatrix {
    (0..m.nrows())
        .map(|i| {
            (0..m.ncols())
                .map(|j| RawComplex::Pair([m[(i, j)].re, m[(i, j)].im]))
                .collect()
        })
        .collect()
}

fn values_to_raw(v: &ValueAssignment) -> BTreeMap<String, f64> {
    v.entries().iter().cloned().collect()
}

#[derive(Debug, Clone)]
pub enum Apparatus {
    Kraus,
    Indirect(IndirectModel),
}

/// A validated scenario. `values_m2` defaults to `m_k^2`.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub meta: Meta,
    pub state: Density,
    pub observable_a: Hermitian,
    pub observable_b: Option<Hermitian>,
    pub apparatus: Apparatus,
    pub instrument: Instrument,
    pub values_m: ValueAssignment,
    pub values_m2: ValueAssignment,
    pub values_mb: Option<ValueAssignment>,
}

fn check_labels(inst: &Instrument, values: &ValueAssignment) -> Result<()> {
    for (label, _) in values.entries() {
        inst.index_of(label)?;
    }
    values.ordered(inst).map(|_| ())
}

impl Scenario {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        meta: Meta,
        state: Density,
        observable_a: Hermitian,
        observable_b: Option<Hermitian>,
        apparatus: Apparatus,
        instrument: Instrument,
        values_m: ValueAssignment,
        values_m2: Option<ValueAssignment>,
        values_mb: Option<ValueAssignment>,
    ) -> Result<Self> {
        let d = instrument.dim();
        check_dim("state", d, state.dim())?;
        check_dim("observable A", d, observable_a.dim())?;
        if let Some(b) = &observable_b {
            check_dim("observable B", d, b.dim())?;
        }
        check_labels(&instrument, &values_m)?;
        let values_m2 = values_m2.unwrap_or_else(|| values_m.squared());
        check_labels(&instrument, &values_m2)?;
        if let Some(mb) = &values_mb {
            check_labels(&instrument, mb)?;
        }
        Ok(Self {
            meta,
            state,
            observable_a,
            observable_b,
            apparatus,
            instrument,
            values_m,
            values_m2,
            values_mb,
        })
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let raw: RawScenario = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        Self::from_raw(raw)
    }

    fn from_raw(raw: RawScenario) -> Result<Self> {
        let d = raw.dimension;
        if d == 0 {
            return Err(Error::Parse("dimension must be at least 1".into()));
        }
        let state = Density::from_matrix(matrix_from_raw(&raw.state, "state")?)?;
        check_dim("state", d, state.dim())?;
        let observable_a = Hermitian::new(matrix_from_raw(&raw.observable_a, "observable_A")?)?;
        let observable_b = raw
            .observable_b
            .as_ref()
            .map(|m| matrix_from_raw(m, "observable_B").and_then(Hermitian::new))
            .transpose()?;
        let (apparatus, instrument) = match raw.apparatus {
            RawApparatus::Kraus { outcomes } => {
                let sets = outcomes
                    .iter()
                    .map(|o| {
                        let ops = o
                            .kraus
                            .iter()
                            .map(|k| matrix_from_raw(k, "Kraus operator"))
                            .collect::<Result<Vec<_>>>()?;
                        Ok(KrausSet::new(o.label.clone(), ops))
                    })
                    .collect::<Result<Vec<_>>>()?;
                (Apparatus::Kraus, Instrument::from_kraus(sets)?)
            }
            RawApparatus::Indirect {
                unitary,
                detector_state,
                readout_basis,
                labels,
            } => {
                if labels.len() != readout_basis.len() {
                    return Err(Error::Parse(format!(
                        "{} readout vectors but {} labels",
                        readout_basis.len(),
                        labels.len()
                    )));
                }
                let u = matrix_from_raw(&unitary, "unitary")?;
                let rho_d = Density::from_matrix(matrix_from_raw(&detector_state, "detector_state")?)?;
                let readout = labels
                    .into_iter()
                    .zip(&readout_basis)
                    .map(|(l, v)| (l, ComplexVector::from_iterator(v.len(), v.iter().map(|c| c.value()))))
                    .collect();
                let model = IndirectModel::new(d, rho_d, u, readout)?;
                let inst = Instrument::from_indirect(&model)?;
                (Apparatus::Indirect(model), inst)
            }
        };
        check_dim("apparatus", d, instrument.dim())?;
        let values = |m: BTreeMap<String, f64>| ValueAssignment::new(m);
        Self::new(
            raw.meta.unwrap_or_default(),
            state,
            observable_a,
            observable_b,
            apparatus,
            instrument,
            values(raw.values_m)?,
            raw.values_m2.map(values).transpose()?,
            raw.values_mb.map(values).transpose()?,
        )
    }

    fn to_raw(&self) -> RawScenario {
        let apparatus = match &self.apparatus {
            Apparatus::Kraus => RawApparatus::Kraus {
                outcomes: self
                    .instrument
                    .outcomes()
                    .iter()
                    .map(|s| RawOutcome {
                        label: s.label.clone(),
                        kraus: s.operators.iter().map(matrix_to_raw).collect(),
                    })
                    .collect(),
            },
            Apparatus::Indirect(model) => RawApparatus::Indirect {
                unitary: matrix_to_raw(model.unitary()),
                detector_state: matrix_to_raw(model.detector_state().matrix()),
                readout_basis: model
                    .readout()
                    .iter()
                    .map(|(_, v)| v.iter().map(|c| RawComplex::Pair([c.re, c.im])).collect())
                    .collect(),
                labels: model.labels().map(str::to_string).collect(),
            },
        };
        let meta = (self.meta != Meta::default()).then(|| self.meta.clone());
        RawScenario {
            dimension: self.dim(),
            state: matrix_to_raw(self.state.matrix()),
            observable_a: matrix_to_raw(self.observable_a.matrix()),
            observable_b: self.observable_b.as_ref().map(|b| matrix_to_raw(b.matrix())),
            apparatus,
            values_m: values_to_raw(&self.values_m),
            values_m2: Some(values_to_raw(&self.values_m2)),
            values_mb: self.values_mb.as_ref().map(values_to_raw),
            meta,
        }
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&self.to_raw()).expect("scenario serializes")
    }

    /// First 16 hex digits of the SHA-256 of the compact JSON form.
    pub fn digest(&self) -> String {
        let compact = serde_json::to_vec(&self.to_raw()).expect("scenario serializes");
        Sha256::digest(&compact)[..8]
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect()
    }

    pub fn dim(&self) -> usize {
        self.instrument.dim()
    }

    pub fn model(&self) -> Option<&IndirectModel> {
        match &self.apparatus {
            Apparatus::Indirect(m) => Some(m),
            Apparatus::Kraus => None,
        }
    }

    pub fn name(&self) -> &str {
        self.meta.name.as_deref().unwrap_or("unnamed")
    }
}

pub fn load_scenario(path: impl AsRef<Path>) -> Result<Scenario> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    Scenario::from_json_str(&text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models;
    use crate::operator::pauli;

    const THETA_POM: &str = r#"{
        "dimension": 2,
        "state": [[[1,0],[0,0]],[[0,0],[0,0]]],
        "observable_A": [[1, 0], [0, -1]],
        "observable_B": [[[0,0],[1,0]],[[1,0],[0,0]]],
        "apparatus": {"type": "kraus", "outcomes": [
            {"label": "+", "kraus": [[[0.8660254037844386, 0], [0, 0.5]]]},
            {"label": "-", "kraus": [[[0.5, 0], [0, 0.8660254037844386]]]}
        ]},
        "values_m": {"+": 2.0, "-": -2.0},
        "meta": {"name": "theta"}
    }"#;

    #[test]
    fn parses_and_round_trips() {
        let s = Scenario::from_json_str(THETA_POM).unwrap();
        assert_eq!(s.dim(), 2);
        assert_eq!(s.name(), "theta");
        assert_eq!(s.values_m2.get("+"), Some(4.0));
        let again = Scenario::from_json_str(&s.to_json_string()).unwrap();
        assert_eq!(again.digest(), s.digest());
        assert_eq!(s.digest().len(), 16);
    }

    #[test]
    fn validation_errors() {
        let bad_trace = THETA_POM.replace("[[[1,0],[0,0]],[[0,0],[0,0]]]", "[[[0.7,0],[0,0]],[[0,0],[0,0]]]");
        assert!(matches!(
            Scenario::from_json_str(&bad_trace),
            Err(Error::TraceNotOne { .. })
        ));
        let incomplete = THETA_POM.replace("0.8660254037844386, 0], [0, 0.5]", "0.8, 0], [0, 0.5]");
        assert!(matches!(
            Scenario::from_json_str(&incomplete),
            Err(Error::CompletenessViolation { .. })
        ));
        let missing = THETA_POM.replace(r#", "-": -2.0"#, "");
        assert!(matches!(Scenario::from_json_str(&missing), Err(Error::MissingLabel(_))));
        let unknown = THETA_POM.replace(r#""-": -2.0"#, r#""-": -2.0, "x": 1"#);
        assert!(matches!(Scenario::from_json_str(&unknown), Err(Error::UnknownLabel(_))));
        assert!(matches!(Scenario::from_json_str("{"), Err(Error::Parse(_))));
        let wrong_dim = THETA_POM.replace(r#""dimension": 2"#, r#""dimension": 3"#);
        assert!(matches!(
            Scenario::from_json_str(&wrong_dim),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn indirect_round_trip() {
        let model = models::cnot_model().unwrap();
        let inst = Instrument::from_indirect(&model).unwrap();
        let m = ValueAssignment::new([("0", 1.0), ("1", -1.0)]).unwrap();
        let s = Scenario::new(
            Meta::default(),
            Density::maximally_mixed(2),
            pauli::z(),
            Some(pauli::x()),
            Apparatus::Indirect(model),
            inst,
            m,
            None,
            None,
        )
        .unwrap();
        let again = Scenario::from_json_str(&s.to_json_string()).unwrap();
        assert!(again.model().is_some());
        assert_eq!(again.digest(), s.digest());
    }
}
