//! JSON state and channel files.
//!
//! Mixed states: `{"dim": n, "factor_dims": [..], "matrix": [[[re, im], ...], ...]}`
//! (row-major). Pure states replace `matrix` with `"vector": [[re, im], ...]`.
//! Channels add `"kraus": [matrix, ...]` and `"class": "gio"` (or any other
//! [`ChannelClass`] name).

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::channel::{ChannelClass, KrausChannel};
use crate::error::{Error, Result};
use crate::linalg::{c, CMatrix, CVector};
use crate::state::{DensityOperator, PureState};

type RawMatrix = Vec<Vec<[f64; 2]>>;

#[derive(Debug, Deserialize)]
struct RawState {
    dim: Option<usize>,
    factor_dims: Option<Vec<usize>>,
    matrix: Option<RawMatrix>,
    vector: Option<Vec<[f64; 2]>>,
}

#[derive(Debug, Deserialize)]
struct RawChannel {
    dim: Option<usize>,
    kraus: Vec<RawMatrix>,
    #[serde(default = "general_class")]
    class: ChannelClass,
}

fn general_class() -> ChannelClass {
    ChannelClass::General
}

/// Either kind of state a file may hold.
#[derive(Debug, Clone)]
pub enum LoadedState {
    Mixed(DensityOperator),
    Pure(PureState),
}

impl LoadedState {
    pub fn into_density(self) -> DensityOperator {
        match self {
            LoadedState::Mixed(rho) => rho,
            LoadedState::Pure(psi) => psi.to_density(),
        }
    }
}

fn format_err(path: impl Into<String>, message: impl std::fmt::Display) -> Error {
    Error::Format { path: path.into(), message: message.to_string() }
}

fn decode<T: for<'de> Deserialize<'de>>(text: &str) -> Result<T> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        format_err(if path.is_empty() { ".".into() } else { path }, e.into_inner())
    })
}

fn matrix_from_raw(raw: &RawMatrix, field: &str) -> Result<CMatrix> {
    let rows = raw.len();
    if rows == 0 {
        return Err(format_err(field, "matrix is empty"));
    }
    let cols = raw[0].len();
    for (i, row) in raw.iter().enumerate() {
        if row.len() != cols {
            return Err(format_err(
                format!("{field}[{i}]"),
                format!("row has {} entries, expected {cols}", row.len()),
            ));
        }
    }
    Ok(CMatrix::from_fn(rows, cols, |i, j| c(raw[i][j][0], raw[i][j][1])))
}

fn matrix_to_raw(m: &CMatrix) -> RawMatrix {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
        .collect()
}

fn check_dim(declared: Option<usize>, actual: usize) -> Result<()> {
    match declared {
        Some(d) if d != actual => Err(format_err("dim", format!("declared {d}, data has {actual}"))),
        _ => Ok(()),
    }
}

/// Parses a state file. Validation failures name the offending field.
pub fn parse_state(text: &str) -> Result<LoadedState> {
    let raw: RawState = decode(text)?;
    let relabel = |field: &'static str| move |e: Error| match e {
        Error::Format { .. } => e,
        Error::Structure(m) => format_err("factor_dims", m),
        other => format_err(field, other),
    };
    match (raw.matrix, raw.vector) {
        (Some(m), None) => {
            let matrix = matrix_from_raw(&m, "matrix")?;
            if !matrix.is_square() {
                return Err(format_err("matrix", "matrix is not square"));
            }
            check_dim(raw.dim, matrix.nrows())?;
            DensityOperator::new(matrix, raw.factor_dims)
                .map(LoadedState::Mixed)
                .map_err(relabel("matrix"))
        }
        (None, Some(v)) => {
            check_dim(raw.dim, v.len())?;
            let vector = CVector::from_iterator(v.len(), v.iter().map(|z| c(z[0], z[1])));
            PureState::new(vector, raw.factor_dims).map(LoadedState::Pure).map_err(relabel("vector"))
        }
        (Some(_), Some(_)) => Err(format_err(".", "state has both `matrix` and `vector`")),
        (None, None) => Err(format_err(".", "state needs a `matrix` or a `vector`")),
    }
}

pub fn read_state(path: &std::path::Path) -> Result<LoadedState> {
    parse_state(&std::fs::read_to_string(path)?)
}

pub fn density_to_json(rho: &DensityOperator) -> Value {
    let mut v = json!({ "dim": rho.dim(), "matrix": matrix_to_raw(rho.matrix()) });
    if let Some(f) = rho.factor_dims() {
        v["factor_dims"] = json!(f);
    }
    v
}

pub fn pure_to_json(psi: &PureState) -> Value {
    json!({
        "dim": psi.dim(),
        "factor_dims": psi.factor_dims(),
        "vector": psi.vector().iter().map(|z| [z.re, z.im]).collect::<Vec<_>>(),
    })
}

pub fn parse_channel(text: &str) -> Result<KrausChannel> {
    let raw: RawChannel = decode(text)?;
    let mut ops = Vec::with_capacity(raw.kraus.len());
    for (i, m) in raw.kraus.iter().enumerate() {
        ops.push(matrix_from_raw(m, &format!("kraus[{i}]"))?);
    }
    if let Some(first) = ops.first() {
        check_dim(raw.dim, first.ncols())?;
    }
    KrausChannel::new(ops, raw.class).map_err(|e| format_err("kraus", e))
}

#[derive(Serialize)]
struct ChannelOut<'a> {
    dim: usize,
    kraus: Vec<RawMatrix>,
    class: &'a ChannelClass,
}

pub fn channel_to_json(ch: &KrausChannel) -> Value {
    let class = ch.class();
    serde_json::to_value(ChannelOut {
        dim: ch.input_dim(),
        kraus: ch.operators().iter().map(matrix_to_raw).collect(),
        class: &class,
    })
    .expect("channel serialises")
}
