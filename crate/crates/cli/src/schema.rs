//! On-disk JSON formats for parameters, transcripts and attack reports.
//!
//! Matrices are row-major nested arrays. Over `Z_p[G]` each entry is the
//! length-`m` coefficient array in the group enumeration recorded in the
//! params file; over the plain field each entry is a scalar. Coefficients
//! are JSON numbers when `p < 2^53` and decimal strings otherwise.

use std::sync::Arc;

use make_core::{
    EmbeddingContext, FiniteGroupTable, GroupRing, GroupRingMatrix, GroupRingParams, GroupSpec, Matrix, Permutation,
    PrimeField, PublicParams,
};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

pub const SCHEMA_VERSION: u32 = 1;

/// Largest integer a JSON reader using doubles represents exactly.
const SAFE_INTEGER: u64 = 1 << 53;

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Coeff {
    Number(u64),
    Text(String),
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Entry {
    Scalar(Coeff),
    Element(Vec<Coeff>),
}

pub type MatrixJson = Vec<Vec<Entry>>;

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generators: Option<Vec<Vec<usize>>>,
    pub order: usize,
    /// Permutation images of the group elements, in coefficient order.
    pub elements: Vec<Vec<usize>>,
    pub table_hash: String,
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsFile {
    pub schema_version: u32,
    pub p: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub group: Option<GroupJson>,
    pub n: usize,
    #[serde(rename = "M")]
    pub m: MatrixJson,
    #[serde(rename = "H1")]
    pub h1: MatrixJson,
    #[serde(rename = "H2")]
    pub h2: MatrixJson,
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsRef {
    pub path: String,
    pub sha256: String,
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TranscriptFile {
    pub params_ref: ParamsRef,
    #[serde(rename = "A")]
    pub a: MatrixJson,
    #[serde(rename = "B")]
    pub b: MatrixJson,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub y: Option<String>,
    #[serde(rename = "K", default, skip_serializing_if = "Option::is_none")]
    pub k: Option<MatrixJson>,
}

/// Stage timings in seconds.
#[derive(Clone, Copy, PartialEq, Debug, Default, Serialize, Deserialize)]
pub struct TimingsJson {
    pub telescope: f64,
    pub build_l: f64,
    pub solve: f64,
    pub recover: f64,
    pub total: f64,
}

impl From<make_core::StageTimings> for TimingsJson {
    fn from(t: make_core::StageTimings) -> Self {
        TimingsJson {
            telescope: t.telescope.as_secs_f64(),
            build_l: t.build_l.as_secs_f64(),
            solve: t.solve.as_secs_f64(),
            recover: t.recover.as_secs_f64(),
            total: t.total().as_secs_f64(),
        }
    }
}

#[derive(Clone, PartialEq, Debug, Serialize, Deserialize)]
pub struct ReportFile {
    /// False when the pipeline failed, the key mismatched the demo key, or
    /// the two role-swapped recoveries disagree.
    pub success: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t: Option<Vec<Coeff>>,
    #[serde(rename = "recovered_K", default, skip_serializing_if = "Option::is_none")]
    pub recovered_k: Option<MatrixJson>,
    #[serde(rename = "match", default, skip_serializing_if = "Option::is_none")]
    pub matches: Option<bool>,
    /// Recovery from Bob's side agrees with recovery from Alice's side.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub consistent: Option<bool>,
    pub timings: TimingsJson,
    pub system_size: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

/// A structural problem in a decoded file; `location` is a JSON path.
#[derive(Debug, thiserror::Error)]
#[error("{location}: {message}")]
pub struct SchemaError {
    pub location: String,
    pub message: String,
}

fn schema_err(location: impl Into<String>, message: impl Into<String>) -> SchemaError {
    SchemaError {
        location: location.into(),
        message: message.into(),
    }
}

/// SHA-256 over the order and the table entries, each as `u32` little-endian,
/// row-major.
pub fn table_hash(table: &FiniteGroupTable) -> String {
    let mut h = Sha256::new();
    h.update((table.order() as u32).to_le_bytes());
    for i in 0..table.order() {
        for &v in table.row(i) {
            h.update(v.to_le_bytes());
        }
    }
    hex::encode(h.finalize())
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Encodes and decodes matrices over one ring.
#[derive(Clone, Debug)]
pub struct Codec {
    ring: GroupRing,
    /// Plain field entries; the ring is then the trivial group ring.
    scalar: bool,
}

impl Codec {
    pub fn new(ring: GroupRing, scalar: bool) -> Self {
        Codec { ring, scalar }
    }

    fn p(&self) -> u64 {
        self.ring.field().p()
    }

    pub fn encode_coeff(&self, v: u64) -> Coeff {
        if self.p() < SAFE_INTEGER {
            Coeff::Number(v)
        } else {
            Coeff::Text(v.to_string())
        }
    }

    pub fn decode_coeff(&self, c: &Coeff, at: &str) -> Result<u64, SchemaError> {
        let v = match c {
            Coeff::Number(v) => *v,
            Coeff::Text(s) => s
                .parse()
                .map_err(|_| schema_err(at, format!("{s:?} is not a decimal integer")))?,
        };
        if v >= self.p() {
            return Err(schema_err(at, format!("{v} is not reduced mod {}", self.p())));
        }
        Ok(v)
    }

    pub fn encode_matrix(&self, a: &GroupRingMatrix) -> MatrixJson {
        (0..a.rows())
            .map(|i| {
                a.row(i)
                    .iter()
                    .map(|e| {
                        if self.scalar {
                            Entry::Scalar(self.encode_coeff(e[0]))
                        } else {
                            Entry::Element(e.iter().map(|&c| self.encode_coeff(c)).collect())
                        }
                    })
                    .collect()
            })
            .collect()
    }

    pub fn decode_matrix(&self, rows: &MatrixJson, n: usize, name: &str) -> Result<GroupRingMatrix, SchemaError> {
        if rows.len() != n {
            return Err(schema_err(name, format!("expected {n} rows, found {}", rows.len())));
        }
        let m = self.ring.order();
        let mut data = Vec::with_capacity(n * n);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(schema_err(
                    format!("{name}[{i}]"),
                    format!("expected {n} entries, found {}", row.len()),
                ));
            }
            for (j, entry) in row.iter().enumerate() {
                let at = format!("{name}[{i}][{j}]");
                let coeffs = match (entry, self.scalar) {
                    (Entry::Scalar(c), true) => vec![self.decode_coeff(c, &at)?],
                    (Entry::Element(cs), false) => {
                        if cs.len() != m {
                            return Err(schema_err(at, format!("expected {m} coefficients, found {}", cs.len())));
                        }
                        cs.iter()
                            .enumerate()
                            .map(|(c, v)| self.decode_coeff(v, &format!("{at}[{c}]")))
                            .collect::<Result<_, _>>()?
                    }
                    (_, true) => return Err(schema_err(at, "expected a scalar")),
                    (_, false) => return Err(schema_err(at, "expected a coefficient array")),
                };
                data.push(coeffs);
            }
        }
        Matrix::new(self.ring.clone(), n, n, data).map_err(|e| schema_err(name, e.to_string()))
    }

    pub fn encode_vector(&self, v: &[u64]) -> Vec<Coeff> {
        v.iter().map(|&c| self.encode_coeff(c)).collect()
    }
}

/// Parameters decoded into the core types.
#[derive(Clone, Debug)]
pub struct LoadedParams {
    pub ctx: EmbeddingContext,
    pub params: GroupRingParams,
    pub codec: Codec,
}

fn group_json(spec: &GroupSpec) -> Result<(GroupJson, FiniteGroupTable), make_core::Error> {
    let g = spec.build()?;
    let json = GroupJson {
        name: spec.name.clone(),
        generators: match spec.name {
            Some(_) => None,
            None => Some(spec.generators.iter().map(|p| p.images().to_vec()).collect()),
        },
        order: g.table.order(),
        elements: g.elements.iter().map(|p| p.images().to_vec()).collect(),
        table_hash: table_hash(&g.table),
    };
    Ok((json, g.table))
}

/// Builds the ring for `group` (`None` is the plain field) and the codec.
pub fn ring_for(p: u64, group: Option<&GroupSpec>) -> Result<(Codec, Option<GroupJson>), make_core::Error> {
    let field = PrimeField::with_prime(p)?;
    Ok(match group {
        None => (Codec::new(GroupRing::trivial(field), true), None),
        Some(spec) => {
            let (json, table) = group_json(spec)?;
            (Codec::new(GroupRing::new(field, Arc::new(table)), false), Some(json))
        }
    })
}

impl ParamsFile {
    pub fn encode(params: &GroupRingParams, codec: &Codec, group: Option<GroupJson>) -> Self {
        ParamsFile {
            schema_version: SCHEMA_VERSION,
            p: codec.p().to_string(),
            group,
            n: params.n(),
            m: codec.encode_matrix(&params.m),
            h1: codec.encode_matrix(&params.h1),
            h2: codec.encode_matrix(&params.h2),
        }
    }

    pub fn decode(&self) -> Result<LoadedParams, SchemaError> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(schema_err(
                "schema_version",
                format!("unsupported version {}, expected {SCHEMA_VERSION}", self.schema_version),
            ));
        }
        let p: u64 = self
            .p
            .parse()
            .map_err(|_| schema_err("p", format!("{:?} is not a decimal integer", self.p)))?;
        if self.n == 0 {
            return Err(schema_err("n", "matrix size must be positive"));
        }
        let spec = self.group.as_ref().map(decode_group).transpose()?;
        let (codec, json) = ring_for(p, spec.as_ref())
            .map_err(|e| schema_err(if spec.is_some() { "group" } else { "p" }, e.to_string()))?;
        if let (Some(stored), Some(built)) = (&self.group, &json) {
            if stored.order != built.order {
                return Err(schema_err(
                    "group.order",
                    format!("stored {}, generated {}", stored.order, built.order),
                ));
            }
            if stored.elements != built.elements {
                return Err(schema_err(
                    "group.elements",
                    "enumeration differs from the generated group",
                ));
            }
            if stored.table_hash != built.table_hash {
                return Err(schema_err("group.table_hash", "does not match the generated table"));
            }
        }
        let m = codec.decode_matrix(&self.m, self.n, "M")?;
        let h1 = codec.decode_matrix(&self.h1, self.n, "H1")?;
        let h2 = codec.decode_matrix(&self.h2, self.n, "H2")?;
        let params = PublicParams::new(m, h1, h2).map_err(|e| schema_err("M", e.to_string()))?;
        let ctx = EmbeddingContext::for_group_ring(codec.ring.clone(), self.n);
        Ok(LoadedParams { ctx, params, codec })
    }
}

fn decode_group(g: &GroupJson) -> Result<GroupSpec, SchemaError> {
    match (&g.name, &g.generators) {
        (Some(name), None) => {
            GroupSpec::builtin(name).ok_or_else(|| schema_err("group.name", format!("unknown group {name:?}")))
        }
        (None, Some(gens)) => {
            let perms = gens
                .iter()
                .enumerate()
                .map(|(i, g)| {
                    Permutation::new(g.clone()).map_err(|e| schema_err(format!("group.generators[{i}]"), e.to_string()))
                })
                .collect::<Result<Vec<_>, _>>()?;
            GroupSpec::from_generators(perms).map_err(|e| schema_err("group.generators", e.to_string()))
        }
        _ => Err(schema_err("group", "exactly one of name and generators is required")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_hash_of_c2() {
        // order 2 then the table [[0,1],[1,0]], all u32 little-endian
        let table = GroupSpec::builtin("c2").unwrap().build().unwrap().table;
        let mut bytes = Vec::new();
        for v in [2u32, 0, 1, 1, 0] {
            bytes.extend_from_slice(&v.to_le_bytes());
        }
        assert_eq!(table_hash(&table), sha256_hex(&bytes));
    }

    #[test]
    fn params_round_trip() {
        for group in [None, Some("s3"), Some("q8")] {
            let spec = group.map(|g| GroupSpec::builtin(g).unwrap());
            let (_, params) = make_core::gen_params(7, spec.as_ref(), 2, 3).unwrap();
            let (codec, json) = ring_for(7, spec.as_ref()).unwrap();
            let file = ParamsFile::encode(&params, &codec, json);
            let text = serde_json::to_string(&file).unwrap();
            let back: ParamsFile = serde_json::from_str(&text).unwrap();
            assert_eq!(back, file);
            assert_eq!(back.decode().unwrap().params, params);
        }
    }

    #[test]
    fn custom_generators_are_stored_explicitly() {
        let spec = GroupSpec::parse("1,2,0").unwrap();
        let (_, json) = ring_for(5, Some(&spec)).unwrap();
        let json = json.unwrap();
        assert_eq!(json.name, None);
        assert_eq!(json.generators, Some(vec![vec![1, 2, 0]]));
        assert_eq!(json.order, 3);
    }

    #[test]
    fn large_prime_coefficients_are_strings() {
        let p = 18446744073709551557;
        let (codec, _) = ring_for(p, None).unwrap();
        assert_eq!(codec.encode_coeff(p - 1), Coeff::Text((p - 1).to_string()));
        assert_eq!(
            codec.decode_coeff(&Coeff::Text((p - 1).to_string()), "x").unwrap(),
            p - 1
        );
        assert!(codec.decode_coeff(&Coeff::Text(p.to_string()), "x").is_err());
    }

    #[test]
    fn bad_entries_name_their_location() {
        let (codec, _) = ring_for(7, Some(&GroupSpec::builtin("c2").unwrap())).unwrap();
        let rows: MatrixJson = vec![vec![Entry::Element(vec![Coeff::Number(1), Coeff::Number(9)])]];
        let err = codec.decode_matrix(&rows, 1, "H1").unwrap_err();
        assert_eq!(err.location, "H1[0][0][1]");
        let rows: MatrixJson = vec![vec![Entry::Scalar(Coeff::Number(1))]];
        assert_eq!(codec.decode_matrix(&rows, 1, "M").unwrap_err().location, "M[0][0]");
        assert_eq!(codec.decode_matrix(&vec![], 1, "B").unwrap_err().location, "B");
    }

    #[test]
    fn tampered_group_is_rejected() {
        let spec = GroupSpec::builtin("s3").unwrap();
        let (_, params) = make_core::gen_params(7, Some(&spec), 1, 0).unwrap();
        let (codec, json) = ring_for(7, Some(&spec)).unwrap();
        let mut file = ParamsFile::encode(&params, &codec, json);
        file.group.as_mut().unwrap().table_hash = "00".into();
        assert_eq!(file.decode().unwrap_err().location, "group.table_hash");
    }
}
