//! JSON-lines records. Every record carries `schema` and `record` fields;
//! wall time appears only when requested, so records are otherwise
//! byte-for-byte reproducible.

use serde::Serialize;
use sha2::{Digest, Sha256};
use ssexp::calibrate::ConstantsDocument;
use ssexp::local::{LocalSsParams, OneSidedParams};
use ssexp::tester::TwoSidedParams;
use ssexp::{CutReport, Graph, QueryCounts};

pub const RECORD_SCHEMA: &str = "ssexp-record/1";

#[derive(Clone, Debug, Serialize)]
pub struct GraphDigest {
    pub n: usize,
    pub volume: u64,
    /// SHA-256 of the canonical edge-list text.
    pub sha256: String,
    /// Generator description, when the graph came from `generate`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub generator: Option<String>,
}

impl GraphDigest {
    pub fn of(g: &Graph, generator: Option<String>) -> Self {
        let hash = Sha256::digest(g.to_edge_list().as_bytes());
        Self {
            n: g.n(),
            volume: g.volume(),
            sha256: hash.iter().map(|b| format!("{b:02x}")).collect(),
            generator,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
#[serde(untagged)]
pub enum Derived {
    TwoSided(TwoSidedParams),
    OneSided(OneSidedParams),
}

#[derive(Clone, Debug, Serialize)]
pub struct TestParams {
    pub mode: &'static str,
    pub walk: &'static str,
    pub k: u64,
    pub phi: f64,
    pub eps: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub xi: Option<f64>,
    pub constants: ConstantsDocument,
    pub derived: Derived,
}

#[derive(Clone, Debug, Serialize)]
pub struct Envelope<'a, T: Serialize> {
    pub schema: &'static str,
    pub record: &'static str,
    pub command: &'a [String],
    #[serde(flatten)]
    pub body: T,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_time_ms: Option<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct GenerateBody {
    pub seed: u64,
    pub graph: GraphDigest,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct TrialBody<'a, V: Serialize> {
    pub seed: u64,
    pub trial: u64,
    pub trial_seed: u64,
    pub graph: &'a GraphDigest,
    pub params: &'a TestParams,
    pub verdict: V,
}

#[derive(Clone, Debug, Serialize)]
pub struct SummaryBody<'a> {
    pub seed: u64,
    pub graph: &'a GraphDigest,
    pub params: &'a TestParams,
    pub trials: u64,
    pub accepts: u64,
    pub rejects: u64,
    pub accept_rate: f64,
    pub reject_rate: f64,
    pub queries: QueryCounts,
}

#[derive(Clone, Debug, Serialize)]
pub struct ProfileBody {
    pub graph: GraphDigest,
    pub k: u64,
    /// phi(k) as "num/den"; absent when no set has volume in (0, k].
    pub value: Option<String>,
    pub witness: Option<CutReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub message: Option<&'static str>,
}

#[derive(Clone, Debug, Serialize)]
pub struct LocalBody {
    pub graph: GraphDigest,
    pub vertex: usize,
    pub k: u64,
    pub params: LocalSsParams,
    pub best: Option<CutReport>,
    pub best_round: Option<usize>,
    pub rounds_swept: usize,
    pub queries: QueryCounts,
}

#[derive(Clone, Debug, Serialize)]
pub struct CalibrateBody<'a> {
    pub gallery: String,
    pub out: String,
    pub document: &'a ConstantsDocument,
}

/// Serializes one record as a single line.
pub fn line<T: Serialize>(command: &[String], record: &'static str, body: T, wall: Option<f64>) -> String {
    let env = Envelope {
        schema: RECORD_SCHEMA,
        record,
        command,
        body,
        wall_time_ms: wall,
    };
    serde_json::to_string(&env).expect("records serialize")
}
