//! JSON file formats. Every number that can be fractional travels as a
//! string (`"3"`, `"-7/2"`); integers are also accepted on input, floats never.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::cells::{SubproblemSpec, TrainStats};
use crate::error::{Error, Result};
use crate::model::{Dataset, Label, LabeledPoint, LossValue, Neuron, OutputSign, ReluNetwork};
use crate::rational::Rational;
use crate::reduction::{ColoredGraph, ReductionOutput, Vertex};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PointWire {
    pub x: Vec<Rational>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub y: Option<Rational>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub interval: Option<[Rational; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mult: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatasetWire {
    pub dim: usize,
    pub points: Vec<PointWire>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NeuronWire {
    pub w: Vec<Rational>,
    pub b: Rational,
    pub a: i32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelWire {
    pub k: usize,
    pub neurons: Vec<NeuronWire>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VertexWire {
    pub id: String,
    pub color: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphWire {
    pub colors: usize,
    pub vertices: Vec<VertexWire>,
    pub edges: Vec<(String, String)>,
}

/// Loss field of a result file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum LossWire {
    Exact(Rational),
    Approx { approx: String, exact: bool },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultWire {
    pub loss: LossWire,
    pub model: ModelWire,
    pub certificate: serde_json::Value,
    pub stats: TrainStats,
}

/// Side file written next to a generated reduction instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CliqueMetadata {
    pub gamma: Rational,
    pub delta: Rational,
    #[serde(rename = "M")]
    pub m_copies: u64,
    pub p: Rational,
    pub colors: usize,
    pub decode_map: Vec<String>,
}

impl From<&Dataset> for DatasetWire {
    fn from(data: &Dataset) -> Self {
        let points = data
            .points()
            .iter()
            .map(|p| {
                let (y, interval) = match &p.label {
                    Label::Scalar(y) => (Some(y.clone()), None),
                    Label::Interval { alpha, beta } => (None, Some([alpha.clone(), beta.clone()])),
                };
                PointWire { x: p.x.clone(), y, interval, mult: (p.multiplicity != 1).then_some(p.multiplicity) }
            })
            .collect();
        DatasetWire { dim: data.dim(), points }
    }
}

impl TryFrom<DatasetWire> for Dataset {
    type Error = Error;

    fn try_from(w: DatasetWire) -> Result<Dataset> {
        let mut points = Vec::with_capacity(w.points.len());
        for (i, p) in w.points.into_iter().enumerate() {
            let label = match (p.y, p.interval) {
                (Some(y), None) => Label::Scalar(y),
                (None, Some([a, b])) => Label::interval(a, b)?,
                _ => return Err(Error::InvalidInput(format!("point {i} needs exactly one of \"y\" and \"interval\""))),
            };
            let mult = p.mult.unwrap_or(1);
            if mult == 0 {
                return Err(Error::InvalidInput(format!("point {i} has multiplicity 0")));
            }
            points.push(LabeledPoint { x: p.x, label, multiplicity: mult });
        }
        Dataset::new(w.dim, points)
    }
}

impl From<&ReluNetwork> for ModelWire {
    fn from(net: &ReluNetwork) -> Self {
        let neurons = net
            .neurons()
            .iter()
            .map(|n| NeuronWire { w: n.w.clone(), b: n.b.clone(), a: n.a.as_i32() })
            .collect();
        ModelWire { k: net.k(), neurons }
    }
}

impl TryFrom<ModelWire> for ReluNetwork {
    type Error = Error;

    fn try_from(m: ModelWire) -> Result<ReluNetwork> {
        if m.k != m.neurons.len() {
            return Err(Error::InvalidInput(format!("k = {} but {} neurons given", m.k, m.neurons.len())));
        }
        let neurons = m
            .neurons
            .into_iter()
            .map(|n| {
                let a = OutputSign::from_i32(n.a)
                    .ok_or_else(|| Error::InvalidInput(format!("output sign must be 1 or -1, got {}", n.a)))?;
                Ok(Neuron { w: n.w, b: n.b, a })
            })
            .collect::<Result<Vec<_>>>()?;
        ReluNetwork::new(neurons)
    }
}

impl From<&ColoredGraph> for GraphWire {
    fn from(g: &ColoredGraph) -> Self {
        GraphWire {
            colors: g.colors(),
            vertices: g.vertices().iter().map(|v| VertexWire { id: v.id.clone(), color: v.color }).collect(),
            edges: g.edges().to_vec(),
        }
    }
}

impl TryFrom<GraphWire> for ColoredGraph {
    type Error = Error;

    fn try_from(g: GraphWire) -> Result<ColoredGraph> {
        let vertices = g.vertices.into_iter().map(|v| Vertex { id: v.id, color: v.color }).collect();
        ColoredGraph::new(g.colors, vertices, g.edges)
    }
}

impl From<&LossValue> for LossWire {
    fn from(v: &LossValue) -> Self {
        match v.exact_value() {
            Some(e) => LossWire::Exact(e.clone()),
            None => LossWire::Approx { approx: v.decimal(18), exact: false },
        }
    }
}

impl From<&ReductionOutput> for CliqueMetadata {
    fn from(out: &ReductionOutput) -> Self {
        CliqueMetadata {
            gamma: out.gamma.clone(),
            delta: out.delta.clone(),
            m_copies: out.m_copies,
            p: out.p.clone(),
            colors: out.dataset.dim() / 2,
            decode_map: out.decode_map.clone(),
        }
    }
}

impl CliqueMetadata {
    /// Reassembles the reduction record from the instance and this side file.
    pub fn into_output(self, dataset: Dataset) -> ReductionOutput {
        ReductionOutput {
            dataset,
            gamma: self.gamma,
            delta: self.delta,
            m_copies: self.m_copies,
            p: self.p,
            decode_map: self.decode_map,
        }
    }
}

/// Certificate of a cell-based trainer: per neuron, the active indices of the
/// distinct (preprocessed) inputs and the output sign.
pub fn certificate_json(spec: &SubproblemSpec) -> serde_json::Value {
    let neurons: Vec<serde_json::Value> = spec
        .neurons
        .iter()
        .map(|n| serde_json::json!({ "active": n.dichotomy.plus(), "a": n.sign.as_i32() }))
        .collect();
    serde_json::json!({ "neurons": neurons })
}

fn to_pretty<T: Serialize>(v: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(v)?;
    s.push('\n');
    Ok(s)
}

pub fn dataset_to_json(data: &Dataset) -> Result<String> {
    to_pretty(&DatasetWire::from(data))
}

pub fn dataset_from_json(s: &str) -> Result<Dataset> {
    serde_json::from_str::<DatasetWire>(s)?.try_into()
}

pub fn model_to_json(net: &ReluNetwork) -> Result<String> {
    to_pretty(&ModelWire::from(net))
}

pub fn model_from_json(s: &str) -> Result<ReluNetwork> {
    serde_json::from_str::<ModelWire>(s)?.try_into()
}

pub fn graph_to_json(g: &ColoredGraph) -> Result<String> {
    to_pretty(&GraphWire::from(g))
}

pub fn graph_from_json(s: &str) -> Result<ColoredGraph> {
    serde_json::from_str::<GraphWire>(s)?.try_into()
}

pub fn result_to_json(r: &ResultWire) -> Result<String> {
    to_pretty(r)
}

pub fn result_from_json(s: &str) -> Result<ResultWire> {
    Ok(serde_json::from_str(s)?)
}

pub fn metadata_to_json(m: &CliqueMetadata) -> Result<String> {
    to_pretty(m)
}

pub fn metadata_from_json(s: &str) -> Result<CliqueMetadata> {
    Ok(serde_json::from_str(s)?)
}

pub fn read_file(path: &Path) -> Result<String> {
    Ok(std::fs::read_to_string(path)?)
}

pub fn write_file(path: &Path, contents: &str) -> Result<()> {
    Ok(std::fs::write(path, contents)?)
}
