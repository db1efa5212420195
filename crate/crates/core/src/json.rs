//! JSON forms of operators, witnesses, games, strategies and reports.
//!
//! Complex entries are `[re, im]` pairs; matrices are flattened row-major.
//! Decoding re-runs every constructor check, so a file that parses is valid.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::Game;
use crate::optimize::{PayoffReport, SLambdaVerdict};
use crate::protocol::{EstimateReport, ShotRecord};
use crate::qops::{CMatrix, CVector, QuantumOperator, StateVector, SubsystemLayout, C64};
use crate::strategy::{Strategy, StrategyKind};
use crate::witness::{Question, QuestionEnsemble, Witness, WitnessKind};

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct OperatorRepr {
    pub labels: Vec<String>,
    pub dims: Vec<usize>,
    pub data: Vec<[f64; 2]>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct VectorRepr {
    pub labels: Vec<String>,
    pub dims: Vec<usize>,
    pub vec: Vec<[f64; 2]>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct WitnessRepr {
    pub kind: String,
    pub d: usize,
    pub operator: OperatorRepr,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source: Option<VectorRepr>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct QuestionRepr {
    pub p: f64,
    pub beta: f64,
    pub tau: OperatorRepr,
    pub omega: OperatorRepr,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GameRepr {
    pub witness: WitnessRepr,
    pub ensemble: Vec<QuestionRepr>,
    pub reward11: Vec<f64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum StrategyRepr {
    Product {
        p: OperatorRepr,
        q: OperatorRepr,
    },
    MatchedOneWay {
        alice_povm: Vec<OperatorRepr>,
        bob_conditional: Vec<OperatorRepr>,
    },
    Filtered {
        filter_a0: OperatorRepr,
        filter_b0: OperatorRepr,
        inner: Box<StrategyRepr>,
    },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PayoffReportRepr {
    pub value: f64,
    pub upper_bound: f64,
    pub converged: bool,
    pub iterations: usize,
    pub restarts: usize,
    pub seed: u64,
    pub lower_bound_only: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub filter_probability: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<WitnessRepr>,
    pub strategy: StrategyRepr,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SLambdaRepr {
    pub lambda: f64,
    pub member: bool,
    pub certificate: PayoffReportRepr,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EstimateReportRepr {
    pub mean: f64,
    pub stderr: f64,
    pub shots: u64,
    pub per_question_counts: Vec<[u64; 2]>,
    pub seed: u64,
    pub partitions: usize,
    pub clamped: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShotRepr {
    pub i: usize,
    pub x: u8,
    pub y: u8,
}

fn pairs(it: impl Iterator<Item = C64>) -> Vec<[f64; 2]> {
    it.map(|z| [z.re, z.im]).collect()
}

fn layout_of(labels: &[String], dims: &[usize]) -> Result<SubsystemLayout> {
    if labels.len() != dims.len() {
        return Err(Error::Validation(format!("{} labels for {} dims", labels.len(), dims.len())));
    }
    SubsystemLayout::new(labels.iter().cloned().zip(dims.iter().copied()))
}

impl From<&QuantumOperator> for OperatorRepr {
    fn from(op: &QuantumOperator) -> Self {
        let m = op.matrix();
        let n = m.nrows();
        Self {
            labels: op.layout().labels().iter().map(|s| s.to_string()).collect(),
            dims: op.layout().dims(),
            data: pairs((0..n * n).map(|k| m[(k / n, k % n)])),
        }
    }
}

impl TryFrom<&OperatorRepr> for QuantumOperator {
    type Error = Error;

    fn try_from(r: &OperatorRepr) -> Result<Self> {
        let layout = layout_of(&r.labels, &r.dims)?;
        let n = layout.total_dim();
        if r.data.len() != n * n {
            return Err(Error::DimensionMismatch(format!("{} entries for a {n}x{n} operator", r.data.len())));
        }
        let m = CMatrix::from_fn(n, n, |i, j| {
            let [re, im] = r.data[i * n + j];
            C64::new(re, im)
        });
        QuantumOperator::new(layout, m)
    }
}

impl From<&StateVector> for VectorRepr {
    fn from(v: &StateVector) -> Self {
        Self {
            labels: v.layout().labels().iter().map(|s| s.to_string()).collect(),
            dims: v.layout().dims(),
            vec: pairs(v.vector().iter().copied()),
        }
    }
}

impl TryFrom<&VectorRepr> for StateVector {
    type Error = Error;

    fn try_from(r: &VectorRepr) -> Result<Self> {
        let layout = layout_of(&r.labels, &r.dims)?;
        let v = CVector::from_iterator(r.vec.len(), r.vec.iter().map(|&[re, im]| C64::new(re, im)));
        StateVector::new(layout, v)
    }
}

impl From<&Witness> for WitnessRepr {
    fn from(w: &Witness) -> Self {
        Self {
            kind: match w.kind() {
                WitnessKind::Decomposable => "decomposable",
                WitnessKind::Generic => "generic",
            }
            .into(),
            d: w.d(),
            operator: w.op().into(),
            source: w.source_vector().map(VectorRepr::from),
        }
    }
}

impl TryFrom<&WitnessRepr> for Witness {
    type Error = Error;

    fn try_from(r: &WitnessRepr) -> Result<Self> {
        let kind = match r.kind.as_str() {
            "decomposable" => WitnessKind::Decomposable,
            "generic" => WitnessKind::Generic,
            other => return Err(Error::Validation(format!("unknown witness kind `{other}`"))),
        };
        let op = QuantumOperator::try_from(&r.operator)?;
        let source = r.source.as_ref().map(StateVector::try_from).transpose()?;
        Witness::from_parts(&op, r.d, kind, source)
    }
}

impl From<&Game> for GameRepr {
    fn from(g: &Game) -> Self {
        Self {
            witness: g.witness().into(),
            ensemble: g
                .ensemble()
                .items()
                .iter()
                .map(|q| QuestionRepr { p: q.p, beta: q.beta, tau: (&q.tau).into(), omega: (&q.omega).into() })
                .collect(),
            reward11: g.reward11().to_vec(),
        }
    }
}

impl TryFrom<&GameRepr> for Game {
    type Error = Error;

    fn try_from(r: &GameRepr) -> Result<Self> {
        let witness = Witness::try_from(&r.witness)?;
        let items = r
            .ensemble
            .iter()
            .map(|q| {
                Ok(Question {
                    p: q.p,
                    beta: q.beta,
                    tau: QuantumOperator::try_from(&q.tau)?,
                    omega: QuantumOperator::try_from(&q.omega)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Game::from_parts(witness, QuestionEnsemble::new(items)?, r.reward11.clone())
    }
}

impl From<&Strategy> for StrategyRepr {
    fn from(s: &Strategy) -> Self {
        match s.kind() {
            StrategyKind::Product { p, q } => StrategyRepr::Product { p: p.into(), q: q.into() },
            StrategyKind::MatchedOneWay { alice_povm, bob_conditional } => StrategyRepr::MatchedOneWay {
                alice_povm: alice_povm.iter().map(OperatorRepr::from).collect(),
                bob_conditional: bob_conditional.iter().map(OperatorRepr::from).collect(),
            },
            StrategyKind::Filtered { filter_a0, filter_b0, inner } => StrategyRepr::Filtered {
                filter_a0: filter_a0.into(),
                filter_b0: filter_b0.into(),
                inner: Box::new(inner.as_ref().into()),
            },
        }
    }
}

fn operators(rs: &[OperatorRepr]) -> Result<Vec<QuantumOperator>> {
    rs.iter().map(QuantumOperator::try_from).collect()
}

impl TryFrom<&StrategyRepr> for Strategy {
    type Error = Error;

    fn try_from(r: &StrategyRepr) -> Result<Self> {
        let kind = match r {
            StrategyRepr::Product { p, q } => StrategyKind::Product { p: p.try_into()?, q: q.try_into()? },
            StrategyRepr::MatchedOneWay { alice_povm, bob_conditional } => StrategyKind::MatchedOneWay {
                alice_povm: operators(alice_povm)?,
                bob_conditional: operators(bob_conditional)?,
            },
            StrategyRepr::Filtered { filter_a0, filter_b0, inner } => StrategyKind::Filtered {
                filter_a0: filter_a0.try_into()?,
                filter_b0: filter_b0.try_into()?,
                inner: Box::new(Strategy::try_from(inner.as_ref())?),
            },
        };
        Strategy::from_kind(kind)
    }
}

impl From<&PayoffReport> for PayoffReportRepr {
    fn from(r: &PayoffReport) -> Self {
        Self {
            value: r.value,
            upper_bound: r.upper_bound,
            converged: r.converged,
            iterations: r.iterations,
            restarts: r.restarts,
            seed: r.seed,
            lower_bound_only: r.lower_bound_only,
            filter_probability: r.filter_probability,
            witness: r.witness.as_ref().map(WitnessRepr::from),
            strategy: (&r.strategy).into(),
        }
    }
}

impl From<&SLambdaVerdict> for SLambdaRepr {
    fn from(v: &SLambdaVerdict) -> Self {
        Self { lambda: v.lambda, member: v.member, certificate: (&v.certificate).into() }
    }
}

impl From<&EstimateReport> for EstimateReportRepr {
    fn from(r: &EstimateReport) -> Self {
        Self {
            mean: r.mean,
            stderr: r.stderr,
            shots: r.shots,
            per_question_counts: r.per_question_counts.iter().map(|&(n, w)| [n, w]).collect(),
            seed: r.seed,
            partitions: r.partitions,
            clamped: r.clamped,
        }
    }
}

impl From<&ShotRecord> for ShotRepr {
    fn from(s: &ShotRecord) -> Self {
        Self { i: s.i, x: s.x, y: s.y }
    }
}

fn parse<T: for<'de> Deserialize<'de>>(text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Validation(format!("malformed JSON: {e}")))
}

pub fn to_string<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("reprs always serialize")
}

pub fn operator_from_str(text: &str) -> Result<QuantumOperator> {
    QuantumOperator::try_from(&parse::<OperatorRepr>(text)?)
}

pub fn vector_from_str(text: &str) -> Result<StateVector> {
    StateVector::try_from(&parse::<VectorRepr>(text)?)
}

/// A density matrix, or a pure state given by its vector.
pub fn state_from_str(text: &str) -> Result<QuantumOperator> {
    let value: serde_json::Value = parse(text)?;
    if value.get("vec").is_some() {
        Ok(vector_from_str(text)?.normalized()?.projector())
    } else {
        operator_from_str(text)
    }
}

pub fn witness_from_str(text: &str) -> Result<Witness> {
    Witness::try_from(&parse::<WitnessRepr>(text)?)
}

pub fn game_from_str(text: &str) -> Result<Game> {
    Game::try_from(&parse::<GameRepr>(text)?)
}

pub fn strategy_from_str(text: &str) -> Result<Strategy> {
    Strategy::try_from(&parse::<StrategyRepr>(text)?)
}
