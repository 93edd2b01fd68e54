//! JSON game documents and the solve pipeline behind the command line.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::bayesian::{EclBayesianBargainingGame, EclBayesianGame, TypePrior, UtilityView};
use crate::error::{Error, Result};
use crate::games::{nash_equilibrium, FiniteGame, NormalFormGame, NormalFormSeparableGame, SeparableBargainingGame};
use crate::geometry::{minkowski_sum, CostFn, FeasibleSet, PayoffVector};
use crate::solutions::{armstrong_solution, decompose, ksbs, nbs, SolutionReport, SolutionWeights};
use crate::stability::{
    core_membership, stable_disagreement, threat_point, CoalitionFunction, CoreVerdict, ThreatReport, WorstCaseMethod,
    WorstCasePayoffMatrix, BLOCKING_TOL,
};

pub const SCHEMA_VERSION: u32 = 1;
const THREAT_ROUNDS: usize = 200;

/// Convex set given by its shape.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case", deny_unknown_fields)]
pub enum SetDescriptor {
    /// Convex hull of the listed points.
    Polytope { points: Vec<Vec<f64>> },
    /// Quarter disk `{y >= 0 : |y| <= 1}` stretched by `scale`.
    Disk { scale: [f64; 2] },
    /// Logarithmic returns to a budget `r`, stretched by `scale`.
    LogResource { r: f64, scale: [f64; 2] },
    /// Budget set `c1(y1) + c2(y2) <= budget`.
    Budget { budget: f64, costs: [CostFn; 2] },
    /// Minkowski sum.
    Sum { summands: Vec<SetDescriptor> },
}

impl SetDescriptor {
    pub fn build(&self) -> Result<FeasibleSet> {
        match self {
            Self::Polytope { points } => FeasibleSet::polytope(points.clone()),
            Self::Disk { scale } => FeasibleSet::disk(*scale),
            Self::LogResource { r, scale } => FeasibleSet::log_resource(*r, *scale),
            Self::Budget { budget, costs } => FeasibleSet::budget(*budget, *costs),
            Self::Sum { summands } => minkowski_sum(summands.iter().map(Self::build).collect::<Result<_>>()?),
        }
    }
}

/// The game itself, tagged by `kind` with the payload under `game`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "game", rename_all = "kebab-case")]
pub enum GamePayload {
    /// `contributions[i][a]` is what player `i`'s action `a` hands every player.
    SeparableNormalForm { contributions: NormalFormSeparableGame },
    SeparableBargaining {
        individual_sets: Vec<SetDescriptor>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        disagreement: Option<Vec<f64>>,
    },
    NormalForm(NormalFormGame),
    BayesianGame(EclBayesianGame),
    BayesianBargaining {
        action_sets: Vec<SetDescriptor>,
        prior: TypePrior,
        #[serde(default)]
        view: UtilityView,
    },
}

impl GamePayload {
    pub fn kind(&self) -> &'static str {
        match self {
            Self::SeparableNormalForm { .. } => "separable-normal-form",
            Self::SeparableBargaining { .. } => "separable-bargaining",
            Self::NormalForm(_) => "normal-form",
            Self::BayesianGame(_) => "bayesian-game",
            Self::BayesianBargaining { .. } => "bayesian-bargaining",
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolutionKind {
    #[default]
    Nbs,
    Ksbs,
    Armstrong,
}

impl FromStr for SolutionKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "nbs" => Ok(Self::Nbs),
            "ksbs" => Ok(Self::Ksbs),
            "armstrong" => Ok(Self::Armstrong),
            _ => Err(Error::Invalid(format!("unknown solution '{s}'"))),
        }
    }
}

/// How the disagreement point is chosen.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DisagreementRule {
    /// Equilibrium payoffs, or the document's own point for a bargaining game.
    Nash,
    Threat,
    /// Best payoffs against worst-case Pareto optimal outsiders.
    Stable,
    Point(Vec<f64>),
}

impl FromStr for DisagreementRule {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "nash" => Ok(Self::Nash),
            "threat" => Ok(Self::Threat),
            "stable" => Ok(Self::Stable),
            _ => match s.strip_prefix("point=") {
                Some(v) => Ok(Self::Point(parse_list(v)?)),
                None => Err(Error::Invalid(format!("unknown disagreement rule '{s}'"))),
            },
        }
    }
}

impl fmt::Display for DisagreementRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Nash => write!(f, "nash"),
            Self::Threat => write!(f, "threat"),
            Self::Stable => write!(f, "stable"),
            Self::Point(v) => write!(f, "point={}", v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WeightsRule {
    #[default]
    Uniform,
    /// Prior type weights; Bayesian bargaining games only.
    Prior,
    Explicit(Vec<f64>),
}

impl FromStr for WeightsRule {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "uniform" => Ok(Self::Uniform),
            "prior" => Ok(Self::Prior),
            _ => match s.strip_prefix("explicit=") {
                Some(v) => Ok(Self::Explicit(parse_list(v)?)),
                None => Err(Error::Invalid(format!("unknown weights '{s}'"))),
            },
        }
    }
}

fn parse_list(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|v| v.trim().parse::<f64>().map_err(|_| Error::Invalid(format!("not a number: '{v}'"))))
        .collect()
}

fn default_threat_grid() -> usize {
    8
}

fn default_tolerance() -> f64 {
    BLOCKING_TOL
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverOptions {
    #[serde(default)]
    pub solution: SolutionKind,
    #[serde(default = "default_disagreement")]
    pub disagreement: DisagreementRule,
    #[serde(default)]
    pub weights: WeightsRule,
    /// Check the solution against the core notions.
    #[serde(default)]
    pub core: bool,
    /// Mixture resolution of the threat game.
    #[serde(default = "default_threat_grid")]
    pub threat_grid: usize,
    /// Blocking tolerance of core checks.
    #[serde(default = "default_tolerance")]
    pub tolerance: f64,
    /// Pure profile to certify against the Bayesian Nash equilibrium.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub profile: Option<Vec<usize>>,
}

fn default_disagreement() -> DisagreementRule {
    DisagreementRule::Nash
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            solution: SolutionKind::default(),
            disagreement: DisagreementRule::Nash,
            weights: WeightsRule::default(),
            core: false,
            threat_grid: default_threat_grid(),
            tolerance: default_tolerance(),
            profile: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GameDocument {
    pub schema: u32,
    #[serde(flatten)]
    pub payload: GamePayload,
    #[serde(default)]
    pub options: SolverOptions,
}

impl GameDocument {
    pub fn new(payload: GamePayload) -> Self {
        Self { schema: SCHEMA_VERSION, payload, options: SolverOptions::default() }
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let doc: Self = serde_json::from_str(s).map_err(|e| Error::Invalid(format!("invalid game document: {e}")))?;
        if doc.schema != SCHEMA_VERSION {
            return Err(Error::Invalid(format!("unsupported schema version {}", doc.schema)));
        }
        Ok(doc)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("documents serialize")
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoreCheck {
    pub notion: String,
    pub verdict: CoreVerdict,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub holds: bool,
    /// Per-type gains over the reference equilibrium.
    pub slack: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub kind: String,
    pub disagreement_rule: DisagreementRule,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub disagreement: Option<PayoffVector>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<SolutionWeights>,
    pub solution_kind: SolutionKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub solution: Option<SolutionReport>,
    /// Each player's or type's contribution to the solution.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub decomposition: Option<Vec<PayoffVector>>,
    /// Equilibrium actions: indices for finite games, action vectors otherwise.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub equilibrium: Option<serde_json::Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub equilibrium_payoffs: Option<PayoffVector>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dependency_certificate: Option<Certificate>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threat: Option<ThreatReport>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub core: Vec<CoreCheck>,
}

impl SolveReport {
    fn new(kind: &str, options: &SolverOptions) -> Self {
        Self {
            kind: kind.to_string(),
            disagreement_rule: options.disagreement.clone(),
            disagreement: None,
            weights: None,
            solution_kind: options.solution,
            solution: None,
            decomposition: None,
            equilibrium: None,
            equilibrium_payoffs: None,
            dependency_certificate: None,
            threat: None,
            core: Vec::new(),
        }
    }
}

fn solve_with(kind: SolutionKind, f: &FeasibleSet, d: &[f64], w: &SolutionWeights) -> Result<SolutionReport> {
    match kind {
        SolutionKind::Nbs => nbs(f, d, w),
        SolutionKind::Ksbs => ksbs(f, d),
        SolutionKind::Armstrong => armstrong_solution(f, d),
    }
}

fn weights_for(rule: &WeightsRule, n: usize, prior: Option<&TypePrior>) -> Result<SolutionWeights> {
    let w = match rule {
        WeightsRule::Uniform => SolutionWeights::uniform(n),
        WeightsRule::Explicit(v) => SolutionWeights::new(v.clone())?,
        WeightsRule::Prior => match prior {
            Some(p) => SolutionWeights::new(p.marginals())?,
            None => return Err(Error::Invalid("prior weights need a Bayesian bargaining game".into())),
        },
    };
    if w.dim() != n {
        return Err(Error::DimensionMismatch { expected: n, got: w.dim() });
    }
    Ok(w)
}

fn point(rule: &DisagreementRule) -> Option<Result<PayoffVector>> {
    match rule {
        DisagreementRule::Point(v) => Some(PayoffVector::new(v.clone())),
        _ => None,
    }
}

fn unsupported(rule: &DisagreementRule, kind: &str) -> Error {
    Error::Invalid(format!("disagreement rule '{rule}' is not available for {kind} games"))
}

/// Resolve the disagreement point of a finite game.
fn finite_disagreement<G: FiniteGame + Sync>(
    g: &G,
    rule: &DisagreementRule,
    w: &SolutionWeights,
    grid: usize,
    nash: impl FnOnce() -> Result<PayoffVector>,
    stable: impl FnOnce() -> Result<PayoffVector>,
    report: &mut SolveReport,
) -> Result<PayoffVector> {
    match rule {
        DisagreementRule::Nash => nash(),
        DisagreementRule::Stable => stable(),
        DisagreementRule::Point(v) => PayoffVector::new(v.clone()),
        DisagreementRule::Threat => {
            let t = threat_point(g, w, grid, THREAT_ROUNDS)?;
            let d = t.disagreement.clone();
            report.threat = Some(t);
            Ok(d)
        }
    }
}

/// Run the requested solver on a document.
pub fn solve_document(doc: &GameDocument) -> Result<SolveReport> {
    let o = &doc.options;
    let kind = doc.payload.kind();
    let mut report = SolveReport::new(kind, o);
    match &doc.payload {
        GamePayload::SeparableNormalForm { contributions: g } => {
            let n = g.players();
            let w = weights_for(&o.weights, n, None)?;
            let (actions, ne) = nash_equilibrium(g);
            report.equilibrium = Some(serde_json::json!(actions));
            report.equilibrium_payoffs = Some(ne.clone());
            let d = finite_disagreement(
                g,
                &o.disagreement,
                &w,
                o.threat_grid,
                || Ok(ne.clone()),
                || stable_disagreement(g, &WorstCasePayoffMatrix::worst_case(g, WorstCaseMethod::Exact)?),
                &mut report,
            )?;
            let f = g.feasible_set();
            let s = solve_with(o.solution, &f, &d, &w)?;
            if o.core {
                let notions = [
                    ("alpha", CoalitionFunction::alpha(g.clone())?),
                    ("nash", CoalitionFunction::nash(g.clone())?),
                    ("worst-case", CoalitionFunction::worst_case(g.clone(), WorstCaseMethod::Exact)?),
                ];
                for (name, nu) in notions {
                    let verdict = core_membership(&nu, s.point.as_slice(), o.tolerance)?;
                    report.core.push(CoreCheck { notion: name.into(), verdict });
                }
            }
            let b = SeparableBargainingGame::new(g.individual_sets(), d.clone());
            if let Ok(b) = b {
                report.decomposition = decompose(&b, s.point.as_slice()).ok();
            }
            report.disagreement = Some(d);
            report.weights = Some(w);
            report.solution = Some(s);
        }
        GamePayload::NormalForm(g) => {
            let w = weights_for(&o.weights, g.players(), None)?;
            let eq = g.pure_nash_equilibria();
            report.equilibrium = Some(serde_json::json!(eq));
            let d = finite_disagreement(
                g,
                &o.disagreement,
                &w,
                o.threat_grid,
                || match eq.first() {
                    Some(a) => PayoffVector::new(g.pure_payoffs(a)),
                    None => Err(Error::Unsupported("the game has no pure Nash equilibrium".into())),
                },
                || Err(unsupported(&DisagreementRule::Stable, kind)),
                &mut report,
            )?;
            let s = solve_with(o.solution, &g.feasible_set(), &d, &w)?;
            report.disagreement = Some(d);
            report.weights = Some(w);
            report.solution = Some(s);
        }
        GamePayload::SeparableBargaining { individual_sets, disagreement } => {
            let sets = individual_sets.iter().map(SetDescriptor::build).collect::<Result<Vec<_>>>()?;
            let d = match (&o.disagreement, disagreement) {
                (DisagreementRule::Nash, Some(d)) => PayoffVector::new(d.clone())?,
                (DisagreementRule::Point(_), _) => point(&o.disagreement).expect("point rule")?,
                (rule, _) => return Err(unsupported(rule, kind)),
            };
            let g = SeparableBargainingGame::new(sets, d.clone())?;
            let w = weights_for(&o.weights, g.players(), None)?;
            let s = solve_with(o.solution, &g.joint_feasible_set(), &d, &w)?;
            report.decomposition = Some(decompose(&g, s.point.as_slice())?);
            report.disagreement = Some(d);
            report.weights = Some(w);
            report.solution = Some(s);
        }
        GamePayload::BayesianBargaining { action_sets, prior, view } => {
            let sets = action_sets.iter().map(SetDescriptor::build).collect::<Result<Vec<_>>>()?;
            let explicit = match &o.disagreement {
                DisagreementRule::Nash => None,
                DisagreementRule::Point(v) => Some(PayoffVector::new(v.clone())?),
                rule => return Err(unsupported(rule, kind)),
            };
            let g = EclBayesianBargainingGame::new(sets, prior.clone(), *view, explicit)?;
            let w = weights_for(&o.weights, g.types(), Some(prior))?;
            let (actions, bne) = g.bayesian_nash();
            let d = g.disagreement().clone();
            let s = solve_with(o.solution, &g.feasible_set(), &d, &w)?;
            let holds = g.dependency_certificate_point(s.point.as_slice(), &bne)?;
            let slack = s.point.iter().zip(bne.iter()).map(|(x, b)| x - b).collect();
            report.dependency_certificate = Some(Certificate { holds, slack });
            report.decomposition = Some(decompose(g.induced_bargaining_game(), s.point.as_slice())?);
            report.equilibrium = Some(serde_json::json!(actions));
            report.equilibrium_payoffs = Some(bne);
            report.disagreement = Some(d);
            report.weights = Some(w);
            report.solution = Some(s);
        }
        GamePayload::BayesianGame(g) => {
            let beta = g.bayesian_nash();
            let eu = (0..g.types()).map(|t| g.expected_utility_pure(&beta, t)).collect::<Result<Vec<_>>>()?;
            if let Some(alpha) = &o.profile {
                let (holds, slack) = g.dependency_certificate_pure(alpha, &beta)?;
                report.dependency_certificate = Some(Certificate { holds, slack });
            }
            report.equilibrium = Some(serde_json::json!(beta));
            report.equilibrium_payoffs = Some(PayoffVector::new(eu)?);
        }
    }
    Ok(report)
}

/// Documents for the reference games, keyed by file stem.
pub fn reference_documents() -> Result<Vec<(&'static str, GameDocument)>> {
    use crate::catalog;
    let with = |payload: GamePayload, options: SolverOptions| GameDocument { schema: SCHEMA_VERSION, payload, options };
    let budget = |b: f64| SetDescriptor::Budget {
        budget: b,
        costs: [CostFn::Linear { k: 1.0 }, CostFn::Quadratic { k: 0.5 }],
    };
    let disk = SetDescriptor::Disk { scale: [1.0, 1.0] };
    Ok(vec![
        (
            "alice-bob",
            with(
                GamePayload::SeparableBargaining {
                    individual_sets: vec![budget(10.0), budget(5.0)],
                    disagreement: Some(vec![10.0, 10f64.sqrt()]),
                },
                SolverOptions::default(),
            ),
        ),
        (
            "variance-counterexample",
            with(
                GamePayload::SeparableNormalForm { contributions: catalog::variance_counterexample()? },
                SolverOptions::default(),
            ),
        ),
        (
            "threat-game",
            with(
                GamePayload::NormalForm(catalog::threat_game()?),
                SolverOptions { disagreement: DisagreementRule::Threat, threat_grid: 12, ..SolverOptions::default() },
            ),
        ),
        (
            "bayesian-dilemma",
            with(
                GamePayload::BayesianGame(catalog::bayesian_dilemma(11)?),
                SolverOptions { profile: Some(vec![0, 0]), ..SolverOptions::default() },
            ),
        ),
        (
            "blocking-game",
            with(
                GamePayload::SeparableNormalForm { contributions: catalog::blocking_game()? },
                SolverOptions { core: true, ..SolverOptions::default() },
            ),
        ),
        (
            "empty-core-game",
            with(
                GamePayload::SeparableNormalForm { contributions: catalog::empty_core_game()? },
                SolverOptions { core: true, ..SolverOptions::default() },
            ),
        ),
        (
            "three-player-disks",
            with(
                GamePayload::BayesianBargaining {
                    action_sets: vec![disk.clone(), disk.clone()],
                    prior: TypePrior::independent(3, vec![0.5, 0.5])?,
                    view: UtilityView::Exact,
                },
                SolverOptions::default(),
            ),
        ),
        (
            "asymmetric-prior-disks",
            with(
                GamePayload::BayesianBargaining {
                    action_sets: vec![disk.clone(), disk],
                    prior: TypePrior::independent(1000, vec![0.75, 0.25])?,
                    view: UtilityView::PerOther,
                },
                SolverOptions { weights: WeightsRule::Prior, ..SolverOptions::default() },
            ),
        ),
    ])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn find(name: &str) -> GameDocument {
        reference_documents().unwrap().into_iter().find(|(n, _)| *n == name).unwrap().1
    }

    #[test]
    fn documents_round_trip() {
        for (name, doc) in reference_documents().unwrap() {
            let back = GameDocument::from_json(&doc.to_json()).unwrap_or_else(|e| panic!("{name}: {e}"));
            assert_eq!(back, doc, "{name}");
        }
    }

    #[test]
    fn alice_and_bob_report() {
        let r = solve_document(&find("alice-bob")).unwrap();
        let parts = r.decomposition.as_ref().unwrap();
        assert!((parts[0][0] - 8.15).abs() < 0.01 && (parts[1][0] - 3.15).abs() < 0.01, "{parts:?}");
        let s = serde_json::to_string(&r).unwrap();
        assert_eq!(serde_json::from_str::<SolveReport>(&s).unwrap(), r);
    }

    #[test]
    fn blocking_report() {
        let r = solve_document(&find("blocking-game")).unwrap();
        let alpha = &r.core[0];
        assert_eq!(alpha.verdict.blocking.as_ref().unwrap().to_string(), "{1,2}");
        let s = serde_json::to_string(&r).unwrap();
        assert_eq!(serde_json::from_str::<SolveReport>(&s).unwrap(), r);
    }

    #[test]
    fn asymmetric_prior_report() {
        let r = solve_document(&find("asymmetric-prior-disks")).unwrap();
        let x = &r.solution.as_ref().unwrap().point;
        assert!((x[0] - 0.92).abs() < 0.01 && (x[1] - 0.39).abs() < 0.01, "{x:?}");
        assert!(r.dependency_certificate.unwrap().holds);
    }

    #[test]
    fn equilibrium_without_gains() {
        let err = solve_document(&find("variance-counterexample")).unwrap_err();
        assert_eq!(err, Error::NoStrictImprovement);
    }

    #[test]
    fn reference_files_match() {
        let dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("games");
        for (name, doc) in reference_documents().unwrap() {
            let text = std::fs::read_to_string(dir.join(format!("{name}.json"))).unwrap();
            assert_eq!(GameDocument::from_json(&text).unwrap(), doc, "{name}");
        }
    }

    #[test]
    fn rule_parsing() {
        assert_eq!("point=1,2.5".parse::<DisagreementRule>().unwrap(), DisagreementRule::Point(vec![1.0, 2.5]));
        assert_eq!("explicit=0.25,0.75".parse::<WeightsRule>().unwrap(), WeightsRule::Explicit(vec![0.25, 0.75]));
        assert!("point=a".parse::<DisagreementRule>().is_err());
        assert!("ksbs".parse::<SolutionKind>().is_ok());
    }

    #[test]
    fn invalid_documents() {
        let bad = r#"{"schema":1,"kind":"separable-normal-form","game":{"contributions":[[],[[0.0,0.0]]]}}"#;
        assert!(GameDocument::from_json(bad).is_err());
        let wrong = r#"{"schema":2,"kind":"separable-normal-form","game":{"contributions":[[[1.0]]]}}"#;
        assert!(GameDocument::from_json(wrong).is_err());
    }
}
