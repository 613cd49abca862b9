//! Entities over a generalized time category, entangled pairs and
//! measurement as natural transformations.
//!
//! Time periods are the opens of a finite topology with a designated chain
//! of opens standing in for the embedded time line. Micro and macro world
//! components of an entity are presheaves of free integer modules, so every
//! naturality condition is an exact matrix identity; linear clock time is a
//! monotone rational labelling of the chain.

use crate::algebra::IntMatrix;
use crate::presheaf::Presheaf;
use crate::topology::{FiniteTopology, OpenId};
use num_rational::Rational64;
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EprError {
    #[error("designated chain must be a nested ascending sequence of opens")]
    NotAChain,
    #[error("entity components must live on the time category's topology")]
    TopologyMismatch,
    #[error("component presheaf `{0}` violates the functor laws")]
    InvalidComponent(String),
    #[error("time labels must cover the designated chain: missing {0}")]
    TimeLabelMissing(OpenId),
    #[error("time labels must be monotone along the designated chain")]
    TimeNotMonotone,
    #[error("unknown time period {0}")]
    UnknownPeriod(OpenId),
    #[error("time period {0} is off the designated chain")]
    PeriodOffChain(OpenId),
    #[error("missing component morphism at {0}")]
    MissingComponent(OpenId),
    #[error("morphism at {open} must be {expected_rows}x{expected_cols}, got {got_rows}x{got_cols}")]
    ShapeMismatch {
        open: OpenId,
        expected_rows: usize,
        expected_cols: usize,
        got_rows: usize,
        got_cols: usize,
    },
    #[error("correlation family is not natural at {smaller} ⊆ {larger}")]
    CorrelationNotNatural { smaller: OpenId, larger: OpenId },
}

/// A finite category given by explicit hom-sets and a composition table.
#[derive(Debug, Clone)]
pub struct FiniteCategory {
    pub objects: Vec<String>,
    pub morphisms: Vec<Morphism>,
    /// Identity morphism index per object.
    pub identities: Vec<usize>,
    /// (f: X→Y, g: Y→Z) ↦ g∘f : X→Z.
    pub composition: BTreeMap<(usize, usize), usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Morphism {
    pub name: String,
    pub source: usize,
    pub target: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CategoryViolation {
    BadIdentityEndpoints { object: usize },
    MissingComposite { first: usize, second: usize },
    WrongCompositeEndpoints { first: usize, second: usize },
    IdentityLaw { morphism: usize },
    Associativity { first: usize, second: usize, third: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CategoryReport {
    pub violations: Vec<CategoryViolation>,
}

impl CategoryReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl FiniteCategory {
    /// Exhaustively checks identity endpoints, totality and typing of the
    /// composition table, the identity laws and associativity.
    pub fn validate(&self) -> CategoryReport {
        let mut violations = Vec::new();
        for (x, &id) in self.identities.iter().enumerate() {
            let m = &self.morphisms[id];
            if m.source != x || m.target != x {
                violations.push(CategoryViolation::BadIdentityEndpoints { object: x });
            }
        }
        let composable: Vec<(usize, usize)> = (0..self.morphisms.len())
            .flat_map(|f| (0..self.morphisms.len()).map(move |g| (f, g)))
            .filter(|&(f, g)| self.morphisms[f].target == self.morphisms[g].source)
            .collect();
        for &(f, g) in &composable {
            match self.composition.get(&(f, g)) {
                None => violations.push(CategoryViolation::MissingComposite { first: f, second: g }),
                Some(&h) => {
                    let (mf, mg, mh) = (&self.morphisms[f], &self.morphisms[g], &self.morphisms[h]);
                    if mh.source != mf.source || mh.target != mg.target {
                        violations.push(CategoryViolation::WrongCompositeEndpoints {
                            first: f,
                            second: g,
                        });
                    }
                }
            }
        }
        for (f, m) in self.morphisms.iter().enumerate() {
            let id_src = self.identities[m.source];
            let id_tgt = self.identities[m.target];
            if self.composition.get(&(id_src, f)) != Some(&f)
                || self.composition.get(&(f, id_tgt)) != Some(&f)
            {
                violations.push(CategoryViolation::IdentityLaw { morphism: f });
            }
        }
        for &(f, g) in &composable {
            let Some(&gf) = self.composition.get(&(f, g)) else {
                continue;
            };
            for h in 0..self.morphisms.len() {
                if self.morphisms[g].target != self.morphisms[h].source {
                    continue;
                }
                let Some(&hg) = self.composition.get(&(g, h)) else {
                    continue;
                };
                if self.composition.get(&(gf, h)) != self.composition.get(&(f, hg)) {
                    violations.push(CategoryViolation::Associativity {
                        first: f,
                        second: g,
                        third: h,
                    });
                }
            }
        }
        CategoryReport { violations }
    }

    /// The poset category of a topology's opens: at most one morphism per
    /// hom-set, namely the inclusion.
    pub fn poset_of_opens(topology: &FiniteTopology) -> FiniteCategory {
        let objects: Vec<String> = topology
            .open_ids()
            .map(|id| topology.format_open(id))
            .collect();
        let mut morphisms = Vec::new();
        let mut index = BTreeMap::new();
        for (v, u) in topology.inclusion_pairs() {
            let id = morphisms.len();
            morphisms.push(Morphism {
                name: format!("{v}⊆{u}"),
                source: v.0,
                target: u.0,
            });
            index.insert((v.0, u.0), id);
        }
        let identities: Vec<usize> = topology.open_ids().map(|u| index[&(u.0, u.0)]).collect();
        let mut composition = BTreeMap::new();
        for (&(a, b), &f) in &index {
            for (&(b2, c), &g) in &index {
                if b == b2 {
                    composition.insert((f, g), index[&(a, c)]);
                }
            }
        }
        FiniteCategory {
            objects,
            morphisms,
            identities,
            composition,
        }
    }
}

/// The generalized time category: a finite topology whose opens are time
/// periods, with a designated nested chain modelling the embedded line.
#[derive(Debug, Clone)]
pub struct GeneralizedTimeCategory {
    topology: Arc<FiniteTopology>,
    chain: Vec<OpenId>,
}

impl GeneralizedTimeCategory {
    pub fn new(topology: Arc<FiniteTopology>, chain: Vec<OpenId>) -> Result<Self, EprError> {
        for w in chain.windows(2) {
            if !topology.is_subset(w[0], w[1]) {
                return Err(EprError::NotAChain);
            }
        }
        for &v in &chain {
            topology
                .check_open(v)
                .map_err(|_| EprError::UnknownPeriod(v))?;
        }
        Ok(GeneralizedTimeCategory { topology, chain })
    }

    pub fn topology(&self) -> &Arc<FiniteTopology> {
        &self.topology
    }

    pub fn chain(&self) -> &[OpenId] {
        &self.chain
    }
}

/// The time-valued component: a monotone rational label per chain open.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TimePresheaf {
    values: BTreeMap<OpenId, Rational64>,
}

impl TimePresheaf {
    pub fn new(
        time: &GeneralizedTimeCategory,
        values: BTreeMap<OpenId, Rational64>,
    ) -> Result<Self, EprError> {
        for &v in time.chain() {
            if !values.contains_key(&v) {
                return Err(EprError::TimeLabelMissing(v));
            }
        }
        let mut prev: Option<Rational64> = None;
        for &v in time.chain() {
            let t = values[&v];
            if let Some(p) = prev {
                if t < p {
                    return Err(EprError::TimeNotMonotone);
                }
            }
            prev = Some(t);
        }
        Ok(TimePresheaf { values })
    }

    /// t = τ(V); errors off the designated chain.
    pub fn induce_time(&self, period: OpenId) -> Result<Rational64, EprError> {
        self.values
            .get(&period)
            .copied()
            .ok_or(EprError::PeriodOffChain(period))
    }
}

/// A physical entity: one presheaf-like component per world index
/// (time, micro, macro).
#[derive(Debug, Clone)]
pub struct Entity {
    pub name: String,
    time: Arc<GeneralizedTimeCategory>,
    micro: Presheaf,
    macro_world: Presheaf,
    tau: TimePresheaf,
}

/// The component values of an entity at a time period. The macro-position
/// argument of [`Entity::evaluate`] never enters this value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EntityValue {
    pub period: OpenId,
    pub time_stamp: Option<Rational64>,
    pub micro_rank: usize,
    pub macro_rank: usize,
}

impl fmt::Display for EntityValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let stamp = match self.time_stamp {
            Some(t) => t.to_string(),
            None => "-".to_string(),
        };
        write!(
            f,
            "(t={}, micro=Z^{}, macro=Z^{})",
            stamp, self.micro_rank, self.macro_rank
        )
    }
}

impl Entity {
    pub fn new(
        name: impl Into<String>,
        time: Arc<GeneralizedTimeCategory>,
        micro: Presheaf,
        macro_world: Presheaf,
        tau: TimePresheaf,
    ) -> Result<Self, EprError> {
        let digest = time.topology().digest();
        if micro.topology().digest() != digest || macro_world.topology().digest() != digest {
            return Err(EprError::TopologyMismatch);
        }
        if !micro.validate().is_valid() {
            return Err(EprError::InvalidComponent("micro".to_string()));
        }
        if !macro_world.validate().is_valid() {
            return Err(EprError::InvalidComponent("macro".to_string()));
        }
        Ok(Entity {
            name: name.into(),
            time,
            micro,
            macro_world,
            tau,
        })
    }

    pub fn time(&self) -> &Arc<GeneralizedTimeCategory> {
        &self.time
    }

    pub fn micro(&self) -> &Presheaf {
        &self.micro
    }

    pub fn macro_world(&self) -> &Presheaf {
        &self.macro_world
    }

    pub fn tau(&self) -> &TimePresheaf {
        &self.tau
    }

    /// Evaluates the entity at a time period. `position` is deliberately
    /// inert: the state is determined by the period alone, and the argument
    /// exists so that position independence is a checkable equation.
    pub fn evaluate(&self, period: OpenId, position: &str) -> Result<EntityValue, EprError> {
        let _ = position;
        self.time
            .topology()
            .check_open(period)
            .map_err(|_| EprError::UnknownPeriod(period))?;
        Ok(EntityValue {
            period,
            time_stamp: self.tau.induce_time(period).ok(),
            micro_rank: self.micro.rank(period),
            macro_rank: self.macro_world.rank(period),
        })
    }
}

/// Two entities whose pairing is again an entity, with a natural family of
/// correlation morphisms right(V) → left(V) in the micro component.
#[derive(Debug, Clone)]
pub struct EntangledPair {
    pub left: Entity,
    pub right: Entity,
    correlation: BTreeMap<OpenId, IntMatrix>,
}

impl EntangledPair {
    pub fn correlation(&self, period: OpenId) -> Option<&IntMatrix> {
        self.correlation.get(&period)
    }

    /// The pair evaluated at a period: componentwise values of both halves.
    pub fn evaluate(
        &self,
        period: OpenId,
        position: &str,
    ) -> Result<(EntityValue, EntityValue), EprError> {
        Ok((
            self.left.evaluate(period, position)?,
            self.right.evaluate(period, position)?,
        ))
    }
}

/// Verifies that a correlation family is natural with respect to every
/// inclusion and forms the entangled pair.
pub fn entangle(
    left: Entity,
    right: Entity,
    correlation: BTreeMap<OpenId, IntMatrix>,
) -> Result<EntangledPair, EprError> {
    if left.time.topology().digest() != right.time.topology().digest() {
        return Err(EprError::TopologyMismatch);
    }
    let topology = left.time.topology().clone();
    for u in topology.open_ids() {
        let m = correlation
            .get(&u)
            .ok_or(EprError::MissingComponent(u))?;
        let (er, ec) = (left.micro.rank(u), right.micro.rank(u));
        if m.rows() != er || m.cols() != ec {
            return Err(EprError::ShapeMismatch {
                open: u,
                expected_rows: er,
                expected_cols: ec,
                got_rows: m.rows(),
                got_cols: m.cols(),
            });
        }
    }
    for (v, u) in topology.inclusion_pairs() {
        if v == u {
            continue;
        }
        let r_left = left.micro.restriction(v, u).expect("validated presheaf");
        let r_right = right.micro.restriction(v, u).expect("validated presheaf");
        let lhs = correlation[&v].mul(r_right);
        let rhs = r_left.mul(&correlation[&u]);
        if lhs != rhs {
            return Err(EprError::CorrelationNotNatural { smaller: v, larger: u });
        }
    }
    Ok(EntangledPair {
        left,
        right,
        correlation,
    })
}

/// A verified natural transformation between the micro components of two
/// entities over all periods contained in `over`.
#[derive(Debug, Clone)]
pub struct NaturalTransformation {
    pub source: String,
    pub target: String,
    pub over: OpenId,
    pub components: BTreeMap<OpenId, IntMatrix>,
}

/// Failure witness of a measurability check: the first naturality square
/// that does not commute, with both composites.
#[derive(Debug, Clone)]
pub struct BrokenSquare {
    pub smaller: OpenId,
    pub larger: OpenId,
    pub via_target: IntMatrix,
    pub via_source: IntMatrix,
}

#[derive(Debug, Clone)]
pub enum MeasurabilityFailure {
    Error(EprError),
    BrokenSquare(BrokenSquare),
}

impl fmt::Display for MeasurabilityFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MeasurabilityFailure::Error(e) => write!(f, "{e}"),
            MeasurabilityFailure::BrokenSquare(sq) => write!(
                f,
                "naturality square at {} ⊆ {} does not commute",
                sq.smaller, sq.larger
            ),
        }
    }
}

/// Decides whether `observed` is measurable by `observer` over the period
/// `over`: the candidate components must form a natural transformation of
/// the micro presheaves on all periods inside `over`.
pub fn is_measurable(
    observed: &Entity,
    observer: &Entity,
    over: OpenId,
    candidate: &BTreeMap<OpenId, IntMatrix>,
) -> Result<NaturalTransformation, MeasurabilityFailure> {
    let topology = observed.time.topology().clone();
    if observer.time.topology().digest() != topology.digest() {
        return Err(MeasurabilityFailure::Error(EprError::TopologyMismatch));
    }
    let inside: Vec<OpenId> = topology
        .open_ids()
        .filter(|&v| topology.is_subset(v, over))
        .collect();
    for &v in &inside {
        let m = candidate
            .get(&v)
            .ok_or(MeasurabilityFailure::Error(EprError::MissingComponent(v)))?;
        let (er, ec) = (observer.micro.rank(v), observed.micro.rank(v));
        if m.rows() != er || m.cols() != ec {
            return Err(MeasurabilityFailure::Error(EprError::ShapeMismatch {
                open: v,
                expected_rows: er,
                expected_cols: ec,
                got_rows: m.rows(),
                got_cols: m.cols(),
            }));
        }
    }
    for &u in &inside {
        for &v in &inside {
            if v == u || !topology.is_subset(v, u) {
                continue;
            }
            let r_observed = observed.micro.restriction(v, u).expect("validated presheaf");
            let r_observer = observer.micro.restriction(v, u).expect("validated presheaf");
            let via_source = candidate[&v].mul(r_observed);
            let via_target = r_observer.mul(&candidate[&u]);
            if via_source != via_target {
                return Err(MeasurabilityFailure::BrokenSquare(BrokenSquare {
                    smaller: v,
                    larger: u,
                    via_target,
                    via_source,
                }));
            }
        }
    }
    let components: BTreeMap<OpenId, IntMatrix> = inside
        .into_iter()
        .map(|v| (v, candidate[&v].clone()))
        .collect();
    Ok(NaturalTransformation {
        source: observed.name.clone(),
        target: observer.name.clone(),
        over,
        components,
    })
}

/// Observation of one half of an entangled pair, carried over to the other
/// half through the correlation: induced = obs ∘ correlation(V).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InducedMeasurement {
    /// The given morphism e(V) → P(V).
    pub observation: IntMatrix,
    /// The induced morphism e′(V) → P(V).
    pub induced: IntMatrix,
}

impl InducedMeasurement {
    /// The pair-level morphism (e(V), e′(V)) → P(V), componentwise.
    pub fn pair_morphism(&self) -> (&IntMatrix, &IntMatrix) {
        (&self.observation, &self.induced)
    }
}

pub fn induced_measurement(
    pair: &EntangledPair,
    period: OpenId,
    observation: &IntMatrix,
) -> Result<InducedMeasurement, EprError> {
    let corr = pair
        .correlation(period)
        .ok_or(EprError::MissingComponent(period))?;
    if observation.cols() != corr.rows() {
        return Err(EprError::ShapeMismatch {
            open: period,
            expected_rows: observation.rows(),
            expected_cols: corr.rows(),
            got_rows: observation.rows(),
            got_cols: observation.cols(),
        });
    }
    Ok(InducedMeasurement {
        observation: observation.clone(),
        induced: observation.mul(corr),
    })
}

/// Everything needed to run the scripted entanglement scenario.
#[derive(Debug, Clone)]
pub struct DemoScenario {
    pub time: Arc<GeneralizedTimeCategory>,
    /// e, the observed half of the pair.
    pub observed: Entity,
    /// e′, the distant partner.
    pub partner: Entity,
    /// P, the observing entity.
    pub observer: Entity,
    /// Correlation e′(V) → e(V) per period; the demo degrades gracefully
    /// without it.
    pub correlation: Option<BTreeMap<OpenId, IntMatrix>>,
    /// Candidate natural transformation e → P.
    pub candidate: BTreeMap<OpenId, IntMatrix>,
    /// Period at which the induced measurement is computed.
    pub observation_period: OpenId,
    /// Macro-position labels used to witness position independence.
    pub positions: Vec<String>,
}

/// Transcript plus machine-readable payload of one demo run. Output is a
/// pure function of the scenario, so reruns are byte-identical.
#[derive(Debug, Clone)]
pub struct DemoReport {
    pub transcript: String,
    pub machine: serde_json::Value,
    pub position_independent: bool,
    pub measurable: bool,
    pub induced_available: bool,
    pub induced_ok: Option<bool>,
}

impl DemoReport {
    /// All runnable checks passed; an unavailable induced measurement is
    /// reported but does not fail the demo.
    pub fn all_passed(&self) -> bool {
        self.position_independent && self.measurable && self.induced_ok.unwrap_or(true)
    }
}

fn matrix_text(m: &IntMatrix) -> String {
    let rows: Vec<String> = (0..m.rows())
        .map(|i| {
            let cells: Vec<String> = (0..m.cols()).map(|j| m[(i, j)].to_string()).collect();
            format!("[{}]", cells.join(", "))
        })
        .collect();
    format!("[{}]", rows.join(", "))
}

fn matrix_json(m: &IntMatrix) -> serde_json::Value {
    let rows: Vec<serde_json::Value> = (0..m.rows())
        .map(|i| {
            (0..m.cols())
                .map(|j| crate::algebra::bigint_to_json(&m[(i, j)]))
                .collect()
        })
        .collect();
    serde_json::Value::Array(rows)
}

/// Runs the three checks of the entanglement scenario and renders both
/// report forms.
pub fn run_demo(scenario: &DemoScenario) -> DemoReport {
    let topology = scenario.time.topology().clone();
    let full = topology.full_open();
    let mut lines = Vec::new();
    let mut machine = serde_json::Map::new();

    lines.push("EPR entanglement demo".to_string());
    lines.push("=====================".to_string());
    let periods: Vec<String> = topology.open_ids().map(|u| topology.format_open(u)).collect();
    lines.push(format!("time periods: {}", periods.join(", ")));
    let chain: Vec<String> = scenario
        .time
        .chain()
        .iter()
        .map(|&v| {
            let stamp = scenario
                .observed
                .tau()
                .induce_time(v)
                .map(|t| t.to_string())
                .unwrap_or_else(|_| "-".to_string());
            format!("{} (t={})", topology.format_open(v), stamp)
        })
        .collect();
    lines.push(format!("designated chain: {}", chain.join(" -> ")));
    lines.push(format!(
        "entities: {} (observed), {} (partner), {} (observer)",
        scenario.observed.name, scenario.partner.name, scenario.observer.name
    ));
    machine.insert(
        "periods".to_string(),
        serde_json::json!(periods),
    );
    machine.insert(
        "positions".to_string(),
        serde_json::json!(scenario.positions),
    );

    // Check 1: the evaluated state never varies with the macro position.
    lines.push(String::new());
    lines.push("check 1: position independence".to_string());
    lines.push(format!("  positions: {}", scenario.positions.join(", ")));
    let mut position_independent = true;
    for u in topology.open_ids() {
        let mut values = Vec::new();
        for pos in &scenario.positions {
            for entity in [&scenario.observed, &scenario.partner, &scenario.observer] {
                values.push(entity.evaluate(u, pos).expect("period is an open"));
            }
        }
        let per_position: Vec<&[EntityValue]> = values.chunks(3).collect();
        let agree = per_position.windows(2).all(|w| w[0] == w[1]);
        if !agree {
            position_independent = false;
        }
        lines.push(format!(
            "  period {}: {} across {} positions — {}",
            topology.format_open(u),
            values[0],
            scenario.positions.len(),
            if agree { "agrees" } else { "DIFFERS" }
        ));
    }
    lines.push(format!(
        "  {}",
        if position_independent { "PASS" } else { "FAIL" }
    ));
    machine.insert(
        "position_independence".to_string(),
        serde_json::json!({
            "pass": position_independent,
            "periods": topology.open_count(),
            "positions": scenario.positions.len(),
        }),
    );

    // Check 2: measurability of e by P over the full period.
    lines.push(String::new());
    lines.push(format!(
        "check 2: measurability of {} by {} over {}",
        scenario.observed.name,
        scenario.observer.name,
        topology.format_open(full)
    ));
    let measurability = is_measurable(
        &scenario.observed,
        &scenario.observer,
        full,
        &scenario.candidate,
    );
    let measurable = match &measurability {
        Ok(nt) => {
            let squares = nt
                .components
                .keys()
                .flat_map(|&v| nt.components.keys().map(move |&u| (v, u)))
                .filter(|&(v, u)| v != u && topology.is_subset(v, u))
                .count();
            lines.push(format!(
                "  verified {} naturality squares over {} periods",
                squares,
                nt.components.len()
            ));
            lines.push("  PASS".to_string());
            machine.insert(
                "measurability".to_string(),
                serde_json::json!({
                    "pass": true,
                    "over": topology.format_open(full),
                    "squares": squares,
                }),
            );
            true
        }
        Err(failure) => {
            lines.push(format!("  FAIL: {failure}"));
            machine.insert(
                "measurability".to_string(),
                serde_json::json!({
                    "pass": false,
                    "over": topology.format_open(full),
                    "witness": failure.to_string(),
                }),
            );
            false
        }
    };

    // Check 3: the induced morphism on the partner.
    lines.push(String::new());
    lines.push("check 3: induced measurement on the partner".to_string());
    let v = scenario.observation_period;
    let mut induced_available = false;
    let mut induced_ok = None;
    match (&scenario.correlation, scenario.candidate.get(&v)) {
        (Some(correlation), Some(obs)) => {
            match entangle(
                scenario.observed.clone(),
                scenario.partner.clone(),
                correlation.clone(),
            ) {
                Ok(pair) => match induced_measurement(&pair, v, obs) {
                    Ok(result) => {
                        induced_available = true;
                        let corr = pair.correlation(v).expect("entangled pair is total");
                        let recomputed = obs.mul(corr);
                        let ok = recomputed == result.induced;
                        induced_ok = Some(ok);
                        lines.push(format!(
                            "  correlation at {}: {}",
                            topology.format_open(v),
                            matrix_text(corr)
                        ));
                        lines.push(format!(
                            "  observation {} -> {} at {}: {}",
                            scenario.observed.name,
                            scenario.observer.name,
                            topology.format_open(v),
                            matrix_text(obs)
                        ));
                        lines.push(format!(
                            "  induced {} -> {}: {}",
                            scenario.partner.name,
                            scenario.observer.name,
                            matrix_text(&result.induced)
                        ));
                        let (pl, pr) = result.pair_morphism();
                        lines.push(format!(
                            "  pair-level morphism: ({}, {})",
                            matrix_text(pl),
                            matrix_text(pr)
                        ));
                        lines.push(format!("  {}", if ok { "PASS" } else { "FAIL" }));
                        machine.insert(
                            "induced_measurement".to_string(),
                            serde_json::json!({
                                "available": true,
                                "pass": ok,
                                "period": topology.format_open(v),
                                "correlation": matrix_json(corr),
                                "observation": matrix_json(obs),
                                "induced": matrix_json(&result.induced),
                            }),
                        );
                    }
                    Err(e) => {
                        induced_ok = Some(false);
                        lines.push(format!("  FAIL: {e}"));
                        machine.insert(
                            "induced_measurement".to_string(),
                            serde_json::json!({"available": true, "pass": false, "witness": e.to_string()}),
                        );
                    }
                },
                Err(e) => {
                    induced_ok = Some(false);
                    lines.push(format!("  FAIL: correlation rejected: {e}"));
                    machine.insert(
                        "induced_measurement".to_string(),
                        serde_json::json!({"available": false, "pass": false, "witness": e.to_string()}),
                    );
                }
            }
        }
        _ => {
            lines.push(
                "  SKIP: no correlation available; induced morphism unavailable".to_string(),
            );
            machine.insert(
                "induced_measurement".to_string(),
                serde_json::json!({"available": false}),
            );
        }
    }

    let report = DemoReport {
        transcript: String::new(),
        machine: serde_json::Value::Null,
        position_independent,
        measurable,
        induced_available,
        induced_ok,
    };
    lines.push(String::new());
    lines.push(format!(
        "result: {}",
        if report.all_passed() {
            "ALL CHECKS PASSED"
        } else {
            "CHECKS FAILED"
        }
    ));
    machine.insert(
        "all_passed".to_string(),
        serde_json::Value::Bool(report.all_passed()),
    );
    DemoReport {
        transcript: lines.join("\n") + "\n",
        machine: serde_json::Value::Object(machine),
        ..report
    }
}

/// The builtin scenario: two entities with ×3/×2 scaled micro restrictions
/// over a three-period chain, a negation correlation, and a ×5 observation.
pub fn builtin_scenario() -> DemoScenario {
    let topology = Arc::new(
        FiniteTopology::new(
            vec!["t1".to_string(), "t2".to_string(), "t3".to_string()],
            vec![
                vec![],
                vec!["t1".to_string()],
                vec!["t1".to_string(), "t2".to_string()],
                vec!["t1".to_string(), "t2".to_string(), "t3".to_string()],
            ],
        )
        .expect("builtin chain topology is valid"),
    );
    let chain = vec![OpenId(1), OpenId(2), OpenId(3)];
    let time = Arc::new(
        GeneralizedTimeCategory::new(topology.clone(), chain).expect("builtin chain is nested"),
    );

    let micro = |t: &Arc<FiniteTopology>| -> Presheaf {
        let mut edges = BTreeMap::new();
        edges.insert((OpenId(0), OpenId(1)), IntMatrix::zeros(0, 1));
        edges.insert((OpenId(1), OpenId(2)), IntMatrix::from_i64(1, 1, &[3]));
        edges.insert((OpenId(2), OpenId(3)), IntMatrix::from_i64(1, 1, &[2]));
        Presheaf::from_hasse_edges(t.clone(), vec![0, 1, 1, 1], edges)
            .expect("builtin micro presheaf is well-formed")
    };
    let tau = |time: &GeneralizedTimeCategory| -> TimePresheaf {
        let values: BTreeMap<OpenId, Rational64> = time
            .chain()
            .iter()
            .enumerate()
            .map(|(i, &v)| (v, Rational64::from_integer(i as i64)))
            .collect();
        TimePresheaf::new(time, values).expect("builtin labels are monotone")
    };

    let make_entity = |name: &str| -> Entity {
        Entity::new(
            name,
            time.clone(),
            micro(&topology),
            Presheaf::constant(topology.clone(), 1),
            tau(&time),
        )
        .expect("builtin entities are well-formed")
    };
    let observed = make_entity("e");
    let partner = make_entity("e'");
    let observer = make_entity("P");

    let correlation: BTreeMap<OpenId, IntMatrix> = topology
        .open_ids()
        .map(|u| (u, IntMatrix::identity(observed.micro().rank(u)).negated()))
        .collect();
    let candidate: BTreeMap<OpenId, IntMatrix> = topology
        .open_ids()
        .map(|u| {
            let r = observed.micro().rank(u);
            let mut m = IntMatrix::zeros(r, r);
            for i in 0..r {
                m[(i, i)] = num_bigint::BigInt::from(5);
            }
            (u, m)
        })
        .collect();

    DemoScenario {
        observation_period: topology.full_open(),
        time,
        observed,
        partner,
        observer,
        correlation: Some(correlation),
        candidate,
        positions: vec![
            "lab-alpha".to_string(),
            "lab-beta".to_string(),
            "lab-gamma".to_string(),
        ],
    }
}

/// Runs the builtin scenario.
pub fn epr_demo() -> DemoReport {
    run_demo(&builtin_scenario())
}
