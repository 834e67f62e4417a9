//! The planning formalism: predicates, literals, learned operators, ground
//! actions, closed-world states and problems.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ontology::{EnvironmentRegistry, HAND, THING, WOODEN_CUBE};
use crate::segmentation::ActivityLabel;

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("unknown predicate `{0}`")]
    UnknownPredicate(String),
    #[error("`{pred}` takes {expected} arguments, got {got}")]
    Arity {
        pred: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("unknown instance `{0}`")]
    UnknownInstance(String),
    #[error("`{instance}` is not a {expected} (argument of `{pred}`)")]
    IllTyped {
        pred: &'static str,
        instance: String,
        expected: &'static str,
    },
    #[error("operator `{op}` uses variable `{var}` that is not a parameter")]
    UnboundVariable { op: String, var: String },
    #[error("operator `{op}` has both `{literal}` and its negation in its {part}")]
    Contradictory {
        op: String,
        literal: String,
        part: &'static str,
    },
    #[error("action `{0}` is not applicable")]
    NotApplicable(String),
    #[error("a planning problem needs at least one goal literal")]
    EmptyGoal,
    #[error("goal literal `{0}` is not ground")]
    NonGroundGoal(String),
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed goal file: {0}")]
    Json(#[from] serde_json::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Predicate {
    #[serde(rename = "inHand")]
    InHand,
    #[serde(rename = "actedOn")]
    ActedOn,
    #[serde(rename = "handMove")]
    HandMove,
    #[serde(rename = "graspable")]
    Graspable,
    #[serde(rename = "handOpen")]
    HandOpen,
    #[serde(rename = "inTouch")]
    InTouch,
    #[serde(rename = "onTop")]
    OnTop,
    #[serde(rename = "neq")]
    Neq,
}

impl Predicate {
    /// Declaration order used in emitted domains.
    pub const DECLARED: [Predicate; 7] = [
        Predicate::InHand,
        Predicate::ActedOn,
        Predicate::HandOpen,
        Predicate::HandMove,
        Predicate::OnTop,
        Predicate::InTouch,
        Predicate::Graspable,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Predicate::InHand => "inHand",
            Predicate::ActedOn => "actedOn",
            Predicate::HandMove => "handMove",
            Predicate::Graspable => "graspable",
            Predicate::HandOpen => "handOpen",
            Predicate::InTouch => "inTouch",
            Predicate::OnTop => "onTop",
            Predicate::Neq => "neq",
        }
    }

    pub fn arg_types(self) -> &'static [&'static str] {
        match self {
            Predicate::InHand | Predicate::ActedOn => &[HAND, WOODEN_CUBE],
            Predicate::Graspable => &[HAND, THING],
            Predicate::HandMove | Predicate::HandOpen => &[HAND],
            Predicate::InTouch | Predicate::OnTop | Predicate::Neq => &[THING, THING],
        }
    }

    pub fn arity(self) -> usize {
        self.arg_types().len()
    }

    /// Hand variables, as opposed to relations between objects.
    pub fn is_hand(self) -> bool {
        matches!(
            self,
            Predicate::InHand
                | Predicate::ActedOn
                | Predicate::HandMove
                | Predicate::Graspable
                | Predicate::HandOpen
        )
    }

    /// Hand variables that are binary by nature, not binarized from a
    /// multi-valued variable.
    pub fn is_binary_hand(self) -> bool {
        matches!(self, Predicate::HandMove | Predicate::HandOpen)
    }
}

impl PartialOrd for Predicate {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Predicate {
    fn cmp(&self, other: &Self) -> Ordering {
        self.name().cmp(other.name())
    }
}

impl fmt::Display for Predicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Predicate {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        const ALL: [Predicate; 8] = [
            Predicate::InHand,
            Predicate::ActedOn,
            Predicate::HandMove,
            Predicate::Graspable,
            Predicate::HandOpen,
            Predicate::InTouch,
            Predicate::OnTop,
            Predicate::Neq,
        ];
        ALL.into_iter()
            .find(|p| p.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| ModelError::UnknownPredicate(s.to_string()))
    }
}

pub fn is_variable(term: &str) -> bool {
    term.starts_with('?')
}

/// A ground atom.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Atom {
    pub pred: Predicate,
    pub args: Vec<String>,
}

impl Atom {
    pub fn new(pred: Predicate, args: &[&str]) -> Self {
        Atom {
            pred,
            args: args.iter().map(|a| a.to_string()).collect(),
        }
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}({})", self.pred, self.args.join(", "))
    }
}

/// A possibly negated atom over instances or `?`-prefixed variables.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Literal {
    pub pred: Predicate,
    pub args: Vec<String>,
    pub positive: bool,
}

impl Literal {
    pub fn new(pred: Predicate, args: &[&str], positive: bool) -> Self {
        Literal {
            pred,
            args: args.iter().map(|a| a.to_string()).collect(),
            positive,
        }
    }

    pub fn pos(pred: Predicate, args: &[&str]) -> Self {
        Self::new(pred, args, true)
    }

    pub fn neg(pred: Predicate, args: &[&str]) -> Self {
        Self::new(pred, args, false)
    }

    pub fn from_atom(atom: Atom, positive: bool) -> Self {
        Literal {
            pred: atom.pred,
            args: atom.args,
            positive,
        }
    }

    pub fn atom(&self) -> Atom {
        Atom {
            pred: self.pred,
            args: self.args.clone(),
        }
    }

    pub fn negated(&self) -> Self {
        Literal {
            positive: !self.positive,
            ..self.clone()
        }
    }

    pub fn is_ground(&self) -> bool {
        !self.args.iter().any(|a| is_variable(a))
    }

    pub fn check_arity(&self) -> Result<(), ModelError> {
        if self.args.len() != self.pred.arity() {
            return Err(ModelError::Arity {
                pred: self.pred.name(),
                expected: self.pred.arity(),
                got: self.args.len(),
            });
        }
        Ok(())
    }

    /// Arity and argument types of a ground literal against a registry.
    pub fn check_ground(&self, registry: &EnvironmentRegistry) -> Result<(), ModelError> {
        self.check_arity()?;
        for (arg, ty) in self.args.iter().zip(self.pred.arg_types()) {
            if is_variable(arg) {
                return Err(ModelError::NonGroundGoal(self.to_string()));
            }
            if !registry.contains(arg) {
                return Err(ModelError::UnknownInstance(arg.clone()));
            }
            if !registry.is_instance_of(arg, ty) {
                return Err(ModelError::IllTyped {
                    pred: self.pred.name(),
                    instance: arg.clone(),
                    expected: ty,
                });
            }
        }
        Ok(())
    }

    pub fn substitute(&self, binding: &BTreeMap<String, String>) -> Literal {
        Literal {
            pred: self.pred,
            args: self
                .args
                .iter()
                .map(|a| binding.get(a).cloned().unwrap_or_else(|| a.clone()))
                .collect(),
            positive: self.positive,
        }
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if !self.positive {
            f.write_str("¬")?;
        }
        write!(f, "{}({})", self.pred, self.args.join(", "))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Param {
    pub name: String,
    #[serde(rename = "type")]
    pub ty: String,
}

impl Param {
    pub fn new(name: impl Into<String>, ty: impl Into<String>) -> Self {
        Param {
            name: name.into(),
            ty: ty.into(),
        }
    }
}

/// Universally quantified conditional effect: for every cube `?x` other
/// than `keep`, `pred(hand, ?x)` becomes false.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Revocation {
    pub pred: Predicate,
    pub hand: String,
    pub keep: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LearnedOperator {
    pub activity: ActivityLabel,
    pub config_index: u32,
    pub params: Vec<Param>,
    pub pre: BTreeSet<Literal>,
    pub eff: BTreeSet<Literal>,
    /// Number of observations; absent when read back from PDDL.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub count: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cost: Option<u32>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub revocations: Vec<Revocation>,
}

impl LearnedOperator {
    pub fn name(&self) -> String {
        operator_name(self.activity, self.config_index)
    }

    pub fn count(&self) -> u32 {
        self.count.unwrap_or(0)
    }

    pub fn is_repaired(&self) -> bool {
        !self.revocations.is_empty()
    }

    pub fn same_configuration(&self, other: &LearnedOperator) -> bool {
        self.activity == other.activity && self.pre == other.pre && self.eff == other.eff
    }

    pub fn param_type(&self, var: &str) -> Option<&str> {
        self.params
            .iter()
            .find(|p| p.name == var)
            .map(|p| p.ty.as_str())
    }

    /// Checks variable housing, arities and consistency of each literal set.
    pub fn validate(&self) -> Result<(), ModelError> {
        let name = self.name();
        let literals = self.pre.iter().chain(&self.eff);
        for lit in literals {
            lit.check_arity()?;
            for arg in &lit.args {
                if is_variable(arg) && self.param_type(arg).is_none() {
                    return Err(ModelError::UnboundVariable {
                        op: name.clone(),
                        var: arg.clone(),
                    });
                }
            }
        }
        for rev in &self.revocations {
            for var in [&rev.hand, &rev.keep] {
                if self.param_type(var).is_none() {
                    return Err(ModelError::UnboundVariable {
                        op: name.clone(),
                        var: var.clone(),
                    });
                }
            }
        }
        for (part, set) in [("preconditions", &self.pre), ("effects", &self.eff)] {
            if let Some(lit) = set.iter().find(|l| set.contains(&l.negated())) {
                return Err(ModelError::Contradictory {
                    op: name.clone(),
                    literal: lit.to_string(),
                    part,
                });
            }
        }
        Ok(())
    }
}

pub fn operator_name(activity: ActivityLabel, config_index: u32) -> String {
    if config_index > 1 {
        format!("{}{}", activity.as_str(), config_index)
    } else {
        activity.as_str().to_string()
    }
}

/// Splits `Stack2` into (`Stack`, 2).
pub fn parse_operator_name(name: &str) -> Option<(ActivityLabel, u32)> {
    let digits = name.trim_end_matches(|c: char| c.is_ascii_digit());
    let activity: ActivityLabel = digits.parse().ok()?;
    let suffix = &name[digits.len()..];
    if suffix.is_empty() {
        Some((activity, 1))
    } else {
        let index: u32 = suffix.parse().ok()?;
        (index > 1).then_some((activity, index))
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct OperatorLibrary {
    pub operators: Vec<LearnedOperator>,
}

impl OperatorLibrary {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.operators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.operators.is_empty()
    }

    pub fn get(&self, name: &str) -> Option<&LearnedOperator> {
        self.operators.iter().find(|o| o.name() == name)
    }

    pub fn of_activity(&self, activity: ActivityLabel) -> impl Iterator<Item = &LearnedOperator> {
        self.operators
            .iter()
            .filter(move |o| o.activity == activity)
    }

    /// Total observations of one activity across its configurations.
    pub fn type_count(&self, activity: ActivityLabel) -> u32 {
        self.of_activity(activity).map(|o| o.count()).sum()
    }

    pub fn configuration_count(&self, activity: ActivityLabel) -> usize {
        self.of_activity(activity).count()
    }

    pub fn is_repaired(&self) -> bool {
        self.operators.iter().any(|o| o.is_repaired())
    }

    /// Adds `op`'s observations to an equal configuration, or appends it as
    /// the next configuration of its activity.
    pub fn observe(&mut self, mut op: LearnedOperator) {
        if let Some(existing) = self
            .operators
            .iter_mut()
            .find(|o| o.same_configuration(&op))
        {
            existing.count = Some(existing.count() + op.count());
            return;
        }
        op.config_index = self.configuration_count(op.activity) as u32 + 1;
        self.operators.push(op);
    }

    pub fn merge(&mut self, other: OperatorLibrary) {
        for op in other.operators {
            self.observe(op);
        }
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        self.operators.iter().try_for_each(|o| o.validate())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("library serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }
}

/// An operator instantiated over concrete instances, with its literals
/// resolved into atom lists.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GroundAction {
    pub operator: String,
    pub activity: ActivityLabel,
    /// Instances bound to the operator's parameters, in parameter order.
    pub args: Vec<String>,
    pub pre_pos: Vec<Atom>,
    pub pre_neg: Vec<Atom>,
    pub add: Vec<Atom>,
    pub del: Vec<Atom>,
    pub cost: u32,
}

impl GroundAction {
    /// Instantiates `op` under `binding` (variable → instance). Revocations
    /// expand over `cubes`.
    pub fn instantiate(
        op: &LearnedOperator,
        binding: &BTreeMap<String, String>,
        cubes: &[&str],
    ) -> GroundAction {
        let mut pre_pos = Vec::new();
        let mut pre_neg = Vec::new();
        for lit in op.pre.iter().filter(|l| l.pred != Predicate::Neq) {
            let atom = lit.substitute(binding).atom();
            if lit.positive {
                pre_pos.push(atom);
            } else {
                pre_neg.push(atom);
            }
        }
        let mut add = Vec::new();
        let mut del = Vec::new();
        for lit in &op.eff {
            let atom = lit.substitute(binding).atom();
            if lit.positive {
                add.push(atom);
            } else {
                del.push(atom);
            }
        }
        for rev in &op.revocations {
            let hand = &binding[&rev.hand];
            let keep = &binding[&rev.keep];
            for cube in cubes.iter().filter(|c| **c != keep.as_str()) {
                let atom = Atom::new(rev.pred, &[hand, cube]);
                if !add.contains(&atom) && !del.contains(&atom) {
                    del.push(atom);
                }
            }
        }
        GroundAction {
            operator: op.name(),
            activity: op.activity,
            args: op.params.iter().map(|p| binding[&p.name].clone()).collect(),
            pre_pos,
            pre_neg,
            add,
            del,
            cost: op.cost.unwrap_or(1),
        }
    }

    pub fn label(&self) -> String {
        format!("({} {})", self.operator, self.args.join(" "))
    }

    pub fn instances(&self) -> impl Iterator<Item = &String> {
        self.args.iter().chain(
            self.pre_pos
                .iter()
                .chain(&self.pre_neg)
                .chain(&self.add)
                .chain(&self.del)
                .flat_map(|a| a.args.iter()),
        )
    }
}

/// Closed-world state: the set of true ground atoms.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct WorldState(pub BTreeSet<Atom>);

impl WorldState {
    pub fn new(atoms: impl IntoIterator<Item = Atom>) -> Self {
        WorldState(atoms.into_iter().collect())
    }

    /// Every cube resting on the table, every hand open and still.
    pub fn resting(registry: &EnvironmentRegistry) -> Self {
        let table = registry.table();
        let mut atoms = BTreeSet::new();
        for cube in registry.cubes() {
            atoms.insert(Atom::new(Predicate::OnTop, &[cube, table]));
            atoms.insert(Atom::new(Predicate::InTouch, &[cube, table]));
            atoms.insert(Atom::new(Predicate::InTouch, &[table, cube]));
        }
        for hand in registry.hands() {
            atoms.insert(Atom::new(Predicate::HandOpen, &[hand]));
        }
        WorldState(atoms)
    }

    pub fn contains(&self, atom: &Atom) -> bool {
        self.0.contains(atom)
    }

    pub fn holds(&self, literal: &Literal) -> bool {
        if literal.pred == Predicate::Neq {
            return (literal.args[0] != literal.args[1]) == literal.positive;
        }
        self.0.contains(&literal.atom()) == literal.positive
    }

    pub fn atoms(&self) -> impl Iterator<Item = &Atom> {
        self.0.iter()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

pub fn applicable(state: &WorldState, action: &GroundAction) -> bool {
    action.pre_pos.iter().all(|a| state.contains(a))
        && !action.pre_neg.iter().any(|a| state.contains(a))
}

/// Delete-before-add successor.
pub fn apply(state: &WorldState, action: &GroundAction) -> Result<WorldState, ModelError> {
    if !applicable(state, action) {
        return Err(ModelError::NotApplicable(action.label()));
    }
    let mut next = state.0.clone();
    for atom in &action.del {
        next.remove(atom);
    }
    next.extend(action.add.iter().cloned());
    Ok(WorldState(next))
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlanningProblem {
    pub registry: EnvironmentRegistry,
    pub init: WorldState,
    pub goal: Vec<Literal>,
}

impl PlanningProblem {
    pub fn new(
        registry: EnvironmentRegistry,
        init: WorldState,
        goal: Vec<Literal>,
    ) -> Result<Self, ModelError> {
        if goal.is_empty() {
            return Err(ModelError::EmptyGoal);
        }
        for lit in &goal {
            lit.check_ground(&registry)?;
        }
        for atom in init.atoms() {
            Literal::from_atom(atom.clone(), true).check_ground(&registry)?;
        }
        Ok(PlanningProblem {
            registry,
            init,
            goal,
        })
    }

    pub fn goal_satisfied(&self, state: &WorldState) -> bool {
        self.goal.iter().all(|l| state.holds(l))
    }
}

/// Goal file entry: `{"pred": "onTop", "args": [..], "positive": true}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GoalLiteral {
    pub pred: String,
    pub args: Vec<String>,
    #[serde(default = "yes")]
    pub positive: bool,
}

fn yes() -> bool {
    true
}

pub fn parse_goal(text: &str) -> Result<Vec<Literal>, ModelError> {
    let entries: Vec<GoalLiteral> = serde_json::from_str(text)?;
    entries
        .into_iter()
        .map(|g| {
            let lit = Literal {
                pred: g.pred.parse()?,
                args: g.args,
                positive: g.positive,
            };
            lit.check_arity()?;
            Ok(lit)
        })
        .collect()
}

pub fn goal_to_json(goal: &[Literal]) -> String {
    let entries: Vec<GoalLiteral> = goal
        .iter()
        .map(|l| GoalLiteral {
            pred: l.pred.name().to_string(),
            args: l.args.clone(),
            positive: l.positive,
        })
        .collect();
    serde_json::to_string_pretty(&entries).expect("goal serializes")
}

pub fn load_goal(path: impl AsRef<Path>) -> Result<Vec<Literal>, ModelError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| ModelError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_goal(&text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use Predicate::*;

    // Pick up a cube resting on the table: the cube stays on the table but
    // ends up in the hand.
    fn operator1() -> LearnedOperator {
        LearnedOperator {
            activity: ActivityLabel::Take,
            config_index: 1,
            params: vec![
                Param::new("?Hand1", HAND),
                Param::new("?Table1", "Table"),
                Param::new("?Wooden_cube1", WOODEN_CUBE),
            ],
            pre: BTreeSet::from([
                Literal::pos(OnTop, &["?Wooden_cube1", "?Table1"]),
                Literal::neg(InHand, &["?Hand1", "?Wooden_cube1"]),
            ]),
            eff: BTreeSet::from([
                Literal::pos(OnTop, &["?Wooden_cube1", "?Table1"]),
                Literal::pos(InHand, &["?Hand1", "?Wooden_cube1"]),
            ]),
            count: Some(1),
            cost: Some(1),
            revocations: vec![],
        }
    }

    fn bind(pairs: &[(&str, &str)]) -> BTreeMap<String, String> {
        pairs
            .iter()
            .map(|(a, b)| (a.to_string(), b.to_string()))
            .collect()
    }

    fn operator1_action() -> GroundAction {
        GroundAction::instantiate(
            &operator1(),
            &bind(&[
                ("?Hand1", "Robot_gripper"),
                ("?Table1", "high_table"),
                ("?Wooden_cube1", "Cube_red3"),
            ]),
            &[],
        )
    }

    #[test]
    fn operator1_applicability() {
        let action = operator1_action();
        let on_table = Atom::new(OnTop, &["Cube_red3", "high_table"]);
        let held = Atom::new(InHand, &["Robot_gripper", "Cube_red3"]);
        let state = WorldState::new([on_table.clone()]);
        assert!(applicable(&state, &action));
        let holding = WorldState::new([on_table.clone(), held.clone()]);
        assert!(!applicable(&holding, &action));
        assert!(matches!(
            apply(&holding, &action),
            Err(ModelError::NotApplicable(_))
        ));

        let next = apply(&state, &action).unwrap();
        assert!(next.contains(&held));
        assert!(next.contains(&on_table));
    }

    #[test]
    fn empty_operator_is_identity() {
        let mut op = operator1();
        op.pre.clear();
        op.eff.clear();
        let action = GroundAction::instantiate(
            &op,
            &bind(&[("?Hand1", "h"), ("?Table1", "t"), ("?Wooden_cube1", "c")]),
            &[],
        );
        let state = WorldState::new([Atom::new(HandOpen, &["h"])]);
        assert!(applicable(&state, &action));
        assert_eq!(apply(&state, &action).unwrap(), state);
    }

    #[test]
    fn contradictory_effects_rejected() {
        let mut op = operator1();
        op.eff
            .insert(Literal::neg(InHand, &["?Hand1", "?Wooden_cube1"]));
        assert!(matches!(
            op.validate(),
            Err(ModelError::Contradictory { .. })
        ));
    }

    #[test]
    fn unhoused_variable_rejected() {
        let mut op = operator1();
        op.pre.insert(Literal::pos(HandMove, &["?Hand2"]));
        assert!(matches!(
            op.validate(),
            Err(ModelError::UnboundVariable { .. })
        ));
    }

    #[test]
    fn names_round_trip() {
        assert_eq!(operator_name(ActivityLabel::Stack, 1), "Stack");
        assert_eq!(operator_name(ActivityLabel::Stack, 2), "Stack2");
        assert_eq!(
            parse_operator_name("Stack2"),
            Some((ActivityLabel::Stack, 2))
        );
        assert_eq!(
            parse_operator_name("IdleMotion"),
            Some((ActivityLabel::IdleMotion, 1))
        );
        assert_eq!(parse_operator_name("Stack1"), None);
        assert_eq!(parse_operator_name("Operator1"), None);
    }

    #[test]
    fn observe_merges_equal_configurations() {
        let mut lib = OperatorLibrary::new();
        lib.observe(operator1());
        lib.observe(operator1());
        let mut other = operator1();
        other.eff.insert(Literal::pos(HandMove, &["?Hand1"]));
        lib.observe(other);
        assert_eq!(lib.len(), 2);
        assert_eq!(lib.operators[0].count, Some(2));
        assert_eq!(lib.operators[1].name(), "Take2");
        assert_eq!(lib.type_count(ActivityLabel::Take), 3);
    }

    #[test]
    fn goal_file_parsing() {
        let goal =
            parse_goal(r#"[{"pred":"onTop","args":["Cube_red3","Cube_green3"],"positive":true}]"#)
                .unwrap();
        assert_eq!(
            goal,
            vec![Literal::pos(OnTop, &["Cube_red3", "Cube_green3"])]
        );
        assert!(parse_goal(r#"[{"pred":"above","args":["a","b"]}]"#).is_err());
        let reg = EnvironmentRegistry::execution();
        assert!(matches!(
            PlanningProblem::new(reg.clone(), WorldState::resting(&reg), vec![]),
            Err(ModelError::EmptyGoal)
        ));
        let unknown = vec![Literal::pos(OnTop, &["Cube_red1", "Cube_green3"])];
        assert!(matches!(
            PlanningProblem::new(reg.clone(), WorldState::resting(&reg), unknown),
            Err(ModelError::UnknownInstance(_))
        ));
    }
}
