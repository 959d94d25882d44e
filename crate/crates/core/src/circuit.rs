//! Concrete circuits: labeled wires, flat gate lists, fresh interface
//! generation, appending, reversal, gate counting and text export.
//!
//! A circuit is stored in single-assignment form: every gate consumes its
//! input wires and produces freshly labeled output wires, so a label names
//! exactly one wire segment.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use thiserror::Error;

use crate::syntax::{is_simple_type, Constant, Term, TermKind, Type};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sort {
    Qubit,
    Bit,
}

impl Sort {
    pub fn letter(self) -> char {
        match self {
            Sort::Qubit => 'Q',
            Sort::Bit => 'B',
        }
    }

    pub fn to_type(self) -> Type {
        match self {
            Sort::Qubit => Type::Qubit,
            Sort::Bit => Type::Bit,
        }
    }
}

/// A wire identifier. Ids are issued by a [`LabelSupply`] and are globally
/// unique within one evaluation run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Label {
    pub id: u32,
    pub sort: Sort,
}

impl Label {
    pub fn qubit(id: u32) -> Label {
        Label {
            id,
            sort: Sort::Qubit,
        }
    }

    pub fn bit(id: u32) -> Label {
        Label {
            id,
            sort: Sort::Bit,
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "l{}", self.id)
    }
}

/// Monotone source of fresh labels.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LabelSupply {
    next: u32,
}

impl LabelSupply {
    pub fn new() -> LabelSupply {
        LabelSupply::default()
    }

    /// A supply whose labels are all at least `next`.
    pub fn starting_at(next: u32) -> LabelSupply {
        LabelSupply { next }
    }

    pub fn peek(&self) -> u32 {
        self.next
    }

    pub fn fresh(&mut self, sort: Sort) -> Label {
        let id = self.next;
        self.next += 1;
        Label { id, sort }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GateKind {
    H,
    X,
    Y,
    Z,
    S,
    T,
    Sdg,
    Tdg,
    Cnot,
    Cz,
    Init0,
    Meas,
    Discard,
}

impl GateKind {
    pub const ALL: [GateKind; 13] = [
        GateKind::H,
        GateKind::X,
        GateKind::Y,
        GateKind::Z,
        GateKind::S,
        GateKind::T,
        GateKind::Sdg,
        GateKind::Tdg,
        GateKind::Cnot,
        GateKind::Cz,
        GateKind::Init0,
        GateKind::Meas,
        GateKind::Discard,
    ];

    pub fn name(self) -> &'static str {
        match self {
            GateKind::H => "H",
            GateKind::X => "X",
            GateKind::Y => "Y",
            GateKind::Z => "Z",
            GateKind::S => "S",
            GateKind::T => "T",
            GateKind::Sdg => "Sdg",
            GateKind::Tdg => "Tdg",
            GateKind::Cnot => "CNOT",
            GateKind::Cz => "CZ",
            GateKind::Init0 => "Init0",
            GateKind::Meas => "Meas",
            GateKind::Discard => "Discard",
        }
    }

    pub fn from_name(s: &str) -> Option<GateKind> {
        GateKind::ALL.into_iter().find(|g| g.name() == s)
    }

    pub fn input_sorts(self) -> &'static [Sort] {
        match self {
            GateKind::Cnot | GateKind::Cz => &[Sort::Qubit, Sort::Qubit],
            GateKind::Init0 => &[],
            GateKind::Discard => &[Sort::Bit],
            _ => &[Sort::Qubit],
        }
    }

    pub fn output_sorts(self) -> &'static [Sort] {
        match self {
            GateKind::Cnot | GateKind::Cz => &[Sort::Qubit, Sort::Qubit],
            GateKind::Meas => &[Sort::Bit],
            GateKind::Discard => &[],
            _ => &[Sort::Qubit],
        }
    }

    pub fn inverse(self) -> Option<GateKind> {
        match self {
            GateKind::S => Some(GateKind::Sdg),
            GateKind::Sdg => Some(GateKind::S),
            GateKind::T => Some(GateKind::Tdg),
            GateKind::Tdg => Some(GateKind::T),
            GateKind::Init0 | GateKind::Meas | GateKind::Discard => None,
            g => Some(g),
        }
    }

    /// The gate's type `Circ(S, U)`.
    pub fn circ_type(self) -> Type {
        Type::circ(
            sorts_to_type(self.input_sorts()),
            sorts_to_type(self.output_sorts()),
        )
    }
}

fn sorts_to_type(sorts: &[Sort]) -> Type {
    match sorts {
        [] => Type::Unit,
        [s] => s.to_type(),
        [s, rest @ ..] => Type::pair(s.to_type(), sorts_to_type(rest)),
    }
}

fn labels_to_iface(labels: &[Label]) -> Term {
    match labels {
        [] => Term::unit(),
        [l] => Term::label(*l),
        [l, rest @ ..] => Term::pair(Term::label(*l), labels_to_iface(rest)),
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Gate {
    pub kind: GateKind,
    pub inputs: Vec<Label>,
    pub outputs: Vec<Label>,
}

/// A circuit from the label context `inputs` to the label context `outputs`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Circuit {
    pub inputs: Vec<Label>,
    pub outputs: Vec<Label>,
    pub gates: Vec<Gate>,
}

/// A first-class circuit value `(a, C, b)`.
#[derive(Clone, Debug)]
pub struct BoxedCircuit {
    pub input: Term,
    pub circuit: Circuit,
    pub output: Term,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CircuitError {
    #[error("not a simple type: {0}")]
    NotSimpleType(String),
    #[error("interface mismatch: {0}")]
    InterfaceMismatch(String),
    #[error("gate {0} has no inverse")]
    NotReversible(&'static str),
    #[error("wire liveness violated: {0}")]
    Liveness(String),
}

/// Generates a fresh inhabitant of a simple type. Vector lengths must be
/// closed numerals.
pub fn gen(ty: &Type, supply: &mut LabelSupply) -> Result<Term, CircuitError> {
    if !is_simple_type(ty) {
        return Err(CircuitError::NotSimpleType(crate::front::pretty_type(ty)));
    }
    gen_simple(ty, supply)
}

fn gen_simple(ty: &Type, supply: &mut LabelSupply) -> Result<Term, CircuitError> {
    match ty {
        Type::Unit => Ok(Term::unit()),
        Type::Qubit => Ok(Term::label(supply.fresh(Sort::Qubit))),
        Type::Bit => Ok(Term::label(supply.fresh(Sort::Bit))),
        Type::Tensor(_, s, u) => {
            let left = gen_simple(s, supply)?;
            let right = gen_simple(u, supply)?;
            Ok(Term::pair(left, right))
        }
        Type::Vec(elem, len) => {
            let n = len.as_numeral().ok_or_else(|| {
                CircuitError::NotSimpleType(format!(
                    "vector length `{}` is not a closed numeral",
                    crate::front::pretty_term(len)
                ))
            })?;
            let items = (0..n)
                .map(|_| gen_simple(elem, supply))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(Term::vector(items))
        }
        other => Err(CircuitError::NotSimpleType(crate::front::pretty_type(
            other,
        ))),
    }
}

/// Labels of a simple term in left-to-right order, or `None` if the term
/// is not a simple term.
pub fn interface_labels(iface: &Term) -> Option<Vec<Label>> {
    fn go(t: &Term, out: &mut Vec<Label>) -> bool {
        match &*t.kind {
            TermKind::Unit => true,
            TermKind::Label(l) => {
                out.push(*l);
                true
            }
            TermKind::Pair(a, b) => go(a, out) && go(b, out),
            TermKind::Const(Constant::VNil, args) => args.is_empty(),
            TermKind::Const(Constant::VCons, args) if args.len() == 2 => {
                go(&args[0], out) && go(&args[1], out)
            }
            _ => false,
        }
    }
    let mut out = Vec::new();
    go(iface, &mut out).then_some(out)
}

pub fn identity_circuit(iface: &Term) -> Circuit {
    let labels = interface_labels(iface).unwrap_or_default();
    Circuit {
        inputs: labels.clone(),
        outputs: labels,
        gates: Vec::new(),
    }
}

/// Builds the boxed circuit of a single gate using fresh labels.
pub fn gate_circuit(kind: GateKind, supply: &mut LabelSupply) -> BoxedCircuit {
    let inputs: Vec<Label> = kind
        .input_sorts()
        .iter()
        .map(|s| supply.fresh(*s))
        .collect();
    let outputs: Vec<Label> = kind
        .output_sorts()
        .iter()
        .map(|s| supply.fresh(*s))
        .collect();
    BoxedCircuit {
        input: labels_to_iface(&inputs),
        output: labels_to_iface(&outputs),
        circuit: Circuit {
            inputs: inputs.clone(),
            outputs: outputs.clone(),
            gates: vec![Gate {
                kind,
                inputs,
                outputs,
            }],
        },
    }
}

fn match_interfaces(
    formal: &Term,
    actual: &Term,
    map: &mut HashMap<u32, Label>,
) -> Result<(), CircuitError> {
    let mismatch = || {
        CircuitError::InterfaceMismatch(format!(
            "expected an interface shaped like `{}`, found `{}`",
            crate::front::pretty_term(formal),
            crate::front::pretty_term(actual)
        ))
    };
    match (&*formal.kind, &*actual.kind) {
        (TermKind::Unit, TermKind::Unit) => Ok(()),
        (TermKind::Label(a), TermKind::Label(c)) => {
            if a.sort != c.sort {
                return Err(mismatch());
            }
            if map.insert(a.id, *c).is_some() {
                return Err(CircuitError::InterfaceMismatch(format!(
                    "label {a} occurs twice in an interface"
                )));
            }
            Ok(())
        }
        (TermKind::Pair(a1, a2), TermKind::Pair(c1, c2)) => {
            match_interfaces(a1, c1, map)?;
            match_interfaces(a2, c2, map)
        }
        (TermKind::Const(Constant::VNil, a), TermKind::Const(Constant::VNil, c))
            if a.is_empty() && c.is_empty() =>
        {
            Ok(())
        }
        (TermKind::Const(Constant::VCons, a), TermKind::Const(Constant::VCons, c))
            if a.len() == 2 && c.len() == 2 =>
        {
            match_interfaces(&a[0], &c[0], map)?;
            match_interfaces(&a[1], &c[1], map)
        }
        _ => Err(mismatch()),
    }
}

fn rename_iface(t: &Term, map: &HashMap<u32, Label>) -> Result<Term, CircuitError> {
    Ok(match &*t.kind {
        TermKind::Label(l) => Term::label(*map.get(&l.id).ok_or_else(|| {
            CircuitError::Liveness(format!("output label {l} is not produced by the circuit"))
        })?),
        TermKind::Pair(a, b) => Term::pair(rename_iface(a, map)?, rename_iface(b, map)?),
        TermKind::Const(c, args) => Term::constant(
            *c,
            args.iter()
                .map(|a| rename_iface(a, map))
                .collect::<Result<_, _>>()?,
        ),
        _ => t.clone(),
    })
}

/// Connects the input interface of `boxed` to the outputs of `circuit`
/// named by `iface`. Wires created inside `boxed` receive fresh labels.
/// Returns the combined circuit and the relabeled output interface.
pub fn append(
    circuit: &Circuit,
    iface: &Term,
    boxed: &BoxedCircuit,
    supply: &mut LabelSupply,
) -> Result<(Circuit, Term), CircuitError> {
    let used = interface_labels(iface).ok_or_else(|| {
        CircuitError::InterfaceMismatch(format!(
            "`{}` is not a simple term",
            crate::front::pretty_term(iface)
        ))
    })?;
    let live: BTreeSet<Label> = circuit.outputs.iter().copied().collect();
    for l in &used {
        if !live.contains(l) {
            return Err(CircuitError::Liveness(format!(
                "label {l} is not an output of the current circuit"
            )));
        }
    }
    let mut map = HashMap::new();
    match_interfaces(&boxed.input, iface, &mut map)?;

    let mut gates = circuit.gates.clone();
    for gate in &boxed.circuit.gates {
        let inputs = gate
            .inputs
            .iter()
            .map(|l| {
                map.remove(&l.id).ok_or_else(|| {
                    CircuitError::Liveness(format!("gate {} reads dead wire {l}", gate.kind.name()))
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        let outputs: Vec<Label> = gate
            .outputs
            .iter()
            .map(|l| {
                let fresh = supply.fresh(l.sort);
                map.insert(l.id, fresh);
                fresh
            })
            .collect();
        gates.push(Gate {
            kind: gate.kind,
            inputs,
            outputs,
        });
    }
    let output = rename_iface(&boxed.output, &map)?;
    let produced = interface_labels(&output).unwrap_or_default();
    let used: BTreeSet<Label> = used.into_iter().collect();
    let mut outputs = produced;
    outputs.extend(circuit.outputs.iter().filter(|l| !used.contains(l)));
    Ok((
        Circuit {
            inputs: circuit.inputs.clone(),
            outputs,
            gates,
        },
        output,
    ))
}

/// Reverses a circuit built from invertible gates, swapping its interfaces.
pub fn reverse(boxed: &BoxedCircuit) -> Result<BoxedCircuit, CircuitError> {
    let gates = boxed
        .circuit
        .gates
        .iter()
        .rev()
        .map(|g| {
            Ok(Gate {
                kind: g
                    .kind
                    .inverse()
                    .ok_or(CircuitError::NotReversible(g.kind.name()))?,
                inputs: g.outputs.clone(),
                outputs: g.inputs.clone(),
            })
        })
        .collect::<Result<Vec<_>, CircuitError>>()?;
    Ok(BoxedCircuit {
        input: boxed.output.clone(),
        output: boxed.input.clone(),
        circuit: Circuit {
            inputs: boxed.circuit.outputs.clone(),
            outputs: boxed.circuit.inputs.clone(),
            gates,
        },
    })
}

pub fn gate_count(circuit: &Circuit) -> BTreeMap<&'static str, usize> {
    let mut counts = BTreeMap::new();
    for g in &circuit.gates {
        *counts.entry(g.kind.name()).or_insert(0) += 1;
    }
    counts
}

impl Circuit {
    /// Replays the gate list from the input context and checks that it ends
    /// in exactly the output context.
    pub fn replay(&self) -> Result<(), CircuitError> {
        let mut live: BTreeSet<Label> = BTreeSet::new();
        let mut seen: BTreeSet<u32> = BTreeSet::new();
        for l in &self.inputs {
            if !seen.insert(l.id) {
                return Err(CircuitError::Liveness(format!("input {l} listed twice")));
            }
            live.insert(*l);
        }
        for g in &self.gates {
            let in_sorts: Vec<Sort> = g.inputs.iter().map(|l| l.sort).collect();
            let out_sorts: Vec<Sort> = g.outputs.iter().map(|l| l.sort).collect();
            if in_sorts != g.kind.input_sorts() || out_sorts != g.kind.output_sorts() {
                return Err(CircuitError::Liveness(format!(
                    "gate {} applied to wires of the wrong arity or sort",
                    g.kind.name()
                )));
            }
            for l in &g.inputs {
                if !live.remove(l) {
                    return Err(CircuitError::Liveness(format!(
                        "gate {} reads dead wire {l}",
                        g.kind.name()
                    )));
                }
            }
            for l in &g.outputs {
                if !seen.insert(l.id) {
                    return Err(CircuitError::Liveness(format!(
                        "gate {} reuses label {l}",
                        g.kind.name()
                    )));
                }
                live.insert(*l);
            }
        }
        let expected: BTreeSet<Label> = self.outputs.iter().copied().collect();
        if expected.len() != self.outputs.len() || expected != live {
            return Err(CircuitError::Liveness(
                "live wires after replay differ from the output context".to_string(),
            ));
        }
        Ok(())
    }
}

impl BoxedCircuit {
    /// Checks that the interfaces enumerate the circuit's contexts and that
    /// the gate list replays.
    pub fn validate(&self) -> Result<(), CircuitError> {
        let as_set = |t: &Term, what: &str| -> Result<BTreeSet<Label>, CircuitError> {
            let labels = interface_labels(t).ok_or_else(|| {
                CircuitError::InterfaceMismatch(format!("{what} interface is not a simple term"))
            })?;
            let set: BTreeSet<Label> = labels.iter().copied().collect();
            if set.len() != labels.len() {
                return Err(CircuitError::InterfaceMismatch(format!(
                    "{what} interface repeats a label"
                )));
            }
            Ok(set)
        };
        let ins = as_set(&self.input, "input")?;
        let outs = as_set(&self.output, "output")?;
        if ins != self.circuit.inputs.iter().copied().collect::<BTreeSet<_>>() {
            return Err(CircuitError::InterfaceMismatch(
                "input interface does not enumerate the circuit inputs".to_string(),
            ));
        }
        if outs
            != self
                .circuit
                .outputs
                .iter()
                .copied()
                .collect::<BTreeSet<_>>()
        {
            return Err(CircuitError::InterfaceMismatch(
                "output interface does not enumerate the circuit outputs".to_string(),
            ));
        }
        self.circuit.replay()
    }

    /// Relabels wires 0, 1, ... in order of first appearance: input
    /// interface first, then gate outputs. Two circuits that differ only by
    /// a renaming of labels have equal canonical forms.
    pub fn canonical(&self) -> BoxedCircuit {
        let mut map: HashMap<u32, Label> = HashMap::new();
        let mut next = 0u32;
        let mut visit = |l: &Label, map: &mut HashMap<u32, Label>| {
            map.entry(l.id).or_insert_with(|| {
                let fresh = Label {
                    id: next,
                    sort: l.sort,
                };
                next += 1;
                fresh
            });
        };
        for l in interface_labels(&self.input).unwrap_or_default() {
            visit(&l, &mut map);
        }
        for l in &self.circuit.inputs {
            visit(l, &mut map);
        }
        for g in &self.circuit.gates {
            for l in &g.outputs {
                visit(l, &mut map);
            }
        }
        for l in &self.circuit.outputs {
            visit(l, &mut map);
        }
        let rl = |l: &Label| map[&l.id];
        let mut inputs: Vec<Label> = self.circuit.inputs.iter().map(rl).collect();
        let mut outputs: Vec<Label> = self.circuit.outputs.iter().map(rl).collect();
        inputs.sort();
        outputs.sort();
        BoxedCircuit {
            input: rename_iface(&self.input, &map).unwrap_or_else(|_| self.input.clone()),
            output: rename_iface(&self.output, &map).unwrap_or_else(|_| self.output.clone()),
            circuit: Circuit {
                inputs,
                outputs,
                gates: self
                    .circuit
                    .gates
                    .iter()
                    .map(|g| Gate {
                        kind: g.kind,
                        inputs: g.inputs.iter().map(rl).collect(),
                        outputs: g.outputs.iter().map(rl).collect(),
                    })
                    .collect(),
            },
        }
    }

    /// Equality up to a renaming of labels.
    pub fn equiv(&self, other: &BoxedCircuit) -> bool {
        let (a, b) = (self.canonical(), other.canonical());
        a.circuit == b.circuit
            && crate::syntax::alpha_eq(&a.input, &b.input)
            && crate::syntax::alpha_eq(&a.output, &b.output)
    }
}

fn join_labels(labels: &[Label]) -> String {
    labels
        .iter()
        .map(|l| l.to_string())
        .collect::<Vec<_>>()
        .join(", ")
}

fn join_context(labels: &[Label]) -> String {
    labels
        .iter()
        .map(|l| format!("{l}:{}", l.sort.letter()))
        .collect::<Vec<_>>()
        .join(", ")
}

/// Line-oriented text export:
///
/// ```text
/// INPUTS l0:Q, l1:Q
/// GATE CNOT l0, l1 -> l2, l3
/// OUTPUTS l2:Q, l3:Q
/// ```
///
/// Inputs and outputs are listed in interface order.
pub fn export_text(boxed: &BoxedCircuit) -> String {
    let ins = interface_labels(&boxed.input).unwrap_or_else(|| boxed.circuit.inputs.clone());
    let outs = interface_labels(&boxed.output).unwrap_or_else(|| boxed.circuit.outputs.clone());
    let mut out = String::new();
    push_line(&mut out, "INPUTS", &join_context(&ins));
    for g in &boxed.circuit.gates {
        let mut line = format!("GATE {}", g.kind.name());
        if !g.inputs.is_empty() {
            line.push(' ');
            line.push_str(&join_labels(&g.inputs));
        }
        line.push_str(" ->");
        if !g.outputs.is_empty() {
            line.push(' ');
            line.push_str(&join_labels(&g.outputs));
        }
        out.push_str(&line);
        out.push('\n');
    }
    push_line(&mut out, "OUTPUTS", &join_context(&outs));
    out
}

fn push_line(out: &mut String, head: &str, rest: &str) {
    out.push_str(head);
    if !rest.is_empty() {
        out.push(' ');
        out.push_str(rest);
    }
    out.push('\n');
}

/// `<name> <count>` lines sorted by gate name.
pub fn export_counts(counts: &BTreeMap<&'static str, usize>) -> String {
    counts.iter().map(|(k, v)| format!("{k} {v}\n")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(id: u32) -> Term {
        Term::label(Label::qubit(id))
    }

    fn h_boxed() -> BoxedCircuit {
        BoxedCircuit {
            input: q(0),
            output: q(1),
            circuit: Circuit {
                inputs: vec![Label::qubit(0)],
                outputs: vec![Label::qubit(1)],
                gates: vec![Gate {
                    kind: GateKind::H,
                    inputs: vec![Label::qubit(0)],
                    outputs: vec![Label::qubit(1)],
                }],
            },
        }
    }

    #[test]
    fn gen_unit_and_vectors() {
        let mut supply = LabelSupply::new();
        assert!(matches!(
            &*gen(&Type::Unit, &mut supply).unwrap().kind,
            TermKind::Unit
        ));
        let v = gen(&Type::vec(Type::Qubit, Term::nat(3)), &mut supply).unwrap();
        let labels = interface_labels(&v).unwrap();
        assert_eq!(
            labels,
            vec![Label::qubit(0), Label::qubit(1), Label::qubit(2)]
        );
        let empty = gen(&Type::vec(Type::Qubit, Term::zero()), &mut supply).unwrap();
        assert!(matches!(&*empty.kind, TermKind::Const(Constant::VNil, a) if a.is_empty()));
        assert_eq!(supply.peek(), 3);
    }

    #[test]
    fn gen_rejects_non_simple() {
        let mut supply = LabelSupply::new();
        assert!(matches!(
            gen(&Type::list(Type::Qubit), &mut supply),
            Err(CircuitError::NotSimpleType(_))
        ));
        assert!(matches!(
            gen(&Type::vec(Type::Qubit, Term::var("n")), &mut supply),
            Err(CircuitError::NotSimpleType(_))
        ));
    }

    #[test]
    fn append_single_gate_to_identity() {
        let id = identity_circuit(&q(0));
        let mut supply = LabelSupply::starting_at(2);
        let (c, out) = append(&id, &q(0), &h_boxed(), &mut supply).unwrap();
        assert_eq!(c.inputs, vec![Label::qubit(0)]);
        assert_eq!(c.outputs, vec![Label::qubit(2)]);
        assert_eq!(c.gates.len(), 1);
        assert_eq!(c.gates[0].inputs, vec![Label::qubit(0)]);
        assert!(matches!(&*out.kind, TermKind::Label(l) if l.id == 2));
        c.replay().unwrap();
    }

    #[test]
    fn append_keeps_untouched_outputs() {
        let iface = Term::pair(q(0), q(1));
        let id = identity_circuit(&iface);
        let mut supply = LabelSupply::starting_at(10);
        let (c, _) = append(&id, &q(1), &h_boxed(), &mut supply).unwrap();
        assert_eq!(c.outputs, vec![Label::qubit(10), Label::qubit(0)]);
    }

    #[test]
    fn append_identity_boxed_is_gate_free() {
        let id = identity_circuit(&q(0));
        let ident = BoxedCircuit {
            input: q(7),
            output: q(7),
            circuit: identity_circuit(&q(7)),
        };
        let mut supply = LabelSupply::starting_at(8);
        let (c, out) = append(&id, &q(0), &ident, &mut supply).unwrap();
        assert!(c.gates.is_empty());
        assert_eq!(interface_labels(&out).unwrap().len(), 1);
        c.replay().unwrap();
    }

    #[test]
    fn append_shape_mismatch() {
        let mut supply = LabelSupply::new();
        let cnot = gate_circuit(GateKind::Cnot, &mut supply);
        let id = identity_circuit(&q(5));
        assert!(matches!(
            append(&id, &q(5), &cnot, &mut supply),
            Err(CircuitError::InterfaceMismatch(_))
        ));
    }

    #[test]
    fn append_requires_live_labels() {
        let id = identity_circuit(&q(0));
        let mut supply = LabelSupply::starting_at(5);
        assert!(matches!(
            append(&id, &q(3), &h_boxed(), &mut supply),
            Err(CircuitError::Liveness(_))
        ));
    }

    #[test]
    fn identity_circuits() {
        let c = identity_circuit(&Term::unit());
        assert!(c.inputs.is_empty() && c.outputs.is_empty() && c.gates.is_empty());
        let c = identity_circuit(&Term::pair(q(0), q(1)));
        assert_eq!(c.inputs, c.outputs);
        assert_eq!(c.inputs.len(), 2);
    }

    #[test]
    fn reverse_table() {
        let mut supply = LabelSupply::new();
        let h = gate_circuit(GateKind::H, &mut supply);
        let rh = reverse(&h).unwrap();
        assert_eq!(rh.circuit.gates[0].kind, GateKind::H);
        assert_eq!(rh.circuit.gates[0].inputs, h.circuit.gates[0].outputs);
        rh.validate().unwrap();
        let t = gate_circuit(GateKind::T, &mut supply);
        assert_eq!(reverse(&t).unwrap().circuit.gates[0].kind, GateKind::Tdg);
        let m = gate_circuit(GateKind::Meas, &mut supply);
        assert_eq!(
            reverse(&m).unwrap_err(),
            CircuitError::NotReversible("Meas")
        );
    }

    #[test]
    fn counts() {
        assert!(gate_count(&Circuit::default()).is_empty());
        let mut supply = LabelSupply::new();
        let mut c = Circuit::default();
        for k in [GateKind::H, GateKind::Cnot, GateKind::H] {
            c.gates.extend(gate_circuit(k, &mut supply).circuit.gates);
        }
        let counts = gate_count(&c);
        assert_eq!(counts.get("H"), Some(&2));
        assert_eq!(counts.get("CNOT"), Some(&1));
        assert_eq!(export_counts(&counts), "CNOT 1\nH 2\n");
    }

    #[test]
    fn text_export() {
        assert_eq!(
            export_text(&h_boxed()),
            "INPUTS l0:Q\nGATE H l0 -> l1\nOUTPUTS l1:Q\n"
        );
        let ident = BoxedCircuit {
            input: q(0),
            output: q(0),
            circuit: identity_circuit(&q(0)),
        };
        assert_eq!(export_text(&ident), "INPUTS l0:Q\nOUTPUTS l0:Q\n");
        let mut supply = LabelSupply::new();
        let cnot = gate_circuit(GateKind::Cnot, &mut supply);
        assert_eq!(
            export_text(&cnot),
            "INPUTS l0:Q, l1:Q\nGATE CNOT l0, l1 -> l2, l3\nOUTPUTS l2:Q, l3:Q\n"
        );
        let init = gate_circuit(GateKind::Init0, &mut supply);
        assert_eq!(
            export_text(&init),
            "INPUTS\nGATE Init0 -> l4\nOUTPUTS l4:Q\n"
        );
    }

    #[test]
    fn replay_detects_dead_wire() {
        let mut c = h_boxed().circuit;
        c.gates.push(Gate {
            kind: GateKind::X,
            inputs: vec![Label::qubit(0)],
            outputs: vec![Label::qubit(2)],
        });
        assert!(c.replay().is_err());
    }

    #[test]
    fn canonical_forgets_label_choice() {
        let mut s1 = LabelSupply::starting_at(40);
        let mut s2 = LabelSupply::starting_at(3);
        let a = gate_circuit(GateKind::Cnot, &mut s1);
        let b = gate_circuit(GateKind::Cnot, &mut s2);
        assert!(a.equiv(&b));
        let c = gate_circuit(GateKind::Cz, &mut s2);
        assert!(!a.equiv(&c));
    }
}
