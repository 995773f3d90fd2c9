use std::fmt;

use thiserror::Error;

use crate::permutation::PermutationSpec;
use crate::system::SystemType;
use crate::theory::{Test, TheoryResult};

/// A circuit over the generator set, with tests embedded in the leaves.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CircuitNode {
    Identity(SystemType),
    Permutation(PermutationSpec),
    Prep(Test),
    Obs(Test),
    /// An arbitrary declared test. Evaluates normally but is not a generator.
    Instrument(Test),
    Seq(Box<CircuitNode>, Box<CircuitNode>),
    Par(Box<CircuitNode>, Box<CircuitNode>),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("type error at `{node}`: output {output} does not match input {input}")]
pub struct TypeError {
    pub node: String,
    pub output: SystemType,
    pub input: SystemType,
}

/// Input and output types of every node, mirroring the tree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TypedNode {
    pub input: SystemType,
    pub output: SystemType,
    pub children: Vec<TypedNode>,
}

impl CircuitNode {
    pub fn seq(first: CircuitNode, second: CircuitNode) -> CircuitNode {
        CircuitNode::Seq(Box::new(first), Box::new(second))
    }

    pub fn par(left: CircuitNode, right: CircuitNode) -> CircuitNode {
        CircuitNode::Par(Box::new(left), Box::new(right))
    }

    /// Left-nested sequence of the given stages.
    pub fn chain(stages: impl IntoIterator<Item = CircuitNode>) -> Option<CircuitNode> {
        stages.into_iter().reduce(CircuitNode::seq)
    }

    pub fn is_generator_only(&self) -> bool {
        match self {
            CircuitNode::Instrument(_) => false,
            CircuitNode::Seq(a, b) | CircuitNode::Par(a, b) => a.is_generator_only() && b.is_generator_only(),
            _ => true,
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            CircuitNode::Seq(a, b) | CircuitNode::Par(a, b) => 1 + a.depth().max(b.depth()),
            _ => 0,
        }
    }

    pub fn leaves(&self) -> usize {
        match self {
            CircuitNode::Seq(a, b) | CircuitNode::Par(a, b) => a.leaves() + b.leaves(),
            _ => 1,
        }
    }

    pub fn signature(&self) -> Result<(SystemType, SystemType), TypeError> {
        let t = typecheck(self)?;
        Ok((t.input, t.output))
    }
}

pub fn typecheck(node: &CircuitNode) -> Result<TypedNode, TypeError> {
    let leaf = |input: SystemType, output: SystemType| TypedNode { input, output, children: Vec::new() };
    Ok(match node {
        CircuitNode::Identity(s) => leaf(s.clone(), s.clone()),
        CircuitNode::Permutation(p) => leaf(p.input().clone(), p.output()),
        CircuitNode::Prep(t) | CircuitNode::Obs(t) | CircuitNode::Instrument(t) => {
            leaf(t.input().clone(), t.output().clone())
        }
        CircuitNode::Seq(a, b) => {
            let ta = typecheck(a)?;
            let tb = typecheck(b)?;
            if ta.output != tb.input {
                return Err(TypeError { node: node.to_string(), output: ta.output, input: tb.input });
            }
            TypedNode { input: ta.input.clone(), output: tb.output.clone(), children: vec![ta, tb] }
        }
        CircuitNode::Par(a, b) => {
            let ta = typecheck(a)?;
            let tb = typecheck(b)?;
            TypedNode {
                input: ta.input.compose(&tb.input),
                output: ta.output.compose(&tb.output),
                children: vec![ta, tb],
            }
        }
    })
}

/// Maps the circuit to its test. The circuit must typecheck.
pub fn evaluate(node: &CircuitNode) -> TheoryResult<Test> {
    match node {
        CircuitNode::Identity(s) => Ok(Test::identity(s.clone())),
        CircuitNode::Permutation(p) => Ok(Test::from_event(p.to_event())),
        CircuitNode::Prep(t) | CircuitNode::Obs(t) | CircuitNode::Instrument(t) => Ok(t.clone()),
        CircuitNode::Seq(a, b) => evaluate(a)?.compose_seq(&evaluate(b)?),
        CircuitNode::Par(a, b) => Ok(evaluate(a)?.compose_par(&evaluate(b)?)),
    }
}

impl fmt::Display for CircuitNode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CircuitNode::Identity(s) => write!(f, "id{s}"),
            CircuitNode::Permutation(p) => write!(f, "perm{}{p}", p.input()),
            CircuitNode::Prep(t) => write!(f, "prep{}", t.output()),
            CircuitNode::Obs(t) => write!(f, "obs{}", t.input()),
            CircuitNode::Instrument(t) => write!(f, "test{}->{}", t.input(), t.output()),
            CircuitNode::Seq(a, b) => {
                write!(f, "{a} ; ")?;
                if matches!(**b, CircuitNode::Seq(..)) {
                    write!(f, "({b})")
                } else {
                    write!(f, "{b}")
                }
            }
            CircuitNode::Par(a, b) => {
                let wrap_a = matches!(**a, CircuitNode::Seq(..));
                let wrap_b = matches!(**b, CircuitNode::Seq(..) | CircuitNode::Par(..));
                if wrap_a {
                    write!(f, "({a})")?;
                } else {
                    write!(f, "{a}")?;
                }
                write!(f, " | ")?;
                if wrap_b {
                    write!(f, "({b})")
                } else {
                    write!(f, "{b}")
                }
            }
        }
    }
}
