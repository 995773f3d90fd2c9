//! Factor permutations: slot bijections, their matrix action, and the
//! bipartite decomposition into block-local sorts around one block swap.

use std::fmt;

use thiserror::Error;

use crate::matrix::Matrix;
use crate::rational::Q;
use crate::system::SystemType;
use crate::theory::ClassicalEvent;
use num_traits::One;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PermError {
    #[error("mapping is not a bijection on {0} slots")]
    NotBijection(usize),
    #[error("slot {slot} out of range for {len} factors")]
    SlotOutOfRange { slot: usize, len: usize },
    #[error("swap({0},{1}) is not adjacent; expand it into adjacent swaps first")]
    NonAdjacentSwap(usize, usize),
    #[error("cannot compose: output {output} does not match input {input}")]
    TypeMismatch { output: SystemType, input: SystemType },
    #[error("invalid cut: {0}")]
    InvalidCut(String),
    #[error("bad cycle notation: {0}")]
    Syntax(String),
}

pub type PermResult<T> = Result<T, PermError>;

/// A rearrangement of the factors of `input`: input slot `i` lands on output slot `mapping[i]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PermutationSpec {
    input: SystemType,
    mapping: Vec<usize>,
}

/// One step of a permutation word.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Generator {
    Identity,
    /// Exchange of two adjacent slots of the current type.
    Swap(usize, usize),
}

impl PermutationSpec {
    pub fn new(input: SystemType, mapping: Vec<usize>) -> PermResult<Self> {
        let n = input.len();
        if mapping.len() != n {
            return Err(PermError::NotBijection(n));
        }
        let mut seen = vec![false; n];
        for &m in &mapping {
            if m >= n || std::mem::replace(&mut seen[m], true) {
                return Err(PermError::NotBijection(n));
            }
        }
        Ok(Self { input, mapping })
    }

    pub fn identity(input: SystemType) -> Self {
        let mapping = (0..input.len()).collect();
        Self { input, mapping }
    }

    /// `A B -> B A`.
    pub fn block_swap(a: &SystemType, b: &SystemType) -> Self {
        let (na, nb) = (a.len(), b.len());
        let mapping = (0..na).map(|i| nb + i).chain(0..nb).collect();
        Self { input: a.compose(b), mapping }
    }

    /// Composes a word left to right: the first generator acts first.
    pub fn from_generators(input: SystemType, word: &[Generator]) -> PermResult<Self> {
        let mut p = Self::identity(input);
        for g in word {
            if let Generator::Swap(i, j) = *g {
                let n = p.input.len();
                for s in [i, j] {
                    if s >= n {
                        return Err(PermError::SlotOutOfRange { slot: s, len: n });
                    }
                }
                if i.abs_diff(j) != 1 {
                    return Err(PermError::NonAdjacentSwap(i, j));
                }
                let out = p.output();
                let mut mapping: Vec<usize> = (0..n).collect();
                mapping.swap(i, j);
                p = p.then(&PermutationSpec { input: out, mapping })?;
            }
        }
        Ok(p)
    }

    pub fn input(&self) -> &SystemType {
        &self.input
    }

    pub fn output(&self) -> SystemType {
        let mut out = vec![0; self.mapping.len()];
        for (i, &m) in self.mapping.iter().enumerate() {
            out[m] = self.input.factors()[i];
        }
        SystemType::new(out)
    }

    pub fn mapping(&self) -> &[usize] {
        &self.mapping
    }

    pub fn len(&self) -> usize {
        self.mapping.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mapping.is_empty()
    }

    pub fn is_identity(&self) -> bool {
        self.mapping.iter().enumerate().all(|(i, &m)| i == m)
    }

    /// `next ∘ self`.
    pub fn then(&self, next: &PermutationSpec) -> PermResult<PermutationSpec> {
        let out = self.output();
        if out != next.input {
            return Err(PermError::TypeMismatch { output: out, input: next.input.clone() });
        }
        let mapping = self.mapping.iter().map(|&m| next.mapping[m]).collect();
        Ok(PermutationSpec { input: self.input.clone(), mapping })
    }

    pub fn invert(&self) -> PermutationSpec {
        let mut inv = vec![0; self.mapping.len()];
        for (i, &m) in self.mapping.iter().enumerate() {
            inv[m] = i;
        }
        PermutationSpec { input: self.output(), mapping: inv }
    }

    pub fn tensor(&self, other: &PermutationSpec) -> PermutationSpec {
        let n = self.mapping.len();
        let mapping = self.mapping.iter().copied().chain(other.mapping.iter().map(|&m| m + n)).collect();
        PermutationSpec { input: self.input.compose(&other.input), mapping }
    }

    /// Output flat index of an input flat index.
    pub fn apply_index(&self, index: usize) -> usize {
        let digits = self.input.digits_of(index);
        let mut out = vec![0; digits.len()];
        for (i, &m) in self.mapping.iter().enumerate() {
            out[m] = digits[i];
        }
        self.output().index_of(&out)
    }

    /// `map[j]` is the output index of input index `j`.
    pub fn index_map(&self) -> Vec<usize> {
        let out_factors = self.output();
        let out_factors = out_factors.factors();
        let mut out_stride = vec![1; out_factors.len()];
        for k in (0..out_factors.len().saturating_sub(1)).rev() {
            out_stride[k] = out_stride[k + 1] * out_factors[k + 1];
        }
        let stride: Vec<usize> = self.mapping.iter().map(|&m| out_stride[m]).collect();
        let radix = self.input.factors();
        let n = self.input.dim();
        let mut map = Vec::with_capacity(n);
        let mut digits = vec![0; radix.len()];
        let mut at = 0;
        for _ in 0..n {
            map.push(at);
            for i in (0..radix.len()).rev() {
                digits[i] += 1;
                at += stride[i];
                if digits[i] < radix[i] {
                    break;
                }
                at -= stride[i] * radix[i];
                digits[i] = 0;
            }
        }
        map
    }

    pub fn matrix(&self) -> Matrix {
        let n = self.input.dim();
        let mut m = Matrix::zeros(n, n);
        for (j, i) in self.index_map().into_iter().enumerate() {
            m.set(i, j, Q::one());
        }
        m
    }

    pub fn to_event(&self) -> ClassicalEvent {
        ClassicalEvent::new(self.input.clone(), self.output(), self.matrix()).expect("square by construction")
    }

    /// An adjacent-swap word realizing this permutation.
    pub fn to_adjacent_swaps(&self) -> Vec<Generator> {
        // Bubble sort the destination list; each exchange is a swap of current slots.
        let mut dest = self.mapping.clone();
        let mut word = Vec::new();
        let n = dest.len();
        for pass in 0..n {
            for k in 0..n.saturating_sub(1 + pass) {
                if dest[k] > dest[k + 1] {
                    dest.swap(k, k + 1);
                    word.push(Generator::Swap(k, k + 1));
                }
            }
        }
        word
    }

    /// Parses cycle notation such as `(0 2 1)(3 4)`; `()` is the identity.
    pub fn from_cycles(input: SystemType, text: &str) -> PermResult<Self> {
        let n = input.len();
        let mapping = parse_cycles(text, n)?;
        Self::new(input, mapping)
    }

    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let n = self.mapping.len();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for start in 0..n {
            if seen[start] || self.mapping[start] == start {
                continue;
            }
            let mut cycle = Vec::new();
            let mut k = start;
            while !seen[k] {
                seen[k] = true;
                cycle.push(k);
                k = self.mapping[k];
            }
            out.push(cycle);
        }
        out
    }
}

/// Expands a transposition of arbitrary slots into adjacent swaps.
pub fn expand_transposition(i: usize, j: usize) -> Vec<Generator> {
    if i == j {
        return vec![Generator::Identity];
    }
    let (lo, hi) = (i.min(j), i.max(j));
    let mut word: Vec<Generator> = (lo..hi).map(|k| Generator::Swap(k, k + 1)).collect();
    word.extend((lo..hi - 1).rev().map(|k| Generator::Swap(k, k + 1)));
    word
}

fn parse_cycles(text: &str, n: usize) -> PermResult<Vec<usize>> {
    let mut mapping: Vec<usize> = (0..n).collect();
    let mut touched = vec![false; n];
    let mut rest = text.trim();
    if rest.is_empty() {
        return Err(PermError::Syntax("empty cycle list".into()));
    }
    while !rest.is_empty() {
        let inner = rest
            .strip_prefix('(')
            .and_then(|r| r.split_once(')'))
            .ok_or_else(|| PermError::Syntax(format!("expected a cycle at '{rest}'")))?;
        let (body, tail) = inner;
        let mut cycle = Vec::new();
        for tok in body.split(|c: char| c.is_whitespace() || c == ',').filter(|t| !t.is_empty()) {
            let slot: usize = tok.parse().map_err(|_| PermError::Syntax(format!("bad slot '{tok}'")))?;
            if slot >= n {
                return Err(PermError::SlotOutOfRange { slot, len: n });
            }
            if std::mem::replace(&mut touched[slot], true) {
                return Err(PermError::Syntax(format!("slot {slot} repeated")));
            }
            cycle.push(slot);
        }
        for (k, &s) in cycle.iter().enumerate() {
            mapping[s] = cycle[(k + 1) % cycle.len()];
        }
        rest = tail.trim_start();
    }
    Ok(mapping)
}

impl fmt::Display for PermutationSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cycles = self.cycles();
        if cycles.is_empty() {
            return write!(f, "()");
        }
        for c in cycles {
            let parts: Vec<String> = c.iter().map(ToString::to_string).collect();
            write!(f, "({})", parts.join(" "))?;
        }
        Ok(())
    }
}

/// Output of [`decompose_bipartite`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BipartiteDecomposition {
    /// Sorts `B` into `B′ B″`.
    pub s1: PermutationSpec,
    /// Reorders `A″ B″` into `D`.
    pub s2: PermutationSpec,
    /// Sorts `A` into `A′ A″`.
    pub s3: PermutationSpec,
    /// Reorders `A′ B′` into `C`.
    pub s4: PermutationSpec,
    pub a_prime: SystemType,
    pub a_second: SystemType,
    pub b_prime: SystemType,
    pub b_second: SystemType,
    /// Input slots of `A′`, `A″`, `B′`, `B″` in the original numbering.
    pub slots: [Vec<usize>; 4],
}

impl BipartiteDecomposition {
    /// `(S4 ⊗ S2) ∘ (Id_A′ ⊗ swap(A″, B′) ⊗ Id_B″) ∘ (S3 ⊗ S1)`.
    pub fn recompose(&self) -> PermutationSpec {
        let first = self.s3.tensor(&self.s1);
        let middle = PermutationSpec::identity(self.a_prime.clone())
            .tensor(&PermutationSpec::block_swap(&self.a_second, &self.b_prime))
            .tensor(&PermutationSpec::identity(self.b_second.clone()));
        let last = self.s4.tensor(&self.s2);
        first
            .then(&middle)
            .and_then(|p| p.then(&last))
            .expect("decomposition pieces chain by construction")
    }
}

/// Splits `s` with input cut `A | B` (`A` = first `a_len` factors) and output
/// cut `C | D` (`C` = first `c_len` factors). Inside each group factors keep
/// ascending slot order.
pub fn decompose_bipartite(s: &PermutationSpec, a_len: usize, c_len: usize) -> PermResult<BipartiteDecomposition> {
    let n = s.len();
    if a_len > n || c_len > n {
        return Err(PermError::InvalidCut(format!("cut {a_len}|{c_len} on {n} factors")));
    }
    let map = s.mapping();
    let a_to_c: Vec<usize> = (0..a_len).filter(|&i| map[i] < c_len).collect();
    let a_to_d: Vec<usize> = (0..a_len).filter(|&i| map[i] >= c_len).collect();
    let b_to_c: Vec<usize> = (a_len..n).filter(|&i| map[i] < c_len).collect();
    let b_to_d: Vec<usize> = (a_len..n).filter(|&i| map[i] >= c_len).collect();

    let input = s.input();
    let a = input.slice(0, a_len);
    let b = input.slice(a_len, n);

    let sort = |sys: &SystemType, offset: usize, first: &[usize], second: &[usize]| {
        let mut mapping = vec![0; sys.len()];
        for (k, &slot) in first.iter().chain(second).enumerate() {
            mapping[slot - offset] = k;
        }
        PermutationSpec::new(sys.clone(), mapping).expect("sorting map is a bijection")
    };
    let s3 = sort(&a, 0, &a_to_c, &a_to_d);
    let s1 = sort(&b, a_len, &b_to_c, &b_to_d);

    let gather = |first: &[usize], second: &[usize], offset: usize| {
        let slots: Vec<usize> = first.iter().chain(second).copied().collect();
        let mapping = slots.iter().map(|&i| map[i] - offset).collect();
        PermutationSpec::new(input.select(&slots), mapping).expect("destinations form a bijection")
    };
    let s4 = gather(&a_to_c, &b_to_c, 0);
    let s2 = gather(&a_to_d, &b_to_d, c_len);

    Ok(BipartiteDecomposition {
        s1,
        s2,
        s3,
        s4,
        a_prime: input.select(&a_to_c),
        a_second: input.select(&a_to_d),
        b_prime: input.select(&b_to_c),
        b_second: input.select(&b_to_d),
        slots: [a_to_c, a_to_d, b_to_c, b_to_d],
    })
}
