use std::fmt;
use std::ops::Neg;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A binary vertex label.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Label {
    Negative,
    Positive,
}

impl Label {
    pub fn from_sign(value: i64) -> Option<Label> {
        match value {
            1 => Some(Label::Positive),
            -1 => Some(Label::Negative),
            _ => None,
        }
    }

    pub fn sign(self) -> i8 {
        match self {
            Label::Positive => 1,
            Label::Negative => -1,
        }
    }

    pub fn is_positive(self) -> bool {
        self == Label::Positive
    }
}

impl Neg for Label {
    type Output = Label;

    fn neg(self) -> Label {
        match self {
            Label::Positive => Label::Negative,
            Label::Negative => Label::Positive,
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Label::Positive => "+1",
            Label::Negative => "-1",
        })
    }
}

impl FromStr for Label {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "+1" | "1" => Ok(Label::Positive),
            "-1" => Ok(Label::Negative),
            other => Err(format!("expected +1 or -1, got {other:?}")),
        }
    }
}

/// Majority of a sequence of labels; ties go to `Positive`.
pub fn majority<I: IntoIterator<Item = Label>>(labels: I) -> Label {
    let balance: i64 = labels.into_iter().map(|l| l.sign() as i64).sum();
    if balance >= 0 {
        Label::Positive
    } else {
        Label::Negative
    }
}

/// A possibly partial map from vertex ids `0..n` to labels.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Labeling {
    values: Vec<Option<Label>>,
}

impl Labeling {
    pub fn empty(n: usize) -> Self {
        Labeling {
            values: vec![None; n],
        }
    }

    pub fn total(values: Vec<Label>) -> Self {
        Labeling {
            values: values.into_iter().map(Some).collect(),
        }
    }

    pub fn constant(n: usize, label: Label) -> Self {
        Labeling {
            values: vec![Some(label); n],
        }
    }

    pub fn from_signs(signs: &[i8]) -> Result<Self> {
        signs
            .iter()
            .enumerate()
            .map(|(v, &s)| {
                Label::from_sign(s as i64)
                    .ok_or_else(|| Error::InvalidParameter(format!("label {s} at vertex {v}")))
            })
            .collect::<Result<Vec<_>>>()
            .map(Labeling::total)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, v: usize) -> Option<Label> {
        self.values.get(v).copied().flatten()
    }

    /// Label of `v` in a labeling known to be total.
    ///
    /// Panics if `v` is unlabeled.
    pub fn at(&self, v: usize) -> Label {
        self.values[v].unwrap_or_else(|| panic!("vertex {v} is unlabeled"))
    }

    pub fn set(&mut self, v: usize, label: Label) -> Result<()> {
        let n = self.values.len();
        let slot = self
            .values
            .get_mut(v)
            .ok_or(Error::VertexOutOfRange { vertex: v, n })?;
        *slot = Some(label);
        Ok(())
    }

    pub fn is_total(&self) -> bool {
        self.values.iter().all(Option::is_some)
    }

    pub fn require_total(&self) -> Result<()> {
        match self.values.iter().position(Option::is_none) {
            Some(v) => Err(Error::PartialLabeling(v)),
            None => Ok(()),
        }
    }

    /// Labeled vertices in ascending id order.
    pub fn observed(&self) -> impl Iterator<Item = (usize, Label)> + '_ {
        self.values
            .iter()
            .enumerate()
            .filter_map(|(v, l)| l.map(|l| (v, l)))
    }

    pub fn observed_count(&self) -> usize {
        self.values.iter().filter(|l| l.is_some()).count()
    }

    pub fn as_slice(&self) -> &[Option<Label>] {
        &self.values
    }
}
