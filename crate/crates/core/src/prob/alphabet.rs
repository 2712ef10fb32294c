use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::{Error, Result};

/// Ordered list of distinct symbol labels. Symbols are addressed by position.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Alphabet {
    labels: Vec<String>,
}

impl Alphabet {
    pub fn new<I, S>(labels: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        if labels.is_empty() {
            return Err(Error::EmptyAlphabet);
        }
        for (i, l) in labels.iter().enumerate() {
            if labels[..i].contains(l) {
                return Err(Error::DuplicateLabel(l.clone()));
            }
        }
        Ok(Self { labels })
    }

    /// Labels `"0"`, …, `"k-1"`.
    pub fn range(k: usize) -> Self {
        Self::numbered(0, k)
    }

    /// `k` consecutive integer labels starting at `first`.
    pub fn numbered(first: usize, k: usize) -> Self {
        assert!(k > 0, "alphabet must be nonempty");
        Self {
            labels: (first..first + k).map(|i| i.to_string()).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, index: usize) -> &str {
        &self.labels[index]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub(crate) fn check_index(&self, index: usize) -> Result<()> {
        if index < self.len() {
            Ok(())
        } else {
            Err(Error::InvalidSymbol {
                index,
                size: self.len(),
            })
        }
    }
}

pub(crate) fn same_axes(a: &[Alphabet], b: &[Alphabet], what: &str) -> Result<()> {
    if a == b {
        Ok(())
    } else {
        Err(Error::AxisMismatch(format!(
            "{what}: {} axes {:?} vs {} axes {:?}",
            a.len(),
            a.iter().map(Alphabet::len).collect::<Vec<_>>(),
            b.len(),
            b.iter().map(Alphabet::len).collect::<Vec<_>>()
        )))
    }
}
