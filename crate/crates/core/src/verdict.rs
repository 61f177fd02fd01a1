use std::fmt;

use serde::{Deserialize, Serialize};

use crate::site::Permutation;
use crate::subset::Subset;

/// A named subset inside a witness, e.g. `A = {0}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Slot {
    pub name: String,
    pub set: Subset,
}

/// Concrete data demonstrating a failure. Slot names follow the argument
/// roles of the statement being checked (`A`, `C`, `B`, `D`, ...).
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub slots: Vec<Slot>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma: Option<Permutation>,
    /// Candidates exhausted by an existential search, ascending.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub searched: Option<Vec<Subset>>,
}

impl Witness {
    pub fn new<'a, I: IntoIterator<Item = (&'a str, Subset)>>(slots: I) -> Self {
        Witness {
            slots: slots
                .into_iter()
                .map(|(name, set)| Slot {
                    name: name.to_string(),
                    set,
                })
                .collect(),
            sigma: None,
            searched: None,
        }
    }

    pub fn triple(a: Subset, c: Subset, b: Subset) -> Self {
        Witness::new([("A", a), ("C", c), ("B", b)])
    }

    pub fn with_sigma(mut self, sigma: Permutation) -> Self {
        self.sigma = Some(sigma);
        self
    }

    pub fn with_searched(mut self, searched: Vec<Subset>) -> Self {
        self.searched = Some(searched);
        self
    }

    pub fn get(&self, name: &str) -> Option<Subset> {
        self.slots.iter().find(|s| s.name == name).map(|s| s.set)
    }

    /// Panicking accessor for replay code that knows the slot layout.
    pub fn slot(&self, name: &str) -> Subset {
        self.get(name).unwrap_or_else(|| panic!("witness has no slot {name}"))
    }

    /// Exchanges two slot names, used to present mirrored (left-sided) checks.
    pub fn swap_names(mut self, x: &str, y: &str) -> Self {
        for s in &mut self.slots {
            if s.name == x {
                s.name = y.to_string();
            } else if s.name == y {
                s.name = x.to_string();
            }
        }
        self
    }
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, s) in self.slots.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{}={}", s.name, s.set)?;
        }
        if let Some(sigma) = &self.sigma {
            write!(f, " σ={sigma}")?;
        }
        if let Some(searched) = &self.searched {
            f.write_str(" searched=[")?;
            for (i, s) in searched.iter().enumerate() {
                if i > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{s}")?;
            }
            f.write_str("]")?;
        }
        Ok(())
    }
}

/// Outcome of a check: `holds`, or a witness of failure.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    pub holds: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
}

impl Verdict {
    pub fn pass() -> Self {
        Verdict {
            holds: true,
            note: None,
            witness: None,
        }
    }

    pub fn fail(witness: Witness) -> Self {
        Verdict {
            holds: false,
            note: None,
            witness: Some(witness),
        }
    }

    pub fn from_witness(w: Option<Witness>) -> Self {
        match w {
            None => Verdict::pass(),
            Some(w) => Verdict::fail(w),
        }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(if self.holds { "holds" } else { "fails" })?;
        if let Some(w) = &self.witness {
            write!(f, " [{w}]")?;
        }
        if let Some(note) = &self.note {
            write!(f, " ({note})")?;
        }
        Ok(())
    }
}
