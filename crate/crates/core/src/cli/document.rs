//! The JSON extension document: parsing, validation and canonical emission.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::extension::{CocycleTable, Extension};
use crate::semigroup::{FiniteInverseMonoid, PartialBijection, MAX_ATOMS};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NamedElement {
    pub name: String,
    pub map: BTreeMap<usize, usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CocycleEntry {
    pub s: String,
    pub t: String,
    pub phase: Vec<u32>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExtensionDocument {
    pub atoms: usize,
    pub k: u32,
    pub elements: Vec<NamedElement>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cocycle: Option<Vec<CocycleEntry>>,
    #[serde(default, skip_serializing_if = "serde_json::Value::is_null")]
    pub metadata: serde_json::Value,
}

/// A loaded document: the extension plus a name for every element of `S`.
#[derive(Clone, Debug)]
pub struct Loaded {
    pub extension: Extension,
    pub names: Vec<String>,
}

impl Loaded {
    pub fn name(&self, s: usize) -> &str {
        &self.names[s]
    }
}

/// 1-based line of the `nth` occurrence of `"key":` in `text`.
fn key_line(text: &str, key: &str, nth: usize) -> Option<usize> {
    let needle = format!("\"{key}\"");
    let mut seen = 0;
    let mut from = 0;
    while let Some(pos) = text[from..].find(&needle) {
        let at = from + pos;
        from = at + needle.len();
        if text[from..].trim_start().starts_with(':') {
            if seen == nth {
                return Some(text[..at].matches('\n').count() + 1);
            }
            seen += 1;
        }
    }
    None
}

fn at(text: &str, key: &str, nth: usize, what: String) -> String {
    match key_line(text, key, nth) {
        Some(line) => format!("line {line}, {what}"),
        None => what,
    }
}

pub fn parse(text: &str) -> Result<ExtensionDocument> {
    let doc: ExtensionDocument = serde_json::from_str(text).map_err(|e| {
        Error::format(format!("line {}, column {}", e.line(), e.column()), e.to_string())
    })?;
    check(&doc, text)?;
    Ok(doc)
}

/// Structural checks that need no monoid arithmetic.
fn check(doc: &ExtensionDocument, text: &str) -> Result<()> {
    if doc.atoms > MAX_ATOMS {
        return Err(Error::format(
            at(text, "atoms", 0, "atoms".into()),
            format!("at most {MAX_ATOMS} atoms are supported"),
        ));
    }
    if doc.k == 0 {
        return Err(Error::format(at(text, "k", 0, "k".into()), "k must be at least 1"));
    }
    let mut names: HashMap<&str, usize> = HashMap::new();
    let mut maps: HashMap<&BTreeMap<usize, usize>, usize> = HashMap::new();
    for (i, e) in doc.elements.iter().enumerate() {
        let loc = || at(text, "name", i, format!("elements[{i}]"));
        if e.name.is_empty() {
            return Err(Error::format(loc(), "empty element name"));
        }
        if names.insert(&e.name, i).is_some() {
            return Err(Error::format(loc(), format!("duplicate element name \"{}\"", e.name)));
        }
        let mut images = vec![false; doc.atoms];
        for (&x, &y) in &e.map {
            if x >= doc.atoms || y >= doc.atoms {
                return Err(Error::format(
                    loc(),
                    format!("\"{}\" maps {x} to {y}, outside 0..{}", e.name, doc.atoms),
                ));
            }
            if std::mem::replace(&mut images[y], true) {
                return Err(Error::format(
                    loc(),
                    format!("\"{}\" is not injective: two atoms map to {y}", e.name),
                ));
            }
        }
        if let Some(j) = maps.insert(&e.map, i) {
            return Err(Error::format(
                loc(),
                format!("\"{}\" repeats the map of \"{}\"", e.name, doc.elements[j].name),
            ));
        }
    }
    if let Some(entries) = &doc.cocycle {
        for (i, c) in entries.iter().enumerate() {
            let loc = || at(text, "phase", i, format!("cocycle[{i}]"));
            for n in [&c.s, &c.t] {
                if !names.contains_key(n.as_str()) {
                    return Err(Error::format(loc(), format!("unknown element \"{n}\"")));
                }
            }
        }
    }
    Ok(())
}

fn bijection(doc: &ExtensionDocument, e: &NamedElement) -> Result<PartialBijection> {
    let pairs: Vec<(usize, usize)> = e.map.iter().map(|(&x, &y)| (x, y)).collect();
    PartialBijection::from_pairs(doc.atoms, &pairs)
}

impl ExtensionDocument {
    /// Builds `S` (adding `0` and `1` if absent) and the extension.
    ///
    /// An element list that is not closed surfaces as [`Error::Closure`],
    /// an invalid cocycle as [`Error::Domain`].
    pub fn load(&self) -> Result<Loaded> {
        check(self, "")?;
        let elements: Vec<PartialBijection> =
            self.elements.iter().map(|e| bijection(self, e)).collect::<Result<_>>()?;
        let monoid = FiniteInverseMonoid::new(self.atoms, elements.iter().cloned())?;
        let mut names: Vec<String> = monoid.iter().map(|s| s.to_string()).collect();
        for (e, s) in self.elements.iter().zip(&elements) {
            names[monoid.index_of(s).unwrap()] = e.name.clone();
        }
        let extension = match &self.cocycle {
            None => Extension::trivial(monoid, self.k),
            Some(entries) => {
                let by_name: HashMap<&str, usize> = self
                    .elements
                    .iter()
                    .zip(&elements)
                    .map(|(e, s)| (e.name.as_str(), monoid.index_of(s).unwrap()))
                    .collect();
                let mut table = Vec::with_capacity(entries.len());
                for c in entries {
                    let (s, t) = (by_name[c.s.as_str()], by_name[c.t.as_str()]);
                    let rank = (monoid.get(s) * monoid.get(t)).rank();
                    if c.phase.len() != rank {
                        return Err(Error::format(
                            format!("cocycle({},{})", c.s, c.t),
                            format!("expected {rank} phases, found {}", c.phase.len()),
                        ));
                    }
                    table.push(((s, t), c.phase.clone()));
                }
                let cocycle = CocycleTable::from_entries(&monoid, self.k, table)?;
                Extension::new(monoid, cocycle)?
            }
        };
        Ok(Loaded { extension, names })
    }

    /// Describes an extension, naming elements by their maps.
    pub fn from_extension(ext: &Extension) -> Self {
        let names: Vec<String> = ext.base().iter().map(|s| s.to_string()).collect();
        Self::from_named(ext, &names)
    }

    /// Canonical form: elements in canonical order, and a cocycle listing
    /// every unforced entry only when it is not identically zero.
    pub fn from_named(ext: &Extension, names: &[String]) -> Self {
        let monoid = ext.base();
        let elements = monoid
            .iter()
            .zip(names)
            .map(|(s, name)| NamedElement {
                name: name.clone(),
                map: s.pairs().collect(),
            })
            .collect();
        let trivial = ext.cocycle().entries().all(|(_, row)| row.iter().all(|&p| p == 0));
        let cocycle = (!trivial).then(|| {
            ext.cocycle()
                .entries()
                .filter(|((s, t), row)| {
                    let (s, t) = (monoid.get(*s), monoid.get(*t));
                    !(s.is_idempotent() || t.is_idempotent() || row.is_empty())
                })
                .map(|(&(s, t), row)| CocycleEntry {
                    s: names[s].clone(),
                    t: names[t].clone(),
                    phase: row.clone(),
                })
                .collect()
        });
        ExtensionDocument {
            atoms: monoid.atoms(),
            k: ext.k(),
            elements,
            cocycle,
            metadata: serde_json::Value::Null,
        }
    }

    /// The canonical form of this document; metadata is kept.
    pub fn canonical(&self) -> Result<Self> {
        let loaded = self.load()?;
        let mut doc = Self::from_named(&loaded.extension, &loaded.names);
        doc.metadata = self.metadata.clone();
        Ok(doc)
    }
}

/// Pretty JSON with a trailing newline; byte-stable for equal documents.
pub fn emit(doc: &ExtensionDocument) -> String {
    let mut text = serde_json::to_string_pretty(doc).expect("documents always serialize");
    text.push('\n');
    text
}
