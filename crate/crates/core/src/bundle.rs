//! Items and bundles.
//!
//! Items are indices `0..m` with `m <= 16`; a bundle is a bitmask over them.
//! The bitmask value is the canonical encoding used for ordering and ties.

use std::fmt;

use crate::error::{Error, Result};

/// Largest supported number of items.
pub const MAX_ITEMS: usize = 16;

/// A set of items, stored as a bitmask (bit `i` set iff item `i` is present).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Bundle(u16);

impl Bundle {
    pub const EMPTY: Bundle = Bundle(0);

    pub const fn from_bits(bits: u16) -> Self {
        Bundle(bits)
    }

    pub const fn bits(self) -> u16 {
        self.0
    }

    /// All items of an `m`-item universe.
    pub fn full(m: usize) -> Self {
        debug_assert!(m <= MAX_ITEMS);
        if m == MAX_ITEMS {
            Bundle(u16::MAX)
        } else {
            Bundle(((1u32 << m) - 1) as u16)
        }
    }

    pub fn singleton(item: usize) -> Self {
        Bundle(1 << item)
    }

    pub fn from_items<I: IntoIterator<Item = usize>>(items: I) -> Self {
        items.into_iter().fold(Bundle::EMPTY, |b, i| b.with(i))
    }

    pub fn with(self, item: usize) -> Self {
        Bundle(self.0 | (1 << item))
    }

    pub fn without(self, item: usize) -> Self {
        Bundle(self.0 & !(1 << item))
    }

    pub fn contains(self, item: usize) -> bool {
        self.0 & (1 << item) != 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn is_subset_of(self, other: Bundle) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn is_disjoint(self, other: Bundle) -> bool {
        self.0 & other.0 == 0
    }

    pub fn union(self, other: Bundle) -> Self {
        Bundle(self.0 | other.0)
    }

    pub fn intersection(self, other: Bundle) -> Self {
        Bundle(self.0 & other.0)
    }

    pub fn difference(self, other: Bundle) -> Self {
        Bundle(self.0 & !other.0)
    }

    /// Items in ascending index order.
    pub fn items(self) -> impl Iterator<Item = usize> {
        let bits = self.0;
        (0..MAX_ITEMS).filter(move |&i| bits & (1 << i) != 0)
    }

    /// Every bundle over `m` items in ascending canonical encoding.
    pub fn all(m: usize) -> impl Iterator<Item = Bundle> {
        (0u32..(1u32 << m)).map(|b| Bundle(b as u16))
    }

    /// Every subset of `self` (including `self` and the empty bundle),
    /// ascending by encoding.
    pub fn subsets(self) -> impl Iterator<Item = Bundle> {
        let full = self.0;
        let mut next = Some(0u16);
        std::iter::from_fn(move || {
            let cur = next?;
            next = if cur == full {
                None
            } else {
                Some((cur.wrapping_sub(full)) & full)
            };
            Some(Bundle(cur))
        })
    }

    pub(crate) fn check_universe(self, m: usize) -> Result<()> {
        if self.is_subset_of(Bundle::full(m)) {
            Ok(())
        } else {
            Err(Error::OutOfUniverse { bundle: self, m })
        }
    }
}

impl fmt::Display for Bundle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, i) in self.items().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{i}")?;
        }
        write!(f, "}}")
    }
}

/// Human-readable item names, used to parse and print bundles such as `xy`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ItemNames {
    names: Vec<String>,
}

impl ItemNames {
    pub fn new<S: Into<String>>(names: impl IntoIterator<Item = S>) -> Self {
        ItemNames {
            names: names.into_iter().map(Into::into).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, item: usize) -> &str {
        &self.names[item]
    }

    pub fn index(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    /// Parses a bundle written as item names separated by whitespace or `+`,
    /// or, when every name is a single character, as a run of characters
    /// (`"xy"`). `""`, `"{}"` and `"∅"` denote the empty bundle.
    pub fn parse(&self, text: &str) -> Option<Bundle> {
        let text = text.trim();
        if text.is_empty() || text == "{}" || text == "∅" {
            return Some(Bundle::EMPTY);
        }
        let tokens: Vec<&str> = text
            .split(|c: char| c.is_whitespace() || c == '+')
            .filter(|t| !t.is_empty())
            .collect();
        if tokens.len() == 1 && self.index(tokens[0]).is_none() {
            if !self.names.iter().all(|n| n.chars().count() == 1) {
                return None;
            }
            let mut b = Bundle::EMPTY;
            for ch in tokens[0].chars() {
                let i = self.index(ch.encode_utf8(&mut [0; 4]))?;
                b = b.with(i);
            }
            return Some(b);
        }
        let mut b = Bundle::EMPTY;
        for t in tokens {
            b = b.with(self.index(t)?);
        }
        Some(b)
    }

    /// Inverse of [`ItemNames::parse`]: compact form when names are single
    /// characters, space separated otherwise, `∅` for the empty bundle.
    pub fn format(&self, b: Bundle) -> String {
        if b.is_empty() {
            return "∅".to_string();
        }
        let compact = self.names.iter().all(|n| n.chars().count() == 1);
        let parts: Vec<&str> = b.items().map(|i| self.name(i)).collect();
        if compact {
            parts.concat()
        } else {
            parts.join(" ")
        }
    }

    pub fn item_list(&self, b: Bundle) -> Vec<String> {
        b.items().map(|i| self.names[i].clone()).collect()
    }
}
