use std::collections::BTreeSet;

use crate::error::{Error, Result};

/// `{a,b}` for the given members, in index order.
pub(crate) fn set_label(names: &[String], members: &BTreeSet<usize>) -> String {
    let inner: Vec<&str> = members.iter().map(|&i| names[i].as_str()).collect();
    format!("{{{}}}", inner.join(","))
}

pub(crate) fn reject_chars(labels: &[String], forbidden: &[char], reason: &'static str) -> Result<()> {
    match labels.iter().find(|l| l.contains(forbidden)) {
        Some(l) => Err(Error::InvalidLabel {
            label: l.clone(),
            reason,
        }),
        None => Ok(()),
    }
}

pub(crate) fn reject_duplicates(labels: &[String], sort: &'static str) -> Result<()> {
    let mut seen = BTreeSet::new();
    match labels.iter().find(|l| !seen.insert(l.as_str())) {
        Some(l) => Err(Error::DuplicateLabel {
            sort,
            label: l.clone(),
        }),
        None => Ok(()),
    }
}

pub(crate) fn index_of(labels: &[String], label: &str) -> Result<usize> {
    labels
        .iter()
        .position(|l| l == label)
        .ok_or_else(|| Error::UnknownElement(label.to_string()))
}

/// Sorts subsets by size, then lexicographically by their sorted members.
pub(crate) fn canonical_order(sets: &mut [BTreeSet<usize>]) {
    sets.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.iter().cmp(b.iter())));
}

/// Every subset of `0..n`, as bitmasks turned into sets.
pub(crate) fn all_subsets(n: usize) -> impl Iterator<Item = BTreeSet<usize>> {
    (0u64..1 << n).map(move |bits| (0..n).filter(|i| bits >> i & 1 == 1).collect())
}
