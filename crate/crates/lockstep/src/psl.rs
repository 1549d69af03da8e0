//! Public-suffix rules and registrable-domain extraction.
//!
//! Implements the standard public-suffix matching algorithm: the longest
//! matching rule wins, exception rules beat wildcard rules, and a host with
//! no matching rule falls back to treating its last label as the suffix.

use std::collections::HashSet;

use crate::error::{Error, Result};

/// Parsed public-suffix rules. Rules are stored label-reversed so matching
/// walks host labels right to left.
#[derive(Debug, Clone, Default)]
pub struct PublicSuffixRules {
    /// Plain and wildcard rules, e.g. `["com"]`, `["ck", "*"]`.
    rules: HashSet<Vec<String>>,
    /// Exception rules without the leading `!`, e.g. `["ck", "www"]`.
    exceptions: HashSet<Vec<String>>,
}

impl PublicSuffixRules {
    /// Parses the standard PSL text format: one rule per line, `//` comments,
    /// blank lines ignored. Parsing the same text twice yields identical
    /// rule sets.
    pub fn parse(text: &str) -> Self {
        let mut out = PublicSuffixRules::default();
        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() || line.starts_with("//") {
                continue;
            }
            // Rules end at the first whitespace.
            let rule = line.split_whitespace().next().unwrap_or("");
            if rule.is_empty() {
                continue;
            }
            let (target, is_exception) = match rule.strip_prefix('!') {
                Some(rest) => (rest, true),
                None => (rule, false),
            };
            let labels: Vec<String> = target
                .trim_matches('.')
                .split('.')
                .rev()
                .map(|l| l.to_ascii_lowercase())
                .collect();
            if labels.iter().any(|l| l.is_empty()) {
                continue;
            }
            if is_exception {
                out.exceptions.insert(labels);
            } else {
                out.rules.insert(labels);
            }
        }
        out
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        Ok(Self::parse(&std::fs::read_to_string(path)?))
    }

    pub fn len(&self) -> usize {
        self.rules.len() + self.exceptions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty() && self.exceptions.is_empty()
    }

    /// Number of host labels covered by the longest matching suffix rule.
    fn suffix_label_count(&self, labels: &[&str]) -> usize {
        // labels are reversed: labels[0] is the TLD.
        let mut best = 1; // implicit "*" rule
        for n in 1..=labels.len() {
            let prefix = &labels[..n];
            if self.matches_exception(prefix) {
                // Exception rule: the suffix is the rule minus its first
                // (leftmost, i.e. last-reversed) label.
                return n - 1;
            }
            if self.matches_rule(prefix) && n > best {
                best = n;
            }
        }
        best
    }

    fn matches_rule(&self, reversed: &[&str]) -> bool {
        if self
            .rules
            .contains(&reversed.iter().map(|s| s.to_string()).collect::<Vec<_>>())
        {
            return true;
        }
        if reversed.is_empty() {
            return false;
        }
        // Wildcard: last reversed label replaced by "*".
        let mut wild: Vec<String> = reversed.iter().map(|s| s.to_string()).collect();
        *wild.last_mut().unwrap() = "*".to_string();
        self.rules.contains(&wild)
    }

    fn matches_exception(&self, reversed: &[&str]) -> bool {
        self.exceptions
            .contains(&reversed.iter().map(|s| s.to_string()).collect::<Vec<_>>())
    }
}

/// Extracts the registrable domain: exactly one label below the longest
/// matching public suffix, lowercased. Hosts that are empty or are a bare
/// public suffix have no registrable domain and are rejected.
pub fn normalize_domain(raw_host: &str, rules: &PublicSuffixRules) -> Result<String> {
    let host = raw_host.trim().trim_end_matches('.').to_ascii_lowercase();
    if host.is_empty() {
        return Err(Error::NoRegistrableDomain(raw_host.to_string()));
    }
    let labels: Vec<&str> = host.split('.').collect();
    if labels.iter().any(|l| l.is_empty()) {
        return Err(Error::NoRegistrableDomain(raw_host.to_string()));
    }
    let mut reversed = labels.clone();
    reversed.reverse();
    let suffix_len = rules.suffix_label_count(&reversed);
    if labels.len() <= suffix_len {
        return Err(Error::NoRegistrableDomain(raw_host.to_string()));
    }
    let registrable = &labels[labels.len() - suffix_len - 1..];
    Ok(registrable.join("."))
}
