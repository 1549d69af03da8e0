//! Star detection over sliding windows and the deduplicated star table.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::config::{StarOrientation, WindowConfig};
use crate::event::DownloadEvent;

/// A center node observed with at least two distinct leaves inside one
/// window. Leaf sets are kept sorted for canonical comparison.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Star {
    pub star_id: u64,
    pub center: String,
    pub leaves: Vec<String>,
    pub window_index: u64,
    pub first_edge_time: i64,
    pub last_edge_time: i64,
    pub event_ids: Vec<u64>,
}

impl Star {
    pub fn covers(&self, downloaders: &[String]) -> bool {
        // Both sides sorted: merge walk.
        let mut it = self.leaves.iter();
        'outer: for want in downloaders {
            for have in it.by_ref() {
                match have.cmp(want) {
                    std::cmp::Ordering::Less => continue,
                    std::cmp::Ordering::Equal => continue 'outer,
                    std::cmp::Ordering::Greater => return false,
                }
            }
            return false;
        }
        true
    }
}

/// Append-only star table with exact-duplicate suppression on
/// (center, leaf set). Stars are never removed here; the galaxy graph is
/// what drops subsumed versions.
#[derive(Debug, Default)]
pub struct StarTable {
    stars: Vec<Star>,
    dedup: HashMap<(String, Vec<String>), u64>,
    by_center: HashMap<String, Vec<u64>>,
    by_leaf: HashMap<String, Vec<u64>>,
}

impl StarTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn stars(&self) -> &[Star] {
        &self.stars
    }

    pub fn len(&self) -> usize {
        self.stars.len()
    }

    pub fn is_empty(&self) -> bool {
        self.stars.is_empty()
    }

    pub fn get(&self, star_id: u64) -> Option<&Star> {
        self.stars.get(star_id as usize)
    }

    pub fn contains_shape(&self, center: &str, leaves: &[String]) -> bool {
        self.dedup
            .contains_key(&(center.to_string(), leaves.to_vec()))
    }

    /// Star ids whose center equals `center`.
    pub fn ids_by_center(&self, center: &str) -> &[u64] {
        self.by_center.get(center).map(Vec::as_slice).unwrap_or(&[])
    }

    /// Star ids whose leaf set contains `leaf`.
    pub fn ids_by_leaf(&self, leaf: &str) -> &[u64] {
        self.by_leaf.get(leaf).map(Vec::as_slice).unwrap_or(&[])
    }

    fn insert(&mut self, mut star: Star) -> u64 {
        let id = self.stars.len() as u64;
        star.star_id = id;
        self.dedup
            .insert((star.center.clone(), star.leaves.clone()), id);
        self.by_center
            .entry(star.center.clone())
            .or_default()
            .push(id);
        for leaf in &star.leaves {
            self.by_leaf.entry(leaf.clone()).or_default().push(id);
        }
        self.stars.push(star);
        id
    }
}

fn center_leaf<'a>(
    event: &'a DownloadEvent,
    orientation: StarOrientation,
) -> (&'a str, &'a str) {
    match orientation {
        StarOrientation::DlrDom => (&event.domain, &event.downloader),
        StarOrientation::DomDlr => (&event.downloader, &event.domain),
    }
}

/// Detects new stars in one window: groups window events by center,
/// collects the distinct leaves per center, and emits every group with at
/// least 2 leaves that is not an exact duplicate of a star already in the
/// table. New stars are appended to the table and returned.
///
/// Centers are processed in lexicographic order so star ids are
/// deterministic for a given input stream.
pub fn detect_stars(
    window_events: &[&DownloadEvent],
    orientation: StarOrientation,
    cfg: &WindowConfig,
    window_index: u64,
    table: &mut StarTable,
) -> Vec<Star> {
    struct Group {
        leaves: BTreeSet<String>,
        event_ids: Vec<u64>,
        first: i64,
        last: i64,
    }
    let mut groups: BTreeMap<&str, Group> = BTreeMap::new();
    for event in window_events {
        let (center, leaf) = center_leaf(event, orientation);
        let group = groups.entry(center).or_insert_with(|| Group {
            leaves: BTreeSet::new(),
            event_ids: Vec::new(),
            first: event.timestamp,
            last: event.timestamp,
        });
        group.leaves.insert(leaf.to_string());
        group.event_ids.push(event.event_id);
        group.first = group.first.min(event.timestamp);
        group.last = group.last.max(event.timestamp);
    }

    let mut new_stars = Vec::new();
    for (center, group) in groups {
        if group.leaves.len() < 2 {
            continue;
        }
        debug_assert!(group.last - group.first <= cfg.window_len as i64);
        let leaves: Vec<String> = group.leaves.into_iter().collect();
        if table.contains_shape(center, &leaves) {
            continue;
        }
        let mut event_ids = group.event_ids;
        event_ids.sort_unstable();
        let star = Star {
            star_id: 0,
            center: center.to_string(),
            leaves,
            window_index,
            first_edge_time: group.first,
            last_edge_time: group.last,
            event_ids,
        };
        let id = table.insert(star);
        new_stars.push(table.get(id).unwrap().clone());
    }
    new_stars
}
