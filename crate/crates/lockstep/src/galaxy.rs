//! Incrementally maintained bipartite galaxy graph with star-versioned
//! center nodes and subset/superset replacement.

use std::collections::{BTreeMap, HashMap};
use std::io::Write;

use crate::star::Star;

/// String interner; ids are assigned in first-seen order and all ordering
/// decisions go through the names, never the raw ids.
#[derive(Debug, Default, Clone)]
pub struct Interner {
    names: Vec<String>,
    index: HashMap<String, u32>,
}

impl Interner {
    pub fn intern(&mut self, name: &str) -> u32 {
        if let Some(&id) = self.index.get(name) {
            return id;
        }
        let id = self.names.len() as u32;
        self.names.push(name.to_string());
        self.index.insert(name.to_string(), id);
        id
    }

    pub fn get(&self, name: &str) -> Option<u32> {
        self.index.get(name).copied()
    }

    pub fn name(&self, id: u32) -> &str {
        &self.names[id as usize]
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }
}

/// One live versioned center: a base node tagged with the star id that
/// produced it. (base, star_id) pairs are unique in the graph.
#[derive(Debug, Clone)]
pub struct Version {
    pub star_id: u64,
    pub base: u32,
    /// Leaf ids, sorted ascending by id.
    pub leaves: Vec<u32>,
}

fn is_subset(a: &[u32], b: &[u32]) -> bool {
    // Both sorted ascending.
    let mut bi = 0;
    for &x in a {
        while bi < b.len() && b[bi] < x {
            bi += 1;
        }
        if bi == b.len() || b[bi] != x {
            return false;
        }
        bi += 1;
    }
    true
}

/// Counters for one `update` call.
#[derive(Debug, Default, Clone, Copy, PartialEq, Eq)]
pub struct UpdateStats {
    pub added: usize,
    pub discarded_subset: usize,
    pub replaced: usize,
}

/// The bipartite graph. Leaves are the U side; versioned centers the V side.
/// At most one edge per (leaf, versioned center); among versions sharing a
/// base, no neighbor set contains another.
#[derive(Debug, Default)]
pub struct GalaxyGraph {
    leaf_names: Interner,
    base_names: Interner,
    versions: BTreeMap<u64, Version>,
    by_base: HashMap<u32, Vec<u64>>,
    /// Per leaf: active versions containing it, per base.
    leaf_adj: Vec<HashMap<u32, u32>>,
    /// Per leaf: number of active versions containing it.
    leaf_degree: Vec<u32>,
    edge_count: usize,
}

impl GalaxyGraph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn leaf_name(&self, id: u32) -> &str {
        self.leaf_names.name(id)
    }

    pub fn base_name(&self, id: u32) -> &str {
        self.base_names.name(id)
    }

    pub fn leaf_id(&self, name: &str) -> Option<u32> {
        self.leaf_names.get(name)
    }

    pub fn base_id(&self, name: &str) -> Option<u32> {
        self.base_names.get(name)
    }

    pub fn leaf_count(&self) -> usize {
        self.leaf_names.len()
    }

    pub fn version_count(&self) -> usize {
        self.versions.len()
    }

    /// Total node count: leaves plus live versioned centers.
    pub fn node_count(&self) -> usize {
        self.leaf_count() + self.version_count()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn versions(&self) -> impl Iterator<Item = &Version> {
        self.versions.values()
    }

    pub fn version(&self, star_id: u64) -> Option<&Version> {
        self.versions.get(&star_id)
    }

    pub fn leaf_degree(&self, leaf: u32) -> u32 {
        self.leaf_degree.get(leaf as usize).copied().unwrap_or(0)
    }

    /// True when some live version of `base` contains `leaf`.
    pub fn has_base_edge(&self, leaf: u32, base: u32) -> bool {
        self.leaf_adj
            .get(leaf as usize)
            .map_or(false, |m| m.contains_key(&base))
    }

    pub fn has_base_edge_names(&self, leaf: &str, base: &str) -> bool {
        match (self.leaf_id(leaf), self.base_id(base)) {
            (Some(l), Some(b)) => self.has_base_edge(l, b),
            _ => false,
        }
    }

    fn attach(&mut self, version: Version) {
        for &leaf in &version.leaves {
            let slot = leaf as usize;
            if self.leaf_adj.len() <= slot {
                self.leaf_adj.resize_with(slot + 1, HashMap::new);
                self.leaf_degree.resize(slot + 1, 0);
            }
            *self.leaf_adj[slot].entry(version.base).or_insert(0) += 1;
            self.leaf_degree[slot] += 1;
        }
        self.edge_count += version.leaves.len();
        self.by_base
            .entry(version.base)
            .or_default()
            .push(version.star_id);
        self.versions.insert(version.star_id, version);
    }

    fn detach(&mut self, star_id: u64) {
        let version = self.versions.remove(&star_id).expect("version present");
        for &leaf in &version.leaves {
            let slot = leaf as usize;
            if let Some(count) = self.leaf_adj[slot].get_mut(&version.base) {
                *count -= 1;
                if *count == 0 {
                    self.leaf_adj[slot].remove(&version.base);
                }
            }
            self.leaf_degree[slot] -= 1;
        }
        self.edge_count -= version.leaves.len();
        let ids = self.by_base.get_mut(&version.base).unwrap();
        ids.retain(|&id| id != star_id);
    }

    /// Applies a batch of new stars. For each star: if an existing version of
    /// the same base has a superset (or equal) leaf set, the star is
    /// discarded; otherwise every same-base version whose leaf set is a
    /// subset is removed and the star becomes a new version.
    pub fn update<'a, I>(&mut self, new_stars: I) -> UpdateStats
    where
        I: IntoIterator<Item = &'a Star>,
    {
        let mut stats = UpdateStats::default();
        for star in new_stars {
            let base = self.base_names.intern(&star.center);
            let mut leaves: Vec<u32> = star
                .leaves
                .iter()
                .map(|l| self.leaf_names.intern(l))
                .collect();
            leaves.sort_unstable();
            leaves.dedup();

            let existing = self.by_base.get(&base).cloned().unwrap_or_default();
            let mut subsumed = Vec::new();
            let mut is_subset_of_existing = false;
            for id in existing {
                let v = &self.versions[&id];
                if is_subset(&leaves, &v.leaves) {
                    is_subset_of_existing = true;
                    break;
                }
                if is_subset(&v.leaves, &leaves) {
                    subsumed.push(id);
                }
            }
            if is_subset_of_existing {
                stats.discarded_subset += 1;
                continue;
            }
            for id in subsumed {
                self.detach(id);
                stats.replaced += 1;
            }
            self.attach(Version {
                star_id: star.star_id,
                base,
                leaves,
            });
            stats.added += 1;
        }
        stats
    }

    /// Two-round sorted adjacency snapshot: centers by live degree
    /// descending (ties: (base name, star id) ascending), each neighbor list
    /// by leaf degree descending (ties: leaf name ascending). Pure read.
    pub fn adjacency_snapshot(&self) -> Snapshot {
        let mut centers: Vec<SnapshotCenter> = self
            .versions
            .values()
            .map(|v| {
                let mut neighbors = v.leaves.clone();
                neighbors.sort_by(|&a, &b| {
                    self.leaf_degree(b)
                        .cmp(&self.leaf_degree(a))
                        .then_with(|| self.leaf_name(a).cmp(self.leaf_name(b)))
                });
                SnapshotCenter {
                    star_id: v.star_id,
                    base: v.base,
                    neighbors,
                }
            })
            .collect();
        centers.sort_by(|a, b| {
            b.neighbors
                .len()
                .cmp(&a.neighbors.len())
                .then_with(|| self.base_name(a.base).cmp(self.base_name(b.base)))
                .then_with(|| a.star_id.cmp(&b.star_id))
        });
        Snapshot { centers }
    }

    /// Debug dump: one `base star_id leaf` record per edge.
    pub fn dump_edges<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        for v in self.versions.values() {
            for &leaf in &v.leaves {
                writeln!(
                    w,
                    "{}\t{}\t{}",
                    self.base_name(v.base),
                    v.star_id,
                    self.leaf_name(leaf)
                )?;
            }
        }
        Ok(())
    }

    /// Test support: verifies the same-base subsumption invariant.
    pub fn check_invariants(&self) -> Result<(), String> {
        for ids in self.by_base.values() {
            for (i, &a) in ids.iter().enumerate() {
                for &b in &ids[i + 1..] {
                    let va = &self.versions[&a];
                    let vb = &self.versions[&b];
                    if is_subset(&va.leaves, &vb.leaves) || is_subset(&vb.leaves, &va.leaves) {
                        return Err(format!(
                            "versions {a} and {b} of base {} are nested",
                            self.base_name(va.base)
                        ));
                    }
                }
            }
        }
        let edges: usize = self.versions.values().map(|v| v.leaves.len()).sum();
        if edges != self.edge_count {
            return Err(format!(
                "edge count drift: counted {edges}, cached {}",
                self.edge_count
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct SnapshotCenter {
    pub star_id: u64,
    pub base: u32,
    pub neighbors: Vec<u32>,
}

/// Immutable two-round-sorted adjacency structure; freely shareable.
#[derive(Debug, Clone, Default)]
pub struct Snapshot {
    pub centers: Vec<SnapshotCenter>,
}

impl Snapshot {
    pub fn total_entries(&self) -> usize {
        self.centers.iter().map(|c| c.neighbors.len()).sum()
    }
}
