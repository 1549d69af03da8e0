//! Frequent-pattern tree over the sorted adjacency snapshot.
//!
//! Each center's sorted neighbor list is walked from the root, reusing
//! children where present; the center is appended to the visited list of
//! every node it traverses. A node's root path is a candidate downloader
//! set and its visited list the candidate centers.

use std::collections::HashMap;
use std::fmt::Write as _;

use crate::galaxy::{GalaxyGraph, Snapshot};

pub const ROOT: usize = 0;

#[derive(Debug, Clone)]
pub struct FpNode {
    /// Leaf-side item; `None` only for the root.
    pub item: Option<u32>,
    pub parent: usize,
    pub depth: usize,
    /// Children in insertion order.
    pub children: Vec<usize>,
    child_index: HashMap<u32, usize>,
    /// Indexes into `Snapshot::centers`, in insertion order.
    pub visited: Vec<usize>,
}

impl FpNode {
    fn new(item: Option<u32>, parent: usize, depth: usize) -> Self {
        FpNode {
            item,
            parent,
            depth,
            children: Vec::new(),
            child_index: HashMap::new(),
            visited: Vec::new(),
        }
    }

    pub fn child(&self, item: u32) -> Option<usize> {
        self.child_index.get(&item).copied()
    }
}

#[derive(Debug, Clone)]
pub struct FpTree {
    pub nodes: Vec<FpNode>,
    /// Number of distinct tree paths (nodes) per item.
    versions: HashMap<u32, u32>,
    pub level_cut: Option<u32>,
    /// Adjacency entries skipped because of the level cut.
    pub truncated_entries: u64,
}

/// Builds the tree from a two-round-sorted snapshot. With a level cut, nodes
/// beyond that depth are not created: a center's walk stops at the cut and
/// the rest of its list is skipped.
pub fn build_fp_tree(snapshot: &Snapshot, level_cut: Option<u32>) -> FpTree {
    let mut tree = FpTree {
        nodes: vec![FpNode::new(None, ROOT, 0)],
        versions: HashMap::new(),
        level_cut,
        truncated_entries: 0,
    };
    for (center_idx, center) in snapshot.centers.iter().enumerate() {
        let mut current = ROOT;
        for (pos, &item) in center.neighbors.iter().enumerate() {
            if let Some(cut) = level_cut {
                if tree.nodes[current].depth as u32 >= cut {
                    tree.truncated_entries += (center.neighbors.len() - pos) as u64;
                    break;
                }
            }
            let next = match tree.nodes[current].child(item) {
                Some(idx) => idx,
                None => {
                    let depth = tree.nodes[current].depth + 1;
                    let idx = tree.nodes.len();
                    tree.nodes.push(FpNode::new(Some(item), current, depth));
                    tree.nodes[current].children.push(idx);
                    tree.nodes[current].child_index.insert(item, idx);
                    *tree.versions.entry(item).or_insert(0) += 1;
                    idx
                }
            };
            tree.nodes[next].visited.push(center_idx);
            current = next;
        }
    }
    tree
}

impl FpTree {
    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    /// Items on the path root -> node, excluding the root.
    pub fn path_items(&self, mut node: usize) -> Vec<u32> {
        let mut items = Vec::with_capacity(self.nodes[node].depth);
        while node != ROOT {
            items.push(self.nodes[node].item.expect("non-root has item"));
            node = self.nodes[node].parent;
        }
        items.reverse();
        items
    }

    /// Number of distinct root paths the item appears on; 0 when absent.
    pub fn version_count(&self, item: u32) -> u32 {
        self.versions.get(&item).copied().unwrap_or(0)
    }

    /// Items appearing on more than one path, ordered by item name.
    pub fn multi_version_items(&self, graph: &GalaxyGraph) -> Vec<u32> {
        let mut items: Vec<u32> = self
            .versions
            .iter()
            .filter(|(_, &count)| count > 1)
            .map(|(&item, _)| item)
            .collect();
        items.sort_by(|&a, &b| graph.leaf_name(a).cmp(graph.leaf_name(b)));
        items
    }

    /// Indented text dump of items and visited lists, resolving names
    /// through the graph and snapshot the tree was built from.
    pub fn dump(&self, snapshot: &Snapshot, graph: &GalaxyGraph) -> String {
        let mut out = String::new();
        self.dump_node(ROOT, snapshot, graph, &mut out);
        out
    }

    fn dump_node(&self, node: usize, snapshot: &Snapshot, graph: &GalaxyGraph, out: &mut String) {
        let n = &self.nodes[node];
        if let Some(item) = n.item {
            let visited: Vec<String> = n
                .visited
                .iter()
                .map(|&ci| {
                    let c = &snapshot.centers[ci];
                    format!("({}){}", c.star_id, graph.base_name(c.base))
                })
                .collect();
            let _ = writeln!(
                out,
                "{}{} [{}]",
                "  ".repeat(n.depth - 1),
                graph.leaf_name(item),
                visited.join(", ")
            );
        }
        for &child in &n.children {
            self.dump_node(child, snapshot, graph, out);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::star::Star;

    fn star(id: u64, center: &str, leaves: &[&str]) -> Star {
        Star {
            star_id: id,
            center: center.into(),
            leaves: leaves.iter().map(|s| s.to_string()).collect(),
            window_index: 0,
            first_edge_time: 0,
            last_edge_time: 0,
            event_ids: vec![],
        }
    }

    fn figure_graph() -> GalaxyGraph {
        let mut g = GalaxyGraph::new();
        g.update(&[
            star(1, "dom_A", &["dlr_A", "dlr_B", "dlr_C", "dlr_E"]),
            star(2, "dom_B", &["dlr_A", "dlr_B", "dlr_C", "dlr_D"]),
            star(3, "dom_C", &["dlr_C", "dlr_D"]),
            star(4, "dom_D", &["dlr_B", "dlr_C", "dlr_E"]),
        ]);
        g
    }

    #[test]
    fn builds_figure_tree() {
        let g = figure_graph();
        let snap = g.adjacency_snapshot();
        let tree = build_fp_tree(&snap, None);
        let dump = tree.dump(&snap, &g);
        let expected = "\
dlr_C [(1)dom_A, (2)dom_B, (4)dom_D, (3)dom_C]
  dlr_B [(1)dom_A, (2)dom_B, (4)dom_D]
    dlr_A [(1)dom_A, (2)dom_B]
      dlr_E [(1)dom_A]
      dlr_D [(2)dom_B]
    dlr_E [(4)dom_D]
  dlr_D [(3)dom_C]
";
        assert_eq!(dump, expected);
    }

    #[test]
    fn empty_snapshot_gives_bare_root() {
        let tree = build_fp_tree(&Snapshot::default(), None);
        assert_eq!(tree.node_count(), 1);
        assert_eq!(tree.nodes[ROOT].children.len(), 0);
    }

    #[test]
    fn identical_neighbor_lists_share_one_path() {
        let mut g = GalaxyGraph::new();
        g.update(&[
            star(1, "X", &["a", "b", "c"]),
            star(2, "Y", &["a", "b", "c"]),
        ]);
        let snap = g.adjacency_snapshot();
        let tree = build_fp_tree(&snap, None);
        // Root + 3 path nodes.
        assert_eq!(tree.node_count(), 4);
        for node in &tree.nodes[1..] {
            assert_eq!(node.visited.len(), 2);
        }
    }

    #[test]
    fn version_counts_match_figure() {
        let g = figure_graph();
        let snap = g.adjacency_snapshot();
        let tree = build_fp_tree(&snap, None);
        let id = |name: &str| g.leaf_id(name).unwrap();
        assert_eq!(tree.version_count(id("dlr_D")), 2);
        assert_eq!(tree.version_count(id("dlr_E")), 2);
        assert_eq!(tree.version_count(id("dlr_C")), 1);
        assert_eq!(tree.version_count(9999), 0);
        let multi: Vec<&str> = tree
            .multi_version_items(&g)
            .into_iter()
            .map(|i| g.leaf_name(i))
            .collect();
        assert_eq!(multi, vec!["dlr_D", "dlr_E"]);
    }

    #[test]
    fn single_path_spine_has_version_one() {
        let mut g = GalaxyGraph::new();
        g.update(&[star(1, "X", &["a", "b"])]);
        let snap = g.adjacency_snapshot();
        let tree = build_fp_tree(&snap, None);
        assert_eq!(tree.version_count(g.leaf_id("a").unwrap()), 1);
    }

    #[test]
    fn level_cut_truncates_and_counts() {
        let mut g = GalaxyGraph::new();
        g.update(&[star(1, "X", &["a", "b", "c", "d", "e"])]);
        let snap = g.adjacency_snapshot();
        let tree = build_fp_tree(&snap, Some(2));
        assert!(tree.nodes.iter().all(|n| n.depth <= 2));
        assert_eq!(tree.truncated_entries, 3);
        // Conservation: visited entries + truncated = total adjacency entries.
        let inserted: usize = tree.nodes.iter().map(|n| n.visited.len()).sum();
        assert_eq!(inserted as u64 + tree.truncated_entries, 5);
    }

    #[test]
    fn reconstruction_visited_equals_matching_prefixes() {
        // Brute-force check on the figure graph: a node's visited set equals
        // the centers whose sorted list starts with the node's path items.
        let g = figure_graph();
        let snap = g.adjacency_snapshot();
        let tree = build_fp_tree(&snap, None);
        for (idx, node) in tree.nodes.iter().enumerate().skip(1) {
            let path = tree.path_items(idx);
            let expect: Vec<usize> = snap
                .centers
                .iter()
                .enumerate()
                .filter(|(_, c)| c.neighbors.len() >= path.len() && c.neighbors[..path.len()] == path[..])
                .map(|(ci, _)| ci)
                .collect();
            assert_eq!(node.visited, expect, "node {idx}");
        }
    }

    #[test]
    fn determinism_same_snapshot_same_tree() {
        let g = figure_graph();
        let snap = g.adjacency_snapshot();
        let t1 = build_fp_tree(&snap, None);
        let t2 = build_fp_tree(&snap, None);
        assert_eq!(t1.dump(&snap, &g), t2.dump(&snap, &g));
    }
}
