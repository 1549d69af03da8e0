//! Lockstep extraction from the FP tree: breadth-first candidate
//! enumeration, near-biclique expansion, size/redundancy filters, temporal
//! validation against the star table, and the supplementation pass for
//! multi-version items.

use std::collections::{BTreeSet, HashSet, VecDeque};
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::{StarOrientation, WindowConfig};
use crate::fptree::{build_fp_tree, FpTree, ROOT};
use crate::galaxy::{GalaxyGraph, Snapshot};
use crate::star::{Star, StarTable};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LockstepOrigin {
    Main,
    Supplement,
}

/// A validated lockstep. `downloaders`/`domains` are sorted; `domains` carry
/// base names with star ids stripped. `star_ids` are the supporting stars:
/// every star in the table on one of the lockstep's center-side nodes whose
/// leaves cover the whole leaf side.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Lockstep {
    pub lockstep_id: u64,
    pub downloaders: Vec<String>,
    pub domains: Vec<String>,
    pub star_ids: Vec<u64>,
    pub alpha: f64,
    pub fp_level: u32,
    pub detected_at: i64,
    pub origin: LockstepOrigin,
}

impl Lockstep {
    pub fn key(&self) -> (Vec<String>, Vec<String>) {
        (self.downloaders.clone(), self.domains.clone())
    }
}

/// A post-expansion, pre-filter candidate, exposed for golden tests.
/// `items` are the leaf-side node names on (or added to) the tree path;
/// `bases` the distinct center-side base names; `center_star_ids` the
/// versioned centers backing the candidate.
#[derive(Debug, Clone, PartialEq)]
pub struct Candidate {
    pub items: Vec<String>,
    pub bases: Vec<String>,
    pub center_star_ids: Vec<u64>,
    pub alpha: f64,
    pub fp_level: u32,
}

fn density_floor(alpha_min: f64, side: usize) -> usize {
    ((alpha_min * side as f64) + 1e-9).floor() as usize
}

fn meets_alpha(density: f64, alpha_min: f64) -> bool {
    density + 1e-12 >= alpha_min
}

/// Edge density of the subgraph induced by `items` x `bases` in `graph`,
/// at base level (an edge exists when any live version of the base contains
/// the item). Returns (edges, density).
fn induced_density(graph: &GalaxyGraph, items: &[u32], bases: &BTreeSet<u32>) -> (usize, f64) {
    let mut edges = 0usize;
    for &item in items {
        for &base in bases {
            if graph.has_base_edge(item, base) {
                edges += 1;
            }
        }
    }
    let cells = items.len() * bases.len();
    let density = if cells == 0 {
        1.0
    } else {
        edges as f64 / cells as f64
    };
    (edges, density)
}

fn per_item_coverage_ok(
    graph: &GalaxyGraph,
    items: &[u32],
    bases: &BTreeSet<u32>,
    alpha_min: f64,
) -> bool {
    let need = density_floor(alpha_min, bases.len());
    items.iter().all(|&item| {
        bases
            .iter()
            .filter(|&&b| graph.has_base_edge(item, b))
            .count()
            >= need
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum CandidateNode {
    /// Leaf-side item taken from a child of the path end.
    Item(u32),
    /// Center (snapshot index) taken from an ancestor's visited surplus.
    Center(usize),
}

/// Near-biclique expansion around the path ending at `node` (Alg. 5 shape):
/// ancestors are walked until one with a strictly larger visited list and
/// its visited surplus becomes center candidates penalized by hop count;
/// children become item candidates penalized by visited-list shrinkage.
/// Candidates are added greedily in (penalty, name) order while the density
/// and per-item coverage bounds hold; the first violation stops the scan.
///
/// Returns (items, centers, alpha) with centers as snapshot indexes.
pub fn near_biclique_expand(
    tree: &FpTree,
    node: usize,
    snapshot: &Snapshot,
    graph: &GalaxyGraph,
    cfg: &WindowConfig,
) -> (Vec<u32>, Vec<usize>, f64) {
    let path = tree.path_items(node);
    let visited = tree.nodes[node].visited.clone();

    let mut entries: Vec<(u32, CandidateNode)> = Vec::new();

    // Upward: first ancestor with a strictly larger visited list.
    let mut hops = 0u32;
    let mut cursor = tree.nodes[node].parent;
    let own: HashSet<usize> = visited.iter().copied().collect();
    while cursor != ROOT {
        hops += 1;
        let ancestor = &tree.nodes[cursor];
        if ancestor.visited.len() > visited.len() {
            for &ci in &ancestor.visited {
                if !own.contains(&ci) {
                    entries.push((hops, CandidateNode::Center(ci)));
                }
            }
            break;
        }
        cursor = ancestor.parent;
    }

    // Children of the path end.
    for &child in &tree.nodes[node].children {
        let child_node = &tree.nodes[child];
        let penalty = (visited.len() - child_node.visited.len()) as u32;
        entries.push((penalty, CandidateNode::Item(child_node.item.unwrap())));
    }

    entries.sort_by(|a, b| {
        let name = |c: &CandidateNode| match *c {
            CandidateNode::Item(item) => (0u8, graph.leaf_name(item).to_string(), 0u64),
            CandidateNode::Center(ci) => {
                let c = &snapshot.centers[ci];
                (1u8, graph.base_name(c.base).to_string(), c.star_id)
            }
        };
        let (ka, na, sa) = name(&a.1);
        let (kb, nb, sb) = name(&b.1);
        a.0.cmp(&b.0)
            .then_with(|| na.cmp(&nb))
            .then_with(|| ka.cmp(&kb))
            .then_with(|| sa.cmp(&sb))
    });

    let mut items = path;
    let mut centers = visited;
    let mut bases: BTreeSet<u32> = centers
        .iter()
        .map(|&ci| snapshot.centers[ci].base)
        .collect();
    let mut alpha = induced_density(graph, &items, &bases).1;

    for (_, cand) in entries {
        let mut next_items = items.clone();
        let mut next_bases = bases.clone();
        match cand {
            CandidateNode::Item(item) => {
                if next_items.contains(&item) {
                    continue;
                }
                next_items.push(item);
            }
            CandidateNode::Center(ci) => {
                next_bases.insert(snapshot.centers[ci].base);
            }
        }
        let (_, density) = induced_density(graph, &next_items, &next_bases);
        if !meets_alpha(density, cfg.alpha_min)
            || !per_item_coverage_ok(graph, &next_items, &next_bases, cfg.alpha_min)
        {
            break;
        }
        match cand {
            CandidateNode::Item(item) => items.push(item),
            CandidateNode::Center(ci) => {
                centers.push(ci);
                bases = next_bases;
                continue;
            }
        }
        bases = next_bases;
        alpha = density;
    }
    // Density over the committed sets (recomputed so center-only additions
    // that changed nothing still report the right value).
    alpha = induced_density(graph, &items, &bases).1;
    (items, centers, alpha)
}

fn candidate_from_node(
    tree: &FpTree,
    node: usize,
    snapshot: &Snapshot,
    graph: &GalaxyGraph,
    cfg: &WindowConfig,
) -> (Vec<u32>, Vec<usize>, f64, u32) {
    let fp_level = tree.nodes[node].depth as u32;
    if cfg.alpha_min < 1.0 {
        let (items, centers, alpha) = near_biclique_expand(tree, node, snapshot, graph, cfg);
        (items, centers, alpha, fp_level)
    } else {
        (
            tree.path_items(node),
            tree.nodes[node].visited.clone(),
            1.0,
            fp_level,
        )
    }
}

/// Every post-expansion candidate in breadth-first order, before any
/// filtering or temporal validation.
pub fn candidates(
    tree: &FpTree,
    snapshot: &Snapshot,
    graph: &GalaxyGraph,
    cfg: &WindowConfig,
) -> Vec<Candidate> {
    let mut out = Vec::new();
    let mut queue: VecDeque<usize> = tree.nodes[ROOT].children.iter().copied().collect();
    while let Some(node) = queue.pop_front() {
        queue.extend(tree.nodes[node].children.iter().copied());
        let (items, centers, alpha, fp_level) =
            candidate_from_node(tree, node, snapshot, graph, cfg);
        let mut item_names: Vec<String> = items
            .iter()
            .map(|&i| graph.leaf_name(i).to_string())
            .collect();
        item_names.sort();
        let mut base_names: Vec<String> = centers
            .iter()
            .map(|&ci| graph.base_name(snapshot.centers[ci].base).to_string())
            .collect();
        base_names.sort();
        base_names.dedup();
        let mut star_ids: Vec<u64> = centers
            .iter()
            .map(|&ci| snapshot.centers[ci].star_id)
            .collect();
        star_ids.sort_unstable();
        out.push(Candidate {
            items: item_names,
            bases: base_names,
            center_star_ids: star_ids,
            alpha,
            fp_level,
        });
    }
    out
}

/// Supporting stars for a (leaf side, center side) pair: every star whose
/// center is one of the bases and whose leaves cover the whole leaf side.
pub fn star_support(table: &StarTable, bases: &[String], leaf_side: &[String]) -> Vec<u64> {
    let mut ids = Vec::new();
    for base in bases {
        for &sid in table.ids_by_center(base) {
            let star = table.get(sid).expect("star table index consistent");
            if star.covers(leaf_side) {
                ids.push(sid);
            }
        }
    }
    ids.sort_unstable();
    ids.dedup();
    ids
}

/// Earliest window start at which two supporting stars lie at least `slide`
/// apart; `None` when no such pair exists (Eq. 8 unmet).
fn detection_time(
    table: &StarTable,
    support: &[u64],
    cfg: &WindowConfig,
    origin: i64,
) -> Option<i64> {
    let windows: BTreeSet<u64> = support
        .iter()
        .map(|&sid| table.get(sid).unwrap().window_index)
        .collect();
    let first = *windows.iter().next()?;
    windows
        .iter()
        .find(|&&w| (w - first) * cfg.slide >= cfg.slide)
        .map(|&w| cfg.window_start(origin, w))
}

/// Shared context for one extraction pass.
pub struct ExtractContext<'a> {
    pub star_table: &'a StarTable,
    pub main_graph: &'a GalaxyGraph,
    pub cfg: &'a WindowConfig,
    pub orientation: StarOrientation,
    pub origin: i64,
}

#[derive(Debug, Default, Clone, Copy)]
pub struct ExtractStats {
    pub nodes_visited: usize,
    pub expansion_time: Duration,
}

fn main_graph_checks(
    ctx: &ExtractContext,
    item_names: &[String],
    base_names: &[String],
) -> Option<f64> {
    let mut edges = 0usize;
    for item in item_names {
        let mut covered = 0usize;
        for base in base_names {
            if ctx.main_graph.has_base_edge_names(item, base) {
                covered += 1;
            }
        }
        edges += covered;
        if covered < density_floor(ctx.cfg.alpha_min, base_names.len()) {
            return None;
        }
    }
    let alpha = edges as f64 / (item_names.len() * base_names.len()) as f64;
    if meets_alpha(alpha, ctx.cfg.alpha_min) {
        Some(alpha)
    } else {
        None
    }
}

/// Runs one extraction pass over a built tree. Candidates failing the size
/// filter, the identical-child-visited filter, the density bounds (checked
/// against the run's main graph), or temporal validation are dropped;
/// survivors are deduplicated by (leaf side, base side) within the pass.
pub fn extract_locksteps(
    tree: &FpTree,
    snapshot: &Snapshot,
    pass_graph: &GalaxyGraph,
    ctx: &ExtractContext,
    origin_kind: LockstepOrigin,
) -> (Vec<Lockstep>, ExtractStats) {
    let mut stats = ExtractStats::default();
    let mut out = Vec::new();
    let mut seen: HashSet<(Vec<String>, Vec<String>)> = HashSet::new();

    let mut queue: VecDeque<usize> = tree.nodes[ROOT].children.iter().copied().collect();
    while let Some(node) = queue.pop_front() {
        queue.extend(tree.nodes[node].children.iter().copied());
        stats.nodes_visited += 1;

        // A child with the same visited list subsumes this node's candidate.
        let visited_len = tree.nodes[node].visited.len();
        if tree.nodes[node]
            .children
            .iter()
            .any(|&c| tree.nodes[c].visited.len() == visited_len)
        {
            continue;
        }

        let expanded_at = Instant::now();
        let (items, centers, _, fp_level) =
            candidate_from_node(tree, node, snapshot, pass_graph, ctx.cfg);
        stats.expansion_time += expanded_at.elapsed();

        if items.len() < 3 {
            continue;
        }
        let base_ids: BTreeSet<u32> = centers
            .iter()
            .map(|&ci| snapshot.centers[ci].base)
            .collect();
        if base_ids.len() < 3 {
            continue;
        }

        let mut item_names: Vec<String> = items
            .iter()
            .map(|&i| pass_graph.leaf_name(i).to_string())
            .collect();
        item_names.sort();
        let mut base_names: Vec<String> = base_ids
            .iter()
            .map(|&b| pass_graph.base_name(b).to_string())
            .collect();
        base_names.sort();

        let key = (item_names.clone(), base_names.clone());
        if seen.contains(&key) {
            continue;
        }

        let support = star_support(ctx.star_table, &base_names, &item_names);
        let detected_at = match detection_time(ctx.star_table, &support, ctx.cfg, ctx.origin) {
            Some(t) => t,
            None => continue,
        };
        let alpha = match main_graph_checks(ctx, &item_names, &base_names) {
            Some(a) => a,
            None => continue,
        };

        seen.insert(key);
        let (downloaders, domains) = match ctx.orientation {
            StarOrientation::DlrDom => (item_names, base_names),
            StarOrientation::DomDlr => (base_names, item_names),
        };
        out.push(Lockstep {
            lockstep_id: 0,
            downloaders,
            domains,
            star_ids: support,
            alpha,
            fp_level,
            detected_at,
            origin: origin_kind,
        });
    }
    (out, stats)
}

fn supplement_one(item_name: &str, ctx: &ExtractContext) -> (Vec<Lockstep>, ExtractStats) {
    let star_ids = ctx.star_table.ids_by_leaf(item_name);
    let stars: Vec<&Star> = star_ids
        .iter()
        .map(|&sid| ctx.star_table.get(sid).unwrap())
        .collect();
    let mut sub_graph = GalaxyGraph::new();
    sub_graph.update(stars.iter().copied());
    let sub_snapshot = sub_graph.adjacency_snapshot();
    let sub_tree = build_fp_tree(&sub_snapshot, ctx.cfg.level_cut);
    extract_locksteps(
        &sub_tree,
        &sub_snapshot,
        &sub_graph,
        ctx,
        LockstepOrigin::Supplement,
    )
}

/// Sub-pass candidates per multi-version item, pre-filter, for golden tests.
pub fn supplement_candidates(
    tree: &FpTree,
    main_graph: &GalaxyGraph,
    star_table: &StarTable,
    cfg: &WindowConfig,
) -> Vec<(String, Vec<Candidate>)> {
    tree.multi_version_items(main_graph)
        .into_iter()
        .map(|item| {
            let name = main_graph.leaf_name(item).to_string();
            let stars: Vec<&Star> = star_table
                .ids_by_leaf(&name)
                .iter()
                .map(|&sid| star_table.get(sid).unwrap())
                .collect();
            let mut sub_graph = GalaxyGraph::new();
            sub_graph.update(stars.iter().copied());
            let sub_snapshot = sub_graph.adjacency_snapshot();
            let sub_tree = build_fp_tree(&sub_snapshot, cfg.level_cut);
            let cands = candidates(&sub_tree, &sub_snapshot, &sub_graph, cfg);
            (name, cands)
        })
        .collect()
}

/// Supplementation pass: for each item on more than one tree path, rebuilds
/// a galaxy sub-graph and FP tree from only the table stars containing that
/// item and extracts again. Applied once per item, no recursion. Sub-passes
/// are independent; with `parallelism > 1` they run on a rayon pool and the
/// merge stays in item order, so output is identical to a serial run.
pub fn supplement_missing(
    tree: &FpTree,
    ctx: &ExtractContext,
    parallelism: usize,
) -> (Vec<Lockstep>, ExtractStats) {
    let items: Vec<String> = tree
        .multi_version_items(ctx.main_graph)
        .into_iter()
        .map(|i| ctx.main_graph.leaf_name(i).to_string())
        .collect();

    let results: Vec<(Vec<Lockstep>, ExtractStats)> = if parallelism > 1 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(parallelism)
            .build()
            .expect("thread pool");
        pool.install(|| {
            items
                .par_iter()
                .map(|name| supplement_one(name, ctx))
                .collect()
        })
    } else {
        items.iter().map(|name| supplement_one(name, ctx)).collect()
    };

    let mut stats = ExtractStats::default();
    let mut merged = Vec::new();
    let mut seen: HashSet<(Vec<String>, Vec<String>)> = HashSet::new();
    for (locksteps, sub_stats) in results {
        stats.nodes_visited += sub_stats.nodes_visited;
        stats.expansion_time += sub_stats.expansion_time;
        for ls in locksteps {
            if seen.insert(ls.key()) {
                merged.push(ls);
            }
        }
    }
    (merged, stats)
}

/// Merges the main and supplement passes: supplement results already seen in
/// the main pass are dropped, then locksteps strictly contained (both sides)
/// in another lockstep with identical star support are removed.
pub fn merge_passes(main: Vec<Lockstep>, supplement: Vec<Lockstep>) -> Vec<Lockstep> {
    let mut seen: HashSet<(Vec<String>, Vec<String>)> = HashSet::new();
    let mut all = Vec::new();
    for ls in main.into_iter().chain(supplement) {
        if seen.insert(ls.key()) {
            all.push(ls);
        }
    }
    let is_strict_subset = |a: &Lockstep, b: &Lockstep| -> bool {
        a.star_ids == b.star_ids
            && a.downloaders.iter().all(|d| b.downloaders.contains(d))
            && a.domains.iter().all(|d| b.domains.contains(d))
            && (a.downloaders.len() < b.downloaders.len() || a.domains.len() < b.domains.len())
    };
    let keep: Vec<bool> = all
        .iter()
        .map(|a| !all.iter().any(|b| is_strict_subset(a, b)))
        .collect();
    all.into_iter()
        .zip(keep)
        .filter_map(|(ls, k)| k.then_some(ls))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::star::detect_stars;

    fn star(id: u64, center: &str, leaves: &[&str], window: u64) -> Star {
        Star {
            star_id: id,
            center: center.into(),
            leaves: {
                let mut v: Vec<String> = leaves.iter().map(|s| s.to_string()).collect();
                v.sort();
                v
            },
            window_index: window,
            first_edge_time: window as i64 * 3 * 86_400,
            last_edge_time: window as i64 * 3 * 86_400 + 10,
            event_ids: vec![],
        }
    }

    fn table_with(stars: Vec<Star>) -> (StarTable, GalaxyGraph) {
        // Re-detect through the public path so table indexes stay coherent.
        let mut table = StarTable::new();
        let cfg = WindowConfig::default();
        let mut next_event = 0u64;
        let mut graph = GalaxyGraph::new();
        for s in stars {
            let events: Vec<crate::event::DownloadEvent> = s
                .leaves
                .iter()
                .map(|leaf| {
                    let e = crate::event::DownloadEvent {
                        event_id: next_event,
                        downloader: leaf.clone(),
                        domain: s.center.clone(),
                        payload: "p".into(),
                        timestamp: s.first_edge_time,
                    };
                    next_event += 1;
                    e
                })
                .collect();
            let refs: Vec<&crate::event::DownloadEvent> = events.iter().collect();
            let new = detect_stars(&refs, StarOrientation::DlrDom, &cfg, s.window_index, &mut table);
            graph.update(&new);
        }
        (table, graph)
    }

    fn ctx<'a>(
        table: &'a StarTable,
        graph: &'a GalaxyGraph,
        cfg: &'a WindowConfig,
    ) -> ExtractContext<'a> {
        ExtractContext {
            star_table: table,
            main_graph: graph,
            cfg,
            orientation: StarOrientation::DlrDom,
            origin: 0,
        }
    }

    #[test]
    fn figure_path_yields_prefilter_candidate() {
        let (table, graph) = table_with(vec![
            star(0, "dom_A", &["dlr_A", "dlr_B", "dlr_C", "dlr_E"], 0),
            star(1, "dom_B", &["dlr_A", "dlr_B", "dlr_C", "dlr_D"], 1),
            star(2, "dom_C", &["dlr_C", "dlr_D"], 0),
            star(3, "dom_D", &["dlr_B", "dlr_C", "dlr_E"], 1),
        ]);
        let cfg = WindowConfig {
            alpha_min: 1.0,
            ..WindowConfig::default()
        };
        let snap = graph.adjacency_snapshot();
        let tree = build_fp_tree(&snap, None);
        let cands = candidates(&tree, &snap, &graph, &cfg);
        assert!(cands.iter().any(|c| {
            c.items == vec!["dlr_A", "dlr_B", "dlr_C"]
                && c.bases == vec!["dom_A", "dom_B"]
        }));
        let _ = table;
    }

    #[test]
    fn supplementation_surfaces_missed_candidate() {
        let (table, graph) = table_with(vec![
            star(0, "dom_A", &["dlr_A", "dlr_B", "dlr_C", "dlr_E"], 0),
            star(1, "dom_B", &["dlr_A", "dlr_B", "dlr_C", "dlr_D"], 1),
            star(2, "dom_C", &["dlr_C", "dlr_D"], 0),
            star(3, "dom_D", &["dlr_B", "dlr_C", "dlr_E"], 1),
        ]);
        let cfg = WindowConfig {
            alpha_min: 1.0,
            ..WindowConfig::default()
        };
        let snap = graph.adjacency_snapshot();
        let tree = build_fp_tree(&snap, None);
        let by_item = supplement_candidates(&tree, &graph, &table, &cfg);
        let names: Vec<&str> = by_item.iter().map(|(n, _)| n.as_str()).collect();
        assert_eq!(names, vec!["dlr_D", "dlr_E"]);
        let dlr_d = &by_item[0].1;
        assert!(dlr_d.iter().any(|c| {
            c.items == vec!["dlr_C", "dlr_D"] && c.bases == vec!["dom_B", "dom_C"]
        }));
    }

    #[test]
    fn no_multi_version_items_no_supplement() {
        let (table, graph) = table_with(vec![
            star(0, "X", &["a", "b", "c"], 0),
            star(1, "Y", &["a", "b", "c"], 1),
        ]);
        let cfg = WindowConfig::default();
        let snap = graph.adjacency_snapshot();
        let tree = build_fp_tree(&snap, None);
        let c = ctx(&table, &graph, &cfg);
        let (sup, _) = supplement_missing(&tree, &c, 1);
        assert!(sup.is_empty());
    }

    #[test]
    fn complete_biclique_across_two_windows_is_extracted() {
        let (table, graph) = table_with(vec![
            star(0, "v1", &["u1", "u2", "u3"], 0),
            star(1, "v2", &["u1", "u2", "u3"], 0),
            star(2, "v3", &["u1", "u2", "u3"], 2),
        ]);
        let cfg = WindowConfig::default();
        let snap = graph.adjacency_snapshot();
        let tree = build_fp_tree(&snap, None);
        let c = ctx(&table, &graph, &cfg);
        let (found, _) = extract_locksteps(&tree, &snap, &graph, &c, LockstepOrigin::Main);
        assert_eq!(found.len(), 1);
        let ls = &found[0];
        assert_eq!(ls.downloaders, vec!["u1", "u2", "u3"]);
        assert_eq!(ls.domains, vec!["v1", "v2", "v3"]);
        assert!((ls.alpha - 1.0).abs() < 1e-12);
        assert_eq!(ls.star_ids, vec![0, 1, 2]);
        // Second qualifying star is in window 2.
        assert_eq!(ls.detected_at, cfg.window_start(0, 2));
    }

    #[test]
    fn single_window_biclique_fails_temporal_validation() {
        let (table, graph) = table_with(vec![
            star(0, "v1", &["u1", "u2", "u3"], 0),
            star(1, "v2", &["u1", "u2", "u3"], 0),
            star(2, "v3", &["u1", "u2", "u3"], 0),
        ]);
        let cfg = WindowConfig::default();
        let snap = graph.adjacency_snapshot();
        let tree = build_fp_tree(&snap, None);
        let c = ctx(&table, &graph, &cfg);
        let (found, _) = extract_locksteps(&tree, &snap, &graph, &c, LockstepOrigin::Main);
        assert!(found.is_empty());
    }

    #[test]
    fn near_biclique_missing_one_edge_recovered_at_point_eight() {
        // 3x3 minus the (u1, v1) edge, spanning windows 0 and 2.
        let (table, graph) = table_with(vec![
            star(0, "v1", &["u2", "u3"], 0),
            star(1, "v2", &["u1", "u2", "u3"], 0),
            star(2, "v3", &["u1", "u2", "u3"], 2),
        ]);
        let cfg = WindowConfig::default(); // alpha_min = 0.8
        let snap = graph.adjacency_snapshot();
        let tree = build_fp_tree(&snap, None);
        let c = ctx(&table, &graph, &cfg);
        let (found, _) = extract_locksteps(&tree, &snap, &graph, &c, LockstepOrigin::Main);
        assert_eq!(found.len(), 1);
        let ls = &found[0];
        assert_eq!(ls.downloaders, vec!["u1", "u2", "u3"]);
        assert_eq!(ls.domains, vec!["v1", "v2", "v3"]);
        assert!((ls.alpha - 8.0 / 9.0).abs() < 1e-12);
    }

    #[test]
    fn near_biclique_not_recovered_at_higher_floor() {
        let (table, graph) = table_with(vec![
            star(0, "v1", &["u2", "u3"], 0),
            star(1, "v2", &["u1", "u2", "u3"], 0),
            star(2, "v3", &["u1", "u2", "u3"], 2),
        ]);
        let cfg = WindowConfig {
            alpha_min: 0.95,
            ..WindowConfig::default()
        };
        let snap = graph.adjacency_snapshot();
        let tree = build_fp_tree(&snap, None);
        let c = ctx(&table, &graph, &cfg);
        let (found, _) = extract_locksteps(&tree, &snap, &graph, &c, LockstepOrigin::Main);
        assert!(found.is_empty());
    }

    #[test]
    fn complete_biclique_expansion_is_identity() {
        let (table, graph) = table_with(vec![
            star(0, "v1", &["u1", "u2", "u3"], 0),
            star(1, "v2", &["u1", "u2", "u3"], 1),
            star(2, "v3", &["u1", "u2", "u3"], 2),
        ]);
        let _ = table;
        let cfg = WindowConfig::default();
        let snap = graph.adjacency_snapshot();
        let tree = build_fp_tree(&snap, None);
        // Walk to the deepest node of the single path.
        let mut node = ROOT;
        while let Some(&child) = tree.nodes[node].children.first() {
            node = child;
        }
        let (items, centers, alpha) = near_biclique_expand(&tree, node, &snap, &graph, &cfg);
        assert_eq!(items.len(), 3);
        assert_eq!(centers.len(), 3);
        assert!((alpha - 1.0).abs() < 1e-12);
    }

    #[test]
    fn expansion_stops_at_first_density_violation() {
        // 4x4 grid: v1..v3 complete over u1..u3; v4 only covers u4; u4 only
        // reaches v4. Expanding the 3x3 with u4 or v4 drops density to
        // 10/16 or below, so the 3x3 must stay intact.
        let (table, graph) = table_with(vec![
            star(0, "v1", &["u1", "u2", "u3"], 0),
            star(1, "v2", &["u1", "u2", "u3"], 1),
            star(2, "v3", &["u1", "u2", "u3"], 2),
            star(3, "v4", &["u4", "u5"], 3),
        ]);
        let cfg = WindowConfig::default();
        let snap = graph.adjacency_snapshot();
        let tree = build_fp_tree(&snap, None);
        let c = ctx(&table, &graph, &cfg);
        let (found, _) = extract_locksteps(&tree, &snap, &graph, &c, LockstepOrigin::Main);
        assert_eq!(found.len(), 1);
        assert_eq!(found[0].downloaders, vec!["u1", "u2", "u3"]);
        assert_eq!(found[0].domains, vec!["v1", "v2", "v3"]);
    }

    #[test]
    fn supplement_parallel_matches_serial() {
        let (table, graph) = table_with(vec![
            star(0, "a1", &["s1", "s2", "x1", "x2"], 0),
            star(1, "a2", &["s1", "s2", "x1", "x2"], 1),
            star(2, "a3", &["s1", "s2", "x1", "x2"], 2),
            star(3, "b1", &["s1", "s2", "y1"], 0),
            star(4, "b2", &["s1", "s2", "y1"], 1),
            star(5, "b3", &["s1", "s2", "y1"], 3),
        ]);
        let cfg = WindowConfig::default();
        let snap = graph.adjacency_snapshot();
        let tree = build_fp_tree(&snap, cfg.level_cut);
        let c = ctx(&table, &graph, &cfg);
        let (serial, _) = supplement_missing(&tree, &c, 1);
        let (parallel, _) = supplement_missing(&tree, &c, 4);
        assert_eq!(serial, parallel);
    }

    #[test]
    fn merge_drops_duplicates_and_subsets_with_same_support() {
        let mk = |dlrs: &[&str], doms: &[&str], stars: &[u64]| Lockstep {
            lockstep_id: 0,
            downloaders: dlrs.iter().map(|s| s.to_string()).collect(),
            domains: doms.iter().map(|s| s.to_string()).collect(),
            star_ids: stars.to_vec(),
            alpha: 1.0,
            fp_level: 3,
            detected_at: 0,
            origin: LockstepOrigin::Main,
        };
        let main = vec![mk(&["a", "b", "c"], &["x", "y", "z"], &[1, 2])];
        let sup = vec![
            mk(&["a", "b", "c"], &["x", "y", "z"], &[1, 2]),
            mk(&["a", "b"], &["x", "y", "z"], &[1, 2]),
            mk(&["a", "b"], &["x", "y"], &[3, 4]),
        ];
        let merged = merge_passes(main, sup);
        assert_eq!(merged.len(), 2);
    }
}
