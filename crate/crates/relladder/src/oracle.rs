//! Independent ground truth: two-terminal reliability of a component graph by
//! exhaustive state enumeration (small instances) and by recursive pivotal
//! factoring (medium instances).
//!
//! Perfect components (reliability exactly 1) are folded out of the state
//! space; zero-reliability components never reach the oracle because graph
//! expansion omits them.

use crate::ladder::{ComponentGraph, ComponentId, NodeRef};
use crate::scalar::{FromRational, One, Rat, Ring, Zero};
use std::collections::{BTreeSet, HashMap};
use thiserror::Error;

/// Enumeration is capped at 2^24 states; factoring at 40 open components.
pub const ENUMERATE_LIMIT: usize = 24;
pub const FACTORING_LIMIT: usize = 40;

#[derive(Debug, Error, PartialEq)]
pub enum OracleError {
    #[error("{components} imperfect components exceed the limit of {limit}")]
    TooLarge { components: usize, limit: usize },
    #[error("graphs with more than 64 nodes are not supported")]
    TooManyNodes,
}

/// Does a directed path of up components connect source to destination?
///
/// `up` lists the components that operate; everything else is down. An up
/// arc is traversable only if both endpoint nodes are up; two-way components
/// work in both directions; the source and destination nodes must themselves
/// be up.
pub fn reachable(graph: &ComponentGraph, up: &BTreeSet<ComponentId>) -> bool {
    let node_up = |n: &NodeRef| up.contains(&ComponentId::node(n.cell, n.kind));
    if !node_up(&graph.source) || !node_up(&graph.destination) {
        return false;
    }
    let mut reach = BTreeSet::from([graph.source]);
    let mut frontier = vec![graph.source];
    while let Some(v) = frontier.pop() {
        for arc in &graph.arcs {
            if !up.contains(&arc.id) {
                continue;
            }
            let next = if arc.from == v {
                arc.to
            } else if arc.two_way && arc.to == v {
                arc.from
            } else {
                continue;
            };
            if node_up(&next) && reach.insert(next) {
                frontier.push(next);
            }
        }
    }
    reach.contains(&graph.destination)
}

enum CompKind {
    Node(usize),
    Arc { from: usize, to: usize, two_way: bool },
}

struct Comp<T> {
    kind: CompKind,
    up: T,
    down: T,
}

/// Graph lowered to bitmask form; perfect components pre-applied.
struct Compiled<T> {
    node_count: usize,
    source: usize,
    dest: usize,
    base_adj: Vec<u64>,
    perfect_nodes: u64,
    comps: Vec<Comp<T>>,
}

fn compile<T: FromRational>(
    graph: &ComponentGraph,
    limit: usize,
) -> Result<Option<Compiled<T>>, OracleError> {
    if graph.nodes.len() > 64 {
        return Err(OracleError::TooManyNodes);
    }
    let index: HashMap<NodeRef, usize> = graph
        .nodes
        .iter()
        .enumerate()
        .map(|(i, n)| (n.id, i))
        .collect();
    let (Some(&source), Some(&dest)) = (index.get(&graph.source), index.get(&graph.destination))
    else {
        // a zero-reliability endpoint was pruned at expansion: never connected
        return Ok(None);
    };

    let mut base_adj = vec![0u64; graph.nodes.len()];
    let mut perfect_nodes = 0u64;
    let mut comps = Vec::new();
    let one = Rat::one();
    let lift_pair = |r: &Rat| {
        let up = T::from_rational(r);
        let down = T::from_rational(&(&one - r));
        (up, down)
    };

    for (i, node) in graph.nodes.iter().enumerate() {
        if node.reliability.is_one() {
            perfect_nodes |= 1 << i;
        } else {
            let (up, down) = lift_pair(&node.reliability);
            comps.push(Comp {
                kind: CompKind::Node(i),
                up,
                down,
            });
        }
    }
    for arc in &graph.arcs {
        let from = index[&arc.from];
        let to = index[&arc.to];
        if arc.reliability.is_one() {
            base_adj[from] |= 1 << to;
            if arc.two_way {
                base_adj[to] |= 1 << from;
            }
        } else {
            let (up, down) = lift_pair(&arc.reliability);
            comps.push(Comp {
                kind: CompKind::Arc {
                    from,
                    to,
                    two_way: arc.two_way,
                },
                up,
                down,
            });
        }
    }
    if comps.len() > limit {
        return Err(OracleError::TooLarge {
            components: comps.len(),
            limit,
        });
    }
    Ok(Some(Compiled {
        node_count: graph.nodes.len(),
        source,
        dest,
        base_adj,
        perfect_nodes,
        comps,
    }))
}

fn bfs(adj: &[u64], node_up: u64, source: usize, dest: usize) -> bool {
    let start = (1u64 << source) & node_up;
    if start == 0 || (node_up >> dest) & 1 == 0 {
        return false;
    }
    let mut reach = start;
    let mut frontier = start;
    while frontier != 0 {
        let mut next = 0u64;
        let mut f = frontier;
        while f != 0 {
            let v = f.trailing_zeros() as usize;
            f &= f - 1;
            next |= adj[v];
        }
        next &= node_up & !reach;
        reach |= next;
        frontier = next;
    }
    (reach >> dest) & 1 == 1
}

struct EnumState<T> {
    adj: Vec<u64>,
    node_up: u64,
    source: usize,
    dest: usize,
    total: T,
}

fn enumerate_rec<T: Ring>(comps: &[Comp<T>], idx: usize, acc: T, st: &mut EnumState<T>) {
    if idx == comps.len() {
        if bfs(&st.adj, st.node_up, st.source, st.dest) {
            st.total = st.total.clone() + acc;
        }
        return;
    }
    let comp = &comps[idx];
    match comp.kind {
        CompKind::Node(v) => {
            let bit = 1u64 << v;
            st.node_up &= !bit;
            enumerate_rec(comps, idx + 1, acc.clone() * comp.down.clone(), st);
            st.node_up |= bit;
            enumerate_rec(comps, idx + 1, acc * comp.up.clone(), st);
        }
        CompKind::Arc { from, to, two_way } => {
            enumerate_rec(comps, idx + 1, acc.clone() * comp.down.clone(), st);
            let saved_from = st.adj[from];
            st.adj[from] |= 1 << to;
            let saved_to = st.adj[to];
            if two_way {
                st.adj[to] |= 1 << from;
            }
            enumerate_rec(comps, idx + 1, acc * comp.up.clone(), st);
            st.adj[from] = saved_from;
            st.adj[to] = saved_to;
        }
    }
}

/// Sum over all component states of state probability times connectivity.
pub fn oracle_enumerate_generic<T: FromRational>(
    graph: &ComponentGraph,
) -> Result<T, OracleError> {
    let Some(c) = compile::<T>(graph, ENUMERATE_LIMIT)? else {
        return Ok(T::zero());
    };
    let mut st = EnumState {
        adj: c.base_adj.clone(),
        node_up: c.perfect_nodes | comp_node_bits(&c.comps),
        source: c.source,
        dest: c.dest,
        total: T::zero(),
    };
    enumerate_rec(&c.comps, 0, T::one(), &mut st);
    Ok(st.total)
}

fn comp_node_bits<T>(comps: &[Comp<T>]) -> u64 {
    comps
        .iter()
        .filter_map(|c| match c.kind {
            CompKind::Node(v) => Some(1u64 << v),
            _ => None,
        })
        .fold(0, |a, b| a | b)
}

/// Exact enumeration oracle.
pub fn oracle_enumerate(graph: &ComponentGraph) -> Result<Rat, OracleError> {
    oracle_enumerate_generic::<Rat>(graph)
}

/// Float enumeration oracle.
pub fn oracle_enumerate_f64(graph: &ComponentGraph) -> Result<f64, OracleError> {
    oracle_enumerate_generic::<f64>(graph)
}

// --------------------------------------------------------------------------
// Recursive pivotal factoring
// --------------------------------------------------------------------------

struct FactorState<T> {
    // adjacency counts; certain = pinned-up arcs, potential = certain + open
    cnt_certain: Vec<HashMap<usize, u32>>,
    cnt_potential: Vec<HashMap<usize, u32>>,
    adj_certain: Vec<u64>,
    adj_potential: Vec<u64>,
    nodes_certain: u64,
    nodes_potential: u64,
    open: Vec<bool>,
    source: usize,
    dest: usize,
    total: T,
}

impl<T: Ring> FactorState<T> {
    fn arc_delta(&mut self, certain: bool, from: usize, to: usize, two_way: bool, add: bool) {
        let (cnt, adj) = if certain {
            (&mut self.cnt_certain, &mut self.adj_certain)
        } else {
            (&mut self.cnt_potential, &mut self.adj_potential)
        };
        let mut apply = |f: usize, t: usize| {
            let entry = cnt[f].entry(t).or_insert(0);
            if add {
                *entry += 1;
            } else {
                *entry -= 1;
            }
            if *entry > 0 {
                adj[f] |= 1 << t;
            } else {
                adj[f] &= !(1 << t);
            }
        };
        apply(from, to);
        if two_way {
            apply(to, from);
        }
    }
}

fn factoring_rec<T: Ring>(comps: &[Comp<T>], order: &[usize], acc: T, st: &mut FactorState<T>) {
    // certain connection: whole subtree contributes its probability mass
    if bfs(&st.adj_certain, st.nodes_certain, st.source, st.dest) {
        st.total = st.total.clone() + acc;
        return;
    }
    // no potential connection: contributes nothing
    if !bfs(&st.adj_potential, st.nodes_potential, st.source, st.dest) {
        return;
    }
    let pivot = choose_pivot(comps, order, st);
    let comp = &comps[pivot];
    st.open[pivot] = false;
    match comp.kind {
        CompKind::Node(v) => {
            let bit = 1u64 << v;
            // down: remove from potential
            st.nodes_potential &= !bit;
            factoring_rec(comps, order, acc.clone() * comp.down.clone(), st);
            st.nodes_potential |= bit;
            // up: add to certain
            st.nodes_certain |= bit;
            factoring_rec(comps, order, acc * comp.up.clone(), st);
            st.nodes_certain &= !bit;
        }
        CompKind::Arc { from, to, two_way } => {
            st.arc_delta(false, from, to, two_way, false);
            factoring_rec(comps, order, acc.clone() * comp.down.clone(), st);
            st.arc_delta(false, from, to, two_way, true);
            st.arc_delta(true, from, to, two_way, true);
            factoring_rec(comps, order, acc * comp.up.clone(), st);
            st.arc_delta(true, from, to, two_way, false);
        }
    }
    st.open[pivot] = true;
}

/// Pivot on an open component incident to the certainly-reachable frontier;
/// `order` ranks components by (cell, label) so ties resolve deterministically.
fn choose_pivot<T>(comps: &[Comp<T>], order: &[usize], st: &FactorState<T>) -> usize {
    let frontier = certain_reach_set(st);
    let mut fallback = None;
    for &i in order {
        if !st.open[i] {
            continue;
        }
        if fallback.is_none() {
            fallback = Some(i);
        }
        let touches = match comps[i].kind {
            CompKind::Node(v) => (frontier >> v) & 1 == 1,
            CompKind::Arc { from, to, two_way } => {
                (frontier >> from) & 1 == 1 || (two_way && (frontier >> to) & 1 == 1)
            }
        };
        if touches {
            return i;
        }
    }
    fallback.expect("factoring recursion ran out of open components")
}

fn certain_reach_set<T>(st: &FactorState<T>) -> u64 {
    // frontier of certain progress: spread over certain arcs through
    // potentially-up nodes, starting at the source
    let start = 1u64 << st.source;
    let mut reach = start & st.nodes_potential;
    if reach == 0 {
        return start;
    }
    let mut frontier = reach;
    while frontier != 0 {
        let mut next = 0u64;
        let mut f = frontier;
        while f != 0 {
            let v = f.trailing_zeros() as usize;
            f &= f - 1;
            next |= st.adj_certain[v];
        }
        next &= st.nodes_potential & !reach;
        reach |= next;
        frontier = next;
    }
    reach
}

/// Recursive pivotal decomposition; equals enumeration wherever both run.
pub fn oracle_factoring_generic<T: FromRational>(
    graph: &ComponentGraph,
) -> Result<T, OracleError> {
    let Some(c) = compile::<T>(graph, FACTORING_LIMIT)? else {
        return Ok(T::zero());
    };
    let order = pivot_order(graph, &c);
    let open_node_bits = comp_node_bits(&c.comps);
    let n = c.node_count;
    let mut st = FactorState {
        cnt_certain: vec![HashMap::new(); n],
        cnt_potential: vec![HashMap::new(); n],
        adj_certain: c.base_adj.clone(),
        adj_potential: c.base_adj.clone(),
        nodes_certain: c.perfect_nodes,
        nodes_potential: c.perfect_nodes | open_node_bits,
        open: vec![true; c.comps.len()],
        source: c.source,
        dest: c.dest,
        total: T::zero(),
    };
    for (i, row) in c.base_adj.iter().enumerate() {
        let mut bits = *row;
        while bits != 0 {
            let t = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            st.cnt_certain[i].insert(t, 1);
            st.cnt_potential[i].insert(t, 1);
        }
    }
    for comp in &c.comps {
        if let CompKind::Arc { from, to, two_way } = comp.kind {
            st.arc_delta(false, from, to, two_way, true);
        }
    }
    factoring_rec(&c.comps, &order, T::one(), &mut st);
    Ok(st.total)
}

/// Deterministic component ranking: lowest cell index, then label order.
fn pivot_order<T>(graph: &ComponentGraph, c: &Compiled<T>) -> Vec<usize> {
    // compiled comps are nodes (graph order) then arcs (graph order); recover ids
    let mut ids: Vec<ComponentId> = graph
        .nodes
        .iter()
        .filter(|n| !n.reliability.is_one())
        .map(|n| ComponentId::node(n.id.cell, n.id.kind))
        .collect();
    ids.extend(
        graph
            .arcs
            .iter()
            .filter(|a| !a.reliability.is_one())
            .map(|a| a.id),
    );
    debug_assert_eq!(ids.len(), c.comps.len());
    let mut order: Vec<usize> = (0..ids.len()).collect();
    order.sort_by_key(|&i| ids[i]);
    order
}

/// Exact factoring oracle.
pub fn oracle_factoring(graph: &ComponentGraph) -> Result<Rat, OracleError> {
    oracle_factoring_generic::<Rat>(graph)
}

/// Float factoring oracle.
pub fn oracle_factoring_f64(graph: &ComponentGraph) -> Result<f64, OracleError> {
    oracle_factoring_generic::<f64>(graph)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ladder::{expand_graph, EdgeKind, LadderConfig, NodeKind, Preset};
    use crate::scalar::rat;
    use crate::verify::{random_config, random_pinned_config};
    use rand::SeedableRng;

    fn uniform(preset: Preset, n: usize, p: (i64, i64), rho: (i64, i64)) -> LadderConfig {
        LadderConfig::uniform(preset, n, &rat(p.0, p.1), &rat(rho.0, rho.1)).unwrap()
    }

    #[test]
    fn reachable_all_up_and_source_down() {
        let cfg = uniform(Preset::AngeleDirected, 2, (1, 2), (1, 2));
        let g = expand_graph(&cfg);
        let all: BTreeSet<ComponentId> = g.component_ids().into_iter().collect();
        assert!(reachable(&g, &all));
        let mut no_source = all.clone();
        no_source.remove(&ComponentId::node(0, NodeKind::S));
        assert!(!reachable(&g, &no_source));
    }

    #[test]
    fn reachable_via_backup_path() {
        // n=2 Angele directed, a1 down: S0 -e1-> T1 -d2-> S2 still connects
        let cfg = uniform(Preset::AngeleDirected, 2, (1, 2), (1, 2));
        let g = expand_graph(&cfg);
        let mut up: BTreeSet<ComponentId> = g.component_ids().into_iter().collect();
        up.remove(&ComponentId::edge(1, EdgeKind::A));
        assert!(reachable(&g, &up));
        up.remove(&ComponentId::edge(1, EdgeKind::E));
        assert!(!reachable(&g, &up));
    }

    #[test]
    fn single_arc_reliability() {
        // Angele directed n=1 is a single arc with two imperfect nodes
        let cfg = uniform(Preset::AngeleDirected, 1, (3, 5), (1, 2));
        let g = expand_graph(&cfg);
        let expect = rat(3, 5) * rat(1, 2) * rat(1, 2);
        assert_eq!(oracle_enumerate(&g).unwrap(), expect);
        assert_eq!(oracle_factoring(&g).unwrap(), expect);
    }

    #[test]
    fn angele_directed_n2_exact_value() {
        // p = rho = 1/2: 2 p^2 rho^3 - p^4 rho^4 = 15/256
        let cfg = uniform(Preset::AngeleDirected, 2, (1, 2), (1, 2));
        let g = expand_graph(&cfg);
        assert_eq!(oracle_enumerate(&g).unwrap(), rat(15, 256));
    }

    #[test]
    fn perfect_components_connect_certainly() {
        for preset in Preset::ALL {
            let cfg = uniform(preset, 2, (1, 1), (1, 1));
            let g = expand_graph(&cfg);
            assert_eq!(oracle_enumerate(&g).unwrap(), rat(1, 1), "{preset}");
            assert_eq!(oracle_factoring(&g).unwrap(), rat(1, 1), "{preset}");
        }
    }

    #[test]
    fn unreachable_destination_gives_zero() {
        // kill the only outgoing edge structure: p = 0 leaves no arcs at all
        let cfg = uniform(Preset::AngeleDirected, 2, (0, 1), (1, 2));
        let g = expand_graph(&cfg);
        assert!(oracle_enumerate(&g).unwrap().is_zero());
        assert!(oracle_factoring(&g).unwrap().is_zero());
    }

    #[test]
    fn too_large_is_reported() {
        let cfg = uniform(Preset::GeneralDirected, 3, (1, 2), (1, 2));
        let g = expand_graph(&cfg);
        assert!(matches!(
            oracle_enumerate(&g),
            Err(OracleError::TooLarge { .. })
        ));
    }

    #[test]
    fn enumeration_equals_factoring_on_random_configs() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for round in 0..50 {
            for preset in Preset::ALL {
                let n = 1 + round % 3;
                let cfg = random_pinned_config(&mut rng, preset, n, 14);
                let g = expand_graph(&cfg);
                let e = oracle_enumerate(&g).unwrap();
                let f = oracle_factoring(&g).unwrap();
                assert_eq!(e, f, "{preset} n={n}");
            }
        }
    }

    #[test]
    fn oracle_is_affine_in_each_component() {
        // R(x) = (1-x) R(0) + x R(1); at x = 0 conditioning equals deletion
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let cfg = random_config(&mut rng, Preset::Undirected, 2);
        for id in expand_graph(&cfg).component_ids() {
            let x = cfg.component_value(id).clone();
            let r_down =
                oracle_enumerate(&expand_graph(&cfg.with_component(id, rat(0, 1)).unwrap()))
                    .unwrap();
            let r_up =
                oracle_enumerate(&expand_graph(&cfg.with_component(id, rat(1, 1)).unwrap()))
                    .unwrap();
            let base = oracle_enumerate(&expand_graph(&cfg)).unwrap();
            assert_eq!(base, (Rat::one() - &x) * r_down + &x * r_up, "{id}");
        }
    }
}
