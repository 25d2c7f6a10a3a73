//! Backtracking search for homomorphisms, proper colourings and
//! isomorphisms, and the core, retraction and chromatic-number verdicts
//! built on it.
//!
//! Every search is bounded by a node budget. Running out of budget is
//! reported as its own outcome and never as a refutation.

use std::cmp::Reverse;

use fixedbitset::FixedBitSet;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graphs::{complete, float_spectrum, hoffman_bound, GraphHandle, EIGEN_TOL};

pub const DEFAULT_NODE_BUDGET: u64 = 100_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SearchMode {
    Homomorphism,
    /// Homomorphism into `K_m`; colour permutations are factored out.
    Coloring(usize),
    Isomorphism,
}

#[derive(Clone, Debug)]
pub struct HomSearchProblem {
    pub source: GraphHandle,
    pub target: GraphHandle,
    pub mode: SearchMode,
    node_budget: u64,
}

impl HomSearchProblem {
    pub fn homomorphism(source: GraphHandle, target: GraphHandle) -> HomSearchProblem {
        HomSearchProblem { source, target, mode: SearchMode::Homomorphism, node_budget: DEFAULT_NODE_BUDGET }
    }

    pub fn endomorphism(g: GraphHandle) -> HomSearchProblem {
        HomSearchProblem::homomorphism(g.clone(), g)
    }

    pub fn coloring(g: GraphHandle, m: usize) -> HomSearchProblem {
        HomSearchProblem {
            source: g,
            target: complete(m),
            mode: SearchMode::Coloring(m),
            node_budget: DEFAULT_NODE_BUDGET,
        }
    }

    pub fn isomorphism(a: GraphHandle, b: GraphHandle) -> HomSearchProblem {
        HomSearchProblem {
            source: a,
            target: b,
            mode: SearchMode::Isomorphism,
            node_budget: DEFAULT_NODE_BUDGET,
        }
    }

    pub fn with_budget(mut self, nodes: u64) -> Result<HomSearchProblem> {
        if nodes == 0 {
            return Err(Error::Invalid("node budget must be positive".into()));
        }
        self.node_budget = nodes;
        Ok(self)
    }

    pub fn node_budget(&self) -> u64 {
        self.node_budget
    }

    /// Whether `map` is a solution, checked against raw adjacency.
    pub fn accepts(&self, map: &[usize]) -> bool {
        if !self.source.is_homomorphism_to(&self.target, map) {
            return false;
        }
        match self.mode {
            SearchMode::Isomorphism => {
                self.source.order() == self.target.order()
                    && is_bijective(map, self.target.order())
                    && self.source.size() == self.target.size()
            }
            _ => true,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "result", content = "mapping", rename_all = "kebab-case")]
pub enum Outcome {
    Found(Vec<usize>),
    Refuted,
    BudgetExhausted,
}

impl Outcome {
    pub fn mapping(&self) -> Option<&[usize]> {
        match self {
            Outcome::Found(m) => Some(m),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchReport {
    pub outcome: Outcome,
    pub nodes: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Flow {
    Continue,
    Stop,
    Budget,
}

struct Engine<'a> {
    p: &'a HomSearchProblem,
    nodes: u64,
    non_adj: Vec<FixedBitSet>,
}

impl<'a> Engine<'a> {
    fn new(p: &'a HomSearchProblem) -> Engine<'a> {
        let m = p.target.order();
        let non_adj = if p.mode == SearchMode::Isomorphism {
            (0..m)
                .map(|t| {
                    let mut row = p.target.row(t).clone();
                    row.toggle_range(..);
                    row.set(t, false);
                    row
                })
                .collect()
        } else {
            Vec::new()
        };
        Engine { p, nodes: 0, non_adj }
    }

    fn run(&mut self, symmetry: bool, visit: &mut dyn FnMut(&[usize]) -> bool) -> Flow {
        let (src, tgt) = (&self.p.source, &self.p.target);
        let (n, m) = (src.order(), tgt.order());
        let iso = self.p.mode == SearchMode::Isomorphism;
        if iso && (n != m || src.size() != tgt.size()) {
            return Flow::Continue;
        }
        let mut domains = vec![FixedBitSet::with_capacity(m); n];
        for (u, d) in domains.iter_mut().enumerate() {
            let du = src.degree(u);
            for t in 0..m {
                let dt = tgt.degree(t);
                let fits = if iso { du == dt } else { du == 0 || dt > 0 };
                d.set(t, fits);
            }
        }
        let mut assign = vec![usize::MAX; n];
        self.recurse(&mut assign, domains, 0, 0, symmetry, visit)
    }

    fn recurse(
        &mut self,
        assign: &mut [usize],
        domains: Vec<FixedBitSet>,
        depth: usize,
        colors_used: usize,
        symmetry: bool,
        visit: &mut dyn FnMut(&[usize]) -> bool,
    ) -> Flow {
        let src = &self.p.source;
        let n = src.order();
        if depth == n {
            return if visit(assign) { Flow::Continue } else { Flow::Stop };
        }
        let iso = self.p.mode == SearchMode::Isomorphism;
        let u = (0..n)
            .filter(|&u| assign[u] == usize::MAX)
            .min_by_key(|&u| (domains[u].count_ones(..), Reverse(src.degree(u)), u))
            .expect("unassigned vertex remains");
        let limit = match self.p.mode {
            SearchMode::Coloring(_) if symmetry => colors_used + 1,
            _ => usize::MAX,
        };
        let candidates: Vec<usize> = domains[u].ones().take_while(|&t| t < limit).collect();
        for t in candidates {
            self.nodes += 1;
            if self.nodes > self.p.node_budget {
                return Flow::Budget;
            }
            assign[u] = t;
            let mut next = domains.clone();
            let mut alive = true;
            for w in (0..n).filter(|&w| assign[w] == usize::MAX) {
                if src.is_adjacent(u, w) {
                    next[w].intersect_with(self.p.target.row(t));
                } else if iso {
                    next[w].intersect_with(&self.non_adj[t]);
                }
                if iso {
                    next[w].set(t, false);
                }
                if next[w].is_clear() {
                    alive = false;
                    break;
                }
            }
            if alive {
                let flow = self.recurse(assign, next, depth + 1, colors_used.max(t + 1), symmetry, visit);
                if flow != Flow::Continue {
                    assign[u] = usize::MAX;
                    return flow;
                }
            }
            assign[u] = usize::MAX;
        }
        Flow::Continue
    }
}

/// First solution in search order, or an exhaustive refutation.
pub fn find_homomorphism(p: &HomSearchProblem) -> SearchReport {
    let mut engine = Engine::new(p);
    let mut found = None;
    let flow = engine.run(true, &mut |map| {
        found = Some(map.to_vec());
        false
    });
    let outcome = match (flow, found) {
        (_, Some(map)) => {
            assert!(p.accepts(&map), "search produced an invalid mapping");
            Outcome::Found(map)
        }
        (Flow::Budget, None) => Outcome::BudgetExhausted,
        _ => Outcome::Refuted,
    };
    SearchReport { outcome, nodes: engine.nodes }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolutionCount {
    pub count: u64,
    /// False when the budget ran out, in which case `count` is a lower bound.
    pub complete: bool,
}

/// Counts all solutions, without colour-symmetry reduction.
pub fn count_homomorphisms(p: &HomSearchProblem) -> SolutionCount {
    let mut engine = Engine::new(p);
    let mut count = 0u64;
    let flow = engine.run(false, &mut |map| {
        debug_assert!(p.accepts(map));
        count += 1;
        true
    });
    SolutionCount { count, complete: flow != Flow::Budget }
}

pub fn find_isomorphism(a: &GraphHandle, b: &GraphHandle, budget: u64) -> Result<SearchReport> {
    let p = HomSearchProblem::isomorphism(a.clone(), b.clone()).with_budget(budget)?;
    Ok(find_homomorphism(&p))
}

fn is_bijective(map: &[usize], m: usize) -> bool {
    let mut seen = FixedBitSet::with_capacity(m);
    map.len() == m && map.iter().all(|&t| t < m && !seen.put(t))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum CoreVerdict {
    /// Every endomorphism is onto, so every endomorphism is an automorphism.
    Core,
    /// An endomorphism whose image misses `missed`.
    NotCore {
        endomorphism: Vec<usize>,
        missed: usize,
    },
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoreReport {
    pub verdict: CoreVerdict,
    /// Vertices `v` for which maps into `G - v` were searched.
    pub representatives: Vec<usize>,
    pub nodes: u64,
}

impl CoreReport {
    pub fn is_core(&self) -> Option<bool> {
        match self.verdict {
            CoreVerdict::Core => Some(true),
            CoreVerdict::NotCore { .. } => Some(false),
            CoreVerdict::Inconclusive => None,
        }
    }
}

/// Core test by searching for maps into `G - v` for every vertex `v`.
pub fn is_core(g: &GraphHandle, budget: u64) -> Result<CoreReport> {
    let orbits: Vec<Vec<usize>> = (0..g.order()).map(|v| vec![v]).collect();
    is_core_with_orbits(g, &orbits, budget)
}

/// Core test with one representative per automorphism orbit. `orbits`
/// must partition the vertex set; `budget` applies to each representative.
pub fn is_core_with_orbits(g: &GraphHandle, orbits: &[Vec<usize>], budget: u64) -> Result<CoreReport> {
    let n = g.order();
    let mut seen = FixedBitSet::with_capacity(n);
    for &v in orbits.iter().flatten() {
        if v >= n || seen.put(v) {
            return Err(Error::Invalid(format!("orbits do not partition 0..{n}")));
        }
    }
    if seen.count_ones(..) != n || orbits.iter().any(|o| o.is_empty()) {
        return Err(Error::Invalid(format!("orbits do not partition 0..{n}")));
    }
    let representatives: Vec<usize> = orbits.iter().map(|o| o[0]).collect();
    let reports = representatives
        .par_iter()
        .map(|&v| {
            let kept: Vec<usize> = (0..n).filter(|&w| w != v).collect();
            let p = HomSearchProblem::homomorphism(g.clone(), g.induced(&kept)?).with_budget(budget)?;
            let r = find_homomorphism(&p);
            let lifted = r.outcome.mapping().map(|m| m.iter().map(|&i| kept[i]).collect::<Vec<_>>());
            Ok((v, r, lifted))
        })
        .collect::<Result<Vec<_>>>()?;
    let nodes = reports.iter().map(|(_, r, _)| r.nodes).sum();
    let mut verdict = CoreVerdict::Core;
    for (v, r, lifted) in reports {
        if let Some(map) = lifted {
            assert!(
                g.is_homomorphism_to(g, &map) && !map.contains(&v),
                "invalid non-surjective endomorphism"
            );
            verdict = CoreVerdict::NotCore { endomorphism: map, missed: v };
            break;
        }
        if r.outcome == Outcome::BudgetExhausted {
            verdict = CoreVerdict::Inconclusive;
        }
    }
    Ok(CoreReport { verdict, representatives, nodes })
}

/// Retraction of `g` onto the induced subgraph on `sub`, which must be a
/// core: a homomorphism into it, composed with the inverse of its
/// restriction, fixes `sub` pointwise.
pub fn retraction_onto(g: &GraphHandle, sub: &[usize], budget: u64) -> Result<Outcome> {
    let h = g.induced(sub)?;
    let p = HomSearchProblem::homomorphism(g.clone(), h).with_budget(budget)?;
    let phi = match find_homomorphism(&p).outcome {
        Outcome::Found(m) => m,
        other => return Ok(other),
    };
    let restricted: Vec<usize> = sub.iter().map(|&v| phi[v]).collect();
    if !is_bijective(&restricted, sub.len()) {
        return Err(Error::Precondition(
            "the subgraph has a non-surjective endomorphism, so it is not a core".into(),
        ));
    }
    let mut inverse = vec![0; sub.len()];
    for (i, &j) in restricted.iter().enumerate() {
        inverse[j] = i;
    }
    let psi: Vec<usize> = phi.iter().map(|&j| sub[inverse[j]]).collect();
    assert!(g.is_homomorphism_to(g, &psi) && sub.iter().all(|&v| psi[v] == v), "retraction check failed");
    Ok(Outcome::Found(psi))
}

/// DSATUR greedy colouring: repeatedly colour the vertex seeing the most
/// distinct colours with the smallest free colour.
pub fn dsatur_coloring(g: &GraphHandle) -> Vec<usize> {
    let t = g.order();
    let mut color: Vec<Option<usize>> = vec![None; t];
    for _ in 0..t {
        let v = (0..t)
            .filter(|&v| color[v].is_none())
            .max_by_key(|&v| {
                let mut seen: Vec<usize> = g.neighbors(v).filter_map(|w| color[w]).collect();
                seen.sort_unstable();
                seen.dedup();
                (seen.len(), g.degree(v), Reverse(v))
            })
            .expect("uncoloured vertex remains");
        let c = (0..).find(|c| g.neighbors(v).all(|w| color[w] != Some(*c))).expect("some colour is free");
        color[v] = Some(c);
    }
    color.into_iter().map(|c| c.expect("coloured")).collect()
}

pub fn is_proper_coloring(g: &GraphHandle, coloring: &[usize]) -> bool {
    coloring.len() == g.order() && g.edges().all(|(u, v)| coloring[u] != coloring[v])
}

fn colors_used(coloring: &[usize]) -> usize {
    coloring.iter().map(|&c| c + 1).max().unwrap_or(0)
}

/// Largest clique, or the best found when the budget runs out.
pub fn max_clique(g: &GraphHandle, budget: u64) -> (Vec<usize>, bool) {
    fn grow(
        g: &GraphHandle,
        current: &mut Vec<usize>,
        cand: FixedBitSet,
        best: &mut Vec<usize>,
        nodes: &mut u64,
        budget: u64,
    ) -> bool {
        if current.len() > best.len() {
            *best = current.clone();
        }
        let mut cand = cand;
        while let Some(v) = cand.ones().next() {
            if current.len() + cand.count_ones(..) <= best.len() {
                return true;
            }
            *nodes += 1;
            if *nodes > budget {
                return false;
            }
            let mut next = cand.clone();
            next.intersect_with(g.row(v));
            current.push(v);
            let ok = grow(g, current, next, best, nodes, budget);
            current.pop();
            if !ok {
                return false;
            }
            cand.set(v, false);
        }
        true
    }
    let mut all = FixedBitSet::with_capacity(g.order());
    all.insert_range(..);
    let (mut best, mut nodes) = (Vec::new(), 0);
    let complete = grow(g, &mut Vec::new(), all, &mut best, &mut nodes, budget);
    (best, complete)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LowerBoundSource {
    Clique,
    Hoffman,
    Refutation,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChromaticReport {
    pub lower: usize,
    pub upper: usize,
    pub exact: Option<usize>,
    pub lower_source: LowerBoundSource,
    /// Proper colouring with `upper` colours.
    pub coloring: Vec<usize>,
    pub clique: Vec<usize>,
    pub hoffman: Option<f64>,
    pub nodes: u64,
}

/// Chromatic number by DSATUR for the upper bound, clique and Hoffman
/// bounds below, then colouring searches with one colour fewer until a
/// refutation or the budget stops it.
pub fn chromatic_number(g: &GraphHandle, budget: u64) -> Result<ChromaticReport> {
    if budget == 0 {
        return Err(Error::Invalid("node budget must be positive".into()));
    }
    let mut coloring = dsatur_coloring(g);
    let mut upper = colors_used(&coloring);
    let (clique, _) = max_clique(g, budget);
    let hoffman = (g.size() > 0).then(|| hoffman_bound(&float_spectrum(g))).flatten();
    let hoffman_ceil = hoffman.map_or(0, |h| (h - EIGEN_TOL).ceil() as usize);
    let (mut lower, mut lower_source) = if hoffman_ceil > clique.len() {
        (hoffman_ceil, LowerBoundSource::Hoffman)
    } else {
        (clique.len(), LowerBoundSource::Clique)
    };
    let mut nodes = 0;
    while upper > lower {
        let p = HomSearchProblem::coloring(g.clone(), upper - 1).with_budget(budget)?;
        let r = find_homomorphism(&p);
        nodes += r.nodes;
        match r.outcome {
            Outcome::Found(map) => {
                upper = colors_used(&map);
                coloring = map;
            }
            Outcome::Refuted => {
                lower = upper;
                lower_source = LowerBoundSource::Refutation;
            }
            Outcome::BudgetExhausted => break,
        }
    }
    assert!(is_proper_coloring(g, &coloring) && colors_used(&coloring) == upper);
    Ok(ChromaticReport {
        lower,
        upper,
        exact: (lower == upper).then_some(upper),
        lower_source,
        coloring,
        clique,
        hoffman,
        nodes,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PullbackReport {
    /// The best colouring of the target composed with the map.
    pub pullback: Vec<usize>,
    pub pullback_proper: bool,
    pub source: ChromaticReport,
    pub target: ChromaticReport,
    /// Pullback proper and the computed bounds allow `chi(G) <= chi(H)`.
    pub holds: bool,
}

/// Pulls the target's best colouring back along a homomorphism `g -> h`
/// and compares chromatic numbers.
pub fn verify_coloring_pullback(
    g: &GraphHandle,
    h: &GraphHandle,
    map: &[usize],
    budget: u64,
) -> Result<PullbackReport> {
    if !g.is_homomorphism_to(h, map) {
        return Err(Error::Invalid("mapping is not a homomorphism".into()));
    }
    let target = chromatic_number(h, budget)?;
    let source = chromatic_number(g, budget)?;
    let pullback: Vec<usize> = map.iter().map(|&t| target.coloring[t]).collect();
    let pullback_proper = is_proper_coloring(g, &pullback);
    let holds = pullback_proper && source.lower <= target.upper && colors_used(&pullback) <= target.upper;
    Ok(PullbackReport { pullback, pullback_proper, source, target, holds })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::{cycle, path, petersen, rook_graph, GraphMeta};

    /// Counts maps `V(a) -> V(b)` preserving edges by trying all of them.
    fn naive_count(a: &GraphHandle, b: &GraphHandle, iso: bool) -> u64 {
        let (n, m) = (a.order(), b.order());
        let mut map = vec![0usize; n];
        let mut count = 0;
        loop {
            let ok =
                a.is_homomorphism_to(b, &map) && (!iso || (is_bijective(&map, m) && a.size() == b.size()));
            count += ok as u64;
            let mut i = 0;
            loop {
                if i == n {
                    return count;
                }
                map[i] += 1;
                if map[i] < m {
                    break;
                }
                map[i] = 0;
                i += 1;
            }
        }
    }

    fn corpus() -> Vec<GraphHandle> {
        vec![
            complete(3),
            complete(4),
            cycle(4),
            cycle(5),
            cycle(6),
            path(3),
            rook_graph(2, 3),
            GraphHandle::from_edges(5, &[(0, 1), (1, 2), (2, 0), (3, 4)], GraphMeta::named("K3+K2")).unwrap(),
        ]
    }

    #[test]
    fn counts_agree_with_enumeration() {
        let gs = corpus();
        for a in &gs {
            for b in &gs {
                if (b.order() as f64).powi(a.order() as i32) > 3e6 {
                    continue;
                }
                let hom = count_homomorphisms(&HomSearchProblem::homomorphism(a.clone(), b.clone()));
                assert!(hom.complete);
                assert_eq!(hom.count, naive_count(a, b, false));
                let iso = count_homomorphisms(&HomSearchProblem::isomorphism(a.clone(), b.clone()));
                assert_eq!(iso.count, naive_count(a, b, true));
            }
        }
    }

    #[test]
    fn petersen_colorings() {
        let g = petersen();
        let two = find_homomorphism(&HomSearchProblem::coloring(g.clone(), 2));
        assert_eq!(two.outcome, Outcome::Refuted);
        let three = find_homomorphism(&HomSearchProblem::coloring(g.clone(), 3));
        assert!(is_proper_coloring(&g, three.outcome.mapping().unwrap()));
        let all = count_homomorphisms(&HomSearchProblem::coloring(g.clone(), 3));
        assert_eq!(all.count, naive_count(&g, &complete(3), false));
        let r = chromatic_number(&g, DEFAULT_NODE_BUDGET).unwrap();
        assert_eq!(r.exact, Some(3));
    }

    #[test]
    fn chromatic_numbers() {
        for m in 1..7 {
            assert_eq!(chromatic_number(&complete(m), 1000).unwrap().exact, Some(m));
        }
        assert_eq!(chromatic_number(&cycle(7), 1000).unwrap().exact, Some(3));
        assert_eq!(chromatic_number(&cycle(8), 1000).unwrap().exact, Some(2));
        let empty = GraphHandle::from_edges(0, &[], GraphMeta::named("empty")).unwrap();
        assert_eq!(chromatic_number(&empty, 10).unwrap().exact, Some(0));
        assert!(chromatic_number(&cycle(5), 0).is_err());
    }

    #[test]
    fn budget_is_not_a_refutation() {
        let p = HomSearchProblem::coloring(petersen(), 2).with_budget(1).unwrap();
        assert_eq!(find_homomorphism(&p).outcome, Outcome::BudgetExhausted);
        assert!(HomSearchProblem::endomorphism(petersen()).with_budget(0).is_err());
        let r = is_core(&petersen(), 1).unwrap();
        assert_eq!(r.is_core(), None);
    }

    #[test]
    fn cores() {
        assert_eq!(is_core(&petersen(), DEFAULT_NODE_BUDGET).unwrap().is_core(), Some(true));
        for m in 1..6 {
            assert_eq!(is_core(&complete(m), 1000).unwrap().is_core(), Some(true));
        }
        assert_eq!(is_core(&cycle(5), 1000).unwrap().is_core(), Some(true));
        let p3 = is_core(&path(3), 1000).unwrap();
        match p3.verdict {
            CoreVerdict::NotCore { endomorphism, missed } => {
                assert!(path(3).is_homomorphism_to(&path(3), &endomorphism));
                assert!(!endomorphism.contains(&missed));
            }
            v => panic!("{v:?}"),
        }
        assert_eq!(is_core(&cycle(6), 1000).unwrap().is_core(), Some(false));
    }

    #[test]
    fn orbit_pruning_keeps_verdicts() {
        for g in corpus().into_iter().chain([petersen(), cycle(7)]) {
            let full = is_core(&g, DEFAULT_NODE_BUDGET).unwrap().is_core();
            let one = vec![(0..g.order()).collect::<Vec<_>>()];
            let vt = g.regular_degree().is_some() && g.is_connected();
            // every graph in the list that is regular and connected is vertex-transitive
            if vt {
                let pruned = is_core_with_orbits(&g, &one, DEFAULT_NODE_BUDGET).unwrap().is_core();
                assert_eq!(full, pruned, "{:?}", g.meta());
            }
        }
        assert!(is_core_with_orbits(&petersen(), &[vec![0, 1]], 10).is_err());
    }

    #[test]
    fn isomorphism() {
        let g = petersen();
        let mut perm: Vec<usize> = (0..10).collect();
        perm.reverse();
        perm.swap(2, 7);
        let edges: Vec<(usize, usize)> = g.edges().map(|(u, v)| (perm[u], perm[v])).collect();
        let h = GraphHandle::from_edges(10, &edges, GraphMeta::named("relabelled")).unwrap();
        let r = find_isomorphism(&g, &h, 1_000_000).unwrap();
        assert!(matches!(r.outcome, Outcome::Found(_)));
        let r = find_isomorphism(&g, &rook_graph(2, 5), 1_000_000).unwrap();
        assert_eq!(r.outcome, Outcome::Refuted);
        // automorphism group of the Petersen graph has order 120
        let auts = count_homomorphisms(&HomSearchProblem::isomorphism(g.clone(), g));
        assert_eq!(auts.count, 120);
    }

    #[test]
    fn retractions() {
        // C5 with a pendant path retracts onto the cycle
        let edges = [(0, 1), (1, 2), (2, 3), (3, 4), (4, 0), (0, 5), (5, 6)];
        let g = GraphHandle::from_edges(7, &edges, GraphMeta::named("tadpole")).unwrap();
        let r = retraction_onto(&g, &[0, 1, 2, 3, 4], 10_000).unwrap();
        let psi = r.mapping().unwrap();
        assert!(g.is_homomorphism_to(&g, psi));
        assert!((0..5).all(|v| psi[v] == v));
        assert!(psi.iter().all(|&v| v < 5));
        // an edge is a core inside the path
        let r = retraction_onto(&path(4), &[1, 2], 1000).unwrap();
        assert!(r.mapping().is_some());
        // not a core
        assert!(retraction_onto(&cycle(6), &[0, 1, 2], 1000).is_err());
        // odd cycle does not map into an edge
        assert_eq!(retraction_onto(&cycle(5), &[0, 1], 1000).unwrap(), Outcome::Refuted);
    }

    #[test]
    fn pullbacks() {
        let g = petersen();
        let id: Vec<usize> = (0..10).collect();
        let r = verify_coloring_pullback(&g, &g, &id, DEFAULT_NODE_BUDGET).unwrap();
        assert!(r.holds && r.source.exact == r.target.exact);
        let c = find_homomorphism(&HomSearchProblem::coloring(g.clone(), 3));
        let map = c.outcome.mapping().unwrap();
        let r = verify_coloring_pullback(&g, &complete(3), map, 1000).unwrap();
        assert!(r.holds);
        assert!(verify_coloring_pullback(&g, &complete(2), &[0; 10], 1000).is_err());
    }

    #[test]
    fn cliques_found() {
        assert_eq!(max_clique(&petersen(), 1000).0.len(), 2);
        assert_eq!(max_clique(&complete(5), 1000).0.len(), 5);
        assert_eq!(max_clique(&rook_graph(3, 4), 1000).0.len(), 4);
    }
}
