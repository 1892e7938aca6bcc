//! Brute-force ground truth: stable matching enumeration by backtracking,
//! incremental distance optima, graph problems and exhaustive WCFCS.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::model::{Agent, Matching, PreferenceProfile, UNRANKED};
use crate::wcfcs::WcfcsInstance;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("instance of size {size} exceeds the oracle bound {bound}")]
    TooLarge { size: usize, bound: usize },
    #[error("graph syntax, line {line}: {msg}")]
    GraphSyntax { line: usize, msg: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleConfig {
    pub max_agents: usize,
    pub max_vertices: usize,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig { max_agents: 12, max_vertices: 16 }
    }
}

impl OracleConfig {
    pub fn with_agents(max_agents: usize) -> Self {
        OracleConfig { max_agents, ..Self::default() }
    }
}

struct Search<'a> {
    profile: &'a PreferenceProfile,
    partner: Vec<Option<Agent>>,
    decided: Vec<bool>,
    hint: Vec<Option<Agent>>,
}

impl Search<'_> {
    /// For each agent, the best rank on its list held by a decided agent that
    /// would rather have it than its current partner. `x` may end with `y`
    /// only if it ranks `y` no worse than this.
    fn thresholds(&self) -> Vec<u32> {
        let p = self.profile;
        let mut th = vec![UNRANKED; self.partner.len()];
        for d in (0..self.partner.len()).filter(|&d| self.decided[d]) {
            let cur = self.partner[d].map_or(UNRANKED, |q| p.rank(d, q));
            for x in p.list(d).agents() {
                if p.rank(d, x) < cur {
                    th[x] = th[x].min(p.rank(x, d));
                }
            }
        }
        th
    }

    /// Assignments for undecided `a` that no decided agent blocks.
    fn options(&self, th: &[u32], a: Agent) -> Vec<Option<Agent>> {
        let p = self.profile;
        let mut out = Vec::new();
        let hint = self.hint[a].filter(|&h| p.acceptable(a, h));
        for b in hint.into_iter().chain(p.list(a).agents().filter(|&b| Some(b) != hint)) {
            if !self.decided[b] && p.rank(a, b) <= th[a] && p.rank(b, a) <= th[b] {
                out.push(Some(b));
            }
        }
        if th[a] == UNRANKED {
            out.push(None);
        }
        out
    }

    fn set(&mut self, a: Agent, opt: Option<Agent>, on: bool) {
        self.decided[a] = on;
        self.partner[a] = if on { opt } else { None };
        if let Some(b) = opt {
            self.decided[b] = on;
            self.partner[b] = if on { Some(a) } else { None };
        }
    }

    /// Branches on the undecided agent with fewest options; `false` stops.
    fn run(&mut self, bound: &mut Bound<'_>, visit: &mut dyn FnMut(&[Option<Agent>]) -> bool) -> bool {
        let th = self.thresholds();
        let mut open = Vec::new();
        for a in 0..self.partner.len() {
            if self.decided[a] {
                continue;
            }
            let opts = self.options(&th, a);
            if opts.is_empty() {
                return true;
            }
            open.push((a, opts));
        }
        if open.is_empty() {
            return visit(&self.partner);
        }
        if !bound(self, &open) {
            return true;
        }
        let (a, opts) = open.iter().min_by_key(|(_, o)| o.len()).cloned().expect("nonempty");
        for opt in opts {
            self.set(a, opt, true);
            let keep_going = self.run(bound, visit);
            self.set(a, opt, false);
            if !keep_going {
                return false;
            }
        }
        true
    }

    /// Lower bound on `|m1 Δ M|` over completions, given the options of the
    /// undecided agents.
    fn distance_lb(&self, m1: &[Option<Agent>], open: &[Options]) -> usize {
        let mut lb = distance_lower_bound(m1, &self.partner, &self.decided);
        // agents that cannot keep their m1 pair end single or in a new pair
        let mut moved = 0usize;
        let mut may_stay_single = Vec::new();
        for (a, opts) in open {
            let keeps = m1[*a].is_some_and(|b| opts.contains(&Some(b)));
            if keeps {
                continue;
            }
            if let Some(b) = m1[*a] {
                if !self.decided[b] && *a < b {
                    lb += 1;
                }
            }
            moved += 1;
            if opts.contains(&None) {
                may_stay_single.push(*a);
            }
        }
        // two single agents who accept each other would block, so singles come
        // at most one from each class of a clique partition
        let mut classes: Vec<Vec<Agent>> = Vec::new();
        for a in may_stay_single {
            match classes.iter_mut().find(|c| c.iter().all(|&b| self.profile.acceptable(a, b))) {
                Some(c) => c.push(a),
                None => classes.push(vec![a]),
            }
        }
        lb + moved.saturating_sub(classes.len()).div_ceil(2)
    }
}

type Options = (Agent, Vec<Option<Agent>>);
type Bound<'a> = dyn FnMut(&Search<'_>, &[Options]) -> bool + 'a;

/// Depth-first search over all weakly stable matchings. `bound` may prune a
/// partial assignment; `visit` returns `false` to stop.
fn search_stable(
    profile: &PreferenceProfile,
    cfg: OracleConfig,
    hint: Option<&Matching>,
    bound: &mut Bound<'_>,
    visit: &mut dyn FnMut(&[Option<Agent>]) -> bool,
) -> Result<(), OracleError> {
    let n = profile.len();
    if n > cfg.max_agents {
        return Err(OracleError::TooLarge { size: n, bound: cfg.max_agents });
    }
    let hint = hint.map(|m| m.partners(n)).unwrap_or_else(|| vec![None; n]);
    let mut s = Search { profile, partner: vec![None; n], decided: vec![false; n], hint };
    s.run(bound, visit);
    Ok(())
}

/// Every weakly stable matching of `profile`.
pub fn enumerate_stable_matchings(
    profile: &PreferenceProfile,
    cfg: OracleConfig,
) -> Result<Vec<Matching>, OracleError> {
    let mut out = Vec::new();
    search_stable(profile, cfg, None, &mut |_: &Search<'_>, _: &[Options]| true, &mut |p| {
        out.push(Matching::from_partners(p));
        true
    })?;
    out.sort();
    Ok(out)
}

// pairs of m1 already lost plus new pairs already formed
fn distance_lower_bound(m1: &[Option<Agent>], partner: &[Option<Agent>], decided: &[bool]) -> usize {
    let mut lb = 0;
    for a in 0..partner.len() {
        if !decided[a] {
            continue;
        }
        if let Some(b) = m1[a] {
            if partner[a] != Some(b) && (a < b || !decided[b]) {
                lb += 1;
            }
        }
        if let Some(b) = partner[a] {
            if a < b && m1[a] != Some(b) {
                lb += 1;
            }
        }
    }
    lb
}

/// Minimum `|m1 Δ M|` over stable `M` of `p2` with a witness; `None` when no
/// stable matching exists.
pub fn min_distance_stable(
    p2: &PreferenceProfile,
    m1: &Matching,
    cfg: OracleConfig,
) -> Result<Option<(usize, Matching)>, OracleError> {
    let n = p2.len();
    let m1p = m1.partners(n);
    let best = std::cell::Cell::new(usize::MAX);
    let mut witness = None;
    search_stable(
        p2,
        cfg,
        Some(m1),
        &mut |s: &Search<'_>, open: &[Options]| s.distance_lb(&m1p, open) < best.get(),
        &mut |p| {
            let m = Matching::from_partners(p);
            let d = m.distance(m1);
            if d < best.get() {
                best.set(d);
                witness = Some(m);
            }
            best.get() > 0
        },
    )?;
    Ok(witness.map(|m| (best.get(), m)))
}

/// Some stable matching of `p2` within distance `k` of `m1`.
pub fn stable_within(
    p2: &PreferenceProfile,
    m1: &Matching,
    k: usize,
    cfg: OracleConfig,
) -> Result<Option<Matching>, OracleError> {
    let n = p2.len();
    let m1p = m1.partners(n);
    let mut found = None;
    search_stable(
        p2,
        cfg,
        Some(m1),
        &mut |s: &Search<'_>, open: &[Options]| s.distance_lb(&m1p, open) <= k,
        &mut |p| {
            let m = Matching::from_partners(p);
            if m.distance(m1) <= k {
                found = Some(m);
                false
            } else {
                true
            }
        },
    )?;
    Ok(found)
}

/// Maximum `|m1 ∩ M|` over stable `M` of `p2` with a witness.
pub fn max_common_pairs(
    p2: &PreferenceProfile,
    m1: &Matching,
    cfg: OracleConfig,
) -> Result<Option<(usize, Matching)>, OracleError> {
    let n = p2.len();
    let m1p = m1.partners(n);
    let pairs: Vec<(Agent, Agent)> = m1.pairs().collect();
    let best = std::cell::Cell::new(None::<usize>);
    let mut witness = None;
    search_stable(
        p2,
        cfg,
        Some(m1),
        &mut |s: &Search<'_>, open: &[Options]| {
            let possible = pairs
                .iter()
                .filter(|&&(a, b)| {
                    s.partner[a] == Some(b) || open.iter().any(|(x, o)| *x == a && o.contains(&Some(b)))
                })
                .count();
            best.get().is_none_or(|b| possible > b)
        },
        &mut |p| {
            let c = (0..n).filter(|&a| m1p[a].is_some() && p[a] == m1p[a] && Some(a) < p[a]).count();
            if best.get().is_none_or(|b| c > b) {
                best.set(Some(c));
                witness = Some(Matching::from_partners(p));
            }
            c < pairs.len()
        },
    )?;
    Ok(best.get().zip(witness))
}

/// Simple undirected graph with named vertices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimpleGraph {
    names: Vec<String>,
    adj: Vec<Vec<bool>>,
}

impl SimpleGraph {
    /// Vertices named `v1..vn`, no edges.
    pub fn new(n: usize) -> Self {
        SimpleGraph { names: (1..=n).map(|i| format!("v{i}")).collect(), adj: vec![vec![false; n]; n] }
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Self {
        let mut g = SimpleGraph::new(n);
        for &(a, b) in edges {
            g.add_edge(a, b);
        }
        g
    }

    pub fn with_names(names: Vec<String>) -> Self {
        let n = names.len();
        SimpleGraph { names, adj: vec![vec![false; n]; n] }
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn name(&self, v: usize) -> &str {
        &self.names[v]
    }

    pub fn add_vertex(&mut self, name: String) -> usize {
        for row in &mut self.adj {
            row.push(false);
        }
        self.names.push(name);
        self.adj.push(vec![false; self.names.len()]);
        self.names.len() - 1
    }

    pub fn add_edge(&mut self, a: usize, b: usize) {
        assert!(a != b, "self-loop");
        self.adj[a][b] = true;
        self.adj[b][a] = true;
    }

    pub fn remove_edge(&mut self, a: usize, b: usize) {
        self.adj[a][b] = false;
        self.adj[b][a] = false;
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.adj[a][b]
    }

    pub fn neighbors(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.len()).filter(move |&u| self.adj[v][u])
    }

    /// Edges `(a, b)` with `a < b`, sorted.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let n = self.len();
        (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).filter(|&(a, b)| self.adj[a][b]).collect()
    }

    pub fn complement(&self) -> SimpleGraph {
        let n = self.len();
        let mut g = SimpleGraph::with_names(self.names.clone());
        for a in 0..n {
            for b in a + 1..n {
                if !self.adj[a][b] {
                    g.add_edge(a, b);
                }
            }
        }
        g
    }

    /// `v name` and `e a b` lines; `#` starts a comment.
    pub fn parse(text: &str) -> Result<SimpleGraph, OracleError> {
        let mut g = SimpleGraph::with_names(Vec::new());
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let err = |msg: &str| OracleError::GraphSyntax { line, msg: msg.to_string() };
            let toks: Vec<&str> = content.split_whitespace().collect();
            match toks.as_slice() {
                ["v", name] => {
                    if g.names.iter().any(|n| n == name) {
                        return Err(err("duplicate vertex"));
                    }
                    g.add_vertex(name.to_string());
                }
                ["e", a, b] => {
                    let find = |n: &str| g.names.iter().position(|x| x == n).ok_or_else(|| err("unknown vertex"));
                    let (a, b) = (find(a)?, find(b)?);
                    if a == b {
                        return Err(err("self-loop"));
                    }
                    g.add_edge(a, b);
                }
                _ => return Err(err("expected `v name` or `e a b`")),
            }
        }
        Ok(g)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for n in &self.names {
            out.push_str(&format!("v {n}\n"));
        }
        for (a, b) in self.edges() {
            out.push_str(&format!("e {} {}\n", self.names[a], self.names[b]));
        }
        out
    }

    fn masks(&self) -> Vec<u32> {
        (0..self.len())
            .map(|v| self.neighbors(v).fold(0u32, |m, u| m | (1 << u)))
            .collect()
    }
}

fn check_size(g: &SimpleGraph, cfg: OracleConfig) -> Result<(), OracleError> {
    if g.len() > cfg.max_vertices {
        return Err(OracleError::TooLarge { size: g.len(), bound: cfg.max_vertices });
    }
    Ok(())
}

fn any_subset(n: usize, h: usize, mut pred: impl FnMut(u32) -> bool) -> bool {
    if h > n {
        return false;
    }
    (0u32..(1u32 << n)).filter(|m| m.count_ones() as usize == h).any(&mut pred)
}

/// Whether `g` has an independent set of size `h`.
pub fn has_independent_set(g: &SimpleGraph, h: usize, cfg: OracleConfig) -> Result<bool, OracleError> {
    check_size(g, cfg)?;
    let adj = g.masks();
    Ok(any_subset(g.len(), h, |m| (0..g.len()).all(|v| m >> v & 1 == 0 || adj[v] & m == 0)))
}

/// Whether `g` has a clique of size `h`.
pub fn has_clique(g: &SimpleGraph, h: usize, cfg: OracleConfig) -> Result<bool, OracleError> {
    check_size(g, cfg)?;
    let adj = g.masks();
    Ok(any_subset(g.len(), h, |m| (0..g.len()).all(|v| m >> v & 1 == 0 || (adj[v] | (1 << v)) & m == m)))
}

/// Whether `g` has a clique of size `h` whose every vertex has a neighbour outside it.
pub fn has_clique_with_pendant_edges(g: &SimpleGraph, h: usize, cfg: OracleConfig) -> Result<bool, OracleError> {
    check_size(g, cfg)?;
    let adj = g.masks();
    Ok(any_subset(g.len(), h, |m| {
        (0..g.len()).all(|v| m >> v & 1 == 0 || ((adj[v] | (1 << v)) & m == m && adj[v] & !m != 0))
    }))
}

/// Size of a maximum independent set.
pub fn independence_number(g: &SimpleGraph, cfg: OracleConfig) -> Result<usize, OracleError> {
    let mut best = 0;
    for h in 1..=g.len() {
        if has_independent_set(g, h, cfg)? {
            best = h;
        } else {
            break;
        }
    }
    Ok(best)
}

/// Minimum-weight feasible subset by trying all subsets.
pub fn wcfcs_brute_force(inst: &WcfcsInstance) -> Result<Option<BTreeSet<usize>>, OracleError> {
    let n = inst.len();
    if n > 20 {
        return Err(OracleError::TooLarge { size: n, bound: 20 });
    }
    let mut best: Option<(u64, BTreeSet<usize>)> = None;
    for mask in 0u32..(1u32 << n) {
        if mask.count_ones() as usize != inst.target() {
            continue;
        }
        let set: BTreeSet<usize> = (0..n).filter(|&i| mask >> i & 1 == 1).collect();
        if inst.is_feasible(&set) {
            let w = set.iter().map(|&p| inst.weight(p)).sum();
            if best.as_ref().is_none_or(|(bw, _)| w < *bw) {
                best = Some((w, set));
            }
        }
    }
    Ok(best.map(|(_, s)| s))
}
