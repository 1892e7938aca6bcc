//! Generators for the hardness constructions: edge-incremental independent
//! set, edge-decremental clique with pendant edges, and the incremental
//! matching instances built from them.
//!
//! Unspecified fixed orders are ascending agent id, and a trailing "rest of
//! the agents" is filled in ascending id.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::model::{Agent, IncrementalInstance, Matching, ModelError, PreferenceList, PreferenceProfile, ProfileKind};
use crate::oracle::SimpleGraph;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReductionError {
    #[error("h = {h} is too small, need at least {min}")]
    HTooSmall { h: usize, min: usize },
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error(transparent)]
    Model(#[from] ModelError),
}

fn violated(msg: impl Into<String>) -> ReductionError {
    ReductionError::PreconditionViolated(msg.into())
}

/// Graph, distinguished edge, size `h` and an independent set of size `h` in
/// the graph minus the edge.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EiisInstance {
    pub graph: SimpleGraph,
    pub e_star: (usize, usize),
    pub h: usize,
    pub s_star: Vec<usize>,
}

/// Graph, distinguished edge, size `h` and a clique with pendant edges of
/// size `h` in the graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdcpeInstance {
    pub graph: SimpleGraph,
    pub e_star: (usize, usize),
    pub h: usize,
    pub s_star: Vec<usize>,
}

fn norm(a: usize, b: usize) -> (usize, usize) {
    (a.min(b), a.max(b))
}

fn without_edge(g: &SimpleGraph, e: (usize, usize)) -> SimpleGraph {
    let mut g = g.clone();
    g.remove_edge(e.0, e.1);
    g
}

fn is_independent(g: &SimpleGraph, s: &[usize]) -> bool {
    s.iter().all(|&a| s.iter().all(|&b| a == b || !g.has_edge(a, b)))
}

fn is_clique(g: &SimpleGraph, s: &[usize]) -> bool {
    s.iter().all(|&a| s.iter().all(|&b| a == b || g.has_edge(a, b)))
}

/// Least neighbor of `v` outside `clique`.
pub fn pendant(g: &SimpleGraph, clique: &[usize], v: usize) -> Option<usize> {
    g.neighbors(v).find(|w| !clique.contains(w))
}

fn unique_name(g: &SimpleGraph, base: String) -> String {
    let taken: BTreeSet<&str> = (0..g.len()).map(|v| g.name(v)).collect();
    let mut name = base;
    while taken.contains(name.as_str()) {
        name.push('\'');
    }
    name
}

/// Adds `h` new vertices joined to every old vertex, plus one edge between the
/// last two of them.
pub fn gen_eiis(g: &SimpleGraph, h: usize) -> Result<EiisInstance, ReductionError> {
    if h < 2 {
        return Err(ReductionError::HTooSmall { h, min: 2 });
    }
    let mut out = g.clone();
    let n = g.len();
    let mut s_star = Vec::new();
    for i in 1..=h {
        let name = unique_name(&out, format!("s{i}"));
        let s = out.add_vertex(name);
        for v in 0..n {
            out.add_edge(v, s);
        }
        s_star.push(s);
    }
    let e_star = (s_star[h - 2], s_star[h - 1]);
    out.add_edge(e_star.0, e_star.1);
    Ok(EiisInstance { graph: out, e_star, h, s_star })
}

/// Complements the graph minus the distinguished edge and hangs one new
/// pendant vertex on every old vertex.
pub fn gen_edcpe(e: &EiisInstance) -> Result<EdcpeInstance, ReductionError> {
    if e.h <= 2 {
        return Err(ReductionError::HTooSmall { h: e.h, min: 3 });
    }
    let mut g = without_edge(&e.graph, e.e_star).complement();
    let n = e.graph.len();
    for v in 0..n {
        let name = unique_name(&g, format!("p{}", e.graph.name(v)));
        let p = g.add_vertex(name);
        g.add_edge(v, p);
    }
    Ok(EdcpeInstance { graph: g, e_star: e.e_star, h: e.h, s_star: e.s_star.clone() })
}

/// Collects agents and tie-grouped lists.
#[derive(Default)]
struct Builder {
    names: Vec<String>,
    lists: Vec<Vec<Vec<Agent>>>,
}

impl Builder {
    fn agent(&mut self, name: String) -> Agent {
        self.names.push(name);
        self.lists.push(Vec::new());
        self.names.len() - 1
    }

    fn agents(&mut self, prefix: &str, n: usize) -> Vec<Agent> {
        (1..=n).map(|i| self.agent(format!("{prefix}{i}"))).collect()
    }

    fn strict(&mut self, a: Agent, order: impl IntoIterator<Item = Agent>) {
        self.lists[a].extend(order.into_iter().map(|b| vec![b]));
    }

    fn tie(&mut self, a: Agent, group: impl IntoIterator<Item = Agent>) {
        let g: Vec<Agent> = group.into_iter().collect();
        if !g.is_empty() {
            self.lists[a].push(g);
        }
    }

    /// Appends every agent not yet listed, ascending.
    fn rest(&mut self, a: Agent) {
        let seen: BTreeSet<Agent> = self.lists[a].iter().flatten().copied().collect();
        let rest: Vec<Agent> = (0..self.names.len()).filter(|&b| b != a && !seen.contains(&b)).collect();
        self.strict(a, rest);
    }

    fn profile(&self, kind: ProfileKind, sides: Option<(Vec<Agent>, Vec<Agent>)>) -> Result<PreferenceProfile, ModelError> {
        let lists = self.lists.iter().map(|g| PreferenceList::from_groups(g.clone())).collect();
        PreferenceProfile::new(kind, self.names.clone(), sides, lists)
    }
}

fn binom2(h: usize) -> usize {
    h * h.saturating_sub(1) / 2
}

/// Marriage with ties and incomplete lists, one swap apart. Yes iff the
/// graph minus the distinguished edge has a clique with pendant edges of
/// size `h`. Generated without padding agents, so some agents stay single.
pub fn gen_ism_ties_oneswap(e: &EdcpeInstance) -> Result<IncrementalInstance, ReductionError> {
    let g = &e.graph;
    let h = e.h;
    let edges = g.edges();
    let m = edges.len();
    if m <= binom2(h) + h {
        return Err(violated(format!("{m} edges, need more than {}", binom2(h) + h)));
    }
    if e.s_star.len() != h || !is_clique(g, &e.s_star) {
        return Err(violated("S* is not a clique of size h"));
    }
    if !g.has_edge(e.e_star.0, e.e_star.1) {
        return Err(violated("e* is not an edge"));
    }
    let pens: Vec<(usize, usize)> = e
        .s_star
        .iter()
        .map(|&v| pendant(g, &e.s_star, v).map(|w| norm(v, w)).ok_or_else(|| violated("S* lacks a pendant edge")))
        .collect::<Result<_, _>>()?;
    let k = h * h + 5 * h + 4;
    let t = 2 * k.div_ceil(2) + 2;
    let e_star = norm(e.e_star.0, e.e_star.1);
    let n = g.len();

    let mut b = Builder::default();
    // side U
    let vs: Vec<Agent> = (0..n).map(|v| b.agent(format!("v_{}", g.name(v)))).collect();
    let ys_plain = b.agents("y_", m - binom2(h) - h - 1);
    let y_star = b.agent("y_star".into());
    let e_dag = b.agent("e_dag".into());
    let q_odd: Vec<Agent> = (0..t / 2).map(|i| b.agent(format!("q_{}", 2 * i + 1))).collect();
    // side W
    let xs = b.agents("x_", n - h);
    let es: Vec<Agent> = edges.iter().map(|&(u, v)| b.agent(format!("e_{}_{}", g.name(u), g.name(v)))).collect();
    let y_dag = b.agent("y_dag".into());
    let q_even: Vec<Agent> = (0..t / 2).map(|i| b.agent(format!("q_{}", 2 * i + 2))).collect();
    let q: Vec<Agent> = (0..t).map(|i| if i % 2 == 0 { q_odd[i / 2] } else { q_even[i / 2] }).collect();
    let u_side: Vec<Agent> = (0..xs[0].min(es[0])).collect();
    let w_side: Vec<Agent> = (u_side.len()..b.names.len()).collect();

    let ys: Vec<Agent> = ys_plain.iter().copied().chain([y_star]).collect();
    let edge_agent: BTreeMap<(usize, usize), Agent> = edges.iter().copied().zip(es.iter().copied()).collect();
    let star_id = edges.iter().position(|&x| x == e_star).expect("e* is an edge");

    for v in 0..n {
        let inc: Vec<Agent> = edges.iter().enumerate().filter(|(_, &(a, c))| a == v || c == v).map(|(i, _)| es[i]).collect();
        b.tie(vs[v], inc);
        b.tie(vs[v], xs.iter().copied());
    }
    for &x in &xs {
        b.tie(x, vs.iter().copied());
        b.strict(x, [q[0]]);
    }
    for &y in &ys_plain {
        b.tie(y, es.iter().copied());
    }
    for (i, &(u, v)) in edges.iter().enumerate() {
        if i == star_id {
            continue;
        }
        b.tie(es[i], ys.iter().copied());
        b.tie(es[i], [vs[u], vs[v]]);
    }
    b.tie(q[0], xs.iter().copied());
    b.strict(q[0], [q[1]]);
    for i in 1..t - 1 {
        b.strict(q[i], [q[i - 1], q[i + 1]]);
    }
    b.strict(q[t - 1], [q[t - 2]]);
    b.strict(y_star, [y_dag]);
    b.tie(y_star, es.iter().copied());
    b.strict(es[star_id], [e_dag]);
    b.tie(es[star_id], ys.iter().copied());
    b.tie(es[star_id], [vs[e_star.0], vs[e_star.1]]);
    b.strict(e_dag, [y_dag, es[star_id]]);
    b.strict(y_dag, [e_dag, y_star]);
    let sides = Some((u_side.clone(), w_side.clone()));
    let p1 = b.profile(ProfileKind::Marriage, sides.clone())?;
    b.lists[y_dag] = vec![vec![y_star], vec![e_dag]];
    let p2 = b.profile(ProfileKind::Marriage, sides)?;

    let mut pairs = vec![(e_dag, y_dag)];
    for (&v, &pe) in e.s_star.iter().zip(&pens) {
        pairs.push((vs[v], edge_agent[&pe]));
    }
    let others: Vec<usize> = (0..n).filter(|v| !e.s_star.contains(v)).collect();
    pairs.extend(others.iter().zip(&xs).map(|(&v, &x)| (vs[v], x)));
    let in_clique = |&(a, c): &(usize, usize)| e.s_star.contains(&a) && e.s_star.contains(&c);
    let free_edges: Vec<Agent> =
        edges.iter().filter(|x| !in_clique(x) && !pens.contains(x)).map(|x| edge_agent[x]).collect();
    pairs.extend(ys.iter().copied().zip(free_edges));
    pairs.extend((0..t / 2).map(|i| (q[2 * i], q[2 * i + 1])));
    let m1 = Matching::from_pairs(pairs)?;
    Ok(IncrementalInstance::new(p1, p2, m1, k)?)
}

/// Marriage with ties, two swaps apart, and the number of pairs a stable
/// matching of profile2 must share with matching1 for a yes answer.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CommonPairsInstance {
    pub instance: IncrementalInstance,
    pub target_common: usize,
}

/// Yes iff the graph has an independent set of size `h`.
pub fn gen_ism_ties_twoswap(g: &SimpleGraph, h: usize) -> Result<CommonPairsInstance, ReductionError> {
    if h == 0 {
        return Err(ReductionError::HTooSmall { h, min: 1 });
    }
    let n = g.len();
    let edges = g.edges();
    let m = edges.len();
    let mut b = Builder::default();
    let name = |v: usize| g.name(v).to_string();
    let us: Vec<Agent> = (0..n).map(|v| b.agent(format!("u_{}", name(v)))).collect();
    let ws: Vec<Agent> = (0..n).map(|v| b.agent(format!("w_{}", name(v)))).collect();
    let es = b.agents("e_", m);
    let fs = b.agents("f_", m);
    let a_s = b.agents("a_", m);
    let bs = b.agents("b_", m);
    let w_start = b.names.len();
    let xs: Vec<Agent> = (0..n).map(|v| b.agent(format!("x_{}", name(v)))).collect();
    let ys: Vec<Agent> = (0..n).map(|v| b.agent(format!("y_{}", name(v)))).collect();
    let hs: Vec<(Agent, Agent)> = (0..m)
        .map(|l| {
            let (i, j) = edges[l];
            (b.agent(format!("h_{}_{}", l + 1, name(i))), b.agent(format!("h_{}_{}", l + 1, name(j))))
        })
        .collect();
    let cs = b.agents("c_", m);
    let ds = b.agents("d_", m);
    let sides = Some(((0..w_start).collect(), (w_start..b.names.len()).collect()));

    for v in 0..n {
        let own: Vec<Agent> = (0..m)
            .filter_map(|l| match edges[l] {
                (i, _) if i == v => Some(hs[l].0),
                (_, j) if j == v => Some(hs[l].1),
                _ => None,
            })
            .collect();
        b.strict(us[v], std::iter::once(xs[v]).chain(own).chain([ys[v]]));
        b.strict(xs[v], [ws[v], us[v]]);
        b.strict(ws[v], [ys[v], xs[v]]);
        b.strict(ys[v], [us[v], ws[v]]);
    }
    for l in 0..m {
        let (i, j) = edges[l];
        let (hi, hj) = hs[l];
        let next = (l + 1) % m;
        let prev = (l + m - 1) % m;
        b.tie(es[l], [hi, hj]);
        b.strict(es[l], [cs[l]]);
        b.tie(fs[l], [hi, hj]);
        b.strict(fs[l], [ds[l]]);
        b.tie(hi, [es[l], us[i], a_s[l]]);
        b.strict(hi, [fs[l]]);
        b.tie(hj, [es[l], us[j], bs[l]]);
        b.strict(hj, [fs[l]]);
        b.strict(a_s[l], [cs[next], hi]);
        b.strict(bs[l], [ds[next], hj]);
        b.tie(cs[l], [a_s[prev], es[l]]);
        b.tie(ds[l], [bs[prev], fs[l]]);
    }
    let p1 = b.profile(ProfileKind::Marriage, sides.clone())?;
    if m > 0 {
        b.lists[cs[0]] = vec![vec![a_s[m - 1]], vec![es[0]]];
        b.lists[ds[0]] = vec![vec![bs[m - 1]], vec![fs[0]]];
    }
    let p2 = b.profile(ProfileKind::Marriage, sides)?;

    let mut pairs = Vec::new();
    for v in 0..n {
        pairs.push((us[v], ys[v]));
        pairs.push((ws[v], xs[v]));
    }
    for l in 0..m {
        pairs.extend([(es[l], cs[l]), (fs[l], ds[l]), (a_s[l], hs[l].0), (bs[l], hs[l].1)]);
    }
    let m1 = Matching::from_pairs(pairs)?;
    let k = 2 * m1.len();
    Ok(CommonPairsInstance { instance: IncrementalInstance::new(p1, p2, m1, k)?, target_common: 2 * h })
}

/// Roommates with ties and complete lists, one swap apart. Yes iff the
/// graph has an independent set of size `h`. The independent set must be
/// the last `h` vertices and the distinguished edge joins the last two.
pub fn gen_isr_oneswap_complete(e: &EiisInstance) -> Result<IncrementalInstance, ReductionError> {
    let g = &e.graph;
    let r = g.len();
    let h = e.h;
    if h < 2 || h >= r {
        return Err(violated(format!("need 2 <= h < |V|, got h = {h}, |V| = {r}")));
    }
    let last: Vec<usize> = (r - h..r).collect();
    let mut s_star = e.s_star.clone();
    s_star.sort_unstable();
    if s_star != last {
        return Err(violated("S* must be the last h vertices"));
    }
    if norm(e.e_star.0, e.e_star.1) != (r - 2, r - 1) || !g.has_edge(r - 2, r - 1) {
        return Err(violated("e* must join the last two vertices"));
    }
    if !is_independent(&without_edge(g, e.e_star), &s_star) {
        return Err(violated("S* is not independent without e*"));
    }
    let mut b = Builder::default();
    let vs: Vec<Agent> = (0..r).map(|v| b.agent(format!("v_{}", g.name(v)))).collect();
    let cs = b.agents("c_", r - h);
    let xs = b.agents("x_", h);
    let ys = b.agents("y_", h);
    let zs = b.agents("z_", h);
    let (vr, vr1) = (vs[r - 1], vs[r - 2]);
    for v in 0..r {
        b.strict(vs[v], cs.iter().copied());
        let nb: Vec<Agent> = g.neighbors(v).map(|w| vs[w]).filter(|&w| v != r - 1 || w != vr1).collect();
        b.strict(vs[v], nb);
        if v == r - 1 {
            b.strict(vr, [vr1]);
        }
        b.strict(vs[v], xs.iter().copied());
        b.rest(vs[v]);
    }
    for &c in &cs {
        b.tie(c, vs.iter().copied());
        b.rest(c);
    }
    for i in 0..h {
        b.tie(xs[i], vs.iter().copied());
        b.strict(xs[i], [ys[i], zs[i]]);
        b.rest(xs[i]);
        b.strict(ys[i], [zs[i], xs[i]]);
        b.rest(ys[i]);
        b.strict(zs[i], [xs[i], ys[i]]);
        b.rest(zs[i]);
    }
    let p2 = b.profile(ProfileKind::Roommates, None)?;
    // profile1 swaps v_{r-1} and x_1 in the list of v_r
    let l = &mut b.lists[vr];
    let at = l.iter().position(|g| g == &vec![vr1]).expect("v_r lists v_{r-1}");
    l.swap(at, at + 1);
    let p1 = b.profile(ProfileKind::Roommates, None)?;

    let mut pairs: Vec<(Agent, Agent)> = (0..h).map(|i| (vs[r - 1 - i], xs[i])).collect();
    pairs.extend((0..r - h).map(|i| (vs[i], cs[i])));
    pairs.extend((0..h).map(|i| (ys[i], zs[i])));
    let m1 = Matching::from_pairs(pairs)?;
    Ok(IncrementalInstance::new(p1, p2, m1, 4 * h)?)
}

/// Roommates without ties. Per vertex the agents `p`, `p̄`, `q`, `q̄`;
/// matching1 pairs `p` with `q̄` and `q` with `p̄`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FederInstance {
    pub instance: IncrementalInstance,
    pub p: Vec<Agent>,
    pub q_bar: Vec<Agent>,
}

impl FederInstance {
    /// Vertices whose `p`–`q̄` pair survives in `m`.
    pub fn kept(&self, m: &Matching) -> Vec<usize> {
        (0..self.p.len()).filter(|&i| m.contains(self.p[i], self.q_bar[i])).collect()
    }
}

/// A stable matching of profile2 keeps the `p`–`q̄` pairs of an independent
/// set; `k` is set to twice the agent count.
pub fn gen_isr_noties_feder(g: &SimpleGraph) -> Result<FederInstance, ReductionError> {
    let n = g.len();
    let mut b = Builder::default();
    let mut ids = Vec::new();
    for v in 0..n {
        let nm = g.name(v);
        ids.push([format!("p_{nm}"), format!("pb_{nm}"), format!("q_{nm}"), format!("qb_{nm}")].map(|s| b.agent(s)));
    }
    let p: Vec<Agent> = ids.iter().map(|a| a[0]).collect();
    let q_bar: Vec<Agent> = ids.iter().map(|a| a[3]).collect();
    for (v, &[pi, pbi, qi, qbi]) in ids.iter().enumerate() {
        let nb: Vec<Agent> = g.neighbors(v).map(|w| p[w]).collect();
        b.strict(pi, std::iter::once(pbi).chain(nb).chain([qbi]));
        b.strict(pbi, [qi, pi]);
        b.strict(qi, [qbi, pbi]);
        b.strict(qbi, [pi, qi]);
    }
    let p2 = b.profile(ProfileKind::Roommates, None)?;
    for (v, &[pi, pbi, _, qbi]) in ids.iter().enumerate() {
        let nb: Vec<Agent> = g.neighbors(v).map(|w| p[w]).collect();
        b.lists[pi].clear();
        b.strict(pi, [pbi, qbi].into_iter().chain(nb));
    }
    let p1 = b.profile(ProfileKind::Roommates, None)?;
    let pairs = ids.iter().flat_map(|&[pi, pbi, qi, qbi]| [(pi, qbi), (qi, pbi)]);
    let m1 = Matching::from_pairs(pairs)?;
    let k = 2 * 4 * n;
    Ok(FederInstance { instance: IncrementalInstance::new(p1, p2, m1, k)?, p, q_bar })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{is_stable, profile_swap_distance};
    use crate::oracle::{
        enumerate_stable_matchings, has_clique_with_pendant_edges, has_independent_set, independence_number,
        max_common_pairs, stable_within, OracleConfig,
    };

    fn cfg() -> OracleConfig {
        OracleConfig::with_agents(200)
    }

    fn fig2() -> SimpleGraph {
        SimpleGraph::from_edges(4, &[(0, 1), (1, 2), (1, 3), (2, 3)])
    }

    fn graph_from_mask(n: usize, mask: u32) -> SimpleGraph {
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).collect();
        let edges: Vec<(usize, usize)> = pairs.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &e)| e).collect();
        SimpleGraph::from_edges(n, &edges)
    }

    #[test]
    fn eiis_examples() {
        let e = gen_eiis(&SimpleGraph::new(2), 2).unwrap();
        assert!(has_independent_set(&e.graph, 2, cfg()).unwrap());
        assert!(is_independent(&without_edge(&e.graph, e.e_star), &e.s_star));
        let k3 = SimpleGraph::from_edges(3, &[(0, 1), (0, 2), (1, 2)]);
        assert!(!has_independent_set(&gen_eiis(&k3, 2).unwrap().graph, 2, cfg()).unwrap());
        assert!(has_independent_set(&gen_eiis(&fig2(), 2).unwrap().graph, 2, cfg()).unwrap());
        assert_eq!(gen_eiis(&fig2(), 1), Err(ReductionError::HTooSmall { h: 1, min: 2 }));
    }

    #[test]
    fn edcpe_preserves_answers() {
        for mask in 0..64 {
            let g = graph_from_mask(4, mask);
            for h in 3..=4 {
                let e = gen_eiis(&g, h).unwrap();
                let d = gen_edcpe(&e).unwrap();
                assert!(is_clique(&d.graph, &d.s_star));
                assert!(d.s_star.iter().all(|&v| pendant(&d.graph, &d.s_star, v).is_some()));
                let yes = has_independent_set(&e.graph, h, cfg()).unwrap();
                assert_eq!(yes, has_independent_set(&g, h, cfg()).unwrap());
                let minus = without_edge(&d.graph, d.e_star);
                assert_eq!(has_clique_with_pendant_edges(&minus, h, OracleConfig { max_vertices: 20, ..cfg() }).unwrap(), yes);
            }
        }
        assert!(gen_edcpe(&gen_eiis(&fig2(), 2).unwrap()).is_err());
    }

    #[test]
    fn isr_oneswap_on_figure() {
        let e = gen_eiis(&fig2(), 2).unwrap();
        let inst = gen_isr_oneswap_complete(&e).unwrap();
        assert_eq!(profile_swap_distance(&inst.profile1, &inst.profile2).unwrap(), Some(1));
        assert!(inst.profile2.is_complete());
        let m2 = stable_within(&inst.profile2, &inst.matching1, inst.k, cfg()).unwrap().unwrap();
        assert!(is_stable(&inst.profile2, &m2));
    }

    #[test]
    fn isr_oneswap_direct_figure_instance() {
        // the figure's own instance: independent set {v3, v4} after dropping v3v4
        let g = fig2();
        let e = EiisInstance { graph: g, e_star: (2, 3), h: 2, s_star: vec![2, 3] };
        let inst = gen_isr_oneswap_complete(&e).unwrap();
        assert!(is_stable(&inst.profile1, &inst.matching1));
        assert!(stable_within(&inst.profile2, &inst.matching1, 8, cfg()).unwrap().is_some());
        let bad = EiisInstance { s_star: vec![1, 3], ..e };
        assert!(gen_isr_oneswap_complete(&bad).is_err());
    }

    #[test]
    fn twoswap_small_graphs() {
        for n in 1..=3 {
            for mask in 0..(1u32 << (n * (n - 1) / 2)) {
                let g = graph_from_mask(n, mask);
                let alpha = independence_number(&g, cfg()).unwrap();
                let c = gen_ism_ties_twoswap(&g, 1).unwrap();
                let inst = &c.instance;
                let swaps = profile_swap_distance(&inst.profile1, &inst.profile2).unwrap();
                assert_eq!(swaps, Some(if g.edges().is_empty() { 0 } else { 2 }));
                let (best, _) = max_common_pairs(&inst.profile2, &inst.matching1, cfg()).unwrap().unwrap();
                assert_eq!(best, 2 * alpha, "graph {mask} on {n}");
            }
        }
    }

    #[test]
    fn feder_single_vertex_and_triangle() {
        let f = gen_isr_noties_feder(&SimpleGraph::new(1)).unwrap();
        let all = enumerate_stable_matchings(&f.instance.profile2, cfg()).unwrap();
        assert!(all.iter().any(|m| f.kept(m) == vec![0]));
        let k3 = SimpleGraph::from_edges(3, &[(0, 1), (0, 2), (1, 2)]);
        let f = gen_isr_noties_feder(&k3).unwrap();
        let all = enumerate_stable_matchings(&f.instance.profile2, cfg()).unwrap();
        assert_eq!(all.iter().map(|m| f.kept(m).len()).max(), Some(1));
    }

    fn curated_edcpe() -> EdcpeInstance {
        // triangle 0,1,2 with pendants 3,4,5 and a spare edge 3-4
        let g = SimpleGraph::from_edges(6, &[(0, 1), (0, 2), (1, 2), (0, 3), (1, 4), (2, 5), (3, 4)]);
        EdcpeInstance { graph: g, e_star: (0, 1), h: 2, s_star: vec![0, 1] }
    }

    #[test]
    fn ism_oneswap_basic_properties() {
        let e = curated_edcpe();
        let inst = gen_ism_ties_oneswap(&e).unwrap();
        assert_eq!(profile_swap_distance(&inst.profile1, &inst.profile2).unwrap(), Some(1));
        assert!(is_stable(&inst.profile1, &inst.matching1));
        assert_eq!(inst.k, 18);
        let yes = has_clique_with_pendant_edges(&without_edge(&e.graph, e.e_star), 2, cfg()).unwrap();
        let got = stable_within(&inst.profile2, &inst.matching1, inst.k, cfg()).unwrap();
        assert_eq!(got.is_some(), yes);
        let small = EdcpeInstance { graph: SimpleGraph::from_edges(3, &[(0, 1), (1, 2)]), ..e };
        assert!(gen_ism_ties_oneswap(&small).is_err());
    }
}
