//! Stable marriage without ties: Gale-Shapley, rotations, the rotation digraph
//! and the maximum-weight closed subset via minimum cut.

use std::collections::{HashMap, VecDeque};

use thiserror::Error;

use crate::bitset::Bits;
use crate::model::{Agent, IncrementalInstance, Matching, PreferenceProfile};
use crate::sr::Rotation;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SmError {
    #[error("profile is not a marriage profile")]
    NotMarriage,
    #[error("preference lists contain ties")]
    TiesPresent,
    #[error("agent is unmatched")]
    UnmatchedAgent,
    #[error("state exploration exceeded {0} matchings")]
    TooManyStates(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    U,
    W,
}

fn check(profile: &PreferenceProfile) -> Result<Vec<Vec<Agent>>, SmError> {
    if !profile.is_marriage() {
        return Err(SmError::NotMarriage);
    }
    profile.strict_orders().ok_or(SmError::TiesPresent)
}

/// Proposer-optimal stable matching; proposers act in ascending id order.
pub fn gale_shapley(profile: &PreferenceProfile, side: Side) -> Result<Matching, SmError> {
    let lists = check(profile)?;
    let proposers: &[Agent] = match side {
        Side::U => profile.side_u(),
        Side::W => profile.side_w(),
    };
    let n = profile.len();
    let mut next = vec![0usize; n];
    let mut partner: Vec<Option<Agent>> = vec![None; n];
    let mut free: VecDeque<Agent> = proposers.iter().copied().collect();
    while let Some(p) = free.pop_front() {
        let Some(&r) = lists[p].get(next[p]) else { continue };
        next[p] += 1;
        match partner[r] {
            None => {
                partner[r] = Some(p);
                partner[p] = Some(r);
            }
            Some(cur) if profile.rank(r, p) < profile.rank(r, cur) => {
                partner[cur] = None;
                partner[r] = Some(p);
                partner[p] = Some(r);
                free.push_front(cur);
            }
            Some(_) => free.push_front(p),
        }
    }
    Ok(Matching::from_partners(&partner))
}

fn successor_in(profile: &PreferenceProfile, partner: &[Option<Agent>], u: Agent) -> Option<Agent> {
    let mu = partner[u]?;
    let w = profile
        .list(u)
        .agents()
        .skip_while(|&w| w != mu)
        .skip(1)
        .find(|&w| partner[w].is_none_or(|mw| profile.rank(w, u) < profile.rank(w, mw)))?;
    // an unmatched acceptable agent stays unmatched in every stable matching,
    // so u can never move past it
    partner[w].map(|_| w)
}

/// First agent after `m(u)` on `u`'s list that is matched and prefers `u` to its
/// partner, or `None` if an unmatched agent accepting `u` comes first.
pub fn successor(profile: &PreferenceProfile, m: &Matching, u: Agent) -> Result<Option<Agent>, SmError> {
    let partner = m.partners(profile.len());
    if partner[u].is_none() {
        return Err(SmError::UnmatchedAgent);
    }
    Ok(successor_in(profile, &partner, u))
}

/// Rotations exposed in a stable matching, as pairs `(u_i, m(u_i))`.
fn exposed(profile: &PreferenceProfile, partner: &[Option<Agent>]) -> Vec<Rotation> {
    let n = profile.len();
    let mut next = vec![None; n];
    for &u in profile.side_u() {
        next[u] = successor_in(profile, partner, u).and_then(|w| partner[w]);
    }
    let mut state = vec![0u8; n];
    let mut out = Vec::new();
    for &start in profile.side_u() {
        if state[start] != 0 {
            continue;
        }
        let mut path = Vec::new();
        let mut cur = Some(start);
        while let Some(x) = cur {
            match state[x] {
                0 => {
                    state[x] = 1;
                    path.push(x);
                    cur = next[x];
                }
                1 => {
                    let at = path.iter().position(|&p| p == x).unwrap_or(0);
                    out.push(Rotation::new(path[at..].iter().map(|&u| (u, partner[u].unwrap_or(u))).collect()));
                    break;
                }
                _ => break,
            }
        }
        for p in path {
            state[p] = 2;
        }
    }
    out.sort();
    out
}

fn apply(partner: &mut [Option<Agent>], rot: &Rotation) {
    for i in 0..rot.len() {
        let (u, w) = (rot.e(i), rot.h(i + 1));
        partner[u] = Some(w);
        partner[w] = Some(u);
    }
}

/// Rotations reachable from the U-optimal matching, their precedence and their
/// weights against a reference matching.
#[derive(Debug, Clone)]
pub struct SmRotationDigraph {
    pub m0: Matching,
    rotations: Vec<Rotation>,
    pred: Vec<Bits>,
    weights: Vec<i64>,
    states: usize,
}

impl SmRotationDigraph {
    pub fn rotations(&self) -> &[Rotation] {
        &self.rotations
    }

    pub fn len(&self) -> usize {
        self.rotations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rotations.is_empty()
    }

    pub fn weight(&self, i: usize) -> i64 {
        self.weights[i]
    }

    pub fn weights(&self) -> &[i64] {
        &self.weights
    }

    pub fn precedes(&self, a: usize, b: usize) -> bool {
        self.pred[b].contains(a)
    }

    pub fn states_explored(&self) -> usize {
        self.states
    }

    /// Transitively reduced arcs.
    pub fn arcs(&self) -> Vec<(usize, usize)> {
        let mut arcs = Vec::new();
        for (b, pb) in self.pred.iter().enumerate() {
            for a in pb.iter() {
                if !pb.iter().any(|c| c != a && self.pred[c].contains(a)) {
                    arcs.push((a, b));
                }
            }
        }
        arcs.sort();
        arcs
    }

    pub fn is_closed(&self, c: &[usize]) -> bool {
        c.iter().all(|&p| self.pred[p].iter().all(|q| c.contains(&q)))
    }

    /// The stable matching obtained by eliminating a closed set from `m0`.
    pub fn matching_for(&self, n: usize, c: &[usize]) -> Matching {
        let mut order = c.to_vec();
        order.sort_by_key(|&p| (self.pred[p].count(), p));
        let mut partner = self.m0.partners(n);
        for p in order {
            apply(&mut partner, &self.rotations[p]);
        }
        Matching::from_partners(&partner)
    }
}

pub fn rotation_weight(rot: &Rotation, m1: &Matching) -> i64 {
    let gained = (0..rot.len()).filter(|&i| m1.contains(rot.e(i), rot.h(i + 1))).count();
    let lost = (0..rot.len()).filter(|&i| m1.contains(rot.e(i), rot.h(i))).count();
    gained as i64 - lost as i64
}

pub fn sm_rotation_digraph_with(
    profile: &PreferenceProfile,
    m1: &Matching,
    max_states: usize,
) -> Result<SmRotationDigraph, SmError> {
    let m0 = gale_shapley(profile, Side::U)?;
    let n = profile.len();
    let root = m0.partners(n);
    let mut index: HashMap<Rotation, usize> = HashMap::new();
    let mut found: Vec<Rotation> = Vec::new();
    let mut pred: Vec<Option<Bits>> = Vec::new();
    let mut seen: HashMap<Vec<Option<Agent>>, ()> = HashMap::new();
    let mut queue = VecDeque::new();
    seen.insert(root.clone(), ());
    queue.push_back((root, Bits::new()));
    while let Some((partner, done)) = queue.pop_front() {
        for rot in exposed(profile, &partner) {
            let id = *index.entry(rot.clone()).or_insert_with(|| {
                found.push(rot.clone());
                pred.push(None);
                found.len() - 1
            });
            match &mut pred[id] {
                Some(p) => p.intersect_with(&done),
                slot @ None => *slot = Some(done.clone()),
            }
            let mut child = partner.clone();
            apply(&mut child, &rot);
            if seen.contains_key(&child) {
                continue;
            }
            if seen.len() >= max_states {
                return Err(SmError::TooManyStates(max_states));
            }
            seen.insert(child.clone(), ());
            let mut d = done.clone();
            d.insert(id);
            queue.push_back((child, d));
        }
    }
    let mut order: Vec<usize> = (0..found.len()).collect();
    order.sort_by(|&a, &b| found[a].cmp(&found[b]));
    let mut new_id = vec![0; found.len()];
    for (new, &old) in order.iter().enumerate() {
        new_id[old] = new;
    }
    let rotations: Vec<Rotation> = order.iter().map(|&o| found[o].clone()).collect();
    let pred = order
        .iter()
        .map(|&o| pred[o].as_ref().map(|p| p.iter().map(|q| new_id[q]).collect()).unwrap_or_default())
        .collect();
    let weights = rotations.iter().map(|r| rotation_weight(r, m1)).collect();
    Ok(SmRotationDigraph { m0, rotations, pred, weights, states: seen.len() })
}

pub fn sm_rotation_digraph(profile: &PreferenceProfile, m1: &Matching) -> Result<SmRotationDigraph, SmError> {
    sm_rotation_digraph_with(profile, m1, 1_000_000)
}

struct FlowNet {
    cap: Vec<HashMap<usize, i64>>,
}

impl FlowNet {
    fn new(n: usize) -> Self {
        FlowNet { cap: vec![HashMap::new(); n] }
    }

    fn add(&mut self, a: usize, b: usize, c: i64) {
        *self.cap[a].entry(b).or_insert(0) += c;
        self.cap[b].entry(a).or_insert(0);
    }

    /// Edmonds-Karp; returns the flow value, leaving the residual network.
    fn max_flow(&mut self, s: usize, t: usize) -> i64 {
        let mut total = 0;
        loop {
            let mut prev = vec![usize::MAX; self.cap.len()];
            prev[s] = s;
            let mut q = VecDeque::from([s]);
            while let Some(x) = q.pop_front() {
                let mut nbrs: Vec<usize> = self.cap[x].iter().filter(|(_, &c)| c > 0).map(|(&y, _)| y).collect();
                nbrs.sort_unstable();
                for y in nbrs {
                    if prev[y] == usize::MAX {
                        prev[y] = x;
                        q.push_back(y);
                    }
                }
            }
            if prev[t] == usize::MAX {
                return total;
            }
            let mut push = i64::MAX;
            let mut y = t;
            while y != s {
                let x = prev[y];
                push = push.min(self.cap[x][&y]);
                y = x;
            }
            let mut y = t;
            while y != s {
                let x = prev[y];
                *self.cap[x].get_mut(&y).expect("arc") -= push;
                *self.cap[y].get_mut(&x).expect("reverse arc") += push;
                y = x;
            }
            total += push;
        }
    }

    fn reachable(&self, s: usize) -> Vec<bool> {
        let mut seen = vec![false; self.cap.len()];
        seen[s] = true;
        let mut stack = vec![s];
        while let Some(x) = stack.pop() {
            for (&y, &c) in &self.cap[x] {
                if c > 0 && !seen[y] {
                    seen[y] = true;
                    stack.push(y);
                }
            }
        }
        seen
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Closure {
    pub members: Vec<usize>,
    pub weight: i64,
    pub positive_total: i64,
    pub cut: i64,
}

/// Maximum-weight closed subset by a project-selection minimum cut.
pub fn max_weight_closed_subset(dg: &SmRotationDigraph) -> Closure {
    let r = dg.len();
    let (s, t) = (r, r + 1);
    let mut net = FlowNet::new(r + 2);
    let positive_total: i64 = dg.weights.iter().filter(|&&w| w > 0).sum();
    let inf = positive_total + 1;
    for (p, &w) in dg.weights.iter().enumerate() {
        if w > 0 {
            net.add(s, p, w);
        } else if w < 0 {
            net.add(p, t, -w);
        }
    }
    for (a, b) in dg.arcs() {
        // choosing b forces a
        net.add(b, a, inf);
    }
    let cut = net.max_flow(s, t);
    let side = net.reachable(s);
    let members: Vec<usize> = (0..r).filter(|&p| side[p]).collect();
    let weight = members.iter().map(|&p| dg.weights[p]).sum();
    Closure { members, weight, positive_total, cut }
}

#[derive(Debug, Clone)]
pub struct IsmOutcome {
    /// Stable matching of profile2 closest to matching1.
    pub best: Matching,
    pub distance: usize,
    pub m0_distance: usize,
    pub closure: Closure,
    pub digraph: SmRotationDigraph,
}

impl IsmOutcome {
    pub fn answer(&self, k: usize) -> Option<&Matching> {
        (self.distance <= k).then_some(&self.best)
    }
}

/// Closest stable matching of profile2 to matching1 via the rotation digraph.
pub fn solve_ism_noties(inst: &IncrementalInstance) -> Result<IsmOutcome, SmError> {
    check(&inst.profile1)?;
    let p2 = &inst.profile2;
    let dg = sm_rotation_digraph(p2, &inst.matching1)?;
    let closure = max_weight_closed_subset(&dg);
    let best = dg.matching_for(p2.len(), &closure.members);
    let distance = best.distance(&inst.matching1);
    let m0_distance = dg.m0.distance(&inst.matching1);
    debug_assert_eq!(distance as i64, m0_distance as i64 - 2 * closure.weight);
    Ok(IsmOutcome { best, distance, m0_distance, closure, digraph: dg })
}
