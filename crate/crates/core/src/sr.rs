//! Irving's algorithm for stable roommates without ties: Phase 1, rotations,
//! elimination, negation and the rotation poset.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt::{self, Write as _};

use thiserror::Error;

use crate::bitset::Bits;
use crate::model::{Agent, Matching, PreferenceProfile};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SrError {
    #[error("preference lists contain ties")]
    TiesPresent,
    #[error("rotation is not exposed in the table")]
    RotationNotExposed,
    #[error("a preference list became empty")]
    EmptyListFailure,
    #[error("no stable matching exists")]
    NoStableMatching,
    #[error("subset is not closed under precedence")]
    NotClosed,
    #[error("subset is not complete")]
    NotComplete,
    #[error("state exploration exceeded {0} tables")]
    TooManyStates(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TableOrigin {
    Phase1,
    Derived,
}

/// Truncated strict preference lists; symmetric at all times.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PreferenceTable {
    lists: Vec<Vec<Agent>>,
    origin: TableOrigin,
}

fn remove_from(list: &mut Vec<Agent>, a: Agent) -> Option<usize> {
    let pos = list.iter().position(|&x| x == a)?;
    list.remove(pos);
    Some(pos)
}

impl PreferenceTable {
    pub fn from_lists(lists: Vec<Vec<Agent>>) -> Self {
        PreferenceTable { lists, origin: TableOrigin::Derived }
    }

    pub fn origin(&self) -> TableOrigin {
        self.origin
    }

    pub fn len(&self) -> usize {
        self.lists.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lists.is_empty()
    }

    pub fn list(&self, a: Agent) -> &[Agent] {
        &self.lists[a]
    }

    pub fn lists(&self) -> &[Vec<Agent>] {
        &self.lists
    }

    pub fn first(&self, a: Agent) -> Option<Agent> {
        self.lists[a].first().copied()
    }

    pub fn second(&self, a: Agent) -> Option<Agent> {
        self.lists[a].get(1).copied()
    }

    pub fn last(&self, a: Agent) -> Option<Agent> {
        self.lists[a].last().copied()
    }

    pub fn contains(&self, a: Agent, b: Agent) -> bool {
        self.lists[a].contains(&b)
    }

    /// Every nonempty list has exactly one entry.
    pub fn is_matching(&self) -> bool {
        self.lists.iter().all(|l| l.len() <= 1)
    }

    pub fn all_empty(&self) -> bool {
        self.lists.iter().all(Vec::is_empty)
    }

    pub fn nonempty_agents(&self) -> BTreeSet<Agent> {
        (0..self.len()).filter(|&a| !self.lists[a].is_empty()).collect()
    }

    /// The matching read off an all-singleton table.
    pub fn to_matching(&self) -> Option<Matching> {
        if !self.is_matching() {
            return None;
        }
        let partner: Vec<Option<Agent>> = self.lists.iter().map(|l| l.first().copied()).collect();
        Some(Matching::from_partners(&partner))
    }

    /// Removes every entry after `keep` in `owner`'s list, symmetrically.
    /// Returns agents that lost their first entry.
    fn truncate_after(&mut self, owner: Agent, keep: Agent) -> Vec<Agent> {
        let Some(pos) = self.lists[owner].iter().position(|&x| x == keep) else {
            return Vec::new();
        };
        let removed = self.lists[owner].split_off(pos + 1);
        let mut lost_first = Vec::new();
        for z in removed {
            if remove_from(&mut self.lists[z], owner) == Some(0) {
                lost_first.push(z);
            }
        }
        lost_first
    }

    /// Text rows `name: list` for nonempty lists.
    pub fn render(&self, profile: &PreferenceProfile) -> String {
        let mut out = String::new();
        for (a, l) in self.lists.iter().enumerate() {
            let names: Vec<&str> = l.iter().map(|&b| profile.name(b)).collect();
            out.push_str(profile.name(a));
            out.push(':');
            for n in names {
                out.push(' ');
                out.push_str(n);
            }
            out.push('\n');
        }
        out
    }
}

/// Strict lists of a profile, or `TiesPresent`.
pub fn strict_lists(profile: &PreferenceProfile) -> Result<Vec<Vec<Agent>>, SrError> {
    profile.strict_orders().ok_or(SrError::TiesPresent)
}

/// Phase 1 on raw strict lists (must be mutually consistent).
pub fn phase1_lists(lists: Vec<Vec<Agent>>) -> PreferenceTable {
    let n = lists.len();
    let mut t = PreferenceTable { lists, origin: TableOrigin::Phase1 };
    let mut queue: VecDeque<Agent> = (0..n).collect();
    while let Some(x) = queue.pop_front() {
        let Some(y) = t.first(x) else { continue };
        // y holds x's proposal: drop everyone y likes less than x
        queue.extend(t.truncate_after(y, x));
    }
    t
}

pub fn phase1(profile: &PreferenceProfile) -> Result<PreferenceTable, SrError> {
    Ok(phase1_lists(strict_lists(profile)?))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Phase1Outcome {
    AllEmpty,
    UniqueMatching(Matching),
    /// Agents matched by every stable matching.
    Proceed(BTreeSet<Agent>),
}

pub fn classify_phase1(t: &PreferenceTable) -> Phase1Outcome {
    if t.all_empty() {
        Phase1Outcome::AllEmpty
    } else if let Some(m) = t.to_matching() {
        Phase1Outcome::UniqueMatching(m)
    } else {
        Phase1Outcome::Proceed(t.nonempty_agents())
    }
}

/// Cyclic sequence `((e_0,h_0),…,(e_{r-1},h_{r-1}))`, stored rotated so the
/// least pair leads.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Rotation {
    pairs: Vec<(Agent, Agent)>,
}

impl Rotation {
    pub fn new(mut pairs: Vec<(Agent, Agent)>) -> Self {
        if let Some(min) = (0..pairs.len()).min_by_key(|&i| pairs[i]) {
            pairs.rotate_left(min);
        }
        Rotation { pairs }
    }

    pub fn pairs(&self) -> &[(Agent, Agent)] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn e(&self, i: usize) -> Agent {
        self.pairs[i % self.pairs.len()].0
    }

    pub fn h(&self, i: usize) -> Agent {
        self.pairs[i % self.pairs.len()].1
    }

    /// `((h_0,e_{r-1}),(h_1,e_0),…)`.
    pub fn negation(&self) -> Rotation {
        let r = self.pairs.len();
        Rotation::new((0..r).map(|i| (self.h(i), self.e(i + r - 1))).collect())
    }

    pub fn display<'a>(&'a self, profile: &'a PreferenceProfile) -> RotationDisplay<'a> {
        RotationDisplay { rot: self, profile }
    }
}

pub struct RotationDisplay<'a> {
    rot: &'a Rotation,
    profile: &'a PreferenceProfile,
}

impl fmt::Display for RotationDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, &(e, h)) in self.rot.pairs.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "({},{})", self.profile.name(e), self.profile.name(h))?;
        }
        f.write_str(")")
    }
}

/// All rotations exposed in `t`, sorted.
pub fn exposed_rotations(t: &PreferenceTable) -> Vec<Rotation> {
    let n = t.len();
    let next = |e: Agent| -> Option<Agent> {
        if t.list(e).len() < 2 {
            return None;
        }
        t.second(e).and_then(|h| t.last(h))
    };
    // 0 unvisited, 1 on current path, 2 finished
    let mut state = vec![0u8; n];
    let mut out = Vec::new();
    for start in 0..n {
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
                    cur = next(x);
                }
                1 => {
                    let at = path.iter().position(|&p| p == x).unwrap_or(0);
                    let pairs = path[at..]
                        .iter()
                        .map(|&e| (e, t.first(e).unwrap_or(e)))
                        .collect();
                    out.push(Rotation::new(pairs));
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

pub fn is_exposed(t: &PreferenceTable, rot: &Rotation) -> bool {
    let r = rot.len();
    r >= 2 && (0..r).all(|i| t.first(rot.e(i)) == Some(rot.h(i)) && t.second(rot.e(i)) == Some(rot.h(i + 1)))
}

/// Eliminates an exposed rotation: every `h_{i+1}` drops the entries it ranks below `e_i`.
pub fn eliminate(t: &PreferenceTable, rot: &Rotation) -> Result<PreferenceTable, SrError> {
    if !is_exposed(t, rot) {
        return Err(SrError::RotationNotExposed);
    }
    let mut next = t.clone();
    next.origin = TableOrigin::Derived;
    let touched: Vec<Agent> = (0..rot.len()).map(|i| rot.h(i)).collect();
    let mut lost = Vec::new();
    for i in 0..rot.len() {
        let h = rot.h(i + 1);
        let before: Vec<Agent> = next.list(h).to_vec();
        next.truncate_after(h, rot.e(i));
        lost.extend(before.into_iter().filter(|z| !next.list(h).contains(z)));
    }
    if touched.iter().chain(&lost).any(|&a| next.list(a).is_empty()) {
        return Err(SrError::EmptyListFailure);
    }
    Ok(next)
}

/// Runs Phase 2 from `t`. The rotation exposed earliest is eliminated first,
/// ties broken by canonical order. Returns the final table and the rotations
/// eliminated in order.
pub fn phase2_greedy(t: PreferenceTable) -> Result<(PreferenceTable, Vec<Rotation>), SrError> {
    let mut t = t;
    let mut path = Vec::new();
    let mut stamp: HashMap<Rotation, usize> = HashMap::new();
    let mut clock = 0usize;
    while !t.is_matching() {
        let exposed = exposed_rotations(&t);
        for r in &exposed {
            stamp.entry(r.clone()).or_insert_with(|| {
                clock += 1;
                clock
            });
        }
        let rot = exposed
            .into_iter()
            .min_by_key(|r| stamp[r])
            .expect("a table with a list of length two exposes a rotation");
        t = eliminate(&t, &rot).map_err(|_| SrError::NoStableMatching)?;
        path.push(rot);
    }
    Ok((t, path))
}

/// Stable matching of raw strict lists, or `None`.
pub fn solve_lists(lists: Vec<Vec<Agent>>) -> Option<Matching> {
    if lists.iter().all(Vec::is_empty) {
        return Some(Matching::new());
    }
    let t = phase1_lists(lists);
    if t.all_empty() {
        return None;
    }
    phase2_greedy(t).ok().and_then(|(t, _)| t.to_matching())
}

pub fn find_stable_matching(profile: &PreferenceProfile) -> Result<Matching, SrError> {
    let t = phase1(profile)?;
    if t.all_empty() {
        return Err(SrError::NoStableMatching);
    }
    let (t, _) = phase2_greedy(t)?;
    t.to_matching().ok_or(SrError::NoStableMatching)
}

/// Whether some stable matching of `lists` pairs `x` with `y`.
///
/// Forces `{x,y}`: every `z` that `x` (resp. `y`) prefers to its partner must end
/// up with someone it prefers to `x` (resp. `y`), so those lists are cut just above
/// it. The pair is stable iff the reduced instance is solvable and all cut agents
/// are matched (the matched set of a solvable instance is fixed).
pub fn is_stable_pair(lists: &[Vec<Agent>], x: Agent, y: Agent) -> bool {
    let n = lists.len();
    if !lists[x].contains(&y) {
        return false;
    }
    let pos = |z: Agent, q: Agent| lists[z].iter().position(|&p| p == q).unwrap_or(usize::MAX);
    // index in z's list of the worst partner z may still get
    let mut limit = vec![usize::MAX; n];
    let mut cut = Vec::new();
    for (a, b) in [(x, y), (y, x)] {
        for &z in lists[a].iter().take_while(|&&z| z != b) {
            cut.push(z);
            limit[z] = limit[z].min(pos(z, a));
        }
    }
    let blocked = |z: Agent| z == x || z == y;
    let reduced: Vec<Vec<Agent>> = (0..n)
        .map(|z| {
            if blocked(z) {
                return Vec::new();
            }
            lists[z]
                .iter()
                .enumerate()
                .filter(|&(i, &q)| i < limit[z] && !blocked(q) && (limit[q] == usize::MAX || pos(q, z) < limit[q]))
                .map(|(_, &q)| q)
                .collect()
        })
        .collect();
    if cut.iter().any(|&z| reduced[z].is_empty()) {
        return false;
    }
    let Some(m) = solve_lists(reduced) else {
        return false;
    };
    let matched = m.matched_agents();
    cut.iter().all(|z| matched.contains(z))
}

/// Limits for state exploration.
#[derive(Debug, Clone, Copy)]
pub struct ExploreLimits {
    pub max_states: usize,
}

impl Default for ExploreLimits {
    fn default() -> Self {
        ExploreLimits { max_states: 200_000 }
    }
}

struct Explored {
    rotations: Vec<Rotation>,
    // strict predecessors, indexed like `rotations`
    pred: Vec<Bits>,
    states: usize,
}

/// Breadth-first exploration of all tables reachable from `root`. A rotation's
/// predecessors are the rotations eliminated in every state exposing it.
fn explore(root: PreferenceTable, limits: ExploreLimits) -> Result<Explored, SrError> {
    let mut index: HashMap<Rotation, usize> = HashMap::new();
    let mut found: Vec<Rotation> = Vec::new();
    let mut pred: Vec<Option<Bits>> = Vec::new();
    let mut seen: HashMap<Vec<Vec<Agent>>, ()> = HashMap::new();
    let mut queue: VecDeque<(PreferenceTable, Bits)> = VecDeque::new();
    seen.insert(root.lists.clone(), ());
    queue.push_back((root, Bits::new()));
    while let Some((t, done)) = queue.pop_front() {
        for rot in exposed_rotations(&t) {
            let id = *index.entry(rot.clone()).or_insert_with(|| {
                found.push(rot.clone());
                pred.push(None);
                found.len() - 1
            });
            match &mut pred[id] {
                Some(p) => p.intersect_with(&done),
                slot @ None => *slot = Some(done.clone()),
            }
            let child = eliminate(&t, &rot).map_err(|_| SrError::NoStableMatching)?;
            if seen.contains_key(&child.lists) {
                continue;
            }
            if seen.len() >= limits.max_states {
                return Err(SrError::TooManyStates(limits.max_states));
            }
            seen.insert(child.lists.clone(), ());
            let mut d = done.clone();
            d.insert(id);
            queue.push_back((child, d));
        }
    }
    // renumber in canonical order
    let mut order: Vec<usize> = (0..found.len()).collect();
    order.sort_by(|&a, &b| found[a].cmp(&found[b]));
    let mut new_id = vec![0; found.len()];
    for (new, &old) in order.iter().enumerate() {
        new_id[old] = new;
    }
    let rotations = order.iter().map(|&o| found[o].clone()).collect();
    let pred = order
        .iter()
        .map(|&o| pred[o].as_ref().map(|p| p.iter().map(|q| new_id[q]).collect()).unwrap_or_default())
        .collect();
    Ok(Explored { rotations, pred, states: seen.len() })
}

fn reduce_arcs(pred: &[Bits]) -> Vec<(usize, usize)> {
    let mut arcs = Vec::new();
    for (b, pb) in pred.iter().enumerate() {
        for a in pb.iter() {
            let implied = pb.iter().any(|c| c != a && pred[c].contains(a));
            if !implied {
                arcs.push((a, b));
            }
        }
    }
    arcs.sort();
    arcs
}

/// Rotation poset built from the Phase-1 table by full state exploration.
#[derive(Debug, Clone)]
pub struct RotationPoset {
    pub base_table: PreferenceTable,
    rotations: Vec<Rotation>,
    dual: Vec<Option<usize>>,
    pred: Vec<Bits>,
    states: usize,
}

impl RotationPoset {
    pub fn rotations(&self) -> &[Rotation] {
        &self.rotations
    }

    pub fn len(&self) -> usize {
        self.rotations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rotations.is_empty()
    }

    pub fn index_of(&self, rot: &Rotation) -> Option<usize> {
        self.rotations.binary_search(rot).ok()
    }

    pub fn dual(&self, i: usize) -> Option<usize> {
        self.dual[i]
    }

    pub fn is_singleton(&self, i: usize) -> bool {
        self.dual[i].is_none()
    }

    pub fn singletons(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.is_singleton(i)).collect()
    }

    /// Dual pairs `(a, b)` with `a < b`.
    pub fn dual_pairs(&self) -> Vec<(usize, usize)> {
        (0..self.len())
            .filter_map(|i| self.dual[i].filter(|&j| i < j).map(|j| (i, j)))
            .collect()
    }

    /// Does `a` precede `b` (strictly)?
    pub fn precedes(&self, a: usize, b: usize) -> bool {
        self.pred[b].contains(a)
    }

    pub fn predecessors(&self, b: usize) -> impl Iterator<Item = usize> + '_ {
        self.pred[b].iter()
    }

    /// Transitively reduced precedence arcs.
    pub fn reduced_arcs(&self) -> Vec<(usize, usize)> {
        reduce_arcs(&self.pred)
    }

    pub fn states_explored(&self) -> usize {
        self.states
    }

    pub fn is_closed(&self, c: &BTreeSet<usize>) -> bool {
        c.iter().all(|&p| self.pred[p].iter().all(|q| c.contains(&q)))
    }

    pub fn is_complete(&self, c: &BTreeSet<usize>) -> bool {
        (0..self.len()).all(|i| match self.dual[i] {
            None => c.contains(&i),
            Some(j) => c.contains(&i) != c.contains(&j),
        })
    }

    /// All complete closed subsets (exponential in the number of dual pairs).
    pub fn complete_closed_subsets(&self) -> Vec<BTreeSet<usize>> {
        let pairs = self.dual_pairs();
        let base: BTreeSet<usize> = self.singletons().into_iter().collect();
        let mut out = Vec::new();
        for mask in 0u64..(1u64 << pairs.len()) {
            let mut c = base.clone();
            for (i, &(a, b)) in pairs.iter().enumerate() {
                c.insert(if mask >> i & 1 == 1 { b } else { a });
            }
            if self.is_closed(&c) {
                out.push(c);
            }
        }
        out
    }

    pub fn matching_from_closed_subset(&self, c: &BTreeSet<usize>) -> Result<Matching, SrError> {
        if !self.is_complete(c) {
            return Err(SrError::NotComplete);
        }
        if !self.is_closed(c) {
            return Err(SrError::NotClosed);
        }
        let rots: Vec<&Rotation> = c.iter().map(|&i| &self.rotations[i]).collect();
        eliminate_set(&self.base_table, &rots)?
            .to_matching()
            .ok_or(SrError::NotComplete)
    }
}

/// Eliminates every rotation of `set`, each as soon as it is exposed.
pub fn eliminate_set(t: &PreferenceTable, set: &[&Rotation]) -> Result<PreferenceTable, SrError> {
    let mut t = t.clone();
    let mut left: Vec<&Rotation> = set.to_vec();
    while !left.is_empty() {
        let pos = left.iter().position(|r| is_exposed(&t, r)).ok_or(SrError::NotClosed)?;
        let r = left.remove(pos);
        t = eliminate(&t, r)?;
    }
    Ok(t)
}

fn duals_of(rotations: &[Rotation]) -> Vec<Option<usize>> {
    rotations
        .iter()
        .map(|r| rotations.binary_search(&r.negation()).ok())
        .collect()
}

pub fn build_rotation_poset_with(
    profile: &PreferenceProfile,
    limits: ExploreLimits,
) -> Result<RotationPoset, SrError> {
    let base = phase1(profile)?;
    if base.all_empty() {
        return Err(SrError::NoStableMatching);
    }
    let ex = explore(base.clone(), limits)?;
    let dual = duals_of(&ex.rotations);
    Ok(RotationPoset { base_table: base, rotations: ex.rotations, dual, pred: ex.pred, states: ex.states })
}

pub fn build_rotation_poset(profile: &PreferenceProfile) -> Result<RotationPoset, SrError> {
    build_rotation_poset_with(profile, ExploreLimits::default())
}

/// The dual rotations only, explored from the table where every singleton
/// rotation has been eliminated. Singletons are recognised without full
/// exploration: one greedy Phase-2 run yields all singletons plus one rotation
/// of each dual pair, and a rotation is dual iff its first pair is a stable pair.
#[derive(Debug, Clone)]
pub struct DualPoset {
    pub phase1_table: PreferenceTable,
    pub singletons: Vec<Rotation>,
    /// Table after all singleton eliminations.
    pub base_table: PreferenceTable,
    rotations: Vec<Rotation>,
    dual: Vec<usize>,
    pred: Vec<Bits>,
    states: usize,
}

impl DualPoset {
    pub fn rotations(&self) -> &[Rotation] {
        &self.rotations
    }

    pub fn len(&self) -> usize {
        self.rotations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rotations.is_empty()
    }

    pub fn dual(&self, i: usize) -> usize {
        self.dual[i]
    }

    pub fn index_of(&self, rot: &Rotation) -> Option<usize> {
        self.rotations.binary_search(rot).ok()
    }

    pub fn dual_pairs(&self) -> Vec<(usize, usize)> {
        (0..self.len()).filter(|&i| i < self.dual[i]).map(|i| (i, self.dual[i])).collect()
    }

    pub fn precedes(&self, a: usize, b: usize) -> bool {
        self.pred[b].contains(a)
    }

    pub fn predecessors(&self, b: usize) -> impl Iterator<Item = usize> + '_ {
        self.pred[b].iter()
    }

    pub fn reduced_arcs(&self) -> Vec<(usize, usize)> {
        reduce_arcs(&self.pred)
    }

    pub fn states_explored(&self) -> usize {
        self.states
    }

    /// Matching for a closed set of dual rotations holding one of each pair.
    pub fn matching_for(&self, c: &BTreeSet<usize>) -> Result<Matching, SrError> {
        let complete = (0..self.len()).all(|i| c.contains(&i) != c.contains(&self.dual[i]));
        if !complete {
            return Err(SrError::NotComplete);
        }
        if !c.iter().all(|&p| self.pred[p].iter().all(|q| c.contains(&q))) {
            return Err(SrError::NotClosed);
        }
        let rots: Vec<&Rotation> = c.iter().map(|&i| &self.rotations[i]).collect();
        eliminate_set(&self.base_table, &rots)?
            .to_matching()
            .ok_or(SrError::NotComplete)
    }
}

pub fn build_dual_poset_with(
    profile: &PreferenceProfile,
    limits: ExploreLimits,
) -> Result<DualPoset, SrError> {
    let lists = strict_lists(profile)?;
    let phase1_table = phase1_lists(lists.clone());
    if phase1_table.all_empty() {
        return Err(SrError::NoStableMatching);
    }
    let (_, path) = phase2_greedy(phase1_table.clone())?;
    // the Phase-1 table has the same stable matchings as the full lists
    let singletons: Vec<Rotation> = path
        .into_iter()
        .filter(|q| !is_stable_pair(phase1_table.lists(), q.e(0), q.h(0)))
        .collect();
    let refs: Vec<&Rotation> = singletons.iter().collect();
    let base_table = eliminate_set(&phase1_table, &refs)?;
    let ex = explore(base_table.clone(), limits)?;
    let dual: Vec<usize> = duals_of(&ex.rotations)
        .into_iter()
        .map(|d| d.expect("every rotation after the singletons has a dual"))
        .collect();
    Ok(DualPoset {
        phase1_table,
        singletons,
        base_table,
        rotations: ex.rotations,
        dual,
        pred: ex.pred,
        states: ex.states,
    })
}

pub fn build_dual_poset(profile: &PreferenceProfile) -> Result<DualPoset, SrError> {
    build_dual_poset_with(profile, ExploreLimits::default())
}

/// The rotation structure of `p` as text.
pub fn rotation_report(p: &PreferenceProfile) -> Result<String, SrError> {
    let mut s = String::new();
    let t = phase1(p)?;
    s.push_str("phase-1 table:\n");
    s.push_str(&t.render(p));
    let poset = match build_rotation_poset_with(p, ExploreLimits::default()) {
        Err(SrError::NoStableMatching) => {
            s.push_str("no stable matching\n");
            return Ok(s);
        }
        other => other?,
    };
    s.push_str("rotations:\n");
    for (i, r) in poset.rotations().iter().enumerate() {
        let kind = match poset.dual(i) {
            Some(j) => format!("dual r{}", j + 1),
            None => "singleton".to_string(),
        };
        let _ = writeln!(s, "  r{} {} {kind}", i + 1, r.display(p));
    }
    s.push_str("precedence:\n");
    for (a, b) in poset.reduced_arcs() {
        let _ = writeln!(s, "  r{} -> r{}", a + 1, b + 1);
    }
    Ok(s)
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::model::is_stable;

    pub(crate) fn example1() -> PreferenceProfile {
        let rows = [
            [7, 2, 6, 8, 5, 3, 4],
            [4, 6, 5, 3, 8, 1, 7],
            [5, 2, 1, 7, 4, 6, 8],
            [1, 7, 3, 6, 5, 8, 2],
            [7, 1, 8, 4, 6, 2, 3],
            [7, 3, 8, 4, 5, 1, 2],
            [2, 8, 4, 3, 5, 6, 1],
            [4, 2, 3, 5, 6, 7, 1],
        ];
        PreferenceProfile::roommates_strict(
            rows.iter().map(|r| r.iter().map(|&a| a - 1).collect()).collect(),
        )
        .unwrap()
    }

    fn rot(pairs: &[(usize, usize)]) -> Rotation {
        Rotation::new(pairs.iter().map(|&(e, h)| (e - 1, h - 1)).collect())
    }

    fn rows(t: &PreferenceTable) -> Vec<Vec<usize>> {
        t.lists().iter().map(|l| l.iter().map(|a| a + 1).collect()).collect()
    }

    #[test]
    fn example1_phase1_table() {
        let t = phase1(&example1()).unwrap();
        assert_eq!(t.origin(), TableOrigin::Phase1);
        assert_eq!(rows(&t)[0], vec![2, 6, 5, 3, 4]);
        assert_eq!(rows(&t)[6], vec![8, 4, 3, 5]);
        assert!(matches!(classify_phase1(&t), Phase1Outcome::Proceed(s) if s.len() == 8));
    }

    #[test]
    fn example1_exposed_and_eliminated() {
        let t = phase1(&example1()).unwrap();
        let r1 = rot(&[(1, 2), (2, 6), (3, 5)]);
        let r2 = rot(&[(4, 1), (5, 7)]);
        assert_eq!(exposed_rotations(&t), vec![r1.clone(), r2.clone()]);
        let t1 = eliminate(&t, &r1).unwrap();
        assert_eq!(rows(&t1)[1], vec![5, 3]);
        let r3 = rot(&[(2, 5), (6, 3), (7, 8), (8, 4)]);
        assert_eq!(exposed_rotations(&t1), vec![r3, r2]);
    }

    #[test]
    fn eliminating_a_hidden_rotation_fails() {
        let t = phase1(&example1()).unwrap();
        let r3 = rot(&[(2, 5), (6, 3), (7, 8), (8, 4)]);
        assert_eq!(eliminate(&t, &r3), Err(SrError::RotationNotExposed));
    }

    #[test]
    fn negation_is_an_involution() {
        let r4 = rot(&[(1, 6), (8, 5)]);
        let r5 = rot(&[(5, 1), (6, 8)]);
        assert_eq!(r4.negation(), r5);
        assert_eq!(r5.negation(), r4);
        let r2 = rot(&[(4, 1), (5, 7)]);
        assert_eq!(r2.negation(), rot(&[(1, 5), (7, 4)]));
    }

    #[test]
    fn greedy_phase2_matches_example() {
        let m = find_stable_matching(&example1()).unwrap();
        let want = Matching::from_pairs([(0, 4), (1, 2), (3, 6), (5, 7)]).unwrap();
        assert_eq!(m, want);
        assert!(is_stable(&example1(), &m));
    }

    #[test]
    fn example1_poset() {
        let p = build_rotation_poset(&example1()).unwrap();
        let names = [
            rot(&[(1, 2), (2, 6), (3, 5)]),
            rot(&[(4, 1), (5, 7)]),
            rot(&[(2, 5), (6, 3), (7, 8), (8, 4)]),
            rot(&[(1, 6), (8, 5)]),
            rot(&[(5, 1), (6, 8)]),
            rot(&[(1, 5), (7, 4)]),
        ];
        let idx: Vec<usize> = names.iter().map(|r| p.index_of(r).unwrap()).collect();
        assert_eq!(p.len(), 6);
        assert!(p.is_singleton(idx[0]) && p.is_singleton(idx[2]));
        assert_eq!(p.dual(idx[1]), Some(idx[5]));
        assert_eq!(p.dual(idx[3]), Some(idx[4]));
        let mut want: Vec<(usize, usize)> = [(0, 2), (2, 3), (3, 5), (2, 4), (1, 4)]
            .iter()
            .map(|&(a, b)| (idx[a], idx[b]))
            .collect();
        want.sort();
        assert_eq!(p.reduced_arcs(), want);
        assert_eq!(p.complete_closed_subsets().len(), 3);
    }

    #[test]
    fn dual_poset_agrees_with_full_poset_on_example1() {
        let full = build_rotation_poset(&example1()).unwrap();
        let d = build_dual_poset(&example1()).unwrap();
        assert_eq!(d.singletons.len(), 2);
        assert_eq!(d.len(), 4);
        for (a, ra) in d.rotations().iter().enumerate() {
            for (b, rb) in d.rotations().iter().enumerate() {
                let (fa, fb) = (full.index_of(ra).unwrap(), full.index_of(rb).unwrap());
                assert_eq!(d.precedes(a, b), full.precedes(fa, fb));
            }
        }
    }

    #[test]
    fn mutual_top_choices_give_unique_matching() {
        let p = PreferenceProfile::roommates_strict(vec![vec![1, 2, 3], vec![0, 3, 2], vec![3, 0, 1], vec![2, 1, 0]])
            .unwrap();
        let t = phase1(&p).unwrap();
        assert!(t.lists().iter().all(|l| l.len() == 1));
        assert!(matches!(classify_phase1(&t), Phase1Outcome::UniqueMatching(_)));
        assert!(exposed_rotations(&t).is_empty());
        assert!(build_rotation_poset(&p).unwrap().is_empty());
    }

    #[test]
    fn classic_instance_without_stable_matching() {
        // three agents cycle on their first choices, the fourth is last for all
        let p = PreferenceProfile::roommates_strict(vec![
            vec![1, 2, 3],
            vec![2, 0, 3],
            vec![0, 1, 3],
            vec![0, 1, 2],
        ])
        .unwrap();
        assert_eq!(find_stable_matching(&p), Err(SrError::NoStableMatching));
        assert!(build_rotation_poset(&p).is_err());
    }

    #[test]
    fn phase1_rejects_ties() {
        let inst = crate::format::parse_instance(
            "kind roommates\nk 0\n[profile1]\na: (b c)\nb: a c\nc: a b\n[profile2]\na: (b c)\nb: a c\nc: a b\n[matching1]\na b\n",
        )
        .unwrap();
        assert_eq!(phase1(&inst.profile1), Err(SrError::TiesPresent));
    }
}
