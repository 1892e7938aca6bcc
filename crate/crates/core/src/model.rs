//! Agents, preference profiles (ties and incomplete lists allowed), matchings,
//! the three distance measures and weak-stability checks.

use std::cmp::Ordering;
use std::collections::{BTreeSet, HashMap};
use std::fmt;

use thiserror::Error;

/// Dense agent index `0..n` into an instance's agent table.
pub type Agent = usize;

/// Rank value used for agents missing from a list.
pub const UNRANKED: u32 = u32::MAX;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("line {line}: {msg}")]
    MalformedSyntax { line: usize, msg: String },
    #[error("agent {agent} ranks itself")]
    SelfRanking { agent: String },
    #[error("{a} lists {b} but {b} does not list {a}")]
    NonMutualAcceptability { a: String, b: String },
    #[error("agent {agent} lists {entry} more than once")]
    DuplicateEntry { agent: String, entry: String },
    #[error("initial matching is not stable for profile1: {a} and {b} block it")]
    M1NotStable { a: String, b: String },
    #[error("agent {agent} has an empty preference list")]
    EmptyPreferenceList { agent: String },
    #[error("unknown agent {0}")]
    UnknownAgent(String),
    #[error("profiles are over different agent sets")]
    AgentSetMismatch,
    #[error("invalid matching: {0}")]
    InvalidMatching(String),
    #[error("marriage constraint violated: {0}")]
    NotMarriage(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ProfileKind {
    Roommates,
    Marriage,
}

impl fmt::Display for ProfileKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProfileKind::Roommates => f.write_str("roommates"),
            ProfileKind::Marriage => f.write_str("marriage"),
        }
    }
}

/// A weak order over acceptable partners, best tie-group first.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct PreferenceList {
    groups: Vec<Vec<Agent>>,
}

impl PreferenceList {
    /// Builds a list from tie-groups; empty groups are dropped, members sorted.
    pub fn from_groups(groups: Vec<Vec<Agent>>) -> Self {
        PreferenceList {
            groups: groups
                .into_iter()
                .filter(|g| !g.is_empty())
                .map(|mut g| {
                    g.sort_unstable();
                    g
                })
                .collect(),
        }
    }

    /// A list without ties.
    pub fn strict(order: impl IntoIterator<Item = Agent>) -> Self {
        PreferenceList {
            groups: order.into_iter().map(|a| vec![a]).collect(),
        }
    }

    pub fn groups(&self) -> &[Vec<Agent>] {
        &self.groups
    }

    pub fn len(&self) -> usize {
        self.groups.iter().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.groups.is_empty()
    }

    pub fn has_ties(&self) -> bool {
        self.groups.iter().any(|g| g.len() > 1)
    }

    /// All listed agents, best first (tie-groups in stored order).
    pub fn agents(&self) -> impl Iterator<Item = Agent> + '_ {
        self.groups.iter().flatten().copied()
    }

    pub fn contains(&self, a: Agent) -> bool {
        self.agents().any(|x| x == a)
    }

    /// Tie-group index of `a`, if listed.
    pub fn rank_of(&self, a: Agent) -> Option<usize> {
        self.groups.iter().position(|g| g.contains(&a))
    }

    fn rank_map(&self) -> HashMap<Agent, usize> {
        let mut m = HashMap::new();
        for (r, g) in self.groups.iter().enumerate() {
            for &a in g {
                m.insert(a, r);
            }
        }
        m
    }
}

/// Swap distance between two preference lists; `None` stands for infinity
/// (the lists cover different agent sets).
///
/// Counts ordered pairs `(x, y)` with `x` strictly above `y` in `l1` but not in
/// `l2`, plus unordered pairs tied in `l1` and untied in `l2`.
pub fn swap_distance(l1: &PreferenceList, l2: &PreferenceList) -> Option<u64> {
    let r1 = l1.rank_map();
    let r2 = l2.rank_map();
    if r1.len() != r2.len() || r1.keys().any(|a| !r2.contains_key(a)) {
        return None;
    }
    let agents: Vec<Agent> = l1.agents().collect();
    let mut d = 0u64;
    for (i, &x) in agents.iter().enumerate() {
        for &y in &agents[i + 1..] {
            let (a1, b1) = (r1[&x], r1[&y]);
            let (a2, b2) = (r2[&x], r2[&y]);
            match a1.cmp(&b1) {
                // x above y in l1; disagreement if y weakly above x in l2
                Ordering::Less => d += u64::from(b2 <= a2),
                Ordering::Greater => d += u64::from(a2 <= b2),
                Ordering::Equal => d += u64::from(a2 != b2),
            }
        }
    }
    Some(d)
}

/// A preference profile over a fixed agent table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PreferenceProfile {
    kind: ProfileKind,
    names: Vec<String>,
    side_u: Vec<Agent>,
    side_w: Vec<Agent>,
    lists: Vec<PreferenceList>,
    // rank[x][y]: tie-group index of y in x's list, UNRANKED if absent
    rank: Vec<Vec<u32>>,
}

fn valid_name(s: &str) -> bool {
    !s.is_empty() && !s.chars().any(char::is_whitespace) && !s.contains([':', '(', ')', '#'])
}

impl PreferenceProfile {
    /// Validates and builds a profile. `sides` must be given for marriage
    /// profiles and is ignored for roommates.
    pub fn new(
        kind: ProfileKind,
        names: Vec<String>,
        sides: Option<(Vec<Agent>, Vec<Agent>)>,
        lists: Vec<PreferenceList>,
    ) -> Result<Self, ModelError> {
        let n = names.len();
        if lists.len() != n {
            return Err(ModelError::MalformedSyntax {
                line: 0,
                msg: format!("{} agents but {} preference lists", n, lists.len()),
            });
        }
        let mut seen = HashMap::new();
        for (i, name) in names.iter().enumerate() {
            if !valid_name(name) {
                return Err(ModelError::MalformedSyntax {
                    line: 0,
                    msg: format!("invalid agent name {name:?}"),
                });
            }
            if seen.insert(name.as_str(), i).is_some() {
                return Err(ModelError::MalformedSyntax {
                    line: 0,
                    msg: format!("duplicate agent name {name}"),
                });
            }
        }
        let mut rank = vec![vec![UNRANKED; n]; n];
        for (x, list) in lists.iter().enumerate() {
            if list.is_empty() {
                return Err(ModelError::EmptyPreferenceList { agent: names[x].clone() });
            }
            for (r, g) in list.groups.iter().enumerate() {
                for &y in g {
                    if y >= n {
                        return Err(ModelError::UnknownAgent(format!("#{y}")));
                    }
                    if y == x {
                        return Err(ModelError::SelfRanking { agent: names[x].clone() });
                    }
                    if rank[x][y] != UNRANKED {
                        return Err(ModelError::DuplicateEntry {
                            agent: names[x].clone(),
                            entry: names[y].clone(),
                        });
                    }
                    rank[x][y] = r as u32;
                }
            }
        }
        for x in 0..n {
            for y in 0..n {
                if rank[x][y] != UNRANKED && rank[y][x] == UNRANKED {
                    return Err(ModelError::NonMutualAcceptability {
                        a: names[x].clone(),
                        b: names[y].clone(),
                    });
                }
            }
        }
        let (side_u, side_w) = match kind {
            ProfileKind::Roommates => (Vec::new(), Vec::new()),
            ProfileKind::Marriage => {
                let (u, w) = sides.ok_or_else(|| {
                    ModelError::NotMarriage("marriage profile without side sets".into())
                })?;
                let mut side = vec![0u8; n];
                for &a in &u {
                    side[a] |= 1;
                }
                for &a in &w {
                    side[a] |= 2;
                }
                if u.len() + w.len() != n || side.iter().any(|&s| s != 1 && s != 2) {
                    return Err(ModelError::NotMarriage(
                        "sides must partition the agent set".into(),
                    ));
                }
                for x in 0..n {
                    for y in lists[x].agents() {
                        if side[x] == side[y] {
                            return Err(ModelError::NotMarriage(format!(
                                "{} lists {} from the same side",
                                names[x], names[y]
                            )));
                        }
                    }
                }
                (u, w)
            }
        };
        Ok(PreferenceProfile { kind, names, side_u, side_w, lists, rank })
    }

    /// Roommates profile from strict lists, agents named `1..=n`.
    pub fn roommates_strict(lists: Vec<Vec<Agent>>) -> Result<Self, ModelError> {
        let n = lists.len();
        let names = (1..=n).map(|i| i.to_string()).collect();
        let lists = lists.into_iter().map(PreferenceList::strict).collect();
        Self::new(ProfileKind::Roommates, names, None, lists)
    }

    pub fn kind(&self) -> ProfileKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, a: Agent) -> &str {
        &self.names[a]
    }

    pub fn agent(&self, name: &str) -> Option<Agent> {
        self.names.iter().position(|n| n == name)
    }

    pub fn side_u(&self) -> &[Agent] {
        &self.side_u
    }

    pub fn side_w(&self) -> &[Agent] {
        &self.side_w
    }

    pub fn is_marriage(&self) -> bool {
        self.kind == ProfileKind::Marriage
    }

    pub fn list(&self, a: Agent) -> &PreferenceList {
        &self.lists[a]
    }

    pub fn lists(&self) -> &[PreferenceList] {
        &self.lists
    }

    /// Tie-group rank of `b` in `a`'s list, `UNRANKED` if unacceptable.
    #[inline]
    pub fn rank(&self, a: Agent, b: Agent) -> u32 {
        self.rank[a][b]
    }

    #[inline]
    pub fn acceptable(&self, a: Agent, b: Agent) -> bool {
        self.rank[a][b] != UNRANKED
    }

    /// `a` strictly prefers `b` over `c` (`None` = unmatched).
    #[inline]
    pub fn prefers(&self, a: Agent, b: Agent, c: Option<Agent>) -> bool {
        match c {
            None => self.acceptable(a, b),
            Some(c) => self.rank[a][b] < self.rank[a][c],
        }
    }

    pub fn has_ties(&self) -> bool {
        self.lists.iter().any(PreferenceList::has_ties)
    }

    pub fn is_complete(&self) -> bool {
        let n = self.len();
        match self.kind {
            ProfileKind::Roommates => self.lists.iter().all(|l| l.len() + 1 == n),
            ProfileKind::Marriage => (0..n).all(|a| {
                let other = if self.side_u.contains(&a) { &self.side_w } else { &self.side_u };
                self.lists[a].len() == other.len()
            }),
        }
    }

    /// Edges of the acceptability graph as `(a, b)` with `a < b`.
    pub fn acceptable_pairs(&self) -> Vec<(Agent, Agent)> {
        let n = self.len();
        let mut out = Vec::new();
        for a in 0..n {
            for b in a + 1..n {
                if self.acceptable(a, b) {
                    out.push((a, b));
                }
            }
        }
        out
    }

    /// Strict order per agent; `None` if any list has ties.
    pub fn strict_orders(&self) -> Option<Vec<Vec<Agent>>> {
        if self.has_ties() {
            return None;
        }
        Some(self.lists.iter().map(|l| l.agents().collect()).collect())
    }

    /// Same agents and sides, different lists; used to derive a second profile.
    pub fn with_lists(&self, lists: Vec<PreferenceList>) -> Result<Self, ModelError> {
        let sides = match self.kind {
            ProfileKind::Roommates => None,
            ProfileKind::Marriage => Some((self.side_u.clone(), self.side_w.clone())),
        };
        Self::new(self.kind, self.names.clone(), sides, lists)
    }

    /// The same lists read as a roommates instance.
    pub fn as_roommates(&self) -> Self {
        let mut p = self.clone();
        p.kind = ProfileKind::Roommates;
        p.side_u.clear();
        p.side_w.clear();
        p
    }

    pub fn same_agents(&self, other: &Self) -> bool {
        self.names == other.names && self.kind == other.kind && self.side_u == other.side_u
    }
}

/// Sum of list swap distances; `Ok(None)` stands for infinity.
pub fn profile_swap_distance(
    p1: &PreferenceProfile,
    p2: &PreferenceProfile,
) -> Result<Option<u64>, ModelError> {
    if p1.names != p2.names {
        return Err(ModelError::AgentSetMismatch);
    }
    let mut total = 0;
    for (l1, l2) in p1.lists.iter().zip(&p2.lists) {
        match swap_distance(l1, l2) {
            Some(d) => total += d,
            None => return Ok(None),
        }
    }
    Ok(Some(total))
}

/// A set of pairwise disjoint unordered agent pairs, stored as `(min, max)`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Matching {
    pairs: BTreeSet<(Agent, Agent)>,
}

fn norm(a: Agent, b: Agent) -> (Agent, Agent) {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

impl Matching {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds a matching, rejecting self-pairs and agents used twice.
    pub fn from_pairs(pairs: impl IntoIterator<Item = (Agent, Agent)>) -> Result<Self, ModelError> {
        let mut m = Matching::new();
        let mut used = BTreeSet::new();
        for (a, b) in pairs {
            if a == b {
                return Err(ModelError::InvalidMatching(format!("agent #{a} paired with itself")));
            }
            if !used.insert(a) || !used.insert(b) {
                return Err(ModelError::InvalidMatching(format!(
                    "agent matched twice in pair (#{a}, #{b})"
                )));
            }
            m.pairs.insert(norm(a, b));
        }
        Ok(m)
    }

    /// Reads a matching off a partner array (must be symmetric).
    pub fn from_partners(partner: &[Option<Agent>]) -> Self {
        let pairs = partner
            .iter()
            .enumerate()
            .filter_map(|(a, p)| p.filter(|&b| a < b).map(|b| (a, b)))
            .collect();
        Matching { pairs }
    }

    pub fn remove(&mut self, a: Agent, b: Agent) -> bool {
        self.pairs.remove(&norm(a, b))
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn contains(&self, a: Agent, b: Agent) -> bool {
        self.pairs.contains(&norm(a, b))
    }

    pub fn pairs(&self) -> impl Iterator<Item = (Agent, Agent)> + '_ {
        self.pairs.iter().copied()
    }

    pub fn partner(&self, a: Agent) -> Option<Agent> {
        self.pairs.iter().find_map(|&(x, y)| {
            if x == a {
                Some(y)
            } else if y == a {
                Some(x)
            } else {
                None
            }
        })
    }

    /// Partner array of length `n`.
    pub fn partners(&self, n: usize) -> Vec<Option<Agent>> {
        let mut p = vec![None; n];
        for &(a, b) in &self.pairs {
            p[a] = Some(b);
            p[b] = Some(a);
        }
        p
    }

    pub fn matched_agents(&self) -> BTreeSet<Agent> {
        self.pairs.iter().flat_map(|&(a, b)| [a, b]).collect()
    }

    pub fn common(&self, other: &Matching) -> usize {
        self.pairs.intersection(&other.pairs).count()
    }

    /// `|self Δ other|`.
    pub fn distance(&self, other: &Matching) -> usize {
        self.pairs.symmetric_difference(&other.pairs).count()
    }

    /// Checks every pair is an acceptable edge of `profile`.
    pub fn validate(&self, profile: &PreferenceProfile) -> Result<(), ModelError> {
        for &(a, b) in &self.pairs {
            if b >= profile.len() {
                return Err(ModelError::InvalidMatching(format!("unknown agent #{b}")));
            }
            if !profile.acceptable(a, b) {
                return Err(ModelError::InvalidMatching(format!(
                    "pair {} {} is not acceptable",
                    profile.name(a),
                    profile.name(b)
                )));
            }
        }
        Ok(())
    }

    /// Text form: one `a b` line per pair, ordered by display name.
    pub fn to_text(&self, profile: &PreferenceProfile) -> String {
        let mut lines: Vec<(&str, &str)> = self
            .pairs
            .iter()
            .map(|&(a, b)| {
                let (x, y) = (profile.name(a), profile.name(b));
                if name_order(x, y) == Ordering::Greater {
                    (y, x)
                } else {
                    (x, y)
                }
            })
            .collect();
        lines.sort_by(|p, q| name_order(p.0, q.0).then_with(|| name_order(p.1, q.1)));
        let mut out = String::new();
        for (x, y) in lines {
            out.push_str(x);
            out.push(' ');
            out.push_str(y);
            out.push('\n');
        }
        out
    }
}

/// Display-name order: numeric names by value, then everything else lexicographically.
pub fn name_order(a: &str, b: &str) -> Ordering {
    match (a.parse::<u64>(), b.parse::<u64>()) {
        (Ok(x), Ok(y)) => x.cmp(&y).then_with(|| a.cmp(b)),
        (Ok(_), Err(_)) => Ordering::Less,
        (Err(_), Ok(_)) => Ordering::Greater,
        _ => a.cmp(b),
    }
}

/// `|m1 Δ m2|`.
pub fn matching_distance(m1: &Matching, m2: &Matching) -> usize {
    m1.distance(m2)
}

/// Every acceptable unmatched pair blocking `m` under weak stability, as `(a, b)` with `a < b`.
pub fn blocking_pairs(
    profile: &PreferenceProfile,
    m: &Matching,
) -> Result<Vec<(Agent, Agent)>, ModelError> {
    m.validate(profile)?;
    let partner = m.partners(profile.len());
    let mut out = Vec::new();
    for (a, b) in profile.acceptable_pairs() {
        if partner[a] == Some(b) {
            continue;
        }
        if profile.prefers(a, b, partner[a]) && profile.prefers(b, a, partner[b]) {
            out.push((a, b));
        }
    }
    Ok(out)
}

/// Fast stability test on a partner array (no validation).
pub fn is_stable_partners(profile: &PreferenceProfile, partner: &[Option<Agent>]) -> bool {
    let n = profile.len();
    for a in 0..n {
        for b in profile.list(a).agents() {
            if a < b
                && partner[a] != Some(b)
                && profile.prefers(a, b, partner[a])
                && profile.prefers(b, a, partner[b])
            {
                return false;
            }
        }
    }
    true
}

pub fn is_stable(profile: &PreferenceProfile, m: &Matching) -> bool {
    m.validate(profile).is_ok() && is_stable_partners(profile, &m.partners(profile.len()))
}

/// An instance of the incremental problem.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IncrementalInstance {
    pub profile1: PreferenceProfile,
    pub profile2: PreferenceProfile,
    pub matching1: Matching,
    pub k: usize,
}

impl IncrementalInstance {
    /// Validates agent-set agreement, `matching1` against `profile1`, and its stability.
    pub fn new(
        profile1: PreferenceProfile,
        profile2: PreferenceProfile,
        matching1: Matching,
        k: usize,
    ) -> Result<Self, ModelError> {
        if !profile1.same_agents(&profile2) {
            return Err(ModelError::AgentSetMismatch);
        }
        if let Some(&(a, b)) = blocking_pairs(&profile1, &matching1)?.first() {
            return Err(ModelError::M1NotStable {
                a: profile1.name(a).to_string(),
                b: profile1.name(b).to_string(),
            });
        }
        Ok(IncrementalInstance { profile1, profile2, matching1, k })
    }

    pub fn agents(&self) -> usize {
        self.profile1.len()
    }

    pub fn has_ties(&self) -> bool {
        self.profile1.has_ties() || self.profile2.has_ties()
    }

    pub fn kind(&self) -> ProfileKind {
        self.profile1.kind()
    }

    pub fn with_k(mut self, k: usize) -> Self {
        self.k = k;
        self
    }
}
