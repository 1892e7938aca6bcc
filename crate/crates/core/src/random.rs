//! Seeded random instances: acceptability edges with probability `edge_prob`,
//! uniformly random rankings, and adjacent ranks merged into ties with
//! probability `tie_prob` when ties are requested.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::model::{Agent, IncrementalInstance, Matching, PreferenceList, PreferenceProfile, ProfileKind};
use crate::oracle::{enumerate_stable_matchings, OracleConfig};
use crate::sr;

pub type InstanceRng = ChaCha8Rng;

pub fn rng(seed: u64) -> InstanceRng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RandomConfig {
    pub kind: ProfileKind,
    /// Roommates: total agents. Marriage: agents per side.
    pub agents: usize,
    pub edge_prob: f64,
    pub ties: bool,
    pub tie_prob: f64,
}

impl RandomConfig {
    pub fn roommates(agents: usize) -> Self {
        RandomConfig { kind: ProfileKind::Roommates, agents, edge_prob: 0.7, ties: false, tie_prob: 0.3 }
    }

    pub fn marriage(per_side: usize) -> Self {
        RandomConfig { kind: ProfileKind::Marriage, ..Self::roommates(per_side) }
    }

    pub fn with_ties(mut self, ties: bool) -> Self {
        self.ties = ties;
        self
    }

    fn total(&self) -> usize {
        match self.kind {
            ProfileKind::Roommates => self.agents,
            ProfileKind::Marriage => 2 * self.agents,
        }
    }
}

fn names(n: usize) -> Vec<String> {
    (1..=n).map(|i| i.to_string()).collect()
}

fn sides(cfg: &RandomConfig) -> Option<(Vec<Agent>, Vec<Agent>)> {
    match cfg.kind {
        ProfileKind::Roommates => None,
        ProfileKind::Marriage => Some(((0..cfg.agents).collect(), (cfg.agents..2 * cfg.agents).collect())),
    }
}

fn group(rng: &mut InstanceRng, order: &[Agent], cfg: &RandomConfig) -> PreferenceList {
    if !cfg.ties {
        return PreferenceList::strict(order.iter().copied());
    }
    let mut groups: Vec<Vec<Agent>> = Vec::new();
    for &a in order {
        match groups.last_mut() {
            Some(g) if rng.gen_bool(cfg.tie_prob) => g.push(a),
            _ => groups.push(vec![a]),
        }
    }
    PreferenceList::from_groups(groups)
}

fn acceptability(rng: &mut InstanceRng, cfg: &RandomConfig) -> Vec<Vec<Agent>> {
    let n = cfg.total();
    loop {
        let mut nbr = vec![Vec::new(); n];
        for a in 0..n {
            for b in a + 1..n {
                let allowed = match cfg.kind {
                    ProfileKind::Roommates => true,
                    ProfileKind::Marriage => (a < cfg.agents) != (b < cfg.agents),
                };
                if allowed && rng.gen_bool(cfg.edge_prob) {
                    nbr[a].push(b);
                    nbr[b].push(a);
                }
            }
        }
        if nbr.iter().all(|l| !l.is_empty()) {
            return nbr;
        }
    }
}

fn build(cfg: &RandomConfig, lists: Vec<PreferenceList>) -> PreferenceProfile {
    PreferenceProfile::new(cfg.kind, names(cfg.total()), sides(cfg), lists).expect("generated profile is valid")
}

pub fn random_profile(rng: &mut InstanceRng, cfg: &RandomConfig) -> PreferenceProfile {
    let mut lists = Vec::new();
    for mut l in acceptability(rng, cfg) {
        l.shuffle(rng);
        lists.push(group(rng, &l, cfg));
    }
    build(cfg, lists)
}

/// A second profile: either a fresh draw or a few adjacent swaps of `p1`.
pub fn perturbed_profile(rng: &mut InstanceRng, p1: &PreferenceProfile, cfg: &RandomConfig) -> PreferenceProfile {
    if rng.gen_bool(0.3) {
        return random_profile(rng, cfg);
    }
    let mut orders: Vec<Vec<Agent>> = p1.lists().iter().map(|l| l.agents().collect()).collect();
    let swaps = rng.gen_range(1..=cfg.total().max(1));
    for _ in 0..swaps {
        let a = rng.gen_range(0..orders.len());
        if orders[a].len() >= 2 {
            let i = rng.gen_range(0..orders[a].len() - 1);
            orders[a].swap(i, i + 1);
        }
    }
    let lists = orders.iter().map(|o| group(rng, o, cfg)).collect();
    build(cfg, lists)
}

/// Some stable matching of `p`, or `None`.
fn pick_stable(rng: &mut InstanceRng, p: &PreferenceProfile) -> Option<Matching> {
    if p.len() <= 12 {
        let all = enumerate_stable_matchings(p, OracleConfig::default()).ok()?;
        return all.choose(rng).cloned();
    }
    let broken: Vec<Vec<Agent>> = p.lists().iter().map(|l| l.agents().collect()).collect();
    sr::solve_lists(broken)
}

/// Random instance; redraws until profile1 has a stable matching.
pub fn random_instance(rng: &mut InstanceRng, cfg: &RandomConfig, k: usize) -> IncrementalInstance {
    loop {
        let p1 = random_profile(rng, cfg);
        let Some(m1) = pick_stable(rng, &p1) else { continue };
        let p2 = perturbed_profile(rng, &p1, cfg);
        return IncrementalInstance::new(p1, p2, m1, k).expect("generated instance is valid");
    }
}
