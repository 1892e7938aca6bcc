//! Exhaustive edit search for incremental instances with ties: delete `k1`
//! pairs of the old matching, add `k2` new pairs, test stability.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::model::{is_stable_partners, Agent, IncrementalInstance, Matching};

pub const DEFAULT_WORK_LIMIT: u64 = 100_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum XpError {
    #[error("work limit of {limit} stability checks exceeded")]
    WorkLimitExceeded { limit: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct EditBudget {
    pub k1: usize,
    pub k2: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct XpStats {
    pub checks: u64,
    /// Deletion subsets tried per budget.
    pub deletion_guesses: BTreeMap<EditBudget, u64>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct XpOutcome {
    pub matching: Option<Matching>,
    pub budget: Option<EditBudget>,
    pub stats: XpStats,
}

struct Search<'a> {
    inst: &'a IncrementalInstance,
    m1: Vec<(Agent, Agent)>,
    limit: u64,
    stats: XpStats,
}

impl Search<'_> {
    fn check(&mut self, partner: &[Option<Agent>]) -> Result<bool, XpError> {
        self.stats.checks += 1;
        if self.stats.checks > self.limit {
            return Err(XpError::WorkLimitExceeded { limit: self.limit });
        }
        Ok(is_stable_partners(&self.inst.profile2, partner))
    }

    /// Adds `left` more disjoint pairs from `cand[from..]`.
    fn add(
        &mut self,
        cand: &[(Agent, Agent)],
        from: usize,
        left: usize,
        partner: &mut Vec<Option<Agent>>,
    ) -> Result<bool, XpError> {
        if left == 0 {
            return self.check(partner);
        }
        for i in from..cand.len() {
            if cand.len() - i < left {
                break;
            }
            let (a, b) = cand[i];
            if partner[a].is_some() || partner[b].is_some() {
                continue;
            }
            partner[a] = Some(b);
            partner[b] = Some(a);
            if self.add(cand, i + 1, left - 1, partner)? {
                return Ok(true);
            }
            partner[a] = None;
            partner[b] = None;
        }
        Ok(false)
    }

    fn delete(
        &mut self,
        budget: EditBudget,
        from: usize,
        left: usize,
        deleted: &mut Vec<usize>,
    ) -> Result<Option<Vec<Option<Agent>>>, XpError> {
        if left == 0 {
            *self.stats.deletion_guesses.entry(budget).or_default() += 1;
            return self.complete(budget, deleted);
        }
        for i in from..self.m1.len() {
            if self.m1.len() - i < left {
                break;
            }
            deleted.push(i);
            if let Some(p) = self.delete(budget, i + 1, left - 1, deleted)? {
                return Ok(Some(p));
            }
            deleted.pop();
        }
        Ok(None)
    }

    fn complete(&mut self, budget: EditBudget, deleted: &[usize]) -> Result<Option<Vec<Option<Agent>>>, XpError> {
        let p2 = &self.inst.profile2;
        let mut partner = vec![None; p2.len()];
        for (i, &(a, b)) in self.m1.iter().enumerate() {
            if deleted.contains(&i) {
                continue;
            }
            if !p2.acceptable(a, b) {
                return Ok(None);
            }
            partner[a] = Some(b);
            partner[b] = Some(a);
        }
        let cand: Vec<(Agent, Agent)> = p2
            .acceptable_pairs()
            .into_iter()
            .filter(|&(a, b)| partner[a].is_none() && partner[b].is_none() && !self.inst.matching1.contains(a, b))
            .collect();
        if self.add(&cand, 0, budget.k2, &mut partner)? {
            return Ok(Some(partner));
        }
        Ok(None)
    }
}

/// A stable matching of profile2 at minimum distance from matching1 among
/// those within `k`, searching budgets by ascending `k1 + k2`.
pub fn solve_xp(inst: &IncrementalInstance, work_limit: u64) -> Result<XpOutcome, XpError> {
    let mut s = Search { inst, m1: inst.matching1.pairs().collect(), limit: work_limit, stats: XpStats::default() };
    for d in 0..=inst.k {
        for k1 in 0..=d.min(s.m1.len()) {
            let budget = EditBudget { k1, k2: d - k1 };
            if let Some(partner) = s.delete(budget, 0, k1, &mut Vec::new())? {
                return Ok(XpOutcome {
                    matching: Some(Matching::from_partners(&partner)),
                    budget: Some(budget),
                    stats: s.stats,
                });
            }
        }
    }
    Ok(XpOutcome { matching: None, budget: None, stats: s.stats })
}
