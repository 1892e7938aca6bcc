//! Incremental stable roommates without ties, parameterized by `k`: proposal
//! sets, rotation weights, reduction to a weighted conflict-free closed subset
//! instance, and reconstruction of the matching.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use thiserror::Error;

use crate::model::{Agent, IncrementalInstance, Matching, PreferenceProfile};
use crate::sr::{self, DualPoset, ExploreLimits, PreferenceTable, Rotation, SrError};
use crate::wcfcs::{solve_wcfcs, SearchStats, WcfcsInstance};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IsrError {
    #[error("preference lists contain ties")]
    TiesPresent,
    #[error("budget exhausted")]
    BudgetExhausted,
    #[error(transparent)]
    Sr(SrError),
}

/// Ordered pairs `(i, j)`: `i` proposes to `j`.
pub type ProposalSet = BTreeSet<(Agent, Agent)>;

/// `(i, first(i))` for every nonempty list.
pub fn proposal_set(t: &PreferenceTable) -> ProposalSet {
    (0..t.len()).filter_map(|a| t.first(a).map(|b| (a, b))).collect()
}

/// Both orientations of every pair.
pub fn matching_proposals(m: &Matching) -> ProposalSet {
    m.pairs().flat_map(|(a, b)| [(a, b), (b, a)]).collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightedRotation {
    pub rotation: Rotation,
    pub gain: ProposalSet,
    pub loss: ProposalSet,
    pub w_plus: usize,
    pub w_minus: usize,
}

pub fn rotation_weights(rot: &Rotation, m1: &Matching) -> WeightedRotation {
    let r = rot.len();
    let gain: ProposalSet = (0..r).map(|i| (rot.e(i), rot.h(i + 1))).collect();
    let loss: ProposalSet = (0..r).map(|i| (rot.e(i), rot.h(i))).collect();
    let s = matching_proposals(m1);
    let w_plus = gain.intersection(&s).count();
    let w_minus = loss.intersection(&s).count();
    WeightedRotation { rotation: rot.clone(), gain, loss, w_plus, w_minus }
}

/// Drops every pair of `m1` with an endpoint that proposes nowhere in `s0`
/// (so is unmatched in every stable matching), one unit of `k` per pair.
pub fn apply_unmatched_rule(m1: &Matching, s0: &ProposalSet, k: i64) -> Result<(Matching, i64), IsrError> {
    let proposers: BTreeSet<Agent> = s0.iter().map(|&(a, _)| a).collect();
    let mut m = m1.clone();
    let mut k = k;
    for (a, b) in m1.pairs() {
        if !proposers.contains(&a) || !proposers.contains(&b) {
            m.remove(a, b);
            k -= 1;
        }
    }
    if k < 0 {
        return Err(IsrError::BudgetExhausted);
    }
    Ok((m, k))
}

/// Quantities of the construction, kept for explanation and invariant checks.
#[derive(Debug, Clone)]
pub struct Construction {
    pub poset: DualPoset,
    pub s0: ProposalSet,
    pub m1: Matching,
    pub k: i64,
    pub removed: usize,
    pub weights: Vec<WeightedRotation>,
    pub s_m1_cap_s0: usize,
    pub sum_w_plus: usize,
    /// Budget before flooring is `numerator / 2`.
    pub numerator: i64,
    pub budget: i64,
    pub wcfcs: Option<WcfcsInstance>,
}

impl Construction {
    pub fn ell(&self) -> usize {
        self.poset.len() / 2
    }
}

#[derive(Debug, Clone)]
pub enum Built {
    NoStableMatching,
    /// The unmatched rule alone exceeds the budget.
    BudgetExhausted,
    Ready(Box<Construction>),
}

pub fn build_construction(
    p2: &PreferenceProfile,
    m1: &Matching,
    k: usize,
    limits: ExploreLimits,
) -> Result<Built, IsrError> {
    let poset = match sr::build_dual_poset_with(p2, limits) {
        Ok(p) => p,
        Err(SrError::NoStableMatching) => return Ok(Built::NoStableMatching),
        Err(SrError::TiesPresent) => return Err(IsrError::TiesPresent),
        Err(e) => return Err(IsrError::Sr(e)),
    };
    let s0 = proposal_set(&poset.base_table);
    let (m1r, kr) = match apply_unmatched_rule(m1, &s0, k as i64) {
        Ok(x) => x,
        Err(_) => return Ok(Built::BudgetExhausted),
    };
    let removed = m1.len() - m1r.len();
    let weights: Vec<WeightedRotation> = poset.rotations().iter().map(|r| rotation_weights(r, &m1r)).collect();
    let s_m1 = matching_proposals(&m1r);
    let s_m1_cap_s0 = s_m1.intersection(&s0).count();
    let sum_w_plus: usize = weights.iter().map(|w| w.w_plus).sum();
    let numerator = s_m1_cap_s0 as i64 + sum_w_plus as i64 - m1r.len() as i64 - (s0.len() / 2) as i64 + kr;
    let budget = numerator.div_euclid(2);
    let wcfcs = if poset.is_empty() {
        None
    } else {
        let names = poset.rotations().iter().map(|r| format!("{}", r.display(p2))).collect();
        let w = weights.iter().map(|w| w.w_minus as u64).collect();
        let cliques = poset.dual_pairs().into_iter().map(|(a, b)| vec![a, b]).collect();
        Some(
            WcfcsInstance::new(names, w, &poset.reduced_arcs(), cliques, poset.len() / 2, budget)
                .expect("dual pairs form a valid conflict graph"),
        )
    };
    Ok(Built::Ready(Box::new(Construction {
        poset,
        s0,
        m1: m1r,
        k: kr,
        removed,
        weights,
        s_m1_cap_s0,
        sum_w_plus,
        numerator,
        budget,
        wcfcs,
    })))
}

#[derive(Debug, Clone)]
pub struct IsrOutcome {
    pub matching: Option<Matching>,
    pub construction: Option<Box<Construction>>,
    pub chosen: Option<BTreeSet<usize>>,
    pub stats: SearchStats,
}

pub fn solve_isr_noties_with(inst: &IncrementalInstance, limits: ExploreLimits) -> Result<IsrOutcome, IsrError> {
    if inst.profile1.has_ties() {
        return Err(IsrError::TiesPresent);
    }
    let no = |construction| IsrOutcome { matching: None, construction, chosen: None, stats: SearchStats::default() };
    let c = match build_construction(&inst.profile2, &inst.matching1, inst.k, limits)? {
        Built::NoStableMatching | Built::BudgetExhausted => return Ok(no(None)),
        Built::Ready(c) => c,
    };
    let Some(w) = &c.wcfcs else {
        let m = c.poset.base_table.to_matching().expect("no dual rotations leaves a matching");
        let fits = m.distance(&inst.matching1) <= inst.k;
        return Ok(IsrOutcome { matching: fits.then_some(m), construction: Some(c), chosen: None, stats: SearchStats::default() });
    };
    let out = solve_wcfcs(w);
    let matching = match &out.solution {
        Some(chosen) => Some(c.poset.matching_for(chosen).map_err(IsrError::Sr)?),
        None => None,
    };
    if let Some(m) = &matching {
        debug_assert!(m.distance(&inst.matching1) <= inst.k);
    }
    Ok(IsrOutcome { matching, chosen: out.solution, stats: out.stats, construction: Some(c) })
}

/// A stable matching of profile2 within distance `k` of matching1, if any.
pub fn solve_isr_noties(inst: &IncrementalInstance) -> Result<IsrOutcome, IsrError> {
    solve_isr_noties_with(inst, ExploreLimits::default())
}

fn fmt_set(p: &PreferenceProfile, s: &ProposalSet) -> String {
    let parts: Vec<String> = s.iter().map(|&(a, b)| format!("({},{})", p.name(a), p.name(b))).collect();
    format!("{{{}}}", parts.join(","))
}

/// Human-readable dump of the construction and the chosen subset.
pub fn explain(p2: &PreferenceProfile, out: &IsrOutcome) -> String {
    let mut s = String::new();
    let Some(c) = &out.construction else {
        s.push_str("no stable matching within budget before construction\n");
        return s;
    };
    let _ = writeln!(s, "singletons eliminated: {}", c.poset.singletons.len());
    s.push_str("table after singletons:\n");
    s.push_str(&c.poset.base_table.render(p2));
    let _ = writeln!(s, "S_0 = {}", fmt_set(p2, &c.s0));
    let _ = writeln!(s, "S_M1 = {}", fmt_set(p2, &matching_proposals(&c.m1)));
    let _ = writeln!(s, "pairs removed by the unmatched rule: {} (k now {})", c.removed, c.k);
    s.push_str("dual rotations (w+, w-):\n");
    for w in &c.weights {
        let _ = writeln!(s, "  {} ({}, {})", w.rotation.display(p2), w.w_plus, w.w_minus);
    }
    for (a, b) in c.poset.reduced_arcs() {
        let _ = writeln!(s, "  order {} -> {}", c.poset.rotations()[a].display(p2), c.poset.rotations()[b].display(p2));
    }
    let _ = writeln!(s, "|S_M1 ∩ S_0| = {}, sum w+ = {}", c.s_m1_cap_s0, c.sum_w_plus);
    let _ = writeln!(s, "l = {}", c.ell());
    let _ = writeln!(s, "b = {}/2 -> {}", c.numerator, c.budget);
    match &out.chosen {
        Some(ch) => {
            let names: Vec<String> = ch.iter().map(|&i| format!("{}", c.poset.rotations()[i].display(p2))).collect();
            let _ = writeln!(s, "chosen: {{{}}}", names.join(", "));
        }
        None if c.wcfcs.is_some() => s.push_str("chosen: none\n"),
        None => s.push_str("chosen: no dual rotations\n"),
    }
    let st = &out.stats;
    let _ = writeln!(
        s,
        "search: nodes {} depth {} rr2 {} rr3 {} rr4 {} completion backtracks {}",
        st.nodes, st.max_budget_depth, st.rr2, st.rr3, st.rr4, st.completion_backtracks
    );
    s
}
