//! Weighted conflict-free closed subset when the conflict graph is a disjoint
//! union of cliques: bounded search tree with reduction rules.

use std::collections::{BTreeSet, HashMap};

use thiserror::Error;

use crate::bitset::Bits;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WcfcsError {
    #[error("unknown element {0}")]
    UnknownElement(String),
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
}

/// Poset with clique conflicts, weights, target size and budget.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WcfcsInstance {
    names: Vec<String>,
    weights: Vec<u64>,
    // strict predecessors, transitively closed
    pred: Vec<Bits>,
    cliques: Vec<Vec<usize>>,
    clique_of: Vec<usize>,
    target: usize,
    budget: i64,
}

impl WcfcsInstance {
    /// `arcs` are `(a, b)` with `a` preceding `b`. Elements in no listed clique
    /// form cliques of their own.
    pub fn new(
        names: Vec<String>,
        weights: Vec<u64>,
        arcs: &[(usize, usize)],
        cliques: Vec<Vec<usize>>,
        target: usize,
        budget: i64,
    ) -> Result<Self, WcfcsError> {
        let n = names.len();
        if weights.len() != n {
            return Err(WcfcsError::PreconditionViolated("one weight per element".into()));
        }
        let mut direct = vec![Vec::new(); n];
        for &(a, b) in arcs {
            if a >= n || b >= n {
                return Err(WcfcsError::UnknownElement(format!("#{}", a.max(b))));
            }
            direct[b].push(a);
        }
        let mut pred = vec![Bits::new(); n];
        for (p, slot) in pred.iter_mut().enumerate() {
            let mut stack = direct[p].clone();
            while let Some(q) = stack.pop() {
                if !slot.contains(q) {
                    slot.insert(q);
                    stack.extend(&direct[q]);
                }
            }
            if slot.contains(p) {
                return Err(WcfcsError::PreconditionViolated(format!(
                    "order has a cycle through {}",
                    names[p]
                )));
            }
        }
        let mut clique_of = vec![usize::MAX; n];
        let mut all_cliques = Vec::new();
        for c in cliques {
            for &e in &c {
                if e >= n {
                    return Err(WcfcsError::UnknownElement(format!("#{e}")));
                }
                if clique_of[e] != usize::MAX {
                    return Err(WcfcsError::PreconditionViolated(format!(
                        "{} lies in two cliques",
                        names[e]
                    )));
                }
                clique_of[e] = all_cliques.len();
            }
            if !c.is_empty() {
                all_cliques.push(c);
            }
        }
        for (e, slot) in clique_of.iter_mut().enumerate() {
            if *slot == usize::MAX {
                *slot = all_cliques.len();
                all_cliques.push(vec![e]);
            }
        }
        for c in &mut all_cliques {
            c.sort_unstable();
        }
        if target != all_cliques.len() {
            return Err(WcfcsError::PreconditionViolated(format!(
                "target {} differs from the clique count {}",
                target,
                all_cliques.len()
            )));
        }
        Ok(WcfcsInstance { names, weights, pred, cliques: all_cliques, clique_of, target, budget })
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn name(&self, p: usize) -> &str {
        &self.names[p]
    }

    pub fn element(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn weight(&self, p: usize) -> u64 {
        self.weights[p]
    }

    pub fn target(&self) -> usize {
        self.target
    }

    pub fn budget(&self) -> i64 {
        self.budget
    }

    pub fn cliques(&self) -> &[Vec<usize>] {
        &self.cliques
    }

    pub fn clique_of(&self, p: usize) -> usize {
        self.clique_of[p]
    }

    pub fn precedes(&self, a: usize, b: usize) -> bool {
        self.pred[b].contains(a)
    }

    /// `p` and everything preceding it.
    pub fn up_set(&self, p: usize) -> BTreeSet<usize> {
        let mut s: BTreeSet<usize> = self.pred[p].iter().collect();
        s.insert(p);
        s
    }

    /// `p` and everything it precedes.
    pub fn down_set(&self, p: usize) -> BTreeSet<usize> {
        (0..self.len()).filter(|&q| q == p || self.pred[q].contains(p)).collect()
    }

    pub fn is_closed(&self, c: &BTreeSet<usize>) -> bool {
        c.iter().all(|&p| self.pred[p].iter().all(|q| c.contains(&q)))
    }

    /// Closed, one element per clique, weight within budget.
    pub fn is_feasible(&self, c: &BTreeSet<usize>) -> bool {
        let mut hit = vec![0usize; self.cliques.len()];
        for &p in c {
            hit[self.clique_of[p]] += 1;
        }
        let w: u64 = c.iter().map(|&p| self.weights[p]).sum();
        self.is_closed(c) && hit.iter().all(|&h| h == 1) && c.len() == self.target && (w as i128) <= self.budget as i128
    }

    /// Parses the `elem` / `order` / `clique` / `target` / `budget` format.
    pub fn parse(text: &str) -> Result<Self, WcfcsError> {
        let mut names = Vec::new();
        let mut weights = Vec::new();
        let mut index = HashMap::new();
        let mut arcs = Vec::new();
        let mut cliques = Vec::new();
        let mut target = None;
        let mut budget = None;
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let toks: Vec<&str> = content.split_whitespace().collect();
            let err = |msg: &str| WcfcsError::Syntax { line, msg: msg.to_string() };
            let lookup = |name: &str, index: &HashMap<String, usize>| {
                index.get(name).copied().ok_or_else(|| WcfcsError::UnknownElement(name.to_string()))
            };
            match toks.as_slice() {
                ["elem", name, w] => {
                    let w: u64 = w.parse().map_err(|_| err("weight must be a nonnegative integer"))?;
                    if index.insert(name.to_string(), names.len()).is_some() {
                        return Err(err("duplicate element"));
                    }
                    names.push(name.to_string());
                    weights.push(w);
                }
                ["order", a, b] => arcs.push((lookup(a, &index)?, lookup(b, &index)?)),
                ["clique", rest @ ..] if !rest.is_empty() => {
                    let c = rest.iter().map(|n| lookup(n, &index)).collect::<Result<Vec<_>, _>>()?;
                    cliques.push(c);
                }
                ["target", l] => target = Some(l.parse().map_err(|_| err("bad target"))?),
                ["budget", b] => budget = Some(b.parse().map_err(|_| err("bad budget"))?),
                _ => return Err(err("unrecognised line")),
            }
        }
        let target = target.ok_or(WcfcsError::Syntax { line: 0, msg: "missing target".into() })?;
        let budget = budget.ok_or(WcfcsError::Syntax { line: 0, msg: "missing budget".into() })?;
        WcfcsInstance::new(names, weights, &arcs, cliques, target, budget)
    }
}

/// Counters from one solver run.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SearchStats {
    pub nodes: u64,
    pub rr2: u64,
    pub rr3: u64,
    pub rr4: u64,
    /// Deepest chain of branches that each spent positive weight.
    pub max_budget_depth: u32,
    /// Failed alternatives while completing with zero-weight choices.
    pub completion_backtracks: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WcfcsOutcome {
    pub solution: Option<BTreeSet<usize>>,
    pub stats: SearchStats,
}

#[derive(Clone)]
struct State {
    alive: Bits,
    taken: Bits,
    satisfied: Vec<bool>,
    budget: i64,
}

struct Solver<'a> {
    inst: &'a WcfcsInstance,
    stats: SearchStats,
}

impl Solver<'_> {
    fn up_alive(&self, st: &State, p: usize) -> Vec<usize> {
        let mut v: Vec<usize> = self.inst.pred[p].iter().filter(|&q| st.alive.contains(q)).collect();
        v.push(p);
        v
    }

    fn up_weight(&self, st: &State, p: usize) -> u64 {
        self.up_alive(st, p).iter().map(|&q| self.inst.weights[q]).sum()
    }

    fn delete_down(&self, st: &mut State, p: usize) {
        for q in 0..self.inst.len() {
            if st.alive.contains(q) && (q == p || self.inst.pred[q].contains(p)) {
                st.alive.remove(q);
            }
        }
    }

    /// Takes `p` with its alive up-set; the rest of each hit clique is removed
    /// together with everything below it.
    fn take(&self, st: &mut State, p: usize) {
        let up = self.up_alive(st, p);
        for &q in &up {
            st.alive.remove(q);
            st.taken.insert(q);
            st.budget -= self.inst.weights[q] as i64;
            st.satisfied[self.inst.clique_of[q]] = true;
        }
        for &q in &up {
            for &r in &self.inst.cliques[self.inst.clique_of[q]] {
                if r != q && st.alive.contains(r) {
                    self.delete_down(st, r);
                }
            }
        }
    }

    /// Applies the reduction rules to a fixpoint; `false` means no solution here.
    fn reduce(&mut self, st: &mut State) -> bool {
        loop {
            if st.budget < 0 {
                return false;
            }
            let mut changed = false;
            for p in 0..self.inst.len() {
                if !st.alive.contains(p) {
                    continue;
                }
                let up = self.up_alive(st, p);
                let mut seen = BTreeSet::new();
                let conflict = up.iter().any(|&q| {
                    let c = self.inst.clique_of[q];
                    st.satisfied[c] || !seen.insert(c)
                });
                if conflict {
                    self.delete_down(st, p);
                    changed = true;
                } else if up.iter().map(|&q| self.inst.weights[q]).sum::<u64>() as i128 > st.budget as i128 {
                    self.stats.rr2 += 1;
                    self.delete_down(st, p);
                    changed = true;
                }
            }
            for c in 0..self.inst.cliques.len() {
                if st.satisfied[c] {
                    continue;
                }
                let members: Vec<usize> =
                    self.inst.cliques[c].iter().copied().filter(|&q| st.alive.contains(q)).collect();
                match members.as_slice() {
                    [] => return false,
                    [only] => {
                        self.stats.rr3 += 1;
                        self.take(st, *only);
                        changed = true;
                        break;
                    }
                    _ => {
                        let mut common: Bits = self.up_alive(st, members[0]).into_iter().collect();
                        for &m in &members[1..] {
                            common.intersect_with(&self.up_alive(st, m).into_iter().collect());
                        }
                        let first = common.iter().next();
                        if let Some(p) = first {
                            self.stats.rr4 += 1;
                            self.take(st, p);
                            changed = true;
                            break;
                        }
                    }
                }
            }
            if !changed {
                return true;
            }
        }
    }

    fn search(&mut self, mut st: State, depth: u32) -> Option<Bits> {
        self.stats.nodes += 1;
        if !self.reduce(&mut st) {
            return None;
        }
        self.stats.max_budget_depth = self.stats.max_budget_depth.max(depth);
        let open: Vec<usize> = (0..self.inst.cliques.len()).filter(|&c| !st.satisfied[c]).collect();
        if open.is_empty() {
            return Some(st.taken);
        }
        let weigh = |s: &Self, c: usize| -> Vec<(u64, usize)> {
            let mut v: Vec<(u64, usize)> = s.inst.cliques[c]
                .iter()
                .copied()
                .filter(|&q| st.alive.contains(q))
                .map(|q| (s.up_weight(&st, q), q))
                .collect();
            v.sort_unstable();
            v
        };
        let positive = open
            .iter()
            .map(|&c| (c, weigh(self, c)))
            .filter(|(_, v)| v[0].0 > 0)
            .min_by_key(|(_, v)| (v[0].0, v[0].1));
        if let Some((_, members)) = positive {
            for (_, p) in members {
                let mut child = st.clone();
                self.take(&mut child, p);
                if let Some(sol) = self.search(child, depth + 1) {
                    return Some(sol);
                }
            }
            return None;
        }
        // every open clique has a free member: complete, backtracking if needed
        let members = weigh(self, open[0]);
        let last = members.len() - 1;
        for (i, (w, p)) in members.into_iter().enumerate() {
            let mut child = st.clone();
            self.take(&mut child, p);
            if let Some(sol) = self.search(child, depth + u32::from(w > 0)) {
                return Some(sol);
            }
            if i < last {
                self.stats.completion_backtracks += 1;
            }
        }
        None
    }
}

pub fn solve_wcfcs(inst: &WcfcsInstance) -> WcfcsOutcome {
    let mut solver = Solver { inst, stats: SearchStats::default() };
    if inst.budget < 0 {
        return WcfcsOutcome { solution: None, stats: solver.stats };
    }
    let st = State {
        alive: (0..inst.len()).collect(),
        taken: Bits::new(),
        satisfied: vec![false; inst.cliques.len()],
        budget: inst.budget,
    };
    let solution = solver.search(st, 0).map(|b| b.iter().collect::<BTreeSet<usize>>());
    if let Some(s) = &solution {
        debug_assert!(inst.is_feasible(s));
    }
    WcfcsOutcome { solution, stats: solver.stats }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Dual rotations of the worked example: r2, r4, r5, r6.
    fn example3() -> WcfcsInstance {
        let names = ["r2", "r4", "r5", "r6"].iter().map(|s| s.to_string()).collect();
        WcfcsInstance::new(names, vec![0, 1, 0, 0], &[(1, 3), (0, 2)], vec![vec![0, 3], vec![1, 2]], 2, 0)
            .unwrap()
    }

    #[test]
    fn example3_has_unique_answer() {
        let inst = example3();
        let out = solve_wcfcs(&inst);
        assert_eq!(out.solution, Some([0, 2].into_iter().collect()));
        assert!(out.stats.max_budget_depth as i64 <= inst.budget());
    }

    #[test]
    fn up_and_down_sets() {
        let inst = example3();
        assert_eq!(inst.up_set(2), [0, 2].into_iter().collect());
        assert_eq!(inst.up_set(0), [0].into_iter().collect());
        assert_eq!(inst.down_set(1), [1, 3].into_iter().collect());
    }

    #[test]
    fn zero_weight_completion() {
        let names = (0..6).map(|i| format!("p{i}")).collect();
        let inst =
            WcfcsInstance::new(names, vec![0, 3, 0, 3, 0, 3], &[], vec![vec![0, 1], vec![2, 3], vec![4, 5]], 3, 0)
                .unwrap();
        assert_eq!(solve_wcfcs(&inst).solution, Some([0, 2, 4].into_iter().collect()));
    }

    #[test]
    fn greedy_trap_needs_backtracking() {
        // a1, a2 | b1, b2 | d1, d2 with a2 before b2 and d2; picking a1 forces b1 and d1
        let names = ["a1", "a2", "b1", "b2", "d1", "d2"].iter().map(|s| s.to_string()).collect();
        let inst = WcfcsInstance::new(
            names,
            vec![0, 0, 1, 0, 1, 0],
            &[(1, 3), (1, 5)],
            vec![vec![0, 1], vec![2, 3], vec![4, 5]],
            3,
            1,
        )
        .unwrap();
        let out = solve_wcfcs(&inst);
        assert_eq!(out.solution, Some([1, 3, 5].into_iter().collect()));
        assert!(out.stats.completion_backtracks >= 1);
    }

    #[test]
    fn negative_budget_is_no() {
        let names = vec!["a".to_string()];
        let inst = WcfcsInstance::new(names, vec![0], &[], vec![], 1, -1).unwrap();
        assert_eq!(solve_wcfcs(&inst).solution, None);
    }

    #[test]
    fn cycles_and_bad_targets_are_rejected() {
        let names: Vec<String> = vec!["a".into(), "b".into()];
        assert!(WcfcsInstance::new(names.clone(), vec![0, 0], &[(0, 1), (1, 0)], vec![], 2, 0).is_err());
        assert!(WcfcsInstance::new(names, vec![0, 0], &[], vec![vec![0, 1]], 2, 0).is_err());
    }

    #[test]
    fn text_format() {
        let text = "elem r2 0\nelem r4 1\nelem r5 0\nelem r6 0\norder r4 r6\norder r2 r5\nclique r2 r6\nclique r4 r5\ntarget 2\nbudget 0\n";
        assert_eq!(WcfcsInstance::parse(text).unwrap(), example3());
        assert!(WcfcsInstance::parse("elem a x\n").is_err());
    }
}
