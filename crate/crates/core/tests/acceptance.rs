//! Acceptance suite. Runs every criterion, prints one line each, exits
//! nonzero if any failed.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use incstable::isr::{self, matching_proposals, Built, ProposalSet};
use incstable::model::{is_stable, profile_swap_distance, Matching, PreferenceProfile};
use incstable::oracle::{
    enumerate_stable_matchings, has_clique_with_pendant_edges, has_independent_set, independence_number,
    max_common_pairs, min_distance_stable, stable_within, OracleConfig, SimpleGraph,
};
use incstable::random::{random_instance, rng, RandomConfig};
use incstable::reductions::{
    gen_edcpe, gen_eiis, gen_ism_ties_oneswap, gen_ism_ties_twoswap, gen_isr_oneswap_complete, EdcpeInstance,
};
use incstable::sm::{self, SmRotationDigraph};
use incstable::sr::{self, DualPoset, ExploreLimits, PreferenceTable, Rotation};
use incstable::wcfcs::solve_wcfcs;
use incstable::xp::{solve_xp, DEFAULT_WORK_LIMIT};

type Outcome = Result<String, String>;

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn example1() -> PreferenceProfile {
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
    PreferenceProfile::roommates_strict(rows.iter().map(|r| r.iter().map(|&a| a - 1).collect()).collect()).unwrap()
}

fn rot(pairs: &[(usize, usize)]) -> Rotation {
    Rotation::new(pairs.iter().map(|&(e, h)| (e - 1, h - 1)).collect())
}

fn matching(pairs: &[(usize, usize)]) -> Matching {
    Matching::from_pairs(pairs.iter().map(|&(a, b)| (a - 1, b - 1))).unwrap()
}

fn rows(t: &PreferenceTable) -> Vec<Vec<usize>> {
    t.lists().iter().map(|l| l.iter().map(|a| a + 1).collect()).collect()
}

fn table(rows: &[&[usize]]) -> Vec<Vec<usize>> {
    rows.iter().map(|r| r.to_vec()).collect()
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let p = example1();
    let t0 = sr::phase1(&p).map_err(|e| e.to_string())?;
    let want0 = table(&[
        &[2, 6, 5, 3, 4],
        &[6, 5, 3, 8, 1],
        &[5, 2, 1, 7, 4, 6],
        &[1, 7, 3, 6, 5, 8],
        &[7, 1, 8, 4, 6, 2, 3],
        &[3, 8, 4, 5, 1, 2],
        &[8, 4, 3, 5],
        &[4, 2, 5, 6, 7],
    ]);
    check(rows(&t0) == want0, || format!("phase-1 table {:?}", rows(&t0)))?;
    let (r1, r2) = (rot(&[(1, 2), (2, 6), (3, 5)]), rot(&[(4, 1), (5, 7)]));
    let exposed: BTreeSet<Rotation> = sr::exposed_rotations(&t0).into_iter().collect();
    check(exposed == [r1.clone(), r2.clone()].into_iter().collect(), || format!("exposed {exposed:?}"))?;
    let steps: [(Rotation, Vec<Vec<usize>>); 4] = [
        (
            r1,
            table(&[
                &[6, 5, 3, 4],
                &[5, 3],
                &[2, 1, 7, 4, 6],
                &[1, 7, 3, 6, 5, 8],
                &[7, 1, 8, 4, 6, 2],
                &[3, 8, 4, 5, 1],
                &[8, 4, 3, 5],
                &[4, 5, 6, 7],
            ]),
        ),
        (
            r2,
            table(&[
                &[6, 5],
                &[5, 3],
                &[2, 4, 6],
                &[7, 3, 6, 5, 8],
                &[1, 8, 4, 6, 2],
                &[3, 8, 4, 5, 1],
                &[8, 4],
                &[4, 5, 6, 7],
            ]),
        ),
        (
            rot(&[(2, 5), (6, 3), (7, 8), (8, 4)]),
            table(&[&[6, 5], &[3], &[2], &[7], &[1, 8], &[8, 1], &[4], &[5, 6]]),
        ),
        (rot(&[(1, 6), (8, 5)]), table(&[&[5], &[3], &[2], &[7], &[1], &[8], &[4], &[6]])),
    ];
    let mut t = t0;
    for (i, (r, want)) in steps.iter().enumerate() {
        t = sr::eliminate(&t, r).map_err(|e| format!("step {}: {e}", i + 1))?;
        check(&rows(&t) == want, || format!("table after step {}: {:?}", i + 1, rows(&t)))?;
    }
    let m = t.to_matching().ok_or("final table is not a matching")?;
    check(m == matching(&[(1, 5), (2, 3), (4, 7), (6, 8)]), || format!("final matching {m:?}"))?;
    check(sr::find_stable_matching(&p) == Ok(m), || "greedy phase 2 disagrees".into())?;
    let el = start.elapsed();
    check(el < Duration::from_secs(1), || format!("took {el:?}"))?;
    Ok(format!("{el:.2?}"))
}

fn criterion_2() -> Outcome {
    let start = Instant::now();
    let p2 = example1();
    let m1 = matching(&[(1, 7), (2, 3), (4, 6), (5, 8)]);
    let c = match isr::build_construction(&p2, &m1, 4, ExploreLimits::default()).map_err(|e| e.to_string())? {
        Built::Ready(c) => c,
        other => return Err(format!("construction {other:?}")),
    };
    let s0: ProposalSet =
        [(1, 6), (2, 3), (3, 2), (4, 1), (5, 7), (6, 8), (7, 4), (8, 5)].iter().map(|&(a, b)| (a - 1, b - 1)).collect();
    check(c.s0 == s0, || format!("S_0 {:?}", c.s0))?;
    let s_m1: ProposalSet =
        [(1, 7), (7, 1), (2, 3), (3, 2), (4, 6), (6, 4), (5, 8), (8, 5)].iter().map(|&(a, b)| (a - 1, b - 1)).collect();
    check(matching_proposals(&c.m1) == s_m1, || "S_M1 differs".into())?;
    let want = [
        (rot(&[(4, 1), (5, 7)]), (0, 0)),
        (rot(&[(1, 6), (8, 5)]), (0, 1)),
        (rot(&[(5, 1), (6, 8)]), (1, 0)),
        (rot(&[(1, 5), (7, 4)]), (0, 0)),
    ];
    for (r, w) in &want {
        let i = c.poset.index_of(r).ok_or_else(|| format!("missing rotation {r:?}"))?;
        let got = (c.weights[i].w_plus, c.weights[i].w_minus);
        check(got == *w, || format!("weights of {} are {got:?}", r.display(&p2)))?;
    }
    check(c.ell() == 2 && c.budget == 0, || format!("ell {} b {}", c.ell(), c.budget))?;
    let out = solve_wcfcs(c.wcfcs.as_ref().ok_or("no WCFCS instance")?);
    let chosen = out.solution.ok_or("WCFCS found no solution")?;
    let want_set: BTreeSet<usize> = [&want[0].0, &want[2].0].iter().map(|r| c.poset.index_of(r).unwrap()).collect();
    check(chosen == want_set, || format!("WCFCS answer {chosen:?}"))?;
    let m2 = c.poset.matching_for(&chosen).map_err(|e| e.to_string())?;
    check(m2 == matching(&[(1, 6), (2, 3), (4, 7), (5, 8)]), || format!("M2 {m2:?}"))?;
    check(m2.distance(&m1) == 4, || format!("distance {}", m2.distance(&m1)))?;
    let el = start.elapsed();
    check(el < Duration::from_secs(1), || format!("took {el:?}"))?;
    Ok(format!("{el:.2?}"))
}

#[derive(Default)]
struct Invariants {
    checked: usize,
    subsets: usize,
    violations: Vec<String>,
}

impl Invariants {
    fn fail(&mut self, msg: String) {
        if self.violations.len() < 5 {
            self.violations.push(msg);
        } else {
            self.violations.push(String::new());
        }
    }
}

/// Complete closed subsets of the dual poset, by brute force over one choice per pair.
fn complete_closed(poset: &DualPoset) -> Vec<BTreeSet<usize>> {
    let pairs = poset.dual_pairs();
    let mut out = Vec::new();
    for mask in 0u64..1 << pairs.len() {
        let c: BTreeSet<usize> =
            pairs.iter().enumerate().map(|(i, &(a, b))| if mask >> i & 1 == 0 { a } else { b }).collect();
        if c.iter().all(|&b| poset.predecessors(b).all(|a| c.contains(&a))) {
            out.push(c);
        }
    }
    out
}

fn roommates_invariants(
    inv: &mut Invariants,
    tag: &str,
    inst: &incstable::IncrementalInstance,
    stable: &[Matching],
    out: &isr::IsrOutcome,
) {
    inv.checked += 1;
    let p2 = &inst.profile2;
    let n = p2.len();
    match sr::build_rotation_poset(p2) {
        Ok(full) => {
            let cs = full.complete_closed_subsets().len();
            if cs != stable.len() {
                inv.fail(format!("{tag}: {cs} complete closed subsets, {} stable matchings", stable.len()));
            }
        }
        Err(_) if stable.is_empty() => {}
        Err(e) => inv.fail(format!("{tag}: poset failed ({e}) with stable matchings present")),
    }
    let Some(c) = &out.construction else { return };
    if c.poset.len() > n * (n - 1) / 2 {
        inv.fail(format!("{tag}: |R2| = {}", c.poset.len()));
    }
    for (i, w) in c.weights.iter().enumerate() {
        if w.w_plus != c.weights[c.poset.dual(i)].w_minus {
            inv.fail(format!("{tag}: w+ of rotation {i} differs from w- of its dual"));
        }
    }
    if 2 * c.budget > inst.k as i64 {
        inv.fail(format!("{tag}: b = {} exceeds k/2 with k = {}", c.budget, inst.k));
    }
    if out.stats.max_budget_depth as i64 > c.budget.max(0) {
        inv.fail(format!("{tag}: depth {} exceeds b = {}", out.stats.max_budget_depth, c.budget));
    }
    let s_m1 = matching_proposals(&c.m1);
    let subsets = complete_closed(&c.poset);
    if subsets.len() != stable.len() {
        inv.fail(format!("{tag}: {} complete closed dual subsets, {} stable", subsets.len(), stable.len()));
    }
    for sub in subsets {
        inv.subsets += 1;
        let Ok(mc) = c.poset.matching_for(&sub) else {
            inv.fail(format!("{tag}: subset {sub:?} gave no matching"));
            continue;
        };
        let lhs = s_m1.intersection(&matching_proposals(&mc)).count() as i64;
        let lost: usize = sub.iter().map(|&i| c.weights[i].w_minus).sum();
        let rhs = c.s_m1_cap_s0 as i64 + c.sum_w_plus as i64 - 2 * lost as i64;
        if lhs != rhs {
            inv.fail(format!("{tag}: proposal identity {lhs} != {rhs} for {sub:?}"));
        }
    }
}

fn criterion_3(inv: &mut Invariants) -> Outcome {
    let mut r = rng(3001);
    let (mut mismatches, mut yes) = (Vec::new(), 0);
    let count = 1200;
    for i in 0..count {
        let n = 4 + i % 7;
        let k = (i / 7) % 9;
        let inst = random_instance(&mut r, &RandomConfig::roommates(n), k);
        let out = isr::solve_isr_noties(&inst).map_err(|e| format!("instance {i}: {e}"))?;
        let stable = enumerate_stable_matchings(&inst.profile2, OracleConfig::default()).map_err(|e| e.to_string())?;
        let best = stable.iter().map(|m| m.distance(&inst.matching1)).min();
        let expect = best.is_some_and(|d| d <= k);
        let ok = match &out.matching {
            Some(m) => expect && is_stable(&inst.profile2, m) && m.distance(&inst.matching1) <= k,
            None => !expect,
        };
        if !ok {
            mismatches.push(i);
        }
        yes += usize::from(expect);
        roommates_invariants(inv, &format!("isr#{i}"), &inst, &stable, &out);
    }
    check(mismatches.is_empty(), || format!("mismatches on {mismatches:?}"))?;
    Ok(format!("{count} instances, {yes} yes, 0 mismatches"))
}

fn closed_subset_count(dg: &SmRotationDigraph) -> Option<usize> {
    let r = dg.len();
    if r > 20 {
        return None;
    }
    let preds: Vec<u32> =
        (0..r).map(|b| (0..r).filter(|&a| a != b && dg.precedes(a, b)).fold(0, |m, a| m | 1 << a)).collect();
    Some((0u32..1 << r).filter(|&s| (0..r).all(|b| s >> b & 1 == 0 || preds[b] & !s == 0)).count())
}

fn criterion_4(inv: &mut Invariants) -> Outcome {
    let mut r = rng(4001);
    let mut mismatches = Vec::new();
    let count = 1200;
    for i in 0..count {
        let per_side = 2 + i % 5;
        let inst = random_instance(&mut r, &RandomConfig::marriage(per_side), i % 9);
        let out = sm::solve_ism_noties(&inst).map_err(|e| format!("instance {i}: {e}"))?;
        let stable = enumerate_stable_matchings(&inst.profile2, OracleConfig::default()).map_err(|e| e.to_string())?;
        let best = stable.iter().map(|m| m.distance(&inst.matching1)).min();
        let ok = best == Some(out.distance) && is_stable(&inst.profile2, &out.best)
            && out.best.distance(&inst.matching1) == out.distance;
        if !ok {
            mismatches.push(i);
        }
        inv.checked += 1;
        let tag = format!("ism#{i}");
        let positive: i64 = out.digraph.weights().iter().filter(|&&w| w > 0).sum();
        if positive > inst.matching1.len() as i64 {
            inv.fail(format!("{tag}: positive rotation weight {positive} exceeds |M1|"));
        }
        if let Some(c) = closed_subset_count(&out.digraph) {
            if c != stable.len() {
                inv.fail(format!("{tag}: {c} closed subsets, {} stable", stable.len()));
            }
        }
    }
    check(mismatches.is_empty(), || format!("mismatches on {mismatches:?}"))?;
    Ok(format!("{count} instances, 0 mismatches"))
}

fn criterion_5() -> Outcome {
    let mut r = rng(5001);
    let (mut mismatches, mut yes) = (Vec::new(), 0);
    let count = 600;
    for i in 0..count {
        let cfg = if i % 2 == 0 { RandomConfig::roommates(4 + i % 5) } else { RandomConfig::marriage(2 + i % 3) };
        let k = (i / 2) % 7;
        let inst = random_instance(&mut r, &cfg.with_ties(true), k);
        let out = solve_xp(&inst, DEFAULT_WORK_LIMIT).map_err(|e| format!("instance {i}: {e}"))?;
        let best = min_distance_stable(&inst.profile2, &inst.matching1, OracleConfig::default())
            .map_err(|e| e.to_string())?
            .map(|(d, _)| d);
        let ok = match (&out.matching, best) {
            (Some(m), Some(d)) => is_stable(&inst.profile2, m) && m.distance(&inst.matching1) == d && d <= k,
            (None, Some(d)) => d > k,
            (None, None) => true,
            (Some(_), None) => false,
        };
        if !ok {
            mismatches.push(i);
        }
        yes += usize::from(out.matching.is_some());
    }
    check(mismatches.is_empty(), || format!("mismatches on {mismatches:?}"))?;
    Ok(format!("{count} instances, {yes} yes, 0 mismatches"))
}

fn criterion_6(inv: &Invariants) -> Outcome {
    let shown: Vec<&String> = inv.violations.iter().filter(|v| !v.is_empty()).collect();
    check(inv.violations.is_empty(), || format!("{} violations, first: {shown:?}", inv.violations.len()))?;
    Ok(format!("{} instances, {} complete closed subsets, 0 violations", inv.checked, inv.subsets))
}

fn graph_from_mask(n: usize, mask: u32) -> SimpleGraph {
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).collect();
    let edges: Vec<(usize, usize)> =
        pairs.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &e)| e).collect();
    SimpleGraph::from_edges(n, &edges)
}

fn without_edge(g: &SimpleGraph, e: (usize, usize)) -> SimpleGraph {
    let mut g = g.clone();
    g.remove_edge(e.0, e.1);
    g
}

/// EDCPE instances with `e*` inside the clique and more than C(h,2)+h edges.
fn curated_edcpe(count: usize) -> Vec<EdcpeInstance> {
    let mut out = Vec::new();
    for h in 2..=3 {
        for extra in 0..=3 {
            for mask in 0u32..1 << (h + extra) {
                if out.len() >= count {
                    return out;
                }
                // clique 0..h, pendant i -> h+i, spare vertices after that
                let n = 2 * h + extra;
                let mut g = SimpleGraph::new(n);
                for a in 0..h {
                    g.add_edge(a, h + a);
                    for b in a + 1..h {
                        g.add_edge(a, b);
                    }
                }
                for i in 0..h + extra {
                    if mask >> i & 1 == 1 {
                        let a = h + i;
                        let b = if a + 1 < n { a + 1 } else { h };
                        if a != b {
                            g.add_edge(a, b);
                        }
                    }
                }
                if g.edges().len() <= h * (h - 1) / 2 + h {
                    continue;
                }
                out.push(EdcpeInstance { graph: g, e_star: (0, 1), h, s_star: (0..h).collect() });
            }
        }
    }
    out
}

fn criterion_7() -> Outcome {
    let start = Instant::now();
    let cfg = OracleConfig { max_agents: 200, max_vertices: 24 };
    let mut graphs = 0;
    let mut checks = 0usize;
    for n in 1..=5usize {
        for mask in 0u32..1 << (n * (n - 1) / 2) {
            let g = graph_from_mask(n, mask);
            graphs += 1;
            let tag = format!("graph n={n} mask={mask}");
            let alpha = independence_number(&g, cfg).map_err(|e| e.to_string())?;
            let tw = gen_ism_ties_twoswap(&g, 1).map_err(|e| format!("{tag}: {e}"))?;
            let best = max_common_pairs(&tw.instance.profile2, &tw.instance.matching1, cfg)
                .map_err(|e| e.to_string())?
                .map_or(0, |(c, _)| c);
            for h in 1..=3 {
                let tw_h = gen_ism_ties_twoswap(&g, h).map_err(|e| format!("{tag}: {e}"))?;
                check(tw_h.target_common == 2 * h, || format!("{tag}: twoswap target {}", tw_h.target_common))?;
                check((best >= 2 * h) == (alpha >= h), || format!("{tag}: twoswap h={h} best {best} alpha {alpha}"))?;
                checks += 1;
            }
            for h in 2..=3 {
                let yes = alpha >= h;
                let e = gen_eiis(&g, h).map_err(|e| format!("{tag}: {e}"))?;
                let eiis_yes = has_independent_set(&e.graph, h, cfg).map_err(|e| e.to_string())?;
                check(eiis_yes == yes, || format!("{tag}: eiis h={h}"))?;
                let inst = gen_isr_oneswap_complete(&e).map_err(|e| format!("{tag}: {e}"))?;
                check(is_stable(&inst.profile1, &inst.matching1), || format!("{tag}: M1 unstable for P1"))?;
                let swaps = profile_swap_distance(&inst.profile1, &inst.profile2).map_err(|e| e.to_string())?;
                check(swaps == Some(1), || format!("{tag}: swap distance {swaps:?}"))?;
                let got = stable_within(&inst.profile2, &inst.matching1, inst.k, cfg).map_err(|e| e.to_string())?;
                check(got.is_some() == yes, || format!("{tag}: isr oneswap h={h}"))?;
                checks += 2;
                if h >= 3 {
                    let d = gen_edcpe(&e).map_err(|e| format!("{tag}: {e}"))?;
                    let got = has_clique_with_pendant_edges(&without_edge(&d.graph, d.e_star), h, cfg)
                        .map_err(|e| e.to_string())?;
                    check(got == yes, || format!("{tag}: edcpe h={h}"))?;
                    checks += 1;
                }
            }
        }
    }
    let curated = curated_edcpe(60);
    check(curated.len() >= 50, || format!("only {} curated instances", curated.len()))?;
    let mut curated_yes = 0;
    for (i, d) in curated.iter().enumerate() {
        let inst = gen_ism_ties_oneswap(d).map_err(|e| format!("curated {i}: {e}"))?;
        let yes =
            has_clique_with_pendant_edges(&without_edge(&d.graph, d.e_star), d.h, cfg).map_err(|e| e.to_string())?;
        let got = stable_within(&inst.profile2, &inst.matching1, inst.k, cfg).map_err(|e| e.to_string())?;
        check(got.is_some() == yes, || format!("curated {i}: ism oneswap"))?;
        curated_yes += usize::from(yes);
    }
    let el = start.elapsed();
    check(el < Duration::from_secs(600), || format!("took {el:?}"))?;
    Ok(format!(
        "{graphs} graphs, {checks} round trips, {} curated ({curated_yes} yes), {el:.1?}",
        curated.len()
    ))
}

fn median_time(n: usize, k: usize, seeds: u64) -> Result<Duration, String> {
    let mut times = Vec::new();
    for seed in 0..seeds {
        let inst = random_instance(&mut rng(8000 + seed), &RandomConfig::roommates(n), k);
        let start = Instant::now();
        let out = isr::solve_isr_noties(&inst).map_err(|e| format!("n={n} seed {seed}: {e}"))?;
        times.push(start.elapsed());
        if let Some(m) = &out.matching {
            check(is_stable(&inst.profile2, m) && m.distance(&inst.matching1) <= k, || {
                format!("n={n} seed {seed}: bad witness")
            })?;
        }
    }
    times.sort();
    Ok(times[times.len() / 2])
}

fn criterion_8() -> Outcome {
    let big = median_time(100, 10, 20)?;
    let half = median_time(50, 10, 20)?;
    let ratio = big.as_secs_f64() / half.as_secs_f64().max(1e-9);
    check(big < Duration::from_secs(10), || format!("median at n=100 is {big:?}"))?;
    check(ratio <= 8.0, || format!("n=50 {half:?}, n=100 {big:?}, ratio {ratio:.1}"))?;
    Ok(format!("median n=50 {half:.2?}, n=100 {big:.2?}, ratio {ratio:.1}"))
}

fn main() {
    let mut inv = Invariants::default();
    let results: Vec<(&str, Outcome)> = vec![
        ("1 example-1 pipeline", criterion_1()),
        ("2 example-3 pipeline", criterion_2()),
        ("3 fpt vs oracle", criterion_3(&mut inv)),
        ("4 ism vs oracle", criterion_4(&mut inv)),
        ("5 xp vs oracle", criterion_5()),
        ("6 structural invariants", criterion_6(&inv)),
        ("7 reduction round trips", criterion_7()),
        ("8 performance smoke", criterion_8()),
    ];
    let mut failed = 0;
    for (name, res) in &results {
        match res {
            Ok(detail) => println!("PASS criterion {name}: {detail}"),
            Err(why) => {
                failed += 1;
                println!("FAIL criterion {name}: {why}");
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
