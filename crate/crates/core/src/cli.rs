//! Command-line front end. Exit codes: 0 yes, 1 no, 2 input error, 3 mismatch.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use rand::Rng;

use crate::format::{parse_instance, parse_matching, serialize_instance};
use crate::model::{blocking_pairs, profile_swap_distance, IncrementalInstance, ProfileKind};
use crate::oracle::{enumerate_stable_matchings, min_distance_stable, OracleConfig, SimpleGraph};
use crate::random::{random_instance, rng, RandomConfig};
use crate::reductions::{self, EdcpeInstance, EiisInstance};
use crate::solve::{solve, Algo};
use crate::sr;
use crate::wcfcs::{solve_wcfcs, WcfcsInstance};
use crate::xp::DEFAULT_WORK_LIMIT;

pub const EXIT_YES: i32 = 0;
pub const EXIT_NO: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_MISMATCH: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "incstable", version, about = "Incremental stable marriage and roommates")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Find a stable matching of profile2 within distance k of matching1.
    Solve {
        instance: PathBuf,
        #[arg(long, default_value = "auto")]
        algo: Algo,
        /// Dump the FPT construction.
        #[arg(long)]
        explain: bool,
        /// Maximum stability checks for the xp solver.
        #[arg(long, default_value_t = DEFAULT_WORK_LIMIT)]
        work_limit: u64,
    },
    /// Check a matching file against profile2 and the budget k.
    Verify { instance: PathBuf, matching: PathBuf },
    /// Swap distance between the profiles, and matching distance to matching1.
    Distance {
        instance: PathBuf,
        #[arg(long)]
        matching: Option<PathBuf>,
    },
    /// Phase-1 table, rotations, dual pairs and precedence of a profile.
    Rotations {
        instance: PathBuf,
        #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u8).range(1..=2))]
        profile: u8,
    },
    /// Solve a weighted conflict-free closed subset file.
    Wcfcs { file: PathBuf },
    /// Write a generated instance.
    Generate {
        #[arg(long)]
        construction: Construction,
        #[arg(long)]
        graph: Option<PathBuf>,
        #[arg(long)]
        h: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Random instances: agents (per side for marriage).
        #[arg(long, default_value_t = 8)]
        agents: usize,
        #[arg(long, default_value_t = 2)]
        k: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        ties: bool,
        #[arg(long)]
        marriage: bool,
    },
    /// Brute-force ground truth.
    Oracle {
        #[command(subcommand)]
        cmd: OracleCmd,
    },
    /// Compare the solvers against the oracle on random instances.
    Crossvalidate {
        #[arg(long)]
        count: usize,
        #[arg(long)]
        agents: usize,
        /// Largest k; each instance draws k uniformly up to this.
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        ties: bool,
        #[arg(long)]
        marriage: bool,
    },
}

#[derive(Subcommand, Debug)]
enum OracleCmd {
    /// Every weakly stable matching of profile2.
    Enumerate { instance: PathBuf },
    /// Minimum distance from matching1 over stable matchings of profile2.
    Mindist { instance: PathBuf },
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Construction {
    Eiis,
    Edcpe,
    IsmOneswap,
    IsmTwoswap,
    IsrOneswap,
    Feder,
    Random,
}

struct Failure(i32, String);

fn input(msg: impl ToString) -> Failure {
    Failure(EXIT_INPUT, msg.to_string())
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| input(format!("{}: {e}", path.display())))
}

fn load(path: &Path) -> Result<IncrementalInstance, Failure> {
    parse_instance(&read(path)?).map_err(|e| input(format!("{}: {e}", path.display())))
}

/// Runs the command line and returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            if e.use_stderr() {
                let _ = write!(err, "{e}");
                return EXIT_INPUT;
            }
            let _ = write!(out, "{e}");
            return EXIT_YES;
        }
    };
    let mut text = String::new();
    let code = match dispatch(cli.cmd, &mut text, err) {
        Ok(code) => code,
        Err(Failure(code, msg)) => {
            let _ = writeln!(err, "error: {msg}");
            code
        }
    };
    let _ = out.write_all(text.as_bytes());
    code
}

fn dispatch(cmd: Cmd, out: &mut String, err: &mut dyn Write) -> Result<i32, Failure> {
    match cmd {
        Cmd::Solve { instance, algo, explain, work_limit } => {
            let inst = load(&instance)?;
            let rep = solve(&inst, algo, work_limit, explain).map_err(input)?;
            let p = &inst.profile2;
            match &rep.matching {
                Some(m) => out.push_str(&m.to_text(p)),
                None => out.push_str("NO\n"),
            }
            if let Some(x) = &rep.explain {
                out.push('\n');
                out.push_str(x);
            }
            let _ = writeln!(err, "algorithm: {}", rep.algorithm);
            let _ = writeln!(err, "answer: {}", if rep.is_yes() { "yes" } else { "no" });
            if let (Some(d), Some(c)) = (rep.distance, rep.common) {
                let _ = writeln!(err, "distance: {d}\ncommon: {c}");
            }
            if let Some(d) = rep.depth {
                let _ = writeln!(err, "depth: {d}");
            }
            let _ = writeln!(err, "time_ms: {:.3}", rep.elapsed.as_secs_f64() * 1e3);
            Ok(if rep.is_yes() { EXIT_YES } else { EXIT_NO })
        }
        Cmd::Verify { instance, matching } => {
            let inst = load(&instance)?;
            let p = &inst.profile2;
            let m = parse_matching(p, &read(&matching)?).map_err(input)?;
            let Some(m) = m else {
                out.push_str("NO\n");
                return Ok(EXIT_NO);
            };
            let blocking = blocking_pairs(p, &m).map_err(input)?;
            let d = m.distance(&inst.matching1);
            for (a, b) in &blocking {
                let _ = writeln!(out, "blocking {} {}", p.name(*a), p.name(*b));
            }
            let _ = writeln!(out, "stable: {}", if blocking.is_empty() { "yes" } else { "no" });
            let _ = writeln!(out, "distance: {d} (k = {})", inst.k);
            Ok(if blocking.is_empty() && d <= inst.k { EXIT_YES } else { EXIT_NO })
        }
        Cmd::Distance { instance, matching } => {
            let inst = load(&instance)?;
            let swaps = profile_swap_distance(&inst.profile1, &inst.profile2).map_err(input)?;
            match swaps {
                Some(s) => writeln!(out, "profiles: {s}"),
                None => writeln!(out, "profiles: inf"),
            }
            .expect("string write");
            if let Some(path) = matching {
                match parse_matching(&inst.profile2, &read(&path)?).map_err(input)? {
                    Some(m) => writeln!(out, "matching: {}", m.distance(&inst.matching1)),
                    None => writeln!(out, "matching: none"),
                }
                .expect("string write");
            }
            Ok(EXIT_YES)
        }
        Cmd::Rotations { instance, profile } => {
            let inst = load(&instance)?;
            let p = if profile == 1 { &inst.profile1 } else { &inst.profile2 };
            out.push_str(&sr::rotation_report(p).map_err(input)?);
            Ok(EXIT_YES)
        }
        Cmd::Wcfcs { file } => {
            let w = WcfcsInstance::parse(&read(&file)?).map_err(input)?;
            let res = solve_wcfcs(&w);
            let st = &res.stats;
            match &res.solution {
                Some(c) => {
                    let names: Vec<&str> = c.iter().map(|&i| w.name(i)).collect();
                    let weight: u64 = c.iter().map(|&i| w.weight(i)).sum();
                    let _ = writeln!(out, "{}\nweight {weight}", names.join(" "));
                }
                None => out.push_str("NO\n"),
            }
            let _ = writeln!(
                err,
                "nodes {} depth {} rr2 {} rr3 {} rr4 {} completion_backtracks {}",
                st.nodes, st.max_budget_depth, st.rr2, st.rr3, st.rr4, st.completion_backtracks
            );
            Ok(if res.solution.is_some() { EXIT_YES } else { EXIT_NO })
        }
        Cmd::Generate { construction, graph, h, out: path, agents, k, seed, ties, marriage } => {
            let text = generate(construction, graph.as_deref(), h, agents, k, seed, ties, marriage)?;
            match path {
                Some(p) => std::fs::write(&p, text).map_err(|e| input(format!("{}: {e}", p.display())))?,
                None => out.push_str(&text),
            }
            Ok(EXIT_YES)
        }
        Cmd::Oracle { cmd } => {
            let cfg = OracleConfig::with_agents(usize::MAX);
            match cmd {
                OracleCmd::Enumerate { instance } => {
                    let inst = load(&instance)?;
                    let all = enumerate_stable_matchings(&inst.profile2, cfg).map_err(input)?;
                    for m in &all {
                        let _ = writeln!(out, "{}", m.to_text(&inst.profile2));
                    }
                    let _ = writeln!(out, "count {}", all.len());
                    Ok(if all.is_empty() { EXIT_NO } else { EXIT_YES })
                }
                OracleCmd::Mindist { instance } => {
                    let inst = load(&instance)?;
                    match min_distance_stable(&inst.profile2, &inst.matching1, cfg).map_err(input)? {
                        Some((d, m)) => {
                            let _ = writeln!(out, "distance {d}\n{}", m.to_text(&inst.profile2));
                            Ok(if d <= inst.k { EXIT_YES } else { EXIT_NO })
                        }
                        None => {
                            out.push_str("distance inf\n");
                            Ok(EXIT_NO)
                        }
                    }
                }
            }
        }
        Cmd::Crossvalidate { count, agents, k, seed, ties, marriage } => {
            crossvalidate(out, count, agents, k, seed, ties, marriage)
        }
    }
}

fn graph_text(g: &SimpleGraph, e_star: (usize, usize), h: usize, s_star: &[usize]) -> String {
    let mut s = g.to_text();
    let names: Vec<&str> = s_star.iter().map(|&v| g.name(v)).collect();
    let _ = writeln!(s, "# e* {} {}\n# h {h}\n# S* {}", g.name(e_star.0), g.name(e_star.1), names.join(" "));
    s
}

#[allow(clippy::too_many_arguments)]
fn generate(
    c: Construction,
    graph: Option<&Path>,
    h: Option<usize>,
    agents: usize,
    k: usize,
    seed: u64,
    ties: bool,
    marriage: bool,
) -> Result<String, Failure> {
    if c == Construction::Random {
        let cfg = if marriage { RandomConfig::marriage(agents) } else { RandomConfig::roommates(agents) };
        let inst = random_instance(&mut rng(seed), &cfg.with_ties(ties), k);
        return Ok(serialize_instance(&inst));
    }
    let path = graph.ok_or_else(|| input("--graph is required"))?;
    let g = SimpleGraph::parse(&read(path)?).map_err(input)?;
    let need_h = || h.ok_or_else(|| input("--h is required"));
    let eiis = |h| reductions::gen_eiis(&g, h).map_err(input);
    let edcpe = |h| -> Result<EdcpeInstance, Failure> { reductions::gen_edcpe(&eiis(h)?).map_err(input) };
    Ok(match c {
        Construction::Eiis => {
            let EiisInstance { graph, e_star, h, s_star } = eiis(need_h()?)?;
            graph_text(&graph, e_star, h, &s_star)
        }
        Construction::Edcpe => {
            let EdcpeInstance { graph, e_star, h, s_star } = edcpe(need_h()?)?;
            graph_text(&graph, e_star, h, &s_star)
        }
        Construction::IsmOneswap => {
            serialize_instance(&reductions::gen_ism_ties_oneswap(&edcpe(need_h()?)?).map_err(input)?)
        }
        Construction::IsmTwoswap => {
            let c = reductions::gen_ism_ties_twoswap(&g, need_h()?).map_err(input)?;
            format!("# target common pairs {}\n{}", c.target_common, serialize_instance(&c.instance))
        }
        Construction::IsrOneswap => {
            serialize_instance(&reductions::gen_isr_oneswap_complete(&eiis(need_h()?)?).map_err(input)?)
        }
        Construction::Feder => serialize_instance(&reductions::gen_isr_noties_feder(&g).map_err(input)?.instance),
        Construction::Random => unreachable!("handled above"),
    })
}

fn crossvalidate(
    out: &mut String,
    count: usize,
    agents: usize,
    kmax: usize,
    seed: u64,
    ties: bool,
    marriage: bool,
) -> Result<i32, Failure> {
    let cfg = if marriage { RandomConfig::marriage(agents) } else { RandomConfig::roommates(agents) }.with_ties(ties);
    let total = if marriage { 2 * agents } else { agents };
    let oracle_cfg = OracleConfig::with_agents(total.max(12));
    let mut r = rng(seed);
    let mut mismatches = 0;
    let mut yes = 0;
    for i in 0..count {
        let k = r.gen_range(0..=kmax);
        let inst = random_instance(&mut r, &cfg, k);
        let rep = solve(&inst, Algo::Auto, DEFAULT_WORK_LIMIT, false).map_err(input)?;
        let best = min_distance_stable(&inst.profile2, &inst.matching1, oracle_cfg).map_err(input)?;
        let expect = best.as_ref().is_some_and(|(d, _)| *d <= k);
        let witness_ok = rep.matching.as_ref().is_none_or(|m| {
            blocking_pairs(&inst.profile2, m).is_ok_and(|b| b.is_empty()) && m.distance(&inst.matching1) <= k
        });
        let exact = match (rep.algorithm, &best, rep.distance) {
            (Algo::Ism, Some((d, _)), Some(got)) => *d == got,
            _ => true,
        };
        if rep.is_yes() != expect || !witness_ok || !exact {
            mismatches += 1;
            let _ = writeln!(out, "mismatch on instance {i} ({}):\n{}", rep.algorithm, serialize_instance(&inst));
        }
        yes += usize::from(rep.is_yes());
    }
    let kind = if marriage { ProfileKind::Marriage } else { ProfileKind::Roommates };
    let _ = writeln!(
        out,
        "{kind} agents {agents} ties {ties} seed {seed}: {count} instances, {yes} yes, {mismatches} mismatches"
    );
    Ok(if mismatches == 0 { EXIT_YES } else { EXIT_MISMATCH })
}
