//! Solver dispatch shared by the command line and the browser demo.

use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use thiserror::Error;

use crate::isr::{self, IsrError};
use crate::model::{IncrementalInstance, Matching};
use crate::sm::{self, SmError};
use crate::xp::{self, XpError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Algo {
    #[default]
    Auto,
    Ism,
    IsrFpt,
    Xp,
}

impl Algo {
    /// The concrete solver `Auto` stands for on `inst`.
    pub fn resolve(self, inst: &IncrementalInstance) -> Algo {
        match self {
            Algo::Auto if inst.has_ties() => Algo::Xp,
            Algo::Auto if inst.profile1.is_marriage() => Algo::Ism,
            Algo::Auto => Algo::IsrFpt,
            a => a,
        }
    }
}

impl fmt::Display for Algo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Algo::Auto => "auto",
            Algo::Ism => "ism",
            Algo::IsrFpt => "isr-fpt",
            Algo::Xp => "xp",
        })
    }
}

impl FromStr for Algo {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "auto" => Ok(Algo::Auto),
            "ism" => Ok(Algo::Ism),
            "isr-fpt" => Ok(Algo::IsrFpt),
            "xp" => Ok(Algo::Xp),
            _ => Err(format!("unknown algorithm {s:?}")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolveError {
    #[error(transparent)]
    Ism(#[from] SmError),
    #[error(transparent)]
    Isr(#[from] IsrError),
    #[error(transparent)]
    Xp(#[from] XpError),
}

#[derive(Debug, Clone)]
pub struct RunReport {
    pub algorithm: Algo,
    pub matching: Option<Matching>,
    pub distance: Option<usize>,
    pub common: Option<usize>,
    pub elapsed: Duration,
    /// Budget-branching depth of the FPT search.
    pub depth: Option<u32>,
    pub explain: Option<String>,
}

impl RunReport {
    pub fn is_yes(&self) -> bool {
        self.matching.is_some()
    }
}

pub fn solve(inst: &IncrementalInstance, algo: Algo, work_limit: u64, explain: bool) -> Result<RunReport, SolveError> {
    let start = Instant::now();
    let algorithm = algo.resolve(inst);
    let mut depth = None;
    let mut text = None;
    let matching = match algorithm {
        Algo::Ism => sm::solve_ism_noties(inst)?.answer(inst.k).cloned(),
        Algo::IsrFpt => {
            let out = isr::solve_isr_noties(inst)?;
            depth = Some(out.stats.max_budget_depth);
            if explain {
                text = Some(isr::explain(&inst.profile2, &out));
            }
            out.matching
        }
        Algo::Xp => xp::solve_xp(inst, work_limit)?.matching,
        Algo::Auto => unreachable!("resolved above"),
    };
    let distance = matching.as_ref().map(|m| m.distance(&inst.matching1));
    let common = matching.as_ref().map(|m| m.common(&inst.matching1));
    Ok(RunReport { algorithm, matching, distance, common, elapsed: start.elapsed(), depth, explain: text })
}
