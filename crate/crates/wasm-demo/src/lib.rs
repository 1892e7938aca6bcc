//! Browser bindings: the rotation structure of an instance, an incremental
//! solve, and a distance check for a candidate matching.

use std::fmt::Write as _;

use incstable::format::parse_matching;
use incstable::solve::{self, Algo};
use incstable::xp::DEFAULT_WORK_LIMIT;
use incstable::{blocking_pairs, parse_instance, sr};
use wasm_bindgen::prelude::*;

/// The instance preloaded in the page: eight roommates, and an old matching
/// that the new preferences make unstable.
pub const SAMPLE: &str = "kind roommates
k 4
[profile1]
1: 7 2 6 8 5 3 4
2: 3 4 6 5 8 1 7
3: 2 5 1 7 4 6 8
4: 6 1 7 3 5 8 2
5: 8 7 1 4 6 2 3
6: 4 7 3 8 5 1 2
7: 1 2 8 4 3 5 6
8: 5 4 2 3 6 7 1
[profile2]
1: 7 2 6 8 5 3 4
2: 4 6 5 3 8 1 7
3: 5 2 1 7 4 6 8
4: 1 7 3 6 5 8 2
5: 7 1 8 4 6 2 3
6: 7 3 8 4 5 1 2
7: 2 8 4 3 5 6 1
8: 4 2 3 5 6 7 1
[matching1]
1 7
2 3
4 6
5 8
";

pub fn rotations_text(instance: &str) -> Result<String, String> {
    let inst = parse_instance(instance).map_err(|e| e.to_string())?;
    sr::rotation_report(&inst.profile2).map_err(|e| e.to_string())
}

pub fn solve_text(instance: &str, algo: &str) -> Result<String, String> {
    let inst = parse_instance(instance).map_err(|e| e.to_string())?;
    let algo: Algo = algo.parse()?;
    let rep = solve::solve(&inst, algo, DEFAULT_WORK_LIMIT, true).map_err(|e| e.to_string())?;
    let mut s = String::new();
    let _ = writeln!(s, "algorithm {}", rep.algorithm);
    match &rep.matching {
        Some(m) => {
            s.push_str(&m.to_text(&inst.profile2));
            let _ = writeln!(s, "distance {}", rep.distance.unwrap_or(0));
        }
        None => {
            let _ = writeln!(s, "NO stable matching within distance {}", inst.k);
        }
    }
    if let Some(d) = rep.depth {
        let _ = writeln!(s, "search depth {d}");
    }
    if let Some(e) = &rep.explain {
        s.push('\n');
        s.push_str(e);
    }
    Ok(s)
}

pub fn distance_text(instance: &str, matching: &str) -> Result<String, String> {
    let inst = parse_instance(instance).map_err(|e| e.to_string())?;
    let p2 = &inst.profile2;
    let m = parse_matching(p2, matching)
        .map_err(|e| e.to_string())?
        .ok_or("no matching given")?;
    let d = m.distance(&inst.matching1);
    let mut s = format!("distance to matching1: {d} (budget {})\n", inst.k);
    let blocking = blocking_pairs(p2, &m).map_err(|e| e.to_string())?;
    if blocking.is_empty() {
        s.push_str("stable for profile2\n");
    } else {
        s.push_str("blocking pairs:\n");
        for (a, b) in blocking {
            let _ = writeln!(s, "  {} {}", p2.name(a), p2.name(b));
        }
    }
    Ok(s)
}

#[wasm_bindgen]
pub fn sample_instance() -> String {
    SAMPLE.to_string()
}

#[wasm_bindgen]
pub fn rotations(instance: &str) -> Result<String, JsError> {
    rotations_text(instance).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn solve(instance: &str, algo: &str) -> Result<String, JsError> {
    solve_text(instance, algo).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn distance(instance: &str, matching: &str) -> Result<String, JsError> {
    distance_text(instance, matching).map_err(|e| JsError::new(&e))
}
