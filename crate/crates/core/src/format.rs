//! Line-oriented instance file format.
//!
//! ```text
//! kind roommates
//! agents 4
//! k 2
//! [profile1]
//! 1: 2 (3 4)
//! ...
//! [profile2]
//! ...
//! [matching1]
//! 1 2
//! ```

use std::collections::HashMap;
use std::fmt::Write as _;

use crate::model::{
    Agent, IncrementalInstance, Matching, ModelError, PreferenceList, PreferenceProfile,
    ProfileKind,
};

fn syntax(line: usize, msg: impl Into<String>) -> ModelError {
    ModelError::MalformedSyntax { line, msg: msg.into() }
}

/// Splits a list body such as `(7 2) 6 8` into tie-groups of names.
fn parse_groups(body: &str, line: usize) -> Result<Vec<Vec<String>>, ModelError> {
    let spaced = body.replace('(', " ( ").replace(')', " ) ");
    let mut groups = Vec::new();
    let mut open: Option<Vec<String>> = None;
    for tok in spaced.split_whitespace() {
        match (tok, open.as_mut()) {
            ("(", None) => open = Some(Vec::new()),
            ("(", Some(_)) => return Err(syntax(line, "nested parenthesis")),
            (")", Some(_)) => {
                let g = open.take().unwrap_or_default();
                if g.is_empty() {
                    return Err(syntax(line, "empty tie group"));
                }
                groups.push(g);
            }
            (")", None) => return Err(syntax(line, "unbalanced ')'")),
            (name, Some(g)) => g.push(name.to_string()),
            (name, None) => groups.push(vec![name.to_string()]),
        }
    }
    if open.is_some() {
        return Err(syntax(line, "unbalanced '('"));
    }
    Ok(groups)
}

struct RawList {
    line: usize,
    owner: String,
    groups: Vec<Vec<String>>,
}

#[derive(Default)]
struct Raw {
    kind: Option<ProfileKind>,
    agents: Option<usize>,
    side_u: Option<Vec<String>>,
    side_w: Option<Vec<String>>,
    k: Option<usize>,
    p1: Vec<RawList>,
    p2: Vec<RawList>,
    m1: Vec<(usize, String, String)>,
    seen_p2: bool,
}

#[derive(Clone, Copy, PartialEq)]
enum Section {
    Header,
    P1,
    P2,
    M1,
}

fn parse_raw(text: &str) -> Result<Raw, ModelError> {
    let mut raw = Raw::default();
    let mut section = Section::Header;
    for (idx, full) in text.lines().enumerate() {
        let line = idx + 1;
        let content = full.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        match content {
            "[profile1]" => {
                section = Section::P1;
                continue;
            }
            "[profile2]" => {
                section = Section::P2;
                raw.seen_p2 = true;
                continue;
            }
            "[matching1]" => {
                section = Section::M1;
                continue;
            }
            s if s.starts_with('[') => return Err(syntax(line, format!("unknown section {s}"))),
            _ => {}
        }
        match section {
            Section::Header => {
                let mut it = content.split_whitespace();
                let key = it.next().unwrap_or("");
                let rest: Vec<&str> = it.collect();
                let one = |rest: &[&str]| -> Result<String, ModelError> {
                    match rest {
                        [v] => Ok(v.to_string()),
                        _ => Err(syntax(line, format!("{key} takes one value"))),
                    }
                };
                let num = |v: String| -> Result<usize, ModelError> {
                    v.parse().map_err(|_| syntax(line, format!("bad number {v:?}")))
                };
                match key {
                    "kind" => {
                        raw.kind = Some(match one(&rest)?.as_str() {
                            "roommates" => ProfileKind::Roommates,
                            "marriage" => ProfileKind::Marriage,
                            other => return Err(syntax(line, format!("unknown kind {other}"))),
                        })
                    }
                    "agents" => raw.agents = Some(num(one(&rest)?)?),
                    "k" => raw.k = Some(num(one(&rest)?)?),
                    "sideU" => raw.side_u = Some(rest.iter().map(|s| s.to_string()).collect()),
                    "sideW" => raw.side_w = Some(rest.iter().map(|s| s.to_string()).collect()),
                    _ => return Err(syntax(line, format!("unknown header key {key:?}"))),
                }
            }
            Section::P1 | Section::P2 => {
                let (owner, body) = content
                    .split_once(':')
                    .ok_or_else(|| syntax(line, "expected `name: list`"))?;
                let owner = owner.trim();
                if owner.is_empty() || owner.contains(char::is_whitespace) {
                    return Err(syntax(line, "bad list owner"));
                }
                let rl = RawList { line, owner: owner.to_string(), groups: parse_groups(body, line)? };
                if section == Section::P1 {
                    raw.p1.push(rl);
                } else {
                    raw.p2.push(rl);
                }
            }
            Section::M1 => {
                let toks: Vec<&str> = content.split_whitespace().collect();
                match toks.as_slice() {
                    [a, b] => raw.m1.push((line, a.to_string(), b.to_string())),
                    _ => return Err(syntax(line, "expected `a b` pair")),
                }
            }
        }
    }
    Ok(raw)
}

fn build_profile(
    kind: ProfileKind,
    names: &[String],
    index: &HashMap<String, Agent>,
    sides: Option<(Vec<Agent>, Vec<Agent>)>,
    lists: &[RawList],
) -> Result<PreferenceProfile, ModelError> {
    let n = names.len();
    let mut out: Vec<Option<PreferenceList>> = vec![None; n];
    for rl in lists {
        let owner = *index
            .get(&rl.owner)
            .ok_or_else(|| ModelError::UnknownAgent(rl.owner.clone()))?;
        if out[owner].is_some() {
            return Err(syntax(rl.line, format!("second list for {}", rl.owner)));
        }
        let mut groups = Vec::with_capacity(rl.groups.len());
        for g in &rl.groups {
            let mut ids = Vec::with_capacity(g.len());
            for name in g {
                ids.push(*index.get(name).ok_or_else(|| ModelError::UnknownAgent(name.clone()))?);
            }
            groups.push(ids);
        }
        out[owner] = Some(PreferenceList::from_groups(groups));
    }
    let lists = out
        .into_iter()
        .enumerate()
        .map(|(a, l)| l.ok_or_else(|| ModelError::EmptyPreferenceList { agent: names[a].clone() }))
        .collect::<Result<Vec<_>, _>>()?;
    PreferenceProfile::new(kind, names.to_vec(), sides, lists)
}

/// Parses and fully validates an instance file.
pub fn parse_instance(text: &str) -> Result<IncrementalInstance, ModelError> {
    let raw = parse_raw(text)?;
    let kind = raw.kind.ok_or_else(|| syntax(0, "missing `kind` line"))?;
    let k = raw.k.ok_or_else(|| syntax(0, "missing `k` line"))?;
    if !raw.seen_p2 {
        return Err(syntax(0, "missing [profile2] section"));
    }
    let (names, sides_names) = match kind {
        ProfileKind::Roommates => {
            if raw.side_u.is_some() || raw.side_w.is_some() {
                return Err(syntax(0, "sideU/sideW only allowed for marriage"));
            }
            (raw.p1.iter().map(|l| l.owner.clone()).collect::<Vec<_>>(), None)
        }
        ProfileKind::Marriage => {
            let u = raw.side_u.clone().ok_or_else(|| syntax(0, "missing sideU"))?;
            let w = raw.side_w.clone().ok_or_else(|| syntax(0, "missing sideW"))?;
            let names: Vec<String> = u.iter().chain(&w).cloned().collect();
            (names, Some((u.len(), w.len())))
        }
    };
    if let Some(a) = raw.agents {
        if a != names.len() {
            return Err(syntax(0, format!("agents {a} but {} agents defined", names.len())));
        }
    }
    let mut index = HashMap::new();
    for (i, n) in names.iter().enumerate() {
        if index.insert(n.clone(), i).is_some() {
            return Err(syntax(0, format!("duplicate agent name {n}")));
        }
    }
    let sides = sides_names.map(|(u, w)| ((0..u).collect(), (u..u + w).collect()));
    let p1 = build_profile(kind, &names, &index, sides.clone(), &raw.p1)?;
    let p2 = build_profile(kind, &names, &index, sides, &raw.p2)?;
    let mut pairs = Vec::new();
    for (line, a, b) in &raw.m1 {
        let a = *index.get(a).ok_or_else(|| ModelError::UnknownAgent(a.clone()))?;
        let b = *index.get(b).ok_or_else(|| ModelError::UnknownAgent(b.clone()))?;
        if a == b {
            return Err(syntax(*line, "agent matched with itself"));
        }
        pairs.push((a, b));
    }
    let m1 = Matching::from_pairs(pairs)?;
    IncrementalInstance::new(p1, p2, m1, k)
}

/// Text of a single list body, e.g. `(2 3) 4`.
pub fn list_text(profile: &PreferenceProfile, list: &PreferenceList) -> String {
    let mut parts = Vec::new();
    for g in list.groups() {
        let names: Vec<&str> = g.iter().map(|&a| profile.name(a)).collect();
        if names.len() == 1 {
            parts.push(names[0].to_string());
        } else {
            parts.push(format!("({})", names.join(" ")));
        }
    }
    parts.join(" ")
}

fn profile_text(out: &mut String, p: &PreferenceProfile) {
    for a in 0..p.len() {
        let _ = writeln!(out, "{}: {}", p.name(a), list_text(p, p.list(a)));
    }
}

/// Canonical text form: agents by id, tie-group members ascending by id.
pub fn serialize_instance(inst: &IncrementalInstance) -> String {
    let p = &inst.profile1;
    let mut out = String::new();
    let _ = writeln!(out, "kind {}", p.kind());
    let _ = writeln!(out, "agents {}", p.len());
    if p.is_marriage() {
        let names = |s: &[Agent]| s.iter().map(|&a| p.name(a)).collect::<Vec<_>>().join(" ");
        let _ = writeln!(out, "sideU {}", names(p.side_u()));
        let _ = writeln!(out, "sideW {}", names(p.side_w()));
    }
    let _ = writeln!(out, "k {}", inst.k);
    out.push_str("[profile1]\n");
    profile_text(&mut out, &inst.profile1);
    out.push_str("[profile2]\n");
    profile_text(&mut out, &inst.profile2);
    out.push_str("[matching1]\n");
    for (a, b) in inst.matching1.pairs() {
        let _ = writeln!(out, "{} {}", p.name(a), p.name(b));
    }
    out
}

/// Parses solver output: `a b` pairs, one per line, or the single token `NO`.
pub fn parse_matching(profile: &PreferenceProfile, text: &str) -> Result<Option<Matching>, ModelError> {
    let mut pairs = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let toks: Vec<&str> = content.split_whitespace().collect();
        match toks.as_slice() {
            ["NO"] if pairs.is_empty() => return Ok(None),
            [a, b] => {
                let id = |n: &str| profile.agent(n).ok_or_else(|| ModelError::UnknownAgent(n.to_string()));
                pairs.push((id(a)?, id(b)?));
            }
            _ => return Err(syntax(line, "expected `a b` pair")),
        }
    }
    let m = Matching::from_pairs(pairs)?;
    m.validate(profile)?;
    Ok(Some(m))
}
