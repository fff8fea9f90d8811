//! Command implementations behind the `tloop` binary. Each command returns
//! the text it prints; errors carry their exit code.

use std::fmt::Write as _;
use std::path::PathBuf;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::gen::{random_relation, rng};
use crate::io::{read_relation, read_structure, relation_json, to_json};
use crate::loopcond::{preset, verify_condition_with, ConditionStructure, CONDITION_BUDGET, VerifyOptions};
use crate::ops::OpKind;
use crate::orbit::enumerate_weak_orders;
use crate::pseudoloop::{find_pseudoloop_with, PseudoLoop};
use crate::relation::DEFAULT_BUDGET;

pub const PSEUDOLOOP_SCHEMA: &str = "temporal-loops/pseudoloop/v1";
pub const DEFAULT_SEED: u64 = 0x7e3b_a5c1;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Command {
    Orbits,
    Classify,
    Closure,
    Pseudoloop,
    Loopcond,
    Random { arity: usize, count: usize },
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub command: Command,
    pub inputs: Vec<PathBuf>,
    pub clone: Option<OpKind>,
    pub k: Option<usize>,
    /// Orbit budget; each command has its own default.
    pub budget: Option<usize>,
    pub seed: u64,
    pub out: Option<PathBuf>,
    pub preset: Option<String>,
    pub timings: bool,
}

impl RunConfig {
    pub fn new(command: Command) -> Self {
        RunConfig {
            command,
            inputs: Vec::new(),
            clone: None,
            k: None,
            budget: None,
            seed: DEFAULT_SEED,
            out: None,
            preset: None,
            timings: false,
        }
    }

    fn input(&self) -> Result<&PathBuf> {
        self.inputs.first().ok_or_else(|| Error::Parse("missing input file".into()))
    }

    fn clone_kind(&self) -> Result<OpKind> {
        self.clone.ok_or_else(|| Error::Parse("missing --clone".into()))
    }

    fn budget_or(&self, default: usize) -> usize {
        self.budget.unwrap_or(default)
    }

    fn k(&self) -> Result<usize> {
        match self.k {
            Some(0) | None => Err(Error::Parse("--k must be a positive integer".into())),
            Some(k) => Ok(k),
        }
    }
}

/// Runs the command and returns its output; with `out` set, the output is
/// written there as well.
pub fn run(cfg: &RunConfig) -> Result<String> {
    if cfg.budget == Some(0) {
        return Err(Error::Parse("--budget-orbits must be positive".into()));
    }
    let text = match &cfg.command {
        Command::Orbits => cmd_orbits(cfg.k()?)?,
        Command::Classify => cmd_classify(cfg)?,
        Command::Closure => cmd_closure(cfg)?,
        Command::Pseudoloop => cmd_pseudoloop(cfg)?,
        Command::Loopcond => cmd_loopcond(cfg)?,
        Command::Random { arity, count } => cmd_random(cfg, *arity, *count)?,
    };
    if let Some(path) = &cfg.out {
        std::fs::write(path, &text)?;
    }
    Ok(text)
}

pub fn cmd_orbits(k: usize) -> Result<String> {
    let all = enumerate_weak_orders(k)?;
    let mut s = format!("{}\n", all.len());
    for w in all {
        writeln!(s, "{w}").unwrap();
    }
    Ok(s)
}

pub fn cmd_classify(cfg: &RunConfig) -> Result<String> {
    let (r, _) = read_relation(cfg.input()?)?;
    let mut s = String::from("clone      preserved\n");
    let mut any = false;
    for kind in OpKind::classified() {
        let yes = r.preserves(kind)?;
        any |= yes;
        writeln!(s, "{:<10} {}", kind.to_string(), if yes { "yes" } else { "no" }).unwrap();
    }
    if !any {
        s.push_str("note: preserved by none of the listed operations\n");
    }
    Ok(s)
}

pub fn cmd_closure(cfg: &RunConfig) -> Result<String> {
    let (r, file) = read_relation(cfg.input()?)?;
    let closed = r.closure(cfg.clone_kind()?, cfg.budget_or(DEFAULT_BUDGET))?;
    relation_json(&closed, file.names)
}

#[derive(Serialize)]
struct PseudoLoopDocument<'a> {
    schema: &'static str,
    clone: OpKind,
    arity: usize,
    dim: usize,
    pseudoloop: &'a PseudoLoop,
}

pub fn cmd_pseudoloop(cfg: &RunConfig) -> Result<String> {
    let (r, _) = read_relation(cfg.input()?)?;
    let clone = cfg.clone_kind()?;
    let budget = cfg.budget_or(DEFAULT_BUDGET);
    let closed = r.closure(clone, budget)?;
    let p = find_pseudoloop_with(&closed, clone, budget)?;
    to_json(&PseudoLoopDocument { schema: PSEUDOLOOP_SCHEMA, clone, arity: r.n, dim: r.k, pseudoloop: &p })
}

fn structure(cfg: &RunConfig) -> Result<ConditionStructure> {
    match (&cfg.preset, cfg.inputs.first()) {
        (Some(name), None) => preset(name),
        (None, Some(path)) => read_structure(path),
        _ => Err(Error::Parse("give exactly one of --preset and a structure file".into())),
    }
}

pub fn cmd_loopcond(cfg: &RunConfig) -> Result<String> {
    let s = structure(cfg)?;
    let opts = VerifyOptions { budget: cfg.budget_or(CONDITION_BUDGET), timings: cfg.timings };
    let report = verify_condition_with(&s, cfg.clone_kind()?, cfg.k()?, &opts)?;
    to_json(&report)
}

/// Relation generated by `count` random tuples drawn with the configured seed.
pub fn cmd_random(cfg: &RunConfig, arity: usize, count: usize) -> Result<String> {
    if arity == 0 || count == 0 {
        return Err(Error::Parse("arity and count must be positive".into()));
    }
    let r = random_relation(&mut rng(cfg.seed), arity, cfg.k()?, count)?;
    relation_json(&r, None)
}
