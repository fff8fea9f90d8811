//! Relation and structure files, and the commands behind the `tloop` binary
//! driven from code.

use temporal_loops::cli::{run as run_command, Command, RunConfig};
use temporal_loops::io::{parse_relation, parse_structure, relation_json};
use temporal_loops::Result;

const RELATION: &str = r#"{
  "schema": "temporal-loops/relation/v1",
  "arity": 2,
  "dim": 1,
  "orbits": [[0, 1], [1, 0]],
  "names": ["x", "y"]
}"#;

const STRUCTURE: &str = r#"{
  "schema": "temporal-loops/structure/v1",
  "name": "two-cycle",
  "vertices": ["u", "v"],
  "edges": [[0, 1], [1, 0], [0, 0]]
}"#;

pub fn run() -> Result<()> {
    let (r, file) = parse_relation(RELATION)?;
    print!("{}", relation_json(&r, file.names.clone())?);

    let dir = std::env::temp_dir().join(format!("tloop-example-{}", std::process::id()));
    std::fs::create_dir_all(&dir)?;
    let input = dir.join("neq.json");
    std::fs::write(&input, RELATION)?;

    let mut cfg = RunConfig::new(Command::Classify);
    cfg.inputs = vec![input.clone()];
    print!("{}", run_command(&cfg)?);

    cfg.command = Command::Closure;
    cfg.clone = Some("min".parse()?);
    cfg.out = Some(dir.join("closed.json"));
    run_command(&cfg)?;
    let (closed, _) = parse_relation(&std::fs::read_to_string(dir.join("closed.json"))?)?;
    println!("closure under min: {} orbits", closed.len());

    let s = parse_structure(STRUCTURE)?;
    let path = dir.join("structure.json");
    std::fs::write(&path, STRUCTURE)?;
    let mut cfg = RunConfig::new(Command::Loopcond);
    cfg.inputs = vec![path];
    cfg.clone = Some("ll".parse()?);
    cfg.k = Some(1);
    let report = run_command(&cfg)?;
    println!("{}: report of {} lines", s.name, report.lines().count());

    std::fs::remove_dir_all(&dir)?;
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run()
}
