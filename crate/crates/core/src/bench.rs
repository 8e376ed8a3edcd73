//! Graph benchmarks: non-3-colorability and vertex cover, both encoded with
//! saturation over an external check.

use std::fmt;
use std::io;
use std::sync::Arc;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{HexError, Result};
use crate::eval::evaluate;
use crate::family::{Sigma, SupportFamily, SupportSet};
use crate::oracle::{Oracle, OracleRegistry};
use crate::parser::parse_program;
use crate::program::{Atom, AtomSet, ExternalAtom, InputParam, Program};

/// Largest graph accepted by the harness.
pub const MAX_NODES: usize = 8;

pub const COLORS: [&str; 3] = ["r", "g", "b"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Problem {
    NonThreeCol,
    VertexCover,
}

impl Problem {
    pub fn parse(s: &str) -> Result<Problem> {
        match s {
            "non3col" => Ok(Problem::NonThreeCol),
            "vertexcover" => Ok(Problem::VertexCover),
            _ => Err(HexError::UnknownStrategy {
                kind: "problem",
                name: s.to_string(),
                available: "non3col, vertexcover".into(),
            }),
        }
    }
}

impl fmt::Display for Problem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Problem::NonThreeCol => "non3col",
            Problem::VertexCover => "vertexcover",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Shape {
    /// Each pair of nodes is joined with the given probability.
    Random(f64),
    Complete,
    Cycle,
    Edgeless,
}

impl Shape {
    pub fn parse(s: &str) -> Result<Shape> {
        match s {
            "complete" => Ok(Shape::Complete),
            "cycle" => Ok(Shape::Cycle),
            "edgeless" => Ok(Shape::Edgeless),
            "random" => Ok(Shape::Random(0.5)),
            _ => match s.strip_prefix("random:").and_then(|d| d.parse().ok()) {
                Some(d) => Ok(Shape::Random(d)),
                None => Err(HexError::UnknownStrategy {
                    kind: "graph shape",
                    name: s.to_string(),
                    available: "random, random:<density>, complete, cycle, edgeless".into(),
                }),
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BenchSpec {
    pub problem: Problem,
    pub shape: Shape,
    pub nodes: usize,
    pub seed: u64,
    /// Cover size bound; ignored for non-3-colorability.
    pub limit: usize,
}

impl BenchSpec {
    pub fn new(problem: Problem, shape: Shape, nodes: usize, seed: u64, limit: usize) -> Self {
        BenchSpec { problem, shape, nodes, seed, limit }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(HexError::InvalidBenchSpec(m));
        if self.nodes == 0 || self.nodes > MAX_NODES {
            return bad(format!("node count {} is outside 1..={MAX_NODES}", self.nodes));
        }
        if let Shape::Random(d) = self.shape {
            if !(0.0..=1.0).contains(&d) {
                return bad(format!("edge density {d} is outside [0,1]"));
            }
        }
        if self.problem == Problem::VertexCover && (self.limit < 1 || self.limit >= self.nodes) {
            return bad(format!("vertex cover needs 1 <= L < n, got L={} n={}", self.limit, self.nodes));
        }
        Ok(())
    }

    /// Undirected edges `(u,v)` with `u < v`, nodes numbered from 1.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let n = self.nodes;
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let mut out = Vec::new();
        for u in 1..=n {
            for v in u + 1..=n {
                let keep = match self.shape {
                    Shape::Random(d) => rng.gen_bool(d),
                    Shape::Complete => true,
                    Shape::Cycle => v == u + 1 || (u == 1 && v == n && n > 2),
                    Shape::Edgeless => false,
                };
                if keep {
                    out.push((u, v));
                }
            }
        }
        out
    }
}

/// A generated ground program with its oracle.
pub struct Instance {
    pub program: Program,
    pub reg: OracleRegistry,
    pub edges: Vec<(usize, usize)>,
}

fn col(v: usize, c: &str) -> Atom {
    Atom::new("col", &[&v.to_string(), c])
}

fn cover_in(v: usize) -> Atom {
    Atom::new("in", &[&v.to_string()])
}

/// `&colCheck[col]()`: true iff some edge has both ends sharing a color.
pub struct ColCheck {
    edges: Vec<(usize, usize)>,
}

impl ColCheck {
    pub fn new(edges: Vec<(usize, usize)>) -> Self {
        ColCheck { edges }
    }
}

impl Oracle for ColCheck {
    fn name(&self) -> &str {
        "colCheck"
    }

    fn eval(&self, y: &AtomSet, _: &[InputParam], _: &[String]) -> bool {
        self.edges.iter().any(|&(u, v)| COLORS.iter().any(|c| y.contains(&col(u, c)) && y.contains(&col(v, c))))
    }

    fn support_family(&self, ext: &ExternalAtom, domain: &AtomSet, sigma: Sigma) -> Option<SupportFamily> {
        if sigma != Sigma::T {
            return None;
        }
        let sets = self.edges.iter().flat_map(|&(u, v)| {
            COLORS.iter().map(move |c| SupportSet { pos: [col(u, c), col(v, c)].into(), neg: AtomSet::new() })
        });
        Some(SupportFamily::new(ext.clone(), Sigma::T, domain.clone(), sets))
    }
}

/// `&checkVC[in,out,L]()`: true iff some edge has neither end in the cover
/// or more than `L` nodes are in it.
pub struct CheckVc {
    nodes: usize,
    edges: Vec<(usize, usize)>,
}

impl CheckVc {
    pub fn new(nodes: usize, edges: Vec<(usize, usize)>) -> Self {
        CheckVc { nodes, edges }
    }
}

fn limit_of(inputs: &[InputParam]) -> usize {
    inputs
        .iter()
        .find_map(|p| match p {
            InputParam::Constant(c) => c.parse().ok(),
            InputParam::Predicate(_) => None,
        })
        .unwrap_or(0)
}

impl Oracle for CheckVc {
    fn name(&self) -> &str {
        "checkVC"
    }

    fn eval(&self, y: &AtomSet, inputs: &[InputParam], _: &[String]) -> bool {
        let uncovered = self.edges.iter().any(|&(u, v)| !y.contains(&cover_in(u)) && !y.contains(&cover_in(v)));
        let size = (1..=self.nodes).filter(|&v| y.contains(&cover_in(v))).count();
        uncovered || size > limit_of(inputs)
    }

    fn support_family(&self, ext: &ExternalAtom, domain: &AtomSet, sigma: Sigma) -> Option<SupportFamily> {
        if sigma != Sigma::T {
            return None;
        }
        let mut sets: Vec<SupportSet> = self
            .edges
            .iter()
            .map(|&(u, v)| SupportSet { pos: AtomSet::new(), neg: [cover_in(u), cover_in(v)].into() })
            .collect();
        let k = limit_of(&ext.inputs) + 1;
        for mask in 0u32..1 << self.nodes {
            if mask.count_ones() as usize == k {
                let pos = (0..self.nodes).filter(|i| mask >> i & 1 == 1).map(|i| cover_in(i + 1)).collect();
                sets.push(SupportSet { pos, neg: AtomSet::new() });
            }
        }
        Some(SupportFamily::new(ext.clone(), Sigma::T, domain.clone(), sets))
    }
}

/// Builds the saturation encoding and registers its oracle.
pub fn generate_instance(spec: &BenchSpec) -> Result<Instance> {
    spec.validate()?;
    let edges = spec.edges();
    let mut text = String::new();
    let mut reg = OracleRegistry::empty();
    match spec.problem {
        Problem::NonThreeCol => {
            for v in 1..=spec.nodes {
                text.push_str(&format!("col({v},r) v col({v},g) v col({v},b).\n"));
                for c in COLORS {
                    text.push_str(&format!("col({v},{c}) :- inval.\n"));
                }
            }
            text.push_str("inval :- &colCheck[col]().\n");
            reg.register(Arc::new(ColCheck::new(edges.clone())));
        }
        Problem::VertexCover => {
            for v in 1..=spec.nodes {
                text.push_str(&format!("in({v}) v out({v}).\nin({v}) :- inval.\nout({v}) :- inval.\n"));
            }
            text.push_str(&format!("inval :- &checkVC[in,out,{}]().\n", spec.limit));
            reg.register(Arc::new(CheckVc::new(spec.nodes, edges.clone())));
        }
    }
    text.push_str(":- not inval.\n");
    Ok(Instance { program: parse_program(&text)?, reg, edges })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub problem: Problem,
    pub nodes: usize,
    pub edges: usize,
    pub limit: usize,
    pub seed: u64,
    pub mode: String,
    pub first_only: bool,
    pub answer_set_count: usize,
    pub oracle_calls: u64,
    pub setup_oracle_calls: u64,
    pub candidates_checked: u64,
    pub minimality_checks: u64,
    pub wall_time_ms: f64,
}

/// Evaluates one instance under each mode in turn.
pub fn run_bench(spec: &BenchSpec, modes: &[&str], first_only: bool) -> Result<Vec<BenchRow>> {
    if modes.is_empty() {
        return Ok(Vec::new());
    }
    let inst = generate_instance(spec)?;
    let mut rows = Vec::new();
    for mode in modes {
        let start = Instant::now();
        let out = evaluate(&inst.program, &AtomSet::new(), &inst.reg, &[], mode, first_only)?;
        let wall_time_ms = start.elapsed().as_secs_f64() * 1000.0;
        rows.push(BenchRow {
            problem: spec.problem,
            nodes: spec.nodes,
            edges: inst.edges.len(),
            limit: if spec.problem == Problem::VertexCover { spec.limit } else { 0 },
            seed: spec.seed,
            mode: mode.to_string(),
            first_only,
            answer_set_count: out.answer_sets.len(),
            oracle_calls: out.stats.oracle_calls,
            setup_oracle_calls: out.stats.setup_oracle_calls,
            candidates_checked: out.stats.candidates_checked,
            minimality_checks: out.stats.minimality_checks,
            wall_time_ms,
        });
    }
    Ok(rows)
}

pub fn write_csv<W: io::Write>(rows: &[BenchRow], w: W) -> Result<()> {
    let mut wr = csv::Writer::from_writer(w);
    for r in rows {
        wr.serialize(r).map_err(|e| HexError::Io(e.to_string()))?;
    }
    wr.flush().map_err(|e| HexError::Io(e.to_string()))
}

pub fn read_csv<R: io::Read>(r: R) -> Result<Vec<BenchRow>> {
    csv::Reader::from_reader(r)
        .deserialize()
        .collect::<std::result::Result<_, _>>()
        .map_err(|e| HexError::Io(e.to_string()))
}

pub fn format_text(rows: &[BenchRow]) -> String {
    let mut s = format!(
        "{:<12} {:>5} {:>5} {:>12} {:>5} {:>10} {:>10} {:>10} {:>10} {:>10}\n",
        "problem", "n", "edges", "mode", "AS", "calls", "setup", "cands", "minchecks", "ms"
    );
    for r in rows {
        s.push_str(&format!(
            "{:<12} {:>5} {:>5} {:>12} {:>5} {:>10} {:>10} {:>10} {:>10} {:>10.2}\n",
            r.problem.to_string(),
            r.nodes,
            r.edges,
            r.mode,
            r.answer_set_count,
            r.oracle_calls,
            r.setup_oracle_calls,
            r.candidates_checked,
            r.minimality_checks,
            r.wall_time_ms
        ));
    }
    s
}
