//! Push-based application of the procedure to externally supplied observations.

use std::collections::BTreeMap;
use std::fmt;
use std::io::{BufRead, Write};

use crate::cli::config::RunConfig;
use crate::error::{Error, Result};
use crate::procedure::{Decision, Procedure, ProcedureState, Schedule};
use crate::simulation::Observation;
use crate::statistics::SequentialStatistic;

/// Something the engine reports while consuming observations.
#[derive(Debug, Clone, PartialEq)]
pub enum Event {
    /// Boundaries were checked at sample size `n`.
    Sample { stage: u32, n: u64 },
    Decision(Decision),
    /// Every stream has a verdict.
    Terminal {
        accepted: usize,
        rejected: usize,
        total_n: u64,
    },
    /// Input ended with streams still undecided.
    Incomplete { n: u64, active: usize },
}

impl fmt::Display for Event {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Event::Sample { stage, n } => write!(f, "SAMPLE stage={stage} n={n}"),
            Event::Decision(d) => write!(
                f,
                "DECISION stage={} n={} stream={} verdict={}",
                d.stage, d.sample_size, d.stream, d.verdict
            ),
            Event::Terminal {
                accepted,
                rejected,
                total_n,
            } => write!(
                f,
                "TERMINAL accepted={accepted} rejected={rejected} total_n={total_n}"
            ),
            Event::Incomplete { n, active } => write!(f, "INCOMPLETE n={n} active={active}"),
        }
    }
}

pub struct RunEngine {
    procedure: Procedure,
    schedule: Schedule,
    state: ProcedureState,
    stats: Vec<Box<dyn SequentialStatistic + Send>>,
    raw: Vec<f64>,
    scratch: Vec<(usize, f64)>,
    index: u64,
    n: u64,
    total_n: u64,
}

impl RunEngine {
    pub fn new(cfg: &RunConfig) -> Result<Self> {
        let procedure = Procedure::new(&cfg.procedure_spec()?)?;
        let stats = cfg
            .streams
            .iter()
            .map(|s| s.build())
            .collect::<Result<Vec<_>>>()?;
        let k = stats.len();
        Ok(RunEngine {
            procedure,
            schedule: cfg.schedule.clone(),
            state: ProcedureState::new(k),
            stats,
            raw: vec![0.0; k],
            scratch: Vec::with_capacity(k),
            index: 0,
            n: 0,
            total_n: 0,
        })
    }

    pub fn k(&self) -> usize {
        self.stats.len()
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn is_terminal(&self) -> bool {
        self.state.is_terminal()
    }

    pub fn active(&self) -> &[usize] {
        self.state.active()
    }

    pub fn decisions(&self) -> &[Decision] {
        self.state.decisions()
    }

    /// Feeds time step `n + 1`. `values` must hold one observation for every
    /// active stream; entries for decided streams are ignored.
    pub fn push(&mut self, values: &BTreeMap<usize, Vec<f64>>) -> Result<Vec<Event>> {
        if self.is_terminal() {
            return Ok(Vec::new());
        }
        let t = self.n + 1;
        for &k in self.state.active() {
            let x = values
                .get(&k)
                .ok_or_else(|| Error::Usage(format!("t={t}: missing value for active stream k={k}")))?;
            self.raw[k] = self.stats[k]
                .observe(x)
                .map_err(|e| Error::Usage(format!("t={t} k={k}: {e}")))?;
        }
        self.n = t;
        let mut events = Vec::new();
        if self.procedure.next_point(&self.schedule, self.index) != Some(t) {
            return Ok(events);
        }
        self.index += 1;
        events.push(Event::Sample {
            stage: self.state.stage(),
            n: t,
        });
        let before = self.state.decisions().len();
        self.procedure
            .step(&mut self.state, t, &self.raw, &mut self.scratch)?;
        for d in &self.state.decisions()[before..] {
            self.total_n += d.sample_size;
            events.push(Event::Decision(*d));
        }
        if self.is_terminal() {
            events.push(Event::Terminal {
                accepted: self.state.accepted_count(),
                rejected: self.state.rejected_count(),
                total_n: self.total_n,
            });
        }
        Ok(events)
    }

    /// The closing event for input that ended before termination.
    pub fn finish(&self) -> Option<Event> {
        (!self.is_terminal()).then(|| Event::Incomplete {
            n: self.n,
            active: self.state.active().len(),
        })
    }
}

fn parse_line(line: &str, lineno: usize, k: usize) -> Result<(u64, usize, Vec<f64>)> {
    let bad = |msg: String| Error::Usage(format!("line {lineno}: {msg}"));
    let fields: Vec<&str> = line.split('\t').collect();
    if fields.len() != 3 {
        return Err(bad(format!(
            "expected 3 tab-separated fields t, k, value; found {}",
            fields.len()
        )));
    }
    let t: u64 = fields[0]
        .trim()
        .parse()
        .map_err(|_| bad(format!("invalid time index {:?}", fields[0])))?;
    if t == 0 {
        return Err(bad("time indices start at 1".into()));
    }
    let stream: usize = fields[1]
        .trim()
        .parse()
        .map_err(|_| bad(format!("invalid stream index {:?}", fields[1])))?;
    if stream >= k {
        return Err(bad(format!("stream index {stream} out of range for {k} streams")));
    }
    let value = fields[2]
        .split(',')
        .map(|v| {
            v.trim()
                .parse::<f64>()
                .map_err(|_| bad(format!("invalid value {v:?}")))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((t, stream, value))
}

/// Reads `t<TAB>k<TAB>value[,value..]` lines and writes one event per line.
///
/// Time indices run `1, 2, ..`; a step is processed as soon as every active
/// stream has a value. Lines for decided streams are ignored, as are blank
/// lines and lines starting with `#`. Returns true when every stream reached a verdict.
pub fn run_stream<R: BufRead + ?Sized, W: Write + ?Sized>(
    cfg: &RunConfig,
    input: &mut R,
    out: &mut W,
) -> Result<bool> {
    let mut engine = RunEngine::new(cfg)?;
    let mut pending: BTreeMap<usize, Vec<f64>> = BTreeMap::new();
    for (i, line) in input.lines().enumerate() {
        let line = line?;
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let lineno = i + 1;
        let (t, k, value) = parse_line(line, lineno, engine.k())?;
        let active = engine.active().contains(&k);
        let next = engine.n() + 1;
        if t == engine.n() && !active {
            continue;
        }
        if t != next {
            if t > next && !pending.is_empty() {
                engine.push(&pending)?;
            }
            return Err(Error::Usage(format!(
                "line {lineno}: time index {t} out of order, expected {next}"
            )));
        }
        if pending.insert(k, value).is_some() {
            return Err(Error::Usage(format!("line {lineno}: duplicate value for t={t} k={k}")));
        }
        if engine.active().iter().all(|a| pending.contains_key(a)) {
            for e in engine.push(&pending)? {
                writeln!(out, "{e}")?;
            }
            pending.clear();
            if engine.is_terminal() {
                break;
            }
        }
    }
    if !pending.is_empty() {
        engine.push(&pending)?;
    }
    if let Some(e) = engine.finish() {
        writeln!(out, "{e}")?;
        return Ok(false);
    }
    Ok(true)
}

/// Formats recorded observations in the input format of [`run_stream`].
pub fn format_observations(observations: &[Observation]) -> String {
    observations
        .iter()
        .map(|o| format!("{}\t{}\t{}\n", o.t, o.stream, o.value))
        .collect()
}
