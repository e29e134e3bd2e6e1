//! Exact failure counting over zero, one and two faults, and
//! pseudothreshold search.

use std::collections::HashMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exrec::{ExRec, GateLabel};
use crate::noise::{enumerate_faults, FaultEvent, ModelFamily, NoiseModel, RateClass};
use crate::sim::{Outcome, SimState};

const CLASSES: usize = 5;

/// Neumaier-compensated sum.
#[derive(Clone, Copy, Debug, Default)]
pub struct CompensatedSum {
    sum: f64,
    c: f64,
}

impl CompensatedSum {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.c += (self.sum - t) + x;
        } else {
            self.c += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn merge(&mut self, o: &CompensatedSum) {
        self.add(o.sum);
        self.add(o.c);
    }

    pub fn value(&self) -> f64 {
        self.sum + self.c
    }
}

#[derive(Clone, Debug, Default)]
struct Acc {
    f1: [CompensatedSum; CLASSES],
    s1: [CompensatedSum; CLASSES],
    f2: [[CompensatedSum; CLASSES]; CLASSES],
    s2: [[CompensatedSum; CLASSES]; CLASSES],
    configs: u64,
    weight_dev: f64,
}

impl Acc {
    fn merge(mut self, o: Acc) -> Acc {
        for c in 0..CLASSES {
            self.f1[c].merge(&o.f1[c]);
            self.s1[c].merge(&o.s1[c]);
            for d in 0..CLASSES {
                self.f2[c][d].merge(&o.f2[c][d]);
                self.s2[c][d].merge(&o.s2[c][d]);
            }
        }
        self.configs += o.configs;
        self.weight_dev = self.weight_dev.max(o.weight_dev);
        self
    }

    fn record(&mut self, faults: &[&FaultEvent], o: Outcome) {
        self.configs += 1;
        self.weight_dev = self.weight_dev.max((o.weight - 1.0).abs());
        let fail = o.fail.clamp(0.0, 1.0);
        match faults {
            [a] => {
                let c = a.class.index();
                self.f1[c].add(fail * a.relative_weight);
                self.s1[c].add((1.0 - fail) * a.relative_weight);
            }
            [a, b] => {
                let (c, d) = (a.class.index().min(b.class.index()), a.class.index().max(b.class.index()));
                let w = a.relative_weight * b.relative_weight;
                self.f2[c][d].add(fail * w);
                self.s2[c][d].add((1.0 - fail) * w);
            }
            _ => {}
        }
    }
}

/// Model-independent failure sums. `f1[c]` adds, over single events of
/// class `c`, the failure fraction times the event's share of its
/// location; `f2[c][d]` does the same for pairs (`c <= d`). The `s` sums
/// are the complements.
#[derive(Clone, Debug, Serialize)]
pub struct FaultCounts {
    pub gate: GateLabel,
    pub n_locations: [usize; CLASSES],
    pub f1: [f64; CLASSES],
    pub s1: [f64; CLASSES],
    pub f2: [[f64; CLASSES]; CLASSES],
    pub s2: [[f64; CLASSES]; CLASSES],
    pub configs: u64,
    /// Largest deviation of total branch weight from 1.
    pub max_weight_deviation: f64,
}

impl FaultCounts {
    /// `(p2_fail, p2_succ)` under `model`.
    pub fn evaluate(&self, model: &NoiseModel) -> (f64, f64) {
        let p = model.rates();
        // probability that the listed numbers of faults per class occur at
        // a fixed choice of locations, with no fault elsewhere
        let weight = |k: [usize; CLASSES]| -> f64 {
            (0..CLASSES)
                .map(|c| {
                    let free = self.n_locations[c].saturating_sub(k[c]) as i32;
                    p[c].powi(k[c] as i32) * (1.0 - p[c]).powi(free)
                })
                .product()
        };
        let w0 = weight([0; CLASSES]);
        let (mut fail, mut succ) = (0.0, w0);
        for c in 0..CLASSES {
            let mut k = [0; CLASSES];
            k[c] = 1;
            let w = weight(k);
            fail += self.f1[c] * w;
            succ += self.s1[c] * w;
            for d in c..CLASSES {
                let mut k = [0; CLASSES];
                k[c] += 1;
                k[d] += 1;
                let w = weight(k);
                fail += self.f2[c][d] * w;
                succ += self.s2[c][d] * w;
            }
        }
        (fail, succ)
    }
}

#[derive(Clone, Copy, Debug)]
pub struct CountOptions {
    /// Refuse to run beyond this many fault configurations.
    pub max_configs: u64,
    pub workers: usize,
}

impl Default for CountOptions {
    fn default() -> Self {
        CountOptions { max_configs: 50_000_000, workers: 0 }
    }
}

/// Suffix outcomes keyed by the state right after a fault is injected or
/// right after a decoding step.
struct Memo {
    map: HashMap<SimState, Outcome>,
}

const MEMO_CAP: usize = 1 << 18;

impl Memo {
    fn finish(&mut self, ex: &ExRec, mut st: SimState) -> Result<Outcome> {
        let depth = ex.circuit.depth();
        let mut path = Vec::new();
        let mut first = true;
        let o = loop {
            if st.next_step == depth {
                break ex.evaluate(&st)?;
            }
            if first || ex.is_decode_boundary(st.next_step) {
                if let Some(o) = self.map.get(&st) {
                    break *o;
                }
                path.push(st.clone());
            }
            first = false;
            ex.step(&mut st, &[])?;
        };
        if self.map.len() + path.len() > MEMO_CAP {
            self.map.clear();
        }
        for k in path {
            self.map.insert(k, o);
        }
        Ok(o)
    }
}

/// Exact sums over every configuration of at most two faults at distinct
/// locations.
pub fn count(ex: &ExRec, opts: CountOptions) -> Result<FaultCounts> {
    let events = enumerate_faults(&ex.circuit, &NoiseModel::uniform(1.0))?;
    let mut n_locations = [0; CLASSES];
    for g in ex.circuit.gates() {
        n_locations[RateClass::of(g.kind)?.index()] += 1;
    }
    let n_ev = events.len() as u64;
    let same_loc: u64 = {
        let mut per = HashMap::new();
        for e in &events {
            *per.entry(e.location).or_insert(0u64) += 1;
        }
        per.values().map(|c| c * (c - 1) / 2).sum()
    };
    let configs = 1 + n_ev + n_ev * (n_ev - 1) / 2 - same_loc;
    if configs > opts.max_configs {
        return Err(Error::BudgetExceeded { configs, cap: opts.max_configs });
    }
    let depth = ex.circuit.depth();
    // events grouped by timestep, in location order
    let mut by_step: Vec<Vec<&FaultEvent>> = vec![Vec::new(); depth];
    for e in &events {
        by_step[e.location.0].push(e);
    }
    // fault-free states before each timestep
    let mut clean = Vec::with_capacity(depth + 1);
    let mut st = ex.initial_state();
    clean.push(st.clone());
    for _ in 0..depth {
        ex.step(&mut st, &[])?;
        clean.push(st.clone());
    }

    let work = |memo: &mut Memo, e1: &FaultEvent| -> Result<Acc> {
        let mut acc = Acc::default();
        let t1 = e1.location.0;
        let lec1 = t1 < ex.ga_steps.start;
        // same-step partners
        for e2 in by_step[t1].iter().filter(|e2| e2.location.1 > e1.location.1) {
            let pair = [e1, *e2];
            let o = if ex.lec_only(&pair) {
                Outcome { fail: 0.0, weight: 1.0 }
            } else {
                let mut s = clean[t1].clone();
                ex.step(&mut s, &pair)?;
                memo.finish(ex, s)?
            };
            acc.record(&pair, o);
        }
        let mut s = clean[t1].clone();
        ex.step(&mut s, &[e1])?;
        for t in t1 + 1..depth {
            let lec2 = t < ex.ga_steps.start;
            for e2 in &by_step[t] {
                let pair = [e1, *e2];
                let o = if lec1 && lec2 {
                    Outcome { fail: 0.0, weight: 1.0 }
                } else {
                    let mut s2 = s.clone();
                    ex.step(&mut s2, &[*e2])?;
                    memo.finish(ex, s2)?
                };
                acc.record(&pair, o);
            }
            ex.step(&mut s, &[])?;
        }
        let single = if lec1 { Outcome { fail: 0.0, weight: 1.0 } } else { ex.evaluate(&s)? };
        acc.record(&[e1], single);
        Ok(acc)
    };

    let run = || -> Result<Acc> {
        events
            .par_iter()
            .map_init(|| Memo { map: HashMap::new() }, |memo, e| work(memo, e))
            .try_reduce(Acc::default, |a, b| Ok(a.merge(b)))
    };
    let acc = if opts.workers > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(opts.workers)
            .build()
            .map_err(|e| Error::InvalidParameter(e.to_string()))?
            .install(run)?
    } else {
        run()?
    };
    let zero = ex.finish(ex.initial_state())?;
    if zero.fail != 0.0 {
        return Err(Error::InvalidCircuit("the fault-free exREC fails".into()));
    }
    let v1 = |a: &[CompensatedSum; CLASSES]| a.map(|s| s.value());
    Ok(FaultCounts {
        gate: ex.gate,
        n_locations,
        f1: v1(&acc.f1),
        s1: v1(&acc.s1),
        f2: acc.f2.map(|r| r.map(|s| s.value())),
        s2: acc.s2.map(|r| r.map(|s| s.value())),
        configs: acc.configs + 1,
        max_weight_deviation: acc.weight_dev,
    })
}

/// Probability at which the encoded gate matches its physical rate.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Thresholds {
    /// Solves `1 - p2_succ(p) = p_g(p)`.
    pub lower: f64,
    /// Solves `p2_fail(p) = p_g(p)`.
    pub upper: f64,
}

pub const SEARCH_RANGE: (f64, f64) = (1e-7, 1e-1);

/// First upward crossing of `f` on a log grid, refined by bisection to
/// relative tolerance `1e-3`.
fn crossing(f: impl Fn(f64) -> f64) -> Result<f64> {
    let (lo, hi) = SEARCH_RANGE;
    let steps = 240;
    let at = |k: usize| lo * (hi / lo).powf(k as f64 / steps as f64);
    let mut prev = at(0);
    if f(prev) >= 0.0 {
        return Err(Error::NoCrossing { lo, hi });
    }
    for k in 1..=steps {
        let p = at(k);
        if f(p) >= 0.0 {
            let (mut a, mut b) = (prev, p);
            while b / a > 1.0 + 1e-4 {
                let mid = (a * b).sqrt();
                if f(mid) >= 0.0 {
                    b = mid;
                } else {
                    a = mid;
                }
            }
            return Ok((a * b).sqrt());
        }
        prev = p;
    }
    Err(Error::NoCrossing { lo, hi })
}

/// Pseudothresholds in units of the CNOT rate of `family`.
pub fn pseudothreshold(counts: &FaultCounts, family: ModelFamily) -> Result<Thresholds> {
    let class = counts.gate.rate_class();
    let pg = |p: f64| family.at(p).rate(class);
    let lower = crossing(|p| {
        let (_, s) = counts.evaluate(&family.at(p));
        (1.0 - s) - pg(p)
    })?;
    let upper = crossing(|p| counts.evaluate(&family.at(p)).0 - pg(p))?;
    Ok(Thresholds { lower, upper })
}

/// Curve rows `(p, p2_fail, 1 - p2_succ)`.
pub fn curve(counts: &FaultCounts, family: ModelFamily, grid: &[f64]) -> Result<Vec<(f64, f64, f64)>> {
    grid.iter()
        .map(|&p| {
            if !(0.0..=SEARCH_RANGE.1).contains(&p) {
                return Err(Error::InvalidParameter(format!("grid point {p} outside [0, {:e}]", SEARCH_RANGE.1)));
            }
            let (f, s) = counts.evaluate(&family.at(p));
            Ok((p, f, 1.0 - s))
        })
        .collect()
}

pub fn curve_csv(rows: &[(f64, f64, f64)]) -> String {
    let mut out = String::from("p,p2_fail,one_minus_p2_succ\n");
    for (p, f, s) in rows {
        out.push_str(&format!("{p:e},{f:e},{s:e}\n"));
    }
    out
}

#[derive(Clone, Debug, Serialize)]
pub struct ExRecResult {
    pub gate: GateLabel,
    pub model: String,
    pub p_grid: Vec<f64>,
    pub p2_fail: Vec<f64>,
    pub p2_succ: Vec<f64>,
    pub threshold_lower: Option<f64>,
    pub threshold_upper: Option<f64>,
}

pub fn result_record(counts: &FaultCounts, family: ModelFamily, grid: &[f64]) -> ExRecResult {
    let th = pseudothreshold(counts, family).ok();
    let evals: Vec<(f64, f64)> = grid.iter().map(|&p| counts.evaluate(&family.at(p))).collect();
    ExRecResult {
        gate: counts.gate,
        model: family.name().to_string(),
        p_grid: grid.to_vec(),
        p2_fail: evals.iter().map(|e| e.0).collect(),
        p2_succ: evals.iter().map(|e| e.1).collect(),
        threshold_lower: th.map(|t| t.lower),
        threshold_upper: th.map(|t| t.upper),
    }
}
