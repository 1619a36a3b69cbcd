//! Deterministic batch runs behind the command-line tool.
//!
//! Every random draw is seeded by [`derive_seed`] from the master seed, an
//! experiment tag and the sample index, and results are assembled in index
//! order, so output never depends on the worker count.

mod output;

use std::{collections::BTreeMap, path::PathBuf};

use rayon::prelude::*;
use serde::Serialize;

use crate::{
    dynamics::{build_hamiltonian, sweep_with, Bonds, Couplings, Propagator, TimeGrid},
    entropy::partial_trace,
    qinformation::{q_information, q_information_bounds, q_information_reduced, traced_choice_spread},
    states::{binary_state, binary_state_count, make_basis_state, make_ghz, make_w, random_gaussian_state, PureState, Registry, TABLE1},
    Error, Result,
};

pub use output::{format_float, write_json, write_records_csv, write_table1_csv};

/// Per-row tolerance between recomputed and published Table 1 values.
pub const TABLE1_TOL: f64 = 1e-3;

const ZERO_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
}

#[derive(Clone, Debug, Serialize)]
pub struct RunConfig {
    pub seed: u64,
    /// Samples per register size (fig1b).
    pub samples: usize,
    pub t_max: f64,
    /// Grid points per time series (fig2), endpoints included.
    pub steps: usize,
    pub bins: usize,
    pub hist_range: (f64, f64),
    pub workers: usize,
    pub bonds: Bonds,
    /// Attach bounds and traced-choice spread to every 4-qubit record.
    pub diagnostics: bool,
    pub format: OutputFormat,
    pub out: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            seed: 1,
            samples: 10_000,
            t_max: 10.0,
            steps: 501,
            bins: 101,
            hist_range: (-1.5, 1.5),
            workers: std::thread::available_parallelism().map_or(1, |n| n.get()),
            bonds: Bonds::Printed,
            diagnostics: false,
            format: OutputFormat::Csv,
            out: None,
        }
    }
}

impl RunConfig {
    fn pool(&self) -> Result<rayon::ThreadPool> {
        if self.workers == 0 {
            return Err(Error::domain("worker count must be positive"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(self.workers)
            .build()
            .map_err(|e| Error::Resource(e.to_string()))
    }
}

/// Seed for item `index` of `experiment`, a pure function of its inputs.
pub fn derive_seed(master: u64, experiment: &str, index: u64) -> u64 {
    // FNV-1a over the tag, then splitmix64 mixing
    let tag = experiment
        .bytes()
        .fold(0xcbf2_9ce4_8422_2325u64, |h, b| (h ^ b as u64).wrapping_mul(0x0100_0000_01b3));
    splitmix64(splitmix64(master ^ tag) ^ index.wrapping_mul(0x9e37_79b9_7f4a_7c15))
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepRecord {
    pub experiment: String,
    pub params: BTreeMap<String, String>,
    pub index: usize,
    pub t_or_sample: f64,
    pub omega_q: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub diagnostics: Option<BTreeMap<String, f64>>,
}

impl SweepRecord {
    fn new(experiment: &str, params: &[(&str, String)], index: usize, t_or_sample: f64, omega_q: f64) -> Self {
        SweepRecord {
            experiment: experiment.to_string(),
            params: params.iter().map(|(k, v)| (k.to_string(), v.clone())).collect(),
            index,
            t_or_sample,
            omega_q,
            diagnostics: None,
        }
    }

    fn with_diagnostics(mut self, psi: &PureState) -> Result<Self> {
        let b = q_information_bounds(psi)?;
        let mut d = BTreeMap::new();
        d.insert("bound_lower".to_string(), b.lower);
        d.insert("bound_upper".to_string(), b.upper);
        d.insert("traced_spread".to_string(), traced_choice_spread(psi)?);
        self.diagnostics = Some(d);
        Ok(self)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Histogram {
    pub lo: f64,
    pub hi: f64,
    pub counts: Vec<u64>,
    pub underflow: u64,
    pub overflow: u64,
}

impl Histogram {
    pub fn new(values: &[f64], bins: usize, (lo, hi): (f64, f64)) -> Result<Self> {
        if bins == 0 || !(lo < hi) {
            return Err(Error::domain(format!("invalid histogram: {bins} bins over [{lo}, {hi}]")));
        }
        let mut h = Histogram {
            lo,
            hi,
            counts: vec![0; bins],
            underflow: 0,
            overflow: 0,
        };
        let width = (hi - lo) / bins as f64;
        for &v in values {
            if v < lo {
                h.underflow += 1;
            } else if v > hi {
                h.overflow += 1;
            } else {
                let k = (((v - lo) / width) as usize).min(bins - 1);
                h.counts[k] += 1;
            }
        }
        Ok(h)
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum::<u64>() + self.underflow + self.overflow
    }

    pub fn bin_edges(&self) -> Vec<f64> {
        let bins = self.counts.len();
        (0..=bins)
            .map(|k| self.lo + (self.hi - self.lo) * k as f64 / bins as f64)
            .collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Summary {
    pub count: usize,
    pub min: f64,
    pub max: f64,
    pub mean: f64,
    pub std: f64,
    pub negative: usize,
    pub positive: usize,
    pub zero: usize,
}

impl Summary {
    pub fn of(values: &[f64]) -> Summary {
        let count = values.len();
        let mean = values.iter().sum::<f64>() / count as f64;
        let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / count as f64;
        Summary {
            count,
            min: values.iter().copied().fold(f64::INFINITY, f64::min),
            max: values.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            mean,
            std: var.sqrt(),
            negative: values.iter().filter(|&&v| v < -ZERO_TOL).count(),
            positive: values.iter().filter(|&&v| v > ZERO_TOL).count(),
            zero: values.iter().filter(|v| v.abs() <= ZERO_TOL).count(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Table1Row {
    pub state: String,
    pub n: usize,
    pub omega_q: f64,
    pub paper_value: f64,
    pub abs_dev: f64,
    pub source: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct Table1Report {
    pub rows: Vec<Table1Row>,
}

impl Table1Report {
    /// Rows whose deviation exceeds [`TABLE1_TOL`], as validation errors.
    pub fn failures(&self) -> Vec<Error> {
        self.rows
            .iter()
            .filter(|r| !(r.abs_dev <= TABLE1_TOL))
            .map(|r| Error::Validation {
                name: r.state.clone(),
                n_qubits: r.n,
                expected: r.paper_value,
                computed: r.omega_q,
            })
            .collect()
    }
}

/// Recomputes every Table 1 row from the registry amplitudes.
pub fn run_table1(_config: &RunConfig, registry: &Registry) -> Result<Table1Report> {
    let rows = TABLE1
        .iter()
        .map(|row| {
            let entry = registry.get_unvalidated(row.state, row.n_qubits)?;
            let omega_q = entry.recompute()?;
            Ok(Table1Row {
                state: row.state.to_string(),
                n: row.n_qubits,
                omega_q,
                paper_value: row.value,
                abs_dev: (omega_q - row.value).abs(),
                source: entry.source,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Table1Report { rows })
}

#[derive(Clone, Debug, Serialize)]
pub struct DistributionGroup {
    pub n: usize,
    pub histogram: Histogram,
    pub summary: Summary,
}

#[derive(Clone, Debug, Serialize)]
pub struct DistributionReport {
    pub experiment: String,
    pub records: Vec<SweepRecord>,
    pub groups: Vec<DistributionGroup>,
}

/// Reduced Q-information of all 65,535 nonzero binary-coefficient
/// four-qubit states.
pub fn run_fig1a(config: &RunConfig) -> Result<DistributionReport> {
    let n = 4;
    let total = binary_state_count(n);
    let records = config.pool()?.install(|| {
        (1..=total)
            .into_par_iter()
            .map(|mask| {
                let psi = binary_state(n, mask)?;
                let omega = q_information_reduced(&psi, 0)?.omega;
                let rec = SweepRecord::new("fig1a", &[("n", n.to_string())], (mask - 1) as usize, mask as f64, omega);
                if config.diagnostics {
                    rec.with_diagnostics(&psi)
                } else {
                    Ok(rec)
                }
            })
            .collect::<Result<Vec<_>>>()
    })?;
    let values: Vec<f64> = records.iter().map(|r| r.omega_q).collect();
    Ok(DistributionReport {
        experiment: "fig1a".into(),
        groups: vec![DistributionGroup {
            n,
            histogram: Histogram::new(&values, config.bins, config.hist_range)?,
            summary: Summary::of(&values),
        }],
        records,
    })
}

/// Register sizes sampled by [`run_fig1b`].
pub const FIG1B_SIZES: [usize; 4] = [4, 5, 6, 7];

/// Q-information of three-qubit marginals of Gaussian random pure states on
/// 4 to 7 qubits; the first `n - 3` qubits are traced out.
pub fn run_fig1b(config: &RunConfig) -> Result<DistributionReport> {
    if config.samples == 0 {
        return Err(Error::domain("fig1b needs at least one sample"));
    }
    let pool = config.pool()?;
    let mut records = Vec::with_capacity(FIG1B_SIZES.len() * config.samples);
    let mut groups = Vec::new();
    for n in FIG1B_SIZES {
        let tag = format!("fig1b/n={n}");
        let keep: Vec<usize> = (n - 3..n).collect();
        let batch = pool.install(|| {
            (0..config.samples)
                .into_par_iter()
                .map(|s| {
                    let psi = random_gaussian_state(n, derive_seed(config.seed, &tag, s as u64))?;
                    let rho = partial_trace(&psi, &keep)?;
                    let omega = q_information(&rho, &keep)?.omega;
                    let rec = SweepRecord::new(
                        "fig1b",
                        &[("n", n.to_string()), ("seed", config.seed.to_string())],
                        s,
                        s as f64,
                        omega,
                    );
                    if config.diagnostics && n == 4 {
                        rec.with_diagnostics(&psi)
                    } else {
                        Ok(rec)
                    }
                })
                .collect::<Result<Vec<_>>>()
        })?;
        let values: Vec<f64> = batch.iter().map(|r| r.omega_q).collect();
        groups.push(DistributionGroup {
            n,
            histogram: Histogram::new(&values, config.bins, config.hist_range)?,
            summary: Summary::of(&values),
        });
        records.extend(batch);
    }
    Ok(DistributionReport {
        experiment: "fig1b".into(),
        records,
        groups,
    })
}

/// Initial states of the time-evolution runs, in output order.
pub const FIG2_STATES: [&str; 4] = ["YC", "GHZ", "W", "0000"];

pub fn fig2_initial_state(name: &str, registry: &Registry) -> Result<PureState> {
    match name {
        "YC" => Ok(registry.get("YC", 4)?.state()),
        "GHZ" => make_ghz(4),
        "W" => make_w(4),
        "0000" => make_basis_state(4, 0),
        other => Err(Error::Lookup {
            name: other.to_string(),
            n_qubits: 4,
        }),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SeriesSummary {
    pub order: usize,
    pub state: String,
    pub min: f64,
    pub max: f64,
    pub total_variation: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct Fig2Report {
    pub records: Vec<SweepRecord>,
    pub series: Vec<SeriesSummary>,
}

impl Fig2Report {
    pub fn series(&self, order: usize, state: &str) -> Option<&SeriesSummary> {
        self.series.iter().find(|s| s.order == order && s.state == state)
    }

    pub fn values(&self, order: usize, state: &str) -> Vec<f64> {
        let order = order.to_string();
        self.records
            .iter()
            .filter(|r| r.params["hamiltonian_order"] == order && r.params["state"] == state)
            .map(|r| r.omega_q)
            .collect()
    }
}

/// Q-information time series for every (Hamiltonian order, initial state)
/// pair on `t ∈ [0, t_max]`.
pub fn run_fig2(config: &RunConfig, registry: &Registry) -> Result<Fig2Report> {
    let grid = TimeGrid::new(0.0, config.t_max, config.steps)?;
    let pool = config.pool()?;
    let mut records = Vec::with_capacity(16 * grid.steps);
    let mut series = Vec::new();
    for order in 1..=4 {
        let h = build_hamiltonian(order, 4, Couplings::default(), config.bonds)?;
        let prop = Propagator::new(&h)?;
        for name in FIG2_STATES {
            let psi0 = fig2_initial_state(name, registry)?;
            let points = pool.install(|| sweep_with(&prop, &psi0, &grid))?;
            let values: Vec<f64> = points.iter().map(|p| p.omega_q).collect();
            series.push(SeriesSummary {
                order,
                state: name.to_string(),
                min: values.iter().copied().fold(f64::INFINITY, f64::min),
                max: values.iter().copied().fold(f64::NEG_INFINITY, f64::max),
                total_variation: values.windows(2).map(|w| (w[1] - w[0]).abs()).sum(),
            });
            let params = [
                ("hamiltonian_order", order.to_string()),
                ("state", name.to_string()),
                ("seed", config.seed.to_string()),
            ];
            for p in points {
                let rec = SweepRecord::new("fig2", &params, p.step, p.t, p.omega_q);
                records.push(if config.diagnostics {
                    rec.with_diagnostics(&prop.evolve(&psi0, p.t)?)?
                } else {
                    rec
                });
            }
        }
    }
    Ok(Fig2Report { records, series })
}
