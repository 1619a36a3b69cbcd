//! Named reference states.
//!
//! GHZ, W, GHZ_PHASE and BASIS are generated analytically. Every other name
//! is read from an amplitude file whose records are
//! `name, n_qubits, basis_index, re, im, source, expected_omega`. The loader
//! normalizes each `(name, n_qubits)` group, and lookups recompute the
//! reduced Q-information and refuse entries that miss their reference value.

use std::{collections::BTreeMap, path::Path, sync::OnceLock};

use crate::{qinformation::q_information_reduced, Error, Result, C64};

use super::{make_basis_state, make_ghz, make_ghz_phase, make_w, PureState};

/// Maximum tolerated deviation between a stored entry's recomputed
/// Q-information and its reference value.
pub const VALIDATION_TOL: f64 = 1e-3;

const BUILTIN: &str = include_str!("../../data/registry.csv");

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TableRow {
    pub state: &'static str,
    pub n_qubits: usize,
    pub value: f64,
}

const fn row(state: &'static str, n_qubits: usize, value: f64) -> TableRow {
    TableRow {
        state,
        n_qubits,
        value,
    }
}

/// Published reduced Q-information values (bits).
pub const TABLE1: [TableRow; 21] = [
    row("GHZ", 3, 0.0),
    row("GHZ", 4, 1.0),
    row("GHZ", 5, 2.0),
    row("GHZ", 6, 3.0),
    row("GHZ", 7, 4.0),
    row("GHZ", 8, 5.0),
    row("W", 3, 0.0),
    row("W", 4, 0.2451),
    row("W", 5, 0.4477),
    row("W", 6, 0.6087),
    row("W", 7, 0.7380),
    row("W", 8, 0.8438),
    row("W", 10, 1.0065),
    row("W", 12, 1.126),
    row("MMES", 3, 0.0),
    row("MMES", 4, -1.0),
    row("MMES", 5, -2.0),
    row("MMES", 6, -2.0),
    row("YC", 4, -1.0),
    row("HD", 4, -0.3491),
    row("HS", 4, 0.2244),
];

pub fn table1_reference(name: &str, n_qubits: usize) -> Option<f64> {
    TABLE1
        .iter()
        .find(|r| r.state == name && r.n_qubits == n_qubits)
        .map(|r| r.value)
}

#[derive(Clone, Debug, PartialEq)]
pub struct StateRegistryEntry {
    pub name: String,
    pub n_qubits: usize,
    pub amplitudes: Vec<C64>,
    pub source: String,
    pub expected_q_information: Option<f64>,
}

impl StateRegistryEntry {
    pub fn state(&self) -> PureState {
        PureState::normalized(self.amplitudes.clone())
            .expect("registry amplitudes are normalized at load")
            .with_label(self.name.clone())
    }

    /// Reduced Q-information with qubit 0 traced out.
    pub fn recompute(&self) -> Result<f64> {
        Ok(q_information_reduced(&self.state(), 0)?.omega)
    }

    /// Recomputes the entry and compares it with its reference value.
    pub fn validate(&self) -> Result<f64> {
        let Some(expected) = self.expected_q_information else {
            return Ok(f64::NAN);
        };
        let computed = self.recompute()?;
        if (computed - expected).abs() > VALIDATION_TOL {
            return Err(Error::Validation {
                name: self.name.clone(),
                n_qubits: self.n_qubits,
                expected,
                computed,
            });
        }
        Ok(computed)
    }
}

#[derive(Clone, Debug, Default)]
pub struct Registry {
    stored: Vec<StateRegistryEntry>,
}

impl Registry {
    /// The amplitude file shipped with the crate.
    pub fn builtin() -> Result<Registry> {
        Registry::parse(BUILTIN)
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Registry> {
        Registry::parse(&std::fs::read_to_string(path)?)
    }

    pub fn parse(text: &str) -> Result<Registry> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(false)
            .comment(Some(b'#'))
            .trim(csv::Trim::All)
            .flexible(false)
            .from_reader(text.as_bytes());

        struct Group {
            source: String,
            expected: Option<f64>,
            amps: BTreeMap<usize, C64>,
        }
        let mut groups: BTreeMap<(String, usize), Group> = BTreeMap::new();
        let mut order = Vec::new();

        for rec in rdr.records() {
            let rec = rec?;
            let line = rec.position().map_or(0, |p| p.line() as usize);
            let bad = |msg: String| Error::Parse { line, msg };
            if rec.len() != 7 {
                return Err(bad(format!("expected 7 fields, found {}", rec.len())));
            }
            let name = rec[0].to_string();
            let n: usize = rec[1]
                .parse()
                .map_err(|_| bad(format!("bad qubit count {:?}", &rec[1])))?;
            if n == 0 || n > super::MAX_QUBITS {
                return Err(bad(format!("qubit count {n} out of range")));
            }
            let idx: usize = rec[2]
                .parse()
                .map_err(|_| bad(format!("bad basis index {:?}", &rec[2])))?;
            if idx >= 1 << n {
                return Err(bad(format!("basis index {idx} out of range for {n} qubits")));
            }
            let re = parse_number(&rec[3]).ok_or_else(|| bad(format!("bad real part {:?}", &rec[3])))?;
            let im = parse_number(&rec[4]).ok_or_else(|| bad(format!("bad imaginary part {:?}", &rec[4])))?;
            let expected = match &rec[6] {
                "" => None,
                s => Some(parse_number(s).ok_or_else(|| bad(format!("bad expected value {s:?}")))?),
            };
            let key = (name.clone(), n);
            let g = groups.entry(key.clone()).or_insert_with(|| {
                order.push(key.clone());
                Group {
                    source: rec[5].to_string(),
                    expected,
                    amps: BTreeMap::new(),
                }
            });
            if g.expected != expected {
                return Err(bad(format!("inconsistent expected value for {name}({n})")));
            }
            if g.amps.insert(idx, C64::new(re, im)).is_some() {
                return Err(bad(format!("duplicate basis index {idx} for {name}({n})")));
            }
        }

        let mut stored = Vec::with_capacity(order.len());
        for key in order {
            let g = groups.remove(&key).expect("group recorded");
            let mut amps = vec![C64::new(0.0, 0.0); 1 << key.1];
            for (i, a) in g.amps {
                amps[i] = a;
            }
            let state = PureState::normalized(amps).map_err(|e| Error::Parse {
                line: 0,
                msg: format!("{}({}): {e}", key.0, key.1),
            })?;
            stored.push(StateRegistryEntry {
                name: key.0,
                n_qubits: key.1,
                amplitudes: state.amplitudes().to_vec(),
                source: g.source,
                expected_q_information: g.expected,
            });
        }
        Ok(Registry { stored })
    }

    /// Stored (file-backed) entries.
    pub fn entries(&self) -> &[StateRegistryEntry] {
        &self.stored
    }

    /// Looks up an entry without checking it against its reference value.
    pub fn get_unvalidated(&self, name: &str, n_qubits: usize) -> Result<StateRegistryEntry> {
        let analytic = |state: PureState, source: &str, expected: Option<f64>| StateRegistryEntry {
            name: name.to_string(),
            n_qubits,
            amplitudes: state.amplitudes().to_vec(),
            source: source.to_string(),
            expected_q_information: expected,
        };
        let lookup = || Error::Lookup {
            name: name.to_string(),
            n_qubits,
        };
        match name {
            "GHZ" => Ok(analytic(
                make_ghz(n_qubits).map_err(|_| lookup())?,
                "analytic",
                table1_reference(name, n_qubits),
            )),
            "W" => Ok(analytic(
                make_w(n_qubits).map_err(|_| lookup())?,
                "analytic",
                table1_reference(name, n_qubits),
            )),
            "GHZ_PHASE" if n_qubits == 4 => Ok(analytic(make_ghz_phase(0.0), "analytic, alpha = 0", Some(1.0))),
            "BASIS" => Ok(analytic(
                make_basis_state(n_qubits, 0).map_err(|_| lookup())?,
                "analytic, all qubits |0>",
                None,
            )),
            _ => self
                .stored
                .iter()
                .find(|e| e.name == name && e.n_qubits == n_qubits)
                .cloned()
                .ok_or_else(lookup),
        }
    }

    /// Looks up an entry and verifies its recomputed Q-information.
    pub fn get(&self, name: &str, n_qubits: usize) -> Result<StateRegistryEntry> {
        let e = self.get_unvalidated(name, n_qubits)?;
        e.validate()?;
        Ok(e)
    }

    /// Validation failures across the stored entries.
    pub fn validation_failures(&self) -> Vec<Error> {
        self.stored.iter().filter_map(|e| e.validate().err()).collect()
    }
}

/// Validated lookup in the built-in registry.
pub fn registry_get(name: &str, n_qubits: usize) -> Result<StateRegistryEntry> {
    static BUILTIN_REGISTRY: OnceLock<Registry> = OnceLock::new();
    let reg = match BUILTIN_REGISTRY.get() {
        Some(r) => r,
        None => {
            let r = Registry::builtin()?;
            BUILTIN_REGISTRY.get_or_init(|| r)
        }
    };
    reg.get(name, n_qubits)
}

/// Decimal or `p/q` rational.
fn parse_number(s: &str) -> Option<f64> {
    let v = match s.split_once('/') {
        Some((p, q)) => {
            let (p, q): (f64, f64) = (p.trim().parse().ok()?, q.trim().parse().ok()?);
            if q == 0.0 {
                return None;
            }
            p / q
        }
        None => s.parse().ok()?,
    };
    v.is_finite().then_some(v)
}
