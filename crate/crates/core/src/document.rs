//! JSON market documents.
//!
//! Rationals are strings (`"3/4"`, `"-2"`), filtrations are explicit atom
//! lists of state names, and unknown fields are rejected. Parsing produces a
//! validated [`Market`] plus any delay families the document declares.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::delay::{
    validate_execution_family, validate_information_family, ExecutionDelay, ExecutionDelayFamily,
    InformationDelayFamily,
};
use crate::market::{validate_market, Asset, IndexSet, Market};
use crate::prob::{FiniteSpace, Filtration, Partition, StoppingProcess};
use crate::{Error, Rational, Result, Violation};

pub const FORMAT_VERSION: u32 = 1;

/// Atoms per time, each atom a list of state names.
pub type AtomTable = Vec<Vec<Vec<String>>>;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MarketDocument {
    pub format_version: u32,
    pub states: Vec<StateEntry>,
    pub grid: Grid,
    /// Asset id → prices, time-major (`[t][state]`).
    pub assets: BTreeMap<String, Vec<Vec<String>>>,
    pub index_system: Vec<Vec<String>>,
    pub filtrations: Filtrations,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delays: Option<Delays>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateEntry {
    pub name: String,
    pub probability: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Grid {
    pub n: usize,
    pub n_ext: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Filtrations {
    pub grand: AtomTable,
    pub trading: Vec<TradingEntry>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TradingEntry {
    pub index_set: Vec<String>,
    pub atoms: AtomTable,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Delays {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub information: Option<Vec<InformationEntry>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub execution: Option<Vec<ExecutionEntry>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InformationEntry {
    pub index_set: Vec<String>,
    /// `values[t][state]`.
    pub values: Vec<Vec<usize>>,
    pub info: InfoRef,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExecutionEntry {
    pub asset: String,
    /// `values[t][state]`.
    pub values: Vec<Vec<usize>>,
    pub info: InfoRef,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cap: Option<usize>,
}

/// Delay information: `"trivial"`, `"grand"`, `"trading"` or explicit atoms.
///
/// For an execution delay of asset `a`, `"trading"` is the information
/// common to every trading filtration whose index set contains `a`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum InfoRef {
    Named(String),
    Explicit(AtomTable),
}

/// A validated document.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParsedDocument {
    pub market: Market,
    pub information: Option<InformationDelayFamily>,
    pub execution: Option<ExecutionDelayFamily>,
}

pub fn parse_rational(s: &str) -> Option<Rational> {
    s.trim().parse::<Rational>().ok()
}

impl MarketDocument {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Document(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("documents always serialize");
        s.push('\n');
        s
    }

    /// Parses and validates everything, reporting all violations found.
    pub fn to_model(&self) -> Result<ParsedDocument> {
        let mut v = Vec::new();
        if self.format_version != FORMAT_VERSION {
            v.push(Violation::new(
                "format version",
                format!("expected {FORMAT_VERSION}, found {}", self.format_version),
            ));
        }
        let names: Vec<String> = self.states.iter().map(|s| s.name.clone()).collect();
        let mut probs = Vec::new();
        for s in &self.states {
            match parse_rational(&s.probability) {
                Some(p) => probs.push(p),
                None => v.push(Violation::new("bad rational", format!("probability of {}: {:?}", s.name, s.probability))),
            }
        }
        if probs.len() == names.len() {
            v.extend(FiniteSpace::check(&names, &probs, self.grid.n, self.grid.n_ext));
        }
        if !v.is_empty() {
            return Err(Error::Invalid(v));
        }
        let space = FiniteSpace::new(names, probs, self.grid.n, self.grid.n_ext)?;
        let ctx = Ctx { space: &space };

        let mut assets = Vec::new();
        for (id, table) in &self.assets {
            let mut prices = Vec::new();
            for (t, row) in table.iter().enumerate() {
                let mut parsed = Vec::new();
                for (w, cell) in row.iter().enumerate() {
                    match parse_rational(cell) {
                        Some(x) => parsed.push(x),
                        None => v.push(Violation::new("bad rational", format!("asset {id} at time {t}, entry {w}: {cell:?}"))),
                    }
                }
                prices.push(parsed);
            }
            assets.push(Asset { id: id.clone(), prices });
        }
        let ids: Vec<String> = assets.iter().map(|a| a.id.clone()).collect();
        let asset_index = |id: &str| ids.iter().position(|a| a == id);

        let mut index_system = Vec::new();
        for set in &self.index_system {
            let mut parsed = IndexSet::new();
            for id in set {
                match asset_index(id) {
                    Some(a) => {
                        parsed.insert(a);
                    }
                    None => v.push(Violation::new("unknown asset", format!("{id} in the index system"))),
                }
            }
            index_system.push(parsed);
        }
        let parse_set = |ids: &[String], v: &mut Vec<Violation>| -> Option<IndexSet> {
            let mut out = IndexSet::new();
            for id in ids {
                match asset_index(id) {
                    Some(a) => {
                        out.insert(a);
                    }
                    None => {
                        v.push(Violation::new("unknown asset", id.clone()));
                        return None;
                    }
                }
            }
            Some(out)
        };

        let grand = ctx.filtration(&self.filtrations.grand, "grand filtration", &mut v);
        let mut trading: Vec<Option<Filtration>> = vec![None; index_system.len()];
        for entry in &self.filtrations.trading {
            let Some(set) = parse_set(&entry.index_set, &mut v) else { continue };
            match index_system.iter().position(|s| *s == set) {
                Some(i) if trading[i].is_none() => {
                    trading[i] = ctx.filtration(&entry.atoms, &format!("trading filtration {:?}", entry.index_set), &mut v);
                }
                Some(_) => v.push(Violation::new("duplicate trading filtration", format!("{:?}", entry.index_set))),
                None => v.push(Violation::new(
                    "trading filtration without index set",
                    format!("{:?} is not in the index system", entry.index_set),
                )),
            }
        }
        for (i, f) in trading.iter().enumerate() {
            if f.is_none() && !v.iter().any(|x| x.rule == "filtration property" || x.rule == "not a partition") {
                v.push(Violation::new(
                    "missing trading filtration",
                    format!("index set {:?}", self.index_system.get(i)),
                ));
            }
        }
        if !v.is_empty() {
            return Err(Error::Invalid(v));
        }
        let market = Market {
            space,
            assets,
            index_system,
            trading: trading.into_iter().map(|f| f.expect("checked above")).collect(),
            grand: grand.expect("checked above"),
        };
        let v = validate_market(&market);
        if !v.is_empty() {
            return Err(Error::Invalid(v));
        }

        let mut v = Vec::new();
        let ctx = Ctx { space: &market.space };
        let mut information = None;
        let mut execution = None;
        if let Some(delays) = &self.delays {
            if let Some(entries) = &delays.information {
                let mut slots: Vec<Option<StoppingProcess>> = vec![None; market.index_system.len()];
                for e in entries {
                    let Some(set) = parse_set(&e.index_set, &mut v) else { continue };
                    let Some(i) = market.index_of(&set) else {
                        v.push(Violation::new("unknown index set", format!("{:?} in information delays", e.index_set)));
                        continue;
                    };
                    let rows = market.trading[i].len();
                    let info = match &e.info {
                        InfoRef::Named(name) => match name.as_str() {
                            "trivial" => Some(Filtration::trivial(market.num_states(), rows)),
                            "trading" => Some(market.trading[i].clone()),
                            "grand" => Some(market.grand.resized(rows)),
                            other => {
                                v.push(Violation::new("unknown delay information", other.to_string()));
                                None
                            }
                        },
                        InfoRef::Explicit(table) => ctx.filtration(table, "delay information", &mut v),
                    };
                    if let Some(info) = info {
                        slots[i] = Some(StoppingProcess::new(e.values.clone(), info));
                    }
                }
                if v.is_empty() {
                    if let Some(i) = slots.iter().position(Option::is_none) {
                        v.push(Violation::new(
                            "missing information delay",
                            market.set_label(&market.index_system[i]),
                        ));
                    } else {
                        let family = InformationDelayFamily {
                            delays: slots.into_iter().map(|s| s.expect("checked")).collect(),
                        };
                        v.extend(validate_information_family(&market, &family));
                        information = Some(family);
                    }
                }
            }
            if let Some(entries) = &delays.execution {
                let mut slots: Vec<Option<ExecutionDelay>> = vec![None; market.assets.len()];
                let len = market.n_ext() + 1;
                for e in entries {
                    let Some(a) = market.asset_index(&e.asset) else {
                        v.push(Violation::new("unknown asset", format!("{} in execution delays", e.asset)));
                        continue;
                    };
                    let info = match &e.info {
                        InfoRef::Named(name) => match name.as_str() {
                            "trivial" => Some(Filtration::trivial(market.num_states(), len)),
                            "trading" => Some(market.shared_trading_info(a, len)),
                            "grand" => Some(market.grand.clone()),
                            other => {
                                v.push(Violation::new("unknown delay information", other.to_string()));
                                None
                            }
                        },
                        InfoRef::Explicit(table) => ctx.filtration(table, "delay information", &mut v),
                    };
                    if let Some(info) = info {
                        slots[a] = Some(ExecutionDelay {
                            process: StoppingProcess::new(e.values.clone(), info),
                            cap: e.cap,
                        });
                    }
                }
                if v.is_empty() {
                    if let Some(a) = slots.iter().position(Option::is_none) {
                        v.push(Violation::new("missing execution delay", market.assets[a].id.clone()));
                    } else {
                        let family = ExecutionDelayFamily {
                            delays: slots.into_iter().map(|s| s.expect("checked")).collect(),
                        };
                        v.extend(validate_execution_family(&market, &family));
                        execution = Some(family);
                    }
                }
            }
        }
        if !v.is_empty() {
            return Err(Error::Invalid(v));
        }
        Ok(ParsedDocument {
            market,
            information,
            execution,
        })
    }

    /// Document for a market and optional delay families, all filtrations explicit.
    pub fn from_model(
        m: &Market,
        information: Option<&InformationDelayFamily>,
        execution: Option<&ExecutionDelayFamily>,
    ) -> Self {
        let names = m.space.names();
        let atoms = |f: &Filtration| -> AtomTable {
            f.parts()
                .iter()
                .map(|p| p.atoms().iter().map(|a| a.iter().map(|&w| names[w].clone()).collect()).collect())
                .collect()
        };
        let set_ids = |set: &IndexSet| -> Vec<String> { set.iter().map(|&a| m.assets[a].id.clone()).collect() };
        let delays = if information.is_none() && execution.is_none() {
            None
        } else {
            Some(Delays {
                information: information.map(|d| {
                    m.index_system
                        .iter()
                        .zip(&d.delays)
                        .map(|(set, delta)| InformationEntry {
                            index_set: set_ids(set),
                            values: delta.values.clone(),
                            info: InfoRef::Explicit(atoms(&delta.info)),
                        })
                        .collect()
                }),
                execution: execution.map(|p| {
                    m.assets
                        .iter()
                        .zip(&p.delays)
                        .map(|(asset, d)| ExecutionEntry {
                            asset: asset.id.clone(),
                            values: d.process.values.clone(),
                            info: InfoRef::Explicit(atoms(&d.process.info)),
                            cap: d.cap,
                        })
                        .collect()
                }),
            })
        };
        Self {
            format_version: FORMAT_VERSION,
            states: names
                .iter()
                .zip(m.space.probability())
                .map(|(name, p)| StateEntry {
                    name: name.clone(),
                    probability: p.to_string(),
                })
                .collect(),
            grid: Grid {
                n: m.n(),
                n_ext: m.n_ext(),
            },
            assets: m
                .assets
                .iter()
                .map(|a| {
                    let table = a.prices.iter().map(|row| row.iter().map(ToString::to_string).collect()).collect();
                    (a.id.clone(), table)
                })
                .collect(),
            index_system: m.index_system.iter().map(set_ids).collect(),
            filtrations: Filtrations {
                grand: atoms(&m.grand),
                trading: m
                    .index_system
                    .iter()
                    .zip(&m.trading)
                    .map(|(set, f)| TradingEntry {
                        index_set: set_ids(set),
                        atoms: atoms(f),
                    })
                    .collect(),
            },
            delays,
        }
    }
}

struct Ctx<'a> {
    space: &'a FiniteSpace,
}

impl Ctx<'_> {
    fn filtration(&self, table: &AtomTable, what: &str, v: &mut Vec<Violation>) -> Option<Filtration> {
        let mut parts = Vec::new();
        for (t, atoms) in table.iter().enumerate() {
            let mut indexed = Vec::new();
            for atom in atoms {
                let mut ids = Vec::new();
                for name in atom {
                    match self.space.state_index(name) {
                        Some(w) => ids.push(w),
                        None => {
                            v.push(Violation::new("unknown state", format!("{name} in {what} at time {t}")));
                            return None;
                        }
                    }
                }
                indexed.push(ids);
            }
            match Partition::from_atoms(self.space.len(), &indexed) {
                Ok(p) => parts.push(p),
                Err(e) => {
                    v.push(Violation::new("not a partition", format!("{what} at time {t}: {e}")));
                    return None;
                }
            }
        }
        match Filtration::new(parts) {
            Ok(f) => Some(f),
            Err(e) => {
                v.push(Violation::new("filtration property", format!("{what}: {e}")));
                None
            }
        }
    }
}
