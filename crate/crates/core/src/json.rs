//! JSON forms of instances, prices, reports, traces and certificates.
//!
//! Bundles are comma-joined item labels in universe order, with `""` for
//! the empty bundle. Prices are maps from label to integer.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use crate::auctions::AuctionTrace;
use crate::demand::{DemandReport, ObstacleReport};
use crate::error::{Error, Result};
use crate::model::{Allocation, Bundle, Instance, PriceVector, TruncationSpec, Valuation, ValuationClass};
use crate::oracle::{WalrasianCertificate, WelfareResult};
use crate::structure::GsWitness;

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct InstanceDoc {
    items: Vec<String>,
    players: Vec<ValuationDoc>,
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
enum ValuationDoc {
    Table {
        values: BTreeMap<String, u32>,
    },
    UnitDemand {
        values: BTreeMap<String, u32>,
    },
    Additive {
        values: BTreeMap<String, u32>,
    },
    Truncation {
        k: usize,
        #[serde(rename = "M")]
        m_value: u32,
        base: Box<ValuationDoc>,
    },
}

pub fn parse_instance(text: &str) -> Result<Instance> {
    let doc: InstanceDoc = serde_json::from_str(text)?;
    if doc.items.is_empty() {
        return Err(Error::NoItems);
    }
    // labels are needed to parse the players
    let labels = Instance::with_value_cap(doc.items.clone(), vec![Valuation::zero(doc.items.len())?], 0)?;
    let players = doc
        .players
        .iter()
        .map(|p| valuation_from_doc(&labels, p))
        .collect::<Result<Vec<_>>>()?;
    Instance::new(doc.items, players)
}

fn item_values(labels: &Instance, values: &BTreeMap<String, u32>) -> Result<Vec<u32>> {
    let mut out = vec![0; labels.item_count()];
    for (label, &value) in values {
        out[labels.index_of(label)?] = value;
    }
    Ok(out)
}

fn valuation_from_doc(labels: &Instance, doc: &ValuationDoc) -> Result<Valuation> {
    match doc {
        ValuationDoc::Table { values } => {
            let m = labels.item_count();
            let mut table: Vec<Option<u32>> = vec![None; 1 << m];
            for (key, &value) in values {
                let b = labels.parse_bundle_key(key)?;
                if table[b.index()].replace(value).is_some() {
                    return Err(Error::Parse(format!("bundle `{key}` listed twice")));
                }
            }
            let values = table
                .into_iter()
                .enumerate()
                .map(|(bits, v)| {
                    v.ok_or_else(|| {
                        let key = labels.bundle_key(Bundle::from_bits(bits as u32));
                        Error::Parse(format!("table has no entry for bundle `{key}`"))
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            Valuation::table(m, values)
        }
        ValuationDoc::UnitDemand { values } => Valuation::unit_demand(item_values(labels, values)?),
        ValuationDoc::Additive { values } => Valuation::additive(item_values(labels, values)?),
        ValuationDoc::Truncation { k, m_value, base } => Valuation::truncation(TruncationSpec {
            base: valuation_from_doc(labels, base)?,
            k: *k,
            m_value: *m_value,
        }),
    }
}

fn valuation_to_doc(instance: &Instance, v: &Valuation) -> ValuationDoc {
    let per_item = |values: &[u32]| {
        values
            .iter()
            .enumerate()
            .map(|(j, &x)| (instance.label(j).to_string(), x))
            .collect()
    };
    match v.class() {
        ValuationClass::Table => ValuationDoc::Table {
            values: Bundle::all(v.items())
                .map(|b| (instance.bundle_key(b), v.value(b)))
                .collect(),
        },
        ValuationClass::UnitDemand(values) => ValuationDoc::UnitDemand {
            values: per_item(values),
        },
        ValuationClass::Additive(values) => ValuationDoc::Additive {
            values: per_item(values),
        },
        ValuationClass::Truncation(spec) => ValuationDoc::Truncation {
            k: spec.k,
            m_value: spec.m_value,
            base: Box::new(valuation_to_doc(instance, &spec.base)),
        },
    }
}

pub fn instance_to_json(instance: &Instance) -> Value {
    let doc = InstanceDoc {
        items: instance.items().to_vec(),
        players: instance
            .players()
            .iter()
            .map(|v| valuation_to_doc(instance, v))
            .collect(),
    };
    serde_json::to_value(doc).expect("plain data")
}

/// Label-to-price map; items left out are priced 0.
pub fn parse_price(instance: &Instance, text: &str) -> Result<PriceVector> {
    let map: BTreeMap<String, u32> = serde_json::from_str(text)?;
    Ok(PriceVector::new(item_values(instance, &map)?))
}

pub fn price_to_json(instance: &Instance, p: &PriceVector) -> Value {
    let map: Map<String, Value> = (0..p.len())
        .map(|j| (instance.label(j).to_string(), json!(p.get(j))))
        .collect();
    Value::Object(map)
}

pub fn bundle_to_json(instance: &Instance, b: Bundle) -> Value {
    json!(instance.labels(b))
}

fn bundles_to_json(instance: &Instance, bundles: &[Bundle]) -> Value {
    Value::Array(bundles.iter().map(|&b| bundle_to_json(instance, b)).collect())
}

pub fn allocation_to_json(instance: &Instance, a: &Allocation) -> Value {
    bundles_to_json(instance, a.bundles())
}

pub fn demand_report_to_json(instance: &Instance, r: &DemandReport) -> Value {
    json!({
        "player": r.player,
        "utility": r.utility,
        "demand": bundles_to_json(instance, &r.demand),
        "minimal_demand": bundles_to_json(instance, &r.minimal_demand),
    })
}

pub fn obstacle_to_json(instance: &Instance, o: &ObstacleReport) -> Value {
    json!({
        "o_star": bundle_to_json(instance, o.o_star),
        "f_value": o.f_value,
        "per_player_f": o.per_player_f,
        "unique": o.unique,
    })
}

pub fn trace_to_json(instance: &Instance, t: &AuctionTrace) -> Value {
    let steps: Vec<Value> = t
        .steps
        .iter()
        .map(|s| {
            json!({
                "t": s.t,
                "price": price_to_json(instance, &s.price_before),
                "raised": bundle_to_json(instance, s.raised),
                "lyapunov": s.lyapunov_before,
                "f": s.f_value,
                "kind": s.kind.as_str(),
            })
        })
        .collect();
    json!({
        "algorithm": t.algorithm,
        "steps": steps,
        "final_price": price_to_json(instance, &t.final_price),
        "final_lyapunov": t.final_lyapunov,
        "terminated": t.terminated,
        "iteration_cap_hit": t.iteration_cap_hit,
        "anomalies": t.anomalies.iter().map(|a| format!("{a:?}")).collect::<Vec<_>>(),
    })
}

pub fn certificate_to_json(instance: &Instance, c: &WalrasianCertificate) -> Value {
    json!({
        "price": price_to_json(instance, &c.price),
        "allocation": allocation_to_json(instance, &c.allocation),
        "envy_free": c.envy_free,
        "all_positive_priced_allocated": c.coverage,
        "lyapunov": c.lyapunov,
        "max_welfare": c.max_welfare,
    })
}

pub fn welfare_to_json(instance: &Instance, w: &WelfareResult) -> Value {
    json!({
        "value": w.value,
        "allocation": allocation_to_json(instance, &w.allocation),
    })
}

pub fn witness_to_json(instance: &Instance, w: &GsWitness) -> Value {
    json!({
        "p": price_to_json(instance, &w.p),
        "q": price_to_json(instance, &w.q),
        "s": bundle_to_json(instance, w.s),
        "unchanged": bundle_to_json(instance, w.unchanged),
        "violated_item": w.violated_item.map(|j| instance.label(j).to_string()),
    })
}
