use std::path::{Path, PathBuf};
use std::process::ExitCode;

use serde_json::{json, Value};
use walras::auctions::{self, AuctionTrace, StepPolicy};
use walras::demand;
use walras::ggs2::{self, MinRaiseRule};
use walras::json as wj;
use walras::model::{Bundle, Instance, PriceVector};
use walras::oracle;
use walras::structure::{self, GgsMembership};
use walras::{demos, Error, Result};

use crate::{CheckKind, OracleKind};

pub struct Context {
    pub budget: u64,
    pub out: Option<PathBuf>,
}

/// Process outcome; the exit code depends on nothing else.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum Outcome {
    /// Certified result, or every check passed.
    Ok,
    /// Bad input, or a check found a violation.
    InputError,
    IterationCap,
    /// The auction stopped without a certified Walrasian end state.
    NotCertified,
}

impl From<Outcome> for ExitCode {
    fn from(o: Outcome) -> Self {
        ExitCode::from(match o {
            Outcome::Ok => 0,
            Outcome::InputError => 1,
            Outcome::IterationCap => 2,
            Outcome::NotCertified => 3,
        })
    }
}

pub fn env_budget() -> Option<u64> {
    std::env::var("WALRAS_BUDGET").ok()?.trim().parse().ok()
}

fn load_instance(path: &Path) -> Result<Instance> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Parse(format!("cannot read {}: {e}", path.display())))?;
    wj::parse_instance(&text)
}

/// Inline JSON map, or a path to a file holding one.
fn load_price(instance: &Instance, arg: Option<&str>) -> Result<PriceVector> {
    let Some(arg) = arg else {
        return Ok(instance.zero_price());
    };
    let text = if arg.trim_start().starts_with('{') {
        arg.to_string()
    } else {
        std::fs::read_to_string(arg).map_err(|e| Error::Parse(format!("cannot read {arg}: {e}")))?
    };
    wj::parse_price(instance, &text)
}

fn emit(ctx: &Context, value: &Value) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    match &ctx.out {
        Some(path) => std::fs::write(path, text + "\n")
            .map_err(|e| Error::Parse(format!("cannot write {}: {e}", path.display()))),
        None => {
            use std::io::Write;
            match writeln!(std::io::stdout().lock(), "{text}") {
                Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => {
                    Err(Error::Parse(format!("cannot write output: {e}")))
                }
                _ => Ok(()),
            }
        }
    }
}

fn policy(name: &str, seed: u64) -> Option<Box<dyn StepPolicy>> {
    Some(match name {
        "full" => Box::new(auctions::WholeObstacle),
        "min-index" => Box::new(auctions::LowestItem),
        "max-index" => Box::new(auctions::HighestItem),
        "random" => Box::new(auctions::RandomSubset::new(seed)),
        "random-item" => Box::new(auctions::RandomItem::new(seed)),
        _ => return None,
    })
}

pub fn run(ctx: &Context, path: &Path, algorithm: &str, seed: u64) -> Result<Outcome> {
    let instance = load_instance(path)?;
    let outcome = match algorithm {
        "ggs2" => return run_ggs2(ctx, &instance, MinRaiseRule::AllMin),
        "ggs2-obstacle-first" => return run_ggs2(ctx, &instance, MinRaiseRule::ObstacleFirst),
        "gs" => auctions::gul_stacchetti(&instance),
        "ausubel" => auctions::ausubel_ascending(&instance),
        "fine" => auctions::fine_auction(&instance),
        other => match other.strip_prefix("policy:").and_then(|name| policy(name, seed)) {
            Some(mut p) => auctions::run_with_policy(&instance, p.as_mut()),
            None => return Err(Error::Parse(format!("unknown algorithm `{other}`"))),
        },
    };
    let trace = match outcome {
        Ok(trace) => trace,
        Err(Error::IterationCapExceeded { cap, trace }) => return report_cap(ctx, &instance, cap, &trace),
        Err(e) => return Err(e),
    };
    let certificate = oracle::is_walrasian(&instance, &trace.final_price, ctx.budget)?;
    let certified = certificate.as_ref().is_some_and(|c| c.is_valid());
    emit(
        ctx,
        &json!({
            "trace": wj::trace_to_json(&instance, &trace),
            "certificate": certificate.map(|c| wj::certificate_to_json(&instance, &c)),
            "certified": certified,
        }),
    )?;
    Ok(if certified {
        Outcome::Ok
    } else {
        eprintln!("auction stopped at a price that is not Walrasian");
        Outcome::NotCertified
    })
}

fn report_cap(ctx: &Context, instance: &Instance, cap: usize, trace: &AuctionTrace) -> Result<Outcome> {
    eprintln!("iteration cap of {cap} steps reached");
    emit(
        ctx,
        &json!({
            "trace": wj::trace_to_json(instance, trace),
            "certificate": null,
            "certified": false,
        }),
    )?;
    Ok(Outcome::IterationCap)
}

fn run_ggs2(ctx: &Context, instance: &Instance, rule: MinRaiseRule) -> Result<Outcome> {
    let out = match ggs2::ggs2_auction_with(instance, ctx.budget, rule) {
        Ok(out) => out,
        Err(Error::IterationCapExceeded { cap, trace }) => return report_cap(ctx, instance, cap, &trace),
        Err(e) => return Err(e),
    };
    let certified = out.certificate.is_valid();
    emit(
        ctx,
        &json!({
            "trace": wj::trace_to_json(instance, &out.trace),
            "certificate": wj::certificate_to_json(instance, &out.certificate),
            "certified": certified,
            "auction_allocation": wj::allocation_to_json(instance, &out.auction_allocation),
            "auction_allocation_walrasian": out.auction_allocation_walrasian,
        }),
    )?;
    Ok(if certified {
        Outcome::Ok
    } else {
        eprintln!("auction stopped at a price that is not Walrasian");
        Outcome::NotCertified
    })
}

pub fn check(ctx: &Context, what: CheckKind, path: &Path, price: Option<&str>) -> Result<Outcome> {
    let instance = load_instance(path)?;
    let (report, pass) = match what {
        CheckKind::Gs => check_gs(ctx, &instance)?,
        CheckKind::Matroid => check_matroid(&instance, &load_price(&instance, price)?)?,
        CheckKind::Lemmas => check_lemmas(&instance, &load_price(&instance, price)?)?,
        CheckKind::Ggs2Shape => match ggs2::common_m(&instance) {
            Ok(m) => (json!({"check": "ggs2-shape", "M": m, "pass": true}), true),
            Err(Error::NotGgs2Instance { player, reason }) => (
                json!({"check": "ggs2-shape", "pass": false, "player": player, "reason": reason}),
                false,
            ),
            Err(e) => return Err(e),
        },
    };
    emit(ctx, &report)?;
    Ok(if pass { Outcome::Ok } else { Outcome::InputError })
}

fn check_gs(ctx: &Context, instance: &Instance) -> Result<(Value, bool)> {
    let mut players = Vec::new();
    let mut pass = true;
    for (i, v) in instance.players().iter().enumerate() {
        let witness = structure::check_gs_on_grid(v, None, ctx.budget)?;
        pass &= witness.is_none();
        players.push(json!({
            "player": i,
            "gs": witness.is_none(),
            "witness": witness.map(|w| wj::witness_to_json(instance, &w)),
        }));
    }
    Ok((
        json!({"check": "gs", "price_units": "doubled", "pass": pass, "players": players}),
        pass,
    ))
}

fn check_matroid(instance: &Instance, p: &PriceVector) -> Result<(Value, bool)> {
    instance.check_price(p)?;
    let reports = demand::instance_demand(instance, p);
    let players: Vec<Value> = reports
        .iter()
        .map(|r| {
            let result = structure::check_matroid_bases(&r.minimal_demand);
            json!({
                "player": r.player,
                "minimal_demand": r.minimal_demand.iter().map(|&b| wj::bundle_to_json(instance, b)).collect::<Vec<_>>(),
                "matroid": result.is_ok(),
                "violation": result.err().map(|v| format!("{v:?}")),
            })
        })
        .collect();
    let pass = players.iter().all(|p| p["matroid"] == json!(true));
    Ok((
        json!({"check": "matroid", "price": wj::price_to_json(instance, p), "pass": pass, "players": players}),
        pass,
    ))
}

/// Every `S` and `j` at `p`; submodularity against `p` moved up on `S` and
/// down elsewhere.
fn check_lemmas(instance: &Instance, p: &PriceVector) -> Result<(Value, bool)> {
    instance.check_price(p)?;
    let m = instance.item_count();
    let mut tuples = 0u64;
    let mut violations = Vec::new();
    for s in Bundle::all(m) {
        let q = PriceVector::new(
            (0..m)
                .map(|j| if s.contains(j) { p.get(j) + 1 } else { p.get(j).saturating_sub(1) })
                .collect(),
        );
        for j in 0..m {
            tuples += 1;
            for v in structure::check_lemma_tuple(instance, p, s, j, &q)? {
                violations.push(json!({
                    "s": wj::bundle_to_json(instance, s),
                    "j": instance.label(j),
                    "violation": format!("{v:?}"),
                }));
            }
        }
    }
    let pass = violations.is_empty();
    Ok((
        json!({
            "check": "lemmas",
            "price": wj::price_to_json(instance, p),
            "tuples": tuples,
            "pass": pass,
            "violations": violations,
        }),
        pass,
    ))
}

pub fn demo(ctx: &Context, name: &str) -> Result<Outcome> {
    let (report, reproduced) = match name {
        "ggs2-not-gs" => demo_ggs2_not_gs(ctx)?,
        "no-obstacle-no-allocation" => demo_no_obstacle(ctx)?,
        other => {
            eprintln!("unknown demo `{other}`; available: ggs2-not-gs, no-obstacle-no-allocation");
            return Ok(Outcome::InputError);
        }
    };
    emit(ctx, &report)?;
    if !reproduced {
        eprintln!("reproduction failed");
    }
    Ok(if reproduced { Outcome::Ok } else { Outcome::InputError })
}

fn demo_ggs2_not_gs(ctx: &Context) -> Result<(Value, bool)> {
    let v = demos::ggs2_not_gs_valuation();
    let instance = Instance::with_default_labels(vec![v.clone()])?;
    let (p, q) = demos::ggs2_not_gs_prices();
    let (p, q) = (PriceVector::new(p), PriceVector::new(q));
    let witness = structure::gs_violation_at(&v, &p, &q);
    let expected_s = instance.bundle_of(&["a", "b"])?;
    let b = instance.index_of("b")?;
    let matches = witness
        .as_ref()
        .is_some_and(|w| w.s == expected_s && w.violated_item == Some(b));
    let grid = structure::check_gs_on_grid(&v, None, ctx.budget)?;
    let membership = structure::is_ggs_member(&v, 2, 4, ctx.budget)?;
    let member = matches!(membership, GgsMembership::Member { .. });
    let demand_q = demand::demand_sets(&v, &q);
    Ok((
        json!({
            "demo": "ggs2-not-gs",
            "valuation": wj::instance_to_json(&instance)["players"][0],
            "expected": {
                "p": {"a": 0, "b": 1, "c": 2},
                "q": {"a": 2, "b": 1, "c": 2},
                "s": ["a", "b"],
                "demand_at_q_excludes": "b",
            },
            "observed": {
                "witness": witness.as_ref().map(|w| wj::witness_to_json(&instance, w)),
                "demand_at_q": demand_q.demand.iter().map(|&d| wj::bundle_to_json(&instance, d)).collect::<Vec<_>>(),
                "grid_witness_doubled_units": grid.as_ref().map(|w| wj::witness_to_json(&instance, w)),
                "is_ggs_2_4": member,
            },
            "reproduced": matches && grid.is_some() && member,
        }),
        matches && grid.is_some() && member,
    ))
}

fn demo_no_obstacle(ctx: &Context) -> Result<(Value, bool)> {
    let instance = demos::five_player_instance();
    let p = instance.zero_price();
    let reports = demand::instance_demand(&instance, &p);
    let max_f = Bundle::all(instance.item_count())
        .map(|s| demand::f_from_reports(&reports, s))
        .max()
        .unwrap_or(0);
    let obstacle = demand::obstacle_from_reports(&reports, instance.item_count());
    let allocation = oracle::envy_free_exists(&instance, &p);
    let reproduced = max_f <= 0 && obstacle.o_star.is_empty() && allocation.is_none();
    let auction = ggs2::ggs2_auction(&instance, ctx.budget)?;
    Ok((
        json!({
            "demo": "no-obstacle-no-allocation",
            "instance": wj::instance_to_json(&instance),
            "expected": {"max_f": "<= 0", "o_star": [], "envy_free_allocation": null},
            "observed": {
                "max_f": max_f,
                "o_star": wj::bundle_to_json(&instance, obstacle.o_star),
                "envy_free_allocation": allocation.map(|a| wj::allocation_to_json(&instance, &a)),
                "ggs2_final_price": wj::price_to_json(&instance, &auction.trace.final_price),
                "ggs2_certified": auction.certificate.is_valid(),
            },
            "reproduced": reproduced,
        }),
        reproduced,
    ))
}

pub fn oracle(
    ctx: &Context,
    what: OracleKind,
    path: &Path,
    price: Option<&str>,
    bound: Option<u32>,
) -> Result<Outcome> {
    let instance = load_instance(path)?;
    let report = match what {
        OracleKind::Welfare => wj::welfare_to_json(&instance, &oracle::max_welfare(&instance, ctx.budget)?),
        OracleKind::MinWalrasian => {
            let bound = bound.unwrap_or_else(|| instance.max_value());
            match oracle::minimal_walrasian_price(&instance, bound, ctx.budget)? {
                Some(found) => {
                    if !found.unique() {
                        let all: Vec<Value> =
                            found.minimal.iter().map(|p| wj::price_to_json(&instance, p)).collect();
                        eprintln!("several minimal Walrasian prices: {}", Value::Array(all));
                    }
                    wj::price_to_json(&instance, &found.price)
                }
                None => Value::Null,
            }
        }
        OracleKind::EnvyFree => {
            let p = load_price(&instance, price)?;
            instance.check_price(&p)?;
            match oracle::envy_free_exists(&instance, &p) {
                Some(a) => wj::allocation_to_json(&instance, &a),
                None => Value::Null,
            }
        }
    };
    emit(ctx, &report)?;
    Ok(Outcome::Ok)
}

pub fn inspect(ctx: &Context, path: &Path, price: Option<&str>) -> Result<Outcome> {
    let instance = load_instance(path)?;
    let p = load_price(&instance, price)?;
    instance.check_price(&p)?;
    let reports = demand::instance_demand(&instance, &p);
    let obstacle = demand::obstacle_from_reports(&reports, instance.item_count());
    let minimizer = demand::minimal_minimizer(&instance, &p);
    emit(
        ctx,
        &json!({
            "price": wj::price_to_json(&instance, &p),
            "lyapunov": demand::lyapunov(&instance, &p),
            "demand": reports.iter().map(|r| wj::demand_report_to_json(&instance, r)).collect::<Vec<_>>(),
            "obstacle": wj::obstacle_to_json(&instance, &obstacle),
            "minimal_minimizer": {
                "set": wj::bundle_to_json(&instance, minimizer.set),
                "lyapunov": minimizer.lyapunov,
            },
        }),
    )?;
    Ok(Outcome::Ok)
}
