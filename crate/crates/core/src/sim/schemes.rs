//! Trial loops for each scheme.

use rand::Rng;
use rayon::prelude::*;

use super::align::{align_with_placement, PlacementCheck};
use super::config::{SimConfig, SimScheme};
use super::decode::{aggregate_point, same_point, sub_in_place, Decoder};
use super::design::{design_best_codebook, select_base_lattice, volume_matched_scale, MAX_STEPS, START, STEP};
use super::stats::{Counts, ErrorStats, TrialOutcome};
use crate::channel::{class_h1_membership, transmit, ChannelMatrix3, Noise, DEFAULT_MAX_DEN, DEFAULT_TOL};
use crate::error::{Error, Result};
use crate::lattice::{build_codebook, target_size, Codebook, Lattice};
use crate::rates::{
    layered_allocation_symmetric, stage_constraints_strong, stage_constraints_weak, very_strong_conditions,
    ConditionSet, DecodeOrder,
};
use crate::rng::{derive_seed, stream};

const TAG_DESIGN: u64 = 1;
const TAG_SHIFT: u64 = 2;
const TAG_MSG: u64 = 3;
const TAG_NOISE: u64 = 4;

fn others(r: usize) -> (usize, usize) {
    match r {
        0 => (1, 2),
        1 => (0, 2),
        _ => (0, 1),
    }
}

fn noise(cfg: &SimConfig, trial: u64) -> Noise {
    Noise {
        seed: derive_seed(&[cfg.master_seed, TAG_NOISE]),
        block: trial,
        variance: cfg.sigma2,
    }
}

fn layer_codebook(cfg: &SimConfig, layer: usize, power: f64, rate: f64) -> Result<Codebook> {
    design_best_codebook(
        cfg.n,
        cfg.code_p,
        cfg.code_k(),
        cfg.search_budget,
        power,
        rate,
        cfg.shift_trials,
        derive_seed(&[cfg.master_seed, TAG_DESIGN, layer as u64]),
    )
}

fn run_trials<F>(trials: u64, stages: usize, f: F) -> Result<ErrorStats>
where
    F: Fn(u64) -> Result<TrialOutcome> + Sync,
{
    let counts = (0..trials)
        .into_par_iter()
        .map(|t| f(t).map(TrialOutcome::into_counts))
        .try_reduce(|| Counts::zero(stages), |a, b| Ok(a.merge(b)))?;
    Ok(counts.finish())
}

/// Decodes one stage and updates the residual. With the genie the true
/// point is always removed.
fn stage(dec: &Decoder, truth: &[f64], residual: &mut [f64], genie: bool, failed: &mut bool) -> Result<()> {
    let got = dec.decode(residual)?;
    let ok = got.as_ref().is_some_and(|g| same_point(g, truth));
    if !ok {
        *failed = true;
    }
    if ok || genie {
        sub_in_place(residual, truth);
    } else if let Some(g) = got {
        sub_in_place(residual, &g);
    }
    Ok(())
}

fn on_lattice(lattice: &Lattice, point: &[f64], offset: &[f64]) -> Result<bool> {
    let z: Vec<f64> = point.iter().zip(offset).map(|(a, b)| a - b).collect();
    let scale = z.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    lattice.is_lattice_point(&z, 1e-9 * scale)
}

/// Single user, `y = x + z`.
pub(crate) fn point_to_point(cfg: &SimConfig) -> Result<ErrorStats> {
    let power = cfg.power.ok_or_else(|| Error::invalid("power", "required"))?;
    let cb = layer_codebook(cfg, 0, power, cfg.rates[0])?;
    let dec = Decoder::message(&cb, cfg.decoder);
    run_trials(cfg.trials, 1, |t| {
        let mut rng = stream(&[cfg.master_seed, TAG_MSG, t]);
        let x = &cb.words()[rng.random_range(0..cb.len())];
        let mut y = noise(cfg, t).sample(0, cfg.n);
        for (a, b) in y.iter_mut().zip(x) {
            *a += b;
        }
        let mut out = TrialOutcome::new(1);
        stage(&dec, x, &mut y, cfg.genie, &mut out.message[0])?;
        Ok(out)
    })
}

struct SymLayer {
    codebook: Codebook,
    message: Decoder,
    aggregate: Decoder,
    agg_lattice: Lattice,
    agg_offset: Vec<f64>,
}

/// Layered superposition on the symmetric channel; all users share each
/// layer's codebook.
fn layered(cfg: &SimConfig, a: f64, powers: &[f64], order: DecodeOrder) -> Result<ErrorStats> {
    let mut layers = Vec::with_capacity(powers.len());
    for (i, (&p, &r)) in powers.iter().zip(&cfg.rates).enumerate() {
        let codebook = layer_codebook(cfg, i, p, r)?;
        let message = Decoder::message(&codebook, cfg.decoder);
        let aggregate = Decoder::aggregate(&codebook, a, &codebook, a, cfg.decoder)?;
        let agg_lattice = codebook.lattice().scale(a)?;
        let agg_offset = aggregate_point(a, codebook.shift(), a, codebook.shift());
        layers.push(SymLayer {
            codebook,
            message,
            aggregate,
            agg_lattice,
            agg_offset,
        });
    }
    let channel = ChannelMatrix3::symmetric(a);
    let stages = layers.len();
    run_trials(cfg.trials, stages, |t| {
        let mut rng = stream(&[cfg.master_seed, TAG_MSG, t]);
        let idx: Vec<[usize; 3]> = layers
            .iter()
            .map(|l| std::array::from_fn(|_| rng.random_range(0..l.codebook.len())))
            .collect();
        let x: [Vec<f64>; 3] = std::array::from_fn(|j| {
            let mut xj = vec![0.0; cfg.n];
            for (l, ix) in layers.iter().zip(&idx) {
                for (acc, v) in xj.iter_mut().zip(&l.codebook.words()[ix[j]]) {
                    *acc += v;
                }
            }
            xj
        });
        let y = transmit(&channel, [&x[0], &x[1], &x[2]], &noise(cfg, t))?;
        let mut out = TrialOutcome::new(stages);
        for (r, yr) in y.into_iter().enumerate() {
            let (o1, o2) = others(r);
            let mut res = yr;
            for (i, l) in layers.iter().enumerate() {
                let words = l.codebook.words();
                let own = &words[idx[i][r]];
                let agg = aggregate_point(a, &words[idx[i][o1]], a, &words[idx[i][o2]]);
                if !on_lattice(&l.agg_lattice, &agg, &l.agg_offset)? {
                    out.violations += 1;
                }
                match order {
                    DecodeOrder::InterferenceFirst => {
                        stage(&l.aggregate, &agg, &mut res, cfg.genie, &mut out.interference[i])?;
                        stage(&l.message, own, &mut res, cfg.genie, &mut out.message[i])?;
                    }
                    DecodeOrder::MessageFirst => {
                        stage(&l.message, own, &mut res, cfg.genie, &mut out.message[i])?;
                        stage(&l.aggregate, &agg, &mut res, cfg.genie, &mut out.interference[i])?;
                    }
                }
            }
        }
        Ok(out)
    })
}

pub(crate) fn very_strong_symmetric(cfg: &SimConfig) -> Result<ErrorStats> {
    let power = cfg.power.ok_or_else(|| Error::invalid("power", "required"))?;
    let a = cfg.a.ok_or_else(|| Error::invalid("a", "required"))?;
    layered(cfg, a, &[power], DecodeOrder::InterferenceFirst)
}

/// Checks the layer rates against the stage ceilings and returns the
/// per-layer powers and decode order.
pub(crate) fn layered_plan(cfg: &SimConfig) -> Result<(Vec<f64>, DecodeOrder)> {
    let a = cfg.a.ok_or_else(|| Error::invalid("a", "required"))?;
    let a2 = a * a;
    let alloc = layered_allocation_symmetric(a2, cfg.layers)?;
    let powers = alloc.powers[0].clone();
    let limits = match alloc.decode_order {
        DecodeOrder::InterferenceFirst => stage_constraints_strong(a2, &powers),
        DecodeOrder::MessageFirst => stage_constraints_weak(a2, &powers),
    };
    for (i, (lim, &r)) in limits.iter().zip(&cfg.rates).enumerate() {
        let ceiling = lim.binding() - cfg.margin;
        if r > ceiling + 1e-12 {
            return Err(Error::Precondition(format!(
                "layer {} rate {r} exceeds its ceiling {} less margin {}",
                i + 1,
                lim.binding(),
                cfg.margin
            )));
        }
    }
    Ok((powers, alloc.decode_order))
}

pub(crate) fn layered_symmetric(cfg: &SimConfig) -> Result<ErrorStats> {
    let a = cfg.a.ok_or_else(|| Error::invalid("a", "required"))?;
    let (powers, order) = layered_plan(cfg)?;
    layered(cfg, a, &powers, order)
}

/// Channel, first satisfied condition set, and its lattice placement.
pub(crate) fn general_setup(cfg: &SimConfig) -> Result<(ChannelMatrix3, ConditionSet)> {
    let h = cfg.h.ok_or_else(|| Error::invalid("h", "required"))?;
    let powers = cfg.powers.ok_or_else(|| Error::invalid("powers", "required"))?;
    let mut ch = ChannelMatrix3::new(h, DEFAULT_TOL, DEFAULT_MAX_DEN)?;
    if cfg.witness.is_some() {
        ch.witness = cfg.witness;
    }
    if ch.witness.is_none() {
        ch.witness = class_h1_membership(&h, DEFAULT_TOL, DEFAULT_MAX_DEN)?;
    }
    let w = ch.witness.ok_or(Error::MissingWitness)?;
    let holds = very_strong_conditions(&ch, powers, [cfg.sigma2; 3], w.p, w.q);
    let idx = holds
        .iter()
        .position(|&b| b)
        .ok_or_else(|| Error::Precondition("no very-strong condition set holds".into()))?;
    Ok((ch, ConditionSet::ALL[idx]))
}

/// Per-user codebooks on aligned scalings of one base lattice.
fn general_codebooks(cfg: &SimConfig, base: &Lattice, check: &PlacementCheck, powers: [f64; 3]) -> Result<[Codebook; 3]> {
    let m: [usize; 3] = std::array::from_fn(|j| target_size(cfg.n, cfg.rates[j]));
    let mut g = START
        * (0..3)
            .map(|j| volume_matched_scale(base, powers[j], m[j]) / check.scales[j].abs())
            .fold(f64::INFINITY, f64::min);
    let mut last = Error::CodebookTooSmall { found: 0, target: m[0] };
    'attempt: for attempt in 0..MAX_STEPS {
        let mut books = Vec::with_capacity(3);
        for j in 0..3 {
            let lat = base.scale(g * check.scales[j])?;
            let seed = derive_seed(&[cfg.master_seed, TAG_SHIFT, j as u64, attempt as u64]);
            match build_codebook(&lat, powers[j], cfg.rates[j], cfg.shift_trials, seed) {
                Ok(cb) => books.push(cb.truncated(m[j])?),
                Err(e @ Error::CodebookTooSmall { .. }) => {
                    last = e;
                    g *= STEP;
                    continue 'attempt;
                }
                Err(e) => return Err(e),
            }
        }
        let [a, b, c]: [Codebook; 3] = books.try_into().expect("three codebooks");
        return Ok([a, b, c]);
    }
    Err(last)
}

pub(crate) fn very_strong_general(cfg: &SimConfig) -> Result<ErrorStats> {
    let powers = cfg.powers.ok_or_else(|| Error::invalid("powers", "required"))?;
    let (ch, set) = general_setup(cfg)?;
    let base = select_base_lattice(
        cfg.n,
        cfg.code_p,
        cfg.code_k(),
        cfg.search_budget,
        derive_seed(&[cfg.master_seed, TAG_DESIGN, 0]),
    )?;
    let aligned = align_with_placement(&ch, &base, set)?;
    let books = general_codebooks(cfg, &base, &aligned.check, powers)?;
    let h = ch.h;

    struct Rx {
        message: Decoder,
        aggregate: Decoder,
        lattice: Lattice,
        offset: Vec<f64>,
    }
    let rx: Vec<Rx> = (0..3)
        .map(|r| {
            let (o1, o2) = others(r);
            let (g1, g2) = (h[r][o1], h[r][o2]);
            let l1 = books[o1].lattice().scale(g1)?;
            let l2 = books[o2].lattice().scale(g2)?;
            Ok(Rx {
                message: Decoder::message(&books[r], cfg.decoder),
                aggregate: Decoder::aggregate(&books[o1], g1, &books[o2], g2, cfg.decoder)?,
                lattice: if l1.gamma() <= l2.gamma() { l1 } else { l2 },
                offset: aggregate_point(g1, books[o1].shift(), g2, books[o2].shift()),
            })
        })
        .collect::<Result<_>>()?;

    run_trials(cfg.trials, 1, |t| {
        let mut rng = stream(&[cfg.master_seed, TAG_MSG, t]);
        let idx: [usize; 3] = std::array::from_fn(|j| rng.random_range(0..books[j].len()));
        let x: [&[f64]; 3] = std::array::from_fn(|j| books[j].words()[idx[j]].as_slice());
        let y = transmit(&ch, x, &noise(cfg, t))?;
        let mut out = TrialOutcome::new(1);
        for (r, yr) in y.into_iter().enumerate() {
            let (o1, o2) = others(r);
            let agg = aggregate_point(h[r][o1], x[o1], h[r][o2], x[o2]);
            if !on_lattice(&rx[r].lattice, &agg, &rx[r].offset)? {
                out.violations += 1;
            }
            let mut res = yr;
            stage(&rx[r].aggregate, &agg, &mut res, cfg.genie, &mut out.interference[0])?;
            stage(&rx[r].message, x[r], &mut res, cfg.genie, &mut out.message[0])?;
        }
        Ok(out)
    })
}

/// Runs the configured scheme.
pub(crate) fn dispatch(cfg: &SimConfig) -> Result<ErrorStats> {
    cfg.validate()?;
    match cfg.scheme {
        SimScheme::P2p => point_to_point(cfg),
        SimScheme::VeryStrongSym => very_strong_symmetric(cfg),
        SimScheme::LayeredSym => layered_symmetric(cfg),
        SimScheme::VeryStrongGeneral => very_strong_general(cfg),
    }
}
