//! Superlayer partitioning and two-layer pipelining analysis.
//!
//! In the pipelined (2x) schedule the global pass of layer `u + 1` runs
//! concurrently with the local pass of layer `u` inside a superlayer of
//! `|L|` consecutive layers. With both passes walking their layer's slots
//! in table order, the local pass of layer `u` writes slot `w` at the same
//! instant the global pass of layer `u + 1` reads slot `w`. A block column
//! shared by the two layers is therefore safe only when it sits at a
//! strictly later slot in layer `u + 1`. [`rearrange`] permutes the slots of
//! every layer to satisfy this wherever it can; the leftovers are reported
//! as hazards.

use std::collections::HashMap;
use std::fmt;

use num_rational::Ratio;

use crate::compact::{Block, CompactCode};
use crate::error::{Error, Result};

/// Search budget per layer.
pub const NODE_LIMIT: usize = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PipelineMode {
    /// Global then local pass per layer, no overlap.
    Serial1x,
    /// Local pass of layer `u` overlaps the global pass of layer `u + 1`.
    Pipelined2x,
}

impl fmt::Display for PipelineMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PipelineMode::Serial1x => "1x",
            PipelineMode::Pipelined2x => "2x",
        })
    }
}

/// A shared block column whose write in `layer` does not strictly precede
/// its read in `next_layer`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Hazard {
    pub layer: usize,
    pub slot: usize,
    pub next_layer: usize,
    pub next_slot: usize,
    pub block_col: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PipelinePlan {
    superlayer_size: usize,
    mode: PipelineMode,
    /// `orders[u][w]` is the original slot placed at slot `w` of layer `u`.
    orders: Vec<Vec<usize>>,
    code: CompactCode,
    hazards: Vec<Hazard>,
}

impl PipelinePlan {
    /// Non-pipelined plan keeping the original slot order.
    pub fn serial(code: &CompactCode) -> Self {
        PipelinePlan {
            superlayer_size: 1,
            mode: PipelineMode::Serial1x,
            orders: identity_orders(code),
            code: code.clone(),
            hazards: Vec::new(),
        }
    }

    pub fn superlayer_size(&self) -> usize {
        self.superlayer_size
    }

    pub fn mode(&self) -> PipelineMode {
        self.mode
    }

    pub fn orders(&self) -> &[Vec<usize>] {
        &self.orders
    }

    /// The rearranged code (`β_I′`, `β_S′`).
    pub fn code(&self) -> &CompactCode {
        &self.code
    }

    pub fn hazards(&self) -> &[Hazard] {
        &self.hazards
    }

    /// Slots per decoding iteration.
    pub fn slot_count(&self) -> usize {
        slot_count(
            self.code.layers(),
            self.code.width(),
            self.mode,
            self.superlayer_size,
        )
    }

    /// Pipelining efficiency of this plan's mode.
    pub fn efficiency(&self) -> Ratio<usize> {
        match self.mode {
            PipelineMode::Serial1x => Ratio::new(1, 2),
            PipelineMode::Pipelined2x => pipelining_efficiency(self.superlayer_size),
        }
    }

    /// Every pass of one iteration, in issue order.
    pub fn timeline(&self) -> Vec<SlotEvent> {
        let (layers, width) = (self.code.layers(), self.code.width());
        let mut events = Vec::with_capacity(2 * layers * width);
        let mut start = 0;
        match self.mode {
            PipelineMode::Serial1x => {
                for u in 0..layers {
                    for w in 0..width {
                        events.push(SlotEvent {
                            time: start + w,
                            unit: Unit::Global,
                            layer: u,
                            slot: w,
                        });
                        events.push(SlotEvent {
                            time: start + width + w,
                            unit: Unit::Local,
                            layer: u,
                            slot: w,
                        });
                    }
                    start += 2 * width;
                }
            }
            PipelineMode::Pipelined2x => {
                let size = self.superlayer_size;
                for first in (0..layers).step_by(size) {
                    for i in 0..size {
                        for w in 0..width {
                            let g = start + i * width + w;
                            events.push(SlotEvent {
                                time: g,
                                unit: Unit::Global,
                                layer: first + i,
                                slot: w,
                            });
                            events.push(SlotEvent {
                                time: g + width,
                                unit: Unit::Local,
                                layer: first + i,
                                slot: w,
                            });
                        }
                    }
                    start += (size + 1) * width;
                }
            }
        }
        events.sort_by_key(|e| (e.time, e.unit as u8));
        events
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Unit {
    /// First/second-minimum accumulation; reads APP values.
    Global,
    /// Message emission; writes APP values.
    Local,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SlotEvent {
    pub time: usize,
    pub unit: Unit,
    pub layer: usize,
    pub slot: usize,
}

fn identity_orders(code: &CompactCode) -> Vec<Vec<usize>> {
    (0..code.layers())
        .map(|_| (0..code.width()).collect())
        .collect()
}

/// `η_p = |L| / (|L| + 1)` for two-layer pipelining.
pub fn pipelining_efficiency(superlayer_size: usize) -> Ratio<usize> {
    Ratio::new(superlayer_size, superlayer_size + 1)
}

/// Slots per iteration: `2·I·J` serially, `(I/|L|)·(|L|+1)·J` pipelined.
pub fn slot_count(
    layers: usize,
    width: usize,
    mode: PipelineMode,
    superlayer_size: usize,
) -> usize {
    match mode {
        PipelineMode::Serial1x => 2 * layers * width,
        PipelineMode::Pipelined2x => layers / superlayer_size * (superlayer_size + 1) * width,
    }
}

/// Shared block columns between consecutive layers of each superlayer that
/// violate the stagger condition.
pub fn find_hazards(code: &CompactCode, superlayer_size: usize) -> Vec<Hazard> {
    let mut hazards = Vec::new();
    for u in 0..code.layers().saturating_sub(1) {
        if (u + 1) % superlayer_size == 0 {
            continue;
        }
        let next = positions(code.layer(u + 1));
        for (w, block) in code.layer(u).iter().enumerate() {
            let Some(block) = block else { continue };
            if let Some(&w2) = next.get(&block.col) {
                if w2 <= w {
                    hazards.push(Hazard {
                        layer: u,
                        slot: w,
                        next_layer: u + 1,
                        next_slot: w2,
                        block_col: block.col,
                    });
                }
            }
        }
    }
    hazards
}

fn positions(layer: &[Option<Block>]) -> HashMap<usize, usize> {
    layer
        .iter()
        .enumerate()
        .filter_map(|(w, b)| b.map(|b| (b.col, w)))
        .collect()
}

/// Permutes the slots of every layer for two-layer pipelining with the given
/// superlayer size, minimizing hazards.
///
/// Layers are arranged one at a time. Each slot gets a release (one past the
/// position of the same block column in the previous layer of the
/// superlayer) and a deadline (late enough that the column's run through the
/// following layers still fits). A depth-first search fills slots left to
/// right, trying earliest-deadline candidates first, and keeps the
/// assignment with the fewest release violations, then the fewest missed
/// deadlines; ties keep the first assignment found, which favours the
/// original order.
pub fn rearrange(code: &CompactCode, superlayer_size: usize) -> Result<PipelinePlan> {
    let layers = code.layers();
    if superlayer_size == 0 || !layers.is_multiple_of(superlayer_size) {
        return Err(Error::SuperlayerSize {
            size: superlayer_size,
            layers,
        });
    }
    let width = code.width();
    let mut orders: Vec<Vec<usize>> = Vec::with_capacity(layers);
    for u in 0..layers {
        let first_in_superlayer = u % superlayer_size == 0;
        let last = u - u % superlayer_size + superlayer_size - 1;
        let prev: HashMap<usize, usize> = if first_in_superlayer {
            HashMap::new()
        } else {
            let placed = code.permuted_layer(u - 1, &orders[u - 1]);
            positions(&placed)
        };
        let items: Vec<Item> = code
            .layer(u)
            .iter()
            .map(|slot| match slot {
                None => Item {
                    release: 0,
                    deadline: width - 1,
                },
                Some(b) => {
                    let release = prev.get(&b.col).map_or(0, |&w| w + 1);
                    let run = (u + 1..=last)
                        .take_while(|&v| code.valid_blocks(v).any(|o| o.col == b.col))
                        .count();
                    Item {
                        release,
                        deadline: (width - 1).saturating_sub(run),
                    }
                }
            })
            .collect();
        orders.push(arrange_layer(&items, NODE_LIMIT));
    }
    let rearranged = code.permuted(&orders)?;
    let hazards = find_hazards(&rearranged, superlayer_size);
    Ok(PipelinePlan {
        superlayer_size,
        mode: PipelineMode::Pipelined2x,
        orders,
        code: rearranged,
        hazards,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
struct Item {
    release: usize,
    deadline: usize,
}

impl Item {
    fn cost_at(self, pos: usize) -> (usize, usize) {
        (
            (pos < self.release) as usize,
            (pos > self.deadline) as usize,
        )
    }
}

struct Search<'a> {
    items: &'a [Item],
    used: Vec<bool>,
    current: Vec<usize>,
    best: Option<((usize, usize), Vec<usize>)>,
    nodes: usize,
    limit: usize,
}

impl Search<'_> {
    fn run(&mut self, cost: (usize, usize)) {
        self.nodes += 1;
        let pos = self.current.len();
        if pos == self.items.len() {
            if self.best.as_ref().is_none_or(|(c, _)| cost < *c) {
                self.best = Some((cost, self.current.clone()));
            }
            return;
        }
        if let Some((best, _)) = &self.best {
            if self.lower_bound(cost, pos) >= *best {
                return;
            }
        }
        // Interchangeable items (same release and deadline) are only tried
        // once, lowest original index first.
        let mut candidates: Vec<usize> = Vec::new();
        for (k, item) in self.items.iter().enumerate() {
            if !self.used[k] && !candidates.iter().any(|&c| self.items[c] == *item) {
                candidates.push(k);
            }
        }
        candidates.sort_by_key(|&k| {
            let it = self.items[k];
            (it.cost_at(pos), it.deadline, k)
        });
        for k in candidates {
            if self.nodes >= self.limit && self.best.is_some() {
                return;
            }
            let (h, m) = self.items[k].cost_at(pos);
            self.used[k] = true;
            self.current.push(k);
            self.run((cost.0 + h, cost.1 + m));
            self.current.pop();
            self.used[k] = false;
        }
    }

    fn lower_bound(&self, cost: (usize, usize), pos: usize) -> (usize, usize) {
        let last = self.items.len() - 1;
        let (mut h, mut m) = cost;
        for (k, it) in self.items.iter().enumerate() {
            if !self.used[k] {
                h += (it.release > last) as usize;
                m += (it.deadline < pos) as usize;
            }
        }
        (h, m)
    }
}

fn arrange_layer(items: &[Item], limit: usize) -> Vec<usize> {
    let mut search = Search {
        items,
        used: vec![false; items.len()],
        current: Vec::with_capacity(items.len()),
        best: None,
        nodes: 0,
        limit,
    };
    search.run((0, 0));
    search.best.map(|(_, order)| order).unwrap_or_default()
}

/// Even divisors of `layers`, excluding `layers` itself.
pub fn superlayer_candidates(layers: usize) -> Vec<usize> {
    (2..layers)
        .step_by(2)
        .filter(|&d| layers.is_multiple_of(d))
        .collect()
}

/// Chooses the superlayer size `l*` maximizing `η_p` over the candidates
/// and returns its plan.
pub fn select_superlayer_size(code: &CompactCode) -> Result<PipelinePlan> {
    let layers = code.layers();
    let candidates = superlayer_candidates(layers);
    if !layers.is_multiple_of(2) || candidates.is_empty() {
        return Err(Error::NoSuperlayer { layers });
    }
    #[cfg(feature = "parallel")]
    let plans: Vec<PipelinePlan> = {
        use rayon::prelude::*;
        candidates
            .par_iter()
            .map(|&size| rearrange(code, size))
            .collect::<Result<_>>()?
    };
    #[cfg(not(feature = "parallel"))]
    let plans: Vec<PipelinePlan> = candidates
        .iter()
        .map(|&size| rearrange(code, size))
        .collect::<Result<_>>()?;
    Ok(plans
        .into_iter()
        .max_by_key(|p| pipelining_efficiency(p.superlayer_size))
        .expect("non-empty candidates"))
}

/// Decoder throughput model `T = F_c · n / (N_i · N_c)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThroughputModel {
    pub clock_hz: f64,
    pub iterations: usize,
    pub slots_per_iteration: usize,
    pub cycles_per_slot: usize,
    pub code_length: usize,
}

impl ThroughputModel {
    pub fn new(
        clock_hz: f64,
        iterations: usize,
        slots_per_iteration: usize,
        code_length: usize,
    ) -> Self {
        ThroughputModel {
            clock_hz,
            iterations,
            slots_per_iteration,
            cycles_per_slot: 1,
            code_length,
        }
    }

    /// `N_c`.
    pub fn cycles_per_iteration(&self) -> usize {
        self.slots_per_iteration * self.cycles_per_slot
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.clock_hz > 0.0 && self.clock_hz.is_finite())
            || self.iterations == 0
            || self.cycles_per_iteration() == 0
            || self.code_length == 0
        {
            return Err(Error::InvalidConfig(
                "throughput model fields must be positive".into(),
            ));
        }
        Ok(())
    }

    /// Throughput in bits per second.
    pub fn throughput(&self) -> Result<f64> {
        self.validate()?;
        Ok(self.clock_hz * self.code_length as f64
            / (self.iterations as f64 * self.cycles_per_iteration() as f64))
    }
}

impl CompactCode {
    fn permuted_layer(&self, u: usize, order: &[usize]) -> Vec<Option<Block>> {
        let layer = self.layer(u);
        order.iter().map(|&w| layer[w]).collect()
    }
}
