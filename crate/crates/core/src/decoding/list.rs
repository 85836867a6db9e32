//! List decoding engine shared by SCL, SSCL, Fast-SSCL and partitioned SCL.
//!
//! Paths do not own their memories. Every stage keeps a small pool of LLR
//! and partial-sum arrays with reference counts, and a path holds one array
//! id per stage. Splitting a path only bumps reference counts. Since every
//! write replaces a whole array, a path that wants to write a shared array
//! just takes a fresh one; nothing is ever copied. The result is
//! observationally identical to giving each path private memories.

use std::fmt;

use super::arith::{Arithmetic, Float};
use super::kernels::{hard_decision, penalty};
use crate::polar::{polar_transform, CrcSpec, PolarCode};
use crate::{Error, Result};

/// What the engine does when it reaches a node of the decoding tree.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodeOp {
    /// Compute child LLRs and recurse.
    Descend,
    /// A single bit (stage 0 only).
    Leaf,
    /// All leaves frozen: one metric update, no split.
    Rate0,
    /// Only the last leaf is an information bit: one split on the node.
    Rep,
    /// No frozen leaves: split on every codeword bit of the node.
    Rate1,
    /// No frozen leaves: split only on the `L - 1` least reliable bits of
    /// each path and hard-decide the rest.
    Rate1Fast,
}

/// The information positions and CRC attached to one partition.
#[derive(Debug, Clone, PartialEq)]
pub struct PartitionCheck {
    /// Information positions relative to the partition start, ascending.
    pub info: Vec<usize>,
    pub crc: Option<CrcSpec>,
}

/// Node operations for every node of a `2^n` tree, plus an optional
/// partition stage at whose nodes the list collapses to one survivor.
#[derive(Debug, Clone, PartialEq)]
pub struct DecodingTree {
    stages: u32,
    ops: Vec<Vec<NodeOp>>,
    partition_stage: Option<u32>,
    partitions: Vec<PartitionCheck>,
}

impl DecodingTree {
    /// Leaf-by-leaf traversal of the whole tree.
    pub fn full(stages: u32) -> Self {
        let ops = (0..=stages)
            .map(|s| {
                let op = if s == 0 { NodeOp::Leaf } else { NodeOp::Descend };
                vec![op; 1 << (stages - s)]
            })
            .collect();
        DecodingTree {
            stages,
            ops,
            partition_stage: None,
            partitions: Vec::new(),
        }
    }

    pub fn stages(&self) -> u32 {
        self.stages
    }

    pub fn op(&self, stage: u32, offset: usize) -> NodeOp {
        self.ops[stage as usize][offset >> stage]
    }

    pub fn set_op(&mut self, stage: u32, offset: usize, op: NodeOp) {
        debug_assert!(stage > 0 || op == NodeOp::Leaf);
        self.ops[stage as usize][offset >> stage] = op;
    }

    /// Marks every node at `stage` as a partition root, left to right.
    pub fn with_partitions(mut self, stage: u32, checks: Vec<PartitionCheck>) -> Result<Self> {
        if stage > self.stages || checks.len() != 1 << (self.stages - stage) {
            return Err(Error::Partition(format!(
                "{} checks do not match stage {stage} of a {}-stage tree",
                checks.len(),
                self.stages
            )));
        }
        self.partition_stage = Some(stage);
        self.partitions = checks;
        Ok(self)
    }

    pub fn partition_stage(&self) -> Option<u32> {
        self.partition_stage
    }
}

/// A child of a path split: the metric it would carry, the rank of its
/// parent in the current list and the value chosen for the split bit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Candidate {
    pub pm: f64,
    pub parent: usize,
    pub choice: u8,
}

/// Keeps the `list_size` best candidates, ordered by metric, then parent
/// rank, then bit value.
pub fn prune_candidates(cands: &mut Vec<Candidate>, list_size: usize) {
    let before = |a: &Candidate, b: &Candidate| {
        a.pm < b.pm || (a.pm == b.pm && (a.parent, a.choice) < (b.parent, b.choice))
    };
    // at most 2L entries, usually already in (parent, choice) order
    for i in 1..cands.len() {
        let c = cands[i];
        let mut j = i;
        while j > 0 && before(&c, &cands[j - 1]) {
            cands[j] = cands[j - 1];
            j -= 1;
        }
        cands[j] = c;
    }
    cands.truncate(list_size);
}

/// One leaf step over a list whose paths carry metrics `pms` and leaf LLRs
/// `alphas`. A frozen leaf extends every path with 0 in list order; an
/// information leaf forks each path and prunes back to `list_size`.
pub fn split_and_prune<A: Arithmetic>(
    arith: &A,
    pms: &[f64],
    alphas: &[f64],
    is_frozen: bool,
    list_size: usize,
    out: &mut Vec<Candidate>,
) {
    out.clear();
    for (parent, (&pm, &alpha)) in pms.iter().zip(alphas).enumerate() {
        if is_frozen {
            out.push(Candidate {
                pm: arith.pm_add(pm, penalty(alpha, 0)),
                parent,
                choice: 0,
            });
        } else {
            for choice in 0..2 {
                out.push(Candidate {
                    pm: arith.pm_add(pm, penalty(alpha, choice)),
                    parent,
                    choice,
                });
            }
        }
    }
    if !is_frozen {
        prune_candidates(out, list_size);
    }
}

/// Picks the lowest-metric path among those passing the CRC, or among all
/// paths when none passes. Ties go to the lower list rank. Returns the rank
/// and whether the chosen path passed.
pub fn select_final(pms: &[f64], passes: &[bool]) -> (usize, bool) {
    let best = |filter: &dyn Fn(usize) -> bool| {
        (0..pms.len())
            .filter(|&r| filter(r))
            .min_by(|&a, &b| pms[a].total_cmp(&pms[b]).then(a.cmp(&b)))
    };
    match best(&|r| passes[r]) {
        Some(r) => (r, true),
        None => (best(&|_| true).expect("empty list"), false),
    }
}

/// One line of the optional leaf-step trace.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceStep {
    pub index: usize,
    pub frozen: bool,
    /// `(pm, decided bit)` of every path after the step, in list order.
    pub paths: Vec<(f64, u8)>,
}

impl fmt::Display for TraceStep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.index, if self.frozen { 'F' } else { 'I' })?;
        for (pm, bit) in &self.paths {
            write!(f, " {pm}:{bit}")?;
        }
        Ok(())
    }
}

/// Result of decoding one frame.
#[derive(Debug, Clone, PartialEq)]
pub struct DecodeOutput {
    pub payload: Vec<u8>,
    pub u_hat: Vec<u8>,
    pub pm: f64,
    pub crc_ok: bool,
}

#[derive(Debug, Clone)]
struct Pool<T> {
    width: usize,
    data: Vec<T>,
    refs: Vec<u32>,
    free: Vec<u32>,
}

impl<T: Copy + Default> Pool<T> {
    fn new(width: usize, slots: usize) -> Self {
        let mut pool = Pool {
            width,
            data: vec![T::default(); width * slots],
            refs: vec![0; slots],
            free: Vec::with_capacity(slots),
        };
        pool.reset();
        pool
    }

    fn reset(&mut self) {
        self.refs.fill(0);
        self.free.clear();
        self.free.extend((0..self.refs.len() as u32).rev());
    }

    fn alloc(&mut self) -> u32 {
        let id = self.free.pop().expect("array pool exhausted");
        self.refs[id as usize] = 1;
        id
    }

    fn retain(&mut self, id: u32) {
        self.refs[id as usize] += 1;
    }

    fn release(&mut self, id: u32) {
        let r = &mut self.refs[id as usize];
        *r -= 1;
        if *r == 0 {
            self.free.push(id);
        }
    }

    /// Makes `id` private to the caller, swapping in a fresh array if it is
    /// shared. The old contents are not carried over.
    fn own(&mut self, id: &mut u32) {
        if self.refs[*id as usize] > 1 {
            self.refs[*id as usize] -= 1;
            *id = self.alloc();
        }
    }

    fn get(&self, id: u32) -> &[T] {
        let start = id as usize * self.width;
        &self.data[start..start + self.width]
    }

    fn get_mut(&mut self, id: u32) -> &mut [T] {
        let start = id as usize * self.width;
        &mut self.data[start..start + self.width]
    }
}

/// Reusable list decoder. Construct once per code and configuration, then
/// call [`ListDecoder::decode`] per frame.
#[derive(Debug, Clone)]
pub struct ListDecoder<A: Arithmetic = Float> {
    n: usize,
    list_size: usize,
    frozen: Vec<bool>,
    info_positions: Vec<usize>,
    payload_positions: Vec<usize>,
    crc: Option<CrcSpec>,
    tree: DecodingTree,
    arith: A,
    channel: Vec<f64>,
    // alpha[s] for s < n; the channel plays stage n
    alpha: Vec<Pool<f64>>,
    // beta[2 s + side], side 0 for a left child or the root, 1 for a right child
    beta: Vec<Pool<u8>>,
    alpha_id: Vec<u32>,
    beta_id: Vec<u32>,
    pm: Vec<f64>,
    free_slots: Vec<usize>,
    order: Vec<usize>,
    prev_order: Vec<usize>,
    // per-slot scratch for node-level splitting
    node_bits: Vec<u8>,
    node_rank: Vec<u32>,
    cands: Vec<Candidate>,
    survivors: Vec<(usize, u8)>,
    scratch_pm: Vec<f64>,
    scratch_alpha: Vec<f64>,
    scratch_flags: Vec<bool>,
    trace: Option<Vec<TraceStep>>,
    partition_ok: Vec<bool>,
}

impl ListDecoder<Float> {
    /// Conventional CRC-aided SCL in exact floating point.
    pub fn scl(code: &PolarCode, list_size: usize) -> Result<Self> {
        Self::new(
            code,
            list_size,
            DecodingTree::full(code.stages()),
            code.info_positions()[..code.payload_len()].to_vec(),
            Float::for_length(code.len()),
        )
    }
}

impl<A: Arithmetic> ListDecoder<A> {
    /// `payload_positions` lists the `u` indices whose bits form the decoded
    /// payload, in order.
    pub fn new(
        code: &PolarCode,
        list_size: usize,
        tree: DecodingTree,
        payload_positions: Vec<usize>,
        arith: A,
    ) -> Result<Self> {
        if list_size == 0 {
            return Err(Error::InvalidArgument("list size must be at least 1".into()));
        }
        if tree.stages() != code.stages() {
            return Err(Error::InvalidArgument(format!(
                "decoding tree has {} stages, code has {}",
                tree.stages(),
                code.stages()
            )));
        }
        let n = code.stages() as usize;
        let len = code.len();
        let alpha = (0..n).map(|s| Pool::new(1 << s, list_size)).collect();
        let beta = (0..=n)
            .flat_map(|s| [Pool::new(1 << s, list_size), Pool::new(1 << s, list_size)])
            .collect();
        Ok(ListDecoder {
            n,
            list_size,
            frozen: code.frozen().to_vec(),
            info_positions: code.info_positions().to_vec(),
            payload_positions,
            crc: code.crc().copied(),
            partition_ok: vec![true; tree.partitions.len()],
            tree,
            arith,
            channel: vec![0.0; len],
            alpha,
            beta,
            alpha_id: vec![0; list_size * n.max(1)],
            beta_id: vec![0; list_size * 2 * (n + 1)],
            pm: vec![0.0; list_size],
            free_slots: Vec::with_capacity(list_size),
            order: Vec::with_capacity(list_size),
            prev_order: Vec::with_capacity(list_size),
            node_bits: vec![0; list_size * len],
            node_rank: vec![0; list_size * len],
            cands: Vec::with_capacity(2 * list_size),
            survivors: Vec::with_capacity(list_size),
            scratch_pm: Vec::with_capacity(list_size),
            scratch_alpha: Vec::with_capacity(list_size),
            scratch_flags: vec![false; 2 * list_size],
            trace: None,
        })
    }

    pub fn list_size(&self) -> usize {
        self.list_size
    }

    pub fn set_trace(&mut self, enabled: bool) {
        self.trace = enabled.then(Vec::new);
    }

    /// Leaf steps of the last frame, if tracing is on.
    pub fn trace(&self) -> &[TraceStep] {
        self.trace.as_deref().unwrap_or(&[])
    }

    /// Per-partition CRC outcome of the last frame (empty when the tree has
    /// no partitions).
    pub fn partition_status(&self) -> &[bool] {
        &self.partition_ok
    }

    /// Decodes one frame. Panics if `channel_llrs` has the wrong length.
    pub fn decode(&mut self, channel_llrs: &[f64]) -> DecodeOutput {
        assert_eq!(channel_llrs.len(), self.channel.len(), "channel LLR count");
        for (dst, &src) in self.channel.iter_mut().zip(channel_llrs) {
            *dst = self.arith.load(src);
        }
        self.reset();
        let root = self.n as u32;
        self.node(root, 0);
        self.finish()
    }

    fn reset(&mut self) {
        for pool in &mut self.alpha {
            pool.reset();
        }
        for pool in &mut self.beta {
            pool.reset();
        }
        self.free_slots.clear();
        self.free_slots.extend((1..self.list_size).rev());
        self.order.clear();
        self.order.push(0);
        self.pm[0] = 0.0;
        for s in 0..self.n {
            self.alpha_id[s] = self.alpha[s].alloc();
        }
        for k in 0..2 * (self.n + 1) {
            self.beta_id[k] = self.beta[k].alloc();
        }
        self.partition_ok.fill(true);
        if let Some(trace) = &mut self.trace {
            trace.clear();
        }
    }

    #[inline]
    fn aidx(&self, slot: usize, s: usize) -> usize {
        slot * self.n.max(1) + s
    }

    #[inline]
    fn bidx(&self, slot: usize, s: usize, side: usize) -> usize {
        slot * 2 * (self.n + 1) + 2 * s + side
    }

    fn side(&self, s: usize, offset: usize) -> usize {
        if s == self.n {
            0
        } else {
            (offset >> s) & 1
        }
    }

    fn alpha_of(&self, slot: usize, s: usize) -> &[f64] {
        if s == self.n {
            &self.channel
        } else {
            self.alpha[s].get(self.alpha_id[self.aidx(slot, s)])
        }
    }

    fn beta_of(&self, slot: usize, s: usize, side: usize) -> &[u8] {
        self.beta[2 * s + side].get(self.beta_id[self.bidx(slot, s, side)])
    }

    fn own_alpha(&mut self, slot: usize, s: usize) -> u32 {
        let k = self.aidx(slot, s);
        let mut id = self.alpha_id[k];
        self.alpha[s].own(&mut id);
        self.alpha_id[k] = id;
        id
    }

    fn own_beta(&mut self, slot: usize, s: usize, side: usize) -> u32 {
        let k = self.bidx(slot, s, side);
        let mut id = self.beta_id[k];
        self.beta[2 * s + side].own(&mut id);
        self.beta_id[k] = id;
        id
    }

    fn release_path(&mut self, slot: usize) {
        for s in 0..self.n {
            let id = self.alpha_id[self.aidx(slot, s)];
            self.alpha[s].release(id);
        }
        for k in 0..2 * (self.n + 1) {
            let id = self.beta_id[slot * 2 * (self.n + 1) + k];
            self.beta[k].release(id);
        }
        self.free_slots.push(slot);
    }

    fn clone_path(&mut self, src: usize, node_len: usize) -> usize {
        let dst = self.free_slots.pop().expect("path slots exhausted");
        for s in 0..self.n {
            let id = self.alpha_id[self.aidx(src, s)];
            self.alpha[s].retain(id);
            let k = self.aidx(dst, s);
            self.alpha_id[k] = id;
        }
        let stride = 2 * (self.n + 1);
        for k in 0..stride {
            let id = self.beta_id[src * stride + k];
            self.beta[k].retain(id);
            self.beta_id[dst * stride + k] = id;
        }
        self.pm[dst] = self.pm[src];
        let len = self.channel.len();
        self.node_bits
            .copy_within(src * len..src * len + node_len, dst * len);
        self.node_rank
            .copy_within(src * len..src * len + node_len, dst * len);
        dst
    }

    /// Replaces the list by the children in `self.cands` (already pruned and
    /// in list order) and leaves `(slot, choice)` pairs in `self.survivors`.
    fn branch(&mut self, node_len: usize) {
        let cands = std::mem::take(&mut self.cands);
        let mut flags = std::mem::take(&mut self.scratch_flags);
        std::mem::swap(&mut self.order, &mut self.prev_order);
        self.order.clear();
        let parents = self.prev_order.len();
        flags[..2 * parents].fill(false);
        let (alive, taken) = flags.split_at_mut(parents);
        for c in &cands {
            alive[c.parent] = true;
        }
        for rank in 0..parents {
            if !alive[rank] {
                let slot = self.prev_order[rank];
                self.release_path(slot);
            }
        }
        for c in &cands {
            let parent = self.prev_order[c.parent];
            let slot = if taken[c.parent] {
                self.clone_path(parent, node_len)
            } else {
                taken[c.parent] = true;
                parent
            };
            self.order.push(slot);
        }
        self.survivors.clear();
        for (c, &slot) in cands.iter().zip(&self.order) {
            self.pm[slot] = c.pm;
            self.survivors.push((slot, c.choice));
        }
        self.cands = cands;
        self.scratch_flags = flags;
    }

    fn node(&mut self, stage: u32, offset: usize) {
        let s = stage as usize;
        match self.tree.op(stage, offset) {
            NodeOp::Descend => self.descend(s, offset),
            NodeOp::Leaf => self.leaf(offset),
            NodeOp::Rate0 => self.rate0(s, offset),
            NodeOp::Rep => self.rep(s, offset),
            NodeOp::Rate1 => self.rate1(s, offset, false),
            NodeOp::Rate1Fast => self.rate1(s, offset, true),
        }
        if self.tree.partition_stage == Some(stage) {
            self.collapse(s, offset);
        }
    }

    fn descend(&mut self, s: usize, offset: usize) {
        let h = 1 << (s - 1);
        for r in 0..self.order.len() {
            let slot = self.order[r];
            let dst_id = self.own_alpha(slot, s - 1);
            let src_id = if s < self.n {
                self.alpha_id[self.aidx(slot, s)]
            } else {
                0
            };
            let (_, hi) = self.alpha.split_at_mut(s - 1);
            let (dst_pool, above) = hi.split_first_mut().expect("stage pool");
            let src = if s == self.n {
                &self.channel[..]
            } else {
                above[0].get(src_id)
            };
            let (upper, lower) = src.split_at(h);
            let arith = &self.arith;
            for ((d, &a), &b) in dst_pool.get_mut(dst_id).iter_mut().zip(upper).zip(lower) {
                *d = arith.f(a, b);
            }
        }
        self.node(s as u32 - 1, offset);
        for r in 0..self.order.len() {
            let slot = self.order[r];
            let dst_id = self.own_alpha(slot, s - 1);
            let src_id = if s < self.n {
                self.alpha_id[self.aidx(slot, s)]
            } else {
                0
            };
            let bl_id = self.beta_id[self.bidx(slot, s - 1, 0)];
            let beta_l = self.beta[2 * (s - 1)].get(bl_id);
            let (_, hi) = self.alpha.split_at_mut(s - 1);
            let (dst_pool, above) = hi.split_first_mut().expect("stage pool");
            let src = if s == self.n {
                &self.channel[..]
            } else {
                above[0].get(src_id)
            };
            let (upper, lower) = src.split_at(h);
            let arith = &self.arith;
            for (((d, &a), &b), &bit) in dst_pool
                .get_mut(dst_id)
                .iter_mut()
                .zip(upper)
                .zip(lower)
                .zip(beta_l)
            {
                *d = arith.g(a, b, bit);
            }
        }
        self.node(s as u32 - 1, offset + h);
        let side = self.side(s, offset);
        for r in 0..self.order.len() {
            let slot = self.order[r];
            let dst_id = self.own_beta(slot, s, side);
            let bl_id = self.beta_id[self.bidx(slot, s - 1, 0)];
            let br_id = self.beta_id[self.bidx(slot, s - 1, 1)];
            let (lo, hi) = self.beta.split_at_mut(2 * s);
            let beta_l = lo[2 * (s - 1)].get(bl_id);
            let beta_r = lo[2 * (s - 1) + 1].get(br_id);
            let (first, second) = hi[side].get_mut(dst_id).split_at_mut(h);
            for ((d, &l), &r) in first.iter_mut().zip(beta_l).zip(beta_r) {
                *d = l ^ r;
            }
            second.copy_from_slice(beta_r);
        }
    }

    fn write_beta(&mut self, slot: usize, s: usize, side: usize, bits: impl Fn(usize) -> u8) {
        let id = self.own_beta(slot, s, side);
        for (i, b) in self.beta[2 * s + side].get_mut(id).iter_mut().enumerate() {
            *b = bits(i);
        }
    }

    fn leaf(&mut self, offset: usize) {
        let frozen = self.frozen[offset];
        let side = self.side(0, offset);
        let mut pms = std::mem::take(&mut self.scratch_pm);
        let mut alphas = std::mem::take(&mut self.scratch_alpha);
        pms.clear();
        alphas.clear();
        for &slot in &self.order {
            pms.push(self.pm[slot]);
            alphas.push(self.alpha_of(slot, 0)[0]);
        }
        let mut cands = std::mem::take(&mut self.cands);
        split_and_prune(&self.arith, &pms, &alphas, frozen, self.list_size, &mut cands);
        self.cands = cands;
        if frozen {
            for r in 0..self.order.len() {
                let slot = self.order[r];
                self.pm[slot] = self.cands[r].pm;
                self.write_beta(slot, 0, side, |_| 0);
            }
        } else {
            self.branch(0);
            for k in 0..self.survivors.len() {
                let (slot, bit) = self.survivors[k];
                self.write_beta(slot, 0, side, |_| bit);
            }
        }
        if self.trace.is_some() {
            let paths = self
                .order
                .iter()
                .map(|&slot| (self.pm[slot], self.beta_of(slot, 0, side)[0]))
                .collect();
            if let Some(trace) = &mut self.trace {
                trace.push(TraceStep {
                    index: offset,
                    frozen,
                    paths,
                });
            }
        }
        self.scratch_pm = pms;
        self.scratch_alpha = alphas;
    }

    fn rate0(&mut self, s: usize, offset: usize) {
        let side = self.side(s, offset);
        for r in 0..self.order.len() {
            let slot = self.order[r];
            let cost: f64 = self.alpha_of(slot, s).iter().map(|&a| penalty(a, 0)).sum();
            self.pm[slot] = self.arith.pm_add(self.pm[slot], cost);
            self.write_beta(slot, s, side, |_| 0);
        }
    }

    fn rep(&mut self, s: usize, offset: usize) {
        let side = self.side(s, offset);
        self.cands.clear();
        for r in 0..self.order.len() {
            let slot = self.order[r];
            let alpha = self.alpha_of(slot, s);
            let zero: f64 = alpha.iter().map(|&a| penalty(a, 0)).sum();
            let one: f64 = alpha.iter().map(|&a| penalty(a, 1)).sum();
            let pm = self.pm[slot];
            for (choice, cost) in [(0u8, zero), (1, one)] {
                self.cands.push(Candidate {
                    pm: self.arith.pm_add(pm, cost),
                    parent: r,
                    choice,
                });
            }
        }
        prune_candidates(&mut self.cands, self.list_size);
        self.branch(0);
        for k in 0..self.survivors.len() {
            let (slot, bit) = self.survivors[k];
            self.write_beta(slot, s, side, |_| bit);
        }
    }

    fn rate1(&mut self, s: usize, offset: usize, fast: bool) {
        let side = self.side(s, offset);
        let nv = 1usize << s;
        let len = self.channel.len();
        for r in 0..self.order.len() {
            let slot = self.order[r];
            let base = slot * len;
            for i in 0..nv {
                let a = self.alpha_of(slot, s)[i];
                self.node_bits[base + i] = hard_decision(a);
                self.node_rank[base + i] = i as u32;
            }
            if fast {
                let k = self.aidx(slot, s);
                let alpha: &[f64] = if s == self.n {
                    &self.channel
                } else {
                    self.alpha[s].get(self.alpha_id[k])
                };
                self.node_rank[base..base + nv]
                    .sort_by(|&a, &b| alpha[a as usize].abs().total_cmp(&alpha[b as usize].abs()));
            }
        }
        let steps = if fast {
            (self.list_size - 1).min(nv)
        } else {
            nv
        };
        for t in 0..steps {
            self.cands.clear();
            for r in 0..self.order.len() {
                let slot = self.order[r];
                let pos = self.node_rank[slot * len + t] as usize;
                let a = self.alpha_of(slot, s)[pos];
                let pm = self.pm[slot];
                for choice in 0..2 {
                    self.cands.push(Candidate {
                        pm: self.arith.pm_add(pm, penalty(a, choice)),
                        parent: r,
                        choice,
                    });
                }
            }
            prune_candidates(&mut self.cands, self.list_size);
            self.branch(nv);
            for k in 0..self.survivors.len() {
                let (slot, bit) = self.survivors[k];
                let pos = self.node_rank[slot * len + t] as usize;
                self.node_bits[slot * len + pos] = bit;
            }
        }
        for r in 0..self.order.len() {
            let slot = self.order[r];
            let id = self.own_beta(slot, s, side);
            let bits = &self.node_bits[slot * len..slot * len + nv];
            self.beta[2 * s + side].get_mut(id).copy_from_slice(bits);
        }
    }

    /// `u` bits of the subtree rooted at `(s, offset)` for one path.
    fn subtree_u(&self, slot: usize, s: usize, offset: usize) -> Vec<u8> {
        let mut u = self.beta_of(slot, s, self.side(s, offset)).to_vec();
        polar_transform(&mut u);
        u
    }

    fn collapse(&mut self, s: usize, offset: usize) {
        let index = offset >> s;
        let check = &self.tree.partitions[index];
        let mut pms = Vec::with_capacity(self.order.len());
        let mut passes = Vec::with_capacity(self.order.len());
        for &slot in &self.order {
            pms.push(self.pm[slot]);
            passes.push(match &check.crc {
                None => true,
                Some(crc) => {
                    let u = self.subtree_u(slot, s, offset);
                    let bits: Vec<u8> = check.info.iter().map(|&i| u[i]).collect();
                    crc.check(&bits).unwrap_or(false)
                }
            });
        }
        let (best, ok) = select_final(&pms, &passes);
        self.partition_ok[index] = ok;
        let keep = self.order[best];
        for r in 0..self.order.len() {
            if r != best {
                let slot = self.order[r];
                self.release_path(slot);
            }
        }
        self.order.clear();
        self.order.push(keep);
    }

    fn finish(&mut self) -> DecodeOutput {
        let n = self.n;
        let candidates: Vec<Vec<u8>> = self
            .order
            .iter()
            .map(|&slot| self.subtree_u(slot, n, 0))
            .collect();
        let (best, crc_ok) = if self.tree.partition_stage.is_some() {
            (0, self.partition_ok.iter().all(|&ok| ok))
        } else {
            let pms: Vec<f64> = self.order.iter().map(|&slot| self.pm[slot]).collect();
            let passes: Vec<bool> = candidates
                .iter()
                .map(|u| match &self.crc {
                    None => true,
                    Some(crc) => {
                        let info: Vec<u8> = self.info_positions.iter().map(|&i| u[i]).collect();
                        crc.check(&info).unwrap_or(false)
                    }
                })
                .collect();
            select_final(&pms, &passes)
        };
        let u_hat = candidates.into_iter().nth(best).expect("nonempty list");
        DecodeOutput {
            payload: self.payload_positions.iter().map(|&i| u_hat[i]).collect(),
            pm: self.pm[self.order[best]],
            crc_ok,
            u_hat,
        }
    }
}

/// One-shot CRC-aided SCL decode in exact floating point.
pub fn scl_decode(code: &PolarCode, channel_llrs: &[f64], list_size: usize) -> Result<DecodeOutput> {
    Ok(ListDecoder::scl(code, list_size)?.decode(channel_llrs))
}
