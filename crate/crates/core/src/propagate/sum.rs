use std::collections::hash_map::Entry;
use std::sync::atomic::{AtomicU8, Ordering};

use rayon::prelude::*;
use rustc_hash::FxHashMap;

use super::packed::{Fixed, Packed};
use super::OrderReport;
use crate::error::{Error, Result};
use crate::pauli::{word_count, PauliString};

const SHARD_BITS: u32 = 4;
const SHARDS: usize = 1 << SHARD_BITS;
/// Below this many terms shards are processed on the calling thread.
const PARALLEL_MIN_TERMS: usize = 1 << 14;

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub(crate) struct Key<P> {
    pauli: P,
    order: u16,
    damping: u16,
}

#[inline]
fn shard_of<P: Packed>(k: &Key<P>) -> usize {
    let h = k.pauli.shard_hash() ^ (u64::from(k.order) << 40) ^ (u64::from(k.damping) << 20);
    (h.wrapping_mul(0x9e37_79b9_7f4a_7c15) >> (64 - SHARD_BITS)) as usize
}

type Branch<P> = (Key<P>, f64);

#[derive(Clone)]
pub(crate) struct TermMap<P> {
    shards: Vec<FxHashMap<Key<P>, f64>>,
}

impl<P: Packed> TermMap<P> {
    fn new() -> Self {
        TermMap {
            shards: (0..SHARDS).map(|_| FxHashMap::default()).collect(),
        }
    }

    fn len(&self) -> usize {
        self.shards.iter().map(|s| s.len()).sum()
    }

    fn iter(&self) -> impl Iterator<Item = (&Key<P>, &f64)> {
        self.shards.iter().flat_map(|s| s.iter())
    }

    /// Adds `v` to the coefficient of `k`; returns true when a new key was created.
    fn accumulate(shard: &mut FxHashMap<Key<P>, f64>, k: Key<P>, v: f64, eps: f64) -> bool {
        match shard.entry(k) {
            Entry::Occupied(mut e) => {
                let nv = *e.get() + v;
                if nv == 0.0 || nv.abs() < eps {
                    e.remove();
                } else {
                    *e.get_mut() = nv;
                }
                false
            }
            Entry::Vacant(e) => {
                if v != 0.0 && v.abs() >= eps {
                    e.insert(v);
                    true
                } else {
                    false
                }
            }
        }
    }

    /// One linear pass over every term. `f` rescales the coefficient in place
    /// and may emit one branch term; branches are merged afterwards.
    ///
    /// Every map used by the engine sends each destination key at most one
    /// branch per pass, so the merged coefficients do not depend on shard or
    /// thread scheduling. Returns the number of keys created per order.
    fn transform<F>(&mut self, eps: f64, orders: usize, f: F) -> Vec<u64>
    where
        F: Fn(&Key<P>, &mut f64) -> Option<Branch<P>> + Sync,
    {
        let parallel = self.len() >= PARALLEL_MIN_TERMS && rayon::current_num_threads() > 1;
        let scan = |shard: &mut FxHashMap<Key<P>, f64>| {
            let mut out: Vec<Vec<Branch<P>>> = (0..SHARDS).map(|_| Vec::new()).collect();
            shard.retain(|k, c| {
                if let Some(b) = f(k, c) {
                    out[shard_of(&b.0)].push(b);
                }
                *c != 0.0 && c.abs() >= eps
            });
            out
        };
        let outboxes: Vec<Vec<Vec<Branch<P>>>> = if parallel {
            self.shards.par_iter_mut().map(scan).collect()
        } else {
            self.shards.iter_mut().map(scan).collect()
        };
        let mut inbound: Vec<Vec<Vec<Branch<P>>>> =
            (0..SHARDS).map(|_| Vec::with_capacity(SHARDS)).collect();
        for per_src in outboxes {
            for (dst, list) in per_src.into_iter().enumerate() {
                inbound[dst].push(list);
            }
        }
        let merge = |(shard, lists): (&mut FxHashMap<Key<P>, f64>, Vec<Vec<Branch<P>>>)| {
            let mut created = vec![0u64; orders];
            let extra: usize = lists.iter().map(Vec::len).sum();
            shard.reserve(extra);
            for list in lists {
                for (k, v) in list {
                    let order = k.order as usize;
                    if Self::accumulate(shard, k, v, eps) {
                        created[order] += 1;
                    }
                }
            }
            created
        };
        let counts: Vec<Vec<u64>> = if parallel {
            self.shards.par_iter_mut().zip(inbound).map(merge).collect()
        } else {
            self.shards.iter_mut().zip(inbound).map(merge).collect()
        };
        let mut total = vec![0u64; orders];
        for c in counts {
            for (t, v) in total.iter_mut().zip(c) {
                *t += v;
            }
        }
        total
    }
}

#[derive(Clone)]
pub(crate) enum Store {
    W1(TermMap<Fixed<1>>),
    W2(TermMap<Fixed<2>>),
    W4(TermMap<Fixed<4>>),
    W8(TermMap<Fixed<8>>),
    W16(TermMap<Fixed<16>>),
    Wide(TermMap<PauliString>),
}

macro_rules! dispatch {
    ($store:expr, $m:ident => $body:expr) => {
        match $store {
            Store::W1($m) => $body,
            Store::W2($m) => $body,
            Store::W4($m) => $body,
            Store::W8($m) => $body,
            Store::W16($m) => $body,
            Store::Wide($m) => $body,
        }
    };
}

impl Store {
    fn for_qubits(n: usize) -> Self {
        match word_count(n) {
            0 | 1 => Store::W1(TermMap::new()),
            2 => Store::W2(TermMap::new()),
            3 | 4 => Store::W4(TermMap::new()),
            5..=8 => Store::W8(TermMap::new()),
            9..=16 => Store::W16(TermMap::new()),
            _ => Store::Wide(TermMap::new()),
        }
    }
}

/// One stored term of an [`ObservableSum`].
#[derive(Debug, Clone, PartialEq)]
pub struct Term {
    pub pauli: PauliString,
    /// Number of `sin θ` branch factors accumulated.
    pub order: usize,
    /// Number of amplitude-damping `λ·I` branch factors accumulated.
    pub damping: usize,
    pub coeff: f64,
}

/// Weighted sum of Pauli strings keyed by `(string, order, damping order)`.
///
/// Coefficients are always real and never exactly zero. Every key satisfies
/// `order <= max_order` and `damping <= max_damping`.
#[derive(Clone)]
pub struct ObservableSum {
    n: usize,
    max_order: usize,
    max_damping: usize,
    coeff_threshold: f64,
    merge_orders: bool,
    store: Store,
    generated: Vec<u64>,
}

impl std::fmt::Debug for ObservableSum {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ObservableSum")
            .field("n", &self.n)
            .field("max_order", &self.max_order)
            .field("terms", &self.terms())
            .finish()
    }
}

const ORDER_LIMIT: usize = u16::MAX as usize;

impl ObservableSum {
    /// Empty sum truncated at perturbation order `max_order` (clamped to
    /// 65535).
    pub fn new(n: usize, max_order: usize) -> Self {
        let max_order = max_order.min(ORDER_LIMIT);
        ObservableSum {
            n,
            max_order,
            max_damping: ORDER_LIMIT,
            coeff_threshold: 0.0,
            merge_orders: false,
            store: Store::for_qubits(n),
            generated: vec![0; max_order + 1],
        }
    }

    /// `coeff · p` at order 0.
    pub fn from_observable(p: &PauliString, coeff: f64, max_order: usize) -> Self {
        let mut s = ObservableSum::new(p.n(), max_order);
        s.insert(p, 0, coeff).expect("order 0 is always admissible");
        s
    }

    /// Drop terms with `|c| < eps` after every update. Reported per-order
    /// values are then approximate.
    pub fn with_coeff_threshold(mut self, eps: f64) -> Self {
        self.coeff_threshold = eps.max(0.0);
        self
    }

    /// Truncate amplitude-damping branches at `k` factors of `λ`.
    pub fn with_max_damping_order(mut self, k: Option<usize>) -> Self {
        self.max_damping = k.unwrap_or(ORDER_LIMIT).min(ORDER_LIMIT);
        self
    }

    /// Keep every branch at the order of its parent. Nothing is truncated and
    /// all contributions are reported at order 0; the live key set shrinks to
    /// distinct strings.
    pub fn with_merged_orders(mut self, merge: bool) -> Self {
        self.merge_orders = merge;
        self
    }

    pub fn merges_orders(&self) -> bool {
        self.merge_orders
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn max_order(&self) -> usize {
        self.max_order
    }

    pub fn len(&self) -> usize {
        dispatch!(&self.store, m => m.len())
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Keys created so far, per perturbation order (including initial terms).
    pub fn generated_per_order(&self) -> &[u64] {
        &self.generated
    }

    pub fn total_generated(&self) -> u64 {
        self.generated.iter().sum()
    }

    fn check_pauli(&self, p: &PauliString) -> Result<()> {
        if p.n() != self.n {
            return Err(Error::Dimension {
                expected: self.n,
                found: p.n(),
            });
        }
        Ok(())
    }

    /// Adds `coeff` to the term `(p, order)` at damping order 0.
    pub fn insert(&mut self, p: &PauliString, order: usize, coeff: f64) -> Result<()> {
        self.check_pauli(p)?;
        if order > self.max_order {
            return Err(Error::InvalidArgument(format!(
                "order {order} exceeds truncation order {}",
                self.max_order
            )));
        }
        if !coeff.is_finite() {
            return Err(Error::InvalidArgument(format!("coefficient {coeff} is not finite")));
        }
        let eps = self.coeff_threshold;
        let created = dispatch!(&mut self.store, m => {
            let k = Key { pauli: Packed::pack(p), order: order as u16, damping: 0 };
            let shard = &mut m.shards[shard_of(&k)];
            TermMap::accumulate(shard, k, coeff, eps)
        });
        if created {
            self.generated[order] += 1;
        }
        Ok(())
    }

    /// Coefficient of `(p, order)` summed over damping orders.
    pub fn coefficient(&self, p: &PauliString, order: usize) -> f64 {
        self.terms()
            .into_iter()
            .filter(|t| t.order == order && &t.pauli == p)
            .map(|t| t.coeff)
            .sum()
    }

    /// All terms in canonical key order.
    pub fn terms(&self) -> Vec<Term> {
        let n = self.n;
        dispatch!(&self.store, m => {
            let mut v: Vec<_> = m.iter().collect();
            v.sort_unstable_by(|a, b| a.0.cmp(b.0));
            v.into_iter()
                .map(|(k, c)| Term {
                    pauli: k.pauli.unpack(n),
                    order: k.order as usize,
                    damping: k.damping as usize,
                    coeff: *c,
                })
                .collect()
        })
    }

    fn record(&mut self, created: Vec<u64>) {
        for (g, c) in self.generated.iter_mut().zip(created) {
            *g += c;
        }
    }

    /// Heisenberg update by `exp(-i θ P / 2)`; requires `|θ| <= π/4`.
    pub fn apply_rotation(&mut self, axis: &PauliString, theta: f64) -> Result<()> {
        if !theta.is_finite() {
            return Err(Error::NonFiniteAngle(theta));
        }
        if theta.abs() > std::f64::consts::FRAC_PI_4 + 1e-12 {
            return Err(Error::AngleOutOfRange { theta });
        }
        self.apply_rotation_any_angle(axis, theta)
    }

    /// As [`Self::apply_rotation`] without the angle-range check; used to
    /// study perturbation theory on untransformed circuits.
    pub fn apply_rotation_any_angle(&mut self, axis: &PauliString, theta: f64) -> Result<()> {
        self.check_pauli(axis)?;
        if axis.is_identity() {
            return Err(Error::IdentityAxis);
        }
        let (sin, cos) = theta.sin_cos();
        let max_order = self.max_order as u16;
        let step = u16::from(!self.merge_orders);
        let eps = self.coeff_threshold;
        let orders = self.max_order + 1;
        let bad_phase = AtomicU8::new(0);
        let created = dispatch!(&mut self.store, m => {
            let a = Packed::pack(axis);
            m.transform(eps, orders, |k, c| {
                if !k.pauli.anticommutes(&a) {
                    return None;
                }
                let old = *c;
                *c = old * cos;
                if step == 1 && k.order >= max_order {
                    return None;
                }
                // i sinθ · (axis·σ) with axis·σ = i^e r and e odd
                let (r, e) = a.product(&k.pauli);
                let sign = match e {
                    1 => -1.0,
                    3 => 1.0,
                    _ => {
                        bad_phase.store(e | 0x80, Ordering::Relaxed);
                        return None;
                    }
                };
                Some((Key { pauli: r, order: k.order + step, damping: k.damping }, old * sin * sign))
            })
        });
        let bad = bad_phase.load(Ordering::Relaxed);
        if bad != 0 {
            return Err(Error::ImaginaryResidue { exponent: bad & 3 });
        }
        self.record(created);
        Ok(())
    }

    fn check_qubit(&self, q: usize) -> Result<()> {
        if q >= self.n {
            return Err(Error::QubitOutOfRange { qubit: q, n: self.n });
        }
        Ok(())
    }

    /// Multiplies every term by `factor[pauli on q]` (indexed I, X, Y, Z).
    pub(crate) fn scale_by_local_factor(&mut self, q: usize, factor: [f64; 4]) -> Result<()> {
        self.check_qubit(q)?;
        let eps = self.coeff_threshold;
        let orders = self.max_order + 1;
        dispatch!(&mut self.store, m => {
            m.transform(eps, orders, |k, c| {
                let idx = match k.pauli.qubit(q) {
                    (false, false) => 0,
                    (true, false) => 1,
                    (true, true) => 2,
                    (false, true) => 3,
                };
                *c *= factor[idx];
                None
            })
        });
        Ok(())
    }

    /// `X, Y ↦ √(1-λ)·(X, Y)`, `Z ↦ (1-λ) Z + λ I` on qubit `q`.
    pub(crate) fn damp_amplitude(&mut self, q: usize, lambda: f64) -> Result<()> {
        self.check_qubit(q)?;
        let eps = self.coeff_threshold;
        let orders = self.max_order + 1;
        let max_damping = self.max_damping as u16;
        let root = (1.0 - lambda).sqrt();
        let created = dispatch!(&mut self.store, m => {
            m.transform(eps, orders, |k, c| match k.pauli.qubit(q) {
                (false, false) => None,
                (true, _) => {
                    *c *= root;
                    None
                }
                (false, true) => {
                    let old = *c;
                    *c = old * (1.0 - lambda);
                    if k.damping >= max_damping {
                        return None;
                    }
                    let mut p = k.pauli.clone();
                    p.clear_qubit(q);
                    Some((Key { pauli: p, order: k.order, damping: k.damping + 1 }, old * lambda))
                }
            })
        });
        self.record(created);
        Ok(())
    }

    /// Per-order vacuum expectation values and the truncated partial sums.
    ///
    /// Terms are summed in canonical key order, so the result does not
    /// depend on hash-map layout or on how many threads built the sum.
    pub fn expectation(&self) -> (f64, OrderReport) {
        let mut per_order = vec![0.0; self.max_order + 1];
        dispatch!(&self.store, m => {
            let mut hits: Vec<(&Key<_>, f64)> = m
                .iter()
                .filter(|(k, _)| k.pauli.vacuum())
                .map(|(k, c)| (k, *c))
                .collect();
            hits.sort_unstable_by(|a, b| {
                (a.0.order, &a.0.pauli, a.0.damping).cmp(&(b.0.order, &b.0.pauli, b.0.damping))
            });
            for (k, c) in hits {
                per_order[k.order as usize] += c;
            }
        });
        let report = OrderReport::new(per_order, self.generated.clone());
        (report.expval(), report)
    }
}
