use std::collections::HashMap;
use std::sync::Arc;

use crate::arith::{compositions, WeightModel};
use crate::scalar::Scalar;

/// Local data of a model at one prime power: the compositions of `v` with
/// non-zero weight, their weights, the weight sum and `f(p^v)`.
#[derive(Debug, Clone)]
pub struct LocalData<S> {
    pub comps: Vec<u32>,
    pub g: Vec<S>,
    pub sum: S,
    pub f: S,
}

/// Memo of [`LocalData`] keyed by `(local_key(p), v)`.
#[derive(Debug)]
pub struct LocalTable<'m, S> {
    model: &'m WeightModel,
    memo: HashMap<(u64, u32), Arc<LocalData<S>>>,
}

impl<'m, S: Scalar> LocalTable<'m, S> {
    pub fn new(model: &'m WeightModel) -> Self {
        Self {
            model,
            memo: HashMap::new(),
        }
    }

    pub fn get(&mut self, p: u64, v: u32) -> Arc<LocalData<S>> {
        let key = (self.model.local_key(p), v);
        let model = self.model;
        self.memo
            .entry(key)
            .or_insert_with(|| {
                let k = model.k();
                let mut comps = Vec::new();
                let mut g = Vec::new();
                let mut sum = S::zero();
                for c in compositions(v, k).chunks(k) {
                    let w: S = model.g_local(p, c);
                    if !w.is_zero() {
                        sum = sum + w.clone();
                        comps.extend_from_slice(c);
                        g.push(w);
                    }
                }
                Arc::new(LocalData {
                    comps,
                    g,
                    sum,
                    f: model.f_local(p, v),
                })
            })
            .clone()
    }
}

/// Calls `visit(parts, weight)` for every ordered `k`-tuple with product
/// `n = prod p^v` and non-zero `G`, choosing one composition per prime in
/// factor order.
pub(crate) fn for_each_tuple<S: Scalar>(
    factors: &[(u64, u32)],
    locals: &[Arc<LocalData<S>>],
    k: usize,
    visit: &mut impl FnMut(&[u64], &S),
) {
    fn rec<S: Scalar>(
        level: usize,
        factors: &[(u64, u32)],
        locals: &[Arc<LocalData<S>>],
        k: usize,
        parts: &mut [u64; 8],
        weight: &S,
        visit: &mut impl FnMut(&[u64], &S),
    ) {
        if level == factors.len() {
            visit(&parts[..k], weight);
            return;
        }
        let p = factors[level].0;
        let local = &locals[level];
        let saved = *parts;
        for (c, w) in local.comps.chunks(k).zip(&local.g) {
            for (part, &e) in parts.iter_mut().zip(c) {
                *part *= p.pow(e);
            }
            let next = weight.clone() * w.clone();
            rec(level + 1, factors, locals, k, parts, &next, visit);
            *parts = saved;
        }
    }
    let mut parts = [1u64; 8];
    rec(0, factors, locals, k, &mut parts, &S::one(), visit);
}
