//! Independent re-implementations shared by the integration tests.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use susco::auction::{Bid, Task};

/// Wear rate per unit of depth of discharge at level `psi`.
fn wear_density(psi: f64, a: f64) -> f64 {
    10f64.powf(-a * psi) * (1.0 + a * std::f64::consts::LN_10 * (1.0 - psi))
}

fn simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    (b - a) / 6.0 * (f(a) + 4.0 * f((a + b) / 2.0) + f(b))
}

fn adaptive(f: &dyn Fn(f64) -> f64, a: f64, b: f64, whole: f64, tol: f64, depth: u32) -> f64 {
    let m = (a + b) / 2.0;
    let (l, r) = (simpson(f, a, m), simpson(f, m, b));
    if depth == 0 || (l + r - whole).abs() <= 15.0 * tol {
        return l + r + (l + r - whole) / 15.0;
    }
    adaptive(f, a, m, l, tol / 2.0, depth - 1) + adaptive(f, m, b, r, tol / 2.0, depth - 1)
}

pub fn quadrature_k(before: f64, after: f64, a: f64) -> f64 {
    if before <= after {
        return 0.0;
    }
    let f = |x: f64| wear_density(x, a);
    adaptive(&f, after, before, simpson(&f, after, before), 1e-13, 40)
}

/// Candidate construction written out step by step over plain dish-id sets.
pub fn cgsc_oracle(task: &Task, bids: &[Bid], layers: usize, top_m: usize) -> Vec<Vec<u32>> {
    let by_dish: BTreeMap<u32, &Bid> = bids.iter().map(|b| (b.dish.0, b)).collect();
    let cost = |g: &Vec<u32>| g.iter().map(|d| by_dish[d].cost).sum::<f64>();
    let sum = |g: &Vec<u32>, f: fn(&Bid) -> f64| g.iter().map(|d| f(by_dish[d])).sum::<f64>();

    // (a) latency filter and singletons
    let mut layer: BTreeSet<Vec<u32>> = bids
        .iter()
        .filter(|b| b.terrestrial_latency <= task.delay_req)
        .map(|b| vec![b.dish.0])
        .collect();
    let mut every: BTreeSet<Vec<u32>> = layer.clone();
    // (b)-(c) merge disjoint pairs among the cheapest ℳ of each layer
    for _ in 1..layers {
        let mut ranked: Vec<&Vec<u32>> = layer.iter().collect();
        ranked.sort_by(|a, b| cost(a).total_cmp(&cost(b)).then(a.cmp(b)));
        ranked.truncate(top_m);
        let mut next = BTreeSet::new();
        for i in 0..ranked.len() {
            for j in i + 1..ranked.len() {
                let (a, b) = (ranked[i], ranked[j]);
                if a.iter().all(|d| !b.contains(d)) {
                    let mut m: Vec<u32> = a.iter().chain(b.iter()).copied().collect();
                    m.sort();
                    next.insert(m);
                }
            }
        }
        every.extend(next.iter().cloned());
        layer = next;
    }
    // (d) capacity and bandwidth, (e) budget
    every
        .into_iter()
        .filter(|g| sum(g, |b| b.capacity) >= task.data_amount && sum(g, |b| b.bandwidth) >= task.bandwidth_req)
        .filter(|g| cost(g) <= task.budget)
        .collect()
}

