use std::fmt::Write;

use num_traits::{One, Signed, Zero};

use super::Verdict;
use crate::market::{validate_market, validate_strategy, wealth_process, Market};
use crate::prob::conditional_expectation;
use crate::Rational;

/// Re-derives the certificate's defining conditions from scratch.
///
/// Measures are checked through conditional expectations for every pair
/// `t ≤ u ≤ horizon`, not only consecutive ones; strategies through a fresh
/// wealth-process evaluation.
pub fn verify_certificate(m: &Market, v: &Verdict, horizon: usize) -> bool {
    if !validate_market(m).is_empty() || horizon > m.n_ext() {
        return false;
    }
    let n_states = m.num_states();
    match v {
        Verdict::NoFreeLunch(cert) => {
            let q = &cert.q;
            if q.len() != n_states || q.iter().any(|x| !x.is_positive()) {
                return false;
            }
            if !q.iter().sum::<Rational>().is_one() {
                return false;
            }
            for (i, set) in m.index_system.iter().enumerate() {
                for &a in set {
                    for t in 0..=horizon {
                        let sigma = m.trading_at(i, t);
                        let Ok(now) = conditional_expectation(m.price(a, t), sigma, q) else {
                            return false;
                        };
                        for u in t + 1..=horizon {
                            match conditional_expectation(m.price(a, u), sigma, q) {
                                Ok(later) if later == now => {}
                                _ => return false,
                            }
                        }
                    }
                }
            }
            true
        }
        Verdict::FreeLunch(cert) => {
            let s = &cert.strategy;
            if !validate_strategy(m, s).is_empty() || s.dates.last().is_some_and(|&d| d > horizon) {
                return false;
            }
            let Ok(wealth) = wealth_process(m, s) else {
                return false;
            };
            wealth[0].iter().all(Zero::is_zero)
                && wealth[horizon] == cert.terminal_wealth
                && cert.terminal_wealth.iter().all(|x| !x.is_negative())
                && cert.terminal_wealth.iter().any(|x| x.is_positive())
        }
    }
}

/// Line-based text form with exact rationals, stable across runs.
pub fn canonical_text(m: &Market, v: &Verdict) -> String {
    let names = m.space.names();
    let mut out = String::new();
    writeln!(out, "verdict {}", v.label()).unwrap();
    match v {
        Verdict::NoFreeLunch(cert) => {
            for (name, q) in names.iter().zip(&cert.q) {
                writeln!(out, "q {name} {q}").unwrap();
            }
        }
        Verdict::FreeLunch(cert) => {
            let s = &cert.strategy;
            writeln!(out, "index-set {}", m.set_label(&m.index_system[s.index_set])).unwrap();
            let dates: Vec<String> = s.dates.iter().map(ToString::to_string).collect();
            writeln!(out, "dates {}", dates.join(" ")).unwrap();
            for (i, interval) in s.holdings.iter().enumerate() {
                for (&a, h) in interval {
                    for (name, x) in names.iter().zip(h) {
                        if !x.is_zero() {
                            writeln!(out, "hold {} {} {name} {x}", s.dates[i], m.assets[a].id).unwrap();
                        }
                    }
                }
            }
            for (name, x) in names.iter().zip(&cert.terminal_wealth) {
                writeln!(out, "terminal {name} {x}").unwrap();
            }
        }
    }
    out
}
