//! Alternating-sum codec `x = Σ (-1)^k p^{m_k} q^{n_k}`, transport between
//! parameter pairs, and order-reversal witnesses.
//!
//! Reading an address left to right, the prefix scale `p^a q^b` counts the
//! letters `{1, 3}` and `{2, 4}` seen so far. Letters `1, 2` form the class G
//! (linear maps), letters `3, 4` the class H (maps fixing 1). A term `+p^a q^b`
//! is emitted at each G→H change and `-p^a q^b` at each H→G change, with a
//! virtual G letter before the first position. Each maximal H-run then
//! contributes `P_start - P_end`, which is exactly its share of `π(a)`.

use serde_json::{json, Value};

use crate::ifs::{Address, Word};
use crate::numeric::{cf, log_ratio, Params, Scalar, Span};
use crate::{Error, Result};

pub type Exps = (u32, u32);

fn is_h(letter: u8) -> bool {
    letter >= 3
}

fn step(e: Exps, letter: u8) -> Exps {
    if letter % 2 == 1 {
        (e.0 + 1, e.1)
    } else {
        (e.0, e.1 + 1)
    }
}

fn add(a: Exps, b: Exps) -> Exps {
    (a.0 + b.0, a.1 + b.1)
}

/// `a < b` in the strict product order used by the representation.
pub fn precedes(a: Exps, b: Exps) -> bool {
    a.0 <= b.0 && a.1 <= b.1 && a.0 + a.1 < b.0 + b.1
}

/// Terms `head` followed by `cycle + j·shift` for `j = 0, 1, …`.
/// `cycle` has even length, so every copy starts with the same sign.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AltSumRep {
    pub head: Vec<Exps>,
    pub cycle: Vec<Exps>,
    pub shift: Exps,
}

impl AltSumRep {
    pub fn finite(terms: Vec<Exps>) -> Result<Self> {
        let rep = AltSumRep {
            head: terms,
            cycle: Vec::new(),
            shift: (0, 0),
        };
        rep.validate()?;
        Ok(rep)
    }

    pub fn periodic(head: Vec<Exps>, cycle: Vec<Exps>, shift: Exps) -> Result<Self> {
        let rep = AltSumRep { head, cycle, shift };
        rep.validate()?;
        Ok(rep)
    }

    pub fn is_finite(&self) -> bool {
        self.cycle.is_empty()
    }

    /// All terms in order (infinite for periodic reps).
    pub fn terms(&self) -> impl Iterator<Item = Exps> + '_ {
        // A finite sum has no cycle copies; the iterator must then end.
        let copies = if self.cycle.is_empty() { 0 } else { u32::MAX };
        let cycles = (0..copies).flat_map(move |j| {
            self.cycle
                .iter()
                .map(move |&c| add(c, (j * self.shift.0, j * self.shift.1)))
        });
        self.head.iter().copied().chain(cycles)
    }

    /// Checks the strict order along the terms, including the wrap from one
    /// cycle copy to the next, and the parity of the cycle.
    pub fn validate(&self) -> Result<()> {
        if self.head.is_empty() && self.cycle.is_empty() {
            return Err(Error::InvalidRep("empty sum".into()));
        }
        if self.cycle.len() % 2 == 1 {
            return Err(Error::InvalidRep("cycle length must be even".into()));
        }
        let limit = self.head.len() + 2 * self.cycle.len();
        let terms: Vec<Exps> = self.terms().take(limit).collect();
        if let Some(w) = terms.windows(2).find(|w| !precedes(w[0], w[1])) {
            return Err(Error::InvalidRep(format!(
                "terms {:?} and {:?} are out of order",
                w[0], w[1]
            )));
        }
        Ok(())
    }

    /// Rep of `S_i(x)` given the rep of `x`.
    pub fn apply_map(&self, letter: u8) -> Result<AltSumRep> {
        if !(1..=4).contains(&letter) {
            return Err(Error::BadLetter(letter));
        }
        let d = step((0, 0), letter);
        let shifted = |v: &[Exps]| v.iter().map(|&e| add(e, d)).collect::<Vec<_>>();
        let cycle = shifted(&self.cycle);
        let head = if !is_h(letter) {
            shifted(&self.head)
        } else if self.head.first() == Some(&(0, 0)) {
            // x was already in an H-run at position 0: the run just grows
            let mut h = vec![(0, 0)];
            h.extend(shifted(&self.head[1..]));
            h
        } else {
            let mut h = vec![(0, 0), d];
            h.extend(shifted(&self.head));
            h
        };
        AltSumRep::periodic(head, cycle, self.shift)
    }

    /// Canonical address with the same value: G-runs as `1…2…`, H-runs as
    /// `3…4…`; a finite sum ends in `(3)` after a `+` term, `(1)` after `-`.
    pub fn to_address(&self) -> Result<Address> {
        self.validate()?;
        let mut letters = Vec::new();
        let mut at = (0u32, 0u32);
        let run = |from: Exps, to: Exps, h: bool, out: &mut Vec<u8>| {
            let (a, b) = if h { (3, 4) } else { (1, 2) };
            out.extend(std::iter::repeat_n(a, (to.0 - from.0) as usize));
            out.extend(std::iter::repeat_n(b, (to.1 - from.1) as usize));
        };
        // a term with even index closes a G-run
        for (k, &t) in self.head.iter().enumerate() {
            run(at, t, k % 2 == 1, &mut letters);
            at = t;
        }
        if self.cycle.is_empty() {
            let tail = if self.head.len() % 2 == 1 { 3 } else { 1 };
            return Address::periodic(Word::new(letters)?, Word::new(vec![tail])?);
        }
        let base = self.head.len();
        run(at, self.cycle[0], base % 2 == 1, &mut letters);
        let mut period = Vec::new();
        let len = self.cycle.len();
        for i in 1..=len {
            let from = self.cycle[i - 1];
            let to = if i == len {
                add(self.cycle[0], self.shift)
            } else {
                self.cycle[i]
            };
            run(from, to, (base + i) % 2 == 1, &mut period);
        }
        Address::periodic(Word::new(letters)?, Word::new(period)?)
    }

    /// `[[m, n], …]` for finite reps; `{head, cycle, shift}` otherwise.
    pub fn to_json(&self) -> Value {
        let pairs = |v: &[Exps]| v.iter().map(|&(m, n)| json!([m, n])).collect::<Vec<_>>();
        if self.is_finite() {
            json!(pairs(&self.head))
        } else {
            json!({
                "head": pairs(&self.head),
                "cycle": pairs(&self.cycle),
                "shift": [self.shift.0, self.shift.1],
            })
        }
    }

    pub fn from_json(v: &Value) -> Result<AltSumRep> {
        let bad = || Error::InvalidRep(v.to_string());
        let pairs = |x: &Value| -> Result<Vec<Exps>> {
            x.as_array()
                .ok_or_else(bad)?
                .iter()
                .map(|e| match e.as_array().map(|a| a.as_slice()) {
                    Some([m, n]) => Ok((
                        m.as_u64().ok_or_else(bad)? as u32,
                        n.as_u64().ok_or_else(bad)? as u32,
                    )),
                    _ => Err(bad()),
                })
                .collect()
        };
        if v.is_array() {
            return AltSumRep::finite(pairs(v)?);
        }
        let shift = pairs(&json!([v.get("shift").ok_or_else(bad)?]))?;
        AltSumRep::periodic(
            pairs(v.get("head").ok_or_else(bad)?)?,
            pairs(v.get("cycle").ok_or_else(bad)?)?,
            shift[0],
        )
    }
}

/// Transition terms of `letters`, given the class of the preceding letter
/// and the starting prefix exponent.
fn transitions(letters: &[u8], mut prev_h: bool, mut at: Exps, out: &mut Vec<Exps>) -> (bool, Exps) {
    for &l in letters {
        let h = is_h(l);
        if h != prev_h {
            out.push(at);
        }
        prev_h = h;
        at = step(at, l);
    }
    (prev_h, at)
}

/// Alternating-sum representation of `π(a)` for an eventually periodic address.
pub fn addr_to_altsum(a: &Address) -> Result<AltSumRep> {
    if !a.is_periodic() {
        return Err(Error::NotPeriodic);
    }
    let mut head = Vec::new();
    let (h, at) = transitions(a.preperiod.letters(), false, (0, 0), &mut head);
    let (h, at) = transitions(a.period.letters(), h, at, &mut head);
    let mut cycle = Vec::new();
    transitions(a.period.letters(), h, at, &mut cycle);
    if head.is_empty() && cycle.is_empty() {
        return Err(Error::NoRepresentation);
    }
    let shift = if cycle.is_empty() {
        (0, 0)
    } else {
        a.period.letters().iter().fold((0, 0), |e, &l| step(e, l))
    };
    AltSumRep::periodic(head, cycle, shift)
}

fn term_value<S: Scalar>(params: &Params<S>, e: Exps) -> S {
    params.p().powu(e.0) * params.q().powu(e.1)
}

fn signed_sum<S: Scalar>(params: &Params<S>, terms: &[Exps], first_index: usize) -> S {
    terms
        .iter()
        .enumerate()
        .fold(S::zero(), |acc, (i, &e)| {
            let t = term_value(params, e);
            if (first_index + i) % 2 == 0 {
                acc + t
            } else {
                acc - t
            }
        })
}

/// Closed-form value: `head + cycle / (1 - p^a q^b)`. Exact for rationals.
pub fn altsum_to_value<S: Scalar>(params: &Params<S>, rep: &AltSumRep) -> S {
    let head = signed_sum(params, &rep.head, 0);
    if rep.cycle.is_empty() {
        return head;
    }
    let cycle = signed_sum(params, &rep.cycle, rep.head.len());
    head + cycle / (S::one() - term_value(params, rep.shift))
}

/// Enclosure from the first `terms` terms and the alternating tail bound
/// (the remainder has the sign of the next term and is smaller in size).
pub fn altsum_enclosure<S: Scalar>(params: &Params<S>, rep: &AltSumRep, terms: usize) -> Span<S> {
    let mut partial = S::zero();
    let mut it = rep.terms().enumerate();
    for (k, e) in it.by_ref().take(terms) {
        let t = term_value(params, e);
        partial = if k % 2 == 0 { partial + t } else { partial - t };
    }
    match it.next() {
        None => Span::point(partial),
        Some((k, e)) => {
            let t = term_value(params, e);
            if k % 2 == 0 {
                Span::new(partial.clone(), partial + t)
            } else {
                Span::new(partial.clone() - t, partial)
            }
        }
    }
}

/// `f(x) = Σ (-1)^k p'^{m_k} q'^{n_k}`: the same exponents under `target`.
pub fn transport<S: Scalar>(rep: &AltSumRep, target: &Params<S>) -> S {
    altsum_to_value(target, rep)
}

/// Exponent pairs with `p^k q^l < p^m q^n` but `p'^k q'^l > p'^m q'^n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OrderWitness {
    pub kl: Exps,
    pub mn: Exps,
}

impl OrderWitness {
    pub fn max_exponent(&self) -> u32 {
        self.kl.0.max(self.kl.1).max(self.mn.0).max(self.mn.1)
    }

    /// Both strict inequalities, decided exactly for rationals.
    pub fn verify<S: Scalar>(&self, params: &Params<S>, target: &Params<S>) -> bool {
        let before = term_value(params, self.kl).certainly_lt(&term_value(params, self.mn));
        let after = term_value(target, self.mn).certainly_lt(&term_value(target, self.kl));
        before && after
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OrderSearch {
    Found(OrderWitness),
    /// No reversal with every exponent at most the budget.
    NotFound,
    /// `log p/log q = log p'/log q'` could not be excluded: monotonicity then
    /// fails only in a limit, without a finite witness.
    RequiresSupArgument,
}

/// Precision at which equal log ratios are reported instead of separated.
pub const MAX_LOG_BITS: u32 = 1024;

/// Smallest order reversal between the two parameter pairs.
///
/// With `x = ln p/ln q` and `x' = ln p'/ln q'`, the inequalities reduce to
/// `a x + b > 0 > a x' + b` for `a = k - m`, `b = l - n`. Any rational
/// `u/v` strictly between `x` and `x'` gives `(a, b) = ±(v, -u)`; the
/// simplest one minimizes the largest exponent.
pub fn order_violation_witness<S: Scalar>(
    params: &Params<S>,
    target: &Params<S>,
    max_exp: u32,
) -> Result<OrderSearch> {
    if params == target {
        return Ok(OrderSearch::NotFound);
    }
    let mut bits = 64;
    let (x, y) = loop {
        let x = log_ratio(params, bits)?;
        let y = log_ratio(target, bits)?;
        if x.hi < y.lo || y.hi < x.lo {
            break (x, y);
        }
        if bits >= MAX_LOG_BITS {
            return Ok(OrderSearch::RequiresSupArgument);
        }
        bits *= 2;
    };
    let target_below = y.hi < x.lo;
    let c = if target_below {
        cf::simplest_between(&y.hi, &x.lo)
    } else {
        cf::simplest_between(&x.hi, &y.lo)
    };
    let (u, v) = (c.numer().clone(), c.denom().clone());
    let too_big = |z: &num_bigint::BigInt| z > &num_bigint::BigInt::from(max_exp);
    if too_big(&u) || too_big(&v) {
        return Ok(OrderSearch::NotFound);
    }
    let u: u32 = u.try_into().map_err(|_| Error::Invalid("exponent overflow".into()))?;
    let v: u32 = v.try_into().map_err(|_| Error::Invalid("exponent overflow".into()))?;
    // x' < c < x: (a, b) = (v, -u); x < c < x': (a, b) = (-v, u)
    let w = if target_below {
        OrderWitness {
            kl: (v, 0),
            mn: (0, u),
        }
    } else {
        OrderWitness {
            kl: (0, u),
            mn: (v, 0),
        }
    };
    debug_assert!(S::MODE != crate::Mode::ExactRational || w.verify(params, target));
    Ok(OrderSearch::Found(w))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ifs::SimilaritySystem;
    use crate::{ExactParams, Rational};

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    fn params() -> ExactParams {
        ExactParams::parse("1/20", "1/50").unwrap()
    }

    fn rep(a: &str) -> AltSumRep {
        addr_to_altsum(&a.parse().unwrap()).unwrap()
    }

    #[test]
    fn codec_examples() {
        assert_eq!(rep("(3)"), AltSumRep::finite(vec![(0, 0)]).unwrap());
        assert_eq!(rep("4,(1)"), AltSumRep::finite(vec![(0, 0), (0, 1)]).unwrap());
        assert_eq!(rep("1,(3)"), AltSumRep::finite(vec![(1, 0)]).unwrap());
        assert_eq!(altsum_to_value(&params(), &rep("4,(1)")), r(49, 50));
        assert_eq!(addr_to_altsum(&"(1,2)".parse().unwrap()), Err(Error::NoRepresentation));
        assert_eq!(addr_to_altsum(&"1,3".parse().unwrap()), Err(Error::NotPeriodic));
    }

    #[test]
    fn periodic_closed_form_matches_address_point() {
        let sys = SimilaritySystem::new(params());
        for a in ["2,(3,1)", "(1,4,2)", "3,3,(4,1,1,3)", "(2,3)"] {
            let addr: Address = a.parse().unwrap();
            let x = sys.address_point(&addr).unwrap().lo;
            let rp = addr_to_altsum(&addr).unwrap();
            assert_eq!(altsum_to_value(&params(), &rp), x, "{a}");
            let back = rp.to_address().unwrap();
            assert_eq!(sys.address_point(&back).unwrap().lo, x, "{a} -> {back}");
            let enc = altsum_enclosure(&params(), &rp, 12);
            assert!(enc.lo <= x && x <= enc.hi);
        }
    }

    #[test]
    fn map_action_and_transport() {
        let p2 = ExactParams::parse("1/25", "1/60").unwrap();
        let sys2 = SimilaritySystem::new(p2.clone());
        let base = AltSumRep::finite(vec![(0, 1), (2, 1), (2, 3)]).unwrap();
        for i in 1..=4 {
            let lhs = transport(&base.apply_map(i).unwrap(), &p2);
            let rhs = sys2.map(i).apply(&transport(&base, &p2));
            assert_eq!(lhs, rhs, "map {i}");
        }
        let mono = AltSumRep::finite(vec![(3, 2)]).unwrap();
        assert_eq!(transport(&mono, &p2), r(1, 25).powu(3) * r(1, 60).powu(2));
    }

    #[test]
    fn json_round_trip() {
        for a in ["4,(1)", "2,(3,1)"] {
            let rp = rep(a);
            assert_eq!(AltSumRep::from_json(&rp.to_json()).unwrap(), rp);
        }
        assert!(AltSumRep::from_json(&json!([[1, 1], [0, 2]])).is_err());
    }

    #[test]
    fn rigidity_example() {
        let a = params();
        let b = ExactParams::parse("1/25", "1/50").unwrap();
        let OrderSearch::Found(w) = order_violation_witness(&a, &b, 200).unwrap() else {
            panic!("no witness")
        };
        assert_eq!(w, OrderWitness { kl: (0, 4), mn: (5, 0) });
        assert!(w.verify(&a, &b));
        assert_eq!(order_violation_witness(&a, &a, 200).unwrap(), OrderSearch::NotFound);
        assert_eq!(order_violation_witness(&a, &b, 4).unwrap(), OrderSearch::NotFound);
    }

    #[test]
    fn proportional_logs_need_the_limit_argument() {
        let a = ExactParams::parse("1/4", "1/8").unwrap_err();
        assert!(matches!(a, Error::OutOfRange { .. }));
        let a = ExactParams::parse("1/20", "1/50").unwrap();
        let b = ExactParams::parse("1/400", "1/2500").unwrap();
        assert_eq!(order_violation_witness(&a, &b, 200).unwrap(), OrderSearch::RequiresSupArgument);
    }
}
