//! Discounted LTL on ultimately periodic words, and the Boolean formulas
//! characterising values above 0 and below 1.

use std::collections::{BTreeSet, HashMap};

use crate::cgs::Cgs;
use crate::error::{Error, Result};
use crate::eval::{eval_until, eval_until_discounted};
use crate::formula::{self as f, Formula};
use crate::rational::{one, zero, Rational};
use crate::strategy::{lasso_from_successors, LassoPlay};

/// `letters[..loop_start] (letters[loop_start..])^omega`
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LassoWord {
    letters: Vec<BTreeSet<String>>,
    loop_start: usize,
}

impl LassoWord {
    pub fn new(letters: Vec<BTreeSet<String>>, loop_start: usize) -> Self {
        assert!(loop_start < letters.len(), "lasso loop must be non-empty");
        LassoWord {
            letters,
            loop_start,
        }
    }

    /// Convenience constructor from slices of proposition names.
    pub fn from_names(letters: &[&[&str]], loop_start: usize) -> Self {
        Self::new(
            letters
                .iter()
                .map(|l| l.iter().map(|p| p.to_string()).collect())
                .collect(),
            loop_start,
        )
    }

    /// The labels seen along a play.
    pub fn from_play(g: &Cgs, play: &LassoPlay) -> Self {
        Self::new(
            play.positions()
                .iter()
                .map(|&p| g.labels(p).clone())
                .collect(),
            play.loop_start(),
        )
    }

    pub fn letters(&self) -> &[BTreeSet<String>] {
        &self.letters
    }

    pub fn loop_start(&self) -> usize {
        self.loop_start
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// The word with one extra copy of its first letter in front.
    pub fn stutter(&self) -> Self {
        let mut letters = vec![self.letters[0].clone()];
        letters.extend(self.letters.iter().cloned());
        Self::new(letters, self.loop_start + 1)
    }
}

/// Value of an LTL[D] formula at the start of `w`.
pub fn eval_ltld(w: &LassoWord, phi: &Formula) -> Result<Rational> {
    if !phi.is_ltld() {
        return Err(Error::Unsupported(
            "quantifiers and bindings are not LTL[D]".into(),
        ));
    }
    let n = w.len();
    let succ: Vec<usize> = (0..n)
        .map(|i| if i + 1 < n { i + 1 } else { w.loop_start })
        .collect();
    let plays: Vec<LassoPlay> = (0..n).map(|i| lasso_from_successors(&succ, i)).collect();
    let mut memo = HashMap::new();
    Ok(index_values(w, &succ, &plays, phi, &mut memo)[0].clone())
}

/// Values at every index of the stored word. Index `i >= loop_start` stands
/// for all indices congruent to it along the cycle.
fn index_values<'a>(
    w: &LassoWord,
    succ: &[usize],
    plays: &[LassoPlay],
    phi: &'a Formula,
    memo: &mut HashMap<&'a Formula, Vec<Rational>>,
) -> Vec<Rational> {
    if let Some(v) = memo.get(phi) {
        return v.clone();
    }
    let n = w.len();
    let sub = |x: &'a Formula, memo: &mut HashMap<&'a Formula, Vec<Rational>>| {
        index_values(w, succ, plays, x, memo)
    };
    let v: Vec<Rational> = match phi {
        Formula::True => vec![one(); n],
        Formula::False => vec![zero(); n],
        Formula::Atom(p) => w
            .letters
            .iter()
            .map(|l| if l.contains(p) { one() } else { zero() })
            .collect(),
        Formula::Not(a) => sub(a, memo).into_iter().map(|x| one() - x).collect(),
        Formula::Or(a, b) => {
            let (va, vb) = (sub(a, memo), sub(b, memo));
            va.into_iter().zip(vb).map(|(x, y)| x.max(y)).collect()
        }
        Formula::Next(a) => {
            let va = sub(a, memo);
            (0..n).map(|i| va[succ[i]].clone()).collect()
        }
        Formula::Until(a, b) => {
            let (va, vb) = (sub(a, memo), sub(b, memo));
            plays.iter().map(|p| eval_until(p, &va, &vb)).collect()
        }
        Formula::UntilD(d, a, b) => {
            let (va, vb) = (sub(a, memo), sub(b, memo));
            plays
                .iter()
                .map(|p| eval_until_discounted(p, &d.func, &va, &vb))
                .collect()
        }
        Formula::Exists(..) | Formula::Bind { .. } => unreachable!("checked by caller"),
    };
    memo.insert(phi, v.clone());
    v
}

/// Boolean formula that holds exactly where `phi` has a value above 0.
pub fn posi(phi: &Formula) -> Result<Formula> {
    Ok(match phi {
        Formula::True | Formula::False | Formula::Atom(_) => phi.clone(),
        Formula::Not(a) => notone(a)?,
        Formula::Or(a, b) => f::or(posi(a)?, posi(b)?),
        Formula::Next(a) => f::next(posi(a)?),
        Formula::Until(a, b) => f::until(posi(a)?, posi(b)?),
        Formula::UntilD(d, a, b) => {
            if !d.func.is_strictly_positive() {
                return Err(Error::Unsupported(format!("discount `{d}` reaches zero")));
            }
            f::until(posi(a)?, posi(b)?)
        }
        Formula::Bind { agent, var, body } => f::bind(agent.clone(), var.clone(), posi(body)?),
        Formula::Exists(..) => return Err(Error::Unsupported("strategy quantifier".into())),
    })
}

/// Boolean formula that holds exactly where `phi` has a value below 1.
pub fn notone(phi: &Formula) -> Result<Formula> {
    Ok(match phi {
        Formula::True => Formula::False,
        Formula::False => Formula::True,
        Formula::Atom(_) => f::not(phi.clone()),
        Formula::Not(a) => posi(a)?,
        Formula::Or(a, b) => f::and(notone(a)?, notone(b)?),
        Formula::Next(a) => f::next(notone(a)?),
        // value 1 needs some index where the right side is 1 and the left
        // side is 1 before it
        Formula::Until(a, b) => neg(f::until(neg(notone(a)?), neg(notone(b)?))),
        Formula::UntilD(d, a, b) => {
            if !d.func.is_strictly_positive() {
                return Err(Error::Unsupported(format!("discount `{d}` reaches zero")));
            }
            // a discounted candidate can only reach 1 while d is still 1
            match d.func.leading_ones() {
                0 => Formula::True,
                1 => notone(b)?,
                m => {
                    let one_a = neg(notone(a)?);
                    let one_b = neg(notone(b)?);
                    let cases = (0..m)
                        .map(|i| {
                            let mut parts = vec![nexts(i, one_b.clone())];
                            parts.extend((0..i).map(|j| nexts(j, one_a.clone())));
                            f::and_all(parts)
                        })
                        .reduce(f::or)
                        .expect("m >= 2");
                    neg(cases)
                }
            }
        }
        Formula::Bind { agent, var, body } => f::bind(agent.clone(), var.clone(), notone(body)?),
        Formula::Exists(..) => return Err(Error::Unsupported("strategy quantifier".into())),
    })
}

fn neg(phi: Formula) -> Formula {
    match phi {
        Formula::Not(inner) => *inner,
        Formula::True => Formula::False,
        Formula::False => Formula::True,
        other => f::not(other),
    }
}

fn nexts(k: u64, phi: Formula) -> Formula {
    (0..k).fold(phi, |acc, _| f::next(acc))
}
