use super::BooleanFunction;
use crate::error::{JuntaError, Result};
use std::sync::atomic::{AtomicU64, Ordering};

/// Query-counted access to a truth table.
///
/// The counter is atomic, so one oracle may be shared by several workers.
#[derive(Debug)]
pub struct FunctionOracle<'a> {
    target: &'a BooleanFunction,
    used: AtomicU64,
    budget: Option<u64>,
}

impl<'a> FunctionOracle<'a> {
    pub fn new(target: &'a BooleanFunction) -> Self {
        FunctionOracle {
            target,
            used: AtomicU64::new(0),
            budget: None,
        }
    }

    pub fn with_budget(target: &'a BooleanFunction, budget: u64) -> Self {
        FunctionOracle {
            target,
            used: AtomicU64::new(0),
            budget: Some(budget),
        }
    }

    pub fn n(&self) -> usize {
        self.target.n()
    }

    pub fn queries_used(&self) -> u64 {
        self.used.load(Ordering::Relaxed)
    }

    pub fn budget(&self) -> Option<u64> {
        self.budget
    }

    /// Evaluates `f(x) = +1` as `true`, counting one query.
    #[inline]
    pub fn query(&self, x: u32) -> Result<bool> {
        match self.budget {
            None => {
                self.used.fetch_add(1, Ordering::Relaxed);
            }
            Some(budget) => {
                self.used
                    .fetch_update(Ordering::Relaxed, Ordering::Relaxed, |q| {
                        (q < budget).then_some(q + 1)
                    })
                    .map_err(|_| JuntaError::BudgetExhausted { budget })?;
            }
        }
        Ok(self.target.bit(x))
    }

    /// Evaluates `f(x) ∈ {−1, +1}`, counting one query.
    pub fn evaluate(&self, x: u32) -> Result<i8> {
        if (x as usize) >= self.target.size() {
            return Err(JuntaError::IndexOutOfRange {
                index: x as usize,
                bound: self.target.size(),
            });
        }
        Ok(if self.query(x)? { 1 } else { -1 })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_each_call() {
        let f = BooleanFunction::constant(3, true).unwrap();
        let o = FunctionOracle::new(&f);
        for x in 0..8 {
            assert_eq!(o.evaluate(x).unwrap(), 1);
        }
        assert_eq!(o.queries_used(), 8);
        assert!(o.evaluate(8).is_err());
        assert_eq!(o.queries_used(), 8);
    }

    #[test]
    fn budget_is_enforced() {
        let f = BooleanFunction::constant(2, false).unwrap();
        let o = FunctionOracle::with_budget(&f, 3);
        for _ in 0..3 {
            assert_eq!(o.evaluate(1).unwrap(), -1);
        }
        assert_eq!(
            o.evaluate(1),
            Err(JuntaError::BudgetExhausted { budget: 3 })
        );
        assert_eq!(o.queries_used(), 3);
    }
}
