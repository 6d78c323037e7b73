use std::collections::BTreeMap;

use rand_core::{RngCore, SeedableRng};
use rand_xoshiro::SplitMix64;

use super::field::PrimeField;
use crate::pattern::{PatternMatrix, VariableId};

/// Seeded values for the pattern variables.
///
/// Values come from a SplitMix64 stream seeded with `seed`, one draw per
/// variable in lexicographic order of `(t, s, reduced tuple)`, mapped to
/// `1 + draw mod (p - 1)`. The same seed, prime and variable list always
/// give the same assignment.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RandomAssignment {
    seed: u64,
    field: PrimeField,
    values: BTreeMap<VariableId, u64>,
}

impl RandomAssignment {
    pub fn generate(pm: &PatternMatrix, seed: u64, field: PrimeField) -> Self {
        Self::for_variables(pm.variables().iter().cloned(), seed, field)
    }

    /// Draws values for an arbitrary variable list; the list is sorted
    /// first so the draw order does not depend on the caller.
    pub fn for_variables(
        vars: impl IntoIterator<Item = VariableId>,
        seed: u64,
        field: PrimeField,
    ) -> Self {
        let mut vars: Vec<VariableId> = vars.into_iter().collect();
        vars.sort();
        vars.dedup();
        let mut rng = SplitMix64::seed_from_u64(seed);
        let p = field.modulus();
        let values = vars
            .into_iter()
            .map(|v| {
                let value = if p == 2 {
                    1
                } else {
                    1 + rng.next_u64() % (p - 1)
                };
                (v, value)
            })
            .collect();
        Self {
            seed,
            field,
            values,
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn get(&self, var: &VariableId) -> Option<u64> {
        self.values.get(var).copied()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Replaces one value. Unlike generated values this may be zero, which
    /// is how negative controls specialise a variable away.
    pub fn set(&mut self, var: VariableId, value: u64) {
        self.values.insert(var, value % self.field.modulus());
    }
}
