//! Numeric cross-checks of the symbolic results.
//!
//! A specialization can only lower the rank, so a single random point with
//! rank at least `expected` proves the generic rank is at least `expected`.
//! A point below `expected` proves nothing; such trials are only reported.
//! Over F_p this witnesses the lower bound only; statements that need
//! characteristic zero are out of reach of these checks.

use std::collections::BTreeMap;

use rand_core::{RngCore, SeedableRng};
use rand_xoshiro::SplitMix64;

use super::assignment::RandomAssignment;
use super::field::PrimeField;
use super::matrix::{determinant_mod_p, rank_mod_p, ModularMatrix};
use crate::certificate::{Certificate, Verdict};
use crate::combinatorics::{is_admissible, TensorShape};
use crate::error::{Error, Result};
use crate::pattern::{slot_counts, PatternMatrix, VariableId};

/// Largest square minor expanded term by term.
pub const MAX_BRUTE_FORCE_SIZE: usize = 8;

/// Substitutes the assignment into the pattern.
pub fn instantiate(pm: &PatternMatrix, assignment: &RandomAssignment) -> Result<ModularMatrix> {
    let values: Vec<u64> = pm
        .variables()
        .iter()
        .map(|v| {
            assignment
                .get(v)
                .ok_or_else(|| Error::MissingVariable(v.to_string()))
        })
        .collect::<Result<_>>()?;
    let values = &values;
    let triplets = (0..pm.n_rows()).flat_map(|i| {
        pm.row_entries(i)
            .iter()
            .map(move |&(j, v)| (i, j, values[v]))
    });
    ModularMatrix::from_triplets(pm.n_rows(), pm.n_cols(), assignment.field(), triplets)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrialRank {
    pub seed: u64,
    pub rank: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankReport {
    pub ok: bool,
    pub expected: usize,
    pub max_rank: usize,
    /// Trials in the order they ran; stops after the first success.
    pub trials: Vec<TrialRank>,
    pub detail: String,
}

impl RankReport {
    pub fn verdict(&self) -> Verdict {
        if self.ok {
            Verdict::pass(self.detail.clone())
        } else {
            Verdict::fail(self.detail.clone(), None)
        }
    }
}

/// Tries up to `trials` seeds `base_seed, base_seed + 1, ...` and succeeds
/// as soon as one instantiation has rank at least `expected`.
pub fn verify_generic_rank(
    pm: &PatternMatrix,
    expected: usize,
    trials: usize,
    p: u64,
    base_seed: u64,
) -> Result<RankReport> {
    let field = PrimeField::new(p)?;
    if trials == 0 {
        return Err(Error::Structural("at least one trial is required".into()));
    }
    let mut runs = Vec::new();
    let mut max_rank = 0;
    for i in 0..trials as u64 {
        let seed = base_seed.wrapping_add(i);
        let m = instantiate(pm, &RandomAssignment::generate(pm, seed, field))?;
        let rank = rank_mod_p(&m);
        max_rank = max_rank.max(rank);
        runs.push(TrialRank { seed, rank });
        if rank >= expected {
            break;
        }
    }
    let ok = max_rank >= expected;
    let detail = if ok {
        format!(
            "rank {max_rank} >= {expected} on a {}x{} instance mod {p}",
            pm.n_rows(),
            pm.n_cols()
        )
    } else {
        format!(
            "max rank {max_rank} < {expected} over {} trials on a {}x{} instance mod {p} (inconclusive)",
            runs.len(),
            pm.n_rows(),
            pm.n_cols()
        )
    };
    Ok(RankReport {
        ok,
        expected,
        max_rank,
        trials: runs,
        detail,
    })
}

/// Column positions of the certificate's square minor, sorted.
pub fn certificate_columns(pm: &PatternMatrix, cert: &Certificate) -> Result<Vec<usize>> {
    let mut cols = cert
        .columns()
        .iter()
        .map(|c| {
            pm.col_position(c)
                .ok_or_else(|| Error::Structural(format!("column {c} not in pattern")))
        })
        .collect::<Result<Vec<_>>>()?;
    cols.sort_unstable();
    cols.dedup();
    if cols.len() != pm.n_rows() {
        return Err(Error::Structural(format!(
            "certificate selects {} columns for {} rows",
            cols.len(),
            pm.n_rows()
        )));
    }
    Ok(cols)
}

pub fn minor_determinant_check(
    pm: &PatternMatrix,
    cert: &Certificate,
    p: u64,
    seed: u64,
) -> Result<Verdict> {
    let field = PrimeField::new(p)?;
    minor_determinant_check_with(pm, cert, &RandomAssignment::generate(pm, seed, field))
}

/// Determinant of the rows-by-certificate-columns minor under `assignment`.
pub fn minor_determinant_check_with(
    pm: &PatternMatrix,
    cert: &Certificate,
    assignment: &RandomAssignment,
) -> Result<Verdict> {
    let cols = certificate_columns(pm, cert)?;
    let minor = instantiate(pm, assignment)?.select_columns(&cols);
    let det = determinant_mod_p(&minor)?;
    Ok(if det != 0 {
        Verdict::pass(format!(
            "{0}x{0} minor has determinant {det} (nonzero)",
            cols.len()
        ))
    } else {
        Verdict::fail(
            format!("{0}x{0} minor vanishes at this point", cols.len()),
            None,
        )
    })
}

/// How a monomial arises in the permutation expansion of a determinant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MonomialExpansion {
    /// Permutations whose product is the monomial.
    pub terms: usize,
    /// Sum of their signs.
    pub coefficient: i64,
}

/// Expands `det(matrix)` over all permutations and collects the terms equal
/// to `monomial` (variable -> power). Zero entries are `None`.
pub fn expand_monomial<V: Ord + Clone>(
    matrix: &[Vec<Option<V>>],
    monomial: &BTreeMap<V, u32>,
) -> Result<MonomialExpansion> {
    let n = matrix.len();
    if matrix.iter().any(|row| row.len() != n) {
        return Err(Error::Structural("matrix is not square".into()));
    }
    if n > MAX_BRUTE_FORCE_SIZE {
        return Err(Error::TooLarge(format!(
            "{n}x{n} exceeds the {MAX_BRUTE_FORCE_SIZE}x{MAX_BRUTE_FORCE_SIZE} expansion bound"
        )));
    }
    let mut out = MonomialExpansion {
        terms: 0,
        coefficient: 0,
    };
    let mut perm = Vec::with_capacity(n);
    let mut used = vec![false; n];
    let mut product: BTreeMap<V, u32> = BTreeMap::new();
    expand_rec(
        matrix,
        monomial,
        0,
        &mut perm,
        &mut used,
        &mut product,
        &mut out,
    );
    Ok(out)
}

fn expand_rec<V: Ord + Clone>(
    matrix: &[Vec<Option<V>>],
    target: &BTreeMap<V, u32>,
    row: usize,
    perm: &mut Vec<usize>,
    used: &mut [bool],
    product: &mut BTreeMap<V, u32>,
    out: &mut MonomialExpansion,
) {
    let n = matrix.len();
    if row == n {
        if product == target {
            let inversions = (0..n)
                .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
                .filter(|&(i, j)| perm[i] > perm[j])
                .count();
            out.terms += 1;
            out.coefficient += if inversions % 2 == 0 { 1 } else { -1 };
        }
        return;
    }
    for col in 0..n {
        if used[col] {
            continue;
        }
        let Some(var) = &matrix[row][col] else {
            continue;
        };
        let power = product.entry(var.clone()).or_insert(0);
        *power += 1;
        // prune once a power overshoots the target
        if *power <= target.get(var).copied().unwrap_or(0) {
            used[col] = true;
            perm.push(col);
            expand_rec(matrix, target, row + 1, perm, used, product, out);
            perm.pop();
            used[col] = false;
        }
        let power = product.get_mut(var).expect("just inserted");
        *power -= 1;
        if *power == 0 {
            product.remove(var);
        }
    }
}

/// Passes iff `monomial` comes from exactly one permutation, so its
/// coefficient is +1 or -1.
pub fn unique_in_determinant<V: Ord + Clone>(
    matrix: &[Vec<Option<V>>],
    monomial: &BTreeMap<V, u32>,
) -> Result<Verdict> {
    let e = expand_monomial(matrix, monomial)?;
    Ok(if e.terms == 1 {
        Verdict::pass(format!("unique term with coefficient {}", e.coefficient))
    } else {
        Verdict::fail(
            format!("{} terms, total coefficient {}", e.terms, e.coefficient),
            None,
        )
    })
}

/// The certificate's square minor with symbolic entries.
pub fn symbolic_minor(
    pm: &PatternMatrix,
    cert: &Certificate,
) -> Result<Vec<Vec<Option<VariableId>>>> {
    let cols = certificate_columns(pm, cert)?;
    Ok((0..pm.n_rows())
        .map(|i| cols.iter().map(|&j| pm.entry(i, j).cloned()).collect())
        .collect())
}

pub fn brute_force_uniqueness(pm: &PatternMatrix, cert: &Certificate) -> Result<Verdict> {
    if pm.n_rows() > MAX_BRUTE_FORCE_SIZE {
        return Err(Error::TooLarge(format!(
            "{} rows exceed the expansion bound {MAX_BRUTE_FORCE_SIZE}",
            pm.n_rows()
        )));
    }
    let minor = symbolic_minor(pm, cert)?;
    let mut monomial = BTreeMap::new();
    for f in &cert.monomial {
        *monomial.entry(f.var.clone()).or_insert(0) += f.power;
    }
    unique_in_determinant(&minor, &monomial)
}

/// Lexicographic enumeration of `[r]^len`.
fn all_tuples(r: usize, len: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::with_capacity(len)];
    for _ in 0..len {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                (1..=r).map(move |v| {
                    let mut next = prefix.clone();
                    next.push(v);
                    next
                })
            })
            .collect();
    }
    out
}

/// Vectors spanning the tangent-image subspace inside `K^{n_1 x ... x n_k}`.
#[derive(Debug, Clone)]
pub struct SpanningSet {
    ambient: usize,
    field: PrimeField,
    vectors: Vec<Vec<(usize, u64)>>,
}

/// Upper bound on `prod n_i` for the dense subspace oracle.
pub const MAX_AMBIENT: usize = 20_000;

impl SpanningSet {
    /// Unit vectors for every coordinate outside `[r]^k` and for the
    /// diagonal of `[r]^k`; unit vectors for every non-admissible coordinate
    /// of `[r]^k`; and for each `(t, m, s)` the vector that places seeded
    /// generic slice values `x^{t,s}(c)` at the coordinate obtained by
    /// inserting `m` at position `t` of `c`, for all `c` in `[r]^{k-1}`.
    pub fn build(shape: &TensorShape, r: usize, field: PrimeField, seed: u64) -> Result<Self> {
        let slots = slot_counts(r, shape)?;
        let dims = shape.dims();
        let k = dims.len();
        let ambient = shape
            .product()
            .filter(|&n| n <= MAX_AMBIENT as u128)
            .ok_or_else(|| {
                Error::TooLarge(format!("ambient space of {shape} exceeds {MAX_AMBIENT}"))
            })? as usize;
        let mut strides = vec![1usize; k];
        for i in (0..k - 1).rev() {
            strides[i] = strides[i + 1] * dims[i + 1];
        }
        let flat = |coords: &[usize]| -> usize {
            coords.iter().zip(&strides).map(|(c, s)| (c - 1) * s).sum()
        };

        let mut vectors = Vec::new();
        let mut coords = vec![1usize; k];
        for _ in 0..ambient {
            let inside = coords.iter().all(|&c| c <= r);
            let diagonal = inside && coords.iter().all(|&c| c == coords[0]);
            if !inside || diagonal {
                vectors.push(vec![(flat(&coords), 1)]);
            }
            if inside && !is_admissible(&coords, r) {
                vectors.push(vec![(flat(&coords), 1)]);
            }
            for pos in (0..k).rev() {
                if coords[pos] < dims[pos] {
                    coords[pos] += 1;
                    break;
                }
                coords[pos] = 1;
            }
        }

        let reduced = all_tuples(r, k - 1);
        let mut rng = SplitMix64::seed_from_u64(seed);
        let p = field.modulus();
        for (t0, &width) in slots.iter().enumerate() {
            for _s in 1..=width {
                let values: Vec<u64> = reduced
                    .iter()
                    .map(|_| {
                        if p == 2 {
                            1
                        } else {
                            1 + rng.next_u64() % (p - 1)
                        }
                    })
                    .collect();
                for m in 1..=r {
                    let mut v: Vec<(usize, u64)> = reduced
                        .iter()
                        .zip(&values)
                        .map(|(c, &x)| {
                            let mut full = c.clone();
                            full.insert(t0, m);
                            (flat(&full), x)
                        })
                        .collect();
                    v.sort_unstable();
                    vectors.push(v);
                }
            }
        }
        Ok(Self {
            ambient,
            field,
            vectors,
        })
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn rank(&self) -> usize {
        let triplets = self
            .vectors
            .iter()
            .enumerate()
            .flat_map(|(i, v)| v.iter().map(move |&(j, x)| (i, j, x)));
        let m =
            ModularMatrix::from_triplets(self.vectors.len(), self.ambient, self.field, triplets)
                .expect("spanning vectors are well formed");
        rank_mod_p(&m)
    }
}

/// Dimension of the span of [`SpanningSet::build`].
pub fn subspace_dimension_oracle(
    shape: &TensorShape,
    r: usize,
    p: u64,
    seed: u64,
) -> Result<usize> {
    let field = PrimeField::new(p)?;
    Ok(SpanningSet::build(shape, r, field, seed)?.rank())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::certificate::{find_certificate, validate};
    use crate::pattern::build_pattern;
    use crate::rank::field::MERSENNE_61;
    use crate::rank::matrix::rank_mod_p_incremental;
    use std::collections::HashMap;

    fn pattern(r: usize, dims: &[usize]) -> PatternMatrix {
        build_pattern(r, &TensorShape::new(dims.to_vec()).unwrap()).unwrap()
    }

    fn instantiated_values(pm: &PatternMatrix, m: &ModularMatrix) -> HashMap<(usize, usize), u64> {
        (0..pm.n_rows())
            .flat_map(|i| {
                pm.row_entries(i)
                    .iter()
                    .map(move |&(j, _)| ((i, j), m.get(i, j)))
            })
            .collect()
    }

    fn mersenne() -> PrimeField {
        PrimeField::new(MERSENNE_61).unwrap()
    }

    #[test]
    fn instantiate_shapes() {
        let pm = pattern(2, &[3, 3, 3]);
        let m = instantiate(&pm, &RandomAssignment::generate(&pm, 0, mersenne())).unwrap();
        assert_eq!((m.n_rows(), m.n_cols(), m.nnz()), (0, 6, 0));

        let pm = pattern(4, &[6, 6, 6]);
        let mut ones = RandomAssignment::generate(&pm, 0, mersenne());
        for v in pm.variables() {
            ones.set(v.clone(), 1);
        }
        let m = instantiate(&pm, &ones).unwrap();
        for i in 0..m.n_rows() {
            assert_eq!(m.row(i).len(), 6);
            assert!(m.row(i).iter().all(|e| e.1 == 1));
        }

        let a = instantiate(&pm, &RandomAssignment::generate(&pm, 1, mersenne())).unwrap();
        let b = instantiate(&pm, &RandomAssignment::generate(&pm, 2, mersenne())).unwrap();
        assert_ne!(a, b);
        assert_eq!(instantiated_values(&pm, &a).len(), 144);
        assert!(instantiated_values(&pm, &a).values().all(|&v| v != 0));
    }

    #[test]
    fn missing_variable() {
        let pm = pattern(3, &[4, 4, 4]);
        let empty = RandomAssignment::for_variables([], 0, mersenne());
        assert!(matches!(
            instantiate(&pm, &empty),
            Err(Error::MissingVariable(_))
        ));
    }

    #[test]
    fn generic_rank_examples() {
        let r4 = verify_generic_rank(&pattern(4, &[6, 6, 6]), 24, 3, MERSENNE_61, 0).unwrap();
        assert!(r4.ok);
        assert_eq!(r4.max_rank, 24);

        let r3 = verify_generic_rank(&pattern(3, &[4, 4, 4]), 6, 3, MERSENNE_61, 0).unwrap();
        assert!(r3.ok);

        let r5 = verify_generic_rank(&pattern(5, &[6, 6, 6]), 60, 3, MERSENNE_61, 0).unwrap();
        assert!(!r5.ok);
        assert!(r5.max_rank <= 15);
        assert_eq!(r5.trials.len(), 3);

        assert!(matches!(
            verify_generic_rank(&pattern(3, &[4, 4, 4]), 6, 1, 91, 0),
            Err(Error::NotPrime(91))
        ));
    }

    #[test]
    fn rank_routes_agree_on_pattern() {
        let pm = pattern(4, &[6, 6, 6]);
        for seed in 0..3 {
            let m = instantiate(&pm, &RandomAssignment::generate(&pm, seed, mersenne())).unwrap();
            assert_eq!(rank_mod_p(&m), 24);
            assert_eq!(rank_mod_p_incremental(&m), 24);
        }
    }

    #[test]
    fn minor_checks() {
        let pm = pattern(3, &[4, 4, 4]);
        let cert = find_certificate(&pm).unwrap();
        assert!(validate(&pm, &cert).ok);
        assert!(
            minor_determinant_check(&pm, &cert, MERSENNE_61, 0)
                .unwrap()
                .ok
        );

        // zero out a whole row of the minor: the determinant must vanish
        let minor = symbolic_minor(&pm, &cert).unwrap();
        let mut assignment = RandomAssignment::generate(&pm, 0, mersenne());
        for var in minor[0].iter().flatten() {
            assignment.set(var.clone(), 0);
        }
        assert!(
            !minor_determinant_check_with(&pm, &cert, &assignment)
                .unwrap()
                .ok
        );

        let empty = pattern(2, &[3, 3, 3]);
        let cert = find_certificate(&empty).unwrap();
        assert!(
            minor_determinant_check(&empty, &cert, MERSENNE_61, 0)
                .unwrap()
                .ok
        );
    }

    #[test]
    fn minor_needs_square_selection() {
        let pm = pattern(3, &[4, 4, 4]);
        let mut cert = find_certificate(&pm).unwrap();
        cert.steps.pop();
        assert!(matches!(
            minor_determinant_check(&pm, &cert, MERSENNE_61, 0),
            Err(Error::Structural(_))
        ));
    }

    #[test]
    fn expansion_small_cases() {
        let one = vec![vec![Some("a1")]];
        let mono: BTreeMap<&str, u32> = [("a1", 1)].into();
        assert!(unique_in_determinant(&one, &mono).unwrap().ok);

        // [[a, b], [b, a]]: a^2 once, b^2 once, ab never
        let m = vec![vec![Some("a"), Some("b")], vec![Some("b"), Some("a")]];
        let e = expand_monomial(&m, &[("a", 2)].into()).unwrap();
        assert_eq!((e.terms, e.coefficient), (1, 1));
        let e = expand_monomial(&m, &[("b", 2)].into()).unwrap();
        assert_eq!((e.terms, e.coefficient), (1, -1));
        let e = expand_monomial(&m, &[("a", 1), ("b", 1)].into()).unwrap();
        assert_eq!(e.terms, 0);

        // [[a, a], [a, a]]: a^2 twice with opposite signs
        let m = vec![vec![Some("a"), Some("a")], vec![Some("a"), Some("a")]];
        let e = expand_monomial(&m, &[("a", 2)].into()).unwrap();
        assert_eq!((e.terms, e.coefficient), (2, 0));
        assert!(!unique_in_determinant(&m, &[("a", 2)].into()).unwrap().ok);

        let big = vec![vec![Some(1u8); 9]; 9];
        assert!(matches!(
            expand_monomial(&big, &BTreeMap::new()),
            Err(Error::TooLarge(_))
        ));
    }

    #[test]
    fn brute_force_bound() {
        let pm = pattern(4, &[6, 6, 6]);
        let cert = find_certificate(&pm).unwrap();
        assert!(matches!(
            brute_force_uniqueness(&pm, &cert),
            Err(Error::TooLarge(_))
        ));
    }

    #[test]
    fn subspace_small_cases() {
        let s = |d: &[usize]| TensorShape::new(d.to_vec()).unwrap();
        assert_eq!(
            subspace_dimension_oracle(&s(&[2, 2, 2]), 1, MERSENNE_61, 0).unwrap(),
            8
        );
        assert_eq!(
            subspace_dimension_oracle(&s(&[3, 3, 3]), 3, MERSENNE_61, 0).unwrap(),
            21
        );
        assert_eq!(
            subspace_dimension_oracle(&s(&[4, 3, 3]), 3, MERSENNE_61, 0).unwrap(),
            33
        );
        let set = SpanningSet::build(&s(&[3, 3, 3]), 3, mersenne(), 0).unwrap();
        assert_eq!(set.ambient(), 27);
        // 3 diagonal units from Y, 21 units from W, no slice vectors
        assert_eq!(set.len(), 24);
    }
}
