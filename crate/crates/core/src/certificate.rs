//! Crossing-out certificates for generic full row rank.
//!
//! A certificate is an ordered list of steps. Each step names a variable and
//! the cells where it still occurs in the not-yet-crossed submatrix; those
//! rows and columns are then crossed. If every row ends up crossed, the
//! product of the step variables raised to their multiplicities is a
//! monomial that occurs in exactly one term of one maximal minor, so the
//! pattern has full row rank for generic values.
//!
//! [`find_certificate`] builds one by crossing whole maximal uncrossed
//! blocks; [`validate`] replays a certificate from scratch without sharing
//! any state with the search.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::combinatorics::{
    enumerate_orbits, maximal_uncrossed_block, orbit_of, Block, Orbit, RowIndex, TensorShape,
};
use crate::error::{Error, Result};
use crate::pattern::{ColIndex, PatternMatrix, VariableId};

/// One crossing step: `rows[i]` and `cols[i]` locate the i-th occurrence.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Step {
    #[serde(rename = "var")]
    pub variable: VariableId,
    pub rows: Vec<RowIndex>,
    pub cols: Vec<ColIndex>,
}

impl Step {
    pub fn multiplicity(&self) -> usize {
        self.rows.len()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct MonomialFactor {
    pub var: VariableId,
    pub power: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub r: usize,
    #[serde(rename = "dims")]
    pub shape: TensorShape,
    pub steps: Vec<Step>,
    /// Factors in step order.
    pub monomial: Vec<MonomialFactor>,
}

impl Certificate {
    pub fn from_steps(r: usize, shape: TensorShape, steps: Vec<Step>) -> Self {
        let monomial = steps
            .iter()
            .map(|s| MonomialFactor {
                var: s.variable.clone(),
                power: s.multiplicity() as u32,
            })
            .collect();
        Self {
            r,
            shape,
            steps,
            monomial,
        }
    }

    pub fn degree(&self) -> u64 {
        self.monomial.iter().map(|f| u64::from(f.power)).sum()
    }

    /// Distinct crossed columns in step order.
    pub fn columns(&self) -> Vec<ColIndex> {
        self.steps
            .iter()
            .flat_map(|s| s.cols.iter().copied())
            .collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("certificate serialization cannot fail")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verdict {
    pub ok: bool,
    pub detail: String,
    pub first_failing_step: Option<usize>,
}

impl Verdict {
    pub fn pass(detail: impl Into<String>) -> Self {
        Self {
            ok: true,
            detail: detail.into(),
            first_failing_step: None,
        }
    }

    pub fn fail(detail: impl Into<String>, step: Option<usize>) -> Self {
        let detail = detail.into();
        debug_assert!(!detail.is_empty());
        Self {
            ok: false,
            detail,
            first_failing_step: step,
        }
    }
}

/// Mutable bookkeeping for a crossing run over one pattern.
#[derive(Debug, Clone)]
pub struct CrossState {
    crossed_rows: Vec<bool>,
    crossed_cols: Vec<bool>,
    crossed_orbits: HashSet<Orbit>,
    remaining_slots: Vec<BTreeSet<usize>>,
    rows_crossed: usize,
    cols_crossed: usize,
}

impl CrossState {
    pub fn new(pm: &PatternMatrix) -> Self {
        let k = pm.shape().order();
        Self {
            crossed_rows: vec![false; pm.n_rows()],
            crossed_cols: vec![false; pm.n_cols()],
            crossed_orbits: HashSet::new(),
            remaining_slots: (1..=k).map(|t| (1..=pm.slots(t)).collect()).collect(),
            rows_crossed: 0,
            cols_crossed: 0,
        }
    }

    pub fn crossed_orbits(&self) -> &HashSet<Orbit> {
        &self.crossed_orbits
    }

    /// Slots `s` of direction `t` whose columns `(t, *, s)` are all uncrossed.
    pub fn remaining_slots(&self, t: usize) -> &BTreeSet<usize> {
        &self.remaining_slots[t - 1]
    }

    pub fn rows_crossed(&self) -> usize {
        self.rows_crossed
    }

    pub fn cols_crossed(&self) -> usize {
        self.cols_crossed
    }

    pub fn is_row_crossed(&self, i: usize) -> bool {
        self.crossed_rows[i]
    }

    pub fn is_col_crossed(&self, j: usize) -> bool {
        self.crossed_cols[j]
    }

    fn dump(&self, pm: &PatternMatrix) -> String {
        let mut orbits: Vec<String> = self
            .crossed_orbits
            .iter()
            .map(|o| o.canonical().to_string())
            .collect();
        orbits.sort();
        let slots: Vec<String> = self
            .remaining_slots
            .iter()
            .enumerate()
            .map(|(t, s)| format!("S_{}={:?}", t + 1, s))
            .collect();
        format!(
            "rows crossed {}/{}, cols crossed {}/{}, crossed orbits [{}], {}",
            self.rows_crossed,
            pm.n_rows(),
            self.cols_crossed,
            pm.n_cols(),
            orbits.join(" "),
            slots.join(" ")
        )
    }
}

/// Crosses exactly the rows of `block` and the columns `(t, m, s)` for
/// `s` in `slots`, one variable at a time.
///
/// Columns are visited slot by slot and, within a slot, by increasing `m`.
/// Each orbit of the block meets a column in exactly one row; in every
/// still-uncrossed column the uncrossed row from the earliest orbit of the
/// block supplies the variable, and every uncrossed occurrence of that
/// variable is crossed with it.
pub fn cross_block(
    pm: &PatternMatrix,
    state: &mut CrossState,
    block: &Block,
    slots: &[usize],
) -> Result<Vec<Step>> {
    let t = block.direction();
    let r = pm.r();
    let Some(first) = block.orbits().first() else {
        if slots.is_empty() {
            return Ok(Vec::new());
        }
        return Err(Error::InvalidSlots(
            "empty block needs an empty slot set".into(),
        ));
    };
    if t == 0 || t > pm.shape().order() {
        return Err(Error::Structural(format!("direction {t} out of range")));
    }
    let expected = maximal_uncrossed_block(first, t, &state.crossed_orbits)?;
    if &expected != block {
        return Err(Error::Structural(format!(
            "block through {} is not maximal uncrossed in direction {t}",
            first.canonical()
        )));
    }

    let mut sorted_slots = slots.to_vec();
    sorted_slots.sort_unstable();
    sorted_slots.dedup();
    if sorted_slots.len() != slots.len() || slots.len() != block.size() {
        return Err(Error::InvalidSlots(format!(
            "need {} distinct slots, got {slots:?}",
            block.size()
        )));
    }
    let mut columns = Vec::with_capacity(r * slots.len());
    for &s in &sorted_slots {
        if !state.remaining_slots(t).contains(&s) {
            return Err(Error::InvalidSlots(format!(
                "slot {s} of direction {t} is not available"
            )));
        }
        for m in 1..=r {
            let j = pm
                .col_position(&ColIndex::new(t, m, s))
                .ok_or_else(|| Error::InvalidSlots(format!("slot {s} out of range")))?;
            if state.crossed_cols[j] {
                return Err(Error::InvalidSlots(format!(
                    "column {} already crossed",
                    pm.col(j)
                )));
            }
            columns.push(j);
        }
    }

    // row position -> index of its orbit within the block
    let block_rows: HashMap<usize, usize> = block
        .orbits()
        .iter()
        .enumerate()
        .flat_map(|(rank, o)| {
            o.members().into_iter().map(move |p| {
                (
                    pm.row_position(&p).expect("block rows are admissible"),
                    rank,
                )
            })
        })
        .collect();
    if block_rows.keys().any(|&i| state.crossed_rows[i]) {
        return Err(Error::Structural("block contains crossed rows".into()));
    }
    let column_set: HashSet<usize> = columns.iter().copied().collect();

    let mut steps = Vec::new();
    for &j in &columns {
        if state.crossed_cols[j] {
            continue;
        }
        let pick = pm
            .col_entries(j)
            .iter()
            .filter(|&&(i, _)| !state.crossed_rows[i])
            .filter_map(|&(i, v)| block_rows.get(&i).map(|&rank| (rank, v)))
            .min();
        let Some((_, v)) = pick else {
            return Err(Error::Stuck(format!(
                "column {} has no uncrossed entry in block rows; {}",
                pm.col(j),
                state.dump(pm)
            )));
        };
        let cells: Vec<(usize, usize)> = pm
            .occurrence_positions(v)
            .iter()
            .copied()
            .filter(|&(i, jj)| !state.crossed_rows[i] && !state.crossed_cols[jj])
            .collect();
        if let Some(&(i, jj)) = cells
            .iter()
            .find(|&&(i, jj)| !block_rows.contains_key(&i) || !column_set.contains(&jj))
        {
            return Err(Error::Stuck(format!(
                "{} occurs outside the block at {} {}; {}",
                pm.variable(v),
                pm.row(i),
                pm.col(jj),
                state.dump(pm)
            )));
        }
        for &(i, jj) in &cells {
            state.crossed_rows[i] = true;
            state.crossed_cols[jj] = true;
        }
        state.rows_crossed += cells.len();
        state.cols_crossed += cells.len();
        steps.push(Step {
            variable: pm.variable(v).clone(),
            rows: cells.iter().map(|&(i, _)| pm.row(i).clone()).collect(),
            cols: cells.iter().map(|&(_, jj)| pm.col(jj)).collect(),
        });
    }

    if let Some(i) = block_rows
        .keys()
        .copied()
        .filter(|&i| !state.crossed_rows[i])
        .min()
    {
        return Err(Error::Stuck(format!(
            "row {} left uncrossed after its block; {}",
            pm.row(i),
            state.dump(pm)
        )));
    }
    for o in block.orbits() {
        state.crossed_orbits.insert(o.clone());
    }
    for s in &sorted_slots {
        state.remaining_slots[t - 1].remove(s);
    }
    Ok(steps)
}

/// Crosses maximal uncrossed blocks until every row is crossed.
///
/// Each round takes the uncrossed orbit with the smallest canonical
/// representative, the smallest direction `t` whose maximal block through
/// it fits into the remaining slots of `t`, and the smallest such slots.
pub fn find_certificate(pm: &PatternMatrix) -> Result<Certificate> {
    if pm.n_cols() < pm.n_rows() {
        return Err(Error::TooFewColumns {
            rows: pm.n_rows(),
            cols: pm.n_cols(),
        });
    }
    let k = pm.shape().order();
    let mut state = CrossState::new(pm);
    let mut steps = Vec::new();
    for orbit in enumerate_orbits(pm.r(), k) {
        if state.crossed_orbits.contains(&orbit) {
            continue;
        }
        let mut chosen = None;
        for t in 1..=k {
            let block = maximal_uncrossed_block(&orbit, t, &state.crossed_orbits)?;
            if block.size() <= state.remaining_slots(t).len() {
                chosen = Some(block);
                break;
            }
        }
        let Some(block) = chosen else {
            return Err(Error::Stuck(format!(
                "no direction fits a block through {}; {}",
                orbit.canonical(),
                state.dump(pm)
            )));
        };
        let slots: Vec<usize> = state
            .remaining_slots(block.direction())
            .iter()
            .take(block.size())
            .copied()
            .collect();
        steps.extend(cross_block(pm, &mut state, &block, &slots)?);
        debug_assert_eq!(state.rows_crossed, state.cols_crossed);
    }
    Ok(Certificate::from_steps(pm.r(), pm.shape().clone(), steps))
}

/// One prescribed block: the orbit through `member` in `direction`,
/// crossed against `slots`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScriptStep {
    pub direction: usize,
    pub member: RowIndex,
    pub slots: Vec<usize>,
}

impl ScriptStep {
    pub fn new(direction: usize, member: Vec<usize>, slots: Vec<usize>) -> Self {
        Self {
            direction,
            member: RowIndex(member),
            slots,
        }
    }
}

/// Runs the given block sequence instead of the default selection policy.
///
/// The result may leave rows uncrossed if the script is incomplete;
/// [`validate`] reports that.
pub fn scripted_certificate(pm: &PatternMatrix, script: &[ScriptStep]) -> Result<Certificate> {
    let mut state = CrossState::new(pm);
    let mut steps = Vec::new();
    for (index, item) in script.iter().enumerate() {
        let wrap = |source: Error| Error::Script {
            index,
            source: Box::new(source),
        };
        if pm.row_position(&item.member).is_none() {
            return Err(wrap(Error::InvalidRow {
                coords: item.member.0.clone(),
                r: pm.r(),
            }));
        }
        let orbit = orbit_of(&item.member, pm.r());
        let block =
            maximal_uncrossed_block(&orbit, item.direction, &state.crossed_orbits).map_err(wrap)?;
        steps.extend(cross_block(pm, &mut state, &block, &item.slots).map_err(wrap)?);
    }
    Ok(Certificate::from_steps(pm.r(), pm.shape().clone(), steps))
}

/// Replays `cert` against `pm` from scratch.
///
/// For each step the current occurrences of the step variable are
/// recomputed from the row-major entries; the declared multiplicity, rows
/// and columns must match them exactly. At the end every row must be
/// crossed and the monomial must agree with the steps.
pub fn validate(pm: &PatternMatrix, cert: &Certificate) -> Verdict {
    if cert.r != pm.r() || &cert.shape != pm.shape() {
        return Verdict::fail(
            format!(
                "certificate is for r={} dims={}, pattern is r={} dims={}",
                cert.r,
                cert.shape,
                pm.r(),
                pm.shape()
            ),
            None,
        );
    }

    // var -> cells, rebuilt from the row-major storage
    let mut cells: HashMap<&VariableId, Vec<(usize, usize)>> = HashMap::new();
    for i in 0..pm.n_rows() {
        for &(j, v) in pm.row_entries(i) {
            cells.entry(pm.variable(v)).or_default().push((i, j));
        }
    }
    for (var, list) in &cells {
        let rows: HashSet<usize> = list.iter().map(|c| c.0).collect();
        let cols: HashSet<usize> = list.iter().map(|c| c.1).collect();
        if rows.len() != list.len() || cols.len() != list.len() {
            return Verdict::fail(format!("{var} repeats within a row or column"), None);
        }
    }
    let row_pos: HashMap<&RowIndex, usize> =
        pm.rows().iter().enumerate().map(|(i, p)| (p, i)).collect();
    let col_pos: HashMap<ColIndex, usize> =
        pm.cols().iter().enumerate().map(|(j, &c)| (c, j)).collect();

    let mut row_done = vec![false; pm.n_rows()];
    let mut col_done = vec![false; pm.n_cols()];
    let mut used: HashSet<&VariableId> = HashSet::new();
    let mut degree = 0usize;

    for (idx, step) in cert.steps.iter().enumerate() {
        let fail = |msg: String| {
            Verdict::fail(format!("step {idx} ({}): {msg}", step.variable), Some(idx))
        };
        let Some(all) = cells.get(&step.variable) else {
            return fail("variable does not occur in the pattern".into());
        };
        if !used.insert(&step.variable) {
            return fail("variable crossed twice".into());
        }
        if step.rows.len() != step.cols.len() {
            return fail(format!(
                "{} rows declared but {} columns",
                step.rows.len(),
                step.cols.len()
            ));
        }
        let live: Vec<(usize, usize)> = all
            .iter()
            .copied()
            .filter(|&(i, j)| !row_done[i] && !col_done[j])
            .collect();
        if live.is_empty() {
            return fail("no uncrossed occurrence".into());
        }
        if step.multiplicity() != live.len() {
            return fail(format!(
                "declared multiplicity {} but {} uncrossed occurrences",
                step.multiplicity(),
                live.len()
            ));
        }
        let live_rows: BTreeSet<usize> = live.iter().map(|c| c.0).collect();
        let live_cols: BTreeSet<usize> = live.iter().map(|c| c.1).collect();
        if live_rows.len() != live.len() || live_cols.len() != live.len() {
            return fail("occurrences share a row or column".into());
        }
        let mut declared_rows = BTreeSet::new();
        for p in &step.rows {
            match row_pos.get(p) {
                Some(&i) => {
                    declared_rows.insert(i);
                }
                None => return fail(format!("unknown row {p}")),
            }
        }
        let mut declared_cols = BTreeSet::new();
        for c in &step.cols {
            match col_pos.get(c) {
                Some(&j) => {
                    declared_cols.insert(j);
                }
                None => return fail(format!("unknown column {c}")),
            }
        }
        if declared_rows != live_rows {
            return fail("declared rows differ from the uncrossed occurrences".into());
        }
        if declared_cols != live_cols {
            return fail("declared columns differ from the uncrossed occurrences".into());
        }
        for &(i, j) in &live {
            row_done[i] = true;
            col_done[j] = true;
        }
        degree += live.len();
    }

    if let Some(i) = row_done.iter().position(|done| !done) {
        return Verdict::fail(format!("row {} is never crossed", pm.row(i)), None);
    }
    if degree != pm.n_rows() {
        return Verdict::fail(
            format!("degree {degree} differs from {} rows", pm.n_rows()),
            None,
        );
    }
    let from_steps: BTreeMap<&VariableId, u64> = cert
        .steps
        .iter()
        .map(|s| (&s.variable, s.multiplicity() as u64))
        .collect();
    let mut declared: BTreeMap<&VariableId, u64> = BTreeMap::new();
    for f in &cert.monomial {
        *declared.entry(&f.var).or_default() += u64::from(f.power);
    }
    if declared != from_steps {
        return Verdict::fail("monomial does not match the steps", None);
    }
    Verdict::pass(format!(
        "{} steps, degree {} over {} rows",
        cert.steps.len(),
        degree,
        pm.n_rows()
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::combinatorics::orbit_of;
    use crate::pattern::build_pattern;

    fn pattern(r: usize, dims: &[usize]) -> PatternMatrix {
        build_pattern(r, &TensorShape::new(dims.to_vec()).unwrap()).unwrap()
    }

    fn row(c: &[usize]) -> RowIndex {
        RowIndex(c.to_vec())
    }

    #[test]
    fn cross_first_block_of_worked_example() {
        let pm = pattern(4, &[6, 6, 6]);
        let mut state = CrossState::new(&pm);
        let o = orbit_of(&row(&[1, 2, 3]), 4);
        let block = maximal_uncrossed_block(&o, 1, state.crossed_orbits()).unwrap();
        assert!(block.contains(&orbit_of(&row(&[1, 3, 4]), 4)));
        assert_eq!(block.size(), 2);
        let steps = cross_block(&pm, &mut state, &block, &[1, 2]).unwrap();
        assert_eq!(state.rows_crossed(), 8);
        assert_eq!(state.cols_crossed(), 8);
        assert!(state.remaining_slots(1).is_empty());
        assert_eq!(steps.iter().map(Step::multiplicity).sum::<usize>(), 8);
    }

    #[test]
    fn cross_size_three_block() {
        let pm = pattern(5, &[8, 6, 6]);
        let mut state = CrossState::new(&pm);
        let o = orbit_of(&row(&[1, 2, 4]), 5);
        let block = maximal_uncrossed_block(&o, 1, state.crossed_orbits()).unwrap();
        assert_eq!(block.size(), 3);
        cross_block(&pm, &mut state, &block, &[1, 2, 3]).unwrap();
        assert_eq!((state.rows_crossed(), state.cols_crossed()), (15, 15));
    }

    #[test]
    fn cross_block_rejects_bad_slots() {
        let pm = pattern(4, &[6, 6, 6]);
        let mut state = CrossState::new(&pm);
        let o = orbit_of(&row(&[1, 2, 3]), 4);
        let block = maximal_uncrossed_block(&o, 1, state.crossed_orbits()).unwrap();
        assert!(matches!(
            cross_block(&pm, &mut state, &block, &[1]),
            Err(Error::InvalidSlots(_))
        ));
        assert!(matches!(
            cross_block(&pm, &mut state, &block, &[1, 1]),
            Err(Error::InvalidSlots(_))
        ));
        assert!(matches!(
            cross_block(&pm, &mut state, &block, &[1, 3]),
            Err(Error::InvalidSlots(_))
        ));
        assert_eq!(state.rows_crossed(), 0);
    }

    #[test]
    fn empty_pattern_has_empty_certificate() {
        let pm = pattern(2, &[3, 3, 3]);
        let cert = find_certificate(&pm).unwrap();
        assert!(cert.steps.is_empty());
        assert!(validate(&pm, &cert).ok);
        let scripted = scripted_certificate(&pm, &[]).unwrap();
        assert_eq!(scripted, cert);
    }

    #[test]
    fn too_few_columns() {
        let pm = pattern(5, &[6, 6, 6]);
        assert_eq!(
            find_certificate(&pm),
            Err(Error::TooFewColumns { rows: 60, cols: 15 })
        );
    }

    #[test]
    fn small_certificate_validates() {
        let pm = pattern(3, &[4, 4, 4]);
        assert_eq!((pm.n_rows(), pm.n_cols()), (6, 9));
        let cert = find_certificate(&pm).unwrap();
        assert_eq!(cert.degree(), 6);
        let v = validate(&pm, &cert);
        assert!(v.ok, "{}", v.detail);
    }

    #[test]
    fn inflated_multiplicity_is_caught() {
        let pm = pattern(4, &[6, 6, 6]);
        let mut cert = find_certificate(&pm).unwrap();
        let step = &mut cert.steps[3];
        step.rows.push(row(&[4, 3, 2]));
        step.cols.push(ColIndex::new(3, 1, 2));
        let v = validate(&pm, &cert);
        assert!(!v.ok);
        assert_eq!(v.first_failing_step, Some(3));
        assert!(v.detail.contains("multiplicity"));
    }

    #[test]
    fn other_faults_are_caught() {
        let pm = pattern(4, &[6, 6, 6]);
        let good = find_certificate(&pm).unwrap();

        let mut dropped = good.clone();
        dropped.steps.pop();
        assert!(!validate(&pm, &dropped).ok);

        let mut wrong_power = good.clone();
        wrong_power.monomial[0].power += 1;
        assert!(!validate(&pm, &wrong_power).ok);

        let mut wrong_row = good.clone();
        wrong_row.steps[0].rows[0] = row(&[4, 3, 2]);
        let v = validate(&pm, &wrong_row);
        assert!(!v.ok);
        assert_eq!(v.first_failing_step, Some(0));

        let other = pattern(4, &[6, 6, 7]);
        assert!(!validate(&other, &good).ok);
    }

    #[test]
    fn script_errors_carry_index() {
        let pm = pattern(4, &[6, 6, 6]);
        let script = [
            ScriptStep::new(1, vec![1, 2, 3], vec![1, 2]),
            ScriptStep::new(2, vec![2, 3, 4], vec![1]),
        ];
        match scripted_certificate(&pm, &script) {
            Err(Error::Script { index, source }) => {
                assert_eq!(index, 1);
                assert!(matches!(*source, Error::OrbitCrossed(_)));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn json_round_trip() {
        let pm = pattern(4, &[6, 6, 6]);
        let cert = find_certificate(&pm).unwrap();
        let text = cert.to_json();
        assert_eq!(Certificate::from_json(&text).unwrap(), cert);
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        let at = |key: &str| text.find(&format!("\"{key}\"")).unwrap();
        assert!(at("r") < at("dims") && at("dims") < at("steps") && at("steps") < at("monomial"));
        assert!(v["steps"][0]["var"].is_string());
        assert_eq!(v["steps"][0]["cols"][0].as_array().unwrap().len(), 3);
    }

    #[test]
    fn deterministic_search() {
        let pm = pattern(5, &[9, 9, 9]);
        assert_eq!(
            find_certificate(&pm).unwrap(),
            find_certificate(&pm).unwrap()
        );
    }
}
