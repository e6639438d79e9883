//! Row selection for the covering table: sub-markings (rows) against the
//! states they must block or enable (columns).

use thiserror::Error;

use crate::net::{Marking, SubMarking};

/// Largest column count accepted by [`select_cover_exact`].
pub const EXACT_COVER_MAX_COLUMNS: usize = 24;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CoverError {
    #[error("column {0} is covered by no row")]
    UncoverableColumn(usize),
}

/// Cost used for tie-breaks and for the exact search: fewer places, then a
/// lower threshold sum, then canonical order.
fn row_key(row: &SubMarking) -> (usize, u64, &SubMarking) {
    (row.len(), row.threshold_sum(), row)
}

fn coverage(rows: &[SubMarking], columns: &[Marking]) -> Result<Vec<Vec<usize>>, CoverError> {
    let table: Vec<Vec<usize>> = rows
        .iter()
        .map(|r| (0..columns.len()).filter(|&c| r.covers(&columns[c])).collect())
        .collect();
    let mut covered = vec![false; columns.len()];
    for cols in &table {
        for &c in cols {
            covered[c] = true;
        }
    }
    match covered.iter().position(|&c| !c) {
        Some(c) => Err(CoverError::UncoverableColumn(c)),
        None => Ok(table),
    }
}

/// Essential rows first, then greedy maximum new coverage, then a pruning
/// pass that drops greedy picks made redundant by later ones.
///
/// The result is sorted canonically.
pub fn select_cover(rows: &[SubMarking], columns: &[Marking]) -> Result<Vec<SubMarking>, CoverError> {
    let table = coverage(rows, columns)?;
    let mut coverers: Vec<Vec<usize>> = vec![Vec::new(); columns.len()];
    for (r, cols) in table.iter().enumerate() {
        for &c in cols {
            coverers[c].push(r);
        }
    }

    let mut chosen: Vec<usize> = Vec::new();
    let mut essential = vec![false; rows.len()];
    for rs in &coverers {
        if let [only] = rs.as_slice() {
            if !essential[*only] {
                essential[*only] = true;
                chosen.push(*only);
            }
        }
    }
    chosen.sort_by(|&a, &b| row_key(&rows[a]).cmp(&row_key(&rows[b])));

    let mut covered = vec![false; columns.len()];
    for &r in &chosen {
        for &c in &table[r] {
            covered[c] = true;
        }
    }

    loop {
        let best = (0..rows.len())
            .filter(|&r| !chosen.contains(&r))
            .map(|r| (table[r].iter().filter(|&&c| !covered[c]).count(), r))
            .filter(|&(gain, _)| gain > 0)
            .max_by(|&(ga, a), &(gb, b)| {
                ga.cmp(&gb).then_with(|| row_key(&rows[b]).cmp(&row_key(&rows[a])))
            });
        let Some((_, r)) = best else { break };
        chosen.push(r);
        for &c in &table[r] {
            covered[c] = true;
        }
    }

    // Later picks can make earlier greedy picks redundant; essentials never are.
    let mut i = chosen.len();
    while i > 0 {
        i -= 1;
        let r = chosen[i];
        if essential[r] {
            continue;
        }
        let still_covered = table[r].iter().all(|&c| {
            coverers[c]
                .iter()
                .any(|&o| o != r && chosen.contains(&o))
        });
        if still_covered {
            chosen.remove(i);
        }
    }

    let mut out: Vec<SubMarking> = chosen.into_iter().map(|r| rows[r].clone()).collect();
    out.sort();
    Ok(out)
}

/// (rows, places, threshold sum) of a selection.
type Cost = (usize, usize, u64);

/// Minimum cover by branch and bound, minimizing row count, then total
/// literals, then total threshold sum. Falls back to [`select_cover`] when
/// there are more than [`EXACT_COVER_MAX_COLUMNS`] columns; the flag in the
/// result says which one ran.
pub fn select_cover_exact(
    rows: &[SubMarking],
    columns: &[Marking],
) -> Result<(Vec<SubMarking>, bool), CoverError> {
    if columns.len() > EXACT_COVER_MAX_COLUMNS {
        return select_cover(rows, columns).map(|c| (c, false));
    }
    let table = coverage(rows, columns)?;
    let full: u32 = if columns.is_empty() { 0 } else { u32::MAX >> (32 - columns.len()) };

    // Keep only the cheapest row per distinct coverage mask.
    let mut candidates: Vec<(u32, usize)> = Vec::new();
    for (r, cols) in table.iter().enumerate() {
        let mask = cols.iter().fold(0u32, |m, &c| m | (1 << c));
        if mask == 0 {
            continue;
        }
        match candidates.iter_mut().find(|(m, _)| *m == mask) {
            Some(slot) if row_key(&rows[r]) < row_key(&rows[slot.1]) => slot.1 = r,
            Some(_) => {}
            None => candidates.push((mask, r)),
        }
    }
    candidates.sort_by(|a, b| row_key(&rows[a.1]).cmp(&row_key(&rows[b.1])));

    let cost = |sel: &[usize]| -> Cost {
        (
            sel.len(),
            sel.iter().map(|&r| rows[r].len()).sum(),
            sel.iter().map(|&r| rows[r].threshold_sum()).sum(),
        )
    };

    struct Search<'a> {
        candidates: &'a [(u32, usize)],
        full: u32,
        best: Option<(Vec<usize>, Cost)>,
    }

    fn branch(
        s: &mut Search<'_>,
        covered: u32,
        picked: &mut Vec<usize>,
        cost: &dyn Fn(&[usize]) -> Cost,
    ) {
        if let Some((_, best_cost)) = &s.best {
            if picked.len() > best_cost.0 || (covered != s.full && picked.len() + 1 > best_cost.0) {
                return;
            }
        }
        if covered == s.full {
            let c = cost(picked);
            let better = match &s.best {
                None => true,
                Some((sel, bc)) => {
                    let mut a: Vec<usize> = picked.clone();
                    let mut b = sel.clone();
                    a.sort();
                    b.sort();
                    (c, a) < (*bc, b)
                }
            };
            if better {
                s.best = Some((picked.clone(), c));
            }
            return;
        }
        let col = (!covered & s.full).trailing_zeros();
        for i in 0..s.candidates.len() {
            let (mask, r) = s.candidates[i];
            if mask & (1 << col) == 0 {
                continue;
            }
            picked.push(r);
            branch(s, covered | mask, picked, cost);
            picked.pop();
        }
    }

    let mut search = Search {
        candidates: &candidates,
        full,
        best: None,
    };
    branch(&mut search, 0, &mut Vec::new(), &cost);
    let selected = search.best.map(|(sel, _)| sel).unwrap_or_default();
    let mut out: Vec<SubMarking> = selected.into_iter().map(|r| rows[r].clone()).collect();
    out.sort();
    Ok((out, true))
}
