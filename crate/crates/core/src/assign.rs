//! Minimal-cost bipartite assignment (Hungarian algorithm, shortest
//! augmenting path variant) plus the exact second-best total, used by branch
//! tracking to detect ambiguous continuation steps.

#[derive(Debug, Clone)]
pub struct Assignment {
    /// column assigned to each row
    pub cols: Vec<usize>,
    pub total: f64,
}

fn cost_at(cost: &[f64], n: usize, i: usize, j: usize, forbid: Option<(usize, usize)>) -> f64 {
    if forbid == Some((i, j)) {
        f64::INFINITY
    } else {
        cost[i * n + j]
    }
}

/// Hungarian algorithm on an n x n cost matrix (row-major), optionally with a
/// single forbidden edge. Returns None when no finite perfect matching exists.
pub fn solve(cost: &[f64], n: usize, forbid: Option<(usize, usize)>) -> Option<Assignment> {
    if n == 0 {
        return Some(Assignment {
            cols: vec![],
            total: 0.0,
        });
    }
    let inf = f64::INFINITY;
    let mut u = vec![0.0f64; n + 1];
    let mut v = vec![0.0f64; n + 1];
    let mut p = vec![0usize; n + 1]; // row matched to column j (1-based, 0 = none)
    let mut way = vec![0usize; n + 1];

    for i in 1..=n {
        p[0] = i;
        let mut j0 = 0usize;
        let mut minv = vec![inf; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta = inf;
            let mut j1 = 0usize;
            for j in 1..=n {
                if !used[j] {
                    let cur = cost_at(cost, n, i0 - 1, j - 1, forbid) - u[i0] - v[j];
                    if cur < minv[j] {
                        minv[j] = cur;
                        way[j] = j0;
                    }
                    if minv[j] < delta {
                        delta = minv[j];
                        j1 = j;
                    }
                }
            }
            if !delta.is_finite() {
                return None;
            }
            for j in 0..=n {
                if used[j] {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }

    let mut cols = vec![0usize; n];
    let mut total = 0.0;
    for j in 1..=n {
        let i = p[j] - 1;
        cols[i] = j - 1;
        let c = cost_at(cost, n, i, j - 1, forbid);
        if !c.is_finite() {
            return None;
        }
        total += c;
    }
    Some(Assignment { cols, total })
}

/// Best and exact second-best assignment totals. The second best differs from
/// the best in at least one matched edge, so it is found by re-solving with
/// each best edge forbidden in turn. Returns (best, second_total) with
/// second_total = +inf when n < 2.
pub fn best_and_second(cost: &[f64], n: usize) -> Option<(Assignment, f64)> {
    let best = solve(cost, n, None)?;
    if n < 2 {
        return Some((best, f64::INFINITY));
    }
    let mut second = f64::INFINITY;
    for (i, &j) in best.cols.iter().enumerate() {
        if let Some(alt) = solve(cost, n, Some((i, j))) {
            second = second.min(alt.total);
        }
    }
    Some((best, second))
}
