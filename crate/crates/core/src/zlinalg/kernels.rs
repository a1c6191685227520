//! Elimination kernels shared by the public lattice operations.

use super::scalar::{row_combine, row_neg, row_sub_mul, Checked, Entry};

/// Row echelon form built one vector at a time.
///
/// Rows are kept with positive pivots, indexed by pivot column. Inserting
/// a vector reduces it against existing pivots, merging with `xgcd` when
/// the pivot does not divide it.
pub(crate) struct Echelon<E> {
    dim: usize,
    pivot_row: Vec<Option<usize>>,
    rows: Vec<Vec<E>>,
}

impl<E: Entry> Echelon<E> {
    pub(crate) fn new(dim: usize) -> Self {
        Echelon {
            dim,
            pivot_row: vec![None; dim],
            rows: Vec::new(),
        }
    }

    /// Full rank with unit pivots: the span is all of `Z^dim`.
    pub(crate) fn is_everything(&self) -> bool {
        self.rows.len() == self.dim
            && self
                .pivot_row
                .iter()
                .enumerate()
                .all(|(c, r)| r.is_some_and(|ri| self.rows[ri][c].is_unit()))
    }

    pub(crate) fn insert(&mut self, mut v: Vec<E>) -> Checked<()> {
        debug_assert_eq!(v.len(), self.dim);
        let mut c = 0;
        loop {
            while c < self.dim && v[c].is_nil() {
                c += 1;
            }
            if c == self.dim {
                return Ok(());
            }
            match self.pivot_row[c] {
                None => {
                    if v[c].is_neg() {
                        row_neg(&mut v)?;
                    }
                    self.pivot_row[c] = Some(self.rows.len());
                    self.rows.push(v);
                    return Ok(());
                }
                Some(ri) => {
                    let r = &mut self.rows[ri];
                    if r[c].is_divisor_of(&v[c]) {
                        let q = v[c].div_floor(&r[c])?;
                        row_sub_mul(&mut v, &q, r, c)?;
                    } else {
                        let (g, s, t) = r[c].xgcd(&v[c])?;
                        let a = r[c].div_floor(&g)?;
                        let b = v[c].div_floor(&g)?.neg()?;
                        row_combine(r, &mut v, (&s, &t, &b, &a), c)?;
                    }
                    c += 1;
                }
            }
        }
    }

    /// Canonical Hermite normal form: rows sorted by pivot, entries above
    /// each pivot reduced into `[0, pivot)`.
    pub(crate) fn finish(mut self) -> Checked<(Vec<usize>, Vec<Vec<E>>)> {
        let mut pivots = Vec::with_capacity(self.rows.len());
        let mut order = Vec::with_capacity(self.rows.len());
        for (c, slot) in self.pivot_row.iter().enumerate() {
            if let Some(ri) = slot {
                pivots.push(c);
                order.push(*ri);
            }
        }
        let mut taken: Vec<Option<Vec<E>>> = self.rows.drain(..).map(Some).collect();
        let mut rows: Vec<Vec<E>> = order.iter().map(|&ri| taken[ri].take().unwrap()).collect();
        reduce_above(&mut rows, &pivots)?;
        Ok((pivots, rows))
    }
}

fn reduce_above<E: Entry>(rows: &mut [Vec<E>], pivots: &[usize]) -> Checked<()> {
    for j in 0..rows.len() {
        let c = pivots[j];
        let (above, rest) = rows.split_at_mut(j);
        let pr = &rest[0];
        for row in above.iter_mut() {
            if row[c].is_nil() {
                continue;
            }
            let q = row[c].div_floor(&pr[c])?;
            row_sub_mul(row, &q, pr, c)?;
        }
    }
    Ok(())
}

/// `(H, U, rank)`.
pub(crate) type HnfParts<E> = (Vec<Vec<E>>, Vec<Vec<E>>, usize);

/// Row HNF with the unimodular transform: returns `(H, U, rank)` with
/// `U * M = H`, `H` of the same shape as `M` and zero rows at the bottom.
pub(crate) fn hnf_with_transform<E: Entry>(
    mut a: Vec<Vec<E>>,
    ncols: usize,
) -> Checked<HnfParts<E>> {
    let m = a.len();
    let mut u = identity::<E>(m);
    let mut r = 0;
    let mut pivots = Vec::new();
    for c in 0..ncols {
        if r == m {
            break;
        }
        loop {
            let piv = (r..m)
                .filter(|&i| !a[i][c].is_nil())
                .min_by(|&i, &j| a[i][c].abs_cmp(&a[j][c]));
            let Some(pi) = piv else { break };
            a.swap(r, pi);
            u.swap(r, pi);
            let mut clean = true;
            for i in r + 1..m {
                if a[i][c].is_nil() {
                    continue;
                }
                let q = a[i][c].div_floor(&a[r][c])?;
                let (top, bot) = a.split_at_mut(i);
                row_sub_mul(&mut bot[0], &q, &top[r], c)?;
                let (top, bot) = u.split_at_mut(i);
                row_sub_mul(&mut bot[0], &q, &top[r], 0)?;
                if !a[i][c].is_nil() {
                    clean = false;
                }
            }
            if clean {
                if a[r][c].is_neg() {
                    row_neg(&mut a[r])?;
                    row_neg(&mut u[r])?;
                }
                pivots.push(c);
                r += 1;
                break;
            }
        }
    }
    // reduce above pivots, carrying U along
    for j in 0..r {
        let c = pivots[j];
        for i in 0..j {
            if a[i][c].is_nil() {
                continue;
            }
            let q = a[i][c].div_floor(&a[j][c])?;
            let (top, bot) = a.split_at_mut(j);
            row_sub_mul(&mut top[i], &q, &bot[0], c)?;
            let (top, bot) = u.split_at_mut(j);
            row_sub_mul(&mut top[i], &q, &bot[0], 0)?;
        }
    }
    Ok((a, u, r))
}

pub(crate) fn identity<E: Entry>(n: usize) -> Vec<Vec<E>> {
    (0..n)
        .map(|i| {
            let mut row = vec![E::nil(); n];
            row[i] = E::unit();
            row
        })
        .collect()
}

pub(crate) struct Smith<E> {
    pub(crate) diag: Vec<E>,
    pub(crate) u: Option<Vec<Vec<E>>>,
    pub(crate) v: Option<Vec<Vec<E>>>,
}

fn col_sub_mul<E: Entry>(a: &mut [Vec<E>], dst: usize, k: &E, src: usize, rows_from: usize) -> Checked<()> {
    for row in a[rows_from..].iter_mut() {
        if !row[src].is_nil() {
            let s = row[src].clone();
            row[dst].sub_mul_assign(k, &s)?;
        }
    }
    Ok(())
}

fn swap_cols<E>(a: &mut [Vec<E>], i: usize, j: usize) {
    if i != j {
        for row in a.iter_mut() {
            row.swap(i, j);
        }
    }
}

/// Smith normal form by repeated gcd elimination with a smallest-entry
/// pivot. When `transforms` is set, `U * M * V = diag` is tracked.
pub(crate) fn smith<E: Entry>(mut a: Vec<Vec<E>>, ncols: usize, transforms: bool) -> Checked<Smith<E>> {
    let m = a.len();
    let n = ncols;
    let mut u = transforms.then(|| identity::<E>(m));
    let mut v = transforms.then(|| identity::<E>(n));
    let mut diag = Vec::new();
    for t in 0..m.min(n) {
        // global smallest pivot in the trailing block
        let mut best: Option<(usize, usize)> = None;
        'scan: for i in t..m {
            for j in t..n {
                let x = &a[i][j];
                if x.is_nil() {
                    continue;
                }
                if best.is_none_or(|(bi, bj)| x.abs_cmp(&a[bi][bj]).is_lt()) {
                    best = Some((i, j));
                    if x.is_unit() || x.neg()?.is_unit() {
                        break 'scan;
                    }
                }
            }
        }
        let Some((pi, pj)) = best else { break };
        a.swap(t, pi);
        if let Some(u) = u.as_mut() {
            u.swap(t, pi);
        }
        swap_cols(&mut a, t, pj);
        if let Some(v) = v.as_mut() {
            swap_cols(v, t, pj);
        }
        loop {
            let mut clean = true;
            for i in t + 1..m {
                if a[i][t].is_nil() {
                    continue;
                }
                let q = a[i][t].div_floor(&a[t][t])?;
                let (top, bot) = a.split_at_mut(i);
                row_sub_mul(&mut bot[0], &q, &top[t], t)?;
                if let Some(u) = u.as_mut() {
                    let (top, bot) = u.split_at_mut(i);
                    row_sub_mul(&mut bot[0], &q, &top[t], 0)?;
                }
                if !a[i][t].is_nil() {
                    clean = false;
                }
            }
            if !clean {
                let pi = (t..m)
                    .filter(|&i| !a[i][t].is_nil())
                    .min_by(|&i, &j| a[i][t].abs_cmp(&a[j][t]))
                    .unwrap();
                a.swap(t, pi);
                if let Some(u) = u.as_mut() {
                    u.swap(t, pi);
                }
                continue;
            }
            // column t is clear below the pivot, so column operations only
            // touch row t of `a`
            for j in t + 1..n {
                if a[t][j].is_nil() {
                    continue;
                }
                let q = a[t][j].div_floor(&a[t][t])?;
                col_sub_mul(&mut a, j, &q, t, t)?;
                if let Some(v) = v.as_mut() {
                    col_sub_mul(v, j, &q, t, 0)?;
                }
                if !a[t][j].is_nil() {
                    clean = false;
                }
            }
            if !clean {
                let pj = (t..n)
                    .filter(|&j| !a[t][j].is_nil())
                    .min_by(|&i, &j| a[t][i].abs_cmp(&a[t][j]))
                    .unwrap();
                swap_cols(&mut a, t, pj);
                if let Some(v) = v.as_mut() {
                    swap_cols(v, t, pj);
                }
                continue;
            }
            if !a[t][t].is_unit() && !a[t][t].neg()?.is_unit() {
                let p = a[t][t].clone();
                let bad = (t + 1..m).find(|&i| a[i][t + 1..].iter().any(|x| !p.is_divisor_of(x)));
                if let Some(i) = bad {
                    let one = E::unit().neg()?;
                    let (top, bot) = a.split_at_mut(i);
                    row_sub_mul(&mut top[t], &one, &bot[0], t)?;
                    if let Some(u) = u.as_mut() {
                        let (top, bot) = u.split_at_mut(i);
                        row_sub_mul(&mut top[t], &one, &bot[0], 0)?;
                    }
                    continue;
                }
            }
            break;
        }
        if a[t][t].is_neg() {
            row_neg(&mut a[t])?;
            if let Some(u) = u.as_mut() {
                row_neg(&mut u[t])?;
            }
        }
        diag.push(a[t][t].clone());
    }
    Ok(Smith { diag, u, v })
}

/// Integer coordinates of `v` in the HNF basis, or `None` if `v` is not in
/// the lattice.
pub(crate) fn coordinates<E: Entry>(rows: &[Vec<E>], pivots: &[usize], mut v: Vec<E>) -> Checked<Option<Vec<E>>> {
    let mut coeffs = Vec::with_capacity(rows.len());
    for (row, &c) in rows.iter().zip(pivots) {
        if v[c].is_nil() {
            coeffs.push(E::nil());
            continue;
        }
        if !row[c].is_divisor_of(&v[c]) {
            return Ok(None);
        }
        let q = v[c].div_floor(&row[c])?;
        row_sub_mul(&mut v, &q, row, c)?;
        coeffs.push(q);
    }
    Ok(v.iter().all(Entry::is_nil).then_some(coeffs))
}

/// Least `k >= 1` with `k * v` in the lattice, or `None` when `v` leaves
/// the rational span. The rational coordinates of `v` are unique, so `k`
/// is the lcm of their denominators; it is accumulated fraction-free.
pub(crate) fn order<E: Entry>(rows: &[Vec<E>], pivots: &[usize], mut v: Vec<E>) -> Checked<Option<E>> {
    let mut k = E::unit();
    for (row, &c) in rows.iter().zip(pivots) {
        if v[c].is_nil() {
            continue;
        }
        let p = &row[c];
        if !p.is_divisor_of(&v[c]) {
            let (g, _, _) = v[c].xgcd(p)?;
            let f = p.div_floor(&g)?;
            for x in v.iter_mut() {
                if !x.is_nil() {
                    *x = x.mul(&f)?;
                }
            }
            k = k.mul(&f)?;
        }
        let q = v[c].div_floor(p)?;
        row_sub_mul(&mut v, &q, row, c)?;
    }
    Ok(v.iter().all(Entry::is_nil).then_some(k))
}
