//! Row Hermite normal form of integer matrices.
//!
//! Used to reduce a generating set of a Z-module (collected patch
//! translations) to a canonical basis.

/// Canonical basis of the Z-module spanned by `rows`.
///
/// Rows of the result are in row-style Hermite normal form: the leading
/// entry of each row is positive, strictly to the right of the previous
/// row's, and entries above each pivot lie in `[0, pivot)`.
pub fn hermite_normal_form(rows: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let Some(ncols) = rows.first().map(Vec::len) else {
        return Vec::new();
    };
    let mut m: Vec<Vec<i128>> =
        rows.iter().map(|r| r.iter().map(|&v| v as i128).collect()).collect();
    let mut pivot_row = 0;
    for col in 0..ncols {
        if pivot_row == m.len() {
            break;
        }
        // Euclid on the column below pivot_row until one non-zero remains.
        loop {
            let mut best: Option<usize> = None;
            for r in pivot_row..m.len() {
                if m[r][col] != 0 && best.map_or(true, |b| m[r][col].abs() < m[b][col].abs()) {
                    best = Some(r);
                }
            }
            let Some(b) = best else { break };
            m.swap(pivot_row, b);
            let mut done = true;
            for r in pivot_row + 1..m.len() {
                if m[r][col] != 0 {
                    let q = m[r][col].div_euclid(m[pivot_row][col]);
                    for c in col..ncols {
                        m[r][c] -= q * m[pivot_row][c];
                    }
                    if m[r][col] != 0 {
                        done = false;
                    }
                }
            }
            if done {
                break;
            }
        }
        if m[pivot_row][col] == 0 {
            continue;
        }
        if m[pivot_row][col] < 0 {
            for c in col..ncols {
                m[pivot_row][c] = -m[pivot_row][c];
            }
        }
        let p = m[pivot_row][col];
        for r in 0..pivot_row {
            let q = m[r][col].div_euclid(p);
            if q != 0 {
                for c in col..ncols {
                    m[r][c] -= q * m[pivot_row][c];
                }
            }
        }
        pivot_row += 1;
    }
    m.truncate(pivot_row);
    m.into_iter()
        .map(|r| r.into_iter().map(|v| i64::try_from(v).expect("HNF entry overflow")).collect())
        .collect()
}

/// Whether `v` lies in the module with HNF basis `hnf`.
pub fn module_contains(hnf: &[Vec<i64>], v: &[i64]) -> bool {
    let mut rem: Vec<i128> = v.iter().map(|&x| x as i128).collect();
    for row in hnf {
        let Some(col) = row.iter().position(|&x| x != 0) else { continue };
        let p = row[col] as i128;
        if rem[col] % p != 0 {
            return false;
        }
        let q = rem[col] / p;
        for (r, &x) in rem.iter_mut().zip(row) {
            *r -= q * x as i128;
        }
    }
    rem.iter().all(|&x| x == 0)
}

/// Whether every row of `sub` lies in the module spanned by `sup`.
pub fn is_submodule(sub: &[Vec<i64>], sup: &[Vec<i64>]) -> bool {
    let h = hermite_normal_form(sup);
    sub.iter().all(|v| module_contains(&h, v))
}
