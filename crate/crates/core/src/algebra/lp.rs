//! Exact linear programming over `Q` (two-phase tableau simplex, Bland's rule)
//! and the cone feasibility tests built on it.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::field::Rat;

#[derive(Clone, Debug, PartialEq)]
pub enum LpOutcome {
    Infeasible,
    Unbounded,
    Optimal { value: Rat, x: Vec<Rat> },
}

struct Tableau {
    rows: Vec<Vec<Rat>>,
    rhs: Vec<Rat>,
    basis: Vec<usize>,
}

impl Tableau {
    fn pivot(&mut self, r: usize, c: usize) {
        let inv = self.rows[r][c].recip();
        for x in self.rows[r].iter_mut() {
            *x *= &inv;
        }
        self.rhs[r] *= &inv;
        for i in 0..self.rows.len() {
            if i == r || self.rows[i][c].is_zero() {
                continue;
            }
            let f = self.rows[i][c].clone();
            for j in 0..self.rows[i].len() {
                let delta = &f * &self.rows[r][j];
                self.rows[i][j] -= delta;
            }
            let delta = &f * &self.rhs[r];
            self.rhs[i] -= delta;
        }
        self.basis[r] = c;
    }

    /// Maximizes `obj . x` over the current basic feasible solution, using
    /// only the columns in `allowed`. Returns `false` if unbounded.
    fn optimize(&mut self, obj: &[Rat], allowed: &[bool]) -> bool {
        loop {
            // reduced costs: obj_j - sum_i obj_{basis(i)} * rows[i][j]
            let ncols = obj.len();
            let entering = (0..ncols).find(|&j| {
                if !allowed[j] || self.basis.contains(&j) {
                    return false;
                }
                let mut rc = obj[j].clone();
                for (i, &b) in self.basis.iter().enumerate() {
                    rc -= &obj[b] * &self.rows[i][j];
                }
                rc.is_positive()
            });
            let Some(c) = entering else {
                return true;
            };
            let mut best: Option<(Rat, usize)> = None;
            for i in 0..self.rows.len() {
                if self.rows[i][c].is_positive() {
                    let ratio = &self.rhs[i] / &self.rows[i][c];
                    let better = match &best {
                        None => true,
                        Some((r, bi)) => ratio < *r || (ratio == *r && self.basis[i] < self.basis[*bi]),
                    };
                    if better {
                        best = Some((ratio, i));
                    }
                }
            }
            match best {
                None => return false,
                Some((_, r)) => self.pivot(r, c),
            }
        }
    }

    fn value(&self, obj: &[Rat]) -> Rat {
        self.basis
            .iter()
            .enumerate()
            .fold(Rat::zero(), |acc, (i, &b)| acc + &obj[b] * &self.rhs[i])
    }
}

/// Maximizes `c . x` subject to `A x <= b`, `x >= 0`.
pub fn maximize(c: &[Rat], a: &[Vec<Rat>], b: &[Rat]) -> LpOutcome {
    let nv = c.len();
    let m = a.len();
    // columns: originals, one slack per row, one artificial per negative row
    let neg: Vec<usize> = (0..m).filter(|&i| b[i].is_negative()).collect();
    let ncols = nv + m + neg.len();
    let mut rows = Vec::with_capacity(m);
    let mut rhs = Vec::with_capacity(m);
    let mut basis = Vec::with_capacity(m);
    for i in 0..m {
        let mut row = vec![Rat::zero(); ncols];
        let sign = if b[i].is_negative() { -Rat::one() } else { Rat::one() };
        for j in 0..nv {
            row[j] = &a[i][j] * &sign;
        }
        row[nv + i] = sign.clone();
        rhs.push(&b[i] * &sign);
        match neg.iter().position(|&k| k == i) {
            Some(k) => {
                row[nv + m + k] = Rat::one();
                basis.push(nv + m + k);
            }
            None => basis.push(nv + i),
        }
        rows.push(row);
    }
    let mut t = Tableau { rows, rhs, basis };
    if !neg.is_empty() {
        let mut phase1 = vec![Rat::zero(); ncols];
        for k in 0..neg.len() {
            phase1[nv + m + k] = -Rat::one();
        }
        t.optimize(&phase1, &vec![true; ncols]);
        if t.value(&phase1).is_negative() {
            return LpOutcome::Infeasible;
        }
        // drive zero-level artificials out of the basis
        for r in 0..m {
            if t.basis[r] >= nv + m {
                if let Some(c) = (0..nv + m).find(|&j| !t.rows[r][j].is_zero()) {
                    t.pivot(r, c);
                }
            }
        }
    }
    let mut obj = vec![Rat::zero(); ncols];
    obj[..nv].clone_from_slice(c);
    let allowed: Vec<bool> = (0..ncols).map(|j| j < nv + m).collect();
    if !t.optimize(&obj, &allowed) {
        return LpOutcome::Unbounded;
    }
    let mut x = vec![Rat::zero(); nv];
    for (i, &bcol) in t.basis.iter().enumerate() {
        if bcol < nv {
            x[bcol] = t.rhs[i].clone();
        }
    }
    LpOutcome::Optimal { value: t.value(&obj), x }
}

fn ri(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

/// Shared constraint block in the variables `b_i = a_i + 1 in [0, 2]`:
/// box bounds and `sum a_i = 0`.
fn box_and_trace(dim: usize, extra: usize) -> (Vec<Vec<Rat>>, Vec<Rat>) {
    let width = dim + extra;
    let mut a = Vec::new();
    let mut b = Vec::new();
    for i in 0..dim {
        let mut row = vec![Rat::zero(); width];
        row[i] = Rat::one();
        a.push(row);
        b.push(ri(2));
    }
    let mut sum = vec![Rat::zero(); width];
    for x in sum.iter_mut().take(dim) {
        *x = Rat::one();
    }
    a.push(sum.clone());
    b.push(ri(dim as i64));
    a.push(sum.into_iter().map(|x| -x).collect());
    b.push(ri(-(dim as i64)));
    (a, b)
}

/// A vector `a` with `sum a_i = 0` and `a . v > 0` for every input `v`, if
/// one exists. Decided exactly by maximizing a uniform slack under the box
/// `-1 <= a_i <= 1`.
pub fn strict_cone_feasible(vectors: &[Vec<i64>]) -> Option<Vec<Rat>> {
    let dim = vectors.first()?.len();
    let (mut a, mut b) = box_and_trace(dim, 1);
    for v in vectors {
        // s - a.v <= 0, with a = b - 1
        let mut row: Vec<Rat> = v.iter().map(|&x| ri(-x)).collect();
        row.push(Rat::one());
        a.push(row);
        b.push(ri(-v.iter().sum::<i64>()));
    }
    let mut cap = vec![Rat::zero(); dim + 1];
    cap[dim] = Rat::one();
    a.push(cap.clone());
    b.push(Rat::one());
    match maximize(&cap, &a, &b) {
        LpOutcome::Optimal { value, x } if value.is_positive() => {
            Some(x[..dim].iter().map(|y| y - Rat::one()).collect())
        }
        _ => None,
    }
}

/// A nonzero `a` with `sum a_i = 0` and `a . v >= 0` for every input `v`, if
/// one exists. Some coordinate of such an `a` is positive, so it suffices to
/// maximize each coordinate in turn.
pub fn weak_cone_nonzero(vectors: &[Vec<i64>]) -> Option<Vec<Rat>> {
    let dim = vectors.first()?.len();
    let (mut a, mut b) = box_and_trace(dim, 0);
    for v in vectors {
        a.push(v.iter().map(|&x| ri(-x)).collect());
        b.push(ri(-v.iter().sum::<i64>()));
    }
    for k in 0..dim {
        let mut obj = vec![Rat::zero(); dim];
        obj[k] = Rat::one();
        if let LpOutcome::Optimal { value, x } = maximize(&obj, &a, &b) {
            // objective is b_k = a_k + 1
            if value > Rat::one() {
                return Some(x.iter().map(|y| y - Rat::one()).collect());
            }
        }
    }
    None
}

/// Scales a nonzero rational vector to a primitive integer vector.
pub fn primitive_integer_vector(v: &[Rat]) -> Vec<i64> {
    let den = v.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let ints: Vec<BigInt> = v.iter().map(|x| x.numer() * (&den / x.denom())).collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    let g = if g.is_zero() { BigInt::one() } else { g };
    ints.iter().map(|x| (x / &g).to_i64().expect("weight overflow")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_lp() {
        // max x + y s.t. x + 2y <= 4, 3x + y <= 6
        let c = vec![ri(1), ri(1)];
        let a = vec![vec![ri(1), ri(2)], vec![ri(3), ri(1)]];
        let b = vec![ri(4), ri(6)];
        match maximize(&c, &a, &b) {
            LpOutcome::Optimal { value, .. } => assert_eq!(value, Rat::new(14.into(), 5.into())),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn infeasible_and_unbounded() {
        // x <= -1 with x >= 0
        assert_eq!(maximize(&[ri(1)], &[vec![ri(1)]], &[ri(-1)]), LpOutcome::Infeasible);
        assert_eq!(maximize(&[ri(1)], &[vec![ri(-1)]], &[ri(0)]), LpOutcome::Unbounded);
    }

    #[test]
    fn half_space_and_antipodes() {
        let a = strict_cone_feasible(&[vec![1, -1]]).unwrap();
        assert_eq!(primitive_integer_vector(&a), vec![1, -1]);
        assert!(strict_cone_feasible(&[vec![1, -1], vec![-1, 1]]).is_none());
        // antipodal pair still admits a weakly nonnegative direction? no: a.v >= 0 and a.(-v) >= 0
        // forces a.v = 0, and with sum zero in dimension 2 that forces a = 0
        assert!(weak_cone_nonzero(&[vec![1, -1], vec![-1, 1]]).is_none());
        assert!(weak_cone_nonzero(&[vec![1, -1], vec![0, 0]]).is_some());
    }

    #[test]
    fn three_dimensional_cone() {
        // v's from a map with q_0 free of x_0: weights under (2,-1,-1) are positive
        let vs = vec![vec![1, -2, 0], vec![1, 0, -2], vec![-1, 1, 0], vec![0, -1, 1]];
        let a = strict_cone_feasible(&vs);
        if let Some(a) = &a {
            for v in &vs {
                let dot: Rat = a.iter().zip(v).map(|(x, &y)| x * ri(y)).sum();
                assert!(dot.is_positive());
            }
        }
        let vs2 = vec![vec![1, -1, 0], vec![0, 1, -1], vec![-1, 0, 1]];
        assert!(strict_cone_feasible(&vs2).is_none());
    }
}
