//! Test-only oracles that never touch the simplex code path.
#![allow(dead_code)]

pub mod systems;

use esopt::lp::{EqTags, LinearProgram, Sense, VarKind, VarRef};
use num_bigint::BigInt;
use num_rational::BigRational;
use rand::Rng;

pub const INFEASIBLE: f64 = f64::INFINITY;

/// Dense description of a small LP: `min cᵀx`, rows `a x {sense} b`, box bounds.
#[derive(Debug, Clone)]
pub struct DenseLp {
    pub cost: Vec<f64>,
    pub rows: Vec<(Vec<f64>, Sense, f64)>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub integer: Vec<bool>,
}

impl DenseLp {
    pub fn n(&self) -> usize {
        self.cost.len()
    }

    pub fn to_program(&self) -> LinearProgram {
        let mut lp = LinearProgram::new();
        for j in 0..self.n() {
            let kind = if self.integer[j] {
                VarKind::On
            } else {
                VarKind::Pout
            };
            let name = VarRef::at(kind, "x", j);
            let idx = if self.integer[j] {
                lp.add_integer_var(name, self.lower[j], self.upper[j])
                    .unwrap()
            } else {
                lp.add_var(name, self.lower[j], self.upper[j]).unwrap()
            };
            lp.add_cost(idx, self.cost[j]);
        }
        for (i, (a, sense, b)) in self.rows.iter().enumerate() {
            let coeffs = a.iter().enumerate().map(|(j, &v)| (j, v)).collect();
            lp.add_row(
                EqTags::default(),
                &format!("r{i}"),
                None,
                coeffs,
                *sense,
                *b,
            );
        }
        lp
    }

    pub fn is_feasible(&self, x: &[f64], tol: f64) -> bool {
        for j in 0..self.n() {
            if x[j] < self.lower[j] - tol || x[j] > self.upper[j] + tol {
                return false;
            }
        }
        self.rows.iter().all(|(a, sense, b)| {
            let act: f64 = a.iter().zip(x).map(|(p, q)| p * q).sum();
            match sense {
                Sense::Le => act <= b + tol,
                Sense::Ge => act >= b - tol,
                Sense::Eq => (act - b).abs() <= tol,
            }
        })
    }

    pub fn objective(&self, x: &[f64]) -> f64 {
        self.cost.iter().zip(x).map(|(c, v)| c * v).sum()
    }
}

/// Solves `M z = r` by Gaussian elimination with partial pivoting.
pub fn gauss_solve(mut m: Vec<Vec<f64>>, mut r: Vec<f64>) -> Option<Vec<f64>> {
    let n = r.len();
    for col in 0..n {
        let piv = (col..n).max_by(|&a, &b| m[a][col].abs().total_cmp(&m[b][col].abs()))?;
        if m[piv][col].abs() < 1e-10 {
            return None;
        }
        m.swap(col, piv);
        r.swap(col, piv);
        for row in col + 1..n {
            let f = m[row][col] / m[col][col];
            if f != 0.0 {
                for k in col..n {
                    m[row][k] -= f * m[col][k];
                }
                r[row] -= f * r[col];
            }
        }
    }
    let mut z = vec![0.0; n];
    for col in (0..n).rev() {
        let s: f64 = (col + 1..n).map(|k| m[col][k] * z[k]).sum();
        z[col] = (r[col] - s) / m[col][col];
    }
    Some(z)
}

fn combinations(k: usize, n: usize, mut f: impl FnMut(&[usize])) {
    if k > n {
        return;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        f(&idx);
        let mut i = k;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            if idx[i] != i + n - k {
                break;
            }
            if i == 0 && idx[0] == n - k {
                return;
            }
        }
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Vertex enumeration over rows and finite bounds. Requires a bounded
/// feasible region (all bounds finite). Returns the best objective and a
/// minimiser, or `INFEASIBLE`.
pub fn vertex_enumeration(lp: &DenseLp) -> (f64, Option<Vec<f64>>) {
    let n = lp.n();
    let mut planes: Vec<(Vec<f64>, f64)> =
        lp.rows.iter().map(|(a, _, b)| (a.clone(), *b)).collect();
    for j in 0..n {
        let mut e = vec![0.0; n];
        e[j] = 1.0;
        planes.push((e.clone(), lp.lower[j]));
        planes.push((e, lp.upper[j]));
    }
    let mut best = INFEASIBLE;
    let mut arg = None;
    combinations(n, planes.len(), |sel| {
        let m: Vec<Vec<f64>> = sel.iter().map(|&s| planes[s].0.clone()).collect();
        let r: Vec<f64> = sel.iter().map(|&s| planes[s].1).collect();
        if let Some(z) = gauss_solve(m, r) {
            if lp.is_feasible(&z, 1e-9) {
                let obj = lp.objective(&z);
                if obj < best {
                    best = obj;
                    arg = Some(z);
                }
            }
        }
    });
    (best, arg)
}

/// Exhaustive enumeration of all binary assignments; the continuous part of
/// each fixing is solved by vertex enumeration.
pub fn binary_enumeration(lp: &DenseLp) -> (f64, Option<Vec<f64>>) {
    let bins: Vec<usize> = (0..lp.n()).filter(|&j| lp.integer[j]).collect();
    let conts: Vec<usize> = (0..lp.n()).filter(|&j| !lp.integer[j]).collect();
    let mut best = INFEASIBLE;
    let mut arg = None;
    for mask in 0u32..(1 << bins.len()) {
        let fixed: Vec<f64> = (0..bins.len()).map(|k| ((mask >> k) & 1) as f64).collect();
        let mut sub = DenseLp {
            cost: conts.iter().map(|&j| lp.cost[j]).collect(),
            rows: Vec::new(),
            lower: conts.iter().map(|&j| lp.lower[j]).collect(),
            upper: conts.iter().map(|&j| lp.upper[j]).collect(),
            integer: vec![false; conts.len()],
        };
        let mut base = 0.0;
        for (k, &j) in bins.iter().enumerate() {
            base += lp.cost[j] * fixed[k];
        }
        let mut trivially_infeasible = false;
        for (a, sense, b) in &lp.rows {
            let shift: f64 = bins.iter().enumerate().map(|(k, &j)| a[j] * fixed[k]).sum();
            let ac: Vec<f64> = conts.iter().map(|&j| a[j]).collect();
            if ac.iter().all(|&v| v == 0.0) {
                let ok = match sense {
                    Sense::Le => shift <= b + 1e-9,
                    Sense::Ge => shift >= b - 1e-9,
                    Sense::Eq => (shift - b).abs() <= 1e-9,
                };
                trivially_infeasible |= !ok;
            } else {
                sub.rows.push((ac, *sense, b - shift));
            }
        }
        if trivially_infeasible {
            continue;
        }
        let (obj, z) = if conts.is_empty() {
            (0.0, Some(Vec::new()))
        } else {
            vertex_enumeration(&sub)
        };
        if obj.is_finite() && base + obj < best {
            best = base + obj;
            let z = z.unwrap();
            let mut x = vec![0.0; lp.n()];
            for (k, &j) in bins.iter().enumerate() {
                x[j] = fixed[k];
            }
            for (k, &j) in conts.iter().enumerate() {
                x[j] = z[k];
            }
            arg = Some(x);
        }
    }
    (best, arg)
}

fn random_sense(rng: &mut impl Rng) -> Sense {
    match rng.gen_range(0..20) {
        0..=9 => Sense::Le,
        10..=16 => Sense::Ge,
        _ => Sense::Eq,
    }
}

/// Random bounded LP with at most 5 variables and 8 rows.
pub fn random_lp(rng: &mut impl Rng) -> DenseLp {
    let n = rng.gen_range(1..=5);
    let m = rng.gen_range(1..=8);
    let cost = (0..n).map(|_| rng.gen_range(-10..=10) as f64).collect();
    let rows = (0..m)
        .map(|_| {
            let a: Vec<f64> = (0..n)
                .map(|_| {
                    if rng.gen_bool(0.3) {
                        0.0
                    } else {
                        rng.gen_range(-5..=5) as f64
                    }
                })
                .collect();
            (a, random_sense(rng), rng.gen_range(-10..=20) as f64)
        })
        .collect();
    let lower = (0..n)
        .map(|_| if rng.gen_bool(0.8) { 0.0 } else { -3.0 })
        .collect();
    let upper = (0..n).map(|_| rng.gen_range(2..=10) as f64).collect();
    DenseLp {
        cost,
        rows,
        lower,
        upper,
        integer: vec![false; n],
    }
}

/// Random MILP with `bins` binaries (at most 10) and up to two bounded
/// continuous variables.
pub fn random_milp(rng: &mut impl Rng, bins: usize) -> DenseLp {
    let conts = rng.gen_range(0..=2);
    let n = bins + conts;
    let m = rng.gen_range(2..=6);
    let cost = (0..n).map(|_| rng.gen_range(-10..=10) as f64).collect();
    let rows = (0..m)
        .map(|_| {
            let a: Vec<f64> = (0..n)
                .map(|_| {
                    if rng.gen_bool(0.3) {
                        0.0
                    } else {
                        rng.gen_range(-6..=6) as f64
                    }
                })
                .collect();
            let sense = if rng.gen_bool(0.9) {
                random_sense(rng)
            } else {
                Sense::Le
            };
            let sense = if sense == Sense::Eq && conts == 0 {
                Sense::Le
            } else {
                sense
            };
            (
                a,
                sense,
                rng.gen_range(-4..=12) as f64 + 0.5 * rng.gen_range(0..2) as f64,
            )
        })
        .collect();
    let mut lower = vec![0.0; n];
    let mut upper = vec![1.0; n];
    let mut integer = vec![true; n];
    for j in bins..n {
        lower[j] = 0.0;
        upper[j] = rng.gen_range(2..=8) as f64;
        integer[j] = false;
    }
    DenseLp {
        cost,
        rows,
        lower,
        upper,
        integer,
    }
}

/// `i(1+i)^n / ((1+i)^n − 1)` in exact rational arithmetic, for `i = num/den`.
pub fn crf_exact(num: i64, den: i64, n: u32) -> BigRational {
    let one = BigRational::from_integer(BigInt::from(1));
    let i = BigRational::new(BigInt::from(num), BigInt::from(den));
    let base = &one + &i;
    let mut g = one.clone();
    for _ in 0..n {
        g = &g * &base;
    }
    &i * &g / (&g - &one)
}

pub fn rational_to_f64(r: &BigRational) -> f64 {
    let digits = 40u32;
    let scaled = r.numer() * BigInt::from(10).pow(digits) / r.denom();
    scaled.to_string().parse::<f64>().unwrap() / 10f64.powi(digits as i32)
}
