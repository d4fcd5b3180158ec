//! A presentation of K₀ read off `S_2`: generators are isomorphism classes of
//! objects, and each `A ↣ B ↠ B/A` gives `[B] = [A] + [B/A]`.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::category::Waldhausen;
use crate::error::{Error, Result};
use crate::limits::Limits;
use crate::sdot::{enumerate_sn, ArrowIndex};

/// `U·A·V = diag(d_1, ..., d_r, 0, ...)` with `d_i | d_{i+1}`, `d_i > 0`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SmithForm {
    pub invariant_factors: Vec<i64>,
    /// The column transform `V`, columns indexed like the input's columns.
    pub v: Vec<Vec<i64>>,
}

fn overflow() -> Error {
    Error::Malformed("integer overflow in Smith normal form".into())
}

fn sub_mul(a: i64, q: i64, b: i64) -> Result<i64> {
    q.checked_mul(b)
        .and_then(|p| a.checked_sub(p))
        .ok_or_else(overflow)
}

/// Smith normal form of an integer matrix given as rows.
pub fn smith_normal_form(rows: &[Vec<i64>], cols: usize) -> Result<SmithForm> {
    let mut a: Vec<Vec<i64>> = rows.to_vec();
    let m = a.len();
    let mut v: Vec<Vec<i64>> = (0..cols)
        .map(|i| (0..cols).map(|j| i64::from(i == j)).collect())
        .collect();
    let mut factors = Vec::new();
    let col_op = |a: &mut Vec<Vec<i64>>,
                  v: &mut Vec<Vec<i64>>,
                  dst: usize,
                  src: usize,
                  q: i64|
     -> Result<()> {
        // column dst -= q * column src
        for row in a.iter_mut() {
            row[dst] = sub_mul(row[dst], q, row[src])?;
        }
        for row in v.iter_mut() {
            row[dst] = sub_mul(row[dst], q, row[src])?;
        }
        Ok(())
    };
    let swap_cols = |a: &mut Vec<Vec<i64>>, v: &mut Vec<Vec<i64>>, x: usize, y: usize| {
        for row in a.iter_mut().chain(v.iter_mut()) {
            row.swap(x, y);
        }
    };
    for t in 0..m.min(cols) {
        loop {
            // smallest nonzero entry of the remaining block
            let pivot = (t..m)
                .flat_map(|i| (t..cols).map(move |j| (i, j)))
                .filter(|&(i, j)| a[i][j] != 0)
                .min_by_key(|&(i, j)| a[i][j].unsigned_abs());
            let Some((pi, pj)) = pivot else {
                return finish(factors, v);
            };
            a.swap(t, pi);
            swap_cols(&mut a, &mut v, t, pj);
            let p = a[t][t];
            let mut clean = true;
            for i in t + 1..m {
                let q = a[i][t].div_euclid(p);
                if q != 0 {
                    let pivot_row = a[t].clone();
                    for (x, y) in a[i].iter_mut().zip(&pivot_row) {
                        *x = sub_mul(*x, q, *y)?;
                    }
                }
                clean &= a[i][t] == 0;
            }
            for j in t + 1..cols {
                let q = a[t][j].div_euclid(p);
                if q != 0 {
                    col_op(&mut a, &mut v, j, t, q)?;
                }
                clean &= a[t][j] == 0;
            }
            if !clean {
                continue;
            }
            // the pivot must divide the rest of the block
            let bad = (t + 1..m)
                .flat_map(|i| (t + 1..cols).map(move |j| (i, j)))
                .find(|&(i, j)| a[i][j] % p != 0);
            match bad {
                Some((i, _)) => {
                    let r = a[i].clone();
                    for (x, y) in a[t].iter_mut().zip(&r) {
                        *x = x.checked_add(*y).ok_or_else(overflow)?;
                    }
                }
                None => {
                    factors.push(p.abs());
                    break;
                }
            }
        }
    }
    finish(factors, v)
}

fn finish(factors: Vec<i64>, v: Vec<Vec<i64>>) -> Result<SmithForm> {
    Ok(SmithForm {
        invariant_factors: factors,
        v,
    })
}

/// The K₀ presentation of a Waldhausen category at its bounded skeleton.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct K0Presentation {
    pub category: String,
    /// Labels of one representative per isomorphism class.
    pub generators: Vec<String>,
    /// Relation rows over the generators, deduplicated and sorted.
    pub relations: Vec<Vec<i64>>,
    /// Nonzero invariant factors of the relation matrix.
    pub invariant_factors: Vec<i64>,
    pub free_rank: usize,
    /// A basis of the integer functionals vanishing on every relation.
    pub kernel: Vec<Vec<i64>>,
}

impl K0Presentation {
    pub fn torsion(&self) -> Vec<i64> {
        self.invariant_factors
            .iter()
            .copied()
            .filter(|&d| d > 1)
            .collect()
    }

    pub fn is_trivial(&self) -> bool {
        self.free_rank == 0 && self.torsion().is_empty()
    }

    /// Whether the group is `ℤ` with the class of generator `g` as a generator.
    pub fn is_z_generated_by(&self, g: usize) -> bool {
        self.free_rank == 1 && self.torsion().is_empty() && self.kernel[0][g].abs() == 1
    }

    pub fn generator(&self, label: &str) -> Option<usize> {
        self.generators.iter().position(|g| g == label)
    }
}

impl fmt::Display for K0Presentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = self.torsion().iter().map(|d| format!("Z/{d}")).collect();
        parts.extend(std::iter::repeat_n("Z".to_string(), self.free_rank));
        if parts.is_empty() {
            f.write_str("0")
        } else {
            f.write_str(&parts.join(" + "))
        }
    }
}

pub fn k0_presentation<D: Waldhausen>(cat: &D, limits: &Limits) -> Result<K0Presentation> {
    let skeleton = cat.objects()?;
    let mut reps: Vec<usize> = Vec::new();
    let mut class = vec![0usize; skeleton.len()];
    for (i, a) in skeleton.iter().enumerate() {
        let mut found = None;
        for (c, &r) in reps.iter().enumerate() {
            if cat.find_iso(&skeleton[r], a)?.is_some() {
                found = Some(c);
                break;
            }
        }
        class[i] = found.unwrap_or_else(|| {
            reps.push(i);
            reps.len() - 1
        });
    }
    let position: std::collections::HashMap<&D::Obj, usize> =
        skeleton.iter().enumerate().map(|(i, a)| (a, i)).collect();
    let class_of = |a: &D::Obj| -> Result<usize> {
        position
            .get(a)
            .map(|&i| class[i])
            .ok_or_else(|| Error::Malformed(format!("{} is not in the skeleton", cat.obj_label(a))))
    };
    let ar = ArrowIndex::new(2, limits)?;
    let g = reps.len();
    let mut relations = BTreeSet::new();
    for x in enumerate_sn(cat, 2, limits)? {
        let mut row = vec![0i64; g];
        row[class_of(&x.objects[ar.object(0, 2)])?] += 1;
        row[class_of(&x.objects[ar.object(0, 1)])?] -= 1;
        row[class_of(&x.objects[ar.object(1, 2)])?] -= 1;
        if row.iter().any(|&c| c != 0) {
            relations.insert(row);
        }
    }
    let relations: Vec<Vec<i64>> = relations.into_iter().collect();
    let snf = smith_normal_form(&relations, g)?;
    let r = snf.invariant_factors.len();
    let kernel = (r..g)
        .map(|j| snf.v.iter().map(|row| row[j]).collect())
        .collect();
    Ok(K0Presentation {
        category: cat.name(),
        generators: reps.iter().map(|&i| cat.obj_label(&skeleton[i])).collect(),
        relations,
        invariant_factors: snf.invariant_factors,
        free_rank: g - r,
        kernel,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pointed::PointedSets;
    use crate::vect::VectFp;
    use itertools::Itertools;
    use proptest::prelude::*;

    fn gcd(a: i64, b: i64) -> i64 {
        if b == 0 {
            a.abs()
        } else {
            gcd(b, a % b)
        }
    }

    fn det(m: &[Vec<i64>]) -> i64 {
        if m.is_empty() {
            return 1;
        }
        (0..m.len())
            .map(|j| {
                let minor: Vec<Vec<i64>> = m[1..]
                    .iter()
                    .map(|r| {
                        r.iter()
                            .enumerate()
                            .filter(|&(c, _)| c != j)
                            .map(|(_, &x)| x)
                            .collect()
                    })
                    .collect();
                let s = if j % 2 == 0 { 1 } else { -1 };
                s * m[0][j] * det(&minor)
            })
            .sum()
    }

    /// Invariant factors from gcds of k×k minors.
    fn determinantal(rows: &[Vec<i64>], cols: usize) -> Vec<i64> {
        let mut out = Vec::new();
        let mut prev = 1;
        for k in 1..=rows.len().min(cols) {
            let mut d = 0;
            for rs in (0..rows.len()).combinations(k) {
                for cs in (0..cols).combinations(k) {
                    let sub: Vec<Vec<i64>> = rs
                        .iter()
                        .map(|&r| cs.iter().map(|&c| rows[r][c]).collect())
                        .collect();
                    d = gcd(d, det(&sub));
                }
            }
            if d == 0 {
                break;
            }
            out.push(d / prev);
            prev = d;
        }
        out
    }

    proptest! {
        #[test]
        fn smith_matches_determinantal_divisors(rows in prop::collection::vec(prop::collection::vec(-6i64..7, 4), 0..4)) {
            let s = smith_normal_form(&rows, 4).unwrap();
            prop_assert_eq!(s.invariant_factors, determinantal(&rows, 4));
        }

        #[test]
        fn kernel_columns_kill_every_row(rows in prop::collection::vec(prop::collection::vec(-5i64..6, 3), 0..4)) {
            let s = smith_normal_form(&rows, 3).unwrap();
            for j in s.invariant_factors.len()..3 {
                for r in &rows {
                    prop_assert_eq!((0..3).map(|c| r[c] * s.v[c][j]).sum::<i64>(), 0);
                }
            }
        }
    }

    #[test]
    fn smith_of_a_known_matrix() {
        let rows = vec![vec![2, 4, 4], vec![-6, 6, 12], vec![10, -4, -16]];
        assert_eq!(
            smith_normal_form(&rows, 3).unwrap().invariant_factors,
            vec![2, 6, 12]
        );
    }

    #[test]
    fn pointed_sets_give_z() {
        let l = Limits::default();
        let p = k0_presentation(&PointedSets::new(4), &l).unwrap();
        assert_eq!(p.to_string(), "Z");
        let two_points = p.generator("1").unwrap();
        assert!(p.is_z_generated_by(two_points));
    }

    #[test]
    fn vector_spaces_give_z() {
        let l = Limits::default();
        let v = VectFp::new(2, 2).unwrap();
        let p = k0_presentation(&v, &l).unwrap();
        assert_eq!(p.to_string(), "Z");
        assert_eq!(p.generators.len(), 3);
    }

    #[test]
    fn zero_category_gives_the_trivial_group() {
        let l = Limits::default();
        let p = k0_presentation(&PointedSets::new(1), &l).unwrap();
        assert!(p.is_trivial());
        assert_eq!(p.to_string(), "0");
    }
}
