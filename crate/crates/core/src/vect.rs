//! Finite-dimensional vector spaces over a prime field, skeletal: the object `d` is `F_p^d`.

use serde::{Deserialize, Serialize};

use crate::category::{
    pushout_factor_via_coequalizer, pushout_via_coequalizer, Category, Cocomplete, CoeqWitness,
    Coequalizer, Pushout, Waldhausen,
};
use crate::error::{Error, Result};
use crate::limits::Limits;

/// A `rows x cols` matrix over `F_p`, column-major. It represents a linear map `F_p^cols -> F_p^rows`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Mat {
    pub rows: u32,
    pub cols: u32,
    pub data: Vec<u8>,
}

impl Mat {
    pub fn zeros(rows: u32, cols: u32) -> Self {
        Mat {
            rows,
            cols,
            data: vec![0; (rows * cols) as usize],
        }
    }

    pub fn identity(n: u32) -> Self {
        let mut m = Mat::zeros(n, n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    pub fn get(&self, r: u32, c: u32) -> u8 {
        self.data[(c * self.rows + r) as usize]
    }

    pub fn set(&mut self, r: u32, c: u32, v: u8) {
        self.data[(c * self.rows + r) as usize] = v;
    }

    pub fn column(&self, c: u32) -> &[u8] {
        let r = self.rows as usize;
        &self.data[c as usize * r..(c as usize + 1) * r]
    }

    pub fn mul(&self, other: &Mat, p: u8) -> Mat {
        let p = p as u32;
        let mut out = Mat::zeros(self.rows, other.cols);
        for c in 0..other.cols {
            for k in 0..self.cols {
                let b = other.get(k, c) as u32;
                if b == 0 {
                    continue;
                }
                for r in 0..self.rows {
                    let v = (out.get(r, c) as u32 + self.get(r, k) as u32 * b) % p;
                    out.set(r, c, v as u8);
                }
            }
        }
        out
    }
}

fn inv(a: u8, p: u8) -> u8 {
    // Fermat; p is prime
    let (mut base, mut e, mut acc) = (a as u32, p as u32 - 2, 1u32);
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base % p as u32;
        }
        base = base * base % p as u32;
        e >>= 1;
    }
    acc as u8
}

/// Reduced row echelon form of a list of row vectors, pivoting on the first
/// available row in each column. Returns the nonzero rows and their pivot columns.
pub fn rref(mut rows: Vec<Vec<u8>>, p: u8) -> (Vec<Vec<u8>>, Vec<usize>) {
    let width = rows.first().map_or(0, |r| r.len());
    let pp = p as u32;
    let mut pivots = Vec::new();
    let mut top = 0;
    for col in 0..width {
        let Some(found) = (top..rows.len()).find(|&r| rows[r][col] != 0) else {
            continue;
        };
        rows.swap(top, found);
        let s = inv(rows[top][col], p) as u32;
        for x in rows[top].iter_mut() {
            *x = (*x as u32 * s % pp) as u8;
        }
        for r in 0..rows.len() {
            if r != top && rows[r][col] != 0 {
                let factor = rows[r][col] as u32;
                for c in 0..width {
                    let v = (rows[r][c] as u32 + pp * pp - factor * rows[top][c] as u32 % pp) % pp;
                    rows[r][c] = v as u8;
                }
            }
        }
        pivots.push(col);
        top += 1;
        if top == rows.len() {
            break;
        }
    }
    rows.truncate(top);
    (rows, pivots)
}

pub fn rank(m: &Mat, p: u8) -> usize {
    let cols: Vec<Vec<u8>> = (0..m.cols).map(|c| m.column(c).to_vec()).collect();
    rref(cols, p).1.len()
}

/// `F_p`-vector spaces of dimension at most `max_dim` (the enumerated skeleton),
/// cofibrations the injections, weak equivalences the isomorphisms.
#[derive(Debug, Clone)]
pub struct VectFp {
    pub p: u8,
    pub max_dim: u32,
    pub limits: Limits,
}

impl VectFp {
    pub fn new(p: u8, max_dim: u32) -> Result<Self> {
        if p < 2 || (2..p).any(|d| p.is_multiple_of(d)) {
            return Err(Error::Malformed(format!("vect_fp needs a prime, got {p}")));
        }
        Ok(VectFp {
            p,
            max_dim,
            limits: Limits::default(),
        })
    }

    pub fn with_limits(mut self, limits: Limits) -> Self {
        self.limits = limits;
        self
    }

    /// Matrix from rows, for tests and examples.
    pub fn matrix(&self, rows: u32, cols: u32, row_major: &[u8]) -> Mat {
        let mut m = Mat::zeros(rows, cols);
        for r in 0..rows {
            for c in 0..cols {
                m.set(r, c, row_major[(r * cols + c) as usize] % self.p);
            }
        }
        m
    }

    fn invert(&self, m: &Mat) -> Option<Mat> {
        let n = m.rows;
        if m.cols != n {
            return None;
        }
        // row-reduce [m | I]
        let rows: Vec<Vec<u8>> = (0..n)
            .map(|r| {
                let mut row: Vec<u8> = (0..n).map(|c| m.get(r, c)).collect();
                row.extend((0..n).map(|c| u8::from(c == r)));
                row
            })
            .collect();
        let (red, piv) = rref(rows, self.p);
        if piv.len() != n as usize || piv.iter().enumerate().any(|(i, &c)| c != i) {
            return None;
        }
        let mut out = Mat::zeros(n, n);
        for r in 0..n {
            for c in 0..n {
                out.set(r, c, red[r as usize][(n + c) as usize]);
            }
        }
        Some(out)
    }
}

impl Category for VectFp {
    type Obj = u32;
    type Mor = Mat;
    type Witness = CoeqWitness<u32, Mat>;

    fn name(&self) -> String {
        format!("vect_fp({},{})", self.p, self.max_dim)
    }

    fn dom(&self, f: &Mat) -> u32 {
        f.cols
    }

    fn cod(&self, f: &Mat) -> u32 {
        f.rows
    }

    fn identity(&self, a: &u32) -> Mat {
        Mat::identity(*a)
    }

    fn compose(&self, g: &Mat, f: &Mat) -> Result<Mat> {
        if f.rows != g.cols {
            return Err(Error::Malformed(format!(
                "cannot compose {} after {}",
                self.mor_label(g),
                self.mor_label(f)
            )));
        }
        Ok(g.mul(f, self.p))
    }

    fn is_iso(&self, f: &Mat) -> bool {
        f.rows == f.cols && rank(f, self.p) == f.cols as usize
    }

    fn objects(&self) -> Result<Vec<u32>> {
        Limits::check(
            "skeleton objects",
            self.max_dim as usize + 1,
            self.limits.max_objects,
        )?;
        Ok((0..=self.max_dim).collect())
    }

    fn hom(&self, a: &u32, b: &u32) -> Result<Vec<Mat>> {
        let entries = (*a * *b) as usize;
        let count = (self.p as usize)
            .checked_pow(entries as u32)
            .unwrap_or(usize::MAX);
        Limits::check("hom-set size", count, self.limits.max_morphisms)?;
        let mut out = Vec::with_capacity(count);
        let mut data = vec![0u8; entries];
        loop {
            out.push(Mat {
                rows: *b,
                cols: *a,
                data: data.clone(),
            });
            let mut i = entries;
            loop {
                if i == 0 {
                    return Ok(out);
                }
                i -= 1;
                if data[i] + 1 < self.p {
                    data[i] += 1;
                    for x in data.iter_mut().skip(i + 1) {
                        *x = 0;
                    }
                    break;
                }
            }
        }
    }

    fn pushout(&self, f: &Mat, g: &Mat) -> Result<Option<Pushout<Self>>> {
        pushout_via_coequalizer(self, f, g).map(Some)
    }

    fn pushout_factor(&self, p: &Pushout<Self>, u: &Mat, v: &Mat) -> Result<Mat> {
        pushout_factor_via_coequalizer(self, p, u, v)
    }

    fn obj_label(&self, a: &u32) -> String {
        format!("F{}^{}", self.p, a)
    }

    fn mor_label(&self, f: &Mat) -> String {
        let rows: Vec<String> = (0..f.rows)
            .map(|r| {
                (0..f.cols)
                    .map(|c| f.get(r, c).to_string())
                    .collect::<Vec<_>>()
                    .join(" ")
            })
            .collect();
        format!("{}->{}[{}]", f.cols, f.rows, rows.join(";"))
    }

    fn find_iso_under(&self, x: &u32, y: &u32, xs: &[Mat], ys: &[Mat]) -> Result<Option<Mat>> {
        if x != y {
            return Ok(None);
        }
        // Solve phi * A = B where A, B stack the leg columns.
        let mut a_cols = Vec::new();
        let mut b_cols = Vec::new();
        for (a, b) in xs.iter().zip(ys) {
            if a.cols != b.cols || a.rows != *x || b.rows != *y {
                return Ok(None);
            }
            for c in 0..a.cols {
                a_cols.push(a.column(c).to_vec());
                b_cols.push(b.column(c).to_vec());
            }
        }
        let n = *x as usize;
        // pick a basis among the columns of A
        let mut basis = Vec::new();
        let mut chosen: Vec<Vec<u8>> = Vec::new();
        for (i, col) in a_cols.iter().enumerate() {
            let mut trial = chosen.clone();
            trial.push(col.clone());
            if rref(trial, self.p).1.len() > chosen.len() {
                chosen.push(col.clone());
                basis.push(i);
            }
            if basis.len() == n {
                break;
            }
        }
        if basis.len() < n {
            // legs do not span; fall back to scanning
            let mut found = None;
            for phi in self.hom(x, y)? {
                if self.is_iso(&phi) && xs.iter().zip(ys).all(|(a, b)| phi.mul(a, self.p) == *b) {
                    found = Some(phi);
                    break;
                }
            }
            return Ok(found);
        }
        let mut a_s = Mat::zeros(*x, *x);
        let mut b_s = Mat::zeros(*y, *x);
        for (k, &i) in basis.iter().enumerate() {
            for r in 0..n {
                a_s.set(r as u32, k as u32, a_cols[i][r]);
                b_s.set(r as u32, k as u32, b_cols[i][r]);
            }
        }
        let Some(a_inv) = self.invert(&a_s) else {
            return Ok(None);
        };
        let phi = b_s.mul(&a_inv, self.p);
        let ok = self.is_iso(&phi) && xs.iter().zip(ys).all(|(a, b)| phi.mul(a, self.p) == *b);
        Ok(ok.then_some(phi))
    }
}

impl Cocomplete for VectFp {
    fn coproduct(&self, objects: &[u32]) -> Result<(u32, Vec<Mat>)> {
        let total: u32 = objects.iter().sum();
        Limits::check(
            "vector space dimension",
            total as usize,
            self.limits.max_set_size,
        )?;
        let mut offset = 0;
        let mut inj = Vec::with_capacity(objects.len());
        for &d in objects {
            let mut m = Mat::zeros(total, d);
            for i in 0..d {
                m.set(offset + i, i, 1);
            }
            inj.push(m);
            offset += d;
        }
        Ok((total, inj))
    }

    fn copair(&self, summands: &[u32], maps: &[Mat], target: &u32) -> Result<Mat> {
        if summands.len() != maps.len() {
            return Err(Error::Malformed("copair needs one map per summand".into()));
        }
        let mut data = Vec::new();
        let mut cols = 0;
        for (&d, m) in summands.iter().zip(maps) {
            if m.cols != d || m.rows != *target {
                return Err(Error::Malformed(format!(
                    "copair leg {} has the wrong type",
                    self.mor_label(m)
                )));
            }
            // column-major: horizontal concatenation is concatenation of data
            data.extend_from_slice(&m.data);
            cols += d;
        }
        Ok(Mat {
            rows: *target,
            cols,
            data,
        })
    }

    fn coequalizer(&self, f: &Mat, g: &Mat) -> Result<Coequalizer<Self>> {
        if f.rows != g.rows || f.cols != g.cols {
            return Err(Error::Malformed("coequalizer needs a parallel pair".into()));
        }
        let p = self.p;
        let b = f.rows as usize;
        // image of f - g, as row vectors in F_p^b
        let diffs: Vec<Vec<u8>> = (0..f.cols)
            .map(|c| {
                f.column(c)
                    .iter()
                    .zip(g.column(c))
                    .map(|(&x, &y)| ((x as u16 + p as u16 - y as u16) % p as u16) as u8)
                    .collect()
            })
            .collect();
        let (red, pivots) = rref(diffs, p);
        let free: Vec<usize> = (0..b).filter(|c| !pivots.contains(c)).collect();
        let q = free.len() as u32;
        let mut quotient = Mat::zeros(q, b as u32);
        let mut section = Mat::zeros(b as u32, q);
        for (k, &c) in free.iter().enumerate() {
            quotient.set(k as u32, c as u32, 1);
            section.set(c as u32, k as u32, 1);
        }
        // a pivot coordinate e_c equals -sum_j r[j] e_j modulo the image
        for (row, &c) in red.iter().zip(&pivots) {
            for (k, &j) in free.iter().enumerate() {
                if row[j] != 0 {
                    quotient.set(k as u32, c as u32, (p - row[j]) % p);
                }
            }
        }
        Ok(Coequalizer {
            object: q,
            quotient,
            section,
        })
    }
}

impl Waldhausen for VectFp {
    fn zero(&self) -> u32 {
        0
    }

    fn from_zero(&self, a: &u32) -> Mat {
        Mat::zeros(*a, 0)
    }

    fn to_zero(&self, a: &u32) -> Mat {
        Mat::zeros(0, *a)
    }

    fn is_cofibration(&self, f: &Mat) -> bool {
        rank(f, self.p) == f.cols as usize
    }

    fn is_weq(&self, f: &Mat) -> bool {
        self.is_iso(f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_prime() {
        assert!(VectFp::new(4, 2).is_err());
        assert!(VectFp::new(5, 2).is_ok());
    }

    #[test]
    fn hom_counts() {
        let v = VectFp::new(3, 2).unwrap();
        assert_eq!(v.hom(&2, &1).unwrap().len(), 9);
        assert_eq!(v.hom(&0, &2).unwrap().len(), 1);
    }

    #[test]
    fn cokernel_quotient_kills_image() {
        let v = VectFp::new(3, 3).unwrap();
        // A = F^1 -> F^3 via (1,2,0)
        let f = v.matrix(3, 1, &[1, 2, 0]);
        let z = Mat::zeros(3, 1);
        let q = v.coequalizer(&f, &z).unwrap();
        assert_eq!(q.object, 2);
        assert_eq!(v.compose(&q.quotient, &f).unwrap(), Mat::zeros(2, 1));
        assert_eq!(
            v.compose(&q.quotient, &q.section).unwrap(),
            Mat::identity(2)
        );
    }

    #[test]
    fn pushout_of_line_into_plane_twice() {
        let v = VectFp::new(2, 3).unwrap();
        let f = v.matrix(2, 1, &[1, 0]);
        let p = v.pushout(&f, &f).unwrap().unwrap();
        assert_eq!(p.object, 3);
        assert!(v.is_cofibration(&p.left) && v.is_cofibration(&p.right));
        assert_eq!(
            v.compose(&p.left, &f).unwrap(),
            v.compose(&p.right, &f).unwrap()
        );
    }

    #[test]
    fn iso_under_legs() {
        let v = VectFp::new(2, 3).unwrap();
        let a = v.matrix(2, 1, &[1, 0]);
        let b = v.matrix(2, 1, &[1, 1]);
        let phi = v
            .find_iso_under(&2, &2, std::slice::from_ref(&a), std::slice::from_ref(&b))
            .unwrap()
            .unwrap();
        assert_eq!(phi.mul(&a, 2), b);
    }
}
