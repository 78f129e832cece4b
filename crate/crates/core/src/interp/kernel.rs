//! Dense Gaussian-elimination rank over a prime field, tuned for the fat
//! point interpolation matrices (up to ~1900 x 1711).
//!
//! Entries are stored fully reduced in `u64`; the modulus must fit 32 bits
//! so products fit a machine word. Reduction is Barrett-style with
//! `magic = floor(2^64 / p)`, giving a remainder below `2p` fixed by one
//! conditional subtraction.

/// Modular arithmetic context for a fixed prime `p < 2^32`.
#[derive(Clone, Copy, Debug)]
pub struct PrimeField {
    p: u64,
    magic: u64,
}

impl PrimeField {
    pub fn new(p: u64) -> PrimeField {
        assert!(p >= 2, "modulus too small");
        assert!(p < (1 << 32), "modulus must fit 32 bits for fast products");
        let magic = ((1u128 << 64) / p as u128) as u64;
        PrimeField { p, magic }
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    /// Reduce any `x < p^2 <= 2^64` modulo p.
    #[inline(always)]
    pub fn reduce(&self, x: u64) -> u64 {
        let q = ((x as u128 * self.magic as u128) >> 64) as u64;
        let r = x.wrapping_sub(q.wrapping_mul(self.p));
        if r >= self.p {
            r - self.p
        } else {
            r
        }
    }

    #[inline(always)]
    pub fn mul(&self, a: u64, b: u64) -> u64 {
        self.reduce(a * b)
    }

    #[inline(always)]
    pub fn add(&self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }

    #[inline(always)]
    pub fn sub(&self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }

    pub fn pow(&self, mut base: u64, mut exp: u64) -> u64 {
        let mut acc = 1u64;
        base %= self.p;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            exp >>= 1;
        }
        acc
    }

    /// Inverse by Fermat; `a` must be nonzero mod p.
    pub fn inv(&self, a: u64) -> u64 {
        debug_assert!(a % self.p != 0);
        self.pow(a, self.p - 2)
    }
}

/// Panel width of the blocked elimination.
const PANEL: usize = 3;

/// Rank of a dense row-major matrix over `field`; consumes the rows.
///
/// Blocked Gaussian elimination: pivots are gathered in panels of three and
/// the trailing matrix gets one fused update pass per panel, accumulating
/// `f0*p0 + f1*p1 + f2*p2` in a `u64` before a single Barrett reduction.
/// That bounds the modulus by `3*(p-1)^2 <= u64::MAX`; pivot rows are never
/// scaled (delayed normalization).
pub fn rank(field: &PrimeField, rows: &mut [Vec<u64>]) -> usize {
    let nrows = rows.len();
    if nrows == 0 {
        return 0;
    }
    let ncols = rows[0].len();
    let p = field.modulus() as u128;
    assert!(
        3 * (p - 1) * (p - 1) <= u64::MAX as u128,
        "blocked elimination needs 3*(p-1)^2 to fit u64"
    );
    let mut rank = 0;
    let mut col = 0;
    // pending panel factors per row
    let mut f = vec![[0u64; PANEL]; nrows];
    while col < ncols && rank < nrows {
        let mut npiv = 0;
        while npiv < PANEL && col < ncols && rank + npiv < nrows {
            // corrected value at (r, col): raw entry minus the pending
            // panel contributions (panel pivot rows are fully updated)
            let corrected = |rows: &[Vec<u64>], f: &[[u64; PANEL]], r: usize| {
                let mut v = rows[r][col];
                for k in 0..npiv {
                    v = field.sub(v, field.mul(f[r][k], rows[rank + k][col]));
                }
                v
            };
            let Some((r, v)) = ((rank + npiv)..nrows)
                .map(|r| (r, corrected(rows, &f, r)))
                .find(|&(_, v)| v != 0)
            else {
                col += 1;
                continue;
            };
            rows.swap(rank + npiv, r);
            f.swap(rank + npiv, r);
            // settle the new pivot row against the earlier panel pivots;
            // columns left of `col` are never read again
            for k in 0..npiv {
                let fk = f[rank + npiv][k];
                if fk == 0 {
                    continue;
                }
                let (head, tail) = rows.split_at_mut(rank + npiv);
                let pk = &head[rank + k][col..];
                for (x, &pv) in tail[0][col..].iter_mut().zip(pk) {
                    *x = field.sub(*x, field.mul(fk, pv));
                }
            }
            f[rank + npiv] = [0; PANEL];
            debug_assert_eq!(rows[rank + npiv][col], v);
            let inv = field.inv(v);
            for r in (rank + npiv + 1)..nrows {
                f[r][npiv] = field.mul(corrected(rows, &f, r), inv);
            }
            npiv += 1;
            col += 1;
        }
        if npiv == 0 {
            break;
        }
        // fused trailing update over the surviving columns
        let (pivots, rest) = rows.split_at_mut(rank + npiv);
        let p0 = &pivots[rank][col..];
        let p1 = &pivots[(rank + 1).min(rank + npiv - 1)][col..];
        let p2 = &pivots[(rank + 2).min(rank + npiv - 1)][col..];
        for (ri, row) in rest.iter_mut().enumerate() {
            let [f0, f1, f2] = f[rank + npiv + ri];
            f[rank + npiv + ri] = [0; PANEL];
            let row = &mut row[col..];
            match npiv {
                3 => {
                    for (((x, &a), &b), &c) in
                        row.iter_mut().zip(p0).zip(p1).zip(p2)
                    {
                        *x = field.sub(*x, field.reduce(f0 * a + f1 * b + f2 * c));
                    }
                }
                2 => {
                    for ((x, &a), &b) in row.iter_mut().zip(p0).zip(p1) {
                        *x = field.sub(*x, field.reduce(f0 * a + f1 * b));
                    }
                }
                _ => {
                    for (x, &a) in row.iter_mut().zip(p0) {
                        *x = field.sub(*x, field.reduce(f0 * a));
                    }
                }
            }
        }
        rank += npiv;
    }
    rank
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn field_ops() {
        for &p in &[2147483647u64, 2147483659, 4294967291] {
            let f = PrimeField::new(p);
            assert_eq!(f.mul(p - 1, p - 1), f.reduce((p - 1) * (p - 1) % p + 0));
            assert_eq!(f.mul(p - 1, p - 1), 1); // (-1)^2
            assert_eq!(f.add(p - 1, 1), 0);
            assert_eq!(f.sub(0, 1), p - 1);
            for a in [1u64, 2, 12345, p - 2] {
                assert_eq!(f.mul(a, f.inv(a)), 1);
            }
        }
    }

    #[test]
    fn rank_examples() {
        let f = PrimeField::new(2147483647);
        let mut m = vec![vec![1, 2, 3], vec![2, 4, 6], vec![0, 1, 1]];
        assert_eq!(rank(&f, &mut m), 2);
        let mut id = vec![vec![1, 0], vec![0, 1]];
        assert_eq!(rank(&f, &mut id), 2);
        let mut z = vec![vec![0u64; 4]; 3];
        assert_eq!(rank(&f, &mut z), 0);
        // wide and tall
        let mut w = vec![vec![1, 1, 1, 1]];
        assert_eq!(rank(&f, &mut w), 1);
        let mut t = vec![vec![1], vec![2], vec![3]];
        assert_eq!(rank(&f, &mut t), 1);
    }

    #[test]
    fn rank_vandermonde() {
        // Vandermonde at distinct points has full rank
        let f = PrimeField::new(2147483647);
        let pts = [3u64, 5, 7, 11, 13];
        let mut m: Vec<Vec<u64>> = pts
            .iter()
            .map(|&x| (0..5).map(|k| f.pow(x, k)).collect())
            .collect();
        assert_eq!(rank(&f, &mut m), 5);
    }
}
