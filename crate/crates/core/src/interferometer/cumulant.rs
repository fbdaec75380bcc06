//! Moment/cumulant bookkeeping for products of (possibly non-commuting)
//! operators.
//!
//! Operators are identified by their position `0..n` in a product. Blocks of
//! a partition keep the original left-to-right order, so ordered cumulants of
//! bosonic operators are handled as long as the caller's moment or cumulant
//! function respects that order.

use crate::scalar::{Cplx, Real};

/// All set partitions of `{0, .., n-1}`; blocks and their elements sorted.
///
/// The count is the Bell number `B(n)`; `n` up to 10 or so is practical.
pub fn set_partitions(n: usize) -> Vec<Vec<Vec<usize>>> {
    let mut out = Vec::new();
    let mut current: Vec<Vec<usize>> = Vec::new();
    fn rec(i: usize, n: usize, current: &mut Vec<Vec<usize>>, out: &mut Vec<Vec<Vec<usize>>>) {
        if i == n {
            out.push(current.clone());
            return;
        }
        for b in 0..current.len() {
            current[b].push(i);
            rec(i + 1, n, current, out);
            current[b].pop();
        }
        current.push(vec![i]);
        rec(i + 1, n, current, out);
        current.pop();
    }
    rec(0, n, &mut current, &mut out);
    out
}

fn factorial<T: Real>(k: usize) -> T {
    (1..=k).fold(T::one(), |acc, i| acc * T::from_usize(i).expect("small integer"))
}

fn sign_factorial<T: Real>(blocks: usize) -> T {
    let f = factorial::<T>(blocks - 1);
    if blocks % 2 == 0 {
        -f
    } else {
        f
    }
}

/// Joint cumulant `kappa(X_0 .. X_{n-1})` from ordered moments,
/// `sum_pi (|pi|-1)! (-1)^{|pi|-1} prod_B <prod_{j in B} X_j>`.
pub fn joint_cumulant<T, F>(n: usize, moment: F) -> Cplx<T>
where
    T: Real,
    F: Fn(&[usize]) -> Cplx<T>,
{
    set_partitions(n).iter().fold(Cplx::new(T::zero(), T::zero()), |acc, p| {
        let prod = p.iter().fold(Cplx::new(T::one(), T::zero()), |a, b| a * moment(b));
        acc + prod.scale(sign_factorial(p.len()))
    })
}

/// Moment `<X_0 .. X_{n-1}>` with the `n`-th order cumulant dropped, i.e.
/// expressed through lower moments only. For `n = 3`:
/// `<X1X2><X3> + <X1X3><X2> + <X1><X2X3> - 2<X1><X2><X3>`.
pub fn truncated_moment<T, F>(n: usize, moment: F) -> Cplx<T>
where
    T: Real,
    F: Fn(&[usize]) -> Cplx<T>,
{
    set_partitions(n)
        .iter()
        .filter(|p| p.len() > 1)
        .fold(Cplx::new(T::zero(), T::zero()), |acc, p| {
            let prod = p.iter().fold(Cplx::new(T::one(), T::zero()), |a, b| a * moment(b));
            acc - prod.scale(sign_factorial(p.len()))
        })
}

/// Moment `<X_0 .. X_{n-1}>` from cumulants: sum over partitions of the
/// product of block cumulants.
pub fn moment_from_cumulants<T, F>(n: usize, cumulant: F) -> Cplx<T>
where
    T: Real,
    F: Fn(&[usize]) -> Cplx<T>,
{
    set_partitions(n).iter().fold(Cplx::new(T::zero(), T::zero()), |acc, p| {
        acc + p.iter().fold(Cplx::new(T::one(), T::zero()), |a, b| a * cumulant(b))
    })
}

/// Covariance `<A B> - <A><B>` of the products `A = X_0 .. X_{k-1}` and
/// `B = X_k .. X_{n-1}`: the partition sum restricted to partitions with at
/// least one block touching both factors.
pub fn product_covariance<T, F>(k: usize, n: usize, cumulant: F) -> Cplx<T>
where
    T: Real,
    F: Fn(&[usize]) -> Cplx<T>,
{
    set_partitions(n)
        .iter()
        .filter(|p| p.iter().any(|b| b.iter().any(|&j| j < k) && b.iter().any(|&j| j >= k)))
        .fold(Cplx::new(T::zero(), T::zero()), |acc, p| {
            acc + p.iter().fold(Cplx::new(T::one(), T::zero()), |a, b| a * cumulant(b))
        })
}

/// Gaussian cumulant: means for single operators, ordered connected
/// two-point functions for pairs, zero above second order.
pub fn gaussian_cumulant<T, M, P>(block: &[usize], mean: M, pair: P) -> Cplx<T>
where
    T: Real,
    M: Fn(usize) -> Cplx<T>,
    P: Fn(usize, usize) -> Cplx<T>,
{
    match *block {
        [a] => mean(a),
        [a, b] => pair(a, b),
        _ => Cplx::new(T::zero(), T::zero()),
    }
}

/// Wick moment of a zero-mean Gaussian product: sum over order-preserving
/// perfect matchings of products of `pair(i, j)`, `i < j`.
pub fn wick_moment<T, P>(n: usize, pair: P) -> Cplx<T>
where
    T: Real,
    P: Fn(usize, usize) -> Cplx<T>,
{
    fn rec<T: Real, P: Fn(usize, usize) -> Cplx<T>>(rest: &[usize], pair: &P) -> Cplx<T> {
        match rest {
            [] => Cplx::new(T::one(), T::zero()),
            [first, tail @ ..] => {
                let mut acc = Cplx::new(T::zero(), T::zero());
                for (idx, &j) in tail.iter().enumerate() {
                    let mut remaining: Vec<usize> = tail.to_vec();
                    remaining.remove(idx);
                    acc += pair(*first, j) * rec(&remaining, pair);
                }
                acc
            }
        }
    }
    if n % 2 == 1 {
        return Cplx::new(T::zero(), T::zero());
    }
    let idx: Vec<usize> = (0..n).collect();
    rec(&idx, &pair)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn bell_numbers() {
        let bell = [1, 1, 2, 5, 15, 52, 203];
        for (n, &b) in bell.iter().enumerate() {
            assert_eq!(set_partitions(n).len(), b);
        }
    }

    #[test]
    fn third_order_truncation_identity() {
        // arbitrary commuting "moments" keyed by index set
        let x = [1.3, -0.7, 2.1];
        let pair = |a: usize, b: usize| 0.3 * (a + 1) as f64 + 0.11 * (b * b) as f64;
        let moment = |blk: &[usize]| -> Cplx<f64> {
            match *blk {
                [a] => Cplx::new(x[a], 0.0),
                [a, b] => Cplx::new(pair(a, b), 0.0),
                _ => Cplx::new(99.0, 0.0),
            }
        };
        let got = truncated_moment(3, moment).re;
        let expect = pair(0, 1) * x[2] + pair(0, 2) * x[1] + x[0] * pair(1, 2) - 2.0 * x[0] * x[1] * x[2];
        assert_relative_eq!(got, expect, max_relative = 1e-14);
    }

    #[test]
    fn cumulants_of_a_gaussian_vanish_above_two() {
        // real Gaussian variables: mean m, covariance c
        let m = [0.5, -1.0, 2.0, 0.3];
        let c = [[1.0, 0.2, 0.1, 0.0], [0.2, 2.0, -0.3, 0.4], [0.1, -0.3, 1.5, 0.2], [0.0, 0.4, 0.2, 0.7]];
        let cum = |b: &[usize]| gaussian_cumulant(b, |a| Cplx::new(m[a], 0.0), |a, b| Cplx::new(c[a][b], 0.0));
        let mom = |b: &[usize]| {
            let sub: Vec<usize> = b.to_vec();
            moment_from_cumulants(sub.len(), |blk: &[usize]| {
                let mapped: Vec<usize> = blk.iter().map(|&i| sub[i]).collect();
                cum(&mapped)
            })
        };
        let k4 = joint_cumulant(4, |b| mom(b));
        assert!(k4.norm() < 1e-12);
        let k2 = joint_cumulant(2, |b| mom(b));
        assert_relative_eq!(k2.re, c[0][1], max_relative = 1e-12);
        // zero-mean fourth moment equals the Wick sum
        let w = wick_moment(4, |a, b| Cplx::new(c[a][b], 0.0)).re;
        let expect = c[0][1] * c[2][3] + c[0][2] * c[1][3] + c[0][3] * c[1][2];
        assert_relative_eq!(w, expect, max_relative = 1e-14);
        assert_eq!(wick_moment(3, |a, b| Cplx::new(c[a][b], 0.0)).re, 0.0);
    }

    #[test]
    fn product_covariance_matches_moment_difference() {
        let m = [0.5, -1.0, 2.0, 0.3];
        let c = [[1.0, 0.2, 0.1, 0.0], [0.2, 2.0, -0.3, 0.4], [0.1, -0.3, 1.5, 0.2], [0.0, 0.4, 0.2, 0.7]];
        let cum = |b: &[usize]| gaussian_cumulant(b, |a| Cplx::new(m[a], 0.0), |a, b| Cplx::new(c[a][b], 0.0));
        let full = moment_from_cumulants(4, cum).re;
        let a = moment_from_cumulants(2, cum).re;
        let b = moment_from_cumulants(2, |blk: &[usize]| {
            let mapped: Vec<usize> = blk.iter().map(|&i| i + 2).collect();
            cum(&mapped)
        })
        .re;
        assert_relative_eq!(product_covariance(2, 4, cum).re, full - a * b, max_relative = 1e-12);
    }
}
