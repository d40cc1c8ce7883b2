use balancelab::exactlin::{self, IntMatrix};
use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use proptest::prelude::*;

/// Fraction-free Bareiss elimination over i128, counting pivots.
fn bareiss_rank(rows: &[Vec<i64>]) -> usize {
    let mut a: Vec<Vec<i128>> = rows.iter().map(|r| r.iter().map(|&x| x as i128).collect()).collect();
    let (m, n) = (a.len(), a.first().map_or(0, Vec::len));
    let mut prev = 1i128;
    let mut r = 0;
    for c in 0..n {
        let Some(p) = (r..m).find(|&i| a[i][c] != 0) else {
            continue;
        };
        a.swap(r, p);
        for i in r + 1..m {
            for j in c + 1..n {
                a[i][j] = (a[r][c] * a[i][j] - a[i][c] * a[r][j]) / prev;
            }
            a[i][c] = 0;
        }
        prev = a[r][c];
        r += 1;
        if r == m {
            break;
        }
    }
    r
}

fn arb_matrix() -> impl Strategy<Value = Vec<Vec<i64>>> {
    (1usize..=6, 1usize..=8)
        .prop_flat_map(|(m, n)| proptest::collection::vec(proptest::collection::vec(-3i64..=3, n), m))
}

fn arb_sign_matrix() -> impl Strategy<Value = Vec<Vec<i64>>> {
    (1usize..=5, 1usize..=10)
        .prop_flat_map(|(m, n)| proptest::collection::vec(proptest::collection::vec(prop::bool::ANY, n), m))
        .prop_map(|rows| {
            rows.into_iter()
                .map(|r| r.into_iter().map(|b| if b { 1 } else { -1 }).collect())
                .collect()
        })
}

proptest! {
    #[test]
    fn rank_matches_bareiss(rows in arb_matrix()) {
        let m = IntMatrix::from_rows(&rows);
        prop_assert_eq!(exactlin::rank(&m), bareiss_rank(&rows));
    }

    #[test]
    fn kernel_is_annihilated_and_complete(rows in arb_matrix()) {
        let m = IntMatrix::from_rows(&rows);
        let k = exactlin::kernel_basis(&m);
        prop_assert_eq!(k.dim() + bareiss_rank(&rows), m.cols());
        for v in k.vectors() {
            prop_assert!(m.mul_vec(v).iter().all(Zero::is_zero));
        }
        // Kernel vectors are independent: stacking them gives full rank.
        if k.dim() > 0 {
            let stacked: Vec<Vec<i64>> = k.vectors().iter().map(|v| exactlin::to_i64_vec(v).unwrap()).collect();
            prop_assert_eq!(bareiss_rank(&stacked), k.dim());
        }
    }

    #[test]
    fn witnesses_are_valid(rows in arb_sign_matrix()) {
        let m = IntMatrix::from_rows(&rows);
        if let Some(w) = exactlin::positive_witness(&m) {
            prop_assert!(w.iter().all(Signed::is_positive));
            prop_assert!(m.mul_vec(&w).iter().all(Zero::is_zero));
        }
        if let Some(w) = exactlin::nonzero_witness(&m) {
            prop_assert!(w.iter().all(|x| !x.is_zero()));
            prop_assert!(m.mul_vec(&w).iter().all(Zero::is_zero));
        }
    }

    #[test]
    fn positive_witness_found_when_planted(rows in arb_sign_matrix(), extra in 1i64..4) {
        // Appending −(M·w) for a positive w makes the system c-balanced.
        let n = rows[0].len();
        let w: Vec<i64> = (0..n).map(|j| 1 + (j as i64 % extra)).collect();
        let planted: Vec<Vec<i64>> = rows
            .iter()
            .map(|r| {
                let s: i64 = r.iter().zip(&w).map(|(a, b)| a * b).sum();
                let mut r = r.clone();
                r.push(-s);
                r
            })
            .collect();
        let m = IntMatrix::from_rows(&planted);
        let mut full = w.clone();
        full.push(1);
        let big: Vec<BigInt> = full.iter().map(|&x| BigInt::from(x)).collect();
        prop_assert!(m.mul_vec(&big).iter().all(Zero::is_zero));
        prop_assert!(exactlin::positive_witness(&m).is_some());
    }
}

#[test]
fn rank_of_known_matrices() {
    assert_eq!(bareiss_rank(&[vec![1, 2], vec![2, 4]]), 1);
    assert_eq!(bareiss_rank(&[vec![0, 0], vec![0, 0]]), 0);
    assert_eq!(bareiss_rank(&[vec![1, 1, 1], vec![1, -1, 1], vec![-1, 1, 1]]), 3);
}
