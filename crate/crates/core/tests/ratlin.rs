use num_bigint::BigInt;
use proptest::prelude::*;
use rand::Rng;
use tensorcone::ratlin::{integer_sqrt_exact, intersect, kernel, rref, solve_linear, Matrix, Scalar, Subspace, Vector};
use tensorcone::tensor_space::seeded_rng;
use tensorcone::Error;

/// Fraction-free Bareiss determinant of an integer matrix, kept separate from
/// the library's elimination code.
fn bareiss_det(rows: &[Vec<i64>]) -> BigInt {
    let n = rows.len();
    let mut a: Vec<Vec<BigInt>> = rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect();
    let mut sign = BigInt::from(1);
    let mut prev = BigInt::from(1);
    for k in 0..n {
        if a[k][k] == BigInt::from(0) {
            match (k + 1..n).find(|&i| a[i][k] != BigInt::from(0)) {
                Some(i) => {
                    a.swap(i, k);
                    sign = -sign;
                }
                None => return BigInt::from(0),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                a[i][j] = (&a[i][j] * &a[k][k] - &a[i][k] * &a[k][j]) / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    sign * &a[n - 1][n - 1]
}

fn random_int_matrix(rng: &mut impl Rng, rows: usize, cols: usize, range: i64) -> Vec<Vec<i64>> {
    (0..rows).map(|_| (0..cols).map(|_| rng.gen_range(-range..=range)).collect()).collect()
}

fn to_matrix(rows: &[Vec<i64>]) -> Matrix {
    let refs: Vec<&[i64]> = rows.iter().map(|r| r.as_slice()).collect();
    Matrix::from_ints(&refs)
}

#[test]
fn rref_of_invertible_is_identity() {
    let mut rng = seeded_rng(11);
    let mut checked = 0;
    while checked < 20 {
        let rows = random_int_matrix(&mut rng, 5, 5, 4);
        if bareiss_det(&rows) == BigInt::from(0) {
            continue;
        }
        assert_eq!(rref(&to_matrix(&rows)), Matrix::identity(5));
        checked += 1;
    }
}

#[test]
fn singular_matrices_have_deficient_rank() {
    let mut rng = seeded_rng(12);
    for _ in 0..20 {
        let mut rows = random_int_matrix(&mut rng, 4, 4, 3);
        rows[3] = rows[0].iter().zip(&rows[1]).map(|(a, b)| 2 * a - b).collect();
        assert_eq!(bareiss_det(&rows), BigInt::from(0));
        assert!(to_matrix(&rows).rank() < 4);
    }
}

#[test]
fn kernel_examples() {
    assert_eq!(kernel(&Matrix::zeros(3, 3)).dim(), 3);
    assert_eq!(kernel(&Matrix::identity(3)).dim(), 0);
    let m = Matrix::from_ints(&[&[1, 1, 0]]);
    let k = kernel(&m);
    assert_eq!(k.dim(), 2);
    for b in k.basis_vectors() {
        assert!(m.mul_vec(&b).is_zero());
    }
}

#[test]
fn intersection_examples() {
    let e = |i| Vector::unit(3, i);
    let a = Subspace::span(3, &[e(0), e(1)]);
    let b = Subspace::span(3, &[e(1), e(2)]);
    assert_eq!(intersect(&a, &b).unwrap(), Subspace::span(3, &[e(1)]));
}

#[test]
fn random_intersection_matches_dimension_formula() {
    let mut rng = seeded_rng(13);
    for _ in 0..20 {
        let ra = random_int_matrix(&mut rng, 3, 6, 5);
        let rb = random_int_matrix(&mut rng, 4, 6, 5);
        let a = Subspace::row_space(&to_matrix(&ra));
        let b = Subspace::row_space(&to_matrix(&rb));
        let stacked: Vec<Vec<i64>> = ra.iter().chain(&rb).cloned().collect();
        let sum_dim = to_matrix(&stacked).rank();
        let meet = intersect(&a, &b).unwrap();
        assert_eq!(meet.dim(), a.dim() + b.dim() - sum_dim);
        assert!(a.contains_subspace(&meet) && b.contains_subspace(&meet));
        if a.dim() == 3 && b.dim() == 4 {
            assert_eq!(meet.dim(), 1);
        }
    }
}

#[test]
fn solve_examples() {
    let rhs = Vector::from_ints(&[3, -1, 2]);
    assert_eq!(solve_linear(&Matrix::identity(3), &rhs).unwrap(), rhs);
    let a = Matrix::from_ints(&[&[1, 0], &[0, 0]]);
    assert!(matches!(solve_linear(&a, &Vector::from_ints(&[0, 1])), Err(Error::Inconsistent)));
}

#[test]
fn random_consistent_systems_have_zero_residual() {
    let mut rng = seeded_rng(14);
    for _ in 0..30 {
        let a = to_matrix(&random_int_matrix(&mut rng, 4, 6, 5));
        let x = Vector::new((0..6).map(|_| Scalar::new(rng.gen_range(-9..=9), rng.gen_range(1..=5))).collect());
        let rhs = a.mul_vec(&x);
        let sol = solve_linear(&a, &rhs).unwrap();
        assert!((&a.mul_vec(&sol) - &rhs).is_zero());
    }
}

#[test]
fn integer_square_roots() {
    assert_eq!(integer_sqrt_exact(&BigInt::from(0)).unwrap(), BigInt::from(0));
    assert_eq!(integer_sqrt_exact(&BigInt::from(49)).unwrap(), BigInt::from(7));
    assert!(matches!(integer_sqrt_exact(&BigInt::from(50)), Err(Error::NotASquare)));
    let big = BigInt::from(3_000_000_019u64) * BigInt::from(3_000_000_019u64);
    assert_eq!(integer_sqrt_exact(&big).unwrap(), BigInt::from(3_000_000_019u64));
}

#[test]
fn scalars_serialize_as_fractions() {
    let v = Vector::new(vec![Scalar::new(-3, 6), Scalar::from(4), Scalar::zero()]);
    let json = serde_json::to_string(&v).unwrap();
    assert_eq!(json, r#"["-1/2","4","0"]"#);
    assert_eq!(serde_json::from_str::<Vector>(&json).unwrap(), v);
}

#[test]
fn arithmetic_beyond_machine_words() {
    let big = Scalar::from(i64::MAX);
    let square = &big * &big;
    assert_eq!(&(&square / &big) - &big, Scalar::zero());
    assert_eq!(square.numer(), BigInt::from(i64::MAX) * BigInt::from(i64::MAX));
    let tiny = Scalar::new(1, i64::MAX);
    assert_eq!(&tiny * &big, Scalar::one());
}

fn small_matrix() -> impl Strategy<Value = Vec<Vec<i64>>> {
    (1usize..5, 1usize..6).prop_flat_map(|(r, c)| proptest::collection::vec(proptest::collection::vec(-6i64..=6, c), r))
}

fn scalar() -> impl Strategy<Value = Scalar> {
    (-50i64..=50, 1i64..=12).prop_map(|(n, d)| Scalar::new(n, d))
}

proptest! {
    #[test]
    fn rank_nullity(rows in small_matrix()) {
        let m = to_matrix(&rows);
        prop_assert_eq!(m.rank() + kernel(&m).dim(), m.cols());
    }

    #[test]
    fn rref_is_idempotent_and_keeps_row_space(rows in small_matrix()) {
        let m = to_matrix(&rows);
        let r = rref(&m);
        prop_assert_eq!(rref(&r), r.clone());
        prop_assert_eq!(Subspace::row_space(&r), Subspace::row_space(&m));
    }

    #[test]
    fn intersection_is_commutative(a in small_matrix(), b in small_matrix()) {
        let cols = a[0].len();
        let b: Vec<Vec<i64>> = b.into_iter().map(|mut r| { r.resize(cols, 0); r }).collect();
        let (sa, sb) = (Subspace::row_space(&to_matrix(&a)), Subspace::row_space(&to_matrix(&b)));
        prop_assert_eq!(intersect(&sa, &sb).unwrap(), intersect(&sb, &sa).unwrap());
    }

    #[test]
    fn field_laws(a in scalar(), b in scalar(), c in scalar()) {
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&a + &b, &b + &a);
        if !a.is_zero() {
            prop_assert_eq!(&a * &a.recip().unwrap(), Scalar::one());
        }
    }

    #[test]
    fn scalar_order_matches_cross_multiplication(a in scalar(), b in scalar()) {
        let expected = (a.numer() * b.denom()).cmp(&(b.numer() * a.denom()));
        prop_assert_eq!(a.cmp(&b), expected);
    }
}
